//! Slotted asynchronous OR-channel simulation and sliding-window detection.
//!
//! Time is discrete: one bit per slot, shifts are whole slots. An activation
//! occupies the slots `[start, start + n)`; the channel output in a slot is
//! the OR over all activations covering it, idle users contributing zeros.
//!
//! Two detectors scan complete windows of length `n`. The stateless one
//! declares `(user, start)` for every window covering that user's word and
//! is the design-time reference; the stateful one additionally suppresses a
//! user for `n` slots after declaring it, which is how a receiver would run
//! the code in operation.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::core::{Code, CodeError, Codeword};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("activation of user {user} at slot {start} ends at {end}, beyond horizon {horizon}")]
    HorizonOverrun {
        user: usize,
        start: usize,
        end: usize,
        horizon: usize,
    },
    #[error("user {user} overlaps itself: activations at {first} and {second} are closer than {word_len} slots")]
    SelfOverlap {
        user: usize,
        first: usize,
        second: usize,
        word_len: usize,
    },
    #[error("activation names user {user}, but the code has only {users} users")]
    UnknownUser { user: usize, users: usize },
    #[error("stream of {len} slots is shorter than one window of {window} slots")]
    StreamTooShort { len: usize, window: usize },
    #[error("occupancy violated at slot {slot}: {actual} active, expected {expected}")]
    Occupancy {
        slot: usize,
        actual: usize,
        expected: String,
    },
    #[error("cannot build a schedule: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Per-slot occupancy regime of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleMode {
    /// At most `M` users active in every slot.
    AtMost,
    /// Exactly `M` users active in every interior slot; edge slots may hold
    /// fewer.
    Exactly,
}

/// One transmission: `user` sends its whole word starting at slot `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Activation {
    pub user: usize,
    pub start: usize,
}

/// The ground truth driving a simulated channel: who transmits when, over a
/// horizon of `horizon` slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivitySchedule {
    pub horizon: usize,
    pub mode: ScheduleMode,
    pub activations: Vec<Activation>,
}

impl ActivitySchedule {
    /// Number of activations whose window covers each slot.
    pub fn occupancy(&self, word_len: usize) -> Vec<usize> {
        let mut counts = vec![0usize; self.horizon];
        for a in &self.activations {
            let end = (a.start + word_len).min(self.horizon);
            for count in &mut counts[a.start..end] {
                *count += 1;
            }
        }
        counts
    }

    /// Checks every schedule invariant against a word length and activity
    /// bound: activations fit the horizon, no user overlaps itself, and the
    /// per-slot occupancy respects the mode. Interior slots are
    /// `[n-1, horizon-n]`, where complete windows exist on both sides.
    pub fn validate(&self, word_len: usize, max_active: usize) -> Result<(), ChannelError> {
        check_fit_and_self_overlap(&self.activations, word_len, self.horizon)?;
        let occupancy = self.occupancy(word_len);
        for (slot, &count) in occupancy.iter().enumerate() {
            if count > max_active {
                return Err(ChannelError::Occupancy {
                    slot,
                    actual: count,
                    expected: format!("<= {max_active}"),
                });
            }
            let interior = slot + 1 >= word_len && slot + word_len <= self.horizon;
            if self.mode == ScheduleMode::Exactly && interior && count != max_active {
                return Err(ChannelError::Occupancy {
                    slot,
                    actual: count,
                    expected: format!("== {max_active}"),
                });
            }
        }
        Ok(())
    }
}

fn check_fit_and_self_overlap(
    activations: &[Activation],
    word_len: usize,
    horizon: usize,
) -> Result<(), ChannelError> {
    // Ordered map, so the reported violation does not vary between runs.
    let mut per_user: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in activations {
        if a.start + word_len > horizon {
            return Err(ChannelError::HorizonOverrun {
                user: a.user,
                start: a.start,
                end: a.start + word_len,
                horizon,
            });
        }
        per_user.entry(a.user).or_default().push(a.start);
    }
    for (&user, starts) in per_user.iter_mut() {
        starts.sort_unstable();
        for pair in starts.windows(2) {
            // Back-to-back retransmission (distance exactly n) is allowed.
            if pair[1] - pair[0] < word_len {
                return Err(ChannelError::SelfOverlap {
                    user,
                    first: pair[0],
                    second: pair[1],
                    word_len,
                });
            }
        }
    }
    Ok(())
}

/// The channel output over the whole horizon, one bit per slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelStream {
    slots: Codeword,
}

impl ChannelStream {
    pub fn from_bitstring(s: &str) -> Result<Self, CodeError> {
        Ok(ChannelStream {
            slots: Codeword::from_bitstring(s)?,
        })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot(&self, t: usize) -> bool {
        self.slots.get(t)
    }

    /// The window of `n` slots starting at `t`, as a fresh word.
    pub fn window(&self, t: usize, n: usize) -> Codeword {
        self.slots.slice(t, n)
    }

    /// True iff the window starting at `t` covers `word`.
    pub fn covers_word_at(&self, word: &Codeword, t: usize) -> bool {
        self.slots.covers_at(word, t)
    }

    pub fn to_bitstring(&self) -> String {
        self.slots.to_bitstring()
    }
}

impl Serialize for ChannelStream {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_bitstring())
    }
}

impl<'de> Deserialize<'de> for ChannelStream {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ChannelStream::from_bitstring(&s).map_err(D::Error::custom)
    }
}

/// Renders the OR superposition of all scheduled transmissions.
///
/// Rejects activations that exceed the horizon, name unknown users, or make
/// a user overlap itself (a user may retransmit no earlier than `n` slots
/// after its previous start).
pub fn render_stream(
    schedule: &ActivitySchedule,
    code: &Code,
) -> Result<ChannelStream, ChannelError> {
    let n = code.word_len();
    for a in &schedule.activations {
        if a.user >= code.users() {
            return Err(ChannelError::UnknownUser {
                user: a.user,
                users: code.users(),
            });
        }
    }
    check_fit_and_self_overlap(&schedule.activations, n, schedule.horizon)?;
    let mut slots = Codeword::zeros(schedule.horizon);
    for a in &schedule.activations {
        slots.or_assign_at(code.word(a.user), a.start);
    }
    Ok(ChannelStream { slots })
}

/// A raw detector emission, before classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hit {
    pub user: usize,
    pub start: usize,
}

/// Declares `(user, t)` for every complete window covering that user's word.
/// Output is ordered by `(t, user)`. Fails if the stream is shorter than one
/// window.
pub fn decode_stateless(stream: &ChannelStream, code: &Code) -> Result<Vec<Hit>, ChannelError> {
    let n = code.word_len();
    if stream.len() < n {
        return Err(ChannelError::StreamTooShort {
            len: stream.len(),
            window: n,
        });
    }
    let mut hits = Vec::new();
    for t in 0..=stream.len() - n {
        for user in 0..code.users() {
            if stream.covers_word_at(code.word(user), t) {
                hits.push(Hit { user, start: t });
            }
        }
    }
    Ok(hits)
}

/// As [`decode_stateless`], but after emitting `(user, t)` the user is not
/// checked again before slot `t + n`: a declared-active user is known to
/// transmit for the next `n` slots. Scan order is slot-major with ascending
/// users, so suppression is deterministic.
pub fn decode_stateful(stream: &ChannelStream, code: &Code) -> Result<Vec<Hit>, ChannelError> {
    let n = code.word_len();
    if stream.len() < n {
        return Err(ChannelError::StreamTooShort {
            len: stream.len(),
            window: n,
        });
    }
    let mut suppressed_until = vec![0usize; code.users()];
    let mut hits = Vec::new();
    for t in 0..=stream.len() - n {
        for (user, until) in suppressed_until.iter_mut().enumerate() {
            if t < *until {
                continue;
            }
            if stream.covers_word_at(code.word(user), t) {
                hits.push(Hit { user, start: t });
                *until = t + n;
            }
        }
    }
    Ok(hits)
}

/// Error taxonomy of a detection, judged against the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectionKind {
    TruePositive,
    FalseIdentification,
    FalseSynchronization,
}

impl DetectionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DetectionKind::TruePositive => "true-positive",
            DetectionKind::FalseIdentification => "false-identification",
            DetectionKind::FalseSynchronization => "false-synchronization",
        }
    }
}

/// A classified detector emission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detection {
    pub user: usize,
    pub start: usize,
    pub kind: DetectionKind,
}

pub const DETECTIONS_CSV_HEADER: &str = "user,start,kind";

/// Detections as CSV rows `user,start,kind`, one per line, with header.
pub fn detections_to_csv(detections: &[Detection]) -> String {
    let mut out = String::from(DETECTIONS_CSV_HEADER);
    for d in detections {
        out.push('\n');
        out.push_str(&format!("{},{},{}", d.user, d.start, d.kind.as_str()));
    }
    out.push('\n');
    out
}

/// Labels each hit against the ground truth:
///
/// - true positive: the schedule contains exactly `(user, start)`;
/// - false synchronization: the same user really transmits at some `t'` with
///   `t' != start` and `start` inside `[t', t' + n)` (right user, wrong
///   offset);
/// - false identification: anything else.
///
/// A hit that could fall in several buckets is resolved by that priority, so
/// counts are deterministic.
pub fn classify_detections(
    hits: &[Hit],
    schedule: &ActivitySchedule,
    word_len: usize,
) -> Vec<Detection> {
    let mut per_user: HashMap<usize, Vec<usize>> = HashMap::new();
    for a in &schedule.activations {
        per_user.entry(a.user).or_default().push(a.start);
    }
    for starts in per_user.values_mut() {
        starts.sort_unstable();
    }
    hits.iter()
        .map(|hit| {
            let starts = per_user.get(&hit.user).map(Vec::as_slice).unwrap_or(&[]);
            let kind = if starts.binary_search(&hit.start).is_ok() {
                DetectionKind::TruePositive
            } else if starts
                .iter()
                .any(|&t| t < hit.start && hit.start < t + word_len)
            {
                DetectionKind::FalseSynchronization
            } else {
                DetectionKind::FalseIdentification
            };
            Detection {
                user: hit.user,
                start: hit.start,
                kind,
            }
        })
        .collect()
}

/// Draws a schedule satisfying the occupancy mode, deterministically in the
/// seed.
///
/// The generator runs `M` lanes. Each lane starts at a random offset inside
/// the first window and chains activations; in `Exactly` mode the chain is
/// back-to-back (so every interior slot sees exactly one window per lane),
/// in `AtMost` mode a random idle gap of up to `n` slots separates
/// consecutive windows. Users are drawn uniformly from those not currently
/// transmitting, which keeps every user free of self-overlap; `M < T`
/// guarantees such a user exists.
pub fn random_schedule(
    users: usize,
    max_active: usize,
    word_len: usize,
    horizon: usize,
    mode: ScheduleMode,
    seed: u64,
) -> Result<ActivitySchedule, ChannelError> {
    if max_active == 0 || max_active >= users {
        return Err(ChannelError::Infeasible(format!(
            "activity bound M={max_active} must satisfy 1 <= M < T={users}"
        )));
    }
    if word_len == 0 {
        return Err(ChannelError::Infeasible("word length must be >= 1".into()));
    }
    if horizon < word_len {
        return Err(ChannelError::StreamTooShort {
            len: horizon,
            window: word_len,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next_start: Vec<usize> = (0..max_active)
        .map(|_| rng.random_range(0..word_len))
        .collect();
    let mut busy_until = vec![0usize; users];
    let mut activations = Vec::new();

    loop {
        // Earliest lane next; ties broken by lane index for determinism.
        let lane = (0..max_active)
            .filter(|&l| next_start[l] + word_len <= horizon)
            .min_by_key(|&l| (next_start[l], l));
        let Some(lane) = lane else { break };
        let start = next_start[lane];

        let eligible: Vec<usize> = (0..users).filter(|&u| busy_until[u] <= start).collect();
        if eligible.is_empty() {
            return Err(ChannelError::Infeasible(format!(
                "no eligible user at slot {start}"
            )));
        }
        let user = eligible[rng.random_range(0..eligible.len())];
        activations.push(Activation { user, start });
        busy_until[user] = start + word_len;

        let gap = match mode {
            ScheduleMode::Exactly => 0,
            ScheduleMode::AtMost => rng.random_range(0..=word_len),
        };
        next_start[lane] = start + word_len + gap;
    }

    activations.sort_unstable_by_key(|a| (a.start, a.user));
    Ok(ActivitySchedule {
        horizon,
        mode,
        activations,
    })
}
