//! Closed-form covering probabilities and the analytic error/length bounds.
//!
//! The covering recursion over position classes ([`class_cover_prob`]) is the
//! authoritative implementation; the transfer-matrix closed form and the
//! single-interferer (`M = 1`) closed form exist to validate the algebra and
//! for O(1) evaluation via eigenvalue powers. Bounds are reported raw and may
//! exceed 1; clamp with [`clamp_bound`] for display only.
//!
//! `log` means log base 2 wherever a code-length formula mentions it; the
//! `e ln 2` factor in [`asymptotic_length`] comes from that convention.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use std::f64::consts::{E, LN_2};

/// Below this |1 - 4q| the closed form refuses and callers should use the
/// recursion, which is stable everywhere.
pub const EIGEN_DEGENERACY_EPS: f64 = 1e-6;

/// Switchover to the limit branch of [`class_cover_prob_m1`].
const HALF_PROB_EPS: f64 = 1e-8;

/// Trials per fixed simulation batch; batches own derived RNG streams, so
/// estimates do not depend on the worker count.
const SIM_BATCH: u64 = 8192;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("spectrum is near-degenerate (|1 - 4q| = {gap:.3e}); fall back to the recursion")]
    DegenerateSpectrum { gap: f64 },
    #[error("closed form needs class size k >= 2, got {0}")]
    ClassTooSmall(usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Parameter bundle feeding every bound: `T` users, at most `M` active,
/// length-`n` words with Bernoulli(`p`) bits, and the length slack `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    /// User count `T`.
    pub users: usize,
    /// Activity bound `M`.
    pub max_active: usize,
    /// Code length `n` in slots.
    pub code_len: usize,
    /// Per-bit one-probability `p`.
    pub one_prob: f64,
    /// Length slack `delta` (dimensionless).
    pub slack: f64,
}

impl BoundParams {
    pub fn new(
        users: usize,
        max_active: usize,
        code_len: usize,
        one_prob: f64,
        slack: f64,
    ) -> Result<Self, AnalysisError> {
        let params = BoundParams {
            users,
            max_active,
            code_len,
            one_prob,
            slack,
        };
        params.validate()?;
        Ok(params)
    }

    /// Recommended sizing: `p = 1/(M+1)` and `n` from [`asymptotic_length`].
    pub fn sized(users: usize, max_active: usize, slack: f64) -> Result<Self, AnalysisError> {
        if users < 2 {
            return Err(AnalysisError::InvalidParams(format!(
                "need at least 2 users, got {users}"
            )));
        }
        Self::new(
            users,
            max_active,
            asymptotic_length(users, max_active, slack),
            optimal_one_prob(max_active),
            slack,
        )
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.max_active == 0 || self.max_active >= self.users {
            return Err(AnalysisError::InvalidParams(format!(
                "activity bound M={} must satisfy 1 <= M < T={}",
                self.max_active, self.users
            )));
        }
        if self.code_len == 0 {
            return Err(AnalysisError::InvalidParams(
                "code length must be >= 1".into(),
            ));
        }
        if !(self.one_prob > 0.0 && self.one_prob < 1.0) {
            return Err(AnalysisError::InvalidParams(format!(
                "bit probability must lie strictly inside (0, 1), got {}",
                self.one_prob
            )));
        }
        if self.slack.is_nan() || self.slack < 0.0 {
            return Err(AnalysisError::InvalidParams(format!(
                "length slack must be nonnegative, got {}",
                self.slack
            )));
        }
        Ok(())
    }
}

/// The bit probability minimizing the bad-code bound: `1/(M+1)`.
pub fn optimal_one_prob(max_active: usize) -> f64 {
    1.0 / (max_active as f64 + 1.0)
}

/// `q = p (1-p)^M`: the probability that, in one position, the tagged user
/// has a 1 while all `M` active users have 0.
pub fn uncovered_one_prob(p: f64, max_active: usize) -> f64 {
    p * (1.0 - p).powi(max_active as i32)
}

/// Clamps a raw bound to [0, 1] for display. Raw values must be used in any
/// inequality work; clamping would break the bound algebra.
pub fn clamp_bound(x: f64) -> f64 {
    x.min(1.0)
}

// ---------------------------------------------------------------------------
// Covering probability of one position class
// ---------------------------------------------------------------------------

/// Conditional cover probabilities after `i` positions of a class: the
/// probability that no uncovered 1 appeared so far, given the tagged bit at
/// position `i` is 1 (`given_one`) or 0 (`given_zero`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverState {
    pub given_one: f64,
    pub given_zero: f64,
}

/// The full state sequence of the covering recursion, positions `1..=k`.
///
/// Position 1 is special: the shifted word of the tagged user is not yet
/// active there, so its interferer count is `M` rather than `M - 1`.
pub fn cover_states(k: usize, p: f64, max_active: usize) -> Vec<CoverState> {
    assert!(k >= 1, "class size must be >= 1");
    assert!(p > 0.0 && p < 1.0, "bit probability must lie in (0, 1)");
    assert!(max_active >= 1, "need at least one active user");
    let m = max_active as i32;
    let others_all_zero = (1.0 - p).powi(m - 1); // P(U_l = 0) for l >= 2
    let mut states = Vec::with_capacity(k);
    let mut state = CoverState {
        given_one: 1.0 - (1.0 - p).powi(m),
        given_zero: 1.0,
    };
    states.push(state);
    for _ in 1..k {
        state = CoverState {
            given_one: p * state.given_one + (1.0 - p) * (1.0 - others_all_zero) * state.given_zero,
            given_zero: p * state.given_one + (1.0 - p) * state.given_zero,
        };
        states.push(state);
    }
    states
}

/// Exact probability that every 1 of the tagged user inside a size-`k`
/// position class is covered. Evaluated by the recursion; this is the
/// ground-truth implementation.
///
/// ```
/// let f = orsig::analysis::class_cover_prob(3, 1.0 / 3.0, 2);
/// assert!((f - 421.0 / 729.0).abs() < 1e-12);
/// ```
pub fn class_cover_prob(k: usize, p: f64, max_active: usize) -> f64 {
    let last = *cover_states(k, p, max_active).last().unwrap();
    p * last.given_one + (1.0 - p) * last.given_zero
}

/// Eigenvalues of the 2x2 recursion transfer matrix. They satisfy
/// `lambda1 + lambda2 = 1` and `lambda1 * lambda2 = q`, and are real for
/// `q <= 1/4`, which holds for every `p` and `M >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenpair {
    pub lambda1: f64,
    pub lambda2: f64,
    pub q: f64,
}

pub fn eigenpair(p: f64, max_active: usize) -> Eigenpair {
    let q = uncovered_one_prob(p, max_active);
    // 1 - 4q >= 0 mathematically; guard the sqrt against rounding.
    let root = (1.0 - 4.0 * q).max(0.0).sqrt();
    Eigenpair {
        lambda1: 0.5 + 0.5 * root,
        lambda2: 0.5 - 0.5 * root,
        q,
    }
}

/// Closed form of [`class_cover_prob`] via eigenvalue powers of the transfer
/// matrix, for `k >= 2`. Refuses near the degenerate spectrum (`q` close to
/// 1/4, reachable only at `M = 1`, `p = 1/2`), where the caller should use
/// the recursion.
pub fn class_cover_prob_closed(k: usize, p: f64, max_active: usize) -> Result<f64, AnalysisError> {
    if k < 2 {
        return Err(AnalysisError::ClassTooSmall(k));
    }
    let q = uncovered_one_prob(p, max_active);
    let gap = 1.0 - 4.0 * q;
    if gap.abs() < EIGEN_DEGENERACY_EPS {
        return Err(AnalysisError::DegenerateSpectrum { gap });
    }
    let root = gap.sqrt();
    let symmetric = (0.5 - 2.0 * q + q * q) / root;
    let antisymmetric = 0.5 - q;
    let eig = eigenpair(p, max_active);
    let pow = (k - 2) as i32;
    Ok(eig.lambda1.powi(pow) * (symmetric + antisymmetric)
        - eig.lambda2.powi(pow) * (symmetric - antisymmetric))
}

/// `M = 1` covering probability in closed form:
/// `((1-p)^(k+2) - p^(k+2)) / (1 - 2p)`, with the limit value
/// `(k+2) 2^-(k+1)` on the removable singularity at `p = 1/2`.
pub fn class_cover_prob_m1(k: usize, p: f64) -> f64 {
    assert!(k >= 1, "class size must be >= 1");
    assert!(p > 0.0 && p < 1.0, "bit probability must lie in (0, 1)");
    if (1.0 - 2.0 * p).abs() < HALF_PROB_EPS {
        (k as f64 + 2.0) * 2f64.powi(-(k as i32 + 1))
    } else {
        let e = k as i32 + 2;
        ((1.0 - p).powi(e) - p.powi(e)) / (1.0 - 2.0 * p)
    }
}

/// Per-class upper bound `(1-q)^k`; tight at `k = 1`. Valid against the
/// exact probability for `q <= 0.228`, and for every `p` when `M = 1`.
pub fn class_cover_bound(k: usize, p: f64, max_active: usize) -> f64 {
    (1.0 - uncovered_one_prob(p, max_active)).powi(k as i32)
}

/// Whole-word bound `(1-q)^n`: since the classes of any shift partition the
/// `n` positions, the per-class bounds multiply out to this, independent of
/// the shift.
pub fn word_cover_bound(n: usize, p: f64, max_active: usize) -> f64 {
    (1.0 - uncovered_one_prob(p, max_active)).powi(n as i32)
}

// ---------------------------------------------------------------------------
// Position classes of a self-shift
// ---------------------------------------------------------------------------

/// One class of positions under a self-shift of `d` slots: class `j`
/// (1-based, `1 <= j <= d`) holds positions `{j-1 + l*d}` (0-based slots).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftClassSpec {
    pub shift: usize,
    pub class_index: usize,
    pub size: usize,
}

impl ShiftClassSpec {
    /// 0-based positions of this class.
    pub fn positions(&self) -> Vec<usize> {
        (0..self.size)
            .map(|l| self.class_index - 1 + l * self.shift)
            .collect()
    }
}

/// Splits positions `0..n` into the `d` classes of a shift by `d` slots.
/// Class sizes are `floor(n/d)` or `ceil(n/d)` and sum to `n`.
pub fn shift_classes(n: usize, d: usize) -> Vec<ShiftClassSpec> {
    assert!(d >= 1 && d <= n, "shift must satisfy 1 <= d <= n");
    (1..=d)
        .map(|j| ShiftClassSpec {
            shift: d,
            class_index: j,
            size: (n - j) / d + 1,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Error bounds
// ---------------------------------------------------------------------------

/// `C(n, k)` as a float; exact for the small `k` used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut res = 1.0;
    for i in 0..k {
        res *= (n - i) as f64 / (i + 1) as f64;
    }
    res
}

/// `ln C(n, k)`, stable for large `n`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

/// Probability that a random synchronous code is bad:
/// `C(T, M) (T - M) (1 - q)^n`. Minimized over `p` at `p = 1/(M+1)`.
pub fn bad_code_bound(params: &BoundParams) -> f64 {
    let q = uncovered_one_prob(params.one_prob, params.max_active);
    binomial(params.users, params.max_active)
        * (params.users - params.max_active) as f64
        * (1.0 - q).powi(params.code_len as i32)
}

/// Exponent of the relaxed bad-code bound `T^(M+1) e^(-n e^-1 / (M+1))`:
/// `(M+1) ln2 log T - (n / (M+1)) e^-1`. Valid as a bound at `p = 1/(M+1)`.
pub fn bad_code_exponent(users: usize, max_active: usize, code_len: f64) -> f64 {
    let m1 = max_active as f64 + 1.0;
    m1 * LN_2 * (users as f64).log2() - code_len / m1 * E.powi(-1)
}

/// Exponent of the false-identification bound:
/// `(M+1) ln T + M ln n - (n / (M+1)) e^-1`. Valid at `p = 1/(M+1)`.
pub fn ident_error_exponent(users: usize, max_active: usize, code_len: f64) -> f64 {
    let m1 = max_active as f64 + 1.0;
    m1 * (users as f64).ln() + max_active as f64 * code_len.ln() - code_len / m1 * E.powi(-1)
}

/// Exponent of the false-synchronization bound:
/// `M ln T + M ln n - (n / (M+1)) e^-1`. Valid at `p = 1/(M+1)`.
pub fn sync_error_exponent(users: usize, max_active: usize, code_len: f64) -> f64 {
    let m1 = max_active as f64 + 1.0;
    let m = max_active as f64;
    m * (users as f64).ln() + m * code_len.ln() - code_len / m1 * E.powi(-1)
}

/// A bound in its two standard forms. `pre_relaxation` evaluates the
/// combinatorial expression at the given `p`; `exponent_form` is
/// `exp(exponent)` and upper-bounds the pre-relaxation form when
/// `p = 1/(M+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBound {
    pub pre_relaxation: f64,
    pub exponent: f64,
    pub exponent_form: f64,
}

/// False-identification bound for asynchronous access. Pre-relaxation form:
/// `C(T, M) (T - M) n^M (1 - q)^n`; the `n^M` factor accounts for the shifts
/// of the `M` interfering words.
pub fn ident_error_bound(params: &BoundParams) -> ErrorBound {
    let q = uncovered_one_prob(params.one_prob, params.max_active);
    let n = params.code_len as f64;
    let ln_pre = ln_binomial(params.users, params.max_active)
        + ((params.users - params.max_active) as f64).ln()
        + params.max_active as f64 * n.ln()
        + n * (1.0 - q).ln();
    let exponent = ident_error_exponent(params.users, params.max_active, n);
    ErrorBound {
        pre_relaxation: ln_pre.exp(),
        exponent,
        exponent_form: exponent.exp(),
    }
}

/// False-synchronization bound for asynchronous access. Pre-relaxation form:
/// `C(T, M-1) (T - M + 1) n^M (1 - q)^n`; only `M - 1` words are free, the
/// tagged user interferes with itself through the shift.
pub fn sync_error_bound(params: &BoundParams) -> ErrorBound {
    let q = uncovered_one_prob(params.one_prob, params.max_active);
    let n = params.code_len as f64;
    let ln_pre = ln_binomial(params.users, params.max_active - 1)
        + ((params.users - params.max_active + 1) as f64).ln()
        + params.max_active as f64 * n.ln()
        + n * (1.0 - q).ln();
    let exponent = sync_error_exponent(params.users, params.max_active, n);
    ErrorBound {
        pre_relaxation: ln_pre.exp(),
        exponent,
        exponent_form: exponent.exp(),
    }
}

// ---------------------------------------------------------------------------
// Code-length sizing and its exponent
// ---------------------------------------------------------------------------

/// Recommended code length before rounding:
/// `(1 + delta) e ln2 (M+1)^2 log2 T`.
pub fn asymptotic_length_real(users: usize, max_active: usize, slack: f64) -> f64 {
    assert!(users >= 2, "length formula needs T >= 2");
    assert!(slack >= 0.0, "length slack must be nonnegative");
    let m1 = max_active as f64 + 1.0;
    (1.0 + slack) * E * LN_2 * m1 * m1 * (users as f64).log2()
}

/// [`asymptotic_length_real`] rounded up to whole slots.
pub fn asymptotic_length(users: usize, max_active: usize, slack: f64) -> usize {
    asymptotic_length_real(users, max_active, slack).ceil() as usize
}

/// Which asynchronous error bound an exponent refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    Identification,
    Synchronization,
}

/// Exponent of the chosen error bound at the recommended (pre-ceil) length,
/// expressed over `log2 T`:
///
/// `-(M+1) log T ((delta + g/(M+1)) ln2 - (1 - 1/(M+1)) ln N / log T)`
///
/// with `g = 0` for identification and `g = 1` for synchronization, and
/// `N = (1 + delta) e ln2 (M+1)^2 log T`. This equals
/// [`ident_error_exponent`] resp. [`sync_error_exponent`] evaluated at
/// `n = N`, and tends to negative infinity as `T` grows with `M`, `delta`
/// fixed.
pub fn asymptotic_exponent(users: usize, max_active: usize, slack: f64, kind: BoundKind) -> f64 {
    let m1 = max_active as f64 + 1.0;
    let log_t = (users as f64).log2();
    let n_real = asymptotic_length_real(users, max_active, slack);
    let gamma = match kind {
        BoundKind::Identification => 0.0,
        BoundKind::Synchronization => 1.0,
    };
    -m1 * log_t * ((slack + gamma / m1) * LN_2 - (1.0 - 1.0 / m1) * n_real.ln() / log_t)
}

// ---------------------------------------------------------------------------
// Event-level simulation of one position class
// ---------------------------------------------------------------------------

/// Monte Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCoverEstimate {
    pub successes: u64,
    pub trials: u64,
}

impl ClassCoverEstimate {
    pub fn estimate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    pub fn std_err(&self) -> f64 {
        let p = self.estimate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Unbiased Monte Carlo twin of [`class_cover_prob`]: draws the tagged bits
/// and the interferer indicators of a size-`k` class and counts the trials
/// with no uncovered 1.
///
/// Trials are split into fixed-size batches, each drawing from a ChaCha
/// stream derived from `(seed, batch)`, so the count is reproducible and
/// does not depend on how batches are scheduled across workers.
pub fn simulate_class_cover(
    k: usize,
    p: f64,
    max_active: usize,
    trials: u64,
    seed: u64,
) -> ClassCoverEstimate {
    assert!(trials >= 1, "need at least one trial");
    assert!(k >= 1, "class size must be >= 1");
    let m = max_active as i32;
    let first_all_zero = (1.0 - p).powi(m); // P(U_1 = 0): shifted self not yet active
    let later_all_zero = (1.0 - p).powi(m - 1); // P(U_l = 0), l >= 2
    let batches = trials.div_ceil(SIM_BATCH);
    let successes: u64 = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let batch_trials = SIM_BATCH.min(trials - batch * SIM_BATCH);
            let mut hits = 0u64;
            for _ in 0..batch_trials {
                let mut prev_tagged = false;
                let mut covered = true;
                for pos in 0..k {
                    let tagged = rng.random_bool(p);
                    let all_zero = rng.random_bool(if pos == 0 {
                        first_all_zero
                    } else {
                        later_all_zero
                    });
                    // Position pos is uncovered iff the tagged bit is 1, all
                    // other users are 0, and the shifted self (the previous
                    // tagged bit) is 0 or absent.
                    if tagged && all_zero && (pos == 0 || !prev_tagged) {
                        covered = false;
                    }
                    prev_tagged = tagged;
                }
                if covered {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    ClassCoverEstimate { successes, trials }
}

// ---------------------------------------------------------------------------
// Bound table rows
// ---------------------------------------------------------------------------

/// One row of the bounds table. `cover_exact` is the exact covering
/// probability of the whole word for a single class (shift `d = 1`),
/// `cover_bound` its `(1-q)^n` bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub users: usize,
    pub max_active: usize,
    pub code_len: usize,
    pub one_prob: f64,
    pub slack: f64,
    pub bad_code: f64,
    pub ident_pre: f64,
    pub ident_exp: f64,
    pub sync_pre: f64,
    pub sync_exp: f64,
    pub cover_exact: f64,
    pub cover_bound: f64,
}

pub const BOUNDS_CSV_HEADER: &str =
    "T,M,n,p,delta,eq1,eq3_pre,eq3_exp,eq4_pre,eq4_exp,f_exact,f_bound";

impl BoundsRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.users,
            self.max_active,
            self.code_len,
            self.one_prob,
            self.slack,
            self.bad_code,
            self.ident_pre,
            self.ident_exp,
            self.sync_pre,
            self.sync_exp,
            self.cover_exact,
            self.cover_bound
        )
    }

    pub fn from_csv(line: &str) -> Result<Self, AnalysisError> {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 12 {
            return Err(AnalysisError::InvalidParams(format!(
                "expected 12 CSV fields, got {}",
                fields.len()
            )));
        }
        let int = |i: usize| -> Result<usize, AnalysisError> {
            fields[i]
                .parse()
                .map_err(|e| AnalysisError::InvalidParams(format!("field {i}: {e}")))
        };
        let num = |i: usize| -> Result<f64, AnalysisError> {
            fields[i]
                .parse()
                .map_err(|e| AnalysisError::InvalidParams(format!("field {i}: {e}")))
        };
        Ok(BoundsRow {
            users: int(0)?,
            max_active: int(1)?,
            code_len: int(2)?,
            one_prob: num(3)?,
            slack: num(4)?,
            bad_code: num(5)?,
            ident_pre: num(6)?,
            ident_exp: num(7)?,
            sync_pre: num(8)?,
            sync_exp: num(9)?,
            cover_exact: num(10)?,
            cover_bound: num(11)?,
        })
    }
}

/// Evaluates every bound column for one parameter point.
pub fn bounds_row(params: &BoundParams) -> BoundsRow {
    let ident = ident_error_bound(params);
    let sync = sync_error_bound(params);
    BoundsRow {
        users: params.users,
        max_active: params.max_active,
        code_len: params.code_len,
        one_prob: params.one_prob,
        slack: params.slack,
        bad_code: bad_code_bound(params),
        ident_pre: ident.pre_relaxation,
        ident_exp: ident.exponent_form,
        sync_pre: sync.pre_relaxation,
        sync_exp: sync.exponent_form,
        cover_exact: class_cover_prob(params.code_len, params.one_prob, params.max_active),
        cover_bound: word_cover_bound(params.code_len, params.one_prob, params.max_active),
    }
}
