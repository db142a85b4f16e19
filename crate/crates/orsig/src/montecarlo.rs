//! Seeded, reproducible experiments measuring empirical error rates against
//! the analytic bounds.
//!
//! Every trial draws its own seed from `(spec.seed, trial index)`, so trial
//! sets are stable under trial-count extension and results are independent
//! of how trials are scheduled across workers: counts combine by plain
//! addition. Rates are normalized per code (synchronous experiments) or per
//! evaluated window (asynchronous ones); the normalization is recorded in
//! the result.
//!
//! Bound checks are one-sided at 99% confidence: an empirical rate above its
//! bound is reported as a violation only when the Wilson lower confidence
//! limit clears the bound, and as inconclusive otherwise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    bad_code_bound, class_cover_prob, ident_error_bound, simulate_class_cover, sync_error_bound,
    AnalysisError, BoundParams,
};
use crate::asynch::{
    classify_detections, decode_stateful, decode_stateless, random_schedule, render_stream,
    ChannelError, DetectionKind, ScheduleMode,
};
use crate::core::{generate_code, CodeError, CodeGenParams};
use crate::zfd::{check_zfd_with_budget, ZfdError, DEFAULT_SUBSET_BUDGET};

/// Two-sided 95% normal quantile, for the reported Wilson interval.
pub const Z95: f64 = 1.959963984540054;
/// One-sided 99% normal quantile, for bound verdicts.
pub const Z99_ONE_SIDED: f64 = 2.3263478740408408;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    Spec(String),
    #[error(transparent)]
    Zfd(#[from] ZfdError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// What an experiment measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentMode {
    /// Fraction of random codes failing the ZFD check, against the bad-code
    /// bound.
    SyncZfd,
    /// Per-window false-identification rate, against its bound.
    AsyncIdent,
    /// Per-window false-synchronization rate, against its bound.
    AsyncSync,
    /// Class-cover event estimate, against the exact recursion value.
    EventF,
}

impl ExperimentMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentMode::SyncZfd => "sync-zfd",
            ExperimentMode::AsyncIdent => "async-ident",
            ExperimentMode::AsyncSync => "async-sync",
            ExperimentMode::EventF => "event-f",
        }
    }

    pub fn is_async(&self) -> bool {
        matches!(self, ExperimentMode::AsyncIdent | ExperimentMode::AsyncSync)
    }
}

/// A complete, reproducible experiment description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub params: BoundParams,
    pub trials: u64,
    /// Stream length in slots; only asynchronous modes use it.
    pub horizon: usize,
    pub mode: ExperimentMode,
    pub seed: u64,
    /// Subset budget forwarded to the ZFD check; `None` for the default.
    #[serde(default)]
    pub zfd_budget: Option<u64>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.params.validate()?;
        if self.trials == 0 {
            return Err(ExperimentError::Spec("need at least one trial".into()));
        }
        if self.mode.is_async() && self.horizon < self.params.code_len {
            return Err(ExperimentError::Spec(format!(
                "horizon {} is shorter than the code length {}",
                self.horizon, self.params.code_len
            )));
        }
        Ok(())
    }
}

/// What one unit of `total` is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    PerCode,
    PerWindow,
    PerTrial,
}

impl Normalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Normalization::PerCode => "per-code",
            Normalization::PerWindow => "per-window",
            Normalization::PerTrial => "per-trial",
        }
    }
}

/// Outcome of the one-sided 99% bound check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundVerdict {
    /// The empirical rate lies at or below the bound.
    Satisfied,
    /// The rate exceeds the bound but within statistical noise.
    Inconclusive,
    /// The rate exceeds the bound significantly.
    Violated,
}

impl BoundVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundVerdict::Satisfied => "satisfied",
            BoundVerdict::Inconclusive => "inconclusive",
            BoundVerdict::Violated => "violated",
        }
    }
}

/// A measured rate next to its analytic bound (or reference value). `count`
/// occurrences of the measured outcome were seen over `total` units, so
/// `count` and `total - count` split the units into hits and misses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    /// Label of the measured outcome.
    pub measured: String,
    pub normalization: Normalization,
    pub count: u64,
    pub total: u64,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub bound: f64,
    pub bound_satisfied: bool,
    pub verdict: BoundVerdict,
}

pub const RESULT_CSV_HEADER: &str = "mode,T,M,n,p,delta,trials,horizon,seed,budget,measured,\
normalization,count,total,rate,wilson_low,wilson_high,bound,bound_satisfied,verdict";

impl ExperimentResult {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.spec.mode.as_str(),
            self.spec.params.users,
            self.spec.params.max_active,
            self.spec.params.code_len,
            self.spec.params.one_prob,
            self.spec.params.slack,
            self.spec.trials,
            self.spec.horizon,
            self.spec.seed,
            self.spec
                .zfd_budget
                .map(|b| b.to_string())
                .unwrap_or_default(),
            self.measured,
            self.normalization.as_str(),
            self.count,
            self.total,
            self.rate,
            self.wilson_low,
            self.wilson_high,
            self.bound,
            self.bound_satisfied,
            self.verdict.as_str()
        )
    }
}

/// Wilson score interval for `count` hits out of `total`, at normal
/// quantile `z`.
pub fn wilson_interval(count: u64, total: u64, z: f64) -> (f64, f64) {
    assert!(total > 0, "interval needs at least one observation");
    let n = total as f64;
    let p = count as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The interval contains the point estimate; rounding at the boundary
    // (count 0 or total) must not push it off.
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

/// Deterministic per-trial seed: a splitmix64-style mix of `(seed, index)`.
/// Fixed for reproducibility; extending the trial count never reshuffles
/// earlier trials.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn judge(count: u64, total: u64, bound: f64) -> (f64, bool, BoundVerdict) {
    let rate = count as f64 / total as f64;
    let verdict = if rate <= bound {
        BoundVerdict::Satisfied
    } else {
        let (low99, _) = wilson_interval(count, total, Z99_ONE_SIDED);
        if low99 > bound {
            BoundVerdict::Violated
        } else {
            BoundVerdict::Inconclusive
        }
    };
    (rate, rate <= bound, verdict)
}

/// Draws `trials` random codes at the spec's parameters and measures the
/// fraction failing the ZFD check of order `M`, against the bad-code bound.
pub fn run_sync_zfd(spec: &ExperimentSpec) -> Result<ExperimentResult, ExperimentError> {
    spec.validate()?;
    if spec.mode != ExperimentMode::SyncZfd {
        return Err(ExperimentError::Spec(format!(
            "run_sync_zfd called with mode {}",
            spec.mode.as_str()
        )));
    }
    let budget = spec.zfd_budget.unwrap_or(DEFAULT_SUBSET_BUDGET);
    let bad: u64 = (0..spec.trials)
        .into_par_iter()
        .map(|trial| -> Result<u64, ExperimentError> {
            let code = generate_code(&CodeGenParams {
                users: spec.params.users,
                code_len: spec.params.code_len,
                one_prob: spec.params.one_prob,
                seed: derive_seed(spec.seed, trial),
            })?;
            let report = check_zfd_with_budget(&code, spec.params.max_active, budget)?;
            Ok(u64::from(!report.is_zfd))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let bound = bad_code_bound(&spec.params);
    let (rate, bound_satisfied, verdict) = judge(bad, spec.trials, bound);
    let (wilson_low, wilson_high) = wilson_interval(bad, spec.trials, Z95);
    Ok(ExperimentResult {
        spec: *spec,
        measured: "bad-code".into(),
        normalization: Normalization::PerCode,
        count: bad,
        total: spec.trials,
        rate,
        wilson_low,
        wilson_high,
        bound,
        bound_satisfied,
        verdict,
    })
}

#[derive(Default, Clone, Copy)]
struct WindowCounts {
    windows: u64,
    stateless_ident: u64,
    stateless_sync: u64,
    stateful_ident: u64,
    stateful_sync: u64,
}

impl WindowCounts {
    fn add(self, other: WindowCounts) -> WindowCounts {
        WindowCounts {
            windows: self.windows + other.windows,
            stateless_ident: self.stateless_ident + other.stateless_ident,
            stateless_sync: self.stateless_sync + other.stateless_sync,
            stateful_ident: self.stateful_ident + other.stateful_ident,
            stateful_sync: self.stateful_sync + other.stateful_sync,
        }
    }
}

fn count_errors(kinds: &[DetectionKind]) -> (u64, u64) {
    let ident = kinds
        .iter()
        .filter(|k| **k == DetectionKind::FalseIdentification)
        .count() as u64;
    let sync = kinds
        .iter()
        .filter(|k| **k == DetectionKind::FalseSynchronization)
        .count() as u64;
    (ident, sync)
}

/// Measures one rendered stream with both decoders.
fn measure_stream(
    code: &crate::core::Code,
    schedule: &crate::asynch::ActivitySchedule,
) -> Result<WindowCounts, ExperimentError> {
    let n = code.word_len();
    let stream = render_stream(schedule, code)?;
    let stateless = decode_stateless(&stream, code)?;
    let stateful = decode_stateful(&stream, code)?;
    let stateless_kinds: Vec<DetectionKind> = classify_detections(&stateless, schedule, n)
        .iter()
        .map(|d| d.kind)
        .collect();
    let stateful_kinds: Vec<DetectionKind> = classify_detections(&stateful, schedule, n)
        .iter()
        .map(|d| d.kind)
        .collect();
    let (stateless_ident, stateless_sync) = count_errors(&stateless_kinds);
    let (stateful_ident, stateful_sync) = count_errors(&stateful_kinds);
    Ok(WindowCounts {
        windows: (stream.len() - n + 1) as u64,
        stateless_ident,
        stateless_sync,
        stateful_ident,
        stateful_sync,
    })
}

/// The paired asynchronous measurement. The headline rates come from the
/// stateless decoder (the design-time reference); the stateful totals from
/// the same streams sit alongside for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsyncResults {
    pub ident: ExperimentResult,
    pub sync: ExperimentResult,
    pub stateful_ident_errors: u64,
    pub stateful_sync_errors: u64,
}

impl AsyncResults {
    pub fn stateless_ident_errors(&self) -> u64 {
        self.ident.count
    }

    pub fn stateless_sync_errors(&self) -> u64 {
        self.sync.count
    }
}

/// Renders `trials` independent streams (fresh code and fresh at-most-`M`
/// schedule per trial, seeds derived from the spec seed), decodes each with
/// both decoders, and accumulates per-window false-identification and
/// false-synchronization rates against their bounds.
pub fn run_async(spec: &ExperimentSpec) -> Result<AsyncResults, ExperimentError> {
    spec.validate()?;
    if !spec.mode.is_async() {
        return Err(ExperimentError::Spec(format!(
            "run_async called with mode {}",
            spec.mode.as_str()
        )));
    }
    let totals = (0..spec.trials)
        .into_par_iter()
        .map(|trial| -> Result<WindowCounts, ExperimentError> {
            let code = generate_code(&CodeGenParams {
                users: spec.params.users,
                code_len: spec.params.code_len,
                one_prob: spec.params.one_prob,
                seed: derive_seed(spec.seed, 2 * trial),
            })?;
            let schedule = random_schedule(
                spec.params.users,
                spec.params.max_active,
                spec.params.code_len,
                spec.horizon,
                ScheduleMode::AtMost,
                derive_seed(spec.seed, 2 * trial + 1),
            )?;
            measure_stream(&code, &schedule)
        })
        .try_reduce(WindowCounts::default, |a, b| Ok(a.add(b)))?;

    let ident_bound = ident_error_bound(&spec.params).exponent_form;
    let sync_bound = sync_error_bound(&spec.params).exponent_form;
    let build = |mode: ExperimentMode, measured: &str, count: u64, bound: f64| {
        let (rate, bound_satisfied, verdict) = judge(count, totals.windows, bound);
        let (wilson_low, wilson_high) = wilson_interval(count, totals.windows, Z95);
        ExperimentResult {
            spec: ExperimentSpec { mode, ..*spec },
            measured: measured.into(),
            normalization: Normalization::PerWindow,
            count,
            total: totals.windows,
            rate,
            wilson_low,
            wilson_high,
            bound,
            bound_satisfied,
            verdict,
        }
    };
    Ok(AsyncResults {
        ident: build(
            ExperimentMode::AsyncIdent,
            "false-identification",
            totals.stateless_ident,
            ident_bound,
        ),
        sync: build(
            ExperimentMode::AsyncSync,
            "false-synchronization",
            totals.stateless_sync,
            sync_bound,
        ),
        stateful_ident_errors: totals.stateful_ident,
        stateful_sync_errors: totals.stateful_sync,
    })
}

/// Estimates the class-cover probability for a class of `class_size`
/// positions and tests two-sided 3-sigma agreement with the exact recursion
/// value, which is stored in `bound`.
pub fn run_event_f(
    spec: &ExperimentSpec,
    class_size: usize,
) -> Result<ExperimentResult, ExperimentError> {
    spec.validate()?;
    if spec.mode != ExperimentMode::EventF {
        return Err(ExperimentError::Spec(format!(
            "run_event_f called with mode {}",
            spec.mode.as_str()
        )));
    }
    if class_size == 0 {
        return Err(ExperimentError::Spec("class size must be >= 1".into()));
    }
    let estimate = simulate_class_cover(
        class_size,
        spec.params.one_prob,
        spec.params.max_active,
        spec.trials,
        spec.seed,
    );
    let exact = class_cover_prob(class_size, spec.params.one_prob, spec.params.max_active);
    let rate = estimate.estimate();
    let within = (rate - exact).abs() <= 3.0 * estimate.std_err();
    let (wilson_low, wilson_high) = wilson_interval(estimate.successes, estimate.trials, Z95);
    Ok(ExperimentResult {
        spec: *spec,
        measured: "class-cover".into(),
        normalization: Normalization::PerTrial,
        count: estimate.successes,
        total: estimate.trials,
        rate,
        wilson_low,
        wilson_high,
        bound: exact,
        bound_satisfied: within,
        verdict: if within {
            BoundVerdict::Satisfied
        } else {
            BoundVerdict::Violated
        },
    })
}
