//! Finite-horizon verdicts for the success criteria.
//!
//! None of the criteria is decidable on a finite prefix, so each verdict is
//! a proxy with explicit parameters: a threshold for gains and consumption,
//! a band and a crossing count for oscillation, and a window for
//! stabilization. Every check exists in two forms: a monitor fed one row at
//! a time (for traces too large to keep) and a function over a [`Trace`].

use std::fmt;

use thiserror::Error;

use crate::martingale::{Trace, TraceHead, TraceRow};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    Gains,
    Consumption,
    Oscillation,
}

impl Criterion {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gains" => Some(Criterion::Gains),
            "consumption" => Some(Criterion::Consumption),
            "oscillation" => Some(Criterion::Oscillation),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistic {
    Capital,
    FlooredCapital,
    AccumulatedConsumption,
}

impl Statistic {
    fn of(self, capital: &Rational, accumulated: &Rational) -> Rational {
        match self {
            Statistic::Capital => capital.clone(),
            Statistic::FlooredCapital => capital.floor(),
            Statistic::AccumulatedConsumption => accumulated.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionConfig {
    pub criterion: Criterion,
    /// `G`, for gains and consumption.
    pub threshold: Rational,
    /// `(a, b)`, for oscillation.
    pub band: Option<(Rational, Rational)>,
    /// `k`, for oscillation.
    pub crossings: usize,
    /// `W`, for stabilization checks.
    pub window: usize,
}

impl CriterionConfig {
    pub fn gains(threshold: Rational) -> Self {
        CriterionConfig {
            criterion: Criterion::Gains,
            threshold,
            band: None,
            crossings: 1,
            window: 1,
        }
    }

    pub fn consumption(threshold: Rational) -> Self {
        CriterionConfig {
            criterion: Criterion::Consumption,
            ..Self::gains(threshold)
        }
    }

    pub fn oscillation(a: Rational, b: Rational, crossings: usize) -> Self {
        CriterionConfig {
            criterion: Criterion::Oscillation,
            band: Some((a, b)),
            crossings,
            ..Self::gains(Rational::one())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriterionError {
    #[error("band ({a}, {b}) is empty: need a < b")]
    BandInvalid { a: Rational, b: Rational },
    #[error("invalid `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("config is for {actual:?}, expected {expected:?}")]
    WrongCriterion {
        expected: Criterion,
        actual: Criterion,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    AchievedAt(usize),
    Bankrupt(usize),
    StableInWindow,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    None,
    /// First step reaching the threshold, if any, and the first bankrupt step.
    Threshold {
        hit: Option<usize>,
        bankrupt: Option<usize>,
    },
    /// Steps at which the band state flipped.
    Crossings {
        steps: Vec<usize>,
        bankrupt: Option<usize>,
    },
    /// Last step at which the statistic changed (0 if never).
    LastChange(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Witness,
}

impl Verdict {
    pub fn achieved(&self) -> bool {
        matches!(self.outcome, Outcome::AchievedAt(_))
    }

    pub fn stable(&self) -> bool {
        self.outcome == Outcome::StableInWindow
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            Outcome::AchievedAt(n) => write!(f, "achieved at step {n}")?,
            Outcome::Bankrupt(n) => write!(f, "bankrupt at step {n}")?,
            Outcome::StableInWindow => write!(f, "stable in window")?,
            Outcome::Inconclusive => write!(f, "inconclusive")?,
        }
        match &self.witness {
            Witness::None => Ok(()),
            Witness::Threshold { hit, bankrupt } => {
                write!(f, " (hit={}, bankrupt={})", opt(hit), opt(bankrupt))
            }
            Witness::Crossings { steps, .. } => {
                let s: Vec<String> = steps.iter().map(|n| n.to_string()).collect();
                write!(f, " (crossings at [{}])", s.join(","))
            }
            Witness::LastChange(n) => write!(f, " (last change at step {n})"),
        }
    }
}

fn opt(v: &Option<usize>) -> String {
    v.map_or_else(|| "-".to_string(), |n| n.to_string())
}

/// Success needs the hit to come no later than the first bankruptcy.
fn settle(hit: Option<usize>, bankrupt: Option<usize>) -> Outcome {
    match (hit, bankrupt) {
        (Some(h), Some(b)) if b < h => Outcome::Bankrupt(b),
        (Some(h), _) => Outcome::AchievedAt(h),
        (None, Some(b)) => Outcome::Bankrupt(b),
        (None, None) => Outcome::Inconclusive,
    }
}

/// Streaming check for gains (on capital) or consumption (on accumulated
/// consumption).
#[derive(Clone, Debug)]
pub struct ThresholdMonitor {
    criterion: Criterion,
    threshold: Rational,
    hit: Option<usize>,
    bankrupt: Option<usize>,
}

impl ThresholdMonitor {
    pub fn new(cfg: &CriterionConfig) -> Result<Self, CriterionError> {
        if cfg.criterion == Criterion::Oscillation {
            return Err(CriterionError::WrongCriterion {
                expected: Criterion::Gains,
                actual: cfg.criterion,
            });
        }
        if !cfg.threshold.is_positive() {
            return Err(CriterionError::InvalidConfig {
                field: "threshold",
                reason: format!("{} is not positive", cfg.threshold),
            });
        }
        Ok(ThresholdMonitor {
            criterion: cfg.criterion,
            threshold: cfg.threshold.clone(),
            hit: None,
            bankrupt: None,
        })
    }

    fn check(&mut self, n: usize, capital: &Rational, accumulated: &Rational, bankrupt: bool) {
        let value = match self.criterion {
            Criterion::Consumption => accumulated,
            _ => capital,
        };
        if self.hit.is_none() && *value >= self.threshold {
            self.hit = Some(n);
        }
        if bankrupt && self.bankrupt.is_none() {
            self.bankrupt = Some(n);
        }
    }

    pub fn start(&mut self, head: &TraceHead) {
        self.check(0, &head.initial, &Rational::zero(), head.initial_bankrupt);
    }

    pub fn observe(&mut self, row: &TraceRow) {
        self.check(
            row.n,
            &row.capital,
            &row.accumulated_consumption,
            row.bankrupt,
        );
    }

    pub fn verdict(&self) -> Verdict {
        Verdict {
            outcome: settle(self.hit, self.bankrupt),
            witness: Witness::Threshold {
                hit: self.hit,
                bankrupt: self.bankrupt,
            },
        }
    }
}

/// Streaming band-crossing counter on proper-cover capital.
#[derive(Clone, Debug)]
pub struct OscillationMonitor {
    a: Rational,
    b: Rational,
    target: usize,
    above: Option<bool>,
    flips: Vec<usize>,
    bankrupt: Option<usize>,
}

impl OscillationMonitor {
    pub fn new(a: Rational, b: Rational, target: usize) -> Result<Self, CriterionError> {
        if a >= b {
            return Err(CriterionError::BandInvalid { a, b });
        }
        if target == 0 {
            return Err(CriterionError::InvalidConfig {
                field: "crossings",
                reason: "must be at least 1".into(),
            });
        }
        Ok(OscillationMonitor {
            a,
            b,
            target,
            above: None,
            flips: Vec::new(),
            bankrupt: None,
        })
    }

    pub fn from_config(cfg: &CriterionConfig) -> Result<Self, CriterionError> {
        let (a, b) = cfg.band.clone().ok_or(CriterionError::InvalidConfig {
            field: "band",
            reason: "oscillation needs a band".into(),
        })?;
        Self::new(a, b, cfg.crossings)
    }

    /// Feed the cover capital at step `n`.
    pub fn push(&mut self, n: usize, cover: &Rational, bankrupt: bool) {
        let state = if *cover < self.a {
            Some(false)
        } else if *cover > self.b {
            Some(true)
        } else {
            None
        };
        if let Some(s) = state {
            if self.above.is_some_and(|prev| prev != s) {
                self.flips.push(n);
            }
            self.above = Some(s);
        }
        if bankrupt && self.bankrupt.is_none() {
            self.bankrupt = Some(n);
        }
    }

    pub fn start(&mut self, head: &TraceHead) {
        self.push(0, &head.initial, head.initial_bankrupt);
    }

    pub fn observe(&mut self, row: &TraceRow) {
        self.push(row.n, &row.cover_capital(), row.bankrupt);
    }

    pub fn crossings(&self) -> &[usize] {
        &self.flips
    }

    pub fn verdict(&self) -> Verdict {
        let hit = self.flips.get(self.target - 1).copied();
        Verdict {
            outcome: settle(hit, self.bankrupt),
            witness: Witness::Crossings {
                steps: self.flips.clone(),
                bankrupt: self.bankrupt,
            },
        }
    }
}

/// Streaming tracker of the last step at which a statistic changed.
#[derive(Clone, Debug)]
pub struct StabilityMonitor {
    statistic: Statistic,
    last: Option<Rational>,
    last_change: usize,
    len: usize,
}

impl StabilityMonitor {
    pub fn new(statistic: Statistic) -> Self {
        StabilityMonitor {
            statistic,
            last: None,
            last_change: 0,
            len: 0,
        }
    }

    fn push(&mut self, n: usize, value: Rational) {
        if self.last.as_ref().is_some_and(|v| *v != value) {
            self.last_change = n;
        }
        self.last = Some(value);
        self.len = n;
    }

    pub fn start(&mut self, head: &TraceHead) {
        self.push(0, self.statistic.of(&head.initial, &Rational::zero()));
    }

    pub fn observe(&mut self, row: &TraceRow) {
        self.push(
            row.n,
            self.statistic
                .of(&row.capital, &row.accumulated_consumption),
        );
    }

    pub fn last_change(&self) -> usize {
        self.last_change
    }

    /// Stable iff the statistic did not change during the final `window`
    /// steps of what was observed.
    pub fn verdict(&self, window: usize) -> Result<Verdict, CriterionError> {
        if window == 0 || window > self.len {
            return Err(CriterionError::InvalidConfig {
                field: "window",
                reason: format!("must lie in 1..={}", self.len),
            });
        }
        let outcome = if self.last_change <= self.len - window {
            Outcome::StableInWindow
        } else {
            Outcome::Inconclusive
        };
        Ok(Verdict {
            outcome,
            witness: Witness::LastChange(self.last_change),
        })
    }
}

fn head_of(trace: &Trace) -> TraceHead {
    TraceHead {
        spec_label: trace.spec_label.clone(),
        initial: trace.initial.clone(),
        initial_bankrupt: trace.initial_bankrupt,
        horizon: trace.horizon,
    }
}

fn expect(cfg: &CriterionConfig, expected: Criterion) -> Result<(), CriterionError> {
    if cfg.criterion != expected {
        return Err(CriterionError::WrongCriterion {
            expected,
            actual: cfg.criterion,
        });
    }
    Ok(())
}

fn run_threshold(trace: &Trace, cfg: &CriterionConfig) -> Result<Verdict, CriterionError> {
    let mut m = ThresholdMonitor::new(cfg)?;
    m.start(&head_of(trace));
    trace.rows.iter().for_each(|r| m.observe(r));
    Ok(m.verdict())
}

/// First step with capital at least `G`, unless bankrupt earlier.
pub fn gains_verdict(trace: &Trace, cfg: &CriterionConfig) -> Result<Verdict, CriterionError> {
    expect(cfg, Criterion::Gains)?;
    run_threshold(trace, cfg)
}

/// First step with accumulated consumption at least `G`, unless bankrupt
/// earlier.
pub fn consumption_verdict(
    trace: &Trace,
    cfg: &CriterionConfig,
) -> Result<Verdict, CriterionError> {
    expect(cfg, Criterion::Consumption)?;
    run_threshold(trace, cfg)
}

/// Step of the `k`-th band crossing of the proper cover, unless bankrupt
/// earlier.
pub fn oscillation_verdict(
    trace: &Trace,
    cfg: &CriterionConfig,
) -> Result<Verdict, CriterionError> {
    expect(cfg, Criterion::Oscillation)?;
    let mut m = OscillationMonitor::from_config(cfg)?;
    m.start(&head_of(trace));
    trace.rows.iter().for_each(|r| m.observe(r));
    Ok(m.verdict())
}

/// Dispatch on `cfg.criterion`.
pub fn verdict(trace: &Trace, cfg: &CriterionConfig) -> Result<Verdict, CriterionError> {
    match cfg.criterion {
        Criterion::Gains => gains_verdict(trace, cfg),
        Criterion::Consumption => consumption_verdict(trace, cfg),
        Criterion::Oscillation => oscillation_verdict(trace, cfg),
    }
}

/// Whether `statistic` is constant over the final `window` steps.
pub fn stabilization_check(
    trace: &Trace,
    window: usize,
    statistic: Statistic,
) -> Result<Verdict, CriterionError> {
    let mut m = StabilityMonitor::new(statistic);
    m.start(&head_of(trace));
    trace.rows.iter().for_each(|r| m.observe(r));
    m.verdict(window)
}

/// Band centred on the midpoint of the range observed over the first half
/// of `values`, with half-width a quarter of that range. `None` when the
/// range is empty.
pub fn default_band(values: &[Rational]) -> Option<(Rational, Rational)> {
    let half = &values[..values.len().div_ceil(2)];
    let lo = half.iter().min()?;
    let hi = half.iter().max()?;
    if lo == hi {
        return None;
    }
    let mid = (lo + hi) / Rational::from_int(2);
    let quarter = (hi - lo) / Rational::from_int(4);
    Some((&mid - &quarter, mid + quarter))
}
