//! Supermartingales over binary histories, evaluated exactly.
//!
//! A supermartingale is described by its initial capital, a wager rule and a
//! marginal-consumption rule. Capital is never stored per history; it is
//! reconstructed by iterating the one-step identity
//!
//! ```text
//! M(σ, b) = M(σ) - c(σ) + b · M'(σ)
//! ```
//!
//! along the history. Both rules are supplied by a [`Rule`] state machine
//! which is advanced bit by bit, so a rule may depend on anything computable
//! from the history so far (including its own capital).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::history::Bit;
use crate::rational::Rational;
use crate::wager_set::WagerSet;

/// Wager and marginal consumption at one history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub wager: Rational,
    pub consumption: Rational,
}

impl Decision {
    pub fn bet(wager: Rational) -> Self {
        Decision {
            wager,
            consumption: Rational::zero(),
        }
    }

    pub fn idle() -> Self {
        Decision::bet(Rational::zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("wager {0} is not an integer")]
    NotInteger(Rational),
    #[error("source strategy failed: {0}")]
    Source(Box<EvalError>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("step {step}: wager {wager} is outside the wager set {set}")]
    WagerSetViolation {
        step: usize,
        wager: Rational,
        set: String,
    },
    #[error("step {step}: negative marginal consumption {consumption}")]
    ConsumptionNegative { step: usize, consumption: Rational },
    #[error("step {step}: {error}")]
    Rule { step: usize, error: RuleError },
    #[error("sequence has {available} bits but horizon {horizon} was requested")]
    InsufficientBits { available: usize, horizon: usize },
}

/// Incremental state machine behind a strategy.
///
/// `decide` is called at the current history (of length `position`) with the
/// strategy's capital there; `advance` moves past one bit and receives the
/// capital at the new history.
pub trait Rule: Send + Sync + fmt::Debug {
    fn decide(&self, position: usize, capital: &Rational) -> Result<Decision, RuleError>;
    fn advance(&mut self, bit: Bit, capital: &Rational) -> Result<(), RuleError>;
    fn box_clone(&self) -> Box<dyn Rule>;
}

impl Clone for Box<dyn Rule> {
    fn clone(&self) -> Self {
        self.box_clone()
    }
}

/// One step of capital: `capital - consumption + bit · wager`.
pub fn step(capital: &Rational, consumption: &Rational, wager: &Rational, bit: Bit) -> Rational {
    let moved = match bit {
        Bit::Plus => capital + wager,
        Bit::Minus => capital - wager,
    };
    moved - consumption
}

/// `capital - |wager| < consumption`.
pub fn is_bankrupt(capital: &Rational, wager: &Rational, consumption: &Rational) -> bool {
    capital - &wager.abs() < *consumption
}

struct SpecInner {
    label: String,
    initial: Rational,
    wager_set: WagerSet,
    proper: bool,
    rule: Box<dyn Rule>,
}

/// An immutable, shareable supermartingale description.
#[derive(Clone)]
pub struct SupermartingaleSpec(Arc<SpecInner>);

impl fmt::Debug for SupermartingaleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SupermartingaleSpec")
            .field("label", &self.0.label)
            .field("initial", &self.0.initial)
            .field("wager_set", &self.0.wager_set)
            .finish_non_exhaustive()
    }
}

type HistoryFn = dyn Fn(&[Bit], &Rational) -> Rational + Send + Sync;

#[derive(Clone)]
struct FnRule {
    history: Vec<Bit>,
    wager: Arc<HistoryFn>,
    consumption: Option<Arc<HistoryFn>>,
}

impl fmt::Debug for FnRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnRule(depth {})", self.history.len())
    }
}

impl Rule for FnRule {
    fn decide(&self, _position: usize, capital: &Rational) -> Result<Decision, RuleError> {
        Ok(Decision {
            wager: (self.wager)(&self.history, capital),
            consumption: self
                .consumption
                .as_ref()
                .map_or_else(Rational::zero, |c| c(&self.history, capital)),
        })
    }

    fn advance(&mut self, bit: Bit, _capital: &Rational) -> Result<(), RuleError> {
        self.history.push(bit);
        Ok(())
    }

    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

impl SupermartingaleSpec {
    /// `proper` declares that the rule never consumes.
    pub fn new(
        label: impl Into<String>,
        initial: Rational,
        wager_set: WagerSet,
        proper: bool,
        rule: Box<dyn Rule>,
    ) -> Self {
        SupermartingaleSpec(Arc::new(SpecInner {
            label: label.into(),
            initial,
            wager_set,
            proper,
            rule,
        }))
    }

    /// A proper martingale whose wager is a function of the history and of
    /// the capital reached along it.
    pub fn from_fn<F>(
        label: impl Into<String>,
        initial: Rational,
        wager_set: WagerSet,
        wager: F,
    ) -> Self
    where
        F: Fn(&[Bit], &Rational) -> Rational + Send + Sync + 'static,
    {
        let rule = FnRule {
            history: Vec::new(),
            wager: Arc::new(wager),
            consumption: None,
        };
        Self::new(label, initial, wager_set, true, Box::new(rule))
    }

    /// Like [`from_fn`](Self::from_fn) but with a marginal-consumption rule.
    pub fn from_fns<F, G>(
        label: impl Into<String>,
        initial: Rational,
        wager_set: WagerSet,
        wager: F,
        consumption: G,
    ) -> Self
    where
        F: Fn(&[Bit], &Rational) -> Rational + Send + Sync + 'static,
        G: Fn(&[Bit], &Rational) -> Rational + Send + Sync + 'static,
    {
        let rule = FnRule {
            history: Vec::new(),
            wager: Arc::new(wager),
            consumption: Some(Arc::new(consumption)),
        };
        Self::new(label, initial, wager_set, false, Box::new(rule))
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn initial(&self) -> &Rational {
        &self.0.initial
    }

    pub fn wager_set(&self) -> &WagerSet {
        &self.0.wager_set
    }

    /// Whether the strategy was built as a proper martingale.
    pub fn is_declared_proper(&self) -> bool {
        self.0.proper
    }

    pub fn relabeled(&self, label: impl Into<String>) -> Self {
        SupermartingaleSpec::new(
            label,
            self.0.initial.clone(),
            self.0.wager_set.clone(),
            self.0.proper,
            self.0.rule.box_clone(),
        )
    }

    /// A cursor positioned at the empty history.
    pub fn cursor(&self) -> Cursor {
        Cursor::new(self.clone())
    }

    /// A cursor positioned at `history`.
    pub fn cursor_at(&self, history: &[Bit]) -> Result<Cursor, EvalError> {
        let mut c = self.cursor();
        for &b in history {
            c.push(b)?;
        }
        Ok(c)
    }

    pub fn capital_at(&self, history: &[Bit]) -> Result<Rational, EvalError> {
        Ok(self.cursor_at(history)?.capital().clone())
    }

    pub fn decision_at(&self, history: &[Bit]) -> Result<Decision, EvalError> {
        self.cursor_at(history)?.decision().cloned()
    }

    pub fn wager_at(&self, history: &[Bit]) -> Result<Rational, EvalError> {
        Ok(self.decision_at(history)?.wager)
    }

    pub fn consumption_at(&self, history: &[Bit]) -> Result<Rational, EvalError> {
        Ok(self.decision_at(history)?.consumption)
    }
}

/// Position of a strategy along one history, with the decision at that
/// history already computed and validated.
#[derive(Clone)]
pub struct Cursor {
    spec: SupermartingaleSpec,
    position: usize,
    capital: Rational,
    accumulated: Rational,
    rule: Box<dyn Rule>,
    decision: Result<Decision, EvalError>,
}

impl fmt::Debug for Cursor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cursor")
            .field("label", &self.spec.label())
            .field("position", &self.position)
            .field("capital", &self.capital)
            .field("decision", &self.decision)
            .finish()
    }
}

impl Cursor {
    fn new(spec: SupermartingaleSpec) -> Self {
        let rule = spec.0.rule.box_clone();
        let capital = spec.0.initial.clone();
        let mut c = Cursor {
            spec,
            position: 0,
            capital,
            accumulated: Rational::zero(),
            rule,
            decision: Ok(Decision::idle()),
        };
        c.decision = c.compute_decision();
        c
    }

    fn compute_decision(&self) -> Result<Decision, EvalError> {
        let step = self.position;
        let d = self
            .rule
            .decide(step, &self.capital)
            .map_err(|error| EvalError::Rule { step, error })?;
        if d.consumption.is_negative() {
            return Err(EvalError::ConsumptionNegative {
                step,
                consumption: d.consumption,
            });
        }
        let set = self.spec.wager_set();
        if !set.contains(&d.wager, step) {
            return Err(EvalError::WagerSetViolation {
                step,
                wager: d.wager,
                set: set.to_string(),
            });
        }
        Ok(d)
    }

    pub fn spec(&self) -> &SupermartingaleSpec {
        &self.spec
    }

    /// Length of the current history.
    pub fn position(&self) -> usize {
        self.position
    }

    pub fn capital(&self) -> &Rational {
        &self.capital
    }

    /// Accumulated consumption along the current history.
    pub fn accumulated(&self) -> &Rational {
        &self.accumulated
    }

    /// Capital of the proper cover at the current history.
    pub fn cover_capital(&self) -> Rational {
        &self.capital + &self.accumulated
    }

    pub fn decision(&self) -> Result<&Decision, EvalError> {
        self.decision.as_ref().map_err(Clone::clone)
    }

    pub fn wager(&self) -> Result<&Rational, EvalError> {
        Ok(&self.decision()?.wager)
    }

    pub fn bankrupt(&self) -> Result<bool, EvalError> {
        let d = self.decision()?;
        Ok(is_bankrupt(&self.capital, &d.wager, &d.consumption))
    }

    /// Capital that `bit` would lead to, without moving.
    pub fn peek(&self, bit: Bit) -> Result<Rational, EvalError> {
        let d = self.decision()?;
        Ok(step(&self.capital, &d.consumption, &d.wager, bit))
    }

    /// Move past `bit`.
    pub fn push(&mut self, bit: Bit) -> Result<(), EvalError> {
        let d = self.decision.clone()?;
        self.capital = step(&self.capital, &d.consumption, &d.wager, bit);
        self.accumulated += &d.consumption;
        let step_index = self.position;
        self.rule
            .advance(bit, &self.capital)
            .map_err(|error| EvalError::Rule {
                step: step_index,
                error,
            })?;
        self.position += 1;
        self.decision = self.compute_decision();
        Ok(())
    }

    /// The two one-bit extensions of the current history.
    pub fn children(&self) -> Result<(Cursor, Cursor), EvalError> {
        let mut minus = self.clone();
        minus.push(Bit::Minus)?;
        let mut plus = self.clone();
        plus.push(Bit::Plus)?;
        Ok((minus, plus))
    }
}

#[derive(Clone, Debug)]
struct CoverRule {
    inner: Cursor,
}

impl Rule for CoverRule {
    fn decide(&self, _position: usize, _capital: &Rational) -> Result<Decision, RuleError> {
        let d = self
            .inner
            .decision()
            .map_err(|e| RuleError::Source(Box::new(e)))?;
        Ok(Decision::bet(d.wager.clone()))
    }

    fn advance(&mut self, bit: Bit, _capital: &Rational) -> Result<(), RuleError> {
        self.inner
            .push(bit)
            .map_err(|e| RuleError::Source(Box::new(e)))
    }

    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

/// The martingale with the same initial capital and wagers as `spec` and no
/// consumption.
pub fn proper_cover(spec: &SupermartingaleSpec) -> SupermartingaleSpec {
    if spec.is_declared_proper() {
        return spec.clone();
    }
    SupermartingaleSpec::new(
        format!("cover({})", spec.label()),
        spec.initial().clone(),
        spec.wager_set().clone(),
        true,
        Box::new(CoverRule {
            inner: spec.cursor(),
        }),
    )
}

/// Whether `spec` goes bankrupt at `history`.
pub fn bankrupt_at(spec: &SupermartingaleSpec, history: &[Bit]) -> Result<bool, EvalError> {
    spec.cursor_at(history)?.bankrupt()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BankruptcyPolicy {
    #[default]
    RecordAndContinue,
    StopAtBankruptcy,
}

/// State after step `n` of an evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub n: usize,
    pub bit: Bit,
    /// `M(x↾n)`.
    pub capital: Rational,
    /// `M'(x↾n-1)`, the wager that `bit` settled.
    pub wager: Rational,
    /// `c(x↾n-1)`, charged on the way to this row.
    pub consumption: Rational,
    /// `(M̃ - M)(x↾n)`.
    pub accumulated_consumption: Rational,
    /// Bankrupt at `x↾n` or at some earlier prefix.
    pub bankrupt: bool,
}

impl TraceRow {
    /// Capital of the proper cover, `M̃(x↾n)`.
    pub fn cover_capital(&self) -> Rational {
        &self.capital + &self.accumulated_consumption
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub spec_label: String,
    pub initial: Rational,
    /// Bankrupt already at the empty history.
    pub initial_bankrupt: bool,
    pub rows: Vec<TraceRow>,
    pub horizon: usize,
    /// Rows stop early because of [`BankruptcyPolicy::StopAtBankruptcy`].
    pub truncated: bool,
}

impl Trace {
    /// Capital at `x↾n` for `0 ≤ n ≤ rows.len()`.
    pub fn capital(&self, n: usize) -> &Rational {
        if n == 0 {
            &self.initial
        } else {
            &self.rows[n - 1].capital
        }
    }

    /// Capitals `M(x↾0), …, M(x↾len)`.
    pub fn capitals(&self) -> Vec<Rational> {
        std::iter::once(self.initial.clone())
            .chain(self.rows.iter().map(|r| r.capital.clone()))
            .collect()
    }

    /// Proper-cover capitals including the initial one.
    pub fn cover_capitals(&self) -> Vec<Rational> {
        std::iter::once(self.initial.clone())
            .chain(self.rows.iter().map(TraceRow::cover_capital))
            .collect()
    }

    /// First prefix length at which the strategy is bankrupt.
    pub fn bankrupt_step(&self) -> Option<usize> {
        if self.initial_bankrupt {
            return Some(0);
        }
        self.rows.iter().find(|r| r.bankrupt).map(|r| r.n)
    }

    pub fn bits(&self) -> Vec<Bit> {
        self.rows.iter().map(|r| r.bit).collect()
    }
}

/// Header information of a streamed evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceHead {
    pub spec_label: String,
    pub initial: Rational,
    pub initial_bankrupt: bool,
    pub horizon: usize,
}

/// Evaluate `spec` along `bits`, handing each row to `sink` instead of
/// storing it. Returns the trace header and whether rows were truncated.
pub fn evaluate_streaming<F>(
    spec: &SupermartingaleSpec,
    bits: &[Bit],
    horizon: usize,
    policy: BankruptcyPolicy,
    mut sink: F,
) -> Result<(TraceHead, bool), EvalError>
where
    F: FnMut(&TraceRow),
{
    if bits.len() < horizon {
        return Err(EvalError::InsufficientBits {
            available: bits.len(),
            horizon,
        });
    }
    let mut cursor = spec.cursor();
    let initial_bankrupt = cursor.bankrupt()?;
    let head = TraceHead {
        spec_label: spec.label().to_string(),
        initial: spec.initial().clone(),
        initial_bankrupt,
        horizon,
    };
    if initial_bankrupt && policy == BankruptcyPolicy::StopAtBankruptcy {
        return Ok((head, horizon > 0));
    }
    let mut bankrupt = initial_bankrupt;
    for (i, &bit) in bits[..horizon].iter().enumerate() {
        let d = cursor.decision()?.clone();
        cursor.push(bit)?;
        bankrupt = bankrupt || cursor.bankrupt()?;
        let row = TraceRow {
            n: i + 1,
            bit,
            capital: cursor.capital().clone(),
            wager: d.wager,
            consumption: d.consumption,
            accumulated_consumption: cursor.accumulated().clone(),
            bankrupt,
        };
        sink(&row);
        if bankrupt && policy == BankruptcyPolicy::StopAtBankruptcy {
            return Ok((head, i + 1 < horizon));
        }
    }
    Ok((head, false))
}

/// Evaluate `spec` along the first `horizon` bits.
pub fn evaluate(
    spec: &SupermartingaleSpec,
    bits: &[Bit],
    horizon: usize,
    policy: BankruptcyPolicy,
) -> Result<Trace, EvalError> {
    let mut rows = Vec::with_capacity(horizon);
    let (head, truncated) =
        evaluate_streaming(spec, bits, horizon, policy, |r| rows.push(r.clone()))?;
    Ok(Trace {
        spec_label: head.spec_label,
        initial: head.initial,
        initial_bankrupt: head.initial_bankrupt,
        rows,
        horizon,
        truncated,
    })
}
