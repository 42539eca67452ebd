//! Constructions turning a strategy that succeeds in one sense into a
//! strategy that succeeds in another.
//!
//! Each output is an ordinary [`SupermartingaleSpec`] whose rule carries a
//! cursor of the source strategy plus the stopping-time bookkeeping for the
//! current history. Stopping times are therefore found lazily while the
//! output is evaluated, and the output stays a deterministic function of the
//! history: cloning a cursor clones the bookkeeping with it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::history::Bit;
use crate::martingale::{
    proper_cover, Cursor, Decision, EvalError, Rule, RuleError, SupermartingaleSpec,
};
use crate::rational::Rational;
use crate::wager_set::WagerSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransformKind {
    #[serde(rename = "osc2cons")]
    Osc2Cons,
    #[serde(rename = "v2unit")]
    V2Unit,
    #[serde(rename = "gain2osc")]
    Gain2Osc,
    #[serde(rename = "gain2cons")]
    Gain2Cons,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Osc2Cons => "osc2cons",
            TransformKind::V2Unit => "v2unit",
            TransformKind::Gain2Osc => "gain2osc",
            TransformKind::Gain2Cons => "gain2cons",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            TransformKind::Osc2Cons,
            TransformKind::V2Unit,
            TransformKind::Gain2Osc,
            TransformKind::Gain2Cons,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("band ({a}, {b}) is empty: need a < b")]
    BandInvalid { a: Rational, b: Rational },
    #[error("initial capital {0} is below 2")]
    InitialTooSmall(Rational),
    #[error("initial capital {0} is not positive")]
    NonpositiveCapital(Rational),
    #[error("source wager set {0} is not contained in V")]
    NotV(String),
    #[error("source strategy fails at the empty history: {0}")]
    Source(EvalError),
}

fn source_err(e: EvalError) -> RuleError {
    RuleError::Source(Box::new(e))
}

/// Whether every nonzero wager allowed by `set` has absolute value at least 1.
pub fn within_v(set: &WagerSet) -> bool {
    match set {
        WagerSet::V | WagerSet::Integers | WagerSet::Unit | WagerSet::OnePlusHarmonicSchedule => {
            true
        }
        WagerSet::FiniteSet(v) => v.iter().all(|a| a.is_zero() || a.abs() >= Rational::one()),
        WagerSet::Reals | WagerSet::HarmonicSchedule { .. } => false,
    }
}

fn check_source(m: &SupermartingaleSpec) -> Result<Cursor, TransformError> {
    let c = m.cursor();
    c.decision().map_err(TransformError::Source)?;
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum OscPhase {
    /// Before `n_0`, or after an odd stopping time: waiting for capital below `a`.
    SeekLow,
    /// Copying wagers until capital exceeds `b`.
    Copy,
}

#[derive(Clone, Debug)]
struct OscToConsRule {
    source: Cursor,
    a: Rational,
    b: Rational,
    phase: OscPhase,
    charge_here: bool,
}

impl OscToConsRule {
    fn observe(&mut self) {
        let v = self.source.capital();
        self.charge_here = false;
        match self.phase {
            OscPhase::SeekLow if *v < self.a => self.phase = OscPhase::Copy,
            OscPhase::Copy if *v > self.b => {
                self.phase = OscPhase::SeekLow;
                self.charge_here = true;
            }
            _ => {}
        }
    }
}

impl Rule for OscToConsRule {
    fn decide(&self, _: usize, _: &Rational) -> Result<Decision, RuleError> {
        let wager = match self.phase {
            OscPhase::Copy => self.source.wager().map_err(source_err)?.clone(),
            OscPhase::SeekLow => Rational::zero(),
        };
        let consumption = if self.charge_here {
            &self.b - &self.a
        } else {
            Rational::zero()
        };
        Ok(Decision { wager, consumption })
    }

    fn advance(&mut self, bit: Bit, _: &Rational) -> Result<(), RuleError> {
        self.source.push(bit).map_err(source_err)?;
        self.observe();
        Ok(())
    }

    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

/// Copy the wagers of `m`'s proper cover from each visit below `a` until the
/// next visit above `b`, consuming `b - a` on arrival above `b`.
pub fn oscillation_to_consumption(
    m: &SupermartingaleSpec,
    a: Rational,
    b: Rational,
) -> Result<SupermartingaleSpec, TransformError> {
    if a >= b {
        return Err(TransformError::BandInvalid { a, b });
    }
    let source = check_source(&proper_cover(m))?;
    let initial = &a * Rational::from_int(2);
    let mut rule = OscToConsRule {
        source,
        a,
        b,
        phase: OscPhase::SeekLow,
        charge_here: false,
    };
    rule.observe();
    Ok(SupermartingaleSpec::new(
        format!("osc2cons({})", m.label()),
        initial,
        m.wager_set().clone(),
        false,
        Box::new(rule),
    ))
}

#[derive(Clone, Debug)]
struct VToUnitRule {
    source: Cursor,
    t0: usize,
    level: Rational,
}

impl Rule for VToUnitRule {
    fn decide(&self, position: usize, capital: &Rational) -> Result<Decision, RuleError> {
        let half = Rational::new(1, 2);
        let near = (self.source.capital() - &self.level).abs() < half;
        if position < self.t0 || !near {
            return Ok(Decision::idle());
        }
        let sign = self.source.wager().map_err(source_err)?.signum() as i64;
        let wager = if *capital == Rational::one() {
            sign
        } else if *capital == Rational::from_int(2) {
            -sign
        } else {
            0
        };
        Ok(Decision::bet(Rational::from_int(wager)))
    }

    fn advance(&mut self, bit: Bit, _: &Rational) -> Result<(), RuleError> {
        self.source.push(bit).map_err(source_err)
    }

    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

/// Toggle between capital 1 and 2 whenever `m` is within 1/2 of `level`
/// at or after step `t0`.
pub fn v_oscillation_to_unit(
    m: &SupermartingaleSpec,
    t0: usize,
    level: Rational,
) -> Result<SupermartingaleSpec, TransformError> {
    if !within_v(m.wager_set()) {
        return Err(TransformError::NotV(m.wager_set().to_string()));
    }
    let source = check_source(m)?;
    Ok(SupermartingaleSpec::new(
        format!("v2unit({})", m.label()),
        Rational::one(),
        WagerSet::finite([Rational::one(), Rational::from_int(-1)]),
        true,
        Box::new(VToUnitRule { source, t0, level }),
    ))
}

/// Estimate the level and start step used by [`v_oscillation_to_unit`] from
/// a capital series `M(x↾0), …, M(x↾len)`: the level is the minimum over the
/// final half, and `t0` the first step after which capital stays above
/// `level - 1/2`.
pub fn estimate_level(capitals: &[Rational]) -> Option<(Rational, usize)> {
    let len = capitals.len().checked_sub(1)?;
    let level = capitals[len / 2..].iter().min()?.clone();
    let floor = &level - Rational::new(1, 2);
    let t0 = capitals
        .iter()
        .rposition(|c| *c <= floor)
        .map_or(0, |t| t + 1);
    Some((level, t0))
}

/// Doubling epochs of a source capital: a new epoch starts at the first step
/// whose capital is at least twice the capital at the current epoch start.
#[derive(Clone, Debug)]
struct Epochs {
    base: Rational,
    index: usize,
    /// `Σ_{j<index} 1/M(n_j)`.
    reciprocal_sum: Rational,
}

impl Epochs {
    fn new(base: Rational) -> Self {
        Epochs {
            base,
            index: 0,
            reciprocal_sum: Rational::zero(),
        }
    }

    /// Returns whether `capital` opens a new epoch.
    fn observe(&mut self, capital: &Rational) -> bool {
        if *capital < &self.base * Rational::from_int(2) {
            return false;
        }
        self.reciprocal_sum += self.base.recip();
        self.base = capital.clone();
        self.index += 1;
        true
    }
}

#[derive(Clone, Debug)]
struct GainToOscRule {
    source: Cursor,
    epochs: Epochs,
    negate: bool,
}

impl Rule for GainToOscRule {
    fn decide(&self, _: usize, _: &Rational) -> Result<Decision, RuleError> {
        let w = self.source.wager().map_err(source_err)? / &self.epochs.base;
        Ok(Decision::bet(if self.negate { -w } else { w }))
    }

    fn advance(&mut self, bit: Bit, capital: &Rational) -> Result<(), RuleError> {
        self.source.push(bit).map_err(source_err)?;
        if self.epochs.observe(self.source.capital()) {
            self.negate = *capital >= Rational::from_int(5);
        }
        Ok(())
    }

    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

/// Start at 5 and, in each doubling epoch of `m`, follow `m`'s relative
/// wagers towards 5: against them while at or above 5, with them below.
pub fn r_gains_to_oscillation(
    m: &SupermartingaleSpec,
) -> Result<SupermartingaleSpec, TransformError> {
    if !m.initial().is_positive() {
        return Err(TransformError::NonpositiveCapital(m.initial().clone()));
    }
    let source = check_source(m)?;
    Ok(SupermartingaleSpec::new(
        format!("gain2osc({})", m.label()),
        Rational::from_int(5),
        WagerSet::Reals,
        true,
        Box::new(GainToOscRule {
            source,
            epochs: Epochs::new(m.initial().clone()),
            negate: true,
        }),
    ))
}

#[derive(Clone, Debug)]
struct GainToConsRule {
    source: Cursor,
    epochs: Epochs,
    charge_here: bool,
}

impl GainToConsRule {
    fn factor(&self) -> Rational {
        Rational::from_int(2) - &self.epochs.reciprocal_sum
    }
}

impl Rule for GainToConsRule {
    fn decide(&self, _: usize, _: &Rational) -> Result<Decision, RuleError> {
        let wager = self.source.wager().map_err(source_err)? * self.factor();
        let consumption = if self.charge_here {
            Rational::one()
        } else {
            Rational::zero()
        };
        Ok(Decision { wager, consumption })
    }

    fn advance(&mut self, bit: Bit, _: &Rational) -> Result<(), RuleError> {
        self.source.push(bit).map_err(source_err)?;
        self.charge_here = self.epochs.observe(self.source.capital());
        Ok(())
    }

    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

/// Scale `m`'s wagers by `2 - Σ_{j<i} 1/M(n_j)` in doubling epoch `i` and
/// consume one unit at the start of every epoch after the first.
pub fn v_gains_to_consumption(
    m: &SupermartingaleSpec,
) -> Result<SupermartingaleSpec, TransformError> {
    if *m.initial() < Rational::from_int(2) {
        return Err(TransformError::InitialTooSmall(m.initial().clone()));
    }
    if !within_v(m.wager_set()) {
        return Err(TransformError::NotV(m.wager_set().to_string()));
    }
    let source = check_source(m)?;
    Ok(SupermartingaleSpec::new(
        format!("gain2cons({})", m.label()),
        m.initial() * Rational::from_int(2),
        WagerSet::V,
        false,
        Box::new(GainToConsRule {
            source,
            epochs: Epochs::new(m.initial().clone()),
            charge_here: false,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::History;
    use crate::martingale::{evaluate, BankruptcyPolicy, Trace};
    use crate::rational::rat;
    use crate::strategies::{make, StrategyDescriptor};

    fn int(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn run(spec: &SupermartingaleSpec, bits: &str) -> Trace {
        let h: History = bits.parse().unwrap();
        evaluate(spec, &h, h.len(), BankruptcyPolicy::default()).unwrap()
    }

    fn alternator() -> SupermartingaleSpec {
        make(&StrategyDescriptor::alternator(int(2), int(2))).unwrap()
    }

    #[test]
    fn osc2cons_on_alternator() {
        let m = alternator();
        assert_eq!(
            run(&m, "++++").capitals(),
            vec![int(2), int(3), int(2), int(3), int(2)]
        );
        let s = oscillation_to_consumption(&m, rat(9, 4), rat(11, 4)).unwrap();
        assert_eq!(s.initial(), &rat(9, 2));
        let t = run(&s, "++++++++++");
        assert_eq!(t.capital(2), &int(5));
        assert_eq!(t.rows[1].accumulated_consumption, rat(1, 2));
        for k in 1..=4 {
            assert_eq!(t.rows[2 * k].accumulated_consumption, rat(k as i64, 2));
        }
    }

    #[test]
    fn osc2cons_idle_inside_band() {
        let m = make(&StrategyDescriptor::constant(int(3))).unwrap();
        let s = oscillation_to_consumption(&m, int(2), int(4)).unwrap();
        let t = run(&s, "+-+-+-");
        assert!(t.capitals().iter().all(|c| *c == int(4)));
        assert!(t.rows.iter().all(|r| r.accumulated_consumption.is_zero()));
    }

    #[test]
    fn osc2cons_rejects_empty_band() {
        let m = alternator();
        assert!(matches!(
            oscillation_to_consumption(&m, int(3), int(3)),
            Err(TransformError::BandInvalid { .. })
        ));
    }

    #[test]
    fn v2unit_on_cycle() {
        let s = v_oscillation_to_unit(&alternator(), 0, int(2)).unwrap();
        let t = run(&s, "++++++++");
        // idle while the source sits at 3, so each capital repeats once
        assert_eq!(t.capitals(), [1, 2, 2, 1, 1, 2, 2, 1, 1].map(int).to_vec());
    }

    #[test]
    fn v2unit_needs_v_source() {
        let m = make(&StrategyDescriptor::proportional(int(1), 1)).unwrap();
        assert!(matches!(
            v_oscillation_to_unit(&m, 0, int(1)),
            Err(TransformError::NotV(_))
        ));
    }

    #[test]
    fn level_estimate() {
        let caps = [5, 4, 3, 2, 3, 2, 3, 2, 3].map(int);
        assert_eq!(estimate_level(&caps), Some((int(2), 0)));
        let caps = [1, 1, 5, 4, 5, 4, 5].map(int);
        assert_eq!(estimate_level(&caps), Some((int(4), 2)));
    }

    #[test]
    fn gain2osc_on_doubler() {
        let m = make(&StrategyDescriptor::proportional(int(1), 1)).unwrap();
        let s = r_gains_to_oscillation(&m).unwrap();
        assert_eq!(
            run(&s, "++++++").capitals(),
            [5, 4, 5, 4, 5, 4, 5].map(int).to_vec()
        );
    }

    #[test]
    fn gain2osc_single_epoch() {
        let m = make(&StrategyDescriptor::unit_bettor(int(4))).unwrap();
        let s = r_gains_to_oscillation(&m).unwrap();
        // 4, 5, 6, 7: never doubles, direction stays negative
        let t = run(&s, "+++");
        assert_eq!(
            t.capitals(),
            vec![int(5), rat(19, 4), rat(9, 2), rat(17, 4)]
        );
    }

    #[test]
    fn gain2cons_scaling_and_consumption() {
        let m = make(&StrategyDescriptor::proportional(int(2), 1)).unwrap();
        assert!(matches!(
            v_gains_to_consumption(&m),
            Err(TransformError::NotV(_))
        ));

        let m = make(&StrategyDescriptor::unit_bettor(int(2))).unwrap();
        let s = v_gains_to_consumption(&m).unwrap();
        assert_eq!(s.initial(), &int(4));
        // source 2,3,4,5,6,7,8: epochs start at steps 2 (4) and 6 (8)
        let t = run(&s, "+++++++");
        assert_eq!(t.rows[0].wager, int(2));
        assert_eq!(t.rows[2].wager, rat(3, 2));
        assert_eq!(t.rows[2].consumption, int(1));
        assert_eq!(t.rows[6].wager, rat(5, 4));
        assert_eq!(t.rows[6].consumption, int(1));
        assert_eq!(t.rows[6].accumulated_consumption, int(2));
        let ws = WagerSet::V;
        assert!(t.rows.iter().all(|r| ws.contains(&r.wager, 0)));
    }

    #[test]
    fn gain2cons_needs_capital_two() {
        let m = make(&StrategyDescriptor::unit_bettor(int(1))).unwrap();
        assert_eq!(
            v_gains_to_consumption(&m).unwrap_err(),
            TransformError::InitialTooSmall(int(1))
        );
    }
}
