//! Named strategies and the strategy file format.
//!
//! A strategy file is TOML holding a list of `[[strategy]]` tables. Each
//! table names a `kind` plus the parameters that kind needs; rationals are
//! written as `"p/q"` strings (integers may be bare). The order of entries is
//! the priority order used by the diagonalization constructions.
//!
//! ```toml
//! [[strategy]]
//! kind = "unit_bettor"
//! initial = 1
//!
//! [[strategy]]
//! kind = "table"
//! initial = 3
//! depth = 2
//! wagers = { "" = 1, "+" = -1, "-" = 2 }
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::history::{Bit, History};
use crate::martingale::{Decision, Rule, RuleError, SupermartingaleSpec};
use crate::rational::Rational;
use crate::transforms::{self, TransformError, TransformKind};
use crate::wager_set::WagerSet;

/// Largest table depth accepted in strategy files.
pub const MAX_TABLE_DEPTH: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Constant,
    UnitBettor,
    Harmonic,
    OnePlusHarmonic,
    Proportional,
    Table,
    CasinoFractional,
    Alternator,
    Fixed,
    MaxSaver,
    Transform,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Constant => "constant",
            StrategyKind::UnitBettor => "unit_bettor",
            StrategyKind::Harmonic => "harmonic",
            StrategyKind::OnePlusHarmonic => "one_plus_harmonic",
            StrategyKind::Proportional => "proportional",
            StrategyKind::Table => "table",
            StrategyKind::CasinoFractional => "casino_fractional",
            StrategyKind::Alternator => "alternator",
            StrategyKind::Fixed => "fixed",
            StrategyKind::MaxSaver => "max_saver",
            StrategyKind::Transform => "transform",
        }
    }
}

/// Declarative description of a strategy. Which fields are required
/// depends on `kind`; [`make`] validates them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyDescriptor {
    pub kind: StrategyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consume: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wagers: Option<BTreeMap<String, Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consumption: Option<BTreeMap<String, Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wager: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub which: Option<TransformKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Box<StrategyDescriptor>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("bad {kind} descriptor: {reason}")]
    BadDescriptor { kind: &'static str, reason: String },
    #[error("transform failed: {0}")]
    Transform(#[from] TransformError),
    #[error("strategy file: {0}")]
    Parse(String),
}

impl StrategyDescriptor {
    pub fn of_kind(kind: StrategyKind) -> Self {
        StrategyDescriptor {
            kind,
            label: None,
            initial: None,
            consume: None,
            scale: None,
            direction: None,
            depth: None,
            wagers: None,
            consumption: None,
            pivot: None,
            wager: None,
            which: None,
            a: None,
            b: None,
            t0: None,
            level: None,
            source: None,
        }
    }

    fn with_initial(kind: StrategyKind, initial: Rational) -> Self {
        StrategyDescriptor {
            initial: Some(initial),
            ..Self::of_kind(kind)
        }
    }

    pub fn constant(initial: Rational) -> Self {
        Self::with_initial(StrategyKind::Constant, initial)
    }

    pub fn unit_bettor(initial: Rational) -> Self {
        Self::with_initial(StrategyKind::UnitBettor, initial)
    }

    pub fn harmonic(initial: Rational, scale: Rational) -> Self {
        StrategyDescriptor {
            scale: Some(scale),
            ..Self::with_initial(StrategyKind::Harmonic, initial)
        }
    }

    pub fn one_plus_harmonic(initial: Rational) -> Self {
        Self::with_initial(StrategyKind::OnePlusHarmonic, initial)
    }

    pub fn proportional(initial: Rational, direction: i64) -> Self {
        StrategyDescriptor {
            direction: Some(direction),
            ..Self::with_initial(StrategyKind::Proportional, initial)
        }
    }

    pub fn casino_fractional(initial: Rational) -> Self {
        Self::with_initial(StrategyKind::CasinoFractional, initial)
    }

    pub fn alternator(initial: Rational, pivot: Rational) -> Self {
        StrategyDescriptor {
            pivot: Some(pivot),
            ..Self::with_initial(StrategyKind::Alternator, initial)
        }
    }

    pub fn fixed(initial: Rational, wager: Rational) -> Self {
        StrategyDescriptor {
            wager: Some(wager),
            ..Self::with_initial(StrategyKind::Fixed, initial)
        }
    }

    pub fn max_saver(initial: Rational) -> Self {
        Self::with_initial(StrategyKind::MaxSaver, initial)
    }

    /// A table strategy; keys are `+`/`-` histories shorter than `depth`.
    pub fn table(initial: Rational, depth: usize, wagers: BTreeMap<String, Rational>) -> Self {
        StrategyDescriptor {
            depth: Some(depth),
            wagers: Some(wagers),
            ..Self::with_initial(StrategyKind::Table, initial)
        }
    }

    pub fn transform(which: TransformKind, source: StrategyDescriptor) -> Self {
        StrategyDescriptor {
            which: Some(which),
            source: Some(Box::new(source)),
            ..Self::of_kind(StrategyKind::Transform)
        }
    }

    pub fn consuming(mut self, amount: Rational) -> Self {
        self.consume = Some(amount);
        self
    }

    pub fn directed(mut self, direction: i64) -> Self {
        self.direction = Some(direction);
        self
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    fn bad(&self, reason: impl Into<String>) -> StrategyError {
        StrategyError::BadDescriptor {
            kind: self.kind.name(),
            reason: reason.into(),
        }
    }

    fn require_initial(&self) -> Result<Rational, StrategyError> {
        let initial = self
            .initial
            .clone()
            .ok_or_else(|| self.bad("missing `initial`"))?;
        if initial.is_negative() {
            return Err(self.bad(format!("initial capital {initial} is negative")));
        }
        Ok(initial)
    }

    fn require_direction(&self) -> Result<i64, StrategyError> {
        match self.direction.unwrap_or(1) {
            d @ (1 | -1) => Ok(d),
            d => Err(self.bad(format!("direction must be 1 or -1, got {d}"))),
        }
    }

    fn require_consume(&self) -> Result<Option<Rational>, StrategyError> {
        match &self.consume {
            Some(c) if c.is_negative() => Err(self.bad(format!("negative consumption {c}"))),
            Some(c) if c.is_zero() => Ok(None),
            other => Ok(other.clone()),
        }
    }

    fn forbid_others(&self, allowed: &[&str]) -> Result<(), StrategyError> {
        let present = [
            ("consume", self.consume.is_some()),
            ("scale", self.scale.is_some()),
            ("direction", self.direction.is_some()),
            ("depth", self.depth.is_some()),
            ("wagers", self.wagers.is_some()),
            ("consumption", self.consumption.is_some()),
            ("pivot", self.pivot.is_some()),
            ("wager", self.wager.is_some()),
            ("which", self.which.is_some()),
            ("a", self.a.is_some()),
            ("b", self.b.is_some()),
            ("t0", self.t0.is_some()),
            ("level", self.level.is_some()),
            ("source", self.source.is_some()),
        ];
        for (name, is_set) in present {
            if is_set && !allowed.contains(&name) {
                return Err(self.bad(format!("parameter `{name}` does not apply")));
            }
        }
        Ok(())
    }

    fn default_label(&self) -> String {
        let init = self
            .initial
            .as_ref()
            .map(|r| r.to_string())
            .unwrap_or_default();
        match self.kind {
            StrategyKind::Transform => {
                let which = self.which.map(|w| w.name()).unwrap_or("?");
                let src = self
                    .source
                    .as_ref()
                    .map(|s| s.label.clone().unwrap_or_else(|| s.default_label()))
                    .unwrap_or_default();
                format!("{which}({src})")
            }
            StrategyKind::Harmonic => {
                let scale = self.scale.clone().unwrap_or_else(Rational::one);
                format!("harmonic({init},{scale})")
            }
            StrategyKind::Fixed => {
                let w = self
                    .wager
                    .as_ref()
                    .map(|r| r.to_string())
                    .unwrap_or_default();
                format!("fixed({init},{w})")
            }
            StrategyKind::Alternator => {
                let p = self
                    .pivot
                    .as_ref()
                    .map(|r| r.to_string())
                    .unwrap_or_default();
                format!("alternator({init},{p})")
            }
            kind => match self.direction {
                Some(-1) => format!("{}({init},-)", kind.name()),
                _ => format!("{}({init})", kind.name()),
            },
        }
    }
}

#[derive(Clone, Debug)]
struct ConstantRule {
    consume: Option<Rational>,
}

impl Rule for ConstantRule {
    fn decide(&self, _: usize, capital: &Rational) -> Result<Decision, RuleError> {
        Ok(Decision {
            wager: Rational::zero(),
            consumption: solvent_consumption(&self.consume, capital),
        })
    }
    fn advance(&mut self, _: Bit, _: &Rational) -> Result<(), RuleError> {
        Ok(())
    }
    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

fn solvent_consumption(consume: &Option<Rational>, free: &Rational) -> Rational {
    match consume {
        Some(c) if free >= c => c.clone(),
        _ => Rational::zero(),
    }
}

#[derive(Clone, Debug)]
struct UnitRule {
    consume: Option<Rational>,
}

impl Rule for UnitRule {
    fn decide(&self, _: usize, capital: &Rational) -> Result<Decision, RuleError> {
        let free = capital - Rational::one();
        Ok(Decision {
            wager: Rational::one(),
            consumption: solvent_consumption(&self.consume, &free),
        })
    }
    fn advance(&mut self, _: Bit, _: &Rational) -> Result<(), RuleError> {
        Ok(())
    }
    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

#[derive(Clone, Debug)]
struct HarmonicRule {
    signed_scale: Rational,
}

impl Rule for HarmonicRule {
    fn decide(&self, n: usize, _: &Rational) -> Result<Decision, RuleError> {
        Ok(Decision::bet(
            &self.signed_scale * Rational::unit_fraction(n as u64 + 1),
        ))
    }
    fn advance(&mut self, _: Bit, _: &Rational) -> Result<(), RuleError> {
        Ok(())
    }
    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

#[derive(Clone, Debug)]
struct OnePlusHarmonicRule {
    direction: i64,
}

impl Rule for OnePlusHarmonicRule {
    fn decide(&self, n: usize, _: &Rational) -> Result<Decision, RuleError> {
        let w = Rational::one() + Rational::unit_fraction(n as u64 + 1);
        Ok(Decision::bet(if self.direction < 0 { -w } else { w }))
    }
    fn advance(&mut self, _: Bit, _: &Rational) -> Result<(), RuleError> {
        Ok(())
    }
    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

#[derive(Clone, Debug)]
struct ProportionalRule {
    direction: i64,
}

impl Rule for ProportionalRule {
    fn decide(&self, _: usize, capital: &Rational) -> Result<Decision, RuleError> {
        Ok(Decision::bet(if self.direction < 0 {
            -capital
        } else {
            capital.clone()
        }))
    }
    fn advance(&mut self, _: Bit, _: &Rational) -> Result<(), RuleError> {
        Ok(())
    }
    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

#[derive(Clone, Debug)]
struct CasinoRule;

impl Rule for CasinoRule {
    fn decide(&self, _: usize, capital: &Rational) -> Result<Decision, RuleError> {
        Ok(Decision::bet(capital.fract() / Rational::from_int(2)))
    }
    fn advance(&mut self, _: Bit, _: &Rational) -> Result<(), RuleError> {
        Ok(())
    }
    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(CasinoRule)
    }
}

#[derive(Clone, Debug)]
struct AlternatorRule {
    pivot: Rational,
}

impl Rule for AlternatorRule {
    fn decide(&self, _: usize, capital: &Rational) -> Result<Decision, RuleError> {
        Ok(Decision::bet(Rational::from_int(
            if *capital <= self.pivot { 1 } else { -1 },
        )))
    }
    fn advance(&mut self, _: Bit, _: &Rational) -> Result<(), RuleError> {
        Ok(())
    }
    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

#[derive(Clone, Debug)]
struct FixedRule {
    wager: Rational,
}

impl Rule for FixedRule {
    fn decide(&self, _: usize, _: &Rational) -> Result<Decision, RuleError> {
        Ok(Decision::bet(self.wager.clone()))
    }
    fn advance(&mut self, _: Bit, _: &Rational) -> Result<(), RuleError> {
        Ok(())
    }
    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

/// Unit bettor that saves `f = ⌊max cover capital / 2⌋`; the increase of
/// `f` observed on arriving at a history is consumed there.
#[derive(Clone, Debug)]
struct MaxSaverRule {
    cover: Rational,
    max: Rational,
    saved_before: Rational,
    saved: Rational,
}

impl MaxSaverRule {
    fn new(initial: &Rational) -> Self {
        let saved = (initial / Rational::from_int(2)).floor();
        MaxSaverRule {
            cover: initial.clone(),
            max: initial.clone(),
            saved_before: saved.clone(),
            saved,
        }
    }
}

impl Rule for MaxSaverRule {
    fn decide(&self, _: usize, _: &Rational) -> Result<Decision, RuleError> {
        Ok(Decision {
            wager: Rational::one(),
            consumption: &self.saved - &self.saved_before,
        })
    }
    fn advance(&mut self, bit: Bit, _: &Rational) -> Result<(), RuleError> {
        self.cover += Rational::from_int(bit.sign());
        if self.cover > self.max {
            self.max = self.cover.clone();
        }
        self.saved_before =
            std::mem::replace(&mut self.saved, (&self.max / Rational::from_int(2)).floor());
        Ok(())
    }
    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

#[derive(Clone, Debug)]
struct TableRule {
    depth: usize,
    wagers: Arc<BTreeMap<History, Rational>>,
    consumption: Arc<BTreeMap<History, Rational>>,
    history: History,
}

impl Rule for TableRule {
    fn decide(&self, n: usize, _: &Rational) -> Result<Decision, RuleError> {
        if n >= self.depth {
            return Ok(Decision::idle());
        }
        let get =
            |m: &BTreeMap<History, Rational>| m.get(&self.history).cloned().unwrap_or_default();
        Ok(Decision {
            wager: get(&self.wagers),
            consumption: get(&self.consumption),
        })
    }
    fn advance(&mut self, bit: Bit, _: &Rational) -> Result<(), RuleError> {
        if self.history.len() < self.depth {
            self.history.push(bit);
        }
        Ok(())
    }
    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

fn parse_table(
    desc: &StrategyDescriptor,
    depth: usize,
    entries: Option<&BTreeMap<String, Rational>>,
    what: &str,
) -> Result<BTreeMap<History, Rational>, StrategyError> {
    let mut out = BTreeMap::new();
    for (key, value) in entries.into_iter().flatten() {
        let h: History = key
            .parse()
            .map_err(|e| desc.bad(format!("{what} key {key:?}: {e}")))?;
        if h.len() >= depth {
            return Err(desc.bad(format!(
                "{what} key {key:?} is not shorter than depth {depth}"
            )));
        }
        out.insert(h, value.clone());
    }
    Ok(out)
}

/// Compile a descriptor into a supermartingale.
pub fn make(desc: &StrategyDescriptor) -> Result<SupermartingaleSpec, StrategyError> {
    let label = desc.label.clone().unwrap_or_else(|| desc.default_label());
    let spec = match desc.kind {
        StrategyKind::Constant => {
            desc.forbid_others(&["consume"])?;
            let consume = desc.require_consume()?;
            let proper = consume.is_none();
            SupermartingaleSpec::new(
                label,
                desc.require_initial()?,
                WagerSet::finite([]),
                proper,
                Box::new(ConstantRule { consume }),
            )
        }
        StrategyKind::UnitBettor => {
            desc.forbid_others(&["consume"])?;
            let consume = desc.require_consume()?;
            let proper = consume.is_none();
            SupermartingaleSpec::new(
                label,
                desc.require_initial()?,
                WagerSet::Unit,
                proper,
                Box::new(UnitRule { consume }),
            )
        }
        StrategyKind::Harmonic => {
            desc.forbid_others(&["scale", "direction"])?;
            let scale = desc.scale.clone().unwrap_or_else(Rational::one);
            if !scale.is_positive() {
                return Err(desc.bad(format!("scale {scale} must be positive")));
            }
            let signed_scale = &scale * Rational::from_int(desc.require_direction()?);
            SupermartingaleSpec::new(
                label,
                desc.require_initial()?,
                WagerSet::HarmonicSchedule { scale },
                true,
                Box::new(HarmonicRule { signed_scale }),
            )
        }
        StrategyKind::OnePlusHarmonic => {
            desc.forbid_others(&["direction"])?;
            SupermartingaleSpec::new(
                label,
                desc.require_initial()?,
                WagerSet::OnePlusHarmonicSchedule,
                true,
                Box::new(OnePlusHarmonicRule {
                    direction: desc.require_direction()?,
                }),
            )
        }
        StrategyKind::Proportional => {
            desc.forbid_others(&["direction"])?;
            SupermartingaleSpec::new(
                label,
                desc.require_initial()?,
                WagerSet::Reals,
                true,
                Box::new(ProportionalRule {
                    direction: desc.require_direction()?,
                }),
            )
        }
        StrategyKind::CasinoFractional => {
            desc.forbid_others(&[])?;
            SupermartingaleSpec::new(
                label,
                desc.require_initial()?,
                WagerSet::Reals,
                true,
                Box::new(CasinoRule),
            )
        }
        StrategyKind::Alternator => {
            desc.forbid_others(&["pivot"])?;
            let pivot = desc
                .pivot
                .clone()
                .ok_or_else(|| desc.bad("missing `pivot`"))?;
            SupermartingaleSpec::new(
                label,
                desc.require_initial()?,
                WagerSet::finite([Rational::one(), Rational::from_int(-1)]),
                true,
                Box::new(AlternatorRule { pivot }),
            )
        }
        StrategyKind::Fixed => {
            desc.forbid_others(&["wager"])?;
            let wager = desc
                .wager
                .clone()
                .ok_or_else(|| desc.bad("missing `wager`"))?;
            SupermartingaleSpec::new(
                label,
                desc.require_initial()?,
                WagerSet::finite([wager.clone()]),
                true,
                Box::new(FixedRule { wager }),
            )
        }
        StrategyKind::MaxSaver => {
            desc.forbid_others(&[])?;
            let initial = desc.require_initial()?;
            SupermartingaleSpec::new(
                label,
                initial.clone(),
                WagerSet::Unit,
                false,
                Box::new(MaxSaverRule::new(&initial)),
            )
        }
        StrategyKind::Table => {
            desc.forbid_others(&["depth", "wagers", "consumption"])?;
            let depth = desc.depth.ok_or_else(|| desc.bad("missing `depth`"))?;
            if depth > MAX_TABLE_DEPTH {
                return Err(desc.bad(format!("depth {depth} exceeds the bound {MAX_TABLE_DEPTH}")));
            }
            let wagers = parse_table(desc, depth, desc.wagers.as_ref(), "wager")?;
            let consumption = parse_table(desc, depth, desc.consumption.as_ref(), "consumption")?;
            if let Some((h, c)) = consumption.iter().find(|(_, c)| c.is_negative()) {
                return Err(desc.bad(format!("negative consumption {c} at {h:?}")));
            }
            let proper = consumption.values().all(Rational::is_zero);
            SupermartingaleSpec::new(
                label,
                desc.require_initial()?,
                WagerSet::finite(wagers.values().cloned()),
                proper,
                Box::new(TableRule {
                    depth,
                    wagers: Arc::new(wagers),
                    consumption: Arc::new(consumption),
                    history: History::empty(),
                }),
            )
        }
        StrategyKind::Transform => {
            desc.forbid_others(&["which", "a", "b", "t0", "level", "source"])?;
            if desc.initial.is_some() {
                return Err(desc.bad("`initial` is determined by the transform"));
            }
            let which = desc.which.ok_or_else(|| desc.bad("missing `which`"))?;
            let source = make(
                desc.source
                    .as_deref()
                    .ok_or_else(|| desc.bad("missing `source`"))?,
            )?;
            let need = |v: &Option<Rational>, name: &str| {
                v.clone()
                    .ok_or_else(|| desc.bad(format!("`{}` needs `{name}`", which.name())))
            };
            let out = match which {
                TransformKind::Osc2Cons => transforms::oscillation_to_consumption(
                    &source,
                    need(&desc.a, "a")?,
                    need(&desc.b, "b")?,
                )?,
                TransformKind::V2Unit => transforms::v_oscillation_to_unit(
                    &source,
                    desc.t0.unwrap_or(0),
                    need(&desc.level, "level")?,
                )?,
                TransformKind::Gain2Osc => transforms::r_gains_to_oscillation(&source)?,
                TransformKind::Gain2Cons => transforms::v_gains_to_consumption(&source)?,
            };
            out.relabeled(label)
        }
    };
    Ok(spec)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyFile {
    #[serde(default)]
    strategy: Vec<StrategyDescriptor>,
}

/// Parse a strategy (or family) file.
pub fn parse_strategy_file(text: &str) -> Result<Vec<StrategyDescriptor>, StrategyError> {
    toml::from_str::<StrategyFile>(text)
        .map(|f| f.strategy)
        .map_err(|e| StrategyError::Parse(e.to_string()))
}

pub fn render_strategy_file(descriptors: &[StrategyDescriptor]) -> String {
    toml::to_string(&StrategyFile {
        strategy: descriptors.to_vec(),
    })
    .expect("strategy descriptors always serialize")
}

/// Parse and compile every entry of a strategy file.
pub fn load_strategies(text: &str) -> Result<Vec<SupermartingaleSpec>, StrategyError> {
    parse_strategy_file(text)?.iter().map(make).collect()
}

/// One representative of every builtin kind, used by soundness sweeps.
pub fn builtin_catalog() -> Vec<StrategyDescriptor> {
    let int = Rational::from_int;
    let mut table = BTreeMap::new();
    table.insert(String::new(), int(1));
    table.insert("+".to_string(), int(-2));
    table.insert("-".to_string(), int(1));
    table.insert("+-".to_string(), Rational::new(1, 2));
    let mut table_consumption = BTreeMap::new();
    table_consumption.insert("-".to_string(), int(1));
    let mut consuming_table = StrategyDescriptor::table(int(4), 3, table.clone());
    consuming_table.consumption = Some(table_consumption);
    vec![
        StrategyDescriptor::constant(int(5)),
        StrategyDescriptor::constant(int(7)).consuming(int(1)),
        StrategyDescriptor::unit_bettor(int(1)),
        StrategyDescriptor::unit_bettor(int(4)).consuming(Rational::new(1, 2)),
        StrategyDescriptor::harmonic(int(1), int(1)),
        StrategyDescriptor::harmonic(int(3), int(6)).directed(-1),
        StrategyDescriptor::one_plus_harmonic(int(2)),
        StrategyDescriptor::proportional(int(1), 1),
        StrategyDescriptor::proportional(Rational::new(3, 2), -1),
        StrategyDescriptor::table(int(3), 3, table),
        consuming_table,
        StrategyDescriptor::casino_fractional(Rational::new(7, 3)),
        StrategyDescriptor::alternator(int(2), int(2)),
        StrategyDescriptor::fixed(int(3), int(-2)),
        StrategyDescriptor::max_saver(int(1)),
    ]
}

/// Human-readable description of the strategy file schema.
pub const SCHEMA: &str = "\
Strategy files are TOML with one [[strategy]] table per entry. Rationals are
\"p/q\" strings or integers. Every entry may carry an optional `label`.

kind = \"constant\"           initial, [consume]     wager 0; consumes `consume` per step while capital allows
kind = \"unit_bettor\"        initial, [consume]     wagers 1 on +1 every step
kind = \"harmonic\"           initial, [scale], [direction]
                                                  wagers direction*scale/n at time n
kind = \"one_plus_harmonic\"  initial, [direction]   wagers direction*(1+1/n) at time n
kind = \"proportional\"       initial, [direction]   wagers direction*capital
kind = \"table\"              initial, depth, wagers, [consumption]
                                                  per-history tables keyed by +/- strings shorter
                                                  than depth (\"\" is the empty history); 0 elsewhere
kind = \"casino_fractional\"  initial                wagers half the fractional part of capital on +1
kind = \"alternator\"         initial, pivot         wagers +1 at capital <= pivot, -1 above
kind = \"fixed\"              initial, wager         wagers the same amount every step
kind = \"max_saver\"          initial                unit bettor consuming floor(max capital / 2)
kind = \"transform\"          which, source, params  which = osc2cons (a, b) | v2unit (level, [t0])
                                                  | gain2osc | gain2cons; source is an inline table

direction is 1 (bet on +1, default) or -1. Entry order is the priority order
used by `construct`.
";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::{evaluate, BankruptcyPolicy};
    use crate::rational::rat;

    fn run(desc: &StrategyDescriptor, bits: &str) -> Vec<Rational> {
        let spec = make(desc).unwrap();
        let h: History = bits.parse().unwrap();
        evaluate(&spec, &h, h.len(), BankruptcyPolicy::default())
            .unwrap()
            .capitals()
    }

    fn int(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn constant_never_moves() {
        let caps = run(&StrategyDescriptor::constant(int(5)), "+-+-++");
        assert!(caps.iter().all(|c| *c == int(5)));
    }

    #[test]
    fn one_plus_harmonic_example() {
        let caps = run(&StrategyDescriptor::one_plus_harmonic(int(2)), "+-");
        assert_eq!(caps, vec![int(2), int(4), rat(5, 2)]);
    }

    #[test]
    fn casino_fractional_bets_half_the_fraction() {
        let spec = make(&StrategyDescriptor::casino_fractional(rat(7, 3))).unwrap();
        assert_eq!(spec.wager_at(&[]).unwrap(), rat(1, 6));
        assert_eq!(spec.capital_at(&[Bit::Plus]).unwrap(), rat(5, 2));
        assert_eq!(spec.capital_at(&[Bit::Minus]).unwrap(), rat(13, 6));
    }

    #[test]
    fn proportional_doubles() {
        let caps = run(&StrategyDescriptor::proportional(int(1), 1), "+++");
        assert_eq!(caps, vec![int(1), int(2), int(4), int(8)]);
    }

    #[test]
    fn max_saver_savings() {
        let spec = make(&StrategyDescriptor::max_saver(int(1))).unwrap();
        let h: History = "+++".parse().unwrap();
        let t = evaluate(&spec, &h, 3, BankruptcyPolicy::default()).unwrap();
        // f along the path is 0,1,1,2; it is consumed one step after it is observed
        let acc: Vec<_> = t
            .rows
            .iter()
            .map(|r| r.accumulated_consumption.clone())
            .collect();
        assert_eq!(acc, vec![int(0), int(1), int(1)]);
        let c = spec.cursor_at(&h).unwrap();
        assert_eq!(c.decision().unwrap().consumption, int(1));
    }

    #[test]
    fn table_lookup_and_default() {
        let mut w = BTreeMap::new();
        w.insert(String::new(), int(2));
        w.insert("-".into(), int(-1));
        let desc = StrategyDescriptor::table(int(5), 2, w);
        let spec = make(&desc).unwrap();
        assert_eq!(spec.wager_at(&[]).unwrap(), int(2));
        assert_eq!(spec.wager_at(&[Bit::Minus]).unwrap(), int(-1));
        assert_eq!(spec.wager_at(&[Bit::Plus]).unwrap(), int(0));
        assert_eq!(spec.wager_at(&[Bit::Minus, Bit::Minus]).unwrap(), int(0));
        assert_eq!(spec.wager_set(), &WagerSet::finite([int(2), int(-1)]));
    }

    #[test]
    fn bad_descriptors_are_rejected() {
        let mut deep = StrategyDescriptor::table(int(1), MAX_TABLE_DEPTH + 1, BTreeMap::new());
        assert!(matches!(
            make(&deep),
            Err(StrategyError::BadDescriptor { .. })
        ));
        deep.depth = Some(1);
        deep.wagers = Some([("+".to_string(), int(1))].into_iter().collect());
        assert!(make(&deep).is_err());
        assert!(make(&StrategyDescriptor::of_kind(StrategyKind::UnitBettor)).is_err());
        assert!(make(&StrategyDescriptor::unit_bettor(int(-1))).is_err());
        assert!(make(&StrategyDescriptor::proportional(int(1), 2)).is_err());
        let mut stray = StrategyDescriptor::constant(int(1));
        stray.pivot = Some(int(1));
        assert!(make(&stray).is_err());
    }

    #[test]
    fn file_round_trip() {
        let catalog = builtin_catalog();
        let text = render_strategy_file(&catalog);
        assert_eq!(parse_strategy_file(&text).unwrap(), catalog);
        for d in &catalog {
            make(d).unwrap();
        }
    }

    #[test]
    fn file_parsing_accepts_bare_integers_and_rejects_unknown_keys() {
        let text = "[[strategy]]\nkind = \"unit_bettor\"\ninitial = 3\n\n[[strategy]]\nkind = \"constant\"\ninitial = \"7/2\"\n";
        let specs = load_strategies(text).unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[1].initial(), &rat(7, 2));
        let bad = "[[strategy]]\nkind = \"constant\"\ninitial = 1\ncolour = \"red\"\n";
        assert!(matches!(
            parse_strategy_file(bad),
            Err(StrategyError::Parse(_))
        ));
    }
}
