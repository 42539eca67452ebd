//! Sequence constructions that favour one simple strategy (the hero) while
//! defeating every member of a finite family.
//!
//! Every construction emits the sequence bit by bit together with a
//! [`LogRecord`] per step describing its internal state. With certificate
//! checking on, the monotonicity facts the construction relies on are
//! asserted at every step and a violation aborts the run with
//! [`AdversaryError::Certificate`].

mod casino;
mod consumption_oscillation;
mod gain_consumption;
mod real_vs_v;
mod v_vs_integer;

use std::fmt;

use thiserror::Error;

pub use casino::{casino_demo, DEFAULT_PATIENCE};
pub use consumption_oscillation::{attention_index, diagonalize_consumption_vs_oscillation};
pub use gain_consumption::diagonalize_gain_vs_consumption;
pub use real_vs_v::{diagonalize_r_vs_v_gains, RealVsVParams};
pub use v_vs_integer::diagonalize_v_vs_z_gains;

use crate::history::Bit;
use crate::martingale::{
    is_bankrupt, Cursor, Decision, EvalError, Rule, RuleError, SupermartingaleSpec,
};
use crate::rational::Rational;
use crate::strategies::{make, StrategyDescriptor};
use crate::transforms::within_v;
use crate::wager_set::WagerSet;

/// Environment variable turning on per-step certificate checks.
pub const ASSERTS_ENV: &str = "WAGERLAB_ASSERTS";

/// Whether `WAGERLAB_ASSERTS=1` is set.
pub fn asserts_from_env() -> bool {
    std::env::var(ASSERTS_ENV).is_ok_and(|v| v == "1")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theorem {
    GainVsConsumption,
    ConsumptionVsOscillation,
    RealVsV,
    VVsInteger,
    Casino,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [
        Theorem::GainVsConsumption,
        Theorem::ConsumptionVsOscillation,
        Theorem::RealVsV,
        Theorem::VVsInteger,
        Theorem::Casino,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::GainVsConsumption => "gain-vs-consumption",
            Theorem::ConsumptionVsOscillation => "consumption-vs-oscillation",
            Theorem::RealVsV => "real-vs-v",
            Theorem::VVsInteger => "v-vs-integer",
            Theorem::Casino => "casino",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Descriptor of the hero a construction plays for. The casino takes its
/// hero from the caller, so it has none.
pub fn hero_descriptor(theorem: Theorem, params: &RealVsVParams) -> Option<StrategyDescriptor> {
    let one = Rational::one();
    let d = match theorem {
        Theorem::GainVsConsumption => StrategyDescriptor::unit_bettor(one),
        Theorem::ConsumptionVsOscillation => StrategyDescriptor::max_saver(one),
        Theorem::RealVsV => {
            StrategyDescriptor::harmonic(params.c0.clone(), &params.level + Rational::from_int(2))
        }
        Theorem::VVsInteger => StrategyDescriptor::one_plus_harmonic(Rational::from_int(2)),
        Theorem::Casino => return None,
    };
    Some(d.labeled("hero"))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error("family member {member} ({label}) is not integer-valued: {reason}")]
    FamilyNotInteger {
        member: usize,
        label: String,
        reason: String,
    },
    #[error("family member {member} ({label}) bets in {set}, which is not contained in V")]
    FamilyNotV {
        member: usize,
        label: String,
        set: String,
    },
    #[error("family member {member} ({label}) has negative initial capital {initial}")]
    NegativeInitial {
        member: usize,
        label: String,
        initial: Rational,
    },
    #[error("family member {member} ({label}) failed: {error}")]
    Member {
        member: usize,
        label: String,
        error: EvalError,
    },
    #[error("hero failed: {0}")]
    Hero(EvalError),
    #[error("step {step}: no family member can be attended to; the family needs larger constants")]
    Stuck { step: usize },
    #[error("step {step}: certificate violated: {what}")]
    Certificate { step: usize, what: String },
}

/// One member of a prepared family, positioned along the sequence built so
/// far.
#[derive(Clone, Debug)]
pub(crate) struct Player {
    pub index: usize,
    pub cursor: Cursor,
}

impl Player {
    pub fn decision(&self) -> Result<&Decision, AdversaryError> {
        self.cursor.decision().map_err(|error| self.fail(error))
    }

    pub fn capital(&self) -> &Rational {
        self.cursor.capital()
    }

    pub fn wager(&self) -> Result<&Rational, AdversaryError> {
        Ok(&self.decision()?.wager)
    }

    pub fn push(&mut self, bit: Bit) -> Result<(), AdversaryError> {
        self.cursor.push(bit).map_err(|error| self.fail(error))
    }

    fn fail(&self, error: EvalError) -> AdversaryError {
        let member = self.index;
        let label = self.cursor.spec().label().to_string();
        match not_integer(&error) {
            Some((v, step)) => AdversaryError::FamilyNotInteger {
                member,
                label,
                reason: format!("wager {v} at step {step}"),
            },
            None => AdversaryError::Member {
                member,
                label,
                error,
            },
        }
    }
}

/// The non-integer wager at the bottom of a chain of wrapped rules.
fn not_integer(error: &EvalError) -> Option<(&Rational, usize)> {
    match error {
        EvalError::Rule {
            error: RuleError::NotInteger(v),
            step,
        } => Some((v, *step)),
        EvalError::Rule {
            error: RuleError::Source(inner),
            ..
        } => not_integer(inner),
        _ => None,
    }
}

pub(crate) fn players(members: &[SupermartingaleSpec]) -> Result<Vec<Player>, AdversaryError> {
    let players: Vec<Player> = members
        .iter()
        .enumerate()
        .map(|(index, s)| Player {
            index,
            cursor: s.cursor(),
        })
        .collect();
    for p in &players {
        p.decision()?;
    }
    Ok(players)
}

pub(crate) fn push_all(players: &mut [Player], bit: Bit) -> Result<(), AdversaryError> {
    players.iter_mut().try_for_each(|p| p.push(bit))
}

/// Hero cursor wrapper with error mapping.
#[derive(Clone, Debug)]
pub(crate) struct Hero(pub Cursor);

impl Hero {
    pub fn new(spec: &SupermartingaleSpec) -> Result<Self, AdversaryError> {
        let c = spec.cursor();
        c.decision().map_err(AdversaryError::Hero)?;
        Ok(Hero(c))
    }

    pub fn capital(&self) -> &Rational {
        self.0.capital()
    }

    pub fn bankrupt(&self) -> Result<bool, AdversaryError> {
        self.0.bankrupt().map_err(AdversaryError::Hero)
    }

    pub fn push(&mut self, bit: Bit) -> Result<(), AdversaryError> {
        self.0.push(bit).map_err(AdversaryError::Hero)
    }
}

#[derive(Clone, Debug)]
struct CeilRule {
    inner: Cursor,
}

impl Rule for CeilRule {
    fn decide(&self, _: usize, _: &Rational) -> Result<Decision, RuleError> {
        let d = self
            .inner
            .decision()
            .map_err(|e| RuleError::Source(Box::new(e)))?;
        if !d.wager.is_integer() {
            return Err(RuleError::NotInteger(d.wager.clone()));
        }
        let s = self.inner.capital();
        let consumption = s.ceil() - (s - &d.consumption).ceil();
        Ok(Decision {
            wager: d.wager.clone(),
            consumption,
        })
    }

    fn advance(&mut self, bit: Bit, _: &Rational) -> Result<(), RuleError> {
        self.inner
            .push(bit)
            .map_err(|e| RuleError::Source(Box::new(e)))
    }

    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

/// `⌈S⌉`: integer capital, same (integer) wagers, consumption rounded so the
/// identity keeps holding.
pub fn ceiled(spec: &SupermartingaleSpec) -> SupermartingaleSpec {
    let proper = spec.is_declared_proper() && spec.initial().is_integer();
    let set = match spec.wager_set() {
        WagerSet::Reals | WagerSet::V => WagerSet::Integers,
        other => other.clone(),
    };
    SupermartingaleSpec::new(
        spec.label(),
        spec.initial().ceil(),
        set,
        proper,
        Box::new(CeilRule {
            inner: spec.cursor(),
        }),
    )
}

#[derive(Clone, Debug)]
struct SolventRule {
    inner: Cursor,
    frozen: bool,
}

impl SolventRule {
    fn stops_here(&self) -> Result<bool, RuleError> {
        if self.frozen {
            return Ok(true);
        }
        let d = self
            .inner
            .decision()
            .map_err(|e| RuleError::Source(Box::new(e)))?;
        Ok(is_bankrupt(self.inner.capital(), &d.wager, &d.consumption))
    }
}

impl Rule for SolventRule {
    fn decide(&self, _: usize, _: &Rational) -> Result<Decision, RuleError> {
        if self.stops_here()? {
            return Ok(Decision::idle());
        }
        Ok(self
            .inner
            .decision()
            .expect("checked by stops_here")
            .clone())
    }

    fn advance(&mut self, bit: Bit, _: &Rational) -> Result<(), RuleError> {
        if self.stops_here()? {
            self.frozen = true;
            return Ok(());
        }
        self.inner
            .push(bit)
            .map_err(|e| RuleError::Source(Box::new(e)))
    }

    fn box_clone(&self) -> Box<dyn Rule> {
        Box::new(self.clone())
    }
}

/// Stop betting and consuming for good at the first history where `spec`
/// would go bankrupt. Never bankrupt, and non-negative when the initial
/// capital is.
pub fn solvent(spec: &SupermartingaleSpec) -> SupermartingaleSpec {
    SupermartingaleSpec::new(
        spec.label(),
        spec.initial().clone(),
        spec.wager_set().clone(),
        spec.is_declared_proper(),
        Box::new(SolventRule {
            inner: spec.cursor(),
            frozen: false,
        }),
    )
}

/// Preprocessing applied to a family before a construction runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Preprocess {
    pub ceil: bool,
    pub solvent: bool,
    pub nonnegative: bool,
    pub require_v: bool,
}

impl Preprocess {
    pub fn for_theorem(theorem: Theorem) -> Self {
        match theorem {
            Theorem::GainVsConsumption | Theorem::VVsInteger | Theorem::Casino => Preprocess {
                ceil: true,
                solvent: true,
                nonnegative: true,
                require_v: false,
            },
            Theorem::ConsumptionVsOscillation | Theorem::RealVsV => Preprocess {
                ceil: false,
                solvent: true,
                nonnegative: true,
                require_v: true,
            },
        }
    }
}

/// Validate and wrap family members as `prep` asks.
pub fn prepare(
    members: &[SupermartingaleSpec],
    prep: Preprocess,
) -> Result<Vec<SupermartingaleSpec>, AdversaryError> {
    members
        .iter()
        .enumerate()
        .map(|(member, s)| {
            let label = s.label().to_string();
            if prep.require_v && !within_v(s.wager_set()) {
                return Err(AdversaryError::FamilyNotV {
                    member,
                    label,
                    set: s.wager_set().to_string(),
                });
            }
            if prep.nonnegative && s.initial().is_negative() {
                return Err(AdversaryError::NegativeInitial {
                    member,
                    label,
                    initial: s.initial().clone(),
                });
            }
            let mut out = s.clone();
            if prep.ceil {
                out = ceiled(&out);
            }
            if prep.solvent {
                out = solvent(&out);
            }
            Ok(out)
        })
        .collect()
}

/// Constant martingales `1, 2, 4, …` up to the first power of two above
/// `bound`.
pub fn power_constants(bound: &Rational) -> Vec<SupermartingaleSpec> {
    let mut out = Vec::new();
    let mut v = Rational::one();
    loop {
        let spec = make(&StrategyDescriptor::constant(v.clone()).labeled(format!("const({v})")))
            .expect("constant descriptors are valid");
        out.push(spec);
        if v > *bound {
            return out;
        }
        v = v * Rational::from_int(2);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Odd,
    Even,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CasinoPhase {
    /// Playing against the current member until it stops losing.
    Attack,
    /// Feeding the hero until its floor rises.
    Feed,
}

/// Construction-specific state at one step, before the bit is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Detail {
    /// `i(n)` and the pairs `⟨q_e, r_e⟩` for `e ≤ i(n)`.
    Correction {
        hero: Rational,
        i: usize,
        pairs: Vec<(Rational, Rational)>,
    },
    /// Hero capital `M`, savings `f`, `m = M - f`, the attention recipient
    /// `(e, member, k)` and the member floors (which determine `a_n`).
    Attention {
        capital: i64,
        saved: i64,
        m: i64,
        recipient: Option<(usize, usize, u64)>,
        floors: Vec<Rational>,
    },
    /// Phase and its index `i`; `boundary` marks the step as some `n_i`.
    Stochastic {
        phase: Phase,
        index: usize,
        target: Option<usize>,
        boundary: bool,
        partial: Rational,
    },
    /// `K(x↾n)`, `e(n)`, `k(n)`, `S_e = q·k + r`, and the member played
    /// against when the bit was adversarial.
    Harmonic {
        big_k: u64,
        e: usize,
        k: u64,
        q: Rational,
        r: Rational,
        adversarial: Option<usize>,
    },
    Casino {
        phase: CasinoPhase,
        player: Option<usize>,
        hero_floor: Rational,
        /// Capital of the member when its attack phase ended here.
        endpoint: Option<Rational>,
    },
}

/// Per-step log entry; `bit` is `x_{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogRecord {
    pub n: usize,
    pub bit: Bit,
    pub detail: Detail,
}

fn join<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn or_dash<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

impl LogRecord {
    /// CSV header of the log of `theorem`.
    pub fn csv_header(theorem: Theorem) -> &'static str {
        match theorem {
            Theorem::GainVsConsumption => "n,bit,hero,i,pairs",
            Theorem::ConsumptionVsOscillation => {
                "n,bit,capital,saved,m,attention_e,attention_member,attention_k,floors"
            }
            Theorem::RealVsV => "n,bit,phase,index,target,boundary,partial_sum",
            Theorem::VVsInteger => "n,bit,K,e,k,q,r,adversarial",
            Theorem::Casino => "n,bit,phase,player,hero_floor,endpoint",
        }
    }

    pub fn csv_row(&self) -> String {
        let head = format!("{},{}", self.n, self.bit);
        let rest = match &self.detail {
            Detail::Correction { hero, i, pairs } => {
                format!(
                    "{hero},{i},{}",
                    join(pairs.iter().map(|(q, r)| format!("{q}:{r}")))
                )
            }
            Detail::Attention {
                capital,
                saved,
                m,
                recipient,
                floors,
            } => format!(
                "{capital},{saved},{m},{},{},{},{}",
                or_dash(recipient.map(|r| r.0)),
                or_dash(recipient.map(|r| r.1)),
                or_dash(recipient.map(|r| r.2)),
                join(floors)
            ),
            Detail::Stochastic {
                phase,
                index,
                target,
                boundary,
                partial,
            } => format!(
                "{},{index},{},{},{partial}",
                match phase {
                    Phase::Odd => "odd",
                    Phase::Even => "even",
                },
                or_dash(*target),
                u8::from(*boundary)
            ),
            Detail::Harmonic {
                big_k,
                e,
                k,
                q,
                r,
                adversarial,
            } => format!("{big_k},{e},{k},{q},{r},{}", or_dash(*adversarial)),
            Detail::Casino {
                phase,
                player,
                hero_floor,
                endpoint,
            } => format!(
                "{},{},{hero_floor},{}",
                match phase {
                    CasinoPhase::Attack => "attack",
                    CasinoPhase::Feed => "feed",
                },
                or_dash(*player),
                or_dash(endpoint.as_ref())
            ),
        };
        format!("{head},{rest}")
    }
}

/// Result of a construction run.
#[derive(Clone, Debug)]
pub struct Construction {
    pub theorem: Theorem,
    pub bits: Vec<Bit>,
    pub hero: SupermartingaleSpec,
    /// The family after preprocessing, without augmentation constants.
    pub members: Vec<SupermartingaleSpec>,
    /// Number of constants appended to the family.
    pub augmented: usize,
    pub log: Vec<LogRecord>,
    /// Whether certificates were checked at every step.
    pub certified: bool,
}

impl Construction {
    pub fn log_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(LogRecord::csv_header(self.theorem));
        out.push('\n');
        for r in &self.log {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }
}

/// Hero of a deterministic construction, compiled.
pub(crate) fn hero_spec(theorem: Theorem) -> SupermartingaleSpec {
    let d = hero_descriptor(theorem, &RealVsVParams::default()).expect("construction has a hero");
    make(&d).expect("hero descriptors are valid")
}

pub(crate) fn certificate(
    step: usize,
    ok: bool,
    what: impl FnOnce() -> String,
) -> Result<(), AdversaryError> {
    if ok {
        Ok(())
    } else {
        Err(AdversaryError::Certificate { step, what: what() })
    }
}
