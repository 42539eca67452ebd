//! Exact simulation of betting strategies with restricted wagers on binary
//! sequences.
//!
//! Strategies are supermartingales over `{-1,+1}` histories, evaluated with
//! exact rationals. On top of the evaluator sit finite-horizon monitors for
//! the three success criteria (unbounded gains, unbounded consumption and
//! oscillation), transformations between strategy classes, and sequence
//! constructions that defeat whole families of strategies while a designated
//! simple strategy succeeds.
//!
//! ```
//! use wagerlab::{evaluate, make, BankruptcyPolicy, History, Rational, StrategyDescriptor};
//!
//! let unit = make(&StrategyDescriptor::unit_bettor(Rational::one())).unwrap();
//! let x: History = "++-".parse().unwrap();
//! let trace = evaluate(&unit, &x, 3, BankruptcyPolicy::default()).unwrap();
//! assert_eq!(trace.capital(3), &Rational::from_int(2));
//! ```

pub mod adversary;
pub mod criteria;
pub mod harmonic;
pub mod history;
pub mod io;
pub mod martingale;
pub mod rational;
pub mod rng;
pub mod strategies;
pub mod sweep;
pub mod transforms;
pub mod wager_set;

pub use criteria::{CriterionConfig, Outcome, Statistic, Verdict};
pub use history::{Bit, History};
pub use martingale::{
    bankrupt_at, evaluate, evaluate_streaming, proper_cover, step, BankruptcyPolicy, Decision,
    EvalError, SupermartingaleSpec, Trace, TraceRow,
};
pub use rational::Rational;
pub use strategies::{make, StrategyDescriptor, StrategyKind};
pub use wager_set::WagerSet;
