//! Sets of admissible wagers.
//!
//! Schedule kinds are position-indexed: the wager placed at a history of
//! length `n` is checked against the schedule value for time `n + 1`.

use std::fmt;

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WagerSet {
    Reals,
    /// `{0} ∪ {a : |a| ≥ 1}`.
    V,
    Integers,
    /// `{0, 1}`.
    Unit,
    /// `{0, ±scale/(n+1)}` at step `n`.
    HarmonicSchedule {
        scale: Rational,
    },
    /// `{0, ±(1 + 1/(n+1))}` at step `n`.
    OnePlusHarmonicSchedule,
    /// Sorted, deduplicated, always containing 0.
    FiniteSet(Vec<Rational>),
}

impl WagerSet {
    /// A finite set built from `entries`; 0 is always added.
    pub fn finite<I: IntoIterator<Item = Rational>>(entries: I) -> Self {
        let mut v: Vec<Rational> = entries.into_iter().collect();
        v.push(Rational::zero());
        v.sort();
        v.dedup();
        WagerSet::FiniteSet(v)
    }

    pub fn harmonic() -> Self {
        WagerSet::HarmonicSchedule {
            scale: Rational::one(),
        }
    }

    pub fn contains(&self, a: &Rational, n: usize) -> bool {
        if a.is_zero() {
            return !matches!(self, WagerSet::FiniteSet(v) if v.binary_search(a).is_err());
        }
        match self {
            WagerSet::Reals => true,
            WagerSet::V => a.abs() >= Rational::one(),
            WagerSet::Integers => a.is_integer(),
            WagerSet::Unit => *a == Rational::one(),
            WagerSet::HarmonicSchedule { scale } => {
                a.abs() == scale.abs() * Rational::unit_fraction(n as u64 + 1)
            }
            WagerSet::OnePlusHarmonicSchedule => {
                a.abs() == Rational::one() + Rational::unit_fraction(n as u64 + 1)
            }
            WagerSet::FiniteSet(v) => v.binary_search(a).is_ok(),
        }
    }
}

impl fmt::Display for WagerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WagerSet::Reals => write!(f, "R"),
            WagerSet::V => write!(f, "V"),
            WagerSet::Integers => write!(f, "Z"),
            WagerSet::Unit => write!(f, "{{1}}"),
            WagerSet::HarmonicSchedule { scale } => write!(f, "{{{scale}/n}}"),
            WagerSet::OnePlusHarmonicSchedule => write!(f, "{{1+1/n}}"),
            WagerSet::FiniteSet(v) => {
                write!(f, "{{")?;
                for (i, a) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "}}")
            }
        }
    }
}
