//! A unit bettor gains without bound while no integer-valued
//! supermartingale of the family consumes without bound.
//!
//! With `m_1 = M(x↾n)`, each member's capital is divided by `m_e` with
//! remainder, `s_e = q_e·m_e + r_e`, and `m_{e+1} = m_e - r_e`. The
//! construction plays against the first member whose wager differs from
//! its quotient `q_e`. The word of pairs `⟨q_e, r_e⟩` up to that member
//! decreases lexicographically at every step.

use super::{
    certificate, hero_spec, players, power_constants, prepare, push_all, AdversaryError,
    Construction, Detail, Hero, LogRecord, Player, Preprocess, Theorem,
};
use crate::history::Bit;
use crate::martingale::SupermartingaleSpec;
use crate::rational::Rational;

struct Chain {
    pairs: Vec<(Rational, Rational)>,
    /// `i(n)`, 1-based, when found within the computed prefix.
    i: Option<usize>,
}

/// Division chain at the current position. Stops at `i(n)` unless `at_least`
/// more pairs are requested.
fn chain(hero: &Rational, players: &[Player], at_least: usize) -> Result<Chain, AdversaryError> {
    let mut m = hero.clone();
    let mut pairs = Vec::new();
    let mut i = None;
    for (e, p) in players.iter().enumerate() {
        if i.is_some() && e >= at_least {
            break;
        }
        if !m.is_positive() {
            break;
        }
        let s = p.capital();
        let q = (s / &m).floor();
        let r = s - &(&q * &m);
        if i.is_none() && *p.wager()? != q {
            i = Some(e + 1);
        }
        m = &m - &r;
        pairs.push((q, r));
    }
    Ok(Chain { pairs, i })
}

/// Build `horizon` bits against `family` (preprocessed: ceiled, solvent,
/// non-negative, then augmented with constants above the hero's reach).
pub fn diagonalize_gain_vs_consumption(
    family: &[SupermartingaleSpec],
    horizon: usize,
    certify: bool,
) -> Result<Construction, AdversaryError> {
    let members = prepare(family, Preprocess::for_theorem(Theorem::GainVsConsumption))?;
    let constants = power_constants(&Rational::from(1 + horizon));
    let augmented = constants.len();
    let mut all = members.clone();
    all.extend(constants);
    let mut players = players(&all)?;

    let hero_spec = hero_spec(Theorem::GainVsConsumption);
    let mut hero = Hero::new(&hero_spec)?;

    let mut bits = Vec::with_capacity(horizon);
    let mut log = Vec::with_capacity(horizon);
    let mut current = chain(hero.capital(), &players, 0)?;
    for n in 0..horizon {
        if certify {
            certificate(n, hero.capital().is_positive(), || {
                format!("(i) m_1 = {} is not positive", hero.capital())
            })?;
        }
        let i = current.i.ok_or(AdversaryError::Stuck { step: n })?;
        let (q_i, _) = &current.pairs[i - 1];
        let bit = if players[i - 1].wager()? <= q_i {
            Bit::Plus
        } else {
            Bit::Minus
        };
        let hero_before = hero.capital().clone();
        let consumed: Vec<bool> = players[..i]
            .iter()
            .map(|p| p.decision().map(|d| d.consumption.is_positive()))
            .collect::<Result<_, _>>()?;

        hero.push(bit)?;
        push_all(&mut players, bit)?;
        bits.push(bit);
        let next = chain(hero.capital(), &players, i)?;

        if certify {
            certificate(n, next.pairs.len() >= i, || {
                format!("chain at step {} stops before e = {i}", n + 1)
            })?;
            // (ii) and (iii) as one statement about the word of pairs up to
            // i: once some pair drops, the remainders below it are reset and
            // later pairs may grow.
            let first_change = (0..i).find(|&e| current.pairs[e] != next.pairs[e]);
            certificate(n, first_change.is_some(), || {
                format!("(iii) <q,r> of member {i} did not decrease")
            })?;
            let e = first_change.unwrap_or(i);
            let (before, after) = (&current.pairs[e], &next.pairs[e]);
            certificate(n, after < before, || {
                format!(
                    "(ii) <q,r> of member {} went from {}:{} to {}:{}",
                    e + 1,
                    before.0,
                    before.1,
                    after.0,
                    after.1
                )
            })?;
            if let Some(c) = consumed[..e].iter().position(|&c| c) {
                return Err(AdversaryError::Certificate {
                    step: n,
                    what: format!("(ii) member {} consumed but its pair is unchanged", c + 1),
                });
            }
        }
        log.push(LogRecord {
            n,
            bit,
            detail: Detail::Correction {
                hero: hero_before,
                i,
                pairs: current.pairs[..i].to_vec(),
            },
        });
        current = next;
    }
    Ok(Construction {
        theorem: Theorem::GainVsConsumption,
        bits,
        hero: hero_spec,
        members,
        augmented,
        log,
        certified: certify,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::{make, StrategyDescriptor};

    fn int(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn constant(v: i64) -> SupermartingaleSpec {
        make(&StrategyDescriptor::constant(int(v))).unwrap()
    }

    #[test]
    fn constants_only_give_all_plus() {
        let c = diagonalize_gain_vs_consumption(&[constant(5), constant(25)], 6, true).unwrap();
        assert!(c.bits.iter().all(|&b| b == Bit::Plus));
        match &c.log[0].detail {
            Detail::Correction { hero, i, pairs } => {
                assert_eq!(hero, &int(1));
                assert_eq!(*i, 1);
                assert_eq!(pairs[0], (int(5), int(0)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_family_uses_augmentation() {
        let c = diagonalize_gain_vs_consumption(&[], 40, true).unwrap();
        assert!(c.bits.iter().all(|&b| b == Bit::Plus));
        assert!(c.augmented >= 6);
    }

    #[test]
    fn consumer_is_starved() {
        let eater = make(&StrategyDescriptor::constant(int(20)).consuming(int(1))).unwrap();
        let bettor = make(&StrategyDescriptor::unit_bettor(int(3))).unwrap();
        let c = diagonalize_gain_vs_consumption(&[eater, bettor], 300, true).unwrap();
        assert_eq!(c.bits.len(), 300);
    }
}
