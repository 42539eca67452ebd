//! The `1 + 1/n` bettor gains without bound while no integer-valued
//! supermartingale of the family does.
//!
//! `K(x↾n)` counts the consecutive losses the hero survives from step `n`.
//! The construction finds the first `e` with `K ≤ S_1 + … + S_e`, plays
//! against the first earlier member that bets, and otherwise lets member `e`
//! win only when it bets at most `S_e / k(n)`.

use super::{
    certificate, hero_spec, players, power_constants, prepare, push_all, AdversaryError,
    Construction, Detail, Hero, LogRecord, Player, Preprocess, Theorem,
};
use crate::harmonic::{harmonic_f64, survivable_losses};
use crate::history::Bit;
use crate::martingale::SupermartingaleSpec;
use crate::rational::Rational;

/// `e(n)` (1-based) and `k(n)`.
fn locate(big_k: u64, players: &[Player]) -> Option<(usize, u64)> {
    let target = Rational::from(big_k);
    let mut prefix = Rational::zero();
    for (e, p) in players.iter().enumerate() {
        let next = &prefix + p.capital();
        if target <= next {
            let k = (&target - &prefix).to_i64()?;
            return Some((e + 1, k as u64));
        }
        prefix = next;
    }
    None
}

/// Build `horizon` bits against `family` (ceiled, solvent, non-negative,
/// augmented with constants `2^j` beyond the hero's reach).
pub fn diagonalize_v_vs_z_gains(
    family: &[SupermartingaleSpec],
    horizon: usize,
    certify: bool,
) -> Result<Construction, AdversaryError> {
    let members = prepare(family, Preprocess::for_theorem(Theorem::VVsInteger))?;
    let reach = 2.0 + horizon as f64 + harmonic_f64(horizon as u64);
    let constants = power_constants(&Rational::from(reach.ceil() as u64));
    let augmented = constants.len();
    let mut all = members.clone();
    all.extend(constants);
    let mut players = players(&all)?;

    let hero_spec = hero_spec(Theorem::VVsInteger);
    let mut hero = Hero::new(&hero_spec)?;

    let mut bits = Vec::with_capacity(horizon);
    let mut log = Vec::with_capacity(horizon);
    // lower bound on e(n+1) promised by the previous step
    let mut promised: Option<(usize, &'static str)> = None;
    for n in 0..horizon {
        let big_k = survivable_losses(n as u64, hero.capital());
        if certify {
            certificate(n, big_k >= 1, || {
                format!("K = {big_k}: hero cannot survive a loss")
            })?;
        }
        let (e, k) = locate(big_k, &players).ok_or(AdversaryError::Stuck { step: n })?;
        if let (true, Some((bound, rule))) = (certify, promised) {
            certificate(n, e >= bound, || {
                format!("e(n+1) = {e} < {bound} after a {rule} bit")
            })?;
        }
        let s_e = players[e - 1].capital().clone();
        let kk = Rational::from(k);
        let q = (&s_e / &kk).floor();
        let r = &s_e - &(&q * &kk);

        let mut adversarial = None;
        for (j, p) in players[..e - 1].iter().enumerate() {
            if !p.wager()?.is_zero() {
                adversarial = Some(j + 1);
                break;
            }
        }
        let bit = match adversarial {
            Some(j) => {
                promised = Some((j, "adversarial"));
                Bit::against_sign(players[j - 1].wager()?.signum()).expect("member bets")
            }
            None => {
                promised = Some((e, "threshold"));
                if *players[e - 1].wager()? <= &s_e / &kk {
                    Bit::Plus
                } else {
                    Bit::Minus
                }
            }
        };
        log.push(LogRecord {
            n,
            bit,
            detail: Detail::Harmonic {
                big_k,
                e,
                k,
                q,
                r,
                adversarial,
            },
        });
        hero.push(bit)?;
        push_all(&mut players, bit)?;
        bits.push(bit);
    }
    Ok(Construction {
        theorem: Theorem::VVsInteger,
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
    use crate::martingale::{evaluate, BankruptcyPolicy};
    use crate::rational::rat;
    use crate::strategies::{make, StrategyDescriptor};

    fn int(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn constants_give_all_plus() {
        let fam: Vec<_> = [1, 2, 4, 8]
            .iter()
            .map(|&v| make(&StrategyDescriptor::constant(int(v))).unwrap())
            .collect();
        let run = diagonalize_v_vs_z_gains(&fam, 3, true).unwrap();
        assert!(run.bits.iter().all(|&b| b == Bit::Plus));
        match &run.log[0].detail {
            Detail::Harmonic { big_k, e, k, .. } => assert_eq!((*big_k, *e, *k), (1, 1, 1)),
            other => panic!("unexpected {other:?}"),
        }
        let t = evaluate(&run.hero, &run.bits, 3, BankruptcyPolicy::default()).unwrap();
        assert_eq!(t.capitals()[..3], [int(2), int(4), rat(11, 2)]);
    }

    #[test]
    fn unit_bettor_member() {
        let fam = vec![make(&StrategyDescriptor::unit_bettor(int(3))).unwrap()];
        let run = diagonalize_v_vs_z_gains(&fam, 500, true).unwrap();
        let t = evaluate(&run.hero, &run.bits, 500, BankruptcyPolicy::default()).unwrap();
        assert_eq!(t.bankrupt_step(), None);
    }
}
