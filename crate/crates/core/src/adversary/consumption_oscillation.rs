//! A unit bettor that saves half of its running maximum consumes without
//! bound while no V-martingale of the family oscillates.
//!
//! The pairs `(S_e, k_e)` enumerate family members times thresholds
//! `k = 1, 2, …` along diagonals `d = j + k - 1`, members in file order
//! within a diagonal. A pair receives attention when it is the first with
//! `S_e ≤ k_e`, `m > e` and `S'_e ≠ 0`; the next bit then goes against it.

use super::{
    certificate, hero_spec, players, prepare, push_all, AdversaryError, Construction, Detail,
    LogRecord, Player, Preprocess, Theorem,
};
use crate::history::Bit;
use crate::martingale::SupermartingaleSpec;
use crate::rational::Rational;

/// 1-based position of the pair (member `j`, threshold `k ≥ 1`) in the
/// dovetailed enumeration over `members` members.
pub fn attention_index(j: usize, k: u64, members: usize) -> u64 {
    let p = members as u64;
    let d = j as u64 + k - 1;
    let before = if d <= p {
        d * (d + 1) / 2
    } else {
        p * (p + 1) / 2 + (d - p) * p
    };
    before + j as u64 + 1
}

/// Smallest threshold `k ≥ 1` with `capital ≤ k`.
fn least_threshold(capital: &Rational) -> u64 {
    let c = capital.ceil();
    if c <= Rational::one() {
        1
    } else {
        c.to_i64()
            .and_then(|v| u64::try_from(v).ok())
            .unwrap_or(u64::MAX / 4)
    }
}

/// The attention recipient `(e, member, k)` given `m`, if any.
fn recipient(players: &[Player], m: i64) -> Result<Option<(usize, usize, u64)>, AdversaryError> {
    let mut best: Option<(u64, usize, u64)> = None;
    for (j, p) in players.iter().enumerate() {
        if p.wager()?.is_zero() {
            continue;
        }
        let k = least_threshold(p.capital());
        let e = attention_index(j, k, players.len());
        if (e as i128) < m as i128 && best.is_none_or(|(b, _, _)| e < b) {
            best = Some((e, j, k));
        }
    }
    Ok(best.map(|(e, j, k)| (e as usize, j, k)))
}

/// First pair index at which the tuples `a_n` and `a_{n+1}` differ, and
/// whether the later tuple is smaller there. Entries are
/// `min(k_e, ⌊S_e⌋)`, so member `j`'s entries differ exactly for thresholds
/// above the smaller of its two floors.
fn first_difference(before: &[Rational], after: &[Rational]) -> Option<(u64, bool)> {
    let members = before.len();
    before
        .iter()
        .zip(after)
        .enumerate()
        .filter(|(_, (b, a))| b != a)
        .map(|(j, (b, a))| {
            let low = if a < b { a } else { b };
            let k = if *low < Rational::one() {
                1
            } else {
                low.to_i64().unwrap_or(i64::MAX / 4) as u64 + 1
            };
            (attention_index(j, k, members), a < b)
        })
        .min_by_key(|(e, _)| *e)
}

/// Build `horizon` bits against `family` (V-strategies made solvent, so
/// non-negative).
pub fn diagonalize_consumption_vs_oscillation(
    family: &[SupermartingaleSpec],
    horizon: usize,
    certify: bool,
) -> Result<Construction, AdversaryError> {
    let members = prepare(
        family,
        Preprocess::for_theorem(Theorem::ConsumptionVsOscillation),
    )?;
    let mut players = players(&members)?;
    let hero_spec = hero_spec(Theorem::ConsumptionVsOscillation);

    let mut capital: i64 = 1;
    let mut max: i64 = 1;
    let mut saved: i64 = 0;
    let mut saved_last_step = false;
    let mut bits = Vec::with_capacity(horizon);
    let mut log = Vec::with_capacity(horizon);
    let floors_of = |players: &[Player]| {
        players
            .iter()
            .map(|p| p.capital().floor())
            .collect::<Vec<_>>()
    };
    let mut floors = floors_of(&players);

    for n in 0..horizon {
        let m = capital - saved;
        if certify {
            certificate(n, m >= 1, || format!("m = {m} dropped below 1"))?;
        }
        let target = recipient(&players, m)?;
        let bit = match target {
            Some((_, j, _)) => {
                let sign = players[j].wager()?.signum();
                Bit::against_sign(sign).expect("recipient bets")
            }
            None => Bit::Plus,
        };
        log.push(LogRecord {
            n,
            bit,
            detail: Detail::Attention {
                capital,
                saved,
                m,
                recipient: target,
                floors: floors.clone(),
            },
        });

        push_all(&mut players, bit)?;
        bits.push(bit);
        capital += bit.sign();
        max = max.max(capital);
        let new_saved = max.div_euclid(2);
        let next_floors = floors_of(&players);
        if certify {
            certificate(n, new_saved >= saved, || {
                format!("savings fell from {saved} to {new_saved}")
            })?;
            let increments = new_saved > saved;
            certificate(n, !(increments && saved_last_step), || {
                "savings grew at two consecutive steps".to_string()
            })?;
            let next_m = capital - new_saved;
            let len = m.min(next_m) - 1;
            if let Some((e, smaller)) = first_difference(&floors, &next_floors) {
                certificate(n, e as i64 > len || smaller, || {
                    format!("a_n increased at pair {e} (tuple length {len})")
                })?;
            }
            saved_last_step = increments;
        }
        saved = new_saved;
        floors = next_floors;
    }
    Ok(Construction {
        theorem: Theorem::ConsumptionVsOscillation,
        bits,
        hero: hero_spec,
        members,
        augmented: 0,
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

    #[test]
    fn enumeration_is_dovetailed() {
        // pairs: (0,1) (0,2) (1,1) (0,3) (1,2) (0,4) (1,3) ...
        let order: Vec<(usize, u64)> = vec![(0, 1), (0, 2), (1, 1), (0, 3), (1, 2), (0, 4), (1, 3)];
        for (pos, &(j, k)) in order.iter().enumerate() {
            assert_eq!(attention_index(j, k, 2), pos as u64 + 1, "({j},{k})");
        }
        assert_eq!(attention_index(2, 1, 3), 6);
        assert_eq!(attention_index(0, 1, 1), 1);
        assert_eq!(attention_index(0, 5, 1), 5);
    }

    #[test]
    fn constant_never_attended() {
        let c = make(&StrategyDescriptor::constant(int(3))).unwrap();
        let run = diagonalize_consumption_vs_oscillation(&[c], 10, true).unwrap();
        assert!(run.bits.iter().all(|&b| b == Bit::Plus));
        let saved: Vec<i64> = run
            .log
            .iter()
            .map(|r| match r.detail {
                Detail::Attention { saved, .. } => saved,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(&saved[..4], &[0, 1, 1, 2]);
    }

    #[test]
    fn empty_family_m_sequence() {
        let run = diagonalize_consumption_vs_oscillation(&[], 8, true).unwrap();
        assert!(run.bits.iter().all(|&b| b == Bit::Plus));
        let ms: Vec<i64> = run
            .log
            .iter()
            .map(|r| match r.detail {
                Detail::Attention { m, .. } => m,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(ms, vec![1, 1, 2, 2, 3, 3, 4, 4]);
    }

    #[test]
    fn bounded_bettor_is_attended() {
        let b = make(&StrategyDescriptor::alternator(int(2), int(2))).unwrap();
        let run = diagonalize_consumption_vs_oscillation(&[b], 2000, true).unwrap();
        assert!(run.log.iter().any(|r| matches!(
            r.detail,
            Detail::Attention {
                recipient: Some(_),
                ..
            }
        )));
    }

    #[test]
    fn plus_bettor_outruns_its_thresholds() {
        // its least threshold grows by one per step, m by one per two steps
        let b = make(&StrategyDescriptor::fixed(int(10), int(1))).unwrap();
        let run = diagonalize_consumption_vs_oscillation(&[b], 2000, true).unwrap();
        assert!(run.log.iter().all(|r| matches!(
            r.detail,
            Detail::Attention {
                recipient: None,
                ..
            }
        )));
        assert!(run.bits.iter().all(|&b| b == Bit::Plus));
    }
}
