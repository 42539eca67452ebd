//! A harmonic bettor gains without bound while no V-supermartingale of the
//! family does, with positive probability over fair coin flips.
//!
//! Time alternates between random (odd) phases and adversarial (even)
//! phases. An odd phase ends at the first `t` with `Σ_{j≤i+1} S_j(x↾t) < t`;
//! the following even phase plays against the first member that has bet
//! since the phase began, and ends once `Σ x_t/t` over the phase reaches `L`.

use super::{
    certificate, hero_descriptor, players, prepare, push_all, AdversaryError, Construction, Detail,
    Hero, LogRecord, Phase, Preprocess, Theorem,
};
use crate::history::Bit;
use crate::martingale::SupermartingaleSpec;
use crate::rational::Rational;
use crate::rng::CoinFlips;
use crate::strategies::make;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealVsVParams {
    /// Target of each even phase's harmonic sum.
    pub level: Rational,
    /// Hero's initial capital.
    pub c0: Rational,
    pub seed: u64,
}

impl Default for RealVsVParams {
    fn default() -> Self {
        RealVsVParams {
            level: Rational::from_int(4),
            c0: Rational::from_int(3),
            seed: 0,
        }
    }
}

impl RealVsVParams {
    /// The hero: `c0 + (L + 2) Σ x_i / i`.
    pub fn hero(&self) -> SupermartingaleSpec {
        let d = hero_descriptor(Theorem::RealVsV, self).expect("real-vs-v has a hero");
        make(&d).expect("harmonic descriptor is valid")
    }
}

/// Build `horizon` bits against `family` (V-strategies made solvent, so
/// non-negative).
pub fn diagonalize_r_vs_v_gains(
    family: &[SupermartingaleSpec],
    horizon: usize,
    params: &RealVsVParams,
    certify: bool,
) -> Result<Construction, AdversaryError> {
    let members = prepare(family, Preprocess::for_theorem(Theorem::RealVsV))?;
    let mut players = players(&members)?;
    let hero_spec = params.hero();
    let mut hero = Hero::new(&hero_spec)?;
    let mut coin = CoinFlips::new(params.seed);

    let mut phase = Phase::Odd;
    // i in n_{2i} ≤ n < n_{2i+1} (odd) or n_{2i+1} ≤ n < n_{2i+2} (even)
    let mut index = 0usize;
    let mut boundary = true;
    let mut active: Option<usize> = None;
    let mut partial = Rational::zero();
    let mut bits = Vec::with_capacity(horizon);
    let mut log = Vec::with_capacity(horizon);

    for n in 0..horizon {
        let mut target = None;
        let bit = match phase {
            Phase::Odd => coin.next_bit(),
            Phase::Even => {
                let first_betting = players
                    .iter()
                    .position(|p| p.wager().is_ok_and(|w| !w.is_zero()));
                if let Some(j) = first_betting {
                    active = Some(active.map_or(j, |a| a.min(j)));
                }
                match active {
                    Some(j) if j <= index => {
                        target = Some(j);
                        if players[j].wager()?.is_positive() {
                            Bit::Minus
                        } else {
                            Bit::Plus
                        }
                    }
                    _ => Bit::Plus,
                }
            }
        };
        log.push(LogRecord {
            n,
            bit,
            detail: Detail::Stochastic {
                phase,
                index,
                target,
                boundary,
                partial: partial.clone(),
            },
        });

        let watched = (index + 1).min(players.len());
        let floors_before: Vec<Rational> = players[..watched]
            .iter()
            .map(|p| p.capital().floor())
            .collect();
        hero.push(bit)?;
        push_all(&mut players, bit)?;
        bits.push(bit);
        let t = n + 1;
        boundary = false;
        match phase {
            Phase::Odd => {
                let total = players[..watched]
                    .iter()
                    .fold(Rational::zero(), |acc, p| acc + p.capital());
                if total < Rational::from(t) {
                    phase = Phase::Even;
                    boundary = true;
                    active = None;
                    partial = Rational::zero();
                }
            }
            Phase::Even => {
                partial += Rational::from_int(bit.sign()) / Rational::from(t);
                if certify {
                    let floors_after: Vec<Rational> = players[..watched]
                        .iter()
                        .map(|p| p.capital().floor())
                        .collect();
                    certificate(n, floors_after <= floors_before, || {
                        "member floors increased lexicographically during an even phase".to_string()
                    })?;
                    certificate(n, partial > Rational::from_int(-1), || {
                        format!("even-phase harmonic sum fell to {partial}")
                    })?;
                }
                if partial >= params.level {
                    phase = Phase::Odd;
                    boundary = true;
                    index += 1;
                }
            }
        }
    }
    Ok(Construction {
        theorem: Theorem::RealVsV,
        bits,
        hero: hero_spec,
        members,
        augmented: 0,
        log,
        certified: certify,
    })
}
