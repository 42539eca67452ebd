//! The casino story: a bettor wagering half the fractional part of its
//! capital on `+` never loses its integer part, and the casino drives every
//! integer-valued gambler to its minimum in turn.
//!
//! Members are attacked round-robin. While the current member bets, it is
//! made to lose; once it has not lost for `patience` consecutive steps its
//! minimum is taken as reached, and `+` is played until the hero's floor
//! rises by one.

use super::{
    certificate, players, prepare, push_all, AdversaryError, CasinoPhase, Construction, Detail,
    Hero, LogRecord, Preprocess, Theorem,
};
use crate::history::Bit;
use crate::martingale::SupermartingaleSpec;
use crate::rational::Rational;

pub const DEFAULT_PATIENCE: usize = 8;

/// Build `horizon` bits for `hero` against `family` (ceiled, solvent,
/// non-negative).
pub fn casino_demo(
    hero: &SupermartingaleSpec,
    family: &[SupermartingaleSpec],
    horizon: usize,
    patience: usize,
    certify: bool,
) -> Result<Construction, AdversaryError> {
    let members = prepare(family, Preprocess::for_theorem(Theorem::Casino))?;
    let mut players = players(&members)?;
    let mut cursor = Hero::new(hero)?;

    let mut phase = if players.is_empty() {
        CasinoPhase::Feed
    } else {
        CasinoPhase::Attack
    };
    let mut player = 0usize;
    let mut quiet = 0usize;
    let mut goal = cursor.capital().floor() + Rational::one();
    let mut bits = Vec::with_capacity(horizon);
    let mut log = Vec::with_capacity(horizon);

    for n in 0..horizon {
        let mut endpoint = None;
        if phase == CasinoPhase::Attack && quiet >= patience {
            endpoint = Some(players[player].capital().clone());
            phase = CasinoPhase::Feed;
            goal = cursor.capital().floor() + Rational::one();
        }
        let bit = match phase {
            CasinoPhase::Attack => {
                let w = players[player].wager()?.signum();
                match Bit::against_sign(w) {
                    Some(b) => {
                        quiet = 0;
                        b
                    }
                    None => {
                        quiet += 1;
                        Bit::Plus
                    }
                }
            }
            CasinoPhase::Feed => Bit::Plus,
        };
        let floor = cursor.capital().floor();
        log.push(LogRecord {
            n,
            bit,
            detail: Detail::Casino {
                phase,
                player: (phase == CasinoPhase::Attack || endpoint.is_some()).then_some(player),
                hero_floor: floor.clone(),
                endpoint,
            },
        });
        cursor.push(bit)?;
        push_all(&mut players, bit)?;
        bits.push(bit);
        if certify {
            let after = cursor.capital().floor();
            certificate(n, after >= floor, || {
                format!("hero floor fell from {floor} to {after}")
            })?;
            certificate(n, !cursor.bankrupt()?, || "hero went bankrupt".to_string())?;
        }
        if phase == CasinoPhase::Feed && !players.is_empty() && cursor.capital().floor() >= goal {
            phase = CasinoPhase::Attack;
            player = (player + 1) % players.len();
            quiet = 0;
        }
    }
    Ok(Construction {
        theorem: Theorem::Casino,
        bits,
        hero: hero.clone(),
        members,
        augmented: 0,
        log,
        certified: certify,
    })
}
