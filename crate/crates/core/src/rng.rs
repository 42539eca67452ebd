//! Seeded fair coin used by the stochastic construction.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::history::Bit;

/// Recorded in trace metadata so runs can be reproduced elsewhere.
pub const ALGORITHM: &str = "chacha8-lowbit";

/// Fair bits from ChaCha8 seeded with `seed_from_u64`; each bit is the low
/// bit of one `next_u32` draw, 1 meaning `+`.
#[derive(Clone, Debug)]
pub struct CoinFlips(ChaCha8Rng);

impl CoinFlips {
    pub fn new(seed: u64) -> Self {
        CoinFlips(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_bit(&mut self) -> Bit {
        if self.0.next_u32() & 1 == 1 {
            Bit::Plus
        } else {
            Bit::Minus
        }
    }
}
