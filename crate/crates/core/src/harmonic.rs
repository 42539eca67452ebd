//! Exact harmonic sums and the survivable-loss count of the `1 + 1/n`
//! bettor.

use crate::rational::Rational;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `H(n) = 1 + 1/2 + … + 1/n`, exactly.
pub fn harmonic_number(n: u64) -> Rational {
    harmonic_range(0, n)
}

/// `H(to) - H(from) = Σ_{i=from+1}^{to} 1/i`, exactly, by binary splitting.
pub fn harmonic_range(from: u64, to: u64) -> Rational {
    if to <= from {
        return Rational::zero();
    }
    if to - from <= 16 {
        let mut s = Rational::zero();
        for i in from + 1..=to {
            s += Rational::unit_fraction(i);
        }
        return s;
    }
    let mid = from + (to - from) / 2;
    harmonic_range(from, mid) + harmonic_range(mid, to)
}

/// Floating-point `H(n)`, accurate to a few ulps.
pub fn harmonic_f64(n: u64) -> f64 {
    if n < 64 {
        return (1..=n).map(|i| 1.0 / i as f64).sum();
    }
    let x = n as f64;
    let x2 = x * x;
    x.ln() + EULER_GAMMA + 0.5 / x - 1.0 / (12.0 * x2) + 1.0 / (120.0 * x2 * x2)
}

/// Cost of losing `k` consecutive wagers of size `1 + 1/(t+1)` starting at
/// step `n`: `k + H(n+k) - H(n)`.
pub fn loss_cost(n: u64, k: u64) -> Rational {
    Rational::from(k) + harmonic_range(n, n + k)
}

fn loss_cost_f64(n: u64, k: u64) -> f64 {
    if k < 64 {
        return k as f64 + (n + 1..=n + k).map(|i| 1.0 / i as f64).sum::<f64>();
    }
    k as f64 + harmonic_f64(n + k) - harmonic_f64(n)
}

/// `k_n(m) = max{k : k + H(n+k) - H(n) ≤ m}`, or 0 when `m < 0`.
///
/// Located with floating point and confirmed exactly whenever the float
/// comparison is within its error margin.
pub fn survivable_losses(n: u64, m: &Rational) -> u64 {
    if m.is_negative() {
        return 0;
    }
    let mf = m.to_f64();
    let mut lo = 0u64;
    let mut hi = mf.floor() as u64 + 1;
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if loss_cost_f64(n, mid) <= mf {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let mut k = lo;
    let tol = 1e-9 * mf.max(1.0);
    let clear_below = k == 0 || loss_cost_f64(n, k) < mf - tol;
    let clear_above = loss_cost_f64(n, k + 1) > mf + tol;
    if clear_below && clear_above {
        return k;
    }
    while k > 0 && loss_cost(n, k) > *m {
        k -= 1;
    }
    while loss_cost(n, k + 1) <= *m {
        k += 1;
    }
    k
}
