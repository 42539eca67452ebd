//! Exact arbitrary-precision rationals.
//!
//! A thin newtype over [`malachite_q::Rational`]. Values are always kept in
//! lowest terms with a positive denominator, and the textual form is `p/q`
//! (or plain `p` when the denominator is one), which is also the form used
//! in every CSV and strategy file.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use malachite_base::num::arithmetic::traits::{Ceiling, Floor, Sign};
use malachite_base::num::basic::traits::{One, Zero};
use malachite_base::num::conversion::traits::RoundingFrom;
use malachite_base::rounding_modes::RoundingMode;
use malachite_q::Rational as Inner;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(Inner);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?} (expected `p/q` or an integer)")]
pub struct ParseRationalError(pub String);

impl Rational {
    pub fn zero() -> Self {
        Rational(Inner::ZERO)
    }

    pub fn one() -> Self {
        Rational(Inner::ONE)
    }

    pub fn from_int(n: i64) -> Self {
        Rational(Inner::from(n))
    }

    /// `num / den`, reduced. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(Inner::from_signeds(num, den))
    }

    /// `1 / n` for a positive integer `n`.
    pub fn unit_fraction(n: u64) -> Self {
        assert!(n != 0, "zero denominator");
        Rational(Inner::from_unsigneds(1u64, n))
    }

    pub fn is_zero(&self) -> bool {
        self.0 == Inner::ZERO
    }

    pub fn is_integer(&self) -> bool {
        self.0.denominator_ref() == &1u32
    }

    pub fn is_positive(&self) -> bool {
        self.0 > Inner::ZERO
    }

    pub fn is_negative(&self) -> bool {
        self.0 < Inner::ZERO
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i32 {
        match self.0.sign() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn floor(&self) -> Self {
        Rational(Inner::from((&self.0).floor()))
    }

    pub fn ceil(&self) -> Self {
        Rational(Inner::from((&self.0).ceiling()))
    }

    /// Fractional part `x - floor(x)`, always in `[0, 1)`.
    pub fn fract(&self) -> Self {
        self - &self.floor()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(Inner::ONE / &self.0)
    }

    /// Nearest `f64`; used only for reporting and for certified float
    /// pre-checks that fall back to exact comparison.
    pub fn to_f64(&self) -> f64 {
        f64::rounding_from(&self.0, RoundingMode::Nearest).0
    }

    /// The value as an `i64` when it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        if !self.is_integer() {
            return None;
        }
        i64::try_from(&self.0).ok()
    }

    /// Bit length of the denominator, a cheap size measure.
    pub fn denominator_bits(&self) -> u64 {
        use malachite_base::num::logic::traits::SignificantBits;
        self.0.denominator_ref().significant_bits()
    }

    /// Whether the denominator divides `n`.
    pub fn denominator_divides(&self, n: &Rational) -> bool {
        assert!(n.is_integer());
        let q = Rational(Inner::from(self.0.to_denominator()));
        (n / &q).is_integer()
    }

    pub fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }

    pub fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let ok = !t.is_empty()
            && t.chars()
                .all(|c| c.is_ascii_digit() || c == '/' || c == '-' || c == '+');
        if !ok {
            return Err(ParseRationalError(s.to_string()));
        }
        Inner::from_str(t)
            .map(Rational)
            .map_err(|_| ParseRationalError(s.to_string()))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_int(n as i64)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational(Inner::from(n))
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        Rational(Inner::from(n as u64))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as a `p/q` string or an integer")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from_int(v))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::from(v))
            }
        }
        d.deserialize_any(Visitor)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $f(self, rhs: Rational) -> Rational {
                Rational($tr::$f(self.0, rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $f(self, rhs: &Rational) -> Rational {
                Rational($tr::$f(self.0, &rhs.0))
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $f(self, rhs: Rational) -> Rational {
                Rational($tr::$f(&self.0, rhs.0))
            }
        }
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $f(self, rhs: &Rational) -> Rational {
                Rational($tr::$f(&self.0, &rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl SubAssign<Rational> for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
    }
}

/// Shorthand for `Rational::new(p, q)`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_text_form() {
        assert_eq!(rat(6, 4).to_string(), "3/2");
        assert_eq!(rat(-6, 3).to_string(), "-2");
        assert_eq!(rat(3, -9).to_string(), "-1/3");
        assert_eq!("10/4".parse::<Rational>().unwrap(), rat(5, 2));
        assert_eq!("-7".parse::<Rational>().unwrap(), Rational::from_int(-7));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "a", "1.5", "1/2/3", "--1", "1 / 2"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn floor_and_fract() {
        assert_eq!(rat(7, 3).floor(), Rational::from_int(2));
        assert_eq!(rat(7, 3).fract(), rat(1, 3));
        assert_eq!(rat(-7, 3).floor(), Rational::from_int(-3));
        assert_eq!(rat(-7, 3).fract(), rat(2, 3));
        assert_eq!(rat(-7, 3).ceil(), Rational::from_int(-2));
        assert_eq!(Rational::from_int(4).fract(), Rational::zero());
    }

    #[test]
    fn sign_helpers() {
        assert_eq!(rat(-1, 5).signum(), -1);
        assert_eq!(Rational::zero().signum(), 0);
        assert_eq!(rat(1, 5).abs(), rat(-1, 5).abs());
        assert_eq!(rat(5, 7).recip(), rat(7, 5));
        assert_eq!(rat(9, 2).to_i64(), None);
        assert_eq!(Rational::from_int(-12).to_i64(), Some(-12));
    }
}
