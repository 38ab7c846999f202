//! The exact scalar abstraction and extended (±∞) values.

use num::rational::Ratio;
use num::{BigInt, BigRational};
use num_traits::{Num, One, Signed};
use std::fmt::{Debug, Display};
use std::str::FromStr;

/// Exact ordered scalar for all core arithmetic.
///
/// The bound deliberately requires a total `Ord`: every comparison in the
/// almost-sure order is decided exactly, with no tolerance. Rational types at
/// any width satisfy it; floating point does not and is not accepted.
pub trait Scalar: Num + Signed + Ord + Clone + Debug + Display + 'static {
    fn from_int(v: i64) -> Self;

    /// Exact rational n/d. Panics if d == 0.
    fn ratio(n: i64, d: i64) -> Self {
        Self::from_int(n) / Self::from_int(d)
    }

    /// Exact power of two, 2^exp, for any sign of `exp`.
    fn pow2(exp: i32) -> Self;

    /// Parse "p/q" or a plain integer string.
    fn parse_ratio(s: &str) -> Option<Self>;

    /// Decimal rendering for human-readable output only; never used in
    /// comparisons or stored results.
    fn display_f64(&self) -> f64;
}

impl Scalar for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn pow2(exp: i32) -> Self {
        if exp >= 0 {
            BigRational::from_integer(BigInt::one() << exp as usize)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-exp) as usize)
        }
    }

    fn parse_ratio(s: &str) -> Option<Self> {
        BigRational::from_str(s.trim()).ok()
    }

    fn display_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for Ratio<i64> {
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(v)
    }

    fn pow2(exp: i32) -> Self {
        assert!(exp.unsigned_abs() <= 62, "pow2 exponent out of range for Q64");
        if exp >= 0 {
            Ratio::from_integer(1i64 << exp)
        } else {
            Ratio::new(1, 1i64 << (-exp))
        }
    }

    fn parse_ratio(s: &str) -> Option<Self> {
        Ratio::from_str(s.trim()).ok()
    }

    fn display_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for Ratio<i128> {
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }

    fn pow2(exp: i32) -> Self {
        assert!(exp.unsigned_abs() <= 126, "pow2 exponent out of range");
        if exp >= 0 {
            Ratio::from_integer(1i128 << exp)
        } else {
            Ratio::new(1, 1i128 << (-exp))
        }
    }

    fn parse_ratio(s: &str) -> Option<Self> {
        Ratio::from_str(s.trim()).ok()
    }

    fn display_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Extended scalar with ±∞; ordered with NegInf < every finite value < PosInf.
///
/// Exists solely to report values in L̄⁰ (gauges, essential suprema).
/// Arithmetic with infinities is not provided; only comparison is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ext<T> {
    NegInf,
    Fin(T),
    PosInf,
}

impl<T: Scalar> Ext<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            Ext::Fin(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Fin(_))
    }
}

impl<T: Ord> PartialOrd for Ext<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Ord> Ord for Ext<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        use Ext::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Equal,
            (NegInf, _) | (_, PosInf) => Less,
            (_, NegInf) | (PosInf, _) => Greater,
            (Fin(a), Fin(b)) => a.cmp(b),
        }
    }
}

impl<T: Display> Display for Ext<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::Fin(v) => write!(f, "{v}"),
            Ext::PosInf => write!(f, "+inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Q, Q64};
    use num_traits::{One, Zero};

    #[test]
    fn pow2_is_exact() {
        assert_eq!(Q::pow2(0), Q::one());
        assert_eq!(Q::pow2(4), Q::from_int(16));
        assert_eq!(Q::pow2(-3), Q::ratio(1, 8));
        assert_eq!(Q64::pow2(-13), Q64::ratio(1, 8192));
    }

    #[test]
    fn parse_roundtrip() {
        let v = Q::ratio(-7, 12);
        let s = v.to_string();
        assert_eq!(Q::parse_ratio(&s), Some(v));
        assert_eq!(Q::parse_ratio("3"), Some(Q::from_int(3)));
        assert_eq!(Q::parse_ratio("x"), None);
    }

    #[test]
    fn ext_order() {
        let lo: Ext<Q> = Ext::NegInf;
        let mid = Ext::Fin(Q::zero());
        let hi: Ext<Q> = Ext::PosInf;
        assert!(lo < mid && mid < hi && lo < hi);
        assert!(Ext::Fin(Q::one()) > mid);
    }
}
