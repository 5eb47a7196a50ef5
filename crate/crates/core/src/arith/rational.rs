use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A reduced fraction `num/den` with `den >= 0`; `1/0` is the point at infinity.
///
/// Finite values always have `den > 0` and `gcd(|num|, den) = 1`, so structural
/// equality is numeric equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtendedRational {
    num: BigInt,
    den: BigInt,
}

impl ExtendedRational {
    /// Canonical reduced form of `num/den`. Any `n/0` with `n != 0` is infinity.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let (mut num, mut den) = (num.into(), den.into());
        if num.is_zero() && den.is_zero() {
            return Err(Error::Malformed("0/0 is not a fraction".into()));
        }
        if den.is_zero() {
            return Ok(Self::infinity());
        }
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if !g.is_one() {
            num /= &g;
            den /= &g;
        }
        Ok(ExtendedRational { num, den })
    }

    pub fn infinity() -> Self {
        ExtendedRational { num: BigInt::one(), den: BigInt::zero() }
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        ExtendedRational { num: n.into(), den: BigInt::one() }
    }

    pub fn from_ratio(r: &BigRational) -> Self {
        // BigRational is already reduced with a positive denominator.
        ExtendedRational { num: r.numer().clone(), den: r.denom().clone() }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn to_ratio(&self) -> Option<BigRational> {
        self.is_finite().then(|| BigRational::new_raw(self.num.clone(), self.den.clone()))
    }

    /// Order of two finite values; `None` if either is infinite.
    pub fn cmp_finite(&self, other: &Self) -> Option<Ordering> {
        if self.is_infinite() || other.is_infinite() {
            return None;
        }
        Some((&self.num * &other.den).cmp(&(&other.num * &self.den)))
    }

    /// True iff `self` lies strictly between `a` and `b` (in either order). All finite.
    pub fn strictly_between(&self, a: &Self, b: &Self) -> bool {
        matches!(
            (a.cmp_finite(self), self.cmp_finite(b)),
            (Some(Ordering::Less), Some(Ordering::Less)) | (Some(Ordering::Greater), Some(Ordering::Greater))
        )
    }
}

/// Infinity is comparable only with itself.
impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Some(Ordering::Equal),
            (false, false) => self.cmp_finite(other),
            _ => None,
        }
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" || s == "∞" || s == "1/0" {
            return Ok(Self::infinity());
        }
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num = parse_int(n)?;
        let den = parse_int(d)?;
        Self::new(num, den)
    }
}

pub(crate) fn parse_int(s: &str) -> Result<BigInt> {
    let digits = s.strip_prefix('+').unwrap_or(s);
    if digits.is_empty() {
        return Err(Error::Malformed(format!("expected an integer, got {s:?}")));
    }
    BigInt::from_str(digits).map_err(|_| Error::Malformed(format!("expected an integer, got {s:?}")))
}

/// Canonical reduced form of `num/den`.
pub fn reduce(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<ExtendedRational> {
    ExtendedRational::new(num, den)
}

/// A fraction that is deliberately left unreduced, as produced by Farey sums and differences.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormalFraction {
    pub num: BigInt,
    pub den: BigInt,
}

impl FormalFraction {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        FormalFraction { num: num.into(), den: den.into() }
    }

    pub fn reduced(&self) -> Result<ExtendedRational> {
        ExtendedRational::new(self.num.clone(), self.den.clone())
    }

    pub fn is_degenerate(&self) -> bool {
        self.num.is_zero() && self.den.is_zero()
    }
}

impl fmt::Display for FormalFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Componentwise sum of the reduced representations (infinity is `1/0`).
pub fn farey_sum(r1: &ExtendedRational, r2: &ExtendedRational) -> FormalFraction {
    FormalFraction::new(&r1.num + &r2.num, &r1.den + &r2.den)
}

/// Componentwise difference `r2 - r1` of the reduced representations.
pub fn farey_diff(r2: &ExtendedRational, r1: &ExtendedRational) -> FormalFraction {
    FormalFraction::new(&r2.num - &r1.num, &r2.den - &r1.den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn er(s: &str) -> ExtendedRational {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(3, 12).unwrap(), er("1/4"));
        assert_eq!(reduce(5, 0).unwrap(), ExtendedRational::infinity());
        assert_eq!(reduce(-5, 0).unwrap(), ExtendedRational::infinity());
        assert_eq!(reduce(-2, -6).unwrap(), er("1/3"));
        assert_eq!(reduce(0, -7).unwrap(), er("0/1"));
        assert!(reduce(0, 0).is_err());
    }

    #[test]
    fn farey_sum_examples() {
        assert_eq!(farey_sum(&er("1/5"), &er("2/5")), FormalFraction::new(3, 10));
        assert_eq!(farey_sum(&er("1/3"), &er("1/3")), FormalFraction::new(2, 6));
        let s = farey_sum(&er("2/5"), &er("3/5"));
        assert_eq!(s, FormalFraction::new(5, 10));
        assert_eq!(s.reduced().unwrap(), er("1/2"));
        assert_eq!(farey_sum(&ExtendedRational::infinity(), &er("2/5")), FormalFraction::new(3, 5));
    }

    #[test]
    fn farey_diff_examples() {
        assert_eq!(farey_diff(&er("2/9"), &er("1/3")), FormalFraction::new(1, 6));
        assert_eq!(farey_diff(&er("11/40"), &er("7/25")), FormalFraction::new(4, 15));
        let z = farey_diff(&er("3/7"), &er("3/7"));
        assert!(z.is_degenerate());
        assert!(z.reduced().is_err());
    }

    #[test]
    fn text_round_trip() {
        for s in ["inf", "1/3", "-7/20", "0/1", "12/1"] {
            assert_eq!(er(s).to_string(), s);
        }
        assert_eq!(er("6/4").to_string(), "3/2");
        assert_eq!(er("5").to_string(), "5/1");
        assert!("1/x".parse::<ExtendedRational>().is_err());
        assert!("".parse::<ExtendedRational>().is_err());
        assert!("0/0".parse::<ExtendedRational>().is_err());
    }

    #[test]
    fn ordering_excludes_infinity() {
        let inf = ExtendedRational::infinity();
        assert_eq!(inf.partial_cmp(&er("3/1")), None);
        assert_eq!(inf.partial_cmp(&inf), Some(Ordering::Equal));
        assert!(er("1/3") < er("1/2"));
        assert!(er("-1/2") < er("-1/3"));
        assert!(er("1/4").strictly_between(&er("1/3"), &er("1/5")));
        assert!(!er("1/3").strictly_between(&er("1/3"), &er("1/5")));
    }
}
