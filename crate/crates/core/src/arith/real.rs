//! Exact real inputs: rationals and quadratic surds `a + b*sqrt(d)`.
//!
//! Sign and floor are decided with integer arithmetic only. A surd's `d` is kept
//! squarefree and `b` nonzero, so every value has exactly one representation.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::integer::square_free_split;
use super::rational::{parse_int, ExtendedRational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl QuadraticSurd {
    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_coefficient(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Real {
    Rational(BigRational),
    Surd(QuadraticSurd),
}

impl From<BigRational> for Real {
    fn from(r: BigRational) -> Self {
        Real::Rational(r)
    }
}

impl From<BigInt> for Real {
    fn from(n: BigInt) -> Self {
        Real::Rational(BigRational::from_integer(n))
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Self {
        Real::from(BigInt::from(n))
    }
}

fn int_ratio(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

impl Real {
    pub fn zero() -> Self {
        Real::Rational(BigRational::zero())
    }

    pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Real::Rational(BigRational::new(num.into(), den)))
    }

    /// `a + b*sqrt(d)`, normalized: square factors of `d` move into `b`, and a vanishing
    /// irrational part collapses to a rational.
    pub fn surd(a: BigRational, b: BigRational, d: BigInt) -> Result<Self> {
        if d.is_negative() {
            return Err(Error::Malformed(format!("sqrt({d}) is not real")));
        }
        if b.is_zero() || d.is_zero() {
            return Ok(Real::Rational(a));
        }
        let (k, rest) = square_free_split(&d);
        let b = b * int_ratio(&k);
        if rest.is_one() {
            return Ok(Real::Rational(a + b));
        }
        Ok(Real::Surd(QuadraticSurd { a, b, d: rest }))
    }

    pub fn from_extended(x: &ExtendedRational) -> Result<Self> {
        x.to_ratio()
            .map(Real::Rational)
            .ok_or_else(|| Error::Precondition("infinity is not a real number".into()))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Real::Rational(r) => Some(r),
            Real::Surd(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Real::Rational(r) if r.is_zero())
    }

    fn radicand(&self) -> Option<&BigInt> {
        match self {
            Real::Rational(_) => None,
            Real::Surd(s) => Some(&s.d),
        }
    }

    fn parts(&self) -> (BigRational, BigRational) {
        match self {
            Real::Rational(r) => (r.clone(), BigRational::zero()),
            Real::Surd(s) => (s.a.clone(), s.b.clone()),
        }
    }

    fn common_radicand(&self, other: &Real) -> Result<Option<BigInt>> {
        match (self.radicand(), other.radicand()) {
            (Some(d1), Some(d2)) if d1 != d2 => {
                Err(Error::IncompatibleSurds(d1.to_string(), d2.to_string()))
            }
            (Some(d), _) | (None, Some(d)) => Ok(Some(d.clone())),
            (None, None) => Ok(None),
        }
    }

    fn rebuild(a: BigRational, b: BigRational, d: Option<BigInt>) -> Real {
        match d {
            Some(d) if !b.is_zero() => Real::Surd(QuadraticSurd { a, b, d }),
            _ => Real::Rational(a),
        }
    }

    /// Exact sign in `{-1, 0, 1}`.
    pub fn signum(&self) -> i8 {
        match self {
            Real::Rational(r) => sign_of(r),
            Real::Surd(s) => {
                let (sa, sb) = (sign_of(&s.a), sign_of(&s.b));
                if sa == 0 || sa == sb {
                    return sb;
                }
                // Opposite signs: the larger of a^2 and b^2*d wins. They never tie
                // because sqrt(d) is irrational.
                let a2 = &s.a * &s.a;
                let b2d = &s.b * &s.b * int_ratio(&s.d);
                if a2 > b2d {
                    sa
                } else {
                    sb
                }
            }
        }
    }

    pub fn abs(&self) -> Real {
        if self.signum() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn neg(&self) -> Real {
        match self {
            Real::Rational(r) => Real::Rational(-r),
            Real::Surd(s) => Real::Surd(QuadraticSurd { a: -&s.a, b: -&s.b, d: s.d.clone() }),
        }
    }

    /// Exact floor. For surds, `|b|*sqrt(d)` is bracketed by an integer square root and
    /// the estimate is corrected with exact sign tests.
    pub fn floor(&self) -> BigInt {
        match self {
            Real::Rational(r) => r.floor().to_integer(),
            Real::Surd(s) => {
                let b2d = &s.b * &s.b * int_ratio(&s.d);
                let (n, m) = (b2d.numer(), b2d.denom());
                // s_root/m <= |b|sqrt(d) < (s_root+1)/m
                let s_root = (n * m).sqrt();
                let approx = if s.b.is_negative() {
                    &s.a - BigRational::new(s_root, m.clone())
                } else {
                    &s.a + BigRational::new(s_root, m.clone())
                };
                let mut guess = approx.floor().to_integer();
                while self.sub_rational(&int_ratio(&guess)).signum() < 0 {
                    guess -= 1;
                }
                while self.sub_rational(&int_ratio(&(&guess + 1u32))).signum() >= 0 {
                    guess += 1;
                }
                guess
            }
        }
    }

    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    /// True iff the value is an integer (surds never are).
    pub fn to_integer(&self) -> Option<BigInt> {
        match self {
            Real::Rational(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    pub fn add_rational(&self, r: &BigRational) -> Real {
        match self {
            Real::Rational(x) => Real::Rational(x + r),
            Real::Surd(s) => Real::Surd(QuadraticSurd { a: &s.a + r, b: s.b.clone(), d: s.d.clone() }),
        }
    }

    pub fn sub_rational(&self, r: &BigRational) -> Real {
        self.add_rational(&-r)
    }

    pub fn mul_rational(&self, r: &BigRational) -> Real {
        match self {
            Real::Rational(x) => Real::Rational(x * r),
            Real::Surd(s) => Real::rebuild(&s.a * r, &s.b * r, Some(s.d.clone())),
        }
    }

    pub fn add(&self, other: &Real) -> Result<Real> {
        let d = self.common_radicand(other)?;
        let ((a1, b1), (a2, b2)) = (self.parts(), other.parts());
        Ok(Real::rebuild(a1 + a2, b1 + b2, d))
    }

    pub fn sub(&self, other: &Real) -> Result<Real> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Real) -> Result<Real> {
        let d = self.common_radicand(other)?;
        let ((a1, b1), (a2, b2)) = (self.parts(), other.parts());
        let dd = d.as_ref().map(int_ratio).unwrap_or_else(BigRational::zero);
        let a = &a1 * &a2 + &b1 * &b2 * dd;
        let b = a1 * b2 + b1 * a2;
        Ok(Real::rebuild(a, b, d))
    }

    /// `1/x`, using the conjugate for surds.
    pub fn recip(&self) -> Result<Real> {
        match self {
            Real::Rational(r) => {
                if r.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Real::Rational(r.recip()))
                }
            }
            Real::Surd(s) => {
                let norm = &s.a * &s.a - &s.b * &s.b * int_ratio(&s.d);
                Ok(Real::rebuild(&s.a / &norm, -(&s.b / &norm), Some(s.d.clone())))
            }
        }
    }

    pub fn div(&self, other: &Real) -> Result<Real> {
        self.common_radicand(other)?;
        self.mul(&other.recip()?)
    }

    /// `1/|x| - a`, the fin update of the expansion algorithm.
    pub fn recip_minus(&self, a: &BigInt) -> Result<Real> {
        Ok(self.abs().recip()?.sub_rational(&int_ratio(a)))
    }

    /// Exact comparison; fails only for surds over different radicands.
    pub fn try_cmp(&self, other: &Real) -> Result<Ordering> {
        Ok(self.sub(other)?.signum().cmp(&0))
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.sub_rational(r).signum().cmp(&0)
    }
}

fn sign_of(r: &BigRational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rational(r) => write!(f, "{r}"),
            Real::Surd(s) => {
                if !s.a.is_zero() {
                    write!(f, "{}", s.a)?;
                    if s.b.is_positive() {
                        f.write_str("+")?;
                    }
                }
                write!(f, "{}*sqrt({})", s.b, s.d)
            }
        }
    }
}

/// Parses `p/q`, an integer, or `a+b*sqrt(d)` (also `sqrt(d)`, `-sqrt(d)`, `a-b*sqrt(d)`,
/// `a+sqrt(d)`), with rational `a` and `b`.
impl FromStr for Real {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let (Some(inner), Some(j)) = (s.strip_prefix('('), s.rfind(")/")) {
            let q = parse_ratio(&s[j + 2..])?;
            if q.is_zero() {
                return Err(Error::DivisionByZero);
            }
            let x: Real = inner[..j - 1].parse()?;
            return Ok(x.mul_rational(&q.recip()));
        }
        let Some(idx) = s.find("sqrt(") else {
            return parse_ratio(&s).map(Real::Rational);
        };
        let close = s[idx..]
            .find(')')
            .map(|i| idx + i)
            .ok_or_else(|| Error::Malformed(format!("unterminated sqrt in {s:?}")))?;
        let d = parse_int(&s[idx + 5..close])?;
        let tail = &s[close + 1..];
        let extra = match tail.chars().next() {
            None => BigRational::zero(),
            Some('+') => parse_ratio(&tail[1..])?,
            Some('-') => -parse_ratio(&tail[1..])?,
            Some(_) => return Err(Error::Malformed(format!("unexpected {tail:?} after sqrt"))),
        };
        let prefix = &s[..idx];
        let (coeff_str, explicit_coeff) = match prefix.strip_suffix('*') {
            Some(p) => (p, true),
            None => (prefix, false),
        };
        // Split at the last sign that is not the leading one.
        let split = coeff_str
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (a_str, b_str) = match split {
            Some(i) => (&coeff_str[..i], &coeff_str[i..]),
            None if explicit_coeff => ("", coeff_str),
            None if matches!(coeff_str, "" | "+" | "-") => ("", coeff_str),
            None => {
                return Err(Error::Malformed(format!("cannot read surd coefficient in {s:?}")));
            }
        };
        if !a_str.is_empty() && !extra.is_zero() {
            return Err(Error::Malformed(format!("two rational parts in {s:?}")));
        }
        let a = if a_str.is_empty() { extra } else { parse_ratio(a_str)? };
        let b = match b_str {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other if explicit_coeff => parse_ratio(other)?,
            other => {
                return Err(Error::Malformed(format!("unexpected {other:?} before sqrt")));
            }
        };
        Real::surd(a, b, d)
    }
}

pub(crate) fn parse_ratio(s: &str) -> Result<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (parse_int(n)?, parse_int(d)?),
        None => (parse_int(s)?, BigInt::one()),
    };
    if d.is_zero() {
        return Err(Error::Malformed(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// Converts a decimal literal such as `-1.41421356` to the exact rational it denotes.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let err = || Error::Malformed(format!("not a decimal number: {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| err())?;
    if neg {
        num = -num;
    }
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Ok(BigRational::new(num, den))
}

impl PartialOrd<BigRational> for Real {
    fn partial_cmp(&self, other: &BigRational) -> Option<Ordering> {
        Some(self.cmp_rational(other))
    }
}

impl PartialEq<BigRational> for Real {
    fn eq(&self, other: &BigRational) -> bool {
        self.as_rational() == Some(other)
    }
}
