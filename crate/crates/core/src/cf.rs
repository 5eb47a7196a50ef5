//! `F_N`-continued fractions `1/(0+ N/(b+ e1/(a1+ e2/(a2+ ...))))`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::arith::rational::parse_int;
use crate::arith::{ExtendedRational, Real};
use crate::error::{Error, Result};
use crate::graph::Modulus;

/// One partial quotient `eps/a`. Ordered by sign, then by `a`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub eps: i8,
    pub a: BigInt,
}

impl Term {
    pub fn new(eps: i8, a: impl Into<BigInt>) -> Self {
        Term { eps, a: a.into() }
    }

    fn eps_big(&self) -> BigInt {
        BigInt::from(self.eps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CfExpansion {
    modulus: Modulus,
    b: BigInt,
    terms: Vec<Term>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// `gcd(b, N) = 1`.
    Gate,
    /// `eps` is `1` or `-1`.
    Sign,
    /// `a >= 1`.
    Positive,
    /// `a_i + eps_{i+1} >= 1`.
    NextSign,
    /// `a_i + eps_i >= 1`.
    OwnSign,
    /// `gcd(p_i, N) = 1`.
    Coprime,
    /// `q_1 > q_0`, i.e. `a_1 >= 2`.
    Increasing,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Gate => "gate numerator b must be coprime to N",
            Condition::Sign => "eps_i must be 1 or -1",
            Condition::Positive => "a_i must be positive",
            Condition::NextSign => "condition 1: a_i + eps_(i+1) >= 1",
            Condition::OwnSign => "condition 2: a_i + eps_i >= 1",
            Condition::Coprime => "condition 3: gcd(p_i, N) = 1",
            Condition::Increasing => "q_1 > q_0 requires a_1 >= 2",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Violation {
    pub index: usize,
    pub condition: Condition,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "term {} violates {}", self.index, self.condition)
    }
}

impl CfExpansion {
    /// Builds an expansion without validating it; see [`validate_cf`].
    pub fn new(modulus: Modulus, b: impl Into<BigInt>, terms: Vec<Term>) -> Self {
        CfExpansion { modulus, b: b.into(), terms }
    }

    pub fn validated(modulus: Modulus, b: impl Into<BigInt>, terms: Vec<Term>) -> Result<Self> {
        let cf = CfExpansion::new(modulus, b, terms);
        validate_cf(&cf).map_err(Error::InvalidCf)?;
        Ok(cf)
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn truncated(&self, n: usize) -> CfExpansion {
        CfExpansion::new(self.modulus.clone(), self.b.clone(), self.terms[..n.min(self.terms.len())].to_vec())
    }

    /// Sort key for canonical listings: gate first, then the term list.
    pub fn sort_key(&self) -> (&BigInt, &[Term]) {
        (&self.b, &self.terms)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms.iter().map(|t| json!([t.eps, int_json(&t.a)])).collect();
        json!({ "N": self.modulus.n(), "b": int_json(&self.b), "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Malformed(format!("continued fraction JSON: {what}"));
        let n = v.get("N").and_then(Value::as_u64).ok_or_else(|| bad("missing N"))?;
        let b = json_int(v.get("b").ok_or_else(|| bad("missing b"))?)?;
        let mut terms = Vec::new();
        for t in v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))? {
            match t.as_array().map(Vec::as_slice) {
                Some([e, a]) => {
                    let eps = e.as_i64().ok_or_else(|| bad("eps"))?;
                    terms.push(Term::new(eps as i8, json_int(a)?));
                }
                _ => return Err(bad("term must be [eps, a]")),
            }
        }
        Ok(CfExpansion::new(Modulus::new(n)?, b, terms))
    }
}

/// Integers that fit in `i64` become JSON numbers, larger ones strings.
pub fn int_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn json_int(v: &Value) -> Result<BigInt> {
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    match v.as_str() {
        Some(s) => parse_int(s),
        None => Err(Error::Malformed(format!("expected an integer, got {v}"))),
    }
}

/// `1/0+ N/b+ e1/a1+ ... en/an`.
impl fmt::Display for CfExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/0+ {}/{}", self.modulus, self.b)?;
        for t in &self.terms {
            write!(f, "+ {}/{}", t.eps, t.a)?;
        }
        Ok(())
    }
}

impl FromStr for CfExpansion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('+').map(str::trim).filter(|p| !p.is_empty()).collect();
        let bad = || Error::Malformed(format!("not a continued fraction: {s:?}"));
        let pair = |p: &str| -> Result<(BigInt, BigInt)> {
            let (a, b) = p.split_once('/').ok_or_else(bad)?;
            Ok((parse_int(a.trim())?, parse_int(b.trim())?))
        };
        if parts.len() < 2 || pair(parts[0])? != (BigInt::one(), BigInt::zero()) {
            return Err(bad());
        }
        let (n, b) = pair(parts[1])?;
        let n = n.to_u64().ok_or_else(bad)?;
        let mut terms = Vec::new();
        for p in &parts[2..] {
            let (e, a) = pair(p)?;
            let eps = e.to_i8().filter(|e| e.abs() == 1).ok_or_else(bad)?;
            terms.push(Term::new(eps, a));
        }
        Ok(CfExpansion::new(Modulus::new(n)?, b, terms))
    }
}

/// Checks the defining conditions in index order; returns the first failure.
pub fn validate_cf(cf: &CfExpansion) -> std::result::Result<(), Violation> {
    let n = cf.modulus.big();
    let fail = |index, condition| Err(Violation { index, condition });
    if !cf.b.gcd(&n).is_one() {
        return fail(0, Condition::Gate);
    }
    let (mut p2, mut p1) = (BigInt::one(), cf.b.clone());
    for (k, t) in cf.terms.iter().enumerate() {
        let i = k + 1;
        if t.eps.abs() != 1 {
            return fail(i, Condition::Sign);
        }
        if t.a < BigInt::one() {
            return fail(i, Condition::Positive);
        }
        if let Some(next) = cf.terms.get(k + 1) {
            if &t.a + BigInt::from(next.eps) < BigInt::one() {
                return fail(i, Condition::NextSign);
            }
        }
        if &t.a + t.eps_big() < BigInt::one() {
            return fail(i, Condition::OwnSign);
        }
        let p = &t.a * &p1 + t.eps_big() * &p2;
        if !p.gcd(&n).is_one() {
            return fail(i, Condition::Coprime);
        }
        if i == 1 && t.a < BigInt::from(2) {
            return fail(i, Condition::Increasing);
        }
        p2 = std::mem::replace(&mut p1, p);
    }
    Ok(())
}

/// The table `(p_i, q_i)` for `i = -1, 0, ..., n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergents {
    pairs: Vec<(BigInt, BigInt)>,
    n: BigInt,
}

impl Convergents {
    /// Runs the recurrence without validating the terms.
    pub fn from_terms(m: &Modulus, b: &BigInt, terms: &[Term]) -> Self {
        let mut pairs = vec![(BigInt::one(), BigInt::zero()), (b.clone(), m.big())];
        for t in terms {
            let k = pairs.len();
            let (p1, q1) = &pairs[k - 1];
            let (p2, q2) = &pairs[k - 2];
            let e = t.eps_big();
            let next = (&t.a * p1 + &e * p2, &t.a * q1 + &e * q2);
            pairs.push(next);
        }
        Convergents { pairs, n: m.big() }
    }

    /// Index of the last convergent.
    pub fn last_index(&self) -> usize {
        self.pairs.len() - 2
    }

    /// `(p_i, q_i)` for `i >= -1`.
    pub fn pair(&self, i: isize) -> &(BigInt, BigInt) {
        &self.pairs[(i + 1) as usize]
    }

    pub fn p(&self, i: isize) -> &BigInt {
        &self.pair(i).0
    }

    pub fn q(&self, i: isize) -> &BigInt {
        &self.pair(i).1
    }

    pub fn vertex(&self, i: isize) -> ExtendedRational {
        let (p, q) = self.pair(i);
        ExtendedRational::new(p.clone(), q.clone()).expect("convergent denominators are positive")
    }

    /// `p_0/q_0, ..., p_n/q_n`.
    pub fn vertices(&self) -> Vec<ExtendedRational> {
        (0..=self.last_index() as isize).map(|i| self.vertex(i)).collect()
    }

    pub fn modulus_value(&self) -> &BigInt {
        &self.n
    }
}

pub fn convergents(cf: &CfExpansion) -> Result<Convergents> {
    validate_cf(cf).map_err(Error::InvalidCf)?;
    Ok(Convergents::from_terms(&cf.modulus, &cf.b, &cf.terms))
}

/// Bottom-up evaluation of the nested fraction.
pub fn evaluate_nested(cf: &CfExpansion) -> Result<ExtendedRational> {
    let mut tail = BigRational::zero();
    for t in cf.terms.iter().rev() {
        let den = BigRational::from_integer(t.a.clone()) + tail;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        tail = BigRational::from_integer(t.eps_big()) / den;
    }
    let den = BigRational::from_integer(cf.b.clone()) + tail;
    if den.is_zero() {
        return Ok(ExtendedRational::infinity());
    }
    Ok(ExtendedRational::from_ratio(&(den / BigRational::from_integer(cf.modulus.big()))))
}

/// The value, computed by the recurrence and by nested evaluation; the two must agree.
pub fn evaluate(cf: &CfExpansion) -> Result<ExtendedRational> {
    let seq = convergents(cf)?;
    let last = seq.vertex(seq.last_index() as isize);
    let nested = evaluate_nested(cf)?;
    if last != nested {
        return Err(Error::Internal(format!("recurrence gives {last}, nesting gives {nested} for {cf}")));
    }
    Ok(last)
}

/// `y_1, ..., y_{n+1}` of a finite expansion, computed top-down from `y_{n+1} = 0`.
pub fn fins(cf: &CfExpansion) -> Result<Vec<BigRational>> {
    validate_cf(cf).map_err(Error::InvalidCf)?;
    let mut ys = vec![BigRational::zero()];
    for t in cf.terms.iter().rev() {
        let den = BigRational::from_integer(t.a.clone()) + ys.last().unwrap();
        if den.is_zero() {
            return Err(Error::Internal(format!("vanishing fin denominator in {cf}")));
        }
        ys.push(BigRational::from_integer(t.eps_big()) / den);
    }
    ys.reverse();
    Ok(ys)
}

/// `y_{i+1}` extracted from the value `x`, inverting the reconstruction identity.
pub fn fin_from_value(seq: &Convergents, i: isize, x: &Real) -> Result<Real> {
    let (p1, q1) = seq.pair(i);
    let (p2, q2) = seq.pair(i - 1);
    let r = |v: &BigInt| BigRational::from_integer(v.clone());
    let num = x.mul_rational(&r(q1)).neg().add_rational(&r(p1));
    let den = x.mul_rational(&r(q2)).sub_rational(&r(p2));
    num.div(&den)
}

/// `x = (p_i + y p_{i-1}) / (q_i + y q_{i-1})`.
pub fn tail_reconstruct(seq: &Convergents, i: isize, y: &Real) -> Result<Real> {
    let (p1, q1) = seq.pair(i);
    let (p2, q2) = seq.pair(i - 1);
    let r = |v: &BigInt| BigRational::from_integer(v.clone());
    let num = y.mul_rational(&r(p2)).add_rational(&r(p1));
    let den = y.mul_rational(&r(q2)).add_rational(&r(q1));
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    num.div(&den)
}

/// `N |y| / (q_n (q_n + y q_{n-1}))`, the exact distance from `x` to `p_n/q_n`.
pub fn error_term(seq: &Convergents, n: isize, y: &Real) -> Result<Real> {
    let (_, q1) = seq.pair(n);
    let (_, q2) = seq.pair(n - 1);
    let r = |v: &BigInt| BigRational::from_integer(v.clone());
    let den = y.mul_rational(&r(q2)).add_rational(&r(q1)).mul_rational(&r(q1));
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    y.abs().mul_rational(&r(&seq.n)).div(&den)
}

/// Exact `|x - p_n/q_n|`.
pub fn direct_error(seq: &Convergents, n: isize, x: &Real) -> Real {
    let (p, q) = seq.pair(n);
    x.sub_rational(&BigRational::new(p.clone(), q.clone())).abs()
}

/// True iff every fin of the finite expansion satisfies `|y_i| <= 1` and `sign(y_i) = eps_i`.
pub fn fins_are_bounded(cf: &CfExpansion) -> Result<bool> {
    let ys = fins(cf)?;
    let one = BigRational::one();
    Ok(cf.terms.iter().zip(&ys).all(|(t, y)| y.abs() <= one && (y.is_positive() == (t.eps > 0))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cf(s: &str) -> CfExpansion {
        s.parse().unwrap()
    }

    fn er(s: &str) -> ExtendedRational {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn text_round_trip() {
        for s in ["1/0+ 5/1+ 1/2+ -1/3", "1/0+ 5/2", "1/0+ 25/1+ -1/2+ 1/1"] {
            assert_eq!(cf(s).to_string(), s);
        }
        assert!("1/0+ 5/1+ 2/3".parse::<CfExpansion>().is_err());
        assert!("2/0+ 5/1".parse::<CfExpansion>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = cf("1/0+ 5/1+ 1/2+ -1/3");
        assert_eq!(c.to_json().to_string(), r#"{"N":5,"b":1,"terms":[[1,2],[-1,3]]}"#);
        assert_eq!(CfExpansion::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn validation_examples() {
        assert_eq!(validate_cf(&cf("1/0+ 5/1+ 1/2+ 1/1+ 1/1+ 1/1")), Ok(()));
        assert_eq!(
            validate_cf(&cf("1/0+ 3/1+ 1/2")),
            Err(Violation { index: 1, condition: Condition::Coprime })
        );
        assert_eq!(
            validate_cf(&cf("1/0+ 5/1+ 1/1+ -1/1")),
            Err(Violation { index: 1, condition: Condition::NextSign })
        );
        assert_eq!(validate_cf(&cf("1/0+ 5/5")), Err(Violation { index: 0, condition: Condition::Gate }));
        assert_eq!(
            validate_cf(&cf("1/0+ 5/1+ 1/2+ -1/1")),
            Err(Violation { index: 2, condition: Condition::OwnSign })
        );
        assert_eq!(
            validate_cf(&cf("1/0+ 5/1+ 1/1")),
            Err(Violation { index: 1, condition: Condition::Increasing })
        );
    }

    #[test]
    fn convergent_examples() {
        let c = convergents(&cf("1/0+ 5/1+ 1/2+ 1/1+ 1/1+ 1/1")).unwrap();
        let want: Vec<_> = ["1/5", "3/10", "4/15", "7/25", "11/40"].iter().map(|s| er(s)).collect();
        assert_eq!(c.vertices(), want);
        assert_eq!(convergents(&cf("1/0+ 5/7")).unwrap().vertices(), vec![er("7/5")]);
        let g = convergents(&cf("1/0+ 25/1+ -1/2+ 1/1")).unwrap();
        assert_eq!(g.vertices(), vec![er("1/25"), er("1/50"), er("2/75")]);
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate(&cf("1/0+ 5/1+ 1/3+ -1/3")).unwrap(), er("11/40"));
        assert_eq!(evaluate(&cf("1/0+ 25/1+ -1/2+ 1/1")).unwrap(), er("2/75"));
        assert_eq!(evaluate(&cf("1/0+ 3/2")).unwrap(), er("2/3"));
        assert!(evaluate(&cf("1/0+ 3/3")).is_err());
    }

    #[test]
    fn fin_examples() {
        let ys = fins(&cf("1/0+ 5/1+ 1/2+ 1/1+ 1/1+ 1/1")).unwrap();
        assert_eq!(ys, vec![q(3, 8), q(2, 3), q(1, 2), q(1, 1), q(0, 1)]);
        let ys = fins(&cf("1/0+ 5/1+ 1/7")).unwrap();
        assert_eq!(ys, vec![q(1, 7), q(0, 1)]);
    }

    #[test]
    fn reconstruction_and_error() {
        let c = cf("1/0+ 5/1+ 1/2+ 1/1+ 1/1+ 1/1");
        let seq = convergents(&c).unwrap();
        let y2 = Real::from(q(2, 3));
        assert_eq!(tail_reconstruct(&seq, 1, &y2).unwrap(), Real::from(q(11, 40)));
        assert_eq!(tail_reconstruct(&seq, 3, &Real::zero()).unwrap(), Real::from(q(7, 25)));
        assert_eq!(error_term(&seq, 1, &y2).unwrap(), Real::from(q(1, 40)));
        assert_eq!(direct_error(&seq, 1, &Real::from(q(11, 40))), Real::from(q(1, 40)));
        assert_eq!(error_term(&seq, 2, &Real::zero()).unwrap(), Real::zero());
        assert_eq!(fin_from_value(&seq, 1, &Real::from(q(11, 40))).unwrap(), y2);

        let g = convergents(&cf("1/0+ 25/1+ -1/2+ 1/1")).unwrap();
        assert_eq!(tail_reconstruct(&g, 1, &Real::from(q(1, 1))).unwrap(), Real::from(q(2, 75)));
    }
}
