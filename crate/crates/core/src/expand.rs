//! The expansion algorithm for `F_{p^l}`: gate choice, then
//! `eps_i = sign(y_i)`, `a_i` among `ceil(1/|y_i| - 1)`, `1/|y_i|`, `floor(1/|y_i| + 1)`,
//! and `y_{i+1} = 1/|y_i| - a_i`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::Real;
use crate::cf::{evaluate, validate_cf, CfExpansion, Term};
use crate::error::{Error, Result};
use crate::graph::{Modulus, Vertex};

/// The gate numerator `b`. With `f = floor(N x)`: `f` if `p | f+1`, `f+1` if `p | f`, and
/// otherwise the side of the mediant `(2f+1)/(2N)` on which `x` lies. At the mediant itself
/// the lower gate is taken.
pub fn choose_gate(x: &Real, m: &Modulus) -> Result<BigInt> {
    let (p, _) = m.require_prime_power()?;
    let p = BigInt::from(p);
    let n = m.big();
    let f = x.mul_rational(&BigRational::from_integer(n.clone())).floor();
    let f1: BigInt = &f + 1;
    if !f1.gcd(&p).is_one() {
        return Ok(f);
    }
    if !f.gcd(&p).is_one() {
        return Ok(f1);
    }
    let mediant = BigRational::new(&f + &f1, &n + &n);
    Ok(if x.cmp_rational(&mediant).is_gt() { f1 } else { f })
}

/// Running state of one expansion. `nums`/`dens` hold `p_{-1}, p_0, ..., p_{i-1}` and the
/// matching `q`, and `ys` holds `y_1, ..., y_i`.
#[derive(Clone, Debug)]
pub struct ExpanderState {
    modulus: Modulus,
    p: BigInt,
    b: BigInt,
    terms: Vec<Term>,
    nums: Vec<BigInt>,
    dens: Vec<BigInt>,
    ys: Vec<Real>,
    backtracks: usize,
}

impl ExpanderState {
    pub fn start(x: &Real, m: &Modulus) -> Result<Self> {
        let (p, _) = m.require_prime_power()?;
        let b = choose_gate(x, m)?;
        let y1 = x.mul_rational(&BigRational::from_integer(m.big())).sub_rational(&BigRational::from_integer(b.clone()));
        Ok(ExpanderState {
            modulus: m.clone(),
            p: BigInt::from(p),
            nums: vec![BigInt::one(), b.clone()],
            dens: vec![BigInt::zero(), m.big()],
            b,
            terms: Vec::new(),
            ys: vec![y1],
            backtracks: 0,
        })
    }

    /// Resumes from an explicit state: gate `b`, terms so far, and the current fin.
    pub fn resume(m: &Modulus, b: BigInt, terms: Vec<Term>, y: Real) -> Result<Self> {
        let (p, _) = m.require_prime_power()?;
        let mut st = ExpanderState {
            modulus: m.clone(),
            p: BigInt::from(p),
            nums: vec![BigInt::one(), b.clone()],
            dens: vec![BigInt::zero(), m.big()],
            b,
            terms: Vec::new(),
            ys: Vec::new(),
            backtracks: 0,
        };
        // Reconstruct earlier fins from y by y_i = eps_i / (a_i + y_{i+1}).
        let mut ys = vec![y];
        for t in terms.iter().rev() {
            let den = ys.last().unwrap().add_rational(&BigRational::from_integer(t.a.clone()));
            ys.push(den.recip()?.mul_rational(&BigRational::from_integer(BigInt::from(t.eps))));
        }
        ys.reverse();
        st.ys = ys;
        for t in terms {
            st.push_term(t);
        }
        Ok(st)
    }

    fn push_term(&mut self, t: Term) {
        let k = self.nums.len();
        let e = BigInt::from(t.eps);
        let p = &t.a * &self.nums[k - 1] + &e * &self.nums[k - 2];
        let q = &t.a * &self.dens[k - 1] + &e * &self.dens[k - 2];
        self.nums.push(p);
        self.dens.push(q);
        self.terms.push(t);
    }

    fn pop_term(&mut self) -> Term {
        self.nums.pop();
        self.dens.pop();
        self.terms.pop().expect("a term to pop")
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The current fin `y_i`, where `i - 1` terms have been emitted.
    pub fn fin(&self) -> &Real {
        self.ys.last().expect("at least y_1")
    }

    pub fn is_done(&self) -> bool {
        self.fin().is_zero()
    }

    pub fn backtracks(&self) -> usize {
        self.backtracks
    }

    pub fn expansion(&self) -> CfExpansion {
        CfExpansion::new(self.modulus.clone(), self.b.clone(), self.terms.clone())
    }

    /// Whether `a` may follow with sign `eps` at step `i`: `a >= 1`, the new numerator is
    /// prime to `p`, `a + eps >= 1`, and `a_1 >= 2`.
    fn admissible(&self, eps: i8, a: &BigInt) -> bool {
        let k = self.nums.len();
        let i = self.terms.len() + 1;
        *a >= BigInt::one()
            && !(a * &self.nums[k - 1] + BigInt::from(eps) * &self.nums[k - 2]).is_multiple_of(&self.p)
            && a + BigInt::from(eps) >= BigInt::one()
            && (i > 1 || *a >= BigInt::from(2))
    }

    fn candidates(t: &Real) -> Vec<BigInt> {
        match t.to_integer() {
            Some(t) => vec![&t - 1, t.clone(), t + 1],
            None => {
                let f = t.floor();
                vec![f.clone(), f + 1]
            }
        }
    }

    /// Emits the next term with the smallest admissible candidate. `Ok(None)` once `y = 0`;
    /// `BacktrackNeeded` (state unchanged) if no candidate is admissible.
    pub fn next_term(&mut self) -> Result<Option<Term>> {
        let y = self.fin().clone();
        if y.is_zero() {
            return Ok(None);
        }
        let eps = y.signum();
        let t = y.abs().recip()?;
        let a = Self::candidates(&t)
            .into_iter()
            .find(|a| self.admissible(eps, a))
            .ok_or(Error::BacktrackNeeded(self.terms.len() + 1))?;
        let next = t.sub_rational(&BigRational::from_integer(a.clone()));
        let term = Term::new(eps, a);
        self.push_term(term.clone());
        self.ys.push(next);
        Ok(Some(term))
    }

    /// Replaces the previous partial quotient `c` by `c - 1` and redoes the current step,
    /// which must then succeed with `eps = +1` (or terminate).
    pub fn backtrack_fix(&mut self) -> Result<Option<Term>> {
        if self.terms.is_empty() {
            return Err(Error::Internal("backtracking needs a previous term".into()));
        }
        let old = self.pop_term();
        self.ys.pop();
        let c1 = &old.a - 1;
        if !self.admissible(old.eps, &c1) {
            return Err(Error::Internal(format!("alternative {}/{} is not admissible", old.eps, c1)));
        }
        let t = self.fin().abs().recip()?;
        let y = t.sub_rational(&BigRational::from_integer(c1.clone()));
        self.push_term(Term::new(old.eps, c1));
        self.ys.push(y);
        self.backtracks += 1;
        match self.next_term() {
            Ok(Some(term)) if term.eps == 1 => Ok(Some(term)),
            Ok(None) => Ok(None),
            Ok(Some(term)) => Err(Error::Internal(format!("backtracking produced eps = {}", term.eps))),
            Err(Error::BacktrackNeeded(i)) => Err(Error::Internal(format!("second backtrack at term {i}"))),
            Err(e) => Err(e),
        }
    }

    /// One step with backtracking as needed.
    pub fn step(&mut self) -> Result<Option<Term>> {
        match self.next_term() {
            Err(Error::BacktrackNeeded(_)) => self.backtrack_fix(),
            other => other,
        }
    }
}

/// The finite expansion of a vertex of `F_{p^l}`.
pub fn expand_rational(x: &Vertex, m: &Modulus) -> Result<CfExpansion> {
    m.require_prime_power()?;
    m.require_vertex(x)?;
    let xr = Real::from_extended(x)?;
    let mut st = ExpanderState::start(&xr, m)?;
    // Each term raises q_i by at least 1.
    let limit = x.den().clone();
    let mut count = BigInt::zero();
    while st.step()?.is_some() {
        count += 1;
        if count > limit {
            return Err(Error::Internal(format!("expansion of {x} does not terminate")));
        }
    }
    let cf = st.expansion();
    let value = evaluate(&cf)?;
    if &value != x {
        return Err(Error::Internal(format!("expansion of {x} evaluates to {value}")));
    }
    Ok(cf)
}

/// A finite prefix of an expansion of a real number together with the next fin.
#[derive(Clone, Debug, PartialEq)]
pub struct RealExpansion {
    pub cf: CfExpansion,
    /// `y_{k+1}` for a prefix of `k` terms; zero iff the expansion is exact.
    pub residual: Real,
    pub exact: bool,
}

/// The first `max_terms` terms. One extra term is computed so that a backtrack, which
/// only ever revises the previous term, cannot change the returned prefix.
pub fn expand_real(x: &Real, m: &Modulus, max_terms: usize) -> Result<RealExpansion> {
    let mut st = ExpanderState::start(x, m)?;
    while st.terms.len() <= max_terms {
        if st.step()?.is_none() {
            break;
        }
    }
    let k = st.terms.len().min(max_terms);
    let cf = st.expansion().truncated(k);
    validate_cf(&cf).map_err(|v| Error::Internal(format!("expander produced {cf}: {v}")))?;
    let residual = st.ys[k].clone();
    let exact = residual.is_zero();
    Ok(RealExpansion { cf, residual, exact })
}

/// The `F_{2^l}` expansion via the closed forms `b = 2 floor(2^{l-1} x) + 1` and
/// `a_i = 2 floor((1 + 1/|y_i|)/2)`.
pub fn expand_dyadic(x: &Real, l: u32, max_terms: usize) -> Result<RealExpansion> {
    if l == 0 {
        return Err(Error::Precondition("l must be at least 1".into()));
    }
    let n = BigInt::one() << l;
    let m = Modulus::new(1u64 << l)?;
    let half = BigRational::from_integer(n.clone() >> 1);
    let b: BigInt = x.mul_rational(&half).floor() * 2 + 1;
    let mut y = x.mul_rational(&BigRational::from_integer(n)).sub_rational(&BigRational::from_integer(b.clone()));
    let mut terms = Vec::new();
    while terms.len() < max_terms && !y.is_zero() {
        let t = y.abs().recip()?;
        let a: BigInt = t.add_rational(&BigRational::one()).mul_rational(&BigRational::new(1.into(), 2.into())).floor() * 2;
        terms.push(Term::new(y.signum(), a.clone()));
        y = t.sub_rational(&BigRational::from_integer(a));
    }
    let exact = y.is_zero();
    Ok(RealExpansion { cf: CfExpansion::new(m, b, terms), residual: y, exact })
}

/// Lazily generated terms. A term is released only after its successor exists, because a
/// backtrack may still revise it.
pub struct CfStream {
    state: ExpanderState,
    released: usize,
    finished: bool,
}

impl CfStream {
    pub fn new(x: &Real, m: &Modulus) -> Result<Self> {
        Ok(CfStream { state: ExpanderState::start(x, m)?, released: 0, finished: false })
    }

    pub fn gate(&self) -> &BigInt {
        self.state.b()
    }

    pub fn state(&self) -> &ExpanderState {
        &self.state
    }
}

impl Iterator for CfStream {
    type Item = Result<Term>;

    fn next(&mut self) -> Option<Result<Term>> {
        while !self.finished && self.state.terms.len() <= self.released + 1 {
            match self.state.step() {
                Ok(Some(_)) => {}
                Ok(None) => self.finished = true,
                Err(e) => {
                    self.finished = true;
                    return Some(Err(e));
                }
            }
        }
        let t = self.state.terms.get(self.released)?.clone();
        self.released += 1;
        Some(Ok(t))
    }
}
