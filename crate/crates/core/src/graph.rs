//! The graph `F_N`: vertices are reduced `p/q` with `N | q` plus infinity, and
//! `r/s ~ p/q` iff `rq - sp = ±N`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::integer::{ext_gcd, factorize};
use crate::arith::ExtendedRational;
use crate::error::{Error, Result};

pub type Vertex = ExtendedRational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Modulus {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Malformed("N must be at least 1".into()));
        }
        Ok(Modulus { n, factors: factorize(n) })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn big(&self) -> BigInt {
        BigInt::from(self.n)
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// `(p, l)` with `N = p^l`, `l >= 1`. `None` for `N = 1` and for composite `N`.
    pub fn prime_power(&self) -> Option<(u64, u32)> {
        match self.factors.as_slice() {
            [(p, l)] => Some((*p, *l)),
            _ => None,
        }
    }

    pub fn is_connected(&self) -> bool {
        self.factors.len() <= 1
    }

    /// The prime of a prime-power modulus; composite `N` fails with a disconnection witness.
    pub fn require_prime_power(&self) -> Result<(u64, u32)> {
        self.prime_power().ok_or_else(|| Error::NotPrimePower {
            n: self.n,
            witness: disconnection_witness(self).ok(),
        })
    }

    pub fn contains(&self, x: &Vertex) -> bool {
        in_xn(x, self)
    }

    pub fn require_vertex(&self, x: &Vertex) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::NotInXN { value: x.to_string(), n: self.n })
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n)
    }
}

pub fn in_xn(x: &Vertex, m: &Modulus) -> bool {
    x.is_infinite() || (x.den() % m.big()).is_zero()
}

pub fn is_connected(m: &Modulus) -> bool {
    m.is_connected()
}

fn cross(p: &Vertex, q: &Vertex) -> BigInt {
    q.num() * p.den() - q.den() * p.num()
}

/// `rq - sp = ±N` on reduced representatives, with infinity as `1/0`.
pub fn adjacent(p: &Vertex, q: &Vertex, m: &Modulus) -> bool {
    in_xn(p, m) && in_xn(q, m) && cross(p, q).abs() == m.big()
}

fn scaled_den(x: &Vertex, m: &Modulus) -> Result<BigInt> {
    m.require_vertex(x)?;
    if x.is_infinite() {
        return Err(Error::Precondition("expected a finite vertex".into()));
    }
    Ok(x.den() / m.big())
}

fn vertex(num: BigInt, den: BigInt) -> Vertex {
    ExtendedRational::new(num, den).expect("denominator is positive")
}

fn sort_vertices(v: &mut [Vertex]) {
    v.sort_by(|a, b| match (a.is_infinite(), b.is_infinite()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => a.cmp_finite(b).unwrap(),
    });
}

/// The at most two neighbours of `x` with smaller denominator. Scaling by `N` turns
/// them into the Farey parents `c/d` and `(p-c)/(q'-d)` of `p/q'`.
pub fn neighbors_below(x: &Vertex, m: &Modulus) -> Result<Vec<Vertex>> {
    let q1 = scaled_den(x, m)?;
    if q1.is_one() {
        return Err(Error::Precondition(format!("{x} is adjacent to inf only from below")));
    }
    let p = x.num();
    // p*u + q1*v = 1; d = u mod q1 gives p*d - q1*c = 1.
    let (_, u, _) = ext_gcd(p, &q1);
    let d = u.mod_floor(&q1);
    let c: BigInt = (p * &d - 1) / &q1;
    let n = m.big();
    let mut out: Vec<Vertex> = [(c.clone(), d.clone()), (p - c, &q1 - d)]
        .into_iter()
        .filter(|(r, _)| r.gcd(&n).is_one())
        .map(|(r, s)| vertex(r, s * &n))
        .collect();
    sort_vertices(&mut out);
    out.dedup();
    Ok(out)
}

/// All neighbours of a finite `x` with denominator at most `qmax`, sorted by value with
/// infinity last.
pub fn neighbors_bounded(x: &Vertex, m: &Modulus, qmax: &BigInt) -> Result<Vec<Vertex>> {
    let n = m.big();
    if *qmax < n {
        return Err(Error::Precondition(format!("qmax {qmax} is below N = {n}")));
    }
    let q1 = scaled_den(x, m)?;
    let p = x.num();
    let smax = qmax / &n;
    // Scaled neighbours r/s of p/q1 satisfy r*q1 - s*p = ±1: with p*u + q1*v = 1 they are
    // (s, r) = (-u + k*q1, v + k*p) and (u + k*q1, -v + k*p).
    let (_, u, v) = ext_gcd(p, &q1);
    let mut out = Vec::new();
    for (s0, r0) in [(-&u, v.clone()), (u.clone(), -&v)] {
        let shift = s0.div_floor(&q1);
        let mut s = &s0 - &shift * &q1;
        let mut r = &r0 - &shift * p;
        if s.is_zero() {
            s += &q1;
            r += p;
        }
        while s <= smax {
            if r.gcd(&n).is_one() {
                out.push(vertex(r.clone(), &s * &n));
            }
            s += &q1;
            r += p;
        }
    }
    if q1.is_one() {
        out.push(ExtendedRational::infinity());
    }
    sort_vertices(&mut out);
    out.dedup();
    Ok(out)
}

/// The neighbours `b/N` of infinity with `lo <= b/N <= hi`.
pub fn gates_in(m: &Modulus, lo: &BigRational, hi: &BigRational) -> Vec<Vertex> {
    let n = m.big();
    let nr = BigRational::from_integer(n.clone());
    let first = (lo * &nr).ceil().to_integer();
    let last = (hi * &nr).floor().to_integer();
    let mut out = Vec::new();
    let mut b = first;
    while b <= last {
        if b.gcd(&n).is_one() {
            out.push(vertex(b.clone(), n.clone()));
        }
        b += 1;
    }
    out
}

/// An unordered pair of distinct vertices, stored with the smaller finite value first and
/// infinity, if present, second.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    lo: Vertex,
    hi: Vertex,
}

impl Edge {
    /// A geodesic between two distinct points, with no adjacency requirement.
    pub fn between(a: Vertex, b: Vertex) -> Result<Self> {
        if a == b {
            return Err(Error::Precondition(format!("degenerate edge at {a}")));
        }
        let swap = a.is_infinite() || (!b.is_infinite() && a.cmp_finite(&b) == Some(Ordering::Greater));
        Ok(if swap { Edge { lo: b, hi: a } } else { Edge { lo: a, hi: b } })
    }

    /// An edge of `F_N`.
    pub fn new(a: Vertex, b: Vertex, m: &Modulus) -> Result<Self> {
        if !adjacent(&a, &b, m) {
            return Err(Error::NotAdjacent(a.to_string(), b.to_string(), m.n()));
        }
        Edge::between(a, b)
    }

    pub fn lo(&self) -> &Vertex {
        &self.lo
    }

    pub fn hi(&self) -> &Vertex {
        &self.hi
    }

    pub fn is_vertical(&self) -> bool {
        self.hi.is_infinite()
    }
}

fn lt(a: &Vertex, b: &Vertex) -> bool {
    a.cmp_finite(b) == Some(Ordering::Less)
}

/// Whether the two geodesics meet in the upper half plane.
pub fn edges_cross(e1: &Edge, e2: &Edge) -> bool {
    match (e1.is_vertical(), e2.is_vertical()) {
        (true, true) => false,
        (true, false) => lt(&e2.lo, &e1.lo) && lt(&e1.lo, &e2.hi),
        (false, true) => lt(&e1.lo, &e2.lo) && lt(&e2.lo, &e1.hi),
        (false, false) => {
            let (a, b, c, d) = (&e1.lo, &e1.hi, &e2.lo, &e2.hi);
            (lt(a, c) && lt(c, b) && lt(b, d)) || (lt(c, a) && lt(a, d) && lt(d, b))
        }
    }
}

/// Consecutive `A, A+1` in `(0, N)` both sharing a factor with `N`, built from the two
/// smallest primes `p < q` of `N`: `m*p - n*q = 1` with `0 < n < p`, so `A = n*q`, `B = m*p`.
pub fn disconnection_witness(m: &Modulus) -> Result<(u64, u64)> {
    let [(p, _), (q, _), ..] = m.factors() else {
        return Err(Error::Precondition(format!("N = {m} has fewer than two prime divisors")));
    };
    let (p, q) = (*p, *q);
    // n*q ≡ -1 (mod p)
    let q_inv = (1..p).find(|k| (k * q) % p == 1).expect("distinct primes are coprime");
    let a = (p - q_inv) * q;
    Ok((a, a + 1))
}

/// One step of the connectivity proof: for `x = X/(N*Y)`, solve `r*Y - s*X = 1` with
/// `0 < s < Y` and return `r/(N*s)` if it is a vertex, else `(X-r)/(N*(Y-s))`.
pub fn ancestor_step(x: &Vertex, m: &Modulus) -> Result<Vertex> {
    m.require_prime_power()?;
    let y = scaled_den(x, m)?;
    if y.is_one() {
        return Err(Error::Precondition(format!("{x} is a gate; its ancestor is inf")));
    }
    let xn = x.num();
    // Y*u + X*v = 1, so s ≡ -v (mod Y).
    let (_, _, v) = ext_gcd(&y, xn);
    let s = (-v).mod_floor(&y);
    let r = (BigInt::one() + &s * xn) / &y;
    let n = m.big();
    let cand = if r.gcd(&n).is_one() {
        vertex(r, s * &n)
    } else {
        vertex(xn - r, (&y - s) * &n)
    };
    if !adjacent(&cand, x, m) || cand.den() >= x.den() {
        return Err(Error::Internal(format!("ancestor step from {x} produced {cand}")));
    }
    Ok(cand)
}

/// An element `[[a, b], [c, d]]` of `SL(2, Z)` acting by fractional linear maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mobius {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mobius {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if &a * &d - &b * &c != BigInt::one() {
            return Err(Error::Precondition("determinant must be 1".into()));
        }
        Ok(Mobius { a, b, c, d })
    }

    pub fn identity() -> Self {
        Mobius { a: BigInt::one(), b: BigInt::zero(), c: BigInt::zero(), d: BigInt::one() }
    }

    pub fn apply(&self, v: &Vertex) -> Vertex {
        apply_mobius(self, v)
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

pub fn apply_mobius(g: &Mobius, v: &Vertex) -> Vertex {
    let num = &g.a * v.num() + &g.b * v.den();
    let den = &g.c * v.num() + &g.d * v.den();
    // The determinant is 1, so num and den never vanish together.
    vertex(num, den)
}

/// `γ = [[A, B], [-q, p]]` for `P = p/q`, with `A*p + B*q = 1`: sends `P` to infinity and
/// `Q` to a gate `m/N`.
pub fn normalize_edge(p: &Vertex, q: &Vertex, m: &Modulus) -> Result<Mobius> {
    m.require_prime_power()?;
    if p.is_infinite() {
        return Err(Error::Precondition("the first endpoint must be finite".into()));
    }
    if !adjacent(p, q, m) {
        return Err(Error::NotAdjacent(p.to_string(), q.to_string(), m.n()));
    }
    let (_, a, b) = ext_gcd(p.num(), p.den());
    Mobius::new(a, b, -p.den(), p.num().clone())
}

/// The finite vertices in `[lo, hi]` with denominator at most `qmax`, sorted by value.
pub fn vertices_in(m: &Modulus, lo: &BigRational, hi: &BigRational, qmax: &BigInt) -> Vec<Vertex> {
    let n = m.big();
    let mut out = Vec::new();
    let mut den = n.clone();
    while &den <= qmax {
        let d = BigRational::from_integer(den.clone());
        let mut p = (lo * &d).ceil().to_integer();
        let last = (hi * &d).floor().to_integer();
        while p <= last {
            if p.gcd(&den).is_one() {
                out.push(vertex(p.clone(), den.clone()));
            }
            p += 1;
        }
        den += &n;
    }
    sort_vertices(&mut out);
    out
}

/// Total order on edges by `(lo, hi)`, infinity last.
pub fn cmp_edges(a: &Edge, b: &Edge) -> Ordering {
    let key = |v: &Vertex, w: &Vertex| match (v.is_infinite(), w.is_infinite()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => v.cmp_finite(w).unwrap(),
    };
    key(&a.lo, &b.lo).then_with(|| key(&a.hi, &b.hi))
}

/// The edges joining two vertices of [`vertices_in`], plus the vertical edges from the
/// gates among them to infinity, sorted by [`cmp_edges`].
pub fn edges_in(m: &Modulus, lo: &BigRational, hi: &BigRational, qmax: &BigInt) -> Result<Vec<Edge>> {
    let mut out = Vec::new();
    for v in vertices_in(m, lo, hi, qmax) {
        for w in neighbors_bounded(&v, m, qmax)? {
            if w.is_infinite() {
                out.push(Edge::between(v.clone(), w)?);
                continue;
            }
            let r = w.to_ratio().unwrap();
            if lt(&v, &w) && &r >= lo && &r <= hi {
                out.push(Edge::between(v.clone(), w)?);
            }
        }
    }
    out.sort_by(cmp_edges);
    Ok(out)
}
