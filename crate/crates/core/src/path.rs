//! Paths `inf = P_{-1} -> P_0 -> ... -> P_n` in `F_N` and their correspondence with
//! `F_N`-continued fractions.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::integer::mod_inverse;
use crate::cf::{convergents, validate_cf, CfExpansion, Term};
use crate::error::{Error, Result};
use crate::graph::{adjacent, ancestor_step, neighbors_bounded, Modulus, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    modulus: Modulus,
    vertices: Vec<Vertex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    Changing,
    Retaining,
}

impl EdgeClass {
    /// The sign `eps` that a term of this class carries.
    pub fn eps(self) -> i8 {
        match self {
            EdgeClass::Changing => 1,
            EdgeClass::Retaining => -1,
        }
    }
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeClass::Changing => "changing",
            EdgeClass::Retaining => "retaining",
        })
    }
}

impl Path {
    /// `vertices` must start with infinity; nothing else is checked here.
    pub fn new(modulus: Modulus, vertices: Vec<Vertex>) -> Self {
        Path { modulus, vertices }
    }

    /// Prepends infinity to the finite vertices `P_0, ..., P_n`.
    pub fn from_finite(modulus: Modulus, finite: impl IntoIterator<Item = Vertex>) -> Self {
        let mut vertices = vec![Vertex::infinity()];
        vertices.extend(finite);
        Path { modulus, vertices }
    }

    /// Parses `inf -> 1/3 -> 2/9`.
    pub fn parse(modulus: Modulus, s: &str) -> Result<Self> {
        let vertices = s.split("->").map(|v| v.trim().parse()).collect::<Result<Vec<Vertex>>>()?;
        Ok(Path { modulus, vertices })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// `P_i` for `i >= -1`.
    pub fn at(&self, i: isize) -> &Vertex {
        &self.vertices[(i + 1) as usize]
    }

    /// The index `n` of the last vertex.
    pub fn n(&self) -> isize {
        self.vertices.len() as isize - 2
    }

    pub fn last(&self) -> &Vertex {
        self.vertices.last().expect("a path has at least one vertex")
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.vertices.contains(v)
    }

    pub fn extended(&self, v: Vertex) -> Path {
        let mut vertices = self.vertices.clone();
        vertices.push(v);
        Path { modulus: self.modulus.clone(), vertices }
    }

    /// The prefix ending at `P_i`.
    pub fn prefix(&self, i: isize) -> Path {
        Path { modulus: self.modulus.clone(), vertices: self.vertices[..(i + 2) as usize].to_vec() }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidPath(msg));
        if self.vertices.len() < 2 {
            return bad("a path needs infinity and at least one finite vertex".into());
        }
        if !self.vertices[0].is_infinite() {
            return bad("the first vertex must be inf".into());
        }
        for w in self.vertices.windows(2) {
            if !adjacent(&w[0], &w[1], &self.modulus) {
                return bad(format!("{} and {} are not adjacent in F_{}", w[0], w[1], self.modulus));
            }
            if w[0].den() >= w[1].den() {
                return bad(format!("denominators do not increase from {} to {}", w[0], w[1]));
            }
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if self.vertices[..i].contains(v) {
                return bad(format!("{v} is repeated"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.vertices.iter().map(|v| v.to_string().into()).collect())
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(" -> ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_path(pth: &Path) -> bool {
    pth.check().is_ok()
}

/// Follows ancestor steps down to a gate and reverses.
pub fn path_from_infinity(x: &Vertex, m: &Modulus) -> Result<Path> {
    m.require_prime_power()?;
    m.require_vertex(x)?;
    if x.is_infinite() {
        return Err(Error::Precondition("the endpoint must be finite".into()));
    }
    let mut chain = vec![x.clone()];
    while chain.last().unwrap().den() != &m.big() {
        let next = ancestor_step(chain.last().unwrap(), m)?;
        chain.push(next);
    }
    chain.reverse();
    Ok(Path::from_finite(m.clone(), chain))
}

/// Position of `q` relative to the last edge: between `P_{n-1}` and `x` is changing. With
/// `P_{n-1} = inf` the comparison treats infinity as `+inf`.
fn side(prev: &Vertex, x: &Vertex, q: &Vertex) -> EdgeClass {
    let between = if prev.is_infinite() {
        q.cmp_finite(x) == Some(Ordering::Greater)
    } else {
        q.strictly_between(prev, x)
    };
    if between {
        EdgeClass::Changing
    } else {
        EdgeClass::Retaining
    }
}

fn check_candidate(pth: &Path, q: &Vertex, require_larger: bool) -> Result<()> {
    pth.check()?;
    let x = pth.last();
    if !adjacent(x, q, &pth.modulus) {
        return Err(Error::NotAdjacent(x.to_string(), q.to_string(), pth.modulus.n()));
    }
    if q.is_infinite() || pth.contains(q) {
        return Err(Error::Precondition(format!("{q} already lies on the path")));
    }
    if require_larger && q.den() <= x.den() {
        return Err(Error::Precondition(format!("{q} does not have a larger denominator than {x}")));
    }
    Ok(())
}

pub fn classify_extension(pth: &Path, q: &Vertex) -> Result<EdgeClass> {
    check_candidate(pth, q, true)?;
    Ok(side(pth.at(pth.n() - 1), pth.last(), q))
}

/// Rank of the edge `x -> q` among the edges from `x` to vertices off the path on the same
/// side, by decreasing radius (increasing denominator).
pub fn semicircle_rank(pth: &Path, q: &Vertex) -> Result<(EdgeClass, u64)> {
    check_candidate(pth, q, false)?;
    let prev = pth.at(pth.n() - 1);
    let x = pth.last();
    let class = side(prev, x, q);
    let fan = neighbors_bounded(x, &pth.modulus, q.den())?;
    let mut dens: Vec<&BigInt> = fan
        .iter()
        .filter(|v| v.is_finite() && !pth.contains(v) && side(prev, x, v) == class)
        .map(|v| v.den())
        .collect();
    dens.sort();
    let k = dens.iter().position(|d| *d == q.den()).expect("q is in its own fan");
    Ok((class, k as u64 + 1))
}

/// The `k`-th positive `a` with `a*p_n + eps*p_{n-1}` prime to `p`, i.e. the partial quotient
/// of the `k`-th semicircle on the given side.
pub fn coeff_of_rank(pth: &Path, class: EdgeClass, k: u64) -> Result<BigInt> {
    if k < 1 {
        return Err(Error::Precondition("ranks start at 1".into()));
    }
    let (p, _) = pth.modulus.require_prime_power()?;
    pth.check()?;
    let pb = BigInt::from(p);
    let prev = pth.at(pth.n() - 1);
    let excluded = (-BigInt::from(class.eps()) * prev.num() * mod_inverse(pth.last().num(), &pb)?)
        .mod_floor(&pb)
        .to_u64()
        .expect("residue below p");
    // Each block pm+1..pm+p holds p-1 admissible values; the residue `excluded` is skipped.
    let (m, t) = ((k - 1) / (p - 1), (k - 1) % (p - 1) + 1);
    let a = p * m + t + u64::from(t >= excluded);
    Ok(BigInt::from(a))
}

/// `P_{i+1}`'s triangle condition: if `P_{i-1} ~ P_{i+1}` then `P_{i+2}` must be changing
/// relative to the prefix ending at `P_{i+1}`.
fn violates_at(pth: &Path, i: isize) -> bool {
    let m = &pth.modulus;
    if i < 1 || i + 2 > pth.n() {
        return false;
    }
    adjacent(pth.at(i - 1), pth.at(i + 1), m)
        && side(pth.at(i), pth.at(i + 1), pth.at(i + 2)) == EdgeClass::Retaining
}

/// The smallest `i` at which the triangle condition fails.
pub fn first_violation(pth: &Path) -> Option<isize> {
    (1..=pth.n() - 2).find(|&i| violates_at(pth, i))
}

pub fn is_well_directed(pth: &Path) -> bool {
    validate_path(pth) && first_violation(pth).is_none()
}

/// True iff appending `q` to the well directed path `pth` keeps it well directed.
pub fn extension_is_well_directed(pth: &Path, q: &Vertex) -> bool {
    let n = pth.n();
    n < 2 || !adjacent(pth.at(n - 2), pth.at(n), &pth.modulus) || side(pth.at(n - 1), pth.at(n), q) == EdgeClass::Changing
}

/// Repeatedly drops `P_i` at the first violation, where `P_{i-1} ~ P_{i+1}`.
pub fn make_well_directed(pth: &Path) -> Result<Path> {
    pth.modulus.require_prime_power()?;
    pth.check()?;
    let mut cur = pth.clone();
    while let Some(i) = first_violation(&cur) {
        cur.vertices.remove((i + 1) as usize);
        cur.check().map_err(|e| Error::Internal(format!("repair broke the path: {e}")))?;
    }
    Ok(cur)
}

/// Reads off `(eps_i, a_i)` from `P_i = a_i P_{i-1} + eps_i P_{i-2}`.
pub fn path_to_cf(pth: &Path) -> Result<CfExpansion> {
    pth.check()?;
    if let Some(i) = first_violation(pth) {
        return Err(Error::InvalidPath(format!("not well directed at P_{}", i + 1)));
    }
    let n = pth.modulus.big();
    let b = pth.at(0).num().clone();
    let mut terms = Vec::new();
    for i in 1..=pth.n() {
        let (p2, p1, p0) = (pth.at(i - 2), pth.at(i - 1), pth.at(i));
        // e_{i-1} = (p_i q_{i-1} - q_i p_{i-1}) / N, and eps_i = -e_{i-2} e_{i-1}.
        let e1 = (p0.num() * p1.den() - p0.den() * p1.num()) / &n;
        let e2 = (p1.num() * p2.den() - p1.den() * p2.num()) / &n;
        let eps = -(&e1 * &e2);
        let eps_i: i8 = if eps.is_positive() { 1 } else { -1 };
        let a = (p0.den() - &eps * p2.den()) / p1.den();
        if &a * p1.num() + &eps * p2.num() != *p0.num() || &a * p1.den() + &eps * p2.den() != *p0.den() {
            return Err(Error::Internal(format!("no recurrence reaches {p0} from {p1}")));
        }
        terms.push(Term::new(eps_i, a));
    }
    let cf = CfExpansion::new(pth.modulus.clone(), b, terms);
    validate_cf(&cf).map_err(|v| Error::Internal(format!("well directed path gave invalid {cf}: {v}")))?;
    Ok(cf)
}

/// The path through the convergents.
pub fn cf_to_path(cf: &CfExpansion) -> Result<Path> {
    let seq = convergents(cf)?;
    let pth = Path::from_finite(cf.modulus().clone(), seq.vertices());
    if !is_well_directed(&pth) {
        return Err(Error::Internal(format!("{cf} did not give a well directed path")));
    }
    Ok(pth)
}

/// Independent route to `eps` for the edge `x -> q`: minus the product of the orientations
/// of the last two edges.
pub fn derived_eps(pth: &Path, q: &Vertex) -> i8 {
    let n = pth.n();
    let orient = |a: &Vertex, b: &Vertex| (b.num() * a.den() - b.den() * a.num()).signum();
    let e = orient(pth.at(n - 1), pth.at(n)) * orient(pth.at(n), q);
    if e.is_one() {
        -1
    } else {
        debug_assert!(!e.is_zero());
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(n: u64) -> Modulus {
        Modulus::new(n).unwrap()
    }

    fn er(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    fn path(n: u64, s: &str) -> Path {
        Path::parse(md(n), s).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(validate_path(&path(3, "inf -> 1/3 -> 2/9 -> 5/21")));
        assert!(validate_path(&path(3, "inf -> 1/3 -> 1/6 -> 2/9 -> 5/21")));
        assert!(!validate_path(&path(3, "inf -> 1/3 -> 2/3")));
        assert!(!validate_path(&path(3, "1/3 -> 2/9")));
        assert!(!validate_path(&path(3, "inf")));
    }

    #[test]
    fn path_from_infinity_examples() {
        assert_eq!(path_from_infinity(&er("5/21"), &md(3)).unwrap(), path(3, "inf -> 1/3 -> 2/9 -> 5/21"));
        assert_eq!(path_from_infinity(&er("2/5"), &md(5)).unwrap(), path(5, "inf -> 2/5"));
        assert_eq!(path_from_infinity(&er("7/20"), &md(5)).unwrap(), path(5, "inf -> 2/5 -> 7/20"));
        assert!(path_from_infinity(&er("1/6"), &md(6)).unwrap_err().is_domain());
    }

    #[test]
    fn classification_examples() {
        let detour = path(3, "inf -> 1/3 -> 1/6 -> 2/9");
        assert_eq!(classify_extension(&detour, &er("5/21")).unwrap(), EdgeClass::Retaining);
        let direct = path(3, "inf -> 1/3 -> 2/9");
        assert_eq!(classify_extension(&direct, &er("5/21")).unwrap(), EdgeClass::Changing);
        let t = path(5, "inf -> 1/5 -> 3/10");
        assert_eq!(classify_extension(&t, &er("4/15")).unwrap(), EdgeClass::Changing);
        assert!(classify_extension(&t, &er("1/5")).is_err());
        assert!(classify_extension(&t, &er("6/25")).is_err());
    }

    #[test]
    fn rank_examples() {
        let p = path(5, "inf -> 1/5");
        assert_eq!(semicircle_rank(&p, &er("2/5")).unwrap(), (EdgeClass::Changing, 1));
        assert_eq!(semicircle_rank(&p, &er("3/10")).unwrap(), (EdgeClass::Changing, 2));
        assert_eq!(semicircle_rank(&p, &er("6/25")).unwrap(), (EdgeClass::Changing, 4));
        assert_eq!(semicircle_rank(&p, &er("1/10")).unwrap(), (EdgeClass::Retaining, 1));
        assert_eq!(coeff_of_rank(&p, EdgeClass::Changing, 4).unwrap(), BigInt::from(5));
        assert_eq!(coeff_of_rank(&p, EdgeClass::Changing, 1).unwrap(), BigInt::from(1));
        assert_eq!(coeff_of_rank(&p, EdgeClass::Retaining, 1).unwrap(), BigInt::from(2));
        assert!(coeff_of_rank(&p, EdgeClass::Changing, 0).is_err());
        // Excluded residue 1 mod 3: admissible a are 2, 3, 5, ...
        let p = path(3, "inf -> 1/3");
        assert_eq!(coeff_of_rank(&p, EdgeClass::Retaining, 2).unwrap(), BigInt::from(3));
        assert_eq!(coeff_of_rank(&p, EdgeClass::Retaining, 3).unwrap(), BigInt::from(5));
    }

    #[test]
    fn well_directed_examples() {
        assert!(is_well_directed(&path(3, "inf -> 1/3 -> 2/9 -> 5/21")));
        assert!(!is_well_directed(&path(3, "inf -> 1/3 -> 1/6 -> 2/9 -> 5/21")));
        assert!(is_well_directed(&path(5, "inf -> 2/5 -> 7/20")));
        assert!(is_well_directed(&path(5, "inf -> 1/5 -> 3/10 -> 4/15 -> 11/40")));
        assert!(is_well_directed(&path(5, "inf -> 2/5 -> 3/10 -> 4/15 -> 11/40")));
    }

    #[test]
    fn repair_examples() {
        let fixed = make_well_directed(&path(3, "inf -> 1/3 -> 1/6 -> 2/9 -> 5/21")).unwrap();
        assert_eq!(fixed, path(3, "inf -> 1/3 -> 2/9 -> 5/21"));
        let good = path(5, "inf -> 1/5 -> 3/10 -> 4/15 -> 11/40");
        assert_eq!(make_well_directed(&good).unwrap(), good);
    }

    #[test]
    fn path_to_cf_examples() {
        let cf = path_to_cf(&path(3, "inf -> 1/3 -> 2/9 -> 5/21")).unwrap();
        assert_eq!(cf.to_string(), "1/0+ 3/1+ -1/3+ 1/2");
        let cf = path_to_cf(&path(25, "inf -> 1/25 -> 1/50 -> 2/75")).unwrap();
        assert_eq!(cf.to_string(), "1/0+ 25/1+ -1/2+ 1/1");
        let cf = path_to_cf(&path(5, "inf -> 2/5 -> 7/20")).unwrap();
        assert_eq!(cf.to_string(), "1/0+ 5/2+ -1/4");
        assert!(path_to_cf(&path(3, "inf -> 1/3 -> 1/6 -> 2/9 -> 5/21")).is_err());
    }

    #[test]
    fn cf_to_path_examples() {
        let p = cf_to_path(&"1/0+ 5/1+ 1/2+ 1/2+ -1/2".parse().unwrap()).unwrap();
        assert_eq!(p, path(5, "inf -> 1/5 -> 3/10 -> 7/25 -> 11/40"));
        let p = cf_to_path(&"1/0+ 5/2".parse().unwrap()).unwrap();
        assert_eq!(p, path(5, "inf -> 2/5"));
        let p = cf_to_path(&"1/0+ 25/1+ -1/2+ 1/1".parse().unwrap()).unwrap();
        assert_eq!(p, path(25, "inf -> 1/25 -> 1/50 -> 2/75"));
    }

    #[test]
    fn derived_sign_matches_class() {
        let p = path(5, "inf -> 1/5 -> 3/10");
        assert_eq!(derived_eps(&p, &er("4/15")), 1);
        let p = path(3, "inf -> 1/3 -> 1/6 -> 2/9");
        assert_eq!(derived_eps(&p, &er("5/21")), -1);
    }
}
