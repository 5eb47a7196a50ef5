//! Property suites run from the command line and the acceptance target. Each returns a
//! report; a failing property carries its counterexample instead of raising an error.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::arith::{farey_diff, Real};
use crate::cf::{convergents, direct_error, error_term, evaluate, fin_from_value, tail_reconstruct};
use crate::enumerate::{count_cross_check, Enumerator};
use crate::error::{Error, Result};
use crate::expand::{expand_rational, expand_real};
use crate::graph::{
    disconnection_witness, edges_cross, edges_in, gates_in, neighbors_below, neighbors_bounded, vertices_in, Modulus,
    Vertex,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub params: Value,
    pub passed: bool,
    pub checked: u64,
    pub failure: Option<Value>,
}

impl CheckReport {
    fn new(name: &str, params: Value) -> Self {
        CheckReport { name: name.into(), params, passed: true, checked: 0, failure: None }
    }

    fn fail(mut self, failure: Value) -> Self {
        self.passed = false;
        self.failure = Some(failure);
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.name,
            "params": self.params,
            "passed": self.passed,
            "checked": self.checked,
            "failure": self.failure,
        })
    }
}

pub const SUITES: &[&str] = &["no-crossing", "tree", "oracle", "connectivity", "convergence", "soundness", "short-paths"];

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Every pair of edges among the vertices of `[lo, hi]` with denominator at most `qmax`,
/// infinity edges included, is checked for crossing.
pub fn no_crossing(m: &Modulus, lo: &BigRational, hi: &BigRational, qmax: &BigInt) -> Result<CheckReport> {
    let mut rep = CheckReport::new(
        "no-crossing",
        json!({"N": m.n(), "lo": lo.to_string(), "hi": hi.to_string(), "qmax": qmax.to_string()}),
    );
    let edges = edges_in(m, lo, hi, qmax)?;
    for (i, e) in edges.iter().enumerate() {
        for f in &edges[i + 1..] {
            rep.checked += 1;
            if edges_cross(e, f) {
                let pair = |e: &crate::graph::Edge| format!("{}-{}", e.lo(), e.hi());
                return Ok(rep.fail(json!({"edges": [pair(e), pair(f)]})));
            }
        }
    }
    Ok(rep)
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// For `N = 2^l`: every vertex of `[0, 1]` with denominator at most `qmax` has exactly one
/// expansion, its gate is `2 floor(2^{l-1} x) + 1`, the deterministic expander finds it,
/// and the edges in the window form no cycle.
pub fn tree(l: u32, qmax: &BigInt) -> Result<CheckReport> {
    let n = 1u64 << l;
    let m = Modulus::new(n)?;
    let mut rep = CheckReport::new("tree", json!({"N": n, "qmax": qmax.to_string()}));
    let (lo, hi) = (BigRational::zero(), BigRational::one());
    let half = BigRational::from_integer(BigInt::from(n / 2));
    let mut en = Enumerator::new(&m)?;
    let vertices = vertices_in(&m, &lo, &hi, qmax);
    for x in &vertices {
        rep.checked += 1;
        let set = en.expansions(x)?;
        if set.len() != 1 {
            let all: Vec<String> = set.expansions.iter().map(|c| c.to_string()).collect();
            return Ok(rep.fail(json!({"x": x.to_string(), "count": set.len(), "expansions": all})));
        }
        let cf = &set.expansions[0];
        let gate = (x.to_ratio().unwrap() * &half).floor().to_integer() * 2 + 1;
        if cf.b() != &gate {
            return Ok(rep.fail(json!({"x": x.to_string(), "gate": cf.b().to_string(), "expected": gate.to_string()})));
        }
        let det = expand_rational(x, &m)?;
        if &det != cf {
            return Ok(rep.fail(json!({"x": x.to_string(), "enumerated": cf.to_string(), "expanded": det.to_string()})));
        }
    }
    let mut index: HashMap<Vertex, usize> = vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    index.insert(Vertex::infinity(), vertices.len());
    let mut parent: Vec<usize> = (0..=vertices.len()).collect();
    for e in edges_in(&m, &lo, &hi, qmax)? {
        rep.checked += 1;
        let (a, b) = (find(&mut parent, index[e.lo()]), find(&mut parent, index[e.hi()]));
        if a == b {
            return Ok(rep.fail(json!({"cycle_closing_edge": [e.lo().to_string(), e.hi().to_string()]})));
        }
        parent[a] = b;
    }
    Ok(rep)
}

/// Enumeration against forward search for every vertex of `[0, 1]` up to `qmax`.
pub fn oracle(m: &Modulus, qmax: &BigInt) -> Result<CheckReport> {
    let mut rep = CheckReport::new("oracle", json!({"N": m.n(), "qmax": qmax.to_string()}));
    let samples = vertices_in(m, &BigRational::zero(), &BigRational::one(), qmax);
    for e in count_cross_check(&samples, m, qmax)? {
        rep.checked += 1;
        if !e.matched {
            return Ok(rep.fail(json!({
                "x": e.x.to_string(), "enumerated": e.enumerated, "brute_force": e.brute_force,
            })));
        }
    }
    Ok(rep)
}

fn is_prime_power_by_division(mut n: u64) -> bool {
    if n == 1 {
        return true;
    }
    let mut p = 2;
    while p * p <= n && !n.is_multiple_of(p) {
        p += 1;
    }
    if !n.is_multiple_of(p) {
        return true;
    }
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

/// The classification against trial division for `N <= nmax`, then for each composite
/// modulus a breadth-first search from infinity inside `[-1, 2]` with denominators up to
/// `100 N` that must stay out of `(A/N, B/N)`.
pub fn connectivity(nmax: u64, bfs: &[u64]) -> Result<CheckReport> {
    let mut rep = CheckReport::new("connectivity", json!({"nmax": nmax, "bfs": bfs}));
    for n in 1..=nmax {
        rep.checked += 1;
        let m = Modulus::new(n)?;
        if m.is_connected() != is_prime_power_by_division(n) {
            return Ok(rep.fail(json!({"N": n, "is_connected": m.is_connected()})));
        }
    }
    let (lo, hi) = (ratio(-1, 1), ratio(2, 1));
    for &n in bfs {
        let m = Modulus::new(n)?;
        let (a, b) = disconnection_witness(&m)?;
        let (ga, gb) = (ratio(a as i64, n as i64), ratio(b as i64, n as i64));
        let inside = |v: &Vertex| {
            let r = v.to_ratio().unwrap();
            r > ga && r < gb
        };
        let qmax = BigInt::from(100 * n);
        let nonempty = vertices_in(&m, &ga, &gb, &qmax).iter().filter(|v| inside(v)).count();
        if nonempty == 0 {
            return Ok(rep.fail(json!({"N": n, "witness": [a, b], "reason": "no vertices in the gap"})));
        }
        let gates = gates_in(&m, &lo, &hi);
        let mut seen: HashSet<Vertex> = gates.iter().cloned().collect();
        let mut queue: VecDeque<Vertex> = gates.into();
        while let Some(v) = queue.pop_front() {
            rep.checked += 1;
            if inside(&v) {
                return Ok(rep.fail(json!({"N": n, "witness": [a, b], "reached": v.to_string()})));
            }
            for w in neighbors_bounded(&v, &m, &qmax)? {
                if w.is_finite() {
                    let r = w.to_ratio().unwrap();
                    if r >= lo && r <= hi && seen.insert(w.clone()) {
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// For the first `terms` convergents of `x`: the exact error identity, the reconstruction
/// from the fin, fin bounds and signs, strictly shrinking errors and growing denominators,
/// and agreement of the last fin with the expander's residual.
pub fn convergence(m: &Modulus, x: &Real, terms: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("convergence", json!({"N": m.n(), "x": x.to_string(), "terms": terms}));
    let exp = expand_real(x, m, terms)?;
    let cf = &exp.cf;
    let seq = convergents(cf)?;
    let k = cf.len() as isize;
    let mut prev_err: Option<Real> = None;
    for n in 0..=k {
        rep.checked += 1;
        let at = |what: &str| json!({"cf": cf.to_string(), "n": n, "property": what});
        let y = fin_from_value(&seq, n, x)?;
        if tail_reconstruct(&seq, n, &y)? != *x {
            return Ok(rep.fail(at("reconstruction")));
        }
        if y.abs().cmp_rational(&BigRational::one()).is_gt() {
            return Ok(rep.fail(at("fin bound")));
        }
        if n < k && y.signum() != cf.terms()[n as usize].eps {
            return Ok(rep.fail(at("fin sign")));
        }
        let err = error_term(&seq, n, &y)?;
        if err != direct_error(&seq, n, x) {
            return Ok(rep.fail(at("error identity")));
        }
        if n > 0 && seq.q(n) <= seq.q(n - 1) {
            return Ok(rep.fail(at("increasing denominators")));
        }
        if let Some(p) = &prev_err {
            if !err.try_cmp(p)?.is_lt() {
                return Ok(rep.fail(at("decreasing error")));
            }
        }
        prev_err = Some(err);
        if n == k && y != exp.residual {
            return Ok(rep.fail(at("residual")));
        }
    }
    Ok(rep)
}

/// Uniformly random vertices `p/(N k)` of `[0, 1)` with `k <= qmax / N`.
pub fn random_vertices(m: &Modulus, qmax: u64, count: usize, seed: u64) -> Vec<Vertex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = m.n();
    let kmax = (qmax / n).max(1);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let den = n * rng.gen_range(1..=kmax);
        let p = rng.gen_range(0..den);
        if p.gcd(&den) == 1 {
            out.push(Vertex::new(p, den).unwrap());
        }
    }
    out
}

/// `expand_rational` evaluates back to `x` and is one of the enumerated expansions.
pub fn soundness(m: &Modulus, qmax: u64, count: usize, seed: u64) -> Result<CheckReport> {
    let mut rep = CheckReport::new("soundness", json!({"N": m.n(), "qmax": qmax, "samples": count, "seed": seed}));
    let mut en = Enumerator::new(m)?;
    for x in random_vertices(m, qmax, count, seed) {
        rep.checked += 1;
        let cf = expand_rational(&x, m)?;
        if evaluate(&cf)? != x {
            return Ok(rep.fail(json!({"x": x.to_string(), "cf": cf.to_string(), "property": "evaluate"})));
        }
        if !en.expansions(&x)?.contains(&cf) {
            return Ok(rep.fail(json!({"x": x.to_string(), "cf": cf.to_string(), "property": "membership"})));
        }
    }
    Ok(rep)
}

/// Increasing paths from `p` to `r`, listed as their interior vertices.
fn increasing_paths(p: &Vertex, r: &Vertex, m: &Modulus) -> Result<Vec<Vec<Vertex>>> {
    if r.den() <= p.den() || r.den() == &m.big() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for s in neighbors_below(r, m)? {
        if &s == p {
            out.push(Vec::new());
        } else {
            for mut inner in increasing_paths(p, &s, m)? {
                inner.push(s.clone());
                out.push(inner);
            }
        }
    }
    Ok(out)
}

/// For adjacent `P, Q` with `den(P) < den(Q) <= qmax` and `Q` in `[0, 1]`: each
/// increasing path from `P` to `Q` has at most two edges, and a two-edge path passes
/// through `Q ⊖ P`.
pub fn short_paths(m: &Modulus, qmax: &BigInt) -> Result<CheckReport> {
    m.require_prime_power()?;
    let mut rep = CheckReport::new("short-paths", json!({"N": m.n(), "qmax": qmax.to_string()}));
    for q in vertices_in(m, &BigRational::zero(), &BigRational::one(), qmax) {
        if q.den() == &m.big() {
            continue;
        }
        for p in neighbors_below(&q, m)? {
            for inner in increasing_paths(&p, &q, m)? {
                rep.checked += 1;
                let ok = match inner.as_slice() {
                    [] => true,
                    [mid] => farey_diff(&q, &p).reduced().ok().as_ref() == Some(mid),
                    _ => false,
                };
                if !ok {
                    let via: Vec<String> = inner.iter().map(|v| v.to_string()).collect();
                    return Ok(rep.fail(json!({"P": p.to_string(), "Q": q.to_string(), "via": via})));
                }
            }
        }
    }
    Ok(rep)
}

/// Options shared by the named suites.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub n: u64,
    pub qmax: Option<u64>,
    pub samples: usize,
    pub seed: u64,
    pub terms: usize,
}

/// Runs a suite by name with defaults scaled from `N`.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let m = Modulus::new(opts.n)?;
    let n = opts.n;
    let qmax = |default: u64| BigInt::from(opts.qmax.unwrap_or(default));
    Ok(match name {
        "no-crossing" => vec![no_crossing(&m, &ratio(-1, 1), &ratio(2, 1), &qmax(40 * n))?],
        "tree" => {
            let (p, l) = m.require_prime_power()?;
            if p != 2 {
                return Err(Error::Precondition(format!("tree needs N = 2^l, got {n}")));
            }
            vec![tree(l, &qmax(64 * n))?]
        }
        "oracle" => vec![oracle(&m, &qmax(20 * n))?],
        "connectivity" => {
            let composite = [6, 10, 12, 15];
            vec![connectivity(opts.qmax.unwrap_or(10_000), &composite)?]
        }
        "convergence" => {
            let sqrt2 = Real::surd(BigRational::zero(), BigRational::one(), 2.into())?;
            let golden = Real::surd(ratio(1, 2), ratio(1, 2), 5.into())?;
            vec![convergence(&m, &sqrt2, opts.terms)?, convergence(&m, &golden, opts.terms)?]
        }
        "soundness" => vec![soundness(&m, opts.qmax.unwrap_or(40 * n), opts.samples, opts.seed)?],
        "short-paths" => vec![short_paths(&m, &qmax(150))?],
        other => return Err(Error::Malformed(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    })
}
