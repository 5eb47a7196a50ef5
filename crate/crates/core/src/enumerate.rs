//! All finite expansions of a vertex of `F_{p^l}`, by backward recursion over the at most
//! two smaller neighbours, with a forward search as an independent oracle.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::cf::CfExpansion;
use crate::error::{Error, Result};
use crate::graph::{adjacent, gates_in, neighbors_below, neighbors_bounded, Modulus, Vertex};
use crate::path::{cf_to_path, is_well_directed, path_to_cf, Path};

/// A path stored back to front, sharing tails between branches.
#[derive(Debug)]
struct Node {
    vertex: Vertex,
    prev: Option<Rc<Node>>,
}

impl Node {
    fn vertex_at(&self, back: usize) -> Option<&Vertex> {
        let mut cur = self;
        for _ in 0..back {
            cur = cur.prev.as_deref()?;
        }
        Some(&cur.vertex)
    }

    fn to_path(&self, m: &Modulus) -> Path {
        let mut rev = vec![self.vertex.clone()];
        let mut cur = self.prev.as_deref();
        while let Some(n) = cur {
            rev.push(n.vertex.clone());
            cur = n.prev.as_deref();
        }
        rev.reverse();
        Path::from_finite(m.clone(), rev)
    }
}

/// Reusable enumeration for one modulus; well directed paths to each visited vertex are
/// memoized.
pub struct Enumerator {
    modulus: Modulus,
    memo: HashMap<Vertex, Rc<Vec<Rc<Node>>>>,
}

impl Enumerator {
    pub fn new(m: &Modulus) -> Result<Self> {
        m.require_prime_power()?;
        Ok(Enumerator { modulus: m.clone(), memo: HashMap::new() })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Appending `x` to a well directed path ending `... P_{n-2} -> P_{n-1} -> P_n` keeps it
    /// well directed unless `P_{n-2} ~ P_n` and `x` falls outside `(P_{n-1}, P_n)`.
    fn extends(&self, node: &Node, x: &Vertex) -> bool {
        let (Some(pn1), Some(pn2)) = (node.vertex_at(1), node.vertex_at(2)) else {
            return true;
        };
        !adjacent(pn2, &node.vertex, &self.modulus) || x.strictly_between(pn1, &node.vertex)
    }

    fn nodes(&mut self, x: &Vertex) -> Result<Rc<Vec<Rc<Node>>>> {
        if let Some(hit) = self.memo.get(x) {
            return Ok(hit.clone());
        }
        let mut out = Vec::new();
        if x.den() == &self.modulus.big() {
            out.push(Rc::new(Node { vertex: x.clone(), prev: None }));
        } else {
            for below in neighbors_below(x, &self.modulus)? {
                for node in self.nodes(&below)?.iter() {
                    if self.extends(node, x) {
                        out.push(Rc::new(Node { vertex: x.clone(), prev: Some(node.clone()) }));
                    }
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert(x.clone(), out.clone());
        Ok(out)
    }

    /// Every well directed path from infinity to `x`.
    pub fn paths(&mut self, x: &Vertex) -> Result<Vec<Path>> {
        self.modulus.require_vertex(x)?;
        if x.is_infinite() {
            return Err(Error::Precondition("the endpoint must be finite".into()));
        }
        Ok(self.nodes(x)?.iter().map(|n| n.to_path(&self.modulus)).collect())
    }

    pub fn count(&mut self, x: &Vertex) -> Result<usize> {
        self.modulus.require_vertex(x)?;
        Ok(self.nodes(x)?.len())
    }

    pub fn expansions(&mut self, x: &Vertex) -> Result<ExpansionSet> {
        let mut expansions = self.paths(x)?.iter().map(path_to_cf).collect::<Result<Vec<_>>>()?;
        expansions.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        expansions.dedup();
        Ok(ExpansionSet { target: x.clone(), modulus: self.modulus.clone(), expansions })
    }
}

/// The expansions of one vertex in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionSet {
    pub target: Vertex,
    pub modulus: Modulus,
    pub expansions: Vec<CfExpansion>,
}

impl ExpansionSet {
    pub fn len(&self) -> usize {
        self.expansions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.expansions.is_empty()
    }

    pub fn contains(&self, cf: &CfExpansion) -> bool {
        self.expansions.contains(cf)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "x": self.target.to_string(),
            "N": self.modulus.n(),
            "count": self.expansions.len(),
            "expansions": self.expansions.iter().map(CfExpansion::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn enumerate_expansions(x: &Vertex, m: &Modulus) -> Result<ExpansionSet> {
    Enumerator::new(m)?.expansions(x)
}

/// Forward depth-first search from the gates near `x` over increasing denominators up to
/// `den(x)`, keeping the well directed results.
///
/// A vertex `w` whose continuation can reach `x` satisfies `|x - w| <= 1/den(w)`: after
/// scaling by `N` every later vertex lies between the two Farey parents of `w`.
pub fn brute_force_paths(x: &Vertex, m: &Modulus, max_den: &BigInt) -> Result<Vec<Path>> {
    m.require_prime_power()?;
    m.require_vertex(x)?;
    let xr = x.to_ratio().ok_or_else(|| Error::Precondition("the endpoint must be finite".into()))?;
    if x.den() > max_den {
        return Err(Error::BoundExceeded(format!("denominator of {x} exceeds {max_den}")));
    }
    let reach = |w: &Vertex| {
        let d = BigRational::new(1.into(), w.den().clone());
        let diff = &xr - w.to_ratio().unwrap();
        diff <= d.clone() && -diff <= d
    };
    let n = BigRational::new(1.into(), m.big());
    let mut found = Vec::new();
    for gate in gates_in(m, &(&xr - &n), &(&xr + &n)) {
        let mut stack = vec![vec![gate]];
        while let Some(chain) = stack.pop() {
            let w = chain.last().unwrap();
            if w == x {
                found.push(Path::from_finite(m.clone(), chain));
                continue;
            }
            if w.den() >= x.den() {
                continue;
            }
            for v in neighbors_bounded(w, m, x.den())? {
                if v.is_finite() && v.den() > w.den() && reach(&v) {
                    let mut next = chain.clone();
                    next.push(v);
                    stack.push(next);
                }
            }
        }
    }
    found.retain(is_well_directed);
    Ok(found)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheckEntry {
    pub x: Vertex,
    pub enumerated: usize,
    pub brute_force: usize,
    pub matched: bool,
}

/// Compares enumeration with the forward search on each sample: equal counts, and the
/// expansions map onto the searched paths under `cf_to_path`.
pub fn count_cross_check(samples: &[Vertex], m: &Modulus, max_den: &BigInt) -> Result<Vec<CrossCheckEntry>> {
    let mut en = Enumerator::new(m)?;
    let mut out = Vec::new();
    for x in samples {
        let set = en.expansions(x)?;
        let brute = brute_force_paths(x, m, max_den)?;
        let from_cf: BTreeSet<String> =
            set.expansions.iter().map(|cf| cf_to_path(cf).map(|p| p.to_string())).collect::<Result<_>>()?;
        let searched: BTreeSet<String> = brute.iter().map(Path::to_string).collect();
        let matched = set.len() == brute.len() && from_cf == searched;
        out.push(CrossCheckEntry { x: x.clone(), enumerated: set.len(), brute_force: brute.len(), matched });
    }
    Ok(out)
}
