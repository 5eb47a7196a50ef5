use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use farey_core::cf::{convergents, evaluate, fins_are_bounded, validate_cf};
use farey_core::graph::{adjacent, edges_cross, neighbors_below, neighbors_bounded};
use farey_core::path::{cf_to_path, is_well_directed, path_to_cf};
use farey_core::{enumerate_expansions, expand_rational, expand_real, CfExpansion, Edge, Modulus, Real, Vertex};

const MODULI: [u64; 7] = [2, 3, 4, 5, 8, 9, 25];

/// A vertex `p/(N k)` of `F_N` in `[-2, 2)`.
fn vertex_of(n: u64, k: u64, p: i64) -> Option<Vertex> {
    let den = (n * k) as i64;
    let num = p.rem_euclid(4 * den) - 2 * den;
    let v = Vertex::new(num, den).ok()?;
    (v.den() == &BigInt::from(den)).then_some(v)
}

fn arb_vertex() -> impl Strategy<Value = (Modulus, Vertex)> {
    (prop::sample::select(&MODULI[..]), 1u64..30, any::<i64>())
        .prop_filter_map("not reduced", |(n, k, p)| Some((Modulus::new(n).unwrap(), vertex_of(n, k, p)?)))
}

fn arb_pair() -> impl Strategy<Value = (Modulus, Vertex, Vertex)> {
    (prop::sample::select(&MODULI[..]), 1u64..30, any::<i64>(), 1u64..30, any::<i64>()).prop_filter_map(
        "not two distinct vertices",
        |(n, k1, p1, k2, p2)| {
            let (x, y) = (vertex_of(n, k1, p1)?, vertex_of(n, k2, p2)?);
            (x != y).then(|| (Modulus::new(n).unwrap(), x, y))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn expansion_round_trips((m, x) in arb_vertex()) {
        let cf = expand_rational(&x, &m).unwrap();
        prop_assert!(validate_cf(&cf).is_ok());
        prop_assert_eq!(evaluate(&cf).unwrap(), x.clone());
        prop_assert!(fins_are_bounded(&cf).unwrap());
        let path = cf_to_path(&cf).unwrap();
        prop_assert!(is_well_directed(&path));
        prop_assert_eq!(path.last(), &x);
        prop_assert_eq!(path_to_cf(&path).unwrap(), cf.clone());
        let text: CfExpansion = cf.to_string().parse().unwrap();
        prop_assert_eq!(&text, &cf);
        prop_assert_eq!(CfExpansion::from_json(&cf.to_json()).unwrap(), cf);
    }

    #[test]
    fn enumerated_expansions_are_distinct_and_valid((m, x) in arb_vertex()) {
        let set = enumerate_expansions(&x, &m).unwrap();
        prop_assert!(!set.is_empty());
        for w in set.expansions.windows(2) {
            prop_assert!(w[0].sort_key() < w[1].sort_key());
        }
        for cf in &set.expansions {
            prop_assert_eq!(evaluate(cf).unwrap(), x.clone());
            prop_assert!(is_well_directed(&cf_to_path(cf).unwrap()));
        }
        if m.n() % 2 == 0 {
            prop_assert_eq!(set.len(), 1);
        }
    }

    #[test]
    fn neighbours_are_adjacent((m, x) in arb_vertex(), extra in 0u64..4) {
        let qmax = x.den() + BigInt::from(extra * m.n());
        let all = neighbors_bounded(&x, &m, &qmax).unwrap();
        for v in &all {
            prop_assert!(adjacent(&x, v, &m));
        }
        if x.den() != &m.big() {
            let below = neighbors_below(&x, &m).unwrap();
            prop_assert!(!below.is_empty() && below.len() <= 2);
            for v in &below {
                prop_assert!(v.den() < x.den());
                prop_assert!(all.contains(v));
            }
            let smaller = all.iter().filter(|v| v.is_finite() && v.den() < x.den()).count();
            prop_assert_eq!(smaller, below.len());
        }
    }

    #[test]
    fn neighbour_edges_do_not_cross((m, x, y) in arb_pair()) {
        let bound = x.den().max(y.den()).clone();
        for a in neighbors_bounded(&x, &m, &bound).unwrap() {
            for b in neighbors_bounded(&y, &m, &bound).unwrap() {
                let e1 = Edge::new(x.clone(), a.clone(), &m).unwrap();
                let e2 = Edge::new(y.clone(), b, &m).unwrap();
                prop_assert!(!edges_cross(&e1, &e2), "{:?} {:?}", e1, e2);
            }
        }
    }

    #[test]
    fn surd_floor_brackets(a in -50i64..50, b in 1i64..20, d in prop::sample::select(vec![2i64, 3, 5, 6, 7, 10])) {
        let x = Real::surd(BigRational::from_integer(a.into()), BigRational::new(b.into(), 3.into()), d.into()).unwrap();
        let f = x.floor();
        prop_assert!(x.cmp_rational(&BigRational::from_integer(f.clone())).is_gt());
        prop_assert!(x.cmp_rational(&BigRational::from_integer(f + 1)).is_lt());
    }

    #[test]
    fn real_expansion_converges(a in 0i64..5, b in 1i64..5, d in prop::sample::select(vec![2i64, 3, 5, 7]),
                                n in prop::sample::select(vec![3u64, 5, 9])) {
        let m = Modulus::new(n).unwrap();
        let x = Real::surd(BigRational::from_integer(a.into()), BigRational::new(b.into(), 2.into()), d.into()).unwrap();
        let r = expand_real(&x, &m, 12).unwrap();
        prop_assert_eq!(r.cf.len(), 12);
        prop_assert!(!r.exact);
        let seq = convergents(&r.cf).unwrap();
        for i in 0..12isize {
            prop_assert!(seq.q(i) < seq.q(i + 1));
        }
        prop_assert!(r.residual.abs().cmp_rational(&BigRational::from_integer(1.into())).is_le());
    }
}
