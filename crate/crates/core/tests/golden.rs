use std::collections::BTreeSet;

use farey_core::cf::{convergents, evaluate};
use farey_core::path::{cf_to_path, is_well_directed, make_well_directed, path_to_cf};
use farey_core::{enumerate_expansions, expand_rational, CfExpansion, Modulus, Path, Vertex};

fn md(n: u64) -> Modulus {
    Modulus::new(n).unwrap()
}

fn er(s: &str) -> Vertex {
    s.parse().unwrap()
}

const EXPANSIONS_11_40: [&str; 8] = [
    "1/0+ 5/1+ 1/2+ 1/1+ 1/1+ 1/1",
    "1/0+ 5/1+ 1/2+ 1/2+ -1/2",
    "1/0+ 5/1+ 1/2+ 1/1+ 1/2",
    "1/0+ 5/1+ 1/3+ -1/2+ 1/1",
    "1/0+ 5/1+ 1/3+ -1/3",
    "1/0+ 5/2+ -1/2+ -1/2+ 1/2",
    "1/0+ 5/2+ -1/2+ -1/3+ -1/2",
    "1/0+ 5/2+ -1/2+ -1/2+ 1/1+ 1/1",
];

#[test]
fn eight_expansions_of_11_40() {
    let set = enumerate_expansions(&er("11/40"), &md(5)).unwrap();
    let got: BTreeSet<String> = set.expansions.iter().map(|c| c.to_string()).collect();
    let want: BTreeSet<String> = EXPANSIONS_11_40.iter().map(|s| s.to_string()).collect();
    assert_eq!(got, want);
    for s in EXPANSIONS_11_40 {
        let cf: CfExpansion = s.parse().unwrap();
        assert_eq!(evaluate(&cf).unwrap(), er("11/40"), "{s}");
    }
    let det = expand_rational(&er("11/40"), &md(5)).unwrap();
    assert!(set.contains(&det));
}

#[test]
fn unique_expansion_of_7_20() {
    let set = enumerate_expansions(&er("7/20"), &md(5)).unwrap();
    assert_eq!(set.len(), 1);
    let path = cf_to_path(&set.expansions[0]).unwrap();
    assert_eq!(path.vertices()[1], er("2/5"));
}

#[test]
fn detour_path_is_repaired() {
    let m = md(3);
    let direct = Path::parse(m.clone(), "inf -> 1/3 -> 2/9 -> 5/21").unwrap();
    let detour = Path::parse(m.clone(), "inf -> 1/3 -> 1/6 -> 2/9 -> 5/21").unwrap();
    assert!(is_well_directed(&direct));
    assert!(!is_well_directed(&detour));
    assert_eq!(make_well_directed(&detour).unwrap(), direct);
    let cf = path_to_cf(&direct).unwrap();
    assert_eq!(cf_to_path(&cf).unwrap(), direct);
    assert_eq!(evaluate(&cf).unwrap(), er("5/21"));
}

#[test]
fn f25_path_to_2_75() {
    let cf: CfExpansion = "1/0+ 25/1+ -1/2+ 1/1".parse().unwrap();
    assert_eq!(evaluate(&cf).unwrap(), er("2/75"));
    let seq = convergents(&cf).unwrap();
    assert_eq!(seq.vertices(), vec![er("1/25"), er("1/50"), er("2/75")]);
    let path = Path::parse(md(25), "inf -> 1/25 -> 1/50 -> 2/75").unwrap();
    assert_eq!(path_to_cf(&path).unwrap(), cf);
}

#[test]
fn f25_path_to_8_125() {
    // The vertices fix the terms; (1, 2) as the last term would end at 7/125.
    let path = Path::parse(md(25), "inf -> 1/25 -> 3/50 -> 8/125").unwrap();
    assert!(is_well_directed(&path));
    let cf = path_to_cf(&path).unwrap();
    assert_eq!(cf.to_string(), "1/0+ 25/1+ 1/2+ -1/3");
    let stated: CfExpansion = "1/0+ 25/1+ 1/2+ 1/2".parse().unwrap();
    assert_eq!(evaluate(&stated).unwrap(), er("7/125"));
}

#[test]
fn f4_expansions_are_unique() {
    let m = md(4);
    for q in (4..=256u64).step_by(4) {
        for p in 0..q {
            let x = Vertex::new(p, q).unwrap();
            if x.den() == &num_bigint::BigInt::from(q) {
                assert_eq!(enumerate_expansions(&x, &m).unwrap().len(), 1, "{x}");
            }
        }
    }
}

#[test]
fn composite_modulus_is_rejected_with_witness() {
    let err = expand_rational(&er("1/6"), &md(6)).unwrap_err();
    assert!(err.is_domain());
    let msg = err.to_string();
    assert!(msg.contains('3') && msg.contains('4'), "{msg}");
    assert!(matches!(err, farey_core::Error::NotPrimePower { n: 6, witness: Some((3, 4)) }));
}
