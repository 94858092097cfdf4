mod common;

use common::*;
use multunit::groups::*;
use multunit::MuError;

#[test]
fn subgroup_enumeration_matches_brute_force() {
    for (name, g) in groups() {
        let lib: Vec<Vec<usize>> = g.enumerate_subgroups().unwrap().iter().map(|s| s.elements().to_vec()).collect();
        assert_eq!(lib, subgroups(&g), "{name}");
    }
}

#[test]
fn normal_subgroups_match_conjugation_oracle() {
    for (name, g) in groups() {
        let all: Vec<usize> = (0..g.order()).collect();
        let want: Vec<Vec<usize>> = subgroups(&g).into_iter().filter(|s| is_normal(&g, s, &all)).collect();
        let lib: Vec<Vec<usize>> = g.normal_subgroups().unwrap().iter().map(|s| s.elements().to_vec()).collect();
        assert_eq!(lib, want, "{name}");
    }
}

#[test]
fn known_subgroup_counts() {
    for (name, subs, normal) in [("Z4", 3, 3), ("Z6", 4, 4), ("S3", 6, 3), ("Q8", 6, 6), ("D4", 10, 6), ("Z2xZ2xZ2", 16, 16)] {
        let g = group(name);
        assert_eq!(g.enumerate_subgroups().unwrap().len(), subs, "{name}");
        assert_eq!(g.normal_subgroups().unwrap().len(), normal, "{name}");
    }
}

#[test]
fn small_group_catalogue_is_complete_up_to_order_eight() {
    let orders: Vec<usize> = groups().iter().map(|(_, g)| g.order()).collect();
    assert_eq!(orders, vec![1, 2, 3, 4, 4, 5, 6, 6, 7, 8, 8, 8, 8, 8]);
    let abelian = groups().iter().filter(|(_, g)| g.is_abelian()).count();
    assert_eq!(abelian, 11);
}

#[test]
fn matched_pairs_factor_the_group() {
    let g = group("S3");
    let pairs = g.matched_pairs().unwrap();
    // Each of the three transposition subgroups pairs with A3, in both orders, plus the trivial factorizations.
    assert_eq!(pairs.len(), 8);
    for (a, b) in &pairs {
        assert_eq!(a.order() * b.order(), 6);
        assert_eq!(intersect(a.elements(), b.elements()), vec![0]);
    }
}

#[test]
fn normalizer_and_generation() {
    let g = group("S3");
    let subs = g.enumerate_subgroups().unwrap();
    for s in &subs {
        let n = g.normalizer(s);
        let want: Vec<usize> = (0..6).filter(|&x| is_normal(&g, s.elements(), &generated(&g, s.elements(), &[x]))).collect();
        assert_eq!(n.elements(), want.as_slice());
    }
    for a in 0..6 {
        for b in 0..6 {
            assert_eq!(g.generate(&[a, b]).elements(), generated(&g, &[a], &[b]).as_slice());
        }
    }
}

#[test]
fn text_format_roundtrip() {
    for (name, g) in groups() {
        assert_eq!(GroupTable::parse(&g.to_text()).unwrap().table(), g.table(), "{name}");
    }
    let commented = "# Z/2\n2\n0 1 # first row\n1 0\n";
    assert_eq!(GroupTable::parse(commented).unwrap().order(), 2);
}

#[test]
fn parse_errors_name_the_problem() {
    assert!(matches!(GroupTable::parse(""), Err(MuError::Parse(_))));
    assert!(matches!(GroupTable::parse("2\n0 1\n1"), Err(MuError::Parse(_))));
    assert!(matches!(GroupTable::parse("2\n0 x\n1 0"), Err(MuError::Parse(_))));
    assert!(matches!(GroupTable::parse("2\n0 1\n1 2"), Err(MuError::GroupTable(_))));
    assert!(matches!(GroupTable::parse("2\n1 0\n0 1"), Err(MuError::GroupTable(_))));
    // A Latin square with identity 0 that is not associative.
    let latin = "5\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0\n";
    match GroupTable::parse(latin) {
        Err(MuError::GroupTable(msg)) => assert!(msg.contains("associative"), "{msg}"),
        other => panic!("expected associativity failure, got {other:?}"),
    }
}

#[test]
fn subgroup_vectors_are_normalized_indicators() {
    let g = group("D4");
    for s in g.enumerate_subgroups().unwrap() {
        assert!(vec_close(&subgroup_to_presub(&g, &s), &indicator(8, s.elements()), 1e-14));
    }
}

#[test]
fn subgroup_from_rejects_non_subgroups() {
    let g = group("S3");
    // Four does not divide six.
    assert!(g.subgroup_from(&[0, 1, 2, 3]).is_err());
    for s in subgroups(&g) {
        assert_eq!(g.subgroup_from(&s).unwrap().elements(), s.as_slice());
    }
    let t = g.trivial_subgroup();
    assert_eq!(t.elements(), &[0]);
    assert_eq!(g.whole().order(), 6);
}
