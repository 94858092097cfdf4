mod common;

use common::{generated, group, groups, indicator, is_normal as normal_in, subgroups, unitary, TOL};
use multunit::classify::*;
use multunit::mu_core::MultiplicativeUnitary;
use multunit::presub::{enumerate, is_presubgroup, PreSubgroupLattice};

fn dual(name: &str) -> MultiplicativeUnitary {
    MultiplicativeUnitary::canonicalize(unitary(name).v_hat().clone(), TOL).unwrap()
}

fn node_of(lat: &PreSubgroupLattice, n: usize, sub: &[usize]) -> usize {
    lat.index_of(&indicator(n, sub)).unwrap()
}

#[test]
fn s3_has_three_cosubgroups() {
    let g = group("S3");
    let m = unitary("S3");
    let report = classify_lattice(&m, &enumerate(&m).unwrap()).unwrap();
    let all: Vec<usize> = (0..6).collect();
    let normal_oracle = subgroups(&g).iter().filter(|s| normal_in(&g, s, &all)).count();
    assert_eq!(normal_oracle, 3);
    assert_eq!(report.counts.presubgroups, 6);
    assert_eq!(report.counts.subgroups, 6);
    assert_eq!(report.counts.cosubgroups, 3);
    assert_eq!(report.counts.normal, 3);
}

#[test]
fn group_case_flags_match_oracles() {
    for (name, g) in groups() {
        let m = unitary(&name);
        let lat = enumerate(&m).unwrap();
        let report = classify_lattice(&m, &lat).unwrap();
        let all: Vec<usize> = (0..g.order()).collect();
        for s in subgroups(&g) {
            let c = &report.nodes[node_of(&lat, g.order(), &s)];
            assert!(c.subgroup, "{name} {s:?}");
            assert_eq!(c.cosubgroup, normal_in(&g, &s, &all), "{name} {s:?}");
            assert_eq!(c.normal, c.cosubgroup);
            let normalizer: Vec<usize> = (0..g.order()).filter(|&x| normal_in(&g, &s, &generated(&g, &s, &[x]))).collect();
            assert_eq!(c.normalizer, node_of(&lat, g.order(), &normalizer), "{name} N({s:?})");
            assert_eq!(c.conormalizer, lat.bottom());
        }
        for ch in &report.checks {
            assert!(ch.pass, "{name}: {}", ch.name);
        }
    }
}

#[test]
fn subquotients_are_normal_pairs() {
    for name in ["S3", "D4"] {
        let g = group(name);
        let n = g.order();
        let m = unitary(name);
        let lat = enumerate(&m).unwrap();
        let report = classify_lattice(&m, &lat).unwrap();
        let subs = subgroups(&g);
        for small in &subs {
            for big in &subs {
                let (i, j) = (node_of(&lat, n, small), node_of(&lat, n, big));
                let included = small.iter().all(|x| big.contains(x));
                let want = included.then(|| normal_in(&g, small, big));
                assert_eq!(report.subquotient[i][j], want, "{name} {small:?} in {big:?}");
            }
        }
    }
}

#[test]
fn six_conditions_agree_on_every_instance() {
    let mut instances: Vec<(String, MultiplicativeUnitary)> = groups().into_iter().map(|(n, _)| (n.clone(), unitary(&n))).collect();
    for name in ["S3", "D4", "Q8"] {
        instances.push((format!("{name}^"), dual(name)));
    }
    for (name, m) in instances {
        let lat = enumerate(&m).unwrap();
        for i in 0..lat.len() {
            for j in 0..lat.len() {
                if lat.leq(i, j) {
                    let r = subquotient_test(&m, &lat.nodes()[i], &lat.nodes()[j]).unwrap();
                    assert!(r.conditions.iter().all(|&c| c == r.verdict), "{name}");
                }
            }
        }
        for f in lat.nodes() {
            let r = cosubgroup_report(&m, f).unwrap();
            let residuals = [r.central, r.left_invariant, r.square_invariant, r.flip_symmetric, r.u_invariant, r.coideals_equal];
            assert!(residuals.iter().all(|&x| (x <= 1e-8) == r.verdict), "{name}: {residuals:?}");
        }
    }
}

#[test]
fn opposite_swaps_subgroup_and_cosubgroup() {
    for name in ["S3", "D4", "Q8", "Z4xZ2"] {
        for (label, m) in [("V", unitary(name)), ("V^", dual(name))] {
            let opp = m.opposite().unwrap();
            for f in enumerate(&m).unwrap().nodes() {
                let g = is_presubgroup(&opp, f.vector()).unwrap();
                assert_eq!(is_subgroup(&opp, &g), is_cosubgroup(&m, f).unwrap(), "{name} {label}");
                assert_eq!(is_cosubgroup(&opp, &g).unwrap(), is_subgroup(&m, f), "{name} {label}");
            }
        }
    }
}

#[test]
fn dual_of_s3_swaps_counts() {
    let m = dual("S3");
    let report = classify_lattice(&m, &enumerate(&m).unwrap()).unwrap();
    assert_eq!(report.counts.presubgroups, 6);
    assert_eq!(report.counts.subgroups, 3);
    assert_eq!(report.counts.cosubgroups, 6);
    assert_eq!(report.counts.normal, 3);
}

#[test]
fn restricted_unitaries_pass_the_suite() {
    for name in ["S3", "D4", "Q8"] {
        for m in [unitary(name), dual(name)] {
            let lat = enumerate(&m).unwrap();
            for i in 0..lat.len() {
                for j in 0..lat.len() {
                    if !lat.leq(i, j) {
                        continue;
                    }
                    let (small, big) = (&lat.nodes()[i], &lat.nodes()[j]);
                    if !subquotient_test(&m, small, big).unwrap().verdict {
                        continue;
                    }
                    let p = big.l().matmul(small.rho());
                    let w = subquotient_decompose(&m, &p).unwrap();
                    assert_eq!(w.basis.len(), intersection_dim(small, big).unwrap());
                    assert_eq!(w.restricted.n() * small.dim_up(), big.dim_up(), "{name}");
                    assert!(w.f.distance(big) < 1e-8 && w.f_hat.distance(small) < 1e-8);
                    for c in restrict(&m, &w).unwrap().verify_suite().unwrap() {
                        assert!(c.pass, "{name} ({i},{j}): {} {:.3e}", c.name, c.residual);
                    }
                }
            }
        }
    }
}

#[test]
fn non_normal_pair_is_not_restrictable() {
    let g = group("S3");
    let m = unitary("S3");
    let t = (1..6).find(|&s| g.table()[s][s] == 0).unwrap();
    let small = is_presubgroup(&m, &indicator(6, &[0, t])).unwrap();
    let big = is_presubgroup(&m, m.e()).unwrap();
    assert!(!subquotient_test(&m, &small, &big).unwrap().verdict);
    assert!(subquotient_decompose(&m, &big.l().matmul(small.rho())).is_err());
    assert!(subquotient_test(&m, &big, &small).is_err());
}
