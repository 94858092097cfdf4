mod common;

use common::*;
use multunit::groups::{group_unitary_matrix, GroupTable};
use multunit::mu_core::*;
use multunit::tensorlin::{ComplexMatrix, C64};
use multunit::MuError;

fn multiplication_op(phi: &[C64]) -> ComplexMatrix {
    ComplexMatrix::diagonal(phi)
}

#[test]
fn group_unitary_matches_table_oracle() {
    for (name, g) in groups() {
        assert_eq!(group_unitary_matrix(&g), group_v(&g), "{name}");
    }
}

#[test]
fn suite_passes_on_groups_opposites_and_duals() {
    for (name, g) in groups() {
        let m = unitary(&name);
        let dual = MultiplicativeUnitary::canonicalize(m.v_hat().clone(), TOL).unwrap();
        let tilde = MultiplicativeUnitary::canonicalize(m.v_tilde().clone(), TOL).unwrap();
        let opp = m.opposite().unwrap();
        for (label, x) in [("V", &m), ("V̂", &dual), ("Ṽ", &tilde), ("op", &opp)] {
            for c in x.verify_suite().unwrap() {
                assert!(c.pass, "{name} {label}: {} residual {:.3e}", c.name, c.residual);
            }
        }
        assert_eq!(m.n(), g.order());
    }
}

#[test]
fn group_fixed_vectors_are_constant_and_delta() {
    for (name, g) in groups() {
        let n = g.order();
        let m = unitary(&name);
        assert!(vec_close(m.e(), &indicator(n, &(0..n).collect::<Vec<_>>()), 1e-12), "{name}");
        assert!(vec_close(m.e_hat(), &delta(n, 0), 1e-12), "{name}");
    }
}

#[test]
fn coproduct_is_function_of_product() {
    for name in ["S3", "D4", "Z4xZ2"] {
        let g = group(name);
        let n = g.order();
        let m = unitary(name);
        let phi: Vec<C64> = (0..n).map(|i| C64::new(i as f64 + 1.0, (i * i) as f64 * 0.1)).collect();
        let x = multiplication_op(&phi);
        let want: Vec<C64> = (0..n * n).map(|k| phi[g.table()[k / n][k % n]]).collect();
        assert!(m.coproduct(&x).unwrap().dist(&ComplexMatrix::diagonal(&want)) < 1e-10, "{name}");

        let inv: Vec<C64> = (0..n).map(|s| phi[(0..n).find(|&t| g.table()[s][t] == 0).unwrap()]).collect();
        assert!(m.antipode(&x).unwrap().dist(&multiplication_op(&inv)) < 1e-10, "{name}");
        assert!((m.counit(&x).unwrap() - phi[0]).norm() < 1e-10, "{name}");
    }
}

#[test]
fn group_leg_algebra_is_diagonal() {
    let m = unitary("S3");
    for b in m.s().basis() {
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert!(b[(i, j)].norm() < 1e-12);
                }
            }
        }
    }
    let b = m.s_hat().basis();
    let noncommuting = b.iter().any(|x| b.iter().any(|y| x.commutator(y).frobenius_norm() > 1e-6));
    assert!(noncommuting);
}

#[test]
fn identity_has_multiplicity_two() {
    let v = ComplexMatrix::identity(4);
    assert_eq!(multiplicity(&v).unwrap(), 2);
    match MultiplicativeUnitary::canonicalize(v, TOL) {
        Err(MuError::Multiplicity(2)) => {}
        other => panic!("expected multiplicity error, got {other:?}"),
    }
}

#[test]
fn non_pentagonal_unitary_is_rejected() {
    // A diagonal unitary with generic phases is unitary but not pentagonal.
    let phases: Vec<C64> = (0..9).map(|k| C64::from_polar(1.0, 0.37 * (k * k) as f64 + 0.11)).collect();
    let v = ComplexMatrix::diagonal(&phases);
    assert!(pentagon_residual(&v).unwrap() > 1e-3);
    assert!(matches!(MultiplicativeUnitary::canonicalize(v, TOL), Err(MuError::Invariant { .. })));
    let not_unitary = ComplexMatrix::identity(9).scale_re(2.0);
    assert!(matches!(MultiplicativeUnitary::canonicalize(not_unitary, TOL), Err(MuError::NotUnitary { .. })));
}

#[test]
fn quadruple_reconstructs_every_instance() {
    for (name, _) in groups() {
        let m = unitary(&name);
        let w = from_quadruple(m.s(), m.s_hat(), m.e(), m.e_hat(), TOL).unwrap();
        assert!(w.v().dist(m.v()) < TOL, "{name}");
    }
}

#[test]
fn quadruple_rejects_misplaced_vectors() {
    let m = unitary("S3");
    assert!(matches!(from_quadruple(m.s(), m.s_hat(), m.e(), m.e(), TOL), Err(MuError::Hypothesis(_))));
}

#[test]
fn tensor_of_cyclic_groups_is_cyclic_product() {
    let (z2, z3) = (GroupTable::cyclic(2), GroupTable::cyclic(3));
    let v = tensor_product(&group_unitary_matrix(&z2), &group_unitary_matrix(&z3)).unwrap();
    assert_eq!(v, group_unitary_matrix(&GroupTable::direct_product(&z2, &z3)));
    let m = MultiplicativeUnitary::canonicalize(v, TOL).unwrap();
    assert!(m.verify_suite().unwrap().iter().all(|c| c.pass));
}

#[test]
fn multiplicity_lift_keeps_pentagon() {
    let v = group_unitary_matrix(&GroupTable::cyclic(2));
    let lifted = lift_with_multiplicity(&v, 2).unwrap();
    assert!(pentagon_residual(&lifted).unwrap() < 1e-12);
    assert_eq!(multiplicity(&lifted).unwrap(), 2);
}

#[test]
fn opposite_swaps_legs() {
    let m = unitary("S3");
    let opp = m.opposite().unwrap();
    assert!(opp.s().same_span(m.s_hat(), TOL));
    assert!(opp.s_hat().same_span(m.s(), TOL));
    assert!(opp.verify_suite().unwrap().iter().all(|c| c.pass));
}

#[test]
fn unitary_file_roundtrip() {
    let m = unitary("Q8");
    let text = serde_json::to_string(&m.to_file()).unwrap();
    let back = MultiplicativeUnitary::from_file(serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.v(), m.v());
    let mut bad = m.to_file();
    bad.n = 7;
    assert!(matches!(MultiplicativeUnitary::from_file(bad), Err(MuError::Dimension(_))));
}

#[test]
fn fourier_cone_on_central_and_noncentral_elements() {
    let m = unitary("S3");
    // Class functions have cocommutative coproduct; a single point mass off the centre does not.
    let class: Vec<C64> = (0..6).map(|i| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)).collect();
    let r = m.fourier_cone_tests(&multiplication_op(&class)).unwrap();
    assert!(r.central && r.coproduct_symmetric && r.positive);
    let g = group("S3");
    let a = (1..6).find(|&s| (0..6).any(|t| g.table()[s][t] != g.table()[t][s])).unwrap();
    let r = m.fourier_cone_tests(&multiplication_op(&delta(6, a))).unwrap();
    assert!(!r.central && !r.coproduct_symmetric);
}
