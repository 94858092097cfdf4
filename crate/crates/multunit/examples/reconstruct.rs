//! Rebuilds a unitary from its leg algebras and canonical vectors, then does
//! the same for its dual and for a tensor product.

use multunit::groups::{build_group_unitary, group_unitary_matrix, GroupTable};
use multunit::mu_core::{from_quadruple, tensor_product, MultiplicativeUnitary};
use multunit::tensorlin::DEFAULT_TOL;

fn report(label: &str, m: &MultiplicativeUnitary) -> multunit::Result<()> {
    let w = from_quadruple(m.s(), m.s_hat(), m.e(), m.e_hat(), DEFAULT_TOL)?;
    println!("{label:<10} n = {:>2}  |from_quadruple - V| = {:.2e}", m.n(), w.v().dist(m.v()));
    Ok(())
}

fn main() -> multunit::Result<()> {
    let q8 = build_group_unitary(&GroupTable::quaternion(), DEFAULT_TOL)?;
    report("Q8", &q8)?;

    let dual = MultiplicativeUnitary::canonicalize(q8.v_hat().clone(), DEFAULT_TOL)?;
    report("dual Q8", &dual)?;
    // The dual of a non-abelian group has a non-commutative first leg.
    let b = dual.s().basis();
    let commutative = b.iter().all(|x| b.iter().all(|y| x.commutator(y).frobenius_norm() < 1e-9));
    println!("dual Q8 first leg commutative: {commutative}");

    let v = tensor_product(&group_unitary_matrix(&GroupTable::cyclic(2)), &group_unitary_matrix(&GroupTable::symmetric(3)))?;
    report("Z2 ⊗ S3", &MultiplicativeUnitary::canonicalize(v, DEFAULT_TOL)?)?;
    Ok(())
}
