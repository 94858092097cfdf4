//! Classifies the pre-subgroups of S3 and of its dual, and restricts to a subquotient.

use multunit::classify::{classify_lattice, subquotient_decompose, subquotient_test};
use multunit::groups::{build_group_unitary, GroupTable};
use multunit::mu_core::MultiplicativeUnitary;
use multunit::presub::enumerate;
use multunit::tensorlin::DEFAULT_TOL;

fn summary(label: &str, m: &MultiplicativeUnitary) -> multunit::Result<()> {
    let lat = enumerate(m)?;
    let report = classify_lattice(m, &lat)?;
    let c = &report.counts;
    println!("{label}: {} pre-subgroups, {} subgroups, {} co-subgroups, {} normal", c.presubgroups, c.subgroups, c.cosubgroups, c.normal);
    for node in &report.nodes {
        println!(
            "  f{}: subgroup {:<5} co-subgroup {:<5} normalizer f{} conormalizer f{}",
            node.index, node.subgroup, node.cosubgroup, node.normalizer, node.conormalizer
        );
    }
    Ok(())
}

fn main() -> multunit::Result<()> {
    let m = build_group_unitary(&GroupTable::symmetric(3), DEFAULT_TOL)?;
    summary("S3", &m)?;
    summary("dual S3", &MultiplicativeUnitary::canonicalize(m.v_hat().clone(), DEFAULT_TOL)?)?;

    // A3 ≺ S3 is normal, so H^e ∩ H_{A3} carries a unitary of its own: the one of S3/A3.
    let lat = enumerate(&m)?;
    let (a3, top) = (&lat.nodes()[4], &lat.nodes()[lat.top()]);
    let r = subquotient_test(&m, a3, top)?;
    println!("H^e ∩ H_A3 is a subquotient: {}", r.verdict);
    let w = subquotient_decompose(&m, &top.l().matmul(a3.rho()))?;
    let suite = w.restricted.verify_suite()?;
    println!("restricted unitary: n = {}, suite passes = {}", w.restricted.n(), suite.iter().all(|c| c.pass));
    Ok(())
}
