//! Computes the four coideals of each pre-subgroup of S3 and checks the bijection.

use multunit::coideal::{coideal_bases, coideal_report, coideal_to_presub, product_algebra};
use multunit::groups::{build_group_unitary, GroupTable};
use multunit::presub::enumerate;
use multunit::tensorlin::DEFAULT_TOL;

fn main() -> multunit::Result<()> {
    let m = build_group_unitary(&GroupTable::symmetric(3), DEFAULT_TOL)?;
    let lat = enumerate(&m)?;
    for (i, f) in lat.nodes().iter().enumerate() {
        let c = coideal_bases(&m, f)?;
        let back = coideal_to_presub(&m, &c.d.base, c.d.parent, c.d.side)?;
        println!(
            "f{i}: dim D = {}, dim G = {}, dim D̂ = {}, dim Ĝ = {}, D recovers f: {}",
            c.d.base.dim(),
            c.g.base.dim(),
            c.d_hat.base.dim(),
            c.g_hat.base.dim(),
            back.distance(f) < 1e-8
        );
    }

    let (b, a) = product_algebra(&m, &lat.nodes()[4], &lat.nodes()[1])?;
    println!("product algebras for (f4, f1): dim B = {}, dim A = {}", b.dim(), a.dim());

    let report = coideal_report(&m, &lat)?;
    for c in &report.checks {
        println!("{} {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
    }
    Ok(())
}
