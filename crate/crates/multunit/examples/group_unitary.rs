//! Builds the unitary of a finite group, canonicalizes it and runs the invariant suite.
//!
//! Usage: `cargo run --example group_unitary [GROUP]` with GROUP one of the
//! names in `GroupTable::small_groups` (default `S3`).

use multunit::groups::{build_group_unitary, GroupTable};
use multunit::tensorlin::DEFAULT_TOL;

fn main() -> multunit::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "S3".into());
    let (_, g) = GroupTable::small_groups()
        .into_iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| multunit::MuError::InvalidArgument(format!("unknown group {name}")))?;
    let m = build_group_unitary(&g, DEFAULT_TOL)?;

    println!("{name}: n = {}, abelian = {}", m.n(), g.is_abelian());
    println!("fixed vector e     = {:?}", m.e().iter().map(|z| z.re).collect::<Vec<_>>());
    println!("cofixed vector ê   = {:?}", m.e_hat().iter().map(|z| z.re).collect::<Vec<_>>());
    println!("dim S = {}, dim Ŝ = {}", m.s().dim(), m.s_hat().dim());

    let checks = m.verify_suite()?;
    let worst = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    for c in checks.iter().filter(|c| !c.pass) {
        println!("FAIL {} ({:.3e})", c.name, c.residual);
    }
    println!("{} identities checked, worst residual {worst:.2e}", checks.len());
    Ok(())
}
