//! Enumerates the pre-subgroups of the D4 unitary, certifies completeness
//! against the subgroup lattice and prints the Hasse diagram in DOT.

use multunit::groups::{build_group_unitary, GroupTable};
use multunit::presub::{enumerate, pair_report};
use multunit::tensorlin::DEFAULT_TOL;

fn main() -> multunit::Result<()> {
    let g = GroupTable::dihedral(4);
    let m = build_group_unitary(&g, DEFAULT_TOL)?;
    let mut lat = enumerate(&m)?;
    let complete = lat.confirm_with_group(&g);
    println!("{} pre-subgroups, complete = {complete}", lat.len());

    for (i, f) in lat.nodes().iter().enumerate() {
        println!("f{i}: dim H^f = {}, dim H_f = {}", f.dim_up(), f.dim_down());
    }
    let failed: Vec<_> = lat.verify().into_iter().filter(|c| !c.pass).collect();
    println!("lattice checks failed: {}", failed.len());

    // Index of a pair of order-two subgroups.
    let nodes = lat.nodes();
    let r = pair_report(&m, &nodes[1], &nodes[2])?;
    println!("⟨f1,f2⟩^-2 = {}", r.index);

    println!("\n{}", lat.to_dot());
    Ok(())
}
