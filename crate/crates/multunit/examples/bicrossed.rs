//! Builds the bicrossed product of S3 from the matched pair (A3, ⟨(12)⟩) and
//! checks that doubling it gives back the dual unitary.

use multunit::bicross::{bicrossed_report, double_construction};
use multunit::groups::{build_group_unitary, GroupTable};
use multunit::presub::enumerate;
use multunit::tensorlin::DEFAULT_TOL;

fn main() -> multunit::Result<()> {
    let m = build_group_unitary(&GroupTable::symmetric(3), DEFAULT_TOL)?;
    let lat = enumerate(&m)?;
    // Nodes are sorted by dim H^f: 1, 2, 2, 2, 3, 6.
    let (f, g) = (&lat.nodes()[4], &lat.nodes()[1]);

    let (res, report) = bicrossed_report(&m, f, g)?;
    let worst = report.verification.residuals.values().fold(0.0f64, |a, &b| a.max(b));
    println!("W: n = {}, dim S_W = {}, dim Ŝ_W = {}", res.w.n(), report.dim_a, report.dim_b);
    println!("structural identities: worst residual {worst:.2e}");
    println!("S_W commutative: {}, Ŝ_W commutative: {}", report.verification.s_commutative, report.verification.s_hat_commutative);
    if let Some(x) = &report.explicit {
        println!("explicit formula agrees to {:.2e}", x.residual);
    }
    for (k, (a, b)) in &report.verification.transfer {
        println!("{k}: {a} / {b}");
    }

    let (doubled, d) = double_construction(&m, &res)?;
    println!("double construction: {:?}, |result - V̂| = {:.2e}", d.verdict, doubled.v().dist(m.v_hat()));
    println!("overall: {}", if report.passes(1e-9) { "pass" } else { "fail" });
    Ok(())
}
