//! Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::*;
use multunit::bicross::{bicrossed_report, BicrossedReport, DoubleVerdict};
use multunit::classify::{classify_lattice, is_cosubgroup, is_subgroup, restrict, subquotient_decompose, subquotient_test};
use multunit::coideal::coideal_report;
use multunit::groups::{subgroup_to_presub, GroupTable};
use multunit::mu_core::{from_quadruple, pentagon_residual, MultiplicativeUnitary};
use multunit::presub::{enumerate, is_presubgroup, pair_report, PreSubgroup, PreSubgroupLattice};
use multunit::tensorlin::{inner, vec_dist};
use rayon::prelude::*;

struct Instance {
    name: String,
    group: Option<GroupTable>,
    m: MultiplicativeUnitary,
    lattice: PreSubgroupLattice,
}

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }

    fn from_result(r: Result<String, String>) -> Self {
        match r {
            Ok(d) => Verdict::new(true, d),
            Err(d) => Verdict::new(false, d),
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Every group unitary and its dual.
fn instances() -> Vec<Instance> {
    let mut specs: Vec<(String, Option<GroupTable>, MultiplicativeUnitary)> = Vec::new();
    for (name, g) in groups() {
        let m = unitary(&name);
        let dual = MultiplicativeUnitary::canonicalize(m.v_hat().clone(), TOL).unwrap();
        specs.push((name.clone(), Some(g), m));
        specs.push((format!("{name}^"), None, dual));
    }
    specs
        .into_par_iter()
        .map(|(name, group, m)| {
            let lattice = enumerate(&m).unwrap_or_else(|e| panic!("{name}: {e}"));
            Instance { name, group, m, lattice }
        })
        .collect()
}

fn group_instances(all: &[Instance]) -> impl Iterator<Item = (&Instance, &GroupTable)> {
    all.iter().filter_map(|i| i.group.as_ref().map(|g| (i, g)))
}

fn find<'a>(all: &'a [Instance], name: &str) -> &'a Instance {
    all.iter().find(|i| i.name == name).unwrap()
}

fn bicross_instances(all: &[Instance]) -> Vec<(String, MultiplicativeUnitary, BicrossedReport, MultiplicativeUnitary)> {
    let s3 = find(all, "S3");
    let g = s3.group.as_ref().unwrap();
    let a3: Vec<usize> = (0..6).filter(|&s| g.mul(g.mul(s, s), s) == 0).collect();
    let t = (1..6).find(|&s| g.mul(s, s) == 0).unwrap();
    let z6 = find(all, "Z6");
    let cases = [("S3 (A3, <(12)>)", &s3.m, a3, vec![0, t]), ("Z6 (Z3, Z2)", &z6.m, vec![0, 2, 4], vec![0, 3])];
    cases
        .into_par_iter()
        .map(|(label, m, a, b)| {
            let f = is_presubgroup(m, &indicator(m.n(), &a)).unwrap();
            let h = is_presubgroup(m, &indicator(m.n(), &b)).unwrap();
            let (res, report) = bicrossed_report(m, &f, &h).unwrap_or_else(|e| panic!("{label}: {e}"));
            (label.to_string(), m.clone(), report, res.w)
        })
        .collect()
}

fn c1_pentagon(all: &[Instance], bicrossed: &[(String, MultiplicativeUnitary, BicrossedReport, MultiplicativeUnitary)]) -> Verdict {
    let mut worst: f64 = 0.0;
    for i in all {
        worst = worst.max(pentagon_residual(i.m.v()).unwrap());
        worst = worst.max(pentagon_residual(i.m.v_hat()).unwrap());
    }
    for (_, _, _, w) in bicrossed {
        worst = worst.max(pentagon_residual(w.v()).unwrap());
    }
    let count = 2 * all.len() + bicrossed.len();
    Verdict::new(worst <= 1e-10, format!("{count} unitaries, worst pentagon residual {worst:.2e} (limit 1e-10)"))
}

fn c2_counts(all: &[Instance]) -> Verdict {
    Verdict::from_result((|| {
        for (name, want) in [("Z4", 3), ("Z6", 4), ("S3", 6), ("Q8", 6), ("D4", 10)] {
            let i = find(all, name);
            let oracle = subgroups(i.group.as_ref().unwrap()).len();
            ensure(oracle == want && i.lattice.len() == want, || format!("{name}: {} nodes, oracle {oracle}", i.lattice.len()))?;
        }
        let mut pairs = 0;
        for (i, g) in group_instances(all) {
            let subs = subgroups(g);
            ensure(subs.len() == i.lattice.len(), || format!("{}: count mismatch", i.name))?;
            let idx: Vec<usize> = subs
                .iter()
                .map(|s| {
                    let sub = g.subgroup_from(s).unwrap();
                    i.lattice.index_of(&subgroup_to_presub(g, &sub)).ok_or_else(|| format!("{}: {s:?} missing", i.name))
                })
                .collect::<Result<_, _>>()?;
            for (a, sa) in subs.iter().enumerate() {
                for (b, sb) in subs.iter().enumerate() {
                    let pos = |x: Vec<usize>| subs.iter().position(|s| *s == x).map(|p| idx[p]);
                    let le = sa.iter().all(|x| sb.contains(x));
                    ensure(i.lattice.leq(idx[a], idx[b]) == le, || format!("{}: order at {sa:?} {sb:?}", i.name))?;
                    ensure(Some(i.lattice.meet(idx[a], idx[b])) == pos(intersect(sa, sb)), || format!("{}: meet", i.name))?;
                    ensure(Some(i.lattice.join(idx[a], idx[b])) == pos(generated(g, sa, sb)), || format!("{}: join", i.name))?;
                    pairs += 1;
                }
            }
        }
        Ok(format!("counts 3/4/6/6/10 match the oracle; order, meet, join agree on {pairs} subgroup pairs"))
    })())
}

fn c3_lagrange(all: &[Instance]) -> Verdict {
    Verdict::from_result((|| {
        let mut worst: f64 = 0.0;
        let mut nodes = 0;
        for i in all {
            for f in i.lattice.nodes() {
                let (up, down) = (f.l().trace().re, f.rho().trace().re);
                worst = worst.max((up - up.round()).abs()).max((down - down.round()).abs());
                ensure(up.round() as usize * down.round() as usize == i.m.n(), || format!("{}: {up} x {down}", i.name))?;
                nodes += 1;
            }
        }
        ensure(worst <= 1e-6, || format!("trace off integer by {worst:.2e}"))?;
        Ok(format!("{nodes} pre-subgroups on {} instances, worst trace deviation {worst:.2e}", all.len()))
    })())
}

fn c4_integrality(all: &[Instance]) -> Verdict {
    Verdict::from_result((|| {
        let sep = 2.0 - 2f64.sqrt() - 1e-6;
        let (mut worst, mut closest, mut pairs) = (0.0f64, f64::INFINITY, 0);
        for i in all {
            let nodes = i.lattice.nodes();
            for (a, f) in nodes.iter().enumerate() {
                for g in &nodes[a..] {
                    let k = inner(f.vector(), g.vector()).re.powi(-2);
                    ensure(k >= 1.0 - 1e-6, || format!("{}: index {k}", i.name))?;
                    worst = worst.max((k - k.round()).abs());
                    let r = pair_report(&i.m, f, g).map_err(|e| format!("{}: {e}", i.name))?;
                    ensure(r.checks.iter().all(|c| c.pass), || format!("{}: pair identities", i.name))?;
                    if f.distance(g) > 0.5 {
                        closest = closest.min(vec_dist(f.vector(), g.vector()).powi(2));
                    }
                    pairs += 1;
                }
            }
        }
        ensure(worst <= 1e-6, || format!("index off integer by {worst:.2e}"))?;
        ensure(closest >= sep, || format!("separation {closest:.4}"))?;
        Ok(format!("{pairs} pairs, worst index deviation {worst:.2e}, min |f-g|^2 = {closest:.4} (>= 2-sqrt2)"))
    })())
}

fn c5_classification(all: &[Instance]) -> Verdict {
    Verdict::from_result((|| {
        let s3 = find(all, "S3");
        let g = s3.group.as_ref().unwrap();
        let whole: Vec<usize> = (0..6).collect();
        let normal = subgroups(g).iter().filter(|s| is_normal(g, s, &whole)).count();
        let report = classify_lattice(&s3.m, &s3.lattice).map_err(|e| e.to_string())?;
        ensure(report.counts.cosubgroups == 3 && normal == 3, || format!("S3 co-subgroups {}", report.counts.cosubgroups))?;
        for (i, _) in group_instances(all) {
            ensure(i.lattice.nodes().iter().all(|f| is_subgroup(&i.m, f)), || format!("{}: non-subgroup", i.name))?;
        }
        let mut swaps = 0;
        for i in all {
            let opp = i.m.opposite().map_err(|e| e.to_string())?;
            for f in i.lattice.nodes() {
                let g = is_presubgroup(&opp, f.vector()).map_err(|e| format!("{}: {e}", i.name))?;
                let sub = is_subgroup(&opp, &g) == is_cosubgroup(&i.m, f).map_err(|e| e.to_string())?;
                let co = is_cosubgroup(&opp, &g).map_err(|e| e.to_string())? == is_subgroup(&i.m, f);
                ensure(sub && co, || format!("{}: duality swap fails", i.name))?;
                swaps += 1;
            }
        }
        Ok(format!("S3: 3 co-subgroups = 3 normal; all group pre-subgroups are subgroups; swap holds at {swaps} nodes"))
    })())
}

fn c6_subquotients(all: &[Instance]) -> Verdict {
    Verdict::from_result((|| {
        let (mut pairs, mut restricted) = (0, 0);
        for i in all {
            let lat = &i.lattice;
            for a in 0..lat.len() {
                for b in 0..lat.len() {
                    if !lat.leq(a, b) {
                        continue;
                    }
                    let (small, big): (&PreSubgroup, &PreSubgroup) = (&lat.nodes()[a], &lat.nodes()[b]);
                    let r = subquotient_test(&i.m, small, big).map_err(|e| format!("{}: {e}", i.name))?;
                    ensure(r.conditions.iter().all(|&c| c == r.verdict), || format!("{}: conditions differ", i.name))?;
                    pairs += 1;
                    if let (Some(g), true) = (&i.group, i.name == "S3" || i.name == "D4") {
                        let elems = |f: &PreSubgroup| (0..g.order()).filter(|&s| f.vector()[s].norm() > 1e-6).collect::<Vec<_>>();
                        ensure(r.verdict == is_normal(g, &elems(small), &elems(big)), || format!("{}: normality oracle", i.name))?;
                    }
                    if r.verdict {
                        let w = subquotient_decompose(&i.m, &big.l().matmul(small.rho())).map_err(|e| format!("{}: {e}", i.name))?;
                        let suite = restrict(&i.m, &w).and_then(|x| x.verify_suite()).map_err(|e| format!("{}: {e}", i.name))?;
                        ensure(suite.iter().all(|c| c.pass), || format!("{}: restricted suite", i.name))?;
                        restricted += 1;
                    }
                }
            }
        }
        Ok(format!("{pairs} comparable pairs agree; S3/D4 verdicts = normality; {restricted} restrictions pass the suite"))
    })())
}

fn c7_hopf(all: &[Instance]) -> Verdict {
    Verdict::from_result((|| {
        let mut worst: f64 = 0.0;
        let mut checks = 0;
        for i in all {
            for c in i.m.verify_suite().map_err(|e| e.to_string())? {
                ensure(c.pass, || format!("{}: {} {:.2e}", i.name, c.name, c.residual))?;
                worst = worst.max(c.residual);
                checks += 1;
            }
        }
        ensure(worst <= 1e-9, || format!("worst residual {worst:.2e}"))?;
        Ok(format!("{checks} identities on {} instances, worst residual {worst:.2e} (limit 1e-9)", all.len()))
    })())
}

fn c8_reconstruction(all: &[Instance]) -> Verdict {
    Verdict::from_result((|| {
        let mut worst: f64 = 0.0;
        for i in all {
            let w = from_quadruple(i.m.s(), i.m.s_hat(), i.m.e(), i.m.e_hat(), TOL).map_err(|e| format!("{}: {e}", i.name))?;
            worst = worst.max(w.v().dist(i.m.v()));
        }
        ensure(worst <= 1e-9, || format!("worst {worst:.2e}"))?;
        Ok(format!("{} instances, worst |W - V| = {worst:.2e} (limit 1e-9)", all.len()))
    })())
}

fn c9_coideals(all: &[Instance]) -> Verdict {
    Verdict::from_result((|| {
        let mut nodes = 0;
        for i in all {
            let r = coideal_report(&i.m, &i.lattice).map_err(|e| format!("{}: {e}", i.name))?;
            for c in &r.checks {
                ensure(c.pass, || format!("{}: {}", i.name, c.name))?;
            }
            for x in &r.nodes {
                let n = i.m.n();
                let fr = &x.s_free_over_d;
                ensure(n % x.dim_d == 0 && fr.dim * fr.commutant_dim == n * n && fr.rank == Some(n / x.dim_d), || {
                    format!("{}: freeness at f{}", i.name, x.index)
                })?;
                nodes += 1;
            }
        }
        Ok(format!("round trips, divisibility, freeness, commutant duality and tensor criterion at {nodes} nodes"))
    })())
}

fn c10_bicrossed(bicrossed: &[(String, MultiplicativeUnitary, BicrossedReport, MultiplicativeUnitary)]) -> Verdict {
    Verdict::from_result((|| {
        let mut parts = Vec::new();
        for (label, m, r, w) in bicrossed {
            let dist = r.distance.values().fold(0.0f64, |a, &b| a.max(b));
            let ident = r.verification.residuals.values().fold(0.0f64, |a, &b| a.max(b));
            ensure(dist <= 1e-9, || format!("{label}: distance {dist:.2e}"))?;
            ensure(ident <= 1e-9, || format!("{label}: identities {ident:.2e}"))?;
            ensure(r.verification.suite.iter().all(|c| c.pass), || format!("{label}: suite"))?;
            ensure(w.s().dim() == m.n(), || format!("{label}: dim S_W"))?;
            ensure(r.verification.transfer.values().all(|(a, b)| a == b), || format!("{label}: transfer"))?;
            let x = r.explicit.as_ref().ok_or_else(|| format!("{label}: explicit formula unsolvable"))?;
            ensure(x.residual <= 1e-6, || format!("{label}: explicit {:.2e}", x.residual))?;
            let d = &r.double;
            let ok = match d.verdict {
                DoubleVerdict::Exact => d.exact_residual <= 1e-8,
                DoubleVerdict::Equivalent => d.equivalent_residual <= 1e-8,
                DoubleVerdict::Mismatch => false,
            };
            ensure(ok, || format!("{label}: double construction {:?}", d.verdict))?;
            parts.push(format!("{label}: explicit {:.1e}, double {:?} {:.1e}", x.residual, d.verdict, d.exact_residual));
        }
        Ok(parts.join("; "))
    })())
}

fn c11_determinism() -> Verdict {
    Verdict::from_result((|| {
        let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
        let bin = env!("CARGO_BIN_EXE_mu");
        let table = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/s3.grp");
        let run = |args: &[&str]| -> Result<(), String> {
            let st = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
            ensure(st.status.success(), || format!("mu {} exited {:?}", args.join(" "), st.status.code()))
        };
        let mut outputs: Vec<Vec<Vec<u8>>> = Vec::new();
        for k in 0..2 {
            let p = |s: &str| dir.path().join(format!("{s}{k}")).to_string_lossy().into_owned();
            let v = p("v.json");
            run(&["build", "group", "--table", table.to_str().unwrap(), "-o", &v])?;
            run(&["build", "dual", "-i", &v, "-o", &p("vhat.json")])?;
            run(&["build", "bicrossed", "-i", &v, "--f", "4", "--g", "1", "-o", &p("w.json")])?;
            run(&["verify", "-i", &v, "--report", &p("verify.json")])?;
            run(&["presub", "-i", &v, "--report", &p("presub.json"), "--lattice", &p("lattice.dot")])?;
            run(&["classify", "-i", &v, "--report", &p("classify.json")])?;
            run(&["coideal", "-i", &v, "--report", &p("coideal.json")])?;
            run(&["bicross", "-i", &v, "--f", "4", "--g", "1", "--report", &p("bicross.json")])?;
            let names = ["v.json", "vhat.json", "w.json", "verify.json", "presub.json", "lattice.dot", "classify.json", "coideal.json", "bicross.json"];
            outputs.push(names.iter().map(|n| fs::read(p(n)).unwrap_or_default()).collect());
        }
        ensure(outputs[0] == outputs[1], || "outputs differ between runs".into())?;
        Ok(format!("{} files byte-identical across two runs", outputs[0].len()))
    })())
}

fn main() {
    let start = Instant::now();
    let all = instances();
    let bicrossed = bicross_instances(&all);
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + Sync + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("pentagon", Box::new(|| c1_pentagon(&all, &bicrossed))),
        ("pre-subgroup counts and lattice", Box::new(|| c2_counts(&all))),
        ("Lagrange", Box::new(|| c3_lagrange(&all))),
        ("integrality and separation", Box::new(|| c4_integrality(&all))),
        ("classification", Box::new(|| c5_classification(&all))),
        ("subquotients", Box::new(|| c6_subquotients(&all))),
        ("Hopf identities", Box::new(|| c7_hopf(&all))),
        ("reconstruction", Box::new(|| c8_reconstruction(&all))),
        ("coideals", Box::new(|| c9_coideals(&all))),
        ("bicrossed products", Box::new(|| c10_bicrossed(&bicrossed))),
        ("determinism", Box::new(c11_determinism)),
    ];
    let verdicts: Vec<Verdict> = criteria.par_iter().map(|(_, f)| f()).collect();
    let mut failed = 0;
    for (k, ((title, _), v)) in criteria.iter().zip(&verdicts).enumerate() {
        println!("criterion {:>2} {} {}: {}", k + 1, if v.pass { "PASS" } else { "FAIL" }, title, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("{} of {} criteria pass ({:.1}s)", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
