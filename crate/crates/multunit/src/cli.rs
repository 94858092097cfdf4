//! The `mu` command line.
//!
//! Exit codes: 0 when every check passes, 2 for malformed input, 3 when a
//! mathematical invariant fails. JSON reports are byte-stable across runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bicross::{bicrossed_report, build_w, is_maximally_distant};
use crate::classify::classify_lattice;
use crate::coideal::coideal_report;
use crate::error::{MuError, Result};
use crate::groups::{build_group_unitary, GroupTable};
use crate::mu_core::{tensor_product, Check, MultiplicativeUnitary, UnitaryFile};
use crate::presub::{enumerate_with_seeds, PreSubgroupLattice};
use crate::tensorlin::{DEFAULT_TOL, C64};

/// Largest leg dimension `build tensor` will produce; the pentagon check costs `O(n⁶)`.
const MAX_TENSOR_DIM: usize = 24;

#[derive(Debug, Parser)]
#[command(name = "mu", about = "Finite-dimensional multiplicative unitaries", version)]
pub struct Cli {
    /// Numerical tolerance, in (0, 1e-3). Defaults to the value stored in the input file, or 1e-9.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Treat a best-effort (unconfirmed) pre-subgroup enumeration as a failure.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Extra enumeration seeds: JSON `{"vectors": [[[re, im], ...], ...]}`.
    #[arg(long, global = true, value_name = "FILE")]
    pub seed_extra: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a multiplicative unitary and write it as JSON.
    #[command(subcommand)]
    Build(BuildKind),
    /// Run the full invariant suite on a unitary.
    Verify(Report),
    /// Enumerate pre-subgroups and check the lattice laws.
    Presub(PresubArgs),
    /// Classify pre-subgroups into subgroups, co-subgroups and normal ones.
    Classify(Report),
    /// Build the coideals of every pre-subgroup and check the bijection.
    Coideal(Report),
    /// Build the bicrossed product of two maximally distant pre-subgroups.
    Bicross(BicrossArgs),
}

#[derive(Debug, Subcommand)]
pub enum BuildKind {
    /// The unitary of a finite group given by its multiplication table.
    Group {
        #[arg(long, value_name = "FILE")]
        table: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// The dual `V̂` (or `Ṽ` with `--tilde`).
    Dual {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        tilde: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// The tensor product of two unitaries.
    Tensor {
        #[arg(short, long, num_args = 2, value_names = ["LEFT", "RIGHT"])]
        input: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// The bicrossed product for lattice nodes `--f` and `--g`.
    Bicrossed {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        f: usize,
        #[arg(long)]
        g: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct Report {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Write the JSON report here.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PresubArgs {
    #[command(flatten)]
    pub common: Report,
    /// Write the Hasse diagram in DOT format.
    #[arg(long, value_name = "FILE")]
    pub lattice: Option<PathBuf>,
    /// Group table used to certify that the enumeration is complete.
    #[arg(long, value_name = "FILE")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BicrossArgs {
    #[command(flatten)]
    pub common: Report,
    #[arg(long)]
    pub f: usize,
    #[arg(long)]
    pub g: usize,
    /// Write the new unitary here.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Deserialize)]
struct SeedFile {
    vectors: Vec<Vec<C64>>,
}

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

/// Resolved run settings.
struct RunConfig {
    tol: Option<f64>,
    strict: bool,
    seeds: Vec<Vec<C64>>,
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Pass,
    Fail(String),
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Result<Self> {
        if let Some(t) = cli.tol {
            if !(t > 0.0 && t < 1e-3) {
                return Err(MuError::InvalidArgument(format!("--tol must lie in (0, 1e-3), got {t}")));
            }
        }
        let seeds = match &cli.seed_extra {
            Some(p) => serde_json::from_str::<SeedFile>(&read(p)?)?.vectors,
            None => Vec::new(),
        };
        Ok(RunConfig { tol: cli.tol, strict: cli.strict, seeds })
    }

    fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    fn load(&self, path: &Path) -> Result<MultiplicativeUnitary> {
        let mut file: UnitaryFile = serde_json::from_str(&read(path)?)?;
        if let Some(t) = self.tol {
            file.tol = t;
        }
        MultiplicativeUnitary::from_file(file)
    }

    fn lattice(&self, m: &MultiplicativeUnitary) -> Result<PreSubgroupLattice> {
        if self.seeds.iter().any(|s| s.len() != m.n()) {
            return Err(MuError::Dimension(format!("seed vectors must have length {}", m.n())));
        }
        enumerate_with_seeds(m, &self.seeds)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| MuError::Parse(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn write_unitary(path: &Path, m: &MultiplicativeUnitary) -> Result<()> {
    write_json(path, &m.to_file())
}

fn write_report<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => Ok(()),
    }
}

fn summarize(checks: &[Check]) -> Outcome {
    for c in checks {
        say!("{} {} (residual {:.3e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.residual);
    }
    match checks.iter().find(|c| !c.pass) {
        Some(c) => Outcome::Fail(format!("{} (residual {:.3e})", c.name, c.residual)),
        None => Outcome::Pass,
    }
}

fn node<'a>(lat: &'a PreSubgroupLattice, i: usize) -> Result<&'a crate::presub::PreSubgroup> {
    lat.nodes()
        .get(i)
        .ok_or_else(|| MuError::InvalidArgument(format!("node {i} out of range (lattice has {} nodes)", lat.len())))
}

/// Lattice nodes `i`, `j`, rejected as input unless they are maximally distant.
fn matched_pair<'a>(
    m: &MultiplicativeUnitary,
    lat: &'a PreSubgroupLattice,
    i: usize,
    j: usize,
) -> Result<(&'a crate::presub::PreSubgroup, &'a crate::presub::PreSubgroup)> {
    let (f, g) = (node(lat, i)?, node(lat, j)?);
    if !is_maximally_distant(m, f, g) {
        return Err(MuError::InvalidArgument(format!(
            "nodes {i} and {j} are not maximally distant (<f,g> = {:.6}, need n^-1/2 = {:.6})",
            crate::tensorlin::inner(f.vector(), g.vector()).re,
            1.0 / (m.n() as f64).sqrt()
        )));
    }
    Ok((f, g))
}

fn build(cfg: &RunConfig, kind: &BuildKind) -> Result<Outcome> {
    match kind {
        BuildKind::Group { table, output } => {
            let g = GroupTable::parse(&read(table)?)?;
            let m = build_group_unitary(&g, cfg.tol())?;
            write_unitary(output, &m)?;
            say!("wrote group unitary, n = {}", m.n());
        }
        BuildKind::Dual { input, tilde, output } => {
            let m = cfg.load(input)?;
            let (v_hat, v_tilde) = m.derived_unitaries();
            let v = if *tilde { v_tilde } else { v_hat };
            let d = MultiplicativeUnitary::canonicalize(v.clone(), m.tol())?;
            write_unitary(output, &d)?;
            say!("wrote {} unitary, n = {}", if *tilde { "Ṽ" } else { "V̂" }, d.n());
        }
        BuildKind::Tensor { input, output } => {
            let a = cfg.load(&input[0])?;
            let b = cfg.load(&input[1])?;
            if a.n() * b.n() > MAX_TENSOR_DIM {
                return Err(MuError::InvalidArgument(format!(
                    "tensor product has n = {}, above the supported {MAX_TENSOR_DIM}",
                    a.n() * b.n()
                )));
            }
            let tol = a.tol().max(b.tol());
            let m = MultiplicativeUnitary::canonicalize(tensor_product(a.v(), b.v())?, tol)?;
            write_unitary(output, &m)?;
            say!("wrote tensor product, n = {}", m.n());
        }
        BuildKind::Bicrossed { input, f, g, output } => {
            let m = cfg.load(input)?;
            let lat = cfg.lattice(&m)?;
            let (fv, gv) = matched_pair(&m, &lat, *f, *g)?;
            let res = build_w(&m, fv, gv)?;
            write_unitary(output, &res.w)?;
            say!("wrote bicrossed product of nodes {f} and {g}, n = {}", res.w.n());
        }
    }
    Ok(Outcome::Pass)
}

fn presub(cfg: &RunConfig, args: &PresubArgs) -> Result<Outcome> {
    let m = cfg.load(&args.common.input)?;
    let mut lat = cfg.lattice(&m)?;
    if let Some(t) = &args.table {
        let g = GroupTable::parse(&read(t)?)?;
        if g.order() != m.n() {
            return Err(MuError::Dimension(format!("group of order {} for n = {}", g.order(), m.n())));
        }
        lat.confirm_with_group(&g);
    }
    say!("{} pre-subgroups (best_effort = {})", lat.len(), lat.best_effort());
    for (i, f) in lat.nodes().iter().enumerate() {
        say!("f{i} [{}×{}]", f.dim_up(), f.dim_down());
    }
    if let Some(p) = &args.lattice {
        fs::write(p, lat.to_dot())?;
    }
    write_report(&args.common.report, &lat.report())?;
    let outcome = summarize(&lat.verify());
    if cfg.strict && lat.best_effort() {
        return Ok(Outcome::Fail("enumeration is best-effort and --strict is set".into()));
    }
    Ok(outcome)
}

fn bicross(cfg: &RunConfig, args: &BicrossArgs) -> Result<Outcome> {
    let m = cfg.load(&args.common.input)?;
    let lat = cfg.lattice(&m)?;
    let (f, g) = matched_pair(&m, &lat, args.f, args.g)?;
    let (res, report) = bicrossed_report(&m, f, g)?;
    if let Some(p) = &args.output {
        write_unitary(p, &res.w)?;
    }
    write_report(&args.common.report, &report)?;
    let tol = m.tol() * 10.0;
    let mut checks: Vec<Check> = report.distance.iter().map(|(k, &r)| Check::new(k.clone(), r, tol)).collect();
    checks.extend(report.verification.residuals.iter().map(|(k, &r)| Check::new(k.clone(), r, tol)));
    checks.extend(report.verification.transfer.iter().map(|(k, (a, b))| Check::flag(k.clone(), a == b)));
    checks.extend(report.verification.suite.iter().map(|c| Check { name: format!("W: {}", c.name), ..c.clone() }));
    if let Some(x) = &report.explicit {
        checks.push(Check::new("explicit formula for W", x.residual, 1e-6));
    }
    let outcome = summarize(&checks);
    say!(
        "double construction: {:?} (exact {:.3e}, aligned {:.3e}, reverse {:.3e})",
        report.double.verdict, report.double.exact_residual, report.double.equivalent_residual, report.double.reverse_residual
    );
    if report.double.verdict == crate::bicross::DoubleVerdict::Mismatch {
        return Ok(Outcome::Fail("double construction does not return V̂".into()));
    }
    Ok(outcome)
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let cfg = RunConfig::from_cli(cli)?;
    match &cli.command {
        Command::Build(kind) => build(&cfg, kind),
        Command::Verify(a) => {
            let m = cfg.load(&a.input)?;
            let checks = m.verify_suite()?;
            write_report(&a.report, &checks)?;
            Ok(summarize(&checks))
        }
        Command::Presub(a) => presub(&cfg, a),
        Command::Classify(a) => {
            let m = cfg.load(&a.input)?;
            let lat = cfg.lattice(&m)?;
            let report = classify_lattice(&m, &lat)?;
            let c = &report.counts;
            say!(
                "{} pre-subgroups: {} subgroups, {} co-subgroups, {} normal",
                c.presubgroups, c.subgroups, c.cosubgroups, c.normal
            );
            write_report(&a.report, &report)?;
            Ok(summarize(&report.checks))
        }
        Command::Coideal(a) => {
            let m = cfg.load(&a.input)?;
            let lat = cfg.lattice(&m)?;
            let report = coideal_report(&m, &lat)?;
            for x in &report.nodes {
                say!("f{}: dim D = {}, dim D̂ = {}", x.index, x.dim_d, x.dim_d_hat);
            }
            write_report(&a.report, &report)?;
            Ok(summarize(&report.checks))
        }
        Command::Bicross(a) => bicross(&cfg, a),
    }
}

fn init_threads() {
    if let Some(k) = std::env::var("MU_NUM_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
    }
}

/// Parses arguments, runs the command and maps the result to an exit code.
pub fn run() -> ExitCode {
    init_threads();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(msg)) => {
            eprintln!("invariant failure: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
