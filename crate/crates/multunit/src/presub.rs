//! Pre-subgroups: unit vectors `f` with `V(f⊗f) = f⊗f` and `⟨f,e⟩ > 0`.
//!
//! Each pre-subgroup carries two commuting projectors, `L_f` onto `H^f` and
//! `ρ_f` onto `H_f`. Pre-subgroups are ordered by `g ≺ f ⟺ V(f⊗g) = f⊗g`
//! and form a finite lattice; [`enumerate`] searches for all of them.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{MuError, Result};
use crate::groups::{subgroup_to_presub, GroupTable};
use crate::mu_core::{apply_antilinear, Check, MultiplicativeUnitary};
use crate::tensorlin::{
    basis_vector, eig1_projector, eigenvalues, inner, kron_vec, norm, normalized, orthonormalize, projector_rank,
    scaled, slice_first_form, slice_second_form, vec_add, vec_dist, ComplexMatrix, C64, CLUSTER_TOL,
};

/// Nodes closer than this are the same pre-subgroup; distinct ones are at least `√(2−√2)` apart.
pub const DEDUP_RADIUS: f64 = 0.5;

/// A validated pre-subgroup with its projectors.
#[derive(Clone, Debug)]
pub struct PreSubgroup {
    f: Vec<C64>,
    l: ComplexMatrix,
    rho: ComplexMatrix,
    dim_up: usize,
    dim_down: usize,
}

impl PreSubgroup {
    /// The unit vector `f`.
    pub fn vector(&self) -> &[C64] {
        &self.f
    }

    /// `L_f`, the projector onto `H^f = {ξ : V(f⊗ξ) = f⊗ξ}`.
    pub fn l(&self) -> &ComplexMatrix {
        &self.l
    }

    /// `ρ_f`, the projector onto `H_f = {ξ : V(ξ⊗f) = ξ⊗f}`.
    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn dim_up(&self) -> usize {
        self.dim_up
    }

    pub fn dim_down(&self) -> usize {
        self.dim_down
    }

    pub fn distance(&self, other: &PreSubgroup) -> f64 {
        vec_dist(&self.f, &other.f)
    }
}

fn reject(condition: &str, residual: f64) -> MuError {
    MuError::NotPresubgroup { condition: condition.into(), residual }
}

/// Validates `f` as a pre-subgroup, fixing its phase so that `⟨f,e⟩ > 0`.
pub fn is_presubgroup(m: &MultiplicativeUnitary, f: &[C64]) -> Result<PreSubgroup> {
    let n = m.n();
    let tol = m.tol();
    if f.len() != n {
        return Err(MuError::Dimension(format!("vector of length {} for n = {n}", f.len())));
    }
    let nf = norm(f);
    if (nf - 1.0).abs() > tol {
        return Err(reject("‖f‖ = 1", (nf - 1.0).abs()));
    }
    let overlap = inner(f, m.e());
    if overlap.norm() <= tol {
        return Err(reject("⟨f,e⟩ ≠ 0", overlap.norm()));
    }
    let f = scaled(f, overlap / overlap.norm());
    let ff = kron_vec(&f, &f);
    let fixed = vec_dist(&m.v().apply(&ff), &ff);
    if fixed > tol {
        return Err(reject("V(f⊗f) = f⊗f", fixed));
    }

    let l = m.l(&f, &f)?;
    let rho = m.rho(&f, &f)?;
    let f_e = inner(&f, m.e()).re;
    let checks = [
        ("L_f is a projector", l.projector_residual()),
        ("ρ_f is a projector", rho.projector_residual()),
        ("L_f ρ_f = ρ_f L_f", l.commutator(&rho).frobenius_norm()),
        ("L_f ∈ S", m.s().membership_residual(&l)),
        ("ρ_f ∈ Ŝ", m.s_hat().membership_residual(&rho)),
        ("L_f e = ⟨f,e⟩f", vec_dist(&l.apply(m.e()), &scaled(&f, f_e.into()))),
        ("Jf = f", vec_dist(&apply_antilinear(m.j(), &f), &f)),
        ("Ĵf = f", vec_dist(&apply_antilinear(m.j_hat(), &f), &f)),
        ("Uf = f", vec_dist(&m.u().apply(&f), &f)),
    ];
    for (name, r) in checks {
        if r > tol * 10.0 {
            return Err(reject(name, r));
        }
    }
    let dim_up = projector_rank(&l)?;
    let dim_down = projector_rank(&rho)?;
    if dim_up * dim_down != n {
        return Err(reject("dim H^f · dim H_f = n", (dim_up * dim_down) as f64 - n as f64));
    }
    let meet_rank = projector_rank(&l.matmul(&rho))?;
    if meet_rank != 1 {
        return Err(reject("H^f ∩ H_f = ℂf", meet_rank as f64 - 1.0));
    }
    Ok(PreSubgroup { f, l, rho, dim_up, dim_down })
}

/// The pre-subgroup whose `L_f` is the projector `p` onto a fixed space, `f = pe/‖pe‖`.
fn from_left_projector(m: &MultiplicativeUnitary, p: &ComplexMatrix) -> Result<PreSubgroup> {
    let pe = p.apply(m.e());
    let out = is_presubgroup(m, &normalized(&pe))?;
    let r = out.l.dist(p);
    if r > m.tol() * 10.0 {
        return Err(MuError::invariant("L_f = p", r));
    }
    Ok(out)
}

/// The pre-subgroup whose `ρ_g` is `q`, `g = qê/‖qê‖`.
fn from_right_projector(m: &MultiplicativeUnitary, q: &ComplexMatrix) -> Result<PreSubgroup> {
    let qe = q.apply(m.e_hat());
    let out = is_presubgroup(m, &normalized(&qe))?;
    let r = out.rho.dist(q);
    if r > m.tol() * 10.0 {
        return Err(MuError::invariant("ρ_g = q", r));
    }
    Ok(out)
}

fn averaged_form(m: &MultiplicativeUnitary, vectors: &[Vec<C64>]) -> Result<ComplexMatrix> {
    let n = m.n();
    if vectors.is_empty() {
        return Err(MuError::Dimension("empty family of vectors".into()));
    }
    if vectors.iter().any(|v| v.len() != n) {
        return Err(MuError::Dimension(format!("vectors must have length {n}")));
    }
    let basis = orthonormalize(n, vectors, m.tol());
    if basis.is_empty() {
        return Err(MuError::Dimension("vectors span the zero subspace".into()));
    }
    let mut omega = ComplexMatrix::zeros(n, n);
    for z in &basis {
        omega += &ComplexMatrix::outer(z, z);
    }
    Ok(omega.scale_re(1.0 / basis.len() as f64))
}

/// The `f` whose `H^f` is the fixed space of `L(ω_{ζ,ζ})`, `ζ` normalized.
pub fn from_vector(m: &MultiplicativeUnitary, zeta: &[C64]) -> Result<PreSubgroup> {
    let omega = averaged_form(m, &[zeta.to_vec()])?;
    from_left_projector(m, &eig1_projector(&slice_first_form(m.v(), &omega)?, m.tol())?)
}

/// The `g` whose `H_g` is the fixed space of `ρ(ω_{ζ,ζ})`.
pub fn from_vector_dual(m: &MultiplicativeUnitary, zeta: &[C64]) -> Result<PreSubgroup> {
    let omega = averaged_form(m, &[zeta.to_vec()])?;
    from_right_projector(m, &eig1_projector(&slice_second_form(m.v(), &omega)?, m.tol())?)
}

/// `(f, g)` with `H^f = {ξ : V(ζ⊗ξ) = ζ⊗ξ ∀ζ ∈ K}` and `H_g = {ξ : V(ξ⊗ζ) = ξ⊗ζ ∀ζ ∈ K}`.
pub fn from_subspace(m: &MultiplicativeUnitary, k: &[Vec<C64>]) -> Result<(PreSubgroup, PreSubgroup)> {
    let omega = averaged_form(m, k)?;
    let up = from_left_projector(m, &eig1_projector(&slice_first_form(m.v(), &omega)?, m.tol())?)?;
    let down = from_right_projector(m, &eig1_projector(&slice_second_form(m.v(), &omega)?, m.tol())?)?;
    Ok((up, down))
}

/// `g ≺ f`, i.e. `V(f⊗g) = f⊗g`; errors if the equivalent projector tests disagree.
pub fn order_leq(m: &MultiplicativeUnitary, g: &PreSubgroup, f: &PreSubgroup) -> Result<bool> {
    let tol = m.tol();
    let fg = kron_vec(&f.f, &g.f);
    let fixed = vec_dist(&m.v().apply(&fg), &fg) <= tol;
    let up = f.l.matmul(&g.l).dist(&g.l) <= tol * 10.0;
    let down = g.rho.matmul(&f.rho).dist(&f.rho) <= tol * 10.0;
    if fixed != up || fixed != down {
        return Err(MuError::invariant(
            format!("order tests disagree (V(f⊗g)=f⊗g: {fixed}, L_g ≤ L_f: {up}, ρ_f ≤ ρ_g: {down})"),
            1.0,
        ));
    }
    Ok(fixed)
}

/// Greatest lower bound, `H^{meet} = H^f ∩ H^{f'}`.
pub fn meet(m: &MultiplicativeUnitary, f: &PreSubgroup, f2: &PreSubgroup) -> Result<PreSubgroup> {
    let avg = (&f.l + &f2.l).scale_re(0.5);
    from_left_projector(m, &eig1_projector(&avg, m.tol())?)
}

/// Least upper bound, `H_{join} = H_f ∩ H_{f'}`.
pub fn join(m: &MultiplicativeUnitary, f: &PreSubgroup, f2: &PreSubgroup) -> Result<PreSubgroup> {
    let avg = (&f.rho + &f2.rho).scale_re(0.5);
    from_right_projector(m, &eig1_projector(&avg, m.tol())?)
}

/// Unimodular eigenvalues of `a`, clustered; errors unless they are the `k`-th roots of unity.
fn root_of_unity_order(a: &ComplexMatrix) -> Result<usize> {
    let mut roots: Vec<C64> = Vec::new();
    for z in eigenvalues(a) {
        if z.norm() > 1.0 - 1e-6 && roots.iter().all(|r| (r - z).norm() > 1e-6) {
            roots.push(z);
        }
    }
    let k = roots.len();
    let worst = roots.iter().map(|z| (z.powu(k as u32) - 1.0).norm()).fold(0.0, f64::max);
    if k == 0 || worst > 1e-6 {
        return Err(MuError::invariant("unimodular spectrum is not a group of roots of unity", worst));
    }
    Ok(k)
}

fn matrix_power(a: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(a.rows());
    for _ in 0..k {
        out = out.matmul(a);
    }
    out
}

/// Order `k` of the unimodular spectrum of `L(ω_{ζ,ζ})` and the `f` with `H^f` its eigenspace span.
pub fn spectral_subgroup(m: &MultiplicativeUnitary, zeta: &[C64]) -> Result<(usize, PreSubgroup)> {
    let a = slice_first_form(m.v(), &averaged_form(m, &[zeta.to_vec()])?)?;
    let k = root_of_unity_order(&a)?;
    let p = eig1_projector(&matrix_power(&a, k), CLUSTER_TOL)?;
    Ok((k, from_left_projector(m, &p)?))
}

/// Same for `ρ(ω_{ζ,ζ})`, returning the `g` with `H_g` the eigenspace span.
pub fn spectral_subgroup_dual(m: &MultiplicativeUnitary, zeta: &[C64]) -> Result<(usize, PreSubgroup)> {
    let a = slice_second_form(m.v(), &averaged_form(m, &[zeta.to_vec()])?)?;
    let k = root_of_unity_order(&a)?;
    let q = eig1_projector(&matrix_power(&a, k), CLUSTER_TOL)?;
    Ok((k, from_right_projector(m, &q)?))
}

/// Intersection data for a pair of pre-subgroups.
#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub overlap: f64,
    /// `⟨f,g⟩^{-2}`, an integer.
    pub index: usize,
    /// `dim H^{f,g}` with `H^{f,g}` the range of `L(ω_{f,g})`.
    pub dim_left: usize,
    /// `dim H_{g,f}` with `H_{g,f}` the range of `ρ(ω_{g,f})`.
    pub dim_right: usize,
    /// `dim(H^{f,g} ∩ H_g)`.
    pub dim_left_cap: usize,
    /// `dim(H_{g,f} ∩ H^g)`.
    pub dim_right_cap: usize,
    pub checks: Vec<Check>,
}

/// Dimensions and identities relating two pre-subgroups.
pub fn pair_report(m: &MultiplicativeUnitary, f: &PreSubgroup, g: &PreSubgroup) -> Result<PairReport> {
    let tol = m.tol();
    let z = inner(&f.f, &g.f);
    if z.re <= tol || z.im.abs() > tol {
        return Err(MuError::invariant("⟨f,g⟩ is real positive", z.im.abs().max(-z.re)));
    }
    let c = z.re;
    let k_real = c.powi(-2);
    let index = k_real.round();
    if (k_real - index).abs() > 1e-6 {
        return Err(MuError::invariant("⟨f,g⟩^{-2} is an integer", (k_real - index).abs()));
    }
    let index = index as usize;
    let l_fg = m.l(&f.f, &g.f)?;
    let rho_gf = m.rho(&g.f, &f.f)?;
    let p_left = l_fg.scale_re(1.0 / c);
    let p_right = rho_gf.scale_re(1.0 / c);
    let dim_left = projector_rank(&p_left)?;
    let dim_right = projector_rank(&p_right)?;
    let dim_left_cap = projector_rank(&p_left.matmul(&g.rho))?;
    let dim_right_cap = projector_rank(&p_right.matmul(&g.l))?;
    let fe = inner(&f.f, m.e()).re;
    let ge = inner(&g.f, m.e()).re;
    let int = |a: usize, b: usize| (a as f64 - b as f64).abs();
    let contains = |p: &ComplexMatrix, sub: &ComplexMatrix| p.matmul(sub).dist(sub);
    let checks = vec![
        Check::new("L(ω_{f,g})² = ⟨f,g⟩L(ω_{f,g})", l_fg.matmul(&l_fg).dist(&l_fg.scale_re(c)), tol),
        Check::new("ρ(ω_{g,f})² = ⟨f,g⟩ρ(ω_{g,f})", rho_gf.matmul(&rho_gf).dist(&rho_gf.scale_re(c)), tol),
        Check::new("L(ω_{f,g}) self-adjoint", l_fg.selfadjoint_residual(), tol),
        Check::new("[L(ω_{f,g}), ρ_g] = 0", l_fg.commutator(&g.rho).frobenius_norm(), tol),
        Check::new("[ρ(ω_{g,f}), L_g] = 0", rho_gf.commutator(&g.l).frobenius_norm(), tol),
        Check::new("dim(H^{f,g}∩H_g) dim H^g = dim H^{f,g}", int(dim_left_cap * g.dim_up, dim_left), 0.0),
        Check::new("dim(H_{g,f}∩H^g) dim H_g = dim H_{g,f}", int(dim_right_cap * g.dim_down, dim_right), 0.0),
        Check::new("dim(H^{f,g}∩H_g)⟨f,g⟩⟨g,e⟩ = ⟨f,e⟩", (dim_left_cap as f64 * c * ge - fe).abs(), tol),
        Check::new("dim(H_{g,f}∩H^g)⟨f,g⟩⟨f,e⟩ = ⟨g,e⟩", (dim_right_cap as f64 * c * fe - ge).abs(), tol),
        Check::new("product of intersections = ⟨f,g⟩^{-2}", int(dim_left_cap * dim_right_cap, index), 0.0),
        Check::new("H^f ⊂ H^{f,g}", contains(&p_left, &f.l), tol),
        Check::new("H^g ⊂ H^{f,g}", contains(&p_left, &g.l), tol),
        Check::new("H_f ⊂ H_{g,f}", contains(&p_right, &f.rho), tol),
        Check::new("H_g ⊂ H_{g,f}", contains(&p_right, &g.rho), tol),
    ];
    Ok(PairReport { overlap: c, index, dim_left, dim_right, dim_left_cap, dim_right_cap, checks })
}

/// The six equivalent conditions characterizing `p = L_f` for a projector `p ∈ S`.
///
/// Returns the verdicts in order:
/// `p⊗p ≤ δ(p)`, `δ(p)(1⊗p) = p⊗p`, `δ(p)(p⊗1) = p⊗p`, `ρ(ω_{e,pe}) ≥ 0`,
/// `φ(p)^{-1}ρ(ω_{e,pe})` is a projector, and `pe/‖pe‖` is a pre-subgroup with `L_f = p`.
pub fn left_projector_conditions(m: &MultiplicativeUnitary, p: &ComplexMatrix) -> Result<[bool; 6]> {
    let tol = m.tol();
    let pp = p.kron(p);
    let dp = m.coproduct(p)?;
    let idn = ComplexMatrix::identity(m.n());
    let dominated = crate::tensorlin::hermitian_eigen(&(&dp - &pp)).0.last().copied().unwrap_or(0.0) >= -tol;
    let right = dp.matmul(&idn.kron(p)).dist(&pp) <= tol;
    let left = dp.matmul(&p.kron(&idn)).dist(&pp) <= tol;
    let pe = p.apply(m.e());
    let r = m.rho(m.e(), &pe)?;
    let positive = r.selfadjoint_residual() <= tol
        && crate::tensorlin::hermitian_eigen(&r).0.last().copied().unwrap_or(0.0) >= -tol;
    let phi = inner(m.e(), &pe).re;
    let projector = phi > tol && r.scale_re(1.0 / phi).projector_residual() <= tol;
    let presub = norm(&pe) > tol
        && is_presubgroup(m, &normalized(&pe)).map(|f| f.l.dist(p) <= tol * 10.0).unwrap_or(false);
    Ok([dominated, right, left, positive, projector, presub])
}

// ---------------------------------------------------------------------------
// Lattice

/// The pre-subgroups found by [`enumerate`] with their order and lattice tables.
#[derive(Clone, Debug)]
pub struct PreSubgroupLattice {
    nodes: Vec<PreSubgroup>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    best_effort: bool,
}

/// Serializable form of a lattice.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeReport {
    pub n: usize,
    pub best_effort: bool,
    pub nodes: Vec<NodeReport>,
    pub leq: Vec<Vec<bool>>,
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeReport {
    pub index: usize,
    pub dim_up: usize,
    pub dim_down: usize,
    pub vector: Vec<C64>,
}

/// Lexicographic order on coordinates, treating near-equal entries as equal.
fn canonical_cmp(a: &PreSubgroup, b: &PreSubgroup) -> Ordering {
    a.dim_up.cmp(&b.dim_up).then_with(|| {
        for (x, y) in a.f.iter().zip(&b.f) {
            for (u, v) in [(x.re, y.re), (x.im, y.im)] {
                if (u - v).abs() > 1e-6 {
                    return v.total_cmp(&u);
                }
            }
        }
        Ordering::Equal
    })
}

fn position(nodes: &[PreSubgroup], f: &PreSubgroup) -> Option<usize> {
    nodes.iter().position(|g| g.distance(f) < DEDUP_RADIUS)
}

fn insert(nodes: &mut Vec<PreSubgroup>, f: PreSubgroup) -> bool {
    if position(nodes, &f).is_some() {
        return false;
    }
    nodes.push(f);
    true
}

/// Searches for all pre-subgroups by seeding from basis vectors and closing under meet and join.
///
/// The result is marked best-effort: nothing guarantees the search is exhaustive for an
/// arbitrary `V`. Use [`PreSubgroupLattice::confirm_with_group`] to certify the group case.
pub fn enumerate(m: &MultiplicativeUnitary) -> Result<PreSubgroupLattice> {
    enumerate_with_seeds(m, &[])
}

/// [`enumerate`] with additional seed vectors.
pub fn enumerate_with_seeds(m: &MultiplicativeUnitary, extra: &[Vec<C64>]) -> Result<PreSubgroupLattice> {
    let n = m.n();
    let mut nodes = Vec::new();
    insert(&mut nodes, is_presubgroup(m, m.e_hat())?);
    insert(&mut nodes, is_presubgroup(m, m.e())?);

    let mut seeds: Vec<Vec<C64>> = (0..n).map(|i| basis_vector(n, i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            seeds.push(vec_add(&basis_vector(n, i), &basis_vector(n, j)));
        }
    }
    seeds.extend(extra.iter().cloned());
    let found: Vec<(PreSubgroup, PreSubgroup)> = seeds
        .par_iter()
        .map(|z| Ok((from_vector(m, z)?, from_vector_dual(m, z)?)))
        .collect::<Result<_>>()?;
    for (a, b) in found {
        insert(&mut nodes, a);
        insert(&mut nodes, b);
    }

    // Close under pairwise meet and join; each round handles every pair not seen before.
    let mut done = 0;
    while done < nodes.len() {
        let total = nodes.len();
        let pairs: Vec<(usize, usize)> =
            (0..total).flat_map(|j| (0..j).map(move |i| (i, j))).filter(|&(_, j)| j >= done).collect();
        let results: Vec<(PreSubgroup, PreSubgroup)> = pairs
            .par_iter()
            .map(|&(i, j)| Ok((meet(m, &nodes[i], &nodes[j])?, join(m, &nodes[i], &nodes[j])?)))
            .collect::<Result<_>>()?;
        done = total;
        for (a, b) in results {
            insert(&mut nodes, a);
            insert(&mut nodes, b);
        }
    }
    nodes.sort_by(canonical_cmp);
    build_lattice(m, nodes)
}

fn build_lattice(m: &MultiplicativeUnitary, nodes: Vec<PreSubgroup>) -> Result<PreSubgroupLattice> {
    let k = nodes.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let rows: Vec<(bool, usize, usize)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let le = order_leq(m, &nodes[i], &nodes[j])?;
            let lookup = |f: PreSubgroup| {
                position(&nodes, &f).ok_or_else(|| MuError::invariant("lattice not closed under meet/join", 1.0))
            };
            let mi = lookup(meet(m, &nodes[i], &nodes[j])?)?;
            let ji = lookup(join(m, &nodes[i], &nodes[j])?)?;
            Ok((le, mi, ji))
        })
        .collect::<Result<_>>()?;
    let table = |sel: &dyn Fn(&(bool, usize, usize)) -> usize| -> Vec<Vec<usize>> {
        rows.chunks(k).map(|row| row.iter().map(sel).collect()).collect()
    };
    let leq = rows.chunks(k).map(|row| row.iter().map(|r| r.0).collect()).collect();
    Ok(PreSubgroupLattice { meet: table(&|r| r.1), join: table(&|r| r.2), nodes, leq, best_effort: true })
}

impl PreSubgroupLattice {
    pub fn nodes(&self) -> &[PreSubgroup] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `nodes[i] ≺ nodes[j]`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.meet[i][j]
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i][j]
    }

    pub fn best_effort(&self) -> bool {
        self.best_effort
    }

    /// Index of the node within the dedup radius of `f`.
    pub fn index_of(&self, f: &[C64]) -> Option<usize> {
        self.nodes.iter().position(|g| vec_dist(&g.f, f) < DEDUP_RADIUS)
    }

    /// Index of `e`, the greatest element.
    pub fn top(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Index of `ê`, the least element.
    pub fn bottom(&self) -> usize {
        0
    }

    /// Certifies completeness for a group unitary by matching nodes with subgroups bijectively.
    pub fn confirm_with_group(&mut self, g: &GroupTable) -> bool {
        let Ok(subs) = g.enumerate_subgroups() else { return false };
        let mut hit = vec![false; self.nodes.len()];
        for s in &subs {
            match self.index_of(&subgroup_to_presub(g, s)) {
                Some(i) if !hit[i] => hit[i] = true,
                _ => return false,
            }
        }
        let complete = hit.iter().all(|&h| h);
        if complete {
            self.best_effort = false;
        }
        complete
    }

    /// Pairs `(i, j)` with `nodes[i] ≺ nodes[j]` and nothing strictly between.
    pub fn covering_edges(&self) -> Vec<(usize, usize)> {
        let k = self.len();
        let mut out = Vec::new();
        for i in 0..k {
            for j in 0..k {
                if i == j || !self.leq[i][j] {
                    continue;
                }
                let between = (0..k).any(|t| t != i && t != j && self.leq[i][t] && self.leq[t][j]);
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Order, lattice and separation checks.
    pub fn verify(&self) -> Vec<Check> {
        let k = self.len();
        let r = 0..k;
        let all = |p: &dyn Fn(usize, usize) -> bool| r.clone().all(|i| r.clone().all(|j| p(i, j)));
        let le = |i: usize, j: usize| self.leq[i][j];
        let reflexive = r.clone().all(|i| le(i, i));
        let antisym = all(&|i, j| i == j || !(le(i, j) && le(j, i)));
        let transitive = all(&|i, j| !le(i, j) || r.clone().all(|t| !le(j, t) || le(i, t)));
        let bounds = r.clone().all(|i| le(self.bottom(), i) && le(i, self.top()));
        let glb = all(&|i, j| {
            let g = self.meet[i][j];
            le(g, i) && le(g, j) && r.clone().all(|t| !(le(t, i) && le(t, j)) || le(t, g))
        });
        let lub = all(&|i, j| {
            let g = self.join[i][j];
            le(i, g) && le(j, g) && r.clone().all(|t| !(le(i, t) && le(j, t)) || le(g, t))
        });
        let cap = all(&|i, j| {
            let g = &self.nodes[self.meet[i][j]];
            let inter = eig1_projector(&(self.nodes[i].l() + self.nodes[j].l()).scale_re(0.5), CLUSTER_TOL);
            inter.map(|p| p.dist(g.l()) < 1e-6).unwrap_or(false)
        });
        let sep = 2.0 - 2f64.sqrt();
        let mut min_sep = f64::INFINITY;
        for i in 0..k {
            for j in i + 1..k {
                min_sep = min_sep.min(self.nodes[i].distance(&self.nodes[j]).powi(2));
            }
        }
        let lagrange = self.nodes.iter().all(|f| f.dim_up * f.dim_down == self.nodes[0].f.len());
        vec![
            Check::flag("≺ reflexive", reflexive),
            Check::flag("≺ antisymmetric", antisym),
            Check::flag("≺ transitive", transitive),
            Check::flag("ê least, e greatest", bounds),
            Check::flag("meet is the greatest lower bound", glb),
            Check::flag("join is the least upper bound", lub),
            Check::flag("H^{meet} = H^f ∩ H^{f'}", cap),
            Check::flag("dim H^f · dim H_f = n", lagrange),
            Check::new("pairwise ‖f−g‖² ≥ 2−√2", (sep - min_sep.min(sep)).max(0.0), 1e-6),
        ]
    }

    pub fn report(&self) -> LatticeReport {
        LatticeReport {
            n: self.nodes.first().map(|f| f.f.len()).unwrap_or(0),
            best_effort: self.best_effort,
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(index, f)| NodeReport { index, dim_up: f.dim_up, dim_down: f.dim_down, vector: f.f.clone() })
                .collect(),
            leq: self.leq.clone(),
            meet: self.meet.clone(),
            join: self.join.clone(),
            checks: self.verify(),
        }
    }

    /// Hasse diagram in DOT, edges pointing from smaller to larger.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph presubgroups {\n  rankdir=BT;\n");
        for (i, f) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  f{i} [label=\"f{i} [{}×{}]\"];", f.dim_up, f.dim_down);
        }
        for (i, j) in self.covering_edges() {
            let _ = writeln!(out, "  f{i} -> f{j};");
        }
        out.push_str("}\n");
        out
    }
}
