//! Subgroups, co-subgroups, normal subgroups, subquotients and normalizers.
//!
//! A pre-subgroup `f` is a subgroup when `L_f` is central in `S`, a
//! co-subgroup when `ρ_f` is central in `Ŝ`, and normal when both hold.
//! A subquotient is a subspace `H` with `V(H⊗H) = H⊗H`; it is always of the
//! form `H^f ∩ H_{f̂}` for a pair `f̂ ≺ f`.

use serde::Serialize;

use crate::error::{MuError, Result};
use crate::mu_core::{Check, MultiplicativeUnitary};
use crate::presub::{is_presubgroup, order_leq, PreSubgroup, PreSubgroupLattice};
use crate::tensorlin::{
    inner, kron_vec, null_space, projector_onto, projector_range, projector_rank, relative_commutant, swap,
    ComplexMatrix, C64,
};

fn decide(m: &MultiplicativeUnitary, residual: f64) -> bool {
    residual <= m.tol() * 10.0
}

/// `‖PVP − VP‖`: zero iff `V` maps the range of `P` onto itself.
fn invariance_residual(v: &ComplexMatrix, p: &ComplexMatrix) -> f64 {
    let vp = v.matmul(p);
    p.matmul(&vp).dist(&vp)
}

fn central_residual(alg: &crate::tensorlin::OperatorAlgebra, x: &ComplexMatrix) -> f64 {
    alg.basis().iter().map(|b| b.commutator(x).frobenius_norm()).fold(0.0, f64::max)
}

fn conj_by(u: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    u.matmul(x).matmul(&u.adjoint())
}

/// `max_x ‖[L_f, x]‖` over the basis of `S`.
pub fn subgroup_residual(m: &MultiplicativeUnitary, f: &PreSubgroup) -> f64 {
    central_residual(m.s(), f.l())
}

pub fn is_subgroup(m: &MultiplicativeUnitary, f: &PreSubgroup) -> bool {
    decide(m, subgroup_residual(m, f))
}

/// Residuals of the six equivalent co-subgroup conditions.
#[derive(Clone, Debug, Serialize)]
pub struct CosubgroupReport {
    /// `ρ_f` central in `Ŝ`.
    pub central: f64,
    /// `V(H_f⊗H) = H_f⊗H`.
    pub left_invariant: f64,
    /// `V(H_f⊗H_f) = H_f⊗H_f`.
    pub square_invariant: f64,
    /// `σ(δ(L_f)) = δ(L_f)`.
    pub flip_symmetric: f64,
    /// `UH_f = H_f`.
    pub u_invariant: f64,
    /// `dim D_f − dim G_f` plus the span distance; zero iff `D_f = G_f`.
    pub coideals_equal: f64,
    pub verdict: bool,
}

/// Evaluates every co-subgroup condition and errors if they disagree.
pub fn cosubgroup_report(m: &MultiplicativeUnitary, f: &PreSubgroup) -> Result<CosubgroupReport> {
    let n = m.n();
    let id = ComplexMatrix::identity(n);
    let rho = f.rho();
    let central = central_residual(m.s_hat(), rho);
    let left_invariant = invariance_residual(m.v(), &rho.kron(&id));
    let square_invariant = invariance_residual(m.v(), &rho.kron(rho));
    let delta = m.coproduct(f.l())?;
    let sw = swap(n);
    let flip_symmetric = sw.matmul(&delta).matmul(&sw).dist(&delta);
    let u_invariant = conj_by(m.u(), rho).dist(rho);
    let g_f = relative_commutant(m.s(), &[rho.clone()], m.tol());
    let d_f = relative_commutant(m.s(), &[conj_by(m.u(), rho)], m.tol());
    let coideals_equal = if g_f.dim() == d_f.dim() {
        g_f.inclusion_residual(&d_f).max(d_f.inclusion_residual(&g_f))
    } else {
        1.0
    };
    let verdicts = [central, left_invariant, square_invariant, flip_symmetric, u_invariant, coideals_equal]
        .map(|r| decide(m, r));
    if verdicts.iter().any(|&v| v != verdicts[0]) {
        return Err(MuError::invariant(format!("co-subgroup conditions disagree: {verdicts:?}"), 1.0));
    }
    Ok(CosubgroupReport {
        central,
        left_invariant,
        square_invariant,
        flip_symmetric,
        u_invariant,
        coideals_equal,
        verdict: verdicts[0],
    })
}

pub fn is_cosubgroup(m: &MultiplicativeUnitary, f: &PreSubgroup) -> Result<bool> {
    Ok(cosubgroup_report(m, f)?.verdict)
}

pub fn is_normal(m: &MultiplicativeUnitary, f: &PreSubgroup) -> Result<bool> {
    Ok(is_subgroup(m, f) && is_cosubgroup(m, f)?)
}

/// Residuals of the six equivalent subquotient conditions for `H = H^f ∩ H_{f̂}`.
#[derive(Clone, Debug, Serialize)]
pub struct SubquotientReport {
    /// `V(H⊗H) = H⊗H`.
    pub square: f64,
    /// `V(H⊗H^f) = H⊗H^f`.
    pub right_extended: f64,
    /// `V(H_{f̂}⊗H) = H_{f̂}⊗H`.
    pub left_extended: f64,
    /// `V(H_{f̂}⊗H^f) = H_{f̂}⊗H^f`.
    pub both_extended: f64,
    /// `V(f̂⊗f) ∈ H_{f̂}⊗H^f`.
    pub vector: f64,
    /// `UH = H`.
    pub u_invariant: f64,
    pub conditions: [bool; 6],
    pub verdict: bool,
}

/// Tests whether `H^f ∩ H_{f̂}` is a subquotient; requires `f̂ ≺ f`.
pub fn subquotient_test(m: &MultiplicativeUnitary, f_hat: &PreSubgroup, f: &PreSubgroup) -> Result<SubquotientReport> {
    if !order_leq(m, f_hat, f)? {
        return Err(MuError::Hypothesis("subquotient test needs f̂ ≺ f".into()));
    }
    let v = m.v();
    let p = f.l().matmul(f_hat.rho());
    let outer = f_hat.rho().kron(f.l());
    let w = v.apply(&kron_vec(f_hat.vector(), f.vector()));
    let outside = crate::tensorlin::vec_dist(&outer.apply(&w), &w);
    let report = [
        invariance_residual(v, &p.kron(&p)),
        invariance_residual(v, &p.kron(f.l())),
        invariance_residual(v, &f_hat.rho().kron(&p)),
        invariance_residual(v, &outer),
        outside,
        conj_by(m.u(), &p).dist(&p),
    ];
    let conditions = report.map(|r| decide(m, r));
    if conditions.iter().any(|&c| c != conditions[0]) {
        return Err(MuError::invariant(
            format!("subquotient conditions disagree: {conditions:?}, residuals {report:?}"),
            1.0,
        ));
    }
    Ok(SubquotientReport {
        square: report[0],
        right_extended: report[1],
        left_extended: report[2],
        both_extended: report[3],
        vector: report[4],
        u_invariant: report[5],
        conditions,
        verdict: conditions[0],
    })
}

/// A subquotient `H` with its pre-subgroups and the restricted unitary.
#[derive(Clone, Debug)]
pub struct SubquotientWitness {
    pub projector: ComplexMatrix,
    /// Orthonormal basis of `H`, the columns of the compression map.
    pub basis: Vec<Vec<C64>>,
    /// Fixed vector of the restriction, `H ⊂ H^f`.
    pub f: PreSubgroup,
    /// Cofixed vector of the restriction, `H ⊂ H_{f̂}`.
    pub f_hat: PreSubgroup,
    pub restricted: MultiplicativeUnitary,
}

/// The compression `(Q⊗Q)* V (Q⊗Q)` of `V` to `H⊗H`, canonicalized,
/// where `Q` has the given orthonormal basis of `H` as columns.
pub fn restrict_to_basis(m: &MultiplicativeUnitary, basis: &[Vec<C64>]) -> Result<MultiplicativeUnitary> {
    let n = m.n();
    if basis.is_empty() || basis.iter().any(|b| b.len() != n) {
        return Err(MuError::Dimension("basis vectors must be nonempty of length n".into()));
    }
    let q = ComplexMatrix::from_columns(n, basis);
    let qq = q.kron(&q);
    let iso = q.adjoint().matmul(&q).dist(&ComplexMatrix::identity(basis.len()));
    if iso > m.tol() {
        return Err(MuError::invariant("basis is orthonormal", iso));
    }
    let p = q.matmul(&q.adjoint());
    let r = invariance_residual(m.v(), &p.kron(&p));
    if r > m.tol() * 10.0 {
        return Err(MuError::Hypothesis(format!("V(H⊗H) ≠ H⊗H (residual {r:.3e})")));
    }
    let v_h = qq.adjoint().matmul(m.v()).matmul(&qq);
    let out = MultiplicativeUnitary::canonicalize(v_h, m.tol())?;
    let u_res = q.adjoint().matmul(m.u()).matmul(&q).dist(out.u());
    if u_res > m.tol() * 10.0 {
        return Err(MuError::invariant("U of the restriction is the restriction of U", u_res));
    }
    Ok(out)
}

/// Splits a subquotient projector into its pair `(f, f̂)` and restricted unitary.
pub fn subquotient_decompose(m: &MultiplicativeUnitary, p_h: &ComplexMatrix) -> Result<SubquotientWitness> {
    let basis = projector_range(p_h);
    if basis.is_empty() {
        return Err(MuError::Hypothesis("subquotient must be nonzero".into()));
    }
    let restricted = restrict_to_basis(m, &basis)?;
    let q = ComplexMatrix::from_columns(m.n(), &basis);
    let f = is_presubgroup(m, &q.apply(restricted.e()))?;
    let f_hat = is_presubgroup(m, &q.apply(restricted.e_hat()))?;
    let tol = m.tol() * 10.0;
    let cap = f.l().matmul(f_hat.rho()).dist(p_h);
    if cap > tol {
        return Err(MuError::invariant("H = H^f ∩ H_{f̂}", cap));
    }
    let c = inner(f.vector(), f_hat.vector()).re;
    let dim_law = (basis.len() as f64 * c * c - 1.0).abs();
    if dim_law > tol {
        return Err(MuError::invariant("dim H · ⟨f,f̂⟩² = 1", dim_law));
    }
    Ok(SubquotientWitness { projector: p_h.clone(), basis, f, f_hat, restricted })
}

/// Re-canonicalizes the restriction recorded in a witness.
pub fn restrict(m: &MultiplicativeUnitary, witness: &SubquotientWitness) -> Result<MultiplicativeUnitary> {
    restrict_to_basis(m, &witness.basis)
}

/// `{ξ ∈ ran(p) : (a⊗b) W (η⊗ξ) = 0 or (a⊗b) W (ξ⊗η) = 0 for η in a basis of ran(p)}`.
fn constrained_subspace(
    n: usize,
    space: &[Vec<C64>],
    w: &ComplexMatrix,
    kill: &ComplexMatrix,
    xi_first: bool,
    tol: f64,
) -> Vec<Vec<C64>> {
    let d = space.len();
    let mut stacked = ComplexMatrix::zeros(d * n * n, d);
    for (k, eta) in space.iter().enumerate() {
        for (j, xi) in space.iter().enumerate() {
            let arg = if xi_first { kron_vec(xi, eta) } else { kron_vec(eta, xi) };
            let col = kill.apply(&w.apply(&arg));
            for (r, z) in col.into_iter().enumerate() {
                stacked[(k * n * n + r, j)] = z;
            }
        }
    }
    let q = ComplexMatrix::from_columns(n, space);
    null_space(&stacked, tol).into_iter().map(|c| q.apply(&c)).collect()
}

fn subquotient_from_vectors(m: &MultiplicativeUnitary, vectors: &[Vec<C64>]) -> Result<SubquotientWitness> {
    subquotient_decompose(m, &projector_onto(m.n(), vectors, m.tol()))
}

/// The largest subquotient with cofixed vector `f`, `{ξ ∈ H_f : V*(H_f⊗ξ) ⊂ H_f⊗H}`.
pub fn largest_cofixed_subquotient(m: &MultiplicativeUnitary, f: &PreSubgroup) -> Result<SubquotientWitness> {
    let n = m.n();
    let id = ComplexMatrix::identity(n);
    let kill = (&id - f.rho()).kron(&id);
    let k = constrained_subspace(n, &projector_range(f.rho()), &m.v().adjoint(), &kill, false, m.tol());
    let w = subquotient_from_vectors(m, &k)?;
    let r = w.f_hat.distance(f);
    if r > m.tol() * 10.0 {
        return Err(MuError::invariant("cofixed vector of the largest subquotient is f", r));
    }
    Ok(w)
}

/// The largest subquotient with fixed vector `f`, `{ξ ∈ H^f : V(ξ⊗H^f) ⊂ H⊗H^f}`.
pub fn largest_fixed_subquotient(m: &MultiplicativeUnitary, f: &PreSubgroup) -> Result<SubquotientWitness> {
    let n = m.n();
    let id = ComplexMatrix::identity(n);
    let kill = id.kron(&(&id - f.l()));
    let k = constrained_subspace(n, &projector_range(f.l()), m.v(), &kill, true, m.tol());
    let w = subquotient_from_vectors(m, &k)?;
    let r = w.f.distance(f);
    if r > m.tol() * 10.0 {
        return Err(MuError::invariant("fixed vector of the largest subquotient is f", r));
    }
    Ok(w)
}

/// Fixed vector of the largest subquotient with cofixed vector `f`.
pub fn normalizer(m: &MultiplicativeUnitary, f: &PreSubgroup) -> Result<PreSubgroup> {
    Ok(largest_cofixed_subquotient(m, f)?.f)
}

/// Cofixed vector of the largest subquotient with fixed vector `f`.
pub fn conormalizer(m: &MultiplicativeUnitary, f: &PreSubgroup) -> Result<PreSubgroup> {
    Ok(largest_fixed_subquotient(m, f)?.f_hat)
}

/// Per-node flags, subquotient matrix and normalizer map over a lattice.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub nodes: Vec<NodeClass>,
    /// `subquotient[i][j]` for `nodes[i] ≺ nodes[j]`, otherwise `None`.
    pub subquotient: Vec<Vec<Option<bool>>>,
    pub counts: ClassCounts,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeClass {
    pub index: usize,
    pub subgroup: bool,
    pub cosubgroup: bool,
    pub normal: bool,
    pub normalizer: usize,
    pub conormalizer: usize,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClassCounts {
    pub presubgroups: usize,
    pub subgroups: usize,
    pub cosubgroups: usize,
    pub normal: usize,
}

/// Classifies every node of an enumerated lattice.
pub fn classify_lattice(m: &MultiplicativeUnitary, lat: &PreSubgroupLattice) -> Result<ClassificationReport> {
    let k = lat.len();
    let lookup = |f: &PreSubgroup| {
        lat.index_of(f.vector()).ok_or_else(|| MuError::invariant("normalizer is an enumerated node", 1.0))
    };
    let mut nodes = Vec::with_capacity(k);
    for (index, f) in lat.nodes().iter().enumerate() {
        let subgroup = is_subgroup(m, f);
        let cosubgroup = is_cosubgroup(m, f)?;
        nodes.push(NodeClass {
            index,
            subgroup,
            cosubgroup,
            normal: subgroup && cosubgroup,
            normalizer: lookup(&normalizer(m, f)?)?,
            conormalizer: lookup(&conormalizer(m, f)?)?,
        });
    }
    let mut subquotient = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            if lat.leq(i, j) {
                subquotient[i][j] = Some(subquotient_test(m, &lat.nodes()[i], &lat.nodes()[j])?.verdict);
            }
        }
    }
    let count = |p: &dyn Fn(&NodeClass) -> bool| nodes.iter().filter(|c| p(c)).count();
    let counts = ClassCounts {
        presubgroups: k,
        subgroups: count(&|c| c.subgroup),
        cosubgroups: count(&|c| c.cosubgroup),
        normal: count(&|c| c.normal),
    };
    let closed = |p: &dyn Fn(usize) -> bool| {
        (0..k).all(|i| (0..k).all(|j| !(p(i) && p(j)) || (p(lat.meet(i, j)) && p(lat.join(i, j)))))
    };
    let checks = vec![
        Check::flag("meets and joins of subgroups are subgroups", closed(&|i| nodes[i].subgroup)),
        Check::flag("meets and joins of co-subgroups are co-subgroups", closed(&|i| nodes[i].cosubgroup)),
        Check::flag(
            "normalizer lies above f",
            nodes.iter().all(|c| lat.leq(c.index, c.normalizer) && lat.leq(c.conormalizer, c.index)),
        ),
    ];
    Ok(ClassificationReport { nodes, subquotient, counts, checks })
}

/// Rank of `L_f ρ_{f̂}`, the dimension of `H^f ∩ H_{f̂}`.
pub fn intersection_dim(f_hat: &PreSubgroup, f: &PreSubgroup) -> Result<usize> {
    projector_rank(&f.l().matmul(f_hat.rho()))
}
