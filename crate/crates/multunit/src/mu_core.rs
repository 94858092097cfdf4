//! Validated multiplicative unitaries and their Hopf structure.
//!
//! [`MultiplicativeUnitary::canonicalize`] takes a unitary `V` on `H⊗H`
//! satisfying the pentagon equation with multiplicity one and extracts the
//! fixed vector `e`, the cofixed vector `ê`, the leg algebras `S` and `Ŝ`,
//! the antipodes, the unitary `U` and the antilinear conjugations `J`, `Ĵ`.
//! Everything is recomputed from `V`; nothing derived is trusted from disk.
//!
//! Antilinear maps are stored as the matrix `K` with `ξ ↦ K·conj(ξ)`.

use serde::{Deserialize, Serialize};

use crate::error::{MuError, Result};
use crate::tensorlin::{
    apply_on_legs, embed, inner, inverse_condition, kron_vec, leg_dim, normalized, pseudo_inverse, scaled,
    slice_first, slice_first_form, slice_leg, slice_second, slice_second_form, swap, ComplexMatrix,
    OperatorAlgebra, TensorIndex, C64,
};

/// A multiplicative unitary with multiplicity one and its cached structure.
#[derive(Clone, Debug)]
pub struct MultiplicativeUnitary {
    n: usize,
    tol: f64,
    v: ComplexMatrix,
    e: Vec<C64>,
    e_hat: Vec<C64>,
    s: OperatorAlgebra,
    s_hat: OperatorAlgebra,
    kappa: Vec<ComplexMatrix>,
    kappa_hat: Vec<ComplexMatrix>,
    u: ComplexMatrix,
    j: ComplexMatrix,
    j_hat: ComplexMatrix,
    v_hat: ComplexMatrix,
    v_tilde: ComplexMatrix,
}

/// On-disk form of a multiplicative unitary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitaryFile {
    pub n: usize,
    #[serde(rename = "V")]
    pub v: ComplexMatrix,
    pub tol: f64,
}

/// `‖V₁₂V₁₃V₂₃ − V₂₃V₁₂‖`.
pub fn pentagon_residual(v: &ComplexMatrix) -> Result<f64> {
    let n = leg_dim(v)?;
    let ctx = TensorIndex::new(3, n);
    let size = ctx.size();
    // Columns are processed in blocks of n² so memory stays at O(n⁵).
    let block = n * n;
    let mut sq = 0.0;
    for start in (0..size).step_by(block) {
        let cols = block.min(size - start);
        let id = ComplexMatrix::from_fn(size, cols, |r, c| if r == start + c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let v23 = apply_on_legs(v, &[2, 3], ctx, &id)?;
        let lhs = apply_on_legs(v, &[1, 2], ctx, &apply_on_legs(v, &[1, 3], ctx, &v23)?)?;
        let rhs = apply_on_legs(v, &[2, 3], ctx, &apply_on_legs(v, &[1, 2], ctx, &id)?)?;
        sq += lhs.dist(&rhs).powi(2);
    }
    Ok(sq.sqrt())
}

/// `ρ(τ) = (id⊗τ)(V)`, the projector onto the fixed vectors.
pub fn fixed_projector(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = leg_dim(v)?;
    slice_second_form(v, &ComplexMatrix::identity(n).scale_re(1.0 / n as f64))
}

/// `L(τ) = (τ⊗id)(V)`, the projector onto the cofixed vectors.
pub fn cofixed_projector(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = leg_dim(v)?;
    slice_first_form(v, &ComplexMatrix::identity(n).scale_re(1.0 / n as f64))
}

/// Rank of `ρ(τ)`, i.e. the dimension of the space of fixed vectors.
pub fn multiplicity(v: &ComplexMatrix) -> Result<usize> {
    let p = fixed_projector(v)?;
    let t = p.trace().re;
    if (t - t.round()).abs() > 1e-6 {
        return Err(MuError::invariant("fixed projector trace", (t - t.round()).abs()));
    }
    Ok(t.round() as usize)
}

/// `V ⊗ 1` on `(H⊗K)⊗(H⊗K)` with `dim K = m`, multiplicity `m`.
pub fn lift_with_multiplicity(v: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
    let n = leg_dim(v)?;
    // Legs (H, K, H, K) have unequal dimensions, so the embedding is written out.
    let nm = n * m;
    let mut out = ComplexMatrix::zeros(nm * nm, nm * nm);
    for a in 0..n {
        for c in 0..n {
            for b in 0..n {
                for d in 0..n {
                    let z = v[(a * n + c, b * n + d)];
                    if z == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for k in 0..m {
                        for l in 0..m {
                            let row = (a * m + k) * nm + c * m + l;
                            let col = (b * m + k) * nm + d * m + l;
                            out[(row, col)] = z;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Tensor product of two multiplicative unitaries on `H₁⊗H₂`.
pub fn tensor_product(v1: &ComplexMatrix, v2: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n1 = leg_dim(v1)?;
    let n2 = leg_dim(v2)?;
    let n = n1 * n2;
    let mut out = ComplexMatrix::zeros(n * n, n * n);
    for r1 in 0..n1 * n1 {
        for c1 in 0..n1 * n1 {
            let z1 = v1[(r1, c1)];
            if z1 == C64::new(0.0, 0.0) {
                continue;
            }
            let (a1, b1, a2, b2) = (r1 / n1, r1 % n1, c1 / n1, c1 % n1);
            for r2 in 0..n2 * n2 {
                for c2 in 0..n2 * n2 {
                    let z2 = v2[(r2, c2)];
                    if z2 == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let (p1, q1, p2, q2) = (r2 / n2, r2 % n2, c2 / n2, c2 % n2);
                    let row = (a1 * n2 + p1) * n + b1 * n2 + q1;
                    let col = (a2 * n2 + p2) * n + b2 * n2 + q2;
                    out[(row, col)] = z1 * z2;
                }
            }
        }
    }
    Ok(out)
}

/// Fixes the global phase so the first largest-modulus coordinate is real positive.
pub fn fix_phase(v: &[C64]) -> Vec<C64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lead = v.iter().find(|z| z.norm() >= max - 1e-9).copied().unwrap_or(C64::new(1.0, 0.0));
    scaled(v, (lead.conj() / lead.norm()).into())
}

fn unit_column(p: &ComplexMatrix) -> Vec<C64> {
    let cols = p.columns();
    let best = cols
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| crate::tensorlin::norm(a).total_cmp(&crate::tensorlin::norm(b)).then(j.cmp(i)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    normalized(&cols[best])
}

/// Block `(i, j)` of an operator on `H⊗H`, i.e. `(ω_{δi,δj}⊗id)(v)`.
fn first_leg_block(v: &ComplexMatrix, n: usize, i: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |a, b| v[(i * n + a, j * n + b)])
}

/// `(id⊗ω_{δi,δj})(v)`.
fn second_leg_block(v: &ComplexMatrix, n: usize, i: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |a, b| v[(a * n + i, b * n + j)])
}

/// Matrices of the linear maps `ω_{δi,δj} ↦ slice(v)` and `↦ slice(v*)`, one column per `(i, j)`.
fn generating_maps(
    v: &ComplexMatrix,
    n: usize,
    block: fn(&ComplexMatrix, usize, usize, usize) -> ComplexMatrix,
) -> (Vec<ComplexMatrix>, ComplexMatrix, ComplexMatrix) {
    let va = v.adjoint();
    let mut slices = Vec::with_capacity(n * n);
    let mut g = ComplexMatrix::zeros(n * n, n * n);
    let mut g_adj = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let col = i * n + j;
            let b = block(v, n, i, j);
            let ba = block(&va, n, i, j);
            for (r, z) in b.entries().iter().enumerate() {
                g[(r, col)] = *z;
            }
            for (r, z) in ba.entries().iter().enumerate() {
                g_adj[(r, col)] = *z;
            }
            slices.push(b);
        }
    }
    (slices, g, g_adj)
}

/// Images of an algebra basis under `slice(ω) ↦ slice*(ω)`, via the pseudo-inverse of the generating map.
fn transport_basis(
    basis: &[ComplexMatrix],
    g: &ComplexMatrix,
    g_adj: &ComplexMatrix,
    n: usize,
    tol: f64,
    name: &str,
) -> Result<Vec<ComplexMatrix>> {
    let pinv = pseudo_inverse(g, tol);
    // Well-definedness: everything killed by the generating map is killed by its mirror.
    let kernel_part = &ComplexMatrix::identity(n * n) - &pinv.matmul(g);
    let wd = g_adj.matmul(&kernel_part).frobenius_norm();
    if wd > tol * 10.0 {
        return Err(MuError::invariant(format!("{name} well-definedness"), wd));
    }
    let mut out = Vec::with_capacity(basis.len());
    for b in basis {
        let c = pinv.apply(b.entries());
        let recon = g.apply(&c);
        let r = crate::tensorlin::vec_dist(&recon, b.entries());
        if r > tol * 10.0 {
            return Err(MuError::invariant(format!("{name} reconstruction"), r));
        }
        out.push(ComplexMatrix::from_row_major(n, n, g_adj.apply(&c))?);
    }
    Ok(out)
}

/// Solves `M·X = Y` column by column where `X` has columns `xs`.
fn solve_on_basis(xs: &[Vec<C64>], ys: &[Vec<C64>], dim: usize, name: &str) -> Result<ComplexMatrix> {
    let x = ComplexMatrix::from_columns(dim, xs);
    if inverse_condition(&x) < 1e-10 {
        return Err(MuError::Singular(format!("{name}: basis is not separating")));
    }
    let xinv = x.inverse().ok_or_else(|| MuError::Singular(name.to_string()))?;
    Ok(ComplexMatrix::from_columns(dim, ys).matmul(&xinv))
}

/// Matrix `K` of the antilinear map `x_k f ↦ x_k* f`, as `ξ ↦ K·conj(ξ)`.
pub fn conjugation_matrix(basis: &[ComplexMatrix], f: &[C64], name: &str) -> Result<ComplexMatrix> {
    let n = f.len();
    let xs: Vec<Vec<C64>> = basis.iter().map(|b| crate::tensorlin::conj_vec(&b.apply(f))).collect();
    let ys: Vec<Vec<C64>> = basis.iter().map(|b| b.adjoint().apply(f)).collect();
    solve_on_basis(&xs, &ys, n, name)
}

/// `J₁∘J₂` for antilinear maps stored as `K₁`, `K₂`.
pub fn compose_antilinear(k1: &ComplexMatrix, k2: &ComplexMatrix) -> ComplexMatrix {
    k1.matmul(&k2.conj())
}

/// Applies an antilinear map stored as `K`.
pub fn apply_antilinear(k: &ComplexMatrix, xi: &[C64]) -> Vec<C64> {
    k.apply(&crate::tensorlin::conj_vec(xi))
}

/// `(A⊗1)` on `H⊗H`.
fn on_first(a: &ComplexMatrix) -> ComplexMatrix {
    a.kron(&ComplexMatrix::identity(a.rows()))
}

/// `(1⊗A)` on `H⊗H`.
fn on_second(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::identity(a.rows()).kron(a)
}

/// Outcome of the positivity / centrality / symmetry tests on `F(x)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FourierConeReport {
    pub positive: bool,
    pub central: bool,
    pub coproduct_symmetric: bool,
    pub min_eigenvalue: f64,
    pub centrality_residual: f64,
    pub symmetry_residual: f64,
}

/// A named residual compared against a tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Check { name: name.into(), residual, tol, pass: residual <= tol }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Check { name: name.into(), residual: if pass { 0.0 } else { 1.0 }, tol: 0.0, pass }
    }
}

impl MultiplicativeUnitary {
    /// Validates `v` and builds the canonical structure.
    pub fn canonicalize(v: ComplexMatrix, tol: f64) -> Result<Self> {
        let n = leg_dim(&v)?;
        let ur = v.unitarity_residual();
        if ur > tol {
            return Err(MuError::NotUnitary { residual: ur });
        }
        let pent = pentagon_residual(&v)?;
        if pent > tol {
            return Err(MuError::invariant("pentagon", pent));
        }
        let m = multiplicity(&v)?;
        if m != 1 {
            return Err(MuError::Multiplicity(m));
        }

        let e = fix_phase(&unit_column(&fixed_projector(&v)?));
        let mut e_hat = unit_column(&cofixed_projector(&v)?);
        let overlap = inner(&e, &e_hat);
        let target = 1.0 / (n as f64).sqrt();
        if (overlap.norm() - target).abs() > tol {
            return Err(MuError::invariant("<e, ê> = n^{-1/2}", (overlap.norm() - target).abs()));
        }
        e_hat = scaled(&e_hat, overlap / overlap.norm());

        let (first, g, g_adj) = generating_maps(&v, n, first_leg_block);
        let (second, gh, gh_adj) = generating_maps(&v, n, second_leg_block);
        let s = OperatorAlgebra::span(n, &first, tol)?;
        let s_hat = OperatorAlgebra::span(n, &second, tol)?;
        if s.dim() != n || s_hat.dim() != n {
            return Err(MuError::invariant(
                format!("leg algebra dimensions ({}, {}) != n = {n}", s.dim(), s_hat.dim()),
                1.0,
            ));
        }
        let kappa = transport_basis(s.basis(), &g, &g_adj, n, tol, "antipode")?;
        let kappa_hat = transport_basis(s_hat.basis(), &gh, &gh_adj, n, tol, "dual antipode")?;

        let xs: Vec<Vec<C64>> = s.basis().iter().map(|b| b.apply(&e)).collect();
        let ys: Vec<Vec<C64>> = kappa.iter().map(|k| k.apply(&e)).collect();
        let u = solve_on_basis(&xs, &ys, n, "U")?;
        let j = conjugation_matrix(s.basis(), &e, "J")?;
        // Ĵ = J∘U: ξ ↦ K_J·conj(Uξ) = (K_J·conj(U))·conj(ξ).
        let j_hat = j.matmul(&u.conj());

        let sw = swap(n);
        let u1 = on_first(&u);
        let v_hat = sw.matmul(&u1).matmul(&v).matmul(&u1).matmul(&sw);
        let v_tilde = u1.matmul(&sw).matmul(&v).matmul(&sw).matmul(&u1);

        let mu = MultiplicativeUnitary { n, tol, v, e, e_hat, s, s_hat, kappa, kappa_hat, u, j, j_hat, v_hat, v_tilde };
        for c in mu.structural_checks()? {
            if !c.pass {
                return Err(MuError::invariant(c.name, c.residual));
            }
        }
        Ok(mu)
    }

    pub fn from_file(file: UnitaryFile) -> Result<Self> {
        if file.v.rows() != file.n * file.n {
            return Err(MuError::Dimension(format!("n = {} but V has {} rows", file.n, file.v.rows())));
        }
        Self::canonicalize(file.v, file.tol)
    }

    pub fn to_file(&self) -> UnitaryFile {
        UnitaryFile { n: self.n, v: self.v.clone(), tol: self.tol }
    }

    /// Invariants asserted at construction.
    fn structural_checks(&self) -> Result<Vec<Check>> {
        let n = self.n;
        let tol = self.tol;
        let id = ComplexMatrix::identity(n);
        let mut out = vec![
            Check::new("U unitary", self.u.unitarity_residual(), tol),
            Check::new("U^2 = 1", self.u.matmul(&self.u).dist(&id), tol),
            Check::new("Ue = e", crate::tensorlin::vec_dist(&self.u.apply(&self.e), &self.e), tol),
            Check::new("Uê = ê", crate::tensorlin::vec_dist(&self.u.apply(&self.e_hat), &self.e_hat), tol),
            Check::new("J^2 = 1", compose_antilinear(&self.j, &self.j).dist(&id), tol),
            Check::new("Ĵ^2 = 1", compose_antilinear(&self.j_hat, &self.j_hat).dist(&id), tol),
            Check::new("JĴ = U", compose_antilinear(&self.j, &self.j_hat).dist(&self.u), tol),
            Check::new("ĴJ = U", compose_antilinear(&self.j_hat, &self.j).dist(&self.u), tol),
        ];
        let k = self.j.kron(&self.j_hat);
        let conj_v = k.matmul(&self.v.conj()).matmul(&k.conj());
        out.push(Check::new("(J⊗Ĵ)V(J⊗Ĵ) = V*", conj_v.dist(&self.v.adjoint()), tol));
        let mut fact: f64 = 0.0;
        for x in self.s.basis() {
            for y in self.s_hat.basis() {
                let d = x.matmul(y).normalized_trace() - x.normalized_trace() * y.normalized_trace();
                fact = fact.max(d.norm());
            }
        }
        out.push(Check::new("τ(xy) = τ(x)τ(y)", fact, tol));
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    /// Fixed vector `e`.
    pub fn e(&self) -> &[C64] {
        &self.e
    }

    /// Cofixed vector `ê`.
    pub fn e_hat(&self) -> &[C64] {
        &self.e_hat
    }

    /// First-leg algebra `S = span{(ω⊗id)(V)}`.
    pub fn s(&self) -> &OperatorAlgebra {
        &self.s
    }

    /// Second-leg algebra `Ŝ = span{(id⊗ω)(V)}`.
    pub fn s_hat(&self) -> &OperatorAlgebra {
        &self.s_hat
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    /// `J` as `ξ ↦ K·conj(ξ)`.
    pub fn j(&self) -> &ComplexMatrix {
        &self.j
    }

    /// `Ĵ` as `ξ ↦ K·conj(ξ)`.
    pub fn j_hat(&self) -> &ComplexMatrix {
        &self.j_hat
    }

    /// `(U, J, Ĵ)`.
    pub fn modular_maps(&self) -> (&ComplexMatrix, &ComplexMatrix, &ComplexMatrix) {
        (&self.u, &self.j, &self.j_hat)
    }

    /// `(V̂, Ṽ)`.
    pub fn derived_unitaries(&self) -> (&ComplexMatrix, &ComplexMatrix) {
        (&self.v_hat, &self.v_tilde)
    }

    pub fn v_hat(&self) -> &ComplexMatrix {
        &self.v_hat
    }

    pub fn v_tilde(&self) -> &ComplexMatrix {
        &self.v_tilde
    }

    /// The canonicalized opposite unitary `ΣV*Σ`, which swaps the roles of `e` and `ê`.
    pub fn opposite(&self) -> Result<MultiplicativeUnitary> {
        let sw = swap(self.n);
        MultiplicativeUnitary::canonicalize(sw.matmul(&self.v.adjoint()).matmul(&sw), self.tol)
    }

    /// Membership tolerance for an element of norm `‖x‖`.
    pub fn member_tol(&self, x: &ComplexMatrix) -> f64 {
        self.tol * x.frobenius_norm().max(1.0)
    }

    fn require_in(&self, alg: &OperatorAlgebra, x: &ComplexMatrix, name: &str) -> Result<Vec<C64>> {
        if x.rows() != self.n || x.cols() != self.n {
            return Err(MuError::Dimension(format!("expected a {0}x{0} matrix", self.n)));
        }
        let r = alg.membership_residual(x);
        if r > self.member_tol(x) {
            return Err(MuError::Membership { algebra: name.into(), residual: r });
        }
        Ok(alg.coefficients(x))
    }

    /// `L(ω_{ξ,η})`.
    pub fn l(&self, xi: &[C64], eta: &[C64]) -> Result<ComplexMatrix> {
        slice_first(&self.v, xi, eta)
    }

    /// `ρ(ω_{ξ,η})`.
    pub fn rho(&self, xi: &[C64], eta: &[C64]) -> Result<ComplexMatrix> {
        slice_second(&self.v, xi, eta)
    }

    /// `θ_{e,e} = ρ(τ)`.
    pub fn theta_e(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.e, &self.e)
    }

    /// `θ_{ê,ê} = L(τ)`.
    pub fn theta_e_hat(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.e_hat, &self.e_hat)
    }

    /// `δ(x) = V(x⊗1)V*`.
    pub fn coproduct(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.require_in(&self.s, x, "S")?;
        Ok(self.v.matmul(&on_first(x)).matmul(&self.v.adjoint()))
    }

    /// `δ̂(y) = V*(1⊗y)V`.
    pub fn dual_coproduct(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.require_in(&self.s_hat, y, "Ŝ")?;
        Ok(self.v.adjoint().matmul(&on_second(y)).matmul(&self.v))
    }

    /// `κ(L(ω)) = (ω⊗id)(V*)`.
    pub fn antipode(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let c = self.require_in(&self.s, x, "S")?;
        Ok(combine(self.n, &c, &self.kappa))
    }

    /// `κ̂(ρ(ω)) = (id⊗ω)(V*)`.
    pub fn antipode_hat(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        let c = self.require_in(&self.s_hat, y, "Ŝ")?;
        Ok(combine(self.n, &c, &self.kappa_hat))
    }

    /// `F(x) = n^{1/2} ρ(ω_{e,xe})`.
    pub fn fourier(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.require_in(&self.s, x, "S")?;
        Ok(self.rho(&self.e, &x.apply(&self.e))?.scale_re((self.n as f64).sqrt()))
    }

    /// `F̂(y) = n^{1/2} L(ω_{ê,yê})`.
    pub fn fourier_hat(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.require_in(&self.s_hat, y, "Ŝ")?;
        Ok(self.l(&self.e_hat, &y.apply(&self.e_hat))?.scale_re((self.n as f64).sqrt()))
    }

    /// `β(x, y) = n^{1/2}⟨ê, yxe⟩`.
    pub fn pairing(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> Result<C64> {
        self.require_in(&self.s, x, "S")?;
        self.require_in(&self.s_hat, y, "Ŝ")?;
        Ok(inner(&self.e_hat, &y.apply(&x.apply(&self.e))) * (self.n as f64).sqrt())
    }

    /// `(β⊗β)(X, Y) = n⟨ê⊗ê, Y X (e⊗e)⟩` for `X ∈ S⊗S`, `Y ∈ Ŝ⊗Ŝ`.
    pub fn pairing2(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> C64 {
        let ee = kron_vec(&self.e, &self.e);
        let hh = kron_vec(&self.e_hat, &self.e_hat);
        inner(&hh, &y.apply(&x.apply(&ee))) * self.n as f64
    }

    /// `ε(x) = n^{1/2}⟨ê, xe⟩`.
    pub fn counit(&self, x: &ComplexMatrix) -> Result<C64> {
        self.require_in(&self.s, x, "S")?;
        Ok(inner(&self.e_hat, &x.apply(&self.e)) * (self.n as f64).sqrt())
    }

    /// `E_S(T) = (id⊗ω_{ê,ê})(V̂*(1⊗T)V̂)`.
    pub fn cond_expect_s(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_square(t)?;
        let inner_op = self.v_hat.adjoint().matmul(&on_second(t)).matmul(&self.v_hat);
        slice_second(&inner_op, &self.e_hat, &self.e_hat)
    }

    /// `E_Ŝ(T) = (id⊗ω_{e,e})(V*(1⊗T)V)`.
    pub fn cond_expect_s_hat(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_square(t)?;
        let inner_op = self.v.adjoint().matmul(&on_second(t)).matmul(&self.v);
        slice_second(&inner_op, &self.e, &self.e)
    }

    fn check_square(&self, t: &ComplexMatrix) -> Result<()> {
        if t.rows() != self.n || t.cols() != self.n {
            return Err(MuError::Dimension(format!("expected a {0}x{0} matrix", self.n)));
        }
        Ok(())
    }

    /// Positivity and centrality of `ρ(ω_{e,xe})` and flip symmetry of `δ(x)`.
    pub fn fourier_cone_tests(&self, x: &ComplexMatrix) -> Result<FourierConeReport> {
        let scale = x.frobenius_norm().max(1.0);
        let tol = self.tol * scale;
        let f = self.rho(&self.e, &x.apply(&self.e))?;
        let (vals, _) = crate::tensorlin::hermitian_eigen(&f);
        let min_eigenvalue = vals.last().copied().unwrap_or(0.0);
        let positive = f.selfadjoint_residual() <= tol && min_eigenvalue >= -tol;
        let centrality_residual =
            self.s_hat.basis().iter().map(|y| f.commutator(y).frobenius_norm()).fold(0.0, f64::max);
        let d = self.coproduct(x)?;
        let sw = swap(self.n);
        let symmetry_residual = d.dist(&sw.matmul(&d).matmul(&sw));
        let central = centrality_residual <= tol;
        let coproduct_symmetric = symmetry_residual <= tol;
        if central != coproduct_symmetric {
            return Err(MuError::invariant(
                "centrality of F(x) and symmetry of δ(x) disagree",
                centrality_residual.min(symmetry_residual),
            ));
        }
        Ok(FourierConeReport { positive, central, coproduct_symmetric, min_eigenvalue, centrality_residual, symmetry_residual })
    }

    /// The full residual suite for this unitary.
    pub fn verify_suite(&self) -> Result<Vec<Check>> {
        let n = self.n;
        let tol = self.tol;
        let sqrt_n = (n as f64).sqrt();
        let id = ComplexMatrix::identity(n);
        let mut out = vec![
            Check::new("V unitary", self.v.unitarity_residual(), tol),
            Check::new("pentagon", pentagon_residual(&self.v)?, tol),
            Check::new("multiplicity 1", (multiplicity(&self.v)? as f64 - 1.0).abs(), 0.0),
            Check::new("<e, ê> = n^{-1/2}", (inner(&self.e, &self.e_hat) - C64::new(1.0 / sqrt_n, 0.0)).norm(), tol),
            Check::new("dim S = n", (self.s.dim() as f64 - n as f64).abs(), 0.0),
            Check::new("dim Ŝ = n", (self.s_hat.dim() as f64 - n as f64).abs(), 0.0),
        ];
        let sc = self.s.closure();
        let shc = self.s_hat.closure();
        out.push(Check::new("S is a unital *-algebra", sc.unital.max(sc.product).max(sc.adjoint), tol));
        out.push(Check::new("Ŝ is a unital *-algebra", shc.unital.max(shc.product).max(shc.adjoint), tol));
        out.extend(self.structural_checks()?);

        let (v_hat, v_tilde) = self.derived_unitaries();
        out.push(Check::new("pentagon V̂", pentagon_residual(v_hat)?, tol));
        out.push(Check::new("pentagon Ṽ", pentagon_residual(v_tilde)?, tol));
        let sw = swap(n);
        let ident = sw.matmul(v_hat).matmul(&self.v).matmul(v_tilde).matmul(&on_second(&self.u));
        out.push(Check::new("ΣV̂VṼ(1⊗U) = 1", ident.dist(&ComplexMatrix::identity(n * n)), tol));

        let tau = id.scale_re(1.0 / n as f64);
        let mut haar: f64 = 0.0;
        let mut kappa_anti: f64 = 0.0;
        let mut kappa_inv: f64 = 0.0;
        let mut kappa_star: f64 = 0.0;
        let mut fourier_kappa: f64 = 0.0;
        let mut fourier_u: f64 = 0.0;
        let mut recon: f64 = 0.0;
        let mut cond: f64 = 0.0;
        let mut cond_alt: f64 = 0.0;
        let mut l_xtau: f64 = 0.0;
        let mut counit_mult: f64 = 0.0;
        let mut kappa_formula: f64 = 0.0;
        for x in self.s.basis() {
            let d = self.coproduct(x)?;
            let tx = x.normalized_trace();
            let left = slice_second_form(&d, &tau)?;
            let right = slice_first_form(&d, &tau)?;
            haar = haar.max(left.dist(&id.scale(tx))).max(right.dist(&id.scale(tx)));
            let kx = self.antipode(x)?;
            kappa_inv = kappa_inv.max(self.antipode(&kx)?.dist(x));
            kappa_star = kappa_star.max(self.antipode(&x.adjoint())?.dist(&kx.adjoint()));
            fourier_kappa = fourier_kappa.max(self.fourier_hat(&self.fourier(x)?)?.dist(&kx));
            let fx = self.fourier(x)?;
            fourier_u = fourier_u.max(crate::tensorlin::vec_dist(
                &fx.apply(&self.e_hat),
                &self.u.apply(&x.apply(&self.e)),
            ));
            recon = recon.max(self.l(&self.e_hat, &x.apply(&self.e))?.scale_re(sqrt_n).dist(x));
            kappa_formula = kappa_formula
                .max(slice_first(&self.v.adjoint(), &self.e_hat, &x.apply(&self.e))?.scale_re(sqrt_n).dist(&kx));
            cond = cond.max(self.cond_expect_s(x)?.dist(x));
            let alt = self.v.matmul(&on_first(x)).matmul(&self.v.adjoint());
            cond_alt = cond_alt.max(slice_first(&alt, &self.e_hat, &self.e_hat)?.dist(x));
            l_xtau = l_xtau.max(slice_first_form(&self.v, &x.scale_re(1.0 / n as f64))?.dist(&self.theta_e_hat().scale(tx)));
            for x2 in self.s.basis() {
                let prod = x.matmul(x2);
                kappa_anti = kappa_anti.max(self.antipode(&prod)?.dist(&self.antipode(x2)?.matmul(&kx)));
                counit_mult = counit_mult.max((self.counit(&prod)? - self.counit(x)? * self.counit(x2)?).norm());
            }
        }
        out.push(Check::new("Haar (id⊗τ)δ = (τ⊗id)δ = τ", haar, tol));
        out.push(Check::new("κ(xy) = κ(y)κ(x)", kappa_anti, tol));
        out.push(Check::new("κ² = id", kappa_inv, tol));
        out.push(Check::new("κ(x*) = κ(x)*", kappa_star, tol));
        out.push(Check::new("κ(x) = n^{1/2}(ω_{ê,xe}⊗id)(V*)", kappa_formula, tol));
        out.push(Check::new("F̂∘F = κ", fourier_kappa, tol));
        out.push(Check::new("F(x)ê = Uxe", fourier_u, tol));
        out.push(Check::new("x = n^{1/2}L(ω_{ê,xe})", recon, tol));
        out.push(Check::new("E_S(x) = x", cond, tol));
        out.push(Check::new("(ω_{ê,ê}⊗id)(V(x⊗1)V*) = x", cond_alt, tol));
        out.push(Check::new("L(xτ) = τ(x)θ_{ê,ê}", l_xtau, tol));
        out.push(Check::new("ε multiplicative", counit_mult, tol));

        let mut dual_haar: f64 = 0.0;
        let mut dual_kappa: f64 = 0.0;
        let mut dual_fourier: f64 = 0.0;
        let mut dual_u: f64 = 0.0;
        let mut dual_cond: f64 = 0.0;
        let mut rho_ytau: f64 = 0.0;
        for y in self.s_hat.basis() {
            let d = self.dual_coproduct(y)?;
            let ty = y.normalized_trace();
            let left = slice_second_form(&d, &tau)?;
            let right = slice_first_form(&d, &tau)?;
            dual_haar = dual_haar.max(left.dist(&id.scale(ty))).max(right.dist(&id.scale(ty)));
            let ky = self.antipode_hat(y)?;
            dual_kappa = dual_kappa.max(self.antipode_hat(&ky)?.dist(y));
            dual_fourier = dual_fourier.max(self.fourier(&self.fourier_hat(y)?)?.dist(&ky));
            dual_u = dual_u.max(crate::tensorlin::vec_dist(&ky.apply(&self.e_hat), &self.u.apply(&y.apply(&self.e_hat))));
            dual_cond = dual_cond.max(self.cond_expect_s_hat(y)?.dist(y));
            rho_ytau = rho_ytau.max(slice_second_form(&self.v, &y.scale_re(1.0 / n as f64))?.dist(&self.theta_e().scale(ty)));
        }
        out.push(Check::new("Haar (id⊗τ)δ̂ = (τ⊗id)δ̂ = τ", dual_haar, tol));
        out.push(Check::new("κ̂² = id", dual_kappa, tol));
        out.push(Check::new("F∘F̂ = κ̂", dual_fourier, tol));
        out.push(Check::new("κ̂(y)ê = Uyê", dual_u, tol));
        out.push(Check::new("E_Ŝ(y) = y", dual_cond, tol));
        out.push(Check::new("ρ(yτ) = τ(y)θ_{e,e}", rho_ytau, tol));

        // Conditional expectations agree with the τ-orthogonal projections on a generic operator.
        let probe = ComplexMatrix::from_fn(n, n, |a, b| C64::new(((3 * a + 5 * b) % 7) as f64 - 3.0, ((a * b) % 5) as f64 - 2.0));
        out.push(Check::new("E_S = τ-projection onto S", self.cond_expect_s(&probe)?.dist(&self.s.project(&probe)), tol * 10.0));
        out.push(Check::new("E_Ŝ = τ-projection onto Ŝ", self.cond_expect_s_hat(&probe)?.dist(&self.s_hat.project(&probe)), tol * 10.0));

        let mut beta1: f64 = 0.0;
        let mut beta2: f64 = 0.0;
        for x in self.s.basis() {
            for x2 in self.s.basis() {
                for y in self.s_hat.basis() {
                    let lhs = self.pairing(&x.matmul(x2), y)?;
                    let rhs = self.pairing2(&x.kron(x2), &self.dual_coproduct(y)?);
                    beta1 = beta1.max((lhs - rhs).norm());
                }
            }
            for y in self.s_hat.basis() {
                for y2 in self.s_hat.basis() {
                    let lhs = self.pairing(x, &y.matmul(y2))?;
                    let rhs = self.pairing2(&self.coproduct(x)?, &y.kron(y2));
                    beta2 = beta2.max((lhs - rhs).norm());
                }
            }
        }
        out.push(Check::new("β(xx', y) = (β⊗β)(x⊗x', δ̂(y))", beta1, tol));
        out.push(Check::new("β(x, yy') = (β⊗β)(δ(x), y⊗y')", beta2, tol));

        let ctx = TensorIndex::new(3, n);
        let v12 = embed(&self.v, &[1, 2], ctx)?;
        let v23 = embed(&self.v, &[2, 3], ctx)?;
        let target = self.theta_e().kron(&self.theta_e_hat());
        let mid12 = slice_leg(&v12.matmul(&v23), ctx, 2, &tau)?;
        let mid21 = slice_leg(&v23.matmul(&v12), ctx, 2, &tau)?;
        out.push(Check::new("(id⊗τ⊗id)(V₁₂V₂₃) = θ_{e,e}⊗θ_{ê,ê}", mid12.dist(&target).max(mid21.dist(&target)), tol));

        let mut jl: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let xi = crate::tensorlin::basis_vector(n, a);
                let eta = crate::tensorlin::basis_vector(n, b);
                let l = self.l(&xi, &eta)?;
                let lj = self.l(&apply_antilinear(&self.j, &xi), &apply_antilinear(&self.j, &eta))?;
                let r = self.rho(&xi, &eta)?;
                let rj = self.rho(&apply_antilinear(&self.j_hat, &xi), &apply_antilinear(&self.j_hat, &eta))?;
                jl = jl.max(l.adjoint().dist(&lj)).max(r.adjoint().dist(&rj));
            }
        }
        out.push(Check::new("L(ω_{ξ,η})* = L(ω_{Jξ,Jη}), ρ likewise with Ĵ", jl, tol));

        let quad = from_quadruple(&self.s, &self.s_hat, &self.e, &self.e_hat, tol)?;
        out.push(Check::new("from_quadruple(S, Ŝ, e, ê) = V", quad.v.dist(&self.v), tol));
        Ok(out)
    }

    /// `dim pH · dim qH`, `n · dim(pH∩qH)` and `n²‖pe‖²‖qê‖²` for commuting projectors `p ∈ S`, `q ∈ Ŝ`.
    pub fn projector_dimensions(&self, p: &ComplexMatrix, q: &ComplexMatrix) -> Result<[f64; 3]> {
        self.require_in(&self.s, p, "S")?;
        self.require_in(&self.s_hat, q, "Ŝ")?;
        let c = p.commutator(q).frobenius_norm();
        if c > self.tol {
            return Err(MuError::Hypothesis(format!("projectors do not commute ({c:.3e})")));
        }
        let n = self.n as f64;
        let a = p.trace().re * q.trace().re;
        let b = n * p.matmul(q).trace().re;
        let pe = crate::tensorlin::norm(&p.apply(&self.e));
        let qe = crate::tensorlin::norm(&q.apply(&self.e_hat));
        Ok([a, b, n * n * pe * pe * qe * qe])
    }
}

fn combine(n: usize, coef: &[C64], images: &[ComplexMatrix]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, n);
    for (c, m) in coef.iter().zip(images) {
        out += &m.scale(*c);
    }
    out
}

/// Builds the multiplicative unitary attached to two commuting-trace leg algebras.
///
/// `A` becomes the first-leg algebra, `B` the second-leg algebra, `f` the
/// fixed vector and `f̂` the cofixed vector of the result. The unitary is
/// `W = Z'*Z` where `Z(af⊗bf̂) = Λ(ab)` and `Z'(af⊗bf̂) = Λ(ba)` with `Λ` the
/// GNS map of `τ`.
pub fn from_quadruple(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
    f: &[C64],
    f_hat: &[C64],
    tol: f64,
) -> Result<MultiplicativeUnitary> {
    let n = a.dim_h();
    if b.dim_h() != n || f.len() != n || f_hat.len() != n {
        return Err(MuError::Dimension("quadruple pieces act on different spaces".into()));
    }
    if a.dim() != n || b.dim() != n {
        return Err(MuError::Hypothesis(format!("dim A = {}, dim B = {}, need {n}", a.dim(), b.dim())));
    }
    let f = normalized(f);
    let mut f_hat = normalized(f_hat);
    let overlap = inner(&f_hat, &f);
    let target = 1.0 / (n as f64).sqrt();
    if (overlap.norm() - target).abs() > tol {
        return Err(MuError::Hypothesis(format!("|<f̂, f>| = {:.6} != n^(-1/2)", overlap.norm())));
    }
    f_hat = scaled(&f_hat, overlap / overlap.norm());

    let mut fact: f64 = 0.0;
    for x in a.basis() {
        for y in b.basis() {
            let d = x.matmul(y).normalized_trace() - x.normalized_trace() * y.normalized_trace();
            fact = fact.max(d.norm());
        }
    }
    if fact > tol {
        return Err(MuError::Hypothesis(format!("τ(ab) != τ(a)τ(b) (residual {fact:.3e})")));
    }
    let ra = a.membership_residual(&ComplexMatrix::outer(&f_hat, &f_hat));
    if ra > tol {
        return Err(MuError::Hypothesis(format!("θ_{{f̂,f̂}} not in A (residual {ra:.3e})")));
    }
    let rb = b.membership_residual(&ComplexMatrix::outer(&f, &f));
    if rb > tol {
        return Err(MuError::Hypothesis(format!("θ_{{f,f}} not in B (residual {rb:.3e})")));
    }

    let inv_sqrt = 1.0 / (n as f64).sqrt();
    let mut xs = Vec::with_capacity(n * n);
    let mut ys = Vec::with_capacity(n * n);
    let mut ys_rev = Vec::with_capacity(n * n);
    for x in a.basis() {
        let xf = x.apply(&f);
        for y in b.basis() {
            xs.push(kron_vec(&xf, &y.apply(&f_hat)));
            ys.push(scaled(x.matmul(y).entries(), inv_sqrt.into()));
            ys_rev.push(scaled(y.matmul(x).entries(), inv_sqrt.into()));
        }
    }
    let z = solve_on_basis(&xs, &ys, n * n, "Z")?;
    let z_rev = solve_on_basis(&xs, &ys_rev, n * n, "Z'")?;
    let zr = z.unitarity_residual().max(z_rev.unitarity_residual());
    if zr > tol {
        return Err(MuError::Hypothesis(format!("Z is not unitary (residual {zr:.3e}); f is not cyclic")));
    }
    let w = z_rev.adjoint().matmul(&z);
    let mr = b.tensor_membership_residual(a, &w)?;
    if mr > tol {
        return Err(MuError::invariant("W ∈ B⊗A", mr));
    }
    let mu = MultiplicativeUnitary::canonicalize(w, tol)?;
    let checks = [
        ("S_W = A", mu.s.inclusion_residual(a)),
        ("Ŝ_W = B", mu.s_hat.inclusion_residual(b)),
        ("f fixed", fixed_residual(&mu.v, &f)),
        ("f̂ cofixed", cofixed_residual(&mu.v, &f_hat)),
    ];
    for (name, r) in checks {
        if r > tol {
            return Err(MuError::invariant(name, r));
        }
    }
    Ok(mu)
}

/// `‖V(f⊗·) − f⊗·‖` over a basis of the second leg.
pub fn fixed_residual(v: &ComplexMatrix, f: &[C64]) -> f64 {
    let n = f.len();
    let fx = ComplexMatrix::from_columns(n, &[f.to_vec()]).kron(&ComplexMatrix::identity(n));
    v.matmul(&fx).dist(&fx)
}

/// `‖V(·⊗f) − ·⊗f‖` over a basis of the first leg.
pub fn cofixed_residual(v: &ComplexMatrix, f: &[C64]) -> f64 {
    let n = f.len();
    let xf = ComplexMatrix::identity(n).kron(&ComplexMatrix::from_columns(n, &[f.to_vec()]));
    v.matmul(&xf).dist(&xf)
}
