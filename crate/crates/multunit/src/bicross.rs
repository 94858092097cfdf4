//! Bicrossed products from maximally distant pre-subgroup pairs.
//!
//! Given pre-subgroups `f`, `g` of `V` with `⟨f,g⟩ = n^{-1/2}`, the algebras
//! `A_{f,f}` and `B_{g,g}` are the leg algebras of a new multiplicative unitary
//! `W` with fixed vector `g` and cofixed vector `f`. For a matched pair of
//! subgroups of a finite group this is the classical bicrossed product.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::classify::{is_cosubgroup, is_subgroup};
use crate::coideal::{coideal_bases, lambda_f, product_algebra, r_f};
use crate::error::{MuError, Result};
use crate::mu_core::{compose_antilinear, conjugation_matrix, from_quadruple, Check, MultiplicativeUnitary};
use crate::presub::{is_presubgroup, PreSubgroup};
use crate::tensorlin::{
    apply_on_legs, inner, pseudo_inverse, vec_dist, ComplexMatrix, OperatorAlgebra, TensorIndex, C64,
};

/// Named residuals, ordered for stable output.
pub type Residuals = BTreeMap<String, f64>;

fn put(map: &mut Residuals, name: &str, r: f64) {
    map.insert(name.to_string(), r);
}

fn span_distance(a: &OperatorAlgebra, b: &OperatorAlgebra) -> f64 {
    if a.dim() != b.dim() {
        return f64::INFINITY;
    }
    a.inclusion_residual(b).max(b.inclusion_residual(a))
}

fn worst(map: &Residuals) -> (String, f64) {
    map.iter()
        .map(|(k, &v)| (k.clone(), v))
        .fold((String::new(), 0.0), |acc, (k, v)| if v > acc.1 || v.is_nan() { (k, v) } else { acc })
}

/// Residuals of the identities satisfied by a maximally distant pair.
pub fn distance_check(m: &MultiplicativeUnitary, f: &PreSubgroup, g: &PreSubgroup) -> Residuals {
    let n = m.n();
    let (e, eh) = (m.e(), m.e_hat());
    let (te, teh) = (m.theta_e(), m.theta_e_hat());
    let (lf, lg, rf, rg) = (f.l(), g.l(), f.rho(), g.rho());
    let ge = inner(g.vector(), e);
    let fe_hat = inner(f.vector(), eh);
    let mut r = Residuals::new();
    put(&mut r, "<f,g> = n^-1/2", (inner(f.vector(), g.vector()) - C64::from(1.0 / (n as f64).sqrt())).norm());
    put(&mut r, "L_f L_g = θ_ê", lf.matmul(lg).dist(&teh));
    put(&mut r, "L_g L_f = θ_ê", lg.matmul(lf).dist(&teh));
    put(&mut r, "ρ_f ρ_g = θ_e", rf.matmul(rg).dist(&te));
    put(&mut r, "ρ_g ρ_f = θ_e", rg.matmul(rf).dist(&te));
    put(&mut r, "<f,e> = <g,ê>", (inner(f.vector(), e) - inner(g.vector(), eh)).norm());
    put(&mut r, "<f,ê> = <g,e>", (fe_hat - ge).norm());
    put(&mut r, "ρ_f g = <g,e> e", vec_dist(&rf.apply(g.vector()), &e.iter().map(|x| x * ge).collect::<Vec<_>>()));
    put(&mut r, "L_g f = <f,ê> ê", vec_dist(&lg.apply(f.vector()), &eh.iter().map(|x| x * fe_hat).collect::<Vec<_>>()));
    put(&mut r, "ρ_f L_g ρ_f = <g,e>² ρ_f", rf.matmul(lg).matmul(rf).dist(&rf.scale(ge * ge)));
    put(&mut r, "L_g ρ_f L_g = <f,ê>² L_g", lg.matmul(rf).matmul(lg).dist(&lg.scale(fe_hat * fe_hat)));
    put(&mut r, "L_g R_f = θ_ê", lg.matmul(&r_f(m, f)).dist(&teh));
    put(&mut r, "λ_f ρ_g = θ_e", lambda_f(m, f).matmul(rg).dist(&te));
    r
}

/// Whether every identity of [`distance_check`] holds.
pub fn is_maximally_distant(m: &MultiplicativeUnitary, f: &PreSubgroup, g: &PreSubgroup) -> bool {
    distance_check(m, f, g).values().all(|&r| r <= m.tol() * 10.0)
}

/// The bicrossed unitary together with its source data.
#[derive(Clone, Debug)]
pub struct BicrossedResult {
    pub w: MultiplicativeUnitary,
    pub f: PreSubgroup,
    pub g: PreSubgroup,
    pub a_ff: OperatorAlgebra,
    pub b_gg: OperatorAlgebra,
    pub residuals: Residuals,
}

/// Builds `W` from `(A_{f,f}, B_{g,g}, g, f)`.
pub fn build_w(m: &MultiplicativeUnitary, f: &PreSubgroup, g: &PreSubgroup) -> Result<BicrossedResult> {
    let residuals = distance_check(m, f, g);
    let (name, r) = worst(&residuals);
    if r > m.tol() * 10.0 {
        return Err(MuError::Hypothesis(format!("pair is not maximally distant: {name} (residual {r:.3e})")));
    }
    let (_, a_ff) = product_algebra(m, f, f)?;
    let (b_gg, _) = product_algebra(m, g, g)?;
    let w = from_quadruple(&a_ff, &b_gg, g.vector(), f.vector(), m.tol() * 10.0).map_err(|e| match e {
        MuError::Hypothesis(s) => MuError::Hypothesis(format!("bicrossed product: {s}")),
        MuError::Invariant { name, residual } => MuError::Invariant { name: format!("bicrossed product: {name}"), residual },
        other => other,
    })?;
    Ok(BicrossedResult { w, f: f.clone(), g: g.clone(), a_ff, b_gg, residuals })
}

/// `J_A J_B`, where `J_A: ag ↦ a*g` on `A_{f,f}` and `J_B: bf ↦ b*f` on `B_{g,g}`.
pub fn modular_product(res: &BicrossedResult) -> Result<ComplexMatrix> {
    let ja = conjugation_matrix(res.a_ff.basis(), res.g.vector(), "J_A")?;
    let jb = conjugation_matrix(res.b_gg.basis(), res.f.vector(), "J_B")?;
    Ok(compose_antilinear(&ja, &jb))
}

/// Structural facts about `W` and the transfer of classification verdicts.
#[derive(Clone, Debug, Serialize)]
pub struct BicrossedVerification {
    pub residuals: Residuals,
    pub transfer: BTreeMap<String, (bool, bool)>,
    pub suite: Vec<Check>,
    pub s_commutative: bool,
    pub s_hat_commutative: bool,
}

impl BicrossedVerification {
    pub fn passes(&self, tol: f64) -> bool {
        self.residuals.values().all(|&r| r <= tol)
            && self.transfer.values().all(|(a, b)| a == b)
            && self.suite.iter().all(|c| c.pass)
    }
}

fn is_commutative(a: &OperatorAlgebra, tol: f64) -> bool {
    let b = a.basis();
    b.iter().all(|x| b.iter().all(|y| x.commutator(y).frobenius_norm() <= tol))
}

pub fn verify_bicrossed(m: &MultiplicativeUnitary, res: &BicrossedResult) -> Result<BicrossedVerification> {
    let w = &res.w;
    let tol = m.tol() * 10.0;
    let (f, g) = (&res.f, &res.g);
    let mut r = Residuals::new();
    put(&mut r, "J_A J_B = U", modular_product(res)?.dist(m.u()));
    put(&mut r, "U_W = U", w.u().dist(m.u()));
    put(&mut r, "S_W = A_ff", span_distance(w.s(), &res.a_ff));
    put(&mut r, "Ŝ_W = B_gg", span_distance(w.s_hat(), &res.b_gg));
    put(&mut r, "(ω_e ⊗ id)(W) = λ_f", w.l(m.e(), m.e())?.dist(&lambda_f(m, f)));
    put(&mut r, "(id ⊗ ω_e)(W) = ρ_g", w.rho(m.e(), m.e())?.dist(g.rho()));
    put(&mut r, "(ω_ê ⊗ id)(W) = L_f", w.l(m.e_hat(), m.e_hat())?.dist(f.l()));
    put(&mut r, "(id ⊗ ω_ê)(W) = L_g", w.rho(m.e_hat(), m.e_hat())?.dist(g.l()));

    let e_w = is_presubgroup(w, m.e())?;
    let eh_w = is_presubgroup(w, m.e_hat())?;
    let cv_f = coideal_bases(m, f)?;
    let cv_g = coideal_bases(m, g)?;
    let cw_e = coideal_bases(w, &e_w)?;
    let cw_eh = coideal_bases(w, &eh_w)?;
    put(&mut r, "G^W_e = U D̂_f U", span_distance(&cw_e.g.base, &cv_f.d_hat.base.conjugated(m.u())));
    put(&mut r, "D̂^W_e = Ĝ_g", span_distance(&cw_e.d_hat.base, &cv_g.g_hat.base));
    put(&mut r, "D^W_ê = G_f", span_distance(&cw_eh.d.base, &cv_f.g.base));
    put(&mut r, "Ĝ^W_ê = D_g", span_distance(&cw_eh.g_hat.base, &cv_g.d.base));

    let (_, a_ee) = product_algebra(w, &e_w, &e_w)?;
    let (b_eh, _) = product_algebra(w, &eh_w, &eh_w)?;
    put(&mut r, "A^W_ee = U Ŝ U", span_distance(&a_ee, &m.s_hat().conjugated(m.u())));
    put(&mut r, "B^W_êê = S", span_distance(&b_eh, m.s()));

    let mut transfer = BTreeMap::new();
    transfer.insert("e subgroup of W ⟺ f co-subgroup of V".into(), (is_subgroup(w, &e_w), is_cosubgroup(m, f)?));
    transfer.insert("e co-subgroup of W ⟺ g co-subgroup of V".into(), (is_cosubgroup(w, &e_w)?, is_cosubgroup(m, g)?));
    transfer.insert("ê subgroup of W ⟺ f subgroup of V".into(), (is_subgroup(w, &eh_w), is_subgroup(m, f)));
    transfer.insert("ê co-subgroup of W ⟺ g subgroup of V".into(), (is_cosubgroup(w, &eh_w)?, is_subgroup(m, g)));

    Ok(BicrossedVerification {
        residuals: r,
        transfer,
        suite: w.verify_suite()?,
        s_commutative: is_commutative(w.s(), tol),
        s_hat_commutative: is_commutative(w.s_hat(), tol),
    })
}

/// Outcome of building the bicrossed product of `(W, e, ê)` and `(W, ê, e)`.
#[derive(Clone, Debug, Serialize)]
pub struct DoubleConstruction {
    /// `‖build(W, e, ê) − V̂‖`.
    pub exact_residual: f64,
    /// The same comparison after aligning the canonical vectors by a unitary.
    pub equivalent_residual: f64,
    /// `‖build(W, ê, e) − (X⊗X)V(X*⊗X*)‖` with `X = J_B Ĵ`.
    pub reverse_residual: f64,
    pub verdict: DoubleVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DoubleVerdict {
    Exact,
    Equivalent,
    Mismatch,
}

fn conjugate_tensor(x: &ComplexMatrix, v: &ComplexMatrix) -> ComplexMatrix {
    let xx = x.kron(x);
    xx.matmul(v).matmul(&xx.adjoint())
}

/// Unitary sending `e_a ↦ e_b` and `ê_a ↦ ê_b` and fixing the complement of both spans.
fn vector_alignment(a: &MultiplicativeUnitary, b: &MultiplicativeUnitary) -> ComplexMatrix {
    let frame = |m: &MultiplicativeUnitary| {
        let cols: Vec<Vec<C64>> = vec![m.e().to_vec(), m.e_hat().to_vec()];
        crate::tensorlin::orthonormalize(m.n(), &cols, m.tol())
    };
    let (fa, fb) = (frame(a), frame(b));
    let n = a.n();
    let mut x = ComplexMatrix::identity(n);
    if fa.len() == fb.len() {
        let pa = crate::tensorlin::projector_onto(n, &fa, a.tol());
        x = &x - &pa;
        for (u, v) in fa.iter().zip(&fb) {
            x += &ComplexMatrix::outer(v, u);
        }
    }
    x
}

pub fn double_construction(m: &MultiplicativeUnitary, res: &BicrossedResult) -> Result<(MultiplicativeUnitary, DoubleConstruction)> {
    let w = &res.w;
    let e_w = is_presubgroup(w, m.e())?;
    let eh_w = is_presubgroup(w, m.e_hat())?;
    let forward = build_w(w, &e_w, &eh_w)?;
    let v_hat = m.v_hat();
    let exact_residual = forward.w.v().dist(v_hat);
    let equivalent_residual = if exact_residual <= m.tol() * 10.0 {
        exact_residual
    } else {
        let target = MultiplicativeUnitary::canonicalize(v_hat.clone(), m.tol())?;
        let x = vector_alignment(&forward.w, &target);
        if x.unitarity_residual() > m.tol() * 10.0 {
            f64::INFINITY
        } else {
            conjugate_tensor(&x, forward.w.v()).dist(v_hat)
        }
    };

    let reverse = build_w(w, &eh_w, &e_w)?;
    let jb = conjugation_matrix(res.b_gg.basis(), res.f.vector(), "J_B")?;
    let x = compose_antilinear(&jb, m.j_hat());
    let reverse_residual = reverse.w.v().dist(&conjugate_tensor(&x, m.v()));

    let tol = m.tol() * 10.0;
    let verdict = if exact_residual <= tol {
        DoubleVerdict::Exact
    } else if equivalent_residual <= tol {
        DoubleVerdict::Equivalent
    } else {
        DoubleVerdict::Mismatch
    };
    Ok((forward.w, DoubleConstruction { exact_residual, equivalent_residual, reverse_residual, verdict }))
}

/// The explicit formula `W' = n(T⊗T)(1⊗R_g⊗λ_g⊗1)V̂₁₃V̂₂₃V₂₃V₂₄(T*⊗T*)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExplicitCrosscheck {
    /// Largest residual when solving `aê = <f,ê>^{-1} R_f ξ` in `U D̂_f U`.
    pub solve_residual: f64,
    /// `‖T*T − R_f⊗ρ_f‖`.
    pub isometry_residual: f64,
    /// `‖W' − W‖`.
    pub residual: f64,
}

pub fn explicit_w_crosscheck(m: &MultiplicativeUnitary, res: &BicrossedResult) -> Result<ExplicitCrosscheck> {
    let n = m.n();
    let (f, g) = (&res.f, &res.g);
    let tol = m.tol();
    let rf = r_f(m, f);
    let rg = r_f(m, g);
    let a_alg = coideal_bases(m, f)?.d_hat.base.conjugated(m.u());
    let images: Vec<Vec<C64>> = a_alg.basis().iter().map(|b| b.apply(m.e_hat())).collect();
    let basis_map = ComplexMatrix::from_columns(n, &images);
    let solver = pseudo_inverse(&basis_map, tol);
    let scale = C64::from(1.0) / inner(f.vector(), m.e_hat());
    let tail = rg.matmul(f.rho());

    let mut solve_residual: f64 = 0.0;
    let mut t = ComplexMatrix::zeros(n, n * n);
    for i in 0..n {
        let target: Vec<C64> = rf.column(i).into_iter().map(|z| z * scale).collect();
        let coeffs = solver.apply(&target);
        let mut a = ComplexMatrix::zeros(n, n);
        for (c, b) in coeffs.iter().zip(a_alg.basis()) {
            a += &b.scale(*c);
        }
        solve_residual = solve_residual.max(vec_dist(&a.apply(m.e_hat()), &target));
        let at = a.matmul(&tail);
        for j in 0..n {
            for r in 0..n {
                t[(r, i * n + j)] = at[(r, j)];
            }
        }
    }
    if solve_residual > tol * 1e3 {
        return Err(MuError::Hypothesis(format!("aê = <f,ê>^-1 R_f ξ has no solution (residual {solve_residual:.3e})")));
    }
    let isometry_residual = t.adjoint().matmul(&t).dist(&rf.kron(f.rho()));

    let ctx = TensorIndex::new(4, n);
    let tt = t.kron(&t);
    let mut x = tt.adjoint();
    x = apply_on_legs(m.v(), &[2, 4], ctx, &x)?;
    x = apply_on_legs(m.v(), &[2, 3], ctx, &x)?;
    x = apply_on_legs(m.v_hat(), &[2, 3], ctx, &x)?;
    x = apply_on_legs(m.v_hat(), &[1, 3], ctx, &x)?;
    x = apply_on_legs(&rg, &[2], ctx, &x)?;
    x = apply_on_legs(&lambda_f(m, g), &[3], ctx, &x)?;
    let w_explicit = tt.matmul(&x).scale_re(n as f64);
    Ok(ExplicitCrosscheck { solve_residual, isometry_residual, residual: w_explicit.dist(res.w.v()) })
}

/// Whole-pipeline report for one pair.
#[derive(Clone, Debug, Serialize)]
pub struct BicrossedReport {
    pub n: usize,
    pub f: Vec<C64>,
    pub g: Vec<C64>,
    pub dim_a: usize,
    pub dim_b: usize,
    pub distance: Residuals,
    pub verification: BicrossedVerification,
    pub explicit: Option<ExplicitCrosscheck>,
    pub double: DoubleConstruction,
}

impl BicrossedReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.distance.values().all(|&r| r <= tol)
            && self.verification.passes(tol)
            && self.double.verdict != DoubleVerdict::Mismatch
    }
}

pub fn bicrossed_report(m: &MultiplicativeUnitary, f: &PreSubgroup, g: &PreSubgroup) -> Result<(BicrossedResult, BicrossedReport)> {
    let res = build_w(m, f, g)?;
    let verification = verify_bicrossed(m, &res)?;
    let explicit = explicit_w_crosscheck(m, &res).ok();
    let (_, double) = double_construction(m, &res)?;
    let report = BicrossedReport {
        n: m.n(),
        f: f.vector().to_vec(),
        g: g.vector().to_vec(),
        dim_a: res.a_ff.dim(),
        dim_b: res.b_gg.dim(),
        distance: res.residuals.clone(),
        verification,
        explicit,
        double,
    };
    Ok((res, report))
}
