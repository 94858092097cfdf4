//! Coideal subalgebras attached to pre-subgroups.
//!
//! For a pre-subgroup `f` with `R_f = UL_fU` and `λ_f = Uρ_fU`:
//!
//! | algebra | definition            | kind                 |
//! |---------|-----------------------|----------------------|
//! | `D_f`   | `S ∩ {λ_f}'`          | right coideal of `S` |
//! | `G_f`   | `S ∩ {ρ_f}'`          | left coideal of `S`  |
//! | `D̂_f`   | `Ŝ ∩ {L_f}'`          | right coideal of `Ŝ` |
//! | `Ĝ_f`   | `Ŝ ∩ {R_f}'`          | left coideal of `Ŝ`  |
//!
//! `f ↦ D_f` is a bijection onto right coideals; [`coideal_to_presub`] inverts it.

use serde::Serialize;

use crate::error::{MuError, Result};
use crate::mu_core::{Check, MultiplicativeUnitary};
use crate::presub::{is_presubgroup, PreSubgroup, PreSubgroupLattice};
use crate::tensorlin::{
    commutant, normalized, projector_onto, relative_commutant, ComplexMatrix, OperatorAlgebra, C64,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parent {
    S,
    SHat,
}

/// A coideal subalgebra together with the pre-subgroup it comes from.
#[derive(Clone, Debug)]
pub struct Coideal {
    pub base: OperatorAlgebra,
    pub side: Side,
    pub parent: Parent,
    pub f: PreSubgroup,
}

/// `D_f`, `G_f`, `D̂_f`, `Ĝ_f`.
#[derive(Clone, Debug)]
pub struct Coideals {
    pub d: Coideal,
    pub g: Coideal,
    pub d_hat: Coideal,
    pub g_hat: Coideal,
}

fn conj_by(u: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    u.matmul(x).matmul(&u.adjoint())
}

/// `R_f = UL_fU`.
pub fn r_f(m: &MultiplicativeUnitary, f: &PreSubgroup) -> ComplexMatrix {
    conj_by(m.u(), f.l())
}

/// `λ_f = Uρ_fU`.
pub fn lambda_f(m: &MultiplicativeUnitary, f: &PreSubgroup) -> ComplexMatrix {
    conj_by(m.u(), f.rho())
}

fn parent_algebra(m: &MultiplicativeUnitary, parent: Parent) -> &OperatorAlgebra {
    match parent {
        Parent::S => m.s(),
        Parent::SHat => m.s_hat(),
    }
}

fn span_distance(a: &OperatorAlgebra, b: &OperatorAlgebra) -> f64 {
    if a.dim() != b.dim() {
        return f64::INFINITY;
    }
    a.inclusion_residual(b).max(b.inclusion_residual(a))
}

/// The four coideals of `f`, checking `G_f = κ(D_f)` and `Ĝ_f = κ̂(D̂_f)`.
pub fn coideal_bases(m: &MultiplicativeUnitary, f: &PreSubgroup) -> Result<Coideals> {
    let tol = m.tol();
    let d = relative_commutant(m.s(), &[lambda_f(m, f)], tol);
    let g = relative_commutant(m.s(), &[f.rho().clone()], tol);
    let d_hat = relative_commutant(m.s_hat(), &[f.l().clone()], tol);
    let g_hat = relative_commutant(m.s_hat(), &[r_f(m, f)], tol);
    let kd = d.mapped(|x| m.antipode(x).unwrap_or_else(|_| x.clone()), tol)?;
    let r = span_distance(&kd, &g);
    if r > tol * 10.0 {
        return Err(MuError::invariant("G_f = κ(D_f)", r));
    }
    let kdh = d_hat.mapped(|x| m.antipode_hat(x).unwrap_or_else(|_| x.clone()), tol)?;
    let r = span_distance(&kdh, &g_hat);
    if r > tol * 10.0 {
        return Err(MuError::invariant("Ĝ_f = κ̂(D̂_f)", r));
    }
    if d.dim() != f.dim_down() || d_hat.dim() != f.dim_up() {
        return Err(MuError::invariant(
            format!("dim D_f = dim H_f, dim D̂_f = dim H^f (got {}, {})", d.dim(), d_hat.dim()),
            1.0,
        ));
    }
    let wrap = |base, side, parent| Coideal { base, side, parent, f: f.clone() };
    Ok(Coideals {
        d: wrap(d, Side::Right, Parent::S),
        g: wrap(g, Side::Left, Parent::S),
        d_hat: wrap(d_hat, Side::Right, Parent::SHat),
        g_hat: wrap(g_hat, Side::Left, Parent::SHat),
    })
}

/// Residuals of the coideal axioms for a span `B` inside `S` or `Ŝ`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CoidealTest {
    pub inclusion: f64,
    pub unital: f64,
    pub product: f64,
    pub adjoint: f64,
    pub coproduct: f64,
}

impl CoidealTest {
    pub fn passes(&self, tol: f64) -> bool {
        [self.inclusion, self.unital, self.product, self.adjoint, self.coproduct].iter().all(|&r| r <= tol)
    }
}

/// Axiom residuals for `B` as a coideal on the given side of `parent`.
pub fn coideal_test(m: &MultiplicativeUnitary, b: &OperatorAlgebra, parent: Parent, side: Side) -> Result<CoidealTest> {
    let a = parent_algebra(m, parent);
    let inclusion = a.inclusion_residual(b);
    let closure = b.closure();
    let mut coproduct: f64 = 0.0;
    if inclusion <= m.tol() * 10.0 {
        for x in b.basis() {
            let d = match parent {
                Parent::S => m.coproduct(x)?,
                Parent::SHat => m.dual_coproduct(x)?,
            };
            let r = match side {
                Side::Right => b.tensor_membership_residual(a, &d)?,
                Side::Left => a.tensor_membership_residual(b, &d)?,
            };
            coproduct = coproduct.max(r);
        }
    } else {
        coproduct = f64::INFINITY;
    }
    Ok(CoidealTest { inclusion, unital: closure.unital, product: closure.product, adjoint: closure.adjoint, coproduct })
}

/// `B` is a unital *-subalgebra of `S` with `δ(B) ⊂ B⊗S`.
pub fn is_right_coideal(m: &MultiplicativeUnitary, b: &OperatorAlgebra) -> Result<bool> {
    Ok(coideal_test(m, b, Parent::S, Side::Right)?.passes(m.tol() * 10.0))
}

/// Recovers the pre-subgroup of a coideal and checks the round trip.
///
/// For a right coideal `B` of `S`, `Be = UH_f` so `ρ_f = UpU` with `p` the
/// projector onto `Be`; the other three cases are analogous.
pub fn coideal_to_presub(m: &MultiplicativeUnitary, b: &OperatorAlgebra, parent: Parent, side: Side) -> Result<PreSubgroup> {
    let test = coideal_test(m, b, parent, side)?;
    if !test.passes(m.tol() * 10.0) {
        return Err(MuError::Hypothesis(format!("not a {side:?} coideal of {parent:?}: {test:?}")));
    }
    let cyclic = match parent {
        Parent::S => m.e(),
        Parent::SHat => m.e_hat(),
    };
    let orbit: Vec<Vec<C64>> = b.basis().iter().map(|x| x.apply(cyclic)).collect();
    let p = projector_onto(m.n(), &orbit, m.tol());
    let u = m.u();
    let vector = match (parent, side) {
        (Parent::S, Side::Right) => conj_by(u, &p).apply(m.e_hat()),
        (Parent::S, Side::Left) => p.apply(m.e_hat()),
        (Parent::SHat, Side::Right) => p.apply(m.e()),
        (Parent::SHat, Side::Left) => conj_by(u, &p).apply(m.e()),
    };
    let f = is_presubgroup(m, &normalized(&vector))?;
    let all = coideal_bases(m, &f)?;
    let back = match (parent, side) {
        (Parent::S, Side::Right) => &all.d.base,
        (Parent::S, Side::Left) => &all.g.base,
        (Parent::SHat, Side::Right) => &all.d_hat.base,
        (Parent::SHat, Side::Left) => &all.g_hat.base,
    };
    let r = span_distance(back, b);
    if r > m.tol() * 10.0 {
        return Err(MuError::invariant("coideal of the recovered pre-subgroup is B", r));
    }
    Ok(f)
}

/// `B_{f,g} = span{xy : x ∈ D_f, y ∈ Ĝ_g}` and `A_{g,f} = span{xy : x ∈ UD̂_gU, y ∈ G_f}`.
pub fn product_algebra(
    m: &MultiplicativeUnitary,
    f: &PreSubgroup,
    g: &PreSubgroup,
) -> Result<(OperatorAlgebra, OperatorAlgebra)> {
    products_of(m, &coideal_bases(m, f)?, &coideal_bases(m, g)?)
}

/// [`product_algebra`] from precomputed coideals.
pub fn products_of(m: &MultiplicativeUnitary, cf: &Coideals, cg: &Coideals) -> Result<(OperatorAlgebra, OperatorAlgebra)> {
    let tol = m.tol();
    let b = cf.d.base.products(&cg.g_hat.base, tol)?;
    let a = cg.d_hat.base.conjugated(m.u()).products(&cf.g.base, tol)?;
    let expected = cf.d.f.dim_down() * cg.d.f.dim_up();
    for (name, alg) in [("B_{f,g}", &b), ("A_{g,f}", &a)] {
        if alg.dim() != expected {
            return Err(MuError::invariant(
                format!("dim {name} = dim H_f · dim H^g (got {}, want {expected})", alg.dim()),
                1.0,
            ));
        }
        let c = alg.closure();
        if !c.is_algebra(tol * 10.0) {
            return Err(MuError::invariant(format!("{name} is a *-algebra"), c.product.max(c.adjoint).max(c.unital)));
        }
    }
    Ok((b, a))
}

/// Span distance between `B_{f,g}'` and `UB_{g,f}U`, and between `A_{f,g}'` and `UA_{g,f}U`.
pub fn commutant_duality(m: &MultiplicativeUnitary, f: &PreSubgroup, g: &PreSubgroup) -> Result<(f64, f64)> {
    duality_of(m, &coideal_bases(m, f)?, &coideal_bases(m, g)?)
}

fn duality_of(m: &MultiplicativeUnitary, cf: &Coideals, cg: &Coideals) -> Result<(f64, f64)> {
    let tol = m.tol();
    let (b_fg, a_gf) = products_of(m, cf, cg)?;
    let (b_gf, a_fg) = products_of(m, cg, cf)?;
    let u = m.u();
    let rb = span_distance(&commutant(&b_fg, tol), &b_gf.conjugated(u));
    let ra = span_distance(&commutant(&a_fg, tol), &a_gf.conjugated(u));
    Ok((rb, ra))
}

pub fn commutant_duality_check(m: &MultiplicativeUnitary, f: &PreSubgroup, g: &PreSubgroup) -> Result<bool> {
    let (rb, ra) = commutant_duality(m, f, g)?;
    Ok(rb.max(ra) <= m.tol() * 10.0)
}

/// Dimension criterion for `H` to be a free module over a unital *-subalgebra `A ⊂ L(H)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Freeness {
    pub dim: usize,
    pub commutant_dim: usize,
    /// `dim A · dim A' = (dim H)²`, i.e. some `H^k` is free.
    pub balanced: bool,
    pub free: bool,
    pub rank: Option<usize>,
}

pub fn freeness_check(m: &MultiplicativeUnitary, a: &OperatorAlgebra) -> Freeness {
    let n = a.dim_h();
    let dim = a.dim();
    let commutant_dim = commutant(a, m.tol()).dim();
    let balanced = dim * commutant_dim == n * n;
    let free = balanced && dim > 0 && n % dim == 0;
    Freeness { dim, commutant_dim, balanced, free, rank: free.then(|| n / dim) }
}

/// `τ(xy) = τ(x)τ(y)` on bases of `G_f`, `D̂_f`, their commutation, and `dim G_f · dim D̂_f = n`.
pub fn tensor_module_residuals(m: &MultiplicativeUnitary, c: &Coideals) -> (f64, f64, bool) {
    let mut trace: f64 = 0.0;
    let mut commute: f64 = 0.0;
    for x in c.g.base.basis() {
        for y in c.d_hat.base.basis() {
            let d = x.matmul(y).normalized_trace() - x.normalized_trace() * y.normalized_trace();
            trace = trace.max(d.norm());
            commute = commute.max(x.commutator(y).frobenius_norm());
        }
    }
    (trace, commute, c.g.base.dim() * c.d_hat.base.dim() == m.n())
}

/// Per-node coideal data for an enumerated lattice.
#[derive(Clone, Debug, Serialize)]
pub struct CoidealReport {
    pub nodes: Vec<CoidealNode>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoidealNode {
    pub index: usize,
    pub dim_d: usize,
    pub dim_g: usize,
    pub dim_d_hat: usize,
    pub dim_g_hat: usize,
    pub coideal_flags: [bool; 4],
    pub round_trip: [bool; 4],
    pub s_free_over_d: Freeness,
    pub tensor_module: bool,
}

pub fn coideal_report(m: &MultiplicativeUnitary, lat: &PreSubgroupLattice) -> Result<CoidealReport> {
    let tol = m.tol() * 10.0;
    let n = m.n();
    let mut nodes = Vec::with_capacity(lat.len());
    let mut all_dims = Vec::new();
    let all: Vec<Coideals> = lat.nodes().iter().map(|f| coideal_bases(m, f)).collect::<Result<_>>()?;
    for (index, (f, c)) in lat.nodes().iter().zip(&all).enumerate() {
        let kinds = [&c.d, &c.g, &c.d_hat, &c.g_hat];
        let mut coideal_flags = [false; 4];
        let mut round_trip = [false; 4];
        for (k, cd) in kinds.iter().enumerate() {
            coideal_flags[k] = coideal_test(m, &cd.base, cd.parent, cd.side)?.passes(tol);
            round_trip[k] = coideal_to_presub(m, &cd.base, cd.parent, cd.side)
                .map(|g| g.distance(f) < tol)
                .unwrap_or(false);
        }
        let (tr, cm, dims) = tensor_module_residuals(m, c);
        all_dims.push(c.d.base.dim());
        nodes.push(CoidealNode {
            index,
            dim_d: c.d.base.dim(),
            dim_g: c.g.base.dim(),
            dim_d_hat: c.d_hat.base.dim(),
            dim_g_hat: c.g_hat.base.dim(),
            coideal_flags,
            round_trip,
            s_free_over_d: freeness_check(m, &c.d.base),
            tensor_module: tr <= tol && cm <= tol && dims,
        });
    }
    let k = lat.len();
    let divides = (0..k).all(|i| (0..k).all(|j| !lat.leq(i, j) || all_dims[i] % all_dims[j] == 0));
    let mut duality: f64 = 0.0;
    for (i, cf) in all.iter().enumerate() {
        for cg in &all[i..] {
            let (rb, ra) = duality_of(m, cf, cg)?;
            duality = duality.max(rb).max(ra);
        }
    }
    let checks = vec![
        Check::flag("every D_f, G_f, D̂_f, Ĝ_f passes the coideal test", nodes.iter().all(|x| x.coideal_flags.iter().all(|&b| b))),
        Check::flag("coideal → pre-subgroup round trips", nodes.iter().all(|x| x.round_trip.iter().all(|&b| b))),
        Check::flag("dim D_f divides n", all_dims.iter().all(|&d| n % d == 0)),
        Check::flag("f ≺ g ⇒ dim D_g divides dim D_f", divides),
        Check::flag("S is a free D_f-module of rank n / dim D_f", nodes.iter().all(|x| x.s_free_over_d.free)),
        Check::new("commutant of B_{f,g} is UB_{g,f}U, A likewise", duality, tol),
        Check::flag("H ≅ G_f ⊗ D̂_f as modules", nodes.iter().all(|x| x.tensor_module)),
    ];
    Ok(CoidealReport { nodes, checks })
}
