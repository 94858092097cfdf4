//! Dense complex linear algebra with tensor-leg bookkeeping.
//!
//! Matrices are stored row-major. Operators on `H^{⊗k}` use the
//! leftmost-leg-slowest flat index of [`TensorIndex`]; leg numbers in the
//! public API start at 1, matching the usual `V₁₂, V₁₃, V₂₃` notation.
//! Spectral work (Hermitian eigen, SVD, general eigenvalues) is delegated to faer.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MuError, Result};

pub type C64 = Complex64;

/// Default absolute tolerance on residuals.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Tolerance used to cluster eigenvalues at 1.
pub const CLUSTER_TOL: f64 = 1e-7;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Cutoff below which a singular value counts as zero.
pub fn rank_cutoff(sigma_max: f64, tol: f64) -> f64 {
    tol * sigma_max.max(1.0)
}

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

#[derive(Clone, Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        let re = (0..m.rows)
            .map(|i| m.row(i).iter().map(|z| z.re).collect())
            .collect();
        let im = (0..m.rows)
            .map(|i| m.row(i).iter().map(|z| z.im).collect())
            .collect();
        MatrixJson { rows: m.rows, cols: m.cols, re, im }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = String;

    fn try_from(j: MatrixJson) -> std::result::Result<Self, String> {
        if j.re.len() != j.rows || j.im.len() != j.rows {
            return Err(format!("expected {} rows", j.rows));
        }
        let mut data = Vec::with_capacity(j.rows * j.cols);
        for (r, i) in j.re.iter().zip(&j.im) {
            if r.len() != j.cols || i.len() != j.cols {
                return Err(format!("expected {} columns", j.cols));
            }
            data.extend(r.iter().zip(i).map(|(&a, &b)| C64::new(a, b)));
        }
        Ok(ComplexMatrix { rows: j.rows, cols: j.cols, data })
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(MuError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        ComplexMatrix { rows, cols, data: entries.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn diagonal(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &z) in d.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &z) in c.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
    }

    /// Rank-one operator `ζ ↦ ⟨η, ζ⟩ ξ`.
    pub fn outer(xi: &[C64], eta: &[C64]) -> Self {
        Self::from_fn(xi.len(), eta.len(), |i, j| xi[i] * eta[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Normalized trace `τ(x) = tr(x)/n`.
    pub fn normalized_trace(&self) -> C64 {
        self.trace() / self.rows as f64
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance `‖self − other‖`.
    pub fn dist(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in dist");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matmul");
        let mut out = vec![ZERO; self.rows * rhs.cols];
        for i in 0..self.rows {
            let orow = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix { rows: self.rows, cols: rhs.cols, data: out }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "shape mismatch in apply");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r, c) = (rhs.rows, rhs.cols);
        let mut out = Self::zeros(self.rows * r, self.cols * c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..r {
                    for l in 0..c {
                        out[(i * r + k, j * c + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint().matmul(self).dist(&Self::identity(self.cols))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.unitarity_residual() <= tol
    }

    pub fn selfadjoint_residual(&self) -> f64 {
        self.dist(&self.adjoint())
    }

    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        self.is_square() && self.selfadjoint_residual() <= tol
    }

    /// `max(‖p² − p‖, ‖p* − p‖)`.
    pub fn projector_residual(&self) -> f64 {
        self.matmul(self).dist(self).max(self.selfadjoint_residual())
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_square() && self.projector_residual() <= tol
    }

    /// Inverse via partial-pivot LU, `None` when not square or numerically singular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() || inverse_condition(self) < 1e-14 {
            return None;
        }
        Some(from_faer(&to_faer(self).partial_piv_lu().inverse()))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

fn to_faer(m: &ComplexMatrix) -> Mat<C64> {
    Mat::from_fn(m.rows, m.cols, |i, j| m[(i, j)])
}

fn from_faer(m: &Mat<C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD `a = U S V*`, singular values descending.
fn svd(a: &ComplexMatrix) -> (Mat<C64>, Vec<f64>, Mat<C64>) {
    let d = to_faer(a).svd().expect("SVD did not converge");
    let s = (0..a.rows.min(a.cols)).map(|i| d.S()[i].re).collect();
    (d.U().to_owned(), s, d.V().to_owned())
}

/// Thin SVD: `U` is `rows × min`, `V` is `cols × min`.
fn thin_svd(a: &ComplexMatrix) -> (Mat<C64>, Vec<f64>, Mat<C64>) {
    let d = to_faer(a).thin_svd().expect("SVD did not converge");
    let s = (0..a.rows.min(a.cols)).map(|i| d.S()[i].re).collect();
    (d.U().to_owned(), s, d.V().to_owned())
}

// ---------------------------------------------------------------------------
// Vectors

/// `⟨a, b⟩`, conjugate-linear in `a`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "length mismatch in inner");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(a: &[C64]) -> Vec<C64> {
    let s = norm(a);
    a.iter().map(|z| z / s).collect()
}

pub fn scaled(a: &[C64], s: C64) -> Vec<C64> {
    a.iter().map(|z| z * s).collect()
}

pub fn vec_sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_dist(a: &[C64], b: &[C64]) -> f64 {
    norm(&vec_sub(a, b))
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

pub fn basis_vector(n: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; n];
    v[i] = ONE;
    v
}

pub fn conj_vec(a: &[C64]) -> Vec<C64> {
    a.iter().map(|z| z.conj()).collect()
}

/// Orthonormal basis of the span of `vectors` (rank cutoff from singular values).
pub fn orthonormalize(dim: usize, vectors: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    range_basis(&ComplexMatrix::from_columns(dim, vectors), tol)
}

/// Orthogonal projector onto the span of `vectors`.
pub fn projector_onto(dim: usize, vectors: &[Vec<C64>], tol: f64) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(dim, dim);
    for v in orthonormalize(dim, vectors, tol) {
        p += &ComplexMatrix::outer(&v, &v);
    }
    p
}

// ---------------------------------------------------------------------------
// Tensor legs

/// Leg bookkeeping for operators on `H^{⊗legs}` with `dim H = dim`.
///
/// The flat index of `(i₁,…,i_k)` is `Σ i_j · dim^(k−j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorIndex {
    pub legs: usize,
    pub dim: usize,
}

impl TensorIndex {
    pub fn new(legs: usize, dim: usize) -> Self {
        TensorIndex { legs, dim }
    }

    /// `dim^legs`.
    pub fn size(&self) -> usize {
        self.dim.pow(self.legs as u32)
    }

    /// Stride of leg `leg` (1-based).
    pub fn stride(&self, leg: usize) -> usize {
        self.dim.pow((self.legs - leg) as u32)
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.legs);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn split(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.legs];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.dim;
            flat /= self.dim;
        }
        idx
    }

    /// Offsets of the selected legs (in the given order) and base offsets of the rest.
    fn offsets(&self, legs: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
        let mut seen = vec![false; self.legs + 1];
        for &l in legs {
            if l == 0 || l > self.legs || seen[l] {
                return Err(MuError::Dimension(format!("invalid legs {legs:?} for {} legs", self.legs)));
            }
            seen[l] = true;
        }
        let rest: Vec<usize> = (1..=self.legs).filter(|&l| !seen[l]).collect();
        Ok((self.offsets_of(legs), self.offsets_of(&rest)))
    }

    fn offsets_of(&self, legs: &[usize]) -> Vec<usize> {
        let count = self.dim.pow(legs.len() as u32);
        (0..count)
            .map(|mut t| {
                let mut off = 0;
                for &l in legs.iter().rev() {
                    off += (t % self.dim) * self.stride(l);
                    t /= self.dim;
                }
                off
            })
            .collect()
    }
}

/// Embeds `x`, acting on the listed legs, into an operator on all legs of `ctx`.
pub fn embed(x: &ComplexMatrix, legs: &[usize], ctx: TensorIndex) -> Result<ComplexMatrix> {
    let (off, base) = ctx.offsets(legs)?;
    check_leg_operator(x, off.len())?;
    let mut out = ComplexMatrix::zeros(ctx.size(), ctx.size());
    for &b in &base {
        for (s, &os) in off.iter().enumerate() {
            for (t, &ot) in off.iter().enumerate() {
                out[(b + os, b + ot)] = x[(s, t)];
            }
        }
    }
    Ok(out)
}

/// Embeds a two-leg operator on legs `(i, j)`.
pub fn leg_embed(x: &ComplexMatrix, legs: (usize, usize), ctx: TensorIndex) -> Result<ComplexMatrix> {
    if legs.0 >= legs.1 {
        return Err(MuError::Dimension(format!("legs {legs:?} must be increasing")));
    }
    embed(x, &[legs.0, legs.1], ctx)
}

/// Computes `embed(x, legs, ctx) · m` without forming the embedded operator.
pub fn apply_on_legs(
    x: &ComplexMatrix,
    legs: &[usize],
    ctx: TensorIndex,
    m: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let (off, base) = ctx.offsets(legs)?;
    check_leg_operator(x, off.len())?;
    if m.rows() != ctx.size() {
        return Err(MuError::Dimension(format!("{} rows, expected {}", m.rows(), ctx.size())));
    }
    let d = off.len();
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
    let mut buf = vec![ZERO; d];
    for &b in &base {
        for col in 0..m.cols() {
            for (t, &ot) in off.iter().enumerate() {
                buf[t] = m[(b + ot, col)];
            }
            if buf.iter().all(|z| *z == ZERO) {
                continue;
            }
            for (s, &os) in off.iter().enumerate() {
                let row = x.row(s);
                let mut acc = ZERO;
                for (a, v) in row.iter().zip(&buf) {
                    if *a != ZERO {
                        acc += a * v;
                    }
                }
                out[(b + os, col)] = acc;
            }
        }
    }
    Ok(out)
}

fn check_leg_operator(x: &ComplexMatrix, d: usize) -> Result<()> {
    if x.rows() != d || x.cols() != d {
        return Err(MuError::Dimension(format!("{}x{} operator on legs of total dim {d}", x.rows(), x.cols())));
    }
    Ok(())
}

/// The flip `Σ(ξ⊗η) = η⊗ξ` on `ℂⁿ⊗ℂⁿ`.
pub fn swap(n: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            s[(b * n + a, a * n + b)] = ONE;
        }
    }
    s
}

/// `dim H` for an operator on `H⊗H`.
pub fn leg_dim(v: &ComplexMatrix) -> Result<usize> {
    let n = (v.rows() as f64).sqrt().round() as usize;
    if !v.is_square() || n * n != v.rows() {
        return Err(MuError::Dimension(format!("{}x{} is not an operator on H⊗H", v.rows(), v.cols())));
    }
    Ok(n)
}

/// Contracts leg `leg` of an operator on `H^{⊗k}` with the functional `x ↦ tr(ω x)`.
pub fn slice_leg(m: &ComplexMatrix, ctx: TensorIndex, leg: usize, omega: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.rows() != ctx.size() || !m.is_square() {
        return Err(MuError::Dimension("operator does not match tensor context".into()));
    }
    if omega.rows() != ctx.dim || omega.cols() != ctx.dim {
        return Err(MuError::Dimension("functional does not match leg dimension".into()));
    }
    let (off, base) = ctx.offsets(&[leg])?;
    let mut out = ComplexMatrix::zeros(base.len(), base.len());
    for (a, &ba) in base.iter().enumerate() {
        for (b, &bb) in base.iter().enumerate() {
            let mut acc = ZERO;
            for (c, &oc) in off.iter().enumerate() {
                for (d, &od) in off.iter().enumerate() {
                    let w = omega[(d, c)];
                    if w != ZERO {
                        acc += w * m[(ba + oc, bb + od)];
                    }
                }
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Matrix `Ω` with `tr(Ω x) = ⟨ξ, xη⟩`.
pub fn vector_form(xi: &[C64], eta: &[C64]) -> ComplexMatrix {
    ComplexMatrix::outer(eta, xi)
}

/// `(ω⊗id)(v)` for `ω(x) = tr(Ω x)`.
pub fn slice_first_form(v: &ComplexMatrix, omega: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = leg_dim(v)?;
    slice_leg(v, TensorIndex::new(2, n), 1, omega)
}

/// `(id⊗ω)(v)` for `ω(x) = tr(Ω x)`.
pub fn slice_second_form(v: &ComplexMatrix, omega: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = leg_dim(v)?;
    slice_leg(v, TensorIndex::new(2, n), 2, omega)
}

/// `(ω_{ξ,η}⊗id)(v)` with `ω_{ξ,η}(x) = ⟨ξ, xη⟩`.
pub fn slice_first(v: &ComplexMatrix, xi: &[C64], eta: &[C64]) -> Result<ComplexMatrix> {
    check_vectors(v, xi, eta)?;
    slice_first_form(v, &vector_form(xi, eta))
}

/// `(id⊗ω_{ξ,η})(v)`.
pub fn slice_second(v: &ComplexMatrix, xi: &[C64], eta: &[C64]) -> Result<ComplexMatrix> {
    check_vectors(v, xi, eta)?;
    slice_second_form(v, &vector_form(xi, eta))
}

fn check_vectors(v: &ComplexMatrix, xi: &[C64], eta: &[C64]) -> Result<()> {
    let n = leg_dim(v)?;
    if xi.len() != n || eta.len() != n {
        return Err(MuError::Dimension(format!("vectors of length {}, {} for leg dim {n}", xi.len(), eta.len())));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Spectral helpers

/// Eigen decomposition of the Hermitian part `(a + a*)/2`, eigenvalues descending.
pub fn hermitian_eigen(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.rows();
    let h = Mat::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let eig = h.self_adjoint_eigen(Side::Lower).expect("Hermitian eigensolver did not converge");
    // faer returns ascending order.
    let values = (0..n).rev().map(|i| eig.S()[i].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.U()[(r, n - 1 - c)]);
    (values, vectors)
}

/// All eigenvalues of a square matrix, sorted by (re, im).
pub fn eigenvalues(a: &ComplexMatrix) -> Vec<C64> {
    let mut ev = to_faer(a).eigenvalues().expect("eigensolver did not converge");
    ev.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    ev
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    to_faer(a).singular_values().expect("SVD did not converge")
}

pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Orthonormal basis of the column space of `a`.
pub fn range_basis(a: &ComplexMatrix, tol: f64) -> Vec<Vec<C64>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    let (u, s, _) = thin_svd(a);
    let cut = rank_cutoff(s.first().copied().unwrap_or(0.0), tol);
    let rank = s.iter().take_while(|&&x| x > cut).count();
    (0..rank).map(|k| (0..a.rows()).map(|i| u[(i, k)]).collect()).collect()
}

/// Orthonormal basis of the kernel of `a`.
pub fn null_space(a: &ComplexMatrix, tol: f64) -> Vec<Vec<C64>> {
    let k = a.cols();
    if k == 0 {
        return Vec::new();
    }
    if a.rows() == 0 {
        return (0..k).map(|i| basis_vector(k, i)).collect();
    }
    // V is square either way: thin when rows ≥ cols, full otherwise.
    let (_, s, v) = if a.rows() >= k { thin_svd(a) } else { svd(a) };
    let cut = rank_cutoff(s.first().copied().unwrap_or(0.0), tol);
    let rank = s.iter().take_while(|&&x| x > cut).count();
    (rank..k).map(|j| (0..k).map(|i| v[(i, j)]).collect()).collect()
}

/// Moore–Penrose pseudo-inverse with the crate's rank cutoff.
pub fn pseudo_inverse(a: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let (u, s, v) = thin_svd(a);
    let cut = rank_cutoff(s.first().copied().unwrap_or(0.0), tol);
    let mut out = ComplexMatrix::zeros(a.cols(), a.rows());
    for (k, &sk) in s.iter().enumerate().take_while(|(_, &x)| x > cut) {
        for i in 0..a.cols() {
            let vik = v[(i, k)] / sk;
            for j in 0..a.rows() {
                out[(i, j)] += vik * u[(j, k)].conj();
            }
        }
    }
    out
}

/// Smallest singular value over largest, 0 for an empty matrix.
pub fn inverse_condition(a: &ComplexMatrix) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}

/// Orthonormal basis of the range of an orthogonal projector.
pub fn projector_range(p: &ComplexMatrix) -> Vec<Vec<C64>> {
    let (vals, vecs) = hermitian_eigen(p);
    vals.iter().enumerate().filter(|(_, &l)| l > 0.5).map(|(i, _)| vecs.column(i)).collect()
}

/// Rank of a projector from its trace, enforcing near-integrality.
pub fn projector_rank(p: &ComplexMatrix) -> Result<usize> {
    let t = p.trace().re;
    let r = t.round();
    if (t - r).abs() > 1e-6 || r < 0.0 {
        return Err(MuError::invariant("projector trace is not an integer", (t - r).abs()));
    }
    Ok(r as usize)
}

/// Projector onto `{ξ : aξ = ξ}` for a contraction `a`.
pub fn eig1_projector(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(MuError::Dimension("eig1_projector needs a square matrix".into()));
    }
    let nrm = operator_norm(a);
    if nrm > 1.0 + tol {
        return Err(MuError::NotContraction { norm: nrm });
    }
    // For a contraction, aξ = ξ iff ξ is a 1-eigenvector of the Hermitian part.
    let (vals, vecs) = hermitian_eigen(a);
    let n = a.rows();
    let mut p = ComplexMatrix::zeros(n, n);
    for (i, &l) in vals.iter().enumerate() {
        if (l - 1.0).abs() < CLUSTER_TOL {
            let v = vecs.column(i);
            p += &ComplexMatrix::outer(&v, &v);
        }
    }
    let residual = a.matmul(&p).dist(&p);
    if residual > 1e-6 {
        return Err(MuError::invariant("fixed-space candidate not fixed", residual));
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// Operator algebras

/// A subspace of `M_n(ℂ)` with a τ-orthonormal basis, `⟨x,y⟩ = τ(x*y)`.
///
/// Built by [`span_basis`]; [`OperatorAlgebra::closure`] reports whether the
/// span is a unital *-algebra.
#[derive(Clone, Debug)]
pub struct OperatorAlgebra {
    dim_h: usize,
    basis: Vec<ComplexMatrix>,
}

/// Residuals of the algebra axioms for a span.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClosureReport {
    pub unital: f64,
    pub product: f64,
    pub adjoint: f64,
}

impl ClosureReport {
    pub fn is_algebra(&self, tol: f64) -> bool {
        self.unital <= tol && self.product <= tol && self.adjoint <= tol
    }
}

/// τ-orthonormal basis of the span of `mats` (all `n×n`).
pub fn span_basis(dim_h: usize, mats: &[ComplexMatrix], tol: f64) -> Result<OperatorAlgebra> {
    OperatorAlgebra::span(dim_h, mats, tol)
}

impl OperatorAlgebra {
    pub fn span(dim_h: usize, mats: &[ComplexMatrix], tol: f64) -> Result<Self> {
        let nn = dim_h * dim_h;
        for m in mats {
            if m.rows() != dim_h || m.cols() != dim_h {
                return Err(MuError::Dimension(format!("{}x{} matrix in a span of {dim_h}x{dim_h}", m.rows(), m.cols())));
            }
        }
        let columns: Vec<Vec<C64>> = mats.iter().map(|m| m.entries().to_vec()).collect();
        let sqrt_n = (dim_h as f64).sqrt();
        let basis = orthonormalize(nn, &columns, tol)
            .into_iter()
            .map(|c| ComplexMatrix { rows: dim_h, cols: dim_h, data: c.into_iter().map(|z| z * sqrt_n).collect() })
            .collect();
        Ok(OperatorAlgebra { dim_h, basis })
    }

    /// Wraps a basis already known to be τ-orthonormal.
    fn from_orthonormal(dim_h: usize, basis: Vec<ComplexMatrix>) -> Self {
        OperatorAlgebra { dim_h, basis }
    }

    pub fn full(n: usize) -> Self {
        let s = (n as f64).sqrt();
        let basis = (0..n * n)
            .map(|k| {
                let mut m = ComplexMatrix::zeros(n, n);
                m[(k / n, k % n)] = C64::new(s, 0.0);
                m
            })
            .collect();
        Self::from_orthonormal(n, basis)
    }

    pub fn scalars(n: usize) -> Self {
        Self::from_orthonormal(n, vec![ComplexMatrix::identity(n)])
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// `τ(b_k* x)` for each basis element.
    pub fn coefficients(&self, x: &ComplexMatrix) -> Vec<C64> {
        let n = self.dim_h as f64;
        self.basis.iter().map(|b| inner(b.entries(), x.entries()) / n).collect()
    }

    /// τ-orthogonal projection onto the span.
    pub fn project(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut p = ComplexMatrix::zeros(self.dim_h, self.dim_h);
        for (c, b) in self.coefficients(x).into_iter().zip(&self.basis) {
            p += &b.scale(c);
        }
        p
    }

    pub fn membership_residual(&self, x: &ComplexMatrix) -> f64 {
        x.dist(&self.project(x))
    }

    pub fn contains(&self, x: &ComplexMatrix, tol: f64) -> bool {
        self.membership_residual(x) <= tol
    }

    /// Largest membership residual of `other`'s basis in `self`.
    pub fn inclusion_residual(&self, other: &OperatorAlgebra) -> f64 {
        other.basis.iter().map(|b| self.membership_residual(b)).fold(0.0, f64::max)
    }

    pub fn same_span(&self, other: &OperatorAlgebra, tol: f64) -> bool {
        self.dim() == other.dim() && self.inclusion_residual(other) <= tol
    }

    pub fn closure(&self) -> ClosureReport {
        let unital = self.membership_residual(&ComplexMatrix::identity(self.dim_h));
        let mut product: f64 = 0.0;
        let mut adjoint: f64 = 0.0;
        for a in &self.basis {
            adjoint = adjoint.max(self.membership_residual(&a.adjoint()));
            for b in &self.basis {
                product = product.max(self.membership_residual(&a.matmul(b)));
            }
        }
        ClosureReport { unital, product, adjoint }
    }

    pub fn is_algebra(&self, tol: f64) -> bool {
        self.closure().is_algebra(tol)
    }

    /// `{u b u* : b ∈ self}` for a unitary `u`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        let ua = u.adjoint();
        Self::from_orthonormal(self.dim_h, self.basis.iter().map(|b| u.matmul(b).matmul(&ua)).collect())
    }

    /// Image of the span under a linear map, re-orthonormalized.
    pub fn mapped(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix, tol: f64) -> Result<Self> {
        let imgs: Vec<ComplexMatrix> = self.basis.iter().map(f).collect();
        Self::span(self.dim_h, &imgs, tol)
    }

    /// Span of all products `ab` with `a ∈ self`, `b ∈ other`.
    pub fn products(&self, other: &OperatorAlgebra, tol: f64) -> Result<Self> {
        let mut mats = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.basis {
            for b in &other.basis {
                mats.push(a.matmul(b));
            }
        }
        Self::span(self.dim_h, &mats, tol)
    }

    /// Residual of `x` (an operator on `H⊗H`) against `self ⊗ other`.
    pub fn tensor_membership_residual(&self, other: &OperatorAlgebra, x: &ComplexMatrix) -> Result<f64> {
        let n = self.dim_h;
        let ctx = TensorIndex::new(2, n);
        if x.rows() != ctx.size() || !x.is_square() {
            return Err(MuError::Dimension("tensor membership needs an operator on H⊗H".into()));
        }
        let mut proj = ComplexMatrix::zeros(n * n, n * n);
        for a in &self.basis {
            let z = slice_leg(x, ctx, 1, &a.adjoint().scale_re(1.0 / n as f64))?;
            proj += &a.kron(&other.project(&z));
        }
        Ok(x.dist(&proj))
    }
}

/// `{x ∈ parent : [x, m] = 0 for all m ∈ mats}`.
pub fn relative_commutant(parent: &OperatorAlgebra, mats: &[ComplexMatrix], tol: f64) -> OperatorAlgebra {
    let n = parent.dim_h;
    if mats.is_empty() {
        return parent.clone();
    }
    let mut stacked = ComplexMatrix::zeros(mats.len() * n * n, parent.dim());
    for (k, b) in parent.basis.iter().enumerate() {
        for (j, m) in mats.iter().enumerate() {
            let c = b.commutator(m);
            for (r, z) in c.entries().iter().enumerate() {
                stacked[(j * n * n + r, k)] = *z;
            }
        }
    }
    let basis = null_space(&stacked, tol)
        .into_iter()
        .map(|coef| {
            let mut x = ComplexMatrix::zeros(n, n);
            for (c, b) in coef.iter().zip(&parent.basis) {
                x += &b.scale(*c);
            }
            x
        })
        .collect();
    OperatorAlgebra::from_orthonormal(n, basis)
}

/// Commutant of a span inside `M_n(ℂ)`.
pub fn commutant(a: &OperatorAlgebra, tol: f64) -> OperatorAlgebra {
    relative_commutant(&OperatorAlgebra::full(a.dim_h), &a.basis, tol)
}
