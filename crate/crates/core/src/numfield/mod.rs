//! Scalar fields, dense matrices and the rank/basis kernels everything else is built on.
//!
//! Two backends implement [`Field`]: `C64` (complex double precision, decisions via SVD
//! thresholds) and [`GaussQ`] (Gaussian rationals, decisions by exact elimination).

pub(crate) mod exact;
pub(crate) mod float;
mod matrix;
mod poly;

use std::cell::Cell;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use exact::GaussQ;
pub use matrix::Matrix;
pub use poly::Poly;

pub type C64 = num_complex::Complex64;

/// Tolerances used by the float backend. The exact backend ignores them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub rank_rel_tol: f64,
    pub angle_tol: f64,
    pub psd_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy { rank_rel_tol: 100.0 * f64::EPSILON, angle_tol: 1e-8, psd_tol: 1e-10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Float,
    Exact,
}

/// Definiteness class of a Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HermClass {
    #[serde(rename = "PD")]
    PositiveDefinite,
    #[serde(rename = "PSD")]
    PositiveSemidefinite,
    #[serde(rename = "zero")]
    Zero,
    #[serde(rename = "NSD")]
    NegativeSemidefinite,
    #[serde(rename = "ND")]
    NegativeDefinite,
    #[serde(rename = "indefinite")]
    Indefinite,
    #[serde(rename = "not-hermitian")]
    NotHermitian,
}

impl HermClass {
    pub fn is_psd(self) -> bool {
        matches!(self, HermClass::PositiveDefinite | HermClass::PositiveSemidefinite | HermClass::Zero)
    }

    pub fn is_nsd(self) -> bool {
        matches!(self, HermClass::NegativeDefinite | HermClass::NegativeSemidefinite | HermClass::Zero)
    }

    pub fn from_inertia(pos: usize, neg: usize, zero: usize) -> Self {
        let n = pos + neg + zero;
        match (pos, neg) {
            (0, 0) => HermClass::Zero,
            (p, 0) if p == n => HermClass::PositiveDefinite,
            (_, 0) => HermClass::PositiveSemidefinite,
            (0, q) if q == n => HermClass::NegativeDefinite,
            (0, _) => HermClass::NegativeSemidefinite,
            _ => HermClass::Indefinite,
        }
    }
}

/// Per-call numerical context: policy, an optional absolute reference scale for rank
/// decisions, and a flag raised when a float rank decision lands near the threshold.
#[derive(Debug)]
pub struct Ctx {
    pub pol: TolerancePolicy,
    pub scale: f64,
    ambiguous: Cell<bool>,
    /// Width of the near-threshold band, as a factor of the threshold.
    band: Cell<f64>,
}

impl Ctx {
    pub fn new(pol: TolerancePolicy) -> Self {
        Ctx::with_scale(pol, 0.0)
    }

    pub fn with_scale(pol: TolerancePolicy, scale: f64) -> Self {
        Ctx { pol, scale, ambiguous: Cell::new(false), band: Cell::new(10.0) }
    }

    pub fn flag_ambiguous(&self) {
        self.ambiguous.set(true);
    }

    pub fn ambiguous(&self) -> bool {
        self.ambiguous.get()
    }

    pub fn band(&self) -> f64 {
        self.band.get()
    }

    pub(crate) fn set_band(&self, b: f64) {
        self.band.set(b);
    }
}

/// A scalar field together with its backend-specific linear algebra.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    const BACKEND: Backend;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(p: i64, q: i64) -> Self;
    /// Exact backend converts the binary value exactly.
    fn from_c64(z: C64) -> Self;
    fn to_c64(&self) -> C64;
    /// Exact value (float backend converts the binary value exactly).
    fn to_gauss(&self) -> GaussQ;
    fn imag_unit() -> Self;
    fn conj(&self) -> Self;
    fn re(&self) -> Self;
    fn im(&self) -> Self;
    fn is_real(&self) -> bool;
    fn magnitude(&self) -> f64;

    fn rank(a: &Matrix<Self>, ctx: &Ctx) -> usize;
    /// Basis of the column space. Float: orthonormal. Exact: pivot columns of `a`.
    fn range_basis(a: &Matrix<Self>, ctx: &Ctx) -> Matrix<Self>;
    /// Basis of the null space. Float: orthonormal.
    fn kernel_basis(a: &Matrix<Self>, ctx: &Ctx) -> Matrix<Self>;
    /// Pairwise orthogonal columns spanning the same space as the full-column-rank `a`.
    /// Float normalizes them; exact leaves the norms as they come.
    fn orthogonalize(a: &Matrix<Self>) -> Matrix<Self>;
    /// Columns completing the full-column-rank `b` to a basis of the ambient space.
    fn completion(b: &Matrix<Self>, ctx: &Ctx) -> Matrix<Self>;
    /// Some solution of `a x = b`, or `None` if the system is inconsistent.
    fn solve(a: &Matrix<Self>, b: &Matrix<Self>, ctx: &Ctx) -> Option<Matrix<Self>>;
    /// `big` (any spanning set) contains the column space of `small`.
    fn subspace_contains(big: &Matrix<Self>, small: &Matrix<Self>, ctx: &Ctx) -> bool;
    fn hermitian_class(h: &Matrix<Self>, pol: &TolerancePolicy) -> HermClass;
    /// Matrix is zero up to `angle_tol` relative to `scale` (exactly zero for the exact backend).
    fn negligible(m: &Matrix<Self>, scale: f64, pol: &TolerancePolicy) -> bool;
    /// Smallest singular value above the rank threshold, where the backend has one.
    fn min_retained_sv(_a: &Matrix<Self>, _ctx: &Ctx) -> Option<f64> {
        None
    }

    /// Jordan structure of the regular pencil `sE - A` with `E` invertible.
    fn finite_jordan(e: &Matrix<Self>, a: &Matrix<Self>, ctx: &Ctx) -> Vec<crate::pencil::EigenClass>;
}

pub fn rank<T: Field>(a: &Matrix<T>, pol: &TolerancePolicy) -> usize {
    T::rank(a, &Ctx::new(*pol))
}

pub fn kernel_basis<T: Field>(a: &Matrix<T>, pol: &TolerancePolicy) -> Matrix<T> {
    T::kernel_basis(a, &Ctx::new(*pol))
}

pub fn range_basis<T: Field>(a: &Matrix<T>, pol: &TolerancePolicy) -> Matrix<T> {
    T::range_basis(a, &Ctx::new(*pol))
}

pub fn orthonormal_basis<T: Field>(a: &Matrix<T>, pol: &TolerancePolicy) -> Matrix<T> {
    T::orthogonalize(&T::range_basis(a, &Ctx::new(*pol)))
}

pub fn hermitian_classify<T: Field>(h: &Matrix<T>, pol: &TolerancePolicy) -> HermClass {
    T::hermitian_class(h, pol)
}

pub fn subspace_equal<T: Field>(a: &Matrix<T>, b: &Matrix<T>, ctx: &Ctx) -> bool {
    T::rank(a, ctx) == T::rank(b, ctx) && T::subspace_contains(a, b, ctx) && T::subspace_contains(b, a, ctx)
}

/// Basis of `span a ∩ span b`; both given as spanning sets in `K^n`.
pub fn intersect<T: Field>(a: &Matrix<T>, b: &Matrix<T>, ctx: &Ctx) -> Matrix<T> {
    let n = a.rows();
    if a.cols() == 0 || b.cols() == 0 {
        return Matrix::zeros(n, 0);
    }
    let k = T::kernel_basis(&a.hstack(&(-b)), ctx);
    let top = k.rows_range(0, a.cols());
    T::range_basis(&(a * &top), ctx)
}

pub fn span_sum<T: Field>(a: &Matrix<T>, b: &Matrix<T>, ctx: &Ctx) -> Matrix<T> {
    T::range_basis(&a.hstack(b), ctx)
}

/// Basis of the orthogonal complement of `span a` in `K^n`.
pub fn orth_complement<T: Field>(a: &Matrix<T>, ctx: &Ctx) -> Matrix<T> {
    let n = a.rows();
    if a.cols() == 0 {
        return Matrix::identity(n);
    }
    T::kernel_basis(&a.adjoint(), ctx)
}

/// Orthogonal projector onto `span b`, where `b` has full column rank.
pub fn projector<T: Field>(b: &Matrix<T>, ctx: &Ctx) -> Matrix<T> {
    let n = b.rows();
    if b.cols() == 0 {
        return Matrix::zeros(n, n);
    }
    let bh = b.adjoint();
    let x = T::solve(&(&bh * b), &bh, ctx).expect("gram matrix of a basis is invertible");
    b * &x
}

pub fn inverse<T: Field>(a: &Matrix<T>, ctx: &Ctx) -> Option<Matrix<T>> {
    if !a.is_square() {
        return None;
    }
    let n = a.rows();
    if T::rank(a, ctx) < n {
        return None;
    }
    T::solve(a, &Matrix::identity(n), ctx)
}

/// Rank normal form: invertible `s`, `t` with `s a t = [I_r 0; 0 0]`.
pub fn rank_normal_form<T: Field>(a: &Matrix<T>, ctx: &Ctx) -> (Matrix<T>, Matrix<T>, usize) {
    let (p, q) = a.shape();
    let left_null = T::kernel_basis(&a.adjoint(), ctx);
    let r = p - left_null.cols();
    let z = T::completion(&left_null, ctx);
    let s0 = Matrix::vcat(p, &[&z.adjoint(), &left_null.adjoint()]);
    let top = &z.adjoint() * a;
    // top has full row rank r: right inverse and kernel complete it.
    let ker = T::kernel_basis(&top, ctx);
    let rinv = T::solve(&top, &Matrix::identity(r), ctx).unwrap_or_else(|| Matrix::zeros(q, r));
    let t = rinv.hstack(&ker);
    (s0, t, r)
}
