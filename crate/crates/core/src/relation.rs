//! Linear relations `M ⊆ K^n × K^n`, stored in image representation `M = ran [F; G]`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfield::{self, Ctx, Field, HermClass, Matrix, TolerancePolicy};

/// Structural flags of a relation. See [`LinearRelation::classify`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationStructure {
    pub symmetric: bool,
    pub skew_symmetric: bool,
    pub dissipative: bool,
    pub nonnegative: bool,
    pub self_adjoint: bool,
    pub skew_adjoint: bool,
    pub max_dissipative: bool,
    pub max_nonnegative: bool,
}

/// Subspaces attached to a relation, each as a basis matrix in `K^n`.
#[derive(Clone, Debug)]
pub struct Parts<T> {
    pub dom: Matrix<T>,
    pub ran: Matrix<T>,
    pub ker: Matrix<T>,
    pub mul: Matrix<T>,
}

#[derive(Clone, Debug)]
pub struct LinearRelation<T: Field> {
    n: usize,
    basis: Matrix<T>,
    pol: TolerancePolicy,
    structure: OnceLock<RelationStructure>,
}

impl<T: Field> PartialEq for LinearRelation<T> {
    /// Same subspace (up to tolerance in the float backend).
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && numfield::subspace_equal(&self.basis, &other.basis, &self.ctx())
    }
}

impl<T: Field> LinearRelation<T> {
    /// `ran [F; G]`.
    pub fn from_span(f: &Matrix<T>, g: &Matrix<T>, pol: &TolerancePolicy) -> Result<Self> {
        if f.shape() != g.shape() {
            return Err(Error::Shape(format!("F is {:?} but G is {:?}", f.shape(), g.shape())));
        }
        let n = f.rows();
        let stacked = f.vstack(g);
        Ok(Self::from_basis_unchecked(n, T::range_basis(&stacked, &Ctx::new(*pol)), pol))
    }

    /// `ran [F; G]` with ranks measured against unit scale instead of the size of `F`, `G`.
    /// For spanning sets built from orthonormal bases, where tiny columns are cancellation
    /// residue rather than directions.
    pub fn from_span_unit(f: &Matrix<T>, g: &Matrix<T>, pol: &TolerancePolicy) -> Result<Self> {
        if f.shape() != g.shape() {
            return Err(Error::Shape(format!("F is {:?} but G is {:?}", f.shape(), g.shape())));
        }
        let basis = T::range_basis(&f.vstack(g), &Ctx::with_scale(*pol, 1.0));
        Ok(Self::from_basis_unchecked(f.rows(), basis, pol))
    }

    /// `ker [K, L] = {(x, y) : Kx + Ly = 0}`.
    pub fn from_kernel(k: &Matrix<T>, l: &Matrix<T>, pol: &TolerancePolicy) -> Result<Self> {
        if k.shape() != l.shape() {
            return Err(Error::Shape(format!("K is {:?} but L is {:?}", k.shape(), l.shape())));
        }
        let n = k.cols();
        let ctx = Ctx::new(*pol);
        let ker = T::kernel_basis(&k.hstack(l), &ctx);
        let ker = if T::BACKEND == crate::Backend::Float { ker } else { T::range_basis(&ker, &ctx) };
        Ok(Self::from_basis_unchecked(n, ker, pol))
    }

    /// Wraps a `2n x d` full column rank basis as is.
    pub(crate) fn from_basis_unchecked(n: usize, basis: Matrix<T>, pol: &TolerancePolicy) -> Self {
        debug_assert_eq!(basis.rows(), 2 * n);
        LinearRelation { n, basis, pol: *pol, structure: OnceLock::new() }
    }

    /// `ran b` for an arbitrary `2n x k` spanning set.
    pub fn from_stacked(b: &Matrix<T>, pol: &TolerancePolicy) -> Result<Self> {
        if !b.rows().is_multiple_of(2) {
            return Err(Error::Shape(format!("stacked basis has odd row count {}", b.rows())));
        }
        let n = b.rows() / 2;
        Self::from_span(&b.rows_range(0, n), &b.rows_range(n, 2 * n), pol)
    }

    /// `gr W = {(x, Wx)}`.
    pub fn graph(w: &Matrix<T>, pol: &TolerancePolicy) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::Shape(format!("graph of a {}x{} matrix", w.rows(), w.cols())));
        }
        Self::from_span(&Matrix::identity(w.rows()), w, pol)
    }

    pub fn zero(n: usize, pol: &TolerancePolicy) -> Self {
        Self::from_basis_unchecked(n, Matrix::zeros(2 * n, 0), pol)
    }

    pub fn full(n: usize, pol: &TolerancePolicy) -> Self {
        Self::from_basis_unchecked(n, Matrix::identity(2 * n), pol)
    }

    /// `S × {0}` for a basis `s` of a subspace of `K^n`.
    pub fn first_axis(s: &Matrix<T>, pol: &TolerancePolicy) -> Self {
        let z = Matrix::zeros(s.rows(), s.cols());
        Self::from_span(s, &z, pol).expect("same shape")
    }

    /// `{0} × S`.
    pub fn second_axis(s: &Matrix<T>, pol: &TolerancePolicy) -> Self {
        let z = Matrix::zeros(s.rows(), s.cols());
        Self::from_span(&z, s, pol).expect("same shape")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn policy(&self) -> &TolerancePolicy {
        &self.pol
    }

    /// Float bases are orthonormal, so blocks of them are judged against unit scale; a
    /// residue like `1e-16` in `F` is not a domain direction.
    pub fn ctx(&self) -> Ctx {
        Ctx::with_scale(self.pol, 1.0)
    }

    /// First component block `F` of the basis.
    pub fn f(&self) -> Matrix<T> {
        self.basis.rows_range(0, self.n)
    }

    /// Second component block `G` of the basis.
    pub fn g(&self) -> Matrix<T> {
        self.basis.rows_range(self.n, 2 * self.n)
    }

    fn same_ambient(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Shape(format!("relations on K^{} and K^{}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn parts(&self) -> Parts<T> {
        let ctx = self.ctx();
        let (f, g) = (self.f(), self.g());
        let nf = T::kernel_basis(&f, &ctx);
        let ng = T::kernel_basis(&g, &ctx);
        Parts {
            dom: T::range_basis(&f, &ctx),
            ran: T::range_basis(&g, &ctx),
            ker: T::range_basis(&(&f * &ng), &ctx),
            mul: T::range_basis(&(&g * &nf), &ctx),
        }
    }

    /// `{(x, a y) : (x, y) ∈ M}`.
    pub fn scalar_mul(&self, a: &T) -> Self {
        let g = self.g().scale(a);
        Self::from_span(&self.f(), &g, &self.pol).expect("same shape")
    }

    /// `{(x, y1 + y2) : (x, y1) ∈ self, (x, y2) ∈ other}`.
    pub fn operator_sum(&self, other: &Self) -> Result<Self> {
        self.same_ambient(other)?;
        let ctx = self.ctx();
        let d1 = self.dim();
        let k = T::kernel_basis(&self.f().hstack(&(-&other.f())), &ctx);
        let (a, b) = (k.rows_range(0, d1), k.rows_range(d1, k.rows()));
        let x = &self.f() * &a;
        let y = &(&self.g() * &a) + &(&other.g() * &b);
        Self::from_span(&x, &y, &self.pol)
    }

    /// `{(x1 + x2, y1 + y2)}`, the span of both relations.
    pub fn componentwise_sum(&self, other: &Self) -> Result<Self> {
        self.same_ambient(other)?;
        Self::from_stacked(&self.basis.hstack(&other.basis), &self.pol)
    }

    /// `self · l = {(x, z) : (x, y) ∈ l, (y, z) ∈ self}`.
    pub fn product(&self, l: &Self) -> Result<Self> {
        self.same_ambient(l)?;
        let ctx = self.ctx();
        let dl = l.dim();
        let k = T::kernel_basis(&l.g().hstack(&(-&self.f())), &ctx);
        let (a, b) = (k.rows_range(0, dl), k.rows_range(dl, k.rows()));
        // spanned by combinations of orthonormal factors, so unit scale applies
        Self::from_span_unit(&(&l.f() * &a), &(&self.g() * &b), &self.pol)
    }

    /// `{(y, x) : (x, y) ∈ M}`.
    pub fn inverse(&self) -> Self {
        Self::from_basis_unchecked(self.n, self.g().vstack(&self.f()), &self.pol)
    }

    /// `M* = ker [G*, -F*]`.
    pub fn adjoint(&self) -> Self {
        Self::from_kernel(&self.g().adjoint(), &(-&self.f().adjoint()), &self.pol).expect("same shape")
    }

    /// Orthogonal complement in `K^{2n}`.
    pub fn orth_complement(&self) -> Self {
        let c = numfield::orth_complement(&self.basis, &self.ctx());
        Self::from_basis_unchecked(self.n, c, &self.pol)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.same_ambient(other)?;
        let b = numfield::intersect(&self.basis, &other.basis, &self.ctx());
        Ok(Self::from_basis_unchecked(self.n, b, &self.pol))
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.n == other.n && T::subspace_contains(&self.basis, &other.basis, &self.ctx())
    }

    /// Sub-relation spanned by the chosen basis columns.
    pub fn select(&self, cols: &[usize]) -> Self {
        Self::from_basis_unchecked(self.n, self.basis.select_cols(cols), &self.pol)
    }

    /// Same subspace, tolerance policy replaced (drops the cached structure).
    pub fn with_policy(&self, pol: &TolerancePolicy) -> Self {
        Self::from_basis_unchecked(self.n, self.basis.clone(), pol)
    }

    /// Flags from the algebraic criteria on `G*F`; computed once per value.
    pub fn classify(&self) -> RelationStructure {
        *self.structure.get_or_init(|| {
            let (f, g) = (self.f(), self.g());
            let gf = &g.adjoint() * &f;
            let sym_part = &gf + &gf.adjoint();
            let c_gf = T::hermitian_class(&gf, &self.pol);
            let c_sum = T::hermitian_class(&sym_part, &self.pol);
            let symmetric = c_gf != HermClass::NotHermitian;
            let skew_symmetric = c_sum == HermClass::Zero;
            let dissipative = c_sum.is_nsd();
            let nonnegative = symmetric && c_gf.is_psd();
            let full = self.dim() == self.n;
            RelationStructure {
                symmetric,
                skew_symmetric,
                dissipative,
                nonnegative,
                self_adjoint: symmetric && full,
                skew_adjoint: skew_symmetric && full,
                max_dissipative: dissipative && full,
                max_nonnegative: nonnegative && full,
            }
        })
    }

    /// The matrix `W` with `M = gr W`, or `None` when `rk F < n`.
    pub fn as_graph(&self) -> Result<Option<Matrix<T>>> {
        if self.dim() != self.n {
            return Err(Error::NotDimN { dim: self.dim(), n: self.n });
        }
        let ctx = self.ctx();
        let f = self.f();
        if T::rank(&f, &ctx) < self.n {
            return Ok(None);
        }
        let finv = numfield::inverse(&f, &ctx).ok_or_else(|| Error::Numerical("F not invertible".into()))?;
        Ok(Some(&self.g() * &finv))
    }

    pub fn to_c64(&self) -> LinearRelation<crate::C64> {
        LinearRelation::from_stacked(&self.basis.to_c64(), &self.pol).expect("even row count")
    }
}
