//! Block decompositions of a product `DL` of a dissipative and a symmetric relation.
//!
//! The float backend produces a unitary `U`. The exact backend cannot normalize, so its
//! `U` has pairwise orthogonal columns with squared lengths `gram`; all blocks are taken
//! in the coordinates `U* x`, and a vector is recovered as `U diag(gram)^{-1} (U* x)`. In
//! that metric the projector identities read `L22 W2^{-1} L22 = L22` with `W2` the second
//! part of `diag(gram)`; in the float case `W2 = I`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfield::{self, Ctx, Field, HermClass, Matrix, TolerancePolicy};
use crate::pencil::MatrixPencil;
use crate::relation::LinearRelation;

/// Optional facts that hold when the inputs carry extra structure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DecompositionFacts {
    /// `L` nonnegative: is `L11` PSD?
    pub l11_psd: Option<bool>,
    /// `L` maximally nonnegative: is `ker L11 ⊆ ker L21`?
    pub ker_l11_in_ker_l21: Option<bool>,
    /// `D` skew-symmetric: is `D11` skew-Hermitian?
    pub d11_skew: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct ProductDecomposition<T: Field> {
    /// Columns: basis of `X1 = ran L ∩ dom D`, then of its orthogonal complement.
    pub u: Matrix<T>,
    /// Squared column lengths of `u` (all ones in the float backend).
    pub gram: Vec<T>,
    pub n1: usize,
    pub n2: usize,
    pub l11: Matrix<T>,
    pub l21: Matrix<T>,
    pub l22: Matrix<T>,
    pub d11: Matrix<T>,
    pub d21: Matrix<T>,
    pub d22: Matrix<T>,
    pub facts: DecompositionFacts,
}

impl<T: Field> ProductDecomposition<T> {
    /// `diag(gram)` restricted to the second block.
    pub fn w2(&self) -> Matrix<T> {
        Matrix::diag(&self.gram[self.n1..])
    }

    pub fn w1(&self) -> Matrix<T> {
        Matrix::diag(&self.gram[..self.n1])
    }

    /// `U diag(gram)^{-1}`: maps block coordinates back to `K^n`.
    pub fn v(&self) -> Matrix<T> {
        let inv: Vec<T> = self.gram.iter().map(|g| T::one() / g.clone()).collect();
        &self.u * &Matrix::diag(&inv)
    }

    /// The relation spanned by `diag(V, V) [L11 0; L21 L22; D11 0; D21 D22]`.
    pub fn reconstruct(&self, pol: &TolerancePolicy) -> LinearRelation<T> {
        let (n1, n2) = (self.n1, self.n2);
        let n = n1 + n2;
        let top = Matrix::vcat(n, &[&self.l11.hstack(&Matrix::zeros(n1, n2)), &self.l21.hstack(&self.l22)]);
        let bot = Matrix::vcat(n, &[&self.d11.hstack(&Matrix::zeros(n1, n2)), &self.d21.hstack(&self.d22)]);
        let v = self.v();
        LinearRelation::from_span_unit(&(&v * &top), &(&v * &bot), pol).expect("same shape")
    }

    /// The sub-pencil `sL11 - D11`.
    pub fn pencil11(&self) -> MatrixPencil<T> {
        MatrixPencil { e: self.l11.clone(), a: self.d11.clone() }
    }
}

struct Blocks<T> {
    u1: Matrix<T>,
    u2: Matrix<T>,
    l11: Matrix<T>,
    l21: Matrix<T>,
    l22: Matrix<T>,
    d11: Matrix<T>,
    d21: Matrix<T>,
    d22: Matrix<T>,
}

/// The block construction; `exclude` is removed from the second block.
fn blocks<T: Field>(d: &LinearRelation<T>, l: &LinearRelation<T>, exclude: &Matrix<T>, ctx: &Ctx) -> Result<Blocks<T>> {
    let n = d.n();
    let pd = d.parts();
    let pl = l.parts();
    let x1 = numfield::intersect(&pl.ran, &pd.dom, ctx);
    let u1 = T::orthogonalize(&x1);
    let u2 = T::orthogonalize(&numfield::orth_complement(&u1.hstack(exclude), ctx));
    let p_ker = numfield::projector(&T::orthogonalize(&pl.ker), ctx);
    let p_mul = numfield::projector(&T::orthogonalize(&pd.mul), ctx);
    let id = Matrix::<T>::identity(n);
    let broken = |what: &str| Error::Numerical(format!("{what} is not solvable on X1"));
    let cl = T::solve(&l.g(), &u1, ctx).ok_or_else(|| broken("L"))?;
    let lu1 = &(&id - &p_ker) * &(&l.f() * &cl);
    let cd = T::solve(&d.f(), &u1, ctx).ok_or_else(|| broken("D"))?;
    let du1 = &(&id - &p_mul) * &(&d.g() * &cd);
    let (u1h, u2h) = (u1.adjoint(), u2.adjoint());
    Ok(Blocks {
        l11: &u1h * &lu1,
        l21: &u2h * &lu1,
        l22: &(&u2h * &p_ker) * &u2,
        d11: &u1h * &du1,
        d21: &u2h * &du1,
        d22: -&(&(&u2h * &p_mul) * &u2),
        u1,
        u2,
    })
}

fn gram_diag<T: Field>(u: &Matrix<T>) -> Vec<T> {
    let g = &u.adjoint() * u;
    (0..u.cols()).map(|i| g[(i, i)].clone()).collect()
}

/// Checks the hypotheses: `D` dissipative, `L` symmetric, `ker L ∩ mul D = {0}`.
pub fn check_product_hypotheses<T: Field>(d: &LinearRelation<T>, l: &LinearRelation<T>) -> Result<()> {
    if d.n() != l.n() {
        return Err(Error::Shape(format!("relations on K^{} and K^{}", d.n(), l.n())));
    }
    if !d.classify().dissipative {
        return Err(Error::Precondition("D not dissipative".into()));
    }
    if !l.classify().symmetric {
        return Err(Error::Precondition("L not symmetric".into()));
    }
    let ctx = d.ctx();
    if numfield::intersect(&l.parts().ker, &d.parts().mul, &ctx).cols() > 0 {
        return Err(Error::Precondition("ker L ∩ mul D is nontrivial".into()));
    }
    Ok(())
}

pub fn product_decomposition<T: Field>(d: &LinearRelation<T>, l: &LinearRelation<T>) -> Result<ProductDecomposition<T>> {
    check_product_hypotheses(d, l)?;
    let ctx = d.ctx();
    let pol = *d.policy();
    let n = d.n();
    let b = blocks(d, l, &Matrix::zeros(n, 0), &ctx)?;
    let n1 = b.u1.cols();
    let u = b.u1.hstack(&b.u2);
    if u.cols() != n {
        return Err(Error::Numerical(format!("basis has {} columns, expected {n}", u.cols())));
    }
    let (ls, ds) = (l.classify(), d.classify());
    let mut facts = DecompositionFacts::default();
    let scale = b.l11.norm_fro().max(b.d11.norm_fro());
    if ls.nonnegative {
        facts.l11_psd = Some(T::hermitian_class(&b.l11, &pol).is_psd());
    }
    if ls.max_nonnegative {
        let k = T::kernel_basis(&b.l11, &ctx);
        facts.ker_l11_in_ker_l21 = Some(T::negligible(&(&b.l21 * &k), scale, &pol));
    }
    if ds.skew_symmetric {
        facts.d11_skew = Some(T::negligible(&(&b.d11 + &b.d11.adjoint()), scale, &pol));
    }
    Ok(ProductDecomposition {
        gram: gram_diag(&u),
        u,
        n1,
        n2: n - n1,
        l11: b.l11,
        l21: b.l21,
        l22: b.l22,
        d11: b.d11,
        d21: b.d21,
        d22: b.d22,
        facts,
    })
}

/// Structural kernel identities of a product decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    /// `ker L22 ∩ ker D22 = {0}`.
    pub blocks_trivial: bool,
    /// `mul D +̂ ker L = (ran L)⊥ +̂ (dom D)⊥`, evaluated directly.
    pub sums_equal: bool,
    /// The two sides above agree.
    pub consistent: bool,
    /// `U1 ker L11 = mul L`, when `D` is a graph and `L` self-adjoint.
    pub ker_l11_is_mul_l: Option<bool>,
    /// `U1 ker D11 = ker D`, when `D` is maximally dissipative and `L^{-1}` a graph.
    pub ker_d11_is_ker_d: Option<bool>,
}

pub fn decomposition_kernels<T: Field>(
    pd: &ProductDecomposition<T>,
    d: &LinearRelation<T>,
    l: &LinearRelation<T>,
) -> KernelReport {
    let ctx = d.ctx();
    let kl22 = T::kernel_basis(&pd.l22, &ctx);
    let kd22 = T::kernel_basis(&pd.d22, &ctx);
    let blocks_trivial = numfield::intersect(&kl22, &kd22, &ctx).cols() == 0;
    let (pdp, plp) = (d.parts(), l.parts());
    let lhs = plp.ker.hstack(&pdp.mul);
    let rhs = numfield::orth_complement(&plp.ran, &ctx).hstack(&numfield::orth_complement(&pdp.dom, &ctx));
    let sums_equal = numfield::subspace_equal(&lhs, &rhs, &ctx);
    let u1 = pd.u.cols_range(0, pd.n1);
    let lift = |k: &Matrix<T>| &u1 * k;
    let ker_l11_is_mul_l = (pdp.mul.cols() == 0 && l.classify().self_adjoint)
        .then(|| numfield::subspace_equal(&lift(&T::kernel_basis(&pd.l11, &ctx)), &plp.mul, &ctx));
    let linv_graph = l.dim() == l.n() && T::rank(&l.g(), &ctx) == l.n();
    let ker_d11_is_ker_d = (d.classify().max_dissipative && linv_graph)
        .then(|| numfield::subspace_equal(&lift(&T::kernel_basis(&pd.d11, &ctx)), &pdp.ker, &ctx));
    KernelReport { blocks_trivial, sums_equal, consistent: blocks_trivial == sums_equal, ker_l11_is_mul_l, ker_d11_is_ker_d }
}

/// `S (sE - A) T` in the block pattern
///
/// ```text
///   [ sL11 - D11   0    0    0    0   0 ]  n1
///   [   D21       sI    0    0    0   0 ]  n2
///   [ sL21         0    I    0    0   0 ]  n3
///   [   0          0    0   sI   -I   0 ]  n4
///   [   0          0    0    0    0   0 ]  zero rows
/// ```
///
/// with `sL11 - D11` regular and positive real. Zero columns come last.
#[derive(Clone, Debug)]
pub struct QuasiKroneckerPH<T: Field> {
    pub s: Matrix<T>,
    pub t: Matrix<T>,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub n4: usize,
    pub zero_rows: usize,
    pub zero_cols: usize,
    pub l11: Matrix<T>,
    pub d11: Matrix<T>,
    pub d21: Matrix<T>,
    pub l21: Matrix<T>,
}

impl<T: Field> QuasiKroneckerPH<T> {
    /// The pencil the block pattern describes.
    pub fn pattern(&self) -> MatrixPencil<T> {
        let (n1, n2, n3, n4) = (self.n1, self.n2, self.n3, self.n4);
        let rows = n1 + n2 + n3 + n4 + self.zero_rows;
        let cols = n1 + n2 + n3 + 2 * n4 + self.zero_cols;
        let (mut e, mut a) = (Matrix::zeros(rows, cols), Matrix::zeros(rows, cols));
        let (r2, r3, r4) = (n1, n1 + n2, n1 + n2 + n3);
        let (c2, c3, c4, c5) = (n1, n1 + n2, n1 + n2 + n3, n1 + n2 + n3 + n4);
        e.set_block(0, 0, &self.l11);
        a.set_block(0, 0, &self.d11);
        e.set_block(r2, c2, &Matrix::identity(n2));
        a.set_block(r2, 0, &-&self.d21);
        e.set_block(r3, 0, &self.l21);
        a.set_block(r3, c3, &-&Matrix::<T>::identity(n3));
        e.set_block(r4, c4, &Matrix::identity(n4));
        a.set_block(r4, c5, &Matrix::identity(n4));
        MatrixPencil { e, a }
    }
}

pub fn quasi_kronecker_ph<T: Field>(
    d: &LinearRelation<T>,
    l: &LinearRelation<T>,
    p: &MatrixPencil<T>,
) -> Result<QuasiKroneckerPH<T>> {
    let n = d.n();
    if l.n() != n || p.rows() != n {
        return Err(Error::Shape(format!("pencil has {} rows, relations live on K^{n}", p.rows())));
    }
    if !d.classify().max_dissipative {
        return Err(Error::Precondition("D not maximally dissipative".into()));
    }
    if !l.classify().max_nonnegative {
        return Err(Error::Precondition("L not maximally nonnegative".into()));
    }
    let pol = *d.policy();
    let range = LinearRelation::from_span(&p.e, &p.a, &pol)?;
    if range != d.product(l)? {
        return Err(Error::Precondition("ran [E; A] differs from DL".into()));
    }
    let ctx = p.ctx(&pol);
    let m = p.cols();

    // Split off X = mul D ∩ ker L; it contributes pure [sI, -I] blocks.
    let x = T::orthogonalize(&numfield::intersect(&d.parts().mul, &l.parts().ker, &ctx));
    let kx = x.cols();
    let b = blocks(d, l, &x, &ctx)?;
    let (k1, k2) = (b.u1.cols(), b.u2.cols());
    if k1 + k2 + kx != n {
        return Err(Error::Numerical(format!("split {k1}+{k2}+{kx} does not fill K^{n}")));
    }
    let s0 = Matrix::vcat(n, &[&b.u1.adjoint(), &b.u2.adjoint(), &x.adjoint()]);

    // Deflate the common kernel of L11 and D11.
    let nk = T::kernel_basis(&b.l11.vstack(&b.d11), &ctx);
    let z = nk.cols();
    let n1 = k1 - z;
    let bb = T::completion(&nk, &ctx);
    let t1 = bb.hstack(&nk);
    let l11 = &(&bb.adjoint() * &b.l11) * &bb;
    let d11 = &(&bb.adjoint() * &b.d11) * &bb;
    let l21_1 = &b.l21 * &bb;
    let d21_1 = &b.d21 * &bb;
    let d21_2 = &b.d21 * &nk;

    // Normalize the projector pencil `sL22 - D22`.
    let kd = T::kernel_basis(&b.d22, &ctx);
    let kl = T::kernel_basis(&b.l22, &ctx);
    let (k3, n3) = (kd.cols(), kl.cols());
    if k3 + n3 != k2 {
        return Err(Error::Numerical(format!("projector kernels {k3}+{n3} do not fill {k2}")));
    }
    let p1 = &(&kd.adjoint() * &b.l22) * &kd;
    let q1 = -&(&(&kl.adjoint() * &b.d22) * &kl);
    let sing = |w: &str| Error::Numerical(format!("{w} block is singular"));
    let p1i = numfield::inverse(&p1, &ctx).ok_or_else(|| sing("L22"))?;
    let q1i = numfield::inverse(&q1, &ctx).ok_or_else(|| sing("D22"))?;
    let s2 = &Matrix::block_diag(&[&p1i, &q1i]) * &kd.hstack(&kl).adjoint();
    let s2l = &s2 * &l21_1;
    let s2d1 = &s2 * &d21_1;
    let s2d2 = &s2 * &d21_2;

    // Rank normal form of the coupling into the deflated columns.
    let (s3, _t3, k5) = numfield::rank_normal_form(&s2d2.rows_range(0, k3), &ctx);
    let n2 = k3 - k5;
    let n4 = k5 + kx;
    let l21t = s2l.rows_range(k3, k2);
    let d21t = -&(&s3 * &s2d1.rows_range(0, k3)).rows_range(k5, k3);

    // S = Π M3 M2 M1 S0 with rows [n1 | z | k5 | n2 | n3 | kX] before Π.
    let m1 = Matrix::block_diag(&[&t1.adjoint(), &Matrix::identity(k2 + kx)]);
    let m2 = Matrix::block_diag(&[&Matrix::identity(k1), &s2, &Matrix::identity(kx)]);
    let m3 = Matrix::block_diag(&[&Matrix::identity(k1), &s3, &Matrix::identity(n3 + kx)]);
    let sraw = &(&(&m3 * &m2) * &m1) * &s0;
    let mut order: Vec<usize> = (0..n1).collect();
    let (zs, k5s, n2s, n3s, xs) = (n1, k1, k1 + k5, k1 + k3, k1 + k2);
    order.extend(n2s..n2s + n2);
    order.extend(n3s..n3s + n3);
    order.extend(k5s..k5s + k5);
    order.extend(xs..xs + kx);
    order.extend(zs..zs + z);
    let s = sraw.select_rows(&order);

    let mut out = QuasiKroneckerPH {
        s,
        t: Matrix::zeros(m, m),
        n1,
        n2,
        n3,
        n4,
        zero_rows: z,
        zero_cols: 0,
        l11,
        d11,
        d21: d21t,
        l21: l21t,
    };
    let target = out.pattern();
    let dcols = target.cols();
    let se = &out.s * &p.e;
    let sa = &out.s * &p.a;
    let tp = T::solve(&se.vstack(&sa), &target.e.vstack(&target.a), &ctx)
        .ok_or_else(|| Error::Numerical("block pattern is not reachable by column operations".into()))?;
    let ker = T::kernel_basis(&p.e.vstack(&p.a), &ctx);
    if dcols + ker.cols() != m {
        return Err(Error::Numerical(format!("pattern has {dcols} columns but rank [E; A] is {}", m - ker.cols())));
    }
    out.t = tp.hstack(&ker);
    out.zero_cols = ker.cols();
    if T::rank(&out.t, &ctx) != m {
        return Err(Error::Numerical("column transformation is singular".into()));
    }
    let got = p.transform(&out.s, &out.t);
    let want = out.pattern();
    let scale = p.scale().max(1.0) * out.s.norm_fro().max(1.0) * out.t.norm_fro().max(1.0);
    if !T::negligible(&(&got.e - &want.e), scale, &pol) || !T::negligible(&(&got.a - &want.a), scale, &pol) {
        return Err(Error::Numerical("transformed pencil misses the block pattern".into()));
    }
    Ok(out)
}

/// Convenience for tests and the CLI: is `sL11 - D11` positive real?
pub fn l11_d11_positive_real<T: Field>(pd: &ProductDecomposition<T>, pol: &TolerancePolicy) -> bool {
    T::hermitian_class(&pd.l11, pol).is_psd()
        && T::hermitian_class(&pd.l11, pol) != HermClass::NotHermitian
        && T::hermitian_class(&(&pd.d11 + &pd.d11.adjoint()), pol).is_nsd()
}
