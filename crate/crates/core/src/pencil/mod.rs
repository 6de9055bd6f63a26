//! Matrix pencils `sE - A` and their Kronecker invariants.
//!
//! Minimal indices and infinite blocks are peeled off by a staircase of rank
//! compressions; the finite part (square, `E` invertible) is handed to the backend's
//! Jordan solver.

pub(crate) mod finite_exact;
pub(crate) mod finite_float;

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfield::{float, Ctx, Field, GaussQ, HermClass, Matrix, Poly, TolerancePolicy, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPencil<T> {
    pub e: Matrix<T>,
    pub a: Matrix<T>,
}

/// A group of finite eigenvalues sharing one Jordan structure.
///
/// The exact backend describes the group by a squarefree polynomial whose roots are the
/// eigenvalues (`roots` holds numerical approximations). The float backend reports one
/// eigenvalue per group and no polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenClass {
    pub poly: Option<Poly>,
    pub roots: Vec<C64>,
    /// Jordan block sizes, descending.
    pub blocks: Vec<usize>,
}

/// One finite eigenvalue with its Jordan block sizes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteEigen {
    pub lambda: C64,
    pub blocks: Vec<usize>,
}

impl FiniteEigen {
    pub fn semi_simple(&self) -> bool {
        self.blocks.iter().all(|&b| b == 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KroneckerInvariants {
    pub classes: Vec<EigenClass>,
    /// Block sizes at infinity.
    pub alpha: Vec<usize>,
    /// Column blocks; the column minimal indices are `beta_i - 1`.
    pub beta: Vec<usize>,
    /// Row blocks; the row minimal indices are `gamma_i - 1`.
    pub gamma: Vec<usize>,
    /// Size of the finite Jordan part.
    pub n0: usize,
    /// Some float rank decision was close to the threshold.
    pub ambiguous: bool,
}

fn cmp_c64(x: &C64, y: &C64) -> Ordering {
    x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
}

impl KroneckerInvariants {
    /// Finite eigenvalues sorted by `(re, im)`.
    pub fn finite(&self) -> Vec<FiniteEigen> {
        let mut v: Vec<FiniteEigen> = self
            .classes
            .iter()
            .flat_map(|c| c.roots.iter().map(|&r| FiniteEigen { lambda: r, blocks: c.blocks.clone() }))
            .collect();
        v.sort_by(|x, y| cmp_c64(&x.lambda, &y.lambda));
        v
    }

    pub fn index(&self) -> usize {
        self.alpha.iter().chain(&self.gamma).copied().max().unwrap_or(0)
    }

    pub fn is_regular(&self) -> bool {
        self.beta.is_empty() && self.gamma.is_empty()
    }

    pub fn column_minimal_indices(&self) -> Vec<usize> {
        self.beta.iter().map(|b| b - 1).collect()
    }

    pub fn row_minimal_indices(&self) -> Vec<usize> {
        self.gamma.iter().map(|g| g - 1).collect()
    }

    /// `(rows, cols)` implied by the block structure.
    pub fn shape(&self) -> (usize, usize) {
        let a: usize = self.alpha.iter().sum();
        let rows = self.n0 + a + self.beta.iter().map(|b| b - 1).sum::<usize>() + self.gamma.iter().sum::<usize>();
        let cols = self.n0 + a + self.beta.iter().sum::<usize>() + self.gamma.iter().map(|g| g - 1).sum::<usize>();
        (rows, cols)
    }

    /// Jordan blocks at the finite eigenvalue nearest to `lambda` within `tol`.
    pub fn blocks_at(&self, lambda: C64, tol: f64) -> Vec<usize> {
        let t = tol * lambda.norm().max(1.0);
        let mut best: Option<(f64, &Vec<usize>)> = None;
        for c in &self.classes {
            for r in &c.roots {
                let d = (r - lambda).norm();
                if d <= t && best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, &c.blocks));
                }
            }
        }
        best.map(|(_, b)| b.clone()).unwrap_or_default()
    }

    /// Same block structure, and finite spectra matching to `tol` (relative).
    pub fn matches(&self, other: &Self, tol: f64) -> bool {
        if self.alpha != other.alpha || self.beta != other.beta || self.gamma != other.gamma || self.n0 != other.n0 {
            return false;
        }
        let mut theirs = other.finite();
        for f in self.finite() {
            let t = tol * f.lambda.norm().max(1.0);
            let pos = theirs.iter().position(|g| g.blocks == f.blocks && (g.lambda - f.lambda).norm() <= t);
            match pos {
                Some(i) => {
                    theirs.remove(i);
                }
                None => return false,
            }
        }
        theirs.is_empty()
    }
}

pub(crate) struct Staircase<T> {
    pub beta: Vec<usize>,
    pub alpha: Vec<usize>,
    pub e: Matrix<T>,
    pub a: Matrix<T>,
}

/// Right staircase: repeatedly compress `ker E` and the left null space of `A ker E`.
/// Returns column blocks, infinite blocks and the remaining pencil (with `E` of full
/// column rank).
pub(crate) fn staircase<T: Field>(e: &Matrix<T>, a: &Matrix<T>, ctx: &Ctx) -> Staircase<T> {
    let (mut e, mut a) = (e.clone(), a.clone());
    let (mut beta, mut alpha) = (Vec::new(), Vec::new());
    let mut prev_rho: Option<usize> = None;
    let mut j = 1;
    // Deflating through a nearly rank-deficient E amplifies rounding in later steps by
    // about (scale / sigma_min)^2; the ambiguity band is widened to match.
    let band0 = ctx.band();
    let scale = ctx.scale.max(e.norm_fro()).max(a.norm_fro());
    loop {
        if let Some(sm) = T::min_retained_sv(&e, ctx) {
            ctx.set_band(ctx.band().max(band0 * (scale / sm).powi(2)));
        }
        let mu = if e.cols() == 0 { 0 } else { T::kernel_basis(&e, ctx).cols() };
        if let Some(rho) = prev_rho {
            // infinite blocks of size j-1
            alpha.extend(std::iter::repeat_n(j - 1, rho.saturating_sub(mu)));
            if mu > rho {
                ctx.flag_ambiguous();
            }
        }
        if mu == 0 {
            break;
        }
        let nb = T::kernel_basis(&e, ctx);
        let an = &a * &nb;
        let y = T::kernel_basis(&an.adjoint(), ctx);
        let rho = e.rows() - y.cols();
        beta.extend(std::iter::repeat_n(j, mu.saturating_sub(rho)));
        let c = T::completion(&nb, ctx);
        let yh = y.adjoint();
        e = &(&yh * &e) * &c;
        a = &(&yh * &a) * &c;
        prev_rho = Some(rho);
        j += 1;
    }
    ctx.set_band(band0);
    beta.sort_unstable_by(|x, y| y.cmp(x));
    alpha.sort_unstable_by(|x, y| y.cmp(x));
    Staircase { beta, alpha, e, a }
}

impl<T: Field> MatrixPencil<T> {
    pub fn new(e: Matrix<T>, a: Matrix<T>) -> Result<Self> {
        if e.shape() != a.shape() {
            return Err(Error::Shape(format!("E is {:?} but A is {:?}", e.shape(), a.shape())));
        }
        Ok(MatrixPencil { e, a })
    }

    pub fn rows(&self) -> usize {
        self.e.rows()
    }

    pub fn cols(&self) -> usize {
        self.e.cols()
    }

    pub fn is_square(&self) -> bool {
        self.e.is_square()
    }

    /// Largest Frobenius norm of the two coefficients; the absolute rank scale.
    pub fn scale(&self) -> f64 {
        self.e.norm_fro().max(self.a.norm_fro())
    }

    pub fn ctx(&self, pol: &TolerancePolicy) -> Ctx {
        Ctx::with_scale(*pol, self.scale())
    }

    /// `S (sE - A) T`.
    pub fn transform(&self, s: &Matrix<T>, t: &Matrix<T>) -> Self {
        MatrixPencil { e: &(s * &self.e) * t, a: &(s * &self.a) * t }
    }

    pub fn to_c64(&self) -> MatrixPencil<C64> {
        MatrixPencil { e: self.e.to_c64(), a: self.a.to_c64() }
    }

    pub fn to_gauss(&self) -> MatrixPencil<GaussQ> {
        MatrixPencil { e: self.e.map(|x| x.to_gauss()), a: self.a.map(|x| x.to_gauss()) }
    }

    pub fn kronecker_invariants(&self, pol: &TolerancePolicy) -> KroneckerInvariants {
        let ctx = self.ctx(pol);
        let right = staircase(&self.e, &self.a, &ctx);
        let left = staircase(&right.e.adjoint(), &right.a.adjoint(), &ctx);
        let mut alpha = right.alpha;
        if !left.alpha.is_empty() {
            // cannot happen in exact arithmetic: the remainder has E of full column rank
            ctx.flag_ambiguous();
            alpha.extend(left.alpha);
            alpha.sort_unstable_by(|x, y| y.cmp(x));
        }
        let (fe, fa) = (left.e.adjoint(), left.a.adjoint());
        let n0 = fe.rows();
        let mut classes = if n0 == 0 || fe.cols() != n0 { Vec::new() } else { T::finite_jordan(&fe, &fa, &ctx) };
        if fe.rows() != fe.cols() {
            ctx.flag_ambiguous();
        }
        classes.sort_by(|x, y| match (x.roots.first(), y.roots.first()) {
            (Some(p), Some(q)) => cmp_c64(p, q),
            _ => Ordering::Equal,
        });
        KroneckerInvariants { classes, alpha, beta: right.beta, gamma: left.beta, n0, ambiguous: ctx.ambiguous() }
    }

    pub fn is_regular(&self, pol: &TolerancePolicy) -> bool {
        self.is_square() && self.kronecker_invariants(pol).is_regular()
    }

    pub fn spectrum(&self, pol: &TolerancePolicy) -> Vec<FiniteEigen> {
        self.kronecker_invariants(pol).finite()
    }

    pub fn index(&self, pol: &TolerancePolicy) -> usize {
        self.kronecker_invariants(pol).index()
    }

    /// `E = E* >= 0` and `A + A* <= 0`.
    pub fn is_positive_real(&self, pol: &TolerancePolicy) -> Result<bool> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows(), cols: self.cols() });
        }
        let ce = T::hermitian_class(&self.e, pol);
        let ca = T::hermitian_class(&(&self.a + &self.a.adjoint()), pol);
        Ok(ce.is_psd() && ce != HermClass::NotHermitian && ca.is_nsd())
    }

    fn require_regular(&self, pol: &TolerancePolicy) -> Result<KroneckerInvariants> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows(), cols: self.cols() });
        }
        let inv = self.kronecker_invariants(pol);
        if !inv.is_regular() {
            return Err(Error::Singular);
        }
        Ok(inv)
    }

    /// Pole order of `(sE - A)^{-1}` at `lambda`: the largest Jordan block there.
    pub fn resolvent_pole_order(&self, lambda: C64, pol: &TolerancePolicy) -> Result<usize> {
        let inv = self.require_regular(pol)?;
        Ok(inv.blocks_at(lambda, 1e-8).into_iter().max().unwrap_or(0))
    }

    /// Fits `log ||(λE - A)^{-1}||` against `log λ` on a geometric grid in `[1e6, 1e12]`.
    /// The resolvents are evaluated exactly, so this works for both backends, and the grid
    /// can sit far enough out that a large `1/λ` term from the finite part has died off.
    pub fn resolvent_growth_estimate(&self, samples: usize) -> Result<GrowthEstimate> {
        let pol = TolerancePolicy::default();
        self.require_regular(&pol)?;
        let p = self.to_gauss();
        let n = p.rows();
        let ctx = Ctx::new(pol);
        let samples = samples.max(2);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for k in 0..samples {
            let ex = 6.0 + 6.0 * k as f64 / (samples - 1) as f64;
            let lam = 10f64.powf(ex);
            let lq = <GaussQ as Field>::from_c64(C64::new(lam, 0.0));
            let m = &p.e.scale(&lq) - &p.a;
            let Some(x) = <GaussQ as Field>::solve(&m, &Matrix::identity(n), &ctx) else { continue };
            let nrm = float::spectral_norm(&x.to_c64());
            if nrm > 0.0 {
                xs.push(lam.log10());
                ys.push(nrm.log10());
            }
        }
        if xs.len() < 2 {
            // zero resolvent only for the empty pencil
            return Ok(GrowthEstimate { slope: -1.0, estimate: 0 });
        }
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let estimate = (slope.round() + 1.0).max(0.0) as usize;
        Ok(GrowthEstimate { slope, estimate })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub slope: f64,
    pub estimate: usize,
}

/// Alias for [`MatrixPencil::kronecker_invariants`].
pub fn kronecker_invariants<T: Field>(p: &MatrixPencil<T>, pol: &TolerancePolicy) -> KroneckerInvariants {
    p.kronecker_invariants(pol)
}
