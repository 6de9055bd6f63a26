use faer::{Mat, Side};

use super::{Backend, Ctx, Field, HermClass, Matrix, TolerancePolicy, C64};

pub(crate) fn to_faer(a: &Matrix<C64>) -> Mat<C64> {
    Mat::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

pub(crate) fn from_faer(a: faer::MatRef<'_, C64>) -> Matrix<C64> {
    Matrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

struct Svd {
    /// Full `rows x rows` left factor.
    u: Matrix<C64>,
    s: Vec<f64>,
    /// Full `cols x cols` right factor (columns are right singular vectors).
    v: Matrix<C64>,
}

/// Deterministic unitary used to re-condition inputs on which faer's iterations stall
/// (seen with exactly repeated singular values); results are mapped back exactly.
fn scrambler(n: usize, t: usize) -> Mat<C64> {
    let z = Mat::<C64>::from_fn(n, n, |i, j| {
        let x = ((i * 7 + j * 3 + t) % 11) as f64 + 0.5;
        C64::new(x.cos(), (1.3 * x).sin())
    });
    z.qr().compute_Q()
}

const RETRIES: usize = 4;

fn svd_full(a: &Matrix<C64>) -> Svd {
    let m = to_faer(a);
    let pack = |svd: faer::linalg::solvers::Svd<C64>, w: Option<&Mat<C64>>| {
        let d = svd.S().column_vector();
        let s = (0..d.nrows()).map(|i| d[i].re).collect();
        let u = match w {
            Some(w) => from_faer((w.adjoint() * svd.U()).as_ref()),
            None => from_faer(svd.U()),
        };
        Svd { u, s, v: from_faer(svd.V()) }
    };
    if let Ok(svd) = m.svd() {
        return pack(svd, None);
    }
    for t in 1..=RETRIES {
        let w = scrambler(a.rows(), t);
        if let Ok(svd) = (&w * &m).svd() {
            return pack(svd, Some(&w));
        }
    }
    panic!("svd did not converge on a {}x{} matrix", a.rows(), a.cols())
}

fn threshold(a: &Matrix<C64>, smax: f64, ctx: &Ctx) -> f64 {
    let (r, c) = a.shape();
    ctx.pol.rank_rel_tol * (r.max(c) as f64) * smax.max(ctx.scale)
}

/// Indices of singular values above threshold; flags the context when one lies within a
/// factor of ten of it.
fn significant(a: &Matrix<C64>, s: &[f64], ctx: &Ctx) -> Vec<bool> {
    let smax = s.iter().copied().fold(0.0, f64::max);
    let thr = threshold(a, smax, ctx);
    s.iter()
        .map(|&x| {
            if thr > 0.0 && x > thr / 10.0 && x < thr * ctx.band() {
                ctx.flag_ambiguous();
            }
            x > thr && x > 0.0
        })
        .collect()
}

impl Field for C64 {
    const BACKEND: Backend = Backend::Float;

    fn from_i64(v: i64) -> Self {
        C64::new(v as f64, 0.0)
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        C64::new(p as f64 / q as f64, 0.0)
    }

    fn from_c64(z: C64) -> Self {
        z
    }

    fn to_c64(&self) -> C64 {
        *self
    }

    fn to_gauss(&self) -> super::GaussQ {
        <super::GaussQ as Field>::from_c64(*self)
    }

    fn imag_unit() -> Self {
        C64::new(0.0, 1.0)
    }

    fn conj(&self) -> Self {
        C64::conj(self)
    }

    fn re(&self) -> Self {
        C64::new(self.re, 0.0)
    }

    fn im(&self) -> Self {
        C64::new(self.im, 0.0)
    }

    fn is_real(&self) -> bool {
        self.im == 0.0
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn rank(a: &Matrix<Self>, ctx: &Ctx) -> usize {
        if a.rows() == 0 || a.cols() == 0 {
            return 0;
        }
        let svd = svd_full(a);
        significant(a, &svd.s, ctx).iter().filter(|&&b| b).count()
    }

    fn range_basis(a: &Matrix<Self>, ctx: &Ctx) -> Matrix<Self> {
        let (r, c) = a.shape();
        if r == 0 || c == 0 {
            return Matrix::zeros(r, 0);
        }
        let svd = svd_full(a);
        let sig = significant(a, &svd.s, ctx);
        let idx: Vec<usize> = (0..sig.len()).filter(|&i| sig[i] && i < svd.u.cols()).collect();
        svd.u.select_cols(&idx)
    }

    fn kernel_basis(a: &Matrix<Self>, ctx: &Ctx) -> Matrix<Self> {
        let (r, c) = a.shape();
        if c == 0 {
            return Matrix::zeros(0, 0);
        }
        if r == 0 {
            return Matrix::identity(c);
        }
        let svd = svd_full(a);
        let sig = significant(a, &svd.s, ctx);
        let idx: Vec<usize> = (0..c).filter(|&i| i >= sig.len() || !sig[i]).collect();
        svd.v.select_cols(&idx)
    }

    fn orthogonalize(a: &Matrix<Self>) -> Matrix<Self> {
        let (r, c) = a.shape();
        if c == 0 || r == 0 {
            return Matrix::zeros(r, 0);
        }
        let svd = svd_full(a);
        let k = c.min(svd.u.cols());
        svd.u.cols_range(0, k)
    }

    fn completion(b: &Matrix<Self>, ctx: &Ctx) -> Matrix<Self> {
        super::orth_complement(b, ctx)
    }

    fn solve(a: &Matrix<Self>, b: &Matrix<Self>, ctx: &Ctx) -> Option<Matrix<Self>> {
        let (n, m) = a.shape();
        let k = b.cols();
        if m == 0 {
            return if C64::negligible(b, 1.0, &ctx.pol) { Some(Matrix::zeros(0, k)) } else { None };
        }
        if n == 0 {
            return Some(Matrix::zeros(m, k));
        }
        let svd = svd_full(a);
        let sig = significant(a, &svd.s, ctx);
        // x = V_r S_r^{-1} U_r^* b
        let ub = &svd.u.adjoint() * b;
        let mut y = Matrix::<C64>::zeros(m, k);
        for i in 0..sig.len().min(ub.rows()) {
            if sig[i] {
                for j in 0..k {
                    y[(i, j)] = ub[(i, j)] / svd.s[i];
                }
            }
        }
        let x = &svd.v * &y;
        let res = (&(a * &x) - b).norm_fro();
        let smax = svd.s.iter().copied().fold(0.0, f64::max);
        let bound = ctx.pol.angle_tol * (smax * x.norm_fro() + b.norm_fro()).max(ctx.scale).max(f64::MIN_POSITIVE);
        if res <= bound {
            Some(x)
        } else {
            None
        }
    }

    fn subspace_contains(big: &Matrix<Self>, small: &Matrix<Self>, ctx: &Ctx) -> bool {
        if small.cols() == 0 {
            return true;
        }
        let q_small = Self::range_basis(small, ctx);
        if q_small.cols() == 0 {
            return true;
        }
        let q_big = Self::range_basis(big, ctx);
        // largest principal angle via ||(I - Q Q^*) Q_small||_2
        let resid = &q_small - &(&q_big * &(&q_big.adjoint() * &q_small));
        spectral_norm(&resid) <= ctx.pol.angle_tol
    }

    fn hermitian_class(h: &Matrix<Self>, pol: &TolerancePolicy) -> HermClass {
        if !h.is_square() {
            return HermClass::NotHermitian;
        }
        let n = h.rows();
        if n == 0 {
            return HermClass::Zero;
        }
        let scale = h.norm_fro().max(1.0);
        let skew = (h - &h.adjoint()).norm_fro();
        if skew > pol.psd_tol * scale {
            return HermClass::NotHermitian;
        }
        let herm = (h + &h.adjoint()).scale(&C64::new(0.5, 0.0));
        let eig = hermitian_eigenvalues(&herm);
        let lmax = eig.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        let thr = pol.psd_tol * lmax;
        let (mut pos, mut neg, mut zero) = (0, 0, 0);
        for &l in eig.iter() {
            if l > thr {
                pos += 1;
            } else if l < -thr {
                neg += 1;
            } else {
                zero += 1;
            }
        }
        HermClass::from_inertia(pos, neg, zero)
    }

    fn negligible(m: &Matrix<Self>, scale: f64, pol: &TolerancePolicy) -> bool {
        m.norm_fro() <= pol.angle_tol * scale.max(1.0)
    }

    fn min_retained_sv(a: &Matrix<Self>, ctx: &Ctx) -> Option<f64> {
        let s = singular_values(a);
        let thr = threshold(a, s.first().copied().unwrap_or(0.0), ctx);
        s.into_iter().rfind(|&x| x > thr && x > 0.0)
    }

    fn finite_jordan(e: &Matrix<Self>, a: &Matrix<Self>, ctx: &Ctx) -> Vec<crate::pencil::EigenClass> {
        crate::pencil::finite_float::jordan_classes(e, a, ctx)
    }
}

pub(crate) fn spectral_norm(a: &Matrix<C64>) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Singular values, nonincreasing.
pub(crate) fn singular_values(a: &Matrix<C64>) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    to_faer(a).singular_values().unwrap_or_else(|_| svd_full(a).s)
}

/// Eigenvalues of a square complex matrix.
pub(crate) fn eigenvalues(a: &Matrix<C64>) -> Vec<C64> {
    if a.rows() == 0 {
        return Vec::new();
    }
    let m = to_faer(a);
    (0..=RETRIES)
        .find_map(|t| match t {
            0 => m.eigenvalues().ok(),
            _ => {
                let w = scrambler(a.rows(), t);
                (&w * &m * w.adjoint()).eigenvalues().ok()
            }
        })
        .expect("eigenvalue iteration did not converge")
}

fn hermitian_eigenvalues(h: &Matrix<C64>) -> Vec<f64> {
    let m = to_faer(h);
    (0..=RETRIES)
        .find_map(|t| match t {
            0 => m.self_adjoint_eigenvalues(Side::Lower).ok(),
            _ => {
                let w = scrambler(h.rows(), t);
                (&w * &m * w.adjoint()).self_adjoint_eigenvalues(Side::Lower).ok()
            }
        })
        .expect("hermitian eigenvalue iteration did not converge")
}
