use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Backend, Ctx, Field, HermClass, Matrix, TolerancePolicy, C64};

/// Gaussian rational `re + i im` with arbitrary precision parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussQ {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussQ {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussQ { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussQ { re, im: BigRational::zero() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Sign of the real part (used for Hermitian diagonals).
    pub fn re_sign(&self) -> i32 {
        if self.re.is_positive() {
            1
        } else if self.re.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn parse_rational(s: &str) -> Option<BigRational> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        } else {
            Some(BigRational::from_integer(BigInt::from_str(s).ok()?))
        }
    }

    pub fn rational_to_string(r: &BigRational) -> String {
        if r.is_integer() {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    }

    /// Exact value of a finite double.
    pub fn rational_from_f64(x: f64) -> BigRational {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }
}

impl fmt::Debug for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", GaussQ::rational_to_string(&self.re))
        } else {
            write!(f, "({}+{}i)", GaussQ::rational_to_string(&self.re), GaussQ::rational_to_string(&self.im))
        }
    }
}

impl Add for GaussQ {
    type Output = GaussQ;
    fn add(self, o: GaussQ) -> GaussQ {
        GaussQ { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for GaussQ {
    type Output = GaussQ;
    fn sub(self, o: GaussQ) -> GaussQ {
        GaussQ { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for GaussQ {
    type Output = GaussQ;
    fn mul(self, o: GaussQ) -> GaussQ {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussQ::real(self.re * o.re);
        }
        GaussQ { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}

impl Div for GaussQ {
    type Output = GaussQ;
    fn div(self, o: GaussQ) -> GaussQ {
        assert!(!o.is_zero(), "division by exact zero");
        if o.im.is_zero() {
            return GaussQ { re: self.re / &o.re, im: self.im / o.re };
        }
        let d = o.norm_sqr();
        let c = o.conj();
        let p = self * c;
        GaussQ { re: p.re / &d, im: p.im / d }
    }
}

impl Neg for GaussQ {
    type Output = GaussQ;
    fn neg(self) -> GaussQ {
        GaussQ { re: -self.re, im: -self.im }
    }
}

impl Zero for GaussQ {
    fn zero() -> Self {
        GaussQ { re: BigRational::zero(), im: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussQ {
    fn one() -> Self {
        GaussQ { re: BigRational::one(), im: BigRational::zero() }
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Extremely large parts: fall back to a scaled ratio.
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Reduced row echelon form; returns the form and the pivot columns.
pub(crate) fn rref(a: &Matrix<GaussQ>) -> (Matrix<GaussQ>, Vec<usize>) {
    let mut m = a.clone();
    let (rows, cols) = m.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
        m.swap_rows(r, p);
        let inv = GaussQ::one() / m[(r, c)].clone();
        for j in c..cols {
            let v = m[(r, j)].clone() * inv.clone();
            m[(r, j)] = v;
        }
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            for j in c..cols {
                if m[(r, j)].is_zero() {
                    continue;
                }
                let v = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                m[(i, j)] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

/// A canonical basis of `ran b`: the reduced echelon basis, each column scaled to
/// coprime Gaussian-integer entries.
pub(crate) fn integer_column_basis(b: &Matrix<GaussQ>) -> Matrix<GaussQ> {
    use num_integer::Integer;
    let (r, piv) = rref(&b.transpose());
    let mut out = r.rows_range(0, piv.len()).transpose();
    for j in 0..out.cols() {
        let mut den = BigInt::one();
        for i in 0..out.rows() {
            den = den.lcm(out[(i, j)].re.denom()).lcm(out[(i, j)].im.denom());
        }
        let mut g = BigInt::zero();
        for i in 0..out.rows() {
            let z = &out[(i, j)];
            g = g.gcd(&(z.re.numer() * (&den / z.re.denom()))).gcd(&(z.im.numer() * (&den / z.im.denom())));
        }
        if g.is_zero() {
            continue;
        }
        let f = GaussQ::real(BigRational::new(den, g));
        for i in 0..out.rows() {
            let v = out[(i, j)].clone() * f.clone();
            out[(i, j)] = v;
        }
    }
    out
}

fn kernel_from_rref(r: &Matrix<GaussQ>, pivots: &[usize]) -> Matrix<GaussQ> {
    let cols = r.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut k = Matrix::zeros(cols, free.len());
    for (j, &f) in free.iter().enumerate() {
        k[(f, j)] = GaussQ::one();
        for (i, &p) in pivots.iter().enumerate() {
            k[(p, j)] = -r[(i, f)].clone();
        }
    }
    k
}

impl Field for GaussQ {
    const BACKEND: Backend = Backend::Exact;

    fn from_i64(v: i64) -> Self {
        GaussQ::real(BigRational::from_integer(BigInt::from(v)))
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        GaussQ::real(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    fn from_c64(z: C64) -> Self {
        GaussQ { re: GaussQ::rational_from_f64(z.re), im: GaussQ::rational_from_f64(z.im) }
    }

    fn to_c64(&self) -> C64 {
        C64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    fn to_gauss(&self) -> GaussQ {
        self.clone()
    }

    fn imag_unit() -> Self {
        GaussQ { re: BigRational::zero(), im: BigRational::one() }
    }

    fn conj(&self) -> Self {
        GaussQ { re: self.re.clone(), im: -self.im.clone() }
    }

    fn re(&self) -> Self {
        GaussQ::real(self.re.clone())
    }

    fn im(&self) -> Self {
        GaussQ::real(self.im.clone())
    }

    fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn magnitude(&self) -> f64 {
        let c = self.to_c64();
        c.norm()
    }

    fn rank(a: &Matrix<Self>, _ctx: &Ctx) -> usize {
        if a.rows() == 0 || a.cols() == 0 {
            return 0;
        }
        rref(a).1.len()
    }

    fn range_basis(a: &Matrix<Self>, _ctx: &Ctx) -> Matrix<Self> {
        if a.cols() == 0 || a.rows() == 0 {
            return Matrix::zeros(a.rows(), 0);
        }
        let (_, piv) = rref(a);
        a.select_cols(&piv)
    }

    fn kernel_basis(a: &Matrix<Self>, _ctx: &Ctx) -> Matrix<Self> {
        if a.rows() == 0 {
            return Matrix::identity(a.cols());
        }
        let (r, piv) = rref(a);
        kernel_from_rref(&r, &piv)
    }

    fn orthogonalize(a: &Matrix<Self>) -> Matrix<Self> {
        let (n, k) = a.shape();
        let mut out: Vec<Matrix<GaussQ>> = Vec::with_capacity(k);
        let mut norms: Vec<GaussQ> = Vec::with_capacity(k);
        for j in 0..k {
            let mut v = a.col(j);
            for (u, nu) in out.iter().zip(&norms) {
                let c = (&u.adjoint() * &v)[(0, 0)].clone() / nu.clone();
                v = &v - &u.scale(&c);
            }
            let nv = (&v.adjoint() * &v)[(0, 0)].clone();
            if nv.is_zero() {
                continue;
            }
            out.push(v);
            norms.push(nv);
        }
        let refs: Vec<&Matrix<GaussQ>> = out.iter().collect();
        Matrix::hcat(n, &refs)
    }

    fn completion(b: &Matrix<Self>, _ctx: &Ctx) -> Matrix<Self> {
        let n = b.rows();
        if b.cols() == 0 {
            return Matrix::identity(n);
        }
        let (_, piv) = rref(&b.transpose());
        let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
        Matrix::identity(n).select_cols(&free)
    }

    fn solve(a: &Matrix<Self>, b: &Matrix<Self>, _ctx: &Ctx) -> Option<Matrix<Self>> {
        let (n, m) = a.shape();
        assert_eq!(b.rows(), n, "solve shape mismatch");
        let k = b.cols();
        if n == 0 {
            return Some(Matrix::zeros(m, k));
        }
        let aug = a.hstack(b);
        let (r, piv) = rref(&aug);
        if piv.iter().any(|&p| p >= m) {
            return None;
        }
        let mut x = Matrix::zeros(m, k);
        for (i, &p) in piv.iter().enumerate() {
            for j in 0..k {
                x[(p, j)] = r[(i, m + j)].clone();
            }
        }
        Some(x)
    }

    fn subspace_contains(big: &Matrix<Self>, small: &Matrix<Self>, ctx: &Ctx) -> bool {
        if small.cols() == 0 {
            return true;
        }
        Self::rank(big, ctx) == Self::rank(&big.hstack(small), ctx)
    }

    fn hermitian_class(h: &Matrix<Self>, _pol: &TolerancePolicy) -> HermClass {
        if !h.is_square() {
            return HermClass::NotHermitian;
        }
        if h != &h.adjoint() {
            return HermClass::NotHermitian;
        }
        let (pos, neg, zero) = exact_inertia(h);
        HermClass::from_inertia(pos, neg, zero)
    }

    fn negligible(m: &Matrix<Self>, _scale: f64, _pol: &TolerancePolicy) -> bool {
        m.is_exact_zero()
    }

    fn finite_jordan(e: &Matrix<Self>, a: &Matrix<Self>, ctx: &Ctx) -> Vec<crate::pencil::EigenClass> {
        crate::pencil::finite_exact::jordan_classes(e, a, ctx)
    }
}

/// Inertia `(pos, neg, zero)` of an exactly Hermitian matrix via congruence diagonalization.
pub(crate) fn exact_inertia(h: &Matrix<GaussQ>) -> (usize, usize, usize) {
    let mut m = h.clone();
    let n = m.rows();
    let mut active: Vec<usize> = (0..n).collect();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    while !active.is_empty() {
        if let Some(&i) = active.iter().find(|&&i| !m[(i, i)].is_zero()) {
            let piv = m[(i, i)].clone();
            match piv.re_sign() {
                1 => pos += 1,
                -1 => neg += 1,
                _ => unreachable!("hermitian diagonal is real and nonzero"),
            }
            for &j in active.iter().filter(|&&j| j != i) {
                if m[(j, i)].is_zero() {
                    continue;
                }
                let f = m[(j, i)].clone() / piv.clone();
                // row_j -= f row_i ; col_j -= conj(f) col_i
                for c in 0..n {
                    let v = m[(j, c)].clone() - f.clone() * m[(i, c)].clone();
                    m[(j, c)] = v;
                }
                let fc = f.conj();
                for r in 0..n {
                    let v = m[(r, j)].clone() - m[(r, i)].clone() * fc.clone();
                    m[(r, j)] = v;
                }
            }
            active.retain(|&j| j != i);
            continue;
        }
        let pair = active
            .iter()
            .flat_map(|&i| active.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i != j && !m[(i, j)].is_zero());
        let Some((i, j)) = pair else {
            zero += active.len();
            break;
        };
        // Replace e_i by e_i + t e_j so that the new diagonal entry 2 Re(t h_ij) is nonzero.
        let t = if !m[(i, j)].re.is_zero() { GaussQ::one() } else { GaussQ::imag_unit() };
        for r in 0..n {
            let v = m[(r, i)].clone() + m[(r, j)].clone() * t.clone();
            m[(r, i)] = v;
        }
        let tc = t.conj();
        for c in 0..n {
            let v = m[(i, c)].clone() + tc.clone() * m[(j, c)].clone();
            m[(i, c)] = v;
        }
    }
    (pos, neg, zero)
}

impl GaussQ {
    pub fn from_bigrational_pair(re: BigRational, im: BigRational) -> Self {
        GaussQ { re, im }
    }

    pub fn abs_re(&self) -> BigRational {
        self.re.abs()
    }
}
