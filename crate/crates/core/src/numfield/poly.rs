use std::fmt;

use num_traits::{One, Zero};

use super::{Field, GaussQ, Matrix, C64};

/// Univariate polynomial over the Gaussian rationals, coefficients from low to high degree.
/// The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coef: Vec<GaussQ>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coef.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coef.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "{}*s", c)?,
                _ => write!(f, "{}*s^{}", c, k)?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(mut coef: Vec<GaussQ>) -> Self {
        while coef.last().is_some_and(|c| c.is_zero()) {
            coef.pop();
        }
        Poly { coef }
    }

    pub fn zero() -> Self {
        Poly { coef: Vec::new() }
    }

    pub fn constant(c: GaussQ) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(GaussQ::one())
    }

    /// `s - r`
    pub fn linear(r: GaussQ) -> Self {
        Poly::new(vec![-r, GaussQ::one()])
    }

    /// `a s + b`
    pub fn affine(a: GaussQ, b: GaussQ) -> Self {
        Poly::new(vec![b, a])
    }

    pub fn x() -> Self {
        Poly::new(vec![GaussQ::zero(), GaussQ::one()])
    }

    pub fn coefficients(&self) -> &[GaussQ] {
        &self.coef
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coef.len().checked_sub(1)
    }

    pub fn lead(&self) -> GaussQ {
        self.coef.last().cloned().unwrap_or_else(GaussQ::zero)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        Poly::new(self.coef.iter().map(|c| c.clone() / l.clone()).collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coef.len().max(o.coef.len());
        let mut c = vec![GaussQ::zero(); n];
        for (i, v) in self.coef.iter().enumerate() {
            c[i] = c[i].clone() + v.clone();
        }
        for (i, v) in o.coef.iter().enumerate() {
            c[i] = c[i].clone() + v.clone();
        }
        Poly::new(c)
    }

    pub fn neg(&self) -> Poly {
        Poly { coef: self.coef.iter().map(|c| -c.clone()).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![GaussQ::zero(); self.coef.len() + o.coef.len() - 1];
        for (i, a) in self.coef.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coef.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(c)
    }

    pub fn scale(&self, s: &GaussQ) -> Poly {
        Poly::new(self.coef.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn pow(&self, k: usize) -> Poly {
        let mut r = Poly::one();
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coef.len() - 1;
        let dl = d.lead();
        let mut r = self.coef.clone();
        if r.len() < d.coef.len() {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![GaussQ::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone() / dl.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coef.iter().enumerate() {
                r[k + j] = r[k + j].clone() - c.clone() * dj.clone();
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic gcd `g` with Bezout coefficients `u a + v b = g`.
    pub fn ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut u0, mut u1) = (Poly::one(), Poly::zero());
        let (mut v0, mut v1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let u2 = u0.sub(&q.mul(&u1));
            u0 = std::mem::replace(&mut u1, u2);
            let v2 = v0.sub(&q.mul(&v1));
            v0 = std::mem::replace(&mut v1, v2);
        }
        if r0.is_zero() {
            return (r0, u0, v0);
        }
        let l = GaussQ::one() / r0.lead();
        (r0.scale(&l), u0.scale(&l), v0.scale(&l))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coef
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * GaussQ::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &GaussQ) -> GaussQ {
        let mut acc = GaussQ::zero();
        for c in self.coef.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn eval_c64(&self, x: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coef.iter().rev() {
            acc = acc * x + c.to_c64();
        }
        acc
    }

    /// Squarefree part (monic), i.e. the product of the distinct monic irreducible factors.
    pub fn squarefree_part(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return Poly::one();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Yun's squarefree factorization of a monic polynomial: pairwise coprime squarefree
    /// monic factors `f_k` with `self = prod f_k^k`, as `(f_k, k)` for nonconstant `f_k`.
    pub fn squarefree_factors(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let a0 = f.gcd(&f.derivative());
        let mut b = f.div_rem(&a0).0;
        let mut c = f.derivative().div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut k = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.monic(), k));
            }
            k += 1;
        }
        out
    }

    /// Multiplicity of the (nonconstant) factor `f` in `self`.
    pub fn multiplicity(&self, f: &Poly) -> usize {
        let mut k = 0;
        let mut p = self.clone();
        if p.is_zero() {
            return usize::MAX;
        }
        loop {
            let (q, r) = p.div_rem(f);
            if !r.is_zero() {
                return k;
            }
            p = q;
            k += 1;
        }
    }

    /// Numerical roots via the companion matrix.
    pub fn roots(&self) -> Vec<C64> {
        let Some(d) = self.degree() else { return Vec::new() };
        if d == 0 {
            return Vec::new();
        }
        let m = self.monic();
        if d == 1 {
            return vec![(-m.coef[0].clone()).to_c64()];
        }
        let comp = Matrix::<C64>::from_fn(d, d, |i, j| {
            if i == 0 {
                -m.coef[d - 1 - j].to_c64()
            } else if j + 1 == i {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let mut r = super::float::eigenvalues(&comp);
        // One Newton polish step per root against the exact coefficients.
        let dp = m.derivative();
        for z in r.iter_mut() {
            let f = m.eval_c64(*z);
            let fp = dp.eval_c64(*z);
            if fp.norm() > 0.0 {
                let nz = *z - f / fp;
                if m.eval_c64(nz).norm() <= f.norm() {
                    *z = nz;
                }
            }
        }
        r
    }
}
