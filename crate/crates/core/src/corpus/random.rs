//! Seeded generators for structured relations and the pencils they induce.
//!
//! The stream is ChaCha8 seeded with `seed`; changing how draws are consumed changes
//! the instances, so [`GENERATOR_VERSION`] is bumped whenever that happens.
//!
//! Frames are random unitaries: Haar for `C64` (QR of a complex Gaussian matrix with
//! the phases of `R` divided out), and for `GaussQ` a signed permutation times two
//! rational Householder reflections `I - 2vv*/(v*v)` with small integer `v`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfield::{self, float, Field, GaussQ, Matrix, TolerancePolicy, C64};
use crate::pencil::MatrixPencil;
use crate::relation::LinearRelation;

pub const GENERATOR_VERSION: u32 = 1;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Scalars and frames a backend can draw.
pub trait Sample: Field {
    fn unitary(n: usize, rng: &mut ChaCha8Rng) -> Matrix<Self>;
    /// A singular value in `[0, 1)`.
    fn contraction_value(rng: &mut ChaCha8Rng) -> Self;
    /// A small general entry.
    fn entry(rng: &mut ChaCha8Rng) -> Self;
    /// The basis pencils are read off from: orthonormal in double precision, reduced
    /// echelon with integer columns in exact arithmetic (normalizing is impossible there
    /// and Gram-Schmidt inflates the entries).
    fn pencil_basis(b: &Matrix<Self>) -> Matrix<Self>;
}

impl Sample for C64 {
    fn unitary(n: usize, rng: &mut ChaCha8Rng) -> Matrix<C64> {
        if n == 0 {
            return Matrix::zeros(0, 0);
        }
        let data: Vec<C64> = (0..n * n)
            .map(|_| C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let z = Matrix::from_vec(n, n, data);
        let qr = float::to_faer(&z).qr();
        let r = qr.R();
        let mut q = float::from_faer(qr.compute_Q().as_ref());
        for j in 0..n {
            let d = r[(j, j)];
            let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
            for i in 0..n {
                q[(i, j)] *= ph;
            }
        }
        q
    }

    fn contraction_value(rng: &mut ChaCha8Rng) -> C64 {
        C64::new(rng.gen_range(0.0..1.0), 0.0)
    }

    fn entry(rng: &mut ChaCha8Rng) -> C64 {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    }

    fn pencil_basis(b: &Matrix<C64>) -> Matrix<C64> {
        C64::orthogonalize(b)
    }
}

impl Sample for GaussQ {
    fn unitary(n: usize, rng: &mut ChaCha8Rng) -> Matrix<GaussQ> {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let mut u = Matrix::from_fn(n, n, |i, j| {
            if perm[j] == i {
                GaussQ::from_i64(1)
            } else {
                GaussQ::from_i64(0)
            }
        });
        for j in 0..n {
            if rng.gen_bool(0.5) {
                for i in 0..n {
                    u[(i, j)] = -u[(i, j)].clone();
                }
            }
        }
        if n < 2 {
            return u;
        }
        for _ in 0..2 {
            let v: Vec<i64> = loop {
                let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
                if v.iter().any(|&x| x != 0) {
                    break v;
                }
            };
            let vv: i64 = v.iter().map(|x| x * x).sum();
            let h = Matrix::from_fn(n, n, |i, j| {
                let delta = if i == j { 1 } else { 0 };
                GaussQ::from_ratio(delta * vv - 2 * v[i] * v[j], vv)
            });
            u = &u * &h;
        }
        u
    }

    fn contraction_value(rng: &mut ChaCha8Rng) -> GaussQ {
        GaussQ::from_ratio(rng.gen_range(0..8), 8)
    }

    fn entry(rng: &mut ChaCha8Rng) -> GaussQ {
        GaussQ::from_i64(rng.gen_range(-2..=2))
    }

    fn pencil_basis(b: &Matrix<GaussQ>) -> Matrix<GaussQ> {
        crate::numfield::exact::integer_column_basis(b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    MaxDissipative,
    MaxNonnegative,
    Dissipative,
    Symmetric,
    Nonnegative,
    SelfAdjoint,
    SkewAdjoint,
}

impl std::str::FromStr for RelationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Schema(format!("unknown relation kind {s:?}")))
    }
}

/// Optional knobs; unset dimensions are drawn at random.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomParams {
    /// `dim mul M`.
    pub mul_dim: Option<usize>,
    /// `dim ker M`.
    pub ker_dim: Option<usize>,
    /// Basis columns removed for the non-maximal kinds (at least one is removed).
    pub delete: Option<usize>,
}

pub fn random_matrix<T: Sample>(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix<T> {
    let data = (0..rows * cols).map(|_| T::entry(rng)).collect();
    Matrix::from_vec(rows, cols, data)
}

fn eye<T: Field>(n: usize) -> Matrix<T> {
    Matrix::identity(n)
}

fn diag_ones<T: Field>(v: T, k: usize) -> Matrix<T> {
    Matrix::identity(k).scale(&v)
}

/// `W diag(-I_p, I_r, C') W*` with `C'` a random strict contraction, or a random unitary
/// when `unitary` is set. Then `F = I + C`, `G = C - I` is maximally dissipative with
/// `mul = span W[:, ..p]` and `ker = span W[:, p..p+r]`; skew-adjoint when `C` is unitary.
pub fn cayley_relation<T: Sample>(
    w: &Matrix<T>,
    p: usize,
    r: usize,
    unitary: bool,
    rng: &mut ChaCha8Rng,
    pol: &TolerancePolicy,
) -> LinearRelation<T> {
    let n = w.rows();
    let s = n - p - r;
    let inner = if unitary {
        T::unitary(s, rng)
    } else {
        let v1 = T::unitary(s, rng);
        let v2 = T::unitary(s, rng);
        let sig: Vec<T> = (0..s).map(|_| T::contraction_value(rng)).collect();
        &(&v1 * &Matrix::diag(&sig)) * &v2.adjoint()
    };
    let mid = Matrix::block_diag(&[&diag_ones(-T::one(), p), &eye(r), &inner]);
    let c = &(w * &mid) * &w.adjoint();
    let f = &eye::<T>(n) + &c;
    let g = &c - &eye::<T>(n);
    LinearRelation::from_span(&f, &g, pol).expect("square blocks")
}

/// `(K × {0}) ⊕ ({0} × M) ⊕ gr(H)` on the rest, for the splitting given by the frame:
/// `K = W[:, ..k]`, `M = W[:, k..k+m]`, `H = R H0 R*` with `R = W[:, k+m..]`.
/// `H0` is positive definite, or Hermitian and indefinite-capable when `definite` is off.
pub fn splitting_relation<T: Sample>(
    w: &Matrix<T>,
    k: usize,
    m: usize,
    definite: bool,
    rng: &mut ChaCha8Rng,
    pol: &TolerancePolicy,
) -> LinearRelation<T> {
    let n = w.rows();
    let s = n - k - m;
    let kk = w.cols_range(0, k);
    let mm = w.cols_range(k, k + m);
    let rr = w.cols_range(k + m, n);
    let b = random_matrix::<T>(s, s, rng);
    let h0 = if definite {
        &(&b * &b.adjoint()) + &eye::<T>(s)
    } else {
        &b + &b.adjoint()
    };
    let h = &(&rr * &h0) * &rr.adjoint();
    let f = Matrix::hcat(n, &[&kk, &Matrix::zeros(n, m), &rr]);
    let g = Matrix::hcat(n, &[&Matrix::zeros(n, k), &mm, &(&h * &rr)]);
    LinearRelation::from_span(&f, &g, pol).expect("same shape")
}

fn split_dims(n: usize, p: Option<usize>, r: Option<usize>, rng: &mut ChaCha8Rng) -> Result<(usize, usize)> {
    let p = match p {
        Some(p) => p,
        None => rng.gen_range(0..=n / 2),
    };
    let r = match r {
        Some(r) => r,
        None => rng.gen_range(0..=(n - p.min(n)) / 2),
    };
    if p + r > n {
        return Err(Error::Precondition(format!("mul_dim {p} + ker_dim {r} exceeds n = {n}")));
    }
    Ok((p, r))
}

/// Drops `count` random basis columns (at least one, at most all).
fn delete_columns<T: Field>(m: &LinearRelation<T>, count: usize, rng: &mut ChaCha8Rng) -> LinearRelation<T> {
    let d = m.dim();
    let mut idx: Vec<usize> = (0..d).collect();
    idx.shuffle(rng);
    let mut keep: Vec<usize> = idx[count.clamp(1, d.max(1)).min(d)..].to_vec();
    keep.sort_unstable();
    m.select(&keep)
}

/// A relation of the requested kind on `K^n`, deterministic in `seed`.
pub fn random_relation<T: Sample>(
    kind: RelationKind,
    n: usize,
    params: &RandomParams,
    seed: u64,
    pol: &TolerancePolicy,
) -> Result<LinearRelation<T>> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let mut g = rng(seed);
    let w = T::unitary(n, &mut g);
    let (p, r) = split_dims(n, params.mul_dim, params.ker_dim, &mut g)?;
    let del = params.delete.unwrap_or_else(|| g.gen_range(1..=n));
    Ok(match kind {
        RelationKind::MaxDissipative => cayley_relation(&w, p, r, false, &mut g, pol),
        RelationKind::SkewAdjoint => cayley_relation(&w, p, r, true, &mut g, pol),
        // splitting_relation takes the kernel first
        RelationKind::MaxNonnegative => splitting_relation(&w, r, p, true, &mut g, pol),
        RelationKind::SelfAdjoint => splitting_relation(&w, r, p, false, &mut g, pol),
        RelationKind::Dissipative => delete_columns(&cayley_relation(&w, p, r, false, &mut g, pol), del, &mut g),
        RelationKind::Nonnegative => delete_columns(&splitting_relation(&w, r, p, true, &mut g, pol), del, &mut g),
        RelationKind::Symmetric => delete_columns(&splitting_relation(&w, r, p, false, &mut g, pol), del, &mut g),
    })
}

/// `E` = top and `A` = bottom block of the basis chosen by [`Sample::pencil_basis`].
pub fn pencil_from_relation<T: Sample>(m: &LinearRelation<T>) -> MatrixPencil<T> {
    let b = T::pencil_basis(m.basis());
    let n = m.n();
    MatrixPencil { e: b.rows_range(0, n), a: b.rows_range(n, 2 * n) }
}

/// A relation pair and the pencil of its product.
#[derive(Clone, Debug)]
pub struct PHInstance<T: Field> {
    pub d: LinearRelation<T>,
    pub l: LinearRelation<T>,
    pub pencil: MatrixPencil<T>,
}

impl<T: Sample> PHInstance<T> {
    fn new(d: LinearRelation<T>, l: LinearRelation<T>) -> Result<Self> {
        let pencil = pencil_from_relation(&d.product(&l)?);
        Ok(PHInstance { d, l, pencil })
    }

    pub fn to_c64(&self) -> PHInstance<C64> {
        PHInstance { d: self.d.to_c64(), l: self.l.to_c64(), pencil: self.pencil.to_c64() }
    }
}

/// Frame columns picked as kernel, multi-valued part and rest, with `K ∩ M'` shared:
/// labels each column for `D` and `L` independently.
fn labelled_pair<T: Sample>(
    n: usize,
    g: &mut ChaCha8Rng,
    pol: &TolerancePolicy,
) -> (LinearRelation<T>, LinearRelation<T>) {
    let w = T::unitary(n, g);
    // 0 = mul, 1 = ker, 2 = rest
    let pick = |g: &mut ChaCha8Rng| match g.gen_range(0..10) {
        0..=1 => 0,
        2..=3 => 1,
        _ => 2,
    };
    let ld: Vec<u8> = (0..n).map(|_| pick(g)).collect();
    let ll: Vec<u8> = (0..n).map(|_| pick(g)).collect();
    let order_d: Vec<usize> = (0..3u8).flat_map(|c| (0..n).filter(|&i| ld[i] == c).collect::<Vec<_>>()).collect();
    let p = ld.iter().filter(|&&c| c == 0).count();
    let r = ld.iter().filter(|&&c| c == 1).count();
    let d = cayley_relation(&w.select_cols(&order_d), p, r, false, g, pol);
    // L: kernel columns first, then mul; the rest is re-rotated so it meets D generically
    let kl: Vec<usize> = (0..n).filter(|&i| ll[i] == 1).collect();
    let ml: Vec<usize> = (0..n).filter(|&i| ll[i] == 0).collect();
    let rest: Vec<usize> = (0..n).filter(|&i| ll[i] == 2).collect();
    let wr = &w.select_cols(&rest) * &T::unitary(rest.len(), g);
    let wl = Matrix::hcat(n, &[&w.select_cols(&kl), &w.select_cols(&ml), &wr]);
    let l = splitting_relation(&wl, kl.len(), ml.len(), true, g, pol);
    (d, l)
}

/// Maximally dissipative times maximally nonnegative; `ker L ∩ mul D` may be nonzero.
pub fn maximal_instance<T: Sample>(n: usize, seed: u64, pol: &TolerancePolicy) -> Result<PHInstance<T>> {
    let mut g = rng(seed);
    let (d, l) = labelled_pair::<T>(n, &mut g, pol);
    PHInstance::new(d, l)
}

/// A dissipative sub-relation times a nonnegative one, with `ker L ∩ mul D = {0}` so the
/// product has dimension `n`. Starts from a maximal pair and removes `X = ker L ∩ mul D`
/// from `mul D` or from `ker L`.
pub fn dissipative_instance<T: Sample>(n: usize, seed: u64, pol: &TolerancePolicy) -> Result<PHInstance<T>> {
    let mut g = rng(seed);
    let (d, l) = labelled_pair::<T>(n, &mut g, pol);
    let ctx = d.ctx();
    let x = numfield::intersect(&d.parts().mul, &l.parts().ker, &ctx);
    if x.cols() == 0 {
        return PHInstance::new(d, l);
    }
    let xp = numfield::orth_complement(&x, &ctx);
    let (d, l) = if g.gen_bool(0.5) {
        let cut = LinearRelation::from_span(
            &eye::<T>(n).hstack(&Matrix::zeros(n, xp.cols())),
            &Matrix::zeros(n, n).hstack(&xp),
            pol,
        )?;
        (d.intersection(&cut)?, l)
    } else {
        let cut = LinearRelation::from_span(
            &xp.hstack(&Matrix::zeros(n, n)),
            &Matrix::zeros(n, xp.cols()).hstack(&eye::<T>(n)),
            pol,
        )?;
        (d, l.intersection(&cut)?)
    };
    PHInstance::new(d, l)
}

/// Maximally dissipative `D` times `(gr Q)^{-1}` with `Q` positive definite.
pub fn index_one_instance<T: Sample>(n: usize, seed: u64, pol: &TolerancePolicy) -> Result<PHInstance<T>> {
    let mut g = rng(seed);
    let w = T::unitary(n, &mut g);
    let (p, r) = split_dims(n, None, None, &mut g)?;
    let d = cayley_relation(&w, p, r, false, &mut g, pol);
    let b = random_matrix::<T>(n, n, &mut g);
    let q = &(&b * &b.adjoint()) + &eye::<T>(n);
    let l = LinearRelation::from_span(&q, &eye(n), pol)?;
    PHInstance::new(d, l)
}
