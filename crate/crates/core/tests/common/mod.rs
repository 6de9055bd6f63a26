//! Independent oracle for the Kronecker structure of integer pencils.
//!
//! Finite structure: Smith invariant factors of `sE - A` over `Q[s]`, from determinantal
//! divisors (gcds of all k x k minors). Infinite structure: the powers of `s` in the
//! invariant factors of `sA - E`. Minimal indices: dimensions of the spaces of polynomial
//! kernel vectors of bounded degree, read off block Toeplitz matrices.
//! Nothing here touches the staircase code.

#![allow(dead_code)]

use itertools::Itertools;
use linrel::{GaussQ, KroneckerInvariants, Matrix, MatrixPencil};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Polynomial over Q, coefficients low to high, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly(pub Vec<BigRational>);

fn q(i: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(i))
}

impl QPoly {
    fn trim(mut v: Vec<BigRational>) -> Self {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        QPoly(v)
    }

    pub fn one() -> Self {
        QPoly(vec![BigRational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn monic(&self) -> Self {
        let l = self.0.last().expect("nonzero").clone();
        QPoly(self.0.iter().map(|c| c / &l).collect())
    }

    fn rem(&self, d: &Self) -> Self {
        let mut r = self.0.clone();
        let dl = d.0.last().unwrap();
        while r.len() >= d.0.len() && !r.is_empty() {
            let f = r.last().unwrap() / dl;
            let off = r.len() - d.0.len();
            for (i, c) in d.0.iter().enumerate() {
                r[off + i] = &r[off + i] - &f * c;
            }
            r = QPoly::trim(r).0;
        }
        QPoly(r)
    }

    pub fn div(&self, d: &Self) -> Self {
        let mut r = self.0.clone();
        let dl = d.0.last().unwrap().clone();
        let mut out = vec![BigRational::zero(); (r.len() + 1).saturating_sub(d.0.len())];
        while r.len() >= d.0.len() && !r.is_empty() {
            let f = r.last().unwrap() / &dl;
            let off = r.len() - d.0.len();
            for (i, c) in d.0.iter().enumerate() {
                r[off + i] = &r[off + i] - &f * c;
            }
            out[off] = f;
            r.pop();
            r = QPoly::trim(r).0;
        }
        assert!(r.is_empty(), "inexact polynomial division");
        QPoly::trim(out)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return QPoly(vec![]);
        }
        let mut v = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] = &v[i + j] + a * b;
            }
        }
        QPoly::trim(v)
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Multiplicity of the root 0.
    pub fn zero_order(&self) -> usize {
        self.0.iter().take_while(|c| c.is_zero()).count()
    }

    /// Interpolates through `(x_i, y_i)` by Newton divided differences.
    fn interpolate(xs: &[i128], ys: &[i128]) -> Self {
        let n = xs.len();
        let mut dd: Vec<BigRational> = ys.iter().map(|&y| q(y)).collect();
        for k in 1..n {
            for i in (k..n).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / q(xs[i] - xs[i - k]);
            }
        }
        let mut p = QPoly(vec![dd[n - 1].clone()]);
        for i in (0..n - 1).rev() {
            p = p.mul(&QPoly::trim(vec![q(-xs[i]), BigRational::one()]));
            let mut c = p.0.clone();
            if c.is_empty() {
                c.push(BigRational::zero());
            }
            c[0] = &c[0] + &dd[i];
            p = QPoly::trim(c);
        }
        p
    }
}

/// Fraction-free (Bareiss) determinant of a small integer matrix.
fn int_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else { return 0 };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Integer pencil `sE - A` in row-major form.
#[derive(Clone, Debug)]
pub struct IntPencil {
    pub rows: usize,
    pub cols: usize,
    pub e: Vec<i64>,
    pub a: Vec<i64>,
}

impl IntPencil {
    pub fn to_pencil(&self) -> MatrixPencil<GaussQ> {
        MatrixPencil::new(Matrix::from_i64(self.rows, self.cols, &self.e), Matrix::from_i64(self.rows, self.cols, &self.a))
            .unwrap()
    }

    fn swapped(&self) -> IntPencil {
        IntPencil { rows: self.rows, cols: self.cols, e: self.a.clone(), a: self.e.clone() }
    }

    fn transposed(&self) -> IntPencil {
        let t = |v: &[i64]| (0..self.cols).flat_map(|j| (0..self.rows).map(move |i| v[i * self.cols + j])).collect();
        IntPencil { rows: self.cols, cols: self.rows, e: t(&self.e), a: t(&self.a) }
    }

    fn minor(&self, rs: &[usize], cs: &[usize]) -> QPoly {
        let k = rs.len();
        let xs: Vec<i128> = (0..=k as i128).collect();
        let ys: Vec<i128> = xs
            .iter()
            .map(|&s| {
                let m = rs
                    .iter()
                    .map(|&i| {
                        cs.iter()
                            .map(|&j| s * self.e[i * self.cols + j] as i128 - self.a[i * self.cols + j] as i128)
                            .collect()
                    })
                    .collect();
                int_det(m)
            })
            .collect();
        QPoly::interpolate(&xs, &ys)
    }

    /// Normal rank and the monic invariant factors `i_1 | i_2 | ... | i_r`.
    pub fn invariant_factors(&self) -> Vec<QPoly> {
        let mut divisors = vec![QPoly::one()];
        for k in 1..=self.rows.min(self.cols) {
            let mut g = QPoly(vec![]);
            'outer: for rs in (0..self.rows).combinations(k) {
                for cs in (0..self.cols).combinations(k) {
                    let m = self.minor(&rs, &cs);
                    if m.is_zero() {
                        continue;
                    }
                    g = g.gcd(&m);
                    if g.degree() == 0 {
                        break 'outer;
                    }
                }
            }
            if g.is_zero() {
                break;
            }
            divisors.push(g);
        }
        divisors.windows(2).map(|w| w[1].div(&w[0])).collect()
    }

    /// Dimension of `{x(s) : deg x <= d, (sE - A) x(s) = 0}`.
    fn poly_kernel_dim(&self, d: usize) -> usize {
        let (m, n) = (self.rows, self.cols);
        let (tr, tc) = ((d + 2) * m, (d + 1) * n);
        let mut t = vec![vec![0i64; tc]; tr];
        for k in 0..=d {
            for i in 0..m {
                for j in 0..n {
                    t[k * m + i][k * n + j] = -self.a[i * n + j];
                    t[(k + 1) * m + i][k * n + j] = self.e[i * n + j];
                }
            }
        }
        tc - rank_over_q(&t)
    }

    /// Column minimal indices, ascending.
    pub fn column_minimal_indices(&self, count: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let (mut prev_n, mut prev_c) = (0, 0);
        let mut d = 0;
        while out.len() < count {
            let nd = self.poly_kernel_dim(d);
            let c = nd - prev_n;
            out.extend(std::iter::repeat_n(d, c - prev_c));
            (prev_n, prev_c) = (nd, c);
            d += 1;
            assert!(d <= self.rows + self.cols + 1, "minimal index search did not terminate");
        }
        out
    }
}

/// Rank over Q as the largest rank over a few large prime fields.
fn rank_over_q(t: &[Vec<i64>]) -> usize {
    const PRIMES: [u64; 3] = [2_305_843_009_213_693_951, 1_000_000_007, 998_244_353];
    PRIMES.iter().map(|&p| rank_mod(t, p)).max().unwrap_or(0)
}

fn rank_mod(t: &[Vec<i64>], p: u64) -> usize {
    let pm = p as u128;
    let red = |x: i64| (x as i128).rem_euclid(p as i128) as u64;
    let mut m: Vec<Vec<u64>> = t.iter().map(|r| r.iter().map(|&x| red(x)).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = ((r as u128 * b as u128) % pm) as u64;
            }
            b = ((b as u128 * b as u128) % pm) as u64;
            e >>= 1;
        }
        r
    };
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = pow(m[rank][c], p - 2);
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let f = ((m[i][c] as u128 * inv as u128) % pm) as u64;
                for j in c..cols {
                    let sub = ((f as u128 * m[rank][j] as u128) % pm) as u64;
                    m[i][j] = (m[i][j] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Structure as computed by the oracle, in the same conventions as [`KroneckerInvariants`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleStructure {
    /// Nontrivial invariant factors of `sE - A`, monic, ascending by divisibility.
    pub finite: Vec<QPoly>,
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    pub gamma: Vec<usize>,
}

pub fn oracle(p: &IntPencil) -> OracleStructure {
    let inv = p.invariant_factors();
    let r = inv.len();
    let finite = inv.into_iter().filter(|f| f.degree() > 0).collect();
    let mut alpha: Vec<usize> =
        p.swapped().invariant_factors().iter().map(QPoly::zero_order).filter(|&k| k > 0).collect();
    alpha.sort_unstable_by(|a, b| b.cmp(a));
    let desc = |mut v: Vec<usize>| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    };
    let beta = desc(p.column_minimal_indices(p.cols - r).into_iter().map(|e| e + 1).collect());
    let gamma = desc(p.transposed().column_minimal_indices(p.rows - r).into_iter().map(|e| e + 1).collect());
    OracleStructure { finite, alpha, beta, gamma }
}

fn gauss_to_q(c: &GaussQ) -> BigRational {
    assert!(c.im.is_zero(), "real pencil produced a non-real factor coefficient");
    c.re.clone()
}

/// Invariant factors rebuilt from an exact invariant set: the j-th largest factor collects
/// `p^{b_j}` over the eigenvalue classes.
pub fn factors_of(inv: &KroneckerInvariants) -> Vec<QPoly> {
    let depth = inv.classes.iter().map(|c| c.blocks.len()).max().unwrap_or(0);
    let mut out: Vec<QPoly> = vec![QPoly::one(); depth];
    for c in &inv.classes {
        let p = c.poly.as_ref().expect("exact class carries its polynomial");
        let qp = QPoly::trim(p.monic().coefficients().iter().map(gauss_to_q).collect());
        for (j, &b) in c.blocks.iter().enumerate() {
            for _ in 0..b {
                out[j] = out[j].mul(&qp);
            }
        }
    }
    out.reverse();
    out
}

pub fn matches_oracle(inv: &KroneckerInvariants, o: &OracleStructure) -> bool {
    inv.alpha == o.alpha && inv.beta == o.beta && inv.gamma == o.gamma && factors_of(inv) == o.finite
}

/// Random integer pencil with entries in `[-3, 3]` and sizes up to 6. A mix of dense
/// square pencils, forced-singular ones (nonsquare, a shared kernel vector or a zero row),
/// and canonical block forms scrambled by integer row and column operations.
pub fn random_int_pencil(seed: u64) -> IntPencil {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    match g.gen_range(0..10) {
        0..=3 => {
            let n = g.gen_range(1..=6);
            dense(n, n, &mut g)
        }
        4..=6 => forced_singular(&mut g),
        _ => structured(&mut g),
    }
}

fn dense(rows: usize, cols: usize, g: &mut ChaCha8Rng) -> IntPencil {
    let e = (0..rows * cols).map(|_| sparse_entry(g)).collect();
    let a = (0..rows * cols).map(|_| sparse_entry(g)).collect();
    IntPencil { rows, cols, e, a }
}

fn forced_singular(g: &mut ChaCha8Rng) -> IntPencil {
    let kind = g.gen_range(0..3);
    if kind == 0 {
        let (rows, cols) = (g.gen_range(1..=6), g.gen_range(1..=6));
        return dense(rows, cols, g);
    }
    let n = g.gen_range(2..=6);
    let mut p = dense(n, n, g);
    if kind == 1 {
        // last column = c1 col0 + c2 col1 in both coefficients, or zero if that overflows
        let (c1, c2) = (g.gen_range(-1..=1), g.gen_range(-1..=1));
        let ok = (0..n).all(|i| [&p.e, &p.a].iter().all(|m| (c1 * m[i * n] + c2 * m[i * n + 1]).abs() <= 3));
        for i in 0..n {
            for m in [&mut p.e, &mut p.a] {
                m[i * n + n - 1] = if ok { c1 * m[i * n] + c2 * m[i * n + 1] } else { 0 };
            }
        }
    } else {
        for j in 0..n {
            p.e[(n - 1) * n + j] = 0;
            p.a[(n - 1) * n + j] = 0;
        }
    }
    p
}

/// Direct sum of random Jordan, infinite and singular blocks, total size at most 6, then
/// permuted and mixed by elementary operations that keep the entries in range.
fn structured(g: &mut ChaCha8Rng) -> IntPencil {
    let (mut rows, mut cols) = (0usize, 0usize);
    let mut blocks: Vec<(usize, usize, Vec<i64>, Vec<i64>)> = Vec::new();
    while rows.max(cols) < 6 && (blocks.is_empty() || g.gen_bool(0.7)) {
        let room = 6 - rows.max(cols);
        let k = g.gen_range(1..=room.min(3));
        let (r, c, e, a) = match g.gen_range(0..4) {
            0 => {
                // J_k(lambda)
                let lam = g.gen_range(-1..=2);
                let e = (0..k * k).map(|x| i64::from(x / k == x % k)).collect();
                let a = (0..k * k).map(|x| if x / k == x % k { lam } else { i64::from(x % k == x / k + 1) }).collect();
                (k, k, e, a)
            }
            1 => {
                // N_k
                let e = (0..k * k).map(|x| i64::from(x % k == x / k + 1)).collect();
                let a = (0..k * k).map(|x| i64::from(x / k == x % k)).collect();
                (k, k, e, a)
            }
            2 if k < room => {
                // L_k: k x (k+1), [I 0] s - [0 I]
                let c = k + 1;
                let e = (0..k * c).map(|x| i64::from(x % c == x / c)).collect();
                let a = (0..k * c).map(|x| i64::from(x % c == x / c + 1)).collect();
                (k, c, e, a)
            }
            _ if k < room => {
                // L_k^T
                let r = k + 1;
                let e = (0..r * k).map(|x| i64::from(x / k == x % k)).collect();
                let a = (0..r * k).map(|x| i64::from(x / k == x % k + 1)).collect();
                (r, k, e, a)
            }
            _ => (1, 1, vec![1], vec![g.gen_range(-1..=1)]),
        };
        rows += r;
        cols += c;
        blocks.push((r, c, e, a));
    }
    let mut p = IntPencil { rows, cols, e: vec![0; rows * cols], a: vec![0; rows * cols] };
    let (mut r0, mut c0) = (0, 0);
    for (r, c, e, a) in blocks {
        for i in 0..r {
            for j in 0..c {
                p.e[(r0 + i) * cols + c0 + j] = e[i * c + j];
                p.a[(r0 + i) * cols + c0 + j] = a[i * c + j];
            }
        }
        r0 += r;
        c0 += c;
    }
    for _ in 0..12 {
        let row_op = g.gen_bool(0.5);
        let len = if row_op { rows } else { cols };
        if len < 2 {
            continue;
        }
        let (i, j) = (g.gen_range(0..len), g.gen_range(0..len));
        let f = if g.gen_bool(0.5) { 1 } else { -1 };
        if i == j {
            continue;
        }
        let mut q = p.clone();
        for m in [&mut q.e, &mut q.a] {
            if row_op {
                for c in 0..cols {
                    m[i * cols + c] += f * m[j * cols + c];
                }
            } else {
                for r in 0..rows {
                    m[r * cols + i] += f * m[r * cols + j];
                }
            }
        }
        if q.e.iter().chain(&q.a).all(|x| x.abs() <= 3) {
            p = q;
        }
    }
    p
}
fn sparse_entry(g: &mut ChaCha8Rng) -> i64 {
    // zeros are common so that nontrivial finite and infinite structure appears
    if g.gen_bool(0.4) {
        0
    } else {
        g.gen_range(-3..=3)
    }
}
