//! Exact Jordan structure of a square pencil with invertible `E`.
//!
//! Works with `M = E^{-1} A` and the squarefree factorization of its characteristic
//! polynomial. Simple roots need no work. For a factor `q` of multiplicity `k > 1`, ranks
//! of `(M - θI)^j` are computed over `K[θ]/(q)`; whenever a pivot turns out to be a zero
//! divisor, `q` is split along the gcd and both factors are redone. Each final factor has
//! a single Weyr sequence shared by all of its roots.

use num_traits::{One, Zero};

use super::EigenClass;
use crate::numfield::{Ctx, Field, GaussQ, Matrix, Poly};

pub(crate) fn jordan_classes(e: &Matrix<GaussQ>, a: &Matrix<GaussQ>, ctx: &Ctx) -> Vec<EigenClass> {
    let n = e.rows();
    if n == 0 {
        return Vec::new();
    }
    let m = GaussQ::solve(e, a, ctx).expect("E is invertible on the finite part");
    let chi = charpoly(&m);
    let mut pending = Vec::new();
    let mut done: Vec<(Poly, Vec<usize>)> = Vec::new();
    for (q, k) in chi.squarefree_factors() {
        if k == 1 {
            done.push((q, vec![1]));
        } else {
            pending.push((q, k));
        }
    }
    while let Some((q, k)) = pending.pop() {
        if q.degree().unwrap_or(0) == 0 {
            continue;
        }
        match partition_mod(&m, &q, k) {
            Ok(blocks) => match done.iter_mut().find(|(_, b)| *b == blocks) {
                Some((p, _)) => *p = p.mul(&q),
                None => done.push((q, blocks)),
            },
            Err(g) => {
                let rest = q.div_rem(&g).0.monic();
                pending.push((g, k));
                pending.push((rest, k));
            }
        }
    }
    done.into_iter()
        .map(|(p, blocks)| EigenClass { roots: p.roots(), poly: Some(p), blocks })
        .collect()
}

/// Monic characteristic polynomial `det(sI - M)` (Faddeev–LeVerrier).
pub(crate) fn charpoly(m: &Matrix<GaussQ>) -> Poly {
    let n = m.rows();
    let mut c = vec![GaussQ::zero(); n + 1];
    c[n] = GaussQ::one();
    let mut mk = Matrix::<GaussQ>::identity(n);
    for k in 1..=n {
        let am = m * &mk;
        c[n - k] = -am.trace() / GaussQ::from_i64(k as i64);
        mk = &am + &Matrix::identity(n).scale(&c[n - k]);
    }
    Poly::new(c)
}

type PolyMat = Vec<Vec<Poly>>;

fn mul_mod(x: &PolyMat, y: &PolyMat, q: &Poly) -> PolyMat {
    let n = x.len();
    let mut out = vec![vec![Poly::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if x[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[k][j].is_zero() {
                    continue;
                }
                out[i][j] = out[i][j].add(&x[i][k].mul(&y[k][j]));
            }
        }
    }
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v = v.rem(q);
        }
    }
    out
}

/// Jordan block sizes shared by the roots of `q` (each of algebraic multiplicity `k`),
/// or a proper factor of `q`.
fn partition_mod(m: &Matrix<GaussQ>, q: &Poly, k: usize) -> Result<Vec<usize>, Poly> {
    let n = m.rows();
    let theta = Poly::x().rem(q);
    let b: PolyMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = Poly::constant(m[(i, j)].clone());
                    if i == j {
                        c.sub(&theta).rem(q)
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    let mut weyr = Vec::new();
    let mut prev = n;
    let mut p = b.clone();
    loop {
        let r = rank_mod(&p, q)?;
        if r >= prev {
            break;
        }
        weyr.push(prev - r);
        prev = r;
        if r == 0 || n - r >= k {
            break;
        }
        p = mul_mod(&p, &b, q);
    }
    // weyr[j] = number of blocks of size > j
    let mut blocks = Vec::new();
    for j in 0..weyr.len() {
        let next = weyr.get(j + 1).copied().unwrap_or(0);
        blocks.extend(std::iter::repeat_n(j + 1, weyr[j] - next));
    }
    blocks.sort_unstable_by(|x, y| y.cmp(x));
    Ok(blocks)
}

/// Rank over `K[θ]/(q)`, failing with `gcd(pivot, q)` when a pivot is a zero divisor.
fn rank_mod(p: &PolyMat, q: &Poly) -> Result<usize, Poly> {
    let mut a = p.clone();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        let (g, u, _) = Poly::ext_gcd(&a[piv][c], q);
        if g.degree().unwrap_or(0) > 0 {
            return Err(g);
        }
        a.swap(r, piv);
        let inv = u.rem(q);
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].mul(&inv).rem(q);
            for j in c..cols {
                if a[r][j].is_zero() {
                    continue;
                }
                a[i][j] = a[i][j].sub(&f.mul(&a[r][j])).rem(q);
            }
        }
        r += 1;
    }
    Ok(r)
}
