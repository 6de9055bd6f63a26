//! Jordan structure of a square pencil with invertible `E`, double precision.
//!
//! Eigenvalues of `E^{-1} A` come from a complex Schur form. Defective eigenvalues show
//! up as tight clusters, so clusters are formed coarse to fine: a cluster is accepted once
//! the staircase of `(A - λE, E)` at its mean accounts for all of its members.

use super::{staircase, EigenClass};
use crate::numfield::{float, Ctx, Field, Matrix, C64};

pub(crate) fn jordan_classes(e: &Matrix<C64>, a: &Matrix<C64>, ctx: &Ctx) -> Vec<EigenClass> {
    let n = e.rows();
    if n == 0 {
        return Vec::new();
    }
    let m = match C64::solve(e, a, ctx) {
        Some(m) => m,
        None => {
            ctx.flag_ambiguous();
            return Vec::new();
        }
    };
    let lam = float::eigenvalues(&m);
    let scale = lam.iter().fold(1.0f64, |s, z| s.max(z.norm()));
    let coarse = (10.0 * (n as f64 * f64::EPSILON).powf(1.0 / n as f64)).max(1e-6) * scale;
    let floor = 1e-6 * scale;
    let mut out = Vec::new();
    let all: Vec<usize> = (0..n).collect();
    resolve(e, a, &lam, &all, coarse, floor, ctx, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn resolve(
    e: &Matrix<C64>,
    a: &Matrix<C64>,
    lam: &[C64],
    members: &[usize],
    tau: f64,
    floor: f64,
    ctx: &Ctx,
    out: &mut Vec<EigenClass>,
) {
    for cl in single_linkage(lam, members, tau) {
        if cl.len() == 1 {
            out.push(EigenClass { poly: None, roots: vec![lam[cl[0]]], blocks: vec![1] });
            continue;
        }
        let mean = cl.iter().map(|&i| lam[i]).sum::<C64>() / cl.len() as f64;
        let blocks = blocks_at(e, a, mean, ctx);
        if blocks.iter().sum::<usize>() == cl.len() {
            out.push(EigenClass { poly: None, roots: vec![mean], blocks });
        } else if tau / 10.0 >= floor {
            resolve(e, a, lam, &cl, tau / 10.0, floor, ctx, out);
        } else {
            ctx.flag_ambiguous();
            for &i in &cl {
                out.push(EigenClass { poly: None, roots: vec![lam[i]], blocks: vec![1] });
            }
        }
    }
}

/// Jordan blocks of `sE - A` at `lambda`: the infinite blocks of `t(A - λE) - E`.
fn blocks_at(e: &Matrix<C64>, a: &Matrix<C64>, lambda: C64, ctx: &Ctx) -> Vec<usize> {
    let shifted = a - &e.scale(&lambda);
    let sub = Ctx::with_scale(ctx.pol, ctx.scale);
    let st = staircase(&shifted, e, &sub);
    if !st.beta.is_empty() {
        return Vec::new();
    }
    st.alpha
}

fn single_linkage(lam: &[C64], members: &[usize], tau: f64) -> Vec<Vec<usize>> {
    let k = members.len();
    let mut label: Vec<usize> = (0..k).collect();
    fn find(l: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while l[r] != r {
            r = l[r];
        }
        l[i] = r;
        r
    }
    for i in 0..k {
        for j in i + 1..k {
            if (lam[members[i]] - lam[members[j]]).norm() <= tau {
                let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                if ri != rj {
                    label[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..k {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|(g, _)| *g == r) {
            Some((_, v)) => v.push(members[i]),
            None => groups.push((r, vec![members[i]])),
        }
    }
    groups.into_iter().map(|(_, v)| v).collect()
}
