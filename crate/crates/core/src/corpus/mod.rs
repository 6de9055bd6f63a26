//! The worked examples as exact integer pencils, plus seeded random generators.

pub mod random;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfield::{Field, GaussQ, Matrix, TolerancePolicy, C64};
use crate::pencil::MatrixPencil;
use crate::phclass::{PHWitness, Status, Variant};
use crate::relation::LinearRelation;

pub use random::{
    dissipative_instance, index_one_instance, maximal_instance, pencil_from_relation, random_relation, PHInstance,
    RandomParams, RelationKind, Sample,
};

/// Identifiers accepted by [`named_example`].
pub const EXAMPLE_IDS: &[&str] = &["ex1", "notmmw", "notms", "sing", "six_inf", "six_zero", "six_index3", "mmw", "six_last"];

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Expected {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regular: Option<bool>,
    /// Finite eigenvalues with their Jordan block sizes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite: Option<Vec<(C64, Vec<usize>)>>,
    /// Expected verdict per variant. `certified_no` entries that come from a hand
    /// argument rather than an implemented obstruction are listed here too.
    pub verdicts: BTreeMap<Variant, Status>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_ea: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct ExampleInstance {
    pub id: String,
    pub params: BTreeMap<String, usize>,
    pub pencil: MatrixPencil<GaussQ>,
    pub witnesses: Vec<PHWitness<GaussQ>>,
    pub expected: Expected,
}

fn m(rows: usize, cols: usize, v: &[i64]) -> Matrix<GaussQ> {
    Matrix::from_i64(rows, cols, v)
}

fn param(params: &BTreeMap<String, usize>, key: &str, default: Option<usize>) -> Result<usize> {
    let v = match params.get(key) {
        Some(&v) => v,
        None => default.ok_or_else(|| Error::Precondition(format!("missing parameter {key}")))?,
    };
    if v == 0 {
        return Err(Error::Precondition(format!("parameter {key} must be at least 1")));
    }
    Ok(v)
}

fn anti(n: usize, f: impl Fn(usize) -> i64, shift: usize) -> Matrix<GaussQ> {
    // entry (i, n + shift - 1 - i) for 0-based i with shift in {0, 1}
    Matrix::from_fn(n, n, |i, j| {
        if i + j + 1 == n + shift && (shift == 0 || i >= 1) {
            GaussQ::from_i64(f(i))
        } else {
            GaussQ::from_i64(0)
        }
    })
}

fn jordan_zero(n: usize) -> Matrix<GaussQ> {
    Matrix::from_fn(n, n, |i, j| GaussQ::from_i64((j == i + 1) as i64))
}

/// Builds the example `id`. Integer parameters: `k` for `sing`, `n` for `six_inf`,
/// `six_zero` and `mmw`; defaults are the smallest valid values (`mmw` needs `n >= 2`).
pub fn named_example(id: &str, params: &BTreeMap<String, usize>) -> Result<ExampleInstance> {
    let pol = TolerancePolicy::default();
    let mut used = BTreeMap::new();
    let mut ex = Expected::default();
    let (pencil, witnesses) = match id {
        "ex1" => {
            let e = m(2, 1, &[1, 0]);
            let a = m(2, 1, &[0, 1]);
            let d = m(2, 2, &[0, -1, 1, 0]);
            ex.gamma = Some(vec![2]);
            ex.verdicts.insert(Variant::Mmw, Status::CertifiedYes);
            ex.verdicts.insert(Variant::Mvds, Status::CertifiedNo);
            ex.verdicts.insert(Variant::Ours, Status::CertifiedYes);
            (MatrixPencil::new(e.clone(), a)?, vec![PHWitness::Mmw { d, q: e }])
        }
        "notmmw" => {
            let e = m(3, 4, &[1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0]);
            let a = m(3, 4, &[0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1]);
            let d = LinearRelation::from_span(
                &m(3, 3, &[1, 0, 0, 0, 1, 0, 0, 0, 0]),
                &m(3, 3, &[0, 1, 0, -1, 0, 0, 0, 0, 1]),
                &pol,
            )?;
            let l = LinearRelation::from_span(&Matrix::identity(3), &m(3, 3, &[1, 0, 0, 0, 1, 0, 0, 0, 0]), &pol)?;
            ex.rank_ea = Some(4);
            ex.verdicts.insert(Variant::Mmw, Status::CertifiedNo);
            ex.verdicts.insert(Variant::Ours, Status::CertifiedYes);
            (MatrixPencil::new(e, a)?, vec![PHWitness::Ours { d, l }])
        }
        "notms" => {
            let one = m(1, 1, &[1]);
            let d = m(1, 1, &[-1]);
            ex.regular = Some(true);
            ex.index = Some(0);
            ex.finite = Some(vec![(C64::new(-1.0, 0.0), vec![1])]);
            ex.verdicts.insert(Variant::Mmw, Status::CertifiedYes);
            ex.verdicts.insert(Variant::Mvds, Status::CertifiedNo);
            ex.verdicts.insert(Variant::Ours, Status::CertifiedYes);
            (MatrixPencil::new(one.clone(), d.clone())?, vec![PHWitness::Mmw { d, q: one }])
        }
        "sing" => {
            let k = param(params, "k", Some(1))?;
            used.insert("k".to_string(), k);
            let n = 2 * k + 1;
            let g0 = Matrix::from_fn(k, k + 1, |i, j| GaussQ::from_i64((i == j) as i64));
            let g1 = Matrix::from_fn(k, k + 1, |i, j| GaussQ::from_i64((j == i + 1) as i64));
            let mut e = Matrix::zeros(n, n);
            e.set_block(0, k + 1, &-&g1.transpose());
            e.set_block(k + 1, 0, &-&g1);
            let mut d = Matrix::zeros(n, n);
            d.set_block(0, k + 1, &g0.transpose());
            d.set_block(k + 1, 0, &-&g0);
            ex.beta = Some(vec![k + 1]);
            ex.gamma = Some(vec![k + 1]);
            ex.regular = Some(false);
            ex.verdicts.insert(Variant::Mmw, Status::CertifiedYes);
            ex.verdicts.insert(Variant::Ours, Status::CertifiedYes);
            let q = Matrix::identity(n);
            let ours = PHWitness::Ours {
                d: LinearRelation::graph(&d, &pol)?,
                l: LinearRelation::from_span(&e, &q, &pol)?,
            };
            (MatrixPencil::new(e, d.clone())?, vec![PHWitness::Mmw { d, q }, ours])
        }
        "six_inf" => {
            let n = param(params, "n", Some(1))?;
            used.insert("n".to_string(), n);
            let big = 2 * n;
            let l = anti(big, |_| 1, 1);
            let d = anti(big, |i| if i < n { 1 } else { -1 }, 0);
            ex.alpha = Some(vec![big]);
            ex.finite = Some(Vec::new());
            ex.index = Some(big);
            ex.regular = Some(true);
            ex.verdicts.insert(Variant::Ours, Status::CertifiedYes);
            let w = PHWitness::Ours {
                d: LinearRelation::graph(&d, &pol)?,
                l: LinearRelation::from_span(&l, &Matrix::identity(big), &pol)?,
            };
            (MatrixPencil::new(l, d)?, vec![w])
        }
        "six_zero" => {
            let n = param(params, "n", Some(1))?;
            used.insert("n".to_string(), n);
            let big = 2 * n + 1;
            let l = anti(big, |_| 1, 0);
            let d = anti(big, |i| if i <= n { 1 } else { -1 }, 1);
            ex.finite = Some(vec![(C64::new(0.0, 0.0), vec![big])]);
            ex.alpha = Some(Vec::new());
            ex.index = Some(0);
            ex.regular = Some(true);
            ex.verdicts.insert(Variant::Ours, Status::CertifiedYes);
            let w = PHWitness::Ours {
                d: LinearRelation::graph(&d, &pol)?,
                l: LinearRelation::from_span(&l, &Matrix::identity(big), &pol)?,
            };
            (MatrixPencil::new(l, d)?, vec![w])
        }
        "six_index3" => {
            let e = m(3, 3, &[0, 0, 1, 0, 0, 0, 0, 1, 0]);
            let a = m(3, 3, &[0, 1, 0, 0, 0, -1, 1, 0, 0]);
            let d = LinearRelation::from_span(
                &m(3, 3, &[1, 0, 0, 0, 1, 0, 0, 0, 0]),
                &m(3, 3, &[0, 1, 0, -1, 0, 0, 0, 0, 1]),
                &pol,
            )?;
            let l = LinearRelation::from_span(&m(3, 2, &[1, 0, 0, 0, 0, 1]), &m(3, 2, &[1, 0, 0, 1, 0, 0]), &pol)?;
            ex.alpha = Some(vec![3]);
            ex.index = Some(3);
            ex.regular = Some(true);
            ex.finite = Some(Vec::new());
            ex.verdicts.insert(Variant::Ours, Status::CertifiedYes);
            (MatrixPencil::new(e, a)?, vec![PHWitness::Ours { d, l }])
        }
        "mmw" => {
            let n = param(params, "n", Some(2))?;
            if n < 2 {
                return Err(Error::Precondition("mmw needs n >= 2".into()));
            }
            used.insert("n".to_string(), n);
            let j = jordan_zero(n);
            let d = &j - &j.transpose();
            let e = Matrix::from_fn(n, n - 1, |i, c| GaussQ::from_i64((i == c) as i64));
            let a = &d * &e;
            ex.gamma = Some(vec![n]);
            ex.verdicts.insert(Variant::Mmw, Status::CertifiedYes);
            ex.verdicts.insert(Variant::Ours, Status::CertifiedYes);
            (MatrixPencil::new(e.clone(), a)?, vec![PHWitness::Mmw { d, q: e }])
        }
        "six_last" => {
            let e = m(2, 2, &[1, 0, 1, 0]);
            let a = m(2, 2, &[-1, 0, 0, -1]);
            let d = LinearRelation::from_span(&m(2, 2, &[1, 0, 0, 0]), &m(2, 2, &[-1, 0, 0, 1]), &pol)?;
            let l = LinearRelation::from_span(&m(2, 2, &[1, 1, 1, 1]), &Matrix::identity(2), &pol)?;
            ex.regular = Some(true);
            ex.verdicts.insert(Variant::Ours, Status::CertifiedYes);
            (MatrixPencil::new(e, a)?, vec![PHWitness::Ours { d, l }])
        }
        other => return Err(Error::UnknownExample(other.to_string())),
    };
    Ok(ExampleInstance { id: id.to_string(), params: used, pencil, witnesses, expected: ex })
}

/// Shorthand for examples with at most one parameter.
pub fn example(id: &str, param: Option<(&str, usize)>) -> Result<ExampleInstance> {
    let mut p = BTreeMap::new();
    if let Some((k, v)) = param {
        p.insert(k.to_string(), v);
    }
    named_example(id, &p)
}

/// Every example at the parameter values the regression suite uses.
pub fn all_examples() -> Vec<ExampleInstance> {
    let mut out = Vec::new();
    for id in ["ex1", "notmmw", "notms", "six_index3", "six_last"] {
        out.push(example(id, None).expect("fixed example"));
    }
    for k in 1..=3 {
        out.push(example("sing", Some(("k", k))).expect("fixed example"));
        out.push(example("six_inf", Some(("n", k))).expect("fixed example"));
    }
    for n in 1..=2 {
        out.push(example("six_zero", Some(("n", n))).expect("fixed example"));
    }
    for n in 2..=4 {
        out.push(example("mmw", Some(("n", n))).expect("fixed example"));
    }
    out
}

/// Regular pencils with known index for resolvent checks: the regular examples, then
/// regular random instances from the dissipative-times-nonnegative generator whose
/// finite spectrum stays inside the unit-ish disc of radius 10.
pub fn regular_corpus(count: usize, seed: u64) -> Vec<MatrixPencil<GaussQ>> {
    let pol = TolerancePolicy::default();
    let mut out: Vec<MatrixPencil<GaussQ>> = all_examples()
        .into_iter()
        .map(|e| e.pencil)
        .filter(|p| p.is_square() && p.is_regular(&pol))
        .collect();
    out.truncate(count);
    let mut s = seed;
    while out.len() < count {
        let n = 1 + (s % 5) as usize;
        s += 1;
        let Ok(inst) = dissipative_instance::<GaussQ>(n, s, &pol) else { continue };
        let p = inst.pencil;
        if !p.is_square() {
            continue;
        }
        let inv = p.kronecker_invariants(&pol);
        if inv.is_regular() && inv.finite().iter().all(|f| f.lambda.norm() < 10.0) {
            out.push(p);
        }
    }
    out
}
