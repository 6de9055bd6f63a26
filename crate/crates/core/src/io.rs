//! JSON wire format.
//!
//! Matrices are `{"field","backend","rows","cols","data"}` with row-major data. Float
//! scalars are numbers or `[re, im]`; exact scalars are `"p/q"` strings or pairs of them.
//! Relations are `{"n","F","G"}` or `{"kernel": {"K","L"}}`, pencils `{"E","A"}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::corpus::ExampleInstance;
use crate::decompose::{ProductDecomposition, QuasiKroneckerPH};
use crate::error::{Error, Result};
use crate::numfield::{Backend, Field, GaussQ, Matrix, TolerancePolicy, C64};
use crate::pencil::{KroneckerInvariants, MatrixPencil};
use crate::phclass::{PHWitness, Variant};
use crate::relation::LinearRelation;

/// Default tolerance for turning input doubles into rationals.
pub const DEFAULT_RATIONALIZE_TOL: f64 = 1e-12;
/// Largest denominator the rationalizer will produce.
pub const MAX_DENOMINATOR: i64 = 1_000_000;

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

/// Best continued-fraction approximation of `x` with denominator at most
/// [`MAX_DENOMINATOR`], accepted if within `tol * max(1, |x|)`.
pub fn rationalize(x: f64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let bound = tol * x.abs().max(1.0);
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > MAX_DENOMINATOR as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if (x - p1 as f64 / q1 as f64).abs() <= bound {
            return Some(BigRational::new(BigInt::from(p1), BigInt::from(q1)));
        }
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// A matrix as read from the wire, in whichever backend it was written.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMatrix {
    Float(Matrix<C64>),
    Exact(Matrix<GaussQ>),
}

impl AnyMatrix {
    pub fn backend(&self) -> Backend {
        match self {
            AnyMatrix::Float(_) => Backend::Float,
            AnyMatrix::Exact(_) => Backend::Exact,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            AnyMatrix::Float(m) => m.shape(),
            AnyMatrix::Exact(m) => m.shape(),
        }
    }
}

/// Scalar types that can be built from wire matrices of either backend.
pub trait FromWire: Field {
    fn from_wire(m: &AnyMatrix, rationalize_tol: f64) -> Result<Matrix<Self>>;
}

impl FromWire for C64 {
    fn from_wire(m: &AnyMatrix, _: f64) -> Result<Matrix<C64>> {
        Ok(match m {
            AnyMatrix::Float(m) => m.clone(),
            AnyMatrix::Exact(m) => m.to_c64(),
        })
    }
}

impl FromWire for GaussQ {
    fn from_wire(m: &AnyMatrix, tol: f64) -> Result<Matrix<GaussQ>> {
        match m {
            AnyMatrix::Exact(m) => Ok(m.clone()),
            AnyMatrix::Float(m) => {
                let conv = |x: f64| rationalize(x, tol).ok_or_else(|| Error::NonRational(format!("{x:e}")));
                let mut data = Vec::with_capacity(m.data().len());
                for z in m.data() {
                    data.push(GaussQ::new(conv(z.re)?, conv(z.im)?));
                }
                Ok(Matrix::from_vec(m.rows(), m.cols(), data))
            }
        }
    }
}

fn rat_string(r: &BigRational) -> Value {
    Value::String(GaussQ::rational_to_string(r))
}

fn float_value(x: f64) -> Value {
    // -0.0 prints as 0 so equal inputs give identical bytes
    json!(if x == 0.0 { 0.0 } else { x })
}

pub fn matrix_to_json<T: Field>(m: &Matrix<T>) -> Value {
    let real = m.is_real();
    let data: Vec<Value> = match T::BACKEND {
        Backend::Float => m
            .data()
            .iter()
            .map(|z| {
                let z = z.to_c64();
                if real {
                    float_value(z.re)
                } else {
                    json!([float_value(z.re), float_value(z.im)])
                }
            })
            .collect(),
        Backend::Exact => m
            .data()
            .iter()
            .map(|z| {
                let z = z.to_gauss();
                if real {
                    rat_string(&z.re)
                } else {
                    json!([rat_string(&z.re), rat_string(&z.im)])
                }
            })
            .collect(),
    };
    json!({
        "field": if real { "real" } else { "complex" },
        "backend": T::BACKEND,
        "rows": m.rows(),
        "cols": m.cols(),
        "data": data,
    })
}

fn get<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(format!("missing field `{key}`")))
}

fn get_usize(obj: &Value, key: &str) -> Result<usize> {
    get(obj, key)?.as_u64().map(|v| v as usize).ok_or_else(|| schema(format!("`{key}` must be a nonnegative integer")))
}

enum Part {
    Num(f64),
    Rat(BigRational),
}

fn part(v: &Value) -> Result<Part> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Part::Rat(BigRational::from_integer(BigInt::from(i))))
            } else {
                Ok(Part::Num(n.as_f64().ok_or_else(|| schema("bad number"))?))
            }
        }
        Value::String(s) => {
            GaussQ::parse_rational(s).map(Part::Rat).ok_or_else(|| schema(format!("`{s}` is not a rational p/q")))
        }
        _ => Err(schema(format!("scalar expected, got {v}"))),
    }
}

fn part_f64(p: &Part) -> f64 {
    match p {
        Part::Num(x) => *x,
        Part::Rat(r) => r.to_f64().unwrap_or(f64::NAN),
    }
}

fn part_rat(p: Part, tol: f64) -> Result<BigRational> {
    match p {
        Part::Rat(r) => Ok(r),
        Part::Num(x) => rationalize(x, tol).ok_or_else(|| Error::NonRational(format!("{x:e}"))),
    }
}

/// Reads a matrix object. An absent `backend` is inferred: strings mean exact, numbers
/// mean float. Float values in an exact matrix are rationalized with the default tolerance.
pub fn parse_matrix(v: &Value) -> Result<AnyMatrix> {
    if !v.is_object() {
        return Err(schema("matrix must be an object"));
    }
    let (rows, cols) = (get_usize(v, "rows")?, get_usize(v, "cols")?);
    let data = get(v, "data")?.as_array().ok_or_else(|| schema("`data` must be an array"))?;
    if data.len() != rows * cols {
        return Err(schema(format!("`data` has {} entries, expected {}", data.len(), rows * cols)));
    }
    let real = match v.get("field").and_then(Value::as_str) {
        None | Some("complex") => false,
        Some("real") => true,
        Some(f) => return Err(schema(format!("unknown field `{f}`"))),
    };
    let mut parts = Vec::with_capacity(data.len());
    for x in data {
        let (re, im) = match x {
            Value::Array(p) if p.len() == 2 => {
                if real {
                    return Err(schema("complex scalar in a real matrix"));
                }
                (part(&p[0])?, part(&p[1])?)
            }
            Value::Array(_) => return Err(schema("complex scalars are [re, im]")),
            _ => (part(x)?, Part::Rat(BigRational::zero())),
        };
        parts.push((re, im));
    }
    let backend = match v.get("backend").and_then(Value::as_str) {
        Some("float") => Backend::Float,
        Some("exact") => Backend::Exact,
        Some(b) => return Err(schema(format!("unknown backend `{b}`"))),
        None => {
            if data.iter().any(|x| x.is_string() || x.as_array().is_some_and(|p| p.iter().any(Value::is_string))) {
                Backend::Exact
            } else {
                Backend::Float
            }
        }
    };
    Ok(match backend {
        Backend::Float => AnyMatrix::Float(Matrix::from_vec(
            rows,
            cols,
            parts.iter().map(|(re, im)| C64::new(part_f64(re), part_f64(im))).collect(),
        )),
        Backend::Exact => {
            let mut out = Vec::with_capacity(parts.len());
            for (re, im) in parts {
                out.push(GaussQ::new(part_rat(re, DEFAULT_RATIONALIZE_TOL)?, part_rat(im, DEFAULT_RATIONALIZE_TOL)?));
            }
            AnyMatrix::Exact(Matrix::from_vec(rows, cols, out))
        }
    })
}

/// A relation as read from the wire.
#[derive(Clone, Debug)]
pub enum RelationWire {
    Span { f: AnyMatrix, g: AnyMatrix },
    Kernel { k: AnyMatrix, l: AnyMatrix },
}

impl RelationWire {
    pub fn parse(v: &Value) -> Result<Self> {
        if let Some(kv) = v.get("kernel") {
            return Ok(RelationWire::Kernel { k: parse_matrix(get(kv, "K")?)?, l: parse_matrix(get(kv, "L")?)? });
        }
        let f = parse_matrix(get(v, "F")?)?;
        let g = parse_matrix(get(v, "G")?)?;
        if let Some(n) = v.get("n") {
            let n = n.as_u64().ok_or_else(|| schema("`n` must be a nonnegative integer"))? as usize;
            if f.shape().0 != n {
                return Err(Error::Shape(format!("F has {} rows but n = {n}", f.shape().0)));
            }
        }
        Ok(RelationWire::Span { f, g })
    }

    pub fn matrices(&self) -> [&AnyMatrix; 2] {
        match self {
            RelationWire::Span { f, g } => [f, g],
            RelationWire::Kernel { k, l } => [k, l],
        }
    }

    pub fn build<T: FromWire>(&self, pol: &TolerancePolicy, tol: f64) -> Result<LinearRelation<T>> {
        match self {
            RelationWire::Span { f, g } => LinearRelation::from_span(&T::from_wire(f, tol)?, &T::from_wire(g, tol)?, pol),
            RelationWire::Kernel { k, l } => {
                LinearRelation::from_kernel(&T::from_wire(k, tol)?, &T::from_wire(l, tol)?, pol)
            }
        }
    }
}

pub fn relation_to_json<T: Field>(r: &LinearRelation<T>) -> Value {
    json!({ "n": r.n(), "F": matrix_to_json(&r.f()), "G": matrix_to_json(&r.g()) })
}

/// A pencil as read from the wire; `{"E","A"}`, possibly nested under `"pencil"`.
#[derive(Clone, Debug)]
pub struct PencilWire {
    pub e: AnyMatrix,
    pub a: AnyMatrix,
}

impl PencilWire {
    pub fn parse(v: &Value) -> Result<Self> {
        let v = v.get("pencil").unwrap_or(v);
        Ok(PencilWire { e: parse_matrix(get(v, "E")?)?, a: parse_matrix(get(v, "A")?)? })
    }

    pub fn matrices(&self) -> [&AnyMatrix; 2] {
        [&self.e, &self.a]
    }

    pub fn build<T: FromWire>(&self, tol: f64) -> Result<MatrixPencil<T>> {
        MatrixPencil::new(T::from_wire(&self.e, tol)?, T::from_wire(&self.a, tol)?)
    }
}

pub fn pencil_to_json<T: Field>(p: &MatrixPencil<T>) -> Value {
    json!({ "E": matrix_to_json(&p.e), "A": matrix_to_json(&p.a) })
}

/// A witness as read from the wire: `{"variant":"mmw","D","Q"}` with matrices, or
/// `{"variant":"mvds"|"ours","D","L"}` with relations.
#[derive(Clone, Debug)]
pub enum WitnessWire {
    Mmw { d: AnyMatrix, q: AnyMatrix },
    Pair { variant: Variant, d: RelationWire, l: RelationWire },
}

impl WitnessWire {
    pub fn parse(v: &Value) -> Result<Self> {
        let variant: Variant = serde_json::from_value(get(v, "variant")?.clone())
            .map_err(|_| schema("`variant` must be mmw, mvds or ours"))?;
        Ok(match variant {
            Variant::Mmw => WitnessWire::Mmw { d: parse_matrix(get(v, "D")?)?, q: parse_matrix(get(v, "Q")?)? },
            _ => WitnessWire::Pair {
                variant,
                d: RelationWire::parse(get(v, "D")?)?,
                l: RelationWire::parse(get(v, "L")?)?,
            },
        })
    }

    pub fn variant(&self) -> Variant {
        match self {
            WitnessWire::Mmw { .. } => Variant::Mmw,
            WitnessWire::Pair { variant, .. } => *variant,
        }
    }

    pub fn matrices(&self) -> Vec<&AnyMatrix> {
        match self {
            WitnessWire::Mmw { d, q } => vec![d, q],
            WitnessWire::Pair { d, l, .. } => d.matrices().into_iter().chain(l.matrices()).collect(),
        }
    }

    pub fn build<T: FromWire>(&self, pol: &TolerancePolicy, tol: f64) -> Result<PHWitness<T>> {
        Ok(match self {
            WitnessWire::Mmw { d, q } => PHWitness::Mmw { d: T::from_wire(d, tol)?, q: T::from_wire(q, tol)? },
            WitnessWire::Pair { variant, d, l } => {
                let (d, l) = (d.build(pol, tol)?, l.build(pol, tol)?);
                if *variant == Variant::Mvds {
                    PHWitness::Mvds { d, l }
                } else {
                    PHWitness::Ours { d, l }
                }
            }
        })
    }
}

pub fn witness_to_json<T: Field>(w: &PHWitness<T>) -> Value {
    match w {
        PHWitness::Mmw { d, q } => json!({ "variant": "mmw", "D": matrix_to_json(d), "Q": matrix_to_json(q) }),
        PHWitness::Mvds { d, l } | PHWitness::Ours { d, l } => json!({
            "variant": w.variant(),
            "D": relation_to_json(d),
            "L": relation_to_json(l),
        }),
    }
}

/// Pencil, witnesses and parameters of a worked example; readable as a pencil file and as
/// a witness bundle.
pub fn example_to_json(ex: &ExampleInstance) -> Value {
    json!({
        "id": ex.id,
        "params": ex.params,
        "pencil": pencil_to_json(&ex.pencil),
        "witnesses": ex.witnesses.iter().map(witness_to_json).collect::<Vec<_>>(),
    })
}

pub fn invariants_to_json(inv: &KroneckerInvariants) -> Value {
    let finite: Vec<Value> = inv
        .finite()
        .iter()
        .map(|f| json!({ "lambda": [float_value(f.lambda.re), float_value(f.lambda.im)], "blocks": f.blocks }))
        .collect();
    json!({
        "finite": finite,
        "alpha": inv.alpha,
        "beta": inv.beta,
        "gamma": inv.gamma,
        "index": inv.index(),
        "regular": inv.is_regular(),
        "ambiguous": inv.ambiguous,
    })
}

pub fn product_decomposition_to_json<T: Field>(pd: &ProductDecomposition<T>) -> Value {
    json!({
        "n1": pd.n1,
        "n2": pd.n2,
        "U": matrix_to_json(&pd.u),
        "gram": matrix_to_json(&Matrix::from_vec(1, pd.gram.len(), pd.gram.clone())),
        "L11": matrix_to_json(&pd.l11),
        "L21": matrix_to_json(&pd.l21),
        "L22": matrix_to_json(&pd.l22),
        "D11": matrix_to_json(&pd.d11),
        "D21": matrix_to_json(&pd.d21),
        "D22": matrix_to_json(&pd.d22),
        "facts": pd.facts,
    })
}

pub fn quasi_kronecker_to_json<T: Field>(qk: &QuasiKroneckerPH<T>) -> Value {
    json!({
        "n1": qk.n1,
        "n2": qk.n2,
        "n3": qk.n3,
        "n4": qk.n4,
        "zero_rows": qk.zero_rows,
        "zero_cols": qk.zero_cols,
        "S": matrix_to_json(&qk.s),
        "T": matrix_to_json(&qk.t),
        "L11": matrix_to_json(&qk.l11),
        "D11": matrix_to_json(&qk.d11),
        "D21": matrix_to_json(&qk.d21),
        "L21": matrix_to_json(&qk.l21),
    })
}
