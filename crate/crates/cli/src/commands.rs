use std::collections::BTreeMap;

use clap::{Args, ValueEnum};
use linrel::corpus::{
    dissipative_instance, index_one_instance, maximal_instance, named_example, pencil_from_relation, random_relation,
    PHInstance, RandomParams, RelationKind, Sample,
};
use linrel::decompose::{decomposition_kernels, l11_d11_positive_real, product_decomposition, quasi_kronecker_ph};
use linrel::io::{
    example_to_json, invariants_to_json, matrix_to_json, parse_matrix, pencil_to_json, product_decomposition_to_json,
    quasi_kronecker_to_json, relation_to_json, witness_to_json, AnyMatrix, FromWire, PencilWire, RelationWire,
    WitnessWire,
};
use linrel::phclass::{
    mmw_to_mvds, mvds_to_mmw, obstruction_mmw, structure_report, verify_ph, Assumptions, Conversion, DAssumption,
    LAssumption, PHVerdict, PHWitness, Status, Variant,
};
use linrel::{Error, Field, LinearRelation, Matrix, MatrixPencil, TolerancePolicy};
use serde_json::{json, Value};

use crate::input::{self, Failure};

type Out = Result<Value, Failure>;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelOp {
    Adjoint,
    Inverse,
    Complement,
    ScalarMul,
    Product,
    OperatorSum,
    ComponentwiseSum,
    Intersection,
    Classify,
    Parts,
    AsGraph,
}

impl RelOp {
    fn binary(self) -> bool {
        matches!(self, RelOp::Product | RelOp::OperatorSum | RelOp::ComponentwiseSum | RelOp::Intersection)
    }

    fn name(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantArg {
    Mmw,
    Mvds,
    Ours,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Mmw => Variant::Mmw,
            VariantArg::Mvds => Variant::Mvds,
            VariantArg::Ours => Variant::Ours,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssumeD {
    Dissipative,
    MaxDissipative,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssumeL {
    Symmetric,
    Nonnegative,
    MaxNonnegative,
    InversePdGraph,
}

#[derive(Args, Debug, Clone)]
pub struct GenArgs {
    /// A worked example id, or random_relation, dissipative_instance, maximal_instance,
    /// index_one_instance.
    #[arg(long)]
    pub id: String,
    /// Integer parameters `key=value`, comma separated or repeated.
    #[arg(long, value_delimiter = ',')]
    pub params: Vec<String>,
    /// Relation kind for random_relation, e.g. max_dissipative.
    #[arg(long)]
    pub kind: Option<String>,
}

#[derive(Debug, Clone)]
pub enum Kind {
    PencilAnalyze,
    RelationOp { op: RelOp, other: Option<String>, scalar: Option<String> },
    ClassifyPh { d: Option<AssumeD>, l: Option<AssumeL> },
    VerifyPh(VariantArg),
    Decompose,
    QuasiKronecker,
    Gen(GenArgs),
}

pub struct Run {
    pub pol: TolerancePolicy,
    pub tol: f64,
    pub seed: u64,
}

/// Where a relation pair comes from: explicit `D`, `L` fields or a bundled witness.
pub enum PairSource {
    Relations(RelationWire, RelationWire),
    Witness(WitnessWire),
}

/// Parsed input, still backend-neutral.
pub enum Prepared {
    Pencil(PencilWire),
    RelOp { op: RelOp, a: RelationWire, b: Option<RelationWire>, scalar: Option<AnyMatrix> },
    Classify { pencil: PencilWire, witnesses: Vec<WitnessWire>, assume: Option<Assumptions> },
    Verify { variant: Variant, pencil: PencilWire, witnesses: Vec<WitnessWire> },
    Pair { qk: bool, pair: PairSource, pencil: Option<PencilWire> },
    Gen(GenArgs),
}

fn require(doc: Option<&Value>) -> Result<&Value, Failure> {
    doc.ok_or_else(|| Failure::usage("an input file (or inline JSON, or - for stdin) is required".into()))
}

fn witnesses(doc: &Value) -> Result<Vec<WitnessWire>, Failure> {
    let mut out = Vec::new();
    if let Some(w) = doc.get("witness") {
        out.push(WitnessWire::parse(w)?);
    }
    if let Some(ws) = doc.get("witnesses") {
        let ws = ws.as_array().ok_or_else(|| Error::Schema("`witnesses` must be an array".into()))?;
        for w in ws {
            out.push(WitnessWire::parse(w)?);
        }
    }
    Ok(out)
}

fn pair_source(doc: &Value) -> Result<PairSource, Failure> {
    if let (Some(d), Some(l)) = (doc.get("D"), doc.get("L")) {
        return Ok(PairSource::Relations(RelationWire::parse(d)?, RelationWire::parse(l)?));
    }
    match witnesses(doc)?.pop() {
        Some(w) => Ok(PairSource::Witness(w)),
        None => Err(Error::Schema("expected `D` and `L` relations or a witness".into()).into()),
    }
}

fn scalar_matrix(s: &str) -> Result<AnyMatrix, Failure> {
    let entry = |p: &str| -> Value {
        let p = p.trim();
        if p.contains(['.', 'e', 'E']) {
            p.parse::<f64>().map(Value::from).unwrap_or_else(|_| json!(p))
        } else {
            json!(p)
        }
    };
    let parts: Vec<&str> = s.split(',').collect();
    let x = match parts.as_slice() {
        [re] => entry(re),
        [re, im] => json!([entry(re), entry(im)]),
        _ => return Err(Failure::usage(format!("--scalar takes `a` or `re,im`, got {s:?}"))),
    };
    Ok(parse_matrix(&json!({ "rows": 1, "cols": 1, "data": [x] }))?)
}

impl Prepared {
    pub fn parse(kind: Kind, doc: Option<&Value>) -> Result<Self, Failure> {
        Ok(match kind {
            Kind::PencilAnalyze => Prepared::Pencil(PencilWire::parse(require(doc)?)?),
            Kind::RelationOp { op, other, scalar } => {
                let a = RelationWire::parse(require(doc)?)?;
                let b = match (op.binary(), other) {
                    (true, Some(src)) => Some(RelationWire::parse(&input::load(&src)?)?),
                    (true, None) => return Err(Failure::usage(format!("--op {} needs --other", op.name()))),
                    (false, Some(_)) => return Err(Failure::usage(format!("--op {} takes no --other", op.name()))),
                    (false, None) => None,
                };
                let scalar = match (op, scalar) {
                    (RelOp::ScalarMul, Some(s)) => Some(scalar_matrix(&s)?),
                    (RelOp::ScalarMul, None) => return Err(Failure::usage("--op scalar-mul needs --scalar".into())),
                    (_, Some(_)) => return Err(Failure::usage("--scalar only applies to scalar-mul".into())),
                    (_, None) => None,
                };
                Prepared::RelOp { op, a, b, scalar }
            }
            Kind::ClassifyPh { d, l } => {
                let doc = require(doc)?;
                let assume = match (d, l) {
                    (Some(d), Some(l)) => Some(Assumptions { d: assume_d(d), l: assume_l(l) }),
                    (None, None) => None,
                    _ => return Err(Failure::usage("--assume-d and --assume-l go together".into())),
                };
                Prepared::Classify { pencil: PencilWire::parse(doc)?, witnesses: witnesses(doc)?, assume }
            }
            Kind::VerifyPh(v) => {
                let doc = require(doc)?;
                Prepared::Verify { variant: v.into(), pencil: PencilWire::parse(doc)?, witnesses: witnesses(doc)? }
            }
            Kind::Decompose | Kind::QuasiKronecker => {
                let doc = require(doc)?;
                let pencil = match doc.get("pencil").or_else(|| doc.get("E").map(|_| doc)) {
                    Some(_) => Some(PencilWire::parse(doc)?),
                    None => None,
                };
                Prepared::Pair { qk: matches!(kind, Kind::QuasiKronecker), pair: pair_source(doc)?, pencil }
            }
            Kind::Gen(g) => Prepared::Gen(g),
        })
    }

    /// Every input matrix, for the backend decision.
    pub fn matrices(&self) -> Vec<&AnyMatrix> {
        match self {
            Prepared::Pencil(p) => p.matrices().to_vec(),
            Prepared::RelOp { a, b, scalar, .. } => {
                let mut m = a.matrices().to_vec();
                m.extend(b.iter().flat_map(|b| b.matrices()));
                m.extend(scalar.iter());
                m
            }
            Prepared::Classify { pencil, witnesses, .. } | Prepared::Verify { pencil, witnesses, .. } => {
                let mut m = pencil.matrices().to_vec();
                m.extend(witnesses.iter().flat_map(|w| w.matrices()));
                m
            }
            Prepared::Pair { pair, pencil, .. } => {
                let mut m: Vec<&AnyMatrix> = match pair {
                    PairSource::Relations(d, l) => d.matrices().into_iter().chain(l.matrices()).collect(),
                    PairSource::Witness(w) => w.matrices(),
                };
                m.extend(pencil.iter().flat_map(|p| p.matrices()));
                m
            }
            Prepared::Gen(_) => Vec::new(),
        }
    }

    pub fn run<T: FromWire + Sample>(&self, r: &Run) -> Out {
        match self {
            Prepared::Pencil(p) => pencil_analyze(&p.build::<T>(r.tol)?, r),
            Prepared::RelOp { op, a, b, scalar } => {
                let a = a.build::<T>(&r.pol, r.tol)?;
                let b = b.as_ref().map(|b| b.build::<T>(&r.pol, r.tol)).transpose()?;
                let s = scalar.as_ref().map(|s| T::from_wire(s, r.tol)).transpose()?;
                relation_op(*op, &a, b.as_ref(), s.map(|s| s[(0, 0)].clone()))
            }
            Prepared::Classify { pencil, witnesses, assume } => {
                let p = pencil.build::<T>(r.tol)?;
                let ws = build_all::<T>(witnesses, r)?;
                classify_ph(&p, &ws, *assume, r)
            }
            Prepared::Verify { variant, pencil, witnesses } => {
                let p = pencil.build::<T>(r.tol)?;
                let ws = build_all::<T>(witnesses, r)?;
                Ok(verify(*variant, &p, &ws, r)?)
            }
            Prepared::Pair { qk, pair, pencil } => {
                let p = pencil.as_ref().map(|p| p.build::<T>(r.tol)).transpose()?;
                let (d, l) = match pair {
                    PairSource::Relations(d, l) => (d.build::<T>(&r.pol, r.tol)?, l.build::<T>(&r.pol, r.tol)?),
                    PairSource::Witness(w) => {
                        let w = w.build::<T>(&r.pol, r.tol)?;
                        let p = p.as_ref().ok_or_else(|| Error::Schema("an mmw witness needs its pencil".into()));
                        match w {
                            PHWitness::Mmw { .. } => split(w.as_ours(p?, &r.pol)?),
                            other => split(other),
                        }
                    }
                };
                if *qk {
                    quasi_kronecker(&d, &l, p, r)
                } else {
                    decompose(&d, &l, r)
                }
            }
            Prepared::Gen(g) => generate::<T>(g, r),
        }
    }
}

fn split<T: Field>(w: PHWitness<T>) -> (LinearRelation<T>, LinearRelation<T>) {
    match w {
        PHWitness::Mvds { d, l } | PHWitness::Ours { d, l } => (d, l),
        PHWitness::Mmw { .. } => unreachable!("converted by the caller"),
    }
}

fn build_all<T: FromWire>(ws: &[WitnessWire], r: &Run) -> Result<Vec<PHWitness<T>>, Failure> {
    ws.iter().map(|w| w.build::<T>(&r.pol, r.tol).map_err(Failure::from)).collect()
}

fn assume_d(d: AssumeD) -> DAssumption {
    match d {
        AssumeD::Dissipative => DAssumption::Dissipative,
        AssumeD::MaxDissipative => DAssumption::MaxDissipative,
    }
}

fn assume_l(l: AssumeL) -> LAssumption {
    match l {
        AssumeL::Symmetric => LAssumption::Symmetric,
        AssumeL::Nonnegative => LAssumption::Nonnegative,
        AssumeL::MaxNonnegative => LAssumption::MaxNonnegative,
        AssumeL::InversePdGraph => LAssumption::InversePdGraph,
    }
}

fn pencil_analyze<T: Field>(p: &MatrixPencil<T>, r: &Run) -> Out {
    let inv = p.kronecker_invariants(&r.pol);
    let mut v = invariants_to_json(&inv);
    v["rows"] = json!(p.rows());
    v["cols"] = json!(p.cols());
    v["positive_real"] = json!(p.is_positive_real(&r.pol).ok());
    v["column_minimal_indices"] = json!(inv.column_minimal_indices());
    v["row_minimal_indices"] = json!(inv.row_minimal_indices());
    Ok(v)
}

fn relation_op<T: Field>(op: RelOp, a: &LinearRelation<T>, b: Option<&LinearRelation<T>>, s: Option<T>) -> Out {
    let other = || b.expect("checked when parsing");
    let rel = match op {
        RelOp::Adjoint => Some(a.adjoint()),
        RelOp::Inverse => Some(a.inverse()),
        RelOp::Complement => Some(a.orth_complement()),
        RelOp::ScalarMul => Some(a.scalar_mul(&s.expect("checked when parsing"))),
        RelOp::Product => Some(a.product(other())?),
        RelOp::OperatorSum => Some(a.operator_sum(other())?),
        RelOp::ComponentwiseSum => Some(a.componentwise_sum(other())?),
        RelOp::Intersection => Some(a.intersection(other())?),
        RelOp::Classify | RelOp::Parts | RelOp::AsGraph => None,
    };
    let subject = rel.as_ref().unwrap_or(a);
    let mut v = json!({ "op": op.name(), "n": subject.n(), "dim": subject.dim(), "structure": subject.classify() });
    if let Some(rel) = &rel {
        v["relation"] = relation_to_json(rel);
    }
    if op == RelOp::Parts {
        let p = a.parts();
        v["parts"] = json!({
            "dom": matrix_to_json(&p.dom),
            "ran": matrix_to_json(&p.ran),
            "ker": matrix_to_json(&p.ker),
            "mul": matrix_to_json(&p.mul),
        });
    }
    if op == RelOp::AsGraph {
        v["graph"] = a.as_graph()?.map_or(Value::Null, |m| matrix_to_json(&m));
    }
    Ok(v)
}

fn verdict_json(v: &PHVerdict, source: &str) -> Value {
    json!({
        "variant": v.variant,
        "status": v.status,
        "obstruction": v.obstruction,
        "diagnostics": v.diagnostics,
        "source": source,
    })
}

/// Verdict for one variant: a matching witness first, then one converted from another
/// variant, then the `mmw` dimension obstruction.
fn verify<T: Field>(variant: Variant, p: &MatrixPencil<T>, ws: &[PHWitness<T>], r: &Run) -> Result<Value, Failure> {
    let mut notes = Vec::new();
    if let Some(w) = ws.iter().find(|w| w.variant() == variant) {
        let rep = verify_ph(p, w, &r.pol)?;
        if rep.ok || variant != Variant::Mmw {
            return Ok(verdict_json(&PHVerdict::from_report(&rep), "witness"));
        }
        notes.extend(rep.diagnostics.iter().map(|d| format!("witness: {d}")));
    }
    for w in ws.iter().filter(|w| w.variant() != variant) {
        let converted = match (variant, w) {
            (Variant::Ours, _) => Some(w.as_ours(p, &r.pol)?),
            // the same pair may meet the stricter definition
            (Variant::Mvds, PHWitness::Ours { d, l }) => Some(PHWitness::Mvds { d: d.clone(), l: l.clone() }),
            (Variant::Mvds, PHWitness::Mmw { d, q }) => match mmw_to_mvds(p, d, q, &r.pol) {
                Ok(Conversion::Converted((d, l))) => Some(PHWitness::Mvds { d, l }),
                Ok(Conversion::NotConvertible(why)) => {
                    notes.push(format!("mmw witness not convertible: {why}"));
                    None
                }
                Err(e) => {
                    notes.push(format!("mmw witness not convertible: {e}"));
                    None
                }
            },
            (Variant::Mmw, PHWitness::Mvds { d, l } | PHWitness::Ours { d, l }) => match mvds_to_mmw(p, d, l, &r.pol) {
                Ok(Conversion::Converted((d, q))) => Some(PHWitness::Mmw { d, q }),
                Ok(Conversion::NotConvertible(why)) => {
                    notes.push(format!("{:?} witness not convertible: {why}", w.variant()).to_lowercase());
                    None
                }
                Err(e) => {
                    notes.push(format!("{:?} witness not convertible: {e}", w.variant()).to_lowercase());
                    None
                }
            },
            _ => None,
        };
        if let Some(c) = converted {
            let rep = verify_ph(p, &c, &r.pol)?;
            if rep.ok {
                let src = format!("converted from {}", serde_json::to_value(w.variant()).unwrap_or_default());
                return Ok(verdict_json(&PHVerdict::from_report(&rep), src.replace('"', "").as_str()));
            }
            notes.extend(rep.diagnostics);
        }
    }
    if variant == Variant::Mmw {
        let mut v = obstruction_mmw(p, &r.pol);
        if v.status != Status::CertifiedNo {
            v.diagnostics.extend(notes);
        }
        return Ok(verdict_json(&v, "obstruction"));
    }
    if notes.is_empty() {
        notes.push("no witness supplied".into());
    }
    let v = PHVerdict { variant, status: Status::Undetermined, obstruction: None, diagnostics: notes };
    Ok(verdict_json(&v, "none"))
}

fn classify_ph<T: Field>(p: &MatrixPencil<T>, ws: &[PHWitness<T>], assume: Option<Assumptions>, r: &Run) -> Out {
    let mut checks = Vec::new();
    for w in ws {
        let rep = verify_ph(p, w, &r.pol)?;
        checks.push(json!({ "variant": rep.variant, "ok": rep.ok, "diagnostics": rep.diagnostics }));
    }
    let mut verdicts = serde_json::Map::new();
    for v in [Variant::Mmw, Variant::Mvds, Variant::Ours] {
        let key = serde_json::to_value(v).unwrap_or_default();
        verdicts.insert(key.as_str().unwrap_or_default().to_string(), verify(v, p, ws, r)?);
    }
    let mut out = json!({ "witnesses": checks, "verdicts": verdicts });
    if let Some(a) = assume {
        out["structure"] = json!(structure_report(p, a, &r.pol)?);
    }
    Ok(out)
}

fn decompose<T: Field>(d: &LinearRelation<T>, l: &LinearRelation<T>, r: &Run) -> Out {
    let pd = product_decomposition(d, l)?;
    let mut v = product_decomposition_to_json(&pd);
    v["kernels"] = json!(decomposition_kernels(&pd, d, l));
    v["l11_d11_positive_real"] = json!(l11_d11_positive_real(&pd, &r.pol));
    v["reconstruction_matches"] = json!(pd.reconstruct(&r.pol) == d.product(l)?);
    Ok(v)
}

fn quasi_kronecker<T: Sample>(d: &LinearRelation<T>, l: &LinearRelation<T>, p: Option<MatrixPencil<T>>, r: &Run) -> Out {
    let p = match p {
        Some(p) => p,
        None => pencil_from_relation(&d.product(l)?),
    };
    let qk = quasi_kronecker_ph(d, l, &p)?;
    let got = p.transform(&qk.s, &qk.t);
    let want = qk.pattern();
    let scale = got.e.norm_fro().max(got.a.norm_fro()).max(1.0);
    let close = |x: &Matrix<T>, y: &Matrix<T>| T::negligible(&(x - y), scale, &r.pol);
    let mut v = quasi_kronecker_to_json(&qk);
    v["pattern_matches"] = json!(close(&got.e, &want.e) && close(&got.a, &want.a));
    v["pencil"] = pencil_to_json(&p);
    Ok(v)
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, usize>, Failure> {
    let mut out = BTreeMap::new();
    for item in raw.iter().filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("--params entries are key=value, got {item:?}")))?;
        let v = v.trim().parse::<usize>().map_err(|_| Failure::usage(format!("parameter {k} must be a nonnegative integer")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn instance_json<T: Field>(inst: &PHInstance<T>) -> Value {
    json!({
        "pencil": pencil_to_json(&inst.pencil),
        "D": relation_to_json(&inst.d),
        "L": relation_to_json(&inst.l),
        "witnesses": [witness_to_json(&PHWitness::Ours { d: inst.d.clone(), l: inst.l.clone() })],
    })
}

type InstanceGen<T> = fn(usize, u64, &TolerancePolicy) -> linrel::Result<PHInstance<T>>;

fn generate<T: Sample>(g: &GenArgs, r: &Run) -> Out {
    let params = parse_params(&g.params)?;
    let n = params.get("n").copied().unwrap_or(3);
    if g.kind.is_some() && g.id != "random_relation" {
        return Err(Failure::usage("--kind only applies to random_relation".into()));
    }
    let gen: Option<InstanceGen<T>> = match g.id.as_str() {
        "dissipative_instance" => Some(dissipative_instance::<T>),
        "maximal_instance" => Some(maximal_instance::<T>),
        "index_one_instance" => Some(index_one_instance::<T>),
        _ => None,
    };
    let mut v = if let Some(gen) = gen {
        instance_json(&gen(n, r.seed, &r.pol)?)
    } else if g.id == "random_relation" {
        let kind: RelationKind = g.kind.as_deref().ok_or_else(|| Failure::usage("random_relation needs --kind".into()))?.parse()?;
        let rp = RandomParams {
            mul_dim: params.get("mul_dim").copied(),
            ker_dim: params.get("ker_dim").copied(),
            delete: params.get("delete").copied(),
        };
        let rel = random_relation::<T>(kind, n, &rp, r.seed, &r.pol)?;
        let mut v = relation_to_json(&rel);
        v["kind"] = json!(kind);
        v["structure"] = json!(rel.classify());
        v
    } else {
        let ex = named_example(&g.id, &params)?;
        let mut v = example_to_json(&ex);
        v["expected"] = json!(ex.expected);
        return Ok(v);
    };
    v["id"] = json!(g.id);
    v["params"] = json!(params);
    Ok(v)
}
