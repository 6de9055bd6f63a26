//! Port-Hamiltonian pencils in three senses, the conversions between them, and the
//! structural consequences checked against computed Kronecker invariants.
//!
//! * `mmw`: `A = DQ` with `D` dissipative and `E*Q = Q*E`.
//! * `mvds`: `ran [E; A] = DL` with `D` skew-adjoint and `L` self-adjoint.
//! * `ours`: `ran [E; A] = DL` with `D` dissipative and `L` symmetric.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::decompose::{check_product_hypotheses, product_decomposition};
use crate::error::{Error, Result};
use crate::numfield::{self, Field, HermClass, Matrix, TolerancePolicy};
use crate::pencil::{KroneckerInvariants, MatrixPencil};
use crate::relation::LinearRelation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Mmw,
    Mvds,
    Ours,
}

#[derive(Clone, Debug)]
pub enum PHWitness<T: Field> {
    Mmw { d: Matrix<T>, q: Matrix<T> },
    Mvds { d: LinearRelation<T>, l: LinearRelation<T> },
    Ours { d: LinearRelation<T>, l: LinearRelation<T> },
}

impl<T: Field> PHWitness<T> {
    pub fn variant(&self) -> Variant {
        match self {
            PHWitness::Mmw { .. } => Variant::Mmw,
            PHWitness::Mvds { .. } => Variant::Mvds,
            PHWitness::Ours { .. } => Variant::Ours,
        }
    }

    /// The relation pair an `mmw` witness induces: `gr D` and `ran [E; Q]`.
    pub fn as_ours(&self, p: &MatrixPencil<T>, pol: &TolerancePolicy) -> Result<PHWitness<T>> {
        Ok(match self {
            PHWitness::Mmw { d, q } => {
                PHWitness::Ours { d: LinearRelation::graph(d, pol)?, l: LinearRelation::from_span(&p.e, q, pol)? }
            }
            PHWitness::Mvds { d, l } | PHWitness::Ours { d, l } => PHWitness::Ours { d: d.clone(), l: l.clone() },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub variant: Variant,
    pub ok: bool,
    /// Failing conditions, first one first. Empty on success.
    pub diagnostics: Vec<String>,
}

pub fn verify_ph<T: Field>(p: &MatrixPencil<T>, w: &PHWitness<T>, pol: &TolerancePolicy) -> Result<VerifyReport> {
    let (n, m) = (p.rows(), p.cols());
    let ctx = p.ctx(pol);
    let mut diag = Vec::new();
    match w {
        PHWitness::Mmw { d, q } => {
            if d.shape() != (n, n) || q.shape() != (n, m) {
                return Err(Error::Shape(format!("witness D {:?}, Q {:?} for a {n}x{m} pencil", d.shape(), q.shape())));
            }
            let dq = d * q;
            let scale = p.scale().max(d.norm_fro() * q.norm_fro());
            if !T::negligible(&(&p.a - &dq), scale, pol) {
                diag.push("A != DQ".to_string());
            }
            if !T::hermitian_class(&(d + &d.adjoint()), pol).is_nsd() {
                diag.push("D not dissipative".to_string());
            }
            let qe = &q.adjoint() * &p.e;
            if !T::negligible(&(&qe - &qe.adjoint()), scale, pol) {
                diag.push("E*Q != Q*E".to_string());
            }
        }
        PHWitness::Mvds { d, l } | PHWitness::Ours { d, l } => {
            if d.n() != n || l.n() != n {
                return Err(Error::Shape(format!("relations on K^{}, K^{} for a pencil with {n} rows", d.n(), l.n())));
            }
            let (ds, ls) = (d.classify(), l.classify());
            if matches!(w, PHWitness::Mvds { .. }) {
                if !ds.skew_adjoint {
                    diag.push("D not skew-adjoint".to_string());
                }
                if !ls.self_adjoint {
                    diag.push("L not self-adjoint".to_string());
                }
            } else {
                if !ds.dissipative {
                    diag.push("D not dissipative".to_string());
                }
                if !ls.symmetric {
                    diag.push("L not symmetric".to_string());
                }
            }
            let range = p.e.vstack(&p.a);
            let prod = d.product(l)?;
            if !numfield::subspace_equal(&range, prod.basis(), &ctx) {
                diag.push("ran [E; A] != DL".to_string());
            }
        }
    }
    Ok(VerifyReport { variant: w.variant(), ok: diag.is_empty(), diagnostics: diag })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    CertifiedYes,
    CertifiedNo,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstruction {
    DimensionExcess,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PHVerdict {
    pub variant: Variant,
    pub status: Status,
    pub obstruction: Option<Obstruction>,
    pub diagnostics: Vec<String>,
}

impl PHVerdict {
    /// `certified_yes` from a witness that passed [`verify_ph`], otherwise `undetermined`
    /// with the failing conditions attached.
    pub fn from_report(r: &VerifyReport) -> Self {
        let status = if r.ok { Status::CertifiedYes } else { Status::Undetermined };
        PHVerdict { variant: r.variant, status, obstruction: None, diagnostics: r.diagnostics.clone() }
    }
}

/// An `mmw` pencil has `ran [E; A] = (gr D) ran [E; Q]`, so `rk [E; A] <= n`.
pub fn obstruction_mmw<T: Field>(p: &MatrixPencil<T>, pol: &TolerancePolicy) -> PHVerdict {
    let n = p.rows();
    let r = T::rank(&p.e.vstack(&p.a), &p.ctx(pol));
    if r > n {
        PHVerdict {
            variant: Variant::Mmw,
            status: Status::CertifiedNo,
            obstruction: Some(Obstruction::DimensionExcess),
            diagnostics: vec![format!("rank [E; A] = {r} > {n}")],
        }
    } else {
        PHVerdict { variant: Variant::Mmw, status: Status::Undetermined, obstruction: None, diagnostics: Vec::new() }
    }
}

#[derive(Clone, Debug)]
pub enum Conversion<X> {
    Converted(X),
    /// Names the hypothesis that fails.
    NotConvertible(String),
}

impl<X> Conversion<X> {
    pub fn is_converted(&self) -> bool {
        matches!(self, Conversion::Converted(_))
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Conversion::NotConvertible(r) => Some(r),
            Conversion::Converted(_) => None,
        }
    }
}

/// From `(gr D) ran [E; Q]` to the relation pair, when `D` is skew-Hermitian and
/// `ran [E; Q]` has dimension `n`.
pub fn mmw_to_mvds<T: Field>(
    p: &MatrixPencil<T>,
    d: &Matrix<T>,
    q: &Matrix<T>,
    pol: &TolerancePolicy,
) -> Result<Conversion<(LinearRelation<T>, LinearRelation<T>)>> {
    let w = PHWitness::Mmw { d: d.clone(), q: q.clone() };
    let rep = verify_ph(p, &w, pol)?;
    if !rep.ok {
        return Err(Error::Precondition(format!("not an mmw witness: {}", rep.diagnostics.join("; "))));
    }
    let n = p.rows();
    if !T::negligible(&(d + &d.adjoint()), d.norm_fro(), pol) {
        return Ok(Conversion::NotConvertible("skewness: D + D* != 0".into()));
    }
    let lrel = LinearRelation::from_span(&p.e, q, pol)?;
    if lrel.dim() != n {
        return Ok(Conversion::NotConvertible(format!("dimension: dim ran [E; Q] = {} != {n}", lrel.dim())));
    }
    let drel = LinearRelation::graph(d, pol)?;
    let back = verify_ph(p, &PHWitness::Mvds { d: drel.clone(), l: lrel.clone() }, pol)?;
    if !back.ok {
        return Err(Error::Numerical(format!("converted witness fails: {}", back.diagnostics.join("; "))));
    }
    Ok(Conversion::Converted((drel, lrel)))
}

/// From a relation pair with `mul D = {0}` to `A = DQ`.
pub fn mvds_to_mmw<T: Field>(
    p: &MatrixPencil<T>,
    drel: &LinearRelation<T>,
    lrel: &LinearRelation<T>,
    pol: &TolerancePolicy,
) -> Result<Conversion<(Matrix<T>, Matrix<T>)>> {
    let rep = verify_ph(p, &PHWitness::Mvds { d: drel.clone(), l: lrel.clone() }, pol)?;
    if !rep.ok {
        return Err(Error::Precondition(format!("not an mvds witness: {}", rep.diagnostics.join("; "))));
    }
    if drel.parts().mul.cols() > 0 {
        return Ok(Conversion::NotConvertible("mul D is nontrivial".into()));
    }
    let d = drel.as_graph()?.ok_or_else(|| Error::Numerical("D with trivial mul is not a graph".into()))?;
    let ctx = p.ctx(pol);
    let (e1, q1) = (lrel.f(), lrel.g());
    let lhs = e1.vstack(&(&d * &q1));
    let t = T::solve(&lhs, &p.e.vstack(&p.a), &ctx).ok_or_else(|| Error::Numerical("no T with [E1; DQ1] T = [E; A]".into()))?;
    let q = &q1 * &t;
    let back = verify_ph(p, &PHWitness::Mmw { d: d.clone(), q: q.clone() }, pol)?;
    if !back.ok {
        return Err(Error::Numerical(format!("converted witness fails: {}", back.diagnostics.join("; "))));
    }
    if !lrel.contains(&LinearRelation::from_span(&p.e, &q, pol)?) {
        return Err(Error::Numerical("ran [E; Q] escapes L".into()));
    }
    Ok(Conversion::Converted((d, q)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityReport {
    /// `cond_i && cond_ii`.
    pub regular: bool,
    /// `sL11 - D11` is regular.
    pub cond_i: bool,
    /// `ker L +̂ mul D = (ran L)⊥ +̂ (dom D)⊥`.
    pub cond_ii: bool,
    /// `is_regular` on the pencil itself.
    pub direct: bool,
    /// The two verdicts differ; a tolerance problem, rerun exactly.
    pub disagreement: bool,
    pub ambiguous: bool,
}

pub fn regularity_via_structure<T: Field>(
    d: &LinearRelation<T>,
    l: &LinearRelation<T>,
    p: &MatrixPencil<T>,
    pol: &TolerancePolicy,
) -> Result<RegularityReport> {
    check_product_hypotheses(d, l)?;
    let ctx = p.ctx(pol);
    if d.n() != p.rows() {
        return Err(Error::Shape(format!("pencil has {} rows, relations live on K^{}", p.rows(), d.n())));
    }
    if !numfield::subspace_equal(&p.e.vstack(&p.a), d.product(l)?.basis(), &ctx) {
        return Err(Error::Precondition("ran [E; A] differs from DL".into()));
    }
    let pd = product_decomposition(d, l)?;
    let inv11 = pd.pencil11().kronecker_invariants(pol);
    let cond_i = inv11.is_regular();
    let (pdp, plp) = (d.parts(), l.parts());
    let lhs = plp.ker.hstack(&pdp.mul);
    let rhs = numfield::orth_complement(&plp.ran, &ctx).hstack(&numfield::orth_complement(&pdp.dom, &ctx));
    let cond_ii = numfield::subspace_equal(&lhs, &rhs, &ctx);
    let inv = p.kronecker_invariants(pol);
    let direct = p.is_square() && inv.is_regular();
    let regular = cond_i && cond_ii;
    Ok(RegularityReport {
        regular,
        cond_i,
        cond_ii,
        direct,
        disagreement: regular != direct,
        ambiguous: inv.ambiguous || inv11.ambiguous || ctx.ambiguous(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegEquivReport {
    /// `sE - DQ` regular.
    pub i: bool,
    /// `sE - Q` regular.
    pub ii: bool,
    /// `dim ran [E; Q] = n`.
    pub iii: bool,
    pub qe_psd: bool,
    /// `(Q ker E) ∩ {x ∈ ran Q : Dx ∈ (ran Q)⊥} = {0}`.
    pub second_cond: bool,
    /// Description of a broken implication; `None` when the pattern holds.
    pub violation: Option<String>,
}

pub fn reg_equivalences_mmw<T: Field>(
    e: &Matrix<T>,
    q: &Matrix<T>,
    d: &Matrix<T>,
    pol: &TolerancePolicy,
) -> Result<RegEquivReport> {
    let n = e.rows();
    if e.shape() != (n, n) || q.shape() != (n, n) || d.shape() != (n, n) {
        return Err(Error::Shape("E, Q, D must all be n x n".into()));
    }
    let qe = &q.adjoint() * e;
    let scale = e.norm_fro().max(q.norm_fro()).max(1.0);
    if !T::negligible(&(&qe - &qe.adjoint()), scale * scale, pol) {
        return Err(Error::Precondition("Q*E != E*Q".into()));
    }
    if !T::hermitian_class(&(d + &d.adjoint()), pol).is_nsd() {
        return Err(Error::Precondition("D not dissipative".into()));
    }
    let p1 = MatrixPencil::new(e.clone(), d * q)?;
    let p2 = MatrixPencil::new(e.clone(), q.clone())?;
    let i = p1.is_regular(pol);
    let ii = p2.is_regular(pol);
    let ctx = p2.ctx(pol);
    let iii = T::rank(&e.vstack(q), &ctx) == n;
    let qe_psd = T::hermitian_class(&qe, pol).is_psd();
    // {x ∈ ran Q : Dx ⟂ ran Q} = Q' ker(Q'* D Q') for a basis Q' of ran Q
    let rq = T::range_basis(q, &ctx);
    let inner = T::kernel_basis(&(&(&rq.adjoint() * d) * &rq), &ctx);
    let s2 = &rq * &inner;
    let s1 = q * &T::kernel_basis(e, &ctx);
    let second_cond = numfield::intersect(&s1, &s2, &ctx).cols() == 0;
    let mut violation = None;
    if i && !ii {
        violation = Some("(i) holds but (ii) fails".to_string());
    } else if ii != iii {
        violation = Some("(ii) and (iii) differ".to_string());
    } else if qe_psd && second_cond && ii && !i {
        violation = Some("(ii) holds with Q*E >= 0 and the side condition, but (i) fails".to_string());
    }
    Ok(RegEquivReport { i, ii, iii, qe_psd, second_cond, violation })
}

/// What is known about the two relations behind a pencil.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DAssumption {
    Dissipative,
    MaxDissipative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LAssumption {
    Symmetric,
    Nonnegative,
    MaxNonnegative,
    /// `L = (gr Q)^{-1}` with `Q` positive definite.
    InversePdGraph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assumptions {
    pub d: DAssumption,
    pub l: LAssumption,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bundle {
    /// Dissipative times nonnegative, regular pencils.
    Regular,
    /// Maximally dissipative times an inverse positive definite graph.
    IndexOne,
    /// Maximally dissipative times maximally nonnegative.
    Maximal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BundleReport {
    pub bundle: Bundle,
    /// The bundle only asserts something for regular pencils; false means vacuous.
    pub applicable: bool,
    pub predicates: BTreeMap<String, bool>,
    pub pass: bool,
}

/// Real-part tolerance for the closed left half-plane test.
const LHP_TOL: f64 = 1e-8;

fn spectral_predicates(inv: &KroneckerInvariants, out: &mut BTreeMap<String, bool>, zero_max: usize) {
    let fin = inv.finite();
    let on_axis = |re: f64, lam: f64| re.abs() <= LHP_TOL * lam.max(1.0);
    out.insert("spectrum_closed_left_half_plane".into(), fin.iter().all(|f| f.lambda.re <= LHP_TOL * f.lambda.norm().max(1.0)));
    out.insert(
        "imaginary_eigenvalues_semi_simple".into(),
        fin.iter()
            .filter(|f| on_axis(f.lambda.re, f.lambda.norm()) && f.lambda.norm() > LHP_TOL)
            .all(|f| f.semi_simple()),
    );
    let zero = inv.blocks_at(crate::C64::new(0.0, 0.0), LHP_TOL);
    out.insert(format!("blocks_at_zero_le_{zero_max}"), zero.iter().all(|&b| b <= zero_max));
}

/// Evaluates the predicates that the stated assumptions guarantee.
pub fn structure_report<T: Field>(p: &MatrixPencil<T>, a: Assumptions, pol: &TolerancePolicy) -> Result<BundleReport> {
    let bundle = match (a.d, a.l) {
        (DAssumption::MaxDissipative, LAssumption::InversePdGraph) => Bundle::IndexOne,
        (DAssumption::MaxDissipative, LAssumption::MaxNonnegative) => Bundle::Maximal,
        (_, LAssumption::Nonnegative | LAssumption::MaxNonnegative | LAssumption::InversePdGraph) => Bundle::Regular,
        (d, LAssumption::Symmetric) => {
            return Err(Error::UnknownAssumptions(format!("{d:?} with a merely symmetric L carries no bundle")))
        }
    };
    let inv = p.kronecker_invariants(pol);
    let regular = p.is_square() && inv.is_regular();
    let mut pr = BTreeMap::new();
    let applicable = match bundle {
        Bundle::Regular => {
            pr.insert("regular".into(), regular);
            spectral_predicates(&inv, &mut pr, 2);
            pr.insert("index_le_3".into(), inv.index() <= 3);
            regular
        }
        Bundle::IndexOne => {
            pr.insert("regular".into(), regular);
            spectral_predicates(&inv, &mut pr, 1);
            pr.insert("index_le_1".into(), inv.index() <= 1);
            true
        }
        Bundle::Maximal => {
            pr.insert("column_minimal_indices_le_1".into(), inv.beta.iter().all(|&b| b <= 2));
            pr.insert("row_minimal_indices_zero".into(), inv.gamma.iter().all(|&g| g == 1));
            pr.insert("alpha_le_2".into(), inv.alpha.iter().all(|&b| b <= 2));
            spectral_predicates(&inv, &mut pr, 2);
            pr.insert("index_le_2".into(), inv.index() <= 2);
            true
        }
    };
    let pass = !applicable || pr.values().all(|&b| b);
    Ok(BundleReport { bundle, applicable, predicates: pr, pass })
}

/// Hermitian class of `Q*E`, used by reports.
pub fn qe_class<T: Field>(e: &Matrix<T>, q: &Matrix<T>, pol: &TolerancePolicy) -> HermClass {
    T::hermitian_class(&(&q.adjoint() * e), pol)
}
