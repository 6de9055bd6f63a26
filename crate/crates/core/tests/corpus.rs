use std::collections::BTreeMap;

use linrel::corpus::{example, named_example, random_relation, regular_corpus, RandomParams, RelationKind, Sample};
use linrel::phclass::{verify_ph, PHWitness, Status, Variant};
use linrel::{Error, Field, GaussQ, HermClass, LinearRelation, Matrix, RelationStructure, TolerancePolicy, C64};

fn pol() -> TolerancePolicy {
    TolerancePolicy::default()
}

const KINDS: [RelationKind; 7] = [
    RelationKind::MaxDissipative,
    RelationKind::MaxNonnegative,
    RelationKind::Dissipative,
    RelationKind::Symmetric,
    RelationKind::Nonnegative,
    RelationKind::SelfAdjoint,
    RelationKind::SkewAdjoint,
];

fn has(kind: RelationKind, c: &RelationStructure) -> bool {
    match kind {
        RelationKind::MaxDissipative => c.max_dissipative,
        RelationKind::MaxNonnegative => c.max_nonnegative,
        RelationKind::Dissipative => c.dissipative,
        RelationKind::Symmetric => c.symmetric,
        RelationKind::Nonnegative => c.nonnegative,
        RelationKind::SelfAdjoint => c.self_adjoint,
        RelationKind::SkewAdjoint => c.skew_adjoint,
    }
}

fn sweep<T: Sample>(seeds: u64) {
    let mut bad = Vec::new();
    for seed in 0..seeds {
        let n = 1 + (seed % 6) as usize;
        for kind in KINDS {
            let r = random_relation::<T>(kind, n, &RandomParams::default(), seed, &pol()).unwrap();
            if !has(kind, &r.classify()) {
                bad.push((kind, n, seed));
            }
        }
    }
    assert!(bad.is_empty(), "{} misses: {:?}", bad.len(), &bad[..bad.len().min(10)]);
}

#[test]
fn generator_soundness_float() {
    sweep::<C64>(1000);
}

#[test]
fn generator_soundness_exact() {
    sweep::<GaussQ>(1000);
}

#[test]
fn generators_are_deterministic() {
    for kind in KINDS {
        let a = random_relation::<C64>(kind, 4, &RandomParams::default(), 17, &pol()).unwrap();
        let b = random_relation::<C64>(kind, 4, &RandomParams::default(), 17, &pol()).unwrap();
        assert_eq!(a.basis(), b.basis());
    }
}

#[test]
fn max_dissipative_has_dimension_n() {
    for seed in 0..100 {
        let n = 1 + (seed % 6) as usize;
        let r = random_relation::<C64>(RelationKind::MaxDissipative, n, &RandomParams::default(), seed, &pol()).unwrap();
        assert_eq!(r.dim(), n);
        let (f, g) = (r.f(), r.g());
        let h = &(&f.adjoint() * &g) + &(&g.adjoint() * &f);
        assert!(C64::hermitian_class(&h, &pol()).is_nsd());
    }
}

#[test]
fn full_domain_nonnegative_is_a_psd_graph() {
    for seed in 0..20 {
        let n = 1 + (seed % 5) as usize;
        let params = RandomParams { mul_dim: Some(0), ker_dim: Some(0), delete: None };
        let r = random_relation::<GaussQ>(RelationKind::MaxNonnegative, n, &params, seed, &pol()).unwrap();
        let h = r.as_graph().unwrap().expect("graph");
        assert_ne!(GaussQ::hermitian_class(&h, &pol()), HermClass::NotHermitian);
        assert!(GaussQ::hermitian_class(&h, &pol()).is_psd());
        assert!(r.classify().self_adjoint);
    }
}

#[test]
fn deleted_columns_lose_maximality() {
    for seed in 0..50 {
        let n = 1 + (seed % 6) as usize;
        let params = RandomParams { delete: Some(1), ..Default::default() };
        let r = random_relation::<C64>(RelationKind::Dissipative, n, &params, seed, &pol()).unwrap();
        let c = r.classify();
        assert!(c.dissipative && !c.max_dissipative);
        assert_eq!(r.dim(), n - 1);
    }
}

#[test]
fn example_shapes() {
    let s = example("sing", Some(("k", 2))).unwrap();
    assert_eq!((s.pencil.rows(), s.pencil.cols()), (5, 5));
    let inv = s.pencil.kronecker_invariants(&pol());
    assert_eq!((inv.column_minimal_indices(), inv.row_minimal_indices()), (vec![2], vec![2]));

    let x = example("six_index3", None).unwrap();
    assert_eq!(x.pencil.e, Matrix::from_i64(3, 3, &[0, 0, 1, 0, 0, 0, 0, 1, 0]));
    assert_eq!(x.pencil.a, Matrix::from_i64(3, 3, &[0, 1, 0, 0, 0, -1, 1, 0, 0]));
    assert_eq!(x.expected.index, Some(3));

    let e = example("ex1", None).unwrap();
    assert_eq!(e.pencil.e, Matrix::from_i64(2, 1, &[1, 0]));
    assert_eq!(e.pencil.a, Matrix::from_i64(2, 1, &[0, 1]));
    let PHWitness::Mmw { d, q } = &e.witnesses[0] else { panic!() };
    assert_eq!(d, &Matrix::from_i64(2, 2, &[0, -1, 1, 0]));
    assert_eq!(q, &e.pencil.e);
    assert_eq!(e.expected.verdicts[&Variant::Mmw], Status::CertifiedYes);
    assert_eq!(e.expected.verdicts[&Variant::Mvds], Status::CertifiedNo);
}

#[test]
fn example_errors() {
    assert!(matches!(example("nope", None), Err(Error::UnknownExample(_))));
    assert!(matches!(example("sing", Some(("k", 0))), Err(Error::Precondition(_))));
    assert!(matches!(example("mmw", Some(("n", 1))), Err(Error::Precondition(_))));
    let mut p = BTreeMap::new();
    p.insert("n".to_string(), 3);
    assert_eq!(named_example("six_inf", &p).unwrap().pencil.rows(), 6);
}

#[test]
fn regular_corpus_is_regular() {
    let c = regular_corpus(30, 7);
    assert_eq!(c.len(), 30);
    assert!(c.iter().all(|p| p.is_regular(&pol())));
}

/// On K^1 the skew-adjoint relations are gr(ia) (a real) and {0} x K; the self-adjoint ones
/// are gr(b) (b real) and {0} x K. No product of the two is gr(-1), the notms range.
#[test]
fn notms_has_no_skew_times_self_adjoint_factorization() {
    let ex = example("notms", None).unwrap();
    let target = LinearRelation::from_span(&ex.pencil.e, &ex.pencil.a, &pol()).unwrap();
    let one = |v: GaussQ| Matrix::from_vec(1, 1, vec![v]);
    let vert = LinearRelation::<GaussQ>::second_axis(&Matrix::identity(1), &pol());
    let vals: Vec<GaussQ> = (-6..=6).flat_map(|p| (1..=3).map(move |q| GaussQ::from_ratio(p, q))).collect();
    let mut skew: Vec<LinearRelation<GaussQ>> =
        vals.iter().map(|a| LinearRelation::graph(&one(GaussQ::imag_unit() * a.clone()), &pol()).unwrap()).collect();
    skew.push(vert.clone());
    let mut sa: Vec<LinearRelation<GaussQ>> =
        vals.iter().map(|b| LinearRelation::graph(&one(b.clone()), &pol()).unwrap()).collect();
    sa.push(vert);
    for d in &skew {
        assert!(d.classify().skew_adjoint);
        for l in &sa {
            assert!(l.classify().self_adjoint);
            assert_ne!(d.product(l).unwrap(), target);
            let w = PHWitness::Mvds { d: d.clone(), l: l.clone() };
            assert!(!verify_ph(&ex.pencil, &w, &pol()).unwrap().ok);
        }
    }
    // for graphs the product is gr(i a b), purely imaginary, never -1
    let a = GaussQ::from_ratio(2, 3);
    let b = GaussQ::from_ratio(-5, 2);
    let d = LinearRelation::graph(&one(GaussQ::imag_unit() * a.clone()), &pol()).unwrap();
    let l = LinearRelation::graph(&one(b.clone()), &pol()).unwrap();
    assert_eq!(d.product(&l).unwrap(), LinearRelation::graph(&one(GaussQ::imag_unit() * a * b), &pol()).unwrap());
}
