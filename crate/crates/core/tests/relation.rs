use linrel::corpus::{random_relation, RandomParams, RelationKind};
use linrel::numfield::{intersect, orth_complement, rank, subspace_equal};
use linrel::{Ctx, Field, GaussQ, LinearRelation, Matrix, TolerancePolicy, C64};
use proptest::prelude::*;

type Q = LinearRelation<GaussQ>;

fn pol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn m(rows: usize, cols: usize, v: &[i64]) -> Matrix<GaussQ> {
    Matrix::from_i64(rows, cols, v)
}

fn span(f: Matrix<GaussQ>, g: Matrix<GaussQ>) -> Q {
    LinearRelation::from_span(&f, &g, &pol()).unwrap()
}

fn graph(w: Matrix<GaussQ>) -> Q {
    LinearRelation::graph(&w, &pol()).unwrap()
}

fn notmmw() -> (Q, Q) {
    let d = LinearRelation::from_stacked(
        &m(6, 3, &[1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, -1, 0, 0, 0, 0, 1]),
        &pol(),
    )
    .unwrap();
    let l = LinearRelation::from_stacked(
        &m(6, 3, &[1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0]),
        &pol(),
    )
    .unwrap();
    (d, l)
}

#[test]
fn from_span_and_kernel_examples() {
    let one = m(1, 1, &[1]);
    let g1 = span(one.clone(), one.clone());
    assert_eq!(g1, graph(one.clone()));
    assert_eq!(g1.dim(), 1);
    assert_eq!(span(m(2, 1, &[1, 0]), m(2, 1, &[1, 0])).dim(), 1);
    assert_eq!(span(m(2, 1, &[0, 0]), m(2, 1, &[0, 0])).dim(), 0);

    let k = LinearRelation::from_kernel(&one, &m(1, 1, &[-1]), &pol()).unwrap();
    assert_eq!(k, g1);
    let full = LinearRelation::<GaussQ>::from_kernel(&m(1, 2, &[0, 0]), &m(1, 2, &[0, 0]), &pol()).unwrap();
    assert_eq!(full.dim(), 4);
    assert!(LinearRelation::from_span(&m(2, 1, &[1, 0]), &m(2, 2, &[1, 0, 0, 1]), &pol()).is_err());
}

#[test]
fn parts_examples() {
    let p = graph(Matrix::identity(2)).parts();
    assert_eq!((p.dom.cols(), p.ran.cols(), p.ker.cols(), p.mul.cols()), (2, 2, 0, 0));
    let (d, l) = notmmw();
    let e3 = m(3, 1, &[0, 0, 1]);
    let ctx = d.ctx();
    assert!(subspace_equal(&d.parts().mul, &e3, &ctx));
    assert!(subspace_equal(&l.parts().ker, &e3, &ctx));
}

#[test]
fn scalar_mul_examples() {
    let (d, l) = notmmw();
    assert_eq!(d.scalar_mul(&GaussQ::from_i64(1)), d);
    let w = m(2, 2, &[1, 2, -3, 0]);
    assert_eq!(graph(w.clone()).scalar_mul(&GaussQ::from_i64(-1)), graph(-&w));
    assert!(l.classify().symmetric);
    let il = l.scalar_mul(&GaussQ::imag_unit());
    assert!(il.classify().skew_symmetric && !il.classify().symmetric);
    assert!(il.scalar_mul(&GaussQ::imag_unit()).classify().symmetric);
}

#[test]
fn operator_and_componentwise_sums() {
    let a = m(2, 2, &[1, 2, 0, -1]);
    let b = m(2, 2, &[0, 1, 1, 3]);
    assert_eq!(graph(a.clone()).operator_sum(&graph(b.clone())).unwrap(), graph(&a + &b));
    let (d, l) = notmmw();
    assert_eq!(graph(Matrix::zeros(3, 3)).operator_sum(&l).unwrap(), l);
    assert_eq!(d.componentwise_sum(&d).unwrap(), d);

    // (ker L x {0}) +̂ ({0} x mul D) for the notmmw pair is span{(e3, 0), (0, e3)}
    let kl = LinearRelation::first_axis(&l.parts().ker, &pol());
    let md = LinearRelation::second_axis(&d.parts().mul, &pol());
    let s = kl.componentwise_sum(&md).unwrap();
    assert_eq!(s.dim(), 2);
    assert!(s.contains(&span(m(3, 1, &[0, 0, 1]), m(3, 1, &[0, 0, 0]))));
    assert!(s.contains(&span(m(3, 1, &[0, 0, 0]), m(3, 1, &[0, 0, 1]))));
    assert!(d.contains(&md) && l.contains(&kl));
}

#[test]
fn product_examples() {
    let (d, l) = notmmw();
    let dl = d.product(&l).unwrap();
    let shown = LinearRelation::from_stacked(
        &m(6, 4, &[1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1]),
        &pol(),
    )
    .unwrap();
    assert_eq!(dl, shown);
    assert_eq!(dl.dim(), 4);
    assert_eq!(graph(Matrix::identity(3)).product(&l).unwrap(), l);
    assert_eq!(l.product(&graph(Matrix::identity(3))).unwrap(), l);
}

#[test]
fn inverse_and_adjoint_examples() {
    let i2 = graph(Matrix::identity(2));
    assert_eq!(i2.inverse(), i2);
    let (d, _) = notmmw();
    assert_eq!(d.inverse().inverse(), d);
    let pd = m(2, 2, &[2, 1, 1, 1]);
    let pd_inv = m(2, 2, &[1, -1, -1, 2]);
    assert_eq!(graph(pd.clone()).inverse(), graph(pd_inv));

    let full = LinearRelation::<GaussQ>::full(2, &pol());
    assert_eq!(full.adjoint().dim(), 0);
    let h = Matrix::<GaussQ>::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => GaussQ::from_i64(3),
        (0, 1) => GaussQ::from_i64(1) + GaussQ::imag_unit() * GaussQ::from_i64(2),
        (1, 0) => GaussQ::from_i64(1) - GaussQ::imag_unit() * GaussQ::from_i64(2),
        _ => GaussQ::from_i64(-1),
    });
    assert_eq!(graph(h.clone()).adjoint(), graph(h));
}

#[test]
fn classify_examples() {
    let (d, l) = notmmw();
    let cd = d.classify();
    assert!(cd.skew_adjoint && cd.skew_symmetric && cd.dissipative && cd.max_dissipative);
    assert!(!cd.symmetric);
    let cl = l.classify();
    assert!(cl.self_adjoint && cl.symmetric);
    let g = graph(m(2, 2, &[1, 0, 0, 0])).classify();
    assert!(g.self_adjoint && g.max_nonnegative && g.nonnegative);
    let line = span(m(1, 1, &[1]), m(1, 1, &[0])).classify();
    assert!(line.symmetric && line.nonnegative && line.dissipative && line.skew_symmetric);
    assert!(line.max_dissipative && line.max_nonnegative && line.skew_adjoint && line.self_adjoint);
    // nonnegative does not imply dissipative
    let pos = graph(Matrix::identity(1)).classify();
    assert!(pos.nonnegative && !pos.dissipative);
    // the empty relation: non-maximal flags hold vacuously
    let z = LinearRelation::<GaussQ>::zero(2, &pol()).classify();
    assert!(z.symmetric && z.skew_symmetric && z.dissipative && z.nonnegative);
    assert!(!z.max_dissipative && !z.self_adjoint);
}

#[test]
fn as_graph_examples() {
    let w = m(2, 2, &[1, -2, 3, 0]);
    assert_eq!(graph(w.clone()).as_graph().unwrap(), Some(w));
    assert_eq!(span(m(1, 1, &[0]), m(1, 1, &[1])).as_graph().unwrap(), None);
    assert_eq!(graph(m(2, 2, &[1, 1, 1, 1])).inverse().as_graph().unwrap(), None);
    assert!(span(m(2, 1, &[1, 0]), m(2, 1, &[0, 1])).as_graph().is_err());
}

/// Random integer spanning pair `(F, G)` for a relation on `K^n`.
fn int_relation(max_n: usize) -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (1..=max_n).prop_flat_map(|n| (Just(n), 0..=2 * n + 1)).prop_flat_map(|(n, l)| {
        (Just(n), Just(l), prop::collection::vec(-2i64..=2, 2 * n * l))
    })
}

fn rel_from<T: Field>(n: usize, l: usize, v: &[i64]) -> LinearRelation<T> {
    LinearRelation::from_stacked(&Matrix::from_i64(2 * n, l, v), &pol()).unwrap()
}

fn kinds() -> impl Strategy<Value = RelationKind> {
    prop_oneof![
        Just(RelationKind::MaxDissipative),
        Just(RelationKind::MaxNonnegative),
        Just(RelationKind::Dissipative),
        Just(RelationKind::Symmetric),
        Just(RelationKind::Nonnegative),
        Just(RelationKind::SelfAdjoint),
        Just(RelationKind::SkewAdjoint),
    ]
}

fn identities<T: Field>(mrel: &LinearRelation<T>) -> std::result::Result<(), TestCaseError> {
    let n = mrel.n();
    let adj = mrel.adjoint();
    prop_assert_eq!(adj.dim(), 2 * n - mrel.dim());
    prop_assert_eq!(&adj.adjoint(), mrel);
    let lhs = adj.scalar_mul(&-T::one()).inverse();
    prop_assert_eq!(lhs, mrel.orth_complement());
    let c = mrel.classify();
    if c.dissipative || c.symmetric {
        let p = mrel.parts();
        let ctx = mrel.ctx();
        let dom_ok = T::subspace_contains(&orth_complement(&p.mul, &ctx), &p.dom, &ctx);
        let ran_ok = T::subspace_contains(&orth_complement(&p.ker, &ctx), &p.ran, &ctx);
        prop_assert!(dom_ok && ran_ok, "dom/ran containment failed for {:?}", c);
        // maximality is equivalent to dom = (mul)⊥
        let dom_eq = subspace_equal(&orth_complement(&p.mul, &ctx), &p.dom, &ctx);
        if c.dissipative {
            prop_assert_eq!(c.max_dissipative, dom_eq && mrel.dim() == n);
            prop_assert_eq!(c.max_dissipative, mrel.dim() == n);
        }
        if c.symmetric {
            prop_assert_eq!(c.self_adjoint, dom_eq);
        }
    }
    // every sub-relation keeps the non-maximal flags
    if mrel.dim() > 1 {
        let sub = mrel.select(&(1..mrel.dim()).collect::<Vec<_>>()).classify();
        prop_assert!(!c.dissipative || sub.dissipative);
        prop_assert!(!c.symmetric || sub.symmetric);
        prop_assert!(!c.nonnegative || sub.nonnegative);
        prop_assert!(!c.skew_symmetric || sub.skew_symmetric);
    }
    Ok(())
}

fn implications(c: &linrel::RelationStructure) -> bool {
    (!c.self_adjoint || c.symmetric)
        && (!c.skew_adjoint || c.skew_symmetric)
        && (!c.max_nonnegative || c.nonnegative)
        && (!c.nonnegative || c.symmetric)
        && (!c.max_dissipative || c.dissipative)
        && (!c.skew_symmetric || c.dissipative)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn identities_on_integer_relations((n, l, v) in int_relation(3)) {
        identities(&rel_from::<GaussQ>(n, l, &v))?;
        identities(&rel_from::<C64>(n, l, &v))?;
    }

    #[test]
    fn identities_on_structured_relations(kind in kinds(), n in 1usize..=4, seed in any::<u64>()) {
        let r = random_relation::<GaussQ>(kind, n, &RandomParams::default(), seed, &pol()).unwrap();
        identities(&r)?;
        prop_assert!(implications(&r.classify()));
        let f = random_relation::<C64>(kind, n + 2, &RandomParams::default(), seed, &pol()).unwrap();
        identities(&f)?;
        prop_assert!(implications(&f.classify()));
    }

    #[test]
    fn from_kernel_matches_adjoint((n, l, v) in int_relation(3)) {
        let r = rel_from::<GaussQ>(n, l, &v);
        let k = LinearRelation::from_kernel(&r.g().adjoint(), &(-&r.f().adjoint()), &pol()).unwrap();
        prop_assert_eq!(k, r.adjoint());
    }

    #[test]
    fn product_with_a_graph(
        n in 1usize..=3,
        l in 1usize..=4,
        vals in prop::collection::vec(-2i64..=2, 3 * 3 + 2 * 3 * 4),
    ) {
        let d = Matrix::<GaussQ>::from_i64(n, n, &vals[..n * n]);
        let e = Matrix::<GaussQ>::from_i64(n, l, &vals[9..9 + n * l]);
        let q = Matrix::<GaussQ>::from_i64(n, l, &vals[21..21 + n * l]);
        let prod = graph(d.clone()).product(&span(e.clone(), q.clone())).unwrap();
        prop_assert_eq!(prod, span(e, &d * &q));
    }

    #[test]
    fn sums_against_direct_constructions(
        (n, l1, v1) in int_relation(3),
        extra in prop::collection::vec(-2i64..=2, 2 * 3 * 7),
    ) {
        let a = rel_from::<GaussQ>(n, l1, &v1);
        let l2 = (extra.len() / (2 * n)).min(2 * n);
        let b = rel_from::<GaussQ>(n, l2, &extra[..2 * n * l2]);
        let ctx = Ctx::new(pol());
        // dim(a +̂ b) = dim a + dim b - dim(a ∩ b)
        let cs = a.componentwise_sum(&b).unwrap();
        prop_assert_eq!(cs.dim() + intersect(a.basis(), b.basis(), &ctx).cols(), a.dim() + b.dim());
        // operator sum through the subspace {(x, y1, x, y2)} of a ⊕ b in K^{4n}
        let z = |r, c| Matrix::<GaussQ>::zeros(r, c);
        let i = Matrix::<GaussQ>::identity(n);
        let big = Matrix::block_diag(&[a.basis(), b.basis()]);
        let diag_x = Matrix::hcat(4 * n, &[
            &Matrix::vcat(n, &[&i, &z(n, n), &i, &z(n, n)]),
            &Matrix::vcat(n, &[&z(n, n), &i, &z(n, n), &z(n, n)]),
            &Matrix::vcat(n, &[&z(n, n), &z(n, n), &z(n, n), &i]),
        ]);
        let s = intersect(&big, &diag_x, &ctx);
        let map = Matrix::vcat(4 * n, &[
            &Matrix::hcat(n, &[&i, &z(n, n), &z(n, n), &z(n, n)]),
            &Matrix::hcat(n, &[&z(n, n), &i, &z(n, n), &i]),
        ]);
        let image = &map * &s;
        let os = a.operator_sum(&b).unwrap();
        prop_assert_eq!(os.dim(), rank(&image, &pol()));
        prop_assert!(subspace_equal(os.basis(), &image, &ctx));
    }
}
