use linrel::corpus::{all_examples, example};
use linrel::io::{
    example_to_json, matrix_to_json, parse_matrix, pencil_to_json, rationalize, relation_to_json, AnyMatrix, FromWire,
    PencilWire, RelationWire, WitnessWire, DEFAULT_RATIONALIZE_TOL,
};
use linrel::phclass::verify_ph;
use linrel::{Backend, Error, Field, GaussQ, LinearRelation, Matrix, TolerancePolicy, C64};
use num_rational::BigRational;
use proptest::prelude::*;
use serde_json::json;

fn pol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

#[test]
fn rationalize_examples() {
    assert_eq!(rationalize(0.5, 1e-12), Some(rat(1, 2)));
    assert_eq!(rationalize(-0.75, 1e-12), Some(rat(-3, 4)));
    assert_eq!(rationalize(1.0 / 3.0, 1e-12), Some(rat(1, 3)));
    assert_eq!(rationalize(0.0, 1e-12), Some(rat(0, 1)));
    assert_eq!(rationalize(0.1234567891234, 1e-12), None);
    assert_eq!(rationalize(std::f64::consts::SQRT_2, 1e-13), None);
    assert_eq!(rationalize(std::f64::consts::PI, 1e-2), Some(rat(22, 7)));
    assert_eq!(rationalize(f64::NAN, 1e-2), None);
}

#[test]
fn matrix_schema() {
    let m = parse_matrix(&json!({"rows": 1, "cols": 2, "data": ["1/2", [0, "-3"]]})).unwrap();
    assert_eq!(m.backend(), Backend::Exact);
    let AnyMatrix::Exact(x) = &m else { panic!() };
    assert_eq!(x[(0, 0)], GaussQ::from_ratio(1, 2));
    assert_eq!(x[(0, 1)], GaussQ::imag_unit() * GaussQ::from_i64(-3));

    let f = parse_matrix(&json!({"rows": 2, "cols": 1, "field": "real", "data": [1.5, -2]})).unwrap();
    assert_eq!(f.backend(), Backend::Float);
    assert_eq!(f.shape(), (2, 1));

    let forced = parse_matrix(&json!({"rows": 1, "cols": 1, "backend": "exact", "data": [0.25]})).unwrap();
    let AnyMatrix::Exact(x) = forced else { panic!() };
    assert_eq!(x[(0, 0)], GaussQ::from_ratio(1, 4));

    let bad = [
        json!([1, 2]),
        json!({"rows": 1, "cols": 2, "data": [1]}),
        json!({"rows": 1, "cols": 1, "field": "real", "data": [[1, 2]]}),
        json!({"rows": 1, "cols": 1, "field": "quaternion", "data": [1]}),
        json!({"rows": 1, "cols": 1, "data": [[1, 2, 3]]}),
        json!({"rows": 1, "cols": 1, "backend": "gpu", "data": [1]}),
        json!({"rows": 1, "cols": 1, "data": ["x/y"]}),
        json!({"cols": 1, "data": [1]}),
    ];
    for b in bad {
        let e = parse_matrix(&b).unwrap_err();
        assert!(matches!(e, Error::Schema(_)), "{b}: {e:?}");
        assert_eq!(e.exit_code(), 1);
    }
    let pi = parse_matrix(&json!({"rows": 1, "cols": 1, "backend": "exact", "data": [0.1234567891234]}));
    assert!(matches!(pi, Err(Error::NonRational(_))));
}

#[test]
fn non_rational_floats_refuse_the_exact_backend() {
    let m = parse_matrix(&json!({"rows": 1, "cols": 1, "data": [0.1234567891234]})).unwrap();
    let e = GaussQ::from_wire(&m, DEFAULT_RATIONALIZE_TOL).unwrap_err();
    assert!(matches!(e, Error::NonRational(_)));
    assert_eq!(e.exit_code(), 3);
    // a loose tolerance accepts it
    assert!(GaussQ::from_wire(&m, 1e-3).is_ok());
}

#[test]
fn relation_schema() {
    let g = RelationWire::parse(&json!({
        "n": 2,
        "F": {"rows": 2, "cols": 2, "data": ["1", "0", "0", "1"]},
        "G": {"rows": 2, "cols": 2, "data": ["0", "-1", "1", "0"]},
    }))
    .unwrap();
    let r: LinearRelation<GaussQ> = g.build(&pol(), DEFAULT_RATIONALIZE_TOL).unwrap();
    assert!(r.classify().skew_adjoint);
    let k = RelationWire::parse(&json!({"kernel": {
        "K": {"rows": 1, "cols": 1, "data": ["1"]},
        "L": {"rows": 1, "cols": 1, "data": ["-1"]},
    }}))
    .unwrap();
    let r: LinearRelation<GaussQ> = k.build(&pol(), DEFAULT_RATIONALIZE_TOL).unwrap();
    assert_eq!(r, LinearRelation::graph(&Matrix::identity(1), &pol()).unwrap());
    let wrong_n = RelationWire::parse(&json!({
        "n": 3,
        "F": {"rows": 2, "cols": 1, "data": [1, 0]},
        "G": {"rows": 2, "cols": 1, "data": [0, 1]},
    }));
    assert!(matches!(wrong_n, Err(Error::Shape(_))));
    assert!(matches!(RelationWire::parse(&json!({"F": 1})), Err(Error::Schema(_))));
}

#[test]
fn witness_schema() {
    assert!(matches!(WitnessWire::parse(&json!({"variant": "other"})), Err(Error::Schema(_))));
    assert!(matches!(WitnessWire::parse(&json!({"variant": "mmw", "D": {"rows": 0, "cols": 0, "data": []}})), Err(Error::Schema(_))));
}

#[test]
fn examples_round_trip() {
    for ex in all_examples() {
        let v = example_to_json(&ex);
        let text = serde_json::to_string(&v).unwrap();
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        let p = PencilWire::parse(&back).unwrap();
        assert_eq!(p.e.backend(), Backend::Exact);
        let pencil = p.build::<GaussQ>(DEFAULT_RATIONALIZE_TOL).unwrap();
        assert_eq!((pencil.e.clone(), pencil.a.clone()), (ex.pencil.e.clone(), ex.pencil.a.clone()), "{}", ex.id);
        for w in back["witnesses"].as_array().unwrap() {
            let w = WitnessWire::parse(w).unwrap().build::<GaussQ>(&pol(), DEFAULT_RATIONALIZE_TOL).unwrap();
            assert!(verify_ph(&pencil, &w, &pol()).unwrap().ok, "{}", ex.id);
        }
    }
}

#[test]
fn output_is_deterministic() {
    let ex = example("six_index3", None).unwrap();
    let a = serde_json::to_string(&example_to_json(&ex)).unwrap();
    let b = serde_json::to_string(&example_to_json(&example("six_index3", None).unwrap())).unwrap();
    assert_eq!(a, b);
    let z = Matrix::<C64>::from_vec(1, 1, vec![C64::new(-0.0, 0.0)]);
    assert_eq!(matrix_to_json(&z)["data"], json!([0.0]));
}

#[test]
fn relation_json_round_trip() {
    let h = Matrix::<GaussQ>::from_i64(2, 2, &[2, 1, 1, 0]);
    let r = LinearRelation::graph(&h, &pol()).unwrap().inverse();
    let w = RelationWire::parse(&relation_to_json(&r)).unwrap();
    assert_eq!(w.build::<GaussQ>(&pol(), DEFAULT_RATIONALIZE_TOL).unwrap(), r);
    assert_eq!(w.build::<C64>(&pol(), DEFAULT_RATIONALIZE_TOL).unwrap(), r.to_c64());
}

proptest! {
    #[test]
    fn exact_matrices_round_trip(
        rows in 1usize..=4,
        cols in 1usize..=4,
        v in prop::collection::vec((-50i64..=50, 1i64..=9, -50i64..=50, 1i64..=9), 16),
    ) {
        let m = Matrix::<GaussQ>::from_fn(rows, cols, |i, j| {
            let (a, b, c, d) = v[i * cols + j];
            GaussQ::from_ratio(a, b) + GaussQ::imag_unit() * GaussQ::from_ratio(c, d)
        });
        let AnyMatrix::Exact(back) = parse_matrix(&matrix_to_json(&m)).unwrap() else {
            return Err(TestCaseError::fail("exact matrix came back as float"));
        };
        prop_assert_eq!(back, m);
    }

    #[test]
    fn float_matrices_round_trip(
        rows in 1usize..=4,
        cols in 1usize..=4,
        v in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 16),
    ) {
        let m = Matrix::<C64>::from_fn(rows, cols, |i, j| C64::new(v[i * cols + j].0, v[i * cols + j].1));
        let text = serde_json::to_string(&matrix_to_json(&m)).unwrap();
        let AnyMatrix::Float(back) = parse_matrix(&serde_json::from_str(&text).unwrap()).unwrap() else {
            return Err(TestCaseError::fail("float matrix came back as exact"));
        };
        prop_assert_eq!(back, m);
    }

    #[test]
    fn dyadic_rationals_are_recovered(p in -1000i64..=1000, k in 0u32..=10) {
        let q = 1i64 << k;
        prop_assert_eq!(rationalize(p as f64 / q as f64, 1e-12), Some(rat(p, q)));
    }
}

#[test]
fn pencil_json_keys() {
    let ex = example("ex1", None).unwrap();
    let v = pencil_to_json(&ex.pencil);
    assert_eq!(v["E"]["rows"], 2);
    assert_eq!(v["E"]["cols"], 1);
    assert_eq!(v["E"]["backend"], "exact");
    assert_eq!(v["A"]["data"], json!(["0", "1"]));
}
