mod common;

use common::{oracle, random_int_pencil, IntPencil, QPoly};
use linrel::TolerancePolicy;
use num_bigint::BigInt;
use num_rational::BigRational;

fn qp(c: &[i64]) -> QPoly {
    QPoly(c.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
}

fn ip(rows: usize, cols: usize, e: &[i64], a: &[i64]) -> IntPencil {
    IntPencil { rows, cols, e: e.to_vec(), a: a.to_vec() }
}

#[test]
fn oracle_on_known_forms() {
    // J_2(1): invariant factors 1, (s-1)^2
    let o = oracle(&ip(2, 2, &[1, 0, 0, 1], &[1, 1, 0, 1]));
    assert_eq!(o.finite, vec![qp(&[1, -2, 1])]);
    assert!(o.alpha.is_empty() && o.beta.is_empty() && o.gamma.is_empty());
    // N_3: a single infinite block of size 3
    let o = oracle(&ip(3, 3, &[0, 1, 0, 0, 0, 1, 0, 0, 0], &[1, 0, 0, 0, 1, 0, 0, 0, 1]));
    assert_eq!(o.alpha, vec![3]);
    assert!(o.finite.is_empty());
    // L_1 = [s, -1] and its transpose
    let o = oracle(&ip(1, 2, &[1, 0], &[0, 1]));
    assert_eq!((o.beta.clone(), o.gamma.clone()), (vec![2], vec![]));
    let o = oracle(&ip(2, 1, &[1, 0], &[0, 1]));
    assert_eq!((o.beta, o.gamma), (vec![], vec![2]));
    // zero 1x1 pencil: one L_0 and one L_0^T
    let o = oracle(&ip(1, 1, &[0], &[0]));
    assert_eq!((o.beta, o.gamma), (vec![1], vec![1]));
    // diag(s, s): two blocks at 0
    let o = oracle(&ip(2, 2, &[1, 0, 0, 1], &[0, 0, 0, 0]));
    assert_eq!(o.finite, vec![qp(&[0, 1]), qp(&[0, 1])]);
}

#[test]
fn staircase_matches_smith_oracle_on_random_integer_pencils() {
    let pol = TolerancePolicy::default();
    let (mut singular, mut infinite, mut repeated, mut rows) = (0, 0, 0, 0);
    for seed in 0..200 {
        let p = random_int_pencil(seed);
        let o = oracle(&p);
        let inv = p.to_pencil().kronecker_invariants(&pol);
        singular += usize::from(!inv.is_regular());
        infinite += usize::from(!o.alpha.is_empty());
        repeated += usize::from(o.finite.len() >= 2 || inv.classes.iter().any(|c| c.blocks[0] >= 2));
        rows += usize::from(o.gamma.iter().any(|&g| g >= 2) || o.beta.iter().any(|&b| b >= 3));
        assert!(common::matches_oracle(&inv, &o), "seed {seed}: {p:?}\nstaircase {inv:?}\noracle {o:?}");
    }
    eprintln!("singular {singular}, infinite {infinite}, repeated {repeated}, large minimal indices {rows}");
    assert!(singular >= 50 && infinite >= 20 && repeated >= 5 && rows >= 5);
}
