use cfw_core::contfrac::{
    check_approx_bound, check_growth_bound, last_convergent, mirror_formula, periodic_value,
    ConvergentTable,
};
use cfw_core::FiniteWord;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

// Backward evaluation of [0; a_1, ..., a_n], independent of the convergent table.
fn backward(a: &[u64]) -> BigRational {
    let mut x = BigRational::zero();
    for &d in a.iter().rev() {
        x = (BigRational::from_integer(BigInt::from(d)) + x).recip();
    }
    x
}

fn word(v: Vec<u64>) -> FiniteWord {
    FiniteWord::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn convergents_match_backward_evaluation(a in prop::collection::vec(1u64..1000, 1..30)) {
        let t = ConvergentTable::new(&word(a.clone()));
        for l in 1..=a.len() {
            let v = BigRational::new(t.p(l as i64).clone(), t.q(l as i64).clone());
            prop_assert_eq!(v, backward(&a[..l]));
        }
    }

    #[test]
    fn determinant_is_unit(a in prop::collection::vec(1u64..1_000_000, 1..50)) {
        let t = ConvergentTable::new(&word(a.clone()));
        for l in 0..=a.len() as i64 {
            let d = t.p(l - 1) * t.q(l) - t.p(l) * t.q(l - 1);
            prop_assert_eq!(d.abs(), BigInt::one());
        }
    }

    #[test]
    fn mirror_formula_holds(a in prop::collection::vec(1u64..1_000_000, 1..50)) {
        let w = word(a.clone());
        for l in 1..=a.len() {
            prop_assert!(mirror_formula(&w, l).unwrap());
            let t = ConvergentTable::new(&w);
            let rev: Vec<u64> = a[..l].iter().rev().copied().collect();
            prop_assert_eq!(
                BigRational::new(t.q(l as i64 - 1).clone(), t.q(l as i64).clone()),
                backward(&rev)
            );
        }
    }

    #[test]
    fn classical_bounds(a in prop::collection::vec(1u64..50, 4..40)) {
        let w = word(a.clone());
        for l in 1..a.len() - 2 {
            let b = check_approx_bound(&w, l).unwrap();
            prop_assert!(b.holds);
            prop_assert!(b.margin.is_positive());
        }
        for l in 1..a.len() {
            for h in 1..=a.len() - l {
                prop_assert!(check_growth_bound(&w, l, h).unwrap());
            }
        }
    }

    #[test]
    fn quadratic_root_in_long_truncation(
        pre in prop::collection::vec(1u64..=5, 0..=6),
        per in prop::collection::vec(1u64..=5, 1..=6),
    ) {
        let qa = periodic_value(&word(pre), &word(per)).unwrap();
        let deep = qa.enclosure(200).unwrap();
        prop_assert!(qa.eval(&deep).contains_zero());
        prop_assert!(deep.intersect(qa.root()).is_some());
        prop_assert!(qa.height_bound_holds());
        prop_assert!(qa.discriminant().is_positive());
    }
}

#[test]
fn last_convergent_of_palindrome_is_symmetric() {
    // for a palindrome, q_{n-1} = p_n
    let w = word(vec![3, 1, 4, 1, 3]);
    let t = ConvergentTable::new(&w);
    let (_, q1) = last_convergent(&w).unwrap();
    assert_eq!(&q1, t.p(5));
}

#[test]
fn approx_bound_at_edge_is_indeterminate() {
    let w = word(vec![1; 10]);
    assert!(check_approx_bound(&w, 8).is_err());
    assert!(check_approx_bound(&w, 0).is_err());
}

#[test]
fn bit_limit_is_enforced() {
    let w = word(vec![1_000_000; 40]);
    assert!(ConvergentTable::with_bit_limit(&w, Some(64)).is_err());
    assert!(ConvergentTable::with_bit_limit(&w, Some(4096)).is_ok());
}

#[test]
fn sqrt2_minus_one_approximant() {
    // [0; 2, 2, 2, ...] = sqrt(2) - 1, a root of X^2 + 2X - 1
    let qa = periodic_value(&FiniteWord::empty(), &word(vec![2])).unwrap();
    let x = qa.root();
    let sq = x.square();
    let two_x = x.scale_int(&BigInt::from(2));
    let f = sq.add(&two_x).shift(&-BigRational::one());
    assert!(f.contains_zero());
    let lo = BigRational::new(BigInt::from(41421356), BigInt::from(100000000));
    let hi = BigRational::new(BigInt::from(41421357), BigInt::from(100000000));
    assert!(qa.enclosure(60).unwrap().is_subset_of(&cfw_core::RationalInterval::new(lo, hi)));
}
