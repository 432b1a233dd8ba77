use cfw_core::contfrac::{ConvergentTable, Decision};
use cfw_core::criteria::{detect_chain, SearchKind};
use cfw_core::witness::{estimate_delta, exponent_fit, exponent_fit_values, verify, verify_mirror};
use cfw_core::{Dfao, FiniteWord, VerifyOptions, Witness, WitnessKind};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn word(v: Vec<u64>) -> FiniteWord {
    FiniteWord::new(v).unwrap()
}

#[test]
fn thue_morse_chain_passes_every_exact_bound() {
    let tm = Dfao::thue_morse();
    let chain = detect_chain(&tm, SearchKind::Either, 512, &r(16, 1)).unwrap();
    let records: Vec<_> = chain
        .witnesses
        .iter()
        .map(|w| verify(&tm, w, &VerifyOptions::default()).unwrap())
        .collect();
    for rec in &records {
        for b in &rec.bounds {
            assert_eq!(b.decision, Decision::Pass, "{} on {:?}", b.id, rec.witness.lengths());
        }
    }
    assert!(exponent_fit(&records).unwrap() > 0.0);
}

#[test]
fn mirror_witness_quantities_match_direct_computation() {
    let tm = Dfao::thue_morse();
    let prefix = tm.prefix(64);
    let w = Witness::from_lengths(WitnessKind::Mirror, &prefix, 0, 7, 0).unwrap();
    let rec = verify_mirror(&tm, &w, 16).unwrap();
    // P/Q = [0; W U V mirror(U) mirror(W)]
    let z = w.w.concat(&w.u).concat(&w.v).concat(&w.u.mirror()).concat(&w.w.mirror());
    let t = ConvergentTable::new(&z);
    let n = z.len() as i64;
    let get = |name: &str| rec.quantities.iter().find(|q| q.name == name).unwrap().value.clone();
    assert_eq!(get("P"), *t.p(n));
    assert_eq!(get("Q"), *t.q(n));
    assert_eq!(get("P'"), *t.p(n - 1));
    assert_eq!(get("Q'"), *t.q(n - 1));
    // Z is a palindrome, so Q' = P and the symmetric forms are evaluated
    assert!(rec.extra_forms.is_some());
}

#[test]
fn corrupted_witness_is_rejected() {
    let tm = Dfao::thue_morse();
    let w = Witness::new(WitnessKind::Repeat, word(vec![]), word(vec![1, 2, 2]), word(vec![]));
    assert!(verify(&tm, &w, &VerifyOptions::default()).is_err());
}

#[test]
fn delta_for_all_ones() {
    let est = estimate_delta(&word(vec![1; 40])).unwrap();
    assert!(est.m_hat > r(26, 10) && est.m_hat < r(27, 10));
    assert!(est.delta_hat_f64 > 0.0);
    assert!(estimate_delta(&word(vec![1, 1, 1])).unwrap().delta_hat_f64 > 0.0);
}

#[test]
fn delta_respects_letter_bound() {
    for b in 1..=9u64 {
        let a: Vec<u64> = (0..60).map(|i| 1 + (i * 7 + 3) % b).collect();
        let est = estimate_delta(&word(a)).unwrap();
        assert!(est.m_hat <= BigRational::from_integer(BigInt::from(b + 2)));
    }
}

#[test]
fn exponent_fit_two_points() {
    let y = BigInt::from(1000);
    let pairs = vec![
        (BigRational::new(1.into(), y.pow(2)), y.clone()),
        (BigRational::new(1.into(), y.pow(4)), y.pow(2)),
    ];
    let eps = exponent_fit_values(&pairs).unwrap();
    assert!((eps - 2.0).abs() < 1e-9);
    assert!(exponent_fit_values(&pairs[..1]).is_err());
}

#[test]
fn deeper_guard_never_flips_a_decision() {
    let pd = Dfao::period_doubling();
    let chain = detect_chain(&pd, SearchKind::Either, 256, &r(16, 1)).unwrap();
    for w in &chain.witnesses {
        for g in [1usize, 2, 4, 8] {
            let shallow = verify(&pd, w, &VerifyOptions { guard_depth: g, bit_limit: None }).unwrap();
            let deep = verify(&pd, w, &VerifyOptions { guard_depth: 2 * g, bit_limit: None }).unwrap();
            for (a, b) in shallow.bounds.iter().zip(&deep.bounds) {
                if a.decision != Decision::Indeterminate {
                    assert_eq!(a.decision, b.decision, "{} at guard {g}", a.id);
                }
            }
        }
    }
}

#[test]
fn repeat_height_matches_coefficients() {
    let tm = Dfao::thue_morse();
    let prefix = tm.prefix(64);
    let w = Witness::from_lengths(WitnessKind::Repeat, &prefix, 3, 4, 0).unwrap();
    let rec = verify(&tm, &w, &VerifyOptions::default()).unwrap();
    let get = |name: &str| rec.quantities.iter().find(|q| q.name == name).unwrap().value.clone();
    let h = get("A").abs().max(get("B").abs()).max(get("C").abs());
    assert_eq!(get("height"), h);
    assert!(h.to_f64().unwrap() > 0.0);
}
