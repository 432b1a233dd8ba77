//! Serialization and logarithm helpers for exact quantities.
//!
//! Integers are written as decimal strings and rationals as
//! `"numerator/denominator"`, so nothing passes through a float on the way
//! out. The logarithms here feed diagnostics only.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serializer;

pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ser_bigint<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn ser_rational<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(v))
}

pub fn ser_opt_rational<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&rational_string(r)),
        None => s.serialize_none(),
    }
}

pub fn ser_rationals<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational_string))
}

/// Natural log of a positive integer, accurate to f64 precision for any size.
pub fn ln_bigint(v: &BigInt) -> f64 {
    assert!(v.sign() == Sign::Plus, "logarithm of a non-positive integer");
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    let top: BigInt = v >> shift;
    top.to_f64().expect("64-bit head").ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_rational(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "logarithm of a non-positive rational");
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

/// Bit length of the larger of numerator and denominator.
pub fn rational_bits(r: &BigRational) -> u64 {
    if r.is_zero() {
        return 0;
    }
    r.numer().bits().max(r.denom().bits())
}
