use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::exact::rational_string;

/// Outcome of a rigorously evaluated inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Pass,
    Fail,
    Indeterminate,
}

impl Decision {
    pub fn is_decided(self) -> bool {
        self != Decision::Indeterminate
    }

    fn from_bool(b: bool) -> Self {
        if b {
            Decision::Pass
        } else {
            Decision::Fail
        }
    }
}

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RationalInterval {
    /// Interval spanned by two endpoints given in either order.
    pub fn new(a: BigRational, b: BigRational) -> Self {
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn point(x: BigRational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_integer(x: &BigInt) -> Self {
        Self::point(BigRational::from_integer(x.clone()))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `Some(sign)` when the interval excludes zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    pub fn is_subset_of(&self, other: &RationalInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersect(&self, other: &RationalInterval) -> Option<RationalInterval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(RationalInterval { lo, hi })
    }

    pub fn add(&self, other: &RationalInterval) -> RationalInterval {
        RationalInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &RationalInterval) -> RationalInterval {
        RationalInterval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> RationalInterval {
        RationalInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn mul(&self, other: &RationalInterval) -> RationalInterval {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().expect("four products").clone();
        let hi = products.iter().max().expect("four products").clone();
        RationalInterval { lo, hi }
    }

    pub fn scale(&self, k: &BigRational) -> RationalInterval {
        RationalInterval::new(&self.lo * k, &self.hi * k)
    }

    pub fn scale_int(&self, k: &BigInt) -> RationalInterval {
        self.scale(&BigRational::from_integer(k.clone()))
    }

    pub fn shift(&self, k: &BigRational) -> RationalInterval {
        RationalInterval {
            lo: &self.lo + k,
            hi: &self.hi + k,
        }
    }

    /// `k * x - c` for `x` in the interval, with integer `k`, `c`.
    pub fn affine_int(&self, k: &BigInt, c: &BigInt) -> RationalInterval {
        self.scale_int(k)
            .shift(&BigRational::from_integer(-c.clone()))
    }

    pub fn abs(&self) -> RationalInterval {
        match self.sign() {
            Some(Ordering::Greater) => self.clone(),
            Some(Ordering::Less) => self.neg(),
            _ => RationalInterval {
                lo: BigRational::zero(),
                hi: (-&self.lo).max(self.hi.clone()),
            },
        }
    }

    pub fn sup_abs(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn inf_abs(&self) -> BigRational {
        self.abs().lo
    }

    pub fn square(&self) -> RationalInterval {
        let a = self.abs();
        RationalInterval {
            lo: &a.lo * &a.lo,
            hi: &a.hi * &a.hi,
        }
    }

    /// Enclosure of `a x^2 + b x + c` over the interval, in centred form so
    /// that the width scales with the derivative rather than the
    /// coefficient size.
    pub fn eval_quadratic(&self, a: &BigInt, b: &BigInt, c: &BigInt) -> RationalInterval {
        let a = BigRational::from_integer(a.clone());
        let b = BigRational::from_integer(b.clone());
        let c = BigRational::from_integer(c.clone());
        let m = self.midpoint();
        let value_at_m = &a * &m * &m + &b * &m + &c;
        let slope_at_m = BigRational::from_integer(BigInt::from(2)) * &a * &m + &b;
        let d = self.shift(&-m);
        let inner = d.scale(&a).shift(&slope_at_m);
        d.mul(&inner).shift(&value_at_m)
    }

    /// `x <= rhs` for every `x` in the interval?
    pub fn le(&self, rhs: &BigRational) -> Decision {
        if &self.hi <= rhs {
            Decision::Pass
        } else if &self.lo > rhs {
            Decision::Fail
        } else {
            Decision::Indeterminate
        }
    }

    /// `x < rhs` for every `x` in the interval?
    pub fn lt(&self, rhs: &BigRational) -> Decision {
        if &self.hi < rhs {
            Decision::Pass
        } else if &self.lo >= rhs {
            Decision::Fail
        } else {
            Decision::Indeterminate
        }
    }

    /// Decision for a comparison of two exact values.
    pub fn exact_le(lhs: &BigRational, rhs: &BigRational) -> Decision {
        Decision::from_bool(lhs <= rhs)
    }
}

impl fmt::Debug for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Serialize for RationalInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RationalInterval", 2)?;
        st.serialize_field("lo", &rational_string(&self.lo))?;
        st.serialize_field("hi", &rational_string(&self.hi))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ordering_and_width() {
        let i = RationalInterval::new(r(1, 2), r(2, 5));
        assert_eq!(i.lo(), &r(2, 5));
        assert_eq!(i.width(), r(1, 10));
        assert!(i.contains(&r(9, 20)));
    }

    #[test]
    fn decisions() {
        let i = RationalInterval::new(r(1, 3), r(1, 2));
        assert_eq!(i.le(&r(1, 2)), Decision::Pass);
        assert_eq!(i.lt(&r(1, 2)), Decision::Indeterminate);
        assert_eq!(i.lt(&r(1, 3)), Decision::Fail);
        assert_eq!(i.le(&r(2, 5)), Decision::Indeterminate);
        assert_eq!(i.le(&r(1, 4)), Decision::Fail);
    }

    #[test]
    fn abs_straddling_zero() {
        let i = RationalInterval::new(r(-3, 1), r(1, 1));
        assert_eq!(i.abs(), RationalInterval::new(r(0, 1), r(3, 1)));
        assert_eq!(i.square(), RationalInterval::new(r(0, 1), r(9, 1)));
        assert_eq!(i.inf_abs(), r(0, 1));
    }

    proptest! {
        #[test]
        fn quadratic_enclosure_contains_samples(
            a in -50i64..50, b in -50i64..50, c in -50i64..50,
            lo in -100i64..100, w in 0i64..50, t in 0i64..=10,
        ) {
            let iv = RationalInterval::new(r(lo, 7), r(lo + w, 7));
            let x = r(lo * 10 + w * t, 70);
            prop_assert!(iv.contains(&x));
            let exact = r(a, 1) * &x * &x + r(b, 1) * &x + r(c, 1);
            let enc = iv.eval_quadratic(&a.into(), &b.into(), &c.into());
            prop_assert!(enc.contains(&exact));
        }

        #[test]
        fn product_encloses_products(
            a in -20i64..20, aw in 0i64..10, b in -20i64..20, bw in 0i64..10,
            s in 0i64..=4, t in 0i64..=4,
        ) {
            let x = RationalInterval::new(r(a, 1), r(a + aw, 1));
            let y = RationalInterval::new(r(b, 1), r(b + bw, 1));
            let px = r(4 * a + s * aw, 4);
            let py = r(4 * b + t * bw, 4);
            prop_assert!(x.mul(&y).contains(&(&px * &py)));
            prop_assert!(x.sub(&y).contains(&(&px - &py)));
        }
    }
}
