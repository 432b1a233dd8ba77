//! Exact continued-fraction engine.
//!
//! Convergents follow the usual seeding `p_{-1} = q_0 = 1`,
//! `q_{-1} = p_0 = 0` and the recurrence `x_l = a_l x_{l-1} + x_{l-2}`.
//! Real numbers are never represented as floats: a number known only
//! through a prefix of its expansion is handled as the closed interval
//! between its last two convergents.

mod interval;
mod quadratic;

pub use interval::{Decision, RationalInterval};
pub use quadratic::{periodic_value, QuadraticApproximant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact;
use crate::words::FiniteWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContFracError {
    #[error("index {index} outside the valid range {min}..={max}")]
    IndexOutOfRange { index: i64, min: i64, max: i64 },
    #[error("enclosure too wide to decide: {0}")]
    Indeterminate(String),
    #[error("period must be non-empty")]
    EmptyPeriod,
    #[error("word of length {len} is too short, need at least {min}")]
    WordTooShort { len: usize, min: usize },
    #[error("quadratic polynomial degenerated (leading coefficient zero)")]
    DegeneratePolynomial,
    #[error("could not isolate the approximant root within {0} terms")]
    RootIsolation(usize),
    #[error("integer of {bits} bits exceeds the configured cap of {limit} bits")]
    BitLimit { bits: u64, limit: u64 },
}

/// One convergent `p_l / q_l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub index: i64,
    #[serde(serialize_with = "exact::ser_bigint")]
    pub p: BigInt,
    #[serde(serialize_with = "exact::ser_bigint")]
    pub q: BigInt,
}

/// `p_l` and `q_l` for `l = -1 ..= |a|`.
#[derive(Debug, Clone)]
pub struct ConvergentTable {
    p: Vec<BigInt>,
    q: Vec<BigInt>,
}

impl ConvergentTable {
    pub fn new(a: &FiniteWord) -> Self {
        Self::with_bit_limit(a, None).expect("no limit")
    }

    /// Fails as soon as some `q_l` needs more than `limit` bits.
    pub fn with_bit_limit(a: &FiniteWord, limit: Option<u64>) -> Result<Self, ContFracError> {
        let n = a.len();
        let mut p = Vec::with_capacity(n + 2);
        let mut q = Vec::with_capacity(n + 2);
        p.push(BigInt::one());
        q.push(BigInt::zero());
        p.push(BigInt::zero());
        q.push(BigInt::one());
        for (i, &letter) in a.letters().iter().enumerate() {
            let a_l = BigInt::from(letter);
            let next_p = &a_l * &p[i + 1] + &p[i];
            let next_q = &a_l * &q[i + 1] + &q[i];
            if let Some(limit) = limit {
                if next_q.bits() > limit {
                    return Err(ContFracError::BitLimit {
                        bits: next_q.bits(),
                        limit,
                    });
                }
            }
            p.push(next_p);
            q.push(next_q);
        }
        Ok(Self { p, q })
    }

    /// Number of partial quotients the table was built from.
    pub fn len(&self) -> usize {
        self.p.len() - 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn slot(&self, ell: i64) -> usize {
        assert!(
            ell >= -1 && ell <= self.len() as i64,
            "convergent index {ell} outside -1..={}",
            self.len()
        );
        (ell + 1) as usize
    }

    pub fn p(&self, ell: i64) -> &BigInt {
        &self.p[self.slot(ell)]
    }

    pub fn q(&self, ell: i64) -> &BigInt {
        &self.q[self.slot(ell)]
    }

    pub fn convergent(&self, ell: i64) -> Convergent {
        Convergent {
            index: ell,
            p: self.p(ell).clone(),
            q: self.q(ell).clone(),
        }
    }

    /// `p_l / q_l`, for `l >= 0`.
    pub fn value(&self, ell: i64) -> BigRational {
        assert!(ell >= 0, "p_-1/q_-1 is not a number");
        BigRational::new(self.p(ell).clone(), self.q(ell).clone())
    }

    pub fn to_vec(&self) -> Vec<Convergent> {
        (-1..=self.len() as i64).map(|l| self.convergent(l)).collect()
    }

    /// Closed interval between `p_d/q_d` and `p_{d+1}/q_{d+1}`.
    pub fn enclosure(&self, depth: usize) -> Result<RationalInterval, ContFracError> {
        if depth + 1 > self.len() {
            return Err(ContFracError::IndexOutOfRange {
                index: depth as i64,
                min: 0,
                max: self.len() as i64 - 1,
            });
        }
        Ok(RationalInterval::new(
            self.value(depth as i64),
            self.value(depth as i64 + 1),
        ))
    }

    /// Enclosure from the two deepest convergents.
    pub fn deepest_enclosure(&self) -> Result<RationalInterval, ContFracError> {
        if self.is_empty() {
            return Err(ContFracError::WordTooShort { len: 0, min: 1 });
        }
        self.enclosure(self.len() - 1)
    }
}

/// `(p_l, q_l)` for `l = -1 ..= |a|`.
pub fn convergents(a: &FiniteWord) -> Vec<Convergent> {
    ConvergentTable::new(a).to_vec()
}

/// Value of the finite expansion `[0; a_1, ..., a_n]`, evaluated from the
/// innermost quotient outwards. The empty expansion is 0.
pub fn finite_value(a: &[u64]) -> BigRational {
    let (num, den) = finite_fraction(a);
    BigRational::new(num, den)
}

// Unreduced numerator and denominator of [0; a_1, ..., a_n].
fn finite_fraction(a: &[u64]) -> (BigInt, BigInt) {
    // running value is num/den of [0; a_i, ..., a_n]
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for &letter in a.iter().rev() {
        let next_den = BigInt::from(letter) * &den + &num;
        num = std::mem::replace(&mut den, next_den);
    }
    (num, den)
}

/// Any real whose expansion begins with `a` lies in the returned interval.
pub fn enclose_value(a: &FiniteWord, depth: usize) -> Result<RationalInterval, ContFracError> {
    ConvergentTable::new(a).enclosure(depth)
}

/// Result of the best-approximation check `|q_l x - p_l| < 1/q_{l+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApproxBound {
    pub holds: bool,
    /// `1/q_{l+1}` minus the supremum of `|q_l x - p_l|` over the enclosure.
    #[serde(serialize_with = "exact::ser_rational")]
    pub margin: BigRational,
}

/// Checks `|q_l alpha - p_l| < 1/q_{l+1}` for every `alpha` whose expansion
/// begins with `a`, using the enclosure from the last two convergents.
pub fn check_approx_bound(a: &FiniteWord, ell: usize) -> Result<ApproxBound, ContFracError> {
    let table = ConvergentTable::new(a);
    check_approx_bound_with(&table, ell)
}

pub fn check_approx_bound_with(
    table: &ConvergentTable,
    ell: usize,
) -> Result<ApproxBound, ContFracError> {
    let len = table.len();
    if ell < 1 || ell + 2 > len {
        return Err(ContFracError::IndexOutOfRange {
            index: ell as i64,
            min: 1,
            max: len as i64 - 2,
        });
    }
    let l = ell as i64;
    // |q_l x - p_l| is linear in x, so its extremes over the enclosure sit
    // at the endpoints p_j/q_j, where it equals |q_l p_j - p_l q_j| / q_j.
    let q_next = table.q(l + 1);
    let ends: Vec<(BigInt, &BigInt)> = [len as i64 - 1, len as i64]
        .into_iter()
        .map(|j| (table.q(l) * table.p(j) - table.p(l) * table.q(j), table.q(j)))
        .collect();
    let (d_a, q_a) = (&ends[0].0, ends[0].1);
    let (d_b, q_b) = (&ends[1].0, ends[1].1);
    let a_is_sup = d_a.abs() * q_b >= d_b.abs() * q_a;
    let (sup, inf) = if a_is_sup { (&ends[0], &ends[1]) } else { (&ends[1], &ends[0]) };
    let margin = BigRational::new(sup.1 - sup.0.abs() * q_next, q_next * sup.1);
    if margin.is_positive() {
        return Ok(ApproxBound {
            holds: true,
            margin,
        });
    }
    let straddles = d_a.is_zero() || d_b.is_zero() || d_a.is_positive() != d_b.is_positive();
    if !straddles && inf.0.abs() * q_next >= *inf.1 {
        Ok(ApproxBound {
            holds: false,
            margin,
        })
    } else {
        Err(ContFracError::Indeterminate(format!(
            "|q_{ell} x - p_{ell}| vs 1/q_{}: enclosure from depth {} is too wide",
            ell + 1,
            len
        )))
    }
}

/// `q_{l+h} >= q_l * sqrt(2)^(h-1)`, compared in the squared form
/// `q_{l+h}^2 >= q_l^2 * 2^(h-1)`.
pub fn check_growth_bound(a: &FiniteWord, ell: usize, h: usize) -> Result<bool, ContFracError> {
    let table = ConvergentTable::new(a);
    check_growth_bound_with(&table, ell, h)
}

pub fn check_growth_bound_with(
    table: &ConvergentTable,
    ell: usize,
    h: usize,
) -> Result<bool, ContFracError> {
    if ell < 1 || h < 1 || ell + h > table.len() {
        return Err(ContFracError::IndexOutOfRange {
            index: (ell + h) as i64,
            min: 2,
            max: table.len() as i64,
        });
    }
    let (hi, lo) = (table.q((ell + h) as i64), table.q(ell as i64));
    // q_{l+h}^2 >= 2^(2 b1 - 2) and q_l^2 2^(h-1) < 2^(2 b0 + h - 1)
    if 2 * hi.bits() > 2 * lo.bits() + h as u64 {
        return Ok(true);
    }
    Ok(hi.pow(2) >= lo.pow(2) << (h - 1))
}

/// `q_{l-1} / q_l == [0; a_l, a_{l-1}, ..., a_1]`, exactly.
pub fn mirror_formula(a: &FiniteWord, ell: usize) -> Result<bool, ContFracError> {
    mirror_formula_with(&ConvergentTable::new(a), a, ell)
}

/// Same check against a table built from `a` (or any extension of it).
pub fn mirror_formula_with(
    table: &ConvergentTable,
    a: &FiniteWord,
    ell: usize,
) -> Result<bool, ContFracError> {
    if ell < 1 || ell > a.len().min(table.len()) {
        return Err(ContFracError::IndexOutOfRange {
            index: ell as i64,
            min: 1,
            max: a.len().min(table.len()) as i64,
        });
    }
    let l = ell as i64;
    let reversed: Vec<u64> = a.letters()[..ell].iter().rev().copied().collect();
    let (num, den) = finite_fraction(&reversed);
    Ok(table.q(l - 1) * den == table.q(l) * num)
}

/// `(p_{L-1}, q_{L-1})` for `L = |a|`: the last convergent of `[0; a]`
/// different from the value itself.
pub fn last_convergent(a: &FiniteWord) -> Result<(BigInt, BigInt), ContFracError> {
    if a.len() < 2 {
        return Err(ContFracError::WordTooShort {
            len: a.len(),
            min: 2,
        });
    }
    let table = ConvergentTable::new(a);
    let l = a.len() as i64 - 1;
    Ok((table.p(l).clone(), table.q(l).clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word;
    use num_integer::Integer;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// 1/(a1 + 1/(a2 + ...)) with ordinary rational arithmetic.
    fn nested(a: &[u64]) -> BigRational {
        let mut acc: Option<BigRational> = None;
        for &x in a.iter().rev() {
            let base = BigRational::from_integer(x.into());
            let denom = match acc {
                None => base,
                Some(v) => base + v,
            };
            acc = Some(denom.recip());
        }
        acc.unwrap_or_else(BigRational::zero)
    }

    #[test]
    fn small_table() {
        let c = convergents(&word![1, 2, 3]);
        let q: Vec<i64> = c.iter().map(|c| i64::try_from(&c.q).unwrap()).collect();
        let p: Vec<i64> = c.iter().map(|c| i64::try_from(&c.p).unwrap()).collect();
        assert_eq!(q, vec![0, 1, 1, 3, 10]);
        assert_eq!(p, vec![1, 0, 1, 2, 7]);
        assert_eq!(c[0].index, -1);
        assert_eq!(nested(&[1, 2, 3]), r(7, 10));
        assert_eq!(ConvergentTable::new(&word![1, 2, 3]).value(3), r(7, 10));
    }

    #[test]
    fn single_quotient() {
        let t = ConvergentTable::new(&word![1]);
        assert_eq!(t.value(1), r(1, 1));
    }

    #[test]
    fn all_ones_give_fibonacci() {
        let t = ConvergentTable::new(&word![1, 1, 1, 1, 1]);
        let q: Vec<i64> = (0..=5).map(|l| i64::try_from(t.q(l)).unwrap()).collect();
        assert_eq!(q, vec![1, 1, 2, 3, 5, 8]);
    }

    #[test]
    fn finite_value_matches_nested() {
        for a in [vec![1u64], vec![2, 2], vec![3, 1, 4, 1, 5, 9, 2, 6], vec![1_000_000, 1, 7]] {
            assert_eq!(finite_value(&a), nested(&a));
        }
        assert_eq!(finite_value(&[]), BigRational::zero());
    }

    #[test]
    fn enclosure_examples() {
        let i = enclose_value(&word![2, 2], 1).unwrap();
        assert_eq!(i, RationalInterval::new(r(2, 5), r(1, 2)));
        assert!(enclose_value(&word![2, 2], 2).is_err());
    }

    #[test]
    fn golden_enclosure() {
        let ones = word![1].repeat(20);
        let i = enclose_value(&ones, 18).unwrap();
        assert!(i.width() < r(1, 10_000_000));
        // (sqrt(5) - 1)/2 to 50 digits, root of x^2 + x - 1
        let digits = "61803398874989484820458683436563811772030917980576";
        let scale = BigInt::from(10).pow(50);
        let lo = BigRational::new(digits.parse::<BigInt>().unwrap(), scale.clone());
        let hi = &lo + BigRational::new(BigInt::one(), scale);
        let f = |x: &BigRational| x * x + x - BigRational::one();
        assert!(f(&lo).is_negative() && f(&hi).is_positive());
        assert!(i.contains(&lo) && i.contains(&hi));
    }

    #[test]
    fn consecutive_convergent_enclosure() {
        let a = word![3, 1, 4, 1, 5];
        let ext = a.concat(&word![5]);
        let t = ConvergentTable::new(&ext);
        let i = enclose_value(&ext, ext.len() - 1).unwrap();
        assert_eq!(i, RationalInterval::new(t.value(5), t.value(6)));
    }

    #[test]
    fn approx_bound_examples() {
        let b = check_approx_bound(&word![1, 2, 3, 4, 5], 2).unwrap();
        assert!(b.holds && b.margin.is_positive());
        // exact oracle: alpha in [p4/q4, p5/q5] and q2 = 3, p2 = 2, q3 = 10
        let t = ConvergentTable::new(&word![1, 2, 3, 4, 5]);
        let sup = [t.value(4), t.value(5)]
            .iter()
            .map(|x| (x * r(3, 1) - r(2, 1)).abs())
            .max()
            .unwrap();
        assert_eq!(b.margin, r(1, 10) - sup);
        assert!(check_approx_bound(&word![1, 1, 1, 1, 1, 1], 3).unwrap().holds);
        assert!(matches!(
            check_approx_bound(&word![1, 2, 3, 4, 5], 4),
            Err(ContFracError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            check_approx_bound(&word![1, 2, 3, 4, 5], 3),
            Err(ContFracError::Indeterminate(_))
        ));
    }

    #[test]
    fn growth_examples() {
        let ones = word![1].repeat(10);
        assert!(check_growth_bound(&ones, 1, 8).unwrap());
        let t = ConvergentTable::new(&ones);
        assert_eq!(t.q(9), &BigInt::from(55));
        assert!(check_growth_bound(&word![4, 1, 7], 1, 1).unwrap());
        assert!(check_growth_bound(&ones, 1, 10).is_err());
    }

    #[test]
    fn mirror_examples() {
        let a = word![1, 2, 3];
        assert!(mirror_formula(&a, 3).unwrap());
        assert_eq!(nested(&[3, 2, 1]), r(3, 10));
        assert!(mirror_formula(&word![7], 1).unwrap());
        assert!(mirror_formula(&a, 0).is_err());
    }

    #[test]
    fn last_convergent_examples() {
        let to_i = |(p, q): (BigInt, BigInt)| (i64::try_from(&p).unwrap(), i64::try_from(&q).unwrap());
        assert_eq!(to_i(last_convergent(&word![1, 2, 3]).unwrap()), (2, 3));
        assert_eq!(to_i(last_convergent(&word![1, 1]).unwrap()), (1, 1));
        assert_eq!(to_i(last_convergent(&word![5, 5]).unwrap()), (1, 5));
        assert!(last_convergent(&word![5]).is_err());
    }

    #[test]
    fn bit_limit() {
        let a = word![1_000_000].repeat(10);
        assert!(matches!(
            ConvergentTable::with_bit_limit(&a, Some(64)),
            Err(ContFracError::BitLimit { limit: 64, .. })
        ));
        assert!(ConvergentTable::with_bit_limit(&a, Some(400)).is_ok());
    }

    #[test]
    fn determinant_and_coprimality() {
        let a = word![2, 7, 1, 8, 2, 8, 1, 8, 2, 8];
        let t = ConvergentTable::new(&a);
        for l in 0..=a.len() as i64 {
            let det = t.p(l - 1) * t.q(l) - t.p(l) * t.q(l - 1);
            assert_eq!(det.abs(), BigInt::one());
            assert!(t.p(l).gcd(t.q(l)).is_one());
        }
    }
}
