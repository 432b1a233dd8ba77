use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{ContFracError, ConvergentTable, RationalInterval};
use crate::exact;
use crate::words::FiniteWord;

/// Deepest expansion tried while separating the two roots.
const MAX_ISOLATION_TERMS: usize = 1 << 14;

/// The eventually periodic number `[0; W, (P)^inf]` together with the
/// integer quadratic `A X^2 - B X + C` it is a root of.
#[derive(Debug, Clone, Serialize)]
pub struct QuadraticApproximant {
    preperiod: FiniteWord,
    period: FiniteWord,
    #[serde(rename = "poly_a", serialize_with = "exact::ser_bigint")]
    a: BigInt,
    #[serde(rename = "poly_b", serialize_with = "exact::ser_bigint")]
    b: BigInt,
    #[serde(rename = "poly_c", serialize_with = "exact::ser_bigint")]
    c: BigInt,
    #[serde(serialize_with = "exact::ser_bigint")]
    q_w: BigInt,
    #[serde(serialize_with = "exact::ser_bigint")]
    q_period_end: BigInt,
    /// Expansion enclosure containing exactly one root of the polynomial.
    root: RationalInterval,
    isolation_terms: usize,
}

/// Builds the quadratic approximant with the given preperiod and period.
pub fn periodic_value(
    preperiod: &FiniteWord,
    period: &FiniteWord,
) -> Result<QuadraticApproximant, ContFracError> {
    QuadraticApproximant::new(preperiod, period)
}

impl QuadraticApproximant {
    pub fn new(preperiod: &FiniteWord, period: &FiniteWord) -> Result<Self, ContFracError> {
        if period.is_empty() {
            return Err(ContFracError::EmptyPeriod);
        }
        let w = preperiod.len() as i64;
        let k = w + period.len() as i64;
        let table = ConvergentTable::new(&preperiod.concat(period));
        let (p, q) = (|l| table.p(l), |l| table.q(l));
        let a = q(w - 1) * q(k) - q(w) * q(k - 1);
        let b = (q(w - 1) * p(k) - q(w) * p(k - 1)) + (p(w - 1) * q(k) - p(w) * q(k - 1));
        let c = p(w - 1) * p(k) - p(w) * p(k - 1);
        if a.is_zero() {
            return Err(ContFracError::DegeneratePolynomial);
        }
        let mut out = Self {
            preperiod: preperiod.clone(),
            period: period.clone(),
            a,
            b,
            c,
            q_w: q(w).clone(),
            q_period_end: q(k).clone(),
            root: RationalInterval::point(BigRational::zero()),
            isolation_terms: 0,
        };
        out.isolate()?;
        Ok(out)
    }

    /// Deepens the expansion until its enclosure shows a sign change of
    /// the polynomial, which happens once the other root falls outside.
    fn isolate(&mut self) -> Result<(), ContFracError> {
        let mut terms = (self.preperiod.len() + self.period.len()).max(2) + 1;
        while terms <= MAX_ISOLATION_TERMS {
            let enclosure = self.enclosure(terms)?;
            let at_lo = self.eval_exact(enclosure.lo());
            let at_hi = self.eval_exact(enclosure.hi());
            if (at_lo.is_positive() && at_hi.is_negative())
                || (at_lo.is_negative() && at_hi.is_positive())
            {
                self.root = enclosure;
                self.isolation_terms = terms;
                return Ok(());
            }
            terms *= 2;
        }
        Err(ContFracError::RootIsolation(MAX_ISOLATION_TERMS))
    }

    pub fn preperiod(&self) -> &FiniteWord {
        &self.preperiod
    }

    pub fn period(&self) -> &FiniteWord {
        &self.period
    }

    /// Leading coefficient `A`.
    pub fn a(&self) -> &BigInt {
        &self.a
    }

    /// Coefficient `B` of `A X^2 - B X + C` (note the sign).
    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn height(&self) -> BigInt {
        self.a.abs().max(self.b.abs()).max(self.c.abs())
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    /// `H <= 2 q_w q_{w+|period|}`, exactly.
    pub fn height_bound_holds(&self) -> bool {
        self.height() <= BigInt::from(2) * &self.q_w * &self.q_period_end
    }

    pub fn height_bound(&self) -> BigInt {
        BigInt::from(2) * &self.q_w * &self.q_period_end
    }

    /// First `n` partial quotients of the eventually periodic expansion.
    pub fn expansion_prefix(&self, n: usize) -> FiniteWord {
        let pre = self.preperiod.letters();
        let per = self.period.letters();
        let letters = (0..n)
            .map(|i| {
                if i < pre.len() {
                    pre[i]
                } else {
                    per[(i - pre.len()) % per.len()]
                }
            })
            .collect();
        FiniteWord::new(letters).expect("letters come from valid words")
    }

    /// Enclosure of the approximant from its first `terms` partial
    /// quotients (`terms >= 2`).
    pub fn enclosure(&self, terms: usize) -> Result<RationalInterval, ContFracError> {
        if terms < 2 {
            return Err(ContFracError::WordTooShort { len: terms, min: 2 });
        }
        ConvergentTable::new(&self.expansion_prefix(terms)).deepest_enclosure()
    }

    /// Isolating interval for the approximant.
    pub fn root(&self) -> &RationalInterval {
        &self.root
    }

    /// Number of expansion terms needed to isolate the root.
    pub fn isolation_terms(&self) -> usize {
        self.isolation_terms
    }

    /// Interval holding the other root, via `root + conjugate = B / A`.
    pub fn conjugate(&self) -> RationalInterval {
        let sum = BigRational::new(self.b.clone(), self.a.clone());
        self.root.neg().shift(&sum)
    }

    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let a = BigRational::from_integer(self.a.clone());
        let b = BigRational::from_integer(self.b.clone());
        let c = BigRational::from_integer(self.c.clone());
        &a * x * x - &b * x + c
    }

    /// Enclosure of `A x^2 - B x + C` over `x`.
    pub fn eval(&self, x: &RationalInterval) -> RationalInterval {
        x.eval_quadratic(&self.a, &-&self.b, &self.c)
    }
}
