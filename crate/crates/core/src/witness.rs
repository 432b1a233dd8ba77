//! Certified evaluation of the approximation inequalities attached to a
//! witness.
//!
//! The target number `alpha = [0; a_1, a_2, ...]` is known only through a
//! finite prefix, so it is carried as the interval between two deep
//! convergents. Every flag is decided by interval separation; when the
//! interval is too wide the flag is `Indeterminate`, never guessed.
//! Logarithms appear only in the diagnostic exponent estimates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::contfrac::{
    finite_value, last_convergent, periodic_value, ContFracError, ConvergentTable, Convergent,
    Decision, QuadraticApproximant, RationalInterval,
};
use crate::criteria::{Witness, WitnessKind};
use crate::exact;
use crate::source::{SequenceSource, SourceError};
use crate::words::FiniteWord;

pub const DEFAULT_GUARD_DEPTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("expected a {expected:?} witness, got {found:?}")]
    WrongKind {
        expected: WitnessKind,
        found: WitnessKind,
    },
    #[error("witness does not factor the source prefix of length {0}")]
    Mismatch(usize),
    #[error("guard depth must be at least 1")]
    GuardDepth,
    #[error("need at least {needed} usable records, have {found}")]
    TooFewRecords { needed: usize, found: usize },
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    ContFrac(#[from] ContFracError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    pub guard_depth: usize,
    /// Cap on the bit size of the convergent denominators.
    pub bit_limit: Option<u64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            guard_depth: DEFAULT_GUARD_DEPTH,
            bit_limit: None,
        }
    }
}

/// Left-hand side of an inequality: exact, or an enclosure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Lhs {
    Exact {
        #[serde(serialize_with = "exact::ser_rational")]
        value: BigRational,
    },
    Interval {
        value: RationalInterval,
    },
}

/// One inequality with an explicit constant, decided rigorously.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub id: &'static str,
    pub statement: &'static str,
    pub lhs: Lhs,
    #[serde(serialize_with = "exact::ser_rational")]
    pub rhs: BigRational,
    pub decision: Decision,
}

impl BoundCheck {
    fn interval(
        id: &'static str,
        statement: &'static str,
        lhs: RationalInterval,
        rhs: BigRational,
        strict: bool,
    ) -> Self {
        let decision = if strict { lhs.lt(&rhs) } else { lhs.le(&rhs) };
        Self {
            id,
            statement,
            lhs: Lhs::Interval { value: lhs },
            rhs,
            decision,
        }
    }

    fn exact(id: &'static str, statement: &'static str, lhs: BigRational, rhs: BigRational) -> Self {
        let decision = RationalInterval::exact_le(&lhs, &rhs);
        Self {
            id,
            statement,
            lhs: Lhs::Exact { value: lhs },
            rhs,
            decision,
        }
    }
}

/// A quantity the inequalities only bound up to an unspecified constant,
/// reported as the enclosure of value / scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaledQuantity {
    pub id: &'static str,
    pub statement: &'static str,
    pub value: RationalInterval,
    #[serde(serialize_with = "exact::ser_rational")]
    pub scale: BigRational,
    pub ratio: RationalInterval,
}

impl ScaledQuantity {
    fn new(id: &'static str, statement: &'static str, value: RationalInterval, scale: BigRational) -> Self {
        let ratio = value.scale(&scale.recip());
        Self {
            id,
            statement,
            value,
            scale,
            ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormValue {
    pub name: &'static str,
    /// Enclosure of the absolute value.
    pub abs_value: RationalInterval,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedInteger {
    pub name: &'static str,
    #[serde(serialize_with = "exact::ser_bigint")]
    pub value: BigInt,
}

/// Product of the absolute values of a family of linear forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormProduct {
    pub forms: Vec<FormValue>,
    pub product: RationalInterval,
    /// The height-like integer the product is compared to.
    #[serde(serialize_with = "exact::ser_bigint")]
    pub base: BigInt,
    /// Diagnostic: `-ln(product) / ln(base)` at the product midpoint.
    pub exponent_estimate_f64: Option<f64>,
}

impl FormProduct {
    fn new(forms: Vec<FormValue>, base: BigInt) -> Self {
        let product = forms
            .iter()
            .fold(RationalInterval::point(BigRational::one()), |acc, f| acc.mul(&f.abs_value));
        let exponent_estimate_f64 = log_point(&product, &base).map(|(x, y)| -y / x);
        Self {
            forms,
            product,
            base,
            exponent_estimate_f64,
        }
    }
}

/// `(ln base, ln midpoint(product))` when both are usable.
fn log_point(product: &RationalInterval, base: &BigInt) -> Option<(f64, f64)> {
    if !product.lo().is_positive() || *base <= BigInt::one() {
        return None;
    }
    Some((exact::ln_bigint(base), exact::ln_rational(&product.midpoint())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub witness: Witness,
    pub w: usize,
    pub u: usize,
    pub v: usize,
    pub guard_depth: usize,
    /// Enclosure of the target number from the analysed prefix.
    pub alpha: RationalInterval,
    /// Convergents of the source at the indices the checks use.
    pub convergents: Vec<Convergent>,
    /// Integers built from the witness (polynomial coefficients, the
    /// palindromic fraction and its last convergent, ...).
    pub quantities: Vec<NamedInteger>,
    pub bounds: Vec<BoundCheck>,
    pub scaled: Vec<ScaledQuantity>,
    pub forms: FormProduct,
    /// Second family of forms, only when it applies.
    pub extra_forms: Option<FormProduct>,
    pub notes: Vec<String>,
}

impl VerificationRecord {
    /// `Fail` if any bound fails, else `Indeterminate` if any is
    /// undecided, else `Pass`.
    pub fn outcome(&self) -> Decision {
        let ds: Vec<Decision> = self.bounds.iter().map(|b| b.decision).collect();
        if ds.contains(&Decision::Fail) {
            Decision::Fail
        } else if ds.contains(&Decision::Indeterminate) {
            Decision::Indeterminate
        } else {
            Decision::Pass
        }
    }

    pub fn bound(&self, id: &str) -> Option<&BoundCheck> {
        self.bounds.iter().find(|b| b.id == id)
    }

    pub fn scaled(&self, id: &str) -> Option<&ScaledQuantity> {
        self.scaled.iter().find(|s| s.id == id)
    }
}

fn int(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

fn recip_sq(x: &BigInt) -> BigRational {
    BigRational::new(BigInt::one(), x * x)
}

/// Source prefix, its convergent table and the enclosure of alpha.
struct Target {
    table: ConvergentTable,
    alpha: RationalInterval,
}

fn load_target(
    source: &dyn SequenceSource,
    witness: &Witness,
    span: usize,
    options: &VerifyOptions,
) -> Result<Target, WitnessError> {
    if options.guard_depth == 0 {
        return Err(WitnessError::GuardDepth);
    }
    let prefix = source.prefix(span + options.guard_depth)?;
    if !witness.holds_in(&prefix) {
        return Err(WitnessError::Mismatch(witness.prefix_len));
    }
    let table = ConvergentTable::with_bit_limit(&prefix, options.bit_limit)?;
    let alpha = table.deepest_enclosure()?;
    Ok(Target { table, alpha })
}

fn snapshot(table: &ConvergentTable, indices: &[i64]) -> Vec<Convergent> {
    let mut idx = indices.to_vec();
    idx.sort_unstable();
    idx.dedup();
    idx.into_iter().map(|l| table.convergent(l)).collect()
}

fn form(name: &'static str, value: RationalInterval) -> FormValue {
    FormValue {
        name,
        abs_value: value.abs(),
    }
}

pub fn verify_repeat(
    source: &dyn SequenceSource,
    witness: &Witness,
    guard_depth: usize,
) -> Result<VerificationRecord, WitnessError> {
    verify_repeat_with(
        source,
        witness,
        &VerifyOptions {
            guard_depth,
            ..VerifyOptions::default()
        },
    )
}

/// Checks a `W U V U` witness against the quadratic approximant with
/// preperiod `W` and period `U V`.
pub fn verify_repeat_with(
    source: &dyn SequenceSource,
    witness: &Witness,
    options: &VerifyOptions,
) -> Result<VerificationRecord, WitnessError> {
    if witness.kind != WitnessKind::Repeat {
        return Err(WitnessError::WrongKind {
            expected: WitnessKind::Repeat,
            found: witness.kind,
        });
    }
    let (w, u, v) = witness.lengths();
    let t = w + 2 * u + v;
    let target = load_target(source, witness, t, options)?;
    let Target { table, alpha } = target;
    let approx = periodic_value(&witness.w, &witness.u.concat(&witness.v))?;

    let (wi, ki, ti) = (w as i64, (w + u + v) as i64, t as i64);
    let (q_w, q_k, q_t) = (table.q(wi), table.q(ki), table.q(ti));
    let a = approx.a().clone();
    let b1 = table.q(wi - 1) * table.p(ki) - q_w * table.p(ki - 1);
    let b2 = table.p(wi - 1) * table.q(ki) - table.p(wi) * table.q(ki - 1);
    debug_assert_eq!(&(&b1 + &b2), approx.b());

    let approx_alpha = approx.enclosure(table.len())?;
    let two = BigRational::from_integer(BigInt::from(2));
    let mut bounds = vec![
        BoundCheck::interval(
            "approximant_distance",
            "|alpha - alpha_n| <= 2 / q_{w+2u+v}^2",
            alpha.sub(&approx_alpha).abs(),
            &two * recip_sq(q_t),
            false,
        ),
        BoundCheck::interval(
            "q_side_form",
            "|A alpha - B1| <= 2 q_w / q_{w+u+v}",
            alpha.affine_int(&a, &b1).abs(),
            BigRational::new(BigInt::from(2) * q_w, q_k.clone()),
            false,
        ),
        BoundCheck::interval(
            "p_side_form",
            "|A alpha - B2| <= 2 q_{w+u+v} / q_w",
            alpha.affine_int(&a, &b2).abs(),
            BigRational::new(BigInt::from(2) * q_k, q_w.clone()),
            false,
        ),
        BoundCheck::exact(
            "height",
            "H(P) <= 2 q_w q_{w+u+v}",
            int(&approx.height()),
            int(&approx.height_bound()),
        ),
    ];
    // the approximant root must be the expansion value
    let root_inside = approx_alpha.intersect(approx.root()).is_some();
    if !root_inside {
        bounds.push(BoundCheck::exact(
            "root_selection",
            "selected root lies in the expansion enclosure",
            BigRational::one(),
            BigRational::zero(),
        ));
    }

    let p_alpha = approx.eval(&alpha);
    let scale = BigRational::new(q_k.clone(), q_w * q_t * q_t);
    let scaled = vec![ScaledQuantity::new(
        "polynomial_at_alpha",
        "|P(alpha)| relative to q_{w+u+v} / (q_w q_{w+2u+v}^2)",
        p_alpha.abs(),
        scale,
    )];

    let forms = FormProduct::new(
        vec![
            form("L1", p_alpha),
            form("L2", alpha.affine_int(&a, &b1)),
            form("L3", alpha.affine_int(&a, &b2)),
            form("L4", RationalInterval::from_integer(&a)),
        ],
        q_w * q_k,
    );

    Ok(VerificationRecord {
        witness: witness.clone(),
        w,
        u,
        v,
        guard_depth: options.guard_depth,
        alpha,
        convergents: snapshot(&table, &[wi - 1, wi, ki - 1, ki, ti]),
        quantities: vec![
            NamedInteger { name: "A", value: a },
            NamedInteger { name: "B", value: approx.b().clone() },
            NamedInteger { name: "C", value: approx.c().clone() },
            NamedInteger { name: "B1", value: b1 },
            NamedInteger { name: "B2", value: b2 },
            NamedInteger { name: "height", value: approx.height() },
            NamedInteger { name: "discriminant", value: approx.discriminant() },
        ],
        bounds,
        scaled,
        forms,
        extra_forms: None,
        notes: approximant_notes(&approx),
    })
}

fn approximant_notes(approx: &QuadraticApproximant) -> Vec<String> {
    vec![format!(
        "approximant root isolated from {} expansion terms",
        approx.isolation_terms()
    )]
}

pub fn verify_mirror(
    source: &dyn SequenceSource,
    witness: &Witness,
    guard_depth: usize,
) -> Result<VerificationRecord, WitnessError> {
    verify_mirror_with(
        source,
        witness,
        &VerifyOptions {
            guard_depth,
            ..VerifyOptions::default()
        },
    )
}

/// Checks a `W U V mirror(U)` witness against the palindromic fraction
/// `P/Q = [0; W U V mirror(U) mirror(W)]` and its last convergent `P'/Q'`.
pub fn verify_mirror_with(
    source: &dyn SequenceSource,
    witness: &Witness,
    options: &VerifyOptions,
) -> Result<VerificationRecord, WitnessError> {
    if witness.kind != WitnessKind::Mirror {
        return Err(WitnessError::WrongKind {
            expected: WitnessKind::Mirror,
            found: witness.kind,
        });
    }
    let (w, u, v) = witness.lengths();
    let (r, s, t) = (w, w + u, w + 2 * u + v);
    let target = load_target(source, witness, t, options)?;
    let Target { table, alpha } = target;

    let z = witness.reconstruct().concat(&witness.w.mirror());
    let z_table = ConvergentTable::with_bit_limit(&z, options.bit_limit)?;
    let last = z.len() as i64;
    let (p, q) = (z_table.p(last).clone(), z_table.q(last).clone());
    debug_assert_eq!(BigRational::new(p.clone(), q.clone()), finite_value(z.letters()));
    let (p1, q1) = last_convergent(&z)?;

    let (ri, si, ti) = (r as i64, s as i64, t as i64);
    let (q_r, q_s, q_t) = (table.q(ri), table.q(si), table.q(ti));
    let qr = int(&q);
    let two = BigInt::from(2);

    let l1 = alpha.affine_int(&q, &p);
    let l2 = alpha.affine_int(&q1, &p1);
    let l3 = alpha.affine_int(&q, &q1);
    let l5 = alpha.eval_quadratic(&q, &-(&q1 + &p), &p1);

    let bounds = vec![
        BoundCheck::interval(
            "palindrome_distance",
            "|Q alpha - P| < Q / q_t^2",
            l1.abs(),
            &qr * recip_sq(q_t),
            true,
        ),
        BoundCheck::interval(
            "penultimate_distance",
            "|Q' alpha - P'| < Q / q_t^2",
            l2.abs(),
            &qr * recip_sq(q_t),
            true,
        ),
        BoundCheck::interval(
            "mirror_distance",
            "|Q alpha - Q'| < Q / q_s^2",
            l3.abs(),
            &qr * recip_sq(q_s),
            true,
        ),
        BoundCheck::exact(
            "denominator_size",
            "Q <= 2 q_r q_t",
            qr.clone(),
            int(&(&two * q_r * q_t)),
        ),
        BoundCheck::exact(
            "denominator_chain",
            "2 q_r q_t <= 2 q_s q_t",
            int(&(&two * q_r * q_t)),
            int(&(&two * q_s * q_t)),
        ),
    ];

    let mut scaled = vec![ScaledQuantity::new(
        "quadratic_form",
        "|alpha^2 Q - alpha Q' - alpha P + P'| relative to 1 / Q",
        l5.abs(),
        qr.recip(),
    )];
    let forms = FormProduct::new(
        vec![
            form("L2", l2.clone()),
            form("L3", l3),
            form("L4", RationalInterval::from_integer(&q1)),
            form("L5", l5),
        ],
        q.clone(),
    );
    scaled.push(ScaledQuantity::new(
        "form_product",
        "product of |L2| ... |L5| relative to q_r^2 / q_s^2",
        forms.product.clone(),
        BigRational::new(q_r * q_r, q_s * q_s),
    ));

    let mut notes = Vec::new();
    let extra_forms = if q1 == p {
        let lp1 = alpha.eval_quadratic(&q, &-(&two * &q1), &p1);
        scaled.push(ScaledQuantity::new(
            "symmetric_form",
            "|alpha^2 Q - 2 alpha Q' + P'| relative to 1 / Q",
            lp1.abs(),
            qr.recip(),
        ));
        Some(FormProduct::new(
            vec![
                form("L'1", lp1),
                form("L'2", l2),
                form("L'3", RationalInterval::from_integer(&q)),
            ],
            q.clone(),
        ))
    } else {
        notes.push("Q' != P: symmetric forms skipped".to_string());
        None
    };

    Ok(VerificationRecord {
        witness: witness.clone(),
        w,
        u,
        v,
        guard_depth: options.guard_depth,
        alpha,
        convergents: snapshot(&table, &[ri, si, ti]),
        quantities: vec![
            NamedInteger { name: "P", value: p },
            NamedInteger { name: "Q", value: q },
            NamedInteger { name: "P'", value: p1 },
            NamedInteger { name: "Q'", value: q1 },
        ],
        bounds,
        scaled,
        forms,
        extra_forms,
        notes,
    })
}

/// Dispatches on the witness kind.
pub fn verify(
    source: &dyn SequenceSource,
    witness: &Witness,
    options: &VerifyOptions,
) -> Result<VerificationRecord, WitnessError> {
    match witness.kind {
        WitnessKind::Repeat => verify_repeat_with(source, witness, options),
        WitnessKind::Mirror => verify_mirror_with(source, witness, options),
    }
}

/// Finite-range surrogate for `M = 1 + limsup q_l^(1/l)` and
/// `delta = ln 2 / ln M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaEstimate {
    /// `1 + max_l` of a certified upper bound on `q_l^(1/l)`, with the
    /// bound taken on a grid of step `2^-32`.
    #[serde(serialize_with = "exact::ser_rational")]
    pub m_hat: BigRational,
    pub m_hat_f64: f64,
    pub delta_hat_f64: f64,
    /// Index attaining the maximum.
    pub argmax: usize,
}

const ROOT_FRACTION_BITS: u64 = 32;

/// Smallest `m / 2^32` with `(m / 2^32)^l >= q`.
fn root_upper_bound(q: &BigInt, l: u32) -> BigRational {
    let scaled = q << (ROOT_FRACTION_BITS * u64::from(l));
    let mut m = scaled.nth_root(l);
    if m.pow(l) < scaled {
        m += 1;
    }
    BigRational::new(m, BigInt::one() << ROOT_FRACTION_BITS)
}

pub fn estimate_delta(a: &FiniteWord) -> Result<DeltaEstimate, WitnessError> {
    if a.is_empty() {
        return Err(ContFracError::WordTooShort { len: 0, min: 1 }.into());
    }
    let table = ConvergentTable::new(a);
    let (argmax, best) = (1..=a.len())
        .map(|l| (l, root_upper_bound(table.q(l as i64), l as u32)))
        .fold(None::<(usize, BigRational)>, |acc, (l, b)| match acc {
            Some((_, ref cur)) if *cur >= b => acc,
            _ => Some((l, b)),
        })
        .expect("non-empty word");
    let m_hat = BigRational::one() + best;
    let ln_m = exact::ln_rational(&m_hat);
    Ok(DeltaEstimate {
        m_hat_f64: ln_m.exp(),
        delta_hat_f64: std::f64::consts::LN_2 / ln_m,
        m_hat,
        argmax,
    })
}

/// Least-squares slope of `ln(product)` against `ln(base)` over records
/// whose product enclosure excludes zero, negated: positive when the
/// products shrink as the bases grow.
pub fn exponent_fit(records: &[VerificationRecord]) -> Result<f64, WitnessError> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| log_point(&r.forms.product, &r.forms.base))
        .collect();
    fit_points(&points)
}

/// Same fit over raw `(product, base)` pairs.
pub fn exponent_fit_values(pairs: &[(BigRational, BigInt)]) -> Result<f64, WitnessError> {
    let points: Vec<(f64, f64)> = pairs
        .iter()
        .filter_map(|(p, b)| log_point(&RationalInterval::point(p.clone()), b))
        .collect();
    fit_points(&points)
}

fn fit_points(points: &[(f64, f64)]) -> Result<f64, WitnessError> {
    let too_few = WitnessError::TooFewRecords {
        needed: 2,
        found: points.len(),
    };
    if points.len() < 2 {
        return Err(too_few);
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(too_few);
    }
    Ok(-sxy / sxx)
}
