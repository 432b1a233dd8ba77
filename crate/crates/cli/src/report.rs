//! Report layout. Every list has a fixed order and rationals are written
//! as `"numerator/denominator"` strings; the only floats are fields whose
//! names end in `_f64`.

use cfw_core::contfrac::Decision;
use cfw_core::criteria::{Periodicity, QuasiPeriodicReport, SearchKind, Witness, WitnessKind};
use cfw_core::exact;
use cfw_core::witness::{DeltaEstimate, VerificationRecord};
use num_rational::BigRational;
use serde::Serialize;

use crate::spec::SpecFile;

pub const TOOL: &str = "cfw";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default, Serialize)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<SearchKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_cap: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guard_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_file: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_bigint_bits: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrefixSection {
    pub length: usize,
    pub letters: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexityRow {
    pub n: usize,
    pub p: usize,
    pub p_over_n: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexitySection {
    pub prefix_len: usize,
    /// Counts are for the finite prefix, so they bound the complexity of
    /// the infinite word from below.
    pub note: &'static str,
    pub rows: Vec<ComplexityRow>,
}

/// A witness with 1-based positions.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessEntry {
    pub index: usize,
    pub kind: WitnessKind,
    pub prefix_len: usize,
    pub w_len: usize,
    pub u_len: usize,
    pub v_len: usize,
    /// Position of the first letter of `U`.
    pub u_start: usize,
    /// Position of the first letter of the second block.
    pub second_start: usize,
    pub v_over_u: String,
    pub w_over_u: String,
    #[serde(rename = "W")]
    pub w: Vec<u64>,
    #[serde(rename = "U")]
    pub u: Vec<u64>,
    #[serde(rename = "V")]
    pub v: Vec<u64>,
}

impl WitnessEntry {
    pub fn new(index: usize, w: &Witness) -> Self {
        let (wl, ul, vl) = w.lengths();
        Self {
            index,
            kind: w.kind,
            prefix_len: w.prefix_len,
            w_len: wl,
            u_len: ul,
            v_len: vl,
            u_start: wl + 1,
            second_start: wl + ul + vl + 1,
            v_over_u: exact::rational_string(&w.v_over_u),
            w_over_u: exact::rational_string(&w.w_over_u),
            w: w.w.letters().to_vec(),
            u: w.u.letters().to_vec(),
            v: w.v.letters().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicityAdvisory {
    /// 1-based position where the periodic tail starts.
    pub tail_start: usize,
    pub period: usize,
    pub note: &'static str,
}

impl PeriodicityAdvisory {
    pub fn new(p: &Periodicity) -> Self {
        Self {
            tail_start: p.preperiod + 1,
            period: p.period,
            note: "the scanned prefix looks eventually periodic; witnesses from such words are not evidence of aperiodicity",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectionSection {
    pub kind: SearchKind,
    pub scanned_len: usize,
    pub ratio_cap: String,
    pub witness_count: usize,
    pub witnesses: Vec<WitnessEntry>,
    #[serde(serialize_with = "exact::ser_opt_rational")]
    pub sup_v_over_u: Option<BigRational>,
    #[serde(serialize_with = "exact::ser_opt_rational")]
    pub sup_w_over_u: Option<BigRational>,
    #[serde(serialize_with = "exact::ser_rationals")]
    pub epsilon_stream: Vec<BigRational>,
    pub periodicity_advisory: Option<PeriodicityAdvisory>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiSection {
    /// `given`, `ratio_infimum_minus_one` or `fallback_one`.
    pub eps_source: &'static str,
    pub analysis: QuasiPeriodicReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecordEntry {
    pub index: usize,
    pub guard_depth_used: usize,
    pub outcome: Decision,
    pub record: VerificationRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedEntry {
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub indeterminate: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationSection {
    pub guard_depth_requested: usize,
    pub counts: Counts,
    /// `"<witness index>:<bound id>"` for every bound that did not pass.
    pub unresolved: Vec<String>,
    pub records: Vec<RecordEntry>,
    pub skipped: Vec<SkippedEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaledSpread {
    pub id: &'static str,
    pub records: usize,
    /// Records whose ratio enclosure still contains zero.
    pub enclosing_zero: usize,
    /// Largest upper end of the ratio enclosures.
    pub sup: Option<String>,
    /// Largest over smallest midpoint, over records bounded away from zero.
    pub max_over_min: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsSection {
    pub delta: Option<DeltaEstimate>,
    /// Least-squares decay exponent of the linear-form products.
    pub exponent_fit_f64: Option<f64>,
    pub exponent_fit_note: Option<String>,
    pub scaled_spread: Vec<ScaledSpread>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok,
    ContractViolation,
    Indeterminate,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::ContractViolation => 2,
            Outcome::Indeterminate => 3,
        }
    }

    pub fn combine(self, other: Outcome) -> Outcome {
        use Outcome::*;
        match (self, other) {
            (ContractViolation, _) | (_, ContractViolation) => ContractViolation,
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            _ => Ok,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Status {
    pub outcome: Outcome,
    pub exit_code: i32,
    pub messages: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub parameters: Parameters,
    pub spec: SpecFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix: Option<PrefixSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complexity: Option<ComplexitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quasi_periodic: Option<QuasiSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsSection>,
    pub status: Status,
}

impl Report {
    pub fn new(command: &'static str, parameters: Parameters, spec: SpecFile) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command,
            parameters,
            spec,
            prefix: None,
            complexity: None,
            detection: None,
            quasi_periodic: None,
            verification: None,
            diagnostics: None,
            status: Status {
                outcome: Outcome::Ok,
                exit_code: 0,
                messages: Vec::new(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
