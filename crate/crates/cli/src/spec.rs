//! Sequence spec files (TOML).
//!
//! ```toml
//! schema_version = 1
//! name = "thue_morse"
//! type = "automatic"
//!
//! [automatic]
//! base = 2
//! states = ["even", "odd"]
//! initial = "even"
//! transitions = { even = ["even", "odd"], odd = ["odd", "even"] }
//! outputs = { even = 1, odd = 2 }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use cfw_core::criteria::{QuasiBlock, QuasiPeriodicSpec, Witness};
use cfw_core::source::{EventuallyPeriodic, SequenceSource};
use cfw_core::words::{FiniteWord, WordError};
use cfw_core::Dfao;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecType {
    Literal,
    Automatic,
    Quasiperiodic,
    EventuallyPeriodic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiteralPayload {
    pub letters: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomaticPayload {
    pub base: u32,
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: BTreeMap<String, Vec<String>>,
    pub outputs: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockPayload {
    pub block: Vec<i64>,
    pub lambda: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiPeriodicPayload {
    #[serde(default)]
    pub head: Vec<i64>,
    pub blocks: Vec<BlockPayload>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventuallyPeriodicPayload {
    #[serde(default)]
    pub preperiod: Vec<i64>,
    pub period: Vec<i64>,
}

/// The document as written; echoed into reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub schema_version: u32,
    pub name: String,
    #[serde(rename = "type")]
    pub kind: SpecType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal: Option<LiteralPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automatic: Option<AutomaticPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quasiperiodic: Option<QuasiPeriodicPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eventually_periodic: Option<EventuallyPeriodicPayload>,
}

/// A validated sequence ready to produce prefixes.
#[derive(Debug, Clone)]
pub enum Sequence {
    Literal(FiniteWord),
    Automatic(Dfao),
    QuasiPeriodic(QuasiPeriodicSpec),
    EventuallyPeriodic(EventuallyPeriodic),
}

impl Sequence {
    pub fn source(&self) -> &dyn SequenceSource {
        match self {
            Sequence::Literal(w) => w,
            Sequence::Automatic(m) => m,
            Sequence::QuasiPeriodic(q) => q,
            Sequence::EventuallyPeriodic(e) => e,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub file: SpecFile,
    pub sequence: Sequence,
}

pub fn load(path: &Path) -> Result<LoadedSpec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<LoadedSpec, SpecError> {
    let de = toml::Deserializer::new(text);
    let file: SpecFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let message = e.into_inner().message().trim().to_string();
        invalid(path, message)
    })?;
    let sequence = validate(&file)?;
    Ok(LoadedSpec { file, sequence })
}

fn word(values: &[i64], path: &str) -> Result<FiniteWord, SpecError> {
    FiniteWord::from_signed(values).map_err(|e| match e {
        WordError::NonPositiveLetter { position, letter } => invalid(
            format!("{path}[{position}]"),
            format!("letters must be >= 1, got {letter}"),
        ),
        other => invalid(path, other.to_string()),
    })
}

fn validate(file: &SpecFile) -> Result<Sequence, SpecError> {
    if file.schema_version != SCHEMA_VERSION {
        return Err(invalid(
            "schema_version",
            format!("unsupported version {}, expected {SCHEMA_VERSION}", file.schema_version),
        ));
    }
    if file.name.trim().is_empty() {
        return Err(invalid("name", "must not be empty"));
    }
    let present = [
        ("literal", file.literal.is_some(), SpecType::Literal),
        ("automatic", file.automatic.is_some(), SpecType::Automatic),
        ("quasiperiodic", file.quasiperiodic.is_some(), SpecType::Quasiperiodic),
        ("eventually_periodic", file.eventually_periodic.is_some(), SpecType::EventuallyPeriodic),
    ];
    for (key, is_present, kind) in present {
        if is_present && kind != file.kind {
            return Err(invalid(key, format!("section does not match type {:?}", file.kind)));
        }
        if !is_present && kind == file.kind {
            return Err(invalid(key, "missing section for the declared type"));
        }
    }
    match file.kind {
        SpecType::Literal => {
            let p = file.literal.as_ref().expect("checked above");
            Ok(Sequence::Literal(word(&p.letters, "literal.letters")?))
        }
        SpecType::Automatic => automaton(file.automatic.as_ref().expect("checked above")),
        SpecType::Quasiperiodic => {
            let p = file.quasiperiodic.as_ref().expect("checked above");
            let head = word(&p.head, "quasiperiodic.head")?;
            let mut blocks = Vec::with_capacity(p.blocks.len());
            for (k, b) in p.blocks.iter().enumerate() {
                let path = format!("quasiperiodic.blocks[{k}]");
                let block = word(&b.block, &format!("{path}.block"))?;
                if block.is_empty() {
                    return Err(invalid(format!("{path}.block"), "must not be empty"));
                }
                if b.lambda < 1 {
                    return Err(invalid(format!("{path}.lambda"), "must be >= 1"));
                }
                blocks.push(QuasiBlock {
                    block,
                    lambda: b.lambda as u64,
                });
            }
            let spec = QuasiPeriodicSpec::new(head, blocks)
                .map_err(|e| invalid("quasiperiodic.blocks", e.to_string()))?;
            Ok(Sequence::QuasiPeriodic(spec))
        }
        SpecType::EventuallyPeriodic => {
            let p = file.eventually_periodic.as_ref().expect("checked above");
            let pre = word(&p.preperiod, "eventually_periodic.preperiod")?;
            let per = word(&p.period, "eventually_periodic.period")?;
            let src = EventuallyPeriodic::new(pre, per)
                .map_err(|e| invalid("eventually_periodic.period", e.to_string()))?;
            Ok(Sequence::EventuallyPeriodic(src))
        }
    }
}

fn automaton(p: &AutomaticPayload) -> Result<Sequence, SpecError> {
    if p.base < 2 {
        return Err(invalid("automatic.base", "must be >= 2"));
    }
    if p.states.is_empty() {
        return Err(invalid("automatic.states", "must not be empty"));
    }
    let mut ids = BTreeMap::new();
    for (i, s) in p.states.iter().enumerate() {
        if ids.insert(s.as_str(), i).is_some() {
            return Err(invalid(format!("automatic.states[{i}]"), format!("duplicate state {s:?}")));
        }
    }
    let lookup = |name: &str, path: String| {
        ids.get(name)
            .copied()
            .ok_or_else(|| invalid(path, format!("unknown state {name:?}")))
    };
    let initial = lookup(&p.initial, "automatic.initial".into())?;
    for key in p.transitions.keys() {
        lookup(key, format!("automatic.transitions.{key}"))?;
    }
    for key in p.outputs.keys() {
        lookup(key, format!("automatic.outputs.{key}"))?;
    }
    let mut transitions = Vec::with_capacity(p.states.len());
    let mut outputs = Vec::with_capacity(p.states.len());
    for s in &p.states {
        let row = p
            .transitions
            .get(s)
            .ok_or_else(|| invalid(format!("automatic.transitions.{s}"), "missing row"))?;
        if row.len() != p.base as usize {
            return Err(invalid(
                format!("automatic.transitions.{s}"),
                format!("expected {} targets, found {}", p.base, row.len()),
            ));
        }
        let targets = row
            .iter()
            .enumerate()
            .map(|(d, t)| lookup(t, format!("automatic.transitions.{s}[{d}]")))
            .collect::<Result<Vec<_>, _>>()?;
        transitions.push(targets);
        let out = *p
            .outputs
            .get(s)
            .ok_or_else(|| invalid(format!("automatic.outputs.{s}"), "missing output"))?;
        if out < 1 {
            return Err(invalid(format!("automatic.outputs.{s}"), format!("outputs must be >= 1, got {out}")));
        }
        outputs.push(out as u64);
    }
    Dfao::new(p.base, initial, transitions, outputs)
        .map(Sequence::Automatic)
        .map_err(|e| invalid("automatic", e.to_string()))
}

/// Literal spec text for `letters`, as used by round-trip checks.
pub fn literal_toml(name: &str, letters: &[u64]) -> String {
    let list = letters
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(", ");
    format!("schema_version = {SCHEMA_VERSION}\nname = \"{name}\"\ntype = \"literal\"\n\n[literal]\nletters = [{list}]\n")
}

/// Witness file: a kind plus either the words or their lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub kind: cfw_core::WitnessKind,
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub w_letters: Option<Vec<i64>>,
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub u_letters: Option<Vec<i64>>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v_letters: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<usize>,
}

impl WitnessFile {
    /// Builds the witness, cutting it from `source` when only lengths are
    /// given.
    pub fn resolve(&self, source: &dyn SequenceSource) -> Result<Witness, SpecError> {
        if let Some(u) = &self.u_letters {
            let u = word(u, "U")?;
            if u.is_empty() {
                return Err(invalid("U", "must not be empty"));
            }
            let w = word(self.w_letters.as_deref().unwrap_or(&[]), "W")?;
            let v = word(self.v_letters.as_deref().unwrap_or(&[]), "V")?;
            return Ok(Witness::new(self.kind, w, u, v));
        }
        if self.w_letters.is_some() || self.v_letters.is_some() {
            return Err(invalid("U", "letters for W or V given without U"));
        }
        let u = self.u.ok_or_else(|| invalid("u", "give either U (letters) or u (length)"))?;
        if u == 0 {
            return Err(invalid("u", "must be positive"));
        }
        let (w, v) = (self.w.unwrap_or(0), self.v.unwrap_or(0));
        let needed = w + 2 * u + v;
        let prefix = source
            .prefix(needed)
            .map_err(|e| invalid("u", e.to_string()))?;
        Witness::from_lengths(self.kind, &prefix, w, u, v).map_err(|e| invalid("u", e.to_string()))
    }
}

pub fn load_witness(path: &Path) -> Result<WitnessFile, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let de = toml::Deserializer::new(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let message = e.into_inner().message().trim().to_string();
        invalid(path, message)
    })
}
