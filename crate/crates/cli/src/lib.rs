//! `cfw`: generate partial-quotient words from spec files, measure their
//! complexity, detect repetition and mirror witnesses, and certify the
//! continued-fraction inequalities attached to them.

pub mod report;
pub mod spec;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use cfw_core::contfrac::{ContFracError, ConvergentTable, Decision};
use cfw_core::criteria::{self, growth_margin, SearchKind, Witness};
use cfw_core::source::SequenceSource;
use cfw_core::witness::{self, VerifyOptions, WitnessError};
use cfw_core::words::complexity_profile;
use cfw_core::exact;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

use report::*;
use spec::{LoadedSpec, Sequence, SpecError};

pub const BITS_ENV: &str = "CFW_MAX_BIGINT_BITS";

#[derive(Debug, Parser)]
#[command(name = "cfw", version, about = "Continued-fraction word experiments with exact arithmetic")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the first n partial quotients.
    Gen(GenArgs),
    /// Prefix subword complexity table.
    Complexity(ComplexityArgs),
    /// Search the prefixes for repeat or mirror witnesses.
    Detect(DetectArgs),
    /// Certify the inequalities attached to witnesses.
    Verify(VerifyArgs),
    /// Complexity, detection, verification and diagnostics in one report.
    All(AllArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Report,
    Lines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Repeat,
    Mirror,
    Either,
}

impl From<KindArg> for SearchKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Repeat => SearchKind::Repeat,
            KindArg::Mirror => SearchKind::Mirror,
            KindArg::Either => SearchKind::Either,
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Sequence spec file (TOML).
    #[arg(long)]
    pub spec: PathBuf,
    /// Write the output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "report")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Longest prefix scanned.
    #[arg(long, default_value_t = 1024)]
    pub max_len: usize,
    #[arg(long, value_enum, default_value = "either")]
    pub kind: KindArg,
    /// Cap on |V|/|U| and |W|/|U|, e.g. 16 or 5/2.
    #[arg(long, default_value = "16")]
    pub ratio_cap: String,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    #[command(flatten)]
    pub common: Common,
    /// Prefix length.
    #[arg(long)]
    pub n: usize,
    /// Largest factor length tabulated (default: min(n, 64)).
    #[arg(long)]
    pub max_n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Growth margin for quasi-periodic specs (default: smallest
    /// repetition ratio minus one).
    #[arg(long)]
    pub eps: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long, default_value_t = witness::DEFAULT_GUARD_DEPTH)]
    pub guard_depth: usize,
    /// Verify this witness (TOML) instead of a detected chain.
    #[arg(long)]
    pub witness: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AllArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long, default_value_t = witness::DEFAULT_GUARD_DEPTH)]
    pub guard_depth: usize,
    /// Prefix length for the complexity table (default: max-len).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub max_n: Option<usize>,
    #[arg(long)]
    pub eps: Option<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Contract(_) => 2,
            _ => 1,
        }
    }
}

/// What a command produced: the text to emit and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub exit_code: i32,
}

/// Parses `args` and runs the command, writing to stdout/stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let out_path = match &cli.command {
        Command::Gen(a) => a.common.out.clone(),
        Command::Complexity(a) => a.common.out.clone(),
        Command::Detect(a) => a.common.out.clone(),
        Command::Verify(a) => a.common.out.clone(),
        Command::All(a) => a.common.out.clone(),
    };
    let bit_limit = match std::env::var(BITS_ENV) {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(b) if b > 0 => Some(b),
            _ => {
                eprintln!("error: {BITS_ENV} must be a positive integer, got {v:?}");
                return 1;
            }
        },
        Err(_) => None,
    };
    match execute(&cli.command, bit_limit) {
        Ok(output) => match write_output(out_path.as_deref(), &output.text) {
            Ok(()) => output.exit_code,
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Runs a parsed command without touching stdout.
pub fn execute(command: &Command, bit_limit: Option<u64>) -> Result<Output, CliError> {
    match command {
        Command::Gen(a) => cmd_gen(a),
        Command::Complexity(a) => cmd_complexity(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Verify(a) => cmd_verify(a, bit_limit),
        Command::All(a) => cmd_all(a, bit_limit),
    }
}

fn parse_positive_rational(text: &str, flag: &str) -> Result<BigRational, CliError> {
    let r: BigRational = text
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("--{flag}: expected a rational such as 8 or 5/2, got {text:?}")))?;
    if !r.is_positive() {
        return Err(CliError::Usage(format!("--{flag} must be positive")));
    }
    Ok(r)
}

fn prefix_of(loaded: &LoadedSpec, n: usize) -> Result<cfw_core::FiniteWord, CliError> {
    loaded
        .sequence
        .source()
        .prefix(n)
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn finish(mut report: Report, outcome: Outcome) -> Output {
    report.status.outcome = outcome;
    report.status.exit_code = outcome.exit_code();
    Output {
        text: report.to_json(),
        exit_code: outcome.exit_code(),
    }
}

fn lines<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    let mut s: String = items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("\n");
    s.push('\n');
    s
}

pub fn cmd_gen(a: &GenArgs) -> Result<Output, CliError> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let loaded = spec::load(&a.common.spec)?;
    let prefix = prefix_of(&loaded, a.n)?;
    if a.common.format == Format::Lines {
        return Ok(Output {
            text: lines(prefix.letters()),
            exit_code: 0,
        });
    }
    let mut report = Report::new(
        "gen",
        Parameters {
            n: Some(a.n),
            ..Default::default()
        },
        loaded.file,
    );
    report.prefix = Some(PrefixSection {
        length: prefix.len(),
        letters: prefix.into_letters(),
    });
    Ok(finish(report, Outcome::Ok))
}

fn complexity_section(prefix: &cfw_core::FiniteWord, max_n: usize) -> Result<ComplexitySection, CliError> {
    let profile = complexity_profile(prefix, max_n).map_err(|e| CliError::Usage(e.to_string()))?;
    let rows = profile
        .iter()
        .enumerate()
        .map(|(i, &p)| ComplexityRow {
            n: i + 1,
            p,
            p_over_n: exact::rational_string(&BigRational::new(BigInt::from(p), BigInt::from(i + 1))),
        })
        .collect();
    Ok(ComplexitySection {
        prefix_len: prefix.len(),
        note: "distinct factors of the finite prefix; a lower bound for the infinite word",
        rows,
    })
}

fn default_max_n(n: usize, given: Option<usize>) -> Result<usize, CliError> {
    let max_n = given.unwrap_or(n.min(64));
    if max_n == 0 || max_n > n {
        return Err(CliError::Usage(format!("--max-n must be in 1..={n}")));
    }
    Ok(max_n)
}

pub fn cmd_complexity(a: &ComplexityArgs) -> Result<Output, CliError> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let max_n = default_max_n(a.n, a.max_n)?;
    let loaded = spec::load(&a.common.spec)?;
    let prefix = prefix_of(&loaded, a.n)?;
    let section = complexity_section(&prefix, max_n)?;
    if a.common.format == Format::Lines {
        return Ok(Output {
            text: lines(section.rows.iter().map(|r| format!("{} {} {}", r.n, r.p, r.p_over_n))),
            exit_code: 0,
        });
    }
    let mut report = Report::new(
        "complexity",
        Parameters {
            n: Some(a.n),
            max_n: Some(max_n),
            ..Default::default()
        },
        loaded.file,
    );
    report.complexity = Some(section);
    Ok(finish(report, Outcome::Ok))
}

struct Detection {
    section: DetectionSection,
    witnesses: Vec<Witness>,
}

/// Runs the chain search; `reserve` letters are kept free at the end of a
/// finite source so that witnesses can be enclosed.
fn detect(
    source: &dyn SequenceSource,
    search: &SearchArgs,
    reserve: usize,
) -> Result<Detection, CliError> {
    let cap = parse_positive_rational(&search.ratio_cap, "ratio-cap")?;
    if search.max_len < 4 {
        return Err(CliError::Usage("--max-len must be at least 4".into()));
    }
    let scan = match source.available() {
        Some(av) => search.max_len.min(av.saturating_sub(reserve)),
        None => search.max_len,
    };
    let kind: SearchKind = search.kind.into();
    let chain = if scan < 4 {
        criteria::WitnessChain::from_witnesses(Vec::new(), &cfw_core::FiniteWord::empty())
    } else {
        criteria::detect_chain(source, kind, scan, &cap).map_err(|e| CliError::Usage(e.to_string()))?
    };
    let section = DetectionSection {
        kind,
        scanned_len: scan,
        ratio_cap: exact::rational_string(&cap),
        witness_count: chain.len(),
        witnesses: chain
            .witnesses
            .iter()
            .enumerate()
            .map(|(i, w)| WitnessEntry::new(i + 1, w))
            .collect(),
        sup_v_over_u: chain.sup_v_over_u.clone(),
        sup_w_over_u: chain.sup_w_over_u.clone(),
        epsilon_stream: chain.epsilon_stream.clone(),
        periodicity_advisory: chain.periodicity.as_ref().map(PeriodicityAdvisory::new),
    };
    Ok(Detection {
        section,
        witnesses: chain.witnesses,
    })
}

fn quasi_section(loaded: &LoadedSpec, eps: Option<&str>) -> Result<Option<QuasiSection>, CliError> {
    let Sequence::QuasiPeriodic(spec) = &loaded.sequence else {
        return Ok(None);
    };
    if spec.blocks().len() < 2 {
        return Ok(None);
    }
    let (eps, eps_source) = match eps {
        Some(text) => (parse_positive_rational(text, "eps")?, "given"),
        None => {
            let ratios: Vec<BigRational> = spec
                .blocks()
                .windows(2)
                .map(|w| BigRational::new(BigInt::from(w[1].lambda), BigInt::from(w[0].lambda)))
                .collect();
            match growth_margin(&ratios) {
                Some(e) => (e, "ratio_infimum_minus_one"),
                None => (BigRational::from_integer(BigInt::from(1)), "fallback_one"),
            }
        }
    };
    let analysis =
        criteria::quasi_periodic_witnesses(spec, &eps).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Some(QuasiSection { eps_source, analysis }))
}

fn quasi_outcome(section: &Option<QuasiSection>) -> (Outcome, Vec<String>) {
    let Some(q) = section else {
        return (Outcome::Ok, Vec::new());
    };
    let mut messages = Vec::new();
    for e in &q.analysis.entries {
        if !e.square_prefix || !e.u_lower_bounds || e.w_bound.as_ref().is_some_and(|b| !b.holds) {
            messages.push(format!("quasi-periodic check failed at block {}", e.k));
        }
    }
    let outcome = if messages.is_empty() {
        Outcome::Ok
    } else {
        Outcome::ContractViolation
    };
    (outcome, messages)
}

pub fn cmd_detect(a: &DetectArgs) -> Result<Output, CliError> {
    let loaded = spec::load(&a.common.spec)?;
    let det = detect(loaded.sequence.source(), &a.search, 0)?;
    if a.common.format == Format::Lines {
        return Ok(Output {
            text: lines(det.section.witnesses.iter().map(|w| {
                format!(
                    "{} {} {} {} {}",
                    serde_json::to_value(w.kind).expect("kind").as_str().expect("string"),
                    w.prefix_len,
                    w.w_len,
                    w.u_len,
                    w.v_len
                )
            })),
            exit_code: 0,
        });
    }
    let quasi = quasi_section(&loaded, a.eps.as_deref())?;
    let (outcome, messages) = quasi_outcome(&quasi);
    let mut report = Report::new(
        "detect",
        Parameters {
            max_len: Some(a.search.max_len),
            kind: Some(a.search.kind.into()),
            ratio_cap: Some(det.section.ratio_cap.clone()),
            eps: quasi.as_ref().map(|q| exact::rational_string(&q.analysis.eps)),
            ..Default::default()
        },
        loaded.file,
    );
    report.detection = Some(det.section);
    report.quasi_periodic = quasi;
    report.status.messages = messages;
    Ok(finish(report, outcome))
}

fn witness_error(e: WitnessError) -> CliError {
    match e {
        WitnessError::ContFrac(ContFracError::BitLimit { bits, limit }) => CliError::Usage(format!(
            "arithmetic needs {bits}-bit integers, above {BITS_ENV}={limit}"
        )),
        other => CliError::Contract(other.to_string()),
    }
}

fn verification(
    source: &dyn SequenceSource,
    witnesses: &[Witness],
    guard_depth: usize,
    bit_limit: Option<u64>,
) -> Result<(VerificationSection, Outcome), CliError> {
    if guard_depth == 0 {
        return Err(CliError::Usage("--guard-depth must be at least 1".into()));
    }
    let mut counts = Counts::default();
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let mut unresolved = Vec::new();
    for (i, w) in witnesses.iter().enumerate() {
        let index = i + 1;
        let guard = match source.available() {
            Some(av) if av <= w.prefix_len => {
                counts.skipped += 1;
                skipped.push(SkippedEntry {
                    index,
                    reason: format!("source ends at letter {av}; nothing left to enclose the number"),
                });
                continue;
            }
            Some(av) => guard_depth.min(av - w.prefix_len),
            None => guard_depth,
        };
        let options = VerifyOptions {
            guard_depth: guard,
            bit_limit,
        };
        let record = witness::verify(source, w, &options).map_err(witness_error)?;
        let outcome = record.outcome();
        match outcome {
            Decision::Pass => counts.pass += 1,
            Decision::Fail => counts.fail += 1,
            Decision::Indeterminate => counts.indeterminate += 1,
        }
        for b in &record.bounds {
            if b.decision != Decision::Pass {
                unresolved.push(format!("{index}:{}", b.id));
            }
        }
        records.push(RecordEntry {
            index,
            guard_depth_used: guard,
            outcome,
            record,
        });
    }
    let outcome = if counts.fail > 0 {
        Outcome::ContractViolation
    } else if counts.indeterminate > 0 || counts.skipped > 0 {
        Outcome::Indeterminate
    } else {
        Outcome::Ok
    };
    Ok((
        VerificationSection {
            guard_depth_requested: guard_depth,
            counts,
            unresolved,
            records,
            skipped,
        },
        outcome,
    ))
}

fn diagnostics(
    source: &dyn SequenceSource,
    scanned_len: usize,
    section: &VerificationSection,
    bit_limit: Option<u64>,
) -> Result<DiagnosticsSection, CliError> {
    let delta = if scanned_len >= 1 {
        let prefix = source
            .prefix(scanned_len)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        ConvergentTable::with_bit_limit(&prefix, bit_limit)
            .map_err(|e| witness_error(WitnessError::ContFrac(e)))?;
        witness::estimate_delta(&prefix).ok()
    } else {
        None
    };
    let records: Vec<_> = section.records.iter().map(|r| r.record.clone()).collect();
    let (exponent_fit_f64, exponent_fit_note) = match witness::exponent_fit(&records) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut ids: Vec<&'static str> = Vec::new();
    for r in &records {
        for s in &r.scaled {
            if !ids.contains(&s.id) {
                ids.push(s.id);
            }
        }
    }
    let scaled_spread = ids
        .into_iter()
        .map(|id| {
            let ratios: Vec<_> = records.iter().filter_map(|r| r.scaled(id)).map(|s| &s.ratio).collect();
            let mids: Vec<BigRational> = ratios
                .iter()
                .filter(|r| r.lo().is_positive())
                .map(|r| r.midpoint())
                .collect();
            let max_over_min = match (mids.iter().max(), mids.iter().min()) {
                (Some(hi), Some(lo)) => Some(exact::rational_string(&(hi / lo))),
                _ => None,
            };
            let sup = ratios.iter().map(|r| r.hi()).max().map(exact::rational_string);
            let enclosing_zero = ratios.iter().filter(|r| r.contains_zero()).count();
            ScaledSpread {
                id,
                records: ratios.len(),
                enclosing_zero,
                sup,
                max_over_min,
            }
        })
        .collect();
    Ok(DiagnosticsSection {
        delta,
        exponent_fit_f64,
        exponent_fit_note,
        scaled_spread,
    })
}

pub fn cmd_verify(a: &VerifyArgs, bit_limit: Option<u64>) -> Result<Output, CliError> {
    if a.common.format == Format::Lines {
        return Err(CliError::Usage(
            "--format lines is only available for gen, complexity and detect".into(),
        ));
    }
    let loaded = spec::load(&a.common.spec)?;
    let source = loaded.sequence.source();
    let mut report_detection = None;
    let witnesses = match &a.witness {
        Some(path) => vec![spec::load_witness(path)?.resolve(source)?],
        None => {
            let det = detect(source, &a.search, 1)?;
            report_detection = Some(det.section);
            det.witnesses
        }
    };
    let (section, outcome) = verification(source, &witnesses, a.guard_depth, bit_limit)?;
    let scanned = report_detection
        .as_ref()
        .map(|d| d.scanned_len)
        .unwrap_or_else(|| witnesses.iter().map(|w| w.prefix_len).max().unwrap_or(0));
    let diag = diagnostics(source, scanned, &section, bit_limit)?;
    let mut report = Report::new(
        "verify",
        Parameters {
            max_len: a.witness.is_none().then_some(a.search.max_len),
            kind: a.witness.is_none().then_some(a.search.kind.into()),
            ratio_cap: a.witness.is_none().then(|| a.search.ratio_cap.clone()),
            guard_depth: Some(a.guard_depth),
            witness_file: Some(a.witness.is_some()),
            max_bigint_bits: bit_limit,
            ..Default::default()
        },
        loaded.file,
    );
    report.detection = report_detection;
    report.verification = Some(section);
    report.diagnostics = Some(diag);
    Ok(finish(report, outcome))
}

pub fn cmd_all(a: &AllArgs, bit_limit: Option<u64>) -> Result<Output, CliError> {
    if a.common.format == Format::Lines {
        return Err(CliError::Usage(
            "--format lines is only available for gen, complexity and detect".into(),
        ));
    }
    let loaded = spec::load(&a.common.spec)?;
    let source = loaded.sequence.source();
    let n = match (a.n, source.available()) {
        (Some(n), _) => n,
        (None, Some(av)) => a.search.max_len.min(av),
        (None, None) => a.search.max_len,
    };
    if n == 0 {
        return Err(CliError::Usage("the source is empty".into()));
    }
    let max_n = default_max_n(n, a.max_n)?;
    let prefix = prefix_of(&loaded, n)?;
    let complexity = complexity_section(&prefix, max_n)?;
    let det = detect(source, &a.search, 1)?;
    let quasi = quasi_section(&loaded, a.eps.as_deref())?;
    let (quasi_state, messages) = quasi_outcome(&quasi);
    let (section, verify_state) = verification(source, &det.witnesses, a.guard_depth, bit_limit)?;
    let diag = diagnostics(source, det.section.scanned_len, &section, bit_limit)?;
    let mut report = Report::new(
        "all",
        Parameters {
            n: Some(n),
            max_n: Some(max_n),
            max_len: Some(a.search.max_len),
            kind: Some(a.search.kind.into()),
            ratio_cap: Some(det.section.ratio_cap.clone()),
            guard_depth: Some(a.guard_depth),
            eps: quasi.as_ref().map(|q| exact::rational_string(&q.analysis.eps)),
            max_bigint_bits: bit_limit,
            ..Default::default()
        },
        loaded.file,
    );
    report.complexity = Some(complexity);
    report.detection = Some(det.section);
    report.quasi_periodic = quasi;
    report.verification = Some(section);
    report.diagnostics = Some(diag);
    report.status.messages = messages;
    Ok(finish(report, quasi_state.combine(verify_state)))
}
