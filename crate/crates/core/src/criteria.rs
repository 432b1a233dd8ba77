//! Combinatorial witnesses on finite prefixes.
//!
//! A witness factors a prefix as `W U V U` (repeat) or `W U V mirror(U)`
//! (mirror). Chains of witnesses with growing `|U|` and bounded
//! `|V|/|U|`, `|W|/|U|` are the finite evidence this crate can offer for
//! the combinatorial transcendence conditions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact;
use crate::source::{SequenceSource, SourceError};
use crate::words::{eventual_period, FactorIndex, FiniteWord, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriteriaError {
    #[error("no length-{n} block repeats within the first {window} letters")]
    NotFound { n: usize, window: usize },
    #[error("need {needed} letters, prefix has {available}")]
    PrefixTooShort { needed: usize, available: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("block {0} has repetition count 0")]
    ZeroRepetition(usize),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Repeat,
    Mirror,
}

/// Which factorizations `detect_chain` looks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchKind {
    Repeat,
    Mirror,
    Either,
}

/// A factorization of the first `prefix_len` letters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    #[serde(rename = "W")]
    pub w: FiniteWord,
    #[serde(rename = "U")]
    pub u: FiniteWord,
    #[serde(rename = "V")]
    pub v: FiniteWord,
    pub prefix_len: usize,
    #[serde(serialize_with = "exact::ser_rational")]
    pub v_over_u: BigRational,
    #[serde(serialize_with = "exact::ser_rational")]
    pub w_over_u: BigRational,
}

impl Witness {
    /// Panics on an empty `U`.
    pub fn new(kind: WitnessKind, w: FiniteWord, u: FiniteWord, v: FiniteWord) -> Self {
        assert!(!u.is_empty(), "witness block U must be non-empty");
        let ul = BigInt::from(u.len());
        Self {
            kind,
            prefix_len: w.len() + 2 * u.len() + v.len(),
            v_over_u: BigRational::new(BigInt::from(v.len()), ul.clone()),
            w_over_u: BigRational::new(BigInt::from(w.len()), ul),
            w,
            u,
            v,
        }
    }

    /// Cuts `W U V U'` out of `prefix` from the three lengths.
    pub fn from_lengths(
        kind: WitnessKind,
        prefix: &FiniteWord,
        w: usize,
        u: usize,
        v: usize,
    ) -> Result<Self, CriteriaError> {
        if u == 0 {
            return Err(CriteriaError::InvalidParameter("|U| must be positive".into()));
        }
        let needed = w + 2 * u + v;
        if prefix.len() < needed {
            return Err(CriteriaError::PrefixTooShort {
                needed,
                available: prefix.len(),
            });
        }
        Ok(Self::new(
            kind,
            prefix.factor(0..w),
            prefix.factor(w..w + u),
            prefix.factor(w + u..w + u + v),
        ))
    }

    /// `W U V U` or `W U V mirror(U)`.
    pub fn reconstruct(&self) -> FiniteWord {
        let second = match self.kind {
            WitnessKind::Repeat => self.u.clone(),
            WitnessKind::Mirror => self.u.mirror(),
        };
        self.w.concat(&self.u).concat(&self.v).concat(&second)
    }

    /// Whether `word` begins with the factorization.
    pub fn holds_in(&self, word: &FiniteWord) -> bool {
        word.starts_with(&self.reconstruct())
    }

    pub fn lengths(&self) -> (usize, usize, usize) {
        (self.w.len(), self.u.len(), self.v.len())
    }
}

/// Witnesses with strictly increasing `|U|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessChain {
    pub witnesses: Vec<Witness>,
    /// Supremum of `|V|/|U|` along the chain.
    #[serde(serialize_with = "exact::ser_opt_rational")]
    pub sup_v_over_u: Option<BigRational>,
    /// Supremum of `|W|/|U|` along the chain.
    #[serde(serialize_with = "exact::ser_opt_rational")]
    pub sup_w_over_u: Option<BigRational>,
    /// `|U| / prefix_len` per witness.
    #[serde(serialize_with = "exact::ser_rationals")]
    pub epsilon_stream: Vec<BigRational>,
    /// `(preperiod, period)` if the scanned prefix looks eventually
    /// periodic. Advisory only.
    pub periodicity: Option<Periodicity>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Periodicity {
    pub preperiod: usize,
    pub period: usize,
}

impl WitnessChain {
    pub fn from_witnesses(witnesses: Vec<Witness>, scanned: &FiniteWord) -> Self {
        let sup_v_over_u = witnesses.iter().map(|w| w.v_over_u.clone()).max();
        let sup_w_over_u = witnesses.iter().map(|w| w.w_over_u.clone()).max();
        let epsilon_stream = witnesses
            .iter()
            .map(|w| BigRational::new(BigInt::from(w.u.len()), BigInt::from(w.prefix_len)))
            .collect();
        let periodicity =
            eventual_period(scanned).map(|(preperiod, period)| Periodicity { preperiod, period });
        Self {
            witnesses,
            sup_v_over_u,
            sup_w_over_u,
            epsilon_stream,
            periodicity,
        }
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// Extra data for the overlapping case of the pigeonhole extraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapNormalization {
    /// Shift between the two occurrences.
    pub shift: usize,
    /// `U` is the length-`shift` block raised to this power.
    pub x: u64,
    /// Remaining exponent, `0 <= y < 2`.
    #[serde(serialize_with = "exact::ser_rational")]
    pub y: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PigeonholeWitness {
    pub witness: Witness,
    /// 0-based starts of the two occurrences of the repeated block.
    pub first: usize,
    pub second: usize,
    pub overlap: Option<OverlapNormalization>,
}

/// Finds a length-`n` block occurring twice in the first `(c + 1) n`
/// letters and turns the two occurrences into a repeat witness.
///
/// Non-overlapping occurrences give `U` = the block and `V` the gap;
/// overlapping ones give `U = X'^x` where `X'` is the shift and `V` is empty.
/// Either way `|W| + |V| <= (3c + 1)|U|` and `|U| >= n / 3`.
pub fn pigeonhole_extract(
    prefix: &FiniteWord,
    n: usize,
    c: usize,
) -> Result<PigeonholeWitness, CriteriaError> {
    if n == 0 {
        return Err(CriteriaError::InvalidParameter("n must be positive".into()));
    }
    if c < 2 {
        return Err(CriteriaError::InvalidParameter("c must be at least 2".into()));
    }
    let window = (c + 1) * n;
    if prefix.len() < window {
        return Err(CriteriaError::PrefixTooShort {
            needed: window,
            available: prefix.len(),
        });
    }
    let head = prefix.prefix(window);
    let (i, j) = FactorIndex::new(&head)
        .repeated_factor(n)
        .ok_or(CriteriaError::NotFound { n, window })?;
    if j >= i + n {
        let witness = Witness::new(
            WitnessKind::Repeat,
            head.factor(0..i),
            head.factor(i..i + n),
            head.factor(i + n..j),
        );
        return Ok(PigeonholeWitness {
            witness,
            first: i,
            second: j,
            overlap: None,
        });
    }
    // X' X = X'^(1 + n/d) = (X'^x)^2 X'^y with 0 <= y < 2
    let d = j - i;
    let exponent = BigRational::new(BigInt::from(d + n), BigInt::from(d));
    let x = (d + n) / (2 * d);
    let y = &exponent - BigRational::from_integer(BigInt::from(2 * x));
    let witness = Witness::new(
        WitnessKind::Repeat,
        head.factor(0..i),
        head.factor(i..i + d).repeat(x),
        FiniteWord::empty(),
    );
    Ok(PigeonholeWitness {
        witness,
        first: i,
        second: j,
        overlap: Some(OverlapNormalization {
            shift: d,
            x: x as u64,
            y,
        }),
    })
}

fn within_cap(len: usize, u: usize, cap: &BigRational) -> bool {
    BigRational::new(BigInt::from(len), BigInt::from(u)) <= *cap
}

/// Best `(w, u, v)` for a repeat factorization of the `n`-prefix, given
/// `suffix_match[e]` = longest common suffix of `a[..e]` and `a[..n]`.
fn best_repeat(n: usize, suffix_match: &[usize], cap: &BigRational) -> Option<(usize, usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for e in 1..n {
        let u = suffix_match[e].min(n - e).min(e);
        if u == 0 {
            continue;
        }
        let (w, v) = (e - u, n - e - u);
        if !within_cap(w, u, cap) || !within_cap(v, u, cap) {
            continue;
        }
        if better(&(w, u, v), &best) {
            best = Some((w, u, v));
        }
    }
    best
}

/// Best `(w, u, v)` for a mirror factorization of the `n`-prefix, given
/// `mirror_match[i]` = number of `j` with `a[i + j] == a[n - 1 - j]`
/// holding for every smaller `j`.
fn best_mirror(n: usize, mirror_match: &[usize], cap: &BigRational) -> Option<(usize, usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..n {
        let u = mirror_match[i].min((n - i) / 2);
        if u == 0 {
            continue;
        }
        let (w, v) = (i, n - 2 * u - i);
        if !within_cap(w, u, cap) || !within_cap(v, u, cap) {
            continue;
        }
        if better(&(w, u, v), &best) {
            best = Some((w, u, v));
        }
    }
    best
}

/// Larger `u`, then smaller `w`, then smaller `v`.
fn better(cand: &(usize, usize, usize), best: &Option<(usize, usize, usize)>) -> bool {
    match best {
        None => true,
        Some((bw, bu, bv)) => {
            let (w, u, v) = *cand;
            (u, std::cmp::Reverse(w), std::cmp::Reverse(v))
                > (*bu, std::cmp::Reverse(*bw), std::cmp::Reverse(*bv))
        }
    }
}

/// Scans prefix lengths `4..=max_len` and keeps, at each length, the
/// factorization with the largest `|U|` whose ratios `|V|/|U|` and
/// `|W|/|U|` stay within `ratio_cap`. A witness joins the chain only if its
/// `|U|` beats the previous one. For `SearchKind::Either` a repeat wins a
/// tie against a mirror.
///
/// Sources shorter than `max_len` are scanned as far as they go.
pub fn detect_chain(
    source: &dyn SequenceSource,
    kind: SearchKind,
    max_len: usize,
    ratio_cap: &BigRational,
) -> Result<WitnessChain, CriteriaError> {
    if max_len < 4 {
        return Err(CriteriaError::InvalidParameter("max_len must be at least 4".into()));
    }
    if !ratio_cap.is_positive() {
        return Err(CriteriaError::InvalidParameter("ratio_cap must be positive".into()));
    }
    let len = source.available().map_or(max_len, |a| a.min(max_len));
    let prefix = source.prefix(len)?;
    let a = prefix.letters();
    let want_repeat = kind != SearchKind::Mirror;
    let want_mirror = kind != SearchKind::Repeat;

    // suffix_match[e] for the current n; mirror_match[i] likewise
    let mut suffix_match = vec![0usize; len + 1];
    let mut mirror_match = vec![0usize; len + 1];
    let mut witnesses: Vec<Witness> = Vec::new();
    let mut last_u = 0;
    for n in 1..=len {
        let last = a[n - 1];
        // L(e, n) = a[e-1] == a[n-1] ? L(e-1, n-1) + 1 : 0, walking e down
        for e in (1..n).rev() {
            suffix_match[e] = if a[e - 1] == last {
                suffix_match[e - 1] + 1
            } else {
                0
            };
        }
        suffix_match[0] = 0;
        // M(i, n) = a[i] == a[n-1] ? 1 + M(i+1, n-1) : 0, walking i up
        for i in 0..n {
            mirror_match[i] = if a[i] == last {
                1 + if i + 1 < n - 1 { mirror_match[i + 1] } else { 0 }
            } else {
                0
            };
        }
        if n < 4 {
            continue;
        }
        let rep = if want_repeat {
            best_repeat(n, &suffix_match, ratio_cap)
        } else {
            None
        };
        let mir = if want_mirror {
            best_mirror(n, &mirror_match, ratio_cap)
        } else {
            None
        };
        let chosen = match (rep, mir) {
            (Some(r), Some(m)) => {
                if better(&m, &Some(r)) {
                    Some((WitnessKind::Mirror, m))
                } else {
                    Some((WitnessKind::Repeat, r))
                }
            }
            (Some(r), None) => Some((WitnessKind::Repeat, r)),
            (None, Some(m)) => Some((WitnessKind::Mirror, m)),
            (None, None) => None,
        };
        if let Some((k, (w, u, v))) = chosen {
            if u > last_u {
                witnesses.push(Witness::from_lengths(k, &prefix, w, u, v)?);
                last_u = u;
            }
        }
    }
    Ok(WitnessChain::from_witnesses(witnesses, &prefix))
}

/// One repeated block of a quasi-periodic expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuasiBlock {
    pub block: FiniteWord,
    pub lambda: u64,
}

/// `head`, then each block repeated `lambda` times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuasiPeriodicSpec {
    head: FiniteWord,
    blocks: Vec<QuasiBlock>,
}

impl QuasiPeriodicSpec {
    pub fn new(head: FiniteWord, blocks: Vec<QuasiBlock>) -> Result<Self, CriteriaError> {
        for (k, b) in blocks.iter().enumerate() {
            if b.block.is_empty() {
                return Err(CriteriaError::EmptyBlock(k));
            }
            if b.lambda == 0 {
                return Err(CriteriaError::ZeroRepetition(k));
            }
        }
        Ok(Self { head, blocks })
    }

    pub fn head(&self) -> &FiniteWord {
        &self.head
    }

    pub fn blocks(&self) -> &[QuasiBlock] {
        &self.blocks
    }

    /// 1-based index where block `k` starts; `n_0 = |head| + 1`.
    pub fn start(&self, k: usize) -> usize {
        self.head.len()
            + 1
            + self.blocks[..k]
                .iter()
                .map(|b| b.lambda as usize * b.block.len())
                .sum::<usize>()
    }

    pub fn total_len(&self) -> usize {
        self.start(self.blocks.len()) - 1
    }

    pub fn generate(&self) -> FiniteWord {
        self.blocks.iter().fold(self.head.clone(), |acc, b| {
            acc.concat(&b.block.repeat(b.lambda as usize))
        })
    }
}

impl SequenceSource for QuasiPeriodicSpec {
    fn prefix(&self, n: usize) -> Result<FiniteWord, SourceError> {
        if n > self.total_len() {
            return Err(SourceError::Exhausted {
                requested: n,
                available: self.total_len(),
            });
        }
        Ok(self.generate().prefix(n))
    }

    fn available(&self) -> Option<usize> {
        Some(self.total_len())
    }
}

/// Checks on `|W_k|` that apply past the growth threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrefixLengthBound {
    /// Length of everything before the block at the growth threshold.
    pub n0_prime: usize,
    /// `n0_prime + r_k lambda_k / eps`.
    #[serde(serialize_with = "exact::ser_rational")]
    pub geometric_bound: BigRational,
    /// `2 r_k lambda_k / eps`.
    #[serde(serialize_with = "exact::ser_rational")]
    pub final_bound: BigRational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuasiEntry {
    pub k: usize,
    /// 1-based start of block `k`.
    pub n_k: usize,
    pub r_k: usize,
    pub lambda_k: u64,
    pub w_len: usize,
    pub u_len: usize,
    /// The generated word begins with `W_k U_k U_k`.
    pub square_prefix: bool,
    /// `|U_k| >= (lambda_k - 1) r_k / 2 >= lambda_k r_k / 4`.
    pub u_lower_bounds: bool,
    /// Present when the growth preconditions hold at `k`.
    pub w_bound: Option<PrefixLengthBound>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuasiPeriodicReport {
    #[serde(serialize_with = "exact::ser_rational")]
    pub eps: BigRational,
    pub entries: Vec<QuasiEntry>,
    /// `lambda_{k+1} / lambda_k`.
    #[serde(serialize_with = "exact::ser_rationals")]
    pub ratio_stream: Vec<BigRational>,
    #[serde(serialize_with = "exact::ser_opt_rational")]
    pub ratio_infimum: Option<BigRational>,
    /// Smallest `k0` with `lambda_{k0} > 2` and
    /// `lambda_{h+1} >= (1 + eps) lambda_h` for all `h >= k0`.
    pub growth_start: Option<usize>,
    /// All blocks share one primitive root, so the word is periodic past
    /// the head.
    pub degenerate: bool,
    pub chain: WitnessChain,
}

fn primitive_root(block: &FiniteWord) -> FiniteWord {
    let a = block.letters();
    let n = a.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| a[i] == a[i - p]))
        .map(|p| block.prefix(p))
        .expect("p = n always works")
}

/// Builds `W_k = a_1 ... a_{n_k - 1}` and `U_k = block_k^[lambda_k / 2]`
/// for each block with `lambda_k > 2` and checks the inequalities that
/// make them a repeat witness chain.
pub fn quasi_periodic_witnesses(
    spec: &QuasiPeriodicSpec,
    eps: &BigRational,
) -> Result<QuasiPeriodicReport, CriteriaError> {
    if spec.blocks.len() < 2 {
        return Err(CriteriaError::InvalidParameter("need at least two blocks".into()));
    }
    if !eps.is_positive() {
        return Err(CriteriaError::InvalidParameter("eps must be positive".into()));
    }
    let word = spec.generate();
    let blocks = &spec.blocks;
    let lambda = |k: usize| BigRational::from_integer(BigInt::from(blocks[k].lambda));
    let ratio_stream: Vec<BigRational> = (0..blocks.len() - 1)
        .map(|k| lambda(k + 1) / lambda(k))
        .collect();
    let ratio_infimum = ratio_stream.iter().min().cloned();

    let growth = BigRational::one() + eps;
    let grows_from = |k: usize| (k..blocks.len() - 1).all(|h| lambda(h + 1) >= &growth * lambda(h));
    let growth_start = (0..blocks.len()).find(|&k| blocks[k].lambda > 2 && grows_from(k));

    let mut entries = Vec::new();
    let mut chain_witnesses: Vec<Witness> = Vec::new();
    for (k, b) in blocks.iter().enumerate() {
        if b.lambda <= 2 {
            continue;
        }
        let n_k = spec.start(k);
        let r_k = b.block.len();
        let w = word.prefix(n_k - 1);
        let u = b.block.repeat((b.lambda / 2) as usize);
        let witness = Witness::new(WitnessKind::Repeat, w, u, FiniteWord::empty());
        let square_prefix = witness.holds_in(&word);
        let u_len = witness.u.len();
        let lk = b.lambda as usize;
        // 4|U| >= 2(lambda - 1) r >= lambda r, with lambda >= 3
        let u_lower_bounds = 2 * u_len >= (lk - 1) * r_k && 2 * (lk - 1) * r_k >= lk * r_k;

        let w_bound = growth_start
            .filter(|&k0| k > k0 && blocks[k0..k].iter().all(|h| h.block.len() <= r_k))
            .and_then(|k0| {
                let n0_prime = spec.start(k0);
                let rl = BigRational::from_integer(BigInt::from(r_k * lk));
                let tail = &rl / eps;
                let n0 = BigRational::from_integer(BigInt::from(n0_prime));
                // the last step needs n0' <= r_k lambda_k / eps
                (n0 <= tail).then(|| {
                    let geometric_bound = &n0 + &tail;
                    let final_bound = BigRational::from_integer(BigInt::from(2)) * &tail;
                    let wl = BigRational::from_integer(BigInt::from(n_k - 1));
                    let holds = wl <= geometric_bound && geometric_bound <= final_bound;
                    PrefixLengthBound {
                        n0_prime,
                        geometric_bound,
                        final_bound,
                        holds,
                    }
                })
            });

        entries.push(QuasiEntry {
            k,
            n_k,
            r_k,
            lambda_k: b.lambda,
            w_len: n_k - 1,
            u_len,
            square_prefix,
            u_lower_bounds,
            w_bound,
        });
        if chain_witnesses.last().is_none_or(|p| p.u.len() < u_len) {
            chain_witnesses.push(witness);
        }
    }

    let first_root = primitive_root(&blocks[0].block);
    let degenerate = blocks.iter().all(|b| primitive_root(&b.block) == first_root);
    Ok(QuasiPeriodicReport {
        eps: eps.clone(),
        entries,
        ratio_stream,
        ratio_infimum,
        growth_start,
        degenerate,
        chain: WitnessChain::from_witnesses(chain_witnesses, &word),
    })
}

/// An occurrence of `base^exponent` at `position` (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerOccurrence {
    pub position: usize,
    pub base: FiniteWord,
}

/// For every position, the longest `U` such that `U^exponent` occurs there
/// (`exponent > 1`; `exponent * |U|` must be an integer).
pub fn find_power_occurrences(
    prefix: &FiniteWord,
    exponent: &BigRational,
) -> Result<Vec<PowerOccurrence>, CriteriaError> {
    if *exponent <= BigRational::one() {
        return Err(CriteriaError::InvalidParameter("exponent must exceed 1".into()));
    }
    let n = prefix.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let step = exponent
        .denom()
        .to_usize()
        .ok_or_else(|| CriteriaError::InvalidParameter("exponent denominator too large".into()))?;
    let index = FactorIndex::new(prefix);
    let span = |u: usize| -> Option<usize> {
        let total = exponent * BigRational::from_integer(BigInt::from(u));
        debug_assert!(total.is_integer());
        total.to_integer().to_usize()
    };
    let mut out = Vec::new();
    for i in 0..n {
        let room = n - i;
        // largest multiple of step with exponent * u <= room
        let max_u = (BigRational::from_integer(BigInt::from(room)) / exponent)
            .floor()
            .to_integer()
            .to_usize()
            .unwrap_or(0);
        let mut u = max_u - max_u % step;
        while u >= step && u > 0 {
            let total = span(u).expect("bounded by room");
            if index.lce(i, i + u) >= total - u {
                out.push(PowerOccurrence {
                    position: i,
                    base: prefix.factor(i..i + u),
                });
                break;
            }
            u -= step;
        }
    }
    Ok(out)
}

/// Smallest ratio in `ratios` minus one, when that is positive.
pub fn growth_margin(ratios: &[BigRational]) -> Option<BigRational> {
    ratios
        .iter()
        .min()
        .map(|m| m - BigRational::one())
        .filter(|e| e.is_positive())
}
