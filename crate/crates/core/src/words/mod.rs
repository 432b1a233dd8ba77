//! Finite words over the positive integers.
//!
//! Letters are partial quotients, so every letter is at least 1 and the
//! alphabet is unbounded. Positions are 0-based throughout this module.

mod index;

pub use index::FactorIndex;

use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter {letter} at position {position} is not a positive integer")]
    NonPositiveLetter { position: usize, letter: i128 },
    #[error("rational power of the empty word")]
    EmptyBase,
    #[error("exponent {0} must be positive")]
    NonPositiveExponent(BigRational),
    #[error("exponent {exponent} times base length {base_len} is not an integer")]
    NonIntegralLength { exponent: BigRational, base_len: usize },
    #[error("length parameter {n} outside 1..={max}")]
    OutOfRange { n: usize, max: usize },
}

/// A finite sequence of positive integers.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteWord {
    letters: Vec<u64>,
}

impl FiniteWord {
    pub fn new(letters: Vec<u64>) -> Result<Self, WordError> {
        if let Some(position) = letters.iter().position(|&l| l == 0) {
            return Err(WordError::NonPositiveLetter { position, letter: 0 });
        }
        Ok(Self { letters })
    }

    /// Builds a word from signed input, rejecting anything below 1.
    pub fn from_signed(values: &[i64]) -> Result<Self, WordError> {
        let mut letters = Vec::with_capacity(values.len());
        for (position, &v) in values.iter().enumerate() {
            if v < 1 {
                return Err(WordError::NonPositiveLetter {
                    position,
                    letter: v as i128,
                });
            }
            letters.push(v as u64);
        }
        Ok(Self { letters })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn letters(&self) -> &[u64] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<u64> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<u64> {
        self.letters.get(i).copied()
    }

    pub fn factor(&self, range: Range<usize>) -> FiniteWord {
        FiniteWord {
            letters: self.letters[range].to_vec(),
        }
    }

    pub fn prefix(&self, n: usize) -> FiniteWord {
        self.factor(0..n.min(self.len()))
    }

    pub fn starts_with(&self, other: &FiniteWord) -> bool {
        self.letters.starts_with(&other.letters)
    }

    pub fn concat(&self, other: &FiniteWord) -> FiniteWord {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        FiniteWord { letters }
    }

    /// The letters in reverse order.
    pub fn mirror(&self) -> FiniteWord {
        let mut letters = self.letters.clone();
        letters.reverse();
        FiniteWord { letters }
    }

    pub fn is_palindrome(&self) -> bool {
        self.letters.iter().eq(self.letters.iter().rev())
    }

    /// `self` repeated `times` times.
    pub fn repeat(&self, times: usize) -> FiniteWord {
        FiniteWord {
            letters: self.letters.repeat(times),
        }
    }

    pub fn max_letter(&self) -> Option<u64> {
        self.letters.iter().copied().max()
    }
}

impl fmt::Debug for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.letters)
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.letters {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
            first = false;
        }
        Ok(())
    }
}

impl Serialize for FiniteWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.letters.serialize(serializer)
    }
}

impl TryFrom<Vec<u64>> for FiniteWord {
    type Error = WordError;

    fn try_from(letters: Vec<u64>) -> Result<Self, Self::Error> {
        FiniteWord::new(letters)
    }
}

/// Shorthand used all over the tests: panics on a zero letter.
#[macro_export]
macro_rules! word {
    ($($x:expr),* $(,)?) => {
        $crate::words::FiniteWord::new(vec![$($x as u64),*]).expect("letters must be >= 1")
    };
}

/// `z^r`: `z` repeated `floor(r)` times followed by the prefix of `z` of
/// length `(r - floor(r))|z|`.
pub fn rational_power(z: &FiniteWord, r: &BigRational) -> Result<FiniteWord, WordError> {
    if z.is_empty() {
        return Err(WordError::EmptyBase);
    }
    if !r.is_positive() {
        return Err(WordError::NonPositiveExponent(r.clone()));
    }
    let total = r * BigRational::from_integer(BigInt::from(z.len()));
    if !total.is_integer() {
        return Err(WordError::NonIntegralLength {
            exponent: r.clone(),
            base_len: z.len(),
        });
    }
    let total = total
        .to_integer()
        .to_usize()
        .expect("rational power length fits in memory");
    let letters = z.letters().iter().copied().cycle().take(total).collect();
    Ok(FiniteWord { letters })
}

/// Number of distinct length-`n` factors of `prefix`.
///
/// For a prefix of an infinite word this is a lower bound on the word's
/// complexity at `n`, and it never decreases as the prefix grows.
pub fn complexity(prefix: &FiniteWord, n: usize) -> Result<usize, WordError> {
    if n == 0 || n > prefix.len() {
        return Err(WordError::OutOfRange {
            n,
            max: prefix.len(),
        });
    }
    Ok(FactorIndex::new(prefix).distinct_count(n))
}

/// `complexity(prefix, n)` for every `n` in `1..=max_n`, sharing one index.
pub fn complexity_profile(prefix: &FiniteWord, max_n: usize) -> Result<Vec<usize>, WordError> {
    if max_n == 0 || max_n > prefix.len() {
        return Err(WordError::OutOfRange {
            n: max_n,
            max: prefix.len(),
        });
    }
    let index = FactorIndex::new(prefix);
    Ok((1..=max_n).map(|n| index.distinct_count(n)).collect())
}

fn check_len(prefix: &FiniteWord, len: usize) -> Result<(), WordError> {
    if len == 0 || len > prefix.len() {
        Err(WordError::OutOfRange {
            n: len,
            max: prefix.len(),
        })
    } else {
        Ok(())
    }
}

/// Smallest `(i, j)` with `j >= i + len` and equal length-`len` windows at
/// `i` and `j`.
pub fn find_disjoint_repeat(
    prefix: &FiniteWord,
    len: usize,
) -> Result<Option<(usize, usize)>, WordError> {
    check_len(prefix, len)?;
    Ok(FactorIndex::new(prefix).disjoint_repeat(len))
}

/// Smallest `(i, j)` with `j >= i + len` such that the window at `j` is the
/// mirror image of the window at `i`.
pub fn find_mirror_pair(
    prefix: &FiniteWord,
    len: usize,
) -> Result<Option<(usize, usize)>, WordError> {
    check_len(prefix, len)?;
    Ok(index::mirror_pair(prefix.letters(), len))
}

/// Advisory screen for eventual periodicity of a finite prefix.
///
/// Returns the smallest period `p` (with its smallest preperiod `r`) such
/// that `prefix[r..]` has period `p`, `r <= |prefix| / 2` and the periodic
/// tail spans at least four periods. Words whose factors never exceed
/// exponent 4 (Sturmian words, Thue–Morse) are never flagged; an
/// eventually periodic word is flagged once its prefix is long enough.
pub fn eventual_period(prefix: &FiniteWord) -> Option<(usize, usize)> {
    let a = prefix.letters();
    let n = a.len();
    for p in 1..=n / 4 {
        // walk back from the end while the period holds
        let mut r = n - p;
        while r > 0 && a[r - 1] == a[r - 1 + p] {
            r -= 1;
        }
        if 2 * r <= n && n - r >= 4 * p {
            return Some((r, p));
        }
    }
    None
}

/// Prefix of the Fibonacci word over {1, 2}: fixed point of 1 -> 12, 2 -> 1.
pub fn fibonacci_word(n: usize) -> FiniteWord {
    let mut letters: Vec<u64> = vec![1];
    while letters.len() < n {
        letters = letters
            .iter()
            .flat_map(|&l| if l == 1 { vec![1, 2] } else { vec![1] })
            .collect();
    }
    letters.truncate(n);
    FiniteWord { letters }
}
