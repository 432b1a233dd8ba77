//! Pull-based producers of partial-quotient prefixes.

use thiserror::Error;

use crate::automatic::Dfao;
use crate::words::FiniteWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SourceError {
    #[error("requested {requested} letters but the source only has {available}")]
    Exhausted { requested: usize, available: usize },
    #[error("period must be non-empty")]
    EmptyPeriod,
}

/// Something that can materialize `a_1 ... a_n`.
pub trait SequenceSource {
    fn prefix(&self, n: usize) -> Result<FiniteWord, SourceError>;

    /// Number of letters available, `None` when unbounded.
    fn available(&self) -> Option<usize>;
}

fn check_available(requested: usize, available: usize) -> Result<(), SourceError> {
    if requested > available {
        Err(SourceError::Exhausted {
            requested,
            available,
        })
    } else {
        Ok(())
    }
}

impl SequenceSource for FiniteWord {
    fn prefix(&self, n: usize) -> Result<FiniteWord, SourceError> {
        check_available(n, self.len())?;
        Ok(FiniteWord::prefix(self, n))
    }

    fn available(&self) -> Option<usize> {
        Some(self.len())
    }
}

impl SequenceSource for Dfao {
    fn prefix(&self, n: usize) -> Result<FiniteWord, SourceError> {
        Ok(Dfao::prefix(self, n))
    }

    fn available(&self) -> Option<usize> {
        None
    }
}

impl<S: SequenceSource + ?Sized> SequenceSource for &S {
    fn prefix(&self, n: usize) -> Result<FiniteWord, SourceError> {
        (**self).prefix(n)
    }

    fn available(&self) -> Option<usize> {
        (**self).available()
    }
}

impl<S: SequenceSource + ?Sized> SequenceSource for Box<S> {
    fn prefix(&self, n: usize) -> Result<FiniteWord, SourceError> {
        (**self).prefix(n)
    }

    fn available(&self) -> Option<usize> {
        (**self).available()
    }
}

/// `preperiod` followed by `period` forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    preperiod: FiniteWord,
    period: FiniteWord,
}

impl EventuallyPeriodic {
    pub fn new(preperiod: FiniteWord, period: FiniteWord) -> Result<Self, SourceError> {
        if period.is_empty() {
            return Err(SourceError::EmptyPeriod);
        }
        Ok(Self { preperiod, period })
    }

    pub fn preperiod(&self) -> &FiniteWord {
        &self.preperiod
    }

    pub fn period(&self) -> &FiniteWord {
        &self.period
    }
}

impl SequenceSource for EventuallyPeriodic {
    fn prefix(&self, n: usize) -> Result<FiniteWord, SourceError> {
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
        Ok(FiniteWord::new(letters).expect("letters come from valid words"))
    }

    fn available(&self) -> Option<usize> {
        None
    }
}
