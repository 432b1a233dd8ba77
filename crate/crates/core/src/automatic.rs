//! k-automatic sequences of positive integers.
//!
//! A [`Dfao`] reads the base-k digits of an index `ell >= 1`, most
//! significant digit first and without leading zeros, and emits the output
//! attached to the state it ends in.

use thiserror::Error;

use crate::words::FiniteWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("base must be at least 2, got {0}")]
    Base(u32),
    #[error("automaton has no states")]
    NoStates,
    #[error("initial state {0} does not exist")]
    Initial(usize),
    #[error("state {state} has {found} transitions, expected {expected}")]
    Arity {
        state: usize,
        found: usize,
        expected: usize,
    },
    #[error("transition from state {state} on digit {digit} targets missing state {target}")]
    Target {
        state: usize,
        digit: usize,
        target: usize,
    },
    #[error("output table has {found} entries for {expected} states")]
    OutputCount { found: usize, expected: usize },
    #[error("state {state} outputs {value}; outputs must be >= 1")]
    Output { state: usize, value: u64 },
}

/// Deterministic finite automaton with output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfao {
    base: u32,
    initial: usize,
    // transitions[state][digit]
    transitions: Vec<Vec<usize>>,
    outputs: Vec<u64>,
}

impl Dfao {
    pub fn new(
        base: u32,
        initial: usize,
        transitions: Vec<Vec<usize>>,
        outputs: Vec<u64>,
    ) -> Result<Self, AutomatonError> {
        if base < 2 {
            return Err(AutomatonError::Base(base));
        }
        if transitions.is_empty() {
            return Err(AutomatonError::NoStates);
        }
        let states = transitions.len();
        if initial >= states {
            return Err(AutomatonError::Initial(initial));
        }
        for (state, row) in transitions.iter().enumerate() {
            if row.len() != base as usize {
                return Err(AutomatonError::Arity {
                    state,
                    found: row.len(),
                    expected: base as usize,
                });
            }
            if let Some((digit, &target)) = row.iter().enumerate().find(|(_, &t)| t >= states) {
                return Err(AutomatonError::Target {
                    state,
                    digit,
                    target,
                });
            }
        }
        if outputs.len() != states {
            return Err(AutomatonError::OutputCount {
                found: outputs.len(),
                expected: states,
            });
        }
        if let Some((state, &value)) = outputs.iter().enumerate().find(|(_, &v)| v == 0) {
            return Err(AutomatonError::Output { state, value });
        }
        Ok(Self {
            base,
            initial,
            transitions,
            outputs,
        })
    }

    /// Thue–Morse over {1, 2}: `1 + (binary digit sum of ell mod 2)`.
    pub fn thue_morse() -> Self {
        Self::new(2, 0, vec![vec![0, 1], vec![1, 0]], vec![1, 2]).expect("valid automaton")
    }

    /// Period-doubling over {1, 2}: `1 + (2-adic valuation of ell mod 2)`.
    pub fn period_doubling() -> Self {
        // state 0: even number of trailing zeros so far, state 1: odd
        Self::new(2, 0, vec![vec![1, 0], vec![0, 0]], vec![1, 2]).expect("valid automaton")
    }

    /// Single state emitting `value` everywhere.
    pub fn constant(base: u32, value: u64) -> Result<Self, AutomatonError> {
        Self::new(base, 0, vec![vec![0; base as usize]], vec![value])
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn transition(&self, state: usize, digit: usize) -> usize {
        self.transitions[state][digit]
    }

    pub fn output(&self, state: usize) -> u64 {
        self.outputs[state]
    }

    /// State reached after reading the base-k digits of `ell`.
    pub fn run(&self, ell: u64) -> usize {
        let k = u64::from(self.base);
        let mut digits = Vec::with_capacity(64);
        let mut x = ell;
        while x > 0 {
            digits.push((x % k) as usize);
            x /= k;
        }
        digits
            .iter()
            .rev()
            .fold(self.initial, |state, &d| self.transitions[state][d])
    }

    /// The `ell`-th term, `ell >= 1`.
    pub fn term(&self, ell: u64) -> u64 {
        assert!(ell >= 1, "automatic sequences are indexed from 1");
        self.outputs[self.run(ell)]
    }

    /// `a_1 ... a_n`.
    pub fn prefix(&self, n: usize) -> FiniteWord {
        let letters = (1..=n as u64).map(|ell| self.term(ell)).collect();
        FiniteWord::new(letters).expect("outputs are validated positive")
    }
}
