//! Exact tools for continued fractions whose partial quotients form a
//! structured word: word combinatorics, automatic sequences, convergent
//! arithmetic, witness detection and certified inequality checks.

pub mod automatic;
pub mod contfrac;
pub mod criteria;
pub mod exact;
pub mod source;
pub mod witness;
pub mod words;

pub use automatic::Dfao;
pub use contfrac::{ConvergentTable, Decision, QuadraticApproximant, RationalInterval};
pub use criteria::{QuasiPeriodicSpec, SearchKind, Witness, WitnessChain, WitnessKind};
pub use source::{EventuallyPeriodic, SequenceSource};
pub use witness::{VerificationRecord, VerifyOptions};
pub use words::{FactorIndex, FiniteWord};
