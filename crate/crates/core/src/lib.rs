//! Ideal-convergence diagnostics on concretely represented ideals, plus an
//! exact finite-dimensional lab for positive normalized functionals that
//! vanish on an ideal.

pub mod analysis;
pub mod grammar;
pub mod ideal;
pub mod lab;
pub mod report;
pub mod seqset;
pub mod validate;

pub use ideal::{IdealError, IdealKind, IdealModel, MembershipEvidence, Verdict, WeightRule};
pub use seqset::{BlockRule, Comparator, SeqRule, SequenceSpec, SetRule, SetSpec, SpecError};
