//! Tight systems and tight matrices.
//!
//! A pair `(R, b)` is a tight system when the subset-indexed linear system
//! built by [`build_system`] admits only the all-ones solution; `R` is a tight
//! matrix when this holds for every `b > 0`. [`check_tight_system`] decides
//! the first question exactly with one LP, [`decide_tight_matrix`] layers the
//! known sufficient conditions over a seeded sampling of `b`.

mod decide;
mod system;
mod vars;
mod witness;

use thiserror::Error;

use crate::classes::ClassError;
use crate::numerics::{LpError, MatrixError};

pub use decide::{
    check_tight_system, decide_tight_matrix, sample_b, DecideOptions, ProofMethod,
    TightMatrixDecision, TightnessVerdict, DEFAULT_SAMPLES,
};
pub use system::{build_system, RowKind, SystemRow, TightnessSystem, UniquenessProgram};
pub use vars::{IndexSet, ParseKeyError, VarKey, MAX_DIM};
pub use witness::{
    default_epsilon, two_by_two_witness, verify_assignment, Assignment, ConstraintCheck,
    VerificationReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TightnessError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("dimension {0} exceeds the supported maximum of {max}", max = MAX_DIM)]
    DimensionTooLarge(usize),
    #[error("b has {got} entries, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("b[{}] is not positive", .0 + 1)]
    NonPositiveB(usize),
    #[error("epsilon must lie in (0, 1]")]
    InvalidEpsilon,
    #[error("missing value for {0}")]
    MissingVariable(VarKey),
    #[error("{0} does not belong to a system of dimension {1}")]
    UnknownVariable(VarKey, usize),
    #[error("construction requires a completely-S but not tight 2x2 matrix")]
    WrongCase,
    #[error("matrix is not completely-S (principal submatrix {} fails)", display_subset(.failing_subset))]
    NotCompletelyS { failing_subset: Vec<usize> },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

fn display_subset(subset: &[usize]) -> String {
    IndexSet::from_indices(subset.iter().copied()).to_string()
}
