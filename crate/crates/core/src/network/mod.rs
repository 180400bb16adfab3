//! Multiclass networks with static buffer priorities and their reflection
//! matrices.

mod derive;
mod spec;

use thiserror::Error;

use crate::numerics::MatrixError;

pub use derive::{
    build_a, build_a_inverse, build_b, build_f, build_q, build_w, derive, priority_sets,
    reflection_matrix, relabel_stations, schur_reflection, traffic, Derivation, PrioritySets,
    TrafficReport,
};
pub use spec::{
    reentrant_spec, validate_spec, Discipline, NetworkSpec, ValidationIssue, ValidationReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("invalid network:\n{0}")]
    Invalid(ValidationReport),
    #[error("invalid reentrant line: {0}")]
    Reentrant(String),
    #[error("Q is singular, so the reflection matrix is undefined")]
    QSingular,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}
