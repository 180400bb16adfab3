//! Exact arithmetic: rational scalars, dense rational matrices and a simplex
//! LP solver.

pub mod lp;
pub mod matrix;
pub mod rational;

pub use lp::{lp_solve, Bounds, Constraint, LinearProgram, LpError, LpOutcome, Relation};
pub use matrix::{MatrixError, RatMatrix};
pub use rational::{
    format_rational, int, parse_rational, parse_rational_list, rat, ParseRationalError, Rational,
};
