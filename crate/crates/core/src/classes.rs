//! Membership tests for the matrix classes that govern reflected Brownian
//! motions: completely-S, P and M matrices, positive definiteness, the
//! complete sign classification of 2x2 reflection matrices and the banded
//! sign pattern that certifies tightness in any dimension.
//!
//! The completely-S and P tests enumerate all `2^d - 1` principal
//! submatrices, so they are guarded by a dimension cap
//! ([`DEFAULT_DIM_CAP`] unless configured otherwise). Subsets are visited in
//! lexicographic order of their sorted index lists, and the first failing
//! subset is reported regardless of the [`Execution`] strategy.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exec::Execution;
use crate::numerics::{LinearProgram, LpOutcome, MatrixError, RatMatrix, Rational, Relation};

pub const DEFAULT_DIM_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("dimension {dim} exceeds the principal-submatrix enumeration cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("expected a 2x2 matrix, got {rows}x{cols}")]
    NotTwoByTwo { rows: usize, cols: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassOptions {
    pub dim_cap: usize,
    pub exec: Execution,
}

impl Default for ClassOptions {
    fn default() -> Self {
        Self {
            dim_cap: DEFAULT_DIM_CAP,
            exec: Execution::default(),
        }
    }
}

/// Outcome of an enumerating class test. `failing_subset` (0-based, sorted)
/// is present exactly when `holds` is false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassCheck {
    pub holds: bool,
    pub failing_subset: Option<Vec<usize>>,
}

impl ClassCheck {
    fn from_failure(failing_subset: Option<Vec<usize>>) -> Self {
        Self {
            holds: failing_subset.is_none(),
            failing_subset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub is_completely_s: bool,
    pub is_p: bool,
    pub is_m: bool,
    pub is_positive_definite: bool,
    /// First principal submatrix without a positive vector mapped to a positive vector.
    pub completely_s_failing_subset: Option<Vec<usize>>,
    /// First principal submatrix with a nonpositive determinant.
    pub p_failing_subset: Option<Vec<usize>>,
}

/// Sign classification of a 2x2 reflection matrix. Exactly one case holds
/// for every 2x2 rational matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoByTwoCase {
    /// Off-diagonal entries nonpositive, determinant positive: tight.
    TightNonpositiveCoupling,
    /// Off-diagonal entries of strictly opposite signs: tight.
    TightMixedSigns,
    /// Nonnegative, not both zero, off-diagonal entries: completely-S but not tight.
    CompletelySNotTight,
    /// Off-diagonal entries nonpositive, determinant nonpositive: not completely-S.
    NotCompletelyS,
    /// Some diagonal entry is not positive.
    DiagonalNotPositive,
}

impl TwoByTwoCase {
    pub fn is_tight(self) -> bool {
        matches!(self, Self::TightNonpositiveCoupling | Self::TightMixedSigns)
    }
}

fn square_dim(m: &RatMatrix) -> Result<usize, ClassError> {
    if m.is_square() {
        Ok(m.rows())
    } else {
        Err(MatrixError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        }
        .into())
    }
}

fn capped_dim(m: &RatMatrix, opts: &ClassOptions) -> Result<usize, ClassError> {
    let d = square_dim(m)?;
    if d > opts.dim_cap {
        return Err(ClassError::DimensionCap {
            dim: d,
            cap: opts.dim_cap,
        });
    }
    Ok(d)
}

/// All nonempty subsets of `0..d` in lexicographic order of their sorted
/// index lists: `[0], [0,1], [0,1,2], [0,2], [1], [1,2], [2]` for `d = 3`.
pub fn principal_subsets(d: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, next: usize, d: usize, out: &mut Vec<Vec<usize>>) {
        for i in next..d {
            prefix.push(i);
            out.push(prefix.clone());
            extend(prefix, i + 1, d, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity((1usize << d).saturating_sub(1));
    extend(&mut Vec::new(), 0, d, &mut out);
    out
}

/// True iff some `x > 0` has `Cx > 0`.
///
/// Decided through the closed system `x >= 0, Cx >= 1`: a solution there
/// stays strictly feasible after adding a small multiple of the all-ones
/// vector, and any `x > 0` with `Cx > 0` can be scaled to satisfy it.
pub fn is_s_matrix(c: &RatMatrix) -> Result<bool, ClassError> {
    let d = square_dim(c)?;
    if d == 0 {
        return Err(MatrixError::InvalidIndexSet("empty matrix".into()).into());
    }
    let mut lp = LinearProgram::new(d);
    for i in 0..d {
        lp.add_constraint(c.row(i).to_vec(), Relation::Ge, Rational::one());
    }
    let outcome = lp.solve().expect("well-formed feasibility program");
    Ok(!matches!(outcome, LpOutcome::Infeasible))
}

pub fn is_completely_s(m: &RatMatrix, opts: &ClassOptions) -> Result<ClassCheck, ClassError> {
    let d = capped_dim(m, opts)?;
    let subsets = principal_subsets(d);
    let failing = opts.exec.position_first(&subsets, |s| {
        let sub = m.principal_submatrix(s).expect("valid subset");
        !is_s_matrix(&sub).expect("square submatrix")
    });
    Ok(ClassCheck::from_failure(
        failing.map(|i| subsets[i].clone()),
    ))
}

pub fn is_p_matrix(m: &RatMatrix, opts: &ClassOptions) -> Result<ClassCheck, ClassError> {
    let d = capped_dim(m, opts)?;
    let subsets = principal_subsets(d);
    let failing = opts.exec.position_first(&subsets, |s| {
        let minor = m
            .principal_submatrix(s)
            .and_then(|sub| sub.det())
            .expect("valid subset");
        !minor.is_positive()
    });
    Ok(ClassCheck::from_failure(
        failing.map(|i| subsets[i].clone()),
    ))
}

fn off_diagonal_nonpositive(m: &RatMatrix) -> bool {
    let d = m.rows();
    (0..d).all(|i| (0..d).all(|j| i == j || !m[(i, j)].is_positive()))
}

/// P-matrix with nonpositive off-diagonal entries.
pub fn is_m_matrix(m: &RatMatrix, opts: &ClassOptions) -> Result<bool, ClassError> {
    capped_dim(m, opts)?;
    // Sign check first; it is cheap and often decisive.
    Ok(off_diagonal_nonpositive(m) && is_p_matrix(m, opts)?.holds)
}

/// `x'Mx > 0` for all nonzero real `x`, via Sylvester's criterion on the
/// symmetric part `(M + M')/2`.
pub fn is_positive_definite(m: &RatMatrix) -> Result<bool, ClassError> {
    let d = square_dim(m)?;
    let half = Rational::new(1.into(), 2.into());
    let mut sym = RatMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            sym[(i, j)] = (&m[(i, j)] + &m[(j, i)]) * &half;
        }
    }
    for k in 1..=d {
        let lead: Vec<usize> = (0..k).collect();
        if !sym.select(&lead, &lead).det()?.is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn classify(m: &RatMatrix, opts: &ClassOptions) -> Result<ClassReport, ClassError> {
    let cs = is_completely_s(m, opts)?;
    let p = is_p_matrix(m, opts)?;
    let is_m = p.holds && off_diagonal_nonpositive(m);
    Ok(ClassReport {
        is_completely_s: cs.holds,
        is_p: p.holds,
        is_m,
        is_positive_definite: is_positive_definite(m)?,
        completely_s_failing_subset: cs.failing_subset,
        p_failing_subset: p.failing_subset,
    })
}

/// Complete sign classification of a 2x2 reflection matrix.
pub fn two_by_two_case(r: &RatMatrix) -> Result<TwoByTwoCase, ClassError> {
    if r.rows() != 2 || r.cols() != 2 {
        return Err(ClassError::NotTwoByTwo {
            rows: r.rows(),
            cols: r.cols(),
        });
    }
    let (r11, r12, r21, r22) = (&r[(0, 0)], &r[(0, 1)], &r[(1, 0)], &r[(1, 1)]);
    if !r11.is_positive() || !r22.is_positive() {
        return Ok(TwoByTwoCase::DiagonalNotPositive);
    }
    let det = r11 * r22 - r12 * r21;
    let case = if !r12.is_positive() && !r21.is_positive() {
        if det.is_positive() {
            TwoByTwoCase::TightNonpositiveCoupling
        } else {
            TwoByTwoCase::NotCompletelyS
        }
    } else if (r12.is_negative() && r21.is_positive()) || (r12.is_positive() && r21.is_negative()) {
        TwoByTwoCase::TightMixedSigns
    } else {
        // Both nonnegative and at least one strictly positive.
        TwoByTwoCase::CompletelySNotTight
    };
    Ok(case)
}

/// Banded sign pattern that, together with the P property, makes a matrix
/// tight for every positive `b`: positive diagonal, strictly negative first
/// subdiagonal, zeros below it, anything above the diagonal.
pub fn has_tight_band_pattern(r: &RatMatrix, opts: &ClassOptions) -> Result<bool, ClassError> {
    let d = square_dim(r)?;
    if d == 0 {
        return Ok(false);
    }
    let pattern = (0..d).all(|i| {
        r[(i, i)].is_positive()
            && (i == 0 || r[(i, i - 1)].is_negative())
            && (0..i.saturating_sub(1)).all(|j| r[(i, j)].is_zero())
    });
    Ok(pattern && is_p_matrix(r, opts)?.holds)
}
