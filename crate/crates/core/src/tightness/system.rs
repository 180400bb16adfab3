//! The linear system whose only solution must be the all-ones vector for a
//! pair `(R, b)` to be tight.
//!
//! For every subset `D` of faces and every `i ∈ D` there is a balance row
//!
//! ```text
//! Σ_j R[i][j] · b[j] · (x{D}^(j) − x{D}) = 0,
//! ```
//!
//! every unknown family is nonincreasing along set inclusion, `x{}` and all
//! `x{}^(j)` are fixed to one, `x{D} ∈ [0, 1]`, and optionally
//! `x{D}^(j) ∈ [0, 1]` (see [`TightnessSystem::aux_bounded`]). Boundary
//! unknowns are stored in canonical form only, which enforces the identity
//! `x{D}^(j) = x{D \ {j}}^(j)` by construction. Monotonicity is imposed on
//! cover pairs `(D, D ∪ {m})`; transitivity yields the full order, and the
//! chain down to the fixed `x{}` values bounds every unknown above by one.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::vars::{IndexSet, VarKey, MAX_DIM};
use super::TightnessError;
use crate::numerics::{Bounds, LinearProgram, MatrixError, RatMatrix, Rational, Relation};

/// What a row of the system encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// Balance equation of face `face` on the set `set`.
    Balance { set: IndexSet, face: usize },
    /// `upper >= lower` where `lower`'s set covers `upper`'s set.
    Monotone { upper: VarKey, lower: VarKey },
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowKind::Balance { set, face } => write!(f, "balance D={set} face {}", face + 1),
            RowKind::Monotone { upper, lower } => write!(f, "monotone {upper} >= {lower}"),
        }
    }
}

/// Sparse row `Σ coeff · var (relation) 0` over system variable indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemRow {
    pub kind: RowKind,
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
}

impl SystemRow {
    pub fn evaluate(&self, values: &[Rational]) -> Rational {
        self.terms
            .iter()
            .fold(Rational::zero(), |acc, (v, c)| acc + c * &values[*v])
    }

    pub fn is_satisfied_by(&self, values: &[Rational]) -> bool {
        let lhs = self.evaluate(values);
        match self.relation {
            Relation::Eq => lhs.is_zero(),
            Relation::Ge => !lhs.is_negative(),
            Relation::Le => !lhs.is_positive(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TightnessSystem {
    d: usize,
    r: RatMatrix,
    b: Vec<Rational>,
    /// When true, boundary unknowns are confined to `[0, 1]`; otherwise they
    /// are only bounded above (through monotonicity and the fixed values).
    pub aux_bounded: bool,
    variables: Vec<VarKey>,
    index: BTreeMap<VarKey, usize>,
    rows: Vec<SystemRow>,
}

impl TightnessSystem {
    pub fn build(r: &RatMatrix, b: &[Rational], aux_bounded: bool) -> Result<Self, TightnessError> {
        if !r.is_square() {
            return Err(MatrixError::NotSquare {
                rows: r.rows(),
                cols: r.cols(),
            }
            .into());
        }
        let d = r.rows();
        if d == 0 {
            return Err(TightnessError::EmptyMatrix);
        }
        if d > MAX_DIM {
            return Err(TightnessError::DimensionTooLarge(d));
        }
        if b.len() != d {
            return Err(TightnessError::LengthMismatch {
                expected: d,
                got: b.len(),
            });
        }
        if let Some(i) = b.iter().position(|v| !v.is_positive()) {
            return Err(TightnessError::NonPositiveB(i));
        }

        let subsets = IndexSet::all_subsets(d);
        let mut variables: Vec<VarKey> = subsets.iter().map(|&s| VarKey::plain(s)).collect();
        for j in 0..d {
            variables.extend(
                subsets
                    .iter()
                    .filter(|s| !s.contains(j))
                    .map(|&s| VarKey::boundary(s, j)),
            );
        }
        let index: BTreeMap<VarKey, usize> =
            variables.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let at = |k: VarKey| index[&k.canonical()];

        let mut rows = Vec::new();
        for &set in &subsets {
            for face in set.iter() {
                let mut terms: BTreeMap<usize, Rational> = BTreeMap::new();
                let own = at(VarKey::plain(set));
                for j in 0..d {
                    let c = &r[(face, j)] * &b[j];
                    if c.is_zero() {
                        continue;
                    }
                    *terms
                        .entry(at(VarKey::boundary(set, j)))
                        .or_insert_with(Rational::zero) += &c;
                    *terms.entry(own).or_insert_with(Rational::zero) -= &c;
                }
                rows.push(SystemRow {
                    kind: RowKind::Balance { set, face },
                    terms: terms.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
                    relation: Relation::Eq,
                });
            }
        }
        let mut monotone = |upper: VarKey, lower: VarKey| {
            rows.push(SystemRow {
                kind: RowKind::Monotone { upper, lower },
                terms: vec![(at(upper), Rational::one()), (at(lower), -Rational::one())],
                relation: Relation::Ge,
            });
        };
        for &set in &subsets {
            for m in (0..d).filter(|&m| !set.contains(m)) {
                monotone(VarKey::plain(set), VarKey::plain(set.with(m)));
            }
        }
        for j in 0..d {
            for &set in subsets.iter().filter(|s| !s.contains(j)) {
                for m in (0..d).filter(|&m| m != j && !set.contains(m)) {
                    monotone(VarKey::boundary(set, j), VarKey::boundary(set.with(m), j));
                }
            }
        }

        let system = Self {
            d,
            r: r.clone(),
            b: b.to_vec(),
            aux_bounded,
            variables,
            index,
            rows,
        };
        let ones = vec![Rational::one(); system.variables.len()];
        assert!(
            system.rows.iter().all(|row| row.is_satisfied_by(&ones)),
            "all-ones must satisfy every row"
        );
        Ok(system)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.r
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    /// Canonical unknowns, constants included: `2^d + d·2^(d-1)` keys.
    pub fn variables(&self) -> &[VarKey] {
        &self.variables
    }

    pub fn rows(&self) -> &[SystemRow] {
        &self.rows
    }

    /// Position of a key (any form) among [`Self::variables`].
    pub fn position(&self, key: VarKey) -> Option<usize> {
        self.index.get(&key.canonical()).copied()
    }

    /// Admissible range of one canonical unknown.
    pub fn bounds_of(&self, key: VarKey) -> Bounds {
        let one = Rational::one();
        if key.is_constant() {
            Bounds::between(one.clone(), one)
        } else if key.boundary.is_none() || self.aux_bounded {
            Bounds::between(Rational::zero(), one)
        } else {
            Bounds {
                lower: None,
                upper: Some(one),
            }
        }
    }

    /// The uniqueness program in deviation form; see [`UniquenessProgram`].
    pub fn uniqueness_program(&self) -> UniquenessProgram {
        let free: Vec<usize> = (0..self.variables.len())
            .filter(|&v| !self.variables[v].is_constant())
            .collect();
        let mut column = vec![None; self.variables.len()];
        for (c, &v) in free.iter().enumerate() {
            column[v] = Some(c);
        }
        let n = free.len();
        // Fixed unknowns have zero deviation, so their terms drop out.
        let restrict = |row: &SystemRow| {
            let mut coeffs = vec![Rational::zero(); n];
            for (v, c) in &row.terms {
                if let Some(col) = column[*v] {
                    coeffs[col] += c;
                }
            }
            coeffs
        };
        let balance: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .filter(|row| row.relation == Relation::Eq)
            .map(restrict)
            .collect();
        let basis = if balance.is_empty() {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                Rational::one()
                            } else {
                                Rational::zero()
                            }
                        })
                        .collect()
                })
                .collect()
        } else {
            RatMatrix::new(balance.len(), n, balance.into_iter().flatten().collect())
                .expect("rows have one entry per free unknown")
                .nullspace_basis()
        };
        let k = basis.len();
        // Coefficients of `t` in a linear form `Σ_i w_i y_i` over free unknowns.
        let in_t = |weights: &[Rational]| -> Vec<Rational> {
            basis
                .iter()
                .map(|v| {
                    v.iter()
                        .zip(weights)
                        .filter(|(_, w)| !w.is_zero())
                        .fold(Rational::zero(), |acc, (x, w)| acc + x * w)
                })
                .collect()
        };
        let mut lp = LinearProgram::new(k);
        lp.bounds = vec![Bounds::free(); k];
        lp.objective = in_t(&vec![-Rational::one(); n]);
        for row in self.rows.iter().filter(|row| row.relation != Relation::Eq) {
            // `Σ c x ≥ 0` with constant terms cancelling at one reads `Σ c y ≤ 0`.
            let coeffs = in_t(&restrict(row));
            if coeffs.iter().all(Zero::is_zero) {
                continue;
            }
            let relation = match row.relation {
                Relation::Ge => Relation::Le,
                Relation::Le => Relation::Ge,
                Relation::Eq => unreachable!(),
            };
            lp.add_constraint(coeffs, relation, Rational::zero());
        }
        for (c, &v) in free.iter().enumerate() {
            if self.bounds_of(self.variables[v]).lower.is_some() {
                let mut unit = vec![Rational::zero(); n];
                unit[c] = Rational::one();
                lp.add_constraint(in_t(&unit), Relation::Le, Rational::one());
            }
        }
        UniquenessProgram {
            lp,
            free,
            basis,
            variable_count: self.variables.len(),
        }
    }
}

/// The question "is all-ones the only solution" as a small LP.
///
/// With `y = 1 − x` on the free unknowns (fixed unknowns have `y = 0`) every
/// row becomes homogeneous. The balance rows are solved exactly as
/// `y = Σ_k t_k N_k` over a nullspace basis `N`, which leaves the LP in `t`:
/// maximize `Σ y` subject to the monotone rows and `y ≤ 1` wherever `x ≥ 0`
/// is required. `y ≥ 0` follows from the monotone chains through the fixed
/// unknowns. Since `t = 0` is feasible every row starts on its slack.
///
/// The LP objective is `−Σ y`, so `variable_count + value` is the minimum of
/// the sum of all unknowns.
#[derive(Debug, Clone)]
pub struct UniquenessProgram {
    pub lp: LinearProgram,
    /// System variables that are not fixed, in nullspace coordinate order.
    pub free: Vec<usize>,
    basis: Vec<Vec<Rational>>,
    variable_count: usize,
}

impl UniquenessProgram {
    /// Number of LP variables; zero means the balance rows alone force all-ones.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Full system vector `x = 1 − N t`.
    pub fn point(&self, t: &[Rational]) -> Vec<Rational> {
        let mut x = vec![Rational::one(); self.variable_count];
        for (v, tk) in self.basis.iter().zip(t) {
            if tk.is_zero() {
                continue;
            }
            for (&var, nv) in self.free.iter().zip(v) {
                if !nv.is_zero() {
                    x[var] -= tk * nv;
                }
            }
        }
        x
    }
}

/// Builds the system for `(R, b)`; see [`TightnessSystem`].
pub fn build_system(
    r: &RatMatrix,
    b: &[Rational],
    aux_bounded: bool,
) -> Result<TightnessSystem, TightnessError> {
    TightnessSystem::build(r, b, aux_bounded)
}
