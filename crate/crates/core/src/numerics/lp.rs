//! Exact two-phase simplex over [`Rational`].
//!
//! The solver works on a dense tableau. Entering columns follow the most
//! negative reduced cost, falling back to Bland's least-index rule on long
//! degenerate stretches, so it cannot cycle and repeated runs on the same
//! program pivot identically. Problems are small (a few
//! hundred rows at most), so no attempt is made at sparse factorizations.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Self {
            coeffs,
            relation,
            rhs,
        }
    }

    /// Exact check of this row at `x`.
    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

/// Per-variable bounds; `None` means unbounded on that side.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Bounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bounds {
    pub fn free() -> Self {
        Self::default()
    }

    pub fn nonnegative() -> Self {
        Self {
            lower: Some(Rational::zero()),
            upper: None,
        }
    }

    pub fn between(lower: Rational, upper: Rational) -> Self {
        Self {
            lower: Some(lower),
            upper: Some(upper),
        }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|l| v >= l) && self.upper.as_ref().is_none_or(|u| v <= u)
    }
}

/// `minimize objective · x` subject to the constraints and bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        solution: Vec<Rational>,
    },
    Infeasible,
    /// `point + t * direction` is feasible for every `t >= 0` and the
    /// objective strictly decreases along `direction`.
    Unbounded {
        point: Vec<Rational>,
        direction: Vec<Rational>,
    },
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("constraint {row} has {got} coefficients, expected {expected}")]
    RowLength {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("{got} bounds given for {expected} variables")]
    BoundsLength { got: usize, expected: usize },
    #[error("variable {0} has lower bound above upper bound")]
    EmptyBounds(usize),
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, _)| !x.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

impl LinearProgram {
    /// A program over `n` variables with zero objective, no rows, and every
    /// variable nonnegative.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![Rational::zero(); n],
            constraints: Vec::new(),
            bounds: vec![Bounds::nonnegative(); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints
            .push(Constraint::new(coeffs, relation, rhs));
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::BoundsLength {
                got: self.bounds.len(),
                expected: n,
            });
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::RowLength {
                    row,
                    got: c.coeffs.len(),
                    expected: n,
                });
            }
        }
        for (i, b) in self.bounds.iter().enumerate() {
            if let (Some(l), Some(u)) = (&b.lower, &b.upper) {
                if l > u {
                    return Err(LpError::EmptyBounds(i));
                }
            }
        }
        Ok(())
    }

    /// True when `x` satisfies every row and bound exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.constraints.iter().all(|c| c.is_satisfied_by(x))
            && self.bounds.iter().zip(x).all(|(b, v)| b.contains(v))
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    pub fn solve(&self) -> Result<LpOutcome, LpError> {
        self.validate()?;
        Ok(StandardForm::build(self).solve())
    }
}

/// Solves `prob`; see [`LinearProgram::solve`].
pub fn lp_solve(prob: &LinearProgram) -> Result<LpOutcome, LpError> {
    prob.solve()
}

/// How an original variable maps onto nonnegative standard-form columns.
#[derive(Debug, Clone)]
enum VarMap {
    /// x = lower + z
    Shifted { col: usize, lower: Rational },
    /// x = upper - z
    Negated { col: usize, upper: Rational },
    /// x = z⁺ - z⁻
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    maps: Vec<VarMap>,
    /// Rows over structural + slack columns, with nonnegative rhs.
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Column usable as the initial basic variable of each row, if any.
    initial_basis: Vec<Option<usize>>,
    cost: Vec<Rational>,
    objective: Vec<Rational>,
    ncols: usize,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut maps = Vec::with_capacity(lp.num_vars());
        let mut ncols = 0;
        let mut extra_rows: Vec<(usize, Rational)> = Vec::new();
        for b in &lp.bounds {
            match (&b.lower, &b.upper) {
                (Some(l), upper) => {
                    maps.push(VarMap::Shifted {
                        col: ncols,
                        lower: l.clone(),
                    });
                    if let Some(u) = upper {
                        extra_rows.push((ncols, u - l));
                    }
                    ncols += 1;
                }
                (None, Some(u)) => {
                    maps.push(VarMap::Negated {
                        col: ncols,
                        upper: u.clone(),
                    });
                    ncols += 1;
                }
                (None, None) => {
                    maps.push(VarMap::Split {
                        pos: ncols,
                        neg: ncols + 1,
                    });
                    ncols += 2;
                }
            }
        }
        let structural = ncols;

        // Rows in structural columns, with relation and shifted rhs.
        let mut raw: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
        for c in &lp.constraints {
            let mut row = vec![Rational::zero(); structural];
            let mut rhs = c.rhs.clone();
            for (a, m) in c.coeffs.iter().zip(&maps) {
                if a.is_zero() {
                    continue;
                }
                match m {
                    VarMap::Shifted { col, lower } => {
                        row[*col] += a;
                        rhs -= a * lower;
                    }
                    VarMap::Negated { col, upper } => {
                        row[*col] -= a;
                        rhs -= a * upper;
                    }
                    VarMap::Split { pos, neg } => {
                        row[*pos] += a;
                        row[*neg] -= a;
                    }
                }
            }
            raw.push((row, c.relation, rhs));
        }
        for (col, width) in extra_rows {
            let mut row = vec![Rational::zero(); structural];
            row[col] = Rational::one();
            raw.push((row, Relation::Le, width));
        }

        let slack_count = raw.iter().filter(|r| r.1 != Relation::Eq).count();
        ncols = structural + slack_count;
        let mut rows = Vec::with_capacity(raw.len());
        let mut rhs_out = Vec::with_capacity(raw.len());
        let mut initial_basis = Vec::with_capacity(raw.len());
        let mut next_slack = structural;
        for (mut row, relation, mut rhs) in raw {
            row.resize(ncols, Rational::zero());
            let slack = match relation {
                Relation::Eq => None,
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    next_slack += 1;
                    Some(next_slack - 1)
                }
                Relation::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    Some(next_slack - 1)
                }
            };
            if rhs.is_negative() {
                for v in row.iter_mut() {
                    *v = -&*v;
                }
                rhs = -rhs;
            }
            let basis = slack.filter(|&s| row[s] == Rational::one());
            rows.push(row);
            rhs_out.push(rhs);
            initial_basis.push(basis);
        }

        let mut cost = vec![Rational::zero(); ncols];
        for (c, m) in lp.objective.iter().zip(&maps) {
            match m {
                VarMap::Shifted { col, .. } => cost[*col] += c,
                VarMap::Negated { col, .. } => cost[*col] -= c,
                VarMap::Split { pos, neg } => {
                    cost[*pos] += c;
                    cost[*neg] -= c;
                }
            }
        }

        Self {
            maps,
            rows,
            rhs: rhs_out,
            initial_basis,
            cost,
            objective: lp.objective.clone(),
            ncols,
        }
    }

    fn to_original(&self, z: &[Rational]) -> Vec<Rational> {
        self.maps
            .iter()
            .map(|m| match m {
                VarMap::Shifted { col, lower } => lower + &z[*col],
                VarMap::Negated { col, upper } => upper - &z[*col],
                VarMap::Split { pos, neg } => &z[*pos] - &z[*neg],
            })
            .collect()
    }

    fn direction_to_original(&self, dz: &[Rational]) -> Vec<Rational> {
        self.maps
            .iter()
            .map(|m| match m {
                VarMap::Shifted { col, .. } => dz[*col].clone(),
                VarMap::Negated { col, .. } => -&dz[*col],
                VarMap::Split { pos, neg } => &dz[*pos] - &dz[*neg],
            })
            .collect()
    }

    fn solve(self) -> LpOutcome {
        let mut tableau = Tableau::new(&self);
        if !tableau.phase_one() {
            return LpOutcome::Infeasible;
        }
        match tableau.phase_two(&self.cost) {
            PhaseResult::Optimal => {
                let z = tableau.basic_solution(self.ncols);
                let solution = self.to_original(&z);
                let value = dot(&self.objective, &solution);
                LpOutcome::Optimal { value, solution }
            }
            PhaseResult::Unbounded(entering) => {
                let z = tableau.basic_solution(self.ncols);
                let dz = tableau.ray(entering, self.ncols);
                LpOutcome::Unbounded {
                    point: self.to_original(&z),
                    direction: self.direction_to_original(&dz),
                }
            }
        }
    }
}

enum PhaseResult {
    Optimal,
    Unbounded(usize),
}

/// Degenerate pivots tolerated before entering switches to least-index.
const DEGENERATE_RUN: usize = 50;

struct Tableau {
    /// Each row holds `ncols_total` coefficients followed by the rhs.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Columns at or beyond this index are artificial.
    first_artificial: usize,
    ncols_total: usize,
    /// Reduced costs followed by minus the objective value.
    obj: Vec<Rational>,
}

impl Tableau {
    fn new(sf: &StandardForm) -> Self {
        let artificial_rows: Vec<usize> = (0..sf.rows.len())
            .filter(|&r| sf.initial_basis[r].is_none())
            .collect();
        let first_artificial = sf.ncols;
        let ncols_total = sf.ncols + artificial_rows.len();
        let mut rows = Vec::with_capacity(sf.rows.len());
        let mut basis = Vec::with_capacity(sf.rows.len());
        let mut next_art = first_artificial;
        for (r, row) in sf.rows.iter().enumerate() {
            let mut t = row.clone();
            t.resize(ncols_total + 1, Rational::zero());
            t[ncols_total] = sf.rhs[r].clone();
            match sf.initial_basis[r] {
                Some(col) => basis.push(col),
                None => {
                    t[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(t);
        }
        Self {
            rows,
            basis,
            first_artificial,
            ncols_total,
            obj: vec![Rational::zero(); ncols_total + 1],
        }
    }

    /// Loads reduced costs for `cost` (indexed by column, missing = 0).
    fn load_objective(&mut self, cost: &[Rational]) {
        let width = self.ncols_total + 1;
        let mut obj = vec![Rational::zero(); width];
        for (j, c) in cost.iter().enumerate() {
            obj[j] = c.clone();
        }
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost.get(b).cloned().unwrap_or_else(Rational::zero);
            if cb.is_zero() {
                continue;
            }
            for (o, t) in obj.iter_mut().zip(&self.rows[r]) {
                if !t.is_zero() {
                    *o -= &cb * t;
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.ncols_total + 1;
        let p = self.rows[row][col].clone();
        if !p.is_one() {
            for v in self.rows[row].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
        }
        let support: Vec<usize> = (0..width)
            .filter(|&j| !self.rows[row][j].is_zero())
            .collect();
        let pivot_row = std::mem::take(&mut self.rows[row]);
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for &j in &support {
                other[j] -= &factor * &pivot_row[j];
            }
        }
        if !self.obj[col].is_zero() {
            let factor = self.obj[col].clone();
            for &j in &support {
                self.obj[j] -= &factor * &pivot_row[j];
            }
        }
        self.rows[row] = pivot_row;
        self.basis[row] = col;
    }

    /// Simplex iterations over columns `< allowed`.
    ///
    /// The entering column has the most negative reduced cost (lowest index
    /// on ties). After [`DEGENERATE_RUN`] consecutive pivots that leave the
    /// objective unchanged, entering switches to Bland's least-index rule
    /// until the objective moves again, which rules out cycling. The leaving
    /// row is the minimum ratio with ties broken by the lowest basic index.
    fn iterate(&mut self, allowed: usize) -> PhaseResult {
        let mut degenerate_run = 0;
        loop {
            let entering = if degenerate_run < DEGENERATE_RUN {
                (0..allowed)
                    .filter(|&j| self.obj[j].is_negative())
                    .min_by(|&a, &b| self.obj[a].cmp(&self.obj[b]).then(a.cmp(&b)))
            } else {
                (0..allowed).find(|&j| self.obj[j].is_negative())
            };
            let Some(entering) = entering else {
                return PhaseResult::Optimal;
            };
            let rhs = self.ncols_total;
            let mut best: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = &row[entering];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, ratio)) => {
                    if ratio.is_zero() {
                        degenerate_run += 1;
                    } else {
                        degenerate_run = 0;
                    }
                    self.pivot(r, entering);
                }
                None => return PhaseResult::Unbounded(entering),
            }
        }
    }

    /// Returns false when the program is infeasible.
    fn phase_one(&mut self) -> bool {
        if self.first_artificial == self.ncols_total {
            return true;
        }
        let cost: Vec<Rational> = (0..self.ncols_total)
            .map(|j| {
                if j >= self.first_artificial {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        self.load_objective(&cost);
        // Artificial objective is bounded below by zero.
        let _ = self.iterate(self.ncols_total);
        if !self.obj[self.ncols_total].is_zero() {
            return false;
        }
        // Drive degenerate artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.first_artificial {
                match (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(j) => {
                        self.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
        true
    }

    fn phase_two(&mut self, cost: &[Rational]) -> PhaseResult {
        self.load_objective(cost);
        self.iterate(self.first_artificial)
    }

    fn basic_solution(&self, ncols: usize) -> Vec<Rational> {
        let mut z = vec![Rational::zero(); ncols];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < ncols {
                z[b] = self.rows[r][self.ncols_total].clone();
            }
        }
        z
    }

    fn ray(&self, entering: usize, ncols: usize) -> Vec<Rational> {
        let mut dz = vec![Rational::zero(); ncols];
        dz[entering] = Rational::one();
        for (r, &b) in self.basis.iter().enumerate() {
            if b < ncols {
                dz[b] = -&self.rows[r][entering];
            }
        }
        dz
    }
}
