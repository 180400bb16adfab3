//! Priority sets and the matrices derived from a network: `W`, `B`, `F`,
//! `A`, `A^-1`, `Q` and the reflection matrix `R`.
//!
//! Conventions (0-based classes and stations):
//! `W = (I - P')^-1`; `H(k)` holds the classes at `k`'s station whose
//! priority is at least `k`'s; `k+` is the class immediately above `k`
//! in that order; `B[k][k+] = 1`; `F = (I - B)^-1` with
//! `F[k][k'] = 1(k' in H(k))`; `A = (I - P') M^-1 (I - B)`;
//! `Q[i][j] = sum over k at station i of m_k W[k][l(j)]` where `l(j)` is the
//! lowest priority class at station `j`; `R = Q^-1`.

use num_traits::{One, Zero};
use serde::Serialize;

use super::spec::{validate_spec, NetworkSpec};
use super::NetworkError;
use crate::numerics::rational::serde_vec;
use crate::numerics::{MatrixError, RatMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrioritySets {
    /// `H(k)`, ascending class order.
    pub at_least_as_high: Vec<Vec<usize>>,
    /// `k+`, absent for the highest class at a station.
    pub next_higher: Vec<Option<usize>>,
    /// Lowest priority class at each station.
    pub lowest: Vec<usize>,
    /// `{lowest[i]}` in station order.
    pub low_classes: Vec<usize>,
    /// Remaining classes, ascending.
    pub high_classes: Vec<usize>,
}

pub fn priority_sets(spec: &NetworkSpec) -> PrioritySets {
    let k = spec.classes;
    let level = |c: usize| spec.priority[c];
    let mut at_least_as_high = Vec::with_capacity(k);
    let mut next_higher = Vec::with_capacity(k);
    for c in 0..k {
        let peers = spec.classes_at(spec.station(c));
        let h: Vec<usize> = peers
            .into_iter()
            .filter(|&o| level(o) <= level(c))
            .collect();
        next_higher.push(
            h.iter()
                .copied()
                .filter(|&o| o != c)
                .max_by_key(|&o| level(o)),
        );
        at_least_as_high.push(h);
    }
    let lowest: Vec<usize> = (0..spec.stations)
        .map(|i| {
            spec.classes_at(i)
                .into_iter()
                .max_by_key(|&c| level(c))
                .expect("validated station has a class")
        })
        .collect();
    let high_classes = (0..k).filter(|c| !lowest.contains(c)).collect();
    PrioritySets {
        at_least_as_high,
        next_higher,
        low_classes: lowest.clone(),
        lowest,
        high_classes,
    }
}

/// Renumbers stations so their lowest priority classes increase with the
/// station index. Returns the relabeled network and `order`, where new station `i`
/// is old station `order[i]` (0-based).
pub fn relabel_stations(spec: &NetworkSpec) -> (NetworkSpec, Vec<usize>) {
    let lowest = priority_sets(spec).lowest;
    let mut order: Vec<usize> = (0..spec.stations).collect();
    order.sort_by_key(|&i| lowest[i]);
    let mut new_index = vec![0; spec.stations];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new;
    }
    let mut out = spec.clone();
    for s in &mut out.station_of_class {
        *s = new_index[*s - 1] + 1;
    }
    (out, order)
}

fn i_minus_p_transpose(spec: &NetworkSpec) -> RatMatrix {
    &RatMatrix::identity(spec.classes) - &spec.routing_matrix().transpose()
}

pub fn build_w(spec: &NetworkSpec) -> Result<RatMatrix, MatrixError> {
    i_minus_p_transpose(spec).inverse()
}

pub fn build_b(spec: &NetworkSpec) -> RatMatrix {
    let sets = priority_sets(spec);
    let mut b = RatMatrix::zeros(spec.classes, spec.classes);
    for (c, next) in sets.next_higher.iter().enumerate() {
        if let Some(n) = next {
            b[(c, *n)] = Rational::one();
        }
    }
    b
}

/// `F[k][k'] = 1(k' in H(k))`, the closed form of `(I - B)^-1`.
pub fn build_f(spec: &NetworkSpec) -> RatMatrix {
    let sets = priority_sets(spec);
    let mut f = RatMatrix::zeros(spec.classes, spec.classes);
    for (c, h) in sets.at_least_as_high.iter().enumerate() {
        for &o in h {
            f[(c, o)] = Rational::one();
        }
    }
    f
}

pub fn build_a(spec: &NetworkSpec) -> RatMatrix {
    let inv_means: Vec<Rational> = spec.service_means.iter().map(|m| m.recip()).collect();
    let left = i_minus_p_transpose(spec)
        .scale_columns(&inv_means)
        .expect("square");
    let i_minus_b = &RatMatrix::identity(spec.classes) - &build_b(spec);
    &left * &i_minus_b
}

/// `A^-1[k'][k''] = sum over k in H(k') of m_k W[k][k'']`, i.e. `F M W`.
pub fn build_a_inverse(spec: &NetworkSpec) -> Result<RatMatrix, MatrixError> {
    let w = build_w(spec)?;
    let sets = priority_sets(spec);
    let k = spec.classes;
    let mut out = RatMatrix::zeros(k, k);
    for (row, h) in sets.at_least_as_high.iter().enumerate() {
        for col in 0..k {
            out[(row, col)] = h
                .iter()
                .map(|&c| &spec.service_means[c] * &w[(c, col)])
                .sum();
        }
    }
    Ok(out)
}

pub fn build_q(spec: &NetworkSpec) -> Result<RatMatrix, MatrixError> {
    let w = build_w(spec)?;
    let lowest = priority_sets(spec).lowest;
    let d = spec.stations;
    let mut q = RatMatrix::zeros(d, d);
    for i in 0..d {
        let at_i = spec.classes_at(i);
        for (j, &l) in lowest.iter().enumerate() {
            q[(i, j)] = at_i
                .iter()
                .map(|&c| &spec.service_means[c] * &w[(c, l)])
                .sum();
        }
    }
    Ok(q)
}

/// `A_L - A_LH A_H^-1 A_HL` reindexed by station; `None` when `A_H` is
/// singular.
pub fn schur_reflection(spec: &NetworkSpec) -> Result<Option<RatMatrix>, MatrixError> {
    let a = build_a(spec);
    let sets = priority_sets(spec);
    let (low, high) = (&sets.low_classes, &sets.high_classes);
    let a_l = a.select(low, low);
    if high.is_empty() {
        return Ok(Some(a_l));
    }
    let a_h_inv = match a.select(high, high).inverse() {
        Ok(m) => m,
        Err(MatrixError::Singular) => return Ok(None),
        Err(e) => return Err(e),
    };
    let correction = a
        .select(low, high)
        .matmul(&a_h_inv)?
        .matmul(&a.select(high, low))?;
    Ok(Some(a_l.checked_sub(&correction)?))
}

/// `R = Q^-1`, cross-checked against the Schur complement path.
pub fn reflection_matrix(spec: &NetworkSpec) -> Result<RatMatrix, NetworkError> {
    let q = build_q(spec)?;
    let schur = schur_reflection(spec)?;
    match (q.inverse(), schur) {
        (Ok(r), Some(s)) if r == s => Ok(r),
        (Ok(_), Some(_)) => Err(NetworkError::Inconsistent(
            "Q^-1 and the Schur complement differ".into(),
        )),
        (Err(MatrixError::Singular), None) => Err(NetworkError::QSingular),
        (Err(MatrixError::Singular), Some(_)) => Err(NetworkError::Inconsistent(
            "Q is singular but A_H is invertible".into(),
        )),
        (Ok(_), None) => Err(NetworkError::Inconsistent(
            "A_H is singular but Q is invertible".into(),
        )),
        (Err(e), _) => Err(e.into()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrafficReport {
    /// Total arrival rate into each class, `W lambda`.
    #[serde(with = "serde_vec")]
    pub alpha: Vec<Rational>,
    /// Utilization of each station.
    #[serde(with = "serde_vec")]
    pub rho: Vec<Rational>,
    /// Every station fully utilized.
    pub heavy_traffic: bool,
}

pub fn traffic(spec: &NetworkSpec) -> Result<TrafficReport, MatrixError> {
    let alpha = build_w(spec)?.mul_vec(&spec.arrival_rates)?;
    let rho: Vec<Rational> = (0..spec.stations)
        .map(|i| {
            spec.classes_at(i)
                .into_iter()
                .map(|c| &alpha[c] * &spec.service_means[c])
                .sum()
        })
        .collect();
    let heavy_traffic = rho.iter().all(One::is_one);
    Ok(TrafficReport {
        alpha,
        rho,
        heavy_traffic,
    })
}

/// Everything derived from a validated, relabeled network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    /// The network after relabeling stations.
    pub spec: NetworkSpec,
    /// New station `i` is input station `station_order[i]` (0-based).
    pub station_order: Vec<usize>,
    pub priority: PrioritySets,
    pub w: RatMatrix,
    pub b: RatMatrix,
    pub f: RatMatrix,
    pub a: RatMatrix,
    pub a_inverse: RatMatrix,
    pub q: RatMatrix,
    /// `None` when `Q` is singular.
    pub r: Option<RatMatrix>,
    pub traffic: TrafficReport,
}

/// Validates, relabels and derives every matrix, checking the identities
/// that tie them together.
pub fn derive(spec: &NetworkSpec) -> Result<Derivation, NetworkError> {
    let report = validate_spec(spec);
    if !report.is_valid() {
        return Err(NetworkError::Invalid(report));
    }
    let (spec, station_order) = relabel_stations(spec);
    let priority = priority_sets(&spec);
    let w = build_w(&spec)?;
    let b = build_b(&spec);
    let f = build_f(&spec);
    let a = build_a(&spec);
    let a_inverse = build_a_inverse(&spec)?;
    let q = build_q(&spec)?;
    let k = spec.classes;

    let check = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(NetworkError::Inconsistent(what.to_string()))
        }
    };
    check(
        (&f * &(&RatMatrix::identity(k) - &b)).is_identity(),
        "F (I - B) != I",
    )?;
    check((&a * &a_inverse).is_identity(), "A A^-1 != I")?;
    check(
        a_inverse.select(&priority.lowest, &priority.lowest) == q,
        "A^-1 restricted to lowest classes differs from Q",
    )?;
    let r = match reflection_matrix(&spec) {
        Ok(r) => Some(r),
        Err(NetworkError::QSingular) => None,
        Err(e) => return Err(e),
    };
    let traffic = traffic(&spec)?;
    check(
        traffic
            .alpha
            .iter()
            .zip(&spec.arrival_rates)
            .all(|(a, l)| a >= l),
        "alpha below the external arrival rate",
    )?;
    Ok(Derivation {
        spec,
        station_order,
        priority,
        w,
        b,
        f,
        a,
        a_inverse,
        q,
        r,
        traffic,
    })
}

impl Derivation {
    /// `R` with rows and columns in input station order.
    pub fn r_in_input_order(&self) -> Option<RatMatrix> {
        let r = self.r.as_ref()?;
        let d = self.station_order.len();
        let mut position = vec![0; d];
        for (new, &old) in self.station_order.iter().enumerate() {
            position[old] = new;
        }
        Some(r.select(&position, &position))
    }

    pub fn is_identity_relabel(&self) -> bool {
        self.station_order.iter().enumerate().all(|(i, &o)| i == o)
    }

    pub fn q_determinant(&self) -> Rational {
        self.q.det().unwrap_or_else(|_| Rational::zero())
    }
}
