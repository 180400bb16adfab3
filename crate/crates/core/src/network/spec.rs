//! Network description, validation and the reentrant-line builder.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::NetworkError;
use crate::numerics::rational::{serde_grid, serde_vec};
use crate::numerics::{RatMatrix, Rational};

/// A multiclass network under a static buffer priority discipline.
///
/// Stations are numbered from 1 in `station_of_class`; `priority[k]` is the
/// priority level of class `k` (smaller is served first) and the levels form
/// a permutation of `1..=classes`. `routing[k][k']` is the probability that a
/// class `k` customer becomes class `k'` after service.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub classes: usize,
    pub stations: usize,
    pub station_of_class: Vec<usize>,
    pub priority: Vec<usize>,
    #[serde(with = "serde_vec")]
    pub service_means: Vec<Rational>,
    #[serde(with = "serde_vec")]
    pub arrival_rates: Vec<Rational>,
    #[serde(with = "serde_grid")]
    pub routing: Vec<Vec<Rational>>,
}

impl NetworkSpec {
    /// 0-based station of 0-based class `k`.
    pub fn station(&self, k: usize) -> usize {
        self.station_of_class[k] - 1
    }

    /// 0-based classes served at 0-based station `i`, ascending.
    pub fn classes_at(&self, i: usize) -> Vec<usize> {
        (0..self.classes)
            .filter(|&k| self.station(k) == i)
            .collect()
    }

    pub fn routing_matrix(&self) -> RatMatrix {
        RatMatrix::from_rows(self.routing.clone()).expect("validated routing is rectangular")
    }

    pub fn means_matrix(&self) -> RatMatrix {
        RatMatrix::diagonal(&self.service_means)
    }
}

/// One violated requirement, located by field and (1-based) index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    pub location: String,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.issues.push(ValidationIssue {
            location: location.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, issue) in self.issues.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

/// Checks every structural requirement and reports all violations.
pub fn validate_spec(spec: &NetworkSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let k = spec.classes;
    let d = spec.stations;
    if k == 0 {
        report.push("classes", "must be at least 1");
    }
    if d == 0 {
        report.push("stations", "must be at least 1");
    }
    if d > k {
        report.push("stations", format!("{d} stations but only {k} classes"));
    }
    let lengths = [
        ("station_of_class", spec.station_of_class.len()),
        ("priority", spec.priority.len()),
        ("service_means", spec.service_means.len()),
        ("arrival_rates", spec.arrival_rates.len()),
        ("routing", spec.routing.len()),
    ];
    for (field, len) in lengths {
        if len != k {
            report.push(field, format!("has {len} entries, expected {k}"));
        }
    }
    for (r, row) in spec.routing.iter().enumerate() {
        if row.len() != k {
            report.push(
                format!("routing[{}]", r + 1),
                format!("has {} entries, expected {k}", row.len()),
            );
        }
    }
    if !report.is_valid() {
        return report;
    }

    for (c, &s) in spec.station_of_class.iter().enumerate() {
        if !(1..=d).contains(&s) {
            report.push(
                format!("station_of_class[{}]", c + 1),
                format!("station {s} outside 1..={d}"),
            );
        }
    }
    for i in 1..=d {
        if !spec.station_of_class.contains(&i) {
            report.push("station_of_class", format!("station {i} has no class"));
        }
    }
    let mut seen = vec![false; k];
    for (c, &p) in spec.priority.iter().enumerate() {
        if !(1..=k).contains(&p) {
            report.push(
                format!("priority[{}]", c + 1),
                format!("level {p} outside 1..={k}"),
            );
        } else if std::mem::replace(&mut seen[p - 1], true) {
            report.push(
                format!("priority[{}]", c + 1),
                format!("level {p} used twice"),
            );
        }
    }
    for (c, m) in spec.service_means.iter().enumerate() {
        if !m.is_positive() {
            report.push(format!("service_means[{}]", c + 1), "must be positive");
        }
    }
    for (c, l) in spec.arrival_rates.iter().enumerate() {
        if l.is_negative() {
            report.push(format!("arrival_rates[{}]", c + 1), "must be nonnegative");
        }
    }
    let mut stochastic = true;
    for (r, row) in spec.routing.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if v.is_negative() {
                stochastic = false;
                report.push(
                    format!("routing[{}][{}]", r + 1, c + 1),
                    "must be nonnegative",
                );
            }
        }
        let sum: Rational = row.iter().sum();
        if sum > Rational::one() {
            stochastic = false;
            report.push(format!("routing[{}]", r + 1), "row sum exceeds 1");
        }
    }
    if stochastic {
        let transposed = spec.routing_matrix().transpose();
        let i_minus = &RatMatrix::identity(k) - &transposed;
        match i_minus.inverse() {
            Ok(w) if w.is_nonnegative() => {}
            Ok(_) => report.push("routing", "(I - P')^-1 has a negative entry"),
            Err(_) => report.push("routing", "I - P is singular (customers never leave)"),
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Discipline {
    /// Earlier buffers first.
    Fbfs,
    /// Later buffers first.
    Lbfs,
}

/// Reentrant line visiting `route[k]` (1-based stations) as class `k`, with
/// all external arrivals entering class 1.
pub fn reentrant_spec(
    route: &[usize],
    means: &[Rational],
    arrival: &Rational,
    discipline: Discipline,
) -> Result<NetworkSpec, NetworkError> {
    let k = route.len();
    if k == 0 {
        return Err(NetworkError::Reentrant("route is empty".into()));
    }
    if means.len() != k {
        return Err(NetworkError::Reentrant(format!(
            "{} service means for a route of length {k}",
            means.len()
        )));
    }
    if arrival.is_negative() {
        return Err(NetworkError::Reentrant("arrival rate is negative".into()));
    }
    if let Some(pos) = means.iter().position(|m| !m.is_positive()) {
        return Err(NetworkError::Reentrant(format!(
            "service mean {} is not positive",
            pos + 1
        )));
    }
    let d = *route.iter().max().expect("nonempty route");
    if let Some(pos) = route.iter().position(|&s| s == 0) {
        return Err(NetworkError::Reentrant(format!(
            "route step {} has station 0",
            pos + 1
        )));
    }
    if let Some(i) = (1..=d).find(|i| !route.contains(i)) {
        return Err(NetworkError::Reentrant(format!(
            "station {i} is never visited"
        )));
    }
    let mut routing = vec![vec![Rational::zero(); k]; k];
    for (c, row) in routing.iter_mut().enumerate().take(k - 1) {
        row[c + 1] = Rational::one();
    }
    let mut arrival_rates = vec![Rational::zero(); k];
    arrival_rates[0] = arrival.clone();
    let priority = match discipline {
        Discipline::Fbfs => (1..=k).collect(),
        Discipline::Lbfs => (1..=k).rev().collect(),
    };
    Ok(NetworkSpec {
        classes: k,
        stations: d,
        station_of_class: route.to_vec(),
        priority,
        service_means: means.to_vec(),
        arrival_rates,
        routing,
    })
}
