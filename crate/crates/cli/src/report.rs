//! Structured reports and their text form.

use std::fmt::Write;

use reflecto::classes::{
    classify, has_tight_band_pattern, two_by_two_case, ClassOptions, TwoByTwoCase,
};
use reflecto::network::{Derivation, NetworkSpec, TrafficReport};
use reflecto::numerics::rational::serde_vec;
use reflecto::numerics::{RatMatrix, Rational};
use reflecto::tightness::{TightMatrixDecision, TightnessError, TightnessVerdict};
use serde::Serialize;

use crate::render::{labeled_matrix, numbered, subset, vector, witness, yes_no, Grid};

/// Class tests on one matrix, subsets 1-based.
#[derive(Debug, Serialize)]
pub struct ClassSummary {
    pub dimension: usize,
    pub completely_s: bool,
    pub p_matrix: bool,
    pub m_matrix: bool,
    pub positive_definite: bool,
    pub completely_s_failing_subset: Option<Vec<usize>>,
    pub p_failing_subset: Option<Vec<usize>>,
    /// Sign case, 2x2 matrices only.
    pub two_by_two_case: Option<TwoByTwoCase>,
    pub band_pattern: bool,
}

fn one_based(subset: Option<Vec<usize>>) -> Option<Vec<usize>> {
    subset.map(|s| s.into_iter().map(|i| i + 1).collect())
}

pub fn class_summary(
    r: &RatMatrix,
    opts: &ClassOptions,
) -> Result<ClassSummary, reflecto::classes::ClassError> {
    let report = classify(r, opts)?;
    Ok(ClassSummary {
        dimension: r.rows(),
        completely_s: report.is_completely_s,
        p_matrix: report.is_p,
        m_matrix: report.is_m,
        positive_definite: report.is_positive_definite,
        completely_s_failing_subset: one_based(report.completely_s_failing_subset),
        p_failing_subset: one_based(report.p_failing_subset),
        two_by_two_case: if r.rows() == 2 {
            Some(two_by_two_case(r)?)
        } else {
            None
        },
        band_pattern: has_tight_band_pattern(r, opts)?,
    })
}

pub fn class_text(c: &ClassSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "completely-S:      {}", yes_no(c.completely_s));
    if let Some(s) = &c.completely_s_failing_subset {
        let _ = writeln!(
            out,
            "  first failing principal submatrix: {}",
            subset_one_based(s)
        );
    }
    let _ = writeln!(out, "P-matrix:          {}", yes_no(c.p_matrix));
    if let Some(s) = &c.p_failing_subset {
        let _ = writeln!(
            out,
            "  first nonpositive principal minor: {}",
            subset_one_based(s)
        );
    }
    let _ = writeln!(out, "M-matrix:          {}", yes_no(c.m_matrix));
    let _ = writeln!(out, "positive definite: {}", yes_no(c.positive_definite));
    if let Some(case) = c.two_by_two_case {
        let _ = writeln!(out, "2x2 sign case:     {}", case_name(case));
    }
    let _ = writeln!(out, "band pattern:      {}", yes_no(c.band_pattern));
    out
}

fn subset_one_based(s: &[usize]) -> String {
    subset(&s.iter().map(|i| i - 1).collect::<Vec<_>>())
}

pub fn case_name(case: TwoByTwoCase) -> &'static str {
    match case {
        TwoByTwoCase::TightNonpositiveCoupling => {
            "nonpositive coupling, positive determinant (tight)"
        }
        TwoByTwoCase::TightMixedSigns => "mixed-sign coupling (tight)",
        TwoByTwoCase::CompletelySNotTight => "nonnegative coupling (completely-S, not tight)",
        TwoByTwoCase::NotCompletelyS => {
            "nonpositive coupling, nonpositive determinant (not completely-S)"
        }
        TwoByTwoCase::DiagonalNotPositive => "nonpositive diagonal entry (not completely-S)",
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TightnessSection {
    /// Tight-matrix decision over all `b > 0`.
    Decision(TightMatrixDecision),
    /// Tight-system check for one `b`.
    FixedB {
        #[serde(with = "serde_vec")]
        b: Vec<Rational>,
        verdict: TightnessVerdict,
    },
    NotApplicable {
        reason: String,
    },
}

pub fn tightness_text(t: &TightnessSection) -> String {
    let mut out = String::new();
    match t {
        TightnessSection::Decision(TightMatrixDecision::TightProven { method }) => {
            let _ = writeln!(out, "tight matrix (proven: {})", method_name(*method));
        }
        TightnessSection::Decision(TightMatrixDecision::NotTight { b, witness: w }) => {
            let _ = writeln!(
                out,
                "not tight: the system for b = {} has another solution",
                vector(b)
            );
            out.push_str(&witness(w));
        }
        TightnessSection::Decision(TightMatrixDecision::UnknownSampled { tested_b }) => {
            let _ = writeln!(
                out,
                "undecided: no sufficient condition applies; tight for all {} sampled b",
                tested_b.len()
            );
        }
        TightnessSection::FixedB { b, verdict } => {
            if verdict.tight {
                let _ = writeln!(out, "tight system for b = {}", vector(b));
            } else {
                let _ = writeln!(out, "not a tight system for b = {}", vector(b));
            }
            if let Some(w) = &verdict.witness {
                out.push_str(&witness(w));
            }
        }
        TightnessSection::NotApplicable { reason } => {
            let _ = writeln!(out, "not applicable: {reason}");
        }
    }
    out
}

fn method_name(m: reflecto::tightness::ProofMethod) -> &'static str {
    use reflecto::tightness::ProofMethod::*;
    match m {
        OneDimensional => "one-dimensional",
        TwoByTwoSigns => "2x2 sign conditions",
        BandPattern => "band pattern with P-property",
        MMatrix => "M-matrix",
    }
}

/// Turns a decision error that only says "this question does not apply"
/// into a report section; other errors propagate.
pub fn tightness_or_not_applicable(
    result: Result<TightnessSection, TightnessError>,
) -> Result<TightnessSection, TightnessError> {
    match result {
        Err(e @ TightnessError::NotCompletelyS { .. }) => Ok(TightnessSection::NotApplicable {
            reason: e.to_string(),
        }),
        other => other,
    }
}

#[derive(Serialize)]
pub struct PriorityView {
    /// Lowest priority class per station (relabeled order), 1-based.
    pub lowest: Vec<usize>,
    /// Next higher priority class per class, 1-based.
    pub next_higher: Vec<Option<usize>>,
}

#[derive(Serialize)]
pub struct MatricesView<'a> {
    #[serde(rename = "W")]
    pub w: Grid<'a>,
    #[serde(rename = "B")]
    pub b: Grid<'a>,
    #[serde(rename = "F")]
    pub f: Grid<'a>,
    #[serde(rename = "A")]
    pub a: Grid<'a>,
    #[serde(rename = "A_inverse")]
    pub a_inverse: Grid<'a>,
    #[serde(rename = "Q")]
    pub q: Grid<'a>,
    #[serde(rename = "R")]
    pub r: ReflectionView<'a>,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum ReflectionView<'a> {
    Defined(Grid<'a>),
    Undefined(&'static str),
}

#[derive(Serialize)]
pub struct AnalysisReport<'a> {
    pub input: &'a NetworkSpec,
    /// Input station (1-based) at each relabeled position.
    pub station_order: Vec<usize>,
    pub priority: PriorityView,
    pub matrices: MatricesView<'a>,
    pub traffic: &'a TrafficReport,
    pub classification: Option<ClassSummary>,
    pub tightness: TightnessSection,
}

pub fn analysis_report<'a>(
    input: &'a NetworkSpec,
    d: &'a Derivation,
    classification: Option<ClassSummary>,
    tightness: TightnessSection,
) -> AnalysisReport<'a> {
    AnalysisReport {
        input,
        station_order: d.station_order.iter().map(|i| i + 1).collect(),
        priority: PriorityView {
            lowest: d.priority.lowest.iter().map(|c| c + 1).collect(),
            next_higher: d
                .priority
                .next_higher
                .iter()
                .map(|c| c.map(|c| c + 1))
                .collect(),
        },
        matrices: MatricesView {
            w: Grid(&d.w),
            b: Grid(&d.b),
            f: Grid(&d.f),
            a: Grid(&d.a),
            a_inverse: Grid(&d.a_inverse),
            q: Grid(&d.q),
            r: match &d.r {
                Some(r) => ReflectionView::Defined(Grid(r)),
                None => ReflectionView::Undefined("undefined: Q singular"),
            },
        },
        traffic: &d.traffic,
        classification,
        tightness,
    }
}

pub fn analysis_text(report: &AnalysisReport<'_>, d: &Derivation) -> String {
    let mut out = String::new();
    let k = d.spec.classes;
    let stations: Vec<String> = report
        .station_order
        .iter()
        .map(ToString::to_string)
        .collect();
    let _ = writeln!(out, "network: {} classes, {} stations", k, d.spec.stations);
    let relabel = if d.is_identity_relabel() {
        " (identity)"
    } else {
        ""
    };
    let _ = writeln!(
        out,
        "station order (input station per position): {}{relabel}",
        stations.join(" ")
    );
    let lowest: Vec<String> = report
        .priority
        .lowest
        .iter()
        .zip(&stations)
        .map(|(c, s)| format!("station {s}: class {c}"))
        .collect();
    let _ = writeln!(out, "lowest priority classes: {}", lowest.join(", "));
    let classes = numbered(k);
    for (name, m) in [
        ("W", &d.w),
        ("B", &d.b),
        ("F", &d.f),
        ("A", &d.a),
        ("A^-1", &d.a_inverse),
    ] {
        let _ = writeln!(out, "\n{name} (classes):");
        out.push_str(&labeled_matrix(m, &classes, &classes));
    }
    let _ = writeln!(out, "\nQ (input stations):");
    out.push_str(&labeled_matrix(&d.q, &stations, &stations));
    match &d.r {
        Some(r) => {
            let _ = writeln!(out, "\nR (input stations):");
            out.push_str(&labeled_matrix(r, &stations, &stations));
        }
        None => {
            let _ = writeln!(out, "\nR: undefined (Q singular)");
        }
    }
    let t = &d.traffic;
    let _ = writeln!(out, "\ntraffic:");
    let _ = writeln!(out, "  alpha = {}", vector(&t.alpha));
    let _ = writeln!(
        out,
        "  rho   = {} (input stations {})",
        vector(&t.rho),
        stations.join(" ")
    );
    let _ = writeln!(out, "  heavy traffic: {}", yes_no(t.heavy_traffic));
    if let Some(c) = &report.classification {
        let _ = writeln!(out, "\nclassification of R:");
        for line in class_text(c).lines() {
            let _ = writeln!(out, "  {line}");
        }
    }
    let _ = writeln!(out, "\ntightness of R:");
    if !d.is_identity_relabel() {
        let _ = writeln!(
            out,
            "  (b and witness indices follow the station order above)"
        );
    }
    for line in tightness_text(&report.tightness).lines() {
        let _ = writeln!(out, "  {line}");
    }
    out
}
