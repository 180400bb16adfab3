//! Plain-text rendering helpers.

use std::fmt::Write;

use reflecto::numerics::{RatMatrix, Rational};
use reflecto::tightness::{Assignment, VerificationReport};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

/// Serializes a matrix as a list of rows of rational strings.
pub struct Grid<'a>(pub &'a RatMatrix);

impl Serialize for Grid<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.rows()))?;
        for i in 0..self.0.rows() {
            let row: Vec<String> = self.0.row(i).iter().map(ToString::to_string).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Matrix with row and column labels and right-aligned columns.
pub fn labeled_matrix(m: &RatMatrix, row_labels: &[String], col_labels: &[String]) -> String {
    let label_width = row_labels.iter().map(String::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..m.cols())
        .map(|j| {
            (0..m.rows())
                .map(|i| m[(i, j)].to_string().len())
                .chain([col_labels[j].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    let header: Vec<String> = col_labels
        .iter()
        .zip(&widths)
        .map(|(l, w)| format!("{l:>w$}"))
        .collect();
    let _ = writeln!(out, "  {:label_width$}   {}", "", header.join("  "));
    for i in 0..m.rows() {
        let cells: Vec<String> = (0..m.cols())
            .map(|j| format!("{:>w$}", m[(i, j)].to_string(), w = widths[j]))
            .collect();
        let _ = writeln!(
            out,
            "  {:>label_width$} [ {} ]",
            row_labels[i],
            cells.join("  ")
        );
    }
    out
}

pub fn numbered(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

pub fn vector(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

pub fn subset(indices: &[usize]) -> String {
    let parts: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

pub fn witness(a: &Assignment) -> String {
    let width = a
        .iter()
        .map(|(k, _)| k.to_string().len())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for (k, v) in a.iter() {
        let _ = writeln!(out, "  {:<width$} = {v}", k.to_string());
    }
    out
}

pub fn verification(report: &VerificationReport) -> String {
    let mut out = String::new();
    let failed: Vec<_> = report.failures().collect();
    let _ = writeln!(out, "constraints checked: {}", report.checks.len());
    let _ = writeln!(out, "constraints failed:  {}", failed.len());
    for c in failed {
        let _ = writeln!(out, "  FAIL {}", c.id);
    }
    let _ = writeln!(out, "all-ones assignment: {}", yes_no(report.is_all_ones));
    out
}

pub fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}
