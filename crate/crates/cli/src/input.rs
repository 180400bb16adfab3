use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use reflecto::numerics::rational::{is_positive, serde_grid, serde_opt_vec};
use reflecto::numerics::{parse_rational_list, RatMatrix, Rational};
use serde::de::DeserializeOwned;
use serde::Deserialize;

/// `{"matrix": [["1", "0"], ["-3", "1"]], "b": ["1", "1"]}` with `b` optional.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    #[serde(with = "serde_grid")]
    pub matrix: Vec<Vec<Rational>>,
    #[serde(default, with = "serde_opt_vec")]
    pub b: Option<Vec<Rational>>,
}

pub struct MatrixInput {
    pub matrix: RatMatrix,
    pub b: Option<Vec<Rational>>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: invalid JSON input", path.display()))
}

pub fn read_matrix(path: &Path) -> Result<MatrixInput> {
    let file: MatrixFile = read_json(path)?;
    if file.matrix.is_empty() {
        bail!("{}: matrix is empty", path.display());
    }
    let d = file.matrix.len();
    if let Some(i) = file.matrix.iter().position(|r| r.len() != d) {
        bail!(
            "{}: matrix row {} has {} entries, expected {d} (matrix must be square)",
            path.display(),
            i + 1,
            file.matrix[i].len()
        );
    }
    let matrix = RatMatrix::from_rows(file.matrix)?;
    if let Some(b) = &file.b {
        check_b(b, d).with_context(|| format!("{}: field b", path.display()))?;
    }
    Ok(MatrixInput { matrix, b: file.b })
}

pub fn check_b(b: &[Rational], d: usize) -> Result<()> {
    if b.len() != d {
        bail!("b has {} entries, expected {d}", b.len());
    }
    if let Some(i) = b.iter().position(|v| !is_positive(v)) {
        bail!("b[{}] = {} is not positive", i + 1, b[i]);
    }
    Ok(())
}

pub fn parse_b(text: &str, d: usize) -> Result<Vec<Rational>> {
    let b = parse_rational_list(text).with_context(|| format!("--b {text}"))?;
    check_b(&b, d).with_context(|| format!("--b {text}"))?;
    Ok(b)
}
