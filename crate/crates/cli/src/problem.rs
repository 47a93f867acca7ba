//! Problem file: the JSON description of a plant, its initial belief and the cost.

use disc_lqg_core::model;
use disc_lqg_core::{CostSpec, InitialBelief, LinearSystem};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Row-major nested array.
pub type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "A")]
    pub a: Rows,
    #[serde(rename = "B")]
    pub b: Rows,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Rows>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Rows>,
    #[serde(rename = "V")]
    pub v: Rows,
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Rows>,
    pub mu0: Vec<f64>,
    #[serde(rename = "Sigma0")]
    pub sigma0: Rows,
    #[serde(rename = "Q")]
    pub q: Rows,
    #[serde(rename = "R")]
    pub r: Rows,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimBlock>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A validated problem ready for design.
#[derive(Debug, Clone)]
pub struct Problem {
    pub sys: LinearSystem,
    pub belief: InitialBelief,
    pub cost: CostSpec,
    /// `C` was omitted: the state is measured directly.
    pub full_state: bool,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_problem(&self) -> Result<Problem, CliError> {
        let a = matrix("A", &self.a)?;
        let b = matrix("B", &self.b)?;
        let v = matrix("V", &self.v)?;
        let n = a.nrows();
        let m = b.ncols();
        let (c, d, w, full_state) = match (&self.c, &self.d, &self.w) {
            (None, None, None) => (
                DMatrix::identity(n, n),
                DMatrix::zeros(n, m),
                DMatrix::identity(n, n),
                true,
            ),
            (None, _, _) => {
                return Err(CliError::Validation(
                    "D and W require C; omit all three for full-state feedback".into(),
                ))
            }
            (Some(_), _, None) => {
                return Err(CliError::Validation("W is required when C is given".into()))
            }
            (Some(c), d, Some(w)) => {
                let c = matrix("C", c)?;
                let d = match d {
                    Some(d) => matrix("D", d)?,
                    None => DMatrix::zeros(c.nrows(), m),
                };
                (c, d, matrix("W", w)?, false)
            }
        };
        let sys = LinearSystem { a, b, c, d, v, w };
        let belief = InitialBelief {
            mu0: DVector::from_vec(self.mu0.clone()),
            sigma0: matrix("Sigma0", &self.sigma0)?,
        };
        let cost = CostSpec {
            q: matrix("Q", &self.q)?,
            r: matrix("R", &self.r)?,
            alpha: self.alpha,
        };
        let report = model::validate(&sys, &belief, &cost);
        if !report.is_valid() {
            return Err(CliError::Validation(report.issues.join("; ")));
        }
        Ok(Problem {
            sys,
            belief,
            cost,
            full_state,
        })
    }
}

fn matrix(name: &str, rows: &Rows) -> Result<DMatrix<f64>, CliError> {
    let cols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
        return Err(CliError::Parse(format!(
            "{name}: row {bad} has {} entries, expected {cols}",
            rows[bad].len()
        )));
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        cols,
        rows.iter().flatten().copied(),
    ))
}

pub fn to_rows(m: &DMatrix<f64>) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}
