//! Report file written by every run.

use disc_lqg_core::design::{DesignResult, DUAL_FORM_TOL};
use disc_lqg_core::oracle::StationarityReport;
use disc_lqg_core::sim::{SimConfig, SimResult};
use disc_lqg_core::solvers::SolveDiagnostics;
use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::problem::{to_rows, ProblemFile, Rows};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<ProblemFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorSection>,
}

impl Report {
    pub fn new(mode: &'static str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            mode,
            input: None,
            design: None,
            oracle: None,
            simulation: None,
            error: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignSection {
    pub kind: &'static str,
    /// `"discounted"` or `"non-discounted"`.
    pub regime: &'static str,
    /// `"output"` or `"full_state"`.
    pub feedback: &'static str,
    pub alpha: f64,
    #[serde(rename = "F")]
    pub f: Option<Rows>,
    #[serde(rename = "K")]
    pub k: Option<Rows>,
    #[serde(rename = "X")]
    pub x: Option<Rows>,
    #[serde(rename = "E")]
    pub e: Option<Rows>,
    pub cost: CostSection,
    pub diagnostics: DiagnosticsSection,
    pub closed_loop_eigenvalues: Vec<Eigenvalue>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CostSection {
    /// `"finite_total"`, `"steady_rate"` or `"infinite"`.
    pub kind: &'static str,
    /// `null` when the cost is infinite.
    pub value: Option<f64>,
    /// The two analytic forms of the output-feedback cost.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forms: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forms_relative_difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forms_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsSection {
    #[serde(rename = "X")]
    pub x: Option<Diagnostics>,
    #[serde(rename = "E")]
    pub e: Option<Diagnostics>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub residual_norm: f64,
    pub relative_residual: f64,
    pub iterations: usize,
    pub spectral_abscissa: f64,
}

impl From<SolveDiagnostics> for Diagnostics {
    fn from(d: SolveDiagnostics) -> Self {
        Self {
            residual_norm: d.residual_norm,
            relative_residual: d.relative_residual,
            iterations: d.iterations,
            spectral_abscissa: d.spectral_abscissa,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex<f64>> for Eigenvalue {
    fn from(l: Complex<f64>) -> Self {
        Self { re: l.re, im: l.im }
    }
}

impl DesignSection {
    pub fn new(
        d: &DesignResult,
        alpha: f64,
        full_state: bool,
        eigenvalues: Vec<Complex<f64>>,
    ) -> Self {
        let rows = |m: &Option<DMatrix<f64>>| m.as_ref().map(to_rows);
        let cost = d.cost.expect("design results carry a cost");
        let forms = d.cost_forms.map(|(a, b)| [a, b]);
        Self {
            kind: d.kind.name(),
            regime: if alpha == 0.0 {
                "non-discounted"
            } else {
                "discounted"
            },
            feedback: if full_state { "full_state" } else { "output" },
            alpha,
            f: rows(&d.f),
            k: rows(&d.k),
            x: rows(&d.x),
            e: rows(&d.e),
            cost: CostSection {
                kind: cost.kind(),
                value: cost.value(),
                forms,
                forms_relative_difference: forms.map(|[a, b]| relative_difference(a, b)),
                forms_tolerance: forms.map(|_| DUAL_FORM_TOL),
            },
            diagnostics: DiagnosticsSection {
                x: d.x_diagnostics.map(Into::into),
                e: d.e_diagnostics.map(Into::into),
            },
            closed_loop_eigenvalues: eigenvalues.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct OracleSection {
    /// `"joint_lyapunov"`, `"joint_lyapunov_rate"` or `"state_feedback_lyapunov"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blockwise_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j11: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j22: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x12_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x11_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationarity: Option<Stationarity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stationarity {
    pub max_gradient: f64,
    pub max_grad_f: f64,
    pub max_grad_k: f64,
    pub step_f: f64,
    pub step_k: f64,
    pub grad_f: Rows,
    pub grad_k: Rows,
}

impl From<&StationarityReport> for Stationarity {
    fn from(s: &StationarityReport) -> Self {
        Self {
            max_gradient: s.max_gradient(),
            max_grad_f: s.max_grad_f,
            max_grad_k: s.max_grad_k,
            step_f: s.step_f,
            step_k: s.step_k,
            grad_f: to_rows(&s.grad_f),
            grad_k: to_rows(&s.grad_k),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationSection {
    pub dt: f64,
    pub horizon: f64,
    pub trajectories: usize,
    pub seed: u64,
    pub mean_cost: f64,
    pub std_error: f64,
    /// Analytic discounted total, when finite.
    pub analytic_cost: Option<f64>,
    pub within_three_std_errors: Option<bool>,
    pub per_trajectory_costs: Vec<f64>,
}

impl SimulationSection {
    pub fn new(cfg: &SimConfig, res: SimResult, analytic: Option<f64>) -> Self {
        Self {
            dt: cfg.dt,
            horizon: cfg.horizon,
            trajectories: cfg.trajectories,
            seed: cfg.seed,
            mean_cost: res.mean_cost,
            std_error: res.std_error,
            analytic_cost: analytic,
            within_three_std_errors: analytic
                .map(|j| (res.mean_cost - j).abs() <= 3.0 * res.std_error),
            per_trajectory_costs: res.per_trajectory_costs,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorSection {
    /// `"parse"`, `"validation"`, `"solver"` or `"io"`.
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
}

pub fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
