//! Mode dispatch: design, verify, simulate.

use std::fs;
use std::path::Path;

use disc_lqg_core::design::{self, CostValue, DesignResult};
use disc_lqg_core::oracle;
use disc_lqg_core::sim::{self, SimConfig};
use disc_lqg_core::GainPair;

use crate::problem::{Problem, ProblemFile};
use crate::report::{
    relative_difference, DesignSection, ErrorSection, OracleSection, Report, SimulationSection,
};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Synthesize gains and analytic costs.
    Design,
    /// Design, then cross-check with the joint-system oracle.
    Verify,
    /// Design, then estimate the cost by Monte Carlo.
    Simulate,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Design => "design",
            Mode::Verify => "verify",
            Mode::Simulate => "simulate",
        }
    }
}

/// Command-line overrides of the problem file's `sim` block.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimOverrides {
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub trajectories: Option<usize>,
}

#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Report,
}

/// Reads `input`, runs `mode` and writes the report to `output`.
/// The report is written on failure too, with its `error` block set.
pub fn run_files(
    mode: Mode,
    input: &Path,
    output: &Path,
    overrides: SimOverrides,
) -> Result<Outcome, CliError> {
    let outcome = match fs::read_to_string(input) {
        Ok(text) => run_text(mode, &text, overrides),
        Err(e) => failure(
            Report::new(mode.name()),
            CliError::Io(format!("{}: {e}", input.display())),
        ),
    };
    let mut json =
        serde_json::to_string_pretty(&outcome.report).map_err(|e| CliError::Io(e.to_string()))?;
    json.push('\n');
    fs::write(output, json).map_err(|e| CliError::Io(format!("{}: {e}", output.display())))?;
    Ok(outcome)
}

pub fn run_text(mode: Mode, text: &str, overrides: SimOverrides) -> Outcome {
    let mut report = Report::new(mode.name());
    let file = match ProblemFile::from_json(text) {
        Ok(file) => file,
        Err(e) => return failure(report, e),
    };
    report.input = Some(file.clone());
    match execute(mode, &file, overrides, &mut report) {
        Ok(()) => Outcome {
            exit_code: 0,
            report,
        },
        Err(e) => failure(report, e),
    }
}

fn failure(mut report: Report, err: CliError) -> Outcome {
    let exit_code = err.exit_code();
    report.error = Some(ErrorSection {
        kind: err.kind(),
        message: err.to_string(),
        exit_code,
    });
    Outcome { exit_code, report }
}

fn execute(
    mode: Mode,
    file: &ProblemFile,
    overrides: SimOverrides,
    report: &mut Report,
) -> Result<(), CliError> {
    let problem = file.to_problem()?;
    let result = synthesize(&problem)?;
    let eigenvalues = match (&result.f, &result.k) {
        (Some(f), Some(k)) if !problem.full_state => {
            design::closed_loop_eigenvalues(&problem.sys, &GainPair::new(f.clone(), k.clone()))?
        }
        (Some(f), _) => design::state_feedback_eigenvalues(&problem.sys, f)?,
        _ => Vec::new(),
    };
    report.design = Some(DesignSection::new(
        &result,
        problem.cost.alpha,
        problem.full_state,
        eigenvalues,
    ));
    match mode {
        Mode::Design => {}
        Mode::Verify => report.oracle = Some(verify(&problem, &result)?),
        Mode::Simulate => {
            let cfg = sim_config(&problem, file, overrides);
            report.simulation = Some(simulate(&problem, &result, &cfg)?);
        }
    }
    Ok(())
}

/// Full-state designs when `C` is omitted, output feedback otherwise;
/// the discounted variants whenever `alpha != 0`.
pub fn synthesize(p: &Problem) -> Result<DesignResult, CliError> {
    let discounted = p.cost.alpha != 0.0;
    let result = match (p.full_state, discounted) {
        (true, false) => design::lqr(&p.sys, &p.belief, &p.cost),
        (true, true) => design::lqr_discounted(&p.sys, &p.belief, &p.cost),
        (false, false) => design::lqg(&p.sys, &p.cost),
        (false, true) => design::lqg_discounted(&p.sys, &p.belief, &p.cost),
    };
    Ok(result?)
}

fn verify(p: &Problem, d: &DesignResult) -> Result<OracleSection, CliError> {
    let analytic = d.cost.and_then(|c| c.value());
    let mut out = OracleSection {
        analytic_cost: analytic,
        ..Default::default()
    };
    let alpha = p.cost.alpha;
    let f = d.f.clone().expect("every design has a controller gain");

    if p.full_state {
        let oracle_cost = match d.cost {
            Some(CostValue::FiniteTotal(_)) if alpha < 0.0 => {
                oracle::discounted_cost_for_gain(&p.sys, &p.belief, &p.cost, &f)?
            }
            Some(CostValue::SteadyRate(_)) => oracle::cost_rate_for_gain(&p.sys, &p.cost, &f)?,
            _ => {
                out.skipped =
                    Some("no finite discounted cost or steady rate to cross-check".into());
                return Ok(out);
            }
        };
        out.method = Some("state_feedback_lyapunov");
        out.oracle_cost = Some(oracle_cost);
        out.relative_difference = analytic.map(|j| relative_difference(j, oracle_cost));
        out.skipped = Some("stationarity check applies to output feedback only".into());
        return Ok(out);
    }

    let gains = d.gains().expect("output-feedback designs have both gains");
    if alpha == 0.0 {
        let rate = oracle::joint_cost_rate(&p.sys, &p.belief, &p.cost, &gains)?;
        out.method = Some("joint_lyapunov_rate");
        out.oracle_cost = Some(rate);
        out.relative_difference = analytic.map(|j| relative_difference(j, rate));
        out.skipped = Some("stationarity check needs a finite discounted cost (alpha < 0)".into());
        return Ok(out);
    }
    if alpha > 0.0 {
        out.skipped = Some("cost is infinite for alpha > 0".into());
        return Ok(out);
    }
    let b = oracle::joint_cost(&p.sys, &p.belief, &p.cost, &gains)?;
    let stationarity = oracle::verify_stationarity(&p.sys, &p.belief, &p.cost, &gains, None)?;
    out.method = Some("joint_lyapunov");
    out.oracle_cost = Some(b.total);
    out.relative_difference = analytic.map(|j| relative_difference(j, b.total));
    out.blockwise_cost = Some(b.total_blockwise);
    out.j11 = Some(b.j11);
    out.j22 = Some(b.j22);
    out.x12_norm = Some(b.x12_norm);
    out.x11_norm = Some(b.x11_norm);
    out.stationarity = Some((&stationarity).into());
    Ok(out)
}

/// Flags win over the file's `sim` block, which wins over the defaults for `alpha`.
pub fn sim_config(p: &Problem, file: &ProblemFile, overrides: SimOverrides) -> SimConfig {
    let block = file.sim.clone().unwrap_or_default();
    let seed = overrides.seed.or(block.seed).unwrap_or(0);
    let defaults = SimConfig::default_for(p.cost.alpha, seed);
    SimConfig {
        dt: overrides.dt.or(block.dt).unwrap_or(defaults.dt),
        horizon: overrides
            .horizon
            .or(block.horizon)
            .unwrap_or(defaults.horizon),
        trajectories: overrides
            .trajectories
            .or(block.trajectories)
            .unwrap_or(defaults.trajectories),
        ..defaults
    }
}

fn simulate(p: &Problem, d: &DesignResult, cfg: &SimConfig) -> Result<SimulationSection, CliError> {
    let res = if p.full_state {
        let f = d.f.as_ref().expect("every design has a controller gain");
        sim::simulate_state_feedback(&p.sys, &p.belief, &p.cost, f, cfg)?
    } else {
        let gains = d.gains().expect("output-feedback designs have both gains");
        sim::simulate(&p.sys, &p.belief, &p.cost, &gains, cfg)?
    };
    let analytic = match d.cost {
        Some(CostValue::FiniteTotal(j)) => Some(j),
        _ => None,
    };
    Ok(SimulationSection::new(cfg, res, analytic))
}
