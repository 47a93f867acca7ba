//! Exact expected discounted cost of an arbitrary gain pair.
//!
//! With `e = x̂ − x` the closed loop `u = −F x̂` is the linear SDE
//! `d[x; e] = Ã [x; e] dt + dṽ`, `Ã = [[A − BF, −BF], [0, A − KC]]`, and the cost
//! integrand is `[x; e]ᵀ Q̃ [x; e]`. For `α < 0` and `Ã + αI` Hurwitz,
//!
//! `J = tr(X̃ (Σ̃0 − Ṽ/(2α)))` with `(Ã + αI)ᵀ X̃ + X̃ (Ã + αI) + Q̃ = 0`.
//!
//! [`joint_cost`] evaluates this twice: once on the full `2n` system and once
//! blockwise (`X̃11`, `X̃12`, `X̃22` from three coupled `n×n` equations), and requires
//! the two to agree. Nothing here calls the Riccati solvers, so the oracle is
//! independent of the design path it checks.

use nalgebra::{DMatrix, DVector};

use crate::error::{LqgError, Result};
use crate::linalg::{self, trace_product};
use crate::model::{shift, CostSpec, GainPair, InitialBelief, LinearSystem};
use crate::solvers;

/// Agreement required between the full and blockwise evaluations.
pub const BLOCK_AGREEMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JointCoordinates {
    /// `[x; e]`, the true state and the estimation error.
    #[default]
    StateError,
    /// `[x̂; e]`, the estimate and the estimation error.
    EstimateError,
}

/// Joint closed loop of plant and observer.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSystem {
    pub coordinates: JointCoordinates,
    pub a_tilde: DMatrix<f64>,
    pub v_tilde: DMatrix<f64>,
    pub q_tilde: DMatrix<f64>,
    pub mu_tilde0: DVector<f64>,
    pub sigma_tilde0: DMatrix<f64>,
}

fn blocks(
    n: usize,
    b11: &DMatrix<f64>,
    b12: &DMatrix<f64>,
    b21: &DMatrix<f64>,
    b22: &DMatrix<f64>,
) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(b11);
    out.view_mut((0, n), (n, n)).copy_from(b12);
    out.view_mut((n, 0), (n, n)).copy_from(b21);
    out.view_mut((n, n), (n, n)).copy_from(b22);
    out
}

/// Assembles the `[x; e]` joint system (observer started at `x̂0 = μ0`).
pub fn build_joint(
    sys: &LinearSystem,
    belief: &InitialBelief,
    cost: &CostSpec,
    gains: &GainPair,
) -> Result<JointSystem> {
    build_joint_in(sys, belief, cost, gains, JointCoordinates::StateError)
}

pub fn build_joint_in(
    sys: &LinearSystem,
    belief: &InitialBelief,
    cost: &CostSpec,
    gains: &GainPair,
    coordinates: JointCoordinates,
) -> Result<JointSystem> {
    gains.check_dimensions(sys)?;
    let n = sys.states();
    if belief.mu0.len() != n
        || cost.q.shape() != (n, n)
        || cost.r.shape() != (sys.inputs(), sys.inputs())
    {
        return Err(LqgError::DimensionMismatch(
            "belief or cost does not match the system".into(),
        ));
    }
    let (f, k) = (&gains.f, &gains.k);
    let bf = &sys.b * f;
    let kc = k * &sys.c;
    let kwk = linalg::symmetrize(&(k * &sys.w * k.transpose()));
    let frf = linalg::symmetrize(&(f.transpose() * &cost.r * f));
    let v = &sys.v;
    let q = &cost.q;
    let zero = DMatrix::zeros(n, n);
    let mean = belief.mean_outer();
    let cov = &belief.sigma0 - &mean;
    let observer = &sys.a - &kc;

    let joint = match coordinates {
        JointCoordinates::StateError => JointSystem {
            coordinates,
            a_tilde: blocks(n, &(&sys.a - &bf), &(-&bf), &zero, &observer),
            v_tilde: blocks(n, v, &(-v), &(-v), &(&kwk + v)),
            q_tilde: blocks(n, &(q + &frf), &frf, &frf, &frf),
            mu_tilde0: stack(&belief.mu0, &DVector::zeros(n)),
            // E[x0 x0ᵀ] = Σ0, E[x0 e0ᵀ] = μ0μ0ᵀ − Σ0, E[e0 e0ᵀ] = Σ0 − μ0μ0ᵀ
            sigma_tilde0: blocks(n, &belief.sigma0, &(-&cov), &(-&cov), &cov),
        },
        JointCoordinates::EstimateError => JointSystem {
            coordinates,
            // dx̂ = (A − BF) x̂ − KC e + K dw
            a_tilde: blocks(n, &(&sys.a - &bf), &(-&kc), &zero, &observer),
            v_tilde: blocks(n, &kwk, &kwk, &kwk, &(&kwk + v)),
            // x = x̂ − e
            q_tilde: blocks(n, &(q + &frf), &(-q), &(-q), q),
            mu_tilde0: stack(&belief.mu0, &DVector::zeros(n)),
            sigma_tilde0: blocks(n, &mean, &zero, &zero, &cov),
        },
    };
    Ok(joint)
}

fn stack(top: &DVector<f64>, bottom: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(
        top.len() + bottom.len(),
        top.iter().chain(bottom.iter()).copied(),
    )
}

/// Full-matrix evaluation of the discounted cost of a joint system.
/// Returns `(J, X̃)`.
pub fn joint_cost_full(joint: &JointSystem, alpha: f64) -> Result<(f64, DMatrix<f64>)> {
    if alpha >= 0.0 {
        return Err(LqgError::AlphaNotNegative { alpha });
    }
    let shifted = shift(&joint.a_tilde, alpha);
    let abscissa = linalg::spectral_abscissa(&shifted);
    if abscissa >= -1e-10 {
        return Err(LqgError::NotDiscountedStable { abscissa });
    }
    let (x, _) = solvers::solve_lyapunov(&shifted, &joint.q_tilde)?;
    let weight = &joint.sigma_tilde0 - &joint.v_tilde / (2.0 * alpha);
    Ok((trace_product(&x, &weight), x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointCostBreakdown {
    /// Full `2n` evaluation.
    pub total: f64,
    /// Blockwise evaluation; agrees with `total` to [`BLOCK_AGREEMENT_TOL`].
    pub total_blockwise: f64,
    /// `tr(X̃11 (Σ0 − V/(2α)))`.
    pub j11: f64,
    /// `tr(X̃22 (Σ0 − μ0μ0ᵀ − V/(2α) − KWKᵀ/(2α)))`.
    pub j22: f64,
    pub x12_norm: f64,
    pub x11_norm: f64,
    pub x_tilde: DMatrix<f64>,
}

/// Expected discounted cost of `(F, K)` with the observer started at `μ0`, `α < 0`.
pub fn joint_cost(
    sys: &LinearSystem,
    belief: &InitialBelief,
    cost: &CostSpec,
    gains: &GainPair,
) -> Result<JointCostBreakdown> {
    let alpha = cost.alpha;
    if alpha >= 0.0 {
        return Err(LqgError::AlphaNotNegative { alpha });
    }
    let joint = build_joint(sys, belief, cost, gains)?;
    let (total, x_tilde) = joint_cost_full(&joint, alpha)?;

    let (f, k) = (&gains.f, &gains.k);
    let bf = &sys.b * f;
    let frf = f.transpose() * &cost.r * f;
    let kwk = k * &sys.w * k.transpose();
    let a1 = shift(&(&sys.a - &bf), alpha);
    let a2 = shift(&(&sys.a - k * &sys.c), alpha);

    // A1ᵀ X11 + X11 A1 + Q + FᵀRF = 0
    let (x11, _) = solvers::solve_lyapunov(&a1, &(&cost.q + &frf))?;
    // A1ᵀ X12 + X12 A2 + FᵀRF − X11 B F = 0
    let x12 = solvers::solve_sylvester(&a1.transpose(), &a2, &(&frf - &x11 * &bf))?;
    let x21 = x12.transpose();
    // A2ᵀ X22 + X22 A2 + FᵀRF − FᵀBᵀ X12 − X21 B F = 0
    let c22 = &frf - bf.transpose() * &x12 - &x21 * &bf;
    let (x22, _) = solvers::solve_lyapunov(&a2, &c22)?;

    let two_alpha = 2.0 * alpha;
    let noise_share = &sys.v / two_alpha;
    let cov_minus_noise = belief.covariance() - &noise_share;
    let j11 = trace_product(&x11, &(&belief.sigma0 - &noise_share));
    let j22 = trace_product(&x22, &(&cov_minus_noise - &kwk / two_alpha));
    let cross = -trace_product(&x12, &cov_minus_noise) - trace_product(&x21, &cov_minus_noise);
    let total_blockwise = j11 + cross + j22;

    let scale = total.abs().max(total_blockwise.abs());
    if (total - total_blockwise).abs() > BLOCK_AGREEMENT_TOL * scale {
        return Err(LqgError::InternalConsistency {
            what: "joint cost full vs blockwise",
            first: total,
            second: total_blockwise,
        });
    }
    Ok(JointCostBreakdown {
        total,
        total_blockwise,
        j11,
        j22,
        x12_norm: x12.norm(),
        x11_norm: x11.norm(),
        x_tilde,
    })
}

/// Non-discounted steady-state cost rate `tr(X̃Ṽ)` of `(F, K)` with `Ã` Hurwitz.
pub fn joint_cost_rate(
    sys: &LinearSystem,
    belief: &InitialBelief,
    cost: &CostSpec,
    gains: &GainPair,
) -> Result<f64> {
    let joint = build_joint(sys, belief, cost, gains)?;
    let abscissa = linalg::spectral_abscissa(&joint.a_tilde);
    if abscissa >= -1e-10 {
        return Err(LqgError::NotHurwitz { abscissa });
    }
    let (x, _) = solvers::solve_lyapunov(&joint.a_tilde, &joint.q_tilde)?;
    Ok(trace_product(&x, &joint.v_tilde))
}

/// Non-discounted steady-state cost rate `tr(XV)` of state feedback `u = −Fx`, where
/// `(A − BF)ᵀX + X(A − BF) + Q + FᵀRF = 0`.
pub fn cost_rate_for_gain(sys: &LinearSystem, cost: &CostSpec, f: &DMatrix<f64>) -> Result<f64> {
    let x = state_feedback_value(sys, cost, f, 0.0)?;
    Ok(trace_product(&x, &sys.v))
}

/// Discounted total `tr(X̄(Σ0 − V/(2α)))` of state feedback `u = −Fx`, `α < 0`.
pub fn discounted_cost_for_gain(
    sys: &LinearSystem,
    belief: &InitialBelief,
    cost: &CostSpec,
    f: &DMatrix<f64>,
) -> Result<f64> {
    let alpha = cost.alpha;
    if alpha >= 0.0 {
        return Err(LqgError::AlphaNotNegative { alpha });
    }
    let x = state_feedback_value(sys, cost, f, alpha)?;
    Ok(trace_product(
        &x,
        &(&belief.sigma0 - &sys.v / (2.0 * alpha)),
    ))
}

fn state_feedback_value(
    sys: &LinearSystem,
    cost: &CostSpec,
    f: &DMatrix<f64>,
    alpha: f64,
) -> Result<DMatrix<f64>> {
    if f.shape() != (sys.inputs(), sys.states()) {
        return Err(LqgError::DimensionMismatch(
            "F does not match the system".into(),
        ));
    }
    let closed = shift(&(&sys.a - &sys.b * f), alpha);
    let weight = &cost.q + f.transpose() * &cost.r * f;
    let (x, _) = solvers::solve_lyapunov(&closed, &weight)?;
    Ok(x)
}

/// Central-difference gradient of [`joint_cost`] with respect to every gain entry.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    pub grad_f: DMatrix<f64>,
    pub grad_k: DMatrix<f64>,
    pub max_grad_f: f64,
    pub max_grad_k: f64,
    pub step_f: f64,
    pub step_k: f64,
}

impl StationarityReport {
    pub fn max_gradient(&self) -> f64 {
        self.max_grad_f.max(self.max_grad_k)
    }
}

/// Default step `1e-5·max(1, ‖gain‖_F)`.
pub fn default_step(gain: &DMatrix<f64>) -> f64 {
    1e-5 * gain.norm().max(1.0)
}

/// Probes `∂J/∂F_ij` and `∂J/∂K_ij` by central differences of the joint cost.
/// `step = None` uses [`default_step`] per gain.
pub fn verify_stationarity(
    sys: &LinearSystem,
    belief: &InitialBelief,
    cost: &CostSpec,
    gains: &GainPair,
    step: Option<f64>,
) -> Result<StationarityReport> {
    gains.check_dimensions(sys)?;
    let step_f = step.unwrap_or_else(|| default_step(&gains.f));
    let step_k = step.unwrap_or_else(|| default_step(&gains.k));
    let eval = |g: &GainPair| joint_cost(sys, belief, cost, g).map(|b| b.total);

    let probe = |which: usize, h: f64| -> Result<DMatrix<f64>> {
        let base = if which == 0 { &gains.f } else { &gains.k };
        let mut grad = DMatrix::zeros(base.nrows(), base.ncols());
        for i in 0..base.nrows() {
            for j in 0..base.ncols() {
                let mut plus = gains.clone();
                let mut minus = gains.clone();
                let (p, m) = if which == 0 {
                    (&mut plus.f, &mut minus.f)
                } else {
                    (&mut plus.k, &mut minus.k)
                };
                p[(i, j)] += h;
                m[(i, j)] -= h;
                grad[(i, j)] = (eval(&plus)? - eval(&minus)?) / (2.0 * h);
            }
        }
        Ok(grad)
    };
    let grad_f = probe(0, step_f)?;
    let grad_k = probe(1, step_k)?;
    let max_abs = |g: &DMatrix<f64>| g.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    Ok(StationarityReport {
        max_grad_f: max_abs(&grad_f),
        max_grad_k: max_abs(&grad_k),
        grad_f,
        grad_k,
        step_f,
        step_k,
    })
}
