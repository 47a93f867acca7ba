//! Monte Carlo simulation of the closed loop.
//!
//! Each trajectory integrates the plant and the observer
//! `dx̂ = (A x̂ + B u) dt + K (dy − (C x̂ + D u) dt)` with `u = −F x̂` by Euler-Maruyama.
//! Process noise enters only the plant (`dv ~ N(0, V dt)`); measurement noise enters only
//! through the observed increment `dy = (C x + D u) dt + dw`, `dw ~ N(0, W dt)`. The
//! discounted cost `∫ e^{2αt}(xᵀQx + uᵀRu) dt` is accumulated with a left-endpoint sum.
//!
//! Trajectory `i` draws from its own ChaCha stream `(seed, i)`, so results do not depend
//! on scheduling, and a paired comparison feeds both closed loops the same noise.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{LqgError, Result};
use crate::linalg;
use crate::model::{CostSpec, GainPair, InitialBelief, LinearSystem};

const CHOLESKY_JITTER: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub trajectories: usize,
    pub seed: u64,
    /// Observer start; `μ0` when absent.
    pub x_hat0_override: Option<DVector<f64>>,
}

impl SimConfig {
    pub fn new(dt: f64, horizon: f64, trajectories: usize, seed: u64) -> Self {
        Self {
            dt,
            horizon,
            trajectories,
            seed,
            x_hat0_override: None,
        }
    }

    /// `dt = 1e-3`, `T = 30/|α|` (`T = 30` at `α = 0`), `10⁴` trajectories, so that
    /// `e^{2αT} = e^{−60}` leaves a negligible tail.
    pub fn default_for(alpha: f64, seed: u64) -> Self {
        let horizon = if alpha == 0.0 {
            30.0
        } else {
            30.0 / alpha.abs()
        };
        Self::new(1e-3, horizon, 10_000, seed)
    }

    pub fn steps(&self) -> usize {
        ((self.horizon / self.dt).round() as usize).max(1)
    }

    fn check(&self, n: usize) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(LqgError::InvalidInput(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.dt) {
            return Err(LqgError::InvalidInput(format!(
                "horizon {} must be finite and at least dt {}",
                self.horizon, self.dt
            )));
        }
        if self.trajectories == 0 {
            return Err(LqgError::InvalidInput(
                "at least one trajectory is required".into(),
            ));
        }
        if let Some(x) = &self.x_hat0_override {
            if x.len() != n {
                return Err(LqgError::DimensionMismatch(format!(
                    "x_hat0_override has length {}, expected {n}",
                    x.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub mean_cost: f64,
    /// Sample standard deviation over `√trajectories`.
    pub std_error: f64,
    pub per_trajectory_costs: Vec<f64>,
}

impl SimResult {
    fn from_costs(costs: Vec<f64>) -> Self {
        let (mean_cost, std_error) = mean_and_std_error(&costs);
        Self {
            mean_cost,
            std_error,
            per_trajectory_costs: costs,
        }
    }
}

/// Paired statistics of two closed loops driven by identical noise.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedComparison {
    pub a: SimResult,
    pub b: SimResult,
    /// Mean of `cost_a − cost_b` per trajectory.
    pub mean_difference: f64,
    pub paired_std_error: f64,
    pub differences: Vec<f64>,
}

fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Simulates `u = −F x̂` with the observer gain `K`.
pub fn simulate(
    sys: &LinearSystem,
    belief: &InitialBelief,
    cost: &CostSpec,
    gains: &GainPair,
    config: &SimConfig,
) -> Result<SimResult> {
    gains.check_dimensions(sys)?;
    let model = Model::new(sys, belief, cost, config)?;
    let costs = model.run(&[Controller::observer(gains)], config)?;
    Ok(SimResult::from_costs(
        costs.into_iter().map(|c| c[0]).collect(),
    ))
}

/// Simulates full-state feedback `u = −F x` (no observer, no measurement noise).
pub fn simulate_state_feedback(
    sys: &LinearSystem,
    belief: &InitialBelief,
    cost: &CostSpec,
    f: &DMatrix<f64>,
    config: &SimConfig,
) -> Result<SimResult> {
    if f.shape() != (sys.inputs(), sys.states()) {
        return Err(LqgError::DimensionMismatch(
            "F does not match the system".into(),
        ));
    }
    let model = Model::new(sys, belief, cost, config)?;
    let costs = model.run(&[Controller::state(f)], config)?;
    Ok(SimResult::from_costs(
        costs.into_iter().map(|c| c[0]).collect(),
    ))
}

/// Runs both gain pairs on common random numbers and reports `cost_a − cost_b`.
pub fn compare_designs(
    sys: &LinearSystem,
    belief: &InitialBelief,
    cost: &CostSpec,
    gains_a: &GainPair,
    gains_b: &GainPair,
    config: &SimConfig,
) -> Result<PairedComparison> {
    gains_a.check_dimensions(sys)?;
    gains_b.check_dimensions(sys)?;
    let model = Model::new(sys, belief, cost, config)?;
    let costs = model.run(
        &[Controller::observer(gains_a), Controller::observer(gains_b)],
        config,
    )?;
    let differences: Vec<f64> = costs.iter().map(|c| c[0] - c[1]).collect();
    let (mean_difference, paired_std_error) = mean_and_std_error(&differences);
    Ok(PairedComparison {
        a: SimResult::from_costs(costs.iter().map(|c| c[0]).collect()),
        b: SimResult::from_costs(costs.iter().map(|c| c[1]).collect()),
        mean_difference,
        paired_std_error,
        differences,
    })
}

/// Lower-triangular `L` with `L Lᵀ ≈ M` for symmetric PSD `M`.
fn psd_factor(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if m.iter().all(|x| *x == 0.0) {
        return Ok(DMatrix::zeros(n, n));
    }
    let sym = linalg::symmetrize(m);
    if let Some(chol) = sym.clone().cholesky() {
        return Ok(chol.l());
    }
    let scale = sym.diagonal().max().max(1.0);
    let jittered = &sym + DMatrix::identity(n, n) * (CHOLESKY_JITTER * scale);
    jittered.cholesky().map(|c| c.l()).ok_or_else(|| {
        LqgError::InvalidInput("noise or initial covariance is not positive semidefinite".into())
    })
}

/// Row-major copy for the inner loop.
fn flat(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

/// `out = M v` for row-major `M` with `v.len()` columns.
#[inline]
fn mat_vec(m: &[f64], v: &[f64], out: &mut [f64]) {
    let cols = v.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &m[i * cols..(i + 1) * cols];
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
}

#[inline]
fn quad(m: &[f64], v: &[f64]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        let row = &m[i * n..(i + 1) * n];
        acc += v[i] * row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    }
    acc
}

struct Controller {
    f: Vec<f64>,
    /// `None` for full-state feedback.
    k: Option<Vec<f64>>,
}

impl Controller {
    fn observer(gains: &GainPair) -> Self {
        Self {
            f: flat(&gains.f),
            k: Some(flat(&gains.k)),
        }
    }

    fn state(f: &DMatrix<f64>) -> Self {
        Self {
            f: flat(f),
            k: None,
        }
    }
}

struct Model {
    n: usize,
    m: usize,
    p: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
    q: Vec<f64>,
    r: Vec<f64>,
    v_factor: Vec<f64>,
    w_factor: Vec<f64>,
    x0_factor: Vec<f64>,
    mu0: Vec<f64>,
    x_hat0: Vec<f64>,
    alpha: f64,
}

impl Model {
    fn new(
        sys: &LinearSystem,
        belief: &InitialBelief,
        cost: &CostSpec,
        config: &SimConfig,
    ) -> Result<Self> {
        let n = sys.states();
        config.check(n)?;
        if belief.mu0.len() != n
            || cost.q.shape() != (n, n)
            || cost.r.shape() != (sys.inputs(), sys.inputs())
        {
            return Err(LqgError::DimensionMismatch(
                "belief or cost does not match the system".into(),
            ));
        }
        let x_hat0 = config
            .x_hat0_override
            .clone()
            .unwrap_or_else(|| belief.mu0.clone());
        Ok(Self {
            n,
            m: sys.inputs(),
            p: sys.outputs(),
            a: flat(&sys.a),
            b: flat(&sys.b),
            c: flat(&sys.c),
            d: flat(&sys.d),
            q: flat(&cost.q),
            r: flat(&cost.r),
            v_factor: flat(&psd_factor(&sys.v)?),
            w_factor: flat(&psd_factor(&sys.w)?),
            x0_factor: flat(&psd_factor(&belief.covariance())?),
            mu0: belief.mu0.iter().copied().collect(),
            x_hat0: x_hat0.iter().copied().collect(),
            alpha: cost.alpha,
        })
    }

    fn run(&self, controllers: &[Controller], config: &SimConfig) -> Result<Vec<Vec<f64>>> {
        (0..config.trajectories)
            .into_par_iter()
            .map(|i| self.trajectory(controllers, config, i))
            .collect()
    }

    fn trajectory(
        &self,
        controllers: &[Controller],
        config: &SimConfig,
        index: usize,
    ) -> Result<Vec<f64>> {
        let (n, m, p) = (self.n, self.m, self.p);
        let dt = config.dt;
        let sqrt_dt = dt.sqrt();
        let decay = (2.0 * self.alpha * dt).exp();

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(index as u64);
        let mut normals = |buf: &mut [f64]| {
            for z in buf.iter_mut() {
                *z = StandardNormal.sample(&mut rng);
            }
        };

        let mut z = vec![0.0; n.max(p)];
        let mut x0 = vec![0.0; n];
        normals(&mut z[..n]);
        mat_vec(&self.x0_factor, &z[..n], &mut x0);
        for (xi, mu) in x0.iter_mut().zip(&self.mu0) {
            *xi += mu;
        }

        let loops = controllers.len();
        let mut x: Vec<Vec<f64>> = vec![x0; loops];
        let mut xh: Vec<Vec<f64>> = vec![self.x_hat0.clone(); loops];
        let mut cost = vec![0.0; loops];

        let mut dv = vec![0.0; n];
        let mut dw = vec![0.0; p];
        let mut u = vec![0.0; m];
        let mut ru = vec![0.0; m];
        let mut drift = vec![0.0; n];
        let mut bu = vec![0.0; n];
        let mut hat_drift = vec![0.0; n];
        let mut y_true = vec![0.0; p];
        let mut y_hat = vec![0.0; p];
        let mut du = vec![0.0; p];
        let mut innov = vec![0.0; p];
        let mut correction = vec![0.0; n];

        let mut discount = 1.0;
        for _ in 0..config.steps() {
            normals(&mut z[..n]);
            mat_vec(&self.v_factor, &z[..n], &mut dv);
            normals(&mut z[..p]);
            mat_vec(&self.w_factor, &z[..p], &mut dw);
            dv.iter_mut()
                .chain(dw.iter_mut())
                .for_each(|e| *e *= sqrt_dt);

            for (l, ctrl) in controllers.iter().enumerate() {
                let (x, xh) = (&mut x[l], &mut xh[l]);
                let fed = if ctrl.k.is_some() { &*xh } else { &*x };
                mat_vec(&ctrl.f, fed, &mut u);
                u.iter_mut().for_each(|ui| *ui = -*ui);

                mat_vec(&self.r, &u, &mut ru);
                let stage = quad(&self.q, x) + u.iter().zip(&ru).map(|(a, b)| a * b).sum::<f64>();
                cost[l] += discount * stage * dt;

                mat_vec(&self.b, &u, &mut bu);
                mat_vec(&self.a, x, &mut drift);

                if let Some(k) = &ctrl.k {
                    mat_vec(&self.d, &u, &mut du);
                    mat_vec(&self.c, x, &mut y_true);
                    mat_vec(&self.c, xh, &mut y_hat);
                    for j in 0..p {
                        let dy = (y_true[j] + du[j]) * dt + dw[j];
                        innov[j] = dy - (y_hat[j] + du[j]) * dt;
                    }
                    mat_vec(k, &innov, &mut correction);
                    mat_vec(&self.a, xh, &mut hat_drift);
                    for i in 0..n {
                        xh[i] += (hat_drift[i] + bu[i]) * dt + correction[i];
                    }
                }
                for i in 0..n {
                    x[i] += (drift[i] + bu[i]) * dt + dv[i];
                }
                if ctrl.k.is_none() {
                    xh.copy_from_slice(x);
                }
            }
            discount *= decay;
        }

        let finite = cost.iter().all(|c| c.is_finite())
            && x.iter()
                .chain(xh.iter())
                .all(|s| s.iter().all(|v| v.is_finite()));
        if !finite {
            return Err(LqgError::NonFiniteState { trajectory: index });
        }
        Ok(cost)
    }
}
