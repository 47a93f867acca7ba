//! Gain synthesis and analytic costs.
//!
//! | routine | feedback | cost |
//! |---|---|---|
//! | [`lqr`] | state, `α = 0` | `tr(XΣ0)` if `V = 0`, else rate `tr(XV)` |
//! | [`lqr_discounted`] | state, any `α` | `tr(Xα(Σ0 − V/2α))` for `α < 0` |
//! | [`kalman`] | observer only | none |
//! | [`lqg`] | output, `α = 0` | rate `tr(XKWKᵀ + EQ) = tr(XV + EFᵀRF)` |
//! | [`lqg_discounted`] | output, any `α` | total for `α < 0`, two equivalent forms |
//!
//! The discounted output-feedback design keeps the separation structure but the observer
//! Riccati equation picks up the initial-state covariance: its constant term is
//! `V − 2α(Σ0 − μ0μ0ᵀ)` and both Riccati equations use `A + αI`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{LqgError, Result};
use crate::linalg::{self, trace_product};
use crate::model::{self, CostSpec, GainPair, InitialBelief, LinearSystem};
use crate::solvers::{self, SolveDiagnostics};

/// Tolerance on the agreement of the two analytic cost forms.
pub const DUAL_FORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostValue {
    /// Expected total cost `J`.
    FiniteTotal(f64),
    /// Steady-state rate `lim dJ(T)/dT`; the total diverges.
    SteadyRate(f64),
    /// `J(T) → ∞` and no steady rate is reported.
    Infinite,
}

impl CostValue {
    pub fn value(&self) -> Option<f64> {
        match *self {
            CostValue::FiniteTotal(v) | CostValue::SteadyRate(v) => Some(v),
            CostValue::Infinite => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CostValue::FiniteTotal(_) => "finite_total",
            CostValue::SteadyRate(_) => "steady_rate",
            CostValue::Infinite => "infinite",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignKind {
    Lqr,
    LqrDiscounted,
    Kalman,
    Lqg,
    LqgDiscounted,
}

impl DesignKind {
    pub fn name(&self) -> &'static str {
        match self {
            DesignKind::Lqr => "lqr",
            DesignKind::LqrDiscounted => "lqr_discounted",
            DesignKind::Kalman => "kalman",
            DesignKind::Lqg => "lqg",
            DesignKind::LqgDiscounted => "lqg_discounted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub kind: DesignKind,
    /// State-feedback gain; absent for observer-only designs.
    pub f: Option<DMatrix<f64>>,
    /// Observer gain; absent for full-state designs.
    pub k: Option<DMatrix<f64>>,
    /// Controller Riccati solution (`X` or `Xα`).
    pub x: Option<DMatrix<f64>>,
    /// Filter Riccati solution (`E` or `Eα`).
    pub e: Option<DMatrix<f64>>,
    pub cost: Option<CostValue>,
    /// Both analytic forms of the cost when the design has two.
    pub cost_forms: Option<(f64, f64)>,
    pub x_diagnostics: Option<SolveDiagnostics>,
    pub e_diagnostics: Option<SolveDiagnostics>,
}

impl DesignResult {
    /// The gain pair of an output-feedback design.
    pub fn gains(&self) -> Option<GainPair> {
        Some(GainPair::new(self.f.clone()?, self.k.clone()?))
    }
}

fn check_agreement(what: &'static str, first: f64, second: f64) -> Result<()> {
    let scale = first.abs().max(second.abs());
    if (first - second).abs() <= DUAL_FORM_TOL * scale {
        Ok(())
    } else {
        Err(LqgError::InternalConsistency {
            what,
            first,
            second,
        })
    }
}

fn check_problem(
    sys: &LinearSystem,
    belief: Option<&InitialBelief>,
    cost: Option<&CostSpec>,
) -> Result<()> {
    let n = sys.states();
    let m = sys.inputs();
    if let Some(belief) = belief {
        if belief.mu0.len() != n || belief.sigma0.shape() != (n, n) {
            return Err(LqgError::DimensionMismatch(
                "initial belief does not match the state dimension".into(),
            ));
        }
    }
    if let Some(cost) = cost {
        if cost.q.shape() != (n, n) || cost.r.shape() != (m, m) {
            return Err(LqgError::DimensionMismatch(
                "Q or R does not match the system".into(),
            ));
        }
    }
    Ok(())
}

/// Controller half shared by every design: `Xα` from the Riccati equation on `A + αI`
/// and `F = R⁻¹ Bᵀ X`.
fn controller(
    sys: &LinearSystem,
    cost: &CostSpec,
    alpha: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>, SolveDiagnostics)> {
    let a = if alpha == 0.0 {
        sys.a.clone()
    } else {
        model::shifted_a(sys, alpha)
    };
    let (x, diag) = solvers::solve_care(&a, &sys.b, &cost.q, &cost.r)?;
    let r = linalg::symmetrize(&cost.r);
    let f = r
        .cholesky()
        .ok_or_else(|| LqgError::InvalidInput("R is not positive definite".into()))?
        .solve(&(sys.b.transpose() * &x));
    Ok((x, f, diag))
}

/// Observer half: `E` from the filter Riccati equation with the given constant term and
/// `K = E Cᵀ W⁻¹`.
fn observer(
    a: &DMatrix<f64>,
    sys: &LinearSystem,
    noise: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>, SolveDiagnostics)> {
    let (e, diag) = solvers::solve_filter_care(a, &sys.c, noise, &sys.w)?;
    let w = linalg::symmetrize(&sys.w);
    // K = E Cᵀ W⁻¹  <=>  W Kᵀ = C E
    let kt = w
        .cholesky()
        .ok_or_else(|| LqgError::InvalidInput("W is not positive definite".into()))?
        .solve(&(&sys.c * &e));
    Ok((e, kt.transpose(), diag))
}

fn is_zero(m: &DMatrix<f64>) -> bool {
    m.iter().all(|x| *x == 0.0)
}

/// Non-discounted full-state LQR.
///
/// The cost is the total `tr(XΣ0)` when `V = 0`; otherwise the total diverges and the
/// steady-state rate `tr(XV)` is reported.
pub fn lqr(sys: &LinearSystem, belief: &InitialBelief, cost: &CostSpec) -> Result<DesignResult> {
    if cost.alpha != 0.0 {
        return Err(LqgError::InvalidInput(format!(
            "lqr is the non-discounted design, got alpha = {}",
            cost.alpha
        )));
    }
    check_problem(sys, Some(belief), Some(cost))?;
    let (x, f, diag) = controller(sys, cost, 0.0)?;
    let value = if is_zero(&sys.v) {
        CostValue::FiniteTotal(trace_product(&x, &belief.sigma0))
    } else {
        CostValue::SteadyRate(trace_product(&x, &sys.v))
    };
    Ok(DesignResult {
        kind: DesignKind::Lqr,
        f: Some(f),
        k: None,
        x: Some(x),
        e: None,
        cost: Some(value),
        cost_forms: None,
        x_diagnostics: Some(diag),
        e_diagnostics: None,
    })
}

/// Discounted full-state LQR on `Aα = A + αI`.
///
/// For `α < 0` the total is `tr(Xα(Σ0 − V/(2α)))`. At `α = 0` this is exactly [`lqr`].
/// For `α > 0` the total diverges whenever the noise reaches the weighted state
/// (`tr(XαV) > 0`); the gain still prescribes closed-loop eigenvalues left of `−α`.
pub fn lqr_discounted(
    sys: &LinearSystem,
    belief: &InitialBelief,
    cost: &CostSpec,
) -> Result<DesignResult> {
    if cost.alpha == 0.0 {
        return lqr(sys, belief, cost);
    }
    check_problem(sys, Some(belief), Some(cost))?;
    let alpha = cost.alpha;
    let (x, f, diag) = controller(sys, cost, alpha)?;
    let value = if alpha < 0.0 {
        let effective = &belief.sigma0 - &sys.v / (2.0 * alpha);
        CostValue::FiniteTotal(trace_product(&x, &effective))
    } else if trace_product(&x, &sys.v) > 0.0 {
        CostValue::Infinite
    } else {
        CostValue::FiniteTotal(trace_product(&x, &belief.sigma0))
    };
    Ok(DesignResult {
        kind: DesignKind::LqrDiscounted,
        f: Some(f),
        k: None,
        x: Some(x),
        e: None,
        cost: Some(value),
        cost_forms: None,
        x_diagnostics: Some(diag),
        e_diagnostics: None,
    })
}

/// Steady-state Kalman-Bucy observer: `K = E Cᵀ W⁻¹` with `A E + E Aᵀ + V − E Cᵀ W⁻¹ C E = 0`.
pub fn kalman(sys: &LinearSystem) -> Result<DesignResult> {
    let (e, k, diag) = observer(&sys.a, sys, &sys.v)?;
    Ok(DesignResult {
        kind: DesignKind::Kalman,
        f: None,
        k: Some(k),
        x: None,
        e: Some(e),
        cost: None,
        cost_forms: None,
        x_diagnostics: None,
        e_diagnostics: Some(diag),
    })
}

/// Non-discounted output-feedback LQG (separation: LQR gain plus Kalman-Bucy observer).
///
/// Reports the steady-state cost rate, evaluated as `tr(XKWKᵀ + EQ)` and
/// cross-checked against `tr(XV + EFᵀRF)`.
pub fn lqg(sys: &LinearSystem, cost: &CostSpec) -> Result<DesignResult> {
    if cost.alpha != 0.0 {
        return Err(LqgError::InvalidInput(format!(
            "lqg is the non-discounted design, got alpha = {}",
            cost.alpha
        )));
    }
    check_problem(sys, None, Some(cost))?;
    let (x, f, x_diag) = controller(sys, cost, 0.0)?;
    let (e, k, e_diag) = observer(&sys.a, sys, &sys.v)?;
    let (first, second) = cost_rate_output_feedback(sys, cost, &x, &e, &f, &k);
    check_agreement("output-feedback cost rate", first, second)?;
    Ok(DesignResult {
        kind: DesignKind::Lqg,
        f: Some(f),
        k: Some(k),
        x: Some(x),
        e: Some(e),
        cost: Some(CostValue::SteadyRate(first)),
        cost_forms: Some((first, second)),
        x_diagnostics: Some(x_diag),
        e_diagnostics: Some(e_diag),
    })
}

/// Both forms of the non-discounted steady-state rate:
/// `(tr(XKWKᵀ + EQ), tr(XV + EFᵀRF))`.
pub fn cost_rate_output_feedback(
    sys: &LinearSystem,
    cost: &CostSpec,
    x: &DMatrix<f64>,
    e: &DMatrix<f64>,
    f: &DMatrix<f64>,
    k: &DMatrix<f64>,
) -> (f64, f64) {
    let kwk = k * &sys.w * k.transpose();
    let frf = f.transpose() * &cost.r * f;
    let first = trace_product(x, &kwk) + trace_product(e, &cost.q);
    let second = trace_product(x, &sys.v) + trace_product(e, &frf);
    (first, second)
}

/// `V − 2α(Σ0 − μ0μ0ᵀ)`, the constant term of the discounted observer Riccati equation.
pub fn effective_noise(sys: &LinearSystem, belief: &InitialBelief, alpha: f64) -> DMatrix<f64> {
    if alpha == 0.0 {
        return sys.v.clone();
    }
    linalg::symmetrize(&(&sys.v - belief.covariance() * (2.0 * alpha)))
}

/// Discounted output-feedback LQG.
///
/// `Fα = R⁻¹BᵀXα` with `Aαᵀ Xα + Xα Aα + Q − Xα B R⁻¹ Bᵀ Xα = 0`, and `Kα = Eα Cᵀ W⁻¹`
/// with `Aα Eα + Eα Aαᵀ + V − 2α(Σ0 − μ0μ0ᵀ) − Eα Cᵀ W⁻¹ C Eα = 0`. The observer
/// starts at `x̂0 = μ0`. For `α < 0` the expected total cost is reported; for
/// `α ≥ 0` it diverges but the gains are still returned.
pub fn lqg_discounted(
    sys: &LinearSystem,
    belief: &InitialBelief,
    cost: &CostSpec,
) -> Result<DesignResult> {
    check_problem(sys, Some(belief), Some(cost))?;
    let alpha = cost.alpha;
    let noise = effective_noise(sys, belief, alpha);
    if !linalg::is_psd(&noise) {
        return Err(LqgError::IndefiniteEffectiveNoise {
            min_eigenvalue: linalg::min_sym_eigenvalue(&noise),
        });
    }
    let (x, f, x_diag) = controller(sys, cost, alpha)?;
    let a_shifted = if alpha == 0.0 {
        sys.a.clone()
    } else {
        model::shifted_a(sys, alpha)
    };
    let (e, k, e_diag) = observer(&a_shifted, sys, &noise)?;

    let (value, forms) = if alpha < 0.0 {
        let (first, second) = cost_output_feedback_discounted(sys, belief, cost, &x, &e, &f, &k)?;
        check_agreement("discounted output-feedback cost", first, second)?;
        (CostValue::FiniteTotal(first), Some((first, second)))
    } else {
        (CostValue::Infinite, None)
    };
    Ok(DesignResult {
        kind: DesignKind::LqgDiscounted,
        f: Some(f),
        k: Some(k),
        x: Some(x),
        e: Some(e),
        cost: Some(value),
        cost_forms: forms,
        x_diagnostics: Some(x_diag),
        e_diagnostics: Some(e_diag),
    })
}

/// Both forms of the discounted expected total cost (`α < 0`):
///
/// `tr(XαKαWKαᵀ + EαQ)/(−2α) + μ0ᵀXαμ0` and `tr(XαV + EαFαᵀRFα)/(−2α) + tr(XαΣ0)`.
pub fn cost_output_feedback_discounted(
    sys: &LinearSystem,
    belief: &InitialBelief,
    cost: &CostSpec,
    x: &DMatrix<f64>,
    e: &DMatrix<f64>,
    f: &DMatrix<f64>,
    k: &DMatrix<f64>,
) -> Result<(f64, f64)> {
    let alpha = cost.alpha;
    if alpha >= 0.0 {
        return Err(LqgError::AlphaNotNegative { alpha });
    }
    let scale = 1.0 / (-2.0 * alpha);
    let (rate_first, rate_second) = cost_rate_output_feedback(sys, cost, x, e, f, k);
    let mean_part = (belief.mu0.transpose() * x * &belief.mu0)[(0, 0)];
    let first = scale * rate_first + mean_part;
    let second = scale * rate_second + trace_product(x, &belief.sigma0);
    Ok((first, second))
}

/// Full-state discounted total `tr(Xα(Σ0 − V/(2α)))` for `α < 0`.
pub fn cost_full_state_discounted(
    sys: &LinearSystem,
    belief: &InitialBelief,
    x: &DMatrix<f64>,
    alpha: f64,
) -> Result<f64> {
    if alpha >= 0.0 {
        return Err(LqgError::AlphaNotNegative { alpha });
    }
    Ok(trace_product(x, &(&belief.sigma0 - &sys.v / (2.0 * alpha))))
}

/// Spectrum of the joint (state, estimation error) closed loop
/// `[[A − BF, −BF], [0, A − KC]]`: the union of the spectra of its diagonal blocks.
pub fn closed_loop_eigenvalues(sys: &LinearSystem, gains: &GainPair) -> Result<Vec<Complex64>> {
    gains.check_dimensions(sys)?;
    let mut eig = linalg::eigenvalues(&(&sys.a - &sys.b * &gains.f));
    eig.extend(linalg::eigenvalues(&(&sys.a - &gains.k * &sys.c)));
    Ok(eig)
}

/// Spectrum of `A − BF` for state feedback.
pub fn state_feedback_eigenvalues(sys: &LinearSystem, f: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if f.shape() != (sys.inputs(), sys.states()) {
        return Err(LqgError::DimensionMismatch(
            "F does not match the system".into(),
        ));
    }
    Ok(linalg::eigenvalues(&(&sys.a - &sys.b * f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    const GOLDEN: f64 = 0.618_033_988_749_894_9; // (√5 − 1)/2

    fn s(x: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, x)
    }

    fn scalar(a: f64, v: f64, w: f64) -> LinearSystem {
        LinearSystem::new(s(a), s(1.0), s(1.0), s(0.0), s(v), s(w)).unwrap()
    }

    fn belief(mu: f64, sigma: f64) -> InitialBelief {
        InitialBelief::new(DVector::from_element(1, mu), s(sigma)).unwrap()
    }

    fn cost(q: f64, alpha: f64) -> CostSpec {
        CostSpec::new(s(q), s(1.0), alpha).unwrap()
    }

    fn scalar_of(m: &Option<DMatrix<f64>>) -> f64 {
        m.as_ref().unwrap()[(0, 0)]
    }

    #[test]
    fn lqr_examples() {
        let r = lqr(&scalar(0.0, 0.0, 1.0), &belief(0.0, 1.0), &cost(1.0, 0.0)).unwrap();
        assert!((scalar_of(&r.f) - 1.0).abs() < 1e-13);
        assert!((scalar_of(&r.x) - 1.0).abs() < 1e-13);
        assert!(matches!(r.cost, Some(CostValue::FiniteTotal(j)) if (j - 1.0).abs() < 1e-13));

        let r = lqr(&scalar(-1.0, 1.0, 1.0), &belief(0.0, 1.0), &cost(0.0, 0.0)).unwrap();
        assert_eq!(scalar_of(&r.f), 0.0);
        assert_eq!(r.cost, Some(CostValue::SteadyRate(0.0)));

        let r = lqr(&scalar(0.0, 1.0, 1.0), &belief(0.0, 1.0), &cost(1.0, 0.0)).unwrap();
        assert!(matches!(r.cost, Some(CostValue::SteadyRate(j)) if (j - 1.0).abs() < 1e-13));
    }

    #[test]
    fn lqr_rejects_unstabilizable_and_discount() {
        let mut sys = scalar(1.0, 0.0, 1.0);
        sys.b = s(0.0);
        assert_eq!(
            lqr(&sys, &belief(0.0, 1.0), &cost(1.0, 0.0)),
            Err(LqgError::NotStabilizable)
        );
        assert!(matches!(
            lqr(&scalar(0.0, 0.0, 1.0), &belief(0.0, 1.0), &cost(1.0, -1.0)),
            Err(LqgError::InvalidInput(_))
        ));
    }

    #[test]
    fn lqr_discounted_examples() {
        let r =
            lqr_discounted(&scalar(0.0, 0.0, 1.0), &belief(0.0, 1.0), &cost(1.0, -0.5)).unwrap();
        assert!((scalar_of(&r.x) - GOLDEN).abs() < 1e-13);
        assert!((scalar_of(&r.f) - GOLDEN).abs() < 1e-13);

        let r =
            lqr_discounted(&scalar(0.0, 1.0, 1.0), &belief(0.0, 1.0), &cost(1.0, -0.5)).unwrap();
        let j = r.cost.unwrap().value().unwrap();
        assert!((j - 2.0 * GOLDEN).abs() < 1e-12, "{j}");

        let sys = scalar(0.3, 1.0, 1.0);
        assert_eq!(
            lqr_discounted(&sys, &belief(0.2, 1.0), &cost(2.0, 0.0)).unwrap(),
            lqr(&sys, &belief(0.2, 1.0), &cost(2.0, 0.0)).unwrap()
        );
    }

    #[test]
    fn lqr_discounted_prescribed_stability() {
        let r = lqr_discounted(&scalar(0.0, 1.0, 1.0), &belief(0.0, 1.0), &cost(1.0, 0.5)).unwrap();
        assert_eq!(r.cost, Some(CostValue::Infinite));
        let pole = -scalar_of(&r.f);
        assert!(pole < -0.5);

        let r = lqr_discounted(&scalar(0.0, 0.0, 1.0), &belief(0.0, 1.0), &cost(1.0, 0.5)).unwrap();
        assert!(matches!(r.cost, Some(CostValue::FiniteTotal(_))));
    }

    #[test]
    fn kalman_examples() {
        let r = kalman(&scalar(0.0, 1.0, 1.0)).unwrap();
        assert!((scalar_of(&r.e) - 1.0).abs() < 1e-13);
        assert!((scalar_of(&r.k) - 1.0).abs() < 1e-13);
        assert!(r.f.is_none() && r.cost.is_none());

        let r = kalman(&scalar(-1.0, 0.0, 1.0)).unwrap();
        assert!(scalar_of(&r.k).abs() < 1e-15);

        let r = kalman(&scalar(0.0, 2.0, 1.0)).unwrap();
        assert!((scalar_of(&r.e) - 2f64.sqrt()).abs() < 1e-13);
        assert!((scalar_of(&r.k) - 2f64.sqrt()).abs() < 1e-13);

        let mut sys = scalar(0.5, 1.0, 1.0);
        sys.c = s(0.0);
        assert_eq!(kalman(&sys), Err(LqgError::NotDetectable));
    }

    #[test]
    fn lqg_examples() {
        let r = lqg(&scalar(0.0, 1.0, 1.0), &cost(1.0, 0.0)).unwrap();
        assert!((scalar_of(&r.f) - 1.0).abs() < 1e-13);
        assert!((scalar_of(&r.k) - 1.0).abs() < 1e-13);
        assert!((r.cost.unwrap().value().unwrap() - 2.0).abs() < 1e-12);

        let r = lqg(&scalar(-1.0, 1.0, 1.0), &cost(0.0, 0.0)).unwrap();
        assert_eq!(scalar_of(&r.f), 0.0);
        assert_eq!(r.cost, Some(CostValue::SteadyRate(0.0)));

        let r = lqg(&scalar(0.0, 2.0, 1.0), &cost(1.0, 0.0)).unwrap();
        let (first, second) = r.cost_forms.unwrap();
        let expected = 2.0 + 2f64.sqrt();
        assert!((first - expected).abs() < 1e-12);
        assert!((second - expected).abs() < 1e-12);
    }

    #[test]
    fn golden_ratio_discounted_lqg() {
        let r =
            lqg_discounted(&scalar(0.0, 1.0, 1.0), &belief(0.0, 1.0), &cost(1.0, -0.5)).unwrap();
        assert!((scalar_of(&r.x) - GOLDEN).abs() < 1e-12);
        assert!((scalar_of(&r.f) - GOLDEN).abs() < 1e-12);
        assert!((scalar_of(&r.e) - 1.0).abs() < 1e-12);
        assert!((scalar_of(&r.k) - 1.0).abs() < 1e-12);
        let (first, second) = r.cost_forms.unwrap();
        assert!((first - (1.0 + GOLDEN)).abs() < 1e-12);
        assert!((second - (1.0 + GOLDEN)).abs() < 1e-12);
    }

    #[test]
    fn discounted_lqg_at_zero_alpha_matches_lqg_gains() {
        let sys = scalar(0.4, 1.5, 0.7);
        let plain = lqg(&sys, &cost(2.0, 0.0)).unwrap();
        let disc = lqg_discounted(&sys, &belief(0.3, 2.0), &cost(2.0, 0.0)).unwrap();
        assert_eq!(plain.f, disc.f);
        assert_eq!(plain.k, disc.k);
        assert_eq!(disc.cost, Some(CostValue::Infinite));
    }

    #[test]
    fn deterministic_start_reduces_to_shifted_filter() {
        let sys = scalar(0.2, 1.0, 0.5);
        let r = lqg_discounted(
            &sys,
            &InitialBelief::deterministic(DVector::from_element(1, 2.0)),
            &cost(1.0, -0.7),
        )
        .unwrap();
        let (e, _) = solvers::solve_filter_care(&s(0.2 - 0.7), &s(1.0), &s(1.0), &s(0.5)).unwrap();
        assert!((r.e.unwrap() - e).norm() < 1e-14);
    }

    #[test]
    fn indefinite_effective_noise_is_rejected() {
        // V − 2α·cov = 0.1 − 2·1·1 < 0
        let err =
            lqg_discounted(&scalar(0.0, 0.1, 1.0), &belief(0.0, 1.0), &cost(1.0, 1.0)).unwrap_err();
        assert!(
            matches!(err, LqgError::IndefiniteEffectiveNoise { min_eigenvalue } if min_eigenvalue < 0.0)
        );
    }

    #[test]
    fn closed_loop_eigenvalue_examples() {
        let sys = scalar(0.0, 1.0, 1.0);
        let gains = GainPair::new(s(GOLDEN), s(1.0));
        let mut eig: Vec<f64> = closed_loop_eigenvalues(&sys, &gains)
            .unwrap()
            .iter()
            .map(|l| l.re)
            .collect();
        eig.sort_by(f64::total_cmp);
        assert!((eig[0] + 1.0).abs() < 1e-14);
        assert!((eig[1] + GOLDEN).abs() < 1e-14);

        let sys = LinearSystem::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -2.0, -3.0]),
            DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            s(0.0),
            DMatrix::identity(2, 2),
            s(1.0),
        )
        .unwrap();
        let zero = GainPair::new(DMatrix::zeros(1, 2), DMatrix::zeros(2, 1));
        let mut eig: Vec<f64> = closed_loop_eigenvalues(&sys, &zero)
            .unwrap()
            .iter()
            .map(|l| l.re)
            .collect();
        eig.sort_by(f64::total_cmp);
        let expected = [-2.0, -2.0, -1.0, -1.0];
        assert!(
            eig.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-12),
            "{eig:?}"
        );
    }

    #[test]
    fn prescribed_stability_on_scalar() {
        for alpha in [0.1, 0.5, 1.0] {
            // small initial uncertainty keeps V − 2α·cov positive
            let r = lqg_discounted(&scalar(0.3, 1.0, 1.0), &belief(1.0, 1.1), &cost(1.0, alpha))
                .unwrap();
            let eig = closed_loop_eigenvalues(&scalar(0.3, 1.0, 1.0), &r.gains().unwrap()).unwrap();
            assert!(eig.iter().all(|l| l.re < -alpha + 1e-8), "{alpha}: {eig:?}");
        }
    }

    #[test]
    fn cost_grows_with_process_noise() {
        let mut last = 0.0;
        for v in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let j = lqg_discounted(&scalar(0.2, v, 1.0), &belief(0.5, 1.5), &cost(1.0, -0.4))
                .unwrap()
                .cost
                .unwrap()
                .value()
                .unwrap();
            assert!(j >= last, "J({v}) = {j} < {last}");
            last = j;
        }
    }
}
