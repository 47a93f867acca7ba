//! Problem-description types and structural checks.
//!
//! The plant is `dx = (Ax + Bu)dt + dv`, `dy = (Cx + Du)dt + dw` with white-noise
//! intensities `V` and `W`. The initial state has mean `mu0` and *second moment*
//! `sigma0 = E[x0 x0ᵀ]`; its covariance is `sigma0 - mu0 mu0ᵀ`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{LqgError, Result};
use crate::linalg::{self, REL_TOL};

/// Continuous-time plant with process and measurement noise intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub w: DMatrix<f64>,
}

impl LinearSystem {
    /// Checks only that the dimensions agree; see [`validate`] for the full invariant list.
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        v: DMatrix<f64>,
        w: DMatrix<f64>,
    ) -> Result<Self> {
        let sys = Self { a, b, c, d, v, w };
        let issues = sys.dimension_issues();
        if let Some(first) = issues.into_iter().next() {
            return Err(LqgError::DimensionMismatch(first));
        }
        Ok(sys)
    }

    /// A plant whose state is measured directly: `C = I`, `D = 0`, `W = I`.
    /// The measurement fields are placeholders; the full-state designs never read them.
    pub fn full_state(a: DMatrix<f64>, b: DMatrix<f64>, v: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let m = b.ncols();
        Self::new(
            a,
            b,
            DMatrix::identity(n, n),
            DMatrix::zeros(n, m),
            v,
            DMatrix::identity(n, n),
        )
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    fn dimension_issues(&self) -> Vec<String> {
        let n = self.a.nrows();
        let m = self.b.ncols();
        let p = self.c.nrows();
        let mut issues = Vec::new();
        let mut expect = |name: &str, mat: &DMatrix<f64>, rows: usize, cols: usize| {
            if mat.shape() != (rows, cols) {
                issues.push(format!(
                    "{name} is {}x{}, expected {rows}x{cols}",
                    mat.nrows(),
                    mat.ncols()
                ));
            }
        };
        expect("A", &self.a, n, n);
        expect("B", &self.b, n, m);
        expect("C", &self.c, p, n);
        expect("D", &self.d, p, m);
        expect("V", &self.v, n, n);
        expect("W", &self.w, p, p);
        issues
    }
}

/// Gaussian description of the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialBelief {
    pub mu0: DVector<f64>,
    /// Second moment `E[x0 x0ᵀ]`, not the covariance.
    pub sigma0: DMatrix<f64>,
}

impl InitialBelief {
    pub fn new(mu0: DVector<f64>, sigma0: DMatrix<f64>) -> Result<Self> {
        if sigma0.shape() != (mu0.len(), mu0.len()) {
            return Err(LqgError::DimensionMismatch(format!(
                "Sigma0 is {}x{}, expected {n}x{n}",
                sigma0.nrows(),
                sigma0.ncols(),
                n = mu0.len()
            )));
        }
        Ok(Self { mu0, sigma0 })
    }

    /// Known initial state: `sigma0 = x0 x0ᵀ`.
    pub fn deterministic(x0: DVector<f64>) -> Self {
        let sigma0 = &x0 * x0.transpose();
        Self { mu0: x0, sigma0 }
    }

    pub fn mean_outer(&self) -> DMatrix<f64> {
        &self.mu0 * self.mu0.transpose()
    }

    /// `Σ0 − μ0 μ0ᵀ`, symmetrized.
    pub fn covariance(&self) -> DMatrix<f64> {
        linalg::symmetrize(&(&self.sigma0 - self.mean_outer()))
    }
}

/// Quadratic weights and the discount exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSpec {
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    /// `alpha < 0` discounts the future; `alpha > 0` prescribes a degree of stability.
    pub alpha: f64,
}

impl CostSpec {
    pub fn new(q: DMatrix<f64>, r: DMatrix<f64>, alpha: f64) -> Result<Self> {
        if !q.is_square() || !r.is_square() {
            return Err(LqgError::DimensionMismatch("Q and R must be square".into()));
        }
        if !alpha.is_finite() {
            return Err(LqgError::InvalidInput(format!(
                "alpha must be finite, got {alpha}"
            )));
        }
        Ok(Self { q, r, alpha })
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self {
            alpha,
            ..self.clone()
        }
    }
}

/// State-feedback gain `F` (m×n) and observer gain `K` (n×p); the control law is `u = −F x̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainPair {
    pub f: DMatrix<f64>,
    pub k: DMatrix<f64>,
}

impl GainPair {
    pub fn new(f: DMatrix<f64>, k: DMatrix<f64>) -> Self {
        Self { f, k }
    }

    pub fn check_dimensions(&self, sys: &LinearSystem) -> Result<()> {
        let (n, m, p) = (sys.states(), sys.inputs(), sys.outputs());
        if self.f.shape() != (m, n) {
            return Err(LqgError::DimensionMismatch(format!(
                "F is {}x{}, expected {m}x{n}",
                self.f.nrows(),
                self.f.ncols()
            )));
        }
        if self.k.shape() != (n, p) {
            return Err(LqgError::DimensionMismatch(format!(
                "K is {}x{}, expected {n}x{p}",
                self.k.nrows(),
                self.k.ncols()
            )));
        }
        Ok(())
    }
}

/// `A + αI`.
pub fn shifted_a(sys: &LinearSystem, alpha: f64) -> DMatrix<f64> {
    shift(&sys.a, alpha)
}

pub(crate) fn shift(a: &DMatrix<f64>, alpha: f64) -> DMatrix<f64> {
    let mut out = a.clone();
    for i in 0..out.nrows() {
        out[(i, i)] += alpha;
    }
    out
}

/// Eigenvalues with real part above this are treated as not strictly stable.
const MARGINAL: f64 = -1e-10;

fn pbh_rank_deficient(a: &DMatrix<f64>, b: &DMatrix<f64>, lambda: Complex64) -> bool {
    let n = a.nrows();
    let m = b.ncols();
    let mut pencil = DMatrix::<Complex64>::zeros(n, n + m);
    for i in 0..n {
        for j in 0..n {
            pencil[(i, j)] = Complex64::new(a[(i, j)], 0.0);
        }
        pencil[(i, i)] -= lambda;
        for j in 0..m {
            pencil[(i, n + j)] = Complex64::new(b[(i, j)], 0.0);
        }
    }
    let mut sv: Vec<f64> = pencil.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    let largest = sv.first().copied().unwrap_or(0.0);
    if sv.len() < n || largest == 0.0 {
        return true;
    }
    sv[n - 1] / largest < REL_TOL
}

/// PBH test: every eigenvalue with `Re(λ) ≥ 0` (marginal ones included) must have
/// `rank [A − λI, B] = n`.
pub fn is_stabilizable(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    assert_eq!(a.nrows(), b.nrows(), "A and B must have the same row count");
    linalg::eigenvalues(a)
        .into_iter()
        .filter(|l| l.re > MARGINAL)
        .all(|l| !pbh_rank_deficient(a, b, l))
}

/// Dual of [`is_stabilizable`]: `(Aᵀ, Cᵀ)` stabilizable.
pub fn is_detectable(a: &DMatrix<f64>, c: &DMatrix<f64>) -> bool {
    is_stabilizable(&a.transpose(), &c.transpose())
}

/// Violated invariants; empty when the problem is valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.issues.join("; "))
    }
}

pub fn validate(sys: &LinearSystem, belief: &InitialBelief, cost: &CostSpec) -> ValidationReport {
    let mut issues = sys.dimension_issues();
    let n = sys.a.nrows();
    let m = sys.b.ncols();

    if belief.mu0.len() != n {
        issues.push(format!("mu0 has length {}, expected {n}", belief.mu0.len()));
    }
    if belief.sigma0.shape() != (n, n) {
        issues.push(format!(
            "Sigma0 is {}x{}, expected {n}x{n}",
            belief.sigma0.nrows(),
            belief.sigma0.ncols()
        ));
    }
    if cost.q.shape() != (n, n) {
        issues.push(format!(
            "Q is {}x{}, expected {n}x{n}",
            cost.q.nrows(),
            cost.q.ncols()
        ));
    }
    if cost.r.shape() != (m, m) {
        issues.push(format!(
            "R is {}x{}, expected {m}x{m}",
            cost.r.nrows(),
            cost.r.ncols()
        ));
    }
    if !issues.is_empty() {
        return ValidationReport { issues };
    }

    let all = [
        ("A", &sys.a),
        ("B", &sys.b),
        ("C", &sys.c),
        ("D", &sys.d),
        ("V", &sys.v),
        ("W", &sys.w),
        ("Sigma0", &belief.sigma0),
        ("Q", &cost.q),
        ("R", &cost.r),
    ];
    for (name, mat) in all {
        if mat.iter().any(|x| !x.is_finite()) {
            issues.push(format!("{name} has non-finite entries"));
        }
    }
    if belief.mu0.iter().any(|x| !x.is_finite()) {
        issues.push("mu0 has non-finite entries".into());
    }
    if !cost.alpha.is_finite() {
        issues.push("alpha is not finite".into());
    }
    if !issues.is_empty() {
        return ValidationReport { issues };
    }

    let mut definite = |name: &str, mat: &DMatrix<f64>, strict: bool| {
        if !linalg::is_symmetric(mat) {
            issues.push(format!("{name} not symmetric"));
        } else if strict && !linalg::is_pd(mat) {
            issues.push(format!("{name} not positive definite"));
        } else if !strict && !linalg::is_psd(mat) {
            issues.push(format!("{name} not positive semidefinite"));
        }
    };
    definite("V", &sys.v, false);
    definite("W", &sys.w, true);
    definite("Q", &cost.q, false);
    definite("R", &cost.r, true);
    if !linalg::is_symmetric(&belief.sigma0) {
        issues.push("Sigma0 not symmetric".into());
    } else if !linalg::is_psd(&belief.covariance()) {
        issues.push("Sigma0 - mu0 mu0^T not positive semidefinite".into());
    }
    ValidationReport { issues }
}
