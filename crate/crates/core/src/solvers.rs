//! Lyapunov and algebraic Riccati equation kernels.
//!
//! Every successful return satisfies its residual bound; solutions are symmetrized
//! but never projected onto the PSD cone.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{LqgError, Result};
use crate::linalg::{self, ComplexSchur};
use crate::model::{is_detectable, is_stabilizable};

/// Relative residual bound every solver guarantees.
pub const RESIDUAL_BOUND: f64 = 1e-9;

/// Systems up to this order are solved through the vectorized Kronecker form.
pub const VECTORIZED_MAX_ORDER: usize = 64;

const MAX_NEWTON_STEPS: usize = 5;
const HURWITZ_MARGIN: f64 = -1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveDiagnostics {
    /// Frobenius norm of the equation residual.
    pub residual_norm: f64,
    /// `residual_norm / max(1, ‖constant term‖_F)`.
    pub relative_residual: f64,
    /// Newton-Kleinman refinement steps accepted (0 for direct methods).
    pub iterations: usize,
    /// Spectral abscissa of the closed-loop (or equation) matrix; negative on success.
    pub spectral_abscissa: f64,
}

impl SolveDiagnostics {
    fn new(residual: &DMatrix<f64>, data: &DMatrix<f64>, iterations: usize, abscissa: f64) -> Self {
        let residual_norm = linalg::fro(residual);
        Self {
            residual_norm,
            relative_residual: residual_norm / linalg::fro(data).max(1.0),
            iterations,
            spectral_abscissa: abscissa,
        }
    }

    fn check(self) -> Result<Self> {
        if self.relative_residual <= RESIDUAL_BOUND {
            Ok(self)
        } else {
            Err(LqgError::InaccurateSolution {
                relative_residual: self.relative_residual,
                bound: RESIDUAL_BOUND,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LyapunovMethod {
    /// Vectorized solve up to [`VECTORIZED_MAX_ORDER`], Schur reduction above.
    #[default]
    Auto,
    Vectorized,
    Schur,
}

/// `Aᵀ X + X A + Q`.
pub fn lyapunov_residual(a: &DMatrix<f64>, x: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    a.transpose() * x + x * a + q
}

/// Solves `Aclᵀ X + X Acl + Qrhs = 0` for Hurwitz `Acl`.
pub fn solve_lyapunov(
    acl: &DMatrix<f64>,
    qrhs: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, SolveDiagnostics)> {
    solve_lyapunov_with(acl, qrhs, LyapunovMethod::Auto)
}

pub fn solve_lyapunov_with(
    acl: &DMatrix<f64>,
    qrhs: &DMatrix<f64>,
    method: LyapunovMethod,
) -> Result<(DMatrix<f64>, SolveDiagnostics)> {
    let n = acl.nrows();
    if !acl.is_square() || qrhs.shape() != (n, n) {
        return Err(LqgError::DimensionMismatch(format!(
            "Lyapunov equation needs square matrices of equal order, got {:?} and {:?}",
            acl.shape(),
            qrhs.shape()
        )));
    }
    let abscissa = linalg::spectral_abscissa(acl);
    if n > 0 && abscissa >= HURWITZ_MARGIN {
        return Err(LqgError::NotHurwitz { abscissa });
    }
    let qs = linalg::symmetrize(qrhs);
    let x = match method {
        LyapunovMethod::Vectorized => lyapunov_vectorized(acl, &qs)?,
        LyapunovMethod::Schur => lyapunov_schur(acl, &qs)?,
        LyapunovMethod::Auto => lyapunov_direct(acl, &qs)?,
    };
    let x = linalg::symmetrize(&x);
    let diag = SolveDiagnostics::new(&lyapunov_residual(acl, &x, &qs), &qs, 0, abscissa).check()?;
    Ok((x, diag))
}

fn lyapunov_direct(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.nrows() <= VECTORIZED_MAX_ORDER {
        lyapunov_vectorized(a, q)
    } else {
        lyapunov_schur(a, q)
    }
}

fn lyapunov_vectorized(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let at = a.transpose();
    solve_sylvester(&at, a, q)
}

/// Solves `L Y + Y M + C = 0` through the dense `(I ⊗ L + Mᵀ ⊗ I) vec(Y) = −vec(C)` system.
pub fn solve_sylvester(
    l: &DMatrix<f64>,
    m: &DMatrix<f64>,
    c: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let (r, k) = (l.nrows(), m.nrows());
    if !l.is_square() || !m.is_square() || c.shape() != (r, k) {
        return Err(LqgError::DimensionMismatch(format!(
            "Sylvester equation with L {:?}, M {:?}, C {:?}",
            l.shape(),
            m.shape(),
            c.shape()
        )));
    }
    let size = r * k;
    let mut big = DMatrix::<f64>::zeros(size, size);
    // vec is column-major: index (i, j) -> j * r + i
    for j in 0..k {
        for i in 0..r {
            let row = j * r + i;
            for p in 0..r {
                big[(row, j * r + p)] += l[(i, p)];
            }
            for q in 0..k {
                big[(row, q * r + i)] += m[(q, j)];
            }
        }
    }
    let rhs = nalgebra::DVector::from_iterator(size, c.iter().map(|x| -x));
    let sol = big
        .lu()
        .solve(&rhs)
        .ok_or_else(|| LqgError::Decomposition("Sylvester operator is singular".into()))?;
    Ok(DMatrix::from_column_slice(r, k, sol.as_slice()))
}

/// Bartels-Stewart on the complex Schur form `A = U T Uᴴ`:
/// `Tᴴ Y + Y T = −Uᴴ Q U` is solved entrywise, then `X = U Y Uᴴ`.
fn lyapunov_schur(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let schur = ComplexSchur::new(a)?;
    let (u, t) = (&schur.u, &schur.t);
    let rhs = -(u.adjoint() * linalg::to_complex(q) * u);
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = rhs[(i, j)];
            for k in 0..i {
                acc -= t[(k, i)].conj() * y[(k, j)];
            }
            for l in 0..j {
                acc -= y[(i, l)] * t[(l, j)];
            }
            y[(i, j)] = acc / (t[(i, i)].conj() + t[(j, j)]);
        }
    }
    Ok(linalg::real_part(&(u * y * u.adjoint())))
}

/// `Aᵀ X + X A + Q − X B R⁻¹ Bᵀ X`.
pub fn care_residual(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    x: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let s = gain_weight(b, r)?;
    Ok(care_residual_with(a, &s, q, x))
}

fn care_residual_with(
    a: &DMatrix<f64>,
    s: &DMatrix<f64>,
    q: &DMatrix<f64>,
    x: &DMatrix<f64>,
) -> DMatrix<f64> {
    a.transpose() * x + x * a + q - x * s * x
}

/// `B R⁻¹ Bᵀ`, symmetrized.
fn gain_weight(b: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = linalg::symmetrize(r).cholesky().ok_or_else(|| {
        LqgError::InvalidInput(
            "weight matrix of the quadratic term is not positive definite".into(),
        )
    })?;
    let rinv_bt = chol.solve(&b.transpose());
    Ok(linalg::symmetrize(&(b * rinv_bt)))
}

/// Stabilizing solution of `Aᵀ X + X A + Q − X B R⁻¹ Bᵀ X = 0`.
///
/// Hamiltonian stable-subspace extraction on an ordered complex Schur form,
/// refined by up to five Newton-Kleinman steps.
pub fn solve_care(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, SolveDiagnostics)> {
    let n = a.nrows();
    let m = b.ncols();
    if !a.is_square() || b.nrows() != n || q.shape() != (n, n) || r.shape() != (m, m) {
        return Err(LqgError::DimensionMismatch(format!(
            "CARE with A {:?}, B {:?}, Q {:?}, R {:?}",
            a.shape(),
            b.shape(),
            q.shape(),
            r.shape()
        )));
    }
    if !is_stabilizable(a, b) {
        return Err(LqgError::NotStabilizable);
    }
    let q = linalg::symmetrize(q);
    let s = gain_weight(b, r)?;
    if n == 0 {
        let empty = DMatrix::zeros(0, 0);
        return Ok((
            empty.clone(),
            SolveDiagnostics::new(&empty, &empty, 0, f64::NEG_INFINITY),
        ));
    }

    let mut x = hamiltonian_solution(a, &s, &q)?;
    let mut residual = linalg::fro(&care_residual_with(a, &s, &q, &x));
    let mut iterations = 0;
    for _ in 0..MAX_NEWTON_STEPS {
        if residual == 0.0 {
            break;
        }
        let acl = a - &s * &x;
        if linalg::spectral_abscissa(&acl) >= HURWITZ_MARGIN {
            break;
        }
        let Ok(delta) = lyapunov_direct(&acl, &care_residual_with(a, &s, &q, &x)) else {
            break;
        };
        let next = linalg::symmetrize(&(&x + delta));
        let next_residual = linalg::fro(&care_residual_with(a, &s, &q, &next));
        if next_residual >= residual {
            break;
        }
        x = next;
        residual = next_residual;
        iterations += 1;
    }

    let abscissa = linalg::spectral_abscissa(&(a - &s * &x));
    if abscissa >= HURWITZ_MARGIN {
        return Err(LqgError::NoStabilizingSolution(format!(
            "closed loop spectral abscissa {abscissa:.3e}"
        )));
    }
    let diag = SolveDiagnostics::new(&care_residual_with(a, &s, &q, &x), &q, iterations, abscissa)
        .check()?;
    Ok((x, diag))
}

fn hamiltonian_solution(
    a: &DMatrix<f64>,
    s: &DMatrix<f64>,
    q: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut h = DMatrix::<f64>::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((0, n), (n, n)).copy_from(&(-s));
    h.view_mut((n, 0), (n, n)).copy_from(&(-q));
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let mut schur = ComplexSchur::new(&h)?;
    let stable = schur.reorder(|l| l.re < 0.0);
    if stable != n {
        return Err(LqgError::NoStabilizingSolution(format!(
            "Hamiltonian has {stable} stable eigenvalues, expected {n} (eigenvalues on the imaginary axis)"
        )));
    }
    let u11 = schur.u.view((0, 0), (n, n)).into_owned();
    let u21 = schur.u.view((n, 0), (n, n)).into_owned();
    // X U11 = U21  <=>  U11ᵀ Xᵀ = U21ᵀ
    let xt = u11
        .transpose()
        .lu()
        .solve(&u21.transpose())
        .ok_or_else(|| {
            LqgError::NoStabilizingSolution("stable invariant subspace is not a graph".into())
        })?;
    let x = linalg::real_part(&xt.transpose());
    if x.iter().any(|v| !v.is_finite()) {
        return Err(LqgError::NoStabilizingSolution(
            "stable invariant subspace is not a graph".into(),
        ));
    }
    Ok(linalg::symmetrize(&x))
}

/// `A E + E Aᵀ + V − E Cᵀ W⁻¹ C E`.
pub fn filter_care_residual(
    a: &DMatrix<f64>,
    c: &DMatrix<f64>,
    v: &DMatrix<f64>,
    w: &DMatrix<f64>,
    e: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    care_residual(&a.transpose(), &c.transpose(), v, w, e)
}

/// Stabilizing solution of the filter Riccati equation `A E + E Aᵀ + V − E Cᵀ W⁻¹ C E = 0`,
/// obtained as the controller equation of the dual pair `(Aᵀ, Cᵀ)`.
pub fn solve_filter_care(
    a: &DMatrix<f64>,
    c: &DMatrix<f64>,
    v: &DMatrix<f64>,
    w: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, SolveDiagnostics)> {
    if a.is_square() && c.ncols() == a.nrows() && !is_detectable(a, c) {
        return Err(LqgError::NotDetectable);
    }
    solve_care(&a.transpose(), &c.transpose(), v, w).map_err(|e| match e {
        LqgError::NotStabilizable => LqgError::NotDetectable,
        other => other,
    })
}
