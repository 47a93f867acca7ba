//! Small dense linear-algebra helpers shared by the solvers and design routines.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{LqgError, Result};

/// Relative tolerance used for symmetry, definiteness and rank decisions.
pub const REL_TOL: f64 = 1e-10;

const SCHUR_MAX_ITER: usize = 10_000;
const SCHUR_RETRIES: u64 = 4;

pub fn fro(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// `‖M − Mᵀ‖_F ≤ 1e-10·max(1, ‖M‖_F)`.
pub fn is_symmetric(m: &DMatrix<f64>) -> bool {
    m.is_square() && fro(&(m - m.transpose())) <= REL_TOL * fro(m).max(1.0)
}

/// Smallest eigenvalue of the symmetric part of `m` (`+inf` for an empty matrix).
pub fn min_sym_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    symmetrize(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Positive semidefinite up to `-1e-10·max(1, ‖M‖_F)`.
pub fn is_psd(m: &DMatrix<f64>) -> bool {
    min_sym_eigenvalue(m) >= -REL_TOL * fro(m).max(1.0)
}

/// Positive definite: smallest eigenvalue above `1e-10·max(1, ‖M‖_F)`.
pub fn is_pd(m: &DMatrix<f64>) -> bool {
    min_sym_eigenvalue(m) > REL_TOL * fro(m).max(1.0)
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    m.complex_eigenvalues().iter().copied().collect()
}

/// Largest real part over the spectrum.
pub fn spectral_abscissa(m: &DMatrix<f64>) -> f64 {
    eigenvalues(m)
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn real_part(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    m.map(|z| z.re)
}

pub fn trace_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    // tr(AB) = sum_ij A_ij B_ji
    a.component_mul(&b.transpose()).sum()
}

pub fn quad_form(x: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    (v.transpose() * x * v)[(0, 0)]
}

pub fn inverse(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| LqgError::Decomposition(format!("{what} is singular")))
}

/// Upper-triangular complex Schur form `M = U T Uᴴ`.
pub struct ComplexSchur {
    pub u: DMatrix<Complex64>,
    pub t: DMatrix<Complex64>,
}

impl ComplexSchur {
    /// Falls back to a few fixed random orthogonal similarities when the QR iteration stalls.
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        let (u, mut t) = match Schur::try_new(to_complex(m), f64::EPSILON, SCHUR_MAX_ITER) {
            Some(schur) => schur.unpack(),
            None => (0..SCHUR_RETRIES)
                .find_map(|attempt| {
                    let mut rng = ChaCha8Rng::seed_from_u64(attempt);
                    let p = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal))
                        .qr()
                        .q();
                    let (u, t) = Schur::try_new(
                        to_complex(&(p.transpose() * m * &p)),
                        f64::EPSILON,
                        SCHUR_MAX_ITER,
                    )?
                    .unpack();
                    Some((to_complex(&p) * u, t))
                })
                .ok_or_else(|| {
                    LqgError::Decomposition("Schur iteration did not converge".into())
                })?,
        };
        for j in 0..n {
            for i in j + 1..n {
                t[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
        Ok(Self { u, t })
    }

    pub fn eigenvalue(&self, i: usize) -> Complex64 {
        self.t[(i, i)]
    }

    /// Applies `T <- Zᴴ T Z`, `U <- U Z` for the unitary `Z` acting on rows/columns `k, k + 1`
    /// whose first column is `[v1, v2]` normalized.
    fn rotate(&mut self, k: usize, v1: Complex64, v2: Complex64) -> bool {
        let n = self.t.nrows();
        let norm = (v1.norm_sqr() + v2.norm_sqr()).sqrt();
        if norm == 0.0 {
            return false;
        }
        let (c1, c2) = (v1 / norm, v2 / norm);
        // Z = [[c1, -conj(c2)], [c2, conj(c1)]]
        let z11 = c1;
        let z21 = c2;
        let z12 = -c2.conj();
        let z22 = c1.conj();

        for j in 0..n {
            let r1 = self.t[(k, j)];
            let r2 = self.t[(k + 1, j)];
            self.t[(k, j)] = z11.conj() * r1 + z21.conj() * r2;
            self.t[(k + 1, j)] = z12.conj() * r1 + z22.conj() * r2;
        }
        for i in 0..n {
            let c1 = self.t[(i, k)];
            let c2 = self.t[(i, k + 1)];
            self.t[(i, k)] = c1 * z11 + c2 * z21;
            self.t[(i, k + 1)] = c1 * z12 + c2 * z22;
            let u1 = self.u[(i, k)];
            let u2 = self.u[(i, k + 1)];
            self.u[(i, k)] = u1 * z11 + u2 * z21;
            self.u[(i, k + 1)] = u1 * z12 + u2 * z22;
        }
        true
    }

    /// Swap the adjacent diagonal entries `k` and `k + 1` with one Givens rotation.
    fn swap(&mut self, k: usize) {
        let a = self.t[(k, k)];
        let b = self.t[(k + 1, k + 1)];
        // (T2 - b I) v = 0 for v = [t12, b - a]
        if !self.rotate(k, self.t[(k, k + 1)], b - a) {
            return;
        }
        self.t[(k + 1, k)] = Complex64::new(0.0, 0.0);
        self.t[(k, k)] = b;
        self.t[(k + 1, k + 1)] = a;
    }

    /// Reorders the form so that every eigenvalue accepted by `select` leads the diagonal.
    /// Returns the number of selected eigenvalues.
    pub fn reorder<F: Fn(Complex64) -> bool>(&mut self, select: F) -> usize {
        let n = self.t.nrows();
        let mut slot = 0;
        for j in 0..n {
            if select(self.t[(j, j)]) {
                for k in (slot..j).rev() {
                    self.swap(k);
                }
                slot += 1;
            }
        }
        slot
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(s: &ComplexSchur) -> DMatrix<f64> {
        real_part(&(&s.u * &s.t * s.u.adjoint()))
    }

    #[test]
    fn schur_reconstructs_rotation_matrix() {
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 2.0]);
        let s = ComplexSchur::new(&m).unwrap();
        assert!((reconstruct(&s) - &m).norm() < 1e-12);
        for j in 0..3 {
            for i in j + 1..3 {
                assert_eq!(s.t[(i, j)].norm(), 0.0);
            }
        }
    }

    #[test]
    fn stalled_qr_iteration_recovers() {
        // plain QR iteration does not converge on this Hamiltonian
        let h = DMatrix::from_row_slice(
            8,
            8,
            &[
                -0.032602070266173344,
                0.3119012850502931,
                1.3245854660765912,
                0.13222092677976685,
                -4.111890115945585,
                1.2467275775811806,
                2.3283845507142704,
                -1.168203629778922,
                -1.9428414502994225,
                -1.1600578794007492,
                1.965840639125774,
                0.6752805258603605,
                1.2467275775811806,
                -0.49250578290429337,
                -0.7885968971675517,
                0.2290974185099613,
                -1.078749143366413,
                -0.20082816090858382,
                0.06714971159685967,
                0.03441237331457869,
                2.3283845507142704,
                -0.7885968971675517,
                -5.667158622119496,
                2.779768690977089,
                -0.011900216266986924,
                0.7201112319577598,
                -1.0495274571178008,
                -1.1187880279119076,
                -1.168203629778922,
                0.2290974185099613,
                2.779768690977089,
                -1.6058194786715065,
                -0.892093911475607,
                0.3336285303812643,
                0.06837784688633042,
                -0.28089873627664963,
                0.032602070266173344,
                1.9428414502994225,
                1.078749143366413,
                0.011900216266986924,
                0.3336285303812643,
                -2.4200800087501815,
                -1.6835680838179177,
                0.18983765872015548,
                -0.3119012850502931,
                1.1600578794007492,
                0.20082816090858382,
                -0.7201112319577598,
                0.06837784688633042,
                -1.6835680838179177,
                -3.2554122113844772,
                1.1847880980605638,
                -1.3245854660765912,
                -1.965840639125774,
                -0.06714971159685967,
                1.0495274571178008,
                -0.28089873627664963,
                0.18983765872015548,
                1.1847880980605638,
                -1.785198692477421,
                -0.13222092677976685,
                -0.6752805258603605,
                -0.03441237331457869,
                1.1187880279119076,
            ],
        );
        assert!(Schur::try_new(to_complex(&h), f64::EPSILON, SCHUR_MAX_ITER).is_none());
        let mut s = ComplexSchur::new(&h).unwrap();
        assert!((reconstruct(&s) - &h).norm() < 1e-11);
        assert_eq!(s.reorder(|l| l.re < 0.0), 4);
        assert!((reconstruct(&s) - &h).norm() < 1e-11);
    }

    #[test]
    fn reorder_moves_stable_eigenvalues_first() {
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 2.0, 0.5, 0.1, //
                0.0, -3.0, 1.0, 0.2, //
                0.3, 0.0, 2.0, -1.0, //
                0.0, 0.4, 1.5, -0.5,
            ],
        );
        let mut s = ComplexSchur::new(&m).unwrap();
        let k = s.reorder(|l| l.re < 0.0);
        let stable = eigenvalues(&m).iter().filter(|l| l.re < 0.0).count();
        assert_eq!(k, stable);
        for i in 0..4 {
            assert_eq!(s.eigenvalue(i).re < 0.0, i < k);
        }
        assert!((reconstruct(&s) - &m).norm() < 1e-12);
        let unitary = &s.u.adjoint() * &s.u - DMatrix::<Complex64>::identity(4, 4);
        assert!(unitary.norm() < 1e-12);
    }

    #[test]
    fn tolerances() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1e-12, 0.0, 1.0]);
        assert!(is_symmetric(&m));
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1e-6, 0.0, 1.0]);
        assert!(!is_symmetric(&m));
        assert!(is_psd(&DMatrix::zeros(2, 2)));
        assert!(!is_pd(&DMatrix::zeros(2, 2)));
        assert!(is_pd(&DMatrix::identity(2, 2)));
    }
}
