#![allow(dead_code)]

use disc_lqg_core::{model, CostSpec, InitialBelief, LinearSystem};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct Problem {
    pub sys: LinearSystem,
    pub belief: InitialBelief,
    pub cost: CostSpec,
}

pub fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn gram(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> DMatrix<f64> {
    let g = normal_matrix(rng, n, n);
    &g * g.transpose() / n as f64 + DMatrix::identity(n, n) * shift
}

/// Random problem with `n ≤ 5`, `m, p ≤ 3`.
pub fn random_problem(rng: &mut ChaCha8Rng, alpha: f64) -> Problem {
    random_problem_sized(rng, alpha, 5, 3)
}

/// Random problem with `n ≤ max_n`, `m, p ≤ max_mp`, stabilizable and detectable both
/// unshifted and after the shift by `alpha`.
pub fn random_problem_sized(
    rng: &mut ChaCha8Rng,
    alpha: f64,
    max_n: usize,
    max_mp: usize,
) -> Problem {
    loop {
        let n = rng.random_range(1..=max_n);
        let m = rng.random_range(1..=max_mp);
        let p = rng.random_range(1..=max_mp);
        let a = normal_matrix(rng, n, n);
        let b = normal_matrix(rng, n, m);
        let c = normal_matrix(rng, p, n);
        let d = normal_matrix(rng, p, m);
        let shifted = &a + DMatrix::identity(n, n) * alpha;
        if [&a, &shifted]
            .iter()
            .any(|a| !model::is_stabilizable(a, &b) || !model::is_detectable(a, &c))
        {
            continue;
        }
        let sys = LinearSystem::new(a, b, c, d, gram(rng, n, 0.0), gram(rng, p, 0.2)).unwrap();
        let mu0 = DVector::from_fn(n, |_, _| rng.sample(StandardNormal));
        let sigma0 = gram(rng, n, 0.0) + &mu0 * mu0.transpose();
        let belief = InitialBelief::new(mu0, sigma0).unwrap();
        let cost = CostSpec::new(gram(rng, n, 0.0), gram(rng, m, 0.2), alpha).unwrap();
        return Problem { sys, belief, cost };
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
