mod common;

use common::{random_problem, rel_diff, rng};
use disc_lqg_core::design::{self, CostValue};
use disc_lqg_core::oracle::{self, JointCoordinates};
use disc_lqg_core::{linalg, GainPair, InitialBelief};
use rand::Rng;

#[test]
fn dual_cost_forms_agree() {
    let mut rng = rng(100);
    for _ in 0..40 {
        let alpha = -rng.random_range(0.1..2.0);
        let pb = random_problem(&mut rng, alpha);
        let d = design::lqg_discounted(&pb.sys, &pb.belief, &pb.cost).unwrap();
        let (first, second) = d.cost_forms.unwrap();
        assert!(rel_diff(first, second) <= 1e-8);

        let plain = pb.cost.with_alpha(0.0);
        if let Ok(d) = design::lqg(&pb.sys, &plain) {
            let (first, second) = d.cost_forms.unwrap();
            assert!(rel_diff(first, second) <= 1e-8);
        }
    }
}

#[test]
fn oracle_matches_analytic_cost_and_separates() {
    let mut rng = rng(200);
    for _ in 0..40 {
        let alpha = -rng.random_range(0.1..2.0);
        let pb = random_problem(&mut rng, alpha);
        let d = design::lqg_discounted(&pb.sys, &pb.belief, &pb.cost).unwrap();
        let gains = d.gains().unwrap();
        let b = oracle::joint_cost(&pb.sys, &pb.belief, &pb.cost, &gains).unwrap();
        let analytic = d.cost.unwrap().value().unwrap();
        assert!(
            rel_diff(b.total, analytic) <= 1e-8,
            "{} vs {analytic}",
            b.total
        );
        assert!(rel_diff(b.total, b.total_blockwise) <= 1e-10);
        assert!(b.x12_norm <= 1e-8 * b.x11_norm);
        assert!(rel_diff(b.j11 + b.j22, b.total) <= 1e-8);
        // X̃11 is the controller Riccati solution
        let x = d.x.unwrap();
        assert!((b.x_tilde.view((0, 0), (x.nrows(), x.nrows())) - &x).norm() <= 1e-8 * x.norm());
    }
}

#[test]
fn estimate_error_coordinates_reproduce_first_cost_line() {
    let mut rng = rng(300);
    for _ in 0..25 {
        let alpha = -rng.random_range(0.1..2.0);
        let pb = random_problem(&mut rng, alpha);
        let d = design::lqg_discounted(&pb.sys, &pb.belief, &pb.cost).unwrap();
        let joint = oracle::build_joint_in(
            &pb.sys,
            &pb.belief,
            &pb.cost,
            &d.gains().unwrap(),
            JointCoordinates::EstimateError,
        )
        .unwrap();
        let (total, _) = oracle::joint_cost_full(&joint, alpha).unwrap();
        assert!(rel_diff(total, d.cost_forms.unwrap().0) <= 1e-8);
    }
}

#[test]
fn reductions_at_zero_alpha_are_exact() {
    let mut rng = rng(400);
    for _ in 0..30 {
        let pb = random_problem(&mut rng, 0.0);
        let cost = pb.cost.with_alpha(0.0);
        assert_eq!(
            design::lqr_discounted(&pb.sys, &pb.belief, &cost),
            design::lqr(&pb.sys, &pb.belief, &cost)
        );
        let plain = design::lqg(&pb.sys, &cost).map(|d| (d.f, d.k));
        let disc = design::lqg_discounted(&pb.sys, &pb.belief, &cost);
        assert_eq!(plain, disc.clone().map(|d| (d.f, d.k)));
        if let Ok(disc) = disc {
            assert_eq!(disc.cost, Some(CostValue::Infinite));
        }
    }
}

#[test]
fn separation_holds_for_any_stabilizing_observer() {
    let mut rng = rng(500);
    for _ in 0..10 {
        let alpha = -rng.random_range(0.1..2.0);
        let pb = random_problem(&mut rng, alpha);
        let d = design::lqg_discounted(&pb.sys, &pb.belief, &pb.cost).unwrap();
        let f = d.f.unwrap();
        let k_opt = d.k.unwrap();
        let mut tried = 0;
        while tried < 10 {
            let k = &k_opt + common::normal_matrix(&mut rng, k_opt.nrows(), k_opt.ncols()) * 0.3;
            let shifted = &pb.sys.a - &k * &pb.sys.c;
            if linalg::spectral_abscissa(&shifted) + alpha >= -1e-3 {
                continue;
            }
            tried += 1;
            let b = oracle::joint_cost(&pb.sys, &pb.belief, &pb.cost, &GainPair::new(f.clone(), k))
                .unwrap();
            assert!(b.x12_norm <= 1e-8 * b.x11_norm);
        }
    }
}

#[test]
fn designed_gains_are_stationary() {
    let mut rng = rng(600);
    for _ in 0..10 {
        let alpha = -rng.random_range(0.1..2.0);
        let pb = random_problem(&mut rng, alpha);
        let d = design::lqg_discounted(&pb.sys, &pb.belief, &pb.cost).unwrap();
        let gains = d.gains().unwrap();
        let report =
            oracle::verify_stationarity(&pb.sys, &pb.belief, &pb.cost, &gains, None).unwrap();
        let j = d.cost.unwrap().value().unwrap();
        assert!(report.max_gradient() <= 1e-5 * j.max(1.0), "{report:?}");
    }
}

#[test]
fn prescribed_degree_of_stability() {
    let mut rng = rng(700);
    let mut checked = 0;
    while checked < 20 {
        let alpha = [0.1, 0.5, 1.0][checked % 3];
        let mut pb = random_problem(&mut rng, alpha);
        // shrink the initial uncertainty so the effective filter noise stays PSD
        let n = pb.sys.states();
        let mu0 = pb.belief.mu0.clone();
        pb.belief = InitialBelief::new(
            mu0.clone(),
            &mu0 * mu0.transpose() + pb.belief.covariance() * 0.01,
        )
        .unwrap();
        pb.sys.v += nalgebra::DMatrix::<f64>::identity(n, n);
        let Ok(d) = design::lqg_discounted(&pb.sys, &pb.belief, &pb.cost) else {
            continue;
        };
        checked += 1;
        let eig = design::closed_loop_eigenvalues(&pb.sys, &d.gains().unwrap()).unwrap();
        assert!(
            eig.iter().all(|l| l.re < -alpha + 1e-8),
            "alpha {alpha}: {eig:?}"
        );
    }
}

#[test]
fn cost_is_monotone_in_process_noise() {
    let mut rng = rng(800);
    for _ in 0..20 {
        let alpha = -rng.random_range(0.1..2.0);
        let pb = random_problem(&mut rng, alpha);
        let base = design::lqg_discounted(&pb.sys, &pb.belief, &pb.cost)
            .unwrap()
            .cost
            .unwrap()
            .value()
            .unwrap();
        let mut louder = pb.sys.clone();
        let g = common::normal_matrix(&mut rng, louder.states(), louder.states());
        louder.v += &g * g.transpose();
        let more = design::lqg_discounted(&louder, &pb.belief, &pb.cost)
            .unwrap()
            .cost
            .unwrap()
            .value()
            .unwrap();
        assert!(more >= base * (1.0 - 1e-12), "{more} < {base}");
    }
}
