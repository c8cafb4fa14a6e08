//! Optimizer behaviour: gradient correctness against finite differences,
//! convergence against constructions and the best-approximation bound.

mod support;

use matgeo::error::Error;
use matgeo::fixed_rank::{Chart, Coords, RankRPoint};
use matgeo::optimizer::{
    coordinate_gradient, minimize, recenter, Config, LeastSquares, Objective,
};
use matgeo::random::{random_coords, random_full_rank, random_rank_r, random_with_spectrum};
use matgeo::Matrix;

/// A generic quadratic `f(W) = 1/2 ||P W Q - C||^2` exercising non-trivial
/// gradient structure.
struct SandwichQuadratic {
    p: Matrix,
    q: Matrix,
    c: Matrix,
}

impl Objective for SandwichQuadratic {
    fn evaluate(&self, w: &Matrix) -> f64 {
        let d = &(&(&self.p * w) * &self.q) - &self.c;
        0.5 * d.dot(&d)
    }

    fn euclidean_gradient(&self, w: &Matrix) -> Matrix {
        let d = &(&(&self.p * w) * &self.q) - &self.c;
        &(&self.p.transpose() * &d) * &self.q.transpose()
    }
}

#[test]
fn euclidean_gradient_passes_finite_difference_check() {
    // The Objective contract: central differences at random points agree
    // to 1e-5 relative at step 1e-6.
    let obj = SandwichQuadratic {
        p: random_full_rank(7, 7, 0).unwrap(),
        q: random_full_rank(6, 6, 1).unwrap(),
        c: random_coords(7, 6, 1.0, 2),
    };
    let w = random_coords(7, 6, 1.0, 3);
    let grad = obj.euclidean_gradient(&w);
    let dir = random_coords(7, 6, 1.0, 4);
    let h = 1e-6;
    let fd = (obj.evaluate(&(&w + &dir.scale(h))) - obj.evaluate(&(&w - &dir.scale(h)))) / (2.0 * h);
    let analytic = grad.dot(&dir);
    assert!(
        (fd - analytic).abs() / analytic.abs().max(1.0) <= 1e-5,
        "fd {fd} vs analytic {analytic}"
    );
}

#[test]
fn coordinate_gradient_matches_finite_differences_of_composite() {
    let a = random_rank_r(8, 6, 2, 5).unwrap();
    let p = RankRPoint::from_matrix(&a, 2).unwrap();
    let chart = Chart::new(&p).unwrap();
    let c = Coords::new(
        random_coords(6, 2, 0.5, 6),
        random_coords(4, 2, 0.5, 7),
        random_full_rank(2, 2, 8).unwrap(),
    );
    let obj = SandwichQuadratic {
        p: random_full_rank(8, 8, 9).unwrap(),
        q: random_full_rank(6, 6, 10).unwrap(),
        c: random_coords(8, 6, 1.0, 11),
    };
    let grad = coordinate_gradient(&chart, &c, &obj).unwrap();

    // Directional finite difference through the chart along a random
    // coordinate direction.
    let (dx, dy, dh) = (
        random_coords(6, 2, 1.0, 12),
        random_coords(4, 2, 1.0, 13),
        random_coords(2, 2, 1.0, 14),
    );
    let h = 1e-6;
    let eval = |t: f64| {
        let coords = Coords::new(
            &c.x + &dx.scale(t),
            &c.y + &dy.scale(t),
            &c.h + &dh.scale(t),
        );
        obj.evaluate(&chart.inverse(&coords).unwrap())
    };
    let fd = (eval(h) - eval(-h)) / (2.0 * h);
    let analytic = grad.x_dot.dot(&dx) + grad.y_dot.dot(&dy) + grad.h_dot.dot(&dh);
    assert!(
        (fd - analytic).abs() / analytic.abs().max(1.0) <= 1e-5,
        "fd {fd} vs analytic {analytic}"
    );
}

#[test]
fn converges_to_exact_rank_target_started_nearby() {
    // Construction oracle: the optimum is the target itself.
    let a = random_rank_r(20, 15, 3, 15).unwrap();
    let p = RankRPoint::from_matrix(&a, 3).unwrap();
    let chart = Chart::new(&p).unwrap();
    let start_matrix = chart
        .inverse(&Coords::new(
            random_coords(17, 3, 0.3, 16),
            random_coords(12, 3, 0.3, 17),
            p.g().clone(),
        ))
        .unwrap();
    let start = RankRPoint::from_matrix(&start_matrix, 3).unwrap();
    let cfg = Config {
        grad_tol: 1e-10,
        ..Config::default()
    };
    let (point, trace) = minimize(&start, &LeastSquares { target: a.clone() }, &cfg).unwrap();
    let err = (&point.to_matrix() - &a).fro_norm() / a.fro_norm();
    assert!(err <= 1e-8, "relative error {err:.3e}");
    assert!(trace.iterations() <= 500);
}

#[test]
fn reaches_the_best_approximation_bound() {
    // Eckart-Young oracle by construction: the spectrum is prescribed, so
    // the optimal objective value 1/2 sum_{i>r} sigma_i^2 is known without
    // running any SVD.
    let spectrum: Vec<f64> = (0..15).map(|i| 3.0 * 0.75f64.powi(i)).collect();
    let a = random_with_spectrum(20, 15, &spectrum, 18).unwrap();
    let optimal: f64 = 0.5 * spectrum[3..].iter().map(|s| s * s).sum::<f64>();

    let start = RankRPoint::from_matrix(&random_rank_r(20, 15, 3, 19).unwrap(), 3).unwrap();
    let objective = LeastSquares { target: a };
    let (_, trace) = minimize(&start, &objective, &Config::default()).unwrap();
    let final_f = trace.records.last().unwrap().f;
    assert!(final_f >= optimal - 1e-9, "cannot beat Eckart-Young");
    assert!(
        (final_f - optimal) / optimal <= 1e-6,
        "final {final_f} vs optimal {optimal}"
    );
    // Monotone descent across accepted steps.
    for w in trace.records.windows(2) {
        assert!(w[1].f <= w[0].f + 1e-15);
    }
    // With recentring every iteration, the boundary statistic is the
    // sigma-ratio of the middle factor and stays healthy.
    for rec in &trace.records {
        assert!(rec.boundary_sigma_ratio > 1e-6);
    }
}

#[test]
fn recentred_boundary_statistic_equals_middle_factor_ratio() {
    // With recenter_every = 1 the chart center tracks the iterate, so the
    // membership ratio of U^T W V is exactly the sigma-ratio of the H
    // factor and the chart domain can never be left.
    let a = random_rank_r(10, 8, 2, 27).unwrap();
    let p = RankRPoint::from_matrix(&a, 2).unwrap();
    let chart = Chart::new(&p).unwrap();
    let c = Coords::new(
        random_coords(8, 2, 1.0, 28),
        random_coords(6, 2, 1.0, 29),
        random_full_rank(2, 2, 30).unwrap(),
    );
    let (chart2, c2) = recenter(&chart, &c).unwrap();
    let w = chart2.inverse(&c2).unwrap();
    let membership = chart2.membership_ratio(&w);
    let h_ratio = matgeo::linalg::sigma_ratio(&c2.h);
    assert!(
        (membership - h_ratio).abs() <= 1e-12,
        "membership {membership} vs H ratio {h_ratio}"
    );
}

#[test]
fn recenter_keeps_reconstruction_and_resets_coords() {
    let a = random_rank_r(10, 8, 2, 20).unwrap();
    let p = RankRPoint::from_matrix(&a, 2).unwrap();
    let chart = Chart::new(&p).unwrap();
    let c = Coords::new(
        random_coords(8, 2, 2.0, 21),
        random_coords(6, 2, 2.0, 22),
        random_full_rank(2, 2, 23).unwrap(),
    );
    let w = chart.inverse(&c).unwrap();
    let (chart2, c2) = recenter(&chart, &c).unwrap();
    assert_eq!(c2.x.max_abs(), 0.0);
    assert_eq!(c2.y.max_abs(), 0.0);
    assert!((&chart2.inverse(&c2).unwrap() - &w).max_abs() <= 1e-10);
    // New centers are orthonormal.
    let u = chart2.col_chart().center();
    assert!(
        (&(&u.transpose() * u) - &Matrix::identity(2)).max_abs() <= 1e-12,
        "recentred U orthonormal"
    );
}

#[test]
fn unattainable_decrease_reports_line_search_failure() {
    // A constant objective that claims a large gradient: the Armijo test
    // demands a decrease that provably cannot happen, and the claimed
    // gradient is far too big for the machine-precision stall exit. This
    // must surface as a hard error, not a silent stop.
    struct Lying;
    impl Objective for Lying {
        fn evaluate(&self, _w: &Matrix) -> f64 {
            1.0
        }
        fn euclidean_gradient(&self, w: &Matrix) -> Matrix {
            Matrix::from_fn(w.rows(), w.cols(), |_, _| 100.0)
        }
    }
    let start = RankRPoint::from_matrix(&random_rank_r(8, 6, 2, 25).unwrap(), 2).unwrap();
    let result = minimize(&start, &Lying, &Config::default());
    assert!(matches!(result, Err(Error::LineSearchFailed { .. })));
}

#[test]
fn stationary_start_records_only_the_check() {
    let a = random_rank_r(9, 7, 2, 26).unwrap();
    let start = RankRPoint::from_matrix(&a, 2).unwrap();
    let (_, trace) = minimize(&start, &LeastSquares { target: a }, &Config::default()).unwrap();
    assert!(trace.converged);
    assert_eq!(trace.records.len(), 1);
    assert_eq!(trace.records[0].iter, 0);
}
