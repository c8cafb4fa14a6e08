//! Verification suites behind `matgeo verify`: seeded random trials of the
//! library invariants, aggregated into worst-residual cases.

use std::time::Instant;

use matgeo::fixed_rank;
use matgeo::grassmann;
use matgeo::linalg::{numerical_rank, rank};
use matgeo::random::{random_coords, random_full_rank, random_rank_r};
use matgeo::stiefel;
use matgeo::{tol, Matrix};

use crate::report::{Case, CaseTracker, Dims, SuiteReport};

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic per-trial seed: same root and stream, same sequence.
fn derive_seed(root: u64, stream: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(root ^ splitmix64(stream)) ^ trial)
}

fn fro(a: &Matrix) -> f64 {
    a.fro_norm()
}

pub fn grassmann_suite(
    k: usize,
    r: usize,
    seed: u64,
    trials: u64,
    tol_override: Option<f64>,
) -> SuiteReport {
    let t0 = Instant::now();
    let tolerance = |default: f64| tol_override.unwrap_or(default);
    let mut roundtrip = CaseTracker::new("chart_roundtrip", tolerance(1e-9));
    let mut section = CaseTracker::new("section_point_residual", tolerance(1e-9));
    let mut cocycle = CaseTracker::new("transition_cocycle", tolerance(1e-8));
    let mut nilpotency = CaseTracker::new("nilpotency", tolerance(1e-12));
    let mut homomorphism = CaseTracker::new("group_iso_homomorphism", tolerance(1e-10));
    let mut exp_action = CaseTracker::new("lie_exp_action", tolerance(1e-10));

    for trial in 0..trials {
        let chart =
            grassmann::Chart::new(random_full_rank(k, r, derive_seed(seed, 1, trial)).unwrap())
                .unwrap();
        let x = random_coords(k - r, r, 1.0, derive_seed(seed, 2, trial));

        let s = chart.inverse(&x).unwrap();
        roundtrip.observe(fro(&(&chart.apply(&s).unwrap() - &x)));

        // Section point lies on the cross section and keeps the span.
        let w = random_full_rank(k, r, derive_seed(seed, 3, trial)).unwrap();
        if let Ok(point) = chart.section_point(&w) {
            let zt = chart.center().transpose();
            section.observe(fro(&(&(&zt * &point) - &(&zt * chart.center()))));
        }

        // Cocycle over a random triple of charts.
        let chart_b =
            grassmann::Chart::new(random_full_rank(k, r, derive_seed(seed, 4, trial)).unwrap())
                .unwrap();
        let chart_c =
            grassmann::Chart::new(random_full_rank(k, r, derive_seed(seed, 5, trial)).unwrap())
                .unwrap();
        let x_small = random_coords(k - r, r, 0.5, derive_seed(seed, 6, trial));
        let direct = chart.transition_to(&chart_c, &x_small);
        let via = chart
            .transition_to(&chart_b, &x_small)
            .and_then(|xb| chart_b.transition_to(&chart_c, &xb));
        if let (Ok(direct), Ok(via)) = (direct, via) {
            cocycle.observe(fro(&(&direct - &via)));
        }

        // Lie algebra products vanish; exp acts affinely on the center.
        let nil = &(chart.complement() * &x) * chart.center_pinv();
        nilpotency.observe(fro(&(&nil * &nil)));
        let e = chart.lie_exp(&x);
        let want = chart.center() + &(chart.complement() * &x);
        exp_action.observe(fro(&(&(&e * chart.center()) - &want)));

        let s1 = chart
            .inverse(&random_coords(k - r, r, 1.0, derive_seed(seed, 7, trial)))
            .unwrap();
        let s2 = chart
            .inverse(&random_coords(k - r, r, 1.0, derive_seed(seed, 8, trial)))
            .unwrap();
        let lhs = chart.group_iso(&chart.group_op(&s1, &s2).unwrap()).unwrap();
        let rhs = &chart.group_iso(&s1).unwrap() * &chart.group_iso(&s2).unwrap();
        homomorphism.observe(fro(&(&lhs - &rhs)));
    }

    let cases: Vec<Case> = vec![
        roundtrip.into_case(),
        section.into_case(),
        cocycle.into_case(),
        nilpotency.into_case(),
        exp_action.into_case(),
        homomorphism.into_case(),
    ];
    SuiteReport::assemble(
        "grassmann",
        Dims { n: 0, m: 0, k, r },
        seed,
        trials,
        cases,
        t0.elapsed().as_secs_f64() * 1e3,
    )
}

pub fn stiefel_suite(
    k: usize,
    r: usize,
    seed: u64,
    trials: u64,
    tol_override: Option<f64>,
) -> SuiteReport {
    let t0 = Instant::now();
    let tolerance = |default: f64| tol_override.unwrap_or(default);
    let mut roundtrip = CaseTracker::new("xi_roundtrip", tolerance(1e-9));
    let mut tangent = CaseTracker::new("tangent_push_pull", tolerance(1e-10));
    let mut fd = CaseTracker::new("tangent_fd_relative", tolerance(1e-5));
    let mut split = CaseTracker::new("vertical_horizontal_recombine", tolerance(1e-10));
    let mut group = CaseTracker::new("star_group_axioms", tolerance(1e-9));
    let mut projection = CaseTracker::new("bundle_projection_coords", tolerance(1e-9));

    for trial in 0..trials {
        let chart =
            stiefel::Chart::new(random_full_rank(k, r, derive_seed(seed, 11, trial)).unwrap())
                .unwrap();
        let coords = stiefel::Coords {
            x: random_coords(k - r, r, 1.0, derive_seed(seed, 12, trial)),
            g: random_full_rank(r, r, derive_seed(seed, 13, trial)).unwrap(),
        };
        let w = chart.inverse(&coords).unwrap();
        let back = chart.apply(&w).unwrap();
        roundtrip.observe(fro(&(&back.x - &coords.x)).max(fro(&(&back.g - &coords.g))));

        let z_dot = random_coords(k, r, 1.0, derive_seed(seed, 14, trial));
        tangent.observe(fro(&(&chart.tangent_push(&chart.tangent_pull(&z_dot)) - &z_dot)));

        let t = stiefel::CoordTangent {
            x_dot: random_coords(k - r, r, 1.0, derive_seed(seed, 15, trial)),
            g_dot: random_coords(r, r, 1.0, derive_seed(seed, 16, trial)),
        };
        let h = tol::FD_STEP;
        let at = |s: f64| {
            chart
                .inverse(&stiefel::Coords {
                    x: t.x_dot.scale(s),
                    g: &Matrix::identity(r) + &t.g_dot.scale(s),
                })
                .unwrap()
        };
        let diff = (&at(h) - &at(-h)).scale(1.0 / (2.0 * h));
        let push = chart.tangent_push(&t);
        fd.observe(fro(&(&diff - &push)) / push.fro_norm().max(1.0));

        let (v, hor) = chart.tangent_split(&z_dot);
        split.observe(fro(&(&(&v + &hor) - &z_dot)));

        let with_id = chart.group_op(&w, &chart.group_identity()).unwrap();
        group.observe(fro(&(&with_id - &w)));
        let inv = chart.group_inverse(&w).unwrap();
        group.observe(fro(&(&chart.group_op(&w, &inv).unwrap() - &chart.group_identity())));

        // phi(col(xi^-1(X, G))) = X.
        let s = stiefel::project(&w).unwrap();
        projection.observe(fro(&(&chart.base().apply(&s).unwrap() - &coords.x)));
    }

    let cases = vec![
        roundtrip.into_case(),
        tangent.into_case(),
        fd.into_case(),
        split.into_case(),
        group.into_case(),
        projection.into_case(),
    ];
    SuiteReport::assemble(
        "stiefel",
        Dims { n: 0, m: 0, k, r },
        seed,
        trials,
        cases,
        t0.elapsed().as_secs_f64() * 1e3,
    )
}

pub fn fixedrank_suite(
    n: usize,
    m: usize,
    r: usize,
    seed: u64,
    trials: u64,
    tol_override: Option<f64>,
) -> SuiteReport {
    let t0 = Instant::now();
    let tolerance = |default: f64| tol_override.unwrap_or(default);
    let mut roundtrip = CaseTracker::new("theta_roundtrip", tolerance(1e-9));
    let mut center = CaseTracker::new("theta_inverse_center", tolerance(1e-12));
    let mut tangent = CaseTracker::new("tangent_pull_push", tolerance(1e-9));
    let mut group_id = CaseTracker::new("group_identity_uvt", tolerance(1e-10));
    let mut rank_exact = CaseTracker::new("image_rank_exact", 0.5);
    let mut g_free = CaseTracker::new("chart_independent_of_g", 0.5);
    let mut diff_rank = CaseTracker::new("differential_rank", 0.5);

    for trial in 0..trials {
        let p = fixed_rank::RankRPoint::from_matrix(
            &random_rank_r(n, m, r, derive_seed(seed, 21, trial)).unwrap(),
            r,
        )
        .unwrap();
        let chart = fixed_rank::Chart::new(&p).unwrap();

        let zero = fixed_rank::Coords::new(
            Matrix::zeros(n - r, r),
            Matrix::zeros(m - r, r),
            p.g().clone(),
        );
        center.observe(fro(&(&chart.inverse(&zero).unwrap() - &p.to_matrix())));

        let coords = fixed_rank::Coords::new(
            random_coords(n - r, r, 1.0, derive_seed(seed, 22, trial)),
            random_coords(m - r, r, 1.0, derive_seed(seed, 23, trial)),
            random_full_rank(r, r, derive_seed(seed, 24, trial)).unwrap(),
        );
        let a = chart.inverse(&coords).unwrap();
        rank_exact.observe_flag(rank(&a) == r);
        let back = chart.apply(&a).unwrap();
        roundtrip.observe(
            fro(&(&back.x - &coords.x))
                .max(fro(&(&back.y - &coords.y)))
                .max(fro(&(&back.h - &coords.h))),
        );

        let t = fixed_rank::CoordTangent {
            x_dot: random_coords(n - r, r, 1.0, derive_seed(seed, 25, trial)),
            y_dot: random_coords(m - r, r, 1.0, derive_seed(seed, 26, trial)),
            h_dot: random_coords(r, r, 1.0, derive_seed(seed, 27, trial)),
        };
        let z_dot = chart.tangent_push(p.g(), &t).unwrap();
        let t2 = chart.tangent_pull(p.g(), &z_dot).unwrap();
        tangent.observe(
            fro(&(&t2.x_dot - &t.x_dot))
                .max(fro(&(&t2.y_dot - &t.y_dot)))
                .max(fro(&(&t2.h_dot - &t.h_dot))),
        );

        group_id.observe(fro(&(&chart.group_op(&a, &chart.group_identity()).unwrap() - &a)));

        // Chart data ignores the middle factor: bitwise identical images.
        let g_alt = random_full_rank(r, r, derive_seed(seed, 28, trial)).unwrap();
        let p_alt = fixed_rank::RankRPoint::new(p.u().clone(), g_alt, p.v().clone()).unwrap();
        let chart_alt = fixed_rank::Chart::new(&p_alt).unwrap();
        let c1 = chart.apply(&a).unwrap();
        let c2 = chart_alt.apply(&a).unwrap();
        g_free.observe_flag(
            c1.x.as_slice() == c2.x.as_slice()
                && c1.y.as_slice() == c2.y.as_slice()
                && c1.h.as_slice() == c2.h.as_slice(),
        );

        // The differential-rank probe is the expensive part; two instances
        // are enough to pin the dimension.
        if trial < 2 {
            diff_rank.observe_flag(differential_rank(&chart, &coords) == r * (n + m - r));
        }
    }

    let cases = vec![
        roundtrip.into_case(),
        center.into_case(),
        tangent.into_case(),
        group_id.into_case(),
        rank_exact.into_case(),
        g_free.into_case(),
        diff_rank.into_case(),
    ];
    SuiteReport::assemble(
        "fixedrank",
        Dims { n, m, k: 0, r },
        seed,
        trials,
        cases,
        t0.elapsed().as_secs_f64() * 1e3,
    )
}

/// Rank of the chart differential applied to the full coordinate basis.
pub fn differential_rank(chart: &fixed_rank::Chart, c: &fixed_rank::Coords) -> usize {
    let (n, m, r) = (chart.rows(), chart.cols(), chart.rank());
    let dim = chart.coord_dim();
    let mut data = vec![0.0; n * m * dim];
    let mut col = 0;
    let mut push = |t: &fixed_rank::CoordTangent| {
        let image = chart.differential(c, t);
        for (idx, v) in image.as_slice().iter().enumerate() {
            data[idx * dim + col] = *v;
        }
        col += 1;
    };
    for i in 0..(n - r) {
        for j in 0..r {
            push(&fixed_rank::CoordTangent {
                x_dot: Matrix::from_fn(n - r, r, |a, b| ((a, b) == (i, j)) as u8 as f64),
                y_dot: Matrix::zeros(m - r, r),
                h_dot: Matrix::zeros(r, r),
            });
        }
    }
    for i in 0..(m - r) {
        for j in 0..r {
            push(&fixed_rank::CoordTangent {
                x_dot: Matrix::zeros(n - r, r),
                y_dot: Matrix::from_fn(m - r, r, |a, b| ((a, b) == (i, j)) as u8 as f64),
                h_dot: Matrix::zeros(r, r),
            });
        }
    }
    for i in 0..r {
        for j in 0..r {
            push(&fixed_rank::CoordTangent {
                x_dot: Matrix::zeros(n - r, r),
                y_dot: Matrix::zeros(m - r, r),
                h_dot: Matrix::from_fn(r, r, |a, b| ((a, b) == (i, j)) as u8 as f64),
            });
        }
    }
    let jac = Matrix::from_vec(n * m, dim, data).unwrap();
    numerical_rank(&jac, tol::RANK_REL).rank
}
