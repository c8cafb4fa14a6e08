//! Implementations of the verify, approx and chart subcommands.

use std::path::Path;
use std::time::Instant;

use matgeo::error::Error;
use matgeo::fixed_rank::{Chart, Coords, RankRPoint};
use matgeo::linalg::{factor_rank_r, numerical_rank};
use matgeo::optimizer::{minimize, Config, LeastSquares};
use matgeo::random::{random_coords, random_rank_r};
use matgeo::{tol, Matrix};
use serde::Serialize;

use crate::matio;
use crate::report::{Case, CaseTracker, Dims, Report, Status, SuiteReport};
use crate::suites;
use crate::Failure;

pub struct VerifyOptions {
    pub suite: SuiteChoice,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub r: usize,
    pub seed: u64,
    pub trials: u64,
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, PartialEq)]
pub enum SuiteChoice {
    All,
    Grassmann,
    Stiefel,
    Fixedrank,
}

pub fn run_verify(opts: &VerifyOptions) -> Result<(), Failure> {
    if opts.r == 0 {
        return Err(Failure::Usage("r must be at least 1".into()));
    }
    let needs_grassmann = matches!(opts.suite, SuiteChoice::All | SuiteChoice::Grassmann)
        || matches!(opts.suite, SuiteChoice::Stiefel);
    if needs_grassmann && opts.r >= opts.k {
        return Err(Failure::Usage(format!(
            "r must be smaller than k (got r={}, k={})",
            opts.r, opts.k
        )));
    }
    if matches!(opts.suite, SuiteChoice::All | SuiteChoice::Fixedrank)
        && opts.r >= opts.n.min(opts.m)
    {
        return Err(Failure::Usage(format!(
            "r must be smaller than min(n, m) (got r={}, n={}, m={})",
            opts.r, opts.n, opts.m
        )));
    }
    if opts.trials == 0 {
        return Err(Failure::Usage("trials must be at least 1".into()));
    }

    let t0 = Instant::now();
    let mut suites_run = Vec::new();
    if matches!(opts.suite, SuiteChoice::All | SuiteChoice::Grassmann) {
        suites_run.push(suites::grassmann_suite(
            opts.k, opts.r, opts.seed, opts.trials, opts.tol,
        ));
    }
    if matches!(opts.suite, SuiteChoice::All | SuiteChoice::Stiefel) {
        suites_run.push(suites::stiefel_suite(
            opts.k, opts.r, opts.seed, opts.trials, opts.tol,
        ));
    }
    if matches!(opts.suite, SuiteChoice::All | SuiteChoice::Fixedrank) {
        suites_run.push(suites::fixedrank_suite(
            opts.n, opts.m, opts.r, opts.seed, opts.trials, opts.tol,
        ));
    }
    let report = Report::assemble(suites_run, t0.elapsed().as_secs_f64() * 1e3);

    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    let verdict = if report.passed() { "pass" } else { "FAIL" };
    eprintln!(
        "verify: {} suite(s), {} case(s), {verdict} in {:.1} ms",
        report.suites.len(),
        report.suites.iter().map(|s| s.cases.len()).sum::<usize>(),
        report.wall_time_ms
    );
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification("one or more cases failed".into()))
    }
}

pub struct ApproxOptions<'a> {
    pub input: &'a Path,
    pub output: &'a Path,
    pub r: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub tol: f64,
}

pub fn run_approx(opts: &ApproxOptions) -> Result<(), Failure> {
    let a = matio::read_matrix(opts.input).map_err(|e| Failure::Io(e.to_string()))?;
    let (n, m) = a.shape();
    if opts.r == 0 || opts.r >= n.min(m) {
        return Err(Failure::Usage(format!(
            "r must satisfy 1 <= r < min(n, m) = {} (got {})",
            n.min(m),
            opts.r
        )));
    }
    let decision = numerical_rank(&a, tol::RANK_REL);
    if decision.rank < opts.r {
        return Err(Failure::Usage(format!(
            "input has numerical rank {} < requested r = {}",
            decision.rank, opts.r
        )));
    }

    // Best rank-r approximation oracle for the final report.
    let (u, g, v) = factor_rank_r(&a, opts.r).map_err(|e| Failure::Usage(e.to_string()))?;
    let oracle = &(&u * &g) * &v.transpose();

    let start = RankRPoint::from_matrix(
        &random_rank_r(n, m, opts.r, opts.seed).expect("valid dims"),
        opts.r,
    )
    .expect("random start is a valid point");
    let cfg = Config {
        max_iters: opts.max_iters,
        ..Config::default()
    };
    let objective = LeastSquares { target: a };
    let (point, trace) = minimize(&start, &objective, &cfg)
        .map_err(|e| Failure::Verification(format!("optimizer failed: {e}")))?;

    // Trace as JSON lines on stdout.
    for rec in &trace.records {
        let line = serde_json::json!({
            "iter": rec.iter,
            "f": rec.f,
            "grad_norm": rec.grad_norm,
            "step": rec.step,
            "boundary_sigma_ratio": rec.boundary_sigma_ratio,
        });
        println!("{line}");
    }

    let result = point.to_matrix();
    matio::write_matrix(opts.output, &result).map_err(|e| Failure::Io(e.to_string()))?;

    let rel_err = (&result - &oracle).fro_norm() / oracle.fro_norm();
    eprintln!(
        "approx: rank-{} result written to {}; {} iterations, final f = {:.6e}, \
         relative error vs truncated-SVD oracle = {:.3e}",
        opts.r,
        opts.output.display(),
        trace.iterations(),
        trace.records.last().map(|r| r.f).unwrap_or(f64::NAN),
        rel_err
    );
    if rel_err <= opts.tol {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "relative error {rel_err:.3e} above tolerance {:.1e}",
            opts.tol
        )))
    }
}

pub struct ChartOptions<'a> {
    pub input: &'a Path,
    pub op: ChartOp,
    pub r: Option<usize>,
    pub seed: u64,
    pub tol: Option<f64>,
}

#[derive(Clone, Copy)]
pub enum ChartOp {
    Roundtrip,
    Transition,
    Tangent,
}

impl ChartOp {
    fn name(self) -> &'static str {
        match self {
            ChartOp::Roundtrip => "roundtrip",
            ChartOp::Transition => "transition",
            ChartOp::Tangent => "tangent",
        }
    }
}

#[derive(Serialize)]
struct ChartFailure {
    op: &'static str,
    error: &'static str,
    membership_ratio: f64,
}

pub fn run_chart(opts: &ChartOptions) -> Result<(), Failure> {
    let a = matio::read_matrix(opts.input).map_err(|e| Failure::Io(e.to_string()))?;
    let (n, m) = a.shape();
    let detected = numerical_rank(&a, tol::RANK_REL).rank;
    let r = opts.r.unwrap_or(detected);
    if r == 0 || r >= n.min(m) {
        return Err(Failure::Usage(format!(
            "rank must satisfy 1 <= r < min(n, m) = {}; detected {detected}, requested {r}",
            n.min(m)
        )));
    }

    let t0 = Instant::now();
    let result = match opts.op {
        ChartOp::Roundtrip => chart_roundtrip(&a, r, opts.seed, opts.tol),
        ChartOp::Transition => chart_transition(&a, r, opts.seed, opts.tol),
        ChartOp::Tangent => chart_tangent(&a, r, opts.seed, opts.tol),
    };

    let cases = match result {
        Ok(cases) => cases,
        Err(Error::OutOfChartDomain { ratio }) => {
            // Structured failure: the randomly seeded chart does not
            // contain the input.
            let failure = ChartFailure {
                op: opts.op.name(),
                error: "out_of_chart_domain",
                membership_ratio: ratio,
            };
            println!("{}", serde_json::to_string_pretty(&failure).unwrap());
            eprintln!("chart {}: input outside chart domain", opts.op.name());
            return Err(Failure::OutOfDomain(format!(
                "membership ratio {ratio:.3e}"
            )));
        }
        Err(Error::RankMismatch { required, found }) => {
            return Err(Failure::Usage(format!(
                "input rank {found} does not match requested rank {required}"
            )));
        }
        Err(e) => return Err(Failure::Verification(e.to_string())),
    };

    let report = SuiteReport::assemble(
        opts.op.name(),
        Dims { n, m, k: 0, r },
        opts.seed,
        1,
        cases,
        t0.elapsed().as_secs_f64() * 1e3,
    );
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    let pass = matches!(report.status, Status::Pass);
    eprintln!(
        "chart {}: {}",
        opts.op.name(),
        if pass { "pass" } else { "FAIL" }
    );
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification("chart check failed".into()))
    }
}

fn seeded_chart(n: usize, m: usize, r: usize, seed: u64) -> Result<Chart, Error> {
    let p = RankRPoint::from_matrix(&random_rank_r(n, m, r, seed).expect("valid dims"), r)?;
    Chart::new(&p)
}

fn chart_roundtrip(a: &Matrix, r: usize, seed: u64, tol_override: Option<f64>) -> Result<Vec<Case>, Error> {
    let (n, m) = a.shape();
    let chart = seeded_chart(n, m, r, seed)?;
    let mut residual = CaseTracker::new("roundtrip_relative", tol_override.unwrap_or(1e-9));
    let coords = chart.apply(a)?;
    let back = chart.inverse(&coords)?;
    residual.observe((&back - a).fro_norm() / a.fro_norm().max(1.0));
    let mut boundary = CaseTracker::new("near_boundary_flag", 0.5);
    boundary.observe_flag(!coords.near_boundary);
    Ok(vec![residual.into_case(), boundary.into_case()])
}

fn chart_transition(a: &Matrix, r: usize, seed: u64, tol_override: Option<f64>) -> Result<Vec<Case>, Error> {
    let (n, m) = a.shape();
    let chart_a = seeded_chart(n, m, r, seed)?;
    let chart_b = seeded_chart(n, m, r, seed.wrapping_add(0x517E))?;
    let coords = chart_a.apply(a)?;
    let moved = chart_a.transition_to(&chart_b, &coords)?;
    let back = chart_b.inverse(&moved)?;
    let mut residual = CaseTracker::new("transition_relative", tol_override.unwrap_or(1e-9));
    residual.observe((&back - a).fro_norm() / a.fro_norm().max(1.0));
    Ok(vec![residual.into_case()])
}

fn chart_tangent(a: &Matrix, r: usize, seed: u64, tol_override: Option<f64>) -> Result<Vec<Case>, Error> {
    let (n, m) = a.shape();
    // The chart at the input's own factors; probe the tangent maps there.
    let p = RankRPoint::from_matrix(a, r)?;
    let chart = Chart::new(&p)?;
    let t = matgeo::fixed_rank::CoordTangent {
        x_dot: random_coords(n - r, r, 1.0, seed.wrapping_add(1)),
        y_dot: random_coords(m - r, r, 1.0, seed.wrapping_add(2)),
        h_dot: random_coords(r, r, 1.0, seed.wrapping_add(3)),
    };
    // Finite differences of theta^{-1} against the tangent map.
    let h = tol::FD_STEP;
    let at = |s: f64| {
        chart
            .inverse(&Coords::new(
                t.x_dot.scale(s),
                t.y_dot.scale(s),
                &(p.g().clone()) + &t.h_dot.scale(s),
            ))
            .expect("perturbed coords stay invertible at fd step")
    };
    let fd = (&at(h) - &at(-h)).scale(1.0 / (2.0 * h));
    let push = chart.tangent_push(p.g(), &t)?;
    let mut fd_case = CaseTracker::new("tangent_fd_relative", tol_override.unwrap_or(1e-5));
    fd_case.observe((&fd - &push).fro_norm() / push.fro_norm().max(1.0));

    let mut iso = CaseTracker::new("pull_push_identity", 1e-9);
    let t2 = chart.tangent_pull(p.g(), &push)?;
    iso.observe(
        (&t2.x_dot - &t.x_dot)
            .fro_norm()
            .max((&t2.y_dot - &t.y_dot).fro_norm())
            .max((&t2.h_dot - &t.h_dot).fro_norm()),
    );
    Ok(vec![fd_case.into_case(), iso.into_case()])
}
