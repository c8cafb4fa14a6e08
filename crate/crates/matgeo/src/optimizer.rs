//! First-order minimization over the fixed-rank manifold, working entirely
//! in chart coordinates.
//!
//! The loop is plain gradient descent with Armijo backtracking on the
//! composite `f o theta_Z^{-1}`, with the chart recentred at the current
//! iterate (every iteration by default). Recentring keeps coordinates at
//! `(0, 0, H)` and the factors orthonormal, so the chart always contains a
//! neighbourhood of the iterate and every step stays on the manifold by
//! construction: the iterate is only ever realized as a chart image.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fixed_rank::{Chart, CoordTangent, Coords, RankRPoint};
use crate::grassmann;
use crate::linalg::{qr, sigma_ratio};
use crate::matrix::Matrix;
use crate::tol;

/// A smooth function of a dense matrix, with its Euclidean gradient.
/// Implementations must be pure: the same input always gives the same
/// value, or traces stop being reproducible.
pub trait Objective {
    fn evaluate(&self, w: &Matrix) -> f64;
    fn euclidean_gradient(&self, w: &Matrix) -> Matrix;
}

/// The workhorse objective `f(W) = 1/2 ||W - A||_F^2`.
pub struct LeastSquares {
    pub target: Matrix,
}

impl Objective for LeastSquares {
    fn evaluate(&self, w: &Matrix) -> f64 {
        let d = w - &self.target;
        0.5 * d.dot(&d)
    }

    fn euclidean_gradient(&self, w: &Matrix) -> Matrix {
        w - &self.target
    }
}

/// Gradient-descent configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub max_iters: usize,
    /// Stop when the entrywise norm of the coordinate gradient drops below
    /// this.
    pub grad_tol: f64,
    /// Armijo sufficient-decrease constant, in (0, 1).
    pub armijo_c: f64,
    /// Step shrink factor per backtrack, in (0, 1).
    pub backtrack_factor: f64,
    pub initial_step: f64,
    /// Recentre the chart every this many iterations.
    pub recenter_every: usize,
    /// Backtracks per iteration before giving up.
    pub max_backtracks: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_iters: 500,
            grad_tol: 1e-8,
            armijo_c: 0.1,
            backtrack_factor: 0.5,
            initial_step: 1.0,
            recenter_every: 1,
            max_backtracks: 60,
        }
    }
}

/// One row of the optimization trace.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iter: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub step: f64,
    /// sigma_min / sigma_max of `U^T W V`, the chart-boundary proximity.
    pub boundary_sigma_ratio: f64,
}

/// Per-iteration records plus the termination verdict.
#[derive(Debug, Clone)]
pub struct Trace {
    pub records: Vec<IterationRecord>,
    /// The coordinate gradient norm reached `grad_tol`.
    pub converged: bool,
    /// The line search ran out of measurable decrease: every trial value
    /// was within rounding noise of the current one. The iterate is as
    /// good as double precision allows for this objective.
    pub stalled: bool,
}

impl Trace {
    /// Number of descent steps actually taken (the initial gradient check
    /// is record 0).
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }
}

fn tangent_norm(t: &CoordTangent) -> f64 {
    libm::sqrt(t.x_dot.dot(&t.x_dot) + t.y_dot.dot(&t.y_dot) + t.h_dot.dot(&t.h_dot))
}

/// Gradient of `f o theta_Z^{-1}` at coordinates `c`: the adjoint of the
/// chart differential applied to the Euclidean gradient,
///
/// ```text
/// X. = U_perp^T grad (V + V_perp Y) H^T
/// Y. = V_perp^T grad^T (U + U_perp X) H
/// H. = (U + U_perp X)^T grad (V + V_perp Y)
/// ```
pub fn coordinate_gradient(
    chart: &Chart,
    c: &Coords,
    objective: &impl Objective,
) -> Result<CoordTangent> {
    let ratio = sigma_ratio(&c.h);
    if ratio <= tol::GL_REL {
        return Err(Error::OutOfChartDomain { ratio });
    }
    let w = chart.inverse(c)?;
    let grad = objective.euclidean_gradient(&w);
    assert_eq!(grad.shape(), w.shape(), "gradient shape mismatch");

    let left = chart.col_chart().center() + &(chart.col_chart().complement() * &c.x);
    let right = chart.row_chart().center() + &(chart.row_chart().complement() * &c.y);
    let u_perp_t = chart.col_chart().complement().transpose();
    let v_perp_t = chart.row_chart().complement().transpose();

    let x_dot = &(&u_perp_t * &(&grad * &right)) * &c.h.transpose();
    let y_dot = &(&v_perp_t * &(&grad.transpose() * &left)) * &c.h;
    let h_dot = &left.transpose() * &(&grad * &right);
    Ok(CoordTangent { x_dot, y_dot, h_dot })
}

/// Rebuilds the chart at the matrix represented by `c`, returning the new
/// chart and the same matrix in its coordinates `(0, 0, H_new)`. Factors
/// are re-orthonormalized through QR; if the middle factor has degenerated,
/// the matrix is re-factored from scratch through its truncated SVD.
pub fn recenter(chart: &Chart, c: &Coords) -> Result<(Chart, Coords)> {
    let r = chart.rank();
    let left = chart.col_chart().center() + &(chart.col_chart().complement() * &c.x);
    let right = chart.row_chart().center() + &(chart.row_chart().complement() * &c.y);

    // Full QR in one pass: thin factor becomes the new center, the trailing
    // columns the new complement.
    let fu = qr(&left);
    let fv = qr(&right);
    let h_new = &(&fu.r.block(0, r, 0, r) * &c.h) * &fv.r.block(0, r, 0, r).transpose();

    if sigma_ratio(&h_new) > tol::GL_REL {
        let col = grassmann::Chart::from_orthonormal_parts(
            fu.q.col_block(0, r),
            fu.q.col_block(r, chart.rows()),
        );
        let row = grassmann::Chart::from_orthonormal_parts(
            fv.q.col_block(0, r),
            fv.q.col_block(r, chart.cols()),
        );
        let new_chart = Chart::from_parts(col, row);
        return Ok((new_chart, Coords::new(
            Matrix::zeros(chart.rows() - r, r),
            Matrix::zeros(chart.cols() - r, r),
            h_new,
        )));
    }

    // Drift corrupted the factors; re-factor the represented matrix.
    let w = chart.inverse(c)?;
    let p = RankRPoint::from_matrix(&w, r)?;
    let new_chart = Chart::new(&p)?;
    let coords = Coords::new(
        Matrix::zeros(chart.rows() - r, r),
        Matrix::zeros(chart.cols() - r, r),
        p.g().clone(),
    );
    Ok((new_chart, coords))
}

/// Minimizes `objective` over the rank-r manifold by chart-coordinate
/// gradient descent started at `start`.
pub fn minimize(
    start: &RankRPoint,
    objective: &impl Objective,
    cfg: &Config,
) -> Result<(RankRPoint, Trace)> {
    assert!(cfg.armijo_c > 0.0 && cfg.armijo_c < 1.0);
    assert!(cfg.backtrack_factor > 0.0 && cfg.backtrack_factor < 1.0);
    assert!(cfg.initial_step > 0.0 && cfg.recenter_every >= 1);

    let r = start.rank();
    let (n, m) = start.shape();
    let mut chart = Chart::new(start)?;
    let mut coords = Coords::new(
        Matrix::zeros(n - r, r),
        Matrix::zeros(m - r, r),
        start.g().clone(),
    );
    let mut w = chart.inverse(&coords)?;
    let mut f_cur = objective.evaluate(&w);

    let mut grad = coordinate_gradient(&chart, &coords, objective)?;
    let mut grad_norm = tangent_norm(&grad);

    let mut records = Vec::new();
    records.push(IterationRecord {
        iter: 0,
        f: f_cur,
        grad_norm,
        step: 0.0,
        boundary_sigma_ratio: chart.membership_ratio(&w),
    });

    let mut converged = grad_norm <= cfg.grad_tol;
    let mut stalled = false;
    let mut trial_step = cfg.initial_step;

    if !converged {
        for iter in 1..=cfg.max_iters {
            // Armijo backtracking from the (warm-started) trial step.
            let mut step = trial_step;
            let mut accepted = None;
            let mut best_trial = f64::INFINITY;
            for _ in 0..=cfg.max_backtracks {
                let c_try = Coords::new(
                    &coords.x - &grad.x_dot.scale(step),
                    &coords.y - &grad.y_dot.scale(step),
                    &coords.h - &grad.h_dot.scale(step),
                );
                // Steps that leave GL_r just backtrack further.
                if sigma_ratio(&c_try.h) > tol::GL_REL {
                    let w_try = chart.inverse(&c_try)?;
                    let f_try = objective.evaluate(&w_try);
                    if f_try < best_trial {
                        best_trial = f_try;
                    }
                    // Compare the decrease, not the shifted values: the
                    // threshold must not be absorbed into f_cur's rounding.
                    if f_cur - f_try >= cfg.armijo_c * step * grad_norm * grad_norm {
                        accepted = Some((c_try, w_try, f_try, step));
                        break;
                    }
                }
                step *= cfg.backtrack_factor;
            }
            let Some((c_new, w_new, f_new, used)) = accepted else {
                // Exhausted backtracks. Genuine machine-precision
                // stagnation has two signatures at once: the trial values
                // sat within rounding noise of f_cur, and the decrease a
                // full trial step could deliver (step * ||g||^2) is itself
                // below that noise. Then stop cleanly at the best point
                // representable. Anything else (e.g. a wrong gradient
                // pointing uphill with O(1) norm) stays a hard error.
                let noise = 8.0 * f64::EPSILON * (1.0 + libm::fabs(f_cur));
                let deliverable = trial_step * grad_norm * grad_norm;
                if best_trial <= f_cur + noise && deliverable <= 16.0 * noise {
                    stalled = true;
                    break;
                }
                return Err(Error::LineSearchFailed {
                    backtracks: cfg.max_backtracks,
                });
            };
            coords = c_new;
            w = w_new;
            f_cur = f_new;
            // Grow the trial step off the backtracking lattice: reusing
            // exact powers of backtrack_factor can lock a Hessian mode at
            // the stability boundary step = 2/lambda, where it oscillates
            // without decay.
            trial_step = (used * 1.3).min(cfg.initial_step);

            if iter % cfg.recenter_every == 0 {
                let (new_chart, new_coords) = recenter(&chart, &coords)?;
                chart = new_chart;
                coords = new_coords;
            }

            grad = coordinate_gradient(&chart, &coords, objective)?;
            grad_norm = tangent_norm(&grad);
            records.push(IterationRecord {
                iter,
                f: f_cur,
                grad_norm,
                step: used,
                boundary_sigma_ratio: chart.membership_ratio(&w),
            });
            if grad_norm <= cfg.grad_tol {
                converged = true;
                break;
            }
        }
    }

    // Hand back orthonormal factors regardless of where we stopped.
    let (final_chart, final_coords) = recenter(&chart, &coords)?;
    let point = RankRPoint::new(
        final_chart.col_chart().center().clone(),
        final_coords.h.clone(),
        final_chart.row_chart().center().clone(),
    )?;
    Ok((point, Trace { records, converged, stalled }))
}
