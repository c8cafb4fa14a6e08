//! Factorizations and the derived operations everything else builds on:
//! Householder QR, one-sided Jacobi SVD, numerical rank, Moore-Penrose
//! pseudo-inverse, orthogonal complements and best rank-r factors.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tol;

// ── QR ──────────────────────────────────────────────────────────────────

/// Full QR factorization `a = q * r` with `q` square orthogonal.
pub struct Qr {
    pub q: Matrix,
    pub r: Matrix,
}

/// Householder QR of a `k x n` matrix. Returns the full factorization;
/// callers slice `q` for the thin factor or the orthogonal complement.
pub fn qr(a: &Matrix) -> Qr {
    let k = a.rows();
    let n = a.cols();
    let mut r = a.clone();
    let mut q = Matrix::identity(k);
    let steps = k.min(n);

    let mut v = vec![0.0; k];
    for j in 0..steps {
        // Reflector annihilating r[j+1.., j].
        let mut norm_sq = 0.0;
        for i in j..k {
            let x = r[(i, j)];
            v[i] = x;
            norm_sq += x * x;
        }
        let norm = libm::sqrt(norm_sq);
        if norm == 0.0 {
            continue;
        }
        let alpha = if v[j] >= 0.0 { -norm } else { norm };
        v[j] -= alpha;
        let mut v_norm_sq = 0.0;
        for &x in &v[j..k] {
            v_norm_sq += x * x;
        }
        if v_norm_sq == 0.0 {
            continue;
        }

        // r <- (I - 2 v v^T / v^T v) r, columns j.. only.
        for c in j..n {
            let mut proj = 0.0;
            for i in j..k {
                proj += v[i] * r[(i, c)];
            }
            let coeff = 2.0 * proj / v_norm_sq;
            for i in j..k {
                let val = r[(i, c)] - coeff * v[i];
                r.set(i, c, val);
            }
        }
        // q <- q (I - 2 v v^T / v^T v), accumulating Q = H_0 H_1 ...
        for row in 0..k {
            let mut proj = 0.0;
            for i in j..k {
                proj += q[(row, i)] * v[i];
            }
            let coeff = 2.0 * proj / v_norm_sq;
            for i in j..k {
                let val = q[(row, i)] - coeff * v[i];
                q.set(row, i, val);
            }
        }
        // Clean the column below the diagonal.
        r.set(j, j, alpha);
        for i in (j + 1)..k {
            r.set(i, j, 0.0);
        }
    }
    Qr { q, r }
}

/// Solves `r x = b` for upper-triangular `r`, or `None` when a pivot is
/// exactly zero.
pub(crate) fn solve_upper(r: &Matrix, b: &Matrix) -> Option<Matrix> {
    let n = r.rows();
    assert!(r.is_square() && b.rows() == n);
    let m = b.cols();
    let mut x = b.clone();
    for i in (0..n).rev() {
        let piv = r[(i, i)];
        if piv == 0.0 {
            return None;
        }
        for c in 0..m {
            let mut s = x[(i, c)];
            for l in (i + 1)..n {
                s -= r[(i, l)] * x[(l, c)];
            }
            x.set(i, c, s / piv);
        }
    }
    Some(x)
}

/// Inverse of a small square matrix by QR, or `None` when numerically
/// singular at the GL tolerance.
pub fn invert(a: &Matrix) -> Option<Matrix> {
    assert!(a.is_square(), "invert: matrix must be square");
    if sigma_ratio(a) <= tol::GL_REL {
        return None;
    }
    let f = qr(a);
    let qt = f.q.transpose();
    solve_upper(&f.r, &qt)
}

// ── SVD ─────────────────────────────────────────────────────────────────

/// Thin singular value decomposition `a = u * diag(sigma) * v^T` with
/// `u: n x p`, `v: m x p`, `p = min(n, m)` and `sigma` descending.
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

/// One-sided Jacobi SVD. Rotations are applied to column pairs until all
/// of them are mutually orthogonal; singular values then fall out as column
/// norms. Slow asymptotically but simple and accurate, which is the right
/// trade at the dimensions this crate targets.
pub fn svd(a: &Matrix) -> Svd {
    if a.rows() < a.cols() {
        let t = svd(&a.transpose());
        return Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        };
    }

    let n = a.rows();
    let m = a.cols();
    let mut w = a.clone();
    let mut v = Matrix::identity(m);

    const MAX_SWEEPS: usize = 60;
    const JACOBI_EPS: f64 = 1e-15;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..n {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    app += wp * wp;
                    aqq += wq * wq;
                    apq += wp * wq;
                }
                if libm::fabs(apq) <= JACOBI_EPS * libm::sqrt(app * aqq) || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + libm::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + libm::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..n {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w.set(i, p, c * wp - s * wq);
                    w.set(i, q, s * wp + c * wq);
                }
                for i in 0..m {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v.set(i, p, c * vp - s * vq);
                    v.set(i, q, s * vp + c * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort everything descending.
    let mut order: Vec<usize> = (0..m).collect();
    let mut sig = vec![0.0; m];
    for (j, s) in sig.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..n {
            acc += w[(i, j)] * w[(i, j)];
        }
        *s = libm::sqrt(acc);
    }
    order.sort_by(|&x, &y| sig[y].partial_cmp(&sig[x]).unwrap());

    let mut u = Matrix::zeros(n, m);
    let mut v_sorted = Matrix::zeros(m, m);
    let mut sigma = vec![0.0; m];
    for (dst, &src) in order.iter().enumerate() {
        sigma[dst] = sig[src];
        // Columns with vanishing singular value stay zero in u.
        if sig[src] > 0.0 {
            for i in 0..n {
                u.set(i, dst, w[(i, src)] / sig[src]);
            }
        }
        for i in 0..m {
            v_sorted.set(i, dst, v[(i, src)]);
        }
    }
    Svd {
        u,
        sigma,
        v: v_sorted,
    }
}

/// `sigma_min / sigma_max` of a matrix; zero for the zero matrix.
pub fn sigma_ratio(a: &Matrix) -> f64 {
    let s = svd(a).sigma;
    let max = s[0];
    if max == 0.0 {
        return 0.0;
    }
    s[s.len() - 1] / max
}

// ── Rank decisions ──────────────────────────────────────────────────────

/// Outcome of a numerical rank decision.
#[derive(Debug, Clone, PartialEq)]
pub struct RankDecision {
    pub rank: usize,
    /// Smallest singular value counted toward the rank (0 when rank = 0).
    pub smallest_kept_sv: f64,
    /// Largest singular value below the cut (0 when nothing was dropped).
    pub largest_dropped_sv: f64,
    pub tolerance_used: f64,
}

/// Counts singular values above `tol_rel * sigma_max`.
pub fn numerical_rank(a: &Matrix, tol_rel: f64) -> RankDecision {
    assert!(tol_rel > 0.0 && tol_rel < 1.0, "tol_rel must be in (0, 1)");
    let sigma = svd(a).sigma;
    let max = sigma[0];
    let cut = tol_rel * max;
    let rank = sigma.iter().take_while(|&&s| s > cut).count();
    RankDecision {
        rank,
        smallest_kept_sv: if rank > 0 { sigma[rank - 1] } else { 0.0 },
        largest_dropped_sv: if rank < sigma.len() { sigma[rank] } else { 0.0 },
        tolerance_used: tol_rel,
    }
}

/// Numerical rank at the default tolerance.
pub fn rank(a: &Matrix) -> usize {
    numerical_rank(a, tol::RANK_REL).rank
}

pub(crate) fn require_full_column_rank(a: &Matrix) -> Result<()> {
    let r = rank(a);
    if r < a.cols() {
        return Err(Error::RankDeficient {
            required: a.cols(),
            found: r,
        });
    }
    Ok(())
}

// ── Derived operations ──────────────────────────────────────────────────

/// Moore-Penrose pseudo-inverse `(Z^T Z)^{-1} Z^T` of a full-column-rank
/// `k x r` matrix, computed by QR least squares rather than the normal
/// equations.
pub fn pseudo_inverse(z: &Matrix) -> Result<Matrix> {
    let (k, r) = z.shape();
    if k < r {
        return Err(Error::DimensionMismatch {
            expected: (r, r),
            found: (k, r),
        });
    }
    require_full_column_rank(z)?;
    let f = qr(z);
    let q1t = f.q.col_block(0, r).transpose();
    let r1 = f.r.block(0, r, 0, r);
    // P = R1^{-1} Q1^T solves the least-squares system for each unit vector.
    solve_upper(&r1, &q1t).ok_or(Error::RankDeficient {
        required: r,
        found: rank(z),
    })
}

/// Orthonormal basis of the orthogonal complement of `col(Z)`: the trailing
/// `k - r` columns of the full QR factor, so `Z^T * result = 0` and
/// `result^+ = result^T`.
pub fn orthogonal_complement(z: &Matrix) -> Result<Matrix> {
    let (k, r) = z.shape();
    if r >= k {
        return Err(Error::DimensionMismatch {
            expected: (k, k.saturating_sub(1)),
            found: (k, r),
        });
    }
    require_full_column_rank(z)?;
    let f = qr(z);
    Ok(f.q.col_block(r, k))
}

/// Best rank-`r` factors `(U, G, V)` with `U, V` orthonormal and `G`
/// invertible diagonal, from the truncated SVD: `U G V^T` is the closest
/// rank-`r` matrix to `a` in Frobenius norm.
pub fn factor_rank_r(a: &Matrix, r: usize) -> Result<(Matrix, Matrix, Matrix)> {
    if r == 0 || r > a.rows().min(a.cols()) {
        return Err(Error::DimensionMismatch {
            expected: (a.rows(), a.cols()),
            found: (r, r),
        });
    }
    let decision = numerical_rank(a, tol::RANK_REL);
    if decision.rank < r {
        return Err(Error::RankDeficient {
            required: r,
            found: decision.rank,
        });
    }
    let f = svd(a);
    let u = f.u.col_block(0, r);
    let v = f.v.col_block(0, r);
    let g = Matrix::diag(&f.sigma[0..r]);
    Ok((u, g, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn assert_close(a: &Matrix, b: &Matrix, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        let d = (a - b).max_abs();
        assert!(d <= tol, "matrices differ by {d:.3e} > {tol:.3e}");
    }

    #[test]
    fn qr_reconstructs_and_q_is_orthogonal() {
        let a = Matrix::from_fn(5, 3, |i, j| ((i * 3 + j) as f64).sin());
        let f = qr(&a);
        assert_close(&(&f.q * &f.r), &a, 1e-14);
        let qtq = &f.q.transpose() * &f.q;
        assert_close(&qtq, &Matrix::identity(5), 1e-14);
    }

    #[test]
    fn svd_reconstructs() {
        let a = Matrix::from_fn(6, 4, |i, j| ((i + 2 * j) as f64).cos());
        let f = svd(&a);
        let us = &f.u * &Matrix::diag(&f.sigma);
        assert_close(&(&us * &f.v.transpose()), &a, 1e-13);
        // Orthonormal factors.
        assert_close(&(&f.u.transpose() * &f.u), &Matrix::identity(4), 1e-13);
        assert_close(&(&f.v.transpose() * &f.v), &Matrix::identity(4), 1e-13);
        // Descending.
        for w in f.sigma.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn svd_of_diag_recovers_spectrum() {
        let a = Matrix::diag(&[3.0, 1.0, 2.0]);
        let f = svd(&a);
        assert!((f.sigma[0] - 3.0).abs() < 1e-14);
        assert!((f.sigma[1] - 2.0).abs() < 1e-14);
        assert!((f.sigma[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_wide_matrix() {
        let a = Matrix::from_fn(3, 7, |i, j| 1.0 / (1.0 + (i + j) as f64));
        let f = svd(&a);
        let us = &f.u * &Matrix::diag(&f.sigma);
        assert_close(&(&us * &f.v.transpose()), &a, 1e-13);
    }

    #[test]
    fn pseudo_inverse_orthonormal_column_is_transpose() {
        // Z = [[1], [0]] -> Z^+ = [[1, 0]].
        let z = Matrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap();
        let p = pseudo_inverse(&z).unwrap();
        assert_close(&p, &Matrix::from_vec(1, 2, vec![1.0, 0.0]).unwrap(), 1e-15);
    }

    #[test]
    fn pseudo_inverse_hand_value() {
        // Z = [[1], [1]] -> (Z^T Z)^{-1} Z^T = [[0.5, 0.5]].
        let z = Matrix::from_vec(2, 1, vec![1.0, 1.0]).unwrap();
        let p = pseudo_inverse(&z).unwrap();
        assert_close(&p, &Matrix::from_vec(1, 2, vec![0.5, 0.5]).unwrap(), 1e-15);
    }

    #[test]
    fn pseudo_inverse_rejects_wide_and_deficient() {
        let wide = Matrix::zeros(2, 3);
        assert!(matches!(
            pseudo_inverse(&wide),
            Err(Error::DimensionMismatch { .. })
        ));
        let deficient = Matrix::from_vec(3, 2, vec![1.0, 2.0, 2.0, 4.0, 3.0, 6.0]).unwrap();
        assert!(matches!(
            pseudo_inverse(&deficient),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn complement_of_e1_is_e2_up_to_sign() {
        let z = Matrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap();
        let c = orthogonal_complement(&z).unwrap();
        assert!((libm::fabs(c[(1, 0)]) - 1.0).abs() < 1e-15);
        assert!(libm::fabs(c[(0, 0)]) < 1e-15);
    }

    #[test]
    fn complement_of_ones_column() {
        // Z = [[1], [1]] -> complement is [a, -a] with a = 1/sqrt(2).
        let z = Matrix::from_vec(2, 1, vec![1.0, 1.0]).unwrap();
        let c = orthogonal_complement(&z).unwrap();
        let a = 1.0 / libm::sqrt(2.0);
        assert!((libm::fabs(c[(0, 0)]) - a).abs() < 1e-14);
        assert!((c[(0, 0)] + c[(1, 0)]).abs() < 1e-14);
    }

    #[test]
    fn complement_rejects_square() {
        let z = Matrix::identity(3);
        assert!(matches!(
            orthogonal_complement(&z),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rank_of_zero_and_identity() {
        let d = numerical_rank(&Matrix::zeros(3, 3), tol::RANK_REL);
        assert_eq!(d.rank, 0);
        assert_eq!(d.smallest_kept_sv, 0.0);
        assert_eq!(numerical_rank(&Matrix::identity(4), tol::RANK_REL).rank, 4);
    }

    #[test]
    fn rank_of_outer_product_is_one() {
        let u = Matrix::from_fn(6, 1, |i, _| (i as f64 + 1.0).sin());
        let v = Matrix::from_fn(5, 1, |i, _| (i as f64 - 2.5).cos());
        let a = &u * &v.transpose();
        let d = numerical_rank(&a, tol::RANK_REL);
        assert_eq!(d.rank, 1);
        assert!(d.smallest_kept_sv > d.largest_dropped_sv);
    }

    #[test]
    fn factor_rank_r_of_diag() {
        // diag(3,2,1) truncated at r = 2 leaves residual exactly 1.
        let a = Matrix::diag(&[3.0, 2.0, 1.0]);
        let (u, g, v) = factor_rank_r(&a, 2).unwrap();
        let approx = &(&u * &g) * &v.transpose();
        let residual = (&a - &approx).fro_norm();
        assert!((residual - 1.0).abs() < 1e-12, "residual {residual}");
        let sig = svd(&g).sigma;
        assert!((sig[0] - 3.0).abs() < 1e-12 && (sig[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn factor_rank_r_identity_is_exact() {
        let a = Matrix::identity(3);
        let (u, g, v) = factor_rank_r(&a, 3).unwrap();
        let approx = &(&u * &g) * &v.transpose();
        assert_close(&approx, &a, 1e-12);
    }

    #[test]
    fn factor_rank_r_rejects_deficient() {
        let a = Matrix::from_vec(3, 2, vec![1.0, 2.0, 2.0, 4.0, 3.0, 6.0]).unwrap();
        assert!(matches!(
            factor_rank_r(&a, 2),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn invert_small() {
        let a = Matrix::from_vec(2, 2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let inv = invert(&a).unwrap();
        assert_close(&(&a * &inv), &Matrix::identity(2), 1e-14);
        assert!(invert(&Matrix::zeros(2, 2)).is_none());
    }
}
