#![allow(dead_code)] // each test binary uses its own subset
#![allow(clippy::needless_range_loop)] // elimination reads one row while writing another

//! Test oracles, deliberately independent of the library's own kernels:
//! dense solves go through pivoted Gaussian elimination (the library uses
//! QR), the matrix exponential through scaling-and-squaring on the Taylor
//! series (the library uses the closed nilpotent form).

use matgeo::Matrix;

pub fn assert_close(a: &Matrix, b: &Matrix, tol: f64, what: &str) {
    assert_eq!(a.shape(), b.shape(), "{what}: shape mismatch");
    let d = (a - b).max_abs();
    assert!(d <= tol, "{what}: differ by {d:.3e} > {tol:.3e}");
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    assert!(a.is_square() && b.rows() == n);
    let m = b.cols();
    // Augmented working copy in plain nested vecs.
    let mut w: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n + m)
                .map(|j| if j < n { a[(i, j)] } else { b[(i, j - n)] })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&x, &y| w[x][col].abs().partial_cmp(&w[y][col].abs()).unwrap())?;
        if w[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        w.swap(col, pivot_row);
        for row in (col + 1)..n {
            let factor = w[row][col] / w[col][col];
            for j in col..n + m {
                w[row][j] -= factor * w[col][j];
            }
        }
    }
    let mut x = vec![vec![0.0; m]; n];
    for i in (0..n).rev() {
        for c in 0..m {
            let mut s = w[i][n + c];
            for l in (i + 1)..n {
                s -= w[i][l] * x[l][c];
            }
            x[i][c] = s / w[i][i];
        }
    }
    Some(Matrix::from_fn(n, m, |i, j| x[i][j]))
}

/// Determinant by the same elimination.
pub fn det(a: &Matrix) -> f64 {
    let n = a.rows();
    assert!(a.is_square());
    let mut w: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    let mut sign = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&x, &y| w[x][col].abs().partial_cmp(&w[y][col].abs()).unwrap())
            .unwrap();
        if w[pivot_row][col] == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            w.swap(col, pivot_row);
            sign = -sign;
        }
        for row in (col + 1)..n {
            let factor = w[row][col] / w[col][col];
            for j in col..n {
                w[row][j] -= factor * w[col][j];
            }
        }
    }
    (0..n).fold(sign, |acc, i| acc * w[i][i])
}

/// Normal-equation pseudo-inverse `(Z^T Z)^{-1} Z^T`: the formula the
/// library avoids for conditioning reasons, used here as the oracle.
pub fn pinv_normal_equations(z: &Matrix) -> Matrix {
    let zt = z.transpose();
    let gram = &zt * z;
    gauss_solve(&gram, &zt).expect("oracle: gram matrix must be invertible")
}

/// Matrix exponential by scaling-and-squaring on the plain Taylor series.
pub fn mat_exp(a: &Matrix) -> Matrix {
    let n = a.rows();
    assert!(a.is_square());
    let norm = a.fro_norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(0.5f64.powi(squarings as i32));
    let mut result = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=20 {
        term = (&term * &scaled).scale(1.0 / k as f64);
        result = &result + &term;
        if term.max_abs() < 1e-17 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Central finite difference `(f(h) - f(-h)) / 2h` of a matrix-valued map.
pub fn central_diff(f: impl Fn(f64) -> Matrix, h: f64) -> Matrix {
    let plus = f(h);
    let minus = f(-h);
    (&plus - &minus).scale(1.0 / (2.0 * h))
}

/// Smallest singular value squared, via the Gram matrix characteristic
/// bound: used only as a crude positivity check for oracles.
pub fn min_gram_eigenvalue_lower_bound(a: &Matrix) -> f64 {
    // Rayleigh quotient at a handful of coordinate directions is an upper
    // bound; for oracle purposes we instead do inverse iteration.
    let gram = &a.transpose() * a;
    let n = gram.rows();
    let mut v = Matrix::from_fn(n, 1, |i, _| 1.0 / ((i + 1) as f64));
    for _ in 0..50 {
        let solved = match gauss_solve(&gram, &v) {
            Some(s) => s,
            None => return 0.0,
        };
        let norm = solved.fro_norm();
        if !norm.is_finite() || norm == 0.0 {
            return 0.0;
        }
        v = solved.scale(1.0 / norm);
    }
    let gv = &gram * &v;
    v.dot(&gv)
}
