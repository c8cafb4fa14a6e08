//! Seeded random matrix generators for tests, demos and verification runs.
//!
//! Generators go through orthonormal factors and an explicit spectrum, so
//! the requested rank holds exactly and the conditioning is under control.
//! The stream is ChaCha8 keyed on the seed: the same seed reproduces the
//! same matrix bit for bit.

use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{qr, rank};
use crate::matrix::Matrix;

fn next_unit(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random mantissa bits -> uniform in [0, 1).
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn uniform_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| 2.0 * next_unit(rng) - 1.0)
}

/// Random matrix with orthonormal columns, via QR of a uniform matrix.
fn random_orthonormal(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let e = uniform_matrix(rows, cols, rng);
        if rank(&e) == cols {
            return qr(&e).q.col_block(0, cols);
        }
        // A uniform draw is rank deficient with probability zero; retry.
    }
}

/// Random full-column-rank `k x r` matrix with singular values in `[1, 2]`.
pub fn random_full_rank(k: usize, r: usize, seed: u64) -> Result<Matrix> {
    if r == 0 || r > k {
        return Err(Error::DimensionMismatch {
            expected: (k, k),
            found: (k, r),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left = random_orthonormal(k, r, &mut rng);
    let spectrum: Vec<f64> = (0..r).map(|_| 1.0 + next_unit(&mut rng)).collect();
    let right = random_orthonormal(r, r, &mut rng);
    Ok(&(&left * &Matrix::diag(&spectrum)) * &right.transpose())
}

/// Random `n x m` matrix of rank exactly `r`, singular values in `[1, 2]`.
pub fn random_rank_r(n: usize, m: usize, r: usize, seed: u64) -> Result<Matrix> {
    if r == 0 || r > n.min(m) {
        return Err(Error::DimensionMismatch {
            expected: (n, m),
            found: (r, r),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left = random_orthonormal(n, r, &mut rng);
    let spectrum: Vec<f64> = (0..r).map(|_| 1.0 + next_unit(&mut rng)).collect();
    let right = random_orthonormal(m, r, &mut rng);
    Ok(&(&left * &Matrix::diag(&spectrum)) * &right.transpose())
}

/// Random matrix with the prescribed singular values (descending or not),
/// in the style of the classic LAPACK test-matrix generators.
pub fn random_with_spectrum(n: usize, m: usize, spectrum: &[f64], seed: u64) -> Result<Matrix> {
    let r = spectrum.len();
    if r == 0 || r > n.min(m) {
        return Err(Error::DimensionMismatch {
            expected: (n, m),
            found: (r, r),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left = random_orthonormal(n, r, &mut rng);
    let right = random_orthonormal(m, r, &mut rng);
    Ok(&(&left * &Matrix::diag(spectrum)) * &right.transpose())
}

/// Random coordinate matrix with unconstrained entries in `[-scale, scale)`.
pub fn random_coords(rows: usize, cols: usize, scale: f64, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    uniform_matrix(rows, cols, &mut rng).scale(scale)
}
