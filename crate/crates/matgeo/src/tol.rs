//! Shared numerical tolerances.
//!
//! Every threshold the library uses to make a discrete decision lives here,
//! so the choices are visible in one place instead of scattered as magic
//! numbers.

/// Relative rank tolerance: a singular value counts only above
/// `RANK_REL * sigma_max`. Double precision leaves ~1e-16 of slack per
/// operation; 1e-10 keeps generous headroom for desk-scale dimensions.
pub const RANK_REL: f64 = 1e-10;

/// Chart membership: `det(Z^T W) != 0` is decided by
/// `sigma_min(Z^T W) > DOMAIN_REL * sigma_max(Z^T W)`. Determinant magnitude
/// is scale-dependent; the singular-value ratio is not.
pub const DOMAIN_REL: f64 = 1e-10;

/// Invertibility of group factors (GL_r membership):
/// `sigma_min(G) > GL_REL * sigma_max(G)`.
pub const GL_REL: f64 = 1e-12;

/// Fixed-rank chart application warns (instead of failing) when the
/// membership ratio falls inside `[GL_REL, NEAR_BOUNDARY_REL]`.
pub const NEAR_BOUNDARY_REL: f64 = 1e-10;

/// Subspaces compare equal when their orthogonal projectors differ by at
/// most this much in Frobenius norm.
pub const SUBSPACE_EQ: f64 = 1e-8;

/// Central finite-difference step for derivative checks: balances
/// O(h^2) truncation against O(eps/h) roundoff at double precision.
pub const FD_STEP: f64 = 1e-6;
