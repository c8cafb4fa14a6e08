//! Chart-based geometry for three families of matrix manifolds:
//!
//! - [`grassmann`]: r-dimensional subspaces of R^k, with explicit charts
//!   built on affine cross sections (no equivalence classes anywhere);
//! - [`stiefel`]: full-rank k x r matrices as a principal bundle over the
//!   Grassmann manifold with fibre GL_r;
//! - [`fixed_rank`]: n x m matrices of rank exactly r as a principal bundle
//!   over a product of two Grassmann manifolds.
//!
//! Each chart neighbourhood also carries a Lie group structure through
//! nilpotent matrix exponentials, and [`optimizer`] runs first-order
//! minimization directly in chart coordinates, so iterates stay on the
//! manifold by construction instead of by projection.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line live in the companion `matgeo-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod fixed_rank;
pub mod grassmann;
pub mod linalg;
pub mod matrix;
pub mod optimizer;
pub mod random;
pub mod stiefel;
pub mod tol;

pub use error::{Error, Result};
pub use matrix::Matrix;
