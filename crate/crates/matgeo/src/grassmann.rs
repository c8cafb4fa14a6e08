//! The Grassmann manifold of r-dimensional subspaces of R^k, described by
//! explicit charts instead of equivalence classes.
//!
//! A chart is anchored at a full-rank `k x r` matrix `Z` with orthonormal
//! complement `Z_perp`. The affine cross section `S_Z = {Z + Z_perp X}`
//! carries one representative per nearby subspace, and the chart map sends
//! `col(Z + Z_perp X)` to `X`. The same data equips the neighbourhood with
//! a commutative Lie group structure through the nilpotent exponentials
//! `exp(Z_perp X Z^+) = I + Z_perp X Z^+`.

use crate::error::{Error, Result};
use crate::linalg::{invert, orthogonal_complement, pseudo_inverse, qr, rank, sigma_ratio};
use crate::matrix::Matrix;
use crate::tol;

/// An r-dimensional linear subspace of R^k, stored through an arbitrary
/// full-rank representative (no canonical form is imposed).
#[derive(Debug, Clone)]
pub struct Subspace {
    rep: Matrix,
}

impl Subspace {
    /// Wraps a representative, verifying it has full column rank.
    pub fn new(rep: Matrix) -> Result<Self> {
        let r = rank(&rep);
        if r < rep.cols() {
            return Err(Error::RankDeficient {
                required: rep.cols(),
                found: r,
            });
        }
        Ok(Subspace { rep })
    }

    /// For representatives that are full rank by construction.
    pub(crate) fn from_rep_unchecked(rep: Matrix) -> Self {
        Subspace { rep }
    }

    pub fn ambient_dim(&self) -> usize {
        self.rep.rows()
    }

    pub fn dim(&self) -> usize {
        self.rep.cols()
    }

    pub fn representative(&self) -> &Matrix {
        &self.rep
    }

    /// Orthogonal projector onto the subspace (`Z Z^+`, computed from an
    /// orthonormal basis for numerical stability).
    pub fn projector(&self) -> Matrix {
        let q1 = qr(&self.rep).q.col_block(0, self.rep.cols());
        &q1 * &q1.transpose()
    }

    /// Representative-independent equality: projectors agree in Frobenius
    /// norm within [`tol::SUBSPACE_EQ`].
    pub fn approx_eq(&self, other: &Subspace) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.dim() == other.dim()
            && (&self.projector() - &other.projector()).fro_norm() <= tol::SUBSPACE_EQ
    }
}

/// Chart of the Grassmann manifold centred at `col(Z)`, with the
/// complement and both pseudo-inverses precomputed.
#[derive(Debug, Clone)]
pub struct Chart {
    center: Matrix,
    complement: Matrix,
    center_pinv: Matrix,
    complement_pinv: Matrix,
}

impl Chart {
    /// Builds the chart at a full-rank `k x r` center with `r < k`.
    pub fn new(center: Matrix) -> Result<Self> {
        let complement = orthogonal_complement(&center)?;
        let center_pinv = pseudo_inverse(&center)?;
        // The complement comes out orthonormal, so its pseudo-inverse is
        // exactly its transpose.
        let complement_pinv = complement.transpose();
        Ok(Chart {
            center,
            complement,
            center_pinv,
            complement_pinv,
        })
    }

    /// Assembles a chart from a center and complement that are already
    /// orthonormal (both pseudo-inverses are then plain transposes).
    pub(crate) fn from_orthonormal_parts(center: Matrix, complement: Matrix) -> Self {
        debug_assert_eq!(center.rows(), complement.rows());
        debug_assert_eq!(center.cols() + complement.cols(), center.rows());
        let center_pinv = center.transpose();
        let complement_pinv = complement.transpose();
        Chart {
            center,
            complement,
            center_pinv,
            complement_pinv,
        }
    }

    pub fn center(&self) -> &Matrix {
        &self.center
    }

    pub fn complement(&self) -> &Matrix {
        &self.complement
    }

    pub fn center_pinv(&self) -> &Matrix {
        &self.center_pinv
    }

    pub fn complement_pinv(&self) -> &Matrix {
        &self.complement_pinv
    }

    /// Ambient dimension k.
    pub fn ambient_dim(&self) -> usize {
        self.center.rows()
    }

    /// Subspace dimension r.
    pub fn subspace_dim(&self) -> usize {
        self.center.cols()
    }

    /// Coordinate space shape `(k - r, r)`.
    pub fn coord_shape(&self) -> (usize, usize) {
        (self.ambient_dim() - self.subspace_dim(), self.subspace_dim())
    }

    /// Membership ratio `sigma_min / sigma_max` of `Z^T W`; the chart
    /// domain is where this stays above [`tol::DOMAIN_REL`].
    pub fn membership_ratio(&self, w: &Matrix) -> f64 {
        sigma_ratio(&(&self.center.transpose() * w))
    }

    fn require_in_domain(&self, w: &Matrix) -> Result<()> {
        let (k, r) = self.center.shape();
        if w.shape() != (k, r) {
            return Err(Error::DimensionMismatch {
                expected: (k, r),
                found: w.shape(),
            });
        }
        let ratio = self.membership_ratio(w);
        if ratio <= tol::DOMAIN_REL {
            return Err(Error::OutOfChartDomain { ratio });
        }
        Ok(())
    }

    /// The unique point of the cross section `S_Z` with the same column
    /// space as `w`: `W G_W^{-1}` with `G_W = (Z^T Z)^{-1} Z^T W = Z^+ W`.
    pub fn section_point(&self, w: &Matrix) -> Result<Matrix> {
        self.require_in_domain(w)?;
        let g_w = &self.center_pinv * w;
        let g_inv = invert(&g_w).ok_or(Error::OutOfChartDomain {
            ratio: sigma_ratio(&g_w),
        })?;
        Ok(w * &g_inv)
    }

    /// Chart map: coordinates `X = Z_perp^+ (W G_W^{-1} - Z)` of a subspace
    /// in the chart domain.
    pub fn apply(&self, s: &Subspace) -> Result<Matrix> {
        let section = self.section_point(s.representative())?;
        Ok(&self.complement_pinv * &(&section - &self.center))
    }

    /// Inverse chart map `X -> col(Z + Z_perp X)`, defined on all of the
    /// coordinate space.
    pub fn inverse(&self, x: &Matrix) -> Result<Subspace> {
        if x.shape() != self.coord_shape() {
            return Err(Error::DimensionMismatch {
                expected: self.coord_shape(),
                found: x.shape(),
            });
        }
        // Z^T (Z + Z_perp X) = Z^T Z is invertible, so the representative
        // has full rank for every X.
        let rep = &self.center + &(&self.complement * x);
        Ok(Subspace::from_rep_unchecked(rep))
    }

    /// Transition map into `other`: the coordinates of the same subspace
    /// there, `X~ = Z~_perp^+ (Z + Z_perp X) G^{-1}` with
    /// `G = Z~^+ (Z + Z_perp X)`.
    pub fn transition_to(&self, other: &Chart, x: &Matrix) -> Result<Matrix> {
        if x.shape() != self.coord_shape() {
            return Err(Error::DimensionMismatch {
                expected: self.coord_shape(),
                found: x.shape(),
            });
        }
        let w = &self.center + &(&self.complement * x);
        other.require_in_domain(&w)?;
        let g = &other.center_pinv * &w;
        let g_inv = invert(&g).ok_or(Error::OutOfChartDomain {
            ratio: sigma_ratio(&g),
        })?;
        Ok(&(&other.complement_pinv * &w) * &g_inv)
    }

    /// Exponential of the nilpotent Lie algebra element `Z_perp X Z^+`:
    /// exactly `I + Z_perp X Z^+`, which maps `Z` to `Z + Z_perp X` and
    /// fixes `Z_perp`.
    pub fn lie_exp(&self, x: &Matrix) -> Matrix {
        assert_eq!(x.shape(), self.coord_shape(), "lie_exp: coordinate shape");
        let n = &(&self.complement * x) * &self.center_pinv;
        &Matrix::identity(self.ambient_dim()) + &n
    }

    /// Group operation on the chart neighbourhood: addition of coordinates,
    /// `V o_Z V' = phi_Z^{-1}(phi_Z(V) + phi_Z(V'))`.
    pub fn group_op(&self, a: &Subspace, b: &Subspace) -> Result<Subspace> {
        let xa = self.apply(a)?;
        let xb = self.apply(b)?;
        self.inverse(&(&xa + &xb))
    }

    /// Identity element `col(Z)` of the local group.
    pub fn group_identity(&self) -> Subspace {
        Subspace::from_rep_unchecked(self.center.clone())
    }

    /// Group inverse: the subspace with negated coordinates.
    pub fn group_inverse(&self, a: &Subspace) -> Result<Subspace> {
        let x = self.apply(a)?;
        self.inverse(&(-&x))
    }

    /// Lie group isomorphism `gamma_Z(S) = exp(Z_perp phi_Z(S) Z^+)` onto
    /// the matrix group `G_Z`.
    pub fn group_iso(&self, s: &Subspace) -> Result<Matrix> {
        Ok(self.lie_exp(&self.apply(s)?))
    }
}
