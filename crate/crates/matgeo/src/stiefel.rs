//! The non-compact Stiefel manifold of full-rank `k x r` matrices, as a
//! principal bundle over the Grassmann manifold with fibre `GL_r`.
//!
//! A chart shares its frame with the Grassmann chart at the same center:
//! `xi_Z(W) = (Z_perp^+ W (Z^+ W)^{-1}, Z^+ W)` splits a matrix into the
//! cross-section coordinates of its column space and the fibre factor, with
//! inverse `xi_Z^{-1}(X, G) = (Z + Z_perp X) G`. The column-space map is the
//! bundle projection.

use crate::error::{Error, Result};
use crate::grassmann;
use crate::linalg::{invert, sigma_ratio};
use crate::matrix::Matrix;
use crate::tol;

/// Local coordinates `(X, G)` of a full-rank matrix: cross-section part and
/// invertible fibre factor.
#[derive(Debug, Clone)]
pub struct Coords {
    pub x: Matrix,
    pub g: Matrix,
}

/// A tangent vector in chart coordinates.
#[derive(Debug, Clone)]
pub struct CoordTangent {
    pub x_dot: Matrix,
    pub g_dot: Matrix,
}

/// Chart of the Stiefel manifold at a full-rank center `Z`; same frame data
/// as the Grassmann chart, interpreted over the neighbourhood
/// `V_Z = {W : det(Z^T W) != 0}`.
#[derive(Debug, Clone)]
pub struct Chart {
    base: grassmann::Chart,
}

/// Bundle projection: the column space of a full-rank matrix.
pub fn project(w: &Matrix) -> Result<grassmann::Subspace> {
    grassmann::Subspace::new(w.clone())
}

impl Chart {
    pub fn new(center: Matrix) -> Result<Self> {
        Ok(Chart {
            base: grassmann::Chart::new(center)?,
        })
    }

    /// The Grassmann chart over which this chart trivializes the bundle.
    pub fn base(&self) -> &grassmann::Chart {
        &self.base
    }

    pub fn center(&self) -> &Matrix {
        self.base.center()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.ambient_dim()
    }

    pub fn subspace_dim(&self) -> usize {
        self.base.subspace_dim()
    }

    fn require_member(&self, w: &Matrix) -> Result<()> {
        let shape = self.center().shape();
        if w.shape() != shape {
            return Err(Error::DimensionMismatch {
                expected: shape,
                found: w.shape(),
            });
        }
        let ratio = self.base.membership_ratio(w);
        if ratio <= tol::DOMAIN_REL {
            return Err(Error::OutOfChartDomain { ratio });
        }
        Ok(())
    }

    /// Chart map `xi_Z`.
    pub fn apply(&self, w: &Matrix) -> Result<Coords> {
        self.require_member(w)?;
        let g = self.base.center_pinv() * w;
        let g_inv = invert(&g).ok_or(Error::OutOfChartDomain {
            ratio: sigma_ratio(&g),
        })?;
        let x = &(self.base.complement_pinv() * w) * &g_inv;
        Ok(Coords { x, g })
    }

    /// Inverse chart map `xi_Z^{-1}(X, G) = (Z + Z_perp X) G`.
    pub fn inverse(&self, c: &Coords) -> Result<Matrix> {
        let r = self.subspace_dim();
        if c.x.shape() != self.base.coord_shape() || c.g.shape() != (r, r) {
            return Err(Error::DimensionMismatch {
                expected: self.base.coord_shape(),
                found: c.x.shape(),
            });
        }
        let ratio = sigma_ratio(&c.g);
        if ratio <= tol::GL_REL {
            return Err(Error::SingularFactor { ratio });
        }
        let section = self.base.center() + &(self.base.complement() * &c.x);
        Ok(&section * &c.g)
    }

    /// Fibre chart `chi_Z(W) = (col(W), Z^+ W)`: base point and group
    /// element of the local trivialization.
    pub fn fiber_chart(&self, w: &Matrix) -> Result<(grassmann::Subspace, Matrix)> {
        self.require_member(w)?;
        let g = self.base.center_pinv() * w;
        Ok((grassmann::Subspace::new(w.clone())?, g))
    }

    /// Tangent map of the inclusion at the center: `(X., G.) -> Z_perp X. + Z G.`.
    pub fn tangent_push(&self, t: &CoordTangent) -> Matrix {
        assert_eq!(t.x_dot.shape(), self.base.coord_shape());
        assert_eq!(
            t.g_dot.shape(),
            (self.subspace_dim(), self.subspace_dim())
        );
        &(self.base.complement() * &t.x_dot) + &(self.center() * &t.g_dot)
    }

    /// Inverse of the tangent map: `Z. -> (Z_perp^+ Z., Z^+ Z.)`.
    pub fn tangent_pull(&self, z_dot: &Matrix) -> CoordTangent {
        assert_eq!(z_dot.shape(), self.center().shape());
        CoordTangent {
            x_dot: self.base.complement_pinv() * z_dot,
            g_dot: self.base.center_pinv() * z_dot,
        }
    }

    /// Splits an ambient tangent into its vertical part `Z Z^+ Z.` (fibre
    /// direction) and horizontal part `Z_perp Z_perp^+ Z.` (base direction).
    pub fn tangent_split(&self, z_dot: &Matrix) -> (Matrix, Matrix) {
        assert_eq!(z_dot.shape(), self.center().shape());
        let vertical = self.center() * &(self.base.center_pinv() * z_dot);
        let horizontal = self.base.complement() * &(self.base.complement_pinv() * z_dot);
        (vertical, horizontal)
    }

    /// Differential of the inclusion at arbitrary coordinates:
    /// `Z_perp X. G + (Z + Z_perp X) G.`. Used to probe that the chart
    /// parametrisation is an immersion everywhere.
    pub fn differential(&self, c: &Coords, t: &CoordTangent) -> Matrix {
        let section = self.base.center() + &(self.base.complement() * &c.x);
        &(&(self.base.complement() * &t.x_dot) * &c.g) + &(&section * &t.g_dot)
    }

    /// Group operation `W *_Z W' = xi_Z^{-1}(X + X', G G')`.
    pub fn group_op(&self, w: &Matrix, w_other: &Matrix) -> Result<Matrix> {
        let a = self.apply(w)?;
        let b = self.apply(w_other)?;
        self.inverse(&Coords {
            x: &a.x + &b.x,
            g: &a.g * &b.g,
        })
    }

    /// Identity element `xi_Z^{-1}(0, id_r) = Z`.
    pub fn group_identity(&self) -> Matrix {
        self.center().clone()
    }

    /// Group inverse `xi_Z^{-1}(-X, G^{-1})`.
    pub fn group_inverse(&self, w: &Matrix) -> Result<Matrix> {
        let c = self.apply(w)?;
        let g_inv = invert(&c.g).ok_or(Error::SingularFactor {
            ratio: sigma_ratio(&c.g),
        })?;
        self.inverse(&Coords {
            x: -&c.x,
            g: g_inv,
        })
    }

    /// Lie group isomorphism `eta_Z(W) = (exp(Z_perp X Z^+), G)` onto
    /// `G_Z x GL_r`.
    pub fn group_iso(&self, w: &Matrix) -> Result<(Matrix, Matrix)> {
        let c = self.apply(w)?;
        Ok((self.base.lie_exp(&c.x), c.g))
    }

    /// Transition map into `other`: the coordinates there of the matrix
    /// represented here by `c`.
    pub fn transition_to(&self, other: &Chart, c: &Coords) -> Result<Coords> {
        other.apply(&self.inverse(c)?)
    }
}
