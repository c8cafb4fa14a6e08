//! The manifold of `n x m` matrices of rank exactly `r`, charted through
//! factorizations `Z = U G V^T`.
//!
//! A chart is indexed by the pair of Grassmann charts at `U` (column space)
//! and `V` (row space); the middle factor is deliberately not part of the
//! chart, so charts built from `U G V^T` and `U G' V^T` are identical. The
//! chart map is
//!
//! ```text
//! theta_Z(A)    = (X, Y, H),   A = (U + U_perp X) H (V + V_perp Y)^T
//! theta_Z^{-1}(0, 0, G) = U G V^T
//! ```
//!
//! and its domain is the set of rank-r matrices with `det(U^T A V) != 0`.
//! Every chart image has rank exactly r by construction, which is the
//! computational payoff: iterating in coordinates can never leave the
//! manifold.

use crate::error::{Error, Result};
use crate::grassmann;
use crate::linalg::{invert, numerical_rank, sigma_ratio};
use crate::matrix::Matrix;
use crate::tol;

/// A rank-r matrix held in factored form `U G V^T` with `U, V` full rank
/// and `G` invertible.
#[derive(Debug, Clone)]
pub struct RankRPoint {
    u: Matrix,
    g: Matrix,
    v: Matrix,
}

impl RankRPoint {
    pub fn new(u: Matrix, g: Matrix, v: Matrix) -> Result<Self> {
        let r = u.cols();
        if g.shape() != (r, r) || v.cols() != r || u.rows() <= r || v.rows() <= r {
            return Err(Error::DimensionMismatch {
                expected: (u.rows(), r),
                found: (v.rows(), v.cols()),
            });
        }
        for factor in [&u, &v] {
            let got = crate::linalg::rank(factor);
            if got < r {
                return Err(Error::RankDeficient {
                    required: r,
                    found: got,
                });
            }
        }
        let ratio = sigma_ratio(&g);
        if ratio <= tol::GL_REL {
            return Err(Error::SingularFactor { ratio });
        }
        Ok(RankRPoint { u, g, v })
    }

    /// Factors an arbitrary matrix of numerical rank at least `r` through
    /// its truncated SVD.
    pub fn from_matrix(a: &Matrix, r: usize) -> Result<Self> {
        let (u, g, v) = crate::linalg::factor_rank_r(a, r)?;
        RankRPoint::new(u, g, v)
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    pub fn rank(&self) -> usize {
        self.u.cols()
    }

    /// Ambient shape `(n, m)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.u.rows(), self.v.rows())
    }

    /// Reconstructs the dense matrix `U G V^T`.
    pub fn to_matrix(&self) -> Matrix {
        &(&self.u * &self.g) * &self.v.transpose()
    }
}

/// Bundle projection onto the pair (column space, row space).
pub fn project(p: &RankRPoint) -> (grassmann::Subspace, grassmann::Subspace) {
    (
        grassmann::Subspace::new(p.u.clone()).expect("U is full rank by invariant"),
        grassmann::Subspace::new(p.v.clone()).expect("V is full rank by invariant"),
    )
}

/// Local coordinates `(X, Y, H)` of a rank-r matrix in a chart.
/// `near_boundary` is raised when the membership ratio of the charted
/// matrix sat inside the warning band instead of failing outright.
#[derive(Debug, Clone)]
pub struct Coords {
    pub x: Matrix,
    pub y: Matrix,
    pub h: Matrix,
    pub near_boundary: bool,
}

impl Coords {
    pub fn new(x: Matrix, y: Matrix, h: Matrix) -> Self {
        Coords {
            x,
            y,
            h,
            near_boundary: false,
        }
    }
}

/// A tangent vector in chart coordinates.
#[derive(Debug, Clone)]
pub struct CoordTangent {
    pub x_dot: Matrix,
    pub y_dot: Matrix,
    pub h_dot: Matrix,
}

/// Chart of the fixed-rank manifold: the Grassmann charts of the column
/// and row spaces. The middle factor of the defining point is not stored.
#[derive(Debug, Clone)]
pub struct Chart {
    col: grassmann::Chart,
    row: grassmann::Chart,
}

impl Chart {
    /// Chart at the point `p = U G V^T`; only `U` and `V` matter.
    pub fn new(p: &RankRPoint) -> Result<Self> {
        Ok(Chart {
            col: grassmann::Chart::new(p.u().clone())?,
            row: grassmann::Chart::new(p.v().clone())?,
        })
    }

    pub(crate) fn from_parts(col: grassmann::Chart, row: grassmann::Chart) -> Self {
        Chart { col, row }
    }

    /// Grassmann chart of the column space (the `U` side).
    pub fn col_chart(&self) -> &grassmann::Chart {
        &self.col
    }

    /// Grassmann chart of the row space (the `V` side).
    pub fn row_chart(&self) -> &grassmann::Chart {
        &self.row
    }

    pub fn rows(&self) -> usize {
        self.col.ambient_dim()
    }

    pub fn cols(&self) -> usize {
        self.row.ambient_dim()
    }

    pub fn rank(&self) -> usize {
        self.col.subspace_dim()
    }

    /// Dimension of the coordinate space, `r (n + m - r)`.
    pub fn coord_dim(&self) -> usize {
        let (n, m, r) = (self.rows(), self.cols(), self.rank());
        r * (n + m - r)
    }

    /// Membership ratio `sigma_min / sigma_max` of `U^T A V`.
    pub fn membership_ratio(&self, a: &Matrix) -> f64 {
        let m = &(&self.col.center().transpose() * a) * self.row.center();
        sigma_ratio(&m)
    }

    fn check_shape(&self, a: &Matrix) -> Result<()> {
        if a.shape() != (self.rows(), self.cols()) {
            return Err(Error::DimensionMismatch {
                expected: (self.rows(), self.cols()),
                found: a.shape(),
            });
        }
        Ok(())
    }

    /// Chart map `theta_Z`. Distinguishes two failure modes: a wrong
    /// numerical rank (not on the manifold) and a singular `U^T A V`
    /// (on the manifold, outside this chart). Ratios inside the band
    /// `[GL_REL, NEAR_BOUNDARY_REL]` succeed with `near_boundary` set.
    pub fn apply(&self, a: &Matrix) -> Result<Coords> {
        self.check_shape(a)?;
        let r = self.rank();
        let got = numerical_rank(a, tol::RANK_REL).rank;
        if got != r {
            return Err(Error::RankMismatch {
                required: r,
                found: got,
            });
        }
        let ratio = self.membership_ratio(a);
        if ratio <= tol::GL_REL {
            return Err(Error::OutOfChartDomain { ratio });
        }

        let u_pinv_t = self.col.center_pinv().transpose();
        let v_pinv_t = self.row.center_pinv().transpose();

        // H = U^+ A (V^+)^T
        let h = &(self.col.center_pinv() * a) * &v_pinv_t;
        let h_inv = invert(&h).ok_or(Error::OutOfChartDomain { ratio })?;
        // X = U_perp^+ A (V^+)^T H^{-1}
        let x = &(&(self.col.complement_pinv() * a) * &v_pinv_t) * &h_inv;
        // Y = V_perp^+ A^T (U^+)^T H^{-T}
        let ht_inv = invert(&h.transpose()).ok_or(Error::OutOfChartDomain { ratio })?;
        let y = &(&(self.row.complement_pinv() * &a.transpose()) * &u_pinv_t) * &ht_inv;

        Ok(Coords {
            x,
            y,
            h,
            near_boundary: ratio <= tol::NEAR_BOUNDARY_REL,
        })
    }

    /// Inverse chart map `theta_Z^{-1}(X, Y, H) = (U + U_perp X) H (V + V_perp Y)^T`.
    pub fn inverse(&self, c: &Coords) -> Result<Matrix> {
        let r = self.rank();
        if c.x.shape() != self.col.coord_shape()
            || c.y.shape() != self.row.coord_shape()
            || c.h.shape() != (r, r)
        {
            return Err(Error::DimensionMismatch {
                expected: self.col.coord_shape(),
                found: c.x.shape(),
            });
        }
        let ratio = sigma_ratio(&c.h);
        if ratio <= tol::GL_REL {
            return Err(Error::SingularFactor { ratio });
        }
        let left = self.col.center() + &(self.col.complement() * &c.x);
        let right = self.row.center() + &(self.row.complement() * &c.y);
        Ok(&(&left * &c.h) * &right.transpose())
    }

    /// Fibre chart `chi_Z(A) = (col space, row space, H)`; its coordinate
    /// representation is the identity on `(X, Y, H)`.
    pub fn fiber_chart(
        &self,
        a: &Matrix,
    ) -> Result<(grassmann::Subspace, grassmann::Subspace, Matrix)> {
        let c = self.apply(a)?;
        let col_space = self.col.inverse(&c.x)?;
        let row_space = self.row.inverse(&c.y)?;
        Ok((col_space, row_space, c.h))
    }

    fn check_tangent_shapes(&self, t: &CoordTangent) -> Result<()> {
        let r = self.rank();
        if t.x_dot.shape() != self.col.coord_shape()
            || t.y_dot.shape() != self.row.coord_shape()
            || t.h_dot.shape() != (r, r)
        {
            return Err(Error::DimensionMismatch {
                expected: self.col.coord_shape(),
                found: t.x_dot.shape(),
            });
        }
        Ok(())
    }

    fn check_g_ref(&self, g_ref: &Matrix) -> Result<()> {
        let r = self.rank();
        if g_ref.shape() != (r, r) {
            return Err(Error::DimensionMismatch {
                expected: (r, r),
                found: g_ref.shape(),
            });
        }
        let ratio = sigma_ratio(g_ref);
        if ratio <= tol::GL_REL {
            return Err(Error::SingularFactor { ratio });
        }
        Ok(())
    }

    /// Tangent map of the inclusion at `U G_ref V^T`:
    /// `(X., Y., H.) -> U_perp X. G_ref V^T + U G_ref (V_perp Y.)^T + U H. V^T`.
    pub fn tangent_push(&self, g_ref: &Matrix, t: &CoordTangent) -> Result<Matrix> {
        self.check_g_ref(g_ref)?;
        self.check_tangent_shapes(t)?;
        let u = self.col.center();
        let vt = self.row.center().transpose();
        let horizontal_col = &(&(self.col.complement() * &t.x_dot) * g_ref) * &vt;
        let horizontal_row = &(u * g_ref) * &(self.row.complement() * &t.y_dot).transpose();
        let vertical = &(u * &t.h_dot) * &vt;
        Ok(&(&horizontal_col + &horizontal_row) + &vertical)
    }

    /// Inverse of the tangent map:
    /// `Z. -> (U_perp^+ Z. (V^+)^T G^{-1}, V_perp^+ Z.^T (U^+)^T G^{-T}, U^+ Z. (V^+)^T)`.
    pub fn tangent_pull(&self, g_ref: &Matrix, z_dot: &Matrix) -> Result<CoordTangent> {
        self.check_g_ref(g_ref)?;
        self.check_shape(z_dot)?;
        let g_inv = invert(g_ref).ok_or(Error::SingularFactor {
            ratio: sigma_ratio(g_ref),
        })?;
        let u_pinv_t = self.col.center_pinv().transpose();
        let v_pinv_t = self.row.center_pinv().transpose();
        let x_dot = &(&(self.col.complement_pinv() * z_dot) * &v_pinv_t) * &g_inv;
        let y_dot =
            &(&(self.row.complement_pinv() * &z_dot.transpose()) * &u_pinv_t) * &g_inv.transpose();
        let h_dot = &(self.col.center_pinv() * z_dot) * &v_pinv_t;
        Ok(CoordTangent { x_dot, y_dot, h_dot })
    }

    /// Splits an ambient tangent into the vertical part
    /// `U (U^+ Z. (V^+)^T) V^T` (fibre direction) and the horizontal
    /// remainder.
    pub fn tangent_split(&self, z_dot: &Matrix) -> (Matrix, Matrix) {
        assert_eq!(z_dot.shape(), (self.rows(), self.cols()));
        let core = &(self.col.center_pinv() * z_dot) * &self.row.center_pinv().transpose();
        let vertical = &(self.col.center() * &core) * &self.row.center().transpose();
        let horizontal = z_dot - &vertical;
        (vertical, horizontal)
    }

    /// Differential of the inclusion at arbitrary coordinates `(X, Y, H)`:
    ///
    /// ```text
    /// (U_perp X.) H (V + V_perp Y)^T + (U + U_perp X) H (V_perp Y.)^T
    ///                                + (U + U_perp X) H. (V + V_perp Y)^T
    /// ```
    pub fn differential(&self, c: &Coords, t: &CoordTangent) -> Matrix {
        let left = self.col.center() + &(self.col.complement() * &c.x);
        let right = self.row.center() + &(self.row.complement() * &c.y);
        let term_x = &(&(self.col.complement() * &t.x_dot) * &c.h) * &right.transpose();
        let term_y = &(&left * &c.h) * &(self.row.complement() * &t.y_dot).transpose();
        let term_h = &(&left * &t.h_dot) * &right.transpose();
        &(&term_x + &term_y) + &term_h
    }

    /// Group operation `A *_Z A' = theta_Z^{-1}(X + X', Y + Y', H H')`.
    pub fn group_op(&self, a: &Matrix, a_other: &Matrix) -> Result<Matrix> {
        let ca = self.apply(a)?;
        let cb = self.apply(a_other)?;
        self.inverse(&Coords::new(&ca.x + &cb.x, &ca.y + &cb.y, &ca.h * &cb.h))
    }

    /// Identity element of the local group: `theta_Z^{-1}(0, 0, id_r) = U V^T`.
    pub fn group_identity(&self) -> Matrix {
        self.col.center() * &self.row.center().transpose()
    }

    /// Group inverse `theta_Z^{-1}(-X, -Y, H^{-1})`.
    pub fn group_inverse(&self, a: &Matrix) -> Result<Matrix> {
        let c = self.apply(a)?;
        let h_inv = invert(&c.h).ok_or(Error::SingularFactor {
            ratio: sigma_ratio(&c.h),
        })?;
        self.inverse(&Coords::new(-&c.x, -&c.y, h_inv))
    }

    /// Lie group isomorphism
    /// `eta_Z(A) = (exp(U_perp X U^+), exp(V_perp Y V^+), H)`.
    pub fn group_iso(&self, a: &Matrix) -> Result<(Matrix, Matrix, Matrix)> {
        let c = self.apply(a)?;
        Ok((self.col.lie_exp(&c.x), self.row.lie_exp(&c.y), c.h))
    }

    /// Transition map into `other`.
    pub fn transition_to(&self, other: &Chart, c: &Coords) -> Result<Coords> {
        other.apply(&self.inverse(c)?)
    }
}
