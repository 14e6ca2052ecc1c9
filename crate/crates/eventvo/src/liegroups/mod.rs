//! SO(3)/SE(3) operations and Jacobians.
//!
//! Conventions used throughout the crate:
//! - A [`Twist`] is an element of se(3) stored as `[rho; phi]` with the
//!   translational part first and the rotational part last.
//! - Poses transform vectors from the body frame to the world frame and are
//!   perturbed on the right: `T <- T * exp(delta)`.
//! - `hat` maps a twist to its 4x4 matrix form `[[phi^, rho], [0, 0]]`.
//!
//! Trigonometric coefficients switch to Taylor expansions below angle
//! thresholds chosen so that the two branches agree to better than 1e-12 at
//! the switch point; the thresholds differ per coefficient because the
//! cancellation error of the closed forms differs (see `coeffs`).

mod coeffs;
pub mod series;

use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector6};
use thiserror::Error;

use coeffs::{RotCoeffs, EPS_ANGLE};

/// Rotation angle beyond which `log` refuses to operate.
pub const MAX_LOG_ANGLE: f64 = std::f64::consts::PI - 1e-6;

#[derive(Debug, Error)]
pub enum LieError {
    #[error("rotation angle {0} too close to pi for a well-defined logarithm")]
    AngleNearPi(f64),
    #[error("matrix is not a valid twist: {0}")]
    NotATwist(&'static str),
}

/// Skew-symmetric matrix of a 3-vector: `skew(v) * w == v.cross(&w)`.
#[inline]
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

#[inline]
fn unskew(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// A 3x3 rotation matrix, orthonormal with positive determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    /// Wraps a matrix without validation; callers guarantee orthonormality.
    pub fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Rotation(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    /// Rodrigues formula; total on all finite inputs.
    pub fn exp(phi: &Vector3<f64>) -> Rotation {
        let c = RotCoeffs::for_angle(phi.norm());
        let k = skew(phi);
        Rotation(Matrix3::identity() + c.a * k + c.b * (k * k))
    }

    /// Rotation angle in `[0, pi]`.
    pub fn angle(&self) -> f64 {
        let two_sin = unskew(&(self.0 - self.0.transpose())).norm();
        let two_cos = self.0.trace() - 1.0;
        (two_sin / 2.0).atan2(two_cos / 2.0).max(0.0)
    }

    /// Logarithm to a rotation vector. Errors within 1e-6 of a half turn,
    /// where the axis becomes numerically ill-determined from the
    /// antisymmetric part alone.
    pub fn log(&self) -> Result<Vector3<f64>, LieError> {
        let theta = self.angle();
        if theta >= MAX_LOG_ANGLE {
            return Err(LieError::AngleNearPi(theta));
        }
        let axial = unskew(&(self.0 - self.0.transpose())) / 2.0; // sin(theta) * axis
        if theta < EPS_ANGLE {
            // theta/sin(theta) = 1 + theta^2/6 + 7 theta^4/360 + O(theta^6)
            let t2 = theta * theta;
            return Ok(axial * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0));
        }
        if theta > 3.0 {
            // Near pi the antisymmetric part loses the axis; recover it from
            // the symmetric part, which is O(1) conditioned there:
            // (R + R^T)/2 = cos(t) I + (1 - cos(t)) a a^T.
            let cos_t = ((self.0.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
            let outer =
                ((self.0 + self.0.transpose()) / 2.0 - Matrix3::identity() * cos_t) / (1.0 - cos_t);
            let diag = Vector3::new(
                outer[(0, 0)].max(0.0),
                outer[(1, 1)].max(0.0),
                outer[(2, 2)].max(0.0),
            );
            let pivot = diag.imax();
            let mut axis = Vector3::zeros();
            axis[pivot] = diag[pivot].sqrt();
            for j in 0..3 {
                if j != pivot {
                    axis[j] = outer[(pivot, j)] / axis[pivot];
                }
            }
            let axis = axis.normalize();
            let axis = if axis.dot(&axial) < 0.0 { -axis } else { axis };
            return Ok(axis * theta);
        }
        Ok(axial * (theta / theta.sin()))
    }

    /// Re-orthonormalizes via one polar-decomposition Newton step followed by
    /// Gram-Schmidt cleanup; adequate for drift accumulated over solver steps.
    pub fn normalize(&mut self) {
        // Newton iteration for the polar factor: R <- 1.5 R - 0.5 R R^T R.
        let r = self.0;
        let r = r * 1.5 - r * (r.transpose() * r) * 0.5;
        let x = r.column(0).normalize();
        let z = x.cross(&r.column(1).into_owned()).normalize();
        let y = z.cross(&x);
        self.0 = Matrix3::from_columns(&[x, y, z]);
    }

    pub fn orthonormality_error(&self) -> f64 {
        (self.0 * self.0.transpose() - Matrix3::identity()).norm()
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.orthonormality_error() < tol && (self.0.determinant() - 1.0).abs() < tol
    }
}

impl std::ops::Mul for Rotation {
    type Output = Rotation;
    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl std::ops::Mul<&Vector3<f64>> for Rotation {
    type Output = Vector3<f64>;
    fn mul(self, rhs: &Vector3<f64>) -> Vector3<f64> {
        self.0 * rhs
    }
}

/// A twist `[rho; phi]`: translational part first, rotational part last.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist(pub Vector6<f64>);

impl Twist {
    pub fn zero() -> Self {
        Twist(Vector6::zeros())
    }

    pub fn new(rho: Vector3<f64>, phi: Vector3<f64>) -> Self {
        let mut v = Vector6::zeros();
        v.fixed_rows_mut::<3>(0).copy_from(&rho);
        v.fixed_rows_mut::<3>(3).copy_from(&phi);
        Twist(v)
    }

    pub fn from_vector(v: Vector6<f64>) -> Self {
        Twist(v)
    }

    pub fn as_vector(&self) -> &Vector6<f64> {
        &self.0
    }

    pub fn rho(&self) -> Vector3<f64> {
        self.0.fixed_rows::<3>(0).into_owned()
    }

    pub fn phi(&self) -> Vector3<f64> {
        self.0.fixed_rows::<3>(3).into_owned()
    }

    /// 4x4 matrix form `[[phi^, rho], [0, 0]]`.
    pub fn hat(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&skew(&self.phi()));
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.rho());
        m
    }

    /// Inverse of [`Twist::hat`]. Rejects matrices that are not of the
    /// twist shape (non-skew rotational block or nonzero bottom row).
    pub fn vee(m: &Matrix4<f64>) -> Result<Twist, LieError> {
        let tol = 1e-12;
        for j in 0..4 {
            if m[(3, j)].abs() > tol {
                return Err(LieError::NotATwist("bottom row must be zero"));
            }
        }
        let top = m.fixed_view::<3, 3>(0, 0).into_owned();
        if (top + top.transpose()).norm() > tol {
            return Err(LieError::NotATwist("rotational block must be skew-symmetric"));
        }
        Ok(Twist::new(m.fixed_view::<3, 1>(0, 3).into_owned(), unskew(&top)))
    }

    /// Adjoint action of the algebra on itself: `ad = [[phi^, rho^], [0, phi^]]`.
    pub fn ad(&self) -> Matrix6<f64> {
        let mut m = Matrix6::zeros();
        let p = skew(&self.phi());
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&p);
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&p);
        m.fixed_view_mut::<3, 3>(0, 3).copy_from(&skew(&self.rho()));
        m
    }

    /// Right Jacobian of the exponential map: to first order,
    /// `exp(xi + d) ~= exp(xi) * exp(J_r(xi) d)`.
    ///
    /// Accurate for rotational magnitude below pi; series branches activate
    /// automatically for small angles.
    pub fn right_jacobian(&self) -> Matrix6<f64> {
        se3_jacobian(&-*self)
    }

    /// Closed-form inverse of [`Twist::right_jacobian`].
    pub fn right_jacobian_inv(&self) -> Matrix6<f64> {
        se3_jacobian_inv(&-*self)
    }

    /// Left Jacobian: `exp(xi + d) ~= exp(J_l(xi) d) * exp(xi)`.
    pub fn left_jacobian(&self) -> Matrix6<f64> {
        se3_jacobian(self)
    }

    pub fn left_jacobian_inv(&self) -> Matrix6<f64> {
        se3_jacobian_inv(self)
    }
}

impl std::ops::Neg for Twist {
    type Output = Twist;
    fn neg(self) -> Twist {
        Twist(-self.0)
    }
}

impl std::ops::Add for Twist {
    type Output = Twist;
    fn add(self, rhs: Twist) -> Twist {
        Twist(self.0 + rhs.0)
    }
}

impl std::ops::Mul<Twist> for f64 {
    type Output = Twist;
    fn mul(self, rhs: Twist) -> Twist {
        Twist(rhs.0 * self)
    }
}

/// SO(3) right Jacobian of a rotation vector.
pub fn so3_right_jacobian(phi: &Vector3<f64>) -> Matrix3<f64> {
    let c = RotCoeffs::for_angle(phi.norm());
    let k = skew(phi);
    Matrix3::identity() - c.b * k + c.c * (k * k)
}

/// Closed-form inverse of [`so3_right_jacobian`].
pub fn so3_right_jacobian_inv(phi: &Vector3<f64>) -> Matrix3<f64> {
    let c = RotCoeffs::for_angle(phi.norm());
    let k = skew(phi);
    Matrix3::identity() + 0.5 * k + c.d * (k * k)
}

fn so3_left_jacobian(phi: &Vector3<f64>) -> Matrix3<f64> {
    so3_right_jacobian(&-phi)
}

fn so3_left_jacobian_inv(phi: &Vector3<f64>) -> Matrix3<f64> {
    so3_right_jacobian_inv(&-phi)
}

/// Coupling block of the 6x6 SE(3) left Jacobian.
fn se3_q_block(rho: &Vector3<f64>, phi: &Vector3<f64>) -> Matrix3<f64> {
    let c = RotCoeffs::for_angle(phi.norm());
    let r = skew(rho);
    let p = skew(phi);
    let pr = p * r;
    let rp = r * p;
    let prp = pr * p;
    let m2 = pr + rp + p * rp;
    let m3 = p * pr + rp * p - 3.0 * prp;
    let m4 = prp * p + p * prp;
    0.5 * r + c.c * m2 + c.q3 * m3 + c.q4 * m4
}

/// 6x6 SE(3) left Jacobian in block form `[[J, Q], [0, J]]`.
fn se3_jacobian(xi: &Twist) -> Matrix6<f64> {
    let rho = xi.rho();
    let phi = xi.phi();
    let j = so3_left_jacobian(&phi);
    let q = se3_q_block(&rho, &phi);
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&j);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&j);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&q);
    m
}

fn se3_jacobian_inv(xi: &Twist) -> Matrix6<f64> {
    let rho = xi.rho();
    let phi = xi.phi();
    let jinv = so3_left_jacobian_inv(&phi);
    let q = se3_q_block(&rho, &phi);
    let off = -jinv * q * jinv;
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&jinv);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&jinv);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&off);
    m
}

/// Rigid body transform from body to world frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Rotation,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: Rotation::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Rotation, translation: Vector3<f64>) -> Self {
        Pose { rotation, translation }
    }

    /// Exponential map from a twist; total on all finite inputs.
    pub fn exp(xi: &Twist) -> Pose {
        let phi = xi.phi();
        Pose {
            rotation: Rotation::exp(&phi),
            translation: so3_left_jacobian(&phi) * xi.rho(),
        }
    }

    /// Logarithm; errors when the rotation angle is within 1e-6 of pi.
    pub fn log(&self) -> Result<Twist, LieError> {
        let phi = self.rotation.log()?;
        let rho = so3_left_jacobian_inv(&phi) * self.translation;
        Ok(Twist::new(rho, phi))
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose {
            rotation: rt,
            translation: -(rt * &self.translation),
        }
    }

    /// Applies the transform to a point.
    pub fn act(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(self.rotation.matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Adjoint `Ad(T)` with the `[rho; phi]` ordering:
    /// `[[R, t^ R], [0, R]]`.
    pub fn adjoint(&self) -> Matrix6<f64> {
        let r = self.rotation.matrix();
        let mut m = Matrix6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(r);
        m.fixed_view_mut::<3, 3>(0, 3).copy_from(&(skew(&self.translation) * r));
        m
    }

    pub fn normalize(&mut self) {
        self.rotation.normalize();
    }
}

impl std::ops::Mul for Pose {
    type Output = Pose;
    fn mul(self, rhs: Pose) -> Pose {
        Pose {
            rotation: self.rotation * rhs.rotation,
            translation: self.rotation * &rhs.translation + self.translation,
        }
    }
}

#[cfg(test)]
mod tests;
