//! White-noise-on-acceleration motion prior on SE(3).
//!
//! The continuous trajectory is parameterized by knots `{T, varpi}` (pose and
//! body-frame generalized velocity). Between two knots the body acceleration
//! is modeled as white noise with power spectral density `Qc`, which yields
//! the constant-velocity transition matrix, the polynomial process
//! covariance, a two-knot prior residual, and closed-form interpolation of
//! the state at any time inside the interval.
//!
//! Local perturbations are 12-vectors `[delta_xi; delta_varpi]` with the pose
//! perturbed on the right: `T <- T * exp(delta_xi)`.

use nalgebra::{Cholesky, Const, Matrix6, SMatrix, SVector, Vector6};
use thiserror::Error;

use crate::liegroups::series::inv_right_jacobian_deriv;
use crate::liegroups::{LieError, Pose, Twist};

pub type Mat12 = SMatrix<f64, 12, 12>;
pub type Vec12 = SVector<f64, 12>;
pub type Mat6x12 = SMatrix<f64, 6, 12>;

#[derive(Debug, Error)]
pub enum GpError {
    #[error("time step must be positive, got {0}")]
    NonPositiveDt(f64),
    #[error("time step must be non-negative, got {0}")]
    NegativeDt(f64),
    #[error("knot timestamps must be strictly increasing ({0} then {1})")]
    NonIncreasingTimes(f64, f64),
    #[error("query time {t} outside knot interval [{t0}, {t1}]")]
    OutsideInterval { t: f64, t0: f64, t1: f64 },
    #[error("power spectral density must be symmetric positive definite")]
    PsdNotSpd,
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Power spectral density of the white-noise body acceleration.
#[derive(Debug, Clone)]
pub struct ProcessNoise {
    psd: Matrix6<f64>,
}

impl ProcessNoise {
    /// Diagonal PSD from translational and rotational noise densities
    /// (`m/s^1.5` and `rad/s^1.5`).
    pub fn isotropic(sigma_accel: f64, sigma_alpha: f64) -> ProcessNoise {
        let mut psd = Matrix6::zeros();
        for i in 0..3 {
            psd[(i, i)] = sigma_accel * sigma_accel;
            psd[(i + 3, i + 3)] = sigma_alpha * sigma_alpha;
        }
        ProcessNoise { psd }
    }

    pub fn from_matrix(psd: Matrix6<f64>) -> Result<ProcessNoise, GpError> {
        if (psd - psd.transpose()).amax() > 1e-12 || Cholesky::new(psd).is_none() {
            return Err(GpError::PsdNotSpd);
        }
        Ok(ProcessNoise { psd })
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.psd
    }
}

/// Trajectory knot: pose (body to world) and body-frame velocity at a time.
#[derive(Debug, Clone, Copy)]
pub struct MotionState {
    pub t: f64,
    pub pose: Pose,
    pub velocity: Twist,
}

impl MotionState {
    pub fn new(t: f64, pose: Pose, velocity: Twist) -> Self {
        MotionState { t, pose, velocity }
    }

    /// Applies a local perturbation `[delta_xi; delta_varpi]`.
    pub fn retract(&self, delta: &Vec12) -> MotionState {
        let dxi = Twist::from_vector(delta.fixed_rows::<6>(0).into_owned());
        MotionState {
            t: self.t,
            pose: self.pose * Pose::exp(&dxi),
            velocity: Twist(self.velocity.0 + delta.fixed_rows::<6>(6).into_owned()),
        }
    }
}

/// Local linear state `[xi; xi_dot]` in the tangent frame of the left knot.
#[derive(Debug, Clone, Copy)]
pub struct LocalState {
    pub xi: Twist,
    pub xi_dot: Twist,
}

/// Constant-velocity transition matrix `[[I, dt I], [0, I]]`.
pub fn transition(dt: f64) -> Result<Mat12, GpError> {
    if dt < 0.0 {
        return Err(GpError::NegativeDt(dt));
    }
    Ok(transition_unchecked(dt))
}

fn transition_unchecked(dt: f64) -> Mat12 {
    let mut m = Mat12::identity();
    for i in 0..6 {
        m[(i, i + 6)] = dt;
    }
    m
}

/// Process covariance of the white-noise-on-acceleration model:
/// `[[dt^3/3 Qc, dt^2/2 Qc], [dt^2/2 Qc, dt Qc]]`. Symmetric by
/// construction; positive definite for `dt > 0`.
pub fn process_cov(dt: f64, qc: &ProcessNoise) -> Result<Mat12, GpError> {
    if dt <= 0.0 {
        return Err(GpError::NonPositiveDt(dt));
    }
    Ok(process_cov_unchecked(dt, qc))
}

fn process_cov_unchecked(dt: f64, qc: &ProcessNoise) -> Mat12 {
    let q = &qc.psd;
    let mut m = Mat12::zeros();
    let c00 = dt * dt * dt / 3.0;
    let c01 = dt * dt / 2.0;
    let off = *q * c01;
    m.fixed_view_mut::<6, 6>(0, 0).copy_from(&(*q * c00));
    m.fixed_view_mut::<6, 6>(0, 6).copy_from(&off);
    m.fixed_view_mut::<6, 6>(6, 0).copy_from(&off);
    m.fixed_view_mut::<6, 6>(6, 6).copy_from(&(*q * dt));
    m
}

/// Motion-prior residual between two knots and its Jacobians.
pub struct PriorResidual {
    /// `[dt varpi_k - xi; varpi_k - J_r(xi)^-1 varpi_k1]`
    pub residual: Vec12,
    /// With respect to the left knot's `[delta_xi; delta_varpi]`.
    pub jac_k: Mat12,
    /// With respect to the right knot's perturbation.
    pub jac_k1: Mat12,
}

/// Evaluates the two-knot prior residual. The residual is unwhitened; the
/// solver weights it by the inverse process covariance over the interval.
pub fn prior_residual(xk: &MotionState, xk1: &MotionState) -> Result<PriorResidual, GpError> {
    if xk1.t <= xk.t {
        return Err(GpError::NonIncreasingTimes(xk.t, xk1.t));
    }
    let dt = xk1.t - xk.t;
    let rel = xk.pose.inverse() * xk1.pose;
    let xi = rel.log()?;
    let jr_inv = xi.right_jacobian_inv();
    let jl_inv = xi.left_jacobian_inv();
    let w_k = xk.velocity.0;
    let w_k1 = xk1.velocity.0;

    let mut residual = Vec12::zeros();
    residual.fixed_rows_mut::<6>(0).copy_from(&(w_k * dt - xi.0));
    residual.fixed_rows_mut::<6>(6).copy_from(&(w_k - jr_inv * w_k1));

    // d xi / d delta_xi_k = -J_l(xi)^-1, d xi / d delta_xi_k1 = J_r(xi)^-1
    let dxi_k = -jl_inv;
    let dxi_k1 = jr_inv;
    // derivative of J_r(xi)^-1 w_k1 with respect to xi
    let h = inv_right_jacobian_deriv(&xi, &w_k1);

    let mut jac_k = Mat12::zeros();
    jac_k.fixed_view_mut::<6, 6>(0, 0).copy_from(&(-dxi_k));
    jac_k
        .fixed_view_mut::<6, 6>(0, 6)
        .copy_from(&(Matrix6::identity() * dt));
    jac_k.fixed_view_mut::<6, 6>(6, 0).copy_from(&(-(h * dxi_k)));
    jac_k
        .fixed_view_mut::<6, 6>(6, 6)
        .copy_from(&Matrix6::identity());

    let mut jac_k1 = Mat12::zeros();
    jac_k1.fixed_view_mut::<6, 6>(0, 0).copy_from(&(-dxi_k1));
    jac_k1.fixed_view_mut::<6, 6>(6, 0).copy_from(&(-(h * dxi_k1)));
    jac_k1.fixed_view_mut::<6, 6>(6, 6).copy_from(&(-jr_inv));

    Ok(PriorResidual { residual, jac_k, jac_k1 })
}

/// Interpolation result: global state, local state, and the Jacobians of the
/// local state and of the interpolated pose with respect to each knot's
/// 12-dof perturbation.
pub struct Interpolated {
    pub state: MotionState,
    pub local: LocalState,
    pub local_jac_k: Mat12,
    pub local_jac_k1: Mat12,
    /// Right-perturbation of the interpolated pose per knot perturbation.
    pub pose_jac_k: Mat6x12,
    pub pose_jac_k1: Mat6x12,
}

/// Shared per-interval quantities for interpolating at many times between
/// the same pair of knots.
pub struct InterpSupport {
    t0: f64,
    t1: f64,
    pose_k: Pose,
    jr_inv: Matrix6<f64>,
    gamma_k: Vec12,
    gamma_k1: Vec12,
    dxi_k: Matrix6<f64>,
    dxi_k1: Matrix6<f64>,
    h: Matrix6<f64>,
    qc: ProcessNoise,
    q_interval: Mat12,
    chol: Cholesky<f64, Const<12>>,
    phi_interval: Mat12,
}

impl InterpSupport {
    pub fn new(xk: &MotionState, xk1: &MotionState, qc: &ProcessNoise) -> Result<Self, GpError> {
        if xk1.t <= xk.t {
            return Err(GpError::NonIncreasingTimes(xk.t, xk1.t));
        }
        let dt = xk1.t - xk.t;
        let rel = xk.pose.inverse() * xk1.pose;
        let xi = rel.log()?;
        let jr_inv = xi.right_jacobian_inv();
        let u = jr_inv * xk1.velocity.0;

        let mut gamma_k = Vec12::zeros();
        gamma_k.fixed_rows_mut::<6>(6).copy_from(&xk.velocity.0);
        let mut gamma_k1 = Vec12::zeros();
        gamma_k1.fixed_rows_mut::<6>(0).copy_from(&xi.0);
        gamma_k1.fixed_rows_mut::<6>(6).copy_from(&u);

        let q_interval = process_cov_unchecked(dt, qc);
        let chol = Cholesky::new(q_interval).ok_or(GpError::PsdNotSpd)?;

        Ok(InterpSupport {
            t0: xk.t,
            t1: xk1.t,
            pose_k: xk.pose,
            jr_inv,
            gamma_k,
            gamma_k1,
            dxi_k: -xi.left_jacobian_inv(),
            dxi_k1: jr_inv,
            h: inv_right_jacobian_deriv(&xi, &xk1.velocity.0),
            qc: qc.clone(),
            q_interval,
            chol,
            phi_interval: transition_unchecked(dt),
        })
    }

    /// Blending matrices of the two boundary local states at time `t`.
    pub fn blend(&self, t: f64) -> Result<(Mat12, Mat12), GpError> {
        if t < self.t0 || t > self.t1 {
            return Err(GpError::OutsideInterval { t, t0: self.t0, t1: self.t1 });
        }
        let tau = t - self.t0;
        let q_tau = if tau > 0.0 {
            process_cov_unchecked(tau, &self.qc)
        } else {
            Mat12::zeros()
        };
        let phi_rest = transition_unchecked(self.t1 - t);
        // psi = Q_tau Phi(t1 - t)^T Q_interval^-1, via the Cholesky factor
        let psi = self.chol.solve(&(phi_rest * q_tau)).transpose();
        let lambda = transition_unchecked(tau) - psi * self.phi_interval;
        Ok((lambda, psi))
    }

    pub fn q_interval(&self) -> &Mat12 {
        &self.q_interval
    }

    /// Interpolates the state at `t`, with Jacobians.
    pub fn at(&self, t: f64) -> Result<Interpolated, GpError> {
        let (lambda, psi) = self.blend(t)?;
        let gamma = lambda * self.gamma_k + psi * self.gamma_k1;
        let xi_t = Twist::from_vector(gamma.fixed_rows::<6>(0).into_owned());
        let xi_dot_t = Twist::from_vector(gamma.fixed_rows::<6>(6).into_owned());

        let pose = self.pose_k * Pose::exp(&xi_t);
        let jr_xi_t = xi_t.right_jacobian();
        let velocity = Twist(jr_xi_t * xi_dot_t.0);

        let lambda12 = lambda.fixed_view::<6, 6>(0, 6).into_owned();
        let lambda22 = lambda.fixed_view::<6, 6>(6, 6).into_owned();
        let psi11 = psi.fixed_view::<6, 6>(0, 0).into_owned();
        let psi12 = psi.fixed_view::<6, 6>(0, 6).into_owned();
        let psi21 = psi.fixed_view::<6, 6>(6, 0).into_owned();
        let psi22 = psi.fixed_view::<6, 6>(6, 6).into_owned();

        // gamma_k1 = [xi; J_r(xi)^-1 w_k1]; chain its dependence on the knots
        let s_top = psi11 + psi12 * self.h;
        let s_bot = psi21 + psi22 * self.h;

        let mut local_jac_k = Mat12::zeros();
        local_jac_k
            .fixed_view_mut::<6, 6>(0, 0)
            .copy_from(&(s_top * self.dxi_k));
        local_jac_k.fixed_view_mut::<6, 6>(0, 6).copy_from(&lambda12);
        local_jac_k
            .fixed_view_mut::<6, 6>(6, 0)
            .copy_from(&(s_bot * self.dxi_k));
        local_jac_k.fixed_view_mut::<6, 6>(6, 6).copy_from(&lambda22);

        let mut local_jac_k1 = Mat12::zeros();
        local_jac_k1
            .fixed_view_mut::<6, 6>(0, 0)
            .copy_from(&(s_top * self.dxi_k1));
        local_jac_k1
            .fixed_view_mut::<6, 6>(0, 6)
            .copy_from(&(psi12 * self.jr_inv));
        local_jac_k1
            .fixed_view_mut::<6, 6>(6, 0)
            .copy_from(&(s_bot * self.dxi_k1));
        local_jac_k1
            .fixed_view_mut::<6, 6>(6, 6)
            .copy_from(&(psi22 * self.jr_inv));

        // Right-perturbation of the interpolated pose:
        // T(t) = T_k exp(xi_t) gives
        // dzeta = Ad(exp(-xi_t)) dxi_k + J_r(xi_t) dxi_t.
        let ad_term = Pose::exp(&-xi_t).adjoint();
        let mut pose_jac_k: Mat6x12 = jr_xi_t * local_jac_k.fixed_view::<6, 12>(0, 0);
        let left = pose_jac_k.fixed_view::<6, 6>(0, 0).into_owned() + ad_term;
        pose_jac_k.fixed_view_mut::<6, 6>(0, 0).copy_from(&left);
        let pose_jac_k1: Mat6x12 = jr_xi_t * local_jac_k1.fixed_view::<6, 12>(0, 0);

        Ok(Interpolated {
            state: MotionState { t, pose, velocity },
            local: LocalState { xi: xi_t, xi_dot: xi_dot_t },
            local_jac_k,
            local_jac_k1,
            pose_jac_k,
            pose_jac_k1,
        })
    }
}

/// One-off interpolation between two knots.
pub fn interpolate(
    xk: &MotionState,
    xk1: &MotionState,
    qc: &ProcessNoise,
    t: f64,
) -> Result<Interpolated, GpError> {
    InterpSupport::new(xk, xk1, qc)?.at(t)
}
