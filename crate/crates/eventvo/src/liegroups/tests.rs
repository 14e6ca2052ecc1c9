use super::series::{inv_right_jacobian_deriv, inv_right_jacobian_series, left_jacobian_series};
use super::*;
use crate::testutil::{random_twist, rng};
use nalgebra::{Matrix4, Matrix6, Vector3, Vector6};
use rand::prelude::*;

/// Truncated power series of the 4x4 matrix exponential.
fn matrix_exp_series(m: &Matrix4<f64>, terms: usize) -> Matrix4<f64> {
    let mut sum = Matrix4::identity();
    let mut power = Matrix4::identity();
    let mut fact = 1.0;
    for n in 1..=terms {
        power *= m;
        fact *= n as f64;
        sum += power / fact;
    }
    sum
}

/// Rotation matrix built from a unit quaternion; independent route to the
/// same rotation for use as a log oracle.
fn quaternion_rotation(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let a = axis.normalize();
    let (s, c) = ((angle / 2.0).sin(), (angle / 2.0).cos());
    let (w, x, y, z) = (c, s * a.x, s * a.y, s * a.z);
    Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

#[test]
fn exp_zero_is_identity() {
    let t = Pose::exp(&Twist::zero());
    assert!((t.matrix() - Matrix4::identity()).norm() < 1e-15);
}

#[test]
fn exp_pure_translation() {
    let t = Pose::exp(&Twist::new(Vector3::new(1.0, 0.0, 0.0), Vector3::zeros()));
    assert_eq!(t.translation, Vector3::new(1.0, 0.0, 0.0));
    assert!((t.rotation.matrix() - Matrix3::identity()).norm() < 1e-15);
}

#[test]
fn exp_matches_matrix_exponential_series() {
    let xi = Twist::new(Vector3::zeros(), Vector3::new(0.0, 0.0, std::f64::consts::FRAC_PI_2));
    let expected = matrix_exp_series(&xi.hat(), 20);
    let got = Pose::exp(&xi).matrix();
    assert!((got - expected).amax() < 1e-10, "amax {}", (got - expected).amax());

    let mut r = rng(7);
    for _ in 0..20 {
        let xi = random_twist(&mut r, 1.0, 1.0);
        let expected = matrix_exp_series(&xi.hat(), 30);
        let got = Pose::exp(&xi).matrix();
        assert!((got - expected).amax() < 1e-12);
    }
}

#[test]
fn log_identity_is_zero() {
    assert!(Pose::identity().log().unwrap().0.norm() < 1e-15);
}

#[test]
fn log_roundtrip_random() {
    let mut r = rng(11);
    for _ in 0..200 {
        let xi = random_twist(&mut r, 1.0, 1.0);
        let back = Pose::exp(&xi).log().unwrap();
        assert!((back.0 - xi.0).norm() < 1e-9);
    }
}

#[test]
fn log_large_angle_matches_quaternion_oracle() {
    let mut r = rng(13);
    for _ in 0..50 {
        let axis = Vector3::new(
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
        )
        .normalize();
        let angle = 0.9 * std::f64::consts::PI;
        let rot = Rotation::from_matrix_unchecked(quaternion_rotation(&axis, angle));
        let phi = rot.log().unwrap();
        assert!((phi - axis * angle).norm() < 1e-8, "err {}", (phi - axis * angle).norm());
    }
}

#[test]
fn log_near_pi_stable_branch() {
    let mut r = rng(17);
    for _ in 0..50 {
        let axis = Vector3::new(
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
        )
        .normalize();
        let angle = std::f64::consts::PI - 1e-4;
        let rot = Rotation::exp(&(axis * angle));
        let phi = rot.log().unwrap();
        assert!((phi - axis * angle).norm() < 1e-7);
    }
}

#[test]
fn log_rejects_half_turn() {
    let rot = Rotation::exp(&Vector3::new(std::f64::consts::PI, 0.0, 0.0));
    let pose = Pose::new(rot, Vector3::zeros());
    assert!(matches!(pose.log(), Err(LieError::AngleNearPi(_))));
}

#[test]
fn hat_vee_roundtrip_basis() {
    for i in 0..6 {
        let mut v = Vector6::zeros();
        v[i] = 1.0;
        let xi = Twist(v);
        let back = Twist::vee(&xi.hat()).unwrap();
        assert_eq!(back.0, xi.0);
    }
}

#[test]
fn vee_rejects_malformed() {
    let mut m = Matrix4::zeros();
    m[(3, 0)] = 1.0;
    assert!(Twist::vee(&m).is_err());
    let mut m = Matrix4::zeros();
    m[(0, 0)] = 1.0; // not skew
    assert!(Twist::vee(&m).is_err());
}

#[test]
fn right_jacobian_at_zero_is_identity() {
    let j = Twist::zero().right_jacobian();
    assert!((j - Matrix6::identity()).norm() < 1e-15);
}

#[test]
fn right_jacobian_times_inverse_is_identity() {
    let mut r = rng(19);
    for _ in 0..100 {
        let xi = random_twist(&mut r, 2.0, 2.0);
        let prod = xi.right_jacobian() * xi.right_jacobian_inv();
        assert!((prod - Matrix6::identity()).norm() < 1e-9);
    }
}

#[test]
fn jacobians_match_adjoint_series() {
    let mut r = rng(23);
    for _ in 0..50 {
        let xi = random_twist(&mut r, 1.5, 1.2);
        let jl = xi.left_jacobian();
        assert!((jl - left_jacobian_series(&xi)).amax() < 1e-12);
        let jr_inv = xi.right_jacobian_inv();
        assert!((jr_inv - inv_right_jacobian_series(&xi)).amax() < 1e-11);
    }
}

/// Finite-difference oracle for the right Jacobian:
/// column j of J_r(xi) is d/de log(exp(xi)^-1 exp(xi + e e_j)).
#[test]
fn right_jacobian_matches_finite_differences() {
    let mut r = rng(29);
    let h = 1e-6;
    for _ in 0..100 {
        let xi = random_twist(&mut r, 1.0, 1.0);
        let j = xi.right_jacobian();
        let t_inv = Pose::exp(&xi).inverse();
        for col in 0..6 {
            let mut dp = xi.0;
            dp[col] += h;
            let mut dm = xi.0;
            dm[col] -= h;
            let fp = (t_inv * Pose::exp(&Twist(dp))).log().unwrap();
            let fm = (t_inv * Pose::exp(&Twist(dm))).log().unwrap();
            let fd = (fp.0 - fm.0) / (2.0 * h);
            let ana = j.column(col).into_owned();
            let rel = (fd - ana).norm() / ana.norm().max(1.0);
            assert!(rel < 1e-5, "col {col} rel {rel}");
        }
    }
}

#[test]
fn inv_right_jacobian_deriv_matches_finite_differences() {
    let mut r = rng(31);
    let h = 1e-6;
    for _ in 0..40 {
        let xi = random_twist(&mut r, 1.0, 1.0);
        let w = random_twist(&mut r, 1.0, 1.0).0;
        let ana = inv_right_jacobian_deriv(&xi, &w);
        for col in 0..6 {
            let mut dp = xi.0;
            dp[col] += h;
            let mut dm = xi.0;
            dm[col] -= h;
            let fp = Twist(dp).right_jacobian_inv() * w;
            let fm = Twist(dm).right_jacobian_inv() * w;
            let fd = (fp - fm) / (2.0 * h);
            let rel = (fd - ana.column(col)).norm() / w.norm().max(1.0);
            assert!(rel < 1e-6, "col {col} rel {rel}");
        }
    }
}

#[test]
fn normalize_restores_orthonormality() {
    let mut rot = Rotation::exp(&Vector3::new(0.3, -0.8, 0.5));
    // inject drift
    let mut m = *rot.matrix();
    m[(0, 0)] += 1e-7;
    m[(1, 2)] -= 1e-7;
    rot = Rotation::from_matrix_unchecked(m);
    assert!(rot.orthonormality_error() > 1e-8);
    rot.normalize();
    assert!(rot.orthonormality_error() < 1e-13);
}

#[test]
fn compose_log_exp_consistency() {
    let mut r = rng(37);
    for _ in 0..100 {
        let a = Pose::exp(&random_twist(&mut r, 1.0, 0.8));
        let b = Pose::exp(&random_twist(&mut r, 1.0, 0.8));
        let ab = a * b;
        if let Ok(xi) = ab.log() {
            let back = Pose::exp(&xi);
            assert!((back.matrix() - ab.matrix()).amax() < 1e-9);
        }
    }
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn twist_strategy() -> impl Strategy<Value = Twist> {
        // rotational magnitude capped below pi - 0.1
        (
            prop::array::uniform3(-5.0f64..5.0),
            prop::array::uniform3(-1.0f64..1.0),
            0.0f64..(std::f64::consts::PI - 0.1),
        )
            .prop_map(|(rho, axis, angle)| {
                let ax = Vector3::new(axis[0], axis[1], axis[2]);
                let phi = if ax.norm() < 1e-9 {
                    Vector3::zeros()
                } else {
                    ax.normalize() * angle
                };
                Twist::new(Vector3::new(rho[0], rho[1], rho[2]), phi)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn exp_log_roundtrip(xi in twist_strategy()) {
            let back = Pose::exp(&xi).log().unwrap();
            prop_assert!((back.0 - xi.0).norm() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn product_log_exp(a in twist_strategy(), b in twist_strategy()) {
            let ab = Pose::exp(&a) * Pose::exp(&b);
            if let Ok(xi) = ab.log() {
                let back = Pose::exp(&xi);
                prop_assert!((back.matrix() - ab.matrix()).amax() < 1e-9);
            }
        }
    }
}
