//! Trigonometric coefficients of the rotation exponential, logarithm and
//! Jacobians, with Taylor branches where the closed forms cancel.
//!
//! Switch points are set per coefficient so that closed form and series agree
//! to <= 1e-12: the closed forms of `b`, `c`, `d` lose roughly
//! `eps / theta^2` digits to cancellation, and the `q3`/`q4` coefficients of
//! the SE(3) coupling block lose `eps / theta^4`, so they switch earlier.

/// Small-angle switch for `a`, `b`, `c`, `d`.
pub const EPS_ANGLE: f64 = 2e-2;
/// Small-angle switch for the quartic-cancellation coefficients `q3`, `q4`.
const EPS_ANGLE_Q: f64 = 0.25;

/// Scalar coefficients evaluated once per angle:
/// `a = sin t / t`, `b = (1 - cos t)/t^2`, `c = (t - sin t)/t^3`,
/// `d = 1/t^2 - (1 + cos t)/(2 t sin t)`,
/// `q3 = (t^2/2 + cos t - 1)/t^4`, `q4 = -(q3 - 3 (t - sin t - t^3/6)/t^5)/2`.
pub struct RotCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub q3: f64,
    pub q4: f64,
}

impl RotCoeffs {
    pub fn for_angle(theta: f64) -> RotCoeffs {
        let t2 = theta * theta;
        let (a, b, c, d) = if theta < EPS_ANGLE {
            (
                1.0 - t2 / 6.0 + t2 * t2 / 120.0,
                0.5 - t2 / 24.0 + t2 * t2 / 720.0,
                1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0,
                1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0,
            )
        } else {
            let (s, co) = theta.sin_cos();
            (
                s / theta,
                (1.0 - co) / t2,
                (theta - s) / (t2 * theta),
                1.0 / t2 - (1.0 + co) / (2.0 * theta * s),
            )
        };
        let (q3, q4) = if theta < EPS_ANGLE_Q {
            let t4 = t2 * t2;
            let q3 = 1.0 / 24.0 - t2 / 720.0 + t4 / 40320.0 - t2 * t4 / 3628800.0;
            let q4 = 1.0 / 120.0 - t2 / 2520.0 + t4 / 120960.0;
            (q3, q4)
        } else {
            let (s, co) = theta.sin_cos();
            let t4 = t2 * t2;
            let q3 = (t2 / 2.0 + co - 1.0) / t4;
            let m5 = (theta - s - t2 * theta / 6.0) / (t4 * theta);
            (q3, -(-q3 - 3.0 * m5) / 2.0)
        };
        RotCoeffs { a, b, c, d, q3, q4 }
    }
}
