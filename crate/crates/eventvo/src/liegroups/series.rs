//! Power-series evaluations on se(3) built from the adjoint operator.
//!
//! The inverse-Jacobian series `J_r(xi)^-1 = sum_n c_n ad(xi)^n` (Bernoulli
//! coefficients) admits exact term-by-term differentiation, which is how the
//! motion-prior and projection factors obtain machine-precision derivatives
//! of expressions like `J_r(xi)^-1 w` with respect to `xi`. Convergence is
//! governed by the rotational magnitude (spectral radius of `ad`), which
//! stays well below pi for the twists this crate produces.

use nalgebra::{Matrix6, Vector6};

use super::Twist;

/// `c_n = B_n / n!` for even `n` (Bernoulli numbers), `c_1 = 1/2` handled
/// separately. Truncation at `ad^32` leaves the series below 1e-12 for
/// rotational magnitudes up to ~2.5 rad.
const EVEN_COEFFS: [f64; 16] = [
    1.0 / 12.0,                                  // n = 2
    -1.0 / 720.0,                                // n = 4
    1.0 / 30240.0,                               // n = 6
    -1.0 / 1209600.0,                            // n = 8
    1.0 / 47900160.0,                            // n = 10
    -691.0 / 1307674368000.0,                    // n = 12
    1.0 / 74724249600.0,                         // n = 14
    -3617.0 / 10670622842880000.0,               // n = 16
    43867.0 / 5109094217170944000.0,             // n = 18
    -174611.0 / 802857662698291200000.0,         // n = 20
    77683.0 / 14101100039391805440000.0,         // n = 22
    -236364091.0 / 1693824136731743669452800000.0, // n = 24
    657931.0 / 186134520519971831808000000.0,    // n = 26
    -3392780147.0 / 37893265687455865519472640000000.0, // n = 28
    1723168255201.0 / 759790291646040068357842010112000000.0, // n = 30
    -7709321041217.0 / 134196726836183700385281186201600000000.0, // n = 32
];

const MAX_POWER: usize = 32;

fn coeff(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 0.5,
        _ if n % 2 == 1 => 0.0,
        _ => EVEN_COEFFS[n / 2 - 1],
    }
}

/// `J_r(xi)^-1` evaluated purely from the adjoint series; used by tests to
/// cross-check the closed form.
pub fn inv_right_jacobian_series(xi: &Twist) -> Matrix6<f64> {
    let a = xi.ad();
    let mut power = Matrix6::identity();
    let mut sum = Matrix6::zeros();
    for n in 0..=MAX_POWER {
        let c = coeff(n);
        if c != 0.0 {
            sum += c * power;
        }
        power *= a;
    }
    sum
}

/// Exact Jacobian of `xi -> J_r(xi)^-1 * w` with respect to `xi`.
///
/// Column `m` is `sum_n c_n sum_{i+j=n-1} ad^i ad(e_m) ad^j w`.
pub fn inv_right_jacobian_deriv(xi: &Twist, w: &Vector6<f64>) -> Matrix6<f64> {
    let a = xi.ad();

    // v[j] = ad^j w
    let mut v = [Vector6::zeros(); MAX_POWER];
    v[0] = *w;
    for j in 1..MAX_POWER {
        v[j] = a * v[j - 1];
    }

    let mut gens = [Matrix6::zeros(); 6];
    for (m, gen) in gens.iter_mut().enumerate() {
        let mut e = Vector6::zeros();
        e[m] = 1.0;
        *gen = Twist::from_vector(e).ad();
    }

    let mut h = Matrix6::zeros();
    for (m, gen) in gens.iter().enumerate() {
        let mut col = Vector6::zeros();
        for (j, vj) in v.iter().enumerate() {
            let mut u = gen * vj;
            let mut i = 0;
            while i + j + 1 <= MAX_POWER {
                let c = coeff(i + j + 1);
                if c != 0.0 {
                    col += c * u;
                }
                u = a * u;
                i += 1;
            }
        }
        h.set_column(m, &col);
    }
    h
}

/// Exact Jacobian of `xi -> J_r(xi) * w` with respect to `xi`, from the
/// series `J_r(xi) = sum_n (-ad)^n / (n+1)!`.
pub fn right_jacobian_deriv(xi: &Twist, w: &Vector6<f64>) -> Matrix6<f64> {
    let a = -xi.ad();

    let mut v = [Vector6::zeros(); MAX_POWER];
    v[0] = *w;
    for j in 1..MAX_POWER {
        v[j] = a * v[j - 1];
    }

    let mut gens = [Matrix6::zeros(); 6];
    for (m, gen) in gens.iter_mut().enumerate() {
        let mut e = Vector6::zeros();
        e[m] = 1.0;
        // d(-ad(xi))/dxi_m = -ad(e_m)
        *gen = -Twist::from_vector(e).ad();
    }

    let mut factorial = [0.0f64; MAX_POWER + 2];
    factorial[0] = 1.0;
    for n in 1..factorial.len() {
        factorial[n] = factorial[n - 1] * n as f64;
    }

    let mut h = Matrix6::zeros();
    for (m, gen) in gens.iter().enumerate() {
        let mut col = Vector6::zeros();
        for (j, vj) in v.iter().enumerate() {
            let mut u = gen * vj;
            let mut i = 0;
            while i + j + 1 <= MAX_POWER {
                let n = i + j + 1;
                col += u / factorial[n + 1];
                u = a * u;
                i += 1;
            }
        }
        h.set_column(m, &col);
    }
    h
}

/// `J_l(xi) = sum_n ad^n / (n+1)!`, series form; test oracle for the closed
/// form.
#[cfg(test)]
pub fn left_jacobian_series(xi: &Twist) -> Matrix6<f64> {
    let a = xi.ad();
    let mut power = Matrix6::identity();
    let mut sum = Matrix6::zeros();
    let mut fact = 1.0; // running (n+1)!
    for n in 0..=MAX_POWER {
        fact *= (n + 1) as f64;
        sum += power / fact;
        power *= a;
    }
    sum
}
