//! Shared helpers for unit tests.

use nalgebra::Vector6;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::liegroups::Twist;

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

pub fn random_twist(rng: &mut impl Rng, rho_scale: f64, phi_scale: f64) -> Twist {
    let mut v = Vector6::zeros();
    for i in 0..3 {
        v[i] = rng.random_range(-rho_scale..rho_scale);
        v[i + 3] = rng.random_range(-phi_scale..phi_scale);
    }
    Twist(v)
}
