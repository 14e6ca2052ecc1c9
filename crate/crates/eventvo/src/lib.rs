//! Continuous-time visual odometry for event cameras.
//!
//! The crate is organized around a two-stage pipeline: an asynchronous
//! event-by-event frontend ([`frontend`]) turns raw events into feature
//! trajectories, and a sliding-window estimator ([`estimator`]) fuses those
//! trajectories with a white-noise-on-acceleration motion prior
//! ([`gp`]) into an SE(3) trajectory and a sparse landmark cloud.
//! [`simgen`] produces synthetic scenes used as ground-truth oracles,
//! [`io`] and [`eval`] handle file formats and trajectory metrics, and
//! [`pipeline`] wires the two stages together.

pub mod gp;
pub mod liegroups;

#[cfg(test)]
pub(crate) mod testutil;

pub use liegroups::{Pose, Rotation, Twist};
