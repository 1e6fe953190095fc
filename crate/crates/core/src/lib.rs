//! Generalized Dirichlet distributions on `l_p` balls and canonical moments.
//!
//! The crate is organised around a few coordinate changes that turn
//! structured laws into products of independent one-dimensional laws:
//!
//! * [`sampling`]: seeded Gamma/Beta/`G_p` variates, Dirichlet draws,
//!   stick-breaking and the generalized Dirichlet (GD) law on the simplex.
//! * [`geometry`]: the triangular canonical coordinates of the real and
//!   complex `l_p` balls, their inverse and Jacobian, polar decomposition.
//! * [`ball`]: p-generalized Dirichlet sampling, three uniform-ball samplers
//!   and cone-measure sampling on the sphere.
//! * [`moments`]: canonical moments on `[0,1]`, Verblunsky coefficients on
//!   the unit circle and the map from the moment space to the Euclidean ball.
//! * [`asymptotics`]: rate functions and limit densities.
//! * [`stats`] and [`suites`]: Kolmogorov-Smirnov tests, orthant-dependence
//!   and independence checks, and the named verification suites.
//!
//! All randomness flows through [`RandomStream`], a counter-addressed stream
//! that is reproducible bit for bit from `(seed, position)`.

// NaN must fail range checks, so negated comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod ball;
mod dd;
mod error;
pub mod geometry;
mod linalg;
pub mod moments;
pub mod rng;
pub mod sampling;
pub mod stats;
pub mod suites;

pub use error::{Error, Result};
pub use rng::RandomStream;
