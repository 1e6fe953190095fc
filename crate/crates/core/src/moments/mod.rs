//! Moment spaces: canonical moments on `[0,1]`, Verblunsky coefficients on
//! the circle, and the maps from both into Euclidean balls.

mod real;
mod trig;

pub use real::{
    hankel_bounds, real_canonical_jacobian_logdet, real_canonical_to_moments,
    real_canonical_to_moments_with_ranges, real_moments_to_canonical,
    real_moments_to_canonical_with_ranges, sample_uniform_moment_space, RealCanonicalMoments,
    RealMomentVector, MAX_MOMENT_DIM,
};
pub use trig::{
    orthogonal_polynomials, reversed_pi_coordinates, trig_moments_from_verblunsky,
    verblunsky_from_trig_moments, OpucSystem, PiCoordinates, TrigMomentVector, VerblunskyCoeffs,
};

use crate::geometry::{from_canonical, BallPoint, CanonicalCoords};
use crate::Result;

/// Canonical moments, recentred to `(-1, 1)`, used as Euclidean canonical
/// coordinates. Uniform draws from the moment space land on the projected
/// Gamma–Dirichlet law with `a_j = 1/2`, `b_j = N - j + 1`.
pub fn sigma_map(m: &RealMomentVector) -> Result<BallPoint<f64>> {
    let c = real_moments_to_canonical(m)?;
    let centred: Vec<f64> = c.as_slice().iter().map(|&v| 2.0 * v - 1.0).collect();
    from_canonical(&CanonicalCoords::new(centred, 2.0)?)
}
