//! Numeric tolerances and caps used across the crate.
//!
//! Every magic number that decides "equal enough", "on the boundary", or
//! "too big to enumerate" lives here so the contracts stay auditable.

/// A [`crate::SimplexPoint`] must sum to 1 within this after construction.
pub const POINT_SUM: f64 = 1e-12;

/// Constructor slack: input vectors whose sum deviates from 1 by at most
/// this are renormalized; anything worse is rejected.
pub const POINT_RENORMALIZE: f64 = 1e-9;

/// Default support threshold for reading a point's face: coordinates at or
/// below this count as zero.
pub const FACE_DEFAULT: f64 = 1e-9;

/// Face-mass vectors of a mixed distribution must sum to 1 within this.
pub const MASS_SUM: f64 = 1e-10;

/// Logit coordinates within this of the maximum tie for argmax.
pub const ARGMAX_TIE: f64 = 1e-12;

/// Absolute tolerance for the α-entmax threshold bisection.
pub const ENTMAX_BISECTION: f64 = 1e-14;

/// α values within this of 1 route α-entmax to softmax.
pub const ENTMAX_ALPHA_SOFTMAX: f64 = 1e-6;

/// Uniform draws are clamped into [ε, 1−ε] before the double logarithm of
/// the Gumbel quantile transform.
pub const GUMBEL_CLAMP: f64 = 1e-300;

/// Largest K for which full face-lattice enumeration (2^K − 1 faces) is
/// allowed by default.  `MIXEDSIMPLEX_MAX_K` overrides.
pub const LATTICE_ENUMERATION_K: u32 = 24;

/// Largest alphabet size accepted by automata constructions by default.
/// `MIXEDSIMPLEX_MAX_K` overrides.
pub const AUTOMATON_K: u32 = 20;

/// Hard ceiling on K imposed by the 64-bit face masks; the environment
/// override cannot exceed it.
pub const HARD_MAX_K: u32 = 64;

/// Minimum sample count for the nearest-neighbor differential-entropy
/// estimator on empirical conditionals.
pub const EMPIRICAL_MIN_SAMPLES: usize = 1000;

/// Enumerating the pure projections of a mixed string stops past this many.
pub const MAX_PROJECTIONS: u64 = 1_000_000;

/// Environment variable that overrides the enumeration and automata K caps
/// (clamped to [`HARD_MAX_K`]).
pub const MAX_K_ENV: &str = "MIXEDSIMPLEX_MAX_K";

fn env_cap() -> Option<u32> {
    std::env::var(MAX_K_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .map(|v| v.min(HARD_MAX_K))
}

/// Effective cap for operations that enumerate all 2^K − 1 faces.
pub fn lattice_enumeration_cap() -> u32 {
    env_cap().unwrap_or(LATTICE_ENUMERATION_K)
}

/// Effective cap on automaton alphabet size.
pub fn automaton_cap() -> u32 {
    env_cap().unwrap_or(AUTOMATON_K)
}
