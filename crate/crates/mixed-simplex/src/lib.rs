//! Hybrid discrete–continuous probability on the simplex.
//!
//! The probability simplex Δ_{K−1} decomposes into the disjoint union of the
//! relative interiors of its 2^K − 1 non-empty faces.  A point with support
//! I ⊆ {1..K} lives on the face indexed by I: vertices are the one-hot
//! corners, edges mix two symbols, and the maximal face is the open interior.
//! Random variables produced by sparse transformations (sparsemax, α-entmax,
//! rectified Gaussians) place positive probability *mass* on low-dimensional
//! faces and a continuous *density* inside them, so they are neither discrete
//! nor continuous.  This crate treats such mixed random variables as first
//! class: a distribution is a face-indexed mixture, its reference measure is
//! the direct sum of per-face Lebesgue measures, and its entropy splits into
//! a discrete face-choice part plus an expected within-face differential
//! part.
//!
//! Module map:
//!
//! * [`simplex`] — points, faces, the face lattice, and the direct-sum
//!   measure with face volumes 1/(k−1)!.
//! * [`transforms`] — deterministic maps ℝ^K → Δ_{K−1}: softmax, argmax,
//!   top-k softmax, sparsemax, and α-entmax.
//! * [`samplers`] — stochastic relaxations (Dirichlet, Gaussian-softmax,
//!   Gumbel-softmax, hard concrete, Gaussian-sparsemax) with a deterministic
//!   counter-based RNG, plus the closed-form densities that exist.
//! * [`mixed`] — face-mass + conditional-density representation of a mixed
//!   distribution; Monte-Carlo face-mass estimation; density and expectation.
//! * [`info`] — entropy, coding entropy at finite bit precision, the
//!   maximum-entropy distribution over faces, KL divergence, and mutual
//!   information, all in the direct-sum sense.
//! * [`automata`] — finite-state acceptors whose arcs consume *distributions
//!   over symbols* rather than symbols, with Boolean and probability
//!   semirings, closure constructions, and reductions to classical FSAs.
//! * [`figures`] — CSV generators for the standard diagnostic plots.
//!
//! Internal computations are in nats; bit conversions happen at the edges.

pub mod automata;
pub mod error;
pub mod figures;
pub mod info;
pub mod mixed;
mod num;
pub mod samplers;
pub mod simplex;
pub mod tol;
pub mod transforms;

pub use error::{Error, Result};
pub use simplex::{Face, FaceLattice, FaceSet, SimplexPoint};
