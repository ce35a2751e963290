//! Entropy, coding length, divergence, and mutual information for mixed
//! distributions.
//!
//! The entropy of a mixed distribution splits into a discrete face part and
//! an expected within-face differential part:
//!
//! ```text
//! H⊕(Y) = H(F) + Σ_f P_F(f) · h(Y | F = f)
//! ```
//!
//! measured in nats.  A flat conditional on a face with k vertices
//! contributes h = −log (k−1)!; the K = 2 truncated Gaussian has a closed
//! form; empirical conditionals are estimated with a nearest-neighbor
//! estimator.  Encoding a sample to N-bit precision per continuous
//! dimension costs the coding entropy
//!
//! ```text
//! H⊕_N(Y) = H⊕(Y) + N log 2 · Σ_f dim(f) P_F(f)
//! ```
//!
//! whose maximum over all flat-family distributions has the closed form
//! log L_{K−1}^{(1)}(−2^N) in terms of a generalized Laguerre polynomial;
//! the maximizing distribution weights dimension classes by a softmax of
//! counting terms.  KL divergence and mutual information decompose the
//! same way: a discrete face term plus expected conditional terms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mixed::{Conditional, MixedDistribution};
use crate::num::{ln_binomial, ln_factorial, log_sum_exp, normal_cdf, normal_pdf,
                 truncated_std_normal_moments};
use crate::tol;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_2: f64 = std::f64::consts::LN_2;

/// Entropy of a mixed distribution, split into its discrete and continuous
/// parts (all in nats).
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    /// −Σ_f P_F(f) log P_F(f), the face-choice entropy.
    pub discrete_part: f64,
    /// Σ_f P_F(f) h(Y|F=f), the expected within-face differential entropy.
    pub continuous_part: f64,
    /// Exactly `discrete_part + continuous_part`.
    pub total: f64,
    /// Per-face masses and differential entropies (zero-mass faces omitted).
    pub per_face: Vec<FaceEntropy>,
}

/// One face's contribution to an [`EntropyReport`].
#[derive(Debug, Clone, Serialize)]
pub struct FaceEntropy {
    pub face: crate::simplex::Face,
    pub mass: f64,
    /// Differential entropy of the conditional on this face, in nats.
    pub differential: f64,
}

/// The face-dimension distribution maximizing coding entropy, with its
/// achieved value.
#[derive(Debug, Clone, Serialize)]
pub struct MaxEntSolution {
    /// g[j] is the total mass optimally assigned to faces with j+1 vertices.
    pub g: Vec<f64>,
    pub n_bits: u32,
    /// Maximal coding entropy in nats.
    pub value: f64,
}

/// Entropy of the K = 2 truncated Gaussian conditional: N(z, σ²) restricted
/// to (0, 1) and renormalized.  Derivation: with a = −z/σ, b = (1−z)/σ and
/// c = Φ(b) − Φ(a) the unnormalized integral is
///
/// ```text
/// −∫₀¹ N log N dy = c·log √(2πσ²) + (c + aφ(a) − bφ(b)) / 2
/// ```
///
/// and the conditional entropy adds the normalization:
/// h = (−∫ N log N)/c + log c.
fn truncated_gaussian_entropy(z: f64, sigma: f64) -> f64 {
    let a = (0.0 - z) / sigma;
    let b = (1.0 - z) / sigma;
    let c = normal_cdf(b) - normal_cdf(a);
    let unnorm = c * (2.0 * std::f64::consts::PI * sigma * sigma).sqrt().ln()
        + 0.5 * (c + a * normal_pdf(a) - b * normal_pdf(b));
    unnorm / c + c.ln()
}

/// Mean and variance of the same conditional, via standardized truncated
/// moments.
fn truncated_gaussian_mean_var(z: f64, sigma: f64) -> (f64, f64) {
    let a = (0.0 - z) / sigma;
    let b = (1.0 - z) / sigma;
    let (_, m, v) = truncated_std_normal_moments(a, b);
    (z + sigma * m, sigma * sigma * v)
}

/// Nearest-neighbor differential entropy estimate (first neighbor) for
/// points in ℝ^d:
///
/// ```text
/// Ĥ = (d/n) Σ_i log r_i + log c_d + log(n−1) + γ
/// ```
///
/// with r_i the distance to the nearest other point and c_d the volume of
/// the d-dimensional unit ball.
fn nn_differential_entropy(points: &[Vec<f64>], d: usize) -> f64 {
    let n = points.len();
    let mut log_r_sum = 0.0;
    for (i, p) in points.iter().enumerate() {
        let mut best = f64::INFINITY;
        for (j, q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let dist2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            if dist2 < best {
                best = dist2;
            }
        }
        log_r_sum += 0.5 * best.max(1e-300).ln();
    }
    let df = d as f64;
    let log_unit_ball =
        0.5 * df * std::f64::consts::PI.ln() - libm::lgamma(0.5 * df + 1.0);
    df * log_r_sum / n as f64 + log_unit_ball + ((n - 1) as f64).ln() + EULER_GAMMA
}

fn conditional_differential_entropy(
    face: crate::simplex::Face,
    conditional: &Conditional,
) -> Result<f64> {
    let k = face.num_vertices() as u64;
    Ok(match conditional {
        Conditional::Flat => -ln_factorial(k - 1),
        Conditional::TruncatedGaussianK2 { z, sigma } => truncated_gaussian_entropy(*z, *sigma),
        Conditional::Empirical { samples } => {
            if samples.len() < tol::EMPIRICAL_MIN_SAMPLES {
                return Err(Error::InsufficientSamples {
                    needed: tol::EMPIRICAL_MIN_SAMPLES,
                    got: samples.len(),
                });
            }
            let d = (k - 1) as usize;
            if d == 0 {
                return Ok(0.0); // a vertex has no continuous part
            }
            // Parametrize the face by all but the last of its coordinates.
            let positions: Vec<usize> = face.coord_positions().take(d).collect();
            let pts: Vec<Vec<f64>> = samples
                .iter()
                .map(|s| positions.iter().map(|&i| s.coords()[i]).collect())
                .collect();
            nn_differential_entropy(&pts, d)
        }
    })
}

/// Face entropy plus expected conditional differential entropy of a mixed
/// distribution (0 · log 0 := 0 throughout; zero-mass faces are skipped).
pub fn direct_sum_entropy(d: &MixedDistribution) -> Result<EntropyReport> {
    let mut discrete = 0.0;
    let mut continuous = 0.0;
    let mut per_face = Vec::new();
    for (face, mass, conditional) in d.iter() {
        if mass == 0.0 {
            continue;
        }
        discrete -= mass * mass.ln();
        let h = conditional_differential_entropy(face, conditional)?;
        continuous += mass * h;
        per_face.push(FaceEntropy {
            face,
            mass,
            differential: h,
        });
    }
    Ok(EntropyReport {
        discrete_part: discrete,
        continuous_part: continuous,
        total: discrete + continuous,
        per_face,
    })
}

/// Code length (nats) for a face-exact, N-bit-per-dimension encoding:
/// `H⊕ + N log 2 · E[dim(F)]`.
pub fn coding_entropy(d: &MixedDistribution, n_bits: u32) -> Result<f64> {
    let report = direct_sum_entropy(d)?;
    let expected_dim: f64 = d
        .iter()
        .map(|(face, mass, _)| face.dim() as f64 * mass)
        .sum();
    Ok(report.total + n_bits as f64 * LN_2 * expected_dim)
}

/// The coding-entropy-maximizing allocation of mass to face-dimension
/// classes.  Faces with j vertices are exchangeable, so the optimum is a
/// softmax over per-class scores:
///
/// ```text
/// g(j) ∝ C(K, j) 2^{N(j−1)} / (j−1)!        j = 1..K
/// value = log Σ_j C(K, j) 2^{N(j−1)} / (j−1)!
/// ```
pub fn maxent_over_faces(k: u32, n_bits: u32) -> Result<MaxEntSolution> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "maximum-entropy solution needs K >= 2, got {k}"
        )));
    }
    let scores: Vec<f64> = (1..=k as u64)
        .map(|j| {
            ln_binomial(k as u64, j) + n_bits as f64 * (j - 1) as f64 * LN_2
                - ln_factorial(j - 1)
        })
        .collect();
    let value = log_sum_exp(&scores);
    let g: Vec<f64> = scores.iter().map(|s| (s - value).exp()).collect();
    Ok(MaxEntSolution {
        g,
        n_bits,
        value,
    })
}

/// The same maximal coding entropy via the generalized Laguerre polynomial
/// identity `value = log L_{K−1}^{(1)}(−2^N)`, evaluated with the
/// three-term recurrence
///
/// ```text
/// (m+1) L_{m+1}^{(1)}(x) = (2m + 2 − x) L_m^{(1)}(x) − (m + 1) L_{m−1}^{(1)}(x)
/// ```
///
/// For K = 2 this reduces to log(2 + 2^N) and for K = 3 to
/// log(3 + 3·2^N + 2^{2N−1}).  When the recurrence overflows (it works on
/// the polynomial values themselves), the log-space sum of
/// [`maxent_over_faces`] is used instead; `Overflow` is returned only if
/// that also fails to produce a finite value.
pub fn laguerre_maxent_value(k: u32, n_bits: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "maximum-entropy value needs K >= 2, got {k}"
        )));
    }
    let x = -((n_bits as f64).exp2());
    let degree = (k - 1) as usize;
    let mut prev = 1.0f64; // L_0
    let mut cur = 2.0 - x; // L_1^{(1)}
    if degree >= 2 {
        for m in 1..degree {
            let mf = m as f64;
            let next = ((2.0 * mf + 2.0 - x) * cur - (mf + 1.0) * prev) / (mf + 1.0);
            prev = cur;
            cur = next;
        }
    }
    let value = if degree == 0 { prev.ln() } else { cur.ln() };
    if value.is_finite() {
        return Ok(value);
    }
    let fallback = maxent_over_faces(k, n_bits)?.value;
    if fallback.is_finite() {
        Ok(fallback)
    } else {
        Err(Error::Overflow(format!(
            "maximum-entropy value for K={k}, N={n_bits} exceeds floating-point range"
        )))
    }
}

fn kl_conditionals(
    face: crate::simplex::Face,
    p: &Conditional,
    q: &Conditional,
) -> Result<f64> {
    Ok(match (p, q) {
        (Conditional::Empirical { .. }, _) | (_, Conditional::Empirical { .. }) => {
            return Err(Error::NoDensityForm)
        }
        (Conditional::Flat, Conditional::Flat) => 0.0,
        (
            Conditional::TruncatedGaussianK2 { z: z1, sigma: s1 },
            Conditional::TruncatedGaussianK2 { z: z2, sigma: s2 },
        ) => {
            // E_p[log p − log q] with Gaussian cross term via E_p[(y−z₂)²].
            let h1 = truncated_gaussian_entropy(*z1, *s1);
            let (m1, v1) = truncated_gaussian_mean_var(*z1, *s1);
            let a2 = (0.0 - z2) / s2;
            let b2 = (1.0 - z2) / s2;
            let c2 = normal_cdf(b2) - normal_cdf(a2);
            let cross = v1 + (m1 - z2) * (m1 - z2);
            -h1 + (2.0 * std::f64::consts::PI * s2 * s2).sqrt().ln()
                + c2.ln()
                + cross / (2.0 * s2 * s2)
        }
        (Conditional::Flat, Conditional::TruncatedGaussianK2 { z: z2, sigma: s2 }) => {
            // p is uniform with density 1 on the unit edge; ∫₀¹ (y−z)² dy
            // has the closed form ((1−z)³ + z³)/3.
            debug_assert_eq!(face.num_vertices(), 2);
            let a2 = (0.0 - z2) / s2;
            let b2 = (1.0 - z2) / s2;
            let c2 = normal_cdf(b2) - normal_cdf(a2);
            let moment = ((1.0 - z2).powi(3) + z2.powi(3)) / 3.0;
            (2.0 * std::f64::consts::PI * s2 * s2).sqrt().ln()
                + c2.ln()
                + moment / (2.0 * s2 * s2)
        }
        (Conditional::TruncatedGaussianK2 { z, sigma }, Conditional::Flat) => {
            // The flat density on the unit edge is 1, so only −h(p) remains.
            debug_assert_eq!(face.num_vertices(), 2);
            -truncated_gaussian_entropy(*z, *sigma)
        }
    })
}

/// KL divergence KL(p‖q) between mixed distributions, in nats:
///
/// ```text
/// KL⊕(p‖q) = KL(P_F‖Q_F) + Σ_f P_F(f) KL(p(·|f) ‖ q(·|f))
/// ```
///
/// Returns +∞ when p puts mass on a face where q has none.  Conditionals
/// must have closed-form densities (no `Empirical`).
pub fn kl_divergence(p: &MixedDistribution, q: &MixedDistribution) -> Result<f64> {
    if p.k() != q.k() {
        return Err(Error::AlphabetMismatch {
            expected: p.k() as usize,
            got: q.k() as usize,
        });
    }
    let mut total = 0.0;
    for (face, p_mass, p_cond) in p.iter() {
        if let Conditional::Empirical { .. } = p_cond {
            return Err(Error::NoDensityForm);
        }
        if p_mass == 0.0 {
            continue;
        }
        let q_mass = q.mass_of(face);
        if q_mass == 0.0 {
            return Ok(f64::INFINITY);
        }
        let q_cond = q
            .conditional_of(face)
            .expect("positive mass implies an entry");
        total += p_mass * (p_mass / q_mass).ln();
        total += p_mass * kl_conditionals(face, p_cond, q_cond)?;
    }
    // q-side empirical conditionals are invalid even off p's support.
    for (_, _, q_cond) in q.iter() {
        if let Conditional::Empirical { .. } = q_cond {
            return Err(Error::NoDensityForm);
        }
    }
    Ok(total)
}

/// Mutual information I(Y; Z) for a finite mixture: `joint` lists
/// `(weight, distribution of Y given Z = z)` rows.  All conditionals must
/// be flat; then the within-face laws do not depend on z given the face,
/// and the mutual information is carried entirely by the face choice:
///
/// ```text
/// I(Y; Z) = I(F; Z) = Σ_z w_z Σ_f P^z_F(f) log( P^z_F(f) / P̄_F(f) )
/// ```
///
/// with P̄_F the weight-averaged face mass function.
pub fn mutual_information(joint: &[(f64, MixedDistribution)]) -> Result<f64> {
    if joint.is_empty() {
        return Err(Error::BadJoint("empty joint distribution".into()));
    }
    let weight_sum: f64 = joint.iter().map(|(w, _)| *w).sum();
    if joint.iter().any(|(w, _)| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::BadJoint("weights must be finite and non-negative".into()));
    }
    if (weight_sum - 1.0).abs() > tol::MASS_SUM {
        return Err(Error::BadJoint(format!(
            "weights sum to {weight_sum}, not 1"
        )));
    }
    let k = joint[0].1.k();
    let mut marginal: std::collections::BTreeMap<u64, f64> = std::collections::BTreeMap::new();
    for (w, d) in joint {
        if d.k() != k {
            return Err(Error::AlphabetMismatch {
                expected: k as usize,
                got: d.k() as usize,
            });
        }
        for (face, mass, cond) in d.iter() {
            if !matches!(cond, Conditional::Flat) {
                return Err(Error::InvalidArgument(
                    "mutual information requires flat conditionals".into(),
                ));
            }
            *marginal.entry(face.mask()).or_insert(0.0) += w * mass;
        }
    }
    let mut mi = 0.0;
    for (w, d) in joint {
        if *w == 0.0 {
            continue;
        }
        for (face, mass, _) in d.iter() {
            if mass == 0.0 {
                continue;
            }
            let avg = marginal[&face.mask()];
            mi += w * mass * (mass / avg).ln();
        }
    }
    Ok(mi)
}
