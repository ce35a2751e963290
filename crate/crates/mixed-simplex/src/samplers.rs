//! Random generators of simplex points and their exact densities.
//!
//! Five generative stories produce points of Δ_{K−1}:
//!
//! ```text
//! Dirichlet(α)             Y_k = G_k / Σ_j G_j,  G_k ~ Gamma(α_k, 1)
//! GaussianSoftmax(z, σ)    Y   = softmax(z + σN),       N ~ Normal(0, I)
//! GumbelSoftmax(z, β)      Y   = softmax_β(z + G),      G_k ~ Gumbel(0, 1)
//! HardConcrete(z, β, λ)    Y   = sparsemax(λ · Y′),     Y′ ~ GumbelSoftmax(z, β)
//! GaussianSparsemax(z, σ)  Y   = sparsemax(z + σN),     N ~ Normal(0, I)
//! ```
//!
//! The first three stay strictly inside the simplex; the last two push mass
//! onto lower faces exactly, because sparsemax clips.  Exact densities are
//! available where a closed form exists: the Dirichlet, the Gumbel-softmax
//! (a.k.a. concrete) density, and the K = 2 Gaussian-sparsemax law, which is
//! two point masses plus a Gaussian segment:
//!
//! ```text
//! P₀ = Φ(−z/σ),   P₁ = Φ((z−1)/σ),   p(y) = N(y; z, σ²) on (0, 1)
//! ```
//!
//! Sampling is deterministic given an [`RngState`]; chunked Monte Carlo uses
//! one substream per chunk so parallel estimates are reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{ln_factorial, log_sum_exp, normal_cdf, normal_pdf};
use crate::simplex::SimplexPoint;
use crate::tol;
use crate::transforms::{softmax, sparsemax};

/// Deterministic RNG state: a seed plus a substream index.
///
/// The same `(seed, stream)` always reproduces the same sample sequence.
/// [`RngState::chunk`] derives per-chunk substreams (one nesting level,
/// chunk index below 2³²) so that chunked estimation is order-independent
/// and reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngState {
    pub seed: u64,
    pub stream: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState { seed, stream: 0 }
    }

    /// Substream for chunk `i`: distinct from the parent stream and from
    /// every other chunk of the same parent.
    pub fn chunk(&self, i: u64) -> Self {
        RngState {
            seed: self.seed,
            stream: self.stream.wrapping_mul(1 << 32).wrapping_add(i + 1),
        }
    }

    /// Instantiate the concrete generator for this state.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream);
        r
    }
}

/// A generative story producing simplex points.
///
/// Serialized as a tagged JSON object, e.g.
/// `{"kind": "gaussian_sparsemax", "z": [0.5, 0.5], "sigma": 1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerSpec {
    Dirichlet { alpha: Vec<f64> },
    GaussianSoftmax { z: Vec<f64>, sigma: f64 },
    GumbelSoftmax { z: Vec<f64>, beta: f64 },
    HardConcrete { z: Vec<f64>, beta: f64, lambda: f64 },
    GaussianSparsemax { z: Vec<f64>, sigma: f64 },
}

fn check_param_vec(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::BadSpec(format!("{name} must be non-empty")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::BadSpec(format!("{name} must be finite")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::BadSpec(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

impl SamplerSpec {
    /// Alphabet size K of the produced points.
    pub fn k(&self) -> usize {
        match self {
            SamplerSpec::Dirichlet { alpha } => alpha.len(),
            SamplerSpec::GaussianSoftmax { z, .. }
            | SamplerSpec::GumbelSoftmax { z, .. }
            | SamplerSpec::HardConcrete { z, .. }
            | SamplerSpec::GaussianSparsemax { z, .. } => z.len(),
        }
    }

    /// Check the parameter domain of the variant.
    pub fn validate(&self) -> Result<()> {
        match self {
            SamplerSpec::Dirichlet { alpha } => {
                check_param_vec("alpha", alpha)?;
                if alpha.iter().any(|&a| a <= 0.0) {
                    return Err(Error::BadSpec("alpha must be strictly positive".into()));
                }
            }
            SamplerSpec::GaussianSoftmax { z, sigma } => {
                check_param_vec("z", z)?;
                check_positive("sigma", *sigma)?;
            }
            SamplerSpec::GumbelSoftmax { z, beta } => {
                check_param_vec("z", z)?;
                check_positive("beta", *beta)?;
            }
            SamplerSpec::HardConcrete { z, beta, lambda } => {
                check_param_vec("z", z)?;
                check_positive("beta", *beta)?;
                if !(lambda.is_finite() && *lambda >= 1.0) {
                    return Err(Error::BadSpec(format!(
                        "lambda must be >= 1 and finite, got {lambda}"
                    )));
                }
            }
            SamplerSpec::GaussianSparsemax { z, sigma } => {
                check_param_vec("z", z)?;
                check_positive("sigma", *sigma)?;
            }
        }
        Ok(())
    }

    /// Draw `n` independent points.  Identical `rng` states give identical
    /// output sequences.
    pub fn sample(&self, rng: &RngState, n: usize) -> Result<Vec<SimplexPoint>> {
        self.validate()?;
        if n == 0 {
            return Err(Error::InvalidArgument("sample count must be >= 1".into()));
        }
        let mut r = rng.rng();
        Ok((0..n).map(|_| self.draw(&mut r)).collect())
    }

    /// One draw from an already-instantiated generator.  The spec must have
    /// been validated.
    pub(crate) fn draw(&self, r: &mut ChaCha8Rng) -> SimplexPoint {
        match self {
            SamplerSpec::Dirichlet { alpha } => {
                let mut g: Vec<f64> = alpha
                    .iter()
                    .map(|&a| {
                        let d = Gamma::new(a, 1.0).expect("validated alpha");
                        // Clamp away underflow so the sampler stays strictly
                        // inside the simplex even for very small alpha.
                        let x: f64 = d.sample(r);
                        x.max(tol::GUMBEL_CLAMP)
                    })
                    .collect();
                let sum: f64 = g.iter().sum();
                for v in &mut g {
                    *v /= sum;
                }
                SimplexPoint::new_unchecked(g)
            }
            SamplerSpec::GaussianSoftmax { z, sigma } => {
                let noisy = perturb_gaussian(z, *sigma, r);
                softmax(&noisy, 1.0).expect("finite perturbed logits")
            }
            SamplerSpec::GumbelSoftmax { z, beta } => {
                let noisy = perturb_gumbel(z, r);
                softmax(&noisy, *beta).expect("finite perturbed logits")
            }
            SamplerSpec::HardConcrete { z, beta, lambda } => {
                let noisy = perturb_gumbel(z, r);
                let soft = softmax(&noisy, *beta).expect("finite perturbed logits");
                let stretched: Vec<f64> = soft.coords().iter().map(|&y| lambda * y).collect();
                sparsemax(&stretched).expect("finite stretched point")
            }
            SamplerSpec::GaussianSparsemax { z, sigma } => {
                let noisy = perturb_gaussian(z, *sigma, r);
                sparsemax(&noisy).expect("finite perturbed logits")
            }
        }
    }
}

fn perturb_gaussian(z: &[f64], sigma: f64, r: &mut ChaCha8Rng) -> Vec<f64> {
    z.iter()
        .map(|&zi| {
            let n: f64 = StandardNormal.sample(r);
            zi + sigma * n
        })
        .collect()
}

fn perturb_gumbel(z: &[f64], r: &mut ChaCha8Rng) -> Vec<f64> {
    z.iter()
        .map(|&zi| {
            let u: f64 = r.gen::<f64>();
            let g = -(-(u.max(tol::GUMBEL_CLAMP)).ln()).ln();
            zi + g
        })
        .collect()
}

/// Dirichlet density at an interior point, with respect to Lebesgue measure
/// on the (K−1)-dimensional parametrization by the first K−1 coordinates:
///
/// ```text
/// p(y; α) = (1 / B(α)) Π_k y_k^{α_k − 1}
/// ```
///
/// Coordinates that are exactly zero are allowed only where α_k = 1 (the
/// factor is then constant 1); otherwise the density is undefined on the
/// boundary and `BoundaryEvaluation` is returned.
pub fn dirichlet_density(p: &SimplexPoint, alpha: &[f64]) -> Result<f64> {
    check_param_vec("alpha", alpha)?;
    if alpha.iter().any(|&a| a <= 0.0) {
        return Err(Error::BadSpec("alpha must be strictly positive".into()));
    }
    if alpha.len() != p.k() {
        return Err(Error::BadSpec(format!(
            "alpha length {} does not match point dimension {}",
            alpha.len(),
            p.k()
        )));
    }
    if alpha.iter().all(|&a| a == 1.0) {
        // Flat case: the constant (K−1)!, kept exact by integer
        // multiplication instead of exp(lgamma) round trips.
        return Ok((1..p.k() as u64).map(|i| i as f64).product());
    }
    let mut log_num = 0.0;
    for (i, (&y, &a)) in p.coords().iter().zip(alpha).enumerate() {
        if a == 1.0 {
            continue; // factor y^0 = 1 even on the boundary
        }
        if y <= 0.0 {
            return Err(Error::BoundaryEvaluation { index: i + 1 });
        }
        log_num += (a - 1.0) * y.ln();
    }
    let a_sum: f64 = alpha.iter().sum();
    let ln_beta: f64 =
        alpha.iter().map(|&a| libm::lgamma(a)).sum::<f64>() - libm::lgamma(a_sum);
    Ok((log_num - ln_beta).exp())
}

/// Gumbel-softmax (concrete) density at a strictly interior point:
///
/// ```text
/// p(y; z, β) = (K−1)!  β^{K−1}  (Σ_k π_k / y_k^β)^{−K}  Π_k π_k / y_k^{β+1}
/// ```
///
/// with π = softmax(z).  Evaluated in log space.
pub fn gumbel_softmax_density(p: &SimplexPoint, z: &[f64], beta: f64) -> Result<f64> {
    check_param_vec("z", z)?;
    check_positive("beta", beta)?;
    if z.len() != p.k() {
        return Err(Error::BadSpec(format!(
            "z length {} does not match point dimension {}",
            z.len(),
            p.k()
        )));
    }
    if let Some(i) = p.coords().iter().position(|&y| y <= 0.0) {
        return Err(Error::BoundaryEvaluation { index: i + 1 });
    }
    let k = p.k();
    let lse_z = log_sum_exp(z);
    // log π_k − β log y_k for the inner sum; log π_k − (β+1) log y_k for the product.
    let mut inner = Vec::with_capacity(k);
    let mut log_prod = 0.0;
    for (&zi, &yi) in z.iter().zip(p.coords()) {
        let log_pi = zi - lse_z;
        let log_y = yi.ln();
        inner.push(log_pi - beta * log_y);
        log_prod += log_pi - (beta + 1.0) * log_y;
    }
    let log_density = ln_factorial((k - 1) as u64) + (k as f64 - 1.0) * beta.ln()
        - k as f64 * log_sum_exp(&inner)
        + log_prod;
    Ok(log_density.exp())
}

/// The exact K = 2 law of `sparsemax(z + σN)` expressed over the first
/// coordinate y ∈ [0, 1]: two boundary atoms and a Gaussian interior
/// density,
///
/// ```text
/// P₀ = Φ(−z/σ) = (1 − erf(z/(√2 σ)))/2        mass at y = 0
/// P₁ = Φ((z−1)/σ) = (1 + erf((z−1)/(√2 σ)))/2  mass at y = 1
/// p(y) = N(y; z, σ²)                           on 0 < y < 1
/// ```
///
/// Returns `(P₀, P₁, N(y; z, σ²))`.  The three pieces integrate to one.
pub fn gaussian_sparsemax_density_k2(y: f64, z: f64, sigma: f64) -> Result<(f64, f64, f64)> {
    check_positive("sigma", sigma)?;
    if !z.is_finite() {
        return Err(Error::BadSpec(format!("z must be finite, got {z}")));
    }
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::InvalidArgument(format!(
            "evaluation point must lie in [0, 1], got {y}"
        )));
    }
    let p0 = normal_cdf(-z / sigma);
    let p1 = normal_cdf((z - 1.0) / sigma);
    let density = normal_pdf((y - z) / sigma) / sigma;
    Ok((p0, p1, density))
}

/// Effective scalar parameters of the K = 2 `GaussianSparsemax` sampler.
///
/// For K = 2, `sparsemax([a, b]) = [clip((1 + a − b)/2), 1 − clip(...)]`,
/// so with a = z₁ + σN₁ and b = z₂ + σN₂ the first coordinate is a clipped
/// Gaussian with mean `(1 + z₁ − z₂)/2` and standard deviation `σ/√2`
/// (the difference of two independent unit normals, halved, has standard
/// deviation 1/√2).  These are the `(z, σ)` at which
/// [`gaussian_sparsemax_density_k2`] describes the sampler's output law.
pub fn gaussian_sparsemax_k2_params(z1: f64, z2: f64, sigma: f64) -> (f64, f64) {
    ((1.0 + z1 - z2) / 2.0, sigma / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn test_same_seed_gives_identical_streams() {
        let spec = SamplerSpec::GumbelSoftmax {
            z: vec![0.3, -0.5, 1.0],
            beta: 0.7,
        };
        let a = spec.sample(&RngState::new(42), 50).unwrap();
        let b = spec.sample(&RngState::new(42), 50).unwrap();
        assert_eq!(a, b);
        let c = spec.sample(&RngState::new(43), 50).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn test_chunk_streams_are_distinct() {
        let spec = SamplerSpec::Dirichlet { alpha: vec![1.0, 1.0] };
        let base = RngState::new(7);
        let a = spec.sample(&base.chunk(0), 5).unwrap();
        let b = spec.sample(&base.chunk(1), 5).unwrap();
        assert_ne!(a, b);
        assert_eq!(base.chunk(3), base.chunk(3));
    }

    #[test]
    fn test_flat_dirichlet_mean_is_centroid() {
        let spec = SamplerSpec::Dirichlet {
            alpha: vec![1.0, 1.0, 1.0],
        };
        let n = 20_000;
        let samples = spec.sample(&RngState::new(1), n).unwrap();
        let mut mean = [0.0; 3];
        for s in &samples {
            for (m, &c) in mean.iter_mut().zip(s.coords()) {
                *m += c / n as f64;
            }
        }
        // std err of one coordinate of a flat Dirichlet ≈ sqrt(1/9 / 2 / n)
        let se = (2.0 / 36.0 / n as f64).sqrt();
        for m in mean {
            assert!(close(m, 1.0 / 3.0, 3.0 * se), "mean {m}");
        }
    }

    #[test]
    fn test_interior_samplers_stay_interior() {
        let specs = [
            SamplerSpec::Dirichlet {
                alpha: vec![0.5, 2.0, 1.0],
            },
            SamplerSpec::GaussianSoftmax {
                z: vec![0.0, 1.0, -1.0],
                sigma: 2.0,
            },
            SamplerSpec::GumbelSoftmax {
                z: vec![0.0, 1.0, -1.0],
                beta: 0.5,
            },
        ];
        for spec in &specs {
            for s in spec.sample(&RngState::new(5), 2_000).unwrap() {
                assert!(s.coords().iter().all(|&c| c > 0.0), "{spec:?}");
            }
        }
    }

    #[test]
    fn test_clipping_samplers_reach_the_boundary() {
        let spec = SamplerSpec::GaussianSparsemax {
            z: vec![0.0, 0.0],
            sigma: 1.0,
        };
        let samples = spec.sample(&RngState::new(11), 300).unwrap();
        assert!(samples
            .iter()
            .any(|s| s.coords().iter().any(|&c| c == 0.0)));
        let spec = SamplerSpec::HardConcrete {
            z: vec![0.0, 0.0],
            beta: 1.0,
            lambda: 3.0,
        };
        let samples = spec.sample(&RngState::new(11), 300).unwrap();
        assert!(samples
            .iter()
            .any(|s| s.coords().iter().any(|&c| c == 0.0)));
    }

    #[test]
    fn test_hard_concrete_lambda_one_reduces_to_gumbel_softmax() {
        // λ = 1 stretches by nothing and sparsemax fixes interior points,
        // so with the same RNG the draws agree coordinate-wise.
        let z = vec![0.4, -0.1, 0.8];
        let hc = SamplerSpec::HardConcrete {
            z: z.clone(),
            beta: 0.9,
            lambda: 1.0,
        };
        let gs = SamplerSpec::GumbelSoftmax { z, beta: 0.9 };
        let a = hc.sample(&RngState::new(3), 200).unwrap();
        let b = gs.sample(&RngState::new(3), 200).unwrap();
        for (x, y) in a.iter().zip(&b) {
            for (u, v) in x.coords().iter().zip(y.coords()) {
                assert!(close(*u, *v, 1e-12));
            }
        }
    }

    #[test]
    fn test_spec_validation_rejects_bad_parameters() {
        assert!(matches!(
            SamplerSpec::Dirichlet { alpha: vec![1.0, -0.5] }.validate(),
            Err(Error::BadSpec(_))
        ));
        assert!(SamplerSpec::Dirichlet { alpha: vec![] }.validate().is_err());
        assert!(SamplerSpec::GaussianSoftmax { z: vec![0.0], sigma: 0.0 }
            .validate()
            .is_err());
        assert!(SamplerSpec::GumbelSoftmax { z: vec![0.0], beta: -1.0 }
            .validate()
            .is_err());
        assert!(SamplerSpec::HardConcrete {
            z: vec![0.0],
            beta: 1.0,
            lambda: 0.5
        }
        .validate()
        .is_err());
        assert!(SamplerSpec::GaussianSparsemax {
            z: vec![0.0, f64::NAN],
            sigma: 1.0
        }
        .validate()
        .is_err());
        let ok = SamplerSpec::GaussianSparsemax {
            z: vec![0.5, 0.5],
            sigma: 1.0,
        };
        assert!(ok.validate().is_ok());
        assert!(ok.sample(&RngState::new(0), 0).is_err());
    }

    #[test]
    fn test_spec_json_round_trip() {
        let spec = SamplerSpec::GaussianSparsemax {
            z: vec![0.5, 0.5],
            sigma: 1.0,
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"kind\":\"gaussian_sparsemax\""));
        let back: SamplerSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
        let parsed: SamplerSpec =
            serde_json::from_str(r#"{"kind":"dirichlet","alpha":[1.0,2.0]}"#).unwrap();
        assert_eq!(
            parsed,
            SamplerSpec::Dirichlet { alpha: vec![1.0, 2.0] }
        );
    }

    #[test]
    fn test_flat_dirichlet_density_is_constant_factorial() {
        let p = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        let d = dirichlet_density(&p, &[1.0, 1.0, 1.0]).unwrap();
        assert!(close(d, 2.0, 1e-12));
    }

    #[test]
    fn test_dirichlet_density_beta_two_one() {
        // Beta(2, 1) has density 2y on [0, 1].
        let p = SimplexPoint::new(vec![0.6, 0.4]).unwrap();
        let d = dirichlet_density(&p, &[2.0, 1.0]).unwrap();
        assert!(close(d, 1.2, 1e-12));
    }

    #[test]
    fn test_dirichlet_density_boundary_rules() {
        let p = SimplexPoint::new(vec![0.0, 1.0]).unwrap();
        // α_1 ≠ 1 at a zero coordinate: undefined.
        match dirichlet_density(&p, &[2.0, 1.0]) {
            Err(Error::BoundaryEvaluation { index }) => assert_eq!(index, 1),
            other => panic!("expected boundary error, got {other:?}"),
        }
        // Flat α is fine on the boundary: constant (K−1)!.
        assert!(close(dirichlet_density(&p, &[1.0, 1.0]).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn test_gumbel_softmax_density_symmetric_point() {
        let p = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
        let d = gumbel_softmax_density(&p, &[0.0, 0.0], 1.0).unwrap();
        assert!(close(d, 1.0, 1e-12), "{d}");
    }

    #[test]
    fn test_gumbel_softmax_density_rejects_boundary() {
        let p = SimplexPoint::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            gumbel_softmax_density(&p, &[0.0, 0.0], 1.0),
            Err(Error::BoundaryEvaluation { index: 2 })
        ));
    }

    #[test]
    fn test_gaussian_sparsemax_k2_symmetry_and_value() {
        let (p0, p1, _) = gaussian_sparsemax_density_k2(0.3, 0.5, 1.0).unwrap();
        assert!(close(p0, p1, 1e-15));
        // Φ(−1/2), a standard normal table value.
        assert!(close(p0, 0.308_537_538_725_987, 1e-12), "{p0}");
        let (_, _, n) = gaussian_sparsemax_density_k2(0.5, 0.5, 1.0).unwrap();
        assert!(close(n, 1.0 / (2.0 * std::f64::consts::PI).sqrt(), 1e-15));
    }

    #[test]
    fn test_k2_effective_params_match_sparsemax_algebra() {
        // sparsemax([a, b]) = [clip((1+a−b)/2), ...] — the identity behind
        // gaussian_sparsemax_k2_params.
        for (a, b) in [(0.3, -0.2), (2.5, 0.0), (-1.0, 1.5), (0.0, 0.0)] {
            let y = sparsemax(&[a, b]).unwrap();
            let closed = ((1.0 + a - b) / 2.0).clamp(0.0, 1.0);
            assert!(close(y.coords()[0], closed, 1e-15));
        }
        let (ze, se) = gaussian_sparsemax_k2_params(0.5, 0.5, 1.0);
        assert!(close(ze, 0.5, 0.0));
        assert!(close(se, 1.0 / 2.0f64.sqrt(), 0.0));
    }
}
