//! Distributions that mix point masses on faces with densities inside them.
//!
//! A mixed distribution on Δ_{K−1} is a probability mass function P_F over
//! faces together with a conditional density on each face:
//!
//! ```text
//! p(y) = P_F(f) · p(y | F = f)      where f is the face containing y
//! ```
//!
//! Purely discrete distributions (all mass on vertices) and purely
//! continuous ones (all mass on the maximal face) are the two extreme
//! cases.  Three conditional families are supported:
//!
//! * `Flat` — constant density 1/vol(f) on the face;
//! * `TruncatedGaussianK2` — on a two-vertex face, the coordinate of the
//!   smaller index follows N(z, σ²) conditioned on (0, 1);
//! * `Empirical` — a list of sample points on the face (no closed-form
//!   density; usable for estimation).
//!
//! [`estimate_face_probs`] recovers P_F from any sampler by Monte Carlo,
//! binning draws with [`face_of`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{normal_cdf, normal_pdf, truncated_std_normal_moments};
use crate::samplers::{RngState, SamplerSpec};
use crate::simplex::{face_of, face_volume, Face, SimplexPoint};
use crate::tol;

/// Per-face conditional density descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Conditional {
    /// Constant density on the face; integrates to 1 against the face's
    /// volume by construction.
    Flat,
    /// On a face with exactly two vertices {i, j}, i < j: coordinate i is
    /// N(z, σ²) conditioned on the open interval (0, 1).
    TruncatedGaussianK2 { z: f64, sigma: f64 },
    /// Sample points lying on the face.
    Empirical { samples: Vec<SimplexPoint> },
}

/// Face mass function plus conditionals; the atoms-and-densities form of a
/// distribution on the simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MixedDistJson", into = "MixedDistJson")]
pub struct MixedDistribution {
    k: u32,
    entries: BTreeMap<u64, (f64, Conditional)>,
}

#[derive(Serialize, Deserialize)]
struct FaceEntryJson {
    indices: Vec<u32>,
    mass: f64,
    conditional: Conditional,
}

#[derive(Serialize, Deserialize)]
struct MixedDistJson {
    #[serde(rename = "K")]
    k: u32,
    faces: Vec<FaceEntryJson>,
}

impl TryFrom<MixedDistJson> for MixedDistribution {
    type Error = Error;
    fn try_from(j: MixedDistJson) -> Result<Self> {
        let entries = j
            .faces
            .into_iter()
            .map(|e| Ok((Face::from_indices(&e.indices)?, e.mass, e.conditional)))
            .collect::<Result<Vec<_>>>()?;
        MixedDistribution::new(j.k, entries)
    }
}

impl From<MixedDistribution> for MixedDistJson {
    fn from(d: MixedDistribution) -> Self {
        MixedDistJson {
            k: d.k,
            faces: d
                .entries
                .into_iter()
                .map(|(mask, (mass, conditional))| FaceEntryJson {
                    indices: Face::from_mask(mask).expect("stored masks are non-empty").indices(),
                    mass,
                    conditional,
                })
                .collect(),
        }
    }
}

impl MixedDistribution {
    /// Build a distribution from `(face, mass, conditional)` entries.
    /// Masses must be non-negative and sum to 1 within
    /// [`tol::MASS_SUM`]; each conditional must fit its face.
    pub fn new(k: u32, entries: Vec<(Face, f64, Conditional)>) -> Result<Self> {
        if k == 0 || k > tol::HARD_MAX_K {
            return Err(Error::InvalidArgument(format!(
                "alphabet size {k} outside 1..={}",
                tol::HARD_MAX_K
            )));
        }
        let mut map = BTreeMap::new();
        let mut total = 0.0;
        for (face, mass, conditional) in entries {
            if face.min_k() > k as usize {
                return Err(Error::InvalidArgument(format!(
                    "face {face} does not fit alphabet size {k}"
                )));
            }
            if !(mass.is_finite() && mass >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "mass for face {face} must be finite and non-negative, got {mass}"
                )));
            }
            match &conditional {
                Conditional::Flat => {}
                Conditional::TruncatedGaussianK2 { z, sigma } => {
                    if face.num_vertices() != 2 {
                        return Err(Error::InvalidArgument(format!(
                            "truncated-Gaussian conditional needs a two-vertex face, got {face}"
                        )));
                    }
                    if !z.is_finite() || !(sigma.is_finite() && *sigma > 0.0) {
                        return Err(Error::InvalidArgument(format!(
                            "truncated-Gaussian parameters must be finite with sigma > 0, \
                             got z={z}, sigma={sigma}"
                        )));
                    }
                }
                Conditional::Empirical { samples } => {
                    if samples.is_empty() {
                        return Err(Error::InvalidArgument(format!(
                            "empirical conditional on face {face} has no samples"
                        )));
                    }
                    for s in samples {
                        if s.k() != k as usize {
                            return Err(Error::InvalidArgument(format!(
                                "empirical sample dimension {} does not match K={k}",
                                s.k()
                            )));
                        }
                        let sf = face_of(s, tol::FACE_DEFAULT)?;
                        if !sf.is_subface_of(&face) {
                            return Err(Error::InvalidArgument(format!(
                                "empirical sample lies on {sf}, not within {face}"
                            )));
                        }
                    }
                }
            }
            if map.insert(face.mask(), (mass, conditional)).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate face {face}")));
            }
            total += mass;
        }
        if (total - 1.0).abs() > tol::MASS_SUM {
            return Err(Error::InvalidArgument(format!(
                "face masses sum to {total}, not 1 (tolerance {})",
                tol::MASS_SUM
            )));
        }
        Ok(MixedDistribution { k, entries: map })
    }

    /// Alphabet size K.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of faces carrying an entry (including explicit zero-mass ones).
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Iterate over `(face, mass, conditional)` in face order.
    pub fn iter(&self) -> impl Iterator<Item = (Face, f64, &Conditional)> {
        self.entries.iter().map(|(&mask, (mass, cond))| {
            (
                Face::from_mask(mask).expect("stored masks are non-empty"),
                *mass,
                cond,
            )
        })
    }

    /// Mass of one face; zero when the face carries no entry.
    pub fn mass_of(&self, face: Face) -> f64 {
        self.entries.get(&face.mask()).map_or(0.0, |(m, _)| *m)
    }

    /// Conditional attached to a face, if any.
    pub fn conditional_of(&self, face: Face) -> Option<&Conditional> {
        self.entries.get(&face.mask()).map(|(_, c)| c)
    }

    /// Density at a point: the face mass times the conditional density on
    /// the face found by [`face_of`] with tolerance `tol`.  Faces without an
    /// entry have density 0.
    pub fn density(&self, p: &SimplexPoint, tol: f64) -> Result<f64> {
        if p.k() != self.k as usize {
            return Err(Error::InvalidArgument(format!(
                "point dimension {} does not match K={}",
                p.k(),
                self.k
            )));
        }
        let face = face_of(p, tol)?;
        let Some((mass, conditional)) = self.entries.get(&face.mask()) else {
            return Ok(0.0);
        };
        let cond_density = match conditional {
            Conditional::Flat => 1.0 / face_volume(face),
            Conditional::TruncatedGaussianK2 { z, sigma } => {
                let i = face
                    .coord_positions()
                    .next()
                    .expect("faces are non-empty");
                let y = p.coords()[i];
                let p0 = normal_cdf(-z / sigma);
                let p1 = normal_cdf((z - 1.0) / sigma);
                normal_pdf((y - z) / sigma) / sigma / (1.0 - p0 - p1)
            }
            Conditional::Empirical { .. } => return Err(Error::NoDensityForm),
        };
        Ok(mass * cond_density)
    }

    /// Expectation E[Y] via the law of total expectation: the face-mass
    /// weighted average of per-face conditional means.  Flat and
    /// truncated-Gaussian means are closed-form; empirical conditionals are
    /// bootstrap-averaged with `n_mc` draws from `rng`.
    pub fn expectation(&self, n_mc: usize, rng: &RngState) -> Result<SimplexPoint> {
        let mut mean = vec![0.0; self.k as usize];
        let mut r = rng.rng();
        for (face, mass, conditional) in self.iter() {
            if mass == 0.0 {
                continue;
            }
            match conditional {
                Conditional::Flat => {
                    let w = mass / face.num_vertices() as f64;
                    for i in face.coord_positions() {
                        mean[i] += w;
                    }
                }
                Conditional::TruncatedGaussianK2 { z, sigma } => {
                    let a = (0.0 - z) / sigma;
                    let b = (1.0 - z) / sigma;
                    let (_, std_mean, _) = truncated_std_normal_moments(a, b);
                    let m = z + sigma * std_mean;
                    let mut pos = face.coord_positions();
                    let i = pos.next().expect("two-vertex face");
                    let j = pos.next().expect("two-vertex face");
                    mean[i] += mass * m;
                    mean[j] += mass * (1.0 - m);
                }
                Conditional::Empirical { samples } => {
                    if n_mc == 0 {
                        return Err(Error::InvalidArgument(
                            "empirical conditional needs n_mc >= 1 draws".into(),
                        ));
                    }
                    use rand::Rng;
                    let w = mass / n_mc as f64;
                    for _ in 0..n_mc {
                        let s = &samples[r.gen_range(0..samples.len())];
                        for (mi, &c) in mean.iter_mut().zip(s.coords()) {
                            *mi += w * c;
                        }
                    }
                }
            }
        }
        SimplexPoint::new(mean)
    }
}

/// Face-binned counts from a Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceHistogram {
    k: u32,
    tol: f64,
    total: u64,
    #[serde(serialize_with = "serialize_counts")]
    counts: BTreeMap<u64, u64>,
}

fn serialize_counts<S: serde::Serializer>(
    counts: &BTreeMap<u64, u64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(counts.len()))?;
    #[derive(Serialize)]
    struct Row {
        indices: Vec<u32>,
        count: u64,
    }
    for (&mask, &count) in counts {
        let indices = Face::from_mask(mask).expect("stored masks are non-empty").indices();
        seq.serialize_element(&Row { indices, count })?;
    }
    seq.end()
}

impl FaceHistogram {
    /// Alphabet size of the binned points.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Total number of binned samples.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// The `face_of` tolerance used for binning.
    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Iterate over `(face, count)` with non-zero counts, in face order.
    pub fn iter(&self) -> impl Iterator<Item = (Face, u64)> + '_ {
        self.counts.iter().map(|(&mask, &count)| {
            (
                Face::from_mask(mask).expect("stored masks are non-empty"),
                count,
            )
        })
    }

    /// Empirical probability of a face.
    pub fn p_hat(&self, face: Face) -> f64 {
        let c = self.counts.get(&face.mask()).copied().unwrap_or(0);
        c as f64 / self.total as f64
    }

    /// Binomial standard error √(p̂(1−p̂)/n) of one face probability.
    pub fn std_err(&self, face: Face) -> f64 {
        let p = self.p_hat(face);
        (p * (1.0 - p) / self.total as f64).sqrt()
    }

    /// Empirical face mass function as a [`MixedDistribution`] with flat
    /// conditionals (for entropy and divergence estimates).
    pub fn to_flat_distribution(&self) -> Result<MixedDistribution> {
        let entries = self
            .iter()
            .map(|(face, count)| {
                (
                    face,
                    count as f64 / self.total as f64,
                    Conditional::Flat,
                )
            })
            .collect();
        MixedDistribution::new(self.k, entries)
    }
}

/// Draw `n` samples from `spec` and bin them by face with tolerance `tol`.
///
/// Sampling is chunked (4096 draws per substream of `rng`), so the result
/// depends only on `(spec, n, tol, rng)` and never on scheduling.
pub fn estimate_face_probs(
    spec: &SamplerSpec,
    n: u64,
    tol_face: f64,
    rng: &RngState,
) -> Result<FaceHistogram> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    const CHUNK: u64 = 4096;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut remaining = n;
    let mut chunk_index = 0u64;
    while remaining > 0 {
        let m = remaining.min(CHUNK);
        let mut r = rng.chunk(chunk_index).rng();
        for _ in 0..m {
            let p = spec.draw(&mut r);
            let face = face_of(&p, tol_face)?;
            *counts.entry(face.mask()).or_insert(0) += 1;
        }
        remaining -= m;
        chunk_index += 1;
    }
    Ok(FaceHistogram {
        k: spec.k() as u32,
        tol: tol_face,
        total: n,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::gaussian_sparsemax_k2_params;
    use crate::simplex::FaceLattice;

    fn face(indices: &[u32]) -> Face {
        Face::from_indices(indices).unwrap()
    }

    #[test]
    fn test_masses_must_sum_to_one() {
        let err = MixedDistribution::new(
            2,
            vec![
                (face(&[1]), 0.5, Conditional::Flat),
                (face(&[2]), 0.4, Conditional::Flat),
            ],
        );
        assert!(err.is_err());
        let ok = MixedDistribution::new(
            2,
            vec![
                (face(&[1]), 0.5, Conditional::Flat),
                (face(&[2]), 0.5, Conditional::Flat),
            ],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn test_truncated_gaussian_requires_an_edge() {
        let err = MixedDistribution::new(
            3,
            vec![(
                face(&[1, 2, 3]),
                1.0,
                Conditional::TruncatedGaussianK2 { z: 0.5, sigma: 0.3 },
            )],
        );
        assert!(err.is_err());
    }

    #[test]
    fn test_purely_discrete_density_returns_vertex_mass() {
        let d = MixedDistribution::new(
            3,
            vec![
                (face(&[1]), 0.2, Conditional::Flat),
                (face(&[2]), 0.3, Conditional::Flat),
                (face(&[3]), 0.5, Conditional::Flat),
            ],
        )
        .unwrap();
        let v = SimplexPoint::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(d.density(&v, 1e-9).unwrap(), 0.3);
        // A face with no entry has zero density.
        let edge = SimplexPoint::new(vec![0.5, 0.5, 0.0]).unwrap();
        assert_eq!(d.density(&edge, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn test_flat_density_on_maximal_face_is_factorial() {
        let d = MixedDistribution::new(
            3,
            vec![(face(&[1, 2, 3]), 1.0, Conditional::Flat)],
        )
        .unwrap();
        let p = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert!((d.density(&p, 1e-9).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn test_truncated_gaussian_density_matches_rectified_form() {
        // Gaussian-sparsemax K=2 re-expressed as atoms + truncated Gaussian:
        // at interior y the product P_F(edge) · N/(1−P0−P1) equals N itself.
        let (z, sigma) = (0.5, 0.3);
        let p0 = normal_cdf(-z / sigma);
        let p1 = normal_cdf((z - 1.0) / sigma);
        let pc = 1.0 - p0 - p1;
        let d = MixedDistribution::new(
            2,
            vec![
                (face(&[1]), p1, Conditional::Flat), // y = (1, 0) means y₁ = 1
                (face(&[2]), p0, Conditional::Flat),
                (
                    face(&[1, 2]),
                    pc,
                    Conditional::TruncatedGaussianK2 { z, sigma },
                ),
            ],
        )
        .unwrap();
        let y = 0.42;
        let p = SimplexPoint::new(vec![y, 1.0 - y]).unwrap();
        let expect = normal_pdf((y - z) / sigma) / sigma;
        assert!((d.density(&p, 1e-9).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn test_empirical_conditional_has_no_density() {
        let samples = vec![SimplexPoint::new(vec![0.4, 0.6]).unwrap()];
        let d = MixedDistribution::new(
            2,
            vec![(face(&[1, 2]), 1.0, Conditional::Empirical { samples })],
        )
        .unwrap();
        let p = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(d.density(&p, 1e-9), Err(Error::NoDensityForm)));
    }

    #[test]
    fn test_expectation_uniform_vertices_is_centroid() {
        let third = 1.0 / 3.0;
        let d = MixedDistribution::new(
            3,
            vec![
                (face(&[1]), third, Conditional::Flat),
                (face(&[2]), third, Conditional::Flat),
                (face(&[3]), third, Conditional::Flat),
            ],
        )
        .unwrap();
        let e = d.expectation(0, &RngState::new(0)).unwrap();
        for &c in e.coords() {
            assert!((c - third).abs() < 1e-12);
        }
    }

    #[test]
    fn test_expectation_mixed_vertex_and_edge() {
        let d = MixedDistribution::new(
            3,
            vec![
                (face(&[1]), 0.5, Conditional::Flat),
                (face(&[1, 2]), 0.5, Conditional::Flat),
            ],
        )
        .unwrap();
        let e = d.expectation(0, &RngState::new(0)).unwrap();
        let want = [0.75, 0.25, 0.0];
        for (c, w) in e.coords().iter().zip(want) {
            assert!((c - w).abs() < 1e-12);
        }
    }

    #[test]
    fn test_expectation_truncated_gaussian_is_symmetric_at_half() {
        let d = MixedDistribution::new(
            2,
            vec![(
                face(&[1, 2]),
                1.0,
                Conditional::TruncatedGaussianK2 { z: 0.5, sigma: 0.4 },
            )],
        )
        .unwrap();
        let e = d.expectation(0, &RngState::new(0)).unwrap();
        assert!((e.coords()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn test_interior_sampler_histogram_is_all_maximal_face() {
        let spec = SamplerSpec::Dirichlet {
            alpha: vec![1.0, 1.0, 1.0],
        };
        let h = estimate_face_probs(&spec, 3_000, 1e-9, &RngState::new(2)).unwrap();
        let lattice = FaceLattice::new(3).unwrap();
        assert_eq!(h.p_hat(lattice.full_face()), 1.0);
        assert_eq!(h.total(), 3_000);
    }

    #[test]
    fn test_face_histogram_matches_clipped_gaussian_mass() {
        let (z1, z2, sigma) = (0.5, 0.5, 1.0);
        let spec = SamplerSpec::GaussianSparsemax {
            z: vec![z1, z2],
            sigma,
        };
        let n = 40_000;
        let h = estimate_face_probs(&spec, n, 1e-9, &RngState::new(9)).unwrap();
        // P(y₁ = 0) from the scalar law of the first coordinate.
        let (ze, se) = gaussian_sparsemax_k2_params(z1, z2, sigma);
        let p0 = normal_cdf(-ze / se);
        let f2 = face(&[2]); // y₁ = 0 means all mass on vertex 2
        assert!(
            (h.p_hat(f2) - p0).abs() <= 3.0 * h.std_err(f2),
            "p_hat {} vs {}",
            h.p_hat(f2),
            p0
        );
    }

    #[test]
    fn test_histogram_is_chunk_deterministic() {
        let spec = SamplerSpec::GaussianSparsemax {
            z: vec![0.2, 0.8],
            sigma: 0.7,
        };
        let a = estimate_face_probs(&spec, 10_000, 1e-9, &RngState::new(4)).unwrap();
        let b = estimate_face_probs(&spec, 10_000, 1e-9, &RngState::new(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn test_json_round_trip_and_schema_shape() {
        let d = MixedDistribution::new(
            2,
            vec![
                (face(&[2]), 0.25, Conditional::Flat),
                (
                    face(&[1, 2]),
                    0.75,
                    Conditional::TruncatedGaussianK2 { z: 0.4, sigma: 0.2 },
                ),
            ],
        )
        .unwrap();
        let json = serde_json::to_value(&d).unwrap();
        assert_eq!(json["K"], 2);
        assert_eq!(json["faces"][0]["indices"], serde_json::json!([2]));
        assert_eq!(json["faces"][1]["conditional"]["type"], "truncated_gaussian_k2");
        let back: MixedDistribution = serde_json::from_value(json).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn test_json_rejects_bad_mass_sum() {
        let bad = r#"{"K":2,"faces":[{"indices":[1],"mass":0.9,"conditional":{"type":"flat"}}]}"#;
        assert!(serde_json::from_str::<MixedDistribution>(bad).is_err());
    }
}
