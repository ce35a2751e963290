//! Points, faces, and the direct-sum measure of the probability simplex.
//!
//! The simplex over K symbols is
//!
//! ```text
//! Δ_{K−1} = { y ∈ ℝ^K : y_k ≥ 0, Σ_k y_k = 1 }.
//! ```
//!
//! Each non-empty index set I ⊆ {1..K} names a face — the convex hull of the
//! vertices listed in I — and the simplex is the *disjoint* union of the
//! relative interiors of its 2^K − 1 faces: every point belongs to exactly
//! one face, the one indexed by its support.  Faces are ordered by inclusion
//! of their index sets, forming a lattice.
//!
//! Distributions that put mass on several faces need a reference measure
//! that sees every face at its own dimension.  We use the direct sum of
//! per-face Lebesgue measures, with each face of k vertices parametrized by
//! dropping one coordinate (the remaining k−1 free coordinates range over a
//! corner region of volume 1/(k−1)!):
//!
//! ```text
//! vol(face with k vertices) = 1/(k−1)!          (counting measure, 1, at k=1)
//! μ(S) = Σ_{f ∈ S} vol(f)                        for a set S of faces
//! ```
//!
//! The measure of a face set is additive over disjoint unions by
//! construction; [`FaceSet::measure`] keeps that additivity exact in
//! floating point by accumulating integer multiples of a common denominator
//! whenever the factorials fit in 128 bits.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// A point on the probability simplex: non-negative coordinates summing to 1
/// within [`tol::POINT_SUM`].
///
/// The constructor renormalizes inputs whose sum is within
/// [`tol::POINT_RENORMALIZE`] of 1 and rejects anything worse, so every
/// value of this type is a valid point.
///
/// # Example
///
/// ```
/// use mixed_simplex::SimplexPoint;
///
/// let p = SimplexPoint::new(vec![0.2, 0.8]).unwrap();
/// assert_eq!(p.coords(), &[0.2, 0.8]);
/// assert!(SimplexPoint::new(vec![0.2, 0.9]).is_err());
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    /// Validates and renormalizes `coords` into a simplex point.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint("empty coordinate vector".into()));
        }
        for (i, &c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::InvalidPoint(format!(
                    "coordinate {i} is not finite: {c}"
                )));
            }
            if c < 0.0 {
                return Err(Error::InvalidPoint(format!(
                    "coordinate {i} is negative: {c}"
                )));
            }
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > tol::POINT_RENORMALIZE {
            return Err(Error::InvalidPoint(format!(
                "coordinates sum to {sum}, more than {} away from 1",
                tol::POINT_RENORMALIZE
            )));
        }
        let mut coords = coords;
        // Renormalize only when the defect exceeds what a renormalization
        // itself can leave behind (one rounding per coordinate plus the
        // final sum).  This makes construction idempotent, so stored
        // points deserialize bit-for-bit.
        if (sum - 1.0).abs() > coords.len() as f64 * f64::EPSILON {
            for c in &mut coords {
                *c /= sum;
            }
        }
        Ok(Self(coords))
    }

    /// Wraps coordinates that are already exactly normalized by
    /// construction (transform and sampler outputs divide by their sum).
    pub(crate) fn new_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        debug_assert!(coords.iter().all(|c| c.is_finite() && *c >= 0.0));
        debug_assert!((coords.iter().sum::<f64>() - 1.0).abs() <= tol::POINT_SUM);
        Self(coords)
    }

    /// The vertex e_i of Δ_{K−1} (0-based coordinate `i`).
    pub fn vertex(k: usize, i: usize) -> Result<Self> {
        if k == 0 || i >= k {
            return Err(Error::InvalidPoint(format!(
                "vertex index {i} out of range for K={k}"
            )));
        }
        let mut coords = vec![0.0; k];
        coords[i] = 1.0;
        Ok(Self(coords))
    }

    /// The barycenter (1/K, ..., 1/K).
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPoint("K must be at least 1".into()));
        }
        Ok(Self(vec![1.0 / k as f64; k]))
    }

    /// Number of symbols K.
    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// Coordinate slice.
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Consumes the point, returning its coordinates.
    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// The face whose relative interior contains this point, reading
    /// coordinates at or below `tol` as zero.  See [`face_of`].
    pub fn face(&self, tol: f64) -> Result<Face> {
        face_of(self, tol)
    }
}

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(p: SimplexPoint) -> Self {
        p.0
    }
}

/// A non-empty face of Δ_{K−1}, stored as a bitmask over the K symbols:
/// bit i set means symbol i+1 is a vertex of the face.
///
/// Serializes as the sorted list of member indices, 1-based, e.g. the edge
/// between the first two vertices is `[1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Face {
    mask: u64,
}

impl Face {
    /// Builds a face from a non-zero bitmask.
    pub fn from_mask(mask: u64) -> Result<Self> {
        if mask == 0 {
            return Err(Error::InvalidArgument(
                "a face needs at least one vertex (empty bitmask)".into(),
            ));
        }
        Ok(Self { mask })
    }

    /// Builds a face from 1-based symbol indices (the JSON encoding).
    pub fn from_indices(indices: &[u32]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument(
                "a face needs at least one vertex (empty index list)".into(),
            ));
        }
        let mut mask = 0u64;
        for &i in indices {
            if i == 0 || i > u64::BITS {
                return Err(Error::InvalidArgument(format!(
                    "face index {i} outside 1..={}",
                    u64::BITS
                )));
            }
            mask |= 1u64 << (i - 1);
        }
        Ok(Self { mask })
    }

    /// The vertex face of symbol `i` (0-based).
    pub fn singleton(i: usize) -> Face {
        debug_assert!(i < u64::BITS as usize);
        Face { mask: 1u64 << i }
    }

    /// Raw bitmask.
    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Sorted 1-based member indices (the JSON encoding).
    pub fn indices(&self) -> Vec<u32> {
        (0..u64::BITS)
            .filter(|b| self.mask & (1u64 << b) != 0)
            .map(|b| b + 1)
            .collect()
    }

    /// 0-based coordinate positions of the member vertices, ascending.
    pub fn coord_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..u64::BITS as usize).filter(|b| self.mask & (1u64 << b) != 0)
    }

    /// Number of vertices k spanning the face.
    pub fn num_vertices(&self) -> u32 {
        self.mask.count_ones()
    }

    /// Affine dimension, k − 1.
    pub fn dim(&self) -> u32 {
        self.num_vertices() - 1
    }

    /// Whether the 0-based coordinate `i` is a vertex of the face.
    pub fn contains_position(&self, i: usize) -> bool {
        i < u64::BITS as usize && self.mask & (1u64 << i) != 0
    }

    /// Face-lattice partial order: is every vertex of `self` a vertex of
    /// `other`?
    pub fn is_subface_of(&self, other: &Face) -> bool {
        self.mask & !other.mask == 0
    }

    /// Largest symbol index (1-based) used by the face; the smallest K it
    /// can live in.
    pub fn min_k(&self) -> usize {
        (u64::BITS - self.mask.leading_zeros()) as usize
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.indices().iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl TryFrom<Vec<u32>> for Face {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        Self::from_indices(&v)
    }
}

impl From<Face> for Vec<u32> {
    fn from(f: Face) -> Self {
        f.indices()
    }
}

/// Reads off the face whose relative interior contains `p`: the set of
/// coordinates strictly above `tol`.
///
/// `tol` must lie in [0, 1); callers that keep `tol < 1/K` are guaranteed a
/// non-degenerate answer because the largest coordinate is at least 1/K.
/// With larger tolerances every coordinate can fall at or below `tol`, which
/// is reported as [`Error::DegeneratePoint`].
pub fn face_of(p: &SimplexPoint, tol: f64) -> Result<Face> {
    if !(0.0..1.0).contains(&tol) {
        return Err(Error::InvalidArgument(format!(
            "face tolerance {tol} outside [0, 1)"
        )));
    }
    if p.k() > u64::BITS as usize {
        return Err(Error::KTooLarge {
            k: p.k(),
            cap: u64::BITS as usize,
            operation: "face bitmasks",
        });
    }
    let mut mask = 0u64;
    for (i, &c) in p.coords().iter().enumerate() {
        if c > tol {
            mask |= 1u64 << i;
        }
    }
    if mask == 0 {
        return Err(Error::DegeneratePoint { tol });
    }
    Ok(Face { mask })
}

/// Volume of a face with k vertices under its dropped-coordinate
/// parametrization: 1/(k−1)!, with vertices (k = 1) counted with measure 1.
pub fn face_volume(f: Face) -> f64 {
    1.0 / factorial_f64(f.num_vertices() as u64 - 1)
}

fn factorial_f64(n: u64) -> f64 {
    (2..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// A finite set of faces of a common Δ_{K−1}, closed under the Boolean
/// set algebra whose universe is all 2^K − 1 non-empty faces.
///
/// Serializes as an array of faces (each a sorted 1-based index list).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(into = "Vec<Face>")]
pub struct FaceSet {
    k: u32,
    faces: BTreeSet<u64>,
}

impl FaceSet {
    /// The empty set of faces of Δ_{K−1}.
    pub fn empty(k: u32) -> Result<Self> {
        check_k(k)?;
        Ok(Self {
            k,
            faces: BTreeSet::new(),
        })
    }

    /// Builds a face set, checking every face fits inside Δ_{K−1}.
    pub fn new(k: u32, faces: impl IntoIterator<Item = Face>) -> Result<Self> {
        let mut s = Self::empty(k)?;
        for f in faces {
            s.insert(f)?;
        }
        Ok(s)
    }

    /// Parses nested 1-based index lists (the JSON encoding) against K.
    pub fn from_index_lists(k: u32, lists: &[Vec<u32>]) -> Result<Self> {
        Self::new(
            k,
            lists
                .iter()
                .map(|l| Face::from_indices(l))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// All 2^K − 1 faces.  Subject to the lattice-enumeration cap.
    pub fn full(k: u32) -> Result<Self> {
        let faces = FaceLattice::new(k)?.enumerate().map(|f| f.mask).collect();
        Ok(Self { k, faces })
    }

    /// Alphabet size K the faces live in.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Inserts a face; errors if it uses symbols beyond K.
    pub fn insert(&mut self, f: Face) -> Result<()> {
        if f.min_k() > self.k as usize {
            return Err(Error::InvalidArgument(format!(
                "face {f} does not fit in a {}-symbol simplex",
                self.k
            )));
        }
        self.faces.insert(f.mask);
        Ok(())
    }

    pub fn contains(&self, f: Face) -> bool {
        self.faces.contains(&f.mask)
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Member faces in ascending bitmask order.
    pub fn iter(&self) -> impl Iterator<Item = Face> + '_ {
        self.faces.iter().map(|&mask| Face { mask })
    }

    /// Set union; the two sets must share K.
    pub fn union(&self, other: &FaceSet) -> Result<FaceSet> {
        self.check_same_k(other)?;
        Ok(FaceSet {
            k: self.k,
            faces: self.faces.union(&other.faces).copied().collect(),
        })
    }

    /// Set intersection; the two sets must share K.
    pub fn intersection(&self, other: &FaceSet) -> Result<FaceSet> {
        self.check_same_k(other)?;
        Ok(FaceSet {
            k: self.k,
            faces: self.faces.intersection(&other.faces).copied().collect(),
        })
    }

    /// Set difference; the two sets must share K.
    pub fn difference(&self, other: &FaceSet) -> Result<FaceSet> {
        self.check_same_k(other)?;
        Ok(FaceSet {
            k: self.k,
            faces: self.faces.difference(&other.faces).copied().collect(),
        })
    }

    /// Complement against the universe of all 2^K − 1 faces.  Subject to the
    /// lattice-enumeration cap.
    pub fn complement(&self) -> Result<FaceSet> {
        let lattice = FaceLattice::new(self.k)?;
        Ok(FaceSet {
            k: self.k,
            faces: lattice
                .enumerate()
                .map(|f| f.mask)
                .filter(|m| !self.faces.contains(m))
                .collect(),
        })
    }

    /// Direct-sum measure μ(S) = Σ_{f ∈ S} 1/(k_f − 1)!.
    ///
    /// For K ≤ 34 the sum is accumulated as an exact integer multiple of
    /// 1/(K−1)! so that the result is independent of iteration order and
    /// additive across disjoint unions without rounding drift.
    pub fn measure(&self) -> f64 {
        match self.measure_numerator() {
            Some((num, den)) => num as f64 / den as f64,
            None => self.iter().map(face_volume).sum(),
        }
    }

    /// Exact representation measure = numerator / (K−1)! when (K−1)! fits in
    /// u128.  Exposed to let exactness of σ-additivity be asserted directly.
    pub fn measure_numerator(&self) -> Option<(u128, u128)> {
        let den = factorial_u128(self.k as u128 - 1)?;
        let mut num: u128 = 0;
        for f in self.iter() {
            // den is divisible by every smaller factorial, so each term is
            // an exact integer.
            num += den / factorial_u128(f.num_vertices() as u128 - 1)?;
        }
        Some((num, den))
    }

    fn check_same_k(&self, other: &FaceSet) -> Result<()> {
        if self.k != other.k {
            return Err(Error::AlphabetMismatch {
                expected: self.k as usize,
                got: other.k as usize,
            });
        }
        Ok(())
    }
}

impl From<FaceSet> for Vec<Face> {
    fn from(s: FaceSet) -> Self {
        s.iter().collect()
    }
}

fn factorial_u128(n: u128) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 2..=n {
        acc = acc.checked_mul(i)?;
    }
    Some(acc)
}

/// Direct-sum measure of a face set; free-function alias of
/// [`FaceSet::measure`].
pub fn measure(s: &FaceSet) -> f64 {
    s.measure()
}

/// The lattice of all 2^K − 1 non-empty faces of Δ_{K−1}, ordered by
/// inclusion of index sets.
#[derive(Debug, Clone, Copy)]
pub struct FaceLattice {
    k: u32,
}

impl FaceLattice {
    /// Builds the lattice handle; K is capped (default 24, overridable via
    /// the `MIXEDSIMPLEX_MAX_K` environment variable) because enumeration
    /// walks all 2^K − 1 faces.
    pub fn new(k: u32) -> Result<Self> {
        check_k(k)?;
        let cap = tol::lattice_enumeration_cap();
        if k > cap {
            return Err(Error::KTooLarge {
                k: k as usize,
                cap: cap as usize,
                operation: "face-lattice enumeration",
            });
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of non-empty faces, 2^K − 1.
    pub fn len(&self) -> usize {
        (1usize << self.k) - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All faces in ascending bitmask order.
    pub fn enumerate(&self) -> impl Iterator<Item = Face> {
        (1..=full_mask(self.k)).map(|mask| Face { mask })
    }

    /// Partial order: is `f` a subface of `g` (index-set inclusion)?
    pub fn contains(&self, f: Face, g: Face) -> bool {
        f.is_subface_of(&g)
    }

    /// The maximal face, the closure of the open simplex.
    pub fn full_face(&self) -> Face {
        Face {
            mask: full_mask(self.k),
        }
    }
}

/// Bitmask of the maximal face of Δ_{K−1}.
pub(crate) fn full_mask(k: u32) -> u64 {
    debug_assert!(k >= 1 && k <= tol::HARD_MAX_K);
    u64::MAX >> (u64::BITS - k)
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    if k > tol::HARD_MAX_K {
        return Err(Error::KTooLarge {
            k: k as usize,
            cap: tol::HARD_MAX_K as usize,
            operation: "face bitmasks",
        });
    }
    Ok(())
}
