//! Deterministic maps from score vectors to the simplex.
//!
//! Each transform sends a logit vector z ∈ ℝ^K to a point of Δ_{K−1}, and
//! they differ in which faces their outputs can reach:
//!
//! ```text
//! softmax_β(z)_i  = exp(z_i/β) / Σ_j exp(z_j/β)        interior only
//! argmax(z)       = uniform over the tied maxima        vertices / tie faces
//! top-k softmax   = softmax on the k largest, 0 rest    k-vertex faces
//! sparsemax(z)    = argmin_{y ∈ Δ} ‖y − z‖²             any face
//! α-entmax(z)     = [1 + (α−1)(z − τ1)]_+^{1/(α−1)}     any face, α > 1
//! ```
//!
//! Sparsemax is the Euclidean projection onto the simplex, computed exactly
//! by the sort-and-threshold rule in O(K log K).  α-entmax generalizes both
//! extremes: α → 1 recovers softmax and α = 2 is sparsemax; its normalizing
//! threshold τ has no closed form for general α and is found by bisection.
//! For K = 2 and α > 1 the map t ↦ α-entmax([t, 0])₁ saturates exactly at
//! |t| = 1/(α−1), which is where boundary mass comes from.

use crate::error::{Error, Result};
use crate::num::log_sum_exp;
use crate::simplex::SimplexPoint;
use crate::tol;

fn check_logits(z: &[f64]) -> Result<()> {
    if z.is_empty() {
        return Err(Error::InvalidArgument("empty logit vector".into()));
    }
    if let Some((i, &v)) = z.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "logit {i} is not finite: {v}"
        )));
    }
    Ok(())
}

/// Softmax over the coordinates listed in `support` (all others exactly 0),
/// with the maximum subtracted before exponentiation.  Shared by
/// [`softmax`] and [`topk_softmax`] so that k = K is bit-identical to plain
/// softmax.
fn softmax_on_support(z: &[f64], support: &[usize], beta: f64) -> SimplexPoint {
    let m = support
        .iter()
        .map(|&i| z[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let mut y = vec![0.0; z.len()];
    let mut sum = 0.0;
    for &i in support {
        let e = ((z[i] - m) / beta).exp();
        y[i] = e;
        sum += e;
    }
    for &i in support {
        y[i] /= sum;
    }
    SimplexPoint::new_unchecked(y)
}

/// Temperature softmax: strictly positive everywhere, so the output always
/// lies on the maximal face.
pub fn softmax(z: &[f64], beta: f64) -> Result<SimplexPoint> {
    check_logits(z)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "softmax temperature must be positive and finite, got {beta}"
        )));
    }
    let all: Vec<usize> = (0..z.len()).collect();
    Ok(softmax_on_support(z, &all, beta))
}

/// Uniform indicator over the argmax set; logits within
/// [`tol::ARGMAX_TIE`] of the maximum count as tied.
pub fn argmax_indicator(z: &[f64]) -> Result<SimplexPoint> {
    check_logits(z)?;
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = (0..z.len()).filter(|&i| m - z[i] <= tol::ARGMAX_TIE).collect();
    let mut y = vec![0.0; z.len()];
    let w = 1.0 / tied.len() as f64;
    for &i in &tied {
        y[i] = w;
    }
    Ok(SimplexPoint::new_unchecked(y))
}

/// Softmax restricted to the k largest logits; everything else is exactly
/// zero, so the output lies on a face with k vertices.  Ties at the k-th
/// place are broken toward the lowest index.
pub fn topk_softmax(z: &[f64], k: usize, beta: f64) -> Result<SimplexPoint> {
    check_logits(z)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "top-k softmax temperature must be positive and finite, got {beta}"
        )));
    }
    if k == 0 || k > z.len() {
        return Err(Error::InvalidArgument(format!(
            "top-k size {k} outside 1..={}",
            z.len()
        )));
    }
    let mut order: Vec<usize> = (0..z.len()).collect();
    // Sort by value descending, index ascending: a deterministic tie rule.
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    order.truncate(k);
    Ok(softmax_on_support(z, &order, beta))
}

/// Euclidean projection onto the simplex via the exact sort-and-threshold
/// rule:
///
/// ```text
/// ρ = max { j : z_(j) + (1 − Σ_{i≤j} z_(i)) / j > 0 }     (z sorted desc)
/// τ = (Σ_{i≤ρ} z_(i) − 1) / ρ,      y_i = max(z_i − τ, 0)
/// ```
///
/// Coordinates off the support are exactly zero, and for K = 2 the map
/// t ↦ sparsemax([t, 0])₁ equals 1 exactly for every t ≥ 1.
pub fn sparsemax(z: &[f64]) -> Result<SimplexPoint> {
    check_logits(z)?;
    let mut sorted = z.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut rho = 0usize;
    let mut tau = 0.0;
    for (j, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - 1.0) / (j + 1) as f64;
        if v > candidate {
            rho = j + 1;
            tau = candidate;
        }
    }
    debug_assert!(rho >= 1, "the largest coordinate always enters the support");
    let mut y: Vec<f64> = z
        .iter()
        .map(|&v| {
            let d = v - tau;
            if d > 0.0 {
                d
            } else {
                0.0
            }
        })
        .collect();
    let sum: f64 = y.iter().sum();
    if sum != 1.0 {
        for v in &mut y {
            *v /= sum;
        }
    }
    Ok(SimplexPoint::new_unchecked(y))
}

/// α-entmax with the normalizing threshold found by bisection.
/// See [`entmax_with_threshold`] for the threshold diagnostic.
pub fn entmax(z: &[f64], alpha: f64) -> Result<SimplexPoint> {
    entmax_with_threshold(z, alpha).map(|(y, _)| y)
}

/// α-entmax, also returning the threshold τ of the closed form
/// `y = [1 + (α−1)(z − τ1)]_+^{1/(α−1)}`.
///
/// α must be ≥ 1.  Values of α within [`tol::ENTMAX_ALPHA_SOFTMAX`] of 1
/// route to softmax (the α → 1 limit), where τ is log Σ exp(z).  Otherwise
/// τ is bisected to absolute precision [`tol::ENTMAX_BISECTION`] on the
/// bracket of width 1/(α−1) below max(z) that always contains it, and the
/// output is normalized so it sums to 1 exactly; in particular saturated
/// outputs are exactly one-hot.
pub fn entmax_with_threshold(z: &[f64], alpha: f64) -> Result<(SimplexPoint, f64)> {
    check_logits(z)?;
    if !alpha.is_finite() || alpha < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "entmax exponent alpha must be >= 1, got {alpha}"
        )));
    }
    if alpha - 1.0 <= tol::ENTMAX_ALPHA_SOFTMAX {
        return Ok((softmax(z, 1.0)?, log_sum_exp(z)));
    }

    let am1 = alpha - 1.0;
    let inv = 1.0 / am1;
    // One unnormalized coordinate at shifted threshold t:
    //   y_i(t) = [(α−1)(z_i − t)]_+^{1/(α−1)},
    // which matches the closed form above at τ = t + 1/(α−1).
    let coord = |zi: f64, t: f64| -> f64 {
        let base = am1 * (zi - t);
        if base <= 0.0 {
            0.0
        } else if inv == 1.0 {
            base
        } else if inv == 2.0 {
            base * base
        } else {
            base.powf(inv)
        }
    };
    let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Σ y_i(t) is continuous and decreasing, ≥ 1 at zmax − 1/(α−1) (the
    // maximal coordinate alone contributes 1) and ≤ 1 at zmax.
    let mut lo = zmax - inv;
    let mut hi = zmax;
    while hi - lo > tol::ENTMAX_BISECTION {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval no longer splits in floating point
        }
        let s: f64 = z.iter().map(|&zi| coord(zi, mid)).sum();
        if s >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let mut y: Vec<f64> = z.iter().map(|&zi| coord(zi, t)).collect();
    // The raw sum misses 1 by at most a few ulp of max|z| (the bracket
    // cannot shrink below one ulp of the threshold), so normalize.
    let sum: f64 = y.iter().sum();
    if sum != 1.0 {
        for v in &mut y {
            *v /= sum;
        }
    }
    Ok((SimplexPoint::new_unchecked(y), t + inv))
}
