//! Plot-ready CSV generators for the library's signature curves.
//!
//! Everything here routes through the public transform / information
//! functions — the CSVs are views, not reimplementations.

use crate::error::Result;
use crate::info::maxent_over_faces;
use crate::samplers::gaussian_sparsemax_density_k2;
use crate::transforms::entmax;

/// Two-coordinate entmax response curve: `y1 = entmax([t, 0], alpha)₁`
/// for `points` values of t evenly spaced over `[t_min, t_max]`.
///
/// Columns: `t,y1`.  For `alpha > 1` the curve saturates exactly at
/// `|t| ≥ 1/(alpha−1)`.
pub fn entmax_curve_csv(alpha: f64, t_min: f64, t_max: f64, points: usize) -> Result<String> {
    if points < 2 || !t_min.is_finite() || !t_max.is_finite() || t_max <= t_min {
        return Err(crate::error::Error::InvalidArgument(format!(
            "need at least 2 grid points and t_min < t_max; got points={points}, range [{t_min}, {t_max}]"
        )));
    }
    let mut out = String::from("t,y1\n");
    for i in 0..points {
        let t = t_min + (t_max - t_min) * i as f64 / (points - 1) as f64;
        let y = entmax(&[t, 0.0], alpha)?;
        out.push_str(&format!("{t},{}\n", y.coords()[0]));
    }
    Ok(out)
}

/// Maximum achievable coding entropy (nats) as a function of K, one row
/// per K in `2..=k_max`, one column per N in `0..=n_max` bits of symbol
/// precision.
///
/// Columns: `K,N0,N1,...`.
pub fn maxent_vs_k_csv(k_max: u32, n_max: u32) -> Result<String> {
    if k_max < 2 {
        return Err(crate::error::Error::InvalidArgument(format!(
            "need k_max >= 2, got {k_max}"
        )));
    }
    let mut out = String::from("K");
    for n in 0..=n_max {
        out.push_str(&format!(",N{n}"));
    }
    out.push('\n');
    for k in 2..=k_max {
        out.push_str(&k.to_string());
        for n in 0..=n_max {
            let sol = maxent_over_faces(k, n)?;
            out.push_str(&format!(",{}", sol.value));
        }
        out.push('\n');
    }
    Ok(out)
}

/// The two-coordinate rectified-Gaussian law: point masses at the
/// endpoints plus a truncated-Gaussian density over the interior, as a
/// grid in the first coordinate.
///
/// Columns: `y,density,p0,p1` — `p0` (mass at y₁=0) and `p1` (mass at
/// y₁=1) are constant down the file; `density` is the unnormalized
/// interior density at each grid point.
pub fn rectify_density_csv(z: f64, sigma: f64, points: usize) -> Result<String> {
    if points < 2 {
        return Err(crate::error::Error::InvalidArgument(format!(
            "need at least 2 grid points, got {points}"
        )));
    }
    let mut out = String::from("y,density,p0,p1\n");
    for i in 0..points {
        // Strictly interior grid: endpoints carry atoms, not density.
        let y = (i as f64 + 0.5) / points as f64;
        let (p0, p1, density) = gaussian_sparsemax_density_k2(y, z, sigma)?;
        out.push_str(&format!("{y},{density},{p0},{p1}\n"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::sparsemax;

    fn parse_rows(csv: &str) -> Vec<Vec<f64>> {
        csv.lines()
            .skip(1)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect()
    }

    #[test]
    fn test_entmax_curve_midpoint_and_saturation() {
        let csv = entmax_curve_csv(1.5, -3.0, 3.0, 121).unwrap();
        assert!(csv.starts_with("t,y1\n"));
        let rows = parse_rows(&csv);
        assert_eq!(rows.len(), 121);
        let at = |t: f64| {
            rows.iter()
                .find(|r| (r[0] - t).abs() < 1e-12)
                .unwrap_or_else(|| panic!("no grid point at t={t}"))[1]
        };
        assert_eq!(at(0.0), 0.5);
        assert_eq!(at(2.0), 1.0);
        assert_eq!(at(3.0), 1.0);
        assert_eq!(at(-2.0), 0.0);
    }

    #[test]
    fn test_entmax_curve_alpha_two_equals_sparsemax_pointwise() {
        let csv = entmax_curve_csv(2.0, -2.0, 2.0, 81).unwrap();
        for row in parse_rows(&csv) {
            let expect = sparsemax(&[row[0], 0.0]).unwrap().coords()[0];
            assert!(
                (row[1] - expect).abs() < 1e-12,
                "t={}: {} vs {}",
                row[0],
                row[1],
                expect
            );
        }
    }

    #[test]
    fn test_maxent_vs_k_shape_and_monotonicity() {
        let csv = maxent_vs_k_csv(6, 4).unwrap();
        let rows = parse_rows(&csv);
        assert_eq!(rows.len(), 5); // K = 2..6
        for row in &rows {
            assert_eq!(row.len(), 6); // K column + N0..N4
            // Capacity grows with symbol precision.
            for w in row[1..].windows(2) {
                assert!(w[1] > w[0]);
            }
        }
        // ...and with alphabet size at fixed N.
        for pair in rows.windows(2) {
            assert!(pair[1][1] > pair[0][1]);
        }
        // K=2, N=0 capacity is ln 3 (three faces, no coding gain).
        assert!((rows[0][1] - 3.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn test_rectify_density_symmetric_at_half() {
        let csv = rectify_density_csv(0.5, 0.3, 64).unwrap();
        assert!(csv.starts_with("y,density,p0,p1\n"));
        let rows = parse_rows(&csv);
        assert_eq!(rows.len(), 64);
        for row in &rows {
            assert!((row[2] - row[3]).abs() < 1e-15, "p0 != p1 at z=0.5");
        }
        // Density symmetric about y = 1/2 on the symmetric interior grid.
        let n = rows.len();
        for i in 0..n / 2 {
            let a = rows[i][1];
            let b = rows[n - 1 - i][1];
            assert!((a - b).abs() < 1e-12 * a.max(1.0));
        }
        // Atoms are Φ(−z/σ) with z=0.5, σ=0.3.
        let expect = crate::num::normal_cdf(-0.5 / 0.3);
        assert!((rows[0][2] - expect).abs() < 1e-12);
    }

    #[test]
    fn test_bad_grids_rejected() {
        assert!(entmax_curve_csv(1.5, 0.0, 1.0, 1).is_err());
        assert!(entmax_curve_csv(1.5, 1.0, 0.0, 10).is_err());
        assert!(maxent_vs_k_csv(1, 3).is_err());
        assert!(rectify_density_csv(0.5, 0.3, 0).is_err());
    }
}
