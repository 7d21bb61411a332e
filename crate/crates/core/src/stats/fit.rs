use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Least-squares fringe `A(1 + V cos(2θ + φ₀))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    pub mean: f64,
    pub visibility: f64,
    pub phase: f64,
}

impl FringeFit {
    pub fn eval(&self, theta: f64) -> f64 {
        self.mean * (1.0 + self.visibility * (2.0 * theta + self.phase).cos())
    }
}

fn distinct_mod_pi(angles: &[f64]) -> usize {
    let mut reduced: Vec<f64> = angles.iter().map(|a| a.rem_euclid(std::f64::consts::PI)).collect();
    reduced.sort_by(|a, b| a.total_cmp(b));
    reduced.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if reduced.len() > 1 && (std::f64::consts::PI - reduced[reduced.len() - 1] + reduced[0]) < 1e-9 {
        reduced.pop();
    }
    reduced.len()
}

/// Fits `count(θ) = a + b cos 2θ + c sin 2θ` by linear least squares and
/// returns `V = √(b² + c²)/a`, i.e. `(max − min)/(max + min)` of the fitted curve.
/// Angles are in radians; at least 4 must be distinct modulo π.
pub fn fit_visibility(scan: &[(f64, f64)]) -> Result<FringeFit> {
    let angles: Vec<f64> = scan.iter().map(|(a, _)| *a).collect();
    let distinct = distinct_mod_pi(&angles);
    if distinct < 4 {
        return Err(Error::TooFewAngles(distinct));
    }
    let design = DMatrix::from_fn(scan.len(), 3, |r, col| {
        let t = 2.0 * scan[r].0;
        match col {
            0 => 1.0,
            1 => t.cos(),
            _ => t.sin(),
        }
    });
    let y = DVector::from_iterator(scan.len(), scan.iter().map(|(_, n)| *n));
    let coef = design
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|_| Error::DegenerateFit)?;
    let (a, b, c) = (coef[0], coef[1], coef[2]);
    let amp = b.hypot(c);
    if a <= 0.0 || amp <= 1e-12 * a.abs() {
        return Err(Error::DegenerateFit);
    }
    Ok(FringeFit {
        mean: a,
        visibility: amp / a,
        // b cos2θ + c sin2θ = amp·cos(2θ − atan2(c, b))
        phase: -c.atan2(b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn degrees(step: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| (k as f64 * step).to_radians()).collect()
    }

    #[test]
    fn noiseless_cos2_has_unit_visibility() {
        let scan: Vec<(f64, f64)> = degrees(30.0, 12)
            .into_iter()
            .map(|t| (t, 500.0 * (t + 0.3).cos().powi(2)))
            .collect();
        let fit = fit_visibility(&scan).unwrap();
        assert_abs_diff_eq!(fit.visibility, 1.0, epsilon = 1e-6);
        for (t, n) in &scan {
            assert_abs_diff_eq!(fit.eval(*t), *n, epsilon = 1e-8);
        }
    }

    #[test]
    fn white_noise_fringe_recovers_v() {
        // (1 − v)/4 + v·cos²(θ)/2 has visibility v
        let v = 0.83;
        let scan: Vec<(f64, f64)> = degrees(30.0, 7)
            .into_iter()
            .map(|t| (t, 1000.0 * ((1.0 - v) / 4.0 + v * t.cos().powi(2) / 2.0)))
            .collect();
        assert_abs_diff_eq!(fit_visibility(&scan).unwrap().visibility, v, epsilon = 1e-9);
    }

    #[test]
    fn fit_errors() {
        let flat: Vec<(f64, f64)> = degrees(30.0, 12).into_iter().map(|t| (t, 100.0)).collect();
        assert!(matches!(fit_visibility(&flat), Err(Error::DegenerateFit)));
        let few: Vec<(f64, f64)> = degrees(90.0, 4).into_iter().map(|t| (t, t.cos().powi(2))).collect();
        assert!(matches!(fit_visibility(&few), Err(Error::TooFewAngles(2))));
        let zeros: Vec<(f64, f64)> = degrees(30.0, 6).into_iter().map(|t| (t, 0.0)).collect();
        assert!(matches!(fit_visibility(&zeros), Err(Error::DegenerateFit)));
    }
}
