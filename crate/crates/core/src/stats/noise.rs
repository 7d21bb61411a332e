use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which fringe family a setting belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisFamily {
    /// Bob's mixing angle is a multiple of π/2 (analyzer plate at 0° or 45°).
    Hv,
    Pm,
}

impl BasisFamily {
    pub fn of_theta2(theta2: f64) -> Self {
        let q = theta2 / std::f64::consts::FRAC_PI_2;
        if (q - q.round()).abs() < 1e-9 {
            BasisFamily::Hv
        } else {
            BasisFamily::Pm
        }
    }
}

/// White-noise admixture: `p = v·p_ideal + (1 − v)/4` per outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum NoiseModel {
    Uniform { visibility: f64 },
    PerBasis { visibility_hv: f64, visibility_pm: f64 },
}

impl NoiseModel {
    pub const IDEAL: NoiseModel = NoiseModel::Uniform { visibility: 1.0 };

    pub fn uniform(visibility: f64) -> Self {
        NoiseModel::Uniform { visibility }
    }

    pub fn per_basis(visibility_hv: f64, visibility_pm: f64) -> Self {
        NoiseModel::PerBasis {
            visibility_hv,
            visibility_pm,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vs: &[f64] = match self {
            NoiseModel::Uniform { visibility } => &[*visibility],
            NoiseModel::PerBasis {
                visibility_hv,
                visibility_pm,
            } => &[*visibility_hv, *visibility_pm],
        };
        for &v in vs {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::VisibilityOutOfRange(v));
            }
        }
        Ok(())
    }

    pub fn visibility_for(&self, family: BasisFamily) -> f64 {
        match (self, family) {
            (NoiseModel::Uniform { visibility }, _) => *visibility,
            (NoiseModel::PerBasis { visibility_hv, .. }, BasisFamily::Hv) => *visibility_hv,
            (NoiseModel::PerBasis { visibility_pm, .. }, BasisFamily::Pm) => *visibility_pm,
        }
    }
}

const DIST_TOL: f64 = 1e-9;

pub fn apply_noise(ideal: [f64; 4], model: &NoiseModel, family: BasisFamily) -> Result<[f64; 4]> {
    model.validate()?;
    let sum: f64 = ideal.iter().sum();
    if ideal.iter().any(|p| *p < -DIST_TOL || !p.is_finite()) || (sum - 1.0).abs() > DIST_TOL {
        return Err(Error::InvalidDistribution(ideal));
    }
    let v = model.visibility_for(family);
    if v == 1.0 {
        return Ok(ideal);
    }
    Ok(ideal.map(|p| v * p.max(0.0) + (1.0 - v) * 0.25))
}
