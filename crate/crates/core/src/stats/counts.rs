use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Four-fold coincidence counts for one `(θ₁, θ₂)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SettingCounts {
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
    /// Integration time in seconds.
    pub duration: f64,
}

impl SettingCounts {
    pub fn new(n_pp: u64, n_pm: u64, n_mp: u64, n_mm: u64) -> Self {
        SettingCounts {
            n_pp,
            n_pm,
            n_mp,
            n_mm,
            duration: 0.0,
        }
    }

    pub fn with_duration(mut self, seconds: f64) -> Self {
        self.duration = seconds;
        self
    }

    pub fn total(&self) -> u64 {
        self.n_pp + self.n_pm + self.n_mp + self.n_mm
    }

    /// Counts as `[++, +−, −+, −−]`.
    pub fn as_array(&self) -> [u64; 4] {
        [self.n_pp, self.n_pm, self.n_mp, self.n_mm]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub e_value: f64,
    pub sigma: f64,
}

impl CorrelationEstimate {
    pub fn new(e_value: f64, sigma: f64) -> Self {
        CorrelationEstimate { e_value, sigma }
    }
}

/// `E = (N⁺⁺ + N⁻⁻ − N⁺⁻ − N⁻⁺) / N` with independent Poisson errors
/// propagated to first order: `σ = 2·√(N_same·N_diff / N³)`.
pub fn correlation_from_counts(c: &SettingCounts) -> Result<CorrelationEstimate> {
    correlation_from_rates(c.as_array().map(|n| n as f64))
}

/// Same estimator on real-valued (e.g. expected) counts.
pub fn correlation_from_rates(n: [f64; 4]) -> Result<CorrelationEstimate> {
    let same = n[0] + n[3];
    let diff = n[1] + n[2];
    let total = same + diff;
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::ZeroCounts);
    }
    Ok(CorrelationEstimate {
        e_value: (same - diff) / total,
        sigma: 2.0 * (same * diff / total.powi(3)).sqrt(),
    })
}
