//! Run configuration. Angles are degrees here and radians everywhere else.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{AnalyzerPairing, PreparationConfig};
use crate::stats::{ChshSettings, NoiseModel};

pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSection {
    pub qwp_deg: [f64; 4],
    pub phase_deg: f64,
    pub analyzer_pairing: AnalyzerPairing,
    pub perfect_correlation_sign: i32,
}

impl CalibrationSection {
    pub fn preparation(&self) -> PreparationConfig {
        PreparationConfig {
            qwp_angles: self.qwp_deg.map(f64::to_radians),
            calibration_phase: self.phase_deg.to_radians(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FringeSection {
    pub theta2_deg: Vec<f64>,
    pub alice_start_deg: f64,
    pub alice_step_deg: f64,
    pub alice_points: usize,
    pub mean_total: f64,
    pub replicas: usize,
    pub noise: NoiseModel,
}

impl FringeSection {
    pub fn alice_angles_deg(&self) -> Vec<f64> {
        (0..self.alice_points)
            .map(|k| self.alice_start_deg + k as f64 * self.alice_step_deg)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshSection {
    pub theta1_deg: f64,
    pub theta1_tilde_deg: f64,
    pub theta2_deg: f64,
    pub theta2_tilde_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_total: Option<f64>,
    pub target_sigma_e: f64,
    pub duration_s: f64,
    pub noise: NoiseModel,
}

impl ChshSection {
    pub fn settings(&self) -> ChshSettings {
        ChshSettings {
            theta1: self.theta1_deg.to_radians(),
            theta1_tilde: self.theta1_tilde_deg.to_radians(),
            theta2: self.theta2_deg.to_radians(),
            theta2_tilde: self.theta2_tilde_deg.to_radians(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub exact: bool,
    pub out_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
    pub calibration: CalibrationSection,
    pub fringe: FringeSection,
    pub chsh: ChshSection,
}

/// False for NaN as well as for non-positive values.
fn positive(x: f64) -> bool {
    x > 0.0
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str(DEFAULT_CONFIG).expect("bundled default config parses")
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.fringe.noise.validate()?;
        self.chsh.noise.validate()?;
        if self.fringe.alice_points < 4 {
            return Err(Error::Config("fringe.alice_points must be at least 4".into()));
        }
        if self.fringe.replicas == 0 {
            return Err(Error::Config("fringe.replicas must be positive".into()));
        }
        if !positive(self.fringe.mean_total) {
            return Err(Error::Config("fringe.mean_total must be positive".into()));
        }
        if !positive(self.chsh.target_sigma_e) {
            return Err(Error::Config("chsh.target_sigma_e must be positive".into()));
        }
        if let Some(m) = self.chsh.mean_total {
            if !positive(m) {
                return Err(Error::Config("chsh.mean_total must be positive".into()));
            }
        }
        if self.calibration.perfect_correlation_sign.abs() != 1 {
            return Err(Error::Config(
                "calibration.perfect_correlation_sign must be 1 or -1".into(),
            ));
        }
        if self.formats.is_empty() {
            return Err(Error::Config("at least one output format is required".into()));
        }
        Ok(())
    }

    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bundled_default_is_valid() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.fringe.alice_angles_deg().len(), 12);
        assert_eq!(cfg.calibration.analyzer_pairing, AnalyzerPairing::Parallel);
        assert_eq!(cfg.chsh.settings(), ChshSettings::OPTIMAL);
    }

    #[test]
    fn config_round_trips() {
        let cfg = RunConfig::default();
        let back = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RunConfig::default();
        cfg.chsh.noise = NoiseModel::uniform(1.5);
        assert!(matches!(cfg.validate(), Err(Error::VisibilityOutOfRange(_))));
        let text = DEFAULT_CONFIG.replace("seed = 1", "seed = 1\nbogus = 2");
        assert!(matches!(RunConfig::from_toml(&text), Err(Error::TomlDe(_))));
        let text = DEFAULT_CONFIG.replace("alice_points = 12", "alice_points = 3");
        assert!(matches!(RunConfig::from_toml(&text), Err(Error::Config(_))));
    }

    proptest! {
        #[test]
        fn degree_radian_round_trip(d in -720.0f64..720.0) {
            prop_assert!((d.to_radians().to_degrees() - d).abs() < 1e-12);
        }
    }
}
