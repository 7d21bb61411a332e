//! Batch runs behind the `entbell` subcommands and readers for their output files.
//!
//! Files written to the output directory:
//!
//! | file | columns / keys |
//! |---|---|
//! | `calibration.toml` | discovered and configured preparation, fidelities, pairing checks |
//! | `fringe_theta2_<deg>.csv` | `angle_deg, counts, fit_curve` |
//! | `fringe_summary.toml` | per scan: fitted visibility, replica mean and standard deviation |
//! | `chsh_counts.csv` | `correlation, label, alice_deg, bob_deg, hwp_deg, counts` |
//! | `chsh_summary.toml` | `E`s, `S`, `σ_S`, violation significance, local bound |
//!
//! Every value written is a pure function of the configuration.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::experiment::{
    analyzer_pairing_matches, calibrate_analyzer, calibrate_preparation, circuit_outcome_probabilities,
    correlation_exact, correlation_from_probabilities, ghz_circular_state, outcome_probabilities, prepare_from,
    target_state, verify_rotated_expansion, AnalyzerPairing, PreparationConfig, Sign, OUTCOME_PAIRS,
};
use crate::qstate::{fidelity, ALGEBRA_TOL, PIPELINE_TOL};
use crate::stats::{
    chsh, correlation_from_rates, critical_visibility, derive_seed, expected_counts, fit_visibility, fringe_scan,
    ideal_chsh, lhv_max_chsh, mean_total_for_sigma, simulate_counts, tsirelson_scan, BasisFamily, ChshResult,
    CorrelationEstimate, NoiseModel,
};

const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    Ok(fs::write(path, toml::to_string(value)?)?)
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(toml::from_str(&fs::read_to_string(path)?)?)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    Ok(fs::create_dir_all(dir)?)
}

// ---------------------------------------------------------------- calibrate

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparationReport {
    pub qwp_deg: [f64; 4],
    pub phase_deg: f64,
    pub fidelity: f64,
    pub preparation_probability: f64,
}

impl PreparationReport {
    fn new(cfg: &PreparationConfig) -> Result<Self> {
        let p = prepare_from(cfg)?;
        Ok(PreparationReport {
            qwp_deg: cfg.qwp_angles.map(f64::to_degrees),
            phase_deg: cfg.calibration_phase.to_degrees(),
            fidelity: p.fidelity_to_target(),
            preparation_probability: p.preparation_probability,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub discovered: PreparationReport,
    pub discovered_pairing: AnalyzerPairing,
    pub configured: PreparationReport,
    pub configured_pairing: AnalyzerPairing,
    pub pairing_reproduces_projectors: bool,
    /// `E` through the configured circuit at `θ₁ + θ₂ = 0`; absent when nothing is detected.
    pub perfect_correlation: Option<f64>,
    pub configured_sign: i32,
}

impl CalibrationReport {
    pub fn passed(&self) -> bool {
        self.configured.fidelity >= 1.0 - PIPELINE_TOL
            && self.pairing_reproduces_projectors
            && self
                .perfect_correlation
                .is_some_and(|e| (e - self.configured_sign as f64).abs() <= PIPELINE_TOL)
    }

    pub fn render(&self) -> String {
        let fmt_prep = |tag: &str, p: &PreparationReport| {
            format!(
                "{tag}_qwp_deg={:?}\n{tag}_phase_deg={}\n{tag}_fidelity={:.12}\n{tag}_preparation_probability={:.6}\n",
                p.qwp_deg, p.phase_deg, p.fidelity, p.preparation_probability
            )
        };
        let mut s = fmt_prep("discovered", &self.discovered);
        s += &format!("discovered_pairing={}\n", self.discovered_pairing.name());
        s += &fmt_prep("configured", &self.configured);
        s += &format!("configured_pairing={}\n", self.configured_pairing.name());
        s += &format!("pairing_reproduces_projectors={}\n", self.pairing_reproduces_projectors);
        match self.perfect_correlation {
            Some(e) => s += &format!("perfect_correlation={e:.12}\n"),
            None => s += "perfect_correlation=none\n",
        }
        s += &format!("configured_sign={}\n", self.configured_sign);
        s += &format!("status={}\n", if self.passed() { "ok" } else { "FAILED" });
        s
    }
}

pub fn run_calibrate(cfg: &RunConfig) -> Result<CalibrationReport> {
    let found = calibrate_preparation()?;
    let found_state = prepare_from(&found)?;
    let discovered_pairing = calibrate_analyzer(&found_state)?;

    let configured_prep = cfg.calibration.preparation();
    let configured_state = prepare_from(&configured_prep)?;
    let pairing = cfg.calibration.analyzer_pairing;
    let t = 0.3;
    let perfect_correlation = circuit_outcome_probabilities(&configured_state, t, -t, pairing)
        .ok()
        .map(|p| correlation_from_probabilities(&p));

    let report = CalibrationReport {
        discovered: PreparationReport::new(&found)?,
        discovered_pairing,
        configured: PreparationReport::new(&configured_prep)?,
        configured_pairing: pairing,
        pairing_reproduces_projectors: analyzer_pairing_matches(&configured_state, pairing),
        perfect_correlation,
        configured_sign: cfg.calibration.perfect_correlation_sign,
    };
    if cfg.wants(OutputFormat::Summary) {
        ensure_dir(&cfg.out_dir)?;
        write_toml(&cfg.out_dir.join("calibration.toml"), &report)?;
    }
    Ok(report)
}

pub fn read_calibration_report(path: &Path) -> Result<CalibrationReport> {
    read_toml(path)
}

// ------------------------------------------------------------------- fringe

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeRow {
    pub angle_deg: f64,
    pub counts: f64,
    pub fit_curve: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeScanSummary {
    pub theta2_deg: f64,
    pub hwp_deg: f64,
    pub file: String,
    /// Visibility the noise model assigns to this scan.
    pub model_visibility: f64,
    /// Fit to the tabulated scan (replica 0).
    pub visibility: f64,
    pub fit_mean: f64,
    pub fit_phase_deg: f64,
    pub replicas: usize,
    pub replica_visibilities: Vec<f64>,
    pub replica_mean: f64,
    /// Sample standard deviation over replicas (0 for a single replica).
    pub replica_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeSummary {
    pub seed: u64,
    pub exact: bool,
    pub mean_total: f64,
    pub noise: NoiseModel,
    pub scans: Vec<FringeScanSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FringeOutput {
    pub summary: FringeSummary,
    pub tables: Vec<(PathBuf, Vec<FringeRow>)>,
}

impl FringeOutput {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for scan in &self.summary.scans {
            s += &format!(
                "theta2_deg={} hwp_deg={} visibility={:.4} replica_mean={:.4} replica_std={:.4} replicas={} model={:.4} file={}\n",
                scan.theta2_deg,
                scan.hwp_deg,
                scan.visibility,
                scan.replica_mean,
                scan.replica_std,
                scan.replicas,
                scan.model_visibility,
                scan.file
            );
        }
        s
    }
}

/// Seed of replica `replica` of scan `scan`.
pub fn fringe_seed(base: u64, scan: usize, replica: usize) -> u64 {
    derive_seed(derive_seed(base, scan as u64), replica as u64)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn run_fringe(cfg: &RunConfig) -> Result<FringeOutput> {
    let prepared = prepare_from(&cfg.calibration.preparation())?;
    let f = &cfg.fringe;
    let angles_deg = f.alice_angles_deg();
    let angles: Vec<f64> = angles_deg.iter().map(|d| d.to_radians()).collect();
    let replicas = if cfg.exact { 1 } else { f.replicas };

    let mut scans = Vec::new();
    let mut tables = Vec::new();
    for (i, &theta2_deg) in f.theta2_deg.iter().enumerate() {
        let theta2 = theta2_deg.to_radians();
        let mut table = None;
        let mut visibilities = Vec::with_capacity(replicas);
        for r in 0..replicas {
            let seed = (!cfg.exact).then(|| fringe_seed(cfg.seed, i, r));
            let pts = fringe_scan(&prepared, theta2, &angles, &f.noise, f.mean_total, seed)?;
            let data: Vec<(f64, f64)> = pts.iter().map(|p| (p.theta1, p.counts)).collect();
            let fit = fit_visibility(&data)?;
            visibilities.push(fit.visibility);
            if r == 0 {
                table = Some((data, fit));
            }
        }
        let (data, fit) = table.expect("at least one replica");
        let rows: Vec<FringeRow> = data
            .iter()
            .zip(&angles_deg)
            .map(|(&(theta1, counts), &angle_deg)| FringeRow {
                angle_deg,
                counts,
                fit_curve: fit.eval(theta1),
            })
            .collect();
        let file = format!("fringe_theta2_{theta2_deg}.csv");
        let (replica_mean, replica_std) = mean_std(&visibilities);
        scans.push(FringeScanSummary {
            theta2_deg,
            hwp_deg: theta2_deg / 2.0,
            file: file.clone(),
            model_visibility: f.noise.visibility_for(BasisFamily::of_theta2(theta2)),
            visibility: fit.visibility,
            fit_mean: fit.mean,
            fit_phase_deg: fit.phase.to_degrees(),
            replicas,
            replica_visibilities: visibilities,
            replica_mean,
            replica_std,
        });
        tables.push((cfg.out_dir.join(file), rows));
    }

    let summary = FringeSummary {
        seed: cfg.seed,
        exact: cfg.exact,
        mean_total: f.mean_total,
        noise: f.noise,
        scans,
    };
    if cfg.wants(OutputFormat::Csv) {
        ensure_dir(&cfg.out_dir)?;
        for (path, rows) in &tables {
            write_csv(path, rows)?;
        }
    }
    if cfg.wants(OutputFormat::Summary) {
        ensure_dir(&cfg.out_dir)?;
        write_toml(&cfg.out_dir.join("fringe_summary.toml"), &summary)?;
    }
    Ok(FringeOutput { summary, tables })
}

pub fn read_fringe_table(path: &Path) -> Result<Vec<FringeRow>> {
    read_csv(path)
}

pub fn read_fringe_summary(path: &Path) -> Result<FringeSummary> {
    read_toml(path)
}

// --------------------------------------------------------------------- chsh

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshRow {
    /// `E1`..`E4`.
    pub correlation: String,
    /// Outcome pair, Alice first.
    pub label: String,
    /// Polarizer angle Alice actually uses.
    pub alice_deg: f64,
    /// Bob's mixing angle actually used.
    pub bob_deg: f64,
    /// Bob's half-wave plate mount angle.
    pub hwp_deg: f64,
    pub counts: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshSummary {
    pub seed: u64,
    pub exact: bool,
    pub mean_total: f64,
    pub duration_s: f64,
    pub noise: NoiseModel,
    pub theta1_deg: f64,
    pub theta1_tilde_deg: f64,
    pub theta2_deg: f64,
    pub theta2_tilde_deg: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    pub sigma_e1: f64,
    pub sigma_e2: f64,
    pub sigma_e3: f64,
    pub sigma_e4: f64,
    pub s: f64,
    pub s_sigma: f64,
    pub sigmas_of_violation: f64,
    pub violates_local_bound: bool,
    pub lhv_bound: f64,
}

impl ChshSummary {
    pub fn estimates(&self) -> [CorrelationEstimate; 4] {
        [
            CorrelationEstimate::new(self.e1, self.sigma_e1),
            CorrelationEstimate::new(self.e2, self.sigma_e2),
            CorrelationEstimate::new(self.e3, self.sigma_e3),
            CorrelationEstimate::new(self.e4, self.sigma_e4),
        ]
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, e) in self.estimates().iter().enumerate() {
            s += &format!("E{}={:.4}±{:.4}\n", k + 1, e.e_value, e.sigma);
        }
        s += &format!("S={:.4}±{:.4}\n", self.s, self.s_sigma);
        s += &format!("sigmas_of_violation={:.2}\n", self.sigmas_of_violation);
        s += &format!("violates_local_bound={}\n", self.violates_local_bound);
        s += &format!("lhv_bound={:.1}\n", self.lhv_bound);
        s += &format!("mean_total={:.3}\n", self.mean_total);
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshOutput {
    pub result: ChshResult,
    pub rows: Vec<ChshRow>,
    pub summary: ChshSummary,
}

/// Per-setting mean total: explicit in the config, else derived from the σ_E target.
pub fn chsh_mean_total(cfg: &RunConfig) -> Result<f64> {
    match cfg.chsh.mean_total {
        Some(m) => Ok(m),
        None => {
            let prepared = prepare_from(&cfg.calibration.preparation())?;
            mean_total_for_sigma(
                &prepared,
                &cfg.chsh.settings(),
                &cfg.chsh.noise,
                cfg.chsh.target_sigma_e,
            )
        }
    }
}

/// Runs the four CHSH settings without touching the filesystem.
pub fn simulate_chsh(cfg: &RunConfig) -> Result<ChshOutput> {
    let prepared = prepare_from(&cfg.calibration.preparation())?;
    let c = &cfg.chsh;
    let settings = c.settings();
    let mean_total = chsh_mean_total(cfg)?;

    let mut rows = Vec::with_capacity(16);
    let mut estimates = Vec::with_capacity(4);
    for (j, (t1, t2)) in settings.pairs().into_iter().enumerate() {
        let counts: [f64; 4] = if cfg.exact {
            expected_counts(&prepared, (t1, t2), &c.noise, mean_total)?
        } else {
            simulate_counts(
                &prepared,
                (t1, t2),
                &c.noise,
                mean_total,
                derive_seed(cfg.seed, j as u64),
            )?
            .with_duration(c.duration_s)
            .as_array()
            .map(|n| n as f64)
        };
        estimates.push(correlation_from_rates(counts)?);
        for ((sa, sb), n) in OUTCOME_PAIRS.into_iter().zip(counts) {
            let alice = t1 + sa.angle_offset();
            let bob = t2 + sb.angle_offset();
            rows.push(ChshRow {
                correlation: format!("E{}", j + 1),
                label: format!("{}{}", sa.symbol(), sb.symbol()),
                alice_deg: alice.to_degrees(),
                bob_deg: bob.to_degrees(),
                hwp_deg: (bob / 2.0).to_degrees(),
                counts: n,
            });
        }
    }
    let result = chsh(estimates[0], estimates[1], estimates[2], estimates[3]);
    let summary = ChshSummary {
        seed: cfg.seed,
        exact: cfg.exact,
        mean_total,
        duration_s: c.duration_s,
        noise: c.noise,
        theta1_deg: c.theta1_deg,
        theta1_tilde_deg: c.theta1_tilde_deg,
        theta2_deg: c.theta2_deg,
        theta2_tilde_deg: c.theta2_tilde_deg,
        e1: result.e[0].e_value,
        e2: result.e[1].e_value,
        e3: result.e[2].e_value,
        e4: result.e[3].e_value,
        sigma_e1: result.e[0].sigma,
        sigma_e2: result.e[1].sigma,
        sigma_e3: result.e[2].sigma,
        sigma_e4: result.e[3].sigma,
        s: result.s_value,
        s_sigma: result.s_sigma,
        sigmas_of_violation: result.sigmas_of_violation,
        violates_local_bound: result.violates_local_bound(),
        lhv_bound: lhv_max_chsh(),
    };
    Ok(ChshOutput { result, rows, summary })
}

pub fn run_chsh(cfg: &RunConfig) -> Result<ChshOutput> {
    let out = simulate_chsh(cfg)?;
    if cfg.wants(OutputFormat::Csv) {
        ensure_dir(&cfg.out_dir)?;
        write_csv(&cfg.out_dir.join("chsh_counts.csv"), &out.rows)?;
    }
    if cfg.wants(OutputFormat::Summary) {
        ensure_dir(&cfg.out_dir)?;
        write_toml(&cfg.out_dir.join("chsh_summary.toml"), &out.summary)?;
    }
    Ok(out)
}

pub fn read_chsh_table(path: &Path) -> Result<Vec<ChshRow>> {
    read_csv(path)
}

pub fn read_chsh_summary(path: &Path) -> Result<ChshSummary> {
    read_toml(path)
}

/// Recomputes the four correlations from a counts table.
pub fn estimates_from_table(rows: &[ChshRow]) -> Result<[CorrelationEstimate; 4]> {
    let mut out = [CorrelationEstimate::new(0.0, 0.0); 4];
    for (j, slot) in out.iter_mut().enumerate() {
        let name = format!("E{}", j + 1);
        let mut n = [0.0; 4];
        for (k, (sa, sb)) in OUTCOME_PAIRS.iter().enumerate() {
            let label = format!("{}{}", sa.symbol(), sb.symbol());
            n[k] = rows
                .iter()
                .find(|r| r.correlation == name && r.label == label)
                .ok_or_else(|| Error::Config(format!("counts table lacks {name} {label}")))?
                .counts;
        }
        *slot = correlation_from_rates(n)?;
    }
    Ok(out)
}

// ------------------------------------------------------------------- verify

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        self.checks
            .iter()
            .map(|c| format!("{} {} {}\n", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail))
            .collect()
    }
}

/// Runs the invariant suite on the calibrated pipeline.
pub fn run_verify() -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let mut push = |name, passed, detail: String| checks.push(Check { name, passed, detail });

    let cfg = calibrate_preparation()?;
    let prepared = prepare_from(&cfg)?;
    let f = prepared.fidelity_to_target();
    push("preparation", f >= 1.0 - PIPELINE_TOL, format!("fidelity={f:.12}"));

    let g = fidelity(&target_state(), &ghz_circular_state())?;
    push(
        "ghz_equivalence",
        (g - 1.0).abs() <= ALGEBRA_TOL,
        format!("fidelity={g:.15}"),
    );

    let mut worst_expansion: f64 = 1.0;
    for i in 0..12 {
        for j in 0..12 {
            worst_expansion = worst_expansion.min(verify_rotated_expansion(i as f64 * PI / 12.0, j as f64 * PI / 12.0));
        }
    }
    push(
        "rotated_basis_expansion",
        (1.0 - worst_expansion) <= ALGEBRA_TOL,
        format!("min_fidelity={worst_expansion:.15} grid=12x12"),
    );

    let mut worst_law: f64 = 0.0;
    for k in 0..72 {
        let t1 = k as f64 * PI / 36.0;
        let t2 = 0.37 * t1 - 0.2;
        worst_law = worst_law.max((correlation_exact(&prepared, t1, t2) - (2.0 * (t1 + t2)).cos()).abs());
    }
    let e_plus = correlation_exact(&prepared, 0.4, -0.4);
    let e_minus = correlation_exact(&prepared, 0.4, PI / 2.0 - 0.4);
    push(
        "correlation_law",
        worst_law < PIPELINE_TOL && (e_plus - 1.0).abs() < PIPELINE_TOL && (e_minus + 1.0).abs() < PIPELINE_TOL,
        format!("max_dev={worst_law:.3e} perfect={e_plus:.12} anti={e_minus:.12}"),
    );

    let s = ideal_chsh(&prepared, &Default::default());
    push("ideal_chsh", (s - TSIRELSON).abs() < PIPELINE_TOL, format!("s={s:.6}"));

    let scan = tsirelson_scan(&prepared, 20);
    push(
        "tsirelson_bound",
        scan <= TSIRELSON + PIPELINE_TOL,
        format!("max_s={scan:.6} grid=20^4"),
    );

    let lhv = lhv_max_chsh();
    push("lhv_bound", lhv == 2.0, format!("lhv_max={lhv:.1}"));

    let vc = critical_visibility(&prepared)?;
    push(
        "critical_visibility",
        (vc - FRAC_1_SQRT_2).abs() < 1e-6,
        format!("critical_visibility={vc:.6}"),
    );

    let pairing = calibrate_analyzer(&prepared)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst_circ: f64 = 0.0;
    for _ in 0..20 {
        let (t1, t2) = (rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        let circ = circuit_outcome_probabilities(&prepared, t1, t2, pairing)?;
        let exact = outcome_probabilities(&prepared, t1, t2);
        for (a, b) in circ.iter().zip(&exact) {
            worst_circ = worst_circ.max((a - b).abs());
        }
    }
    push(
        "projector_circuit_equivalence",
        worst_circ < PIPELINE_TOL,
        format!("pairing={} max_dev={worst_circ:.3e} settings=20", pairing.name()),
    );

    let sign_ok = Sign::from_value(e_plus.round() as i32) == Some(Sign::Plus);
    push("perfect_correlation_sign", sign_ok, format!("sign={}", e_plus.round()));

    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_suite_passes() {
        let r = run_verify().unwrap();
        let text = r.render();
        assert!(r.passed(), "{text}");
        assert!(text.contains("critical_visibility=0.707107"));
        assert!(text.contains("lhv_max=2.0"));
    }

    #[test]
    fn mean_std_sample() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
        assert_eq!(mean_std(&[4.0]), (4.0, 0.0));
    }

    #[test]
    fn chsh_rows_label_actual_settings() {
        let cfg = RunConfig {
            exact: true,
            ..Default::default()
        };
        let out = simulate_chsh(&cfg).unwrap();
        assert_eq!(out.rows.len(), 16);
        let r = &out.rows[6]; // E2, −+
        assert_eq!((r.correlation.as_str(), r.label.as_str()), ("E2", "-+"));
        assert!((r.alice_deg - 135.0).abs() < 1e-12 && (r.bob_deg - 22.5).abs() < 1e-12);
        assert!((r.hwp_deg - 11.25).abs() < 1e-12);
        let back = estimates_from_table(&out.rows).unwrap();
        assert_eq!(back, out.result.e);
    }

    #[test]
    fn calibration_flags_bad_convention() {
        let cfg = RunConfig::default();
        let tmp = std::env::temp_dir();
        let mut cfg = RunConfig {
            out_dir: tmp,
            formats: vec![OutputFormat::Csv],
            ..cfg
        };
        assert!(run_calibrate(&cfg).unwrap().passed());
        cfg.calibration.analyzer_pairing = AnalyzerPairing::Crossed;
        assert!(!run_calibrate(&cfg).unwrap().passed());
        cfg.calibration.analyzer_pairing = AnalyzerPairing::Parallel;
        cfg.calibration.perfect_correlation_sign = -1;
        assert!(!run_calibrate(&cfg).unwrap().passed());
        cfg.calibration.perfect_correlation_sign = 1;
        cfg.calibration.phase_deg = 90.0;
        assert!(!run_calibrate(&cfg).unwrap().passed());
    }
}
