use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use entbell::config::RunConfig;
use entbell::harness::{
    estimates_from_table, read_calibration_report, read_chsh_summary, read_chsh_table, read_fringe_summary,
    read_fringe_table, run_chsh, run_fringe,
};
use entbell::stats::NoiseModel;
use tempfile::TempDir;

fn entbell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entbell"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn config_in(out_dir: PathBuf) -> RunConfig {
    RunConfig {
        out_dir,
        ..Default::default()
    }
}

fn write_config(dir: &Path, cfg: &RunConfig) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, cfg.to_toml().unwrap()).unwrap();
    p.to_str().unwrap().to_owned()
}

fn dir_snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        for cmd in ["calibrate", "fringe", "chsh"] {
            let o = entbell(&[cmd, "--seed", "11", "--out", path_str(out)]);
            assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        }
    }
    let (sa, sb) = (dir_snapshot(&a), dir_snapshot(&b));
    assert_eq!(sa.len(), 6);
    assert_eq!(sa, sb);

    let c = tmp.path().join("c");
    entbell(&["chsh", "--seed", "12", "--out", path_str(&c)]);
    assert_ne!(
        fs::read(a.join("chsh_counts.csv")).unwrap(),
        fs::read(c.join("chsh_counts.csv")).unwrap()
    );
}

#[test]
fn persisted_config_reproduces_outputs() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = config_in(tmp.path().join("first"));
    cfg.seed = 5;
    cfg.fringe.replicas = 3;
    let path = write_config(tmp.path(), &cfg);
    let first = entbell(&["chsh", "--config", &path]);
    assert!(first.status.success());
    entbell(&["fringe", "--config", &path]);

    let reloaded = RunConfig::load(Path::new(&path)).unwrap();
    assert_eq!(reloaded, cfg);
    let second_dir = tmp.path().join("second");
    let again = entbell(&["chsh", "--config", &path, "--out", path_str(&second_dir)]);
    entbell(&["fringe", "--config", &path, "--out", path_str(&second_dir)]);
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(dir_snapshot(&cfg.out_dir), dir_snapshot(&second_dir));
}

#[test]
fn tables_parse_back_losslessly() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = config_in(tmp.path().to_path_buf());
    cfg.fringe.replicas = 4;

    let fr = run_fringe(&cfg).unwrap();
    for (path, rows) in &fr.tables {
        assert_eq!(&read_fringe_table(path).unwrap(), rows);
    }
    assert_eq!(
        read_fringe_summary(&tmp.path().join("fringe_summary.toml")).unwrap(),
        fr.summary
    );

    let ch = run_chsh(&cfg).unwrap();
    let rows = read_chsh_table(&tmp.path().join("chsh_counts.csv")).unwrap();
    assert_eq!(rows, ch.rows);
    let summary = read_chsh_summary(&tmp.path().join("chsh_summary.toml")).unwrap();
    assert_eq!(summary, ch.summary);
    assert_eq!(estimates_from_table(&rows).unwrap(), summary.estimates());

    cfg.exact = true;
    let ex = run_chsh(&cfg).unwrap();
    assert_eq!(read_chsh_table(&tmp.path().join("chsh_counts.csv")).unwrap(), ex.rows);
}

#[test]
fn exact_mode_ideal_visibility() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = config_in(tmp.path().join("out"));
    cfg.fringe.noise = NoiseModel::IDEAL;
    cfg.chsh.noise = NoiseModel::IDEAL;
    let path = write_config(tmp.path(), &cfg);

    let o = entbell(&["chsh", "--exact", "--config", &path]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("S=2.8284"));
    let s = read_chsh_summary(&cfg.out_dir.join("chsh_summary.toml")).unwrap();
    assert!((s.s - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
    assert!(s.violates_local_bound);

    assert!(entbell(&["fringe", "--exact", "--config", &path]).status.success());
    let f = read_fringe_summary(&cfg.out_dir.join("fringe_summary.toml")).unwrap();
    for scan in &f.scans {
        assert!((scan.visibility - 1.0).abs() < 1e-9, "{}", scan.visibility);
        assert_eq!(scan.replicas, 1);
    }
}

#[test]
fn half_visibility_does_not_violate() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = config_in(tmp.path().join("out"));
    cfg.chsh.noise = NoiseModel::uniform(0.5);
    let path = write_config(tmp.path(), &cfg);
    assert!(entbell(&["chsh", "--exact", "--config", &path]).status.success());
    let s = read_chsh_summary(&cfg.out_dir.join("chsh_summary.toml")).unwrap();
    assert!((s.s - std::f64::consts::SQRT_2).abs() < 1e-9);
    assert!(s.s < 2.0 && !s.violates_local_bound);
    assert!(s.sigmas_of_violation < 0.0);
}

#[test]
fn shifted_fringe_peaks_at_minus_theta2() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = config_in(tmp.path().to_path_buf());
    cfg.exact = true;
    cfg.fringe.theta2_deg = vec![22.5];
    cfg.fringe.alice_step_deg = 7.5;
    cfg.fringe.alice_points = 24;
    run_fringe(&cfg).unwrap();
    let rows = read_fringe_table(&tmp.path().join("fringe_theta2_22.5.csv")).unwrap();
    let best = rows.iter().max_by(|a, b| a.counts.total_cmp(&b.counts)).unwrap();
    assert_eq!(best.angle_deg, 157.5);
}

#[test]
fn calibrate_reports_and_rejects_bad_conventions() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = entbell(&["calibrate", "--out", path_str(&out)]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(text.contains("configured_fidelity=1.000000000000"));
    let report = read_calibration_report(&out.join("calibration.toml")).unwrap();
    assert!(report.passed());
    assert_eq!(report.discovered.qwp_deg, [45.0; 4]);
    let again = entbell(&["calibrate", "--out", path_str(&out)]);
    assert_eq!(o.stdout, again.stdout);

    let mut bad = config_in(out.clone());
    bad.calibration.analyzer_pairing = entbell::experiment::AnalyzerPairing::Crossed;
    let p = write_config(tmp.path(), &bad);
    let o = entbell(&["calibrate", "--config", &p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("status=FAILED"));

    let mut bad = RunConfig::default();
    bad.calibration.qwp_deg[2] = 0.0;
    let p = write_config(tmp.path(), &bad);
    assert_eq!(
        entbell(&["calibrate", "--config", &p, "--out", path_str(&out)])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn verify_succeeds() {
    let o = entbell(&["verify"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("critical_visibility=0.707107"));
    assert!(text.contains("lhv_max=2.0"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn bad_config_is_an_error() {
    let tmp = TempDir::new().unwrap();
    let p = tmp.path().join("bad.toml");
    fs::write(&p, "seed = \"one\"\n").unwrap();
    let o = entbell(&["chsh", "--config", path_str(&p)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    let o = entbell(&["chsh", "--config", path_str(&tmp.path().join("missing.toml"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn format_flag_limits_outputs() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o");
    assert!(entbell(&["chsh", "--format", "csv", "--out", path_str(&out)])
        .status
        .success());
    let names: Vec<String> = dir_snapshot(&out).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, ["chsh_counts.csv"]);
}
