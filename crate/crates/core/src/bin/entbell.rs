use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use entbell::config::{OutputFormat, RunConfig};
use entbell::harness::{run_calibrate, run_chsh, run_fringe, run_verify};

/// Exit status when a check or calibration does not hold.
const EXIT_CHECK_FAILED: u8 = 1;
/// Exit status for configuration, I/O and numerical errors.
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "entbell",
    version,
    about = "Bell test between a photon's polarization and an entangled pair"
)]
struct Cli {
    /// TOML run configuration (defaults to the bundled configuration)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Base seed for all sampling
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Use expected counts instead of sampling
    #[arg(long, global = true)]
    exact: bool,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Output format to write; repeat for several (default: from config)
    #[arg(long, global = true, value_enum)]
    format: Vec<FormatArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Summary,
}

#[derive(Subcommand)]
enum Command {
    /// Search for the preparation settings and check the configured ones
    Calibrate,
    /// Alice-angle fringe scans at fixed Bob settings
    Fringe,
    /// Counts at the 16 CHSH settings and the resulting S
    Chsh,
    /// Run the invariant suite
    Verify,
}

fn load(cli: &Cli) -> entbell::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.exact {
        cfg.exact = true;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if !cli.format.is_empty() {
        cfg.formats = cli
            .format
            .iter()
            .map(|f| match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Summary => OutputFormat::Summary,
            })
            .collect();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> entbell::Result<bool> {
    if let Command::Verify = cli.command {
        let report = run_verify()?;
        print!("{}", report.render());
        return Ok(report.passed());
    }
    let cfg = load(cli)?;
    match cli.command {
        Command::Calibrate => {
            let report = run_calibrate(&cfg)?;
            print!("{}", report.render());
            Ok(report.passed())
        }
        Command::Fringe => {
            print!("{}", run_fringe(&cfg)?.render());
            Ok(true)
        }
        Command::Chsh => {
            print!("{}", run_chsh(&cfg)?.summary.render());
            Ok(true)
        }
        Command::Verify => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("entbell: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
