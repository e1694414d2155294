//! Command-line front end. Every subcommand except `report` takes a TOML run config.
//! Exit codes: 2 config, 3 infeasible schedule, 4 verification, 5 budget.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cfmeasure::error::Error;
use cfmeasure::harness::{self, Pipeline, RunConfig};

#[derive(Parser)]
#[command(name = "cfmeasure", version, about = "Measures on continued fractions with prescribed exact approximation order")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every pipeline listed in the config.
    Run { config: PathBuf },
    /// Build the measure tree and write its snapshot.
    Build { config: PathBuf },
    /// Geometric and Fourier-side verification.
    Verify { config: PathBuf },
    /// Fourier transform on a geometric grid of frequencies.
    ScanDecay { config: PathBuf },
    /// Ball-condition exponents.
    ScanBalls { config: PathBuf },
    /// Exact-order scan of one sampled point.
    Exactness { config: PathBuf },
    /// Draw samples from the measure.
    Sample { config: PathBuf },
    /// Digit statistics of sampled points.
    Normality { config: PathBuf },
    /// Summarize an artifact directory, optionally against a reference decay table.
    Report { dir: PathBuf, golden: Option<PathBuf> },
}

fn pipelines(cmd: &Cmd) -> Option<(&PathBuf, Vec<Pipeline>)> {
    Some(match cmd {
        Cmd::Run { .. } | Cmd::Report { .. } => return None,
        Cmd::Build { config } => (config, vec![Pipeline::Build]),
        Cmd::Verify { config } => (config, vec![Pipeline::VerifyGeometry, Pipeline::VerifyFourier]),
        Cmd::ScanDecay { config } => (config, vec![Pipeline::DecayScan]),
        Cmd::ScanBalls { config } => (config, vec![Pipeline::ScanBalls]),
        Cmd::Exactness { config } => (config, vec![Pipeline::Exactness]),
        Cmd::Sample { config } => (config, vec![Pipeline::Sample]),
        Cmd::Normality { config } => (config, vec![Pipeline::Normality]),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(w) = std::env::var("CFMEASURE_WORKERS") {
        match w.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: CFMEASURE_WORKERS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    match dispatch(&cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: &Cmd) -> Result<u8, Error> {
    match cmd {
        Cmd::Report { dir, golden } => {
            let r = harness::report(dir, golden.as_deref())?;
            print!("{}", r.text);
            if r.golden_pass == Some(false) {
                return Ok(4);
            }
            Ok(if r.missing.is_empty() { 0 } else { 4 })
        }
        Cmd::Run { config } => {
            let cfg = RunConfig::load(config)?;
            let out = harness::run(&cfg)?;
            println!("wrote {} artifacts to {}", out.manifest.artifacts.len(), out.dir.display());
            Ok(0)
        }
        other => {
            let (config, list) = pipelines(other).expect("pipeline subcommand");
            let cfg = RunConfig::load(config)?;
            let out = harness::run_pipelines(&cfg, &list)?;
            println!("wrote {} artifacts to {}", out.manifest.artifacts.len(), out.dir.display());
            Ok(0)
        }
    }
}
