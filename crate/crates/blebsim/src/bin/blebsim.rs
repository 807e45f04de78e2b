//! Command-line driver for the verification studies and simulations.
//!
//! Exit codes: 0 all checks pass, 2 configuration error, 3 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use blebsim::harness::{
    concentration_study, force_limit, geometry_check, profile_check, render_report, simulate,
    species_check, HarnessError, RunConfig, SurfaceConfig, Summary,
};

#[derive(Parser)]
#[command(name = "blebsim", about = "Diffuse-interface membrane/cortex studies", version)]
struct Cli {
    /// Configuration file (TOML); defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override the study ε sequence, e.g. `0.04,0.02,0.01`.
    #[arg(long, global = true)]
    eps_seq: Option<String>,
    /// Override the primary surface, e.g. `sphere:0.3` or
    /// `ellipsoid:1.5,1,1@0,0,0`.
    #[arg(long, global = true)]
    surface: Option<String>,
    /// Deterministic seed recorded in artifacts.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// 1D transverse suite: optimal-profile ODE, Z, s1, e-coefficients.
    ProfileCheck,
    /// Curvature identities and tubular expansion orders.
    GeometryCheck,
    /// Concentration-lemma eps study.
    Concentration,
    /// Diffuse-force eps-convergence studies (gl, willmore, coupling-*).
    ForceLimit {
        /// Study kind override.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Time integration with the energy monitor.
    Simulate,
    /// Species transport conservation checks.
    SpeciesCheck,
}

fn build_config(cli: &Cli) -> Result<RunConfig, HarnessError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(seq) = &cli.eps_seq {
        cfg.study.eps_seq = seq
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| HarnessError::Config(format!("bad eps value '{v}'")))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(surface) = &cli.surface {
        cfg.surface = Some(SurfaceConfig::parse_flag(surface)?);
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: &Cli) -> Result<Summary, HarnessError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    }
    let mut cfg = build_config(cli)?;
    let out = &cli.out;
    match &cli.command {
        Command::ProfileCheck => profile_check(&cfg, out),
        Command::GeometryCheck => geometry_check(&cfg, out),
        Command::Concentration => concentration_study(&cfg, out),
        Command::ForceLimit { kind } => {
            if let Some(kind) = kind {
                cfg.study.kind = kind.clone();
            }
            force_limit(&cfg, out)
        }
        Command::Simulate => simulate(&cfg, out),
        Command::SpeciesCheck => species_check(&cfg, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(summary) => {
            let report = render_report(std::slice::from_ref(&summary));
            print!("{report}");
            let _ = std::fs::create_dir_all(&cli.out);
            let _ = std::fs::write(cli.out.join("report.md"), &report);
            if summary.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("numeric failure: one or more checks missed tolerance");
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
