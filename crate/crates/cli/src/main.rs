use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use jsm_cli::{run, CliError, CliResult, ExperimentConfig, Kind};

#[derive(Parser)]
#[command(name = "jsm", version, about = "Numerical experiments on joint spectral multipliers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Marcinkiewicz seminorms and norm of a multiplier
    Marcinkiewicz(Common),
    /// Decay of the Mellin transform of the localized pieces
    MellinDecay(Common),
    /// L² constant of the Littlewood–Paley square function
    SquareFunction(Common),
    /// Kernel path against spectral path on OU ⊗ torus
    RieszCrossCheck(Common),
    /// Growth, smoothness and near-diagonal kernel estimates
    CzEstimates(Common),
    /// Calderón–Zygmund decomposition of a fixture
    CzDecompose(Common),
    /// Empirical L^p operator norm
    NormEstimate(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed of sampled experiments
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// key=value, applied after the config file (repeatable)
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn execute(kind: Kind, args: &Common) -> CliResult<bool> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("field `config`: {}: {e}", p.display())))?;
            ExperimentConfig::parse(kind, &text)?
        }
        None => ExperimentConfig::new(kind),
    };
    if let Some(s) = args.seed {
        cfg.set("seed", &s.to_string())?;
    }
    for kv in &args.overrides {
        cfg.apply_override(kv)?;
    }
    let report = run(&cfg)?;
    report.write(&args.out)?;
    for inv in &report.outcome.invariants {
        let tag = if inv.passed { "ok  " } else { "FAIL" };
        eprintln!("{tag} {}: {}", inv.name, inv.detail);
    }
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Marcinkiewicz(a) => (Kind::Marcinkiewicz, a),
        Command::MellinDecay(a) => (Kind::MellinDecay, a),
        Command::SquareFunction(a) => (Kind::SquareFunction, a),
        Command::RieszCrossCheck(a) => (Kind::RieszCrossCheck, a),
        Command::CzEstimates(a) => (Kind::CzEstimates, a),
        Command::CzDecompose(a) => (Kind::CzDecompose, a),
        Command::NormEstimate(a) => (Kind::NormEstimate, a),
    };
    match execute(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("jsm {kind}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
