mod cz;
mod decompose;
mod marcinkiewicz;
mod mellin;
mod norm;
mod riesz;
mod square;

use std::time::Instant;

use crate::config::{ExperimentConfig, Kind};
use crate::error::{usage, CliResult};
use crate::report::{Outcome, Report};

/// Runs the experiment described by `cfg`.
pub fn run(cfg: &ExperimentConfig) -> CliResult<Report> {
    let start = Instant::now();
    let record_runtime = cfg.bool("record_runtime", false)?;
    let outcome: Outcome = match cfg.kind() {
        Kind::Marcinkiewicz => marcinkiewicz::run(cfg)?,
        Kind::MellinDecay => mellin::run(cfg)?,
        Kind::SquareFunction => square::run(cfg)?,
        Kind::RieszCrossCheck => riesz::run(cfg)?,
        Kind::CzEstimates => cz::run(cfg)?,
        Kind::CzDecompose => decompose::run(cfg)?,
        Kind::NormEstimate => norm::run(cfg)?,
    };
    if cfg.has("seed") {
        // deterministic kinds still validate and echo a supplied seed
        cfg.seed()?;
    }
    let unused = cfg.unused();
    if !unused.is_empty() {
        return Err(usage(format!("field `{}`: not a parameter of `{}`", unused.join("`, `"), cfg.kind())));
    }
    Ok(Report {
        config: cfg.echo(),
        outcome,
        runtime_seconds: record_runtime.then(|| start.elapsed().as_secs_f64()),
    })
}
