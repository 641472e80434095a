//! Batch experiments over `jsm-core`: configuration, runners and report
//! writing behind the `jsm` binary.

pub mod config;
pub mod error;
pub mod experiments;
pub mod multipliers;
pub mod norm;
pub mod report;

pub use config::{ExperimentConfig, Kind};
pub use error::{CliError, CliResult};
pub use experiments::run;
pub use norm::{estimate_pnorm, NormEstimate, SpectralOperator};
pub use report::Report;
