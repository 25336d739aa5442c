//! Library side of the `oscavg` command: config parsing, reports, sweeps.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod sweep;

pub use commands::{Format, Output};
pub use config::{Axis, Grid, SystemFile};
pub use error::{CliError, Result};
pub use report::{CaseReport, CaseSummary};
pub use sweep::SweepRow;
