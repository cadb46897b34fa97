//! # tcost
//!
//! Standard-library companion to `tcost-core`: JSON input formats, run
//! configurations, parallel suite sweeps, report emission and the `tcost`
//! command-line tool.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`formats`] | space, density, potential and function files |
//! | [`config`] | [`RunConfig`](config::RunConfig), suites, parameters, seeded families |
//! | [`suite`] | [`run_suite`](suite::run_suite) and the per-check reduction |
//! | [`emit`] | `report.json`, `summary.csv`, `constants.csv`, plot tables |
//! | [`commands`] | the single-shot commands behind the CLI |
//! | [`error`] | error classes and their exit codes |

pub mod commands;
pub mod config;
pub mod emit;
pub mod error;
pub mod formats;
pub mod suite;

pub use config::{FamilySpec, Parameters, RunConfig, Suite};
pub use error::{CliError, CliResult};
pub use suite::{run_suite, run_suites, SuiteRun, SuiteSummary};
