//! Command-line front end: scenario files, the `table`, `sweep-phi`,
//! `fringe` and `selfcheck` commands, and their CSV/JSON output.

pub mod commands;
pub mod error;
pub mod output;
pub mod scenario;
pub mod selfcheck;

pub use commands::{DomainPolicy, SweepSpec};
pub use error::CliError;
pub use output::{Cell, Document};
pub use scenario::{Scenario, ScenarioOverrides};
