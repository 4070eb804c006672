//! Scenario runner for gravitational Faraday rotation in Kerr: loads TOML
//! scenarios, runs the integrate, frame, polarization and verification
//! stages and exports plot data.

pub mod batch;
pub mod pipeline;
pub mod plots;
pub mod scenario;

pub use pipeline::{run, run_scenario, Artifacts, CliError, Command, Format, Options};
pub use scenario::{dump, load, load_str, Loaded, Scenario, ScenarioError};
