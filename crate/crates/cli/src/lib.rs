//! Frame-directory IO, experiment configuration and the `stvsr` command line
//! on top of `stvsr-core`.

pub mod app;
pub mod checks;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

pub use app::run_cli;
pub use config::ExperimentConfig;
pub use error::{CliError, Result};
