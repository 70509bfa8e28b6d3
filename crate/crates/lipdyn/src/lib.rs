//! File formats, dataset layout and the command-line front end of the
//! lip-dynamics verifier.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod features;
pub mod frames;
pub mod landmarks;
pub mod model_file;
pub mod report;
pub mod template_file;

pub use cli::run;
pub use error::{CliError, Result};
