//! Front end for `harvest-core`: JSON run configurations, figure presets,
//! sweep runners and CSV/SVG artifacts.

pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod svg;

pub use config::RunConfig;
pub use error::{CliError, Result};
