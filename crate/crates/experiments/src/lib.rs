//! Scenario configuration, batch analyses, parameter sweeps and figure
//! presets on top of the solver crates. The `cho` binary is a thin shell
//! over this library.

pub mod analysis;
pub mod config;
mod error;
pub mod phase;
pub mod presets;
pub mod sweep;

pub use error::ExperimentError;
