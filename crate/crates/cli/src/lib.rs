//! Scenario runner for the `fwm-vapor` simulator.
//!
//! A scenario is a strict JSON document describing the atom, drive, vapor,
//! grid, input beam and run directives; see `scenarios/` for examples.

pub mod config;
pub mod image_io;
pub mod run;

pub use config::{load_config, parse_config, ConfigError, ScenarioConfig};
pub use image_io::{load_image, save_amplitude_image, ImageError};
pub use run::{portable_config, prepare, run_propagation, run_scenario, run_sweep, Command, RunError};
