//! Scenario runners, shot-noise simulation, transcribed experimental tables and
//! file formats on top of `roi-core`.

pub mod compare;
pub mod config;
pub mod datasets;
pub mod error;
pub mod formats;
pub mod montecarlo;
pub mod quantities;
pub mod scenarios;

pub use error::{LabError, Result};
