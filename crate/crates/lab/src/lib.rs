//! Configuration-driven experiment runner on top of `strichartz`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod registry;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::{LabError, Result};
pub use registry::{lookup, registry, Experiment};
pub use runner::{expand, run, Report};
