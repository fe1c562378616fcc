//! Experiment runner for the `krr-core` solvers.
//!
//! A JSON [`ExperimentConfig`] describes a grid of (solver, shift, noise
//! level, seed) runs on one test problem; [`run_experiment`] executes it and
//! writes `results.csv`, convergence plots and, for image problems,
//! reconstructed images.

pub mod config;
pub mod demo;
pub mod error;
pub mod experiment;
pub mod output;
pub mod spectra;

pub use config::{ExperimentConfig, GridPoint, Method, ProblemSpec, SolverSpec};
pub use demo::{demo_config, DemoTable};
pub use error::{CliError, Result};
pub use experiment::{
    run_experiment, run_grid, run_point, ExperimentOutput, ExperimentRecord, RunOutcome,
};
pub use output::{emit_pgm, encode_pgm};
pub use spectra::{compute_spectra, write_spectra, SpectraSettings};
