//! Command-line companion to `tplcnn-core`: scenario files, PGM frames,
//! CSV logs and the input patterns used to drive the lattice.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod inputs;
pub mod pgm;
pub mod run;
pub mod scenario;

pub use error::{CliError, Result};
pub use run::{run_scenario, run_scenario_file, RunOptions, Summary};
pub use scenario::Scenario;
