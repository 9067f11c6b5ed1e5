//! Simulation kernels for tunneling-phase-logic cellular nonlinear networks.
//!
//! Everything in this crate is pure computation over in-memory grids: a
//! single pumped tunnel-junction element ([`element`]), the capacitively
//! coupled lattice of such elements ([`network`]), phase-map analysis
//! ([`analysis`]) and a reference integrator for the standard CNN state
//! equation ([`cnn`]). File formats, the CLI and thread pools live in the
//! `tplcnn` companion crate.
//!
//! Units are normalized throughout: charge in units of `e`, voltage in
//! units of `e/C`, time in units of `RC`.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod capacitance;
pub mod cnn;
pub mod element;
mod error;
pub mod grid;
mod math;
pub mod network;
mod tunneling;

pub use error::{Error, Result};
pub use grid::Grid;
pub use tunneling::StochasticTunneling;
