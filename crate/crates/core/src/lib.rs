//! Monte Carlo simulation of informational cascades on scale-free social
//! networks.
//!
//! Individuals hold a mental state `m` (believed usage rate of an
//! innovation), emit binary signals through a bounded sigmoidal decision
//! rule, and assimilate the mean signal of their neighbours. The crate
//! covers the decision functions and their fixed-point structure
//! ([`decision`]), preferential-attachment networks ([`network`]), the
//! per-run dynamics ([`dynamics`]), bias allocation scenarios
//! ([`scenarios`]), parameter sweeps ([`montecarlo`]) and CSV/config plumbing
//! ([`io_config`]).

pub mod decision;
pub mod dynamics;
pub mod error;
pub mod io_config;
pub mod montecarlo;
pub mod network;
pub mod scenarios;

pub use error::{Error, Result};
