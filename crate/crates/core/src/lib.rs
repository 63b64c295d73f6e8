//! Desk-scale laboratory for systemic risk in simulated financial markets.
//!
//! The crate couples three layers:
//!
//! * a deterministic multi-agent market simulator (heterogeneous trader
//!   types communicating over a trust/performance-weighted message graph,
//!   with policy levers: communication taxes, position limits, circuit
//!   breakers),
//! * a multi-scale analysis pipeline (Morlet continuous wavelet transform,
//!   kernel-density transfer entropy, quantile-thresholded directed
//!   networks per scale),
//! * a decomposable systemic risk index aggregating network, correlation,
//!   volatility, concentration, liquidity and contagion components.
//!
//! Everything is seeded and replayable: the same configuration and seed
//! produce bit-identical panels, simulation records and reports.

pub mod agents;
pub mod engine;
pub mod error;
pub mod garch;
pub mod kde;
pub mod market_data;
pub mod network;
pub mod sri;
pub mod stats;
pub mod te;
pub mod wavelet;

pub use error::{Error, Result};
