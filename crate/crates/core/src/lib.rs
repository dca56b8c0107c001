//! Simulation of a probabilistically shaped PAM-8 intensity-modulation /
//! direct-detection optical link.
//!
//! The crate is organised the way the signal flows:
//!
//! * [`shaping`] builds the super-Gaussian Maxwell-Boltzmann family
//!   `P(x) ∝ exp(-v·|x - c|^α)` on PAM level alphabets, solves for `v` at a
//!   target entropy and does net-rate / FEC-overhead planning.
//! * [`txdsp`] generates PRBS-mapped or shaped symbol streams, RRC pulse
//!   shaping, band-limited resampling and DAC quantization.
//! * [`channel`] is a behavioural model of the optical path: EML, fiber
//!   dispersion, VOA, SOA with ASE, square-law PIN detection and the
//!   oscilloscope front end.
//! * [`rxdsp`] holds Gardner timing recovery, the Volterra nonlinear
//!   equalizer, prior-aware decision thresholds, demapping and BER counting.
//! * [`experiment`] sweeps received optical power, builds BER waterfalls and
//!   extracts receiver sensitivity at the HD-FEC threshold.
//! * [`config`] and [`cli`] turn TOML experiment descriptions and presets
//!   into runs.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod rxdsp;
pub mod shaping;
pub mod spectrum;
pub mod txdsp;

pub use error::{Error, Result};

/// Pre-FEC BER threshold of 7 % overhead hard-decision FEC.
pub const HD_FEC_THRESHOLD: f64 = 3.8e-3;

/// Code rate of a 7 % overhead FEC, `1 / 1.07`.
pub const HD_FEC_RATE: f64 = 1.0 / 1.07;
