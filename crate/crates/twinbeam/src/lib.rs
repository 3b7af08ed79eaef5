//! Simulation toolkit for pulse-pumped fiber optical parametric amplifiers
//! producing intensity-correlated twin beams in the telecom band.
//!
//! The crate models the full measurement chain: classical gain and
//! saturation in the fiber (coupled-mode ladder with pump depletion and a
//! split-step pulse propagator), the two-mode Gaussian quantum state carrying
//! the intensity-difference noise, Raman thermal noise, and the balanced
//! detection chain with losses, VOA trimming and shot-noise calibration.
//! Brute-force Fock-space and truncated-Wigner Monte Carlo oracles cross-check
//! every quantum moment the fast path produces.
//!
//! Start with the runnable programs in `examples/`, one per capability, or
//! the `simulate` binary for scenario-driven sweeps.

pub mod config;
pub mod constants;
pub mod detection;
pub mod fiber;
pub mod fock;
pub mod gaussian;
pub mod meanfield;
pub mod optim;
pub mod pulse;
pub mod quantum;
pub mod sweep;

pub use fiber::FiberSpec;
pub use gaussian::{photon_statistics, GaussianTwoModeState, PhotonStatistics};
pub use pulse::{gaussian_pulse, pulse_metrics, GridSpec, OpticalPulse, PulseMetrics};
