//! Synthesis and diagnostics for ergodic and non-ergodic 1/f processes.
//!
//! * [`generators`]: fractional Gaussian noise and motion, fractional renewal
//!   and telegraph switching, AR(1), trend plus noise, and the Lorenz system.
//! * [`diagnostics`]: periodogram, autocorrelation, R/S, DFA, GPH, log-log
//!   fitting and window-conditioned spectra.
//! * [`ensemble`]: multi-seed experiments for ergodicity breaking and aging.

pub mod diagnostics;
pub mod ensemble;
mod error;
pub mod generators;
mod series;

pub use error::{Error, Result};
pub use series::{Provenance, TimeSeries};
