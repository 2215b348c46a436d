//! Discrete-time three-phase synchronous-reference-frame PLL with a model-free
//! feed-forward frequency estimator.
//!
//! The crate is organized along the signal path:
//!
//! * [`signals`] synthesizes three-phase test inputs and normalizes them,
//! * [`transforms`] projects them onto the rotating dq frame,
//! * [`estimator`] tracks the input frequency per phase and averages it,
//! * [`pll`] closes the loop, tunes it by the symmetrical optimum and analyses it,
//! * [`metrics`] scores synchronization quality,
//! * [`scenario`] wires everything into declarative, reproducible runs.
//!
//! ```
//! use srfpll::pll::{tune_symmetrical_optimum, phase_margin, TunerInput};
//!
//! let input = TunerInput::new(40.0, 0.00025);
//! let (gains, omega_c) = tune_symmetrical_optimum(&input).unwrap();
//! let pm = phase_margin(&gains, input.tau, input.plant_gain).unwrap();
//! assert!((omega_c - 100.0).abs() < 1e-9);
//! assert!(pm.phi_m_deg > 87.0 && pm.phi_m_deg < 90.0);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimator;
pub mod metrics;
pub mod pll;
pub mod scenario;
pub mod signals;
pub mod transforms;

pub use error::{Error, IngestError, Result};
