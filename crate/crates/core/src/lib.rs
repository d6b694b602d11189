//! Numerical laboratory for the periodic NLS-KdV system
//!
//! ```text
//! i u_t + u_xx = alpha u v + beta |u|^2 u
//! v_t + v_xxx + (v^2/2)_x = gamma (|u|^2)_x
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`] holds torus grids, the Fourier convention and sparse space-time spectra.
//! * [`norms`] evaluates the weighted space-time norms of Bourgain type.
//! * [`estimates`] builds the bilinear counterexamples and checks the supporting
//!   integral, series, counting and multiplier bounds numerically.
//! * [`dynamics`] is an ETDRK4 pseudo-spectral solver with conservation monitors.
//! * [`picard`] solves the Duhamel formulation by fixed-point iteration.
//!
//! Fourier convention: `û(n) = (1/N) Σ_j f(x_j) e^{-i n x_j}` on the torus, and on
//! space-time `f(x,t) = (2π)^{-1/2} Σ_n e^{inx} ∫ e^{itτ} f̂(n,τ) dτ`.

pub mod dynamics;
pub mod error;
pub mod estimates;
pub mod norms;
pub mod picard;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
