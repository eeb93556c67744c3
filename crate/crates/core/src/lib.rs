//! Levitated-nanosphere cavity optomechanics in the self-trapping regime.
//!
//! A dielectric sphere sits in the standing waves of two driven cavity modes.
//! The same fields that trap it also cool it, so the mechanical frequency and
//! the optomechanical couplings are functions of the two laser detunings.
//!
//! Module map:
//!
//! * [`sphere`]: sphere and trap geometry (coupling `A(r)`, finite-size
//!   correction, gas damping, free-space standing-wave trap frequencies).
//! * [`equilibrium`]: effective potential, stationary points, bistability.
//! * [`cooling`]: linear-response sideband rates and phonon numbers.
//! * [`dynamics`]: 6x6 drift model, normal modes, avoided-crossing scans.
//! * [`spectra`]: quantum and semiclassical displacement spectra.
//! * [`psd`]: Welch periodograms and thermal Lorentzian fits.
//! * [`sweep`]: detuning maps, bistability loci, spectral stacks.
//!
//! All rates and frequencies are angular (rad/s) unless a name says otherwise.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod cooling;
pub mod dynamics;
pub mod eigen;
pub mod equilibrium;
pub mod error;
pub mod presets;
pub mod psd;
pub mod quadrature;
pub mod spectra;
pub mod sphere;
pub mod sweep;
pub mod system;

pub use error::{Error, Result};
pub use system::{DriveParams, OperatingPoint, SystemConfig};
