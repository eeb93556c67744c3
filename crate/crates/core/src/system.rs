//! Composite description of the physical system and of an operating point.

use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::sphere::{self, CavityParams, FiniteSizeModel, GasParams, SphereParams};

/// Laser drive of the two cavity modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Input power into mode 1 (W).
    pub power: f64,
    /// Amplitude ratio `E2 / E1`, in `[0, 1]`.
    pub ratio: f64,
    /// Standing-wave phase of mode 1 (rad).
    pub phase1: f64,
    /// Standing-wave phase of mode 2 (rad).
    pub phase2: f64,
}

impl DriveParams {
    pub fn new(power: f64, ratio: f64) -> Self {
        Self {
            power,
            ratio,
            phase1: 0.0,
            phase2: std::f64::consts::FRAC_PI_4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power >= 0.0 && self.power.is_finite()) {
            return Err(Error::param("drive.power", "must be non-negative and finite"));
        }
        if !(0.0..=1.0).contains(&self.ratio) {
            return Err(Error::param("drive.ratio", "must lie in [0, 1]"));
        }
        if !(self.phase1.is_finite() && self.phase2.is_finite()) {
            return Err(Error::param("drive.phase", "must be finite"));
        }
        Ok(())
    }
}

/// Everything that defines the system apart from the detunings and the gas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub sphere: SphereParams,
    pub cavity: CavityParams,
    pub drive: DriveParams,
    pub finite_size: FiniteSizeModel,
    /// Use this coupling `A` (rad/s) instead of the one derived from the
    /// sphere and cavity geometry. The sphere still sets the mass.
    pub coupling_override: Option<f64>,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        self.sphere.validate()?;
        self.cavity.validate()?;
        self.drive.validate()?;
        self.finite_size.validate()?;
        if let Some(a) = self.coupling_override {
            if !a.is_finite() {
                return Err(Error::param("coupling_override", "must be finite"));
            }
        }
        Ok(())
    }

    /// Coupling `A` (rad/s); negative for node-seeking spheres.
    pub fn coupling(&self) -> Result<f64> {
        match self.coupling_override {
            Some(a) => Ok(a),
            None => sphere::coupling_a(&self.sphere, &self.cavity, &self.finite_size),
        }
    }

    pub fn mass(&self) -> f64 {
        self.sphere.mass()
    }

    pub fn wavenumber(&self) -> f64 {
        self.cavity.wavenumber()
    }

    pub fn kappa(&self) -> f64 {
        self.cavity.kappa
    }

    /// Drive amplitude of mode 1, `sqrt(kappa P / (hbar omega_L))` (s^-1/2 scale,
    /// so that `|alpha|^2 = E^2 / (kappa^2/4 + Delta^2)` is a photon number).
    pub fn drive_amplitude(&self) -> f64 {
        (self.cavity.kappa * self.drive.power / (HBAR * self.cavity.omega_laser())).sqrt()
    }

    /// `[E1, E2]` with `E2 = R E1`.
    pub fn drive_amplitudes(&self) -> [f64; 2] {
        let e1 = self.drive_amplitude();
        [e1, self.drive.ratio * e1]
    }

    pub fn phases(&self) -> [f64; 2] {
        [self.drive.phase1, self.drive.phase2]
    }

    /// Same system with the drive power multiplied by `factor`.
    pub fn with_power_scaled(&self, factor: f64) -> Self {
        let mut c = self.clone();
        c.drive.power *= factor;
        c
    }
}

/// Detunings and gas conditions at which the system is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Bare detuning of mode 1, laser minus cavity (rad/s).
    pub delta1: f64,
    /// Bare detuning of mode 2 (rad/s).
    pub delta2: f64,
    pub gas: GasParams,
}

impl OperatingPoint {
    pub fn new(delta1: f64, delta2: f64, gas: GasParams) -> Self {
        Self { delta1, delta2, gas }
    }

    pub fn detunings(&self) -> [f64; 2] {
        [self.delta1, self.delta2]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta1.is_finite() && self.delta2.is_finite()) {
            return Err(Error::param("detuning", "must be finite"));
        }
        self.gas.validate()
    }
}
