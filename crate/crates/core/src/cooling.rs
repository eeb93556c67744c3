//! Linear-response (sideband) cooling rates and phonon numbers.
//!
//! Mode `j` scatters phonons up at `S_j(+omega_M)` and down at
//! `S_j(-omega_M)`, with
//!
//! ```text
//! S_j(omega) = G_j^2 kappa / ((Delta_j^x - omega)^2 + kappa^2/4)
//! ```
//!
//! where `G_j` is the linearised coupling of [`Equilibrium::linear_coupling`].
//! Net cooling means `Gamma_opt = sum_j S_j(omega_M) - S_j(-omega_M) < 0`.

use serde::Serialize;

use crate::constants::{HBAR, K_B};
use crate::equilibrium::Equilibrium;

/// Sideband spectral density of mode `j` (rad/s).
pub fn spectral_density(eq: &Equilibrium, j: usize, omega: f64, kappa: f64) -> f64 {
    let coupling = eq.linear_coupling(j);
    let detuning = eq.shifted_detunings[j] - omega;
    coupling * coupling * kappa / (detuning * detuning + kappa * kappa / 4.0)
}

/// `(S_1 + S_2)(+omega_M)` and `(S_1 + S_2)(-omega_M)`.
pub fn sideband_rates(eq: &Equilibrium, kappa: f64) -> (f64, f64) {
    let w = eq.omega_m;
    let up = (0..2).map(|j| spectral_density(eq, j, w, kappa)).sum();
    let down = (0..2).map(|j| spectral_density(eq, j, -w, kappa)).sum();
    (up, down)
}

/// Optical damping `Gamma_opt` (rad/s, negative for net cooling).
pub fn cooling_rate(eq: &Equilibrium, kappa: f64) -> f64 {
    // Summed per mode so that the result is exactly sum_j [S_j(w) - S_j(-w)].
    let w = eq.omega_m;
    (0..2)
        .map(|j| spectral_density(eq, j, w, kappa) - spectral_density(eq, j, -w, kappa))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoolingResult {
    /// `[S_1(+w), S_1(-w)]`.
    pub s1: [f64; 2],
    /// `[S_2(+w), S_2(-w)]`.
    pub s2: [f64; 2],
    pub gamma_opt: f64,
    /// Vacuum phonon number; `INFINITY` when the light heats.
    pub n_vacuum: f64,
    /// Phonon number including gas damping and heating.
    pub n_gas: f64,
    /// Vacuum temperature `hbar w (n_vac + 1/2) / k_B` (K).
    pub t_vacuum: f64,
    /// Equilibrium temperature with the gas bath (K).
    pub t_eq: f64,
    pub heating: bool,
}

/// Perturbative phonon numbers and temperatures.
///
/// `gamma_m` is the gas energy-damping rate and `temperature` the bath
/// temperature. When `Gamma_opt >= 0` the vacuum result is reported as
/// infinite and `heating` is set; the gas formula is still evaluated.
pub fn phonon_pt(eq: &Equilibrium, kappa: f64, gamma_m: f64, temperature: f64) -> CoolingResult {
    let w = eq.omega_m;
    let s1 = [spectral_density(eq, 0, w, kappa), spectral_density(eq, 0, -w, kappa)];
    let s2 = [spectral_density(eq, 1, w, kappa), spectral_density(eq, 1, -w, kappa)];
    let up = s1[0] + s2[0];
    let down = s1[1] + s2[1];
    let gamma_opt = (s1[0] - s1[1]) + (s2[0] - s2[1]);
    let heating = gamma_opt >= 0.0;
    let n_vacuum = if heating {
        f64::INFINITY
    } else {
        up / (down - up)
    };
    let n_thermal = K_B * temperature / (HBAR * w);
    let n_gas = (n_thermal * gamma_m + up) / (gamma_m + gamma_opt.abs());
    let t_vacuum = HBAR * w * (n_vacuum + 0.5) / K_B;
    let t_eq = if heating {
        f64::INFINITY
    } else {
        (gamma_m * temperature + gamma_opt.abs() * t_vacuum) / (gamma_m + gamma_opt.abs())
    };
    CoolingResult {
        s1,
        s2,
        gamma_opt,
        n_vacuum,
        n_gas,
        t_vacuum,
        t_eq,
        heating,
    }
}
