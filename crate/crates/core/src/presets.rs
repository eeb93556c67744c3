//! Parameter sets of the published figures.
//!
//! Each figure fixes `A` and `κ` directly. The sphere radius is chosen so
//! that the geometric `A0` of the reference cavity equals that `A`, which
//! fixes the mass and the gas damping consistently.

use crate::sphere::{self, CavityParams, FiniteSizeModel, SphereParams};
use crate::system::{DriveParams, SystemConfig};

pub const CAVITY_LENGTH: f64 = 0.01;
pub const CAVITY_WAIST: f64 = 40e-6;
pub const WAVELENGTH: f64 = 1064e-9;

pub fn reference_cavity(kappa: f64) -> CavityParams {
    CavityParams {
        length: CAVITY_LENGTH,
        waist: CAVITY_WAIST,
        wavelength: WAVELENGTH,
        kappa,
    }
}

/// Radius of a silica sphere whose point-dipole coupling in `cavity` is `a`.
pub fn radius_for_coupling(a: f64, cavity: &CavityParams) -> f64 {
    let unit = SphereParams {
        radius: 1e-7,
        density: SphereParams::DEFAULT_DENSITY,
        refractive_index: SphereParams::DEFAULT_INDEX,
    };
    let a_unit = sphere::coupling_a0(&unit, cavity);
    1e-7 * (a.abs() / a_unit).cbrt()
}

/// Configuration with coupling `a`, linewidth `kappa`, power into mode 1 and
/// amplitude ratio.
pub fn config(a: f64, kappa: f64, power: f64, ratio: f64) -> SystemConfig {
    let cavity = reference_cavity(kappa);
    let radius = radius_for_coupling(a, &cavity);
    SystemConfig {
        sphere: SphereParams {
            radius,
            density: SphereParams::DEFAULT_DENSITY,
            refractive_index: SphereParams::DEFAULT_INDEX,
        },
        cavity,
        drive: DriveParams::new(power, ratio),
        finite_size: FiniteSizeModel::Analytic,
        coupling_override: Some(a),
    }
}

/// Cooling maps: `A = κ/2 = 3e5`, 2 mW.
pub fn cooling_maps(ratio: f64) -> SystemConfig {
    config(3e5, 6e5, 2e-3, ratio)
}

/// Spectra near double resonance: `A = κ = 3e5`, 7 mW, `R = 0.5`.
pub fn spectra() -> SystemConfig {
    config(3e5, 3e5, 7e-3, 0.5)
}

/// Triple mode splitting: `A = κ = 3e5`, 2 mW, `R = 0.5`.
pub fn mode_splitting() -> SystemConfig {
    config(3e5, 3e5, 2e-3, 0.5)
}

/// Bistability: `A = 3κ = 6e5`, 0.37 mW, `R = 0.15`.
pub fn bistability() -> SystemConfig {
    config(6e5, 2e5, 0.37e-3, 0.15)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverted_radius_reproduces_coupling() {
        let cav = reference_cavity(3e5);
        let r = radius_for_coupling(3e5, &cav);
        let s = SphereParams::silica(r).unwrap();
        assert!((sphere::coupling_a0(&s, &cav) - 3e5).abs() < 1e-6 * 3e5);
        assert!(r > 80e-9 && r < 150e-9);
    }
}
