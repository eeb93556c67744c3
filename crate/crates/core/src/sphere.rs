//! Sphere- and trap-geometry dependent quantities.
//!
//! The point-dipole coupling `A0(r)` scales with the sphere volume. Larger
//! spheres average the standing wave over their own extent, which is captured
//! by a finite-size factor `f(r)` with `A(r) = A0(r) f(r)^2`.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{AMU, C, EPSILON_0, HBAR, K_B};
use crate::error::{Error, Result};

/// Silica nanosphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereParams {
    /// Radius (m).
    pub radius: f64,
    /// Density (kg/m^3).
    pub density: f64,
    /// Refractive index at the trapping wavelength.
    pub refractive_index: f64,
}

impl SphereParams {
    pub const DEFAULT_DENSITY: f64 = 2000.0;
    pub const DEFAULT_INDEX: f64 = 1.45;

    /// Silica sphere of the given radius with default density and index.
    pub fn silica(radius: f64) -> Result<Self> {
        Self::new(radius, Self::DEFAULT_DENSITY, Self::DEFAULT_INDEX)
    }

    pub fn new(radius: f64, density: f64, refractive_index: f64) -> Result<Self> {
        let s = Self {
            radius,
            density,
            refractive_index,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::param("sphere.radius", "must be positive and finite"));
        }
        if !(self.density > 0.0 && self.density.is_finite()) {
            return Err(Error::param("sphere.density", "must be positive and finite"));
        }
        if !(self.refractive_index > 1.0 && self.refractive_index.is_finite()) {
            return Err(Error::param("sphere.refractive_index", "must exceed 1"));
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3)
    }

    pub fn mass(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3) * self.density
    }

    /// Relative permittivity `n^2`.
    pub fn permittivity(&self) -> f64 {
        self.refractive_index * self.refractive_index
    }

    /// Clausius-Mossotti factor `(eps - 1) / (eps + 2)`.
    pub fn clausius_mossotti(&self) -> f64 {
        let eps = self.permittivity();
        (eps - 1.0) / (eps + 2.0)
    }

    /// Static polarizability `4 pi eps0 r^3 (n^2 - 1)/(n^2 + 2)` (C m^2 / V).
    pub fn polarizability(&self) -> f64 {
        4.0 * PI * EPSILON_0 * self.radius.powi(3) * self.clausius_mossotti()
    }
}

/// Fabry-Perot cavity supporting the two trapping modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Length (m).
    pub length: f64,
    /// Mode waist (m).
    pub waist: f64,
    /// Laser wavelength (m).
    pub wavelength: f64,
    /// Energy decay rate (rad/s).
    pub kappa: f64,
}

impl CavityParams {
    pub fn new(length: f64, waist: f64, wavelength: f64, kappa: f64) -> Result<Self> {
        let c = Self {
            length,
            waist,
            wavelength,
            kappa,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("cavity.length", self.length),
            ("cavity.waist", self.waist),
            ("cavity.wavelength", self.wavelength),
            ("cavity.kappa", self.kappa),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive and finite"));
            }
        }
        Ok(())
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Laser angular frequency (rad/s).
    pub fn omega_laser(&self) -> f64 {
        2.0 * PI * C / self.wavelength
    }

    /// `pi (w/2)^2 L`.
    pub fn mode_volume(&self) -> f64 {
        PI * (self.waist / 2.0).powi(2) * self.length
    }
}

/// Background gas responsible for Brownian damping and heating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    /// Pressure (Pa).
    pub pressure: f64,
    /// Bath temperature (K).
    pub temperature: f64,
    /// Mean molecular mass (kg).
    pub molecular_mass: f64,
}

impl GasParams {
    pub const AIR_MASS_AMU: f64 = 28.97;
    pub const ROOM_TEMPERATURE: f64 = 300.0;

    /// Room-temperature air at `pressure` (Pa).
    pub fn air(pressure: f64) -> Self {
        Self {
            pressure,
            temperature: Self::ROOM_TEMPERATURE,
            molecular_mass: Self::AIR_MASS_AMU * AMU,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pressure >= 0.0 && self.pressure.is_finite()) {
            return Err(Error::param("gas.pressure", "must be non-negative and finite"));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::param("gas.temperature", "must be positive"));
        }
        if !(self.molecular_mass > 0.0 && self.molecular_mass.is_finite()) {
            return Err(Error::param("gas.molecular_mass", "must be positive"));
        }
        Ok(())
    }

    /// Ideal-gas number density `P / (k_B T)` (1/m^3).
    pub fn number_density(&self) -> f64 {
        self.pressure / (K_B * self.temperature)
    }

    /// Mean thermal speed `sqrt(8 k_B T / (pi m_g))` (m/s).
    pub fn mean_speed(&self) -> f64 {
        (8.0 * K_B * self.temperature / (PI * self.molecular_mass)).sqrt()
    }
}

/// How the finite-size correction `f(r)` is obtained.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FiniteSizeModel {
    /// Volume average of the standing-wave modulation over the sphere.
    #[default]
    Analytic,
    /// Linear interpolation in a table of `(radius (m), f)` pairs.
    Tabulated { table: Vec<(f64, f64)> },
}

/// Result of evaluating the finite-size correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteSize {
    pub factor: f64,
    /// The averaged modulation changed sign: the sphere is trapped at a node.
    pub node_trapped: bool,
}

impl FiniteSizeModel {
    /// A table that forces `f = 1` (point-dipole limit) at every radius.
    pub fn unity() -> Self {
        FiniteSizeModel::Tabulated {
            table: vec![(1e-12, 1.0), (1.0, 1.0)],
        }
    }

    /// Build a validated tabulated model.
    pub fn tabulated(table: Vec<(f64, f64)>) -> Result<Self> {
        let model = FiniteSizeModel::Tabulated { table };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let FiniteSizeModel::Tabulated { table } = self else {
            return Ok(());
        };
        if table.is_empty() {
            return Err(Error::Config("finite-size table is empty".into()));
        }
        for w in table.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Config(format!(
                    "finite-size table radii must be strictly increasing (at r = {:e} m)",
                    w[1].0
                )));
            }
        }
        if let Some(&(r, f)) = table.iter().find(|(_, f)| !(0.0..=1.5).contains(f)) {
            return Err(Error::Config(format!(
                "finite-size table value f = {f} at r = {r:e} m outside [0, 1.5]"
            )));
        }
        Ok(())
    }

    /// Read a CSV table with header `r_nm,f`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "r_nm" || &headers[1] != "f" {
            return Err(Error::Config(format!(
                "finite-size table header must be `r_nm,f`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut table = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record[i].parse::<f64>().map_err(|e| {
                    Error::Config(format!("finite-size table row {}: {e}", line + 2))
                })
            };
            table.push((parse(0)? * 1e-9, parse(1)?));
        }
        Self::tabulated(table)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref()).map_err(|e| {
            Error::Config(format!("cannot open {}: {e}", path.as_ref().display()))
        })?;
        Self::from_csv_reader(file)
    }
}

/// `G(q) = 3 (sin q - q cos q) / q^3`: the average of `cos(q z / r)` over a
/// ball of radius `r`, i.e. `3 j1(q) / q`.
pub fn volume_average_cos(q: f64) -> f64 {
    let q = q.abs();
    if q < 1e-3 {
        let q2 = q * q;
        1.0 - q2 / 10.0 + q2 * q2 / 280.0
    } else {
        3.0 * (q.sin() - q * q.cos()) / q.powi(3)
    }
}

/// Finite-size correction `f(r)` at wavenumber `k`.
pub fn finite_size_factor(model: &FiniteSizeModel, radius: f64, k: f64) -> Result<FiniteSize> {
    if !(radius > 0.0) {
        return Err(Error::param("radius", "must be positive"));
    }
    match model {
        FiniteSizeModel::Analytic => {
            let g = volume_average_cos(2.0 * k * radius);
            Ok(FiniteSize {
                factor: g.abs().sqrt(),
                node_trapped: g < 0.0,
            })
        }
        FiniteSizeModel::Tabulated { table } => {
            model.validate()?;
            Ok(FiniteSize {
                factor: interpolate_clamped(table, radius),
                node_trapped: false,
            })
        }
    }
}

fn interpolate_clamped(table: &[(f64, f64)], x: f64) -> f64 {
    let first = table[0];
    let last = table[table.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let i = table.partition_point(|&(r, _)| r <= x);
    let (x0, y0) = table[i - 1];
    let (x1, y1) = table[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Point-dipole coupling `A0 = (3/2) (eps-1)/(eps+2) (V_s/V_c) omega_L` (rad/s).
pub fn coupling_a0(sphere: &SphereParams, cavity: &CavityParams) -> f64 {
    1.5 * sphere.clausius_mossotti() * sphere.volume() / cavity.mode_volume() * cavity.omega_laser()
}

/// Size-corrected coupling `A = A0 f^2`.
///
/// Negative when the averaged modulation changes sign, so that the sphere
/// seeks the nodes rather than the antinodes of each standing wave.
pub fn coupling_a(
    sphere: &SphereParams,
    cavity: &CavityParams,
    model: &FiniteSizeModel,
) -> Result<f64> {
    let fs = finite_size_factor(model, sphere.radius, cavity.wavenumber())?;
    let a = coupling_a0(sphere, cavity) * fs.factor * fs.factor;
    Ok(if fs.node_trapped { -a } else { a })
}

/// Size dependence of the coupling at a fixed photon number per mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeCoupling {
    /// Sphere radius (m).
    pub radius: f64,
    /// Point-dipole coupling (rad/s).
    pub a0: f64,
    /// Size-corrected coupling, signed (rad/s).
    pub a: f64,
    pub factor: f64,
    pub node_trapped: bool,
    /// `sqrt(2 hbar |A| k^2 n / m)` (rad/s).
    pub omega_m: f64,
    /// `(hbar k^2 / 4)^(1/4) (|A|^3 n / m)^(1/4)` (rad/s).
    pub g_tilde: f64,
}

/// Near-symmetric-drive estimates of `omega_M` and `g~` for a sphere holding
/// `photons` photons in each mode.
pub fn size_coupling(
    sphere: &SphereParams,
    cavity: &CavityParams,
    model: &FiniteSizeModel,
    photons: f64,
) -> Result<SizeCoupling> {
    sphere.validate()?;
    if !(photons >= 0.0 && photons.is_finite()) {
        return Err(Error::param("photons", "must be non-negative and finite"));
    }
    let k = cavity.wavenumber();
    let fs = finite_size_factor(model, sphere.radius, k)?;
    let a0 = coupling_a0(sphere, cavity);
    let a_abs = a0 * fs.factor * fs.factor;
    let m = sphere.mass();
    Ok(SizeCoupling {
        radius: sphere.radius,
        a0,
        a: if fs.node_trapped { -a_abs } else { a_abs },
        factor: fs.factor,
        node_trapped: fs.node_trapped,
        omega_m: (2.0 * HBAR * a_abs * k * k * photons / m).sqrt(),
        g_tilde: (HBAR * k * k / 4.0).powf(0.25) * (a_abs.powi(3) * photons / m).powf(0.25),
    })
}

/// Gas-collision damping `(8/3) pi (m_g/m_s) r^2 n_g v_g` (rad/s).
pub fn gas_damping(sphere: &SphereParams, gas: &GasParams) -> f64 {
    8.0 / 3.0
        * PI
        * (gas.molecular_mass / sphere.mass())
        * sphere.radius.powi(2)
        * gas.number_density()
        * gas.mean_speed()
}

/// Thermal bath occupancy `k_B T / (hbar omega)`.
pub fn bath_occupancy(temperature: f64, omega: f64) -> f64 {
    K_B * temperature / (HBAR * omega)
}

/// One of the two counter-propagating free-space trapping beams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beam {
    /// Power per beam (W).
    pub power: f64,
    /// Focused spot radius (m).
    pub waist: f64,
    /// Wavelength (m).
    pub wavelength: f64,
}

impl Beam {
    /// Intensity scale `P / (pi w^2)` entering the trap-frequency formulas.
    pub fn intensity(&self) -> f64 {
        self.power / (PI * self.waist * self.waist)
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapFrequencies {
    /// Axial angular frequency (rad/s), size corrected.
    pub axial: f64,
    /// Transverse angular frequency (rad/s).
    pub transverse: f64,
    /// `axial / transverse`.
    pub ratio: f64,
}

/// Standing-wave dipole trap frequencies.
///
/// `omega_a = sqrt(4 alpha k^2 I0 / (m eps0 c)) f(r)` and
/// `omega_t = sqrt(8 alpha I0 / (m eps0 c w^2))`.
pub fn trap_frequencies(
    sphere: &SphereParams,
    beam: &Beam,
    model: &FiniteSizeModel,
) -> Result<TrapFrequencies> {
    sphere.validate()?;
    if !(beam.power >= 0.0) {
        return Err(Error::param("beam.power", "must be non-negative"));
    }
    if !(beam.waist > 0.0) {
        return Err(Error::param("beam.waist", "must be positive"));
    }
    if !(beam.wavelength > 0.0) {
        return Err(Error::param("beam.wavelength", "must be positive"));
    }
    let k = beam.wavenumber();
    let scale = sphere.polarizability() * beam.intensity() / (sphere.mass() * EPSILON_0 * C);
    let fs = finite_size_factor(model, sphere.radius, k)?;
    let axial = (4.0 * k * k * scale).sqrt() * fs.factor;
    let transverse = (8.0 * scale / (beam.waist * beam.waist)).sqrt();
    Ok(TrapFrequencies {
        axial,
        transverse,
        ratio: axial / transverse,
    })
}

/// Spot radius implied by a measured small-sphere frequency ratio: `sqrt(2) ratio / k`.
pub fn waist_from_ratio(ratio: f64, wavelength: f64) -> f64 {
    std::f64::consts::SQRT_2 * ratio * wavelength / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn paper_cavity() -> CavityParams {
        CavityParams::new(0.01, 40e-6, 1064e-9, 6e5).unwrap()
    }

    #[test]
    fn a0_matches_quoted_magnitude() {
        let s = SphereParams::silica(150e-9).unwrap();
        let a0 = coupling_a0(&s, &paper_cavity());
        assert!(a0 > 7.5e5 && a0 < 8.5e5, "A0 = {a0:e}");
    }

    #[test]
    fn a0_scales_with_volume_and_inverse_length() {
        let c = paper_cavity();
        let a1 = coupling_a0(&SphereParams::silica(50e-9).unwrap(), &c);
        let a2 = coupling_a0(&SphereParams::silica(100e-9).unwrap(), &c);
        assert_relative_eq!(a2 / a1, 8.0, max_relative = 1e-12);
        let long = CavityParams { length: 0.02, ..c };
        let s = SphereParams::silica(100e-9).unwrap();
        assert_relative_eq!(coupling_a0(&s, &long), a2 / 2.0, max_relative = 1e-12);
        let tiny = SphereParams::silica(1e-12).unwrap();
        assert!(coupling_a0(&tiny, &c) < 1e-9);
    }

    #[test]
    fn analytic_factor_small_sphere_is_unity() {
        let k = 2.0 * PI / 1064e-9;
        let f = finite_size_factor(&FiniteSizeModel::Analytic, 1e-9, k).unwrap();
        assert!((f.factor - 1.0).abs() < 1e-4);
        assert!(!f.node_trapped);
        let f200 = finite_size_factor(&FiniteSizeModel::Analytic, 100e-9, k).unwrap();
        assert!(f200.factor > 0.9);
    }

    /// Bisection on `tan q = q` in (pi, 3pi/2), written out independently.
    fn first_zero_oracle() -> f64 {
        let h = |q: f64| q.sin() - q * q.cos();
        let (mut lo, mut hi) = (PI + 1e-6, 1.5 * PI - 1e-6);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(lo).signum() == h(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn analytic_factor_first_zero() {
        let q_star = first_zero_oracle();
        assert!((q_star - 4.4934).abs() < 1e-4);
        let k = 2.0 * PI / 1064e-9;
        let r_star = q_star / (2.0 * k);
        assert!((r_star - 380e-9).abs() < 2e-9, "r* = {r_star:e}");
        let before = finite_size_factor(&FiniteSizeModel::Analytic, r_star * 0.999, k).unwrap();
        let after = finite_size_factor(&FiniteSizeModel::Analytic, r_star * 1.001, k).unwrap();
        assert!(before.factor < 0.05 && !before.node_trapped);
        assert!(after.factor < 0.05 && after.node_trapped);
        // 510 nm spheres sit at a node.
        let big = finite_size_factor(&FiniteSizeModel::Analytic, 510e-9, k).unwrap();
        assert!(big.node_trapped);
    }

    #[test]
    fn series_and_closed_form_agree_at_switch() {
        let a = volume_average_cos(0.999e-3);
        let b = 3.0 * (1.001e-3f64.sin() - 1.001e-3 * 1.001e-3f64.cos()) / 1.001e-3f64.powi(3);
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn tabulated_interpolates_and_clamps() {
        let m = FiniteSizeModel::tabulated(vec![(100e-9, 1.0), (300e-9, 0.5)]).unwrap();
        let k = 1.0;
        assert_relative_eq!(finite_size_factor(&m, 200e-9, k).unwrap().factor, 0.75);
        assert_relative_eq!(finite_size_factor(&m, 10e-9, k).unwrap().factor, 1.0);
        assert_relative_eq!(finite_size_factor(&m, 1e-6, k).unwrap().factor, 0.5);
    }

    #[test]
    fn tabulated_rejects_bad_tables() {
        let empty = FiniteSizeModel::Tabulated { table: vec![] };
        assert!(finite_size_factor(&empty, 1e-7, 1.0).is_err());
        assert!(FiniteSizeModel::tabulated(vec![(2e-7, 1.0), (1e-7, 1.0)]).is_err());
        assert!(FiniteSizeModel::tabulated(vec![(1e-7, 2.0)]).is_err());
    }

    #[test]
    fn table_csv_parses_nanometres() {
        let csv = "r_nm,f\n50,1.0\n300,0.4\n";
        let m = FiniteSizeModel::from_csv_reader(csv.as_bytes()).unwrap();
        let FiniteSizeModel::Tabulated { table } = &m else {
            panic!()
        };
        assert_relative_eq!(table[1].0, 300e-9);
        assert!(FiniteSizeModel::from_csv_reader("r,f\n1,1\n".as_bytes()).is_err());
        assert!(FiniteSizeModel::from_csv_reader("r_nm,f\n1,x\n".as_bytes()).is_err());
    }

    #[test]
    fn gas_damping_vanishes_and_is_linear_in_pressure() {
        let s = SphereParams::silica(100e-9).unwrap();
        assert_eq!(gas_damping(&s, &GasParams::air(0.0)), 0.0);
        let g1 = gas_damping(&s, &GasParams::air(100.0));
        let g2 = gas_damping(&s, &GasParams::air(50.0));
        assert_relative_eq!(g1 / g2, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn gas_damping_kinetic_theory_oracle() {
        // r = 100 nm, 1 mbar of air at 300 K, evaluated step by step.
        let kb = 1.380649e-23_f64;
        let mg = 28.97 * 1.66053906660e-27;
        let ng = 100.0 / (kb * 300.0);
        let vg = (8.0 * kb * 300.0 / (std::f64::consts::PI * mg)).sqrt();
        let ms = 4.0 / 3.0 * std::f64::consts::PI * 1e-21 * 2000.0;
        let expected = 8.0 / 3.0 * std::f64::consts::PI * mg / ms * 1e-14 * ng * vg;
        let s = SphereParams::silica(100e-9).unwrap();
        let got = gas_damping(&s, &GasParams::air(100.0));
        assert_relative_eq!(got, expected, max_relative = 1e-12);
        // Roughly 6.6 kHz angular damping for these numbers.
        assert!(got > 5e3 && got < 8e3, "{got}");
    }

    #[test]
    fn gas_damping_inverse_radius() {
        let gas = GasParams::air(10.0);
        let a = gas_damping(&SphereParams::silica(50e-9).unwrap(), &gas);
        let b = gas_damping(&SphereParams::silica(100e-9).unwrap(), &gas);
        assert_relative_eq!(a / b, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn trap_frequency_quoted_values() {
        let beam = Beam {
            power: 0.150,
            waist: 2.3e-6,
            wavelength: 1064e-9,
        };
        let s = SphereParams::silica(20e-9).unwrap();
        let t = trap_frequencies(&s, &beam, &FiniteSizeModel::unity()).unwrap();
        let fa = t.axial / (2.0 * PI);
        assert!((fa - 207e3).abs() / 207e3 < 0.1, "f_a = {fa}");
        let w = waist_from_ratio(9.8, 1064e-9);
        assert!((w - 2.3e-6).abs() < 0.1e-6, "w = {w:e}");
    }

    #[test]
    fn trap_ratio_is_geometric() {
        let beam = Beam {
            power: 0.07,
            waist: 3.1e-6,
            wavelength: 1064e-9,
        };
        for r in [20e-9, 60e-9, 150e-9] {
            let s = SphereParams::silica(r).unwrap();
            let t = trap_frequencies(&s, &beam, &FiniteSizeModel::unity()).unwrap();
            let expected = beam.wavenumber().powi(2) * beam.waist.powi(2) / 2.0;
            assert_relative_eq!(t.ratio * t.ratio, expected, max_relative = 1e-12);
        }
        let a = trap_frequencies(&SphereParams::silica(30e-9).unwrap(), &beam, &FiniteSizeModel::unity())
            .unwrap();
        let b = trap_frequencies(&SphereParams::silica(90e-9).unwrap(), &beam, &FiniteSizeModel::unity())
            .unwrap();
        assert_relative_eq!(a.axial, b.axial, max_relative = 1e-12);
    }
}
