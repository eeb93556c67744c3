//! Run configuration file.
//!
//! Every key carries its unit. Loading fills in defaults, reads referenced
//! files and derives missing quantities; the result is the resolved
//! configuration that is both executed and written to the metadata sidecar.

use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use levsim::constants::{AMU, PA_PER_MBAR};
use levsim::presets;
use levsim::sphere::{CavityParams, FiniteSizeModel, GasParams, SphereParams};
use levsim::spectra::Provenance;
use levsim::{DriveParams, OperatingPoint, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub sphere: SphereSection,
    #[serde(default)]
    pub cavity: CavitySection,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub gas: GasSection,
    #[serde(default)]
    pub finite_size: FiniteSizeSection,
    #[serde(default)]
    pub operating_point: OperatingPointSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitpsd: Option<FitPsdSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_sweep: Option<RadiusSweepSection>,
    /// Written into sidecars; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunInfo {
    pub command: String,
    pub tool_version: String,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereSection {
    /// Derived from `cavity.coupling_a_rad_s` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_nm: Option<f64>,
    #[serde(default = "default_density")]
    pub density_kg_m3: f64,
    #[serde(default = "default_index")]
    pub refractive_index: f64,
}

fn default_density() -> f64 {
    SphereParams::DEFAULT_DENSITY
}
fn default_index() -> f64 {
    SphereParams::DEFAULT_INDEX
}

impl Default for SphereSection {
    fn default() -> Self {
        Self {
            radius_nm: None,
            density_kg_m3: default_density(),
            refractive_index: default_index(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    #[serde(default = "default_length")]
    pub length_mm: f64,
    #[serde(default = "default_waist")]
    pub waist_um: f64,
    #[serde(default = "default_wavelength")]
    pub wavelength_nm: f64,
    #[serde(default = "default_kappa")]
    pub kappa_rad_s: f64,
    /// Fixes `A` instead of deriving it from the sphere and cavity geometry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_a_rad_s: Option<f64>,
}

fn default_length() -> f64 {
    presets::CAVITY_LENGTH * 1e3
}
fn default_waist() -> f64 {
    presets::CAVITY_WAIST * 1e6
}
fn default_wavelength() -> f64 {
    presets::WAVELENGTH * 1e9
}
fn default_kappa() -> f64 {
    3e5
}

impl Default for CavitySection {
    fn default() -> Self {
        Self {
            length_mm: default_length(),
            waist_um: default_waist(),
            wavelength_nm: default_wavelength(),
            kappa_rad_s: default_kappa(),
            coupling_a_rad_s: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(default = "default_power")]
    pub power_mw: f64,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    #[serde(default)]
    pub phase1_rad: f64,
    #[serde(default = "default_phase2")]
    pub phase2_rad: f64,
}

fn default_power() -> f64 {
    2.0
}
fn default_ratio() -> f64 {
    1.0
}
fn default_phase2() -> f64 {
    FRAC_PI_4
}

impl Default for DriveSection {
    fn default() -> Self {
        Self {
            power_mw: default_power(),
            ratio: default_ratio(),
            phase1_rad: 0.0,
            phase2_rad: default_phase2(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSection {
    #[serde(default = "default_pressure")]
    pub pressure_mbar: f64,
    #[serde(default = "default_temperature")]
    pub temperature_k: f64,
    #[serde(default = "default_gas_mass")]
    pub molecular_mass_amu: f64,
}

fn default_pressure() -> f64 {
    1e-6
}
fn default_temperature() -> f64 {
    GasParams::ROOM_TEMPERATURE
}
fn default_gas_mass() -> f64 {
    GasParams::AIR_MASS_AMU
}

impl Default for GasSection {
    fn default() -> Self {
        Self {
            pressure_mbar: default_pressure(),
            temperature_k: default_temperature(),
            molecular_mass_amu: default_gas_mass(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum FiniteSizeSection {
    #[default]
    Analytic,
    /// `f = 1` at every radius.
    Unity,
    /// Pairs `[r_nm, f]`, either inline or from a CSV with header `r_nm,f`.
    Tabulated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table_csv: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<[f64; 2]>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingPointSection {
    pub delta1_rad_s: f64,
    pub delta2_rad_s: f64,
}

impl Default for OperatingPointSection {
    fn default() -> Self {
        Self {
            delta1_rad_s: -1e6,
            delta2_rad_s: -1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub delta1_min_rad_s: f64,
    pub delta1_max_rad_s: f64,
    pub delta2_min_rad_s: f64,
    pub delta2_max_rad_s: f64,
    /// `[Δ1 points, Δ2 points]`.
    #[serde(default = "default_resolution")]
    pub resolution: [usize; 2],
    /// Also compute the semiclassical phonon number in every cell.
    #[serde(default)]
    pub semiclassical: bool,
}

fn default_resolution() -> [usize; 2] {
    [256, 256]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Quantum,
    Semiclassical,
}

impl From<Method> for Provenance {
    fn from(m: Method) -> Self {
        match m {
            Method::Quantum => Provenance::Quantum,
            Method::Semiclassical => Provenance::Semiclassical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Uniform grid on `[-omega_max, omega_max]`; adaptive grid when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_max_rad_s: Option<f64>,
}

fn default_points() -> usize {
    levsim::spectra::DEFAULT_POINTS
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            method: Method::default(),
            points: default_points(),
            omega_max_rad_s: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepSection {
    /// `S_xx(Δ2, ω)` at `operating_point.delta1_rad_s`.
    SpectrumStack {
        delta2_min_rad_s: f64,
        delta2_max_rad_s: f64,
        #[serde(default = "default_rows")]
        rows: usize,
        omega_max_rad_s: f64,
        #[serde(default = "default_columns")]
        columns: usize,
        #[serde(default)]
        method: Method,
        /// Also write the flat binary stack.
        #[serde(default)]
        binary: bool,
    },
    /// Phonon numbers against pressure at the operating point.
    Pressure {
        pressure_min_mbar: f64,
        pressure_max_mbar: f64,
        #[serde(default = "default_sweep_points")]
        points: usize,
    },
    /// Normal modes along `Δ2` at `operating_point.delta1_rad_s`.
    Crossing {
        delta2_min_rad_s: f64,
        delta2_max_rad_s: f64,
        #[serde(default = "default_crossing_points")]
        points: usize,
    },
    /// Equilibrium against drive power at the operating point.
    Power {
        power_min_mw: f64,
        power_max_mw: f64,
        #[serde(default = "default_sweep_points")]
        points: usize,
    },
}

fn default_rows() -> usize {
    512
}
fn default_columns() -> usize {
    4096
}
fn default_sweep_points() -> usize {
    13
}
fn default_crossing_points() -> usize {
    321
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSection {
    pub power_mw: f64,
    pub waist_um: f64,
    #[serde(default = "default_wavelength")]
    pub wavelength_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitPsdSection {
    /// CSV with header `t_s,position`.
    pub input_csv: PathBuf,
    #[serde(default)]
    pub channel: levsim::psd::Channel,
    #[serde(default = "default_segments")]
    pub segments: usize,
    /// Free-space trap to compare the fitted frequency against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beam: Option<BeamSection>,
}

fn default_segments() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusSweepSection {
    #[serde(default = "default_r_min")]
    pub radius_min_nm: f64,
    #[serde(default = "default_r_max")]
    pub radius_max_nm: f64,
    #[serde(default = "default_r_points")]
    pub points: usize,
    /// Photons per mode.
    #[serde(default = "default_photons")]
    pub photons: f64,
    /// Free-space trap whose axial frequency is also reported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beam: Option<BeamSection>,
}

fn default_r_min() -> f64 {
    20.0
}
fn default_r_max() -> f64 {
    510.0
}
fn default_r_points() -> usize {
    50
}
fn default_photons() -> f64 {
    1e9
}

impl Default for RadiusSweepSection {
    fn default() -> Self {
        Self {
            radius_min_nm: default_r_min(),
            radius_max_nm: default_r_max(),
            points: default_r_points(),
            photons: default_photons(),
            beam: None,
        }
    }
}

fn bad(key: &str, reason: &str) -> CliError {
    CliError::Config(format!("`{key}`: {reason}"))
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(key, "must be positive and finite"))
    }
}

fn finite(key: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(bad(key, "must be finite"))
    }
}

fn range(key: &str, lo: f64, hi: f64, n: usize, min_points: usize) -> Result<(), CliError> {
    finite(key, lo)?;
    finite(key, hi)?;
    if !(hi > lo) {
        return Err(bad(key, "range is empty (max must exceed min)"));
    }
    if n < min_points {
        return Err(bad(key, &format!("needs at least {min_points} points")));
    }
    Ok(())
}

fn absolute(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl RunConfig {
    /// Parse JSON text, reporting the key path of any error.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("`{path}`: {}", e.into_inner()))
        })?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(bad(
                "schema_version",
                &format!("unsupported version {} (expected {SCHEMA_VERSION})", cfg.schema_version),
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve(base)
    }

    /// Fill in derived values, inline referenced tables and validate.
    pub fn resolve(mut self, base: &Path) -> Result<Self, CliError> {
        self.run = None;
        let c = &self.cavity;
        positive("cavity.length_mm", c.length_mm)?;
        positive("cavity.waist_um", c.waist_um)?;
        positive("cavity.wavelength_nm", c.wavelength_nm)?;
        positive("cavity.kappa_rad_s", c.kappa_rad_s)?;
        if let Some(a) = c.coupling_a_rad_s {
            finite("cavity.coupling_a_rad_s", a)?;
        }
        let s = &self.sphere;
        positive("sphere.density_kg_m3", s.density_kg_m3)?;
        if !(s.refractive_index > 1.0 && s.refractive_index.is_finite()) {
            return Err(bad("sphere.refractive_index", "must exceed 1"));
        }
        match (self.sphere.radius_nm, self.cavity.coupling_a_rad_s) {
            (Some(r), _) => positive("sphere.radius_nm", r)?,
            (None, Some(a)) => {
                let r = presets::radius_for_coupling(a, &self.cavity_params());
                self.sphere.radius_nm = Some(r * 1e9);
            }
            (None, None) => {
                return Err(bad(
                    "sphere.radius_nm",
                    "required unless cavity.coupling_a_rad_s is given",
                ))
            }
        }
        let d = &self.drive;
        if !(d.power_mw >= 0.0 && d.power_mw.is_finite()) {
            return Err(bad("drive.power_mw", "must be non-negative and finite"));
        }
        if !(0.0..=1.0).contains(&d.ratio) {
            return Err(bad("drive.ratio", "must lie in [0, 1]"));
        }
        finite("drive.phase1_rad", d.phase1_rad)?;
        finite("drive.phase2_rad", d.phase2_rad)?;
        let g = &self.gas;
        if !(g.pressure_mbar >= 0.0 && g.pressure_mbar.is_finite()) {
            return Err(bad("gas.pressure_mbar", "must be non-negative and finite"));
        }
        positive("gas.temperature_k", g.temperature_k)?;
        positive("gas.molecular_mass_amu", g.molecular_mass_amu)?;
        finite("operating_point.delta1_rad_s", self.operating_point.delta1_rad_s)?;
        finite("operating_point.delta2_rad_s", self.operating_point.delta2_rad_s)?;
        if let FiniteSizeSection::Tabulated { table_csv, points } = &mut self.finite_size {
            match (table_csv.take(), points.as_ref()) {
                (Some(_), Some(_)) => {
                    return Err(bad("finite_size", "give either `table_csv` or `points`, not both"))
                }
                (Some(path), None) => {
                    let model = FiniteSizeModel::from_csv_path(absolute(base, &path))
                        .map_err(|e| bad("finite_size.table_csv", &e.to_string()))?;
                    let FiniteSizeModel::Tabulated { table } = model else {
                        unreachable!()
                    };
                    *points = Some(table.iter().map(|&(r, f)| [r * 1e9, f]).collect());
                }
                (None, Some(_)) => {}
                (None, None) => return Err(bad("finite_size", "tabulated model needs `table_csv` or `points`")),
            }
        }
        self.finite_size_model()?;
        if let Some(grid) = &self.grid {
            range(
                "grid.delta1",
                grid.delta1_min_rad_s,
                grid.delta1_max_rad_s,
                grid.resolution[0],
                levsim::sweep::MIN_RESOLUTION,
            )?;
            range(
                "grid.delta2",
                grid.delta2_min_rad_s,
                grid.delta2_max_rad_s,
                grid.resolution[1],
                levsim::sweep::MIN_RESOLUTION,
            )?;
        }
        if let Some(sp) = &self.spectrum {
            if sp.points < 16 {
                return Err(bad("spectrum.points", "needs at least 16 points"));
            }
            if let Some(w) = sp.omega_max_rad_s {
                positive("spectrum.omega_max_rad_s", w)?;
            }
        }
        match &self.sweep {
            Some(SweepSection::SpectrumStack {
                delta2_min_rad_s,
                delta2_max_rad_s,
                rows,
                omega_max_rad_s,
                columns,
                ..
            }) => {
                range("sweep.delta2", *delta2_min_rad_s, *delta2_max_rad_s, *rows, 2)?;
                positive("sweep.omega_max_rad_s", *omega_max_rad_s)?;
                if *columns < 2 {
                    return Err(bad("sweep.columns", "needs at least 2 points"));
                }
            }
            Some(SweepSection::Pressure {
                pressure_min_mbar,
                pressure_max_mbar,
                points,
            }) => {
                positive("sweep.pressure_min_mbar", *pressure_min_mbar)?;
                range("sweep.pressure", *pressure_min_mbar, *pressure_max_mbar, *points, 2)?;
            }
            Some(SweepSection::Crossing {
                delta2_min_rad_s,
                delta2_max_rad_s,
                points,
            }) => range("sweep.delta2", *delta2_min_rad_s, *delta2_max_rad_s, *points, 3)?,
            Some(SweepSection::Power {
                power_min_mw,
                power_max_mw,
                points,
            }) => {
                positive("sweep.power_min_mw", *power_min_mw)?;
                range("sweep.power", *power_min_mw, *power_max_mw, *points, 2)?;
            }
            None => {}
        }
        if let Some(f) = &mut self.fitpsd {
            f.input_csv = absolute(base, &f.input_csv);
            if f.segments == 0 {
                return Err(bad("fitpsd.segments", "must be at least 1"));
            }
            if let Some(b) = &f.beam {
                check_beam("fitpsd.beam", b)?;
            }
        }
        if let Some(r) = &self.radius_sweep {
            positive("radius_sweep.radius_min_nm", r.radius_min_nm)?;
            range("radius_sweep.radius", r.radius_min_nm, r.radius_max_nm, r.points, 2)?;
            if !(r.photons >= 0.0 && r.photons.is_finite()) {
                return Err(bad("radius_sweep.photons", "must be non-negative and finite"));
            }
            if let Some(b) = &r.beam {
                check_beam("radius_sweep.beam", b)?;
            }
        }
        self.system()?;
        Ok(self)
    }

    pub fn cavity_params(&self) -> CavityParams {
        CavityParams {
            length: self.cavity.length_mm * 1e-3,
            waist: self.cavity.waist_um * 1e-6,
            wavelength: self.cavity.wavelength_nm * 1e-9,
            kappa: self.cavity.kappa_rad_s,
        }
    }

    pub fn sphere_params(&self) -> SphereParams {
        SphereParams {
            radius: self.sphere.radius_nm.unwrap_or(f64::NAN) * 1e-9,
            density: self.sphere.density_kg_m3,
            refractive_index: self.sphere.refractive_index,
        }
    }

    pub fn finite_size_model(&self) -> Result<FiniteSizeModel, CliError> {
        match &self.finite_size {
            FiniteSizeSection::Analytic => Ok(FiniteSizeModel::Analytic),
            FiniteSizeSection::Unity => Ok(FiniteSizeModel::unity()),
            FiniteSizeSection::Tabulated { points, .. } => {
                let table = points
                    .as_ref()
                    .map(|p| p.iter().map(|&[r, f]| (r * 1e-9, f)).collect())
                    .unwrap_or_default();
                FiniteSizeModel::tabulated(table).map_err(|e| bad("finite_size.points", &e.to_string()))
            }
        }
    }

    pub fn gas_params(&self) -> GasParams {
        GasParams {
            pressure: self.gas.pressure_mbar * PA_PER_MBAR,
            temperature: self.gas.temperature_k,
            molecular_mass: self.gas.molecular_mass_amu * AMU,
        }
    }

    pub fn system(&self) -> Result<SystemConfig, CliError> {
        let cfg = SystemConfig {
            sphere: self.sphere_params(),
            cavity: self.cavity_params(),
            drive: DriveParams {
                power: self.drive.power_mw * 1e-3,
                ratio: self.drive.ratio,
                phase1: self.drive.phase1_rad,
                phase2: self.drive.phase2_rad,
            },
            finite_size: self.finite_size_model()?,
            coupling_override: self.cavity.coupling_a_rad_s,
        };
        cfg.validate().map_err(CliError::from)?;
        Ok(cfg)
    }

    pub fn operating_point(&self) -> OperatingPoint {
        OperatingPoint::new(
            self.operating_point.delta1_rad_s,
            self.operating_point.delta2_rad_s,
            self.gas_params(),
        )
    }
}

fn check_beam(key: &str, b: &BeamSection) -> Result<(), CliError> {
    if !(b.power_mw >= 0.0 && b.power_mw.is_finite()) {
        return Err(bad(&format!("{key}.power_mw"), "must be non-negative and finite"));
    }
    positive(&format!("{key}.waist_um"), b.waist_um)?;
    positive(&format!("{key}.wavelength_nm"), b.wavelength_nm)
}

impl BeamSection {
    pub fn beam(&self) -> levsim::sphere::Beam {
        levsim::sphere::Beam {
            power: self.power_mw * 1e-3,
            waist: self.waist_um * 1e-6,
            wavelength: self.wavelength_nm * 1e-9,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{"schema_version": 1, "cavity": {"coupling_a_rad_s": 3e5}}"#
    }

    #[test]
    fn defaults_resolve_and_round_trip() {
        let cfg = RunConfig::from_json(minimal()).unwrap().resolve(Path::new(".")).unwrap();
        assert!(cfg.sphere.radius_nm.unwrap() > 80.0);
        let text = serde_json::to_string(&cfg).unwrap();
        let again = RunConfig::from_json(&text).unwrap().resolve(Path::new(".")).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.system().unwrap(), again.system().unwrap());
    }

    #[test]
    fn unknown_key_is_named_with_its_path() {
        let err = RunConfig::from_json(r#"{"schema_version": 1, "drive": {"power_w": 1}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("drive") && msg.contains("power_w"), "{msg}");
    }

    #[test]
    fn wrong_schema_version_rejected() {
        let err = RunConfig::from_json(r#"{"schema_version": 7}"#).unwrap_err();
        assert!(err.to_string().contains("schema_version"));
    }

    #[test]
    fn radius_or_coupling_required() {
        let err = RunConfig::from_json(r#"{"schema_version": 1}"#)
            .unwrap()
            .resolve(Path::new("."))
            .unwrap_err();
        assert!(err.to_string().contains("sphere.radius_nm"));
    }

    #[test]
    fn empty_radius_range_rejected() {
        let text = r#"{"schema_version": 1, "sphere": {"radius_nm": 100},
            "radius_sweep": {"radius_min_nm": 300, "radius_max_nm": 300}}"#;
        let err = RunConfig::from_json(text).unwrap().resolve(Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("radius_sweep.radius"), "{err}");
    }
}
