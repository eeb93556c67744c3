//! Displacement noise spectra and the phonon numbers they imply.
//!
//! The spectra are normalised so that `∫ S_xx dω = <x^2> = <n> + 1/2` with `x`
//! in zero-point units. Two routes are provided:
//!
//! * semiclassical: `S(ω) = (1/2π)(A + iω)^-1 B B^T (A^T - iω)^-1` on the
//!   quadrature drift model, symmetric in `ω`;
//! * quantum: a frequency-domain solve of the operator Langevin equations
//!   with vacuum optical inputs and a thermal mechanical input, cross-checked
//!   against the closed form in [`closed_form_density`].
//!
//! With the quantum ordering used here the lobe at `+ω_M` carries weight
//! `<n>` (the blue sideband) and the lobe at `-ω_M` weight `<n> + 1`.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{Matrix6, Vector6};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{self, DriftModel};
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Default number of frequency points.
pub const DEFAULT_POINTS: usize = 8192;

/// Grid half-width beyond the highest mode frequency, in units of the largest rate.
pub const SPAN_RATES: f64 = 200.0;

/// Tail contributions above this fraction of the total trigger a warning.
pub const TAIL_WARNING: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Quantum,
    Semiclassical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    /// Angular frequency grid (rad/s), symmetric about zero.
    pub omega: Vec<f64>,
    /// Displacement spectrum (1/(rad/s)).
    pub s_xx: Vec<f64>,
    /// Amplitude-quadrature spectra of the two optical modes.
    pub optical: Option<[Vec<f64>; 2]>,
    pub provenance: Provenance,
    #[serde(skip)]
    pub model: DriftModel,
}

impl SpectrumResult {
    /// Evaluate the spectrum at an arbitrary frequency with the same method.
    pub fn density(&self, omega: f64) -> f64 {
        match self.provenance {
            Provenance::Quantum => quantum_density(&self.model, omega, Output::Position),
            Provenance::Semiclassical => semiclassical_density(&self.model, omega, Output::Position),
        }
    }

    /// Trapezoidal `∫ S_xx dω` over the stored grid.
    pub fn grid_integral(&self) -> f64 {
        self.omega
            .windows(2)
            .zip(self.s_xx.windows(2))
            .map(|(w, s)| 0.5 * (w[1] - w[0]) * (s[0] + s[1]))
            .sum()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["omega_rad_s", "S_xx"])?;
        for (o, s) in self.omega.iter().zip(&self.s_xx) {
            w.write_record([format!("{o:e}"), format!("{s:e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Which linear combination of operators to take the spectrum of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Output {
    Position,
    Optical(usize),
}

impl Output {
    fn index(self) -> usize {
        match self {
            Output::Position => 0,
            Output::Optical(j) => 2 + 2 * j,
        }
    }
}

/// Semiclassical spectrum of `x` at one frequency.
pub fn semiclassical_point(model: &DriftModel, omega: f64) -> f64 {
    semiclassical_density(model, omega, Output::Position)
}

fn semiclassical_density(model: &DriftModel, omega: f64, out: Output) -> f64 {
    let a = model.drift.map(|v| Complex64::new(v, 0.0)) + Matrix6::identity() * Complex64::new(0.0, omega);
    let mut e = Vector6::<Complex64>::zeros();
    e[out.index()] = Complex64::new(1.0, 0.0);
    // Row of (A + iω)^-1 from the transposed system.
    let Some(r) = a.transpose().lu().solve(&e) else {
        return f64::NAN;
    };
    let s: f64 = r
        .iter()
        .zip(model.diffusion.iter())
        .map(|(c, d)| c.norm_sqr() * d)
        .sum();
    s / (2.0 * PI)
}

/// Full 6×6 semiclassical spectral matrix at one frequency.
pub fn spectral_matrix(model: &DriftModel, omega: f64) -> Result<Matrix6<Complex64>> {
    let a = model.drift.map(|v| Complex64::new(v, 0.0));
    let iw = Matrix6::identity() * Complex64::new(0.0, omega);
    let left = (a + iw)
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular resolvent".into()))?;
    let d = model.diffusion_matrix().map(|v| Complex64::new(v, 0.0));
    Ok(left * d * left.adjoint() / Complex64::new(2.0 * PI, 0.0))
}

/// Operator drift matrix in the basis `(b, b†, a1, a1†, a2, a2†)`.
fn operator_drift(model: &DriftModel) -> Matrix6<Complex64> {
    let i = Complex64::i();
    let mut m = Matrix6::<Complex64>::zeros();
    let hg = model.gamma_m / 2.0;
    let hk = model.kappa / 2.0;
    m[(0, 0)] = -i * model.omega_m - hg;
    m[(1, 1)] = i * model.omega_m - hg;
    for j in 0..2 {
        let (a, ad) = (2 + 2 * j, 3 + 2 * j);
        let g = model.couplings[j];
        m[(0, a)] = -i * g;
        m[(0, ad)] = -i * g;
        m[(1, a)] = i * g;
        m[(1, ad)] = i * g;
        m[(a, 0)] = -i * g;
        m[(a, 1)] = -i * g;
        m[(ad, 0)] = i * g;
        m[(ad, 1)] = i * g;
        m[(a, a)] = i * model.detunings[j] - hk;
        m[(ad, ad)] = -i * model.detunings[j] - hk;
    }
    m
}

/// Quantum spectrum of `x` at one frequency from the operator solve.
pub fn quantum_point(model: &DriftModel, omega: f64) -> f64 {
    quantum_density(model, omega, Output::Position)
}

fn quantum_density(model: &DriftModel, omega: f64, out: Output) -> f64 {
    // x(ν) = c^T (-iν - M)^-1 N v_in(ν); S(ω) is the ν = -ω correlator.
    let nu = -omega;
    let m = operator_drift(model);
    let lhs = Matrix6::identity() * Complex64::new(0.0, -nu) - m;
    let mut c = Vector6::<Complex64>::zeros();
    let k = out.index();
    c[k] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    c[k + 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let Some(y) = lhs.transpose().lu().solve(&c) else {
        return f64::NAN;
    };
    let n = model.n_bath;
    let sg = model.gamma_m;
    let sk = model.kappa;
    // Normal-ordered optical inputs contribute only through a_in a_in^dag.
    let f = (n + 1.0) * sg * y[0].norm_sqr()
        + n * sg * y[1].norm_sqr()
        + sk * y[2].norm_sqr()
        + sk * y[4].norm_sqr();
    f / (2.0 * PI)
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Variant of the closed-form quantum spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    /// `M = 1 + μ Σ G^2 η`, optical weight `κ`, overall `1/4π`.
    Derived,
    /// `M = 1 + μ Σ G^2 |η|^2`, optical weight `κ/2`, no prefactor.
    Printed,
}

/// Closed-form quantum displacement spectrum.
///
/// ```text
/// S(ω) = { Γ[|χ_M(ω)|^2 n + |χ_M(-ω)|^2 (n+1)] + κ |μ|^2 Σ G_j^2 |χ_j(-ω)|^2 } / (4π |M|^2)
/// χ_M(ω) = 1/(Γ/2 - i(ω - ω_M)),  χ_j(ω) = 1/(κ/2 - i(ω + Δ_j)),
/// μ = χ_M(ω) - χ_M(-ω)^*,  η_j = χ_j(ω) - χ_j(-ω)^*,  M = 1 + μ Σ G_j^2 η_j
/// ```
pub fn closed_form_density(model: &DriftModel, omega: f64, form: ClosedForm) -> f64 {
    let i = Complex64::i();
    let chi_m = |w: f64| 1.0 / (model.gamma_m / 2.0 - i * (w - model.omega_m));
    let chi_o = |j: usize, w: f64| 1.0 / (model.kappa / 2.0 - i * (w + model.detunings[j]));
    let mu = chi_m(omega) - chi_m(-omega).conj();
    let n = model.n_bath;
    let mech = model.gamma_m * (chi_m(omega).norm_sqr() * n + chi_m(-omega).norm_sqr() * (n + 1.0));
    let mut sum_eta = Complex64::new(0.0, 0.0);
    let mut optical = 0.0;
    for j in 0..2 {
        let g2 = model.couplings[j] * model.couplings[j];
        let eta = chi_o(j, omega) - chi_o(j, -omega).conj();
        sum_eta += match form {
            ClosedForm::Derived => g2 * eta,
            ClosedForm::Printed => Complex64::new(g2 * eta.norm_sqr(), 0.0),
        };
        optical += g2 * chi_o(j, -omega).norm_sqr();
    }
    let big_m = 1.0 + mu * sum_eta;
    match form {
        ClosedForm::Derived => {
            (mech + model.kappa * mu.norm_sqr() * optical) / (4.0 * PI * big_m.norm_sqr())
        }
        ClosedForm::Printed => {
            (mech + model.kappa / 2.0 * mu.norm_sqr() * optical) / big_m.norm_sqr()
        }
    }
}

/// Characteristic frequencies and widths of a model: normal-mode frequencies
/// and the largest rate in the problem.
fn features(model: &DriftModel) -> Result<(Vec<f64>, f64)> {
    let ev = model.eigenvalues()?;
    let mut centres: Vec<f64> = ev.iter().map(|l| l.im.abs()).collect();
    centres.push(model.omega_m);
    centres.extend(model.detunings.iter().map(|d| d.abs()));
    let g = model.couplings.iter().fold(0.0f64, |a, g| a.max(g.abs() * std::f64::consts::SQRT_2));
    let rate = model.kappa.max(model.gamma_m).max(g);
    Ok((centres, rate))
}

/// Symmetric grid with `points` entries, half uniform and half clustered
/// logarithmically around the mode frequencies.
///
/// The span is the largest mode frequency plus [`SPAN_RATES`] times the largest of
/// `κ`, `Γ_M` and `ñg`.
pub fn frequency_grid(model: &DriftModel, points: usize) -> Result<Vec<f64>> {
    if points < 64 {
        return Err(Error::param("points", "need at least 64 frequency points"));
    }
    let (mut centres, rate) = features(model)?;
    centres.sort_by(f64::total_cmp);
    centres.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * rate);
    let fmax = centres.last().copied().unwrap_or(0.0);
    let span = fmax + SPAN_RATES * rate;
    let half = points / 2;
    let uniform = half / 2;
    let mut pos: Vec<f64> = (0..uniform)
        .map(|k| span * (k as f64 + 0.5) / uniform as f64)
        .collect();
    let clustered = half - uniform;
    let widths: Vec<f64> = model
        .eigenvalues()?
        .iter()
        .map(|l| l.re.abs())
        .chain(std::iter::once(model.gamma_m / 2.0))
        .filter(|w| *w > 0.0)
        .collect();
    let w_min = widths.iter().copied().fold(rate, f64::min).max(rate * 1e-9);
    let per = clustered / (2 * centres.len()).max(1);
    let lo = (w_min * 1e-2).ln();
    let hi = rate.ln() + 3.0f64.ln();
    for &c in &centres {
        for k in 0..per {
            let d = (lo + (hi - lo) * k as f64 / per.max(2).saturating_sub(1) as f64).exp();
            for x in [c - d, c + d] {
                if x > 0.0 && x < span {
                    pos.push(x);
                }
            }
        }
    }
    pos.sort_by(f64::total_cmp);
    pos.dedup();
    // Trim or pad to exactly `half` positive points.
    while pos.len() > half {
        let (k, _) = pos
            .windows(2)
            .enumerate()
            .min_by(|a, b| (a.1[1] - a.1[0]).total_cmp(&(b.1[1] - b.1[0])))
            .expect("at least two points");
        pos.remove(k + 1);
    }
    while pos.len() < half {
        let (k, _) = pos
            .windows(2)
            .enumerate()
            .max_by(|a, b| (a.1[1] - a.1[0]).total_cmp(&(b.1[1] - b.1[0])))
            .expect("at least two points");
        let mid = 0.5 * (pos[k] + pos[k + 1]);
        pos.insert(k + 1, mid);
    }
    let mut grid: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
    grid.extend(pos);
    Ok(grid)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("omega", "grid must be strictly increasing"));
    }
    Ok(())
}

fn evaluate(model: &DriftModel, grid: &[f64], f: fn(&DriftModel, f64, Output) -> f64) -> (Vec<f64>, [Vec<f64>; 2]) {
    let s = grid.par_iter().map(|&w| f(model, w, Output::Position)).collect();
    let o1 = grid.par_iter().map(|&w| f(model, w, Output::Optical(0))).collect();
    let o2 = grid.par_iter().map(|&w| f(model, w, Output::Optical(1))).collect();
    (s, [o1, o2])
}

/// Semiclassical spectrum on `grid` (or the default grid when `None`).
pub fn semiclassical_spectrum(model: &DriftModel, grid: Option<Vec<f64>>) -> Result<SpectrumResult> {
    model.ensure_stable()?;
    let omega = match grid {
        Some(g) => g,
        None => frequency_grid(model, DEFAULT_POINTS)?,
    };
    check_grid(&omega)?;
    let (s_xx, optical) = evaluate(model, &omega, semiclassical_density);
    Ok(SpectrumResult {
        omega,
        s_xx,
        optical: Some(optical),
        provenance: Provenance::Semiclassical,
        model: model.clone(),
    })
}

/// Quantum spectrum on `grid` (or the default grid when `None`).
pub fn quantum_spectrum(model: &DriftModel, grid: Option<Vec<f64>>) -> Result<SpectrumResult> {
    model.ensure_stable()?;
    let omega = match grid {
        Some(g) => g,
        None => frequency_grid(model, DEFAULT_POINTS)?,
    };
    check_grid(&omega)?;
    let (s_xx, optical) = evaluate(model, &omega, quantum_density);
    Ok(SpectrumResult {
        omega,
        s_xx,
        optical: Some(optical),
        provenance: Provenance::Quantum,
        model: model.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhononEstimate {
    /// `∫ S_xx dω - 1/2`.
    pub n: f64,
    /// `∫ S_xx dω` over the real line.
    pub variance: f64,
    pub quadrature_error: f64,
    /// Fraction of the variance lying outside the stored grid.
    pub tail_fraction: f64,
    pub truncation_warning: bool,
}

fn breakpoints(model: &DriftModel) -> Result<(Vec<f64>, f64)> {
    let ev = model.eigenvalues()?;
    let mut pts = vec![0.0];
    for l in &ev {
        for s in [-1.0, 1.0] {
            let c = s * l.im;
            pts.push(c);
            pts.push(c - 3.0 * l.re.abs());
            pts.push(c + 3.0 * l.re.abs());
        }
    }
    let (_, rate) = features(model)?;
    Ok((pts, rate))
}

fn integrate_between(s: &SpectrumResult, lo: f64, hi: f64) -> Result<f64> {
    let (pts, _) = breakpoints(&s.model)?;
    let mut edges: Vec<f64> = pts.into_iter().filter(|p| *p > lo && *p < hi).collect();
    edges.push(lo);
    edges.push(hi);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut total = 0.0;
    for w in edges.windows(2) {
        total += quadrature::integrate(|x| s.density(x), w[0], w[1], tolerance())?.value;
    }
    Ok(total)
}

fn tolerance() -> Tolerance {
    Tolerance {
        abs: 0.0,
        rel: 1e-10,
        max_evaluations: 2_000_000,
    }
}

/// `<n>` from adaptive integration of the spectrum over the real line.
pub fn phonon_from_spectrum(s: &SpectrumResult) -> Result<PhononEstimate> {
    let (pts, rate) = breakpoints(&s.model)?;
    let full = quadrature::integrate_real_line(|x| s.density(x), &pts, rate, tolerance())?;
    let (lo, hi) = (s.omega[0], s.omega[s.omega.len() - 1]);
    let inside = integrate_between(s, lo, hi)?;
    let tail_fraction = ((full.value - inside) / full.value).abs();
    Ok(PhononEstimate {
        n: full.value - 0.5,
        variance: full.value,
        quadrature_error: full.error,
        tail_fraction,
        truncation_warning: tail_fraction > TAIL_WARNING,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SidebandAsymmetry {
    /// `∫_{ω>0} S_xx`.
    pub blue: f64,
    /// `∫_{ω<0} S_xx`.
    pub red: f64,
    pub ratio: f64,
}

/// Blue-to-red sideband area ratio of a quantum spectrum.
pub fn sideband_asymmetry(s: &SpectrumResult) -> Result<SidebandAsymmetry> {
    if s.provenance != Provenance::Quantum {
        return Err(Error::param("spectrum", "sideband asymmetry needs a quantum spectrum"));
    }
    let (pts, rate) = breakpoints(&s.model)?;
    let pos: Vec<f64> = pts.iter().copied().filter(|p| *p >= 0.0).collect();
    let neg: Vec<f64> = pts.iter().copied().filter(|p| *p <= 0.0).collect();
    let blue = quadrature::integrate_real_line(
        |x| if x > 0.0 { s.density(x) } else { 0.0 },
        &pos,
        rate,
        tolerance(),
    )?
    .value;
    let red = quadrature::integrate_real_line(
        |x| if x < 0.0 { s.density(x) } else { 0.0 },
        &neg,
        rate,
        tolerance(),
    )?
    .value;
    Ok(SidebandAsymmetry {
        blue,
        red,
        ratio: blue / red,
    })
}

/// The `(x, x)` entry of the steady-state covariance.
pub fn lyapunov_variance(model: &DriftModel) -> Result<f64> {
    Ok(dynamics::DriftModel::steady_state_covariance(model)?[(0, 0)])
}
