//! Static self-trapping: effective potential, equilibria and bistability.
//!
//! With the fields adiabatically following the sphere, mode `j` holds
//! `|alpha_j|^2 = E_j^2 / (kappa^2/4 + Delta_j(x)^2)` photons, where
//! `Delta_j(x) = Delta_j + A cos^2(kx - phi_j)`. The resulting optical force
//! derives from
//!
//! ```text
//! V(x) = -(hbar E1^2 / (kappa/2)) sum_j R_j^2 atan(Delta_j(x) / (kappa/2))
//! dV/dx = hbar k A E1^2 sum_j R_j^2 sin 2(kx - phi_j) / |kappa/2 - i Delta_j(x)|^2
//! ```
//!
//! with `R_1 = 1`, `R_2 = R`. The drive power only rescales `V`, so the
//! positions and the number of equilibria never depend on it.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::constants::HBAR;
use crate::error::Result;
use crate::system::{OperatingPoint, SystemConfig};

/// Grid points per period used to bracket stationary points.
pub const SCAN_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    /// Local minimum of `V`.
    Stable,
    /// Local maximum of `V`.
    Unstable,
}

/// A stationary point of the effective potential with everything the
/// linearised dynamics need.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibrium {
    /// Position in `[0, pi/k)` (m).
    pub x0: f64,
    /// `k x0` in `[0, pi)`.
    pub kx0: f64,
    /// Real field amplitudes after removing the phases.
    pub fields: [f64; 2],
    pub photon_numbers: [f64; 2],
    /// `Delta_j + A cos^2(k x0 - phi_j)` (rad/s).
    pub shifted_detunings: [f64; 2],
    /// `(2 hbar A k^2 / m) sum_j |alpha_j|^2 cos 2(k x0 - phi_j)` (rad^2/s^2).
    pub omega_m_sq: f64,
    /// `sqrt(omega_m_sq)`, zero when `omega_m_sq <= 0`.
    pub omega_m: f64,
    /// `sqrt(hbar / (2 m omega_M))` (m); infinite when `omega_m` is zero.
    pub x_zpf: f64,
    /// `sqrt(2) k A X_zpf sin 2(k x0 - phi_j)` (rad/s).
    pub g: [f64; 2],
    /// `g_j |alpha_j|` (rad/s).
    pub g_tilde: [f64; 2],
    pub stability: Stability,
    /// `V(x0)` (J).
    pub potential: f64,
    /// `V''(x0)` (J/m^2).
    pub curvature: f64,
}

impl Equilibrium {
    pub fn is_stable(&self) -> bool {
        self.stability == Stability::Stable
    }

    /// Stable and with a real mechanical frequency.
    pub fn is_trapping(&self) -> bool {
        self.is_stable() && self.omega_m_sq > 0.0
    }

    /// Coefficient `G_j` of `(a_j + a_j^dag)(b + b^dag)` in the linearised
    /// Hamiltonian (`H/hbar`), i.e. `k A X_zpf sin 2(k x0 - phi_j) alpha_j`.
    ///
    /// This is the coupling the linear dynamics and the sideband rates run on.
    /// It differs from `g_tilde` by the `sqrt(2)` of the rescaled coordinate.
    pub fn linear_coupling(&self, j: usize) -> f64 {
        self.g_tilde[j] / SQRT_2
    }

    pub fn linear_couplings(&self) -> [f64; 2] {
        [self.linear_coupling(0), self.linear_coupling(1)]
    }
}

/// Dimensionless shape of the landscape, independent of the drive power.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Landscape {
    a: f64,
    half_kappa: f64,
    delta: [f64; 2],
    weight: [f64; 2],
    phase: [f64; 2],
}

impl Landscape {
    pub(crate) fn new(config: &SystemConfig, op: &OperatingPoint) -> Result<Self> {
        config.validate()?;
        op.validate()?;
        let r = config.drive.ratio;
        Ok(Self {
            a: config.coupling()?,
            half_kappa: config.kappa() / 2.0,
            delta: op.detunings(),
            weight: [1.0, r * r],
            phase: config.phases(),
        })
    }

    fn shifted(&self, theta: f64, j: usize) -> f64 {
        self.delta[j] + self.a * (theta - self.phase[j]).cos().powi(2)
    }

    fn lorentz(&self, d: f64) -> f64 {
        self.half_kappa * self.half_kappa + d * d
    }

    /// `sum_j w_j sin 2(theta - phi_j) / D_j(theta)`; `dV/dx = hbar k A E1^2` times this.
    pub(crate) fn force_shape(&self, theta: f64) -> f64 {
        (0..2)
            .map(|j| {
                let s = (2.0 * (theta - self.phase[j])).sin();
                self.weight[j] * s / self.lorentz(self.shifted(theta, j))
            })
            .sum()
    }

    /// `d force_shape / d theta`.
    pub(crate) fn force_shape_slope(&self, theta: f64) -> f64 {
        (0..2)
            .map(|j| {
                let arg = 2.0 * (theta - self.phase[j]);
                let (s, c) = arg.sin_cos();
                let d = self.shifted(theta, j);
                let den = self.lorentz(d);
                self.weight[j] * (2.0 * c / den + 2.0 * self.a * d * s * s / (den * den))
            })
            .sum()
    }

    /// `V / (hbar E1^2)`.
    pub(crate) fn potential_shape(&self, theta: f64) -> f64 {
        -(0..2)
            .map(|j| self.weight[j] * (self.shifted(theta, j) / self.half_kappa).atan())
            .sum::<f64>()
            / self.half_kappa
    }

    /// All `theta` in `[0, pi)` where the force vanishes, with the sign of
    /// `V''` (true for a minimum).
    pub(crate) fn stationary_points(&self, n: usize) -> Vec<(f64, bool)> {
        let step = PI / n as f64;
        let sign_a = if self.a < 0.0 { -1.0 } else { 1.0 };
        let vals: Vec<f64> = (0..=n).map(|i| self.force_shape(i as f64 * step)).collect();
        let mut roots = Vec::new();
        for i in 0..n {
            let (t0, t1) = (i as f64 * step, (i + 1) as f64 * step);
            let (h0, h1) = (vals[i], vals[i + 1]);
            let root = if h0 == 0.0 {
                Some(t0)
            } else if h0 * h1 < 0.0 {
                Some(self.bisect(t0, t1, h0))
            } else {
                None
            };
            if let Some(theta) = root {
                // V'' = hbar k^2 A E1^2 * slope: take the sign of A into account.
                let curv = sign_a * self.force_shape_slope(theta);
                let is_min = if curv != 0.0 {
                    curv > 0.0
                } else {
                    // Degenerate curvature: fall back to the bracketing signs.
                    sign_a * (h1 - h0) > 0.0
                };
                roots.push((theta, is_min));
            }
        }
        roots
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, h_lo: f64) -> f64 {
        let lo_positive = h_lo > 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let h = self.force_shape(mid);
            if h == 0.0 {
                return mid;
            }
            if (h > 0.0) == lo_positive {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Effective potential `V(x)` (J).
pub fn effective_potential(x: f64, config: &SystemConfig, op: &OperatingPoint) -> Result<f64> {
    let land = Landscape::new(config, op)?;
    let e1 = config.drive_amplitude();
    Ok(HBAR * e1 * e1 * land.potential_shape(config.wavenumber() * x))
}

/// Gradient `dV/dx` (N).
pub fn potential_gradient(x: f64, config: &SystemConfig, op: &OperatingPoint) -> Result<f64> {
    let land = Landscape::new(config, op)?;
    let e1 = config.drive_amplitude();
    let k = config.wavenumber();
    Ok(HBAR * k * land.a * e1 * e1 * land.force_shape(k * x))
}

/// Every stationary point of `V` in one period `[0, pi/k)`, ordered by position.
pub fn find_equilibria(config: &SystemConfig, op: &OperatingPoint) -> Result<Vec<Equilibrium>> {
    let land = Landscape::new(config, op)?;
    Ok(land
        .stationary_points(SCAN_POINTS)
        .into_iter()
        .map(|(theta, is_min)| build(config, &land, theta, is_min))
        .collect())
}

fn build(config: &SystemConfig, land: &Landscape, theta: f64, is_min: bool) -> Equilibrium {
    let k = config.wavenumber();
    let m = config.mass();
    let kappa = config.kappa();
    let e = config.drive_amplitudes();
    let a = land.a;
    let mut fields = [0.0; 2];
    let mut photons = [0.0; 2];
    let mut shifted = [0.0; 2];
    let mut cos_sum = 0.0;
    for j in 0..2 {
        shifted[j] = land.shifted(theta, j);
        photons[j] = e[j] * e[j] / (kappa * kappa / 4.0 + shifted[j] * shifted[j]);
        fields[j] = photons[j].sqrt();
        cos_sum += photons[j] * (2.0 * (theta - land.phase[j])).cos();
    }
    let omega_m_sq = 2.0 * HBAR * a * k * k / m * cos_sum;
    let omega_m = omega_m_sq.max(0.0).sqrt();
    let x_zpf = if omega_m > 0.0 {
        (HBAR / (2.0 * m * omega_m)).sqrt()
    } else {
        f64::INFINITY
    };
    let mut g = [0.0; 2];
    let mut g_tilde = [0.0; 2];
    for j in 0..2 {
        let s = (2.0 * (theta - land.phase[j])).sin();
        g[j] = if omega_m > 0.0 { SQRT_2 * k * a * x_zpf * s } else { 0.0 };
        g_tilde[j] = g[j] * fields[j];
    }
    let e1 = e[0];
    Equilibrium {
        x0: theta / k,
        kx0: theta,
        fields,
        photon_numbers: photons,
        shifted_detunings: shifted,
        omega_m_sq,
        omega_m,
        x_zpf,
        g,
        g_tilde,
        stability: if is_min {
            Stability::Stable
        } else {
            Stability::Unstable
        },
        potential: HBAR * e1 * e1 * land.potential_shape(theta),
        curvature: HBAR * k * k * a * e1 * e1 * land.force_shape_slope(theta),
    }
}

/// Result of a bistability query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bistability {
    pub bistable: bool,
    pub stable_count: usize,
}

pub fn is_bistable(config: &SystemConfig, op: &OperatingPoint) -> Result<Bistability> {
    let land = Landscape::new(config, op)?;
    let stable_count = land
        .stationary_points(SCAN_POINTS)
        .iter()
        .filter(|(_, m)| *m)
        .count();
    Ok(Bistability {
        bistable: stable_count >= 2,
        stable_count,
    })
}

/// How to pick one stable equilibrium out of several.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchChoice {
    /// Deepest minimum of `V`.
    Deepest,
    /// Index into the list of stable equilibria (ordered by position).
    Index(usize),
    /// Stable equilibrium closest to this `k x0` (mod pi).
    Nearest(f64),
}

/// Periodic distance between two phases modulo `pi`.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Pick a stable equilibrium according to `choice`; `None` if there is none.
pub fn select_branch(equilibria: &[Equilibrium], choice: BranchChoice) -> Option<&Equilibrium> {
    let mut stable = equilibria.iter().filter(|e| e.is_stable());
    match choice {
        BranchChoice::Deepest => stable.min_by(|a, b| a.potential.total_cmp(&b.potential)),
        BranchChoice::Index(i) => stable.nth(i),
        BranchChoice::Nearest(theta) => stable.min_by(|a, b| {
            phase_distance(a.kx0, theta).total_cmp(&phase_distance(b.kx0, theta))
        }),
    }
}

/// Solve and select in one go, the common case for downstream modules.
pub fn solve_branch(
    config: &SystemConfig,
    op: &OperatingPoint,
    choice: BranchChoice,
) -> Result<Option<Equilibrium>> {
    let eqs = find_equilibria(config, op)?;
    Ok(select_branch(&eqs, choice).cloned())
}
