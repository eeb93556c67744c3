//! Linearised dynamics of the three coupled modes.
//!
//! State ordering is `(x, p, X1, Y1, X2, Y2)` with quadratures
//! `X = (a + a^dag)/sqrt(2)`, `Y = (a - a^dag)/(i sqrt(2))`, and the same for
//! the mechanics in units of the zero-point length. With the linearised
//! Hamiltonian
//!
//! ```text
//! H/hbar = sum_j -Delta_j^x a_j^dag a_j + omega_M b^dag b + sum_j G_j (a_j + a_j^dag)(b + b^dag)
//! ```
//!
//! the drift equations are
//!
//! ```text
//! x'  =  omega_M p - (Gamma_M/2) x
//! p'  = -omega_M x - (Gamma_M/2) p - 2 sum_j G_j X_j
//! X_j' = -(kappa/2) X_j - Delta_j^x Y_j
//! Y_j' =  Delta_j^x X_j - (kappa/2) Y_j - 2 G_j x
//! ```
//!
//! Mechanical damping acts on the amplitude at `Gamma_M/2`, so `Gamma_M` is
//! the energy decay rate. The symmetrised noise has diffusion
//! `((n_B + 1/2) Gamma_M, (n_B + 1/2) Gamma_M, kappa/2, kappa/2, kappa/2, kappa/2)`.

use nalgebra::{DMatrix, DVector, Matrix6};
use rayon::prelude::*;
use serde::Serialize;

use crate::cooling;
use crate::eigen::{self, Complex64};
use crate::equilibrium::{self, BranchChoice, Equilibrium};
use crate::error::{Error, Result};
use crate::sphere::{self, GasParams};
use crate::system::{OperatingPoint, SystemConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct DriftModel {
    /// Drift matrix (rad/s).
    pub drift: Matrix6<f64>,
    /// Diagonal of `B B^T`.
    pub diffusion: [f64; 6],
    pub omega_m: f64,
    pub gamma_m: f64,
    /// Bath phonon number `k_B T / (hbar omega_M)`.
    pub n_bath: f64,
    pub kappa: f64,
    pub detunings: [f64; 2],
    /// Linearised couplings `G_j` (rad/s).
    pub couplings: [f64; 2],
}

impl DriftModel {
    pub fn new(
        omega_m: f64,
        gamma_m: f64,
        n_bath: f64,
        kappa: f64,
        detunings: [f64; 2],
        couplings: [f64; 2],
    ) -> Self {
        let mut a = Matrix6::<f64>::zeros();
        let hg = gamma_m / 2.0;
        let hk = kappa / 2.0;
        a[(0, 0)] = -hg;
        a[(0, 1)] = omega_m;
        a[(1, 0)] = -omega_m;
        a[(1, 1)] = -hg;
        for j in 0..2 {
            let (xi, yi) = (2 + 2 * j, 3 + 2 * j);
            a[(1, xi)] = -2.0 * couplings[j];
            a[(xi, xi)] = -hk;
            a[(xi, yi)] = -detunings[j];
            a[(yi, xi)] = detunings[j];
            a[(yi, yi)] = -hk;
            a[(yi, 0)] = -2.0 * couplings[j];
        }
        let dm = (n_bath + 0.5) * gamma_m;
        Self {
            drift: a,
            diffusion: [dm, dm, hk, hk, hk, hk],
            omega_m,
            gamma_m,
            n_bath,
            kappa,
            detunings,
            couplings,
        }
    }

    /// `B`, the square root of the diffusion.
    pub fn noise_matrix(&self) -> Matrix6<f64> {
        Matrix6::from_diagonal(&self.diffusion.map(f64::sqrt).into())
    }

    pub fn diffusion_matrix(&self) -> Matrix6<f64> {
        Matrix6::from_diagonal(&self.diffusion.into())
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        Ok(eigen::decompose(&self.dynamic())?.values)
    }

    /// Every eigenvalue has a negative real part.
    pub fn is_stable(&self) -> Result<bool> {
        Ok(self.unstable_eigenvalue()?.is_none())
    }

    /// First eigenvalue with a non-negative real part, if any.
    pub fn unstable_eigenvalue(&self) -> Result<Option<Complex64>> {
        Ok(self
            .eigenvalues()?
            .into_iter()
            .filter(|l| l.re >= 0.0)
            .max_by(|a, b| a.re.total_cmp(&b.re)))
    }

    pub fn ensure_stable(&self) -> Result<()> {
        match self.unstable_eigenvalue()? {
            Some(l) => Err(Error::Unstable { re: l.re, im: l.im }),
            None => Ok(()),
        }
    }

    /// Steady-state covariance from `A S + S A^T = -B B^T`.
    pub fn steady_state_covariance(&self) -> Result<Matrix6<f64>> {
        self.ensure_stable()?;
        let a = self.dynamic();
        let eye = DMatrix::<f64>::identity(6, 6);
        let op = eye.kronecker(&a) + a.kronecker(&eye);
        let q = self.diffusion_matrix();
        let rhs = DVector::from_iterator(36, q.iter().map(|v| -v));
        let sol = op
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular Lyapunov operator".into()))?;
        let s = Matrix6::from_iterator(sol.iter().copied());
        Ok((s + s.transpose()) * 0.5)
    }

    fn dynamic(&self) -> DMatrix<f64> {
        DMatrix::from_iterator(6, 6, self.drift.iter().copied())
    }
}

/// Linearise about a trapping equilibrium.
///
/// `gamma_m` is the gas damping and `temperature` the bath temperature.
pub fn build_drift(
    eq: &Equilibrium,
    kappa: f64,
    gamma_m: f64,
    temperature: f64,
) -> Result<DriftModel> {
    if !(eq.omega_m_sq > 0.0) {
        return Err(Error::NoMechanicalFrequency(eq.omega_m_sq));
    }
    let n_bath = sphere::bath_occupancy(temperature, eq.omega_m);
    Ok(DriftModel::new(
        eq.omega_m,
        gamma_m,
        n_bath,
        kappa,
        eq.shifted_detunings,
        eq.linear_couplings(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeCharacter {
    Mechanical,
    Optical1,
    Optical2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenmode {
    #[serde(serialize_with = "ser_complex")]
    pub eigenvalue: Complex64,
    /// Squared eigenvector weight on (mechanics, mode 1, mode 2).
    pub weights: [f64; 3],
    pub degenerate: bool,
}

fn ser_complex<S: serde::Serializer>(c: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&c.re)?;
    t.serialize_element(&c.im)?;
    t.end()
}

impl Eigenmode {
    pub fn decay(&self) -> f64 {
        -self.eigenvalue.re
    }

    pub fn frequency(&self) -> f64 {
        self.eigenvalue.im
    }

    pub fn dominant(&self) -> ModeCharacter {
        let w = self.weights;
        if w[0] >= w[1] && w[0] >= w[2] {
            ModeCharacter::Mechanical
        } else if w[1] >= w[2] {
            ModeCharacter::Optical1
        } else {
            ModeCharacter::Optical2
        }
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }
}

/// All six normal modes, sorted by `|Im|`, then `Im`, then `Re`.
pub fn eigenmodes(model: &DriftModel) -> Result<Vec<Eigenmode>> {
    let d = eigen::decompose(&model.dynamic())?;
    let mut modes: Vec<Eigenmode> = (0..6)
        .map(|k| {
            let v = d.vectors.column(k);
            let mut w = [0.0; 3];
            for (i, c) in v.iter().enumerate() {
                w[i / 2] += c.norm_sqr();
            }
            let total: f64 = w.iter().sum();
            Eigenmode {
                eigenvalue: d.values[k],
                weights: w.map(|x| x / total),
                degenerate: d.degenerate,
            }
        })
        .collect();
    modes.sort_by(|a, b| {
        (a.eigenvalue.im.abs(), a.eigenvalue.im, a.eigenvalue.re)
            .partial_cmp(&(b.eigenvalue.im.abs(), b.eigenvalue.im, b.eigenvalue.re))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(modes)
}

/// The three modes with the largest imaginary parts, sorted by frequency.
///
/// Conjugate symmetry makes these one representative from each pair.
pub fn positive_branch(modes: &[Eigenmode]) -> Vec<Eigenmode> {
    let mut m = modes.to_vec();
    m.sort_by(|a, b| b.eigenvalue.im.total_cmp(&a.eigenvalue.im));
    m.truncate(3);
    m.reverse();
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    NoEquilibrium,
    /// Stable position but `omega_M^2 <= 0`.
    NoFrequency,
    /// Drift matrix has an eigenvalue with non-negative real part.
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub delta2: f64,
    pub status: PointStatus,
    pub kx0: Option<f64>,
    pub omega_m: f64,
    pub g_tilde: [f64; 2],
    pub gamma_opt: f64,
    /// Optical damping of the most mechanical normal mode,
    /// `-(2 |Re λ| - Γ_M)`; negative for cooling like `gamma_opt`.
    pub normal_mode_damping: f64,
    /// Positive-frequency representatives, ascending in frequency.
    pub modes: Vec<Eigenmode>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AvoidedCrossing {
    /// Scan index of the gap minimum.
    pub index: usize,
    pub delta2: f64,
    /// The gap is between branch `lower` and `lower + 1` of `ScanPoint::modes`.
    pub lower: usize,
    /// Frequency separation at the minimum (rad/s).
    pub gap: f64,
    /// Dominant characters of the two branches at the nearest unmixed point
    /// below the minimum (or the scan start).
    pub before: (ModeCharacter, ModeCharacter),
    /// Same, above the minimum (or the scan end).
    pub after: (ModeCharacter, ModeCharacter),
    /// Largest single-mode weight of the two branches at the minimum.
    pub max_weight: f64,
}

impl AvoidedCrossing {
    pub fn is_hybridised(&self) -> bool {
        self.max_weight <= HYBRIDISATION_THRESHOLD
    }

    /// A character carried by one branch before the minimum is carried by the
    /// other branch after it.
    pub fn swaps_character(&self) -> bool {
        self.before != self.after && (self.before.0 == self.after.1 || self.before.1 == self.after.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingScan {
    pub delta1: f64,
    pub points: Vec<ScanPoint>,
    /// Gap minima where both branches are hybridised and swap character.
    pub crossings: Vec<AvoidedCrossing>,
    /// Every local minimum of an adjacent-branch gap, hybridised or not.
    pub gap_minima: Vec<AvoidedCrossing>,
}

/// Branches whose largest weight exceeds this are considered unmixed.
pub const HYBRIDISATION_THRESHOLD: f64 = 0.8;

/// Normal modes along `delta2_grid` at fixed `delta1`, following one
/// equilibrium branch continuously from the deepest minimum at the start.
pub fn crossing_scan(
    config: &SystemConfig,
    delta1: f64,
    delta2_grid: &[f64],
    gas: GasParams,
) -> Result<CrossingScan> {
    if delta2_grid.windows(2).any(|w| !(w[1] > w[0]) && !(w[1] < w[0])) {
        return Err(Error::param("delta2_grid", "must be strictly monotonic"));
    }
    config.validate()?;
    gas.validate()?;
    let kappa = config.kappa();
    let gamma_m = sphere::gas_damping(&config.sphere, &gas);
    let branches = track_branch(config, delta1, delta2_grid, gas)?;
    let points: Vec<ScanPoint> = delta2_grid
        .par_iter()
        .zip(branches.par_iter())
        .map(|(&d2, eq)| scan_point(eq.as_ref(), d2, kappa, gamma_m, gas.temperature))
        .collect::<Result<_>>()?;
    let gap_minima = find_gap_minima(&points);
    let crossings = gap_minima
        .iter()
        .filter(|c| c.is_hybridised() && c.swaps_character())
        .cloned()
        .collect();
    Ok(CrossingScan {
        delta1,
        points,
        crossings,
        gap_minima,
    })
}

/// Serial branch following along a 1-D detuning sweep.
pub(crate) fn track_branch(
    config: &SystemConfig,
    delta1: f64,
    delta2_grid: &[f64],
    gas: GasParams,
) -> Result<Vec<Option<Equilibrium>>> {
    let mut prev: Option<f64> = None;
    let mut out = Vec::with_capacity(delta2_grid.len());
    for &d2 in delta2_grid {
        let op = OperatingPoint::new(delta1, d2, gas);
        let eqs = equilibrium::find_equilibria(config, &op)?;
        let choice = prev.map_or(BranchChoice::Deepest, BranchChoice::Nearest);
        let eq = equilibrium::select_branch(&eqs, choice).cloned();
        if let Some(e) = &eq {
            prev = Some(e.kx0);
        }
        out.push(eq);
    }
    Ok(out)
}

fn scan_point(
    eq: Option<&Equilibrium>,
    delta2: f64,
    kappa: f64,
    gamma_m: f64,
    temperature: f64,
) -> Result<ScanPoint> {
    let mut point = ScanPoint {
        delta2,
        status: PointStatus::NoEquilibrium,
        kx0: None,
        omega_m: 0.0,
        g_tilde: [0.0; 2],
        gamma_opt: f64::NAN,
        normal_mode_damping: f64::NAN,
        modes: Vec::new(),
    };
    let Some(eq) = eq else {
        return Ok(point);
    };
    point.kx0 = Some(eq.kx0);
    point.omega_m = eq.omega_m;
    point.g_tilde = eq.g_tilde;
    if !eq.is_trapping() {
        point.status = PointStatus::NoFrequency;
        return Ok(point);
    }
    point.gamma_opt = cooling::cooling_rate(eq, kappa);
    let model = build_drift(eq, kappa, gamma_m, temperature)?;
    let modes = eigenmodes(&model)?;
    point.status = if modes.iter().any(|m| m.eigenvalue.re >= 0.0) {
        PointStatus::Unstable
    } else {
        PointStatus::Ok
    };
    point.modes = positive_branch(&modes);
    if let Some(mech) = point.modes.iter().max_by(|a, b| a.weights[0].total_cmp(&b.weights[0])) {
        point.normal_mode_damping = -(2.0 * mech.decay() - gamma_m);
    }
    Ok(point)
}

fn find_gap_minima(points: &[ScanPoint]) -> Vec<AvoidedCrossing> {
    let mut out = Vec::new();
    for lower in 0..2 {
        let gaps: Vec<Option<f64>> = points
            .iter()
            .map(|p| {
                (p.modes.len() == 3 && p.status != PointStatus::NoEquilibrium)
                    .then(|| p.modes[lower + 1].frequency() - p.modes[lower].frequency())
            })
            .collect();
        for i in 1..points.len().saturating_sub(1) {
            let (Some(l), Some(c), Some(r)) = (gaps[i - 1], gaps[i], gaps[i + 1]) else {
                continue;
            };
            if !(c < l && c <= r) {
                continue;
            }
            let left = walk_to_unmixed(points, lower, i, -1);
            let right = walk_to_unmixed(points, lower, i, 1);
            let chars = |k: usize| (points[k].modes[lower].dominant(), points[k].modes[lower + 1].dominant());
            let at = &points[i].modes;
            out.push(AvoidedCrossing {
                index: i,
                delta2: points[i].delta2,
                lower,
                gap: c,
                before: chars(left),
                after: chars(right),
                max_weight: at[lower].max_weight().max(at[lower + 1].max_weight()),
            });
        }
    }
    out.sort_by_key(|c| c.index);
    out
}

/// Nearest point in direction `dir` where both branches are unmixed, or the
/// last point with a full set of modes.
fn walk_to_unmixed(points: &[ScanPoint], lower: usize, start: usize, dir: isize) -> usize {
    let mut i = start;
    loop {
        let next = i as isize + dir;
        if next < 0 || next as usize >= points.len() || points[next as usize].modes.len() != 3 {
            return i;
        }
        i = next as usize;
        let m = &points[i].modes;
        if m[lower].max_weight() > HYBRIDISATION_THRESHOLD
            && m[lower + 1].max_weight() > HYBRIDISATION_THRESHOLD
        {
            return i;
        }
    }
}
