//! Detuning maps, spectral stacks and one-dimensional parameter sweeps.
//!
//! Maps are stored row-major with rows indexed by `Δ1` and columns by `Δ2`.
//! Each row is computed on its own thread; inside a row the equilibrium
//! branch is followed from the deepest minimum at the first column.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::cooling;
use crate::dynamics::{self, DriftModel};
use crate::equilibrium::{self, phase_distance, Equilibrium};
use crate::error::{Error, Result};
use crate::spectra::{self, Provenance};
use crate::sphere::{self, CavityParams, FiniteSizeModel, GasParams, SizeCoupling, SphereParams};
use crate::system::{OperatingPoint, SystemConfig};

/// Smallest accepted map resolution along each axis.
pub const MIN_RESOLUTION: usize = 16;

/// A branch jump must exceed the neighbouring steps by this factor.
pub const JUMP_FACTOR: f64 = 4.0;

/// Jumps below this (rad of `k x0`) are never flagged.
pub const JUMP_FLOOR: f64 = 1e-3;

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

fn check_axis(name: &'static str, axis: &[f64], min_len: usize) -> Result<()> {
    if axis.len() < min_len {
        return Err(Error::param(name, format!("needs at least {min_len} points")));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::param(name, "must be finite"));
    }
    if axis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param(name, "must be strictly increasing"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    NoEquilibrium,
    /// Stable position without a restoring force (`ω_M² ≤ 0`).
    NoFrequency,
    /// The linearised dynamics have a growing mode.
    Unstable,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::NoEquilibrium => "no_equilibrium",
            CellStatus::NoFrequency => "no_frequency",
            CellStatus::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapCell {
    pub status: CellStatus,
    /// Number of stable equilibria in one period.
    pub stable_count: usize,
    /// Index of the followed branch among the stable equilibria.
    pub branch: Option<usize>,
    pub kx0: f64,
    /// `Δ_j^x` (rad/s).
    pub shifted_detunings: [f64; 2],
    pub omega_m: f64,
    pub g_tilde: [f64; 2],
    /// Zero wherever there is no mechanical frequency.
    pub gamma_opt: f64,
    /// Perturbative phonon number with gas damping; infinite when heating.
    pub n_pt: f64,
    /// Semiclassical phonon number from the steady-state covariance.
    pub n_sc: Option<f64>,
    pub drift_stable: bool,
}

impl MapCell {
    fn empty(stable_count: usize) -> Self {
        Self {
            status: CellStatus::NoEquilibrium,
            stable_count,
            branch: None,
            kx0: f64::NAN,
            shifted_detunings: [f64::NAN; 2],
            omega_m: f64::NAN,
            g_tilde: [f64::NAN; 2],
            gamma_opt: f64::NAN,
            n_pt: f64::NAN,
            n_sc: None,
            drift_stable: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapOptions {
    pub gas: GasParams,
    /// Also solve the Lyapunov equation in every trapping cell.
    pub semiclassical: bool,
}

impl Default for MapOptions {
    fn default() -> Self {
        Self {
            gas: GasParams::air(1e-4),
            semiclassical: false,
        }
    }
}

/// A contour line as a list of `(Δ1, Δ2)` vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

/// Where `Δ_j^x + ω_M` changes sign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceLocus {
    /// Optical mode, 1 or 2.
    pub mode: usize,
    pub lines: Vec<Polyline>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapResult {
    pub delta1: Vec<f64>,
    pub delta2: Vec<f64>,
    /// Row-major, `cells[i * delta2.len() + j]` at `(delta1[i], delta2[j])`.
    pub cells: Vec<MapCell>,
    pub resonance_loci: Vec<ResonanceLocus>,
    /// `(row, column)` of cells whose branch jumped from the previous column.
    pub branch_jumps: Vec<(usize, usize)>,
}

/// Numeric fields that can be pulled out of a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapField {
    GammaOpt,
    NPt,
    NSc,
    StableCount,
    OmegaM,
    GTilde1,
    GTilde2,
    DriftStable,
    Branch,
    Kx0,
}

impl MapField {
    pub const ALL: [MapField; 10] = [
        MapField::GammaOpt,
        MapField::NPt,
        MapField::NSc,
        MapField::StableCount,
        MapField::OmegaM,
        MapField::GTilde1,
        MapField::GTilde2,
        MapField::DriftStable,
        MapField::Branch,
        MapField::Kx0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapField::GammaOpt => "gamma_opt_rad_s",
            MapField::NPt => "n_pt",
            MapField::NSc => "n_sc",
            MapField::StableCount => "stable_count",
            MapField::OmegaM => "omega_m_rad_s",
            MapField::GTilde1 => "g_tilde1_rad_s",
            MapField::GTilde2 => "g_tilde2_rad_s",
            MapField::DriftStable => "drift_stable",
            MapField::Branch => "branch",
            MapField::Kx0 => "kx0_rad",
        }
    }

    fn get(self, c: &MapCell) -> f64 {
        match self {
            MapField::GammaOpt => c.gamma_opt,
            MapField::NPt => c.n_pt,
            MapField::NSc => c.n_sc.unwrap_or(f64::NAN),
            MapField::StableCount => c.stable_count as f64,
            MapField::OmegaM => c.omega_m,
            MapField::GTilde1 => c.g_tilde[0],
            MapField::GTilde2 => c.g_tilde[1],
            MapField::DriftStable => f64::from(u8::from(c.drift_stable)),
            MapField::Branch => c.branch.map_or(f64::NAN, |b| b as f64),
            MapField::Kx0 => c.kx0,
        }
    }
}

impl MapResult {
    pub fn cell(&self, i: usize, j: usize) -> &MapCell {
        &self.cells[i * self.delta2.len() + j]
    }

    pub fn field(&self, f: MapField) -> Vec<f64> {
        self.cells.iter().map(|c| f.get(c)).collect()
    }

    /// Long-format CSV: `delta1_rad_s,delta2_rad_s,field,value`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["delta1_rad_s", "delta2_rad_s", "field", "value"])?;
        for (i, d1) in self.delta1.iter().enumerate() {
            for (j, d2) in self.delta2.iter().enumerate() {
                let c = self.cell(i, j);
                let (a, b) = (d1.to_string(), d2.to_string());
                w.write_record([a.as_str(), b.as_str(), "status", c.status.as_str()])?;
                for f in MapField::ALL {
                    w.write_record([a.clone(), b.clone(), f.name().to_string(), f.get(c).to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn map_cell(
    config: &SystemConfig,
    eqs: &[Equilibrium],
    eq: Option<&Equilibrium>,
    gamma_m: f64,
    opts: &MapOptions,
) -> Result<MapCell> {
    let stable: Vec<&Equilibrium> = eqs.iter().filter(|e| e.is_stable()).collect();
    let mut cell = MapCell::empty(stable.len());
    let Some(eq) = eq else {
        return Ok(cell);
    };
    let kappa = config.kappa();
    cell.branch = stable.iter().position(|e| e.kx0 == eq.kx0);
    cell.kx0 = eq.kx0;
    cell.shifted_detunings = eq.shifted_detunings;
    cell.omega_m = eq.omega_m;
    cell.g_tilde = eq.g_tilde;
    cell.gamma_opt = cooling::cooling_rate(eq, kappa);
    if !eq.is_trapping() {
        cell.status = CellStatus::NoFrequency;
        return Ok(cell);
    }
    let pt = cooling::phonon_pt(eq, kappa, gamma_m, opts.gas.temperature);
    cell.n_pt = if pt.heating { f64::INFINITY } else { pt.n_gas };
    let model = dynamics::build_drift(eq, kappa, gamma_m, opts.gas.temperature)?;
    cell.drift_stable = model.is_stable()?;
    cell.status = if cell.drift_stable {
        CellStatus::Ok
    } else {
        CellStatus::Unstable
    };
    if opts.semiclassical && cell.drift_stable {
        cell.n_sc = Some(spectra::lyapunov_variance(&model)? - 0.5);
    }
    Ok(cell)
}

/// Per-cell equilibrium, cooling rate and phonon numbers over a detuning grid.
pub fn cooling_map(
    config: &SystemConfig,
    delta1: &[f64],
    delta2: &[f64],
    opts: &MapOptions,
) -> Result<MapResult> {
    config.validate()?;
    opts.gas.validate()?;
    check_axis("delta1", delta1, MIN_RESOLUTION)?;
    check_axis("delta2", delta2, MIN_RESOLUTION)?;
    let gamma_m = sphere::gas_damping(&config.sphere, &opts.gas);
    let rows: Vec<Vec<MapCell>> = delta1
        .par_iter()
        .map(|&d1| {
            let mut prev: Option<f64> = None;
            let mut row = Vec::with_capacity(delta2.len());
            for &d2 in delta2 {
                let op = OperatingPoint::new(d1, d2, opts.gas);
                let eqs = equilibrium::find_equilibria(config, &op)?;
                let choice = prev.map_or(equilibrium::BranchChoice::Deepest, |t| {
                    equilibrium::BranchChoice::Nearest(t)
                });
                let eq = equilibrium::select_branch(&eqs, choice);
                if let Some(e) = eq {
                    prev = Some(e.kx0);
                }
                row.push(map_cell(config, &eqs, eq, gamma_m, opts)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let cells: Vec<MapCell> = rows.into_iter().flatten().collect();
    let n2 = delta2.len();
    let mut branch_jumps = Vec::new();
    for i in 0..delta1.len() {
        let kx: Vec<Option<f64>> = (0..n2)
            .map(|j| {
                let c = &cells[i * n2 + j];
                c.branch.map(|_| c.kx0)
            })
            .collect();
        branch_jumps.extend(branch_jumps_along(&kx).into_iter().map(|j| (i, j)));
    }
    let resonance_loci = (0..2)
        .map(|m| {
            let v: Vec<f64> = cells
                .iter()
                .map(|c| match c.status {
                    CellStatus::NoEquilibrium | CellStatus::NoFrequency => f64::NAN,
                    _ => c.shifted_detunings[m] + c.omega_m,
                })
                .collect();
            ResonanceLocus {
                mode: m + 1,
                lines: contour(delta1, delta2, &v, 0.0),
            }
        })
        .collect();
    Ok(MapResult {
        delta1: delta1.to_vec(),
        delta2: delta2.to_vec(),
        cells,
        resonance_loci,
        branch_jumps,
    })
}

/// Indices `j` where `k x0` jumped between `j - 1` and `j`.
///
/// A step counts as a jump when it exceeds `JUMP_FLOOR` and is `JUMP_FACTOR`
/// times larger than both neighbouring steps, so steep but smooth stretches
/// are not flagged.
pub fn branch_jumps_along(kx: &[Option<f64>]) -> Vec<usize> {
    let steps: Vec<Option<f64>> = kx
        .windows(2)
        .map(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => Some(phase_distance(a, b)),
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    for (i, d) in steps.iter().enumerate() {
        let Some(d) = *d else { continue };
        let left = i.checked_sub(1).and_then(|k| steps[k]).unwrap_or(0.0);
        let right = steps.get(i + 1).copied().flatten().unwrap_or(0.0);
        if d > JUMP_FLOOR && d > JUMP_FACTOR * left.max(right) {
            out.push(i + 1);
        }
    }
    out
}

/// Marching-squares contour of `values` (row-major over `xs` × `ys`) at `level`.
///
/// Cells touching a NaN are skipped. Saddle cells are resolved by the mean of
/// their corners.
pub fn contour(xs: &[f64], ys: &[f64], values: &[f64], level: f64) -> Vec<Polyline> {
    let (nx, ny) = (xs.len(), ys.len());
    if nx < 2 || ny < 2 || values.len() != nx * ny {
        return Vec::new();
    }
    let v = |i: usize, j: usize| values[i * ny + j];
    // Edge ids: 2 * (i * ny + j) for the edge (i,j)-(i+1,j), +1 for (i,j)-(i,j+1).
    let along_x = |i: usize, j: usize| 2 * (i * ny + j);
    let along_y = |i: usize, j: usize| 2 * (i * ny + j) + 1;
    let point = |edge: usize| -> [f64; 2] {
        let node = edge / 2;
        let (i, j) = (node / ny, node % ny);
        let (i2, j2) = if edge.is_multiple_of(2) { (i + 1, j) } else { (i, j + 1) };
        let (a, b) = (v(i, j), v(i2, j2));
        let t = if b != a { (level - a) / (b - a) } else { 0.5 };
        [
            xs[i] + t * (xs[i2] - xs[i]),
            ys[j] + t * (ys[j2] - ys[j]),
        ]
    };
    let mut segments: Vec<(usize, usize)> = Vec::new();
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            let c = [v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)];
            if c.iter().any(|x| x.is_nan()) {
                continue;
            }
            let above: Vec<bool> = c.iter().map(|&x| x > level).collect();
            let case = above
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &b)| acc | (u8::from(b) << k));
            // Cell edges in corner order: bottom (0-1), right (1-2), top (3-2), left (0-3).
            let e = [along_x(i, j), along_y(i + 1, j), along_x(i, j + 1), along_y(i, j)];
            let centre_above = c.iter().sum::<f64>() / 4.0 > level;
            let mut push = |a: usize, b: usize| segments.push((e[a], e[b]));
            match case {
                0 | 15 => {}
                1 | 14 => push(3, 0),
                2 | 13 => push(0, 1),
                3 | 12 => push(3, 1),
                4 | 11 => push(1, 2),
                6 | 9 => push(0, 2),
                7 | 8 => push(3, 2),
                5 => {
                    if centre_above {
                        push(3, 2);
                        push(0, 1);
                    } else {
                        push(3, 0);
                        push(1, 2);
                    }
                }
                10 => {
                    if centre_above {
                        push(3, 0);
                        push(1, 2);
                    } else {
                        push(0, 1);
                        push(3, 2);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    chain(&segments)
        .into_iter()
        .map(|(edges, closed)| Polyline {
            points: edges.into_iter().map(point).collect(),
            closed,
        })
        .collect()
}

/// Join segments that share an edge into maximal chains.
fn chain(segments: &[(usize, usize)]) -> Vec<(Vec<usize>, bool)> {
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        incident.entry(a).or_default().push(s);
        incident.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let other = |s: usize, e: usize| if segments[s].0 == e { segments[s].1 } else { segments[s].0 };
    let next_from = |e: usize, used: &[bool]| -> Option<usize> {
        incident[&e].iter().copied().find(|&s| !used[s])
    };
    // Open chains start at edges touched by a single segment; sort for determinism.
    let mut starts: Vec<usize> = incident
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(&e, _)| e)
        .collect();
    starts.sort_unstable();
    let walk = |start: usize, used: &mut Vec<bool>| -> Option<(Vec<usize>, bool)> {
        let mut edge = start;
        let mut line = vec![start];
        while let Some(s) = next_from(edge, used) {
            used[s] = true;
            edge = other(s, edge);
            line.push(edge);
            if edge == start {
                return Some((line, true));
            }
        }
        (line.len() > 1).then_some((line, false))
    };
    for e in starts {
        if let Some(l) = walk(e, &mut used) {
            out.push(l);
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            if let Some(l) = walk(segments[s].0, &mut used) {
                out.push(l);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BistabilityMap {
    pub delta1: Vec<f64>,
    pub delta2: Vec<f64>,
    /// Stable equilibria per cell, row-major like [`MapResult::cells`].
    pub stable_counts: Vec<usize>,
    /// Boundary between one and two stable equilibria.
    pub locus: Vec<Polyline>,
}

impl BistabilityMap {
    pub fn bistable_cells(&self) -> usize {
        self.stable_counts.iter().filter(|&&c| c >= 2).count()
    }
}

/// Stable-equilibrium count over the grid and its 1↔2 contour.
pub fn bistability_locus(
    config: &SystemConfig,
    delta1: &[f64],
    delta2: &[f64],
    gas: GasParams,
) -> Result<BistabilityMap> {
    config.validate()?;
    gas.validate()?;
    check_axis("delta1", delta1, MIN_RESOLUTION)?;
    check_axis("delta2", delta2, MIN_RESOLUTION)?;
    let rows: Vec<Vec<usize>> = delta1
        .par_iter()
        .map(|&d1| {
            delta2
                .iter()
                .map(|&d2| {
                    let op = OperatingPoint::new(d1, d2, gas);
                    Ok(equilibrium::is_bistable(config, &op)?.stable_count)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let stable_counts: Vec<usize> = rows.into_iter().flatten().collect();
    let field: Vec<f64> = stable_counts.iter().map(|&c| c.min(2) as f64).collect();
    let locus = contour(delta1, delta2, &field, 1.5);
    Ok(BistabilityMap {
        delta1: delta1.to_vec(),
        delta2: delta2.to_vec(),
        stable_counts,
        locus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchSwitch {
    /// The branch changed between rows `row - 1` and `row`.
    pub row: usize,
    pub delta2: f64,
    pub kx0_before: f64,
    pub kx0_after: f64,
}

/// `S_xx(Δ2, ω)` at fixed `Δ1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumStack {
    pub delta1: f64,
    pub delta2: Vec<f64>,
    pub omega: Vec<f64>,
    /// Row-major over `delta2`; NaN in masked rows.
    pub s_xx: Vec<f64>,
    /// False where the row has no stable linearisation.
    pub valid: Vec<bool>,
    pub status: Vec<CellStatus>,
    pub kx0: Vec<f64>,
    /// `S_xx(0)`; NaN in masked rows.
    pub zero_frequency: Vec<f64>,
    pub switches: Vec<BranchSwitch>,
    pub method: Provenance,
}

/// Magic bytes at the start of the binary stack format.
pub const STACK_MAGIC: &[u8; 8] = b"LEVSTK1\n";

impl SpectrumStack {
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.omega.len();
        &self.s_xx[i * n..(i + 1) * n]
    }

    /// Long-format CSV: `delta1_rad_s,delta2_rad_s,omega_rad_s,s_xx`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["delta1_rad_s", "delta2_rad_s", "omega_rad_s", "s_xx"])?;
        let d1 = self.delta1.to_string();
        for (i, d2) in self.delta2.iter().enumerate() {
            let d2 = d2.to_string();
            for (o, s) in self.omega.iter().zip(self.row(i)) {
                w.write_record([d1.clone(), d2.clone(), o.to_string(), s.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Binary layout, all little-endian: the 8 magic bytes, `u64` rows,
    /// `u64` columns, `f64` `Δ1`, the `Δ2` axis, the `ω` axis, then
    /// `S_xx` row by row.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(STACK_MAGIC)?;
        w.write_all(&(self.delta2.len() as u64).to_le_bytes())?;
        w.write_all(&(self.omega.len() as u64).to_le_bytes())?;
        w.write_all(&self.delta1.to_le_bytes())?;
        for x in self.delta2.iter().chain(&self.omega).chain(&self.s_xx) {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    /// Inverse of [`write_binary`](Self::write_binary).
    pub fn read_binary(bytes: &[u8]) -> Result<RawStack> {
        let bad = || Error::Numerical("malformed spectrum stack".into());
        if bytes.len() < 32 || &bytes[..8] != STACK_MAGIC {
            return Err(bad());
        }
        let word = |k: usize| -> [u8; 8] { bytes[8 * k..8 * k + 8].try_into().unwrap() };
        let rows = u64::from_le_bytes(word(1)) as usize;
        let cols = u64::from_le_bytes(word(2)) as usize;
        let delta1 = f64::from_le_bytes(word(3));
        let total = rows + cols + rows * cols;
        if bytes.len() != 32 + 8 * total {
            return Err(bad());
        }
        let vals: Vec<f64> = (0..total).map(|k| f64::from_le_bytes(word(4 + k))).collect();
        Ok(RawStack {
            delta1,
            delta2: vals[..rows].to_vec(),
            omega: vals[rows..rows + cols].to_vec(),
            s_xx: vals[rows + cols..].to_vec(),
        })
    }
}

/// Contents of a binary stack file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawStack {
    pub delta1: f64,
    pub delta2: Vec<f64>,
    pub omega: Vec<f64>,
    /// Row-major, one row per `delta2` value.
    pub s_xx: Vec<f64>,
}

fn point_fn(method: Provenance) -> fn(&DriftModel, f64) -> f64 {
    match method {
        Provenance::Quantum => spectra::quantum_point,
        Provenance::Semiclassical => spectra::semiclassical_point,
    }
}

/// Stack of displacement spectra along `delta2` on a shared `omega` grid.
pub fn spectrum_sweep(
    config: &SystemConfig,
    delta1: f64,
    delta2: &[f64],
    omega: &[f64],
    gas: GasParams,
    method: Provenance,
) -> Result<SpectrumStack> {
    config.validate()?;
    gas.validate()?;
    check_axis("delta2", delta2, 2)?;
    check_axis("omega", omega, 2)?;
    let kappa = config.kappa();
    let gamma_m = sphere::gas_damping(&config.sphere, &gas);
    let branches = dynamics::track_branch(config, delta1, delta2, gas)?;
    let eval = point_fn(method);
    let rows: Vec<(CellStatus, Vec<f64>, f64)> = branches
        .par_iter()
        .map(|eq| {
            let masked = |s| (s, vec![f64::NAN; omega.len()], f64::NAN);
            let Some(eq) = eq else {
                return Ok(masked(CellStatus::NoEquilibrium));
            };
            if !eq.is_trapping() {
                return Ok(masked(CellStatus::NoFrequency));
            }
            let model = dynamics::build_drift(eq, kappa, gamma_m, gas.temperature)?;
            if !model.is_stable()? {
                return Ok(masked(CellStatus::Unstable));
            }
            let row = omega.iter().map(|&w| eval(&model, w)).collect();
            Ok((CellStatus::Ok, row, eval(&model, 0.0)))
        })
        .collect::<Result<_>>()?;
    let kx0: Vec<f64> = branches
        .iter()
        .map(|e| e.as_ref().map_or(f64::NAN, |e| e.kx0))
        .collect();
    let kx_opt: Vec<Option<f64>> = branches.iter().map(|e| e.as_ref().map(|e| e.kx0)).collect();
    let switches = branch_jumps_along(&kx_opt)
        .into_iter()
        .map(|i| BranchSwitch {
            row: i,
            delta2: delta2[i],
            kx0_before: kx0[i - 1],
            kx0_after: kx0[i],
        })
        .collect();
    let mut s_xx = Vec::with_capacity(delta2.len() * omega.len());
    let mut status = Vec::with_capacity(delta2.len());
    let mut zero_frequency = Vec::with_capacity(delta2.len());
    for (st, row, z) in rows {
        status.push(st);
        s_xx.extend(row);
        zero_frequency.push(z);
    }
    Ok(SpectrumStack {
        delta1,
        delta2: delta2.to_vec(),
        omega: omega.to_vec(),
        s_xx,
        valid: status.iter().map(|&s| s == CellStatus::Ok).collect(),
        status,
        kx0,
        zero_frequency,
        switches,
        method,
    })
}

/// Phonon numbers by three routes at one pressure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PressurePoint {
    pub pressure_pa: f64,
    pub gamma_m: f64,
    pub n_bath: f64,
    pub gamma_opt: f64,
    /// Perturbative, with gas damping.
    pub n_pt: f64,
    /// Integral of the semiclassical spectrum minus one half.
    pub n_sc: f64,
    /// Integral of the quantum spectrum minus one half.
    pub n_qm: f64,
    /// Steady-state covariance minus one half.
    pub n_lyapunov: f64,
    /// Largest tail fraction of the two spectral integrals.
    pub tail_fraction: f64,
}

/// Phonon occupancy against gas pressure at fixed detunings.
pub fn pressure_sweep(
    config: &SystemConfig,
    delta1: f64,
    delta2: f64,
    pressures_pa: &[f64],
    temperature: f64,
) -> Result<Vec<PressurePoint>> {
    config.validate()?;
    if pressures_pa.is_empty() {
        return Err(Error::param("pressures", "must not be empty"));
    }
    let base = GasParams {
        temperature,
        ..GasParams::air(pressures_pa[0])
    };
    base.validate()?;
    let op = OperatingPoint::new(delta1, delta2, base);
    let eq = equilibrium::solve_branch(config, &op, equilibrium::BranchChoice::Deepest)?
        .ok_or(Error::NoEquilibrium)?;
    if !eq.is_trapping() {
        return Err(Error::NoMechanicalFrequency(eq.omega_m_sq));
    }
    let kappa = config.kappa();
    pressures_pa
        .par_iter()
        .map(|&p| {
            let gas = GasParams { pressure: p, ..base };
            gas.validate()?;
            let gamma_m = sphere::gas_damping(&config.sphere, &gas);
            let model = dynamics::build_drift(&eq, kappa, gamma_m, temperature)?;
            model.ensure_stable()?;
            let pt = cooling::phonon_pt(&eq, kappa, gamma_m, temperature);
            let sc = spectra::phonon_from_spectrum(&spectra::semiclassical_spectrum(&model, None)?)?;
            let qm = spectra::phonon_from_spectrum(&spectra::quantum_spectrum(&model, None)?)?;
            Ok(PressurePoint {
                pressure_pa: p,
                gamma_m,
                n_bath: model.n_bath,
                gamma_opt: pt.gamma_opt,
                n_pt: if pt.heating { f64::INFINITY } else { pt.n_gas },
                n_sc: sc.n,
                n_qm: qm.n,
                n_lyapunov: spectra::lyapunov_variance(&model)? - 0.5,
                tail_fraction: sc.tail_fraction.max(qm.tail_fraction),
            })
        })
        .collect()
}

/// Coupling estimates across sphere radii at a fixed photon number.
///
/// `template` supplies density and refractive index; its radius is ignored.
pub fn radius_sweep(
    template: &SphereParams,
    cavity: &CavityParams,
    model: &FiniteSizeModel,
    photons: f64,
    radii: &[f64],
) -> Result<Vec<SizeCoupling>> {
    if radii.is_empty() {
        return Err(Error::param("radius range", "must not be empty"));
    }
    cavity.validate()?;
    radii
        .iter()
        .map(|&r| {
            let s = SphereParams {
                radius: r,
                ..*template
            };
            sphere::size_coupling(&s, cavity, model, photons)
        })
        .collect()
}

/// `g~_1` of the followed equilibrium at fixed detunings for each drive power.
pub fn power_sweep(
    config: &SystemConfig,
    op: &OperatingPoint,
    powers: &[f64],
) -> Result<Vec<(f64, Equilibrium)>> {
    if powers.is_empty() {
        return Err(Error::param("powers", "must not be empty"));
    }
    powers
        .par_iter()
        .map(|&p| {
            let mut c = config.clone();
            c.drive.power = p;
            let eq = equilibrium::solve_branch(&c, op, equilibrium::BranchChoice::Deepest)?
                .ok_or(Error::NoEquilibrium)?;
            Ok((p, eq))
        })
        .collect()
}
