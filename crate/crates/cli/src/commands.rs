use std::f64::consts::PI;
use std::io::Write;

use levsim::cooling;
use levsim::dynamics::{self, Eigenmode};
use levsim::equilibrium::{self, BranchChoice, Equilibrium};
use levsim::psd::{self, FitOptions, TimeSeries};
use levsim::spectra::{self, Provenance};
use levsim::sphere;
use levsim::sweep::{self, MapField, MapOptions};
use serde::Serialize;
use serde_json::json;

use crate::config::{RunConfig, SweepSection};
use crate::error::CliError;
use crate::output::Outputs;

fn hz(w: f64) -> f64 {
    w / (2.0 * PI)
}

fn missing(section: &str) -> CliError {
    CliError::Config(format!("`{section}`: section required by this command"))
}

#[derive(Serialize)]
struct EquilibriumReport {
    kx0_rad: f64,
    x0_m: f64,
    stability: equilibrium::Stability,
    potential_j: f64,
    curvature_j_m2: f64,
    photon_numbers: [f64; 2],
    shifted_detunings_rad_s: [f64; 2],
    omega_m_rad_s: f64,
    omega_m_hz: f64,
    g_rad_s: [f64; 2],
    g_tilde_rad_s: [f64; 2],
    g_tilde_hz: [f64; 2],
    gamma_opt_rad_s: Option<f64>,
}

impl EquilibriumReport {
    fn new(e: &Equilibrium, kappa: f64) -> Self {
        Self {
            kx0_rad: e.kx0,
            x0_m: e.x0,
            stability: e.stability,
            potential_j: e.potential,
            curvature_j_m2: e.curvature,
            photon_numbers: e.photon_numbers,
            shifted_detunings_rad_s: e.shifted_detunings,
            omega_m_rad_s: e.omega_m,
            omega_m_hz: hz(e.omega_m),
            g_rad_s: e.g,
            g_tilde_rad_s: e.g_tilde,
            g_tilde_hz: e.g_tilde.map(hz),
            gamma_opt_rad_s: e.is_trapping().then(|| cooling::cooling_rate(e, kappa)),
        }
    }
}

pub fn equilibrium(cfg: &RunConfig, out: &mut Outputs) -> Result<serde_json::Value, CliError> {
    let sys = cfg.system()?;
    let op = cfg.operating_point();
    let eqs = equilibrium::find_equilibria(&sys, &op)?;
    let stable: Vec<&Equilibrium> = eqs.iter().filter(|e| e.is_stable()).collect();
    let deepest = equilibrium::select_branch(&eqs, BranchChoice::Deepest).map(|d| {
        stable
            .iter()
            .position(|e| e.kx0 == d.kx0)
            .unwrap_or_default()
    });
    let report = json!({
        "delta1_rad_s": op.delta1,
        "delta2_rad_s": op.delta2,
        "coupling_a_rad_s": sys.coupling()?,
        "stable_count": stable.len(),
        "bistable": stable.len() >= 2,
        "deepest_stable_index": deepest,
        "equilibria": eqs.iter().map(|e| EquilibriumReport::new(e, sys.kappa())).collect::<Vec<_>>(),
    });
    out.write_json("equilibrium.json", &report)?;
    Ok(report)
}

fn grid_axes(cfg: &RunConfig) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let g = cfg.grid.as_ref().ok_or_else(|| missing("grid"))?;
    Ok((
        sweep::linspace(g.delta1_min_rad_s, g.delta1_max_rad_s, g.resolution[0]),
        sweep::linspace(g.delta2_min_rad_s, g.delta2_max_rad_s, g.resolution[1]),
    ))
}

pub fn map(cfg: &RunConfig, out: &mut Outputs) -> Result<serde_json::Value, CliError> {
    let sys = cfg.system()?;
    let (d1, d2) = grid_axes(cfg)?;
    let opts = MapOptions {
        gas: cfg.gas_params(),
        semiclassical: cfg.grid.as_ref().is_some_and(|g| g.semiclassical),
    };
    let m = sweep::cooling_map(&sys, &d1, &d2, &opts)?;
    out.write("map.csv", |w| Ok(m.write_csv(w)?))?;
    out.write_json(
        "map.loci.json",
        &json!({ "resonance_loci": m.resonance_loci, "branch_jumps": m.branch_jumps }),
    )?;
    let gamma = m.field(MapField::GammaOpt);
    let best = gamma
        .iter()
        .enumerate()
        .filter(|(_, g)| g.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1));
    let count = |s: sweep::CellStatus| m.cells.iter().filter(|c| c.status == s).count();
    Ok(json!({
        "cells": m.cells.len(),
        "ok": count(sweep::CellStatus::Ok),
        "unstable": count(sweep::CellStatus::Unstable),
        "no_equilibrium": count(sweep::CellStatus::NoEquilibrium),
        "no_frequency": count(sweep::CellStatus::NoFrequency),
        "strongest_cooling": best.map(|(k, g)| json!({
            "delta1_rad_s": d1[k / d2.len()],
            "delta2_rad_s": d2[k % d2.len()],
            "gamma_opt_rad_s": g,
        })),
        "branch_jumps": m.branch_jumps.len(),
    }))
}

pub fn bistability(cfg: &RunConfig, out: &mut Outputs) -> Result<serde_json::Value, CliError> {
    let sys = cfg.system()?;
    let (d1, d2) = grid_axes(cfg)?;
    let b = sweep::bistability_locus(&sys, &d1, &d2, cfg.gas_params())?;
    out.write("bistability.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["delta1_rad_s", "delta2_rad_s", "field", "value"])?;
        for (i, x) in d1.iter().enumerate() {
            for (j, y) in d2.iter().enumerate() {
                let n = b.stable_counts[i * d2.len() + j];
                c.write_record([x.to_string(), y.to_string(), "stable_count".into(), n.to_string()])?;
            }
        }
        c.flush()?;
        Ok(())
    })?;
    out.write_json("bistability.locus.json", &json!({ "locus": b.locus }))?;
    Ok(json!({
        "cells": b.stable_counts.len(),
        "bistable_cells": b.bistable_cells(),
        "locus_lines": b.locus.len(),
    }))
}

fn followed_model(cfg: &RunConfig) -> Result<(Equilibrium, dynamics::DriftModel), CliError> {
    let sys = cfg.system()?;
    let op = cfg.operating_point();
    let eq = equilibrium::solve_branch(&sys, &op, BranchChoice::Deepest)?
        .ok_or(levsim::Error::NoEquilibrium)?;
    let gamma_m = sphere::gas_damping(&sys.sphere, &op.gas);
    let model = dynamics::build_drift(&eq, sys.kappa(), gamma_m, op.gas.temperature)?;
    Ok((eq, model))
}

pub fn spectrum(cfg: &RunConfig, out: &mut Outputs) -> Result<serde_json::Value, CliError> {
    let sp = cfg.spectrum.clone().unwrap_or_default();
    let (eq, model) = followed_model(cfg)?;
    model.ensure_stable()?;
    let grid = match sp.omega_max_rad_s {
        Some(w) => sweep::linspace(-w, w, sp.points),
        None => spectra::frequency_grid(&model, sp.points)?,
    };
    let method: Provenance = sp.method.into();
    let s = match method {
        Provenance::Quantum => spectra::quantum_spectrum(&model, Some(grid))?,
        Provenance::Semiclassical => spectra::semiclassical_spectrum(&model, Some(grid))?,
    };
    out.write("spectrum.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["omega_rad_s", "omega_hz", "s_xx"])?;
        for (o, v) in s.omega.iter().zip(&s.s_xx) {
            c.write_record([o.to_string(), hz(*o).to_string(), v.to_string()])?;
        }
        c.flush()?;
        Ok(())
    })?;
    let phonons = spectra::phonon_from_spectrum(&s)?;
    let asym = match method {
        Provenance::Quantum => Some(spectra::sideband_asymmetry(&s)?),
        Provenance::Semiclassical => None,
    };
    let pt = cooling::phonon_pt(&eq, model.kappa, model.gamma_m, cfg.gas.temperature_k);
    let modes: Vec<Eigenmode> = dynamics::positive_branch(&dynamics::eigenmodes(&model)?);
    let summary = json!({
        "method": method,
        "kx0_rad": eq.kx0,
        "omega_m_rad_s": eq.omega_m,
        "omega_m_hz": hz(eq.omega_m),
        "gamma_m_rad_s": model.gamma_m,
        "n_bath": model.n_bath,
        "gamma_opt_rad_s": pt.gamma_opt,
        "n_pt": if pt.heating { None } else { Some(pt.n_gas) },
        "n_spectrum": phonons.n,
        "n_lyapunov": spectra::lyapunov_variance(&model)? - 0.5,
        "tail_fraction": phonons.tail_fraction,
        "truncation_warning": phonons.truncation_warning,
        "sideband_asymmetry": asym,
        "normal_modes": modes,
    });
    out.write_json("spectrum.json", &summary)?;
    if phonons.truncation_warning {
        eprintln!(
            "warning: {:.2e} of the spectral weight lies outside the frequency grid",
            phonons.tail_fraction
        );
    }
    Ok(summary)
}

pub fn sweep(cfg: &RunConfig, out: &mut Outputs) -> Result<serde_json::Value, CliError> {
    let sys = cfg.system()?;
    let op = cfg.operating_point();
    match cfg.sweep.as_ref().ok_or_else(|| missing("sweep"))? {
        SweepSection::SpectrumStack {
            delta2_min_rad_s,
            delta2_max_rad_s,
            rows,
            omega_max_rad_s,
            columns,
            method,
            binary,
        } => {
            let d2 = sweep::linspace(*delta2_min_rad_s, *delta2_max_rad_s, *rows);
            let w = sweep::linspace(-omega_max_rad_s, *omega_max_rad_s, *columns);
            let st = sweep::spectrum_sweep(&sys, op.delta1, &d2, &w, op.gas, (*method).into())?;
            out.write("stack.csv", |f| Ok(st.write_csv(f)?))?;
            if *binary {
                out.write("stack.bin", |f| Ok(st.write_binary(f)?))?;
            }
            let annotations = json!({
                "delta1_rad_s": st.delta1,
                "method": st.method,
                "rows": d2.len(),
                "columns": w.len(),
                "status": st.status,
                "kx0_rad": st.kx0,
                "s_xx_zero": st.zero_frequency,
                "branch_switches": st.switches,
            });
            out.write_json("stack.json", &annotations)?;
            Ok(json!({
                "rows": d2.len(),
                "masked_rows": st.valid.iter().filter(|v| !**v).count(),
                "branch_switches": st.switches,
            }))
        }
        SweepSection::Pressure {
            pressure_min_mbar,
            pressure_max_mbar,
            points,
        } => {
            let p: Vec<f64> = sweep::logspace(*pressure_min_mbar, *pressure_max_mbar, *points)
                .into_iter()
                .map(|x| x * levsim::constants::PA_PER_MBAR)
                .collect();
            let pts = sweep::pressure_sweep(&sys, op.delta1, op.delta2, &p, op.gas.temperature)?;
            out.write("pressure.csv", |f| {
                let mut c = csv::Writer::from_writer(f);
                c.write_record([
                    "pressure_mbar",
                    "gamma_m_rad_s",
                    "n_bath",
                    "gamma_opt_rad_s",
                    "n_pt",
                    "n_sc",
                    "n_qm",
                    "n_lyapunov",
                    "tail_fraction",
                ])?;
                for q in &pts {
                    c.write_record(
                        [
                            q.pressure_pa / levsim::constants::PA_PER_MBAR,
                            q.gamma_m,
                            q.n_bath,
                            q.gamma_opt,
                            q.n_pt,
                            q.n_sc,
                            q.n_qm,
                            q.n_lyapunov,
                            q.tail_fraction,
                        ]
                        .map(|v| v.to_string()),
                    )?;
                }
                c.flush()?;
                Ok(())
            })?;
            Ok(json!({ "points": pts }))
        }
        SweepSection::Crossing {
            delta2_min_rad_s,
            delta2_max_rad_s,
            points,
        } => {
            let d2 = sweep::linspace(*delta2_min_rad_s, *delta2_max_rad_s, *points);
            let scan = dynamics::crossing_scan(&sys, op.delta1, &d2, op.gas)?;
            out.write("crossing.csv", |f| {
                let mut c = csv::Writer::from_writer(f);
                c.write_record([
                    "delta2_rad_s",
                    "status",
                    "branch",
                    "frequency_rad_s",
                    "decay_rad_s",
                    "w_mechanical",
                    "w_optical1",
                    "w_optical2",
                ])?;
                for p in &scan.points {
                    let status = serde_json::to_value(p.status)?;
                    let status = status.as_str().unwrap_or_default().to_string();
                    for (k, m) in p.modes.iter().enumerate() {
                        c.write_record([
                            p.delta2.to_string(),
                            status.clone(),
                            k.to_string(),
                            m.frequency().to_string(),
                            m.decay().to_string(),
                            m.weights[0].to_string(),
                            m.weights[1].to_string(),
                            m.weights[2].to_string(),
                        ])?;
                    }
                }
                c.flush()?;
                Ok(())
            })?;
            let damping: Vec<_> = scan
                .points
                .iter()
                .map(|p| json!({ "delta2_rad_s": p.delta2, "gamma_opt_rad_s": p.gamma_opt,
                    "normal_mode_damping_rad_s": p.normal_mode_damping }))
                .collect();
            out.write_json(
                "crossing.json",
                &json!({ "crossings": scan.crossings, "gap_minima": scan.gap_minima, "damping": damping }),
            )?;
            Ok(json!({ "crossings": scan.crossings.len(), "gap_minima": scan.gap_minima.len() }))
        }
        SweepSection::Power {
            power_min_mw,
            power_max_mw,
            points,
        } => {
            let p: Vec<f64> = sweep::logspace(power_min_mw * 1e-3, power_max_mw * 1e-3, *points);
            let eqs = sweep::power_sweep(&sys, &op, &p)?;
            out.write("power.csv", |f| {
                let mut c = csv::Writer::from_writer(f);
                c.write_record([
                    "power_mw",
                    "kx0_rad",
                    "n1",
                    "n2",
                    "omega_m_rad_s",
                    "g_tilde1_rad_s",
                    "g_tilde2_rad_s",
                ])?;
                for (pw, e) in &eqs {
                    c.write_record(
                        [
                            pw * 1e3,
                            e.kx0,
                            e.photon_numbers[0],
                            e.photon_numbers[1],
                            e.omega_m,
                            e.g_tilde[0],
                            e.g_tilde[1],
                        ]
                        .map(|v| v.to_string()),
                    )?;
                }
                c.flush()?;
                Ok(())
            })?;
            Ok(json!({ "points": eqs.len() }))
        }
    }
}

pub fn fitpsd(cfg: &RunConfig, out: &mut Outputs) -> Result<serde_json::Value, CliError> {
    let f = cfg.fitpsd.as_ref().ok_or_else(|| missing("fitpsd"))?;
    let ts = TimeSeries::from_csv_path(&f.input_csv, f.channel)?;
    let pg = psd::periodogram(&ts, f.segments)?;
    let fit = psd::fit_time_series(&ts, f.segments, &FitOptions::default())?;
    out.write("periodogram.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["frequency_hz", "psd"])?;
        for (x, y) in pg.frequency.iter().zip(&pg.psd) {
            c.write_record([x.to_string(), y.to_string()])?;
        }
        c.flush()?;
        Ok(())
    })?;
    let predicted = match &f.beam {
        Some(b) => {
            let t = sphere::trap_frequencies(&cfg.sphere_params(), &b.beam(), &cfg.finite_size_model()?)?;
            Some(json!({
                "axial_rad_s": t.axial,
                "axial_hz": hz(t.axial),
                "transverse_rad_s": t.transverse,
                "transverse_hz": hz(t.transverse),
                "ratio": t.ratio,
            }))
        }
        None => None,
    };
    let report = json!({
        "channel": f.channel,
        "f_hz": fit.f_hz(),
        "gamma_hz": fit.gamma_hz(),
        "f_ci_hz": [hz(fit.omega_ci.lo), hz(fit.omega_ci.hi)],
        "gamma_ci_hz": [hz(fit.gamma_ci.lo), hz(fit.gamma_ci.hi)],
        "fit": fit,
        "predicted": predicted,
    });
    out.write_json("fitpsd.json", &report)?;
    Ok(report)
}

pub fn sphere(cfg: &RunConfig, out: &mut Outputs) -> Result<serde_json::Value, CliError> {
    let r = cfg.radius_sweep.clone().unwrap_or_default();
    let radii = sweep::linspace(r.radius_min_nm * 1e-9, r.radius_max_nm * 1e-9, r.points);
    let model = cfg.finite_size_model()?;
    let curve = sweep::radius_sweep(&cfg.sphere_params(), &cfg.cavity_params(), &model, r.photons, &radii)?;
    let axial: Vec<Option<f64>> = match &r.beam {
        Some(b) => curve
            .iter()
            .map(|c| {
                let s = levsim::sphere::SphereParams {
                    radius: c.radius,
                    ..cfg.sphere_params()
                };
                Ok(Some(sphere::trap_frequencies(&s, &b.beam(), &model)?.axial))
            })
            .collect::<Result<_, levsim::Error>>()?,
        None => vec![None; curve.len()],
    };
    out.write("sphere.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        let mut header = vec![
            "r_nm",
            "f",
            "node_trapped",
            "a0_rad_s",
            "a_rad_s",
            "omega_m_rad_s",
            "omega_m_hz",
            "g_tilde_rad_s",
            "g_tilde_hz",
        ];
        if r.beam.is_some() {
            header.extend(["omega_a_rad_s", "f_a_hz"]);
        }
        c.write_record(&header)?;
        for (s, a) in curve.iter().zip(&axial) {
            let mut row = vec![
                (s.radius * 1e9).to_string(),
                s.factor.to_string(),
                s.node_trapped.to_string(),
                s.a0.to_string(),
                s.a.to_string(),
                s.omega_m.to_string(),
                hz(s.omega_m).to_string(),
                s.g_tilde.to_string(),
                hz(s.g_tilde).to_string(),
            ];
            if let Some(a) = a {
                row.extend([a.to_string(), hz(*a).to_string()]);
            }
            c.write_record(&row)?;
        }
        c.flush()?;
        Ok(())
    })?;
    let peak = curve
        .iter()
        .filter(|c| !c.node_trapped)
        .max_by(|a, b| a.g_tilde.total_cmp(&b.g_tilde));
    Ok(json!({
        "points": curve.len(),
        "g_tilde_peak_radius_nm": peak.map(|p| p.radius * 1e9),
        "g_tilde_peak_rad_s": peak.map(|p| p.g_tilde),
    }))
}

pub fn print(value: &serde_json::Value) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    serde_json::to_writer_pretty(&mut lock, value)?;
    writeln!(lock)?;
    Ok(())
}
