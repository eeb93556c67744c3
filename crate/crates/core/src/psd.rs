//! Trap frequencies from position time series.
//!
//! A Welch periodogram (Hann window, 50% overlap) is fitted with the thermal
//! oscillator spectrum plus a white noise floor,
//!
//! ```text
//! P(f) = C γ / ((f0^2 - f^2)^2 + f^2 γ^2) + F
//! ```
//!
//! by Levenberg–Marquardt on log residuals. With `ω = 2πf` this is the
//! `(2 k_B T / m) Γ0 / ((ω_a^2 - ω^2)^2 + ω^2 Γ0^2)` form with `ω_a = 2π f0`
//! and `Γ0 = 2π γ`.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use nalgebra::{Matrix4, Vector4};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of samples accepted for fitting.
pub const MIN_FIT_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    #[default]
    Axial,
    Transverse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    /// Samples per second (Hz).
    pub sample_rate: f64,
    pub samples: Vec<f64>,
    pub channel: Channel,
}

impl TimeSeries {
    pub fn new(sample_rate: f64, samples: Vec<f64>, channel: Channel) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::param("sample_rate", "must be positive"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("samples", "must be finite"));
        }
        Ok(Self {
            sample_rate,
            samples,
            channel,
        })
    }

    /// Read a `t_s,position` CSV with uniformly spaced times.
    pub fn from_csv_reader<R: Read>(reader: R, channel: Channel) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "t_s" || &headers[1] != "position" {
            return Err(Error::Config("time series header must be `t_s,position`".into()));
        }
        let mut t = Vec::new();
        let mut x = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |i: usize| {
                rec[i]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("bad number `{}`: {e}", &rec[i])))
            };
            t.push(parse(0)?);
            x.push(parse(1)?);
        }
        if t.len() < 2 {
            return Err(Error::TooShort { got: t.len(), need: 2 });
        }
        let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
        if !(dt > 0.0) {
            return Err(Error::Config("times must increase".into()));
        }
        if t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt) {
            return Err(Error::Config("samples must be uniformly spaced".into()));
        }
        Self::new(1.0 / dt, x, channel)
    }

    pub fn from_csv_path(path: impl AsRef<Path>, channel: Channel) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?, channel)
    }

    pub fn variance(&self) -> f64 {
        let n = self.samples.len() as f64;
        let mean = self.samples.iter().sum::<f64>() / n;
        self.samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Periodogram {
    /// Bin frequencies (Hz), from 0 to Nyquist.
    pub frequency: Vec<f64>,
    /// One-sided PSD (units^2/Hz).
    pub psd: Vec<f64>,
    pub segments: usize,
    pub segment_length: usize,
}

impl Periodogram {
    pub fn resolution(&self) -> f64 {
        self.frequency[1] - self.frequency[0]
    }

    /// `Σ PSD Δf`.
    pub fn total_power(&self) -> f64 {
        self.psd.iter().sum::<f64>() * self.resolution()
    }
}

/// Welch estimate from `segments` half-overlapping Hann-windowed segments.
pub fn periodogram(ts: &TimeSeries, segments: usize) -> Result<Periodogram> {
    if segments == 0 {
        return Err(Error::param("segments", "need at least one segment"));
    }
    let n = ts.samples.len();
    let len = 2 * n / (segments + 1);
    let len = if segments == 1 { n } else { len };
    if len < 16 {
        return Err(Error::TooShort { got: n, need: 8 * (segments + 1) });
    }
    let hop = if segments == 1 { 0 } else { len / 2 };
    let window: Vec<f64> = (0..len)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / len as f64).cos())
        .collect();
    let wsum: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(len);
    let bins = len / 2 + 1;
    let mut acc = vec![0.0; bins];
    let mut buf = vec![Complex::new(0.0, 0.0); len];
    for s in 0..segments {
        let seg = &ts.samples[s * hop..s * hop + len];
        let mean = seg.iter().sum::<f64>() / len as f64;
        for (b, (x, w)) in buf.iter_mut().zip(seg.iter().zip(&window)) {
            *b = Complex::new((x - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, c) in acc.iter_mut().zip(&buf) {
            *a += c.norm_sqr();
        }
    }
    let norm = 1.0 / (ts.sample_rate * wsum * segments as f64);
    let psd: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let one_sided = if k == 0 || (len % 2 == 0 && k == bins - 1) { 1.0 } else { 2.0 };
            a * norm * one_sided
        })
        .collect();
    let df = ts.sample_rate / len as f64;
    Ok(Periodogram {
        frequency: (0..bins).map(|k| k as f64 * df).collect(),
        psd,
        segments,
        segment_length: len,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitOptions {
    /// Required peak-to-median ratio.
    pub min_peak_ratio: f64,
    /// Residuals beyond this many median absolute deviations are dropped.
    pub outlier_mads: f64,
    /// Fit only bins within this many initial linewidths of the peak;
    /// `None` fits the whole spectrum.
    pub band: Option<f64>,
    pub max_iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            min_peak_ratio: 3.0,
            outlier_mads: 6.0,
            band: Some(10.0),
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    /// One standard error.
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsdFit {
    /// Trap frequency `ω_a` (rad/s).
    pub omega_fit: f64,
    /// Damping `Γ0` (rad/s).
    pub gamma0: f64,
    /// Scale `D` in `D Γ0 / ((ω_a^2 - ω^2)^2 + ω^2 Γ0^2)`, the effective `2 k_B T / m`.
    pub amplitude: f64,
    /// Noise floor (units^2/Hz).
    pub floor: f64,
    /// RMS log residual of the retained bins.
    pub residual: f64,
    /// 95% interval on `ω_a` (rad/s).
    pub omega_ci: Interval,
    /// 95% interval on `Γ0` (rad/s).
    pub gamma_ci: Interval,
    pub iterations: usize,
    pub bins_used: usize,
    pub outliers: usize,
}

impl PsdFit {
    pub fn f_hz(&self) -> f64 {
        self.omega_fit / (2.0 * PI)
    }

    pub fn gamma_hz(&self) -> f64 {
        self.gamma0 / (2.0 * PI)
    }
}

/// Model in frequency units with log parameters `[ln f0, ln γ, ln C, ln F]`.
fn model(p: &Vector4<f64>, f: f64) -> f64 {
    let (f0, g, c, fl) = (p[0].exp(), p[1].exp(), p[2].exp(), p[3].exp());
    let d = f0 * f0 - f * f;
    c * g / (d * d + f * f * g * g) + fl
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn initial_guess(freq: &[f64], psd: &[f64], opts: &FitOptions) -> Result<Vector4<f64>> {
    let mut sorted = psd.to_vec();
    let med = median(&mut sorted);
    let (ipk, &ppk) = psd
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::NoPeak(0.0))?;
    let ratio = if med > 0.0 { ppk / med } else { f64::INFINITY };
    if !(ratio >= opts.min_peak_ratio) {
        return Err(Error::NoPeak(ratio));
    }
    let df = freq[1] - freq[0];
    let half = 0.5 * (ppk + med);
    let lo = (0..ipk).rev().find(|&i| psd[i] < half).unwrap_or(0);
    let hi = (ipk..psd.len()).find(|&i| psd[i] < half).unwrap_or(psd.len() - 1);
    let f0 = freq[ipk].max(df);
    let gamma = (freq[hi] - freq[lo]).max(df);
    let floor = {
        let tail = &psd[psd.len() * 9 / 10..];
        let mut t = tail.to_vec();
        median(&mut t).max(ppk * 1e-12)
    };
    let c = (ppk - floor).max(ppk * 1e-3) * f0 * f0 * gamma;
    Ok(Vector4::new(f0.ln(), gamma.ln(), c.ln(), floor.ln()))
}

struct Lm {
    params: Vector4<f64>,
    cost: f64,
    jtj: Matrix4<f64>,
    iterations: usize,
}

fn residuals(p: &Vector4<f64>, f: &[f64], y: &[f64]) -> Vec<f64> {
    f.iter().zip(y).map(|(&f, &y)| model(p, f).ln() - y.ln()).collect()
}

fn jacobian(p: &Vector4<f64>, f: &[f64]) -> Vec<[f64; 4]> {
    let (f0, g, c, fl) = (p[0].exp(), p[1].exp(), p[2].exp(), p[3].exp());
    f.iter()
        .map(|&f| {
            let d = f0 * f0 - f * f;
            let den = d * d + f * f * g * g;
            let lor = c * g / den;
            let m = lor + fl;
            // Derivatives of ln m with respect to the log parameters.
            let d_f0 = -lor * (4.0 * d * f0 * f0) / den;
            let d_g = lor * (1.0 - 2.0 * f * f * g * g / den);
            [d_f0 / m, d_g / m, lor / m, fl / m]
        })
        .collect()
}

fn levenberg_marquardt(start: Vector4<f64>, f: &[f64], y: &[f64], max_iter: usize) -> Result<Lm> {
    let mut p = start;
    let cost_of = |p: &Vector4<f64>| residuals(p, f, y).iter().map(|r| r * r).sum::<f64>();
    let mut cost = cost_of(&p);
    let mut lambda = 1e-3;
    for it in 1..=max_iter {
        let r = residuals(&p, f, y);
        let j = jacobian(&p, f);
        let mut jtj = Matrix4::<f64>::zeros();
        let mut jtr = Vector4::<f64>::zeros();
        for (row, ri) in j.iter().zip(&r) {
            for a in 0..4 {
                jtr[a] += row[a] * ri;
                for b in 0..4 {
                    jtj[(a, b)] += row[a] * row[b];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut h = jtj;
            for a in 0..4 {
                h[(a, a)] += lambda * jtj[(a, a)].max(1e-12);
            }
            let Some(step) = h.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            let c = cost_of(&trial);
            if c.is_finite() && c < cost {
                let rel = (cost - c) / cost.max(f64::MIN_POSITIVE);
                p = trial;
                cost = c;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                if rel < 1e-12 || step.amax() < 1e-12 {
                    return Ok(finish(p, cost, f, it));
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // No downhill step at any damping: at a minimum.
            return Ok(finish(p, cost, f, it));
        }
    }
    Err(Error::NoConvergence(max_iter))
}

fn finish(p: Vector4<f64>, cost: f64, f: &[f64], iterations: usize) -> Lm {
    let mut jtj = Matrix4::<f64>::zeros();
    for row in jacobian(&p, f) {
        for a in 0..4 {
            for b in 0..4 {
                jtj[(a, b)] += row[a] * row[b];
            }
        }
    }
    Lm {
        params: p,
        cost,
        jtj,
        iterations,
    }
}

/// Variance inflation `1 + 2 Σ_l |ρ_l|^2` from the spectral correlation of
/// neighbouring bins under a Hann window.
fn hann_bin_correlation(len: usize) -> f64 {
    let w: Vec<f64> = (0..len)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / len as f64).cos())
        .collect();
    let norm: f64 = w.iter().map(|v| v * v).sum();
    let mut factor = 1.0;
    for lag in 1..4 {
        let (mut re, mut im) = (0.0, 0.0);
        for (n, v) in w.iter().enumerate() {
            let ph = 2.0 * PI * (lag * n) as f64 / len as f64;
            re += v * v * ph.cos();
            im -= v * v * ph.sin();
        }
        factor += 2.0 * (re * re + im * im) / (norm * norm);
    }
    factor
}

/// Fit the thermal oscillator spectrum to a periodogram.
pub fn fit_thermal_lorentzian(pg: &Periodogram, opts: &FitOptions) -> Result<PsdFit> {
    // Skip the DC bin, which the mean removal empties.
    let f: Vec<f64> = pg.frequency[1..].to_vec();
    let y: Vec<f64> = pg.psd[1..].to_vec();
    if y.len() < 8 {
        return Err(Error::TooShort { got: pg.psd.len(), need: 9 });
    }
    if y.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Numerical("periodogram has non-positive bins".into()));
    }
    let start = initial_guess(&f, &y, opts)?;
    let (f, y) = match opts.band {
        Some(width) => {
            let (f0, g) = (start[0].exp(), start[1].exp());
            let mut half = width * g;
            let mut sel: Vec<usize>;
            loop {
                sel = (0..f.len()).filter(|&i| (f[i] - f0).abs() <= half).collect();
                if sel.len() >= 16 || sel.len() == f.len() {
                    break;
                }
                half *= 2.0;
            }
            (sel.iter().map(|&i| f[i]).collect(), sel.iter().map(|&i| y[i]).collect())
        }
        None => (f, y),
    };
    let first = levenberg_marquardt(start, &f, &y, opts.max_iterations)?;
    let r = residuals(&first.params, &f, &y);
    let mut tmp = r.clone();
    let med = median(&mut tmp);
    let mut dev: Vec<f64> = r.iter().map(|v| (v - med).abs()).collect();
    let mad = median(&mut dev);
    let keep: Vec<bool> = r.iter().map(|v| (v - med).abs() <= opts.outlier_mads * mad).collect();
    let outliers = keep.iter().filter(|k| !**k).count();
    let (fit, fk, yk) = if outliers > 0 {
        let fk: Vec<f64> = f.iter().zip(&keep).filter(|(_, k)| **k).map(|(v, _)| *v).collect();
        let yk: Vec<f64> = y.iter().zip(&keep).filter(|(_, k)| **k).map(|(v, _)| *v).collect();
        let refit = levenberg_marquardt(first.params, &fk, &yk, opts.max_iterations)?;
        (refit, fk, yk)
    } else {
        (first, f, y)
    };
    let n = fk.len();
    if n <= 4 {
        return Err(Error::TooShort { got: n, need: 5 });
    }
    let _ = &yk;
    let s2 = fit.cost / (n - 4) as f64 * hann_bin_correlation(pg.segment_length);
    // The floor can be unconstrained inside a narrow band; drop null directions.
    let cov = fit
        .jtj
        .pseudo_inverse(1e-12 * fit.jtj.amax())
        .map_err(|e| Error::Numerical(format!("normal matrix: {e}")))?
        * s2;
    let p = fit.params;
    let interval = |i: usize| {
        let sd = cov[(i, i)].max(0.0).sqrt();
        let v = 2.0 * PI * p[i].exp();
        Interval {
            lo: v * (-1.96 * sd).exp(),
            hi: v * (1.96 * sd).exp(),
            sigma: v * sd,
        }
    };
    let omega = 2.0 * PI * p[0].exp();
    let gamma = 2.0 * PI * p[1].exp();
    if !(omega > 0.0 && gamma > 0.0 && omega.is_finite() && gamma.is_finite()) {
        return Err(Error::Numerical("fit left the physical region".into()));
    }
    Ok(PsdFit {
        omega_fit: omega,
        gamma0: gamma,
        amplitude: p[2].exp() * (2.0 * PI).powi(3),
        floor: p[3].exp(),
        residual: (fit.cost / n as f64).sqrt(),
        omega_ci: interval(0),
        gamma_ci: interval(1),
        iterations: fit.iterations,
        bins_used: n,
        outliers,
    })
}

/// Periodogram and fit in one step; the series must have at least
/// [`MIN_FIT_SAMPLES`] samples.
pub fn fit_time_series(ts: &TimeSeries, segments: usize, opts: &FitOptions) -> Result<PsdFit> {
    if ts.samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooShort {
            got: ts.samples.len(),
            need: MIN_FIT_SAMPLES,
        });
    }
    fit_thermal_lorentzian(&periodogram(ts, segments)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(f0: f64, fs: f64, n: usize, amp: f64) -> TimeSeries {
        let s = (0..n).map(|i| amp * (2.0 * PI * f0 * i as f64 / fs).sin()).collect();
        TimeSeries::new(fs, s, Channel::Axial).unwrap()
    }

    #[test]
    fn sinusoid_has_single_dominant_bin() {
        let fs = 1e5;
        let n = 1 << 14;
        let f0 = 64.0 * fs / 1024.0;
        let pg = periodogram(&sine(f0, fs, n, 1.0), 31).unwrap();
        let (k, _) = pg
            .psd
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!((pg.frequency[k] - f0).abs() < 0.5 * pg.resolution());
        let peak = pg.psd[k];
        let others = pg
            .psd
            .iter()
            .enumerate()
            .filter(|(i, _)| (*i as isize - k as isize).abs() > 1)
            .map(|(_, v)| *v)
            .fold(0.0, f64::max);
        assert!(others < 1e-6 * peak);
    }

    #[test]
    fn parseval_for_sinusoid() {
        let ts = sine(1234.5, 1e5, 1 << 15, 2.0);
        let pg = periodogram(&ts, 15).unwrap();
        let var = ts.variance();
        assert!((pg.total_power() - var).abs() < 0.01 * var);
    }

    #[test]
    fn too_short_and_zero_segments_are_errors() {
        let ts = sine(10.0, 1e3, 20, 1.0);
        assert!(periodogram(&ts, 0).is_err());
        assert!(matches!(periodogram(&ts, 9), Err(Error::TooShort { .. })));
        assert!(matches!(
            fit_time_series(&ts, 1, &FitOptions::default()),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn white_spectrum_has_no_peak() {
        let pg = Periodogram {
            frequency: (0..200).map(|k| k as f64).collect(),
            psd: vec![1.0; 200],
            segments: 1,
            segment_length: 398,
        };
        assert!(matches!(
            fit_thermal_lorentzian(&pg, &FitOptions::default()),
            Err(Error::NoPeak(_))
        ));
    }

    #[test]
    fn exact_model_is_recovered() {
        let truth = Vector4::new(40e3f64.ln(), 2.4e3f64.ln(), 1e9f64.ln(), 1e-6f64.ln());
        let frequency: Vec<f64> = (0..2049).map(|k| k as f64 * 122.0).collect();
        let psd = frequency.iter().map(|&f| model(&truth, f)).collect();
        let pg = Periodogram {
            frequency,
            psd,
            segments: 1,
            segment_length: 4096,
        };
        let fit = fit_thermal_lorentzian(&pg, &FitOptions::default()).unwrap();
        assert!((fit.f_hz() - 40e3).abs() < 1e-6 * 40e3);
        assert!((fit.gamma_hz() - 2.4e3).abs() < 1e-6 * 2.4e3);
        assert_eq!(fit.outliers, 0);
    }

    #[test]
    fn undamped_line_is_located_within_a_bin() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let noise = Normal::new(0.0, 1e-3).unwrap();
        let (fs, f0) = (2e5, 25_030.0);
        let s = (0..1 << 16)
            .map(|i| (2.0 * PI * f0 * i as f64 / fs).sin() + noise.sample(&mut rng))
            .collect();
        let ts = TimeSeries::new(fs, s, Channel::Axial).unwrap();
        let pg = periodogram(&ts, 31).unwrap();
        let fit = fit_thermal_lorentzian(&pg, &FitOptions::default()).unwrap();
        assert!((fit.f_hz() - f0).abs() <= pg.resolution(), "{}", fit.f_hz());
    }

    #[test]
    fn csv_round_trip() {
        let text = "t_s,position\n0,1\n0.001,2\n0.002,3\n";
        let ts = TimeSeries::from_csv_reader(text.as_bytes(), Channel::Transverse).unwrap();
        assert!((ts.sample_rate - 1000.0).abs() < 1e-9);
        assert_eq!(ts.samples, vec![1.0, 2.0, 3.0]);
        let bad = "t_s,position\n0,1\n0.001,2\n0.003,3\n";
        assert!(TimeSeries::from_csv_reader(bad.as_bytes(), Channel::Axial).is_err());
        let header = "time,x\n0,1\n";
        assert!(TimeSeries::from_csv_reader(header.as_bytes(), Channel::Axial).is_err());
    }
}
