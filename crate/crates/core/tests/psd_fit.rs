mod common;

use std::f64::consts::PI;

use levsim::psd::{self, Channel, FitOptions, TimeSeries};

const FS: f64 = 500e3;
const N: usize = 1 << 19;
const SEGMENTS: usize = 255;

fn synthetic(f_a: f64, gamma_hz: f64, seed: u64, scale: f64) -> TimeSeries {
    let x = common::thermal_oscillator(2.0 * PI * f_a, 2.0 * PI * gamma_hz, 1.0, FS, N, seed);
    TimeSeries::new(FS, x.into_iter().map(|v| v * scale).collect(), Channel::Axial).unwrap()
}

#[test]
fn langevin_psd_matches_analytic_lorentzian() {
    let ts = synthetic(40e3, 2.4e3, 11, 1.0);
    let pg = psd::periodogram(&ts, SEGMENTS).unwrap();
    let (w0, g) = (2.0 * PI * 40e3, 2.0 * PI * 2.4e3);
    // One-sided PSD in Hz of the continuous process, 2 k T/m -> 2 Γ σ_v².
    let analytic = |f: f64| {
        let w = 2.0 * PI * f;
        2.0 * 2.0 * PI * (2.0 * g) / (2.0 * PI) / ((w0 * w0 - w * w).powi(2) + w * w * g * g)
    };
    let mut worst: f64 = 0.0;
    for (f, p) in pg.frequency.iter().zip(&pg.psd) {
        if (*f - 40e3).abs() < 6e3 {
            worst = worst.max((p / analytic(*f) - 1.0).abs());
        }
    }
    assert!(worst < 0.5, "worst bin deviation {worst}");
    let total = pg.total_power();
    assert!((total - ts.variance()).abs() < 0.01 * ts.variance());
}

#[test]
fn white_noise_is_flat() {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let x: Vec<f64> = (0..1 << 18).map(|_| StandardNormal.sample(&mut rng)).collect();
    let ts = TimeSeries::new(1e4, x, Channel::Transverse).unwrap();
    let pg = psd::periodogram(&ts, 127).unwrap();
    let expect = 2.0 / 1e4;
    let inner = &pg.psd[2..pg.psd.len() - 2];
    let mean = inner.iter().sum::<f64>() / inner.len() as f64;
    assert!((mean - expect).abs() < 0.01 * expect);
    // Independent bins average 127 segments: relative spread about 1/sqrt(127).
    assert!(inner.iter().all(|p| (p / expect - 1.0).abs() < 0.6));
    assert!((pg.total_power() - ts.variance()).abs() < 0.01 * ts.variance());
}

#[test]
fn fit_is_invariant_under_amplitude_scaling() {
    let a = psd::fit_time_series(&synthetic(40e3, 2.4e3, 5, 1.0), SEGMENTS, &FitOptions::default()).unwrap();
    let b = psd::fit_time_series(&synthetic(40e3, 2.4e3, 5, 2.0), SEGMENTS, &FitOptions::default()).unwrap();
    assert!((a.omega_fit / b.omega_fit - 1.0).abs() < 1e-6);
    assert!((a.gamma0 / b.gamma0 - 1.0).abs() < 1e-6);
    assert!((b.amplitude / a.amplitude - 4.0).abs() < 1e-5);
}

#[test]
fn monte_carlo_estimates_are_unbiased() {
    let runs = 100;
    let mut f_est = Vec::new();
    let mut g_est = Vec::new();
    let mut f_sig = Vec::new();
    let mut g_sig = Vec::new();
    let mut covered = 0;
    for seed in 0..runs {
        let fit = psd::fit_time_series(&synthetic(40e3, 2.4e3, 1000 + seed, 1.0), SEGMENTS, &FitOptions::default())
            .unwrap();
        if fit.omega_ci.lo <= 2.0 * PI * 40e3 && 2.0 * PI * 40e3 <= fit.omega_ci.hi {
            covered += 1;
        }
        f_est.push(fit.f_hz());
        g_est.push(fit.gamma_hz());
        f_sig.push(fit.omega_ci.sigma / (2.0 * PI));
        g_sig.push(fit.gamma_ci.sigma / (2.0 * PI));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (fm, gm) = (mean(&f_est), mean(&g_est));
    let (fs, gs) = (mean(&f_sig), mean(&g_sig));
    assert!((fm - 40e3).abs() < 2.0 * fs);
    assert!((gm - 2.4e3).abs() < 2.0 * gs);
    // Nominal 95% intervals should cover the truth in most runs.
    assert!(covered >= 85, "coverage {covered}/{runs}");
}
