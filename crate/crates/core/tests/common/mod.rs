//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Exact discretisation of `x'' + Γ x' + ω0² x = noise` with stationary
/// velocity variance `sigma_v²`, sampled at `fs`.
pub fn thermal_oscillator(
    omega0: f64,
    gamma: f64,
    sigma_v: f64,
    fs: f64,
    n: usize,
    seed: u64,
) -> Vec<f64> {
    let dt = 1.0 / fs;
    let wd = (omega0 * omega0 - gamma * gamma / 4.0).sqrt();
    let e = (-gamma * dt / 2.0).exp();
    let (s, c) = (wd * dt).sin_cos();
    let h = gamma / (2.0 * wd);
    let phi = [
        [e * (c + h * s), e * s / wd],
        [-e * omega0 * omega0 * s / wd, e * (c - h * s)],
    ];
    let sx2 = sigma_v * sigma_v / (omega0 * omega0);
    let sv2 = sigma_v * sigma_v;
    // Q = Σ - Φ Σ Φᵀ with Σ = diag(sx2, sv2).
    let q00 = sx2 - (phi[0][0] * phi[0][0] * sx2 + phi[0][1] * phi[0][1] * sv2);
    let q01 = -(phi[0][0] * phi[1][0] * sx2 + phi[0][1] * phi[1][1] * sv2);
    let q11 = sv2 - (phi[1][0] * phi[1][0] * sx2 + phi[1][1] * phi[1][1] * sv2);
    let l00 = q00.sqrt();
    let l10 = q01 / l00;
    let l11 = (q11 - l10 * l10).max(0.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut x = draw() * sx2.sqrt();
    let mut v = draw() * sv2.sqrt();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(x);
        let (z1, z2) = (draw(), draw());
        let nx = phi[0][0] * x + phi[0][1] * v + l00 * z1;
        let nv = phi[1][0] * x + phi[1][1] * v + l10 * z1 + l11 * z2;
        x = nx;
        v = nv;
    }
    out
}

/// Minima of `V` on a dense periodic grid, counted with the sign-change rule
/// applied to the sampled values themselves (no derivative information).
pub fn dense_minima_count(v: impl Fn(f64) -> f64, period: f64, points: usize) -> usize {
    let vals: Vec<f64> = (0..points).map(|i| v(period * i as f64 / points as f64)).collect();
    (0..points)
        .filter(|&i| {
            let prev = vals[(i + points - 1) % points];
            let next = vals[(i + 1) % points];
            vals[i] < prev && vals[i] <= next
        })
        .count()
}
