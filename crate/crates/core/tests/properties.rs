use std::f64::consts::PI;

use levsim::constants::PA_PER_MBAR;
use levsim::dynamics::{self, DriftModel};
use levsim::equilibrium;
use levsim::presets;
use levsim::spectra;
use levsim::sphere::{self, Beam, CavityParams, FiniteSizeModel, GasParams, SphereParams};
use levsim::sweep;
use levsim::OperatingPoint;
use proptest::prelude::*;

fn cavity() -> CavityParams {
    CavityParams::new(0.01, 40e-6, 1064e-9, 3e5).unwrap()
}

/// Random but always stable drift models: couplings kept well below the
/// instability threshold and both modes red detuned.
fn stable_model() -> impl Strategy<Value = DriftModel> {
    (
        2e5..2e6f64,
        1e-3..1e4f64,
        0.0..1e3f64,
        1e5..1e6f64,
        -2e6..-1e5f64,
        -2e6..-1e5f64,
        0.0..0.3f64,
        0.0..0.3f64,
    )
        .prop_map(|(w, gm, nb, kappa, d1, d2, c1, c2)| {
            let scale = (w * kappa).sqrt() / 4.0;
            DriftModel::new(w, gm, nb, kappa, [d1, d2], [c1 * scale, c2 * scale])
        })
        .prop_filter("stable", |m| m.is_stable().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn a0_scales_with_volume(r in 20e-9..400e-9f64, c in 0.2..3.0f64) {
        let cav = cavity();
        let a = sphere::coupling_a0(&SphereParams::silica(r).unwrap(), &cav);
        let b = sphere::coupling_a0(&SphereParams::silica(r * c).unwrap(), &cav);
        prop_assert!((b / a / c.powi(3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gas_damping_linear_in_pressure_inverse_in_radius(
        p in 1e-6..1e3f64,
        c in 0.1..10.0f64,
        r in 20e-9..400e-9f64,
    ) {
        let s = SphereParams::silica(r).unwrap();
        let g = sphere::gas_damping(&s, &GasParams::air(p));
        let gp = sphere::gas_damping(&s, &GasParams::air(p * c));
        let gr = sphere::gas_damping(&SphereParams::silica(r * c).unwrap(), &GasParams::air(p));
        prop_assert!((gp / g / c - 1.0).abs() < 1e-12);
        prop_assert!((gr / g * c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_sphere_trap_ratio_fixed_by_waist(
        w in 0.8e-6..10e-6f64,
        power in 1e-3..1.0f64,
        r in 10e-9..300e-9f64,
    ) {
        let beam = Beam { power, waist: w, wavelength: 1064e-9 };
        let s = SphereParams::silica(r).unwrap();
        let t = sphere::trap_frequencies(&s, &beam, &FiniteSizeModel::unity()).unwrap();
        let k = 2.0 * PI / 1064e-9;
        prop_assert!((t.ratio * t.ratio / (k * k * w * w / 2.0) - 1.0).abs() < 1e-12);
        prop_assert!((sphere::waist_from_ratio(t.ratio, 1064e-9) / w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn finite_size_factor_bounded(r in 1e-9..600e-9f64) {
        let k = 2.0 * PI / 1064e-9;
        let f = sphere::finite_size_factor(&FiniteSizeModel::Analytic, r, k).unwrap();
        prop_assert!(f.factor >= 0.0 && f.factor <= 1.0);
    }

    #[test]
    fn equilibria_are_stationary_and_power_invariant(
        d1 in -2.5e6..0.0f64,
        d2 in -2.5e6..0.0f64,
        scale in 0.01..100.0f64,
    ) {
        let cfg = presets::bistability();
        let op = OperatingPoint::new(d1, d2, GasParams::air(1e-4));
        let eqs = equilibrium::find_equilibria(&cfg, &op).unwrap();
        prop_assert!(!eqs.is_empty());
        let k = cfg.wavenumber();
        for e in &eqs {
            prop_assert!((0.0..PI).contains(&e.kx0));
            // Relative to the force scale k * max|V|.
            let probe: f64 = (0..64)
                .map(|i| equilibrium::potential_gradient(i as f64 * PI / 64.0 / k, &cfg, &op).unwrap().abs())
                .fold(0.0, f64::max);
            let grad = equilibrium::potential_gradient(e.x0, &cfg, &op).unwrap();
            prop_assert!(grad.abs() <= 1e-8 * probe);
        }
        let scaled = equilibrium::find_equilibria(&cfg.with_power_scaled(scale), &op).unwrap();
        let stable = |v: &[equilibrium::Equilibrium]| v.iter().filter(|e| e.is_stable()).count();
        prop_assert_eq!(stable(&eqs), stable(&scaled));
        prop_assert_eq!(eqs.len(), scaled.len());
        for (a, b) in eqs.iter().zip(&scaled) {
            prop_assert!(equilibrium::phase_distance(a.kx0, b.kx0) < 1e-8);
        }
    }

    #[test]
    fn mode_weights_sum_to_one(model in stable_model()) {
        for m in dynamics::eigenmodes(&model).unwrap() {
            let total: f64 = m.weights.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(m.weights.iter().all(|w| *w >= 0.0));
        }
    }

    #[test]
    fn covariance_solves_lyapunov(model in stable_model()) {
        let s = model.steady_state_covariance().unwrap();
        let a = model.drift;
        let residual = a * s + s * a.transpose() + model.diffusion_matrix();
        let scale = (a.abs() * s.abs()).max();
        prop_assert!(residual.abs().max() <= 1e-9 * scale);
        prop_assert!((s - s.transpose()).abs().max() <= 1e-9 * s.abs().max());
    }

    #[test]
    fn spectra_are_positive(model in stable_model(), x in -3.0..3.0f64) {
        let omega = x * model.omega_m;
        let sc = spectra::semiclassical_point(&model, omega);
        let q = spectra::quantum_point(&model, omega);
        prop_assert!(sc > 0.0);
        prop_assert!(q > 0.0);
        prop_assert!((spectra::semiclassical_point(&model, -omega) / sc - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cooling_rate_is_sideband_difference(d1 in -2.5e6..0.0f64, d2 in -2.5e6..0.0f64) {
        let cfg = presets::cooling_maps(0.5);
        let op = OperatingPoint::new(d1, d2, GasParams::air(1e-6 * PA_PER_MBAR));
        for e in equilibrium::find_equilibria(&cfg, &op).unwrap() {
            let (up, down) = levsim::cooling::sideband_rates(&e, cfg.kappa());
            prop_assert!(up >= 0.0 && down >= 0.0);
            let g = levsim::cooling::cooling_rate(&e, cfg.kappa());
            prop_assert!((g - (up - down)).abs() <= 1e-12 * (up + down).max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn plane_contours_lie_on_level(
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
        level in -1.0..1.0f64,
    ) {
        prop_assume!(a.abs() + b.abs() > 0.1);
        let xs = sweep::linspace(-1.0, 1.0, 17);
        let ys = sweep::linspace(-1.0, 1.0, 23);
        let values: Vec<f64> = xs
            .iter()
            .flat_map(|x| ys.iter().map(move |y| a * x + b * y))
            .collect();
        let lines = sweep::contour(&xs, &ys, &values, level);
        for line in &lines {
            for p in &line.points {
                prop_assert!((a * p[0] + b * p[1] - level).abs() < 1e-12);
            }
        }
        prop_assert_eq!(&lines, &sweep::contour(&xs, &ys, &values, level));
    }
}
