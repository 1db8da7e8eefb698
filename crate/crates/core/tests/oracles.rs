//! Quadrature oracles for the built-in models checked against closed forms
//! and against the unreduced double integrals.

use rand::Rng;
use wicksell_core::{f0_from_v, forward_density, v0_oracle, Quadrature, Seed, TrueModel};

fn models() -> Vec<TrueModel> {
    ["exp:1.2", "holder:0.55", "holder:0.8", "holder:1.5", "tab:0/0,1/1"]
        .iter()
        .map(|s| TrueModel::parse(s).unwrap())
        .collect()
}

/// Upper end used for plotting and grids.
fn span(model: &TrueModel) -> f64 {
    model.support_end().unwrap_or(6.0)
}

/// `∫_x^∞ g0(z) / sqrt(z - x) dz` with `g0` itself from quadrature.
fn v0_double_integral(model: &TrueModel, x: f64) -> f64 {
    let inner = Quadrature::with_tol(1e-11);
    let outer = Quadrature::with_tol(1e-9);
    let g0 = |z: f64| forward_density(model, z, &inner).unwrap();
    let end = model.support_end().unwrap_or(f64::INFINITY);
    let mut edges = vec![x];
    edges.extend(model.knots().into_iter().filter(|k| *k > x && *k < end));
    edges.push(end);
    let mut total = 0.0;
    for (i, w) in edges.windows(2).enumerate() {
        total += if i == 0 {
            outer
                .integrate_sqrt_lower(|z, d| g0(z) / d.sqrt(), w[0], w[1])
                .unwrap()
        } else if w[1].is_infinite() {
            outer
                .integrate_to_infinity(|z| g0(z) / (z - x).sqrt(), w[0])
                .unwrap()
        } else {
            outer.integrate(|z| g0(z) / (z - x).sqrt(), w[0], w[1]).unwrap()
        };
    }
    total
}

#[test]
fn reduced_v0_matches_double_integral() {
    let q = Quadrature::with_tol(1e-11);
    let mut rng = Seed(2024).rng();
    for model in models() {
        for _ in 0..5 {
            let x = 0.05 + (span(&model) - 0.1) * rng.random::<f64>();
            let reduced = v0_oracle(&model, x, &q).unwrap();
            let direct = v0_double_integral(&model, x);
            assert!(
                (reduced - direct).abs() < 1e-6,
                "{}: x = {x}, reduced {reduced}, double {direct}",
                model.spec()
            );
        }
    }
}

#[test]
fn inversion_round_trip_on_fifty_points() {
    let q = Quadrature::with_tol(1e-11);
    for model in models() {
        let top = span(&model);
        let knots = model.knots();
        for i in 0..50 {
            let x = top * (i as f64 + 0.5) / 50.0;
            let f = f0_from_v(|s| v0_oracle(&model, s, &q), x, &knots, model.support_end(), &q)
                .unwrap();
            assert!(
                (f - model.cdf(x)).abs() < 1e-6,
                "{}: x = {x}, recovered {f}, cdf {}",
                model.spec(),
                model.cdf(x)
            );
        }
    }
}

#[test]
fn exponential_round_trip_at_benchmark_points() {
    let q = Quadrature::with_tol(1e-11);
    let model = TrueModel::exponential(1.2).unwrap();
    for x in [0.5, 1.5, 3.0] {
        let f = f0_from_v(|s| v0_oracle(&model, s, &q), x, &[], None, &q).unwrap();
        assert!((f - (1.0 - (-1.2 * x).exp())).abs() < 1e-6);
    }
}

#[test]
fn exponential_density_matches_bessel_closed_form() {
    // (λ/2) e^{-λz/2} K0(λz/2) at λ = 1.2, evaluated independently
    let expected = [
        (0.1, 1.657249157796204),
        (0.5, 0.6100460520054899),
        (1.5, 0.11873386546513648),
        (3.0, 0.014473378954552595),
        (6.0, 0.0002868932004642566),
    ];
    let model = TrueModel::exponential(1.2).unwrap();
    let q = Quadrature::with_tol(1e-12);
    for (z, g) in expected {
        let v = forward_density(&model, z, &q).unwrap();
        assert!((v - g).abs() < 1e-9 * g.max(1.0), "z = {z}: {v} vs {g}");
    }
}

#[test]
fn exponential_v0_matches_erfc_closed_form() {
    // V0(x) = (π/2) sqrt(πλ) erfc(sqrt(λx))
    let rate: f64 = 1.2;
    let model = TrueModel::exponential(rate).unwrap();
    let q = Quadrature::with_tol(1e-12);
    for x in [0.0, 0.3, 1.5, 4.0, 9.0] {
        let exact = std::f64::consts::FRAC_PI_2
            * (std::f64::consts::PI * rate).sqrt()
            * libm::erfc((rate * x).sqrt());
        let v = v0_oracle(&model, x, &q).unwrap();
        assert!((v - exact).abs() < 1e-9, "x = {x}: {v} vs {exact}");
    }
    let v0 = v0_oracle(&model, 0.0, &q).unwrap();
    assert!((v0 - 3.0499).abs() < 1e-4);
}

#[test]
fn uniform_model_closed_forms() {
    let model = TrueModel::parse("tab:0/0,1/1").unwrap();
    let q = Quadrature::with_tol(1e-12);
    for z in [0.01f64, 0.2, 0.5, 0.9, 0.999] {
        // ln(1 + sqrt(1 - z)) - ln sqrt(z)
        let exact = (1.0 + (1.0 - z).sqrt()).ln() - z.sqrt().ln();
        let g = forward_density(&model, z, &q).unwrap();
        assert!((g - exact).abs() < 1e-9, "z = {z}: {g} vs {exact}");
    }
    assert!(forward_density(&model, 1.0 - 1e-10, &q).unwrap() < 1e-4);
    assert_eq!(forward_density(&model, 1.5, &q).unwrap(), 0.0);
    for x in [0.0, 0.25, 0.64] {
        let exact = std::f64::consts::PI * (1.0 - f64::sqrt(x));
        assert!((v0_oracle(&model, x, &q).unwrap() - exact).abs() < 1e-9);
    }
    assert_eq!(v0_oracle(&model, 1.0, &q).unwrap(), 0.0);
}

#[test]
fn observable_density_integrates_to_one() {
    let inner = Quadrature::with_tol(1e-11);
    let outer = Quadrature::with_tol(1e-9);
    for model in models() {
        let g0 = |z: f64| forward_density(&model, z, &inner).unwrap();
        let end = model.support_end().unwrap_or(f64::INFINITY);
        let mut edges = vec![0.0];
        edges.extend(model.knots().into_iter().filter(|k| *k > 0.0 && *k < end));
        edges.push(end);
        let mut total = 0.0;
        for (i, w) in edges.windows(2).enumerate() {
            total += if i == 0 {
                outer.integrate_sqrt_lower(|z, _| g0(z), w[0], w[1]).unwrap()
            } else if w[1].is_infinite() {
                outer.integrate_to_infinity(g0, w[0]).unwrap()
            } else {
                outer.integrate(g0, w[0], w[1]).unwrap()
            };
        }
        assert!((total - 1.0).abs() < 1e-6, "{}: {total}", model.spec());
    }
}

#[test]
fn v0_is_decreasing_and_vanishes_past_support() {
    let q = Quadrature::default();
    for model in models() {
        let top = span(&model);
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let v = v0_oracle(&model, top * i as f64 / 100.0, &q).unwrap();
            assert!(v < prev, "{}", model.spec());
            prev = v;
        }
        if let Some(end) = model.support_end() {
            assert_eq!(v0_oracle(&model, end, &q).unwrap(), 0.0);
            assert_eq!(v0_oracle(&model, end + 1.0, &q).unwrap(), 0.0);
        }
    }
}

#[test]
fn holder_peak_roughness_exponent() {
    // A(δ) = ∫_0^1 (V0(5) - V0(5 + uδ)) du scales like δ^γ
    let q = Quadrature::with_tol(1e-13);
    for gamma in [0.55, 0.8, 1.5] {
        let model = TrueModel::holder(gamma).unwrap();
        let v5 = v0_oracle(&model, 5.0, &q).unwrap();
        let average = |delta: f64| {
            Quadrature::with_tol(1e-14)
                .integrate(|u| v5 - v0_oracle(&model, 5.0 + u * delta, &q).unwrap(), 0.0, 1.0)
                .unwrap()
        };
        let deltas = [1e-1f64, 1e-2, 1e-3];
        let logs: Vec<(f64, f64)> = deltas.iter().map(|d| (d.ln(), average(*d).ln())).collect();
        // least-squares slope
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / 3.0;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / 3.0;
        let slope = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
        assert!((slope - gamma).abs() < 0.05, "gamma {gamma}: slope {slope}");
    }
}

#[test]
fn sampled_observables_match_quadrature_cdf() {
    // Kolmogorov statistic against G0 below the asymptotic 0.999 critical value
    let n = 100_000;
    let q = Quadrature::with_tol(1e-9);
    for (i, model) in models().into_iter().enumerate() {
        let mut z = wicksell_core::sample_observables(&model, n, Seed(31 + i as u64))
            .unwrap()
            .z_values;
        z.sort_by(f64::total_cmp);
        let mut d: f64 = 0.0;
        for (k, &zk) in z.iter().enumerate() {
            let g = model.observable_cdf(zk, &q).unwrap();
            d = d.max(g - k as f64 / n as f64).max((k + 1) as f64 / n as f64 - g);
        }
        let critical = 1.949 / (n as f64).sqrt();
        assert!(d < critical, "{}: D = {d}, critical {critical}", model.spec());
    }
}
