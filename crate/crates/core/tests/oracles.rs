use grunwald::norms::log_grid;
use grunwald::oracles::{
    exact_solution_example1, rl_derivative_power, spectral_fractional_derivative, stable_density,
    PowerData, StableDensityTable,
};
use grunwald::quadrature::integrate;
use proptest::prelude::*;
use statrs::function::erf::erf;

#[test]
fn oracles_do_not_use_the_schemes() {
    let src = include_str!("../src/oracles.rs");
    for forbidden in [
        "crate::grunwald",
        "crate::pde",
        "crate::symbols",
        "crate::norms",
        "grunwald_weights",
    ] {
        assert!(!src.contains(forbidden), "oracles reference {forbidden}");
    }
}

#[test]
fn example1_oracle_matches_direct_quadrature() {
    // u(x) = int_0^x g(s) (x - s)^beta ds with the density evaluated pointwise;
    // the piecewise-linear density converges at second order in fine_n
    let xs = [0.5, 0.75, 1.0];
    for beta in [0.7, 1.7] {
        let data = PowerData::power(beta);
        let coarse = exact_solution_example1(&data, 0.8, 1.0, &xs, 8192).unwrap();
        let fine = exact_solution_example1(&data, 0.8, 1.0, &xs, 16384).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            let direct = integrate(
                &|s: f64| stable_density(0.8, 1.0, s).unwrap() * (x - s).powf(beta),
                0.0,
                x,
                1e-12,
                1e-16,
            )
            .unwrap();
            let (ec, ef) = ((coarse[i] - direct).abs(), (fine[i] - direct).abs());
            assert!(
                ef < 5e-7 * direct,
                "beta {beta} x {x}: {} vs {direct}",
                fine[i]
            );
            assert!(ec / ef > 3.5, "beta {beta} x {x}: ratio {}", ec / ef);
        }
    }
}

#[test]
fn spectral_first_derivative_convention() {
    let h = 1.0 / 64.0;
    let n = 16 * 64;
    let x: Vec<f64> = (0..n).map(|i| -8.0 + i as f64 * h).collect();
    let f: Vec<f64> = x.iter().map(|x| (-x * x).exp()).collect();
    let d = spectral_fractional_derivative(&f, h, 1.0, 4).unwrap();
    for (xi, v) in x.iter().zip(&d.values) {
        assert!((v + 2.0 * xi * (-xi * xi).exp()).abs() < 1e-10);
    }
}

#[test]
fn density_table_mass() {
    let x: Vec<f64> = (1..=4000).map(|i| i as f64 * 0.005).collect();
    let t = StableDensityTable::new(0.5, 1.0, x).unwrap();
    // alpha = 1/2 is the Levy law, whose mass beyond x is erf(1/(2 sqrt(x)))
    let tail = erf(1.0 / (2.0 * 20f64.sqrt()));
    assert!((t.trapezoid_mass() + tail - 1.0).abs() < 1e-5);
    assert!(t.values.iter().all(|v| *v >= 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_is_nonnegative_and_self_similar(alpha in 0.2f64..0.95, t in 0.1f64..5.0, x in 1e-3f64..50.0) {
        let v = stable_density(alpha, t, x).unwrap();
        prop_assert!(v >= 0.0 && v.is_finite());
        // g(t, x) = t^(-1/alpha) g(1, x t^(-1/alpha))
        let s = t.powf(-1.0 / alpha);
        let w = s * stable_density(alpha, 1.0, x * s).unwrap();
        prop_assert!((v - w).abs() <= 1e-12 * v.abs().max(1e-300));
    }

    #[test]
    fn power_derivative_rule(mu in 0.5f64..4.0, alpha in 0.1f64..1.9, x in 0.1f64..3.0) {
        // D^a D^b x^mu = D^(a+b) x^mu when no term is annihilated
        let b = 0.1;
        let once = rl_derivative_power(mu, alpha + b, x);
        let inner = rl_derivative_power(mu, b, 1.0);
        let twice = inner * rl_derivative_power(mu - b, alpha, x);
        prop_assert!((once - twice).abs() <= 1e-10 * once.abs().max(1e-10));
    }
}

#[test]
fn log_grid_endpoints() {
    let g = log_grid(0.05, 20.0, 5);
    assert!((g[0] - 0.05).abs() < 1e-15 && (g[4] - 20.0).abs() < 1e-12);
}
