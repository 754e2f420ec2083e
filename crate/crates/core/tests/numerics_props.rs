use proptest::prelude::*;
use wmit_core::numerics::{integrate, invert_cdf, log_poisson_weight, monotone_on_grid, Grid, MonotoneKind};

fn mirrored(k: MonotoneKind) -> MonotoneKind {
    match k {
        MonotoneKind::Increasing => MonotoneKind::Decreasing,
        MonotoneKind::Decreasing => MonotoneKind::Increasing,
        other => other,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integration_is_linear(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, p in 0.0f64..3.0, a in 0.2f64..3.0, c in 0.1f64..5.0, len in 0.5f64..10.0) {
        let tol = 1e-8;
        let f = |x: f64| x.powf(p) * (-a * x).exp();
        let g = |x: f64| (c * x).sin() + 1.0;
        let lhs = integrate(|x| alpha * f(x) + beta * g(x), 0.0, len, tol).unwrap().value;
        let rf = integrate(f, 0.0, len, tol).unwrap().value;
        let rg = integrate(g, 0.0, len, tol).unwrap().value;
        prop_assert!((lhs - alpha * rf - beta * rg).abs() <= 3.0 * tol);
    }

    #[test]
    fn inversion_round_trips(rate in 0.2f64..5.0, shape in 0.5f64..4.0) {
        let tol = 1e-10;
        let cdf = |x: f64| if x <= 0.0 { 0.0 } else { -(-(rate * x).powf(shape)).exp_m1() };
        for i in 1..=99 {
            let p = i as f64 / 100.0;
            let x = invert_cdf(cdf, p, (0.0, 100.0 / rate), tol).unwrap();
            prop_assert!((cdf(x) - p).abs() <= tol, "p = {p}: F(x) = {}", cdf(x));
        }
    }

    #[test]
    fn monotone_verdicts_mirror(a in -2.0f64..2.0, b in 0.0f64..1.0, c in 0.5f64..6.0) {
        let grid = Grid::linear(0.0, 5.0, 200).unwrap();
        let f = |x: f64| a * x + b * (c * x).sin();
        let band = 1e-7 * (1.0 + 10.0 + 1.0);
        let up = monotone_on_grid(f, &grid, band).unwrap();
        let down = monotone_on_grid(|x| -f(x), &grid, band).unwrap();
        prop_assert_eq!(down.kind, mirrored(up.kind));
        prop_assert_eq!(up.witness.is_some(), up.kind == MonotoneKind::NonMonotone);
    }

    #[test]
    fn poisson_weight_matches_power(k in 0u32..=20, l in 0.01f64..50.0) {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        let lhs = log_poisson_weight(k, l).unwrap().exp() * fact;
        let rhs = l.powi(k as i32);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs, "{lhs} vs {rhs}");
    }
}
