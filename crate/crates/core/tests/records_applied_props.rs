mod common;

use std::sync::Arc;

use common::{arb_dist, interior};
use proptest::prelude::*;
use wmit_core::applied::{excess_lifetime_cdf, renewal_function, shock_lifetime_cdf, RenewalModel, ShockModel};
use wmit_core::dist::{mean, DiscreteLaw, Dist, Distribution, Erlang, Exponential, Uniform, Weibull};
use wmit_core::numerics::{integrate, ks_critical_value, ks_statistic};
use wmit_core::records::{record_cdf, sample_records, telescoping_check, RecordModel};
use wmit_core::weights::WeightFn;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn record_cdf_matches_poisson_sum(d in arb_dist(), n in 0u32..6) {
        let model = RecordModel::new(d.clone(), n).unwrap();
        for x in interior(&d, 15) {
            let f = d.cdf(x);
            let t = -f.ln();
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..=n {
                term *= t / k as f64;
                sum += term;
            }
            prop_assert!((record_cdf(&model, x) - f * sum).abs() <= 1e-10);
            prop_assert!((0.0..=1.0).contains(&record_cdf(&model, x)));
        }
    }

    #[test]
    fn record_density_is_cdf_derivative(d in arb_dist(), n in 1u32..=3) {
        let model = RecordModel::new(d.clone(), n).unwrap();
        for x in interior(&d, 9) {
            let h = 1e-5 * (1.0 + x);
            let num = (model.cdf(x + h) - model.cdf(x - h)) / (2.0 * h);
            let pdf = model.pdf(x).unwrap();
            prop_assert!((num - pdf).abs() <= 1e-4 * (1.0 + pdf), "x = {x}: {num} vs {pdf}");
        }
    }

    #[test]
    fn record_density_integrates_to_one(d in arb_dist(), n in 0u32..6) {
        let model = RecordModel::new(d.clone(), n).unwrap();
        let (lo, hi) = model.support();
        let r = integrate(|x| model.pdf(x).unwrap(), lo, hi, 1e-10).unwrap();
        prop_assert!((r.value - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn shock_lifetime_cdf_is_a_cdf(rate in 0.3f64..3.0, q in 0.05f64..1.0) {
        let d: Dist = Arc::new(Exponential::new(rate).unwrap());
        let m = ShockModel::from_interarrival(d, DiscreteLaw::geometric(q).unwrap()).unwrap();
        let xs: Vec<f64> = (0..=400).map(|i| i as f64 * 0.05 / rate).collect();
        let vals: Vec<f64> = xs.iter().map(|&t| shock_lifetime_cdf(&m, t)).collect();
        prop_assert_eq!(vals[0], 0.0);
        prop_assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        prop_assert!(shock_lifetime_cdf(&m, 1e4 / (rate * q)) > 1.0 - 1e-9);
    }
}

#[test]
fn record_sampling_passes_ks() {
    let bases: Vec<Dist> = vec![Arc::new(Uniform::new(1.0).unwrap()), Arc::new(Exponential::new(1.0).unwrap())];
    let crit = ks_critical_value(100_000, 1e-3);
    for base in &bases {
        for n in 1..=2 {
            let model = RecordModel::new(base.clone(), n).unwrap();
            let xs = sample_records(base, n, 100_000, 41 + n as u64).unwrap();
            let ks = ks_statistic(&xs, |x| model.cdf(x));
            assert!(ks <= crit, "{base:?} n = {n}: {ks} > {crit}");
        }
    }
}

#[test]
fn telescoping_within_three_se() {
    let bases: Vec<Dist> = vec![Arc::new(Uniform::new(1.0).unwrap()), Arc::new(Exponential::new(1.0).unwrap())];
    for base in &bases {
        for w in [WeightFn::identity(), WeightFn::half_square()] {
            for m in 1..=2 {
                let c = telescoping_check(base, &w, m, 100_000, 5).unwrap();
                assert!(c.within(3.0), "{base:?} {} m = {m}: {c:?}", w.label());
            }
        }
    }
}

#[test]
fn renewal_long_run_rate() {
    for d in [
        Arc::new(Weibull::new(1.5, 1.0).unwrap()) as Dist,
        Arc::new(Erlang::new(3, 2.0).unwrap()) as Dist,
        Arc::new(Uniform::new(2.0).unwrap()) as Dist,
    ] {
        let mu = mean(d.as_ref()).unwrap();
        let t = 50.0 * mu;
        let m = RenewalModel::new(d.clone(), t, None).unwrap();
        let rate = renewal_function(&m, t).unwrap() / t;
        assert!((rate - 1.0 / mu).abs() <= 0.05 / mu, "{d:?}: {rate} vs {}", 1.0 / mu);
    }
}

#[test]
fn excess_lifetime_approaches_stationary_law() {
    let d: Dist = Arc::new(Erlang::new(2, 1.0).unwrap());
    let mu = 2.0;
    let t = 50.0 * mu;
    let m = RenewalModel::new(d.clone(), t, None).unwrap();
    for x in [0.25, 1.0, 2.0, 4.0] {
        let stationary = integrate(|u| d.survival(u) / mu, 0.0, x, 1e-12).unwrap().value;
        let got = excess_lifetime_cdf(&m, t, x).unwrap();
        assert!((got - stationary).abs() <= 1e-2, "x = {x}: {got} vs {stationary}");
    }
}
