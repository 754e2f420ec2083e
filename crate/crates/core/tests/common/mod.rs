#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use wmit_core::dist::{Dist, Erlang, Exponential, LinExp, Power, Uniform, Weibull};
use wmit_core::weights::WeightFn;

/// One instance of every built-in family with moderate parameters.
pub fn builtins() -> Vec<Dist> {
    vec![
        Arc::new(Uniform::new(2.0).unwrap()),
        Arc::new(Exponential::new(1.5).unwrap()),
        Arc::new(Weibull::new(2.0, 1.0).unwrap()),
        Arc::new(Weibull::new(0.8, 1.0).unwrap()),
        Arc::new(Power::new(2.0, 1.0).unwrap()),
        Arc::new(Erlang::new(2, 1.0).unwrap()),
        Arc::new(LinExp),
    ]
}

pub fn weights_for(d: &Dist) -> Vec<WeightFn> {
    vec![
        WeightFn::identity(),
        WeightFn::power(2.0).unwrap(),
        WeightFn::half_square(),
        WeightFn::cdf_of(d.clone()).unwrap(),
    ]
}

/// A random law from the continuous built-in families.
pub fn arb_dist() -> impl Strategy<Value = Dist> {
    prop_oneof![
        (0.5f64..5.0).prop_map(|b| Arc::new(Uniform::new(b).unwrap()) as Dist),
        (0.3f64..3.0).prop_map(|r| Arc::new(Exponential::new(r).unwrap()) as Dist),
        (0.7f64..3.0, 0.5f64..2.0).prop_map(|(k, s)| Arc::new(Weibull::new(k, s).unwrap()) as Dist),
        (0.5f64..4.0, 0.5f64..3.0).prop_map(|(a, b)| Arc::new(Power::new(a, b).unwrap()) as Dist),
        (1u32..4, 0.5f64..3.0).prop_map(|(k, r)| Arc::new(Erlang::new(k, r).unwrap()) as Dist),
    ]
}

pub fn arb_weight() -> impl Strategy<Value = WeightFn> {
    prop_oneof![
        Just(WeightFn::identity()),
        Just(WeightFn::half_square()),
        (0.5f64..3.0).prop_map(|r| WeightFn::power(r).unwrap()),
    ]
}

/// `n` points spread over the central quantile range of `d`.
pub fn interior(d: &Dist, n: usize) -> Vec<f64> {
    (1..=n).map(|i| d.quantile(i as f64 / (n + 1) as f64).unwrap()).collect()
}
