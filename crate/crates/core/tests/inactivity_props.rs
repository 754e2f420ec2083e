mod common;

use common::{arb_dist, builtins, interior, weights_for};
use proptest::prelude::*;
use wmit_core::dist::{default_grid, Dist};
use wmit_core::inactivity::{iwmit_classify, is_decreasing, mit, reconstruct_from_distribution, weighted_past_mean, wmit, wmit_many};
use wmit_core::numerics::Grid;
use wmit_core::weights::{check_bounds, WeightFn};

/// A grid from the lower support end up to `hi`, so that `φ` bounds cover
/// every point entering `μ̃_ψ(t)` for `t <= hi`.
fn covering_grid(d: &Dist, hi: f64) -> Grid {
    let lo = d.support().0;
    let mut pts = Grid::linear(lo, hi, 2048).unwrap().points().to_vec();
    pts.extend(Grid::log_spaced(lo + 1e-9, hi, 512).unwrap().points());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    Grid::new(pts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sandwich_between_phi_bounds(d in arb_dist(), r in 0.5f64..3.0) {
        let ts = interior(&d, 12);
        let hi = *ts.last().unwrap();
        let w = WeightFn::power(r).unwrap();
        let (m, big_m) = check_bounds(&w, &covering_grid(&d, hi)).unwrap();
        let wm = wmit_many(d.as_ref(), &w, &ts).unwrap();
        for (&t, &v) in ts.iter().zip(&wm) {
            let base = mit(d.as_ref(), t).unwrap();
            let slack = 1e-7 * (1.0 + v.abs());
            prop_assert!(m * base <= v + slack, "t = {t}: {} > {v}", m * base);
            prop_assert!(v <= big_m * base + slack, "t = {t}: {v} > {}", big_m * base);
        }
    }

    #[test]
    fn convex_psi_dominates_mit(d in arb_dist(), r in 0.3f64..3.0) {
        let w = WeightFn::power(r).unwrap();
        for t in interior(&d, 10) {
            let v = wmit(d.as_ref(), &w, t).unwrap();
            let psi_mit = w.psi(mit(d.as_ref(), t).unwrap());
            let slack = 1e-7 * (1.0 + v.abs());
            if r >= 1.0 {
                prop_assert!(v + slack >= psi_mit, "r = {r}, t = {t}: {v} < {psi_mit}");
            } else {
                prop_assert!(v <= psi_mit + slack, "r = {r}, t = {t}: {v} > {psi_mit}");
            }
        }
    }

    #[test]
    fn wmit_plus_past_mean_is_psi(d in arb_dist(), r in 0.5f64..3.0) {
        let w = WeightFn::power(r).unwrap();
        for t in interior(&d, 10) {
            let sum = wmit(d.as_ref(), &w, t).unwrap() + weighted_past_mean(d.as_ref(), &w, t).unwrap();
            prop_assert!((sum - w.psi(t)).abs() <= 1e-7 * (1.0 + w.psi(t)));
        }
    }

    #[test]
    fn wmit_is_nonnegative_and_below_psi(d in arb_dist(), r in 0.5f64..3.0) {
        let w = WeightFn::power(r).unwrap();
        for t in interior(&d, 10) {
            let v = wmit(d.as_ref(), &w, t).unwrap();
            prop_assert!(v >= 0.0 && v <= w.psi(t) + 1e-12);
            let m = mit(d.as_ref(), t).unwrap();
            prop_assert!(m <= t + 1e-12);
        }
    }
}

#[test]
fn reconstruction_round_trip_for_builtins() {
    let w = WeightFn::identity();
    for d in builtins() {
        for t in interior(&d, 10) {
            let r = reconstruct_from_distribution(&d, &w, t).unwrap();
            assert!((r.value - r.exact).abs() <= 1e-3, "{d:?} at {t}: {} vs {}", r.value, r.exact);
        }
    }
}

#[test]
fn no_builtin_pair_has_decreasing_wmit() {
    for d in builtins() {
        let grid = default_grid(d.as_ref()).unwrap();
        for w in weights_for(&d) {
            let rep = iwmit_classify(&d, &w, &grid).unwrap();
            assert!(!is_decreasing(&rep.direct), "{d:?} with {}", w.label());
            assert!(rep.consistent, "{d:?} with {}: sufficient condition but not increasing", w.label());
        }
    }
}
