//! Reproducible end-to-end checks of the closed-form identities, Monte Carlo
//! identities, order implications, bounds and applied models.
//!
//! Each criterion returns a pass flag, a one-line detail and its wall time.
//! Criteria with a time budget fail when they exceed it.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::Beta;
use statrs::statistics::Distribution as _;

use crate::applied::{
    excess_lifetime_cdf, poisson_shock_precondition, renewal_function, shock_lifetime_cdf, RenewalModel, ShockModel,
};
use crate::dist::{DiscreteLaw, Dist, Erlang, Exponential, OrderStatistic, Power, Uniform, Weibull};
use crate::error::Result;
use crate::inactivity::auc;
use crate::infomeasures::{
    bound_suite, cumulative_entropy, cumulative_entropy_via_mit, gce, gce_recurrence_check, variance_of_weighted,
    varentropy, varentropy_monte_carlo,
};
use crate::orders::{check_order, implication_suite, OrderKind, VerdictKind};
use crate::records::{cov_identity_check, rit_identity_check};
use crate::spread::{quantile_gce, quantile_variance};
use crate::weights::WeightFn;

const SEED: u64 = 20_240_517;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_secs: f64,
}

type Check = fn() -> Result<(bool, String)>;

const CRITERIA: [(u32, &str, Check, Option<u64>); 12] = [
    (1, "uniform suite", uniform_suite, Some(5)),
    (2, "parallel system", parallel_system, None),
    (3, "order statistics", order_statistics, None),
    (4, "varentropy", varentropy_suite, Some(30)),
    (5, "cumulative entropy of exp(1)", exp_cumulative_entropy, None),
    (6, "variance identity matrix", variance_matrix, None),
    (7, "record identities", record_identities, Some(60)),
    (8, "recurrences", recurrences, None),
    (9, "order implications", order_implications, Some(120)),
    (10, "bound suite", bounds, None),
    (11, "applied layer", applied_layer, None),
    (12, "auc routes", auc_routes, None),
];

/// Number of criteria.
pub fn count() -> usize {
    CRITERIA.len()
}

/// Runs criterion `id` (1-based).
pub fn run_one(id: u32) -> Option<CriterionOutcome> {
    let &(id, name, check, budget) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = budget {
        if elapsed > Duration::from_secs(limit) {
            passed = false;
            detail = format!("{detail}; over the {limit} s budget");
        }
    }
    Some(CriterionOutcome {
        id,
        name,
        passed,
        detail,
        elapsed_secs: elapsed.as_secs_f64(),
    })
}

pub fn run_all() -> Vec<CriterionOutcome> {
    CRITERIA.iter().filter_map(|c| run_one(c.0)).collect()
}

fn dist<D: crate::dist::Distribution + 'static>(d: Result<D>) -> Result<Dist> {
    Ok(Arc::new(d?))
}

/// Tracks the worst deviation seen and whether any exceeded its tolerance.
#[derive(Default)]
struct Worst {
    value: f64,
    label: String,
    failed: Vec<String>,
}

impl Worst {
    fn add(&mut self, label: impl Into<String>, dev: f64, tol: f64) {
        let label = label.into();
        if !(dev <= tol) {
            self.failed.push(format!("{label}: {dev:.3e} > {tol:.0e}"));
        }
        if !(dev <= self.value) {
            self.value = dev;
            self.label = label;
        }
    }

    fn finish(self, checks: usize) -> (bool, String) {
        if self.failed.is_empty() {
            (true, format!("{checks} checks, worst {:.2e} ({})", self.value, self.label))
        } else {
            (false, format!("{} of {checks} failed: {}", self.failed.len(), self.failed.join("; ")))
        }
    }
}

fn uniform_suite() -> Result<(bool, String)> {
    let id = WeightFn::identity();
    let mut w = Worst::default();
    let mut k = 0;
    for b in [1.0, 2.0, 5.0] {
        let d = Uniform::new(b)?;
        let var = b * b / 12.0;
        w.add(format!("b={b} var wmit"), (variance_of_weighted(&d, &id)?.via_wmit - var).abs(), 1e-6);
        w.add(format!("b={b} var quantile"), (quantile_variance(&d, &id)?.value - var).abs(), 1e-6);
        k += 2;
        for n in 1..=5u32 {
            let ce = b / 2f64.powi(n as i32 + 1);
            w.add(format!("b={b} CE_{n} quadrature"), (gce(&d, n)?.value - ce).abs(), 1e-6);
            w.add(format!("b={b} CE_{n} quantile"), (quantile_gce(&d, &id, n)?.value - ce).abs(), 1e-6);
            k += 2;
        }
    }
    Ok(w.finish(k))
}

fn parallel_system() -> Result<(bool, String)> {
    let mut w = Worst::default();
    let mut k = 0;
    for base in [dist(Uniform::new(1.0))?, dist(Exponential::new(1.0))?] {
        let weight = WeightFn::cdf_of(base.clone())?;
        for m in 1..=5u32 {
            let x = OrderStatistic::maximum(base.clone(), m)?;
            let mf = m as f64;
            let target = mf / ((mf + 1.0).powi(2) * (mf + 2.0));
            let got = variance_of_weighted(&x, &weight)?.via_wmit;
            w.add(format!("{} m={m}", base.name()), (got - target).abs(), 1e-6);
            k += 1;
        }
    }
    Ok(w.finish(k))
}

fn order_statistics() -> Result<(bool, String)> {
    let n = 5u32;
    let mut w = Worst::default();
    let mut k = 0;
    for base in [dist(Uniform::new(1.0))?, dist(Exponential::new(1.0))?] {
        let weight = WeightFn::cdf_of(base.clone())?;
        for i in 1..=n {
            // F(X_{i:n}) ~ Beta(i, n - i + 1)
            let oracle = Beta::new(i as f64, (n - i + 1) as f64)
                .ok()
                .and_then(|b| b.variance())
                .unwrap_or(f64::NAN);
            let x = OrderStatistic::new(base.clone(), i, n)?;
            let v = variance_of_weighted(&x, &weight)?;
            w.add(format!("{} i={i} wmit", base.name()), (v.via_wmit - oracle).abs(), 1e-6);
            w.add(format!("{} i={i} direct", base.name()), (v.direct - oracle).abs(), 1e-6);
            k += 2;
        }
    }
    Ok(w.finish(k))
}

fn varentropy_suite() -> Result<(bool, String)> {
    let mut w = Worst::default();
    let mut k = 0;
    for rate in [0.5, 1.0, 3.0] {
        let d = Exponential::new(rate)?;
        let v = varentropy(&d)?;
        for (route, val) in [("direct", v.direct), ("residual", v.via_residual), ("past", v.via_past)] {
            w.add(format!("exp({rate}) {route}"), (val - 1.0).abs(), 1e-4);
            k += 1;
        }
    }
    let mc = varentropy_monte_carlo(&Exponential::new(1.0)?, 1_000_000, SEED)?;
    w.add("exp(1) monte carlo", (mc.estimate - 1.0).abs(), 0.01);
    k += 1;
    for b in [1.0, 3.0] {
        let v = varentropy(&Uniform::new(b)?)?;
        for (route, val) in [("direct", v.direct), ("residual", v.via_residual), ("past", v.via_past)] {
            w.add(format!("uniform({b}) {route}"), val.abs(), 1e-8);
            k += 1;
        }
    }
    Ok(w.finish(k))
}

fn exp_cumulative_entropy() -> Result<(bool, String)> {
    // Σ_{k≥2} 1/k²; the tail beyond K lies in (1/(K+1), 1/K) and is taken as 1/K.
    let terms = 2_000_000u64;
    let series: f64 = (2..=terms).rev().map(|k| 1.0 / (k * k) as f64).sum::<f64>() + 1.0 / terms as f64;
    let closed = PI * PI / 6.0 - 1.0;
    let d = Exponential::new(1.0)?;
    let mut w = Worst::default();
    w.add("series vs closed form", (series - closed).abs(), 1e-6);
    w.add("-int F log F", (cumulative_entropy(&d)?.value - closed).abs(), 1e-6);
    w.add("E[mit(X)]", (cumulative_entropy_via_mit(&d)? - closed).abs(), 1e-6);
    Ok(w.finish(3))
}

fn matrix_dists() -> Result<Vec<Dist>> {
    Ok(vec![
        dist(Uniform::new(1.0))?,
        dist(Exponential::new(1.0))?,
        dist(Weibull::new(2.0, 1.0))?,
        dist(Power::new(2.0, 1.0))?,
        dist(Erlang::new(2, 1.0))?,
    ])
}

fn matrix_weights(d: &Dist) -> Result<Vec<WeightFn>> {
    Ok(vec![WeightFn::identity(), WeightFn::power(2.0)?, WeightFn::cdf_of(d.clone())?])
}

fn variance_matrix() -> Result<(bool, String)> {
    let mut w = Worst::default();
    let mut k = 0;
    for d in matrix_dists()? {
        for weight in matrix_weights(&d)? {
            let v = variance_of_weighted(d.as_ref(), &weight)?;
            let rel = (v.direct - v.via_wmit).abs() / v.direct.abs();
            w.add(format!("{} x {}", d.name(), weight.label()), rel, 1e-4);
            k += 1;
        }
    }
    Ok(w.finish(k))
}

fn record_identities() -> Result<(bool, String)> {
    let count = 100_000;
    let mut failed = Vec::new();
    let mut worst: (f64, String) = (0.0, String::new());
    let mut k = 0;
    let mut seed = SEED;
    for base in [dist(Uniform::new(1.0))?, dist(Exponential::new(1.0))?] {
        for weight in [WeightFn::identity(), WeightFn::half_square()] {
            for n in 1..=2u32 {
                seed += 1;
                let rit = rit_identity_check(&base, &weight, n, count, seed)?;
                let cov = cov_identity_check(&base, &weight, n, count, seed)?.covariance_form;
                for c in [rit, cov] {
                    let label = format!("{} {} n={n} {}", base.name(), weight.label(), c.name);
                    if !c.within(3.0) {
                        failed.push(format!("{label}: z = {:.2}", c.z));
                    }
                    if c.z.abs() > worst.0 || !c.z.is_finite() {
                        worst = (c.z.abs(), label);
                    }
                    k += 1;
                }
            }
        }
    }
    Ok(if failed.is_empty() {
        (true, format!("{k} checks, worst |z| = {:.2} ({})", worst.0, worst.1))
    } else {
        (false, format!("{} of {k} beyond 3 SE: {}", failed.len(), failed.join("; ")))
    })
}

fn recurrences() -> Result<(bool, String)> {
    let mut w = Worst::default();
    let mut k = 0;
    for base in [dist(Uniform::new(1.0))?, dist(Exponential::new(1.0))?] {
        for weight in [WeightFn::identity(), WeightFn::half_square()] {
            let r = gce_recurrence_check(&base, &weight, 2)?;
            let label = format!("{} {}", base.name(), weight.label());
            w.add(format!("{label} (i)"), r.residual_i, 1e-5);
            w.add(format!("{label} (ii)"), r.residual_ii, 1e-5);
            k += 2;
        }
    }
    Ok(w.finish(k))
}

fn random_pair(rng: &mut ChaCha8Rng) -> Result<(Dist, Dist, &'static str)> {
    let family = rng.random_range(0..3);
    let draw = |rng: &mut ChaCha8Rng| -> Result<Dist> {
        match family {
            0 => dist(Exponential::new(rng.random_range(0.5..3.0))),
            1 => dist(Weibull::new(rng.random_range(0.5..3.0), rng.random_range(0.5..2.0))),
            _ => dist(Power::new(rng.random_range(0.5..4.0), rng.random_range(0.5..2.0))),
        }
    };
    let x = draw(rng)?;
    let y = draw(rng)?;
    Ok((x, y, ["exponential", "weibull", "power"][family]))
}

/// Implications covered by the criterion.
const NAMED_IMPLICATIONS: [&str; 3] = ["rhr => wmit", "wmit + convex => mit", "lir => var, ce_n"];

fn order_implications() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut violations = Vec::new();
    let mut other = Vec::new();
    let mut fired = [0usize; 3];
    for i in 0..50 {
        let (x, y, family) = random_pair(&mut rng)?;
        let w = if i % 2 == 0 { WeightFn::identity() } else { WeightFn::power(2.0)? };
        let rep = implication_suite(&x, &y, &w, None)?;
        for imp in &rep.implications {
            if let Some(j) = NAMED_IMPLICATIONS.iter().position(|n| *n == imp.name) {
                if imp.antecedent == VerdictKind::Holds {
                    fired[j] += 1;
                }
                if imp.violation {
                    violations.push(format!("pair {i} ({family}) {}: {}", imp.name, imp.detail));
                }
            } else if imp.violation {
                other.push(format!("pair {i} {}", imp.name));
            }
        }
    }
    let fired = format!(
        "antecedent held: {}",
        NAMED_IMPLICATIONS
            .iter()
            .zip(fired)
            .map(|(n, c)| format!("{n} {c}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let extra = if other.is_empty() {
        String::new()
    } else {
        format!("; other suite flags: {}", other.join(", "))
    };
    Ok(if violations.is_empty() {
        (true, format!("50 pairs, 0 violations; {fired}{extra}"))
    } else {
        (false, format!("{} violations: {}{extra}", violations.len(), violations.join("; ")))
    })
}

fn bounds() -> Result<(bool, String)> {
    const NAMES: [&str; 3] = ["wgce-upper", "wgce-lower", "sigma-vs-ce"];
    let mut failed = Vec::new();
    let mut evaluated = 0;
    let mut skipped = 0;
    let mut min_slack = f64::INFINITY;
    for d in matrix_dists()? {
        for weight in matrix_weights(&d)? {
            for n in 1..=3u32 {
                let rep = bound_suite(&d, &weight, n)?;
                for name in NAMES {
                    let Some(c) = rep.get(name) else { continue };
                    match c.holds {
                        None => skipped += 1,
                        Some(ok) => {
                            evaluated += 1;
                            let slack = match c.relation {
                                crate::infomeasures::Relation::AtMost => c.rhs - c.lhs,
                                crate::infomeasures::Relation::AtLeast => c.lhs - c.rhs,
                            };
                            min_slack = min_slack.min(slack);
                            // non-negative slack is required, not just agreement within the margin
                            if !ok || slack < 0.0 {
                                failed.push(format!("{} x {} n={n} {name}: slack {slack:.3e}", d.name(), weight.label()));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(if failed.is_empty() {
        (
            true,
            format!("{evaluated} bounds hold, min slack {min_slack:.3e}; {skipped} not applicable (hypotheses unmet)"),
        )
    } else {
        (false, format!("{} of {evaluated} fail: {}", failed.len(), failed.join("; ")))
    })
}

fn applied_layer() -> Result<(bool, String)> {
    let mut w = Worst::default();
    let mut k = 0;

    let exp1 = dist(Exponential::new(1.0))?;
    let poisson = RenewalModel::new(exp1.clone(), 20.0, None)?;
    for t in [1.0, 5.0, 20.0] {
        w.add(format!("M({t})"), (renewal_function(&poisson, t)? - t).abs(), 1e-3);
        k += 1;
    }
    for t in [1.0, 5.0] {
        for x in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let got = excess_lifetime_cdf(&poisson, t, x)?;
            w.add(format!("gamma({t}) cdf at {x}"), (got + (-x as f64).exp_m1()).abs(), 1e-3);
            k += 1;
        }
    }

    let geometric = DiscreteLaw::geometric(0.5)?;
    let shock = ShockModel::from_interarrival(exp1.clone(), geometric.clone())?;
    w.add("geometric shock F_T(1)", (shock_lifetime_cdf(&shock, 1.0) + (-0.5f64).exp_m1()).abs(), 1e-3);
    k += 1;

    let rate = 2.0;
    let erlang = RenewalModel::new(dist(Erlang::new(2, rate))?, 20.0, None)?;
    for t in [1.0, 5.0, 20.0] {
        let closed = rate * t / 2.0 - 0.25 + 0.25 * (-2.0 * rate * t).exp();
        w.add(format!("Erlang-2 M({t})"), (renewal_function(&erlang, t)? - closed).abs(), 1e-3);
        k += 1;
    }

    let (ok, mut detail) = w.finish(k);
    let point = DiscreteLaw::point(1);
    let single = ShockModel::from_interarrival(exp1.clone(), point.clone())?;
    let (t1, t2): (Dist, Dist) = (Arc::new(single), Arc::new(shock));
    let mut agree = true;
    for r in [1u32, 2] {
        let pre = poisson_shock_precondition(&point, &geometric, r, 60)?;
        let pre_holds = pre.verdict.is_weakly_increasing();
        let direct = check_order(OrderKind::Wmit, &t1, &t2, Some(&WeightFn::power(r as f64)?), None)?;
        let same = pre_holds == direct.holds();
        agree &= same;
        detail.push_str(&format!(
            "; r={r}: precondition {:?}, direct {:?}{}",
            pre.verdict.kind,
            direct.kind,
            if same { "" } else { " (disagree)" }
        ));
    }
    Ok((ok && agree, detail))
}

fn auc_routes() -> Result<(bool, String)> {
    let mut w = Worst::default();
    let x = dist(Exponential::new(1.0))?;
    let y = dist(Exponential::new(2.0))?;
    let r = auc(&x, &y)?;
    for (route, v) in [("wmrl", r.via_wmrl), ("wmit limit", r.via_wmit_limit), ("direct", r.direct)] {
        w.add(format!("exp(1) vs exp(2) {route}"), (v - 2.0 / 3.0).abs(), 1e-6);
    }
    let same = auc(&x, &x)?;
    for (route, v) in [("wmrl", same.via_wmrl), ("wmit limit", same.via_wmit_limit), ("direct", same.direct)] {
        w.add(format!("identical pair {route}"), (v - 0.5).abs(), 1e-9);
    }
    Ok(w.finish(6))
}
