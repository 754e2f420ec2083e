use serde_json::{json, Value};
use wmit_core::acceptance;
use wmit_core::applied::{
    simulate_renewal, simulate_shock, ExcessLifetime, RenewalModel, ShockModel,
};
use wmit_core::dist::{default_grid, describe, Dist, Distribution};
use wmit_core::inactivity::{
    auc, dynamic_cumulative_entropy, iwmit_classify, mit, reconstruct_from_distribution, wmit, wmit_derivative_check,
    wmrl,
};
use wmit_core::infomeasures::{
    bound_suite, c_n, cumulative_entropy, cumulative_entropy_via_mit, differential_entropy, gce, gce_recurrence_check,
    past_entropy, residual_entropy, variance_of_weighted, varentropy, weighted_cumulative_entropy, wgce,
    MeasureReport,
};
use wmit_core::numerics::{ks_critical_value, ks_statistic, Grid};
use wmit_core::orders::{check_order, implication_suite, pair_grid, OrderKind};
use wmit_core::records::{cov_identity_check, rit_identity_check, telescoping_check, McCheck};
use wmit_core::spread::{left_spread, quantile_gce, quantile_variance, right_spread, value_at_risk};

use crate::config::{parse_counts, Command, ConfigError, Validated};
use crate::report::{Scalar, Status};

/// Significance level of the KS checks in `simulate`.
const KS_ALPHA: f64 = 1e-3;
/// A Monte Carlo identity is flagged once its estimate is this many
/// standard errors from the target.
const Z_FLAG: f64 = 4.0;

pub enum Failure {
    Config(ConfigError),
    Numerical(wmit_core::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<wmit_core::Error> for Failure {
    fn from(e: wmit_core::Error) -> Self {
        use wmit_core::Error as E;
        match e {
            E::Config(_) | E::InvalidArgument(_) | E::InvalidParameter { .. } | E::OrderGuard { .. } | E::Io(_)
            | E::TooFewSamples { .. } | E::NegativeSample { .. } | E::Unsupported(_) => {
                Failure::Config(ConfigError::new("input", e.to_string()))
            }
            other => Failure::Numerical(other),
        }
    }
}

/// What a command produced so far; kept on numerical failure as a partial report.
pub struct Outcome {
    pub results: Vec<Scalar>,
    pub details: Value,
    pub grid: String,
    pub status: Status,
    /// Route-agreement checks; merged into the details.
    pub checks: Vec<Value>,
}

impl Outcome {
    fn new(grid: impl Into<String>) -> Self {
        Outcome {
            results: Vec::new(),
            details: Value::Null,
            grid: grid.into(),
            status: Status::Ok,
            checks: Vec::new(),
        }
    }

    fn push(&mut self, s: Scalar) {
        self.results.push(s);
    }

    fn measure(&mut self, name: &str, r: MeasureReport) {
        let mut s = Scalar::new(name, r.value, r.route.label()).err(r.error_estimate);
        if let (Some(n), true) = (r.n, name.contains("gce")) {
            s.name = format!("{name}[n={n}]");
        }
        self.push(s);
    }

    fn flag(&mut self) {
        self.status = Status::Violation;
    }

    /// Flags a violation when two routes to the same identity differ by more
    /// than `tol (1 + |a|)`.
    fn agree(&mut self, name: &str, a: f64, b: f64, tol: f64) {
        let gap = (a - b).abs();
        let ok = gap <= tol * (1.0 + a.abs());
        self.checks.push(json!({ "name": name, "gap": gap, "tolerance": tol, "agrees": ok }));
        if !ok {
            self.flag();
        }
    }
}

const NO_GRID: &str = "none (adaptive quadrature over the support)";

pub fn run(v: &Validated, out: &mut Outcome) -> Result<(), Failure> {
    match v.config.command {
        Command::Measure => measure(v, out),
        Command::OrderCheck => order_check(v, out),
        Command::Iwmit => iwmit(v, out),
        Command::Reconstruct => reconstruct(v, out),
        Command::Simulate => simulate(v, out),
        Command::Acceptance => acceptance_suite(out),
    }
}

pub fn new_outcome(v: &Validated) -> Outcome {
    Outcome::new(v.grid.as_ref().map(|g| g.label().to_string()).unwrap_or_else(|| NO_GRID.to_string()))
}

/// Quantities accepted by `measure`.
pub const QUANTITIES: &[&str] = &[
    "cumulative-entropy",
    "gce",
    "wgce",
    "weighted-cumulative-entropy",
    "differential-entropy",
    "varentropy",
    "variance",
    "quantile-variance",
    "quantile-gce",
    "mit",
    "wmit",
    "wmrl",
    "dynamic-cumulative-entropy",
    "past-entropy",
    "residual-entropy",
    "value-at-risk",
    "left-spread",
    "right-spread",
    "c-n",
    "auc",
    "bounds",
    "recurrence",
];

fn measure(v: &Validated, out: &mut Outcome) -> Result<(), Failure> {
    let q = v
        .config
        .quantity
        .as_deref()
        .ok_or_else(|| ConfigError::new("quantity", format!("one of: {}", QUANTITIES.join(", "))))?;
    if q == "c-n" {
        let n = v.n()?;
        out.push(Scalar::new(format!("c-n[n={n}]"), c_n(n)?, "quadrature"));
        return Ok(());
    }
    let d = v.dist(0, "dists")?;
    let dd = d.as_ref();
    let tol = v.config.tol;
    match q {
        "cumulative-entropy" => {
            let r = cumulative_entropy(dd)?;
            let alt = cumulative_entropy_via_mit(dd)?;
            out.measure("cumulative-entropy", r);
            out.push(Scalar::new("cumulative-entropy", alt, "mean-of-mit"));
            out.agree("cumulative-entropy routes", r.value, alt, tol);
        }
        "gce" => out.measure("gce", gce(dd, v.n()?)?),
        "wgce" => out.measure("wgce", wgce(dd, v.require_weight()?, v.n()?)?),
        "weighted-cumulative-entropy" => out.measure("weighted-cumulative-entropy", weighted_cumulative_entropy(dd)?),
        "differential-entropy" => out.measure("differential-entropy", differential_entropy(dd)?),
        "varentropy" => {
            let r = varentropy(dd)?;
            out.push(Scalar::new("varentropy", r.direct, "quadrature"));
            out.push(Scalar::new("varentropy", r.via_residual, "residual-entropy"));
            out.push(Scalar::new("varentropy", r.via_past, "past-entropy"));
            out.agree("varentropy residual route", r.direct, r.via_residual, tol);
            out.agree("varentropy past route", r.direct, r.via_past, tol);
        }
        "variance" => {
            let w = v.weight_or_identity();
            let r = variance_of_weighted(dd, &w)?;
            out.push(Scalar::new("variance", r.direct, "quadrature"));
            out.push(Scalar::new("variance", r.via_wmit, "mean-squared-wmit"));
            out.agree("variance routes", r.direct, r.via_wmit, tol);
        }
        "quantile-variance" => out.measure("quantile-variance", quantile_variance(dd, &v.weight_or_identity())?),
        "quantile-gce" => out.measure("quantile-gce", quantile_gce(dd, &v.weight_or_identity(), v.n()?)?),
        "mit" | "wmit" | "wmrl" | "dynamic-cumulative-entropy" | "past-entropy" | "residual-entropy" => {
            if v.config.t.is_empty() {
                v.first_t()?;
            }
            let w = v.weight_or_identity();
            for &t in &v.config.t {
                let value = match q {
                    "mit" => mit(dd, t)?,
                    "wmit" => wmit(dd, &w, t)?,
                    "wmrl" => wmrl(dd, &w, t)?,
                    "dynamic-cumulative-entropy" => dynamic_cumulative_entropy(dd, t)?,
                    "past-entropy" => past_entropy(dd, t)?,
                    _ => residual_entropy(dd, t)?,
                };
                out.push(Scalar::new(q, value, "quadrature").at(t));
            }
        }
        "value-at-risk" | "left-spread" | "right-spread" => {
            let p = v.p()?;
            let value = match q {
                "value-at-risk" => value_at_risk(dd, p)?,
                "left-spread" => left_spread(dd, p)?,
                _ => right_spread(dd, p)?,
            };
            out.push(Scalar::new(q, value, "quantile-domain").at(p));
        }
        "auc" => {
            let y = v.dist(1, "dists")?;
            let r = auc(d, y)?;
            out.push(Scalar::new("auc", r.via_wmrl, "wmrl-at-origin"));
            out.push(Scalar::new("auc", r.via_wmit_limit, "wmit-limit"));
            out.push(Scalar::new("auc", r.direct, "quadrature"));
            out.agree("auc wmrl vs direct", r.via_wmrl, r.direct, tol);
            out.agree("auc wmit limit vs direct", r.via_wmit_limit, r.direct, tol);
        }
        "bounds" => {
            let w = v.weight_or_identity();
            let r = bound_suite(d, &w, v.n()?)?;
            for c in &r.checks {
                out.push(Scalar::new(format!("{}:lhs", c.name), c.lhs, "quadrature"));
                out.push(Scalar::new(format!("{}:rhs", c.name), c.rhs, "quadrature"));
            }
            if !r.failures().is_empty() {
                out.flag();
            }
            out.grid = default_grid(dd)?.label().to_string();
            out.details = json!(r);
        }
        "recurrence" => {
            let w = v.weight_or_identity();
            let r = gce_recurrence_check(d, &w, v.n()?)?;
            out.push(Scalar::new("recurrence:target", r.target, "quadrature"));
            out.push(Scalar::new("recurrence:rhs-i", r.rhs_i, "quadrature"));
            out.push(Scalar::new("recurrence:rhs-ii", r.rhs_ii, "quadrature"));
            out.agree("recurrence (i)", r.target, r.rhs_i, tol);
            out.agree("recurrence (ii)", r.target, r.rhs_ii, tol);
            out.details = json!(r);
        }
        other => {
            return Err(ConfigError::new("quantity", format!("unknown quantity '{other}'; one of: {}", QUANTITIES.join(", "))).into())
        }
    }
    Ok(())
}

fn order_check(v: &Validated, out: &mut Outcome) -> Result<(), Failure> {
    let label = v
        .config
        .order
        .as_deref()
        .ok_or_else(|| ConfigError::new("order", "needs an order kind (st, hr, rhr, mit, wmit, smit, disp, lir)"))?;
    let kind: OrderKind = label.parse().map_err(|e: wmit_core::Error| ConfigError::new("order", e.to_string()))?;
    let x = v.dist(0, "dists")?;
    let y = v.dist(1, "dists")?;
    let grid = match &v.grid {
        Some(g) => g.clone(),
        None => pair_grid(x.as_ref(), y.as_ref())?,
    };
    let verdict = check_order(kind, x, y, v.weight.as_ref(), Some(&grid))?;
    out.grid = verdict.grid.clone();
    out.push(Scalar::new("holds", f64::from(u8::from(verdict.holds())), "grid"));
    out.push(Scalar::new("fails", f64::from(u8::from(verdict.fails())), "grid"));
    out.push(Scalar::new("margin", verdict.margin, "grid"));
    out.push(Scalar::new("comparisons", verdict.comparisons as f64, "grid"));
    let mut details = json!({ "verdict": verdict });
    if v.config.implications {
        let w = v.weight_or_identity();
        let rep = implication_suite(x, y, &w, v.grid.as_ref())?;
        let count = rep.violations().len();
        out.push(Scalar::new("implication-violations", count as f64, "grid"));
        if count > 0 {
            out.flag();
        }
        details["implications"] = json!(rep);
    }
    out.details = details;
    Ok(())
}

fn weight_grid(v: &Validated, d: &Dist) -> Result<Grid, Failure> {
    Ok(match &v.grid {
        Some(g) => g.clone(),
        None => default_grid(d.as_ref())?,
    })
}

fn iwmit(v: &Validated, out: &mut Outcome) -> Result<(), Failure> {
    let d = v.dist(0, "dists")?;
    let w = v.weight_or_identity();
    let grid = weight_grid(v, d)?;
    out.grid = grid.label().to_string();
    let rep = iwmit_classify(d, &w, &grid)?;
    let deriv = wmit_derivative_check(d, &w, &grid)?;
    out.push(Scalar::new("increasing", f64::from(u8::from(rep.direct.is_weakly_increasing())), "grid"));
    out.push(Scalar::new("sufficient-condition", f64::from(u8::from(rep.sufficient)), "grid"));
    out.push(Scalar::new("derivative-identity-residual", deriv.max_residual, "numeric-derivative").at(deriv.worst_t));
    if !rep.consistent {
        out.flag();
    }
    out.details = json!({ "classification": rep, "derivative_check": deriv });
    Ok(())
}

fn reconstruct(v: &Validated, out: &mut Outcome) -> Result<(), Failure> {
    let d = v.dist(0, "dists")?;
    let w = v.weight_or_identity();
    let ts = if v.config.t.is_empty() {
        (1..=9).map(|i| d.quantile(i as f64 / 10.0)).collect::<Result<Vec<_>, _>>()?
    } else {
        v.config.t.clone()
    };
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for t in ts {
        let r = reconstruct_from_distribution(d, &w, t)?;
        out.push(Scalar::new("reconstructed-cdf", r.value, "wmit-inversion").at(t));
        out.push(Scalar::new("cdf", r.exact, "closed-form").at(t));
        worst = worst.max((r.value - r.exact).abs());
        out.agree(&format!("reconstruction at t = {t}"), r.exact, r.value, v.config.tol);
        rows.push(json!({ "t": t, "reconstruction": r }));
    }
    out.push(Scalar::new("max-abs-error", worst, "wmit-inversion"));
    out.details = json!(rows);
    Ok(())
}

fn mc_scalar(out: &mut Outcome, c: &McCheck) {
    if !c.within(Z_FLAG) {
        out.flag();
    }
    out.push(Scalar::new(format!("{}:estimate", c.name), c.estimate, "monte-carlo").err(c.std_error));
    out.push(Scalar::new(format!("{}:target", c.name), c.target, "quadrature"));
    out.push(Scalar::new(format!("{}:z", c.name), c.z, "monte-carlo"));
}

fn simulate(v: &Validated, out: &mut Outcome) -> Result<(), Failure> {
    let model = v
        .config
        .model
        .as_deref()
        .ok_or_else(|| ConfigError::new("model", "one of: records, shock, renewal"))?;
    let d = v.dist(0, "dists")?;
    let count = v.config.samples;
    let seed = v.seed;
    out.grid = "none (Monte Carlo)".into();
    match model {
        "records" => {
            let w = v.weight_or_identity();
            let m = v.config.n.unwrap_or(1);
            let rit = rit_identity_check(d, &w, m, count, seed)?;
            let cov = cov_identity_check(d, &w, m, count, seed.wrapping_add(1))?;
            let tel = telescoping_check(d, &w, m, count, seed.wrapping_add(2))?;
            for c in [&rit, &cov.ratio_form, &cov.covariance_form, &tel] {
                mc_scalar(out, c);
            }
            out.details = json!({
                "record_index": m,
                "z_flag": Z_FLAG,
                "rit": rit, "covariance": cov, "telescoping": tel,
            });
        }
        "shock" => {
            let counts = parse_counts(v.config.counts.as_deref().unwrap_or("geometric:q=0.5"))?;
            let sm = ShockModel::from_interarrival(d.clone(), counts)?;
            let xs = simulate_shock(&sm, count, seed)?;
            let ks = ks_statistic(&xs, |t| sm.cdf(t));
            let crit = ks_critical_value(xs.len(), KS_ALPHA);
            out.push(Scalar::new("ks-statistic", ks, "monte-carlo"));
            out.push(Scalar::new("ks-critical", crit, "asymptotic"));
            for &t in &v.config.t {
                let emp = xs.iter().filter(|&&x| x <= t).count() as f64 / xs.len() as f64;
                out.push(Scalar::new("lifetime-cdf", sm.cdf(t), "poisson-sum").at(t));
                out.push(Scalar::new("lifetime-cdf", emp, "monte-carlo").at(t));
            }
            if ks > crit {
                out.flag();
            }
            out.details = json!({ "model": describe(&sm), "ks_alpha": KS_ALPHA, "ks_passes": ks <= crit });
        }
        "renewal" => {
            let t = v.first_t()?;
            let rm = RenewalModel::new(d.clone(), t, None)?.with_tolerance(v.config.tol);
            let est = rm.renewal_estimate(t)?;
            let sim = simulate_renewal(d, t, count, seed)?;
            let z = (sim.mean_renewals - est.value) / sim.mean_renewals_se;
            out.push(Scalar::new("renewal-function", est.value, "renewal-mesh").err(est.error_estimate).at(t));
            out.push(Scalar::new("renewal-function", sim.mean_renewals, "monte-carlo").err(sim.mean_renewals_se).at(t));
            out.push(Scalar::new("renewal-function:z", z, "monte-carlo").at(t));
            let g = ExcessLifetime::new(rm.clone(), t)?;
            // Each γ(t) CDF evaluation walks the mesh, so KS uses at most 5000 draws.
            let sub = &sim.excess[..sim.excess.len().min(5_000)];
            let ks = ks_statistic(sub, |x| g.cdf(x));
            let crit = ks_critical_value(sub.len(), KS_ALPHA);
            out.push(Scalar::new("excess-ks-statistic", ks, "monte-carlo").at(t));
            out.push(Scalar::new("excess-ks-critical", crit, "asymptotic").at(t));
            if z.abs() > Z_FLAG || ks > crit {
                out.flag();
            }
            out.details = json!({
                "mesh": rm.mesh(),
                "horizon": rm.horizon(),
                "ks_alpha": KS_ALPHA,
                "ks_draws": sub.len(),
                "z_flag": Z_FLAG,
                "ks_passes": ks <= crit,
            });
        }
        other => return Err(ConfigError::new("model", format!("unknown model '{other}'; one of: records, shock, renewal")).into()),
    }
    Ok(())
}

fn acceptance_suite(out: &mut Outcome) -> Result<(), Failure> {
    out.grid = "per criterion (see details)".into();
    let mut rows = Vec::new();
    for id in 1..=acceptance::count() as u32 {
        let Some(o) = acceptance::run_one(id) else { continue };
        eprintln!("[{}] {:>2} {} ({:.2} s)", if o.passed { "PASS" } else { "FAIL" }, o.id, o.name, o.elapsed_secs);
        out.push(Scalar::new(format!("criterion-{}", o.id), f64::from(u8::from(o.passed)), "acceptance"));
        if !o.passed {
            out.flag();
        }
        // elapsed time is left out so identical runs give identical reports
        rows.push(json!({ "id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail }));
    }
    out.details = json!(rows);
    Ok(())
}
