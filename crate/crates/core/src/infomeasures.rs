//! Cumulative and differential entropies, varentropy, and the variance and
//! bound identities linking them to the weighted inactivity time.

use serde::Serialize;

use crate::dist::{describe, require_density, require_pdf, sample, Dist, Distribution};
use crate::error::{Error, Result};
use crate::inactivity::{dynamic_cumulative_entropy, iwmit_classify, wmit_unchecked, WmitFn};
use crate::numerics::{
    classify_sequence, default_band, integrate_try, integrate_with, ln_factorial, log_poisson_weight,
    summarize, Grid, MonotoneVerdict, QuadOptions, QuadResult,
};
use crate::weights::{check_bounds, Certification, WeightFn};

/// Largest supported order index for `Tⁿ/n!` weights.
pub const MAX_ORDER: u32 = 20;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const OUTER: QuadOptions = QuadOptions {
    abs_tol: 1e-13,
    rel_tol: 1e-11,
    max_intervals: 2000,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Quadrature,
    QuantileDomain,
    MonteCarlo,
    RecordIdentity,
}

impl Route {
    pub fn label(self) -> &'static str {
        match self {
            Route::Quadrature => "quadrature",
            Route::QuantileDomain => "quantile-domain",
            Route::MonteCarlo => "monte-carlo",
            Route::RecordIdentity => "record-identity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureReport {
    pub value: f64,
    pub route: Route,
    pub error_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
}

impl MeasureReport {
    fn quadrature(r: QuadResult, n: Option<u32>) -> Self {
        MeasureReport {
            value: r.value,
            route: Route::Quadrature,
            error_estimate: r.error_estimate,
            n,
        }
    }
}

pub(crate) fn check_order(n: u32) -> Result<()> {
    if (1..=MAX_ORDER).contains(&n) {
        Ok(())
    } else {
        Err(Error::OrderGuard {
            n,
            min: 1,
            max: MAX_ORDER,
        })
    }
}

/// `∫ g` over the support of `d`, mapping a stalled tail to a divergence error.
fn over_support<G: Fn(f64) -> f64>(d: &dyn Distribution, g: G, what: &str) -> Result<QuadResult> {
    let (lo, hi) = d.support();
    integrate_with(g, lo, hi, &OUTER).map_err(|e| if hi.is_infinite() { e.into_divergence(what) } else { e })
}

fn over_support_try<G: Fn(f64) -> Result<f64>>(d: &dyn Distribution, g: G, what: &str) -> Result<QuadResult> {
    let (lo, hi) = d.support();
    integrate_try(g, lo, hi, &OUTER).map_err(|e| if hi.is_infinite() { e.into_divergence(what) } else { e })
}

/// `E[g(X)]` by quadrature against the density.
pub(crate) fn expectation<G: Fn(f64) -> f64>(d: &dyn Distribution, g: G, what: &str) -> Result<QuadResult> {
    require_density(d)?;
    over_support(
        d,
        |x| {
            let f = d.pdf(x).unwrap_or(f64::NAN);
            if f == 0.0 { 0.0 } else { g(x) * f }
        },
        what,
    )
}

/// `F(x) Tⁿ(x) / n!` evaluated in the log domain; zero where `F ∈ {0, 1}`.
pub(crate) fn record_spacing_kernel(d: &dyn Distribution, x: f64, n: u32) -> f64 {
    let f = d.cdf(x);
    if f <= 0.0 || f >= 1.0 {
        return 0.0;
    }
    let t = -d.log_cdf(x);
    if t <= 0.0 {
        return 0.0;
    }
    match log_poisson_weight(n, t) {
        Ok(lw) => (f.ln() + lw).exp(),
        Err(_) => f64::NAN,
    }
}

/// Cumulative entropy `-∫ F log F`, cross-checked against `E[μ̃(X)]`
/// (within 1e-5) when a density exists.
pub fn cumulative_entropy(d: &dyn Distribution) -> Result<MeasureReport> {
    let r = over_support(d, |x| record_spacing_kernel(d, x, 1), "cumulative entropy")?;
    if d.has_pdf() {
        let via_mit = dynamic_cumulative_entropy(d, f64::INFINITY)?;
        let residual = (via_mit - r.value).abs();
        if residual > 1e-5 {
            return Err(Error::Consistency {
                what: format!("cumulative entropy routes for {}", describe(d)),
                residual,
                tolerance: 1e-5,
            });
        }
    }
    Ok(MeasureReport::quadrature(r, Some(1)))
}

/// `E[μ̃(X)]`, the second route to the cumulative entropy.
pub fn cumulative_entropy_via_mit(d: &dyn Distribution) -> Result<f64> {
    dynamic_cumulative_entropy(d, f64::INFINITY)
}

/// Generalized cumulative entropy `∫ F Tⁿ/n!`.
pub fn gce(d: &dyn Distribution, n: u32) -> Result<MeasureReport> {
    check_order(n)?;
    let r = over_support(d, |x| record_spacing_kernel(d, x, n), "generalized cumulative entropy")?;
    Ok(MeasureReport::quadrature(r, Some(n)))
}

/// Weighted generalized cumulative entropy `∫ φ F Tⁿ/n!`.
pub fn wgce(d: &dyn Distribution, w: &WeightFn, n: u32) -> Result<MeasureReport> {
    check_order(n)?;
    let r = over_support(
        d,
        |x| {
            let k = record_spacing_kernel(d, x, n);
            if k == 0.0 { 0.0 } else { w.phi(x) * k }
        },
        "weighted generalized cumulative entropy",
    )?;
    Ok(MeasureReport::quadrature(r, Some(n)))
}

/// Weighted cumulative entropy `-∫ x F log F`.
pub fn weighted_cumulative_entropy(d: &dyn Distribution) -> Result<MeasureReport> {
    let r = over_support(d, |x| x * record_spacing_kernel(d, x, 1), "weighted cumulative entropy")?;
    Ok(MeasureReport::quadrature(r, Some(1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceRoutes {
    /// `E[(ψ(X) - E ψ(X))²]`.
    pub direct: f64,
    /// `E[μ̃_ψ²(X)]`.
    pub via_wmit: f64,
}

/// `σ²[ψ(X)]` both directly and as the mean squared WMIT.
pub fn variance_of_weighted(d: &dyn Distribution, w: &WeightFn) -> Result<VarianceRoutes> {
    require_density(d)?;
    if !w.has_finite_psi() {
        return Err(Error::Divergent {
            what: "E[ψ²(X)] (ψ is infinite)".into(),
        });
    }
    let m = expectation(d, |x| w.psi(x), "E[ψ(X)]")?.value;
    let direct = expectation(d, |x| (w.psi(x) - m).powi(2), "E[ψ²(X)]")?.value;
    let via_wmit = over_support_try(
        d,
        |x| {
            let f = require_pdf(d, x)?;
            if f == 0.0 || d.cdf(x) <= 0.0 {
                return Ok(0.0);
            }
            Ok(wmit_unchecked(d, w, x)?.powi(2) * f)
        },
        "E[μ̃_ψ²(X)]",
    )?
    .value;
    Ok(VarianceRoutes { direct, via_wmit })
}

/// Monte Carlo estimate of `σ²[ψ(X)]` with its standard error.
pub fn variance_monte_carlo(d: &dyn Distribution, w: &WeightFn, count: usize, seed: u64) -> Result<McEstimate> {
    let xs = sample(d, count, seed, 0)?;
    let ys: Vec<f64> = xs.iter().map(|&x| w.psi(x)).collect();
    Ok(McEstimate::variance_of(&ys))
}

/// Monte Carlo estimate with standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub count: usize,
}

impl McEstimate {
    pub fn mean_of(xs: &[f64]) -> Self {
        let s = summarize(xs);
        McEstimate {
            estimate: s.mean,
            std_error: s.std_error,
            count: s.count,
        }
    }

    /// Sample variance; standard error from the fourth central moment.
    pub fn variance_of(xs: &[f64]) -> Self {
        let s = summarize(xs);
        let n = xs.len() as f64;
        let m4 = xs.iter().map(|x| (x - s.mean).powi(4)).sum::<f64>() / n;
        let se = ((m4 - s.variance * s.variance).max(0.0) / n).sqrt();
        McEstimate {
            estimate: s.variance,
            std_error: se,
            count: s.count,
        }
    }

    /// `(estimate - target) / std_error`.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.estimate == target { 0.0 } else { f64::INFINITY }
        } else {
            (self.estimate - target) / self.std_error
        }
    }
}

fn log_density(d: &dyn Distribution, x: f64) -> f64 {
    d.pdf(x).unwrap_or(f64::NAN).max(1e-300).ln()
}

/// Differential entropy `-∫ f log f`.
pub fn differential_entropy(d: &dyn Distribution) -> Result<MeasureReport> {
    let r = expectation(d, |x| -log_density(d, x), "differential entropy")?;
    Ok(MeasureReport::quadrature(r, None))
}

/// Weighted (Shannon) entropy `-∫ x f log f`; provided for completeness.
pub fn weighted_entropy_experimental(d: &dyn Distribution) -> Result<MeasureReport> {
    let r = expectation(d, |x| -x * log_density(d, x), "weighted entropy")?;
    Ok(MeasureReport::quadrature(r, None))
}

/// Past entropy `H̄(t)` of `X | X <= t`.
pub fn past_entropy(d: &dyn Distribution, t: f64) -> Result<f64> {
    require_density(d)?;
    let f_t = crate::dist::cdf_in_domain(d, t)?;
    let (lo, hi) = d.support();
    let r = integrate_with(
        |x| {
            let f = d.pdf(x).unwrap_or(f64::NAN);
            if f == 0.0 { 0.0 } else { f * log_density(d, x) }
        },
        lo,
        t.min(hi),
        &OUTER,
    )?;
    Ok(f_t.ln() - r.value / f_t)
}

/// Residual entropy `H(t)` of `X - t | X > t`.
pub fn residual_entropy(d: &dyn Distribution, t: f64) -> Result<f64> {
    require_density(d)?;
    let s = d.survival(t);
    if !(s >= crate::dist::DOMAIN_FLOOR) {
        return Err(Error::BelowDomainFloor {
            x: t,
            cdf: s,
            floor: crate::dist::DOMAIN_FLOOR,
        });
    }
    let (lo, hi) = d.support();
    let r = integrate_with(
        |x| {
            let f = d.pdf(x).unwrap_or(f64::NAN);
            if f == 0.0 { 0.0 } else { f * log_density(d, x) }
        },
        t.max(lo),
        hi,
        &OUTER,
    )
    .map_err(|e| if hi.is_infinite() { e.into_divergence("residual entropy") } else { e })?;
    Ok(s.ln() - r.value / s)
}

/// `H(t) + log λ(t) = -(1/F̄(t)) ∫ₜ^∞ f log(f / f(t))`.
fn residual_ic_gap(d: &dyn Distribution, t: f64) -> Result<f64> {
    let s = d.survival(t);
    let ft = d.pdf(t).unwrap_or(f64::NAN);
    if s <= 1e-300 || ft <= 0.0 {
        return Ok(0.0);
    }
    let lft = ft.ln();
    let (_, hi) = d.support();
    if !(hi > t) {
        return Ok(0.0);
    }
    let r = integrate_with(
        |x| {
            let f = d.pdf(x).unwrap_or(f64::NAN);
            if f == 0.0 { 0.0 } else { f * (f.max(1e-300).ln() - lft) }
        },
        t,
        hi,
        &QuadOptions { abs_tol: 1e-300, rel_tol: 1e-11, max_intervals: 2000 },
    )?;
    Ok(-r.value / s)
}

/// `H̄(t) + log τ(t) = -(1/F(t)) ∫₀ᵗ f log(f / f(t))`.
fn past_ic_gap(d: &dyn Distribution, t: f64) -> Result<f64> {
    let big_f = d.cdf(t);
    let ft = d.pdf(t).unwrap_or(f64::NAN);
    if big_f <= 1e-300 || ft <= 0.0 {
        return Ok(0.0);
    }
    let lft = ft.ln();
    let (lo, _) = d.support();
    if !(t > lo) {
        return Ok(0.0);
    }
    let r = integrate_with(
        |x| {
            let f = d.pdf(x).unwrap_or(f64::NAN);
            if f == 0.0 { 0.0 } else { f * (f.max(1e-300).ln() - lft) }
        },
        lo,
        t,
        &QuadOptions { abs_tol: 1e-300, rel_tol: 1e-11, max_intervals: 2000 },
    )?;
    Ok(-r.value / big_f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarentropyRoutes {
    /// `Var(-log f(X))`.
    pub direct: f64,
    /// `E{[H(X) + log λ(X)]²}`.
    pub via_residual: f64,
    /// `E{[H̄(X) + log τ(X)]²}`.
    pub via_past: f64,
}

impl VarentropyRoutes {
    pub fn max_spread(&self) -> f64 {
        let v = [self.direct, self.via_residual, self.via_past];
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

/// Varentropy `V(X)` by three quadrature routes.
pub fn varentropy(d: &dyn Distribution) -> Result<VarentropyRoutes> {
    require_density(d)?;
    let h = differential_entropy(d)?.value;
    let direct = expectation(d, |x| (-log_density(d, x) - h).powi(2), "varentropy")?.value;
    let via_residual = over_support_try(
        d,
        |x| {
            let f = require_pdf(d, x)?;
            if f == 0.0 {
                return Ok(0.0);
            }
            Ok(f * residual_ic_gap(d, x)?.powi(2))
        },
        "varentropy (residual route)",
    )?
    .value;
    let via_past = over_support_try(
        d,
        |x| {
            let f = require_pdf(d, x)?;
            if f == 0.0 {
                return Ok(0.0);
            }
            Ok(f * past_ic_gap(d, x)?.powi(2))
        },
        "varentropy (past route)",
    )?
    .value;
    Ok(VarentropyRoutes {
        direct,
        via_residual,
        via_past,
    })
}

/// Sample variance of the information content `-log f(X)`.
pub fn varentropy_monte_carlo(d: &dyn Distribution, count: usize, seed: u64) -> Result<McEstimate> {
    require_density(d)?;
    let xs = sample(d, count, seed, 0)?;
    let ic: Vec<f64> = xs.iter().map(|&x| -log_density(d, x)).collect();
    Ok(McEstimate::variance_of(&ic))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarentropyBoundReport {
    /// `log(f(x)/f(t)) <= 1` for all grid `x >= t`.
    pub right_log_ratio_condition: bool,
    /// `log(f(x)/f(t)) <= 1` for all grid `x <= t`.
    pub left_log_ratio_condition: bool,
    pub residual_entropy_trend: MonotoneVerdict,
    pub past_entropy_trend: MonotoneVerdict,
    /// Hypotheses for `V <= 1` hold through either side.
    pub bound_implied: bool,
    pub varentropy: f64,
    pub bound_holds: bool,
    pub grid: String,
}

/// Grid check of the sufficient conditions for `V(X) <= 1`.
pub fn varentropy_bound_check(d: &dyn Distribution, grid: &Grid) -> Result<VarentropyBoundReport> {
    require_density(d)?;
    let pts = grid.points();
    let logf: Vec<f64> = pts.iter().map(|&x| log_density(d, x)).collect();
    let n = pts.len();
    let mut suffix = vec![f64::NEG_INFINITY; n];
    let mut acc = f64::NEG_INFINITY;
    for i in (0..n).rev() {
        acc = acc.max(logf[i]);
        suffix[i] = acc;
    }
    let right = (0..n).all(|i| suffix[i] - logf[i] <= 1.0 + 1e-12);
    let mut prefix = f64::NEG_INFINITY;
    let mut left = true;
    for i in 0..n {
        prefix = prefix.max(logf[i]);
        if prefix - logf[i] > 1.0 + 1e-12 {
            left = false;
        }
    }
    let mut res = Vec::with_capacity(n);
    let mut past = Vec::with_capacity(n);
    for &t in pts {
        res.push(residual_entropy(d, t)?);
        past.push(past_entropy(d, t)?);
    }
    let residual_entropy_trend = classify_sequence(pts, &res, default_band(&res))?;
    let past_entropy_trend = classify_sequence(pts, &past, default_band(&past))?;
    let bound_implied = (right && residual_entropy_trend.is_weakly_decreasing())
        || (left && past_entropy_trend.is_weakly_increasing());
    let v = varentropy(d)?.direct;
    Ok(VarentropyBoundReport {
        right_log_ratio_condition: right,
        left_log_ratio_condition: left,
        residual_entropy_trend,
        past_entropy_trend,
        bound_implied,
        varentropy: v,
        bound_holds: v <= 1.0 + 1e-6,
        grid: grid.label().to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecurrenceCheck {
    pub n: u32,
    pub target: f64,
    pub previous: f64,
    /// `CE_{ψ,n-1} - E[h̃_{ψ,n}(X)]/(n-1)!`, with `h̃(t) = ∫ₜ^∞ μ̃_ψ' T^{n-1}`.
    pub rhs_i: f64,
    /// `CE_{ψ,n-1} (1 - E[μ̃_ψ'(Z)])`, `Z` with density `F T^{n-1}/((n-1)! CE_{ψ,n-1})`.
    pub rhs_ii: f64,
    pub residual_i: f64,
    pub residual_ii: f64,
}

/// Both recurrences from order `n - 1` to `n`.
///
/// Route (i) uses `μ̃_ψ' = φ - τ μ̃_ψ` and Fubini; route (ii) integrates the
/// numerical derivative of `μ̃_ψ` against the density of `Z`.
pub fn gce_recurrence_check(d: &Dist, w: &WeightFn, n: u32) -> Result<RecurrenceCheck> {
    if n < 2 {
        return Err(Error::OrderGuard {
            n,
            min: 2,
            max: MAX_ORDER,
        });
    }
    check_order(n)?;
    require_density(d.as_ref())?;
    let dist = d.as_ref();
    let target = wgce(dist, w, n)?.value;
    let previous = wgce(dist, w, n - 1)?.value;
    if !(previous > 0.0) {
        return Err(Error::Degenerate(format!(
            "weighted cumulative entropy of order {} is zero",
            n - 1
        )));
    }
    let k = n - 1;
    let curve = WmitFn::new(d.clone(), w.clone());

    let e_h = over_support_try(
        dist,
        |x| {
            let kern = record_spacing_kernel(dist, x, k);
            if kern == 0.0 {
                return Ok(0.0);
            }
            let fx = dist.cdf(x);
            let tau = require_pdf(dist, x)? / fx;
            let deriv = w.phi(x) - tau * wmit_unchecked(dist, w, x)?;
            Ok(deriv * kern)
        },
        "recurrence (i)",
    )?
    .value;
    // The kernel already carries the 1/(n-1)! factor.
    let rhs_i = previous - e_h;

    let e_z = over_support_try(
        dist,
        |x| {
            let kern = record_spacing_kernel(dist, x, k);
            // Below the domain floor the kernel is negligible.
            if kern == 0.0 || dist.cdf(x) < 1e3 * crate::dist::DOMAIN_FLOOR {
                return Ok(0.0);
            }
            Ok(curve.deriv_numeric(x)? * kern / previous)
        },
        "recurrence (ii)",
    )?
    .value;
    let rhs_ii = previous * (1.0 - e_z);
    Ok(RecurrenceCheck {
        n,
        target,
        previous,
        rhs_i,
        rhs_ii,
        residual_i: (rhs_i - target).abs(),
        residual_ii: (rhs_ii - target).abs(),
    })
}

/// `C_n = exp(∫₀¹ log(u (-log u)ⁿ) du)` by quadrature.
pub fn c_n(n: u32) -> Result<f64> {
    let nf = n as f64;
    let r = integrate_with(
        |u: f64| u.ln() + nf * (-u.ln()).ln(),
        0.0,
        1.0,
        &QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 2000 },
    )?;
    Ok(r.value.exp())
}

/// `H(ψ(X)) = H(X) + E[log φ(X)]`; needs `φ > 0` almost everywhere.
pub fn entropy_of_transformed(d: &dyn Distribution, w: &WeightFn) -> Result<f64> {
    let h = differential_entropy(d)?.value;
    let e_log_phi = expectation(
        d,
        |x| {
            let p = w.phi(x);
            if p > 0.0 { p.ln() } else { f64::NEG_INFINITY }
        },
        "E[log φ(X)]",
    )?
    .value;
    Ok(h + e_log_phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    /// Allowed numerical slack; a bound fails only beyond it.
    pub margin: f64,
    /// `None` when the hypotheses are not met.
    pub holds: Option<bool>,
    pub note: String,
}

impl BoundCheck {
    fn new(name: &str, lhs: f64, relation: Relation, rhs: f64, applicable: bool, note: String) -> Self {
        let margin = 1e-7 * (1.0 + lhs.abs() + rhs.abs());
        let ok = match relation {
            Relation::AtMost => lhs <= rhs + margin,
            Relation::AtLeast => lhs >= rhs - margin,
        };
        BoundCheck {
            name: name.into(),
            lhs,
            relation,
            rhs,
            margin,
            holds: applicable.then_some(ok),
            note,
        }
    }

    pub fn failed(&self) -> bool {
        self.holds == Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub dist: String,
    pub weight: String,
    pub n: u32,
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn failures(&self) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| c.failed()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn sqrt_factorial_ratio(n: u32) -> f64 {
    // √((2(n-1))!) / (n-1)!
    let k = n - 1;
    (0.5 * ln_factorial(2 * k) - ln_factorial(k)).exp()
}

/// Evaluates every applicable inequality for `(d, w)` at order `n`.
pub fn bound_suite(d: &Dist, w: &WeightFn, n: u32) -> Result<BoundReport> {
    check_order(n)?;
    let dist = d.as_ref();
    require_density(dist)?;
    let grid = crate::dist::default_grid(dist)?;
    let (convexity, cert) = w.effective_convexity(&grid);
    let cert_note = match cert {
        Certification::Declared => "convexity declared".to_string(),
        Certification::Grid => format!("convexity grid-certified on {}", grid.label()),
    };
    let (m, big_m) = check_bounds(w, &grid)?;
    let bounded = m.is_finite() && big_m.is_finite();

    let ce_psi_n = wgce(dist, w, n)?.value;
    let ce_n = gce(dist, n)?.value;
    let var = variance_of_weighted(dist, w)?;
    let sigma_psi = var.direct.max(0.0).sqrt();
    let sigma_x = variance_of_weighted(dist, &WeightFn::identity())?.direct.max(0.0).sqrt();
    let mut checks = Vec::new();

    checks.push(BoundCheck::new(
        "wgce-upper",
        ce_psi_n,
        Relation::AtMost,
        sqrt_factorial_ratio(n) * sigma_psi,
        true,
        "sqrt((2(n-1))!)/(n-1)! * sigma[psi(X)]".into(),
    ));

    let phi_positive = grid.points().iter().all(|&x| w.phi(x) > 0.0);
    let lower_rhs = if phi_positive {
        c_n(n)? * entropy_of_transformed(dist, w)?.exp() / ln_factorial(n).exp()
    } else {
        f64::NAN
    };
    checks.push(BoundCheck::new(
        "wgce-lower",
        ce_psi_n,
        Relation::AtLeast,
        lower_rhs,
        phi_positive,
        "C_n exp(H(psi(X))) / n!".into(),
    ));

    let ce = cumulative_entropy(dist)?.value;
    checks.push(BoundCheck::new(
        "sigma-vs-ce",
        sigma_psi,
        Relation::AtLeast,
        w.psi(ce),
        convexity.is_convex(),
        cert_note.clone(),
    ));

    checks.push(BoundCheck::new(
        "sigma-ratio-lower",
        sigma_psi,
        Relation::AtLeast,
        m * sigma_x,
        bounded,
        format!("grid bounds m = {m}, M = {big_m}"),
    ));
    checks.push(BoundCheck::new(
        "sigma-ratio-upper",
        sigma_psi,
        Relation::AtMost,
        big_m * sigma_x,
        bounded,
        format!("grid bounds m = {m}, M = {big_m}"),
    ));
    checks.push(BoundCheck::new(
        "wgce-ratio-lower",
        ce_psi_n,
        Relation::AtLeast,
        m * ce_n,
        bounded,
        format!("grid bounds m = {m}, M = {big_m}"),
    ));
    checks.push(BoundCheck::new(
        "wgce-ratio-upper",
        ce_psi_n,
        Relation::AtMost,
        big_m * ce_n,
        bounded,
        format!("grid bounds m = {m}, M = {big_m}"),
    ));

    let psi_of_ce_n = w.psi(ce_n);
    checks.push(BoundCheck::new(
        "wgce-vs-psi",
        ce_psi_n,
        if convexity.is_concave() && !convexity.is_convex() { Relation::AtMost } else { Relation::AtLeast },
        psi_of_ce_n,
        convexity.is_convex() || convexity.is_concave(),
        cert_note.clone(),
    ));

    // Ratio CE_{ψ,k} / CE_k across k = 1..5: decreasing for convex ψ,
    // increasing for concave ψ.
    let ks: Vec<f64> = (1..=5).map(|k| k as f64).collect();
    let mut ratios = Vec::with_capacity(5);
    for k in 1..=5u32 {
        ratios.push(wgce(dist, w, k)?.value / gce(dist, k)?.value);
    }
    let trend = classify_sequence(&ks, &ratios, default_band(&ratios))?;
    let (lhs, rhs, applicable, rel) = if convexity.is_convex() && !convexity.is_concave() {
        (ratios[4], ratios[0], true, Relation::AtMost)
    } else if convexity.is_concave() && !convexity.is_convex() {
        (ratios[4], ratios[0], true, Relation::AtLeast)
    } else {
        (ratios[4], ratios[0], false, Relation::AtMost)
    };
    let mut ratio_check = BoundCheck::new(
        "wgce-ratio-trend",
        lhs,
        rel,
        rhs,
        applicable,
        format!("ratio trend over n = 1..5: {:?}; {cert_note}", trend.kind),
    );
    if applicable {
        let ok = match rel {
            Relation::AtMost => trend.is_weakly_decreasing(),
            Relation::AtLeast => trend.is_weakly_increasing(),
        };
        ratio_check.holds = Some(ok);
    }
    checks.push(ratio_check);

    Ok(BoundReport {
        dist: describe(dist),
        weight: w.label(),
        n,
        checks,
    })
}

/// Whether `wgce(n) <= wgce(n-1)` for `n = 2..=max_n`, checked only when the
/// pair is IWMIT on `grid` (`None` otherwise). With `μ̃_ψ' >= 0` the factor
/// `1 - E[μ̃_ψ'(Z)]` in the recurrence is at most one.
pub fn iwmit_gce_monotonicity(d: &Dist, w: &WeightFn, grid: &Grid, max_n: u32) -> Result<Option<bool>> {
    let rep = iwmit_classify(d, w, grid)?;
    if !rep.direct.is_weakly_increasing() {
        return Ok(None);
    }
    let mut prev = wgce(d.as_ref(), w, 1)?.value;
    for n in 2..=max_n {
        let cur = wgce(d.as_ref(), w, n)?.value;
        if cur > prev + 1e-9 * (1.0 + prev) {
            return Ok(Some(false));
        }
        prev = cur;
    }
    Ok(Some(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Exponential, LinExp, OrderStatistic, Uniform};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn exp1() -> Dist {
        Arc::new(Exponential::new(1.0).unwrap())
    }
    fn unif(b: f64) -> Dist {
        Arc::new(Uniform::new(b).unwrap())
    }
    fn pi2_6_m1() -> f64 {
        std::f64::consts::PI.powi(2) / 6.0 - 1.0
    }

    #[test]
    fn cumulative_entropy_examples() {
        assert_abs_diff_eq!(cumulative_entropy(unif(1.0).as_ref()).unwrap().value, 0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(cumulative_entropy(unif(2.0).as_ref()).unwrap().value, 0.5, epsilon = 1e-10);
        // Series oracle Σ_{k>=2} 1/k² = π²/6 - 1.
        let series: f64 = (2..200_000u64).map(|k| 1.0 / (k as f64).powi(2)).sum::<f64>() + 1.0 / 200_000.0;
        assert_abs_diff_eq!(series, pi2_6_m1(), epsilon = 1e-9);
        assert_abs_diff_eq!(cumulative_entropy(exp1().as_ref()).unwrap().value, series, epsilon = 1e-8);
        assert_abs_diff_eq!(cumulative_entropy_via_mit(exp1().as_ref()).unwrap(), series, epsilon = 1e-8);
    }

    #[test]
    fn gce_examples() {
        for n in 1..=5 {
            let v = gce(unif(1.0).as_ref(), n).unwrap().value;
            assert_abs_diff_eq!(v, 1.0 / 2f64.powi(n as i32 + 1), epsilon = 1e-10);
        }
        assert_abs_diff_eq!(gce(exp1().as_ref(), 1).unwrap().value, pi2_6_m1(), epsilon = 1e-8);
        // Two-tolerance self-consistency for n = 2.
        let e = exp1();
        let integrand = |x: f64| record_spacing_kernel(e.as_ref(), x, 2);
        let a = crate::numerics::integrate(integrand, 0.0, f64::INFINITY, 1e-6).unwrap().value;
        let b = crate::numerics::integrate(integrand, 0.0, f64::INFINITY, 1e-8).unwrap().value;
        assert!((a - b).abs() <= 1e-6);
        assert_abs_diff_eq!(gce(e.as_ref(), 2).unwrap().value, b, epsilon = 1e-8);
        assert!(matches!(gce(e.as_ref(), 0), Err(Error::OrderGuard { .. })));
        assert!(matches!(gce(e.as_ref(), 21), Err(Error::OrderGuard { .. })));
    }

    #[test]
    fn wgce_examples() {
        let u = unif(1.0);
        assert_abs_diff_eq!(wgce(u.as_ref(), &WeightFn::identity(), 2).unwrap().value, 0.125, epsilon = 1e-10);
        // ∫₀¹ x² (-log x)ⁿ / n! dx = 1 / 3^(n+1).
        for n in 1..=5 {
            let v = wgce(u.as_ref(), &WeightFn::half_square(), n).unwrap().value;
            assert_abs_diff_eq!(v, 1.0 / 3f64.powi(n as i32 + 1), epsilon = 1e-10);
        }
    }

    #[test]
    fn weighted_cumulative_entropy_examples() {
        assert_abs_diff_eq!(weighted_cumulative_entropy(unif(1.0).as_ref()).unwrap().value, 1.0 / 9.0, epsilon = 1e-10);
        assert_abs_diff_eq!(weighted_cumulative_entropy(unif(2.0).as_ref()).unwrap().value, 4.0 / 9.0, epsilon = 1e-10);
        let e = exp1();
        let a = weighted_cumulative_entropy(e.as_ref()).unwrap().value;
        let b = wgce(e.as_ref(), &WeightFn::half_square(), 1).unwrap().value;
        assert_abs_diff_eq!(a, b, epsilon = 1e-10);
    }

    #[test]
    fn variance_examples() {
        let v = variance_of_weighted(unif(1.0).as_ref(), &WeightFn::identity()).unwrap();
        assert_abs_diff_eq!(v.direct, 1.0 / 12.0, epsilon = 1e-10);
        assert_abs_diff_eq!(v.via_wmit, 1.0 / 12.0, epsilon = 1e-10);

        let sys = OrderStatistic::maximum(unif(1.0), 2).unwrap();
        let w = WeightFn::cdf_of(unif(1.0)).unwrap();
        let v = variance_of_weighted(&sys, &w).unwrap();
        assert_abs_diff_eq!(v.via_wmit, 1.0 / 18.0, epsilon = 1e-10);
        assert_abs_diff_eq!(v.direct, 1.0 / 18.0, epsilon = 1e-10);

        let o = OrderStatistic::new(unif(1.0), 1, 2).unwrap();
        let v = variance_of_weighted(&o, &w).unwrap();
        assert_abs_diff_eq!(v.via_wmit, 1.0 / 18.0, epsilon = 1e-10);
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(differential_entropy(unif(1.0).as_ref()).unwrap().value, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(differential_entropy(exp1().as_ref()).unwrap().value, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(differential_entropy(unif(2.0).as_ref()).unwrap().value, 2f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(past_entropy(unif(1.0).as_ref(), 0.5).unwrap(), 0.5f64.ln(), epsilon = 1e-12);
        for &t in &[0.1, 1.0, 5.0] {
            assert_abs_diff_eq!(residual_entropy(exp1().as_ref(), t).unwrap(), 1.0, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(residual_entropy(unif(1.0).as_ref(), 0.5).unwrap(), 0.5f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn varentropy_examples() {
        let v = varentropy(unif(3.0).as_ref()).unwrap();
        assert!(v.direct.abs() < 1e-8 && v.via_past.abs() < 1e-8 && v.via_residual.abs() < 1e-8, "{v:?}");
        for rate in [0.5, 1.0, 3.0] {
            let e = Exponential::new(rate).unwrap();
            let v = varentropy(&e).unwrap();
            assert_abs_diff_eq!(v.direct, 1.0, epsilon = 1e-8);
            assert_abs_diff_eq!(v.via_residual, 1.0, epsilon = 1e-6);
            assert_abs_diff_eq!(v.via_past, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn varentropy_bound_examples() {
        let e = exp1();
        let g = crate::dist::default_grid(e.as_ref()).unwrap();
        let r = varentropy_bound_check(e.as_ref(), &g).unwrap();
        assert!(r.right_log_ratio_condition && r.bound_implied && r.bound_holds);
        assert_abs_diff_eq!(r.varentropy, 1.0, epsilon = 1e-8);

        let l = LinExp;
        let g = crate::dist::default_grid(&l).unwrap();
        let r = varentropy_bound_check(&l, &g).unwrap();
        assert!(r.right_log_ratio_condition);

        let u = unif(1.0);
        let g = crate::dist::default_grid(u.as_ref()).unwrap();
        let r = varentropy_bound_check(u.as_ref(), &g).unwrap();
        assert!(r.bound_holds && r.varentropy.abs() < 1e-8);
    }

    #[test]
    fn recurrence_examples() {
        let r = gce_recurrence_check(&unif(1.0), &WeightFn::identity(), 2).unwrap();
        assert_abs_diff_eq!(r.previous, 0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(r.target, 0.125, epsilon = 1e-10);
        assert!(r.residual_i <= 1e-6 && r.residual_ii <= 1e-6, "{r:?}");

        let r = gce_recurrence_check(&unif(1.0), &WeightFn::half_square(), 2).unwrap();
        assert_abs_diff_eq!(r.previous, 1.0 / 9.0, epsilon = 1e-10);
        assert!(r.residual_i <= 1e-6 && r.residual_ii <= 1e-6, "{r:?}");

        let r = gce_recurrence_check(&exp1(), &WeightFn::identity(), 2).unwrap();
        assert!(r.residual_i <= 1e-5 && r.residual_ii <= 1e-5, "{r:?}");
        assert!(gce_recurrence_check(&exp1(), &WeightFn::identity(), 1).is_err());
    }

    #[test]
    fn c_n_closed_form() {
        for n in 0..=5 {
            assert_abs_diff_eq!(c_n(n).unwrap(), (-1.0 - n as f64 * EULER_GAMMA).exp(), epsilon = 1e-9);
        }
    }

    #[test]
    fn bound_suite_examples() {
        let r = bound_suite(&unif(1.0), &WeightFn::identity(), 1).unwrap();
        let up = r.get("wgce-upper").unwrap();
        assert_abs_diff_eq!(up.lhs, 0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(up.rhs, 1.0 / 12f64.sqrt(), epsilon = 1e-10);
        assert_eq!(up.holds, Some(true));
        assert!(r.failures().is_empty(), "{:?}", r.failures());

        let r = bound_suite(&unif(1.0), &WeightFn::half_square(), 3).unwrap();
        assert_eq!(r.get("wgce-ratio-trend").unwrap().holds, Some(true));
        assert_eq!(r.get("wgce-ratio-upper").unwrap().holds, Some(true));
        assert!(r.failures().is_empty(), "{:?}", r.failures());
    }

    #[test]
    fn transformed_entropy_closed_form() {
        // X ~ exponential(1), ψ = x²: H(X²) = 1 + E[log 2X] = 1 + log 2 - γ.
        let h = entropy_of_transformed(exp1().as_ref(), &WeightFn::power(2.0).unwrap()).unwrap();
        assert_abs_diff_eq!(h, 1.0 + 2f64.ln() - EULER_GAMMA, epsilon = 1e-8);
    }

    #[test]
    fn iwmit_implies_gce_growth() {
        let e = exp1();
        let g = crate::dist::default_grid(e.as_ref()).unwrap();
        assert_eq!(iwmit_gce_monotonicity(&e, &WeightFn::identity(), &g, 5).unwrap(), Some(true));
    }
}
