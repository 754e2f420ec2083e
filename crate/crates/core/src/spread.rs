//! Quantile-domain view: left and right spread functions and the variance and
//! cumulative-entropy formulas indexed by probability level.

use serde::Serialize;

use crate::dist::{Dist, Distribution};
use crate::error::{Error, Result};
use crate::inactivity::{integral_phi_f, wmit_unchecked};
use crate::infomeasures::{check_order, MeasureReport, Route};
use crate::numerics::{integrate_try, integrate_with, ln_factorial, QuadOptions};
use crate::weights::WeightFn;

/// Probability levels below this are covered by an analytic bound, not quadrature.
pub const P_FLOOR: f64 = 1e-10;

const OPTS: QuadOptions = QuadOptions {
    abs_tol: 1e-12,
    rel_tol: 1e-10,
    max_intervals: 2000,
};

fn check_level(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("probability level {p} must lie in (0, 1)")))
    }
}

/// Value at risk at level `p`, i.e. the quantile `F⁻¹(p)`.
pub fn value_at_risk(d: &dyn Distribution, p: f64) -> Result<f64> {
    check_level(p)?;
    d.quantile(p)
}

/// Left spread `W̃(p) = ∫₀^{F⁻¹(p)} F`, checked against `p μ̃(F⁻¹(p))`.
pub fn left_spread(d: &dyn Distribution, p: f64) -> Result<f64> {
    transformed_left_spread(d, &WeightFn::identity(), p)
}

/// `∫₀^{F⁻¹(p)} φ F`; for continuous laws equals `p μ̃_ψ(F⁻¹(p))` within 1e-7.
pub fn transformed_left_spread(d: &dyn Distribution, w: &WeightFn, p: f64) -> Result<f64> {
    check_level(p)?;
    let x = d.quantile(p)?;
    let lower = d.support().0;
    let value = integral_phi_f(d, w, lower, x)?;
    if d.has_pdf() && d.cdf(x) > 0.0 {
        let via_mit = p * wmit_unchecked(d, w, x)?;
        let residual = (via_mit - value).abs();
        if residual > 1e-7 * (1.0 + value.abs()) {
            return Err(Error::Consistency {
                what: format!("left spread at p = {p}"),
                residual,
                tolerance: 1e-7,
            });
        }
    }
    Ok(value)
}

/// Right spread (excess wealth) `∫_{F⁻¹(p)}^∞ F̄`.
pub fn right_spread(d: &dyn Distribution, p: f64) -> Result<f64> {
    check_level(p)?;
    let x = d.quantile(p)?;
    let upper = d.support().1;
    if !(upper > x) {
        return Ok(0.0);
    }
    integrate_with(|u| d.survival(u), x, upper, &OPTS)
        .map(|r| r.value)
        .map_err(|e| if upper.is_infinite() { e.into_divergence("right spread (mean)") } else { e })
}

/// A spread function bound to a distribution and optional weight.
#[derive(Debug, Clone)]
pub struct SpreadFn {
    pub dist: Dist,
    pub weight: Option<WeightFn>,
}

impl SpreadFn {
    pub fn left(dist: Dist, weight: Option<WeightFn>) -> Self {
        SpreadFn { dist, weight }
    }

    pub fn eval(&self, p: f64) -> Result<f64> {
        match &self.weight {
            Some(w) => transformed_left_spread(self.dist.as_ref(), w, p),
            None => left_spread(self.dist.as_ref(), p),
        }
    }
}

/// `μ̃_ψ(F⁻¹(p))`.
fn wmit_at_level(d: &dyn Distribution, w: &WeightFn, p: f64) -> Result<f64> {
    // Nodes of panels squeezed against p = 1 can round up to exactly 1.
    let x = d.quantile(p.min(1.0 - f64::EPSILON / 2.0))?;
    wmit_unchecked(d, w, x)
}

/// Bound on `μ̃_ψ` over levels below `P_FLOOR`: `μ̃_ψ(t) <= ψ(t) - ψ(lower)`.
fn floor_wmit_bound(d: &dyn Distribution, w: &WeightFn) -> Result<f64> {
    let x = d.quantile(P_FLOOR)?;
    let lower = d.support().0;
    if w.has_finite_psi() {
        Ok((w.psi(x) - w.psi(lower)).abs())
    } else {
        wmit_unchecked(d, w, x)
    }
}

fn quantile_integral<G>(g: G, what: &str) -> Result<(f64, f64)>
where
    G: Fn(f64) -> Result<f64>,
{
    let r = integrate_try(g, P_FLOOR, 1.0, &OPTS).map_err(|e| e.into_divergence(what))?;
    Ok((r.value, r.error_estimate))
}

/// `σ²[ψ(X)] = ∫₀¹ μ̃_ψ(F⁻¹(p))² dp`.
pub fn quantile_variance(d: &dyn Distribution, w: &WeightFn) -> Result<MeasureReport> {
    let (value, err) = quantile_integral(|p| Ok(wmit_at_level(d, w, p)?.powi(2)), "quantile-domain variance")?;
    let floor = P_FLOOR * floor_wmit_bound(d, w)?.powi(2);
    Ok(MeasureReport {
        value,
        route: Route::QuantileDomain,
        error_estimate: err + floor,
        n: None,
    })
}

/// `CE_{ψ,n} = (1/(n-1)!) ∫₀¹ μ̃_ψ(F⁻¹(p)) (-log p)^{n-1} dp`.
pub fn quantile_gce(d: &dyn Distribution, w: &WeightFn, n: u32) -> Result<MeasureReport> {
    check_order(n)?;
    let k = n - 1;
    let log_kfact = ln_factorial(k);
    let (value, err) = quantile_integral(
        |p| {
            let m = wmit_at_level(d, w, p)?;
            if k == 0 {
                return Ok(m);
            }
            Ok(m * (k as f64 * (-p.ln()).ln() - log_kfact).exp())
        },
        "quantile-domain cumulative entropy",
    )?;
    // ∫₀^ε (-log p)^k dp <= ε (L + k)^k with L = -log ε.
    let l = -P_FLOOR.ln();
    let floor = floor_wmit_bound(d, w)? * P_FLOOR * ((l + k as f64).ln() * k as f64 - log_kfact).exp();
    Ok(MeasureReport {
        value,
        route: Route::QuantileDomain,
        error_estimate: err + floor,
        n: Some(n),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadPoint {
    pub p: f64,
    pub quantile: f64,
    pub value_at_risk: f64,
    pub left_spread: f64,
    pub right_spread: f64,
}

/// Both spreads at `p`, with the quantile reported under both names.
pub fn spread_point(d: &dyn Distribution, p: f64) -> Result<SpreadPoint> {
    let q = value_at_risk(d, p)?;
    Ok(SpreadPoint {
        p,
        quantile: q,
        value_at_risk: q,
        left_spread: left_spread(d, p)?,
        right_spread: right_spread(d, p)?,
    })
}
