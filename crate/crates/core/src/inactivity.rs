//! Mean inactivity time `μ̃`, its weighted version `μ̃_ψ`, and everything
//! that is read directly off those curves.

use serde::Serialize;

use crate::dist::{
    cdf_in_domain, describe, require_density, require_pdf, reversed_hazard, Dist, Distribution,
};
use crate::error::{Error, Result};
use crate::numerics::{
    classify_sequence, default_band, integrate_try, integrate_with, Grid, MonotoneKind,
    MonotoneVerdict, QuadOptions,
};
use crate::weights::WeightFn;

/// Tolerance used for every inner integral of the form `∫ φ F`.
pub(crate) const INNER: QuadOptions = QuadOptions {
    abs_tol: 1e-300,
    rel_tol: 1e-12,
    max_intervals: 2000,
};

/// `∫_a^b φ(x) F(x) dx`, splitting at the upper support end where `F`
/// has a kink and reducing to `ψ(b) - ψ(upper)` beyond it.
pub(crate) fn integral_phi_f(d: &dyn Distribution, w: &WeightFn, a: f64, b: f64) -> Result<f64> {
    let (lower, upper) = d.support();
    let a = a.max(lower);
    if !(b > a) {
        return Ok(0.0);
    }
    let inner_end = b.min(upper);
    let mut total = 0.0;
    if inner_end > a {
        let r = if w.is_identity() {
            integrate_with(|x| d.cdf(x), a, inner_end, &INNER)?
        } else {
            integrate_with(
                |x| {
                    let f = d.cdf(x);
                    if f == 0.0 { 0.0 } else { w.phi(x) * f }
                },
                a,
                inner_end,
                &INNER,
            )?
        };
        total += r.value;
    }
    if b > upper {
        let tail = if w.has_finite_psi() { w.psi(b) - w.psi(upper) } else { f64::INFINITY };
        total += if tail.is_nan() { f64::INFINITY } else { tail };
    }
    Ok(total)
}

/// `μ̃(t)` without the domain-floor check; needs `F(t) > 0`.
pub(crate) fn mit_unchecked(d: &dyn Distribution, t: f64) -> Result<f64> {
    let f = d.cdf(t);
    if !(f > 0.0) {
        return Err(Error::BelowDomainFloor { x: t, cdf: f, floor: 0.0 });
    }
    let (lower, upper) = d.support();
    let mut area = if t > lower {
        integrate_with(|x| d.cdf(x), lower, t.min(upper), &INNER)?.value
    } else {
        0.0
    };
    if t > upper {
        area += t - upper;
    }
    Ok(area / f)
}

/// `μ̃_ψ(t)` without the domain-floor check; `t = ∞` gives `∫₀^∞ φ F`.
pub(crate) fn wmit_unchecked(d: &dyn Distribution, w: &WeightFn, t: f64) -> Result<f64> {
    if w.is_identity() && t.is_finite() {
        return mit_unchecked(d, t);
    }
    let f = if t.is_infinite() { 1.0 } else { d.cdf(t) };
    if !(f > 0.0) {
        return Err(Error::BelowDomainFloor { x: t, cdf: f, floor: 0.0 });
    }
    let (lower, _) = d.support();
    let integral = integral_phi_f(d, w, lower, t).map_err(|e| {
        if t.is_infinite() {
            e.into_divergence("limit of the weighted inactivity time")
        } else {
            e
        }
    })?;
    if integral.is_infinite() {
        return Err(Error::Divergent {
            what: "limit of the weighted inactivity time".into(),
        });
    }
    Ok(integral / f)
}

/// Mean inactivity time `μ̃(t) = (1/F(t)) ∫₀ᵗ F`.
pub fn mit(d: &dyn Distribution, t: f64) -> Result<f64> {
    cdf_in_domain(d, t)?;
    mit_unchecked(d, t)
}

/// Weighted mean inactivity time `μ̃_ψ(t) = (1/F(t)) ∫₀ᵗ φ F`.
/// `t = f64::INFINITY` returns the limit `∫₀^∞ φ F` (finite only for bounded `ψ`).
pub fn wmit(d: &dyn Distribution, w: &WeightFn, t: f64) -> Result<f64> {
    if t.is_finite() {
        cdf_in_domain(d, t)?;
    }
    wmit_unchecked(d, w, t)
}

/// `μ̃_ψ` at every point of `ts` with one pass of piecewise integrals.
pub fn wmit_many(d: &dyn Distribution, w: &WeightFn, ts: &[f64]) -> Result<Vec<f64>> {
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&i, &j| ts[i].total_cmp(&ts[j]));
    let mut out = vec![0.0; ts.len()];
    let mut prev = d.support().0;
    let mut acc = 0.0;
    for &i in &order {
        let t = ts[i];
        let f = cdf_in_domain(d, t)?;
        if t > prev {
            acc += integral_phi_f(d, w, prev, t)?;
            prev = t;
        }
        out[i] = acc / f;
    }
    Ok(out)
}

/// Weighted mean residual life `(1/F̄(t)) ∫ₜ^∞ φ F̄`.
pub fn wmrl(d: &dyn Distribution, w: &WeightFn, t: f64) -> Result<f64> {
    let s = d.survival(t);
    if !(s >= crate::dist::DOMAIN_FLOOR) {
        return Err(Error::BelowDomainFloor {
            x: t,
            cdf: s,
            floor: crate::dist::DOMAIN_FLOOR,
        });
    }
    let (lower, upper) = d.support();
    let a = t.max(lower);
    let what = "E[ψ(X)] (weighted residual integral)";
    if !w.has_finite_psi() {
        return Err(Error::Divergent { what: what.into() });
    }
    let tail = integrate_with(
        |x| {
            let sx = d.survival(x);
            if sx == 0.0 { 0.0 } else { w.phi(x) * sx }
        },
        a,
        upper,
        &QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 2000 },
    )
    .map_err(|e| if upper.is_infinite() { e.into_divergence(what) } else { e })?
    .value;
    // Below the support F̄ = 1, contributing ψ(lower) - ψ(t).
    let head = if t < lower { w.psi(lower) - w.psi(t) } else { 0.0 };
    Ok((tail + head) / s)
}

/// `E[ψ(X) | X <= t]`, cross-checked against `ψ(t) - μ̃_ψ(t)`.
pub fn weighted_past_mean(d: &dyn Distribution, w: &WeightFn, t: f64) -> Result<f64> {
    let f = cdf_in_domain(d, t)?;
    if !w.has_finite_psi() {
        return Err(Error::Divergent {
            what: "E[ψ(X) | X <= t] (ψ is infinite)".into(),
        });
    }
    let (lower, upper) = d.support();
    let past = if d.has_pdf() {
        let end = t.min(upper);
        let r = integrate_with(|x| w.psi(x) * d.pdf(x).unwrap_or(f64::NAN), lower, end, &INNER)?;
        r.value / f
    } else {
        // Stieltjes form: ψ(t) F(t) - ∫ φ F.
        w.psi(t) - integral_phi_f(d, w, lower, t)? / f
    };
    let via_wmit = w.psi(t) - wmit_unchecked(d, w, t)?;
    let residual = (past - via_wmit).abs();
    let tolerance = 1e-7 * (1.0 + w.psi(t).abs());
    if residual > tolerance {
        return Err(Error::Consistency {
            what: format!("weighted past mean of {} at t = {t}", describe(d)),
            residual,
            tolerance,
        });
    }
    Ok(past)
}

/// A `(distribution, weight)` pair viewed as the curve `t ↦ μ̃_ψ(t)`.
#[derive(Debug, Clone)]
pub struct WmitFn {
    pub dist: Dist,
    pub weight: WeightFn,
}

impl WmitFn {
    pub fn new(dist: Dist, weight: WeightFn) -> Self {
        WmitFn { dist, weight }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        wmit(self.dist.as_ref(), &self.weight, t)
    }

    /// `φ(t) - τ(t) μ̃_ψ(t)`.
    pub fn deriv(&self, t: f64) -> Result<f64> {
        let tau = reversed_hazard(self.dist.as_ref(), t)?;
        Ok(self.weight.phi(t) - tau * self.eval(t)?)
    }

    /// Central difference with step `1e-5 (1 + t)`; the increment integral
    /// is computed on its own so the base integral cancels exactly.
    pub fn deriv_numeric(&self, t: f64) -> Result<f64> {
        let d = self.dist.as_ref();
        let (lower, upper) = d.support();
        let h = (1e-5 * (1.0 + t.abs())).min(0.5 * (t - lower));
        let (a, b) = if t + h <= upper { (t - h, t + h) } else { (t - 2.0 * h, t) };
        if !(h > 0.0) || a <= lower {
            return Err(Error::invalid(format!("t = {t} too close to the lower support end")));
        }
        let fa = cdf_in_domain(d, a)?;
        let fb = d.cdf(b);
        let base = integral_phi_f(d, &self.weight, lower, a)?;
        let delta = integral_phi_f(d, &self.weight, a, b)?;
        Ok((base * (1.0 / fb - 1.0 / fa) + delta / fb) / (b - a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeCheck {
    pub max_residual: f64,
    pub worst_t: f64,
}

/// Largest gap between the numerical derivative of `μ̃_ψ` and `φ - τ μ̃_ψ` on `grid`.
pub fn wmit_derivative_check(d: &Dist, w: &WeightFn, grid: &Grid) -> Result<DerivativeCheck> {
    require_density(d.as_ref())?;
    let curve = WmitFn::new(d.clone(), w.clone());
    let mut worst = DerivativeCheck {
        max_residual: 0.0,
        worst_t: grid.lo(),
    };
    for &t in grid.points() {
        let r = (curve.deriv_numeric(t)? - curve.deriv(t)?).abs();
        if !r.is_finite() {
            return Err(Error::NonFiniteIntegrand { x: t });
        }
        if r > worst.max_residual {
            worst = DerivativeCheck {
                max_residual: r,
                worst_t: t,
            };
        }
    }
    Ok(worst)
}

/// Recovers `F(t) = exp(-∫ₜ^upper (φ - μ̃_ψ') / μ̃_ψ)` from a WMIT curve,
/// with `upper` standing in for infinity.
///
/// The finiteness conditions at infinity cannot be checked from finitely many
/// evaluations and are the caller's responsibility.
pub fn reconstruct_cdf<M, D>(wmit_curve: M, wmit_deriv: D, w: &WeightFn, t: f64, upper: f64) -> Result<f64>
where
    M: Fn(f64) -> Result<f64>,
    D: Fn(f64) -> Result<f64>,
{
    if !(t < upper) {
        return Err(Error::invalid(format!("reconstruction needs t < upper, got {t} >= {upper}")));
    }
    let r = integrate_try(
        |x| {
            let m = wmit_curve(x)?;
            if !(m > 0.0) {
                return Err(Error::Characterization { x });
            }
            Ok((w.phi(x) - wmit_deriv(x)?) / m)
        },
        t,
        upper,
        &QuadOptions { abs_tol: 1e-10, rel_tol: 1e-10, max_intervals: 2000 },
    )?;
    let value = (-r.value).exp();
    if value > 1.0 + 1e-6 {
        return Err(Error::Consistency {
            what: "reconstructed CDF exceeds one".into(),
            residual: value - 1.0,
            tolerance: 1e-6,
        });
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reconstruction {
    pub value: f64,
    pub exact: f64,
    pub horizon: f64,
    /// `1 - F(horizon)`: the mass ignored by truncating at the horizon.
    pub tail_mass: f64,
}

/// Round trip `F → μ̃_ψ → F` at `t`, differentiating `μ̃_ψ` numerically.
/// The horizon is the upper support end or the `1 - 1e-10` quantile.
pub fn reconstruct_from_distribution(d: &Dist, w: &WeightFn, t: f64) -> Result<Reconstruction> {
    let (_, upper) = d.support();
    let horizon = if upper.is_finite() { upper } else { d.quantile(1.0 - 1e-10)? };
    let curve = WmitFn::new(d.clone(), w.clone());
    let value = reconstruct_cdf(
        |x| wmit(d.as_ref(), w, x),
        |x| curve.deriv_numeric(x),
        w,
        t,
        horizon,
    )?;
    Ok(Reconstruction {
        value,
        exact: d.cdf(t),
        horizon,
        tail_mass: d.survival(horizon),
    })
}

/// Verdicts behind the sufficient conditions for an increasing WMIT.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IwmitReport {
    /// Monotonicity of `μ̃_ψ` itself.
    pub direct: MonotoneVerdict,
    /// (i) `φ / τ` increasing.
    pub cond_i: MonotoneVerdict,
    /// (ii) `φ` increasing, and `μ̃` increasing.
    pub cond_ii: (MonotoneVerdict, MonotoneVerdict),
    /// (iii) `ψ τ / φ` decreasing (not evaluated when `ψ` is infinite).
    pub cond_iii: Option<MonotoneVerdict>,
    /// `τ` decreasing and `ψ` convex.
    pub drhr_shortcut: bool,
    /// `x τ(x)` decreasing, only for power weights.
    pub x_tau_shortcut: Option<MonotoneVerdict>,
    /// Some sufficient condition holds on the grid.
    pub sufficient: bool,
    /// False when a sufficient condition holds but `μ̃_ψ` is not increasing.
    pub consistent: bool,
    pub grid: String,
}

fn verdict_of(grid: &Grid, values: &[f64]) -> Result<MonotoneVerdict> {
    classify_sequence(grid.points(), values, default_band(values))
}

pub fn iwmit_classify(d: &Dist, w: &WeightFn, grid: &Grid) -> Result<IwmitReport> {
    require_density(d.as_ref())?;
    let dist = d.as_ref();
    let pts = grid.points();
    let curve = wmit_many(dist, w, pts)?;
    let mits = wmit_many(dist, &WeightFn::identity(), pts)?;
    let mut tau = Vec::with_capacity(pts.len());
    let mut phi = Vec::with_capacity(pts.len());
    for &x in pts {
        tau.push(reversed_hazard(dist, x)?);
        phi.push(w.phi(x));
    }

    let direct = verdict_of(grid, &curve)?;
    let ratio_i: Vec<f64> = phi.iter().zip(&tau).map(|(p, t)| p / t).collect();
    let cond_i = verdict_of(grid, &ratio_i)?;
    let phi_v = verdict_of(grid, &phi)?;
    let imit = verdict_of(grid, &mits)?;
    let cond_iii = if w.has_finite_psi() && phi.iter().all(|&p| p > 0.0) {
        let v: Vec<f64> = pts
            .iter()
            .zip(tau.iter().zip(&phi))
            .map(|(&x, (t, p))| w.psi(x) * t / p)
            .collect();
        Some(verdict_of(grid, &v)?)
    } else {
        None
    };
    let tau_v = verdict_of(grid, &tau)?;
    let drhr_shortcut = tau_v.is_weakly_decreasing() && w.effective_convexity(grid).0.is_convex();
    let x_tau_shortcut = match w.kind() {
        crate::weights::WeightKind::Power { .. }
        | crate::weights::WeightKind::Identity
        | crate::weights::WeightKind::HalfSquare => {
            let v: Vec<f64> = pts.iter().zip(&tau).map(|(x, t)| x * t).collect();
            Some(verdict_of(grid, &v)?)
        }
        _ => None,
    };

    let sufficient = cond_i.is_weakly_increasing()
        || (phi_v.is_weakly_increasing() && imit.is_weakly_increasing())
        || cond_iii.map(|v| v.is_weakly_decreasing()).unwrap_or(false)
        || drhr_shortcut;
    let consistent = !sufficient || direct.is_weakly_increasing();
    Ok(IwmitReport {
        direct,
        cond_i,
        cond_ii: (phi_v, imit),
        cond_iii,
        drhr_shortcut,
        x_tau_shortcut,
        sufficient,
        consistent,
        grid: grid.label().to_string(),
    })
}

/// Whether any (distribution, weight) curve on the grid is decreasing overall;
/// such a curve cannot exist, so `true` signals a defect.
pub fn is_decreasing(v: &MonotoneVerdict) -> bool {
    v.kind == MonotoneKind::Decreasing
}

/// Dynamic cumulative entropy `(1/F(t)) ∫₀ᵗ f μ̃`; `t = ∞` gives the
/// cumulative entropy.
pub fn dynamic_cumulative_entropy(d: &dyn Distribution, t: f64) -> Result<f64> {
    require_density(d)?;
    let f_t = if t.is_finite() { cdf_in_domain(d, t)? } else { 1.0 };
    let (lower, upper) = d.support();
    let end = t.min(upper);
    let r = integrate_try(
        |x| {
            let fx = require_pdf(d, x)?;
            if fx == 0.0 || d.cdf(x) <= 0.0 {
                return Ok(0.0);
            }
            Ok(fx * mit_unchecked(d, x)?)
        },
        lower,
        end,
        &QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 2000 },
    )
    .map_err(|e| if end.is_infinite() { e.into_divergence("cumulative entropy") } else { e })?;
    Ok(r.value / f_t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AucReport {
    pub auc: f64,
    /// `m_G(0)`: weighted residual life at zero with weight `g`.
    pub via_wmrl: f64,
    /// `1 - μ̃_G(∞)`.
    pub via_wmit_limit: f64,
    /// `∫ G f`.
    pub direct: f64,
    /// `(|wmrl - wmit|, |wmrl - direct|, |wmit - direct|)`.
    pub residuals: (f64, f64, f64),
}

/// `P(Y < X) = E[G(X)]` for `X ~ F`, `Y ~ G`, computed three ways.
pub fn auc(x: &Dist, y: &Dist) -> Result<AucReport> {
    require_density(x.as_ref())?;
    let w = WeightFn::cdf_of(y.clone())?;
    let via_wmrl = wmrl(x.as_ref(), &w, x.support().0)?;
    let via_wmit_limit = 1.0 - wmit(x.as_ref(), &w, f64::INFINITY)?;
    let (lo, hi) = x.support();
    let direct = integrate_with(
        |t| {
            let fx = x.pdf(t).unwrap_or(f64::NAN);
            if fx == 0.0 { 0.0 } else { y.cdf(t) * fx }
        },
        lo,
        hi,
        &QuadOptions { abs_tol: 1e-14, rel_tol: 1e-13, max_intervals: 2000 },
    )
    .map_err(|e| if hi.is_infinite() { e.into_divergence("E[G(X)]") } else { e })?
    .value;
    Ok(AucReport {
        auc: direct,
        via_wmrl,
        via_wmit_limit,
        direct,
        residuals: (
            (via_wmrl - via_wmit_limit).abs(),
            (via_wmrl - direct).abs(),
            (via_wmit_limit - direct).abs(),
        ),
    })
}

/// Mean time to failure under age replacement at `t`: `(1/F(t)) ∫₀ᵗ F̄`.
pub fn age_replacement_mttf(d: &dyn Distribution, t: f64) -> Result<f64> {
    let f = cdf_in_domain(d, t)?;
    let (lower, upper) = d.support();
    let area = if t > lower {
        integrate_with(|x| d.survival(x), lower, t.min(upper), &INNER)?.value
    } else {
        0.0
    };
    Ok(area / f)
}

/// The limit at the origin, evaluated at `t = quantile(1e-8)`.
pub fn age_replacement_mttf_at_origin(d: &dyn Distribution) -> Result<f64> {
    let t = d.quantile(1e-8)?;
    age_replacement_mttf(d, t)
}
