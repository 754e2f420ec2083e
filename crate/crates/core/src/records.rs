//! Lower record values: their laws, exact sampling, and the Monte Carlo
//! checks of the record representations of the weighted cumulative entropy.
//!
//! `RecordModel::new(base, n)` is the law of the `(n+1)`-th lower record,
//! `F_{n+1} = F Σ_{k<=n} Tᵏ/k!`. The first record (`n = 0`) is the base draw,
//! so the record written `X_m` with `X_1 = X` is `RecordModel::new(base, m - 1)`.

use serde::Serialize;

use crate::dist::{describe, neg_log_cdf, require_density, require_pdf, sample, Dist, Distribution, DOMAIN_FLOOR};
use crate::error::{Error, Result};
use crate::inactivity::wmit_many;
use crate::infomeasures::{wgce, MAX_ORDER};
use crate::numerics::{ln_factorial, log_poisson_weight, summarize};
use crate::weights::WeightFn;

/// Largest record index `m` (in the `X_m`, `X_1 = X` convention) accepted by the identity checks.
pub const MAX_CHECK_INDEX: u32 = 5;

/// `P(Poisson(s) <= n)`.
fn poisson_cdf(n: u32, s: f64) -> f64 {
    if s == 0.0 {
        return 1.0;
    }
    if s.is_infinite() {
        return 0.0;
    }
    (0..=n)
        .map(|k| (log_poisson_weight(k, s).unwrap_or(f64::NEG_INFINITY) - s).exp())
        .sum::<f64>()
        .min(1.0)
}

/// `P(Poisson(s) > n)`, summed directly when the tail is small.
fn poisson_tail(n: u32, s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    if s.is_infinite() {
        return 1.0;
    }
    if s > (n + 1) as f64 {
        return 1.0 - poisson_cdf(n, s);
    }
    let mut total = 0.0;
    let mut k = n + 1;
    loop {
        let term = (k as f64 * s.ln() - ln_factorial(k) - s).exp();
        total += term;
        if term < 1e-18 * total || k > n + 400 {
            break;
        }
        k += 1;
    }
    total
}

#[derive(Debug, Clone)]
pub struct RecordModel {
    base: Dist,
    n: u32,
}

impl RecordModel {
    /// The `(n+1)`-th lower record; `n <= 20`.
    pub fn new(base: Dist, n: u32) -> Result<Self> {
        if n > MAX_ORDER {
            return Err(Error::OrderGuard {
                n,
                min: 0,
                max: MAX_ORDER,
            });
        }
        Ok(RecordModel { base, n })
    }

    /// The record written `X_m` with `X_1 = X`; rejects `m = 0`.
    pub fn one_based(base: Dist, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::OrderGuard {
                n: 0,
                min: 1,
                max: MAX_ORDER + 1,
            });
        }
        Self::new(base, m - 1)
    }

    pub fn base(&self) -> &Dist {
        &self.base
    }

    pub fn index(&self) -> u32 {
        self.n
    }

    /// Solves `P(Poisson(s) <= n) = p` for `s = T(x)` by bisection.
    fn level_to_t(&self, p: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while poisson_cdf(self.n, hi) > p {
            lo = hi;
            hi *= 2.0;
            if hi > 1e6 {
                break;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if poisson_cdf(self.n, mid) > p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

impl Distribution for RecordModel {
    fn name(&self) -> String {
        format!("record[{}]", describe(self.base.as_ref()))
    }

    fn params(&self) -> Vec<(String, f64)> {
        vec![("index".to_string(), self.n as f64)]
    }

    fn support(&self) -> (f64, f64) {
        self.base.support()
    }

    fn cdf(&self, x: f64) -> f64 {
        if self.base.cdf(x) <= 0.0 {
            return 0.0;
        }
        poisson_cdf(self.n, neg_log_cdf(self.base.as_ref(), x))
    }

    fn survival(&self, x: f64) -> f64 {
        if self.base.cdf(x) <= 0.0 {
            return 1.0;
        }
        poisson_tail(self.n, neg_log_cdf(self.base.as_ref(), x))
    }

    fn pdf(&self, x: f64) -> Option<f64> {
        let f = self.base.pdf(x)?;
        if f == 0.0 || self.base.cdf(x) <= 0.0 {
            return Some(0.0);
        }
        let t = neg_log_cdf(self.base.as_ref(), x);
        let lw = log_poisson_weight(self.n, t).ok()?;
        Some(f * lw.exp())
    }

    fn has_pdf(&self) -> bool {
        self.base.has_pdf()
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!("probability level {p} must lie in (0, 1)")));
        }
        let s = self.level_to_t(p);
        let u = (-s).exp();
        let u = if u >= 1.0 { -(-s).exp_m1() } else { u };
        self.base.quantile(u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON))
    }

    fn log_cdf(&self, x: f64) -> f64 {
        self.cdf(x).ln()
    }
}

/// `F_{n+1}(x)`.
pub fn record_cdf(model: &RecordModel, x: f64) -> f64 {
    model.cdf(x)
}

/// Exact draws of the `(n+1)`-th lower record by inversion.
pub fn sample_records(base: &Dist, n: u32, count: usize, seed: u64) -> Result<Vec<f64>> {
    sample_records_stream(base, n, count, seed, 0)
}

/// As [`sample_records`] on an explicit stream; concurrent batches need distinct streams.
pub fn sample_records_stream(base: &Dist, n: u32, count: usize, seed: u64, stream: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let model = RecordModel::new(base.clone(), n)?;
    sample(&model, count, seed, stream)
}

/// A Monte Carlo estimate compared with its target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McCheck {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub target: f64,
    /// `(estimate - target) / std_error`.
    pub z: f64,
    pub count: usize,
    /// Draws dropped because `F` fell below the domain floor.
    pub excluded: usize,
}

impl McCheck {
    pub fn new(name: &str, estimate: f64, std_error: f64, target: f64, count: usize, excluded: usize) -> Self {
        let z = if std_error > 0.0 {
            (estimate - target) / std_error
        } else if estimate == target {
            0.0
        } else {
            f64::INFINITY
        };
        McCheck {
            name: name.into(),
            estimate,
            std_error,
            target,
            z,
            count,
            excluded,
        }
    }

    /// `|z| <= k`.
    pub fn within(&self, k: f64) -> bool {
        self.z.abs() <= k
    }
}

fn check_index(m: u32) -> Result<()> {
    if (1..=MAX_CHECK_INDEX).contains(&m) {
        Ok(())
    } else {
        Err(Error::OrderGuard {
            n: m,
            min: 1,
            max: MAX_CHECK_INDEX,
        })
    }
}

fn split_domain(base: &dyn Distribution, xs: Vec<f64>) -> (Vec<f64>, usize) {
    let before = xs.len();
    let kept: Vec<f64> = xs.into_iter().filter(|&x| base.cdf(x) >= DOMAIN_FLOOR).collect();
    let excluded = before - kept.len();
    (kept, excluded)
}

/// `E[μ̃_ψ(X_m)]` by Monte Carlo against `CE_{ψ,m}` (`X_1 = X`).
pub fn rit_identity_check(base: &Dist, w: &WeightFn, m: u32, count: usize, seed: u64) -> Result<McCheck> {
    check_index(m)?;
    let xs = sample_records(base, m - 1, count, seed)?;
    let (xs, excluded) = split_domain(base.as_ref(), xs);
    let vals = wmit_many(base.as_ref(), w, &xs)?;
    let s = summarize(&vals);
    let target = wgce(base.as_ref(), w, m)?.value;
    Ok(McCheck::new("E[wmit(X_m)]", s.mean, s.std_error, target, xs.len(), excluded))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovIdentityReport {
    pub dist: String,
    pub weight: String,
    pub m: u32,
    /// `(1/m) E[φ(X_m) T(X_m) / τ(X_m)]` against `CE_{ψ,m}`.
    pub ratio_form: McCheck,
    /// `(1/m) Cov[ψ(X_m), T(X_m)]` against `-CE_{ψ,m}`.
    pub covariance_form: McCheck,
}

/// Both covariance-type record identities by Monte Carlo.
pub fn cov_identity_check(base: &Dist, w: &WeightFn, m: u32, count: usize, seed: u64) -> Result<CovIdentityReport> {
    check_index(m)?;
    let d = base.as_ref();
    require_density(d)?;
    if !w.has_finite_psi() {
        return Err(Error::Divergent {
            what: "ψ(X_m) (ψ is infinite)".into(),
        });
    }
    let target = wgce(d, w, m)?.value;
    let xs = sample_records(base, m - 1, count, seed)?;
    let (xs, excluded) = split_domain(d, xs);
    let mf = m as f64;

    let mut ratio = Vec::with_capacity(xs.len());
    for &x in &xs {
        let big_f = d.cdf(x);
        let t = -d.log_cdf(x);
        let f = require_pdf(d, x)?;
        // T/τ = T F / f; zero density contributes nothing to the expectation.
        ratio.push(if f > 0.0 { w.phi(x) * t * big_f / f / mf } else { 0.0 });
    }
    let s = summarize(&ratio);
    let ratio_form = McCheck::new("(1/m)E[phi T/tau]", s.mean, s.std_error, target, xs.len(), excluded);

    let psi: Vec<f64> = xs.iter().map(|&x| w.psi(x)).collect();
    let tt: Vec<f64> = xs.iter().map(|&x| -d.log_cdf(x)).collect();
    let (mp, mt) = (summarize(&psi).mean, summarize(&tt).mean);
    let prods: Vec<f64> = psi.iter().zip(&tt).map(|(a, b)| (a - mp) * (b - mt) / mf).collect();
    let sp = summarize(&prods);
    let nn = prods.len() as f64;
    let cov = sp.mean * nn / (nn - 1.0);
    let covariance_form = McCheck::new("(1/m)Cov[psi, T]", cov, sp.std_error, -target, xs.len(), excluded);

    Ok(CovIdentityReport {
        dist: describe(d),
        weight: w.label(),
        m,
        ratio_form,
        covariance_form,
    })
}

/// `E[ψ(X_m)] - E[ψ(X_{m+1})]` from independent samples against `CE_{ψ,m}`.
pub fn telescoping_check(base: &Dist, w: &WeightFn, m: u32, count: usize, seed: u64) -> Result<McCheck> {
    check_index(m)?;
    let a = sample_records_stream(base, m - 1, count, seed, 1)?;
    let b = sample_records_stream(base, m, count, seed, 2)?;
    let sa = summarize(&a.iter().map(|&x| w.psi(x)).collect::<Vec<_>>());
    let sb = summarize(&b.iter().map(|&x| w.psi(x)).collect::<Vec<_>>());
    let target = wgce(base.as_ref(), w, m)?.value;
    let se = (sa.std_error.powi(2) + sb.std_error.powi(2)).sqrt();
    Ok(McCheck::new("E[psi(X_m)] - E[psi(X_m+1)]", sa.mean - sb.mean, se, target, count, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Exponential, Uniform};
    use crate::numerics::{integrate, ks_critical_value, ks_statistic};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn unif() -> Dist {
        Arc::new(Uniform::new(1.0).unwrap())
    }
    fn exp1() -> Dist {
        Arc::new(Exponential::new(1.0).unwrap())
    }

    #[test]
    fn record_cdf_examples() {
        let m0 = RecordModel::new(unif(), 0).unwrap();
        assert_abs_diff_eq!(record_cdf(&m0, 0.3), 0.3, epsilon = 1e-15);
        let m1 = RecordModel::new(unif(), 1).unwrap();
        assert_abs_diff_eq!(record_cdf(&m1, 0.5), 0.5 * (1.0 + 2f64.ln()), epsilon = 1e-12);
        assert!(RecordModel::new(unif(), 21).is_err());
        assert!(RecordModel::one_based(unif(), 0).is_err());
    }

    #[test]
    fn pdf_normalized_and_survival_consistent() {
        for n in 1..=5 {
            let m = RecordModel::new(exp1(), n).unwrap();
            let total = integrate(|x| m.pdf(x).unwrap(), 0.0, f64::INFINITY, 1e-10).unwrap().value;
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
            for x in [0.01, 0.5, 2.0, 10.0] {
                assert_abs_diff_eq!(m.cdf(x) + m.survival(x), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn derivative_of_cdf_matches_pdf() {
        for n in 1..=3 {
            let m = RecordModel::new(exp1(), n).unwrap();
            for x in [0.1, 0.7, 1.5, 4.0] {
                let h = 1e-5;
                let num = (m.cdf(x + h) - m.cdf(x - h)) / (2.0 * h);
                assert_abs_diff_eq!(num, m.pdf(x).unwrap(), epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn quantile_round_trip() {
        let m = RecordModel::new(exp1(), 3).unwrap();
        for p in [1e-6, 0.1, 0.5, 0.9, 1.0 - 1e-9] {
            let x = m.quantile(p).unwrap();
            assert!((m.cdf(x) - p).abs() <= 1e-9 * p.min(1.0 - p) + 1e-15, "p={p}");
        }
    }

    #[test]
    fn sampling_examples() {
        let xs = sample_records(&unif(), 0, 100_000, 7).unwrap();
        assert!(ks_statistic(&xs, |x| x.clamp(0.0, 1.0)) <= 0.01);
        let again = sample_records(&unif(), 0, 100_000, 7).unwrap();
        assert_eq!(xs, again);

        // E[F(X_2)] for a uniform base: ∫₀¹ x (-log x) dx = 1/4.
        let xs = sample_records(&unif(), 1, 100_000, 11).unwrap();
        let s = summarize(&xs);
        assert!(((s.mean - 0.25) / s.std_error).abs() <= 3.0);
        let m = RecordModel::new(unif(), 1).unwrap();
        assert!(ks_statistic(&xs, |x| m.cdf(x)) <= ks_critical_value(xs.len(), 1e-3));
    }

    #[test]
    fn rit_examples() {
        let c = rit_identity_check(&unif(), &WeightFn::identity(), 1, 100_000, 3).unwrap();
        assert_abs_diff_eq!(c.target, 0.25, epsilon = 1e-10);
        assert!(c.within(3.0), "{c:?}");
        let c = rit_identity_check(&unif(), &WeightFn::identity(), 2, 100_000, 4).unwrap();
        assert_abs_diff_eq!(c.target, 0.125, epsilon = 1e-10);
        assert!(c.within(3.0), "{c:?}");
        let c = rit_identity_check(&unif(), &WeightFn::half_square(), 1, 100_000, 5).unwrap();
        assert_abs_diff_eq!(c.target, 1.0 / 9.0, epsilon = 1e-10);
        assert!(c.within(3.0), "{c:?}");
        assert!(rit_identity_check(&unif(), &WeightFn::identity(), 0, 10, 1).is_err());
    }

    #[test]
    fn cov_examples() {
        let r = cov_identity_check(&unif(), &WeightFn::identity(), 1, 100_000, 8).unwrap();
        assert_abs_diff_eq!(r.covariance_form.target, -0.25, epsilon = 1e-10);
        assert!(r.covariance_form.within(3.0) && r.ratio_form.within(3.0), "{r:?}");
        let r = cov_identity_check(&unif(), &WeightFn::half_square(), 1, 100_000, 9).unwrap();
        assert!(r.covariance_form.within(3.0) && r.ratio_form.within(3.0), "{r:?}");
        let r = cov_identity_check(&exp1(), &WeightFn::identity(), 1, 100_000, 10).unwrap();
        let pi = std::f64::consts::PI;
        assert_abs_diff_eq!(r.covariance_form.target, -(pi * pi / 6.0 - 1.0), epsilon = 1e-8);
        assert!(r.covariance_form.within(3.0) && r.ratio_form.within(3.0), "{r:?}");
    }
}
