//! Deterministic numerical kernels shared by every other module.
//!
//! - [`integrate`]: globally adaptive Gauss–Kronrod (7/15) quadrature with
//!   interval bisection. Unbounded upper limits are mapped onto `(0, 1)`
//!   through `x = a + s / (1 - s)`; the open rule never evaluates an endpoint,
//!   so integrable endpoint singularities (`-log x`, `(-log p)^k`) are handled
//!   without special casing.
//! - [`invert_cdf`]: bracketed bisection for the left-continuous inverse,
//!   with an optional Newton polish when a density is available.
//! - [`monotone_on_grid`]: finite certification of "is increasing in t".
//! - [`log_poisson_weight`]: `k log L - log k!` in the log domain.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Default absolute tolerance for [`integrate`].
pub const DEFAULT_TOL: f64 = 1e-8;

/// Default number of points in a certification grid.
pub const DEFAULT_GRID_POINTS: usize = 512;

/// Relative width at which [`invert_cdf`] stops bisecting.
const BISECTION_WIDTH: f64 = 1e-12;

// Gauss–Kronrod 7/15 abscissae and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    /// Absolute error estimate, always `>= 0`.
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Stopping rule for [`integrate_with`]: converged once the summed error
/// estimate is below `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: DEFAULT_TOL,
            rel_tol: 1e-12,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        QuadOptions {
            abs_tol: tol,
            ..Default::default()
        }
    }

    /// Mostly relative tolerance; used for inner integrals whose value is
    /// later divided by a small probability.
    pub fn relative(rel_tol: f64) -> Self {
        QuadOptions {
            abs_tol: 1e-300,
            rel_tol,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> std::result::Result<Segment, f64> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> std::result::Result<f64, f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(x)
        }
    };

    let fc = eval(center)?;
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

/// Stalled splits tolerated before the rounding floor is declared.
const ROUNDOFF_SPLITS: usize = 10;
/// At the rounding floor, results within this multiple of the requested
/// tolerance are accepted (the error estimate is still reported).
const ROUNDOFF_SLACK: f64 = 1e4;

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult> {
    let first = gk15(f, a, b).map_err(|x| Error::NonFiniteIntegrand { x })?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut total = first.value;
    let mut total_err = first.error;
    // Splits whose halves agree with the parent but whose error estimate
    // does not shrink: the integrand's own rounding noise has been reached.
    let mut roundoff = 0;

    loop {
        let tolerance = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= tolerance {
            break;
        }
        if roundoff >= ROUNDOFF_SPLITS {
            if total_err <= ROUNDOFF_SLACK * tolerance {
                break;
            }
            return Err(Error::NonConvergence {
                best: total,
                error_estimate: total_err,
            });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::NonConvergence {
                best: total,
                error_estimate: total_err,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-15 * mid.abs() {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        let left = gk15(f, worst.a, mid).map_err(|x| Error::NonFiniteIntegrand { x })?;
        let right = gk15(f, mid, worst.b).map_err(|x| Error::NonFiniteIntegrand { x })?;
        evaluations += 30;
        let halves = left.value + right.value;
        if (worst.value - halves).abs() <= 1e-5 * halves.abs() && left.error + right.error >= 0.99 * worst.error {
            roundoff += 1;
        }
        heap.push(left);
        heap.push(right);
        // Re-sum instead of updating incrementally to keep cancellation error out.
        total = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
        total_err = frozen_error + heap.iter().map(|s| s.error).sum::<f64>();
    }

    let tolerance = opts.abs_tol.max(opts.rel_tol * total.abs());
    if total_err > tolerance && heap.is_empty() {
        // Every interval hit the resolution floor.
        return Err(Error::NonConvergence {
            best: total,
            error_estimate: total_err,
        });
    }
    Ok(QuadResult {
        value: total,
        error_estimate: total_err,
        evaluations,
    })
}

/// Integrates `f` over `(a, b)` to absolute tolerance `tol`; `b` may be
/// `f64::INFINITY`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    integrate_with(f, a, b, &QuadOptions::absolute(tol))
}

pub fn integrate_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(opts.abs_tol > 0.0) || !(opts.rel_tol >= 0.0) {
        return Err(Error::invalid("quadrature tolerance must be positive"));
    }
    if a.is_nan() || b.is_nan() || !a.is_finite() || !(a < b) {
        return Err(Error::invalid(format!(
            "integration limits must satisfy a < b with finite a (got a = {a}, b = {b})"
        )));
    }
    if b.is_infinite() {
        let mapped = |s: f64| {
            let one_minus = 1.0 - s;
            let x = a + s / one_minus;
            if !x.is_finite() {
                return 0.0;
            }
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v / (one_minus * one_minus)
            }
        };
        adaptive(&mapped, 0.0, 1.0, opts).map_err(|e| match e {
            Error::NonFiniteIntegrand { x: s } => Error::NonFiniteIntegrand {
                x: a + s / (1.0 - s),
            },
            other => other,
        })
    } else {
        adaptive(&f, a, b, opts)
    }
}

/// Like [`integrate_with`] for integrands that can fail; the first inner
/// error aborts the quadrature and is returned unchanged.
pub(crate) fn integrate_try<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let result = integrate_with(
        |x| {
            if failure.borrow().is_some() {
                return f64::NAN;
            }
            match f(x) {
                Ok(v) => v,
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    f64::NAN
                }
            }
        },
        a,
        b,
        opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    result
}

/// Left-continuous inverse `inf{x : F(x) >= p}` of a nondecreasing `cdf` on
/// `bracket`, by bisection.
pub fn invert_cdf<F: Fn(f64) -> f64>(cdf: F, p: f64, bracket: (f64, f64), tol: f64) -> Result<f64> {
    invert_cdf_impl(&cdf, None::<&fn(f64) -> f64>, p, bracket, tol)
}

/// [`invert_cdf`] followed by one Newton step using `pdf`.
pub fn invert_cdf_with_pdf<F, G>(cdf: F, pdf: G, p: f64, bracket: (f64, f64), tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    invert_cdf_impl(&cdf, Some(&pdf), p, bracket, tol)
}

fn invert_cdf_impl<F, G>(cdf: &F, pdf: Option<&G>, p: f64, bracket: (f64, f64), tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("probability must lie in (0, 1), got {p}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("inversion tolerance must be positive"));
    }
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::invalid(format!("empty bracket ({lo}, {hi})")));
    }
    let f_lo = cdf(lo);
    let f_hi = cdf(hi);
    if !(f_lo <= p && p <= f_hi) {
        return Err(Error::Bracket {
            p,
            lo_value: f_lo,
            hi_value: f_hi,
        });
    }
    if f_lo >= p {
        return Ok(lo);
    }
    // Invariant: F(lo) < p <= F(hi).
    for _ in 0..400 {
        let width = hi - lo;
        if width <= BISECTION_WIDTH * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let mid = lo + 0.5 * width;
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) >= p {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut x = hi;
    if let Some(pdf) = pdf {
        let fx = cdf(x);
        let density = pdf(x);
        if density > 0.0 && density.is_finite() {
            let candidate = x - (fx - p) / density;
            if candidate.is_finite()
                && candidate >= lo
                && candidate <= hi
                && (cdf(candidate) - p).abs() < (fx - p).abs()
            {
                x = candidate;
            }
        }
    }
    Ok(x)
}

/// Grows `hi` geometrically until `cdf(hi) >= p`.
pub fn expand_bracket<F: Fn(f64) -> f64>(cdf: F, p: f64, lo: f64, start: f64) -> Result<(f64, f64)> {
    let mut hi = start.max(lo + 1.0);
    for _ in 0..2100 {
        if cdf(hi) >= p {
            return Ok((lo, hi));
        }
        hi = lo + 2.0 * (hi - lo);
        if !hi.is_finite() {
            break;
        }
    }
    Err(Error::Bracket {
        p,
        lo_value: cdf(lo),
        hi_value: cdf(f64::MAX),
    })
}

/// Ordered evaluation points for "for all t" certifications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    points: Vec<f64>,
    label: String,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Grid> {
        Self::labelled(points, "explicit".to_string())
    }

    fn labelled(points: Vec<f64>, label: String) -> Result<Grid> {
        if points.len() < 3 {
            return Err(Error::invalid("a grid needs at least 3 points"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("grid points must be finite"));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("grid points must be strictly increasing"));
        }
        Ok(Grid { points, label })
    }

    pub fn linear(lo: f64, hi: f64, n: usize) -> Result<Grid> {
        if !(lo < hi) || n < 3 {
            return Err(Error::invalid(format!("bad linear grid ({lo}, {hi}, {n})")));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        pts[n - 1] = hi;
        Self::labelled(pts, format!("linear[{lo}, {hi}; {n}]"))
    }

    pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Grid> {
        if !(lo > 0.0 && lo < hi) || n < 3 {
            return Err(Error::invalid(format!("bad logarithmic grid ({lo}, {hi}, {n})")));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let step = (b - a) / (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
        pts[0] = lo;
        pts[n - 1] = hi;
        pts.dedup();
        Self::labelled(pts, format!("log[{lo:e}, {hi:e}; {n}]"))
    }

    /// Adds `count` uniformly drawn interior points (deterministic in `seed`).
    pub fn with_random_extra(&self, count: usize, seed: u64) -> Grid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = (self.lo(), self.hi());
        let mut pts = self.points.clone();
        for _ in 0..count {
            pts.push(rng.random_range(lo..hi));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Grid {
            points: pts,
            label: format!("{} + {count} random (seed {seed})", self.label),
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Keeps only the points accepted by `keep`; `None` if fewer than 3 remain.
    pub fn restrict<P: Fn(f64) -> bool>(&self, keep: P) -> Option<Grid> {
        let pts: Vec<f64> = self.points.iter().copied().filter(|&t| keep(t)).collect();
        if pts.len() < 3 {
            return None;
        }
        Some(Grid {
            points: pts,
            label: format!("{} (restricted)", self.label),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonotoneKind {
    Increasing,
    Decreasing,
    NonMonotone,
    FlatWithinTolerance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneVerdict {
    pub kind: MonotoneKind,
    /// A pair `(t1, t2)`, `t1 < t2`, violating the increasing direction;
    /// present exactly when the kind is non-monotone.
    pub witness: Option<(f64, f64)>,
}

impl MonotoneVerdict {
    /// Increasing in the non-strict sense (flat counts).
    pub fn is_weakly_increasing(&self) -> bool {
        matches!(self.kind, MonotoneKind::Increasing | MonotoneKind::FlatWithinTolerance)
    }

    pub fn is_weakly_decreasing(&self) -> bool {
        matches!(self.kind, MonotoneKind::Decreasing | MonotoneKind::FlatWithinTolerance)
    }
}

/// The default tolerance band `1e-7 * (1 + max|f|)`.
pub fn default_band(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    1e-7 * (1.0 + scale)
}

/// Classifies `f` on `grid`; `band` absorbs evaluation noise.
pub fn monotone_on_grid<F: Fn(f64) -> f64>(f: F, grid: &Grid, band: f64) -> Result<MonotoneVerdict> {
    let values: Vec<f64> = grid.points().iter().map(|&t| f(t)).collect();
    classify_sequence(grid.points(), &values, band)
}

/// Monotonicity of `values[i]` over abscissae `points[i]`.
///
/// Increasing means no value drops more than `band` below the running
/// maximum and some value rises more than `band` above the running minimum.
pub fn classify_sequence(points: &[f64], values: &[f64], band: f64) -> Result<MonotoneVerdict> {
    if !(band >= 0.0) {
        return Err(Error::invalid("band must be non-negative"));
    }
    if points.len() != values.len() || points.len() < 2 {
        return Err(Error::invalid("need at least two matching points and values"));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteIntegrand { x: points[i] });
    }

    let total_variation: f64 = values.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    if total_variation <= band {
        return Ok(MonotoneVerdict {
            kind: MonotoneKind::FlatWithinTolerance,
            witness: None,
        });
    }

    let mut inc_violation = None;
    let mut dec_violation = None;
    let mut rises = false;
    let mut falls = false;
    let (mut max_i, mut min_i) = (0usize, 0usize);
    for j in 1..values.len() {
        let v = values[j];
        if inc_violation.is_none() && v < values[max_i] - band {
            inc_violation = Some((points[max_i], points[j]));
        }
        if dec_violation.is_none() && v > values[min_i] + band {
            dec_violation = Some((points[min_i], points[j]));
        }
        if v > values[min_i] + band {
            rises = true;
        }
        if v < values[max_i] - band {
            falls = true;
        }
        if v > values[max_i] {
            max_i = j;
        }
        if v < values[min_i] {
            min_i = j;
        }
    }

    let verdict = match (inc_violation, dec_violation) {
        (None, _) if rises => MonotoneVerdict {
            kind: MonotoneKind::Increasing,
            witness: None,
        },
        (_, None) if falls => MonotoneVerdict {
            kind: MonotoneKind::Decreasing,
            witness: None,
        },
        (None, None) => MonotoneVerdict {
            kind: MonotoneKind::FlatWithinTolerance,
            witness: None,
        },
        (Some(w), _) => MonotoneVerdict {
            kind: MonotoneKind::NonMonotone,
            witness: Some(w),
        },
        (None, Some(w)) => MonotoneVerdict {
            kind: MonotoneKind::NonMonotone,
            witness: Some(w),
        },
    };
    Ok(verdict)
}

/// `k log L - log Γ(k + 1)`, i.e. `log(L^k / k!)`, with `0 log 0 = 0`.
pub fn log_poisson_weight(k: u32, l: f64) -> Result<f64> {
    if !(l >= 0.0) {
        return Err(Error::invalid(format!("log_poisson_weight needs L >= 0, got {l}")));
    }
    if k == 0 {
        return Ok(0.0);
    }
    if l == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(k as f64 * l.ln() - ln_factorial(k))
}

pub(crate) fn ln_factorial(k: u32) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

/// Sample mean, unbiased variance and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSummary {
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub count: usize,
}

pub fn summarize(xs: &[f64]) -> SampleSummary {
    let n = xs.len();
    if n == 0 {
        return SampleSummary {
            mean: f64::NAN,
            variance: f64::NAN,
            std_error: f64::NAN,
            count: 0,
        };
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let variance = if n > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    SampleSummary {
        mean,
        variance,
        std_error: (variance / n as f64).sqrt(),
        count: n,
    }
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let fx = cdf(x);
            (fx - i as f64 / n).abs().max(((i + 1) as f64 / n - fx).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic critical value of the one-sample KS distance at level `alpha`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_and_exponential_integrals() {
        let r = integrate(|x| x, 0.0, 1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-14);
        assert!(r.error_estimate >= 0.0 && r.evaluations >= 1);

        let r = integrate(|x: f64| (-x).exp(), 0.0, f64::INFINITY, 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn endpoint_log_singularity() {
        // Antiderivative x - x log x evaluated on [0, 1] gives 1.
        let r = integrate(|x: f64| -x.ln(), 0.0, 1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn nan_integrand_names_abscissa() {
        let err = integrate(|x: f64| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, 1e-8).unwrap_err();
        match err {
            Error::NonFiniteIntegrand { x } => assert!(x > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn divergent_tail_does_not_converge() {
        let err = integrate(|x: f64| 1.0 / (1.0 + x), 0.0, f64::INFINITY, 1e-8).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. } | Error::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn rejects_bad_limits() {
        assert!(integrate(|x| x, 1.0, 1.0, 1e-8).is_err());
        assert!(integrate(|x| x, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn inversion_examples() {
        let x = invert_cdf(|x| x, 0.25, (0.0, 1.0), 1e-12).unwrap();
        assert_abs_diff_eq!(x, 0.25, epsilon = 1e-11);

        let x = invert_cdf(|x: f64| 1.0 - (-x).exp(), 0.5, (0.0, 50.0), 1e-12).unwrap();
        assert_abs_diff_eq!(x, 2f64.ln(), epsilon = 1e-10);

        let x = invert_cdf_with_pdf(|x: f64| x * x, |x| 2.0 * x, 0.25, (0.0, 1.0), 1e-12).unwrap();
        assert_abs_diff_eq!(x, 0.5, epsilon = 1e-11);
    }

    #[test]
    fn inversion_bracket_error() {
        let err = invert_cdf(|x| x, 0.9, (0.0, 0.5), 1e-12).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
        assert!(invert_cdf(|x| x, 1.0, (0.0, 1.0), 1e-12).is_err());
    }

    #[test]
    fn inversion_is_left_continuous_on_steps() {
        // Step CDF jumping to 0.5 at x = 2.
        let step = |x: f64| if x >= 2.0 { 0.5 } else { 0.25 };
        let x = invert_cdf(step, 0.5, (0.0, 4.0), 1e-12).unwrap();
        assert_abs_diff_eq!(x, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn monotone_examples() {
        let grid = Grid::linear(0.0, 1.0, 200).unwrap();
        assert_eq!(monotone_on_grid(|x| x, &grid, 1e-9).unwrap().kind, MonotoneKind::Increasing);
        assert_eq!(monotone_on_grid(|x| -x, &grid, 1e-9).unwrap().kind, MonotoneKind::Decreasing);
        let v = monotone_on_grid(|x: f64| (10.0 * x).sin(), &grid, 1e-9).unwrap();
        assert_eq!(v.kind, MonotoneKind::NonMonotone);
        let (a, b) = v.witness.unwrap();
        assert!(a < b && (10.0 * b).sin() < (10.0 * a).sin());
        assert_eq!(
            monotone_on_grid(|_| 3.0, &grid, 1e-9).unwrap().kind,
            MonotoneKind::FlatWithinTolerance
        );
    }

    #[test]
    fn monotone_reports_nan_point() {
        let grid = Grid::linear(0.0, 1.0, 11).unwrap();
        let err = monotone_on_grid(|x| if x > 0.45 && x < 0.55 { f64::NAN } else { x }, &grid, 0.0)
            .unwrap_err();
        assert_eq!(err, Error::NonFiniteIntegrand { x: 0.5 });
    }

    #[test]
    fn log_poisson_examples() {
        assert_eq!(log_poisson_weight(0, 7.0).unwrap(), 0.0);
        assert_eq!(log_poisson_weight(0, 0.0).unwrap(), 0.0);
        assert_eq!(log_poisson_weight(3, 0.0).unwrap(), f64::NEG_INFINITY);
        assert_abs_diff_eq!(log_poisson_weight(1, 1.0).unwrap(), 0.0, epsilon = 1e-15);
        // Oracle: 10 log 2 - log(3628800).
        let oracle = 10.0 * 2f64.ln() - 3_628_800f64.ln();
        assert_abs_diff_eq!(log_poisson_weight(10, 2.0).unwrap(), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(oracle, -8.172941, epsilon = 1e-6);
        assert!(log_poisson_weight(2, -1.0).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(vec![0.0, 1.0]).is_err());
        assert!(Grid::new(vec![0.0, 2.0, 1.0]).is_err());
        let g = Grid::log_spaced(1e-3, 10.0, 64).unwrap();
        assert_eq!(g.len(), 64);
        assert_abs_diff_eq!(g.lo(), 1e-3);
        assert_abs_diff_eq!(g.hi(), 10.0);
        let g2 = g.with_random_extra(16, 7);
        assert_eq!(g2.len(), 80);
        assert_eq!(g2, g.with_random_extra(16, 7));
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        assert!(ks_statistic(&xs, |x| x) <= 0.5 / n as f64 + 1e-12);
    }
}
