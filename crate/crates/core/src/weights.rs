//! Weight functions `φ >= 0` and their cumulative weights `ψ(x) = ∫₀ˣ φ`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{describe, require_density, Dist, DistSpec};
use crate::error::{Error, Result};
use crate::inactivity::mit_unchecked;
use crate::numerics::{integrate_with, monotone_on_grid, Grid, QuadOptions};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convexity {
    Convex,
    Concave,
    /// Both convex and concave.
    Linear,
    Neither,
    Unknown,
}

impl Convexity {
    pub fn is_convex(self) -> bool {
        matches!(self, Convexity::Convex | Convexity::Linear)
    }

    pub fn is_concave(self) -> bool {
        matches!(self, Convexity::Concave | Convexity::Linear)
    }
}

/// How a convexity label was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    Declared,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum WeightKind {
    Identity,
    Power { r: f64 },
    HalfSquare,
    CdfOf,
    HazardOf,
    OddsOf,
    NeglogDensity,
    MitOf,
    ConstantWmit { c: f64 },
    Custom { label: String },
}

impl WeightKind {
    pub fn label(&self) -> String {
        match self {
            WeightKind::Identity => "identity".into(),
            WeightKind::Power { r } => format!("power(r={r})"),
            WeightKind::HalfSquare => "half-square".into(),
            WeightKind::CdfOf => "cdf-of".into(),
            WeightKind::HazardOf => "hazard-of".into(),
            WeightKind::OddsOf => "odds-of".into(),
            WeightKind::NeglogDensity => "neglog-density".into(),
            WeightKind::MitOf => "mit-of".into(),
            WeightKind::ConstantWmit { c } => format!("constant-wmit(c={c})"),
            WeightKind::Custom { label } => label.clone(),
        }
    }
}

/// A weight `φ` together with `ψ`.
///
/// `psi` is closed form for the built-ins; custom weights without one fall
/// back to quadrature of `phi`. `ψ = +∞` is allowed (odds and constant-WMIT
/// weights), in which case only the integral forms `∫ φ F` are meaningful.
#[derive(Clone)]
pub struct WeightFn {
    kind: WeightKind,
    phi: RealFn,
    psi: Option<RealFn>,
    convexity: Convexity,
    ctx: Option<Dist>,
}

impl fmt::Debug for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFn")
            .field("kind", &self.kind)
            .field("convexity", &self.convexity)
            .field("ctx", &self.ctx.as_ref().map(|d| describe(d.as_ref())))
            .finish()
    }
}

impl WeightFn {
    pub fn identity() -> Self {
        WeightFn {
            kind: WeightKind::Identity,
            phi: Arc::new(|_| 1.0),
            psi: Some(Arc::new(|x| x.max(0.0))),
            convexity: Convexity::Linear,
            ctx: None,
        }
    }

    /// `ψ(t) = t^r`, `φ(t) = r t^(r-1)`.
    pub fn power(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter {
                family: "power weight".into(),
                name: "r".into(),
                value: r,
            });
        }
        if r == 1.0 {
            let mut w = Self::identity();
            w.kind = WeightKind::Power { r };
            return Ok(w);
        }
        let convexity = if r > 1.0 { Convexity::Convex } else { Convexity::Concave };
        Ok(WeightFn {
            kind: WeightKind::Power { r },
            phi: Arc::new(move |x| if x <= 0.0 { if r > 1.0 { 0.0 } else { f64::INFINITY } } else { r * x.powf(r - 1.0) }),
            psi: Some(Arc::new(move |x| if x <= 0.0 { 0.0 } else { x.powf(r) })),
            convexity,
            ctx: None,
        })
    }

    /// `ψ(t) = t² / 2`, `φ(t) = t`.
    pub fn half_square() -> Self {
        WeightFn {
            kind: WeightKind::HalfSquare,
            phi: Arc::new(|x| x.max(0.0)),
            psi: Some(Arc::new(|x| if x <= 0.0 { 0.0 } else { 0.5 * x * x })),
            convexity: Convexity::Convex,
            ctx: None,
        }
    }

    /// `ψ = G`, `φ = g`.
    pub fn cdf_of(ctx: Dist) -> Result<Self> {
        require_density(ctx.as_ref())?;
        let (a, b) = (ctx.clone(), ctx.clone());
        Ok(WeightFn {
            kind: WeightKind::CdfOf,
            phi: Arc::new(move |x| a.pdf(x).unwrap_or(f64::NAN)),
            psi: Some(Arc::new(move |x| b.cdf(x))),
            convexity: Convexity::Unknown,
            ctx: Some(ctx),
        })
    }

    /// `φ = g / Ḡ` (hazard rate), `ψ = -log Ḡ` (cumulative hazard).
    pub fn hazard_of(ctx: Dist) -> Result<Self> {
        require_density(ctx.as_ref())?;
        let (a, b) = (ctx.clone(), ctx.clone());
        Ok(WeightFn {
            kind: WeightKind::HazardOf,
            phi: Arc::new(move |x| {
                let s = a.survival(x);
                if s <= 0.0 {
                    f64::INFINITY
                } else {
                    a.pdf(x).unwrap_or(f64::NAN) / s
                }
            }),
            psi: Some(Arc::new(move |x| -b.survival(x).ln())),
            convexity: Convexity::Unknown,
            ctx: Some(ctx),
        })
    }

    /// `φ = Ḡ / G`; `ψ` diverges at the origin and is reported as `+∞`.
    pub fn odds_of(ctx: Dist) -> Result<Self> {
        let a = ctx.clone();
        Ok(WeightFn {
            kind: WeightKind::OddsOf,
            phi: Arc::new(move |x| {
                let g = a.cdf(x);
                if g <= 0.0 {
                    f64::INFINITY
                } else {
                    a.survival(x) / g
                }
            }),
            psi: Some(Arc::new(|x| if x <= 0.0 { 0.0 } else { f64::INFINITY })),
            convexity: Convexity::Unknown,
            ctx: Some(ctx),
        })
    }

    /// `ψ(x) = -log(g(x) / g(0))` for a decreasing density `g`.
    ///
    /// `g(0)` is read at `max(lower, 1e-12)`. The precondition that `g`
    /// decreases is checked on `grid` and a violation names a point where
    /// `g` rises.
    pub fn neglog_density(ctx: Dist, grid: &Grid) -> Result<Self> {
        require_density(ctx.as_ref())?;
        let origin = ctx.support().0.max(1e-12);
        let g0 = ctx.pdf(origin).unwrap_or(f64::NAN);
        if !(g0 > 0.0 && g0.is_finite()) {
            return Err(Error::Precondition {
                what: format!("density at the origin must be positive and finite, got {g0}"),
                witness: Some(origin),
            });
        }
        let pts = grid.points();
        let values: Vec<f64> = pts.iter().map(|&x| ctx.pdf(x).unwrap_or(f64::NAN)).collect();
        let band = 1e-12 * (1.0 + g0);
        for j in 1..pts.len() {
            if values[j] > values[j - 1] + band {
                return Err(Error::Precondition {
                    what: format!("{} density is not decreasing", describe(ctx.as_ref())),
                    witness: Some(pts[j - 1]),
                });
            }
        }
        let (a, b) = (ctx.clone(), ctx.clone());
        Ok(WeightFn {
            kind: WeightKind::NeglogDensity,
            // φ = -g'/g by a central difference of log g.
            phi: Arc::new(move |x| {
                let h = 1e-6 * (1.0 + x.abs());
                let lo = (x - h).max(origin);
                let hi = x + h;
                let lg = |u: f64| a.pdf(u).unwrap_or(f64::NAN).ln();
                (-(lg(hi) - lg(lo)) / (hi - lo)).max(0.0)
            }),
            psi: Some(Arc::new(move |x| {
                if x <= origin {
                    0.0
                } else {
                    (g0.ln() - b.pdf(x).unwrap_or(f64::NAN).ln()).max(0.0)
                }
            })),
            convexity: Convexity::Unknown,
            ctx: Some(ctx),
        })
    }

    /// `φ = τ μ̃` of `ctx`, whose WMIT is the dynamic cumulative entropy;
    /// `ψ(t) = t - μ̃(t)`.
    pub fn mit_of(ctx: Dist) -> Result<Self> {
        require_density(ctx.as_ref())?;
        let (a, b) = (ctx.clone(), ctx.clone());
        Ok(WeightFn {
            kind: WeightKind::MitOf,
            phi: Arc::new(move |x| {
                let fx = a.cdf(x);
                if fx <= 0.0 {
                    return 0.0;
                }
                match mit_unchecked(a.as_ref(), x) {
                    Ok(m) => a.pdf(x).unwrap_or(f64::NAN) / fx * m,
                    Err(_) => f64::NAN,
                }
            }),
            psi: Some(Arc::new(move |x| {
                if b.cdf(x) <= 0.0 {
                    return 0.0;
                }
                mit_unchecked(b.as_ref(), x).map(|m| x - m).unwrap_or(f64::NAN)
            })),
            convexity: Convexity::Unknown,
            ctx: Some(ctx),
        })
    }

    /// `φ = c τ` of `ctx`; makes the WMIT of `ctx` identically `c`.
    pub fn constant_wmit(ctx: Dist, c: f64) -> Result<Self> {
        require_density(ctx.as_ref())?;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter {
                family: "constant-wmit weight".into(),
                name: "c".into(),
                value: c,
            });
        }
        let a = ctx.clone();
        Ok(WeightFn {
            kind: WeightKind::ConstantWmit { c },
            phi: Arc::new(move |x| {
                let fx = a.cdf(x);
                if fx <= 0.0 {
                    f64::INFINITY
                } else {
                    c * a.pdf(x).unwrap_or(f64::NAN) / fx
                }
            }),
            psi: Some(Arc::new(|x| if x <= 0.0 { 0.0 } else { f64::INFINITY })),
            convexity: Convexity::Unknown,
            ctx: Some(ctx),
        })
    }

    /// A user weight; `psi = None` means quadrature of `phi`.
    pub fn custom<P>(label: &str, phi: P, psi: Option<RealFn>) -> Self
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        WeightFn {
            kind: WeightKind::Custom {
                label: label.to_string(),
            },
            phi: Arc::new(phi),
            psi,
            convexity: Convexity::Unknown,
            ctx: None,
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn label(&self) -> String {
        match &self.ctx {
            Some(d) => format!("{}[{}]", self.kind.label(), describe(d.as_ref())),
            None => self.kind.label(),
        }
    }

    pub fn ctx(&self) -> Option<&Dist> {
        self.ctx.as_ref()
    }

    /// Declared convexity of `ψ` (`Unknown` unless built in).
    pub fn convexity(&self) -> Convexity {
        self.convexity
    }

    pub fn is_identity(&self) -> bool {
        match self.kind {
            WeightKind::Identity => true,
            WeightKind::Power { r } => r == 1.0,
            _ => false,
        }
    }

    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    pub fn has_closed_psi(&self) -> bool {
        self.psi.is_some()
    }

    /// `ψ(x)`; `+∞` when the cumulative weight diverges.
    pub fn psi(&self, x: f64) -> f64 {
        match &self.psi {
            Some(p) => p(x),
            None => self.psi_by_quadrature(x).unwrap_or(f64::NAN),
        }
    }

    pub fn psi_by_quadrature(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        Ok(integrate_with(|u| self.phi(u), 0.0, x, &QuadOptions::relative(1e-12))?.value)
    }

    /// Whether `ψ` is finite on `(0, ∞)`.
    pub fn has_finite_psi(&self) -> bool {
        !matches!(self.kind, WeightKind::OddsOf | WeightKind::ConstantWmit { .. })
    }

    /// Declared convexity, or a grid certificate when undeclared.
    pub fn effective_convexity(&self, grid: &Grid) -> (Convexity, Certification) {
        if self.convexity != Convexity::Unknown {
            return (self.convexity, Certification::Declared);
        }
        (certify_convexity(self, grid, 512, 0x5eed), Certification::Grid)
    }

    /// Monotonicity of `φ` on `grid`.
    pub fn phi_monotonicity(&self, grid: &Grid) -> Result<crate::numerics::MonotoneVerdict> {
        let values: Vec<f64> = grid.points().iter().map(|&x| self.phi(x)).collect();
        let band = crate::numerics::default_band(&values);
        monotone_on_grid(|x| self.phi(x), grid, band)
    }
}

/// `(min φ, max φ)` over the grid points.
pub fn check_bounds(w: &WeightFn, grid: &Grid) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in grid.points() {
        let v = w.phi(x);
        if v.is_nan() {
            return Err(Error::NonFiniteIntegrand { x });
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

/// Midpoint test `ψ((a+b)/2)` vs `(ψ(a)+ψ(b))/2` on `pairs` random grid pairs.
pub fn certify_convexity(w: &WeightFn, grid: &Grid, pairs: usize, seed: u64) -> Convexity {
    let pts = grid.points();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut convex_ok, mut concave_ok) = (true, true);
    for _ in 0..pairs {
        let a = pts[rng.random_range(0..pts.len())];
        let b = pts[rng.random_range(0..pts.len())];
        if a == b {
            continue;
        }
        let (pa, pb, pm) = (w.psi(a), w.psi(b), w.psi(0.5 * (a + b)));
        if !(pa.is_finite() && pb.is_finite() && pm.is_finite()) {
            return Convexity::Unknown;
        }
        let chord = 0.5 * (pa + pb);
        let slack = 1e-9 * (1.0 + chord.abs());
        if pm > chord + slack {
            convex_ok = false;
        }
        if pm < chord - slack {
            concave_ok = false;
        }
    }
    match (convex_ok, concave_ok) {
        (true, true) => Convexity::Linear,
        (true, false) => Convexity::Convex,
        (false, true) => Convexity::Concave,
        (false, false) => Convexity::Neither,
    }
}

/// `{kind, r, ctx}`; shorthand `kind` or `kind:r=2` or `kind:c=0.7`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ctx: Option<DistSpec>,
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = match s.trim().split_once(':') {
            Some((k, r)) => (k.trim(), r.trim()),
            None => (s.trim(), ""),
        };
        let mut spec = WeightSpec {
            kind: kind.to_ascii_lowercase(),
            r: None,
            c: None,
            ctx: None,
        };
        for item in rest.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("weight parameter '{item}' is not name=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("weight parameter {k} is not numeric")))?;
            match k.trim() {
                "r" => spec.r = Some(v),
                "c" => spec.c = Some(v),
                other => return Err(Error::Config(format!("unknown weight parameter '{other}'"))),
            }
        }
        Ok(spec)
    }
}

impl WeightSpec {
    pub fn build(&self, default_ctx: Option<&Dist>, grid_hint: Option<&Grid>) -> Result<WeightFn> {
        let ctx = match &self.ctx {
            Some(spec) => Some(spec.build()?),
            None => default_ctx.cloned(),
        };
        make_weight(&self.kind, self.r.or(self.c), ctx, grid_hint)
    }
}

/// Builds a weight by label. `param` is `r` for `power` and `c` for
/// `constant-wmit`; context-dependent kinds need `ctx`.
pub fn make_weight(kind: &str, param: Option<f64>, ctx: Option<Dist>, grid: Option<&Grid>) -> Result<WeightFn> {
    let need_ctx = |ctx: Option<Dist>| {
        ctx.ok_or_else(|| Error::Config(format!("weight kind '{kind}' needs a context distribution")))
    };
    match kind {
        "identity" => Ok(WeightFn::identity()),
        "power" => WeightFn::power(param.ok_or_else(|| Error::Config("power weight needs r".into()))?),
        "half-square" => Ok(WeightFn::half_square()),
        "cdf-of" => WeightFn::cdf_of(need_ctx(ctx)?),
        "hazard-of" => WeightFn::hazard_of(need_ctx(ctx)?),
        "odds-of" => WeightFn::odds_of(need_ctx(ctx)?),
        "mit-of" => WeightFn::mit_of(need_ctx(ctx)?),
        "constant-wmit" => WeightFn::constant_wmit(
            need_ctx(ctx)?,
            param.ok_or_else(|| Error::Config("constant-wmit weight needs c".into()))?,
        ),
        "neglog-density" => {
            let ctx = need_ctx(ctx)?;
            let grid = match grid {
                Some(g) => g.clone(),
                None => crate::dist::default_grid(ctx.as_ref())?,
            };
            WeightFn::neglog_density(ctx, &grid)
        }
        other => Err(Error::Config(format!("unknown weight kind '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Exponential, Uniform, Weibull};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn exp1() -> Dist {
        Arc::new(Exponential::new(1.0).unwrap())
    }
    fn unif() -> Dist {
        Arc::new(Uniform::new(1.0).unwrap())
    }

    #[test]
    fn catalog_examples() {
        assert_abs_diff_eq!(WeightFn::half_square().psi(3.0), 4.5);
        assert_abs_diff_eq!(WeightFn::half_square().phi(3.0), 3.0);
        assert_abs_diff_eq!(WeightFn::power(2.0).unwrap().psi(3.0), 9.0);
        assert_abs_diff_eq!(WeightFn::power(2.0).unwrap().phi(3.0), 6.0);
        assert_abs_diff_eq!(WeightFn::cdf_of(exp1()).unwrap().psi(1.0), 0.632121, epsilon = 1e-6);
        assert_abs_diff_eq!(WeightFn::odds_of(unif()).unwrap().phi(0.25), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn bounds_examples() {
        let g = Grid::linear(0.0, 10.0, 101).unwrap();
        assert_eq!(check_bounds(&WeightFn::identity(), &g).unwrap(), (1.0, 1.0));

        // φ = F̄ of exponential(1) is the density of the cdf-of weight.
        let (m, big_m) = check_bounds(&WeightFn::cdf_of(exp1()).unwrap(), &g).unwrap();
        assert_abs_diff_eq!(m, (-10f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(big_m, 1.0, epsilon = 1e-15);

        let g01 = Grid::linear(0.0, 1.0, 101).unwrap();
        let (m, big_m) = check_bounds(&WeightFn::power(2.0).unwrap(), &g01).unwrap();
        assert_abs_diff_eq!(m, 0.0);
        assert_abs_diff_eq!(big_m, 2.0);
    }

    #[test]
    fn missing_context_is_config_error() {
        assert!(matches!(make_weight("cdf-of", None, None, None), Err(Error::Config(_))));
        assert!(matches!(make_weight("bogus", None, None, None), Err(Error::Config(_))));
    }

    #[test]
    fn neglog_density_precondition() {
        let g = Grid::linear(0.01, 5.0, 200).unwrap();
        let w = WeightFn::neglog_density(exp1(), &g).unwrap();
        // For exponential(1): ψ(x) = x, φ = 1.
        assert_abs_diff_eq!(w.psi(2.0), 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(w.phi(2.0), 1.0, epsilon = 1e-6);

        let weib: Dist = Arc::new(Weibull::new(2.0, 1.0).unwrap());
        match WeightFn::neglog_density(weib, &g) {
            Err(Error::Precondition { witness: Some(x), .. }) => assert!(x < 1.0 / 2f64.sqrt()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mit_of_weight_psi_is_t_minus_mit() {
        let w = WeightFn::mit_of(unif()).unwrap();
        // Uniform: μ̃(t) = t/2, τ μ̃ = 1/2, ψ = t/2.
        assert_abs_diff_eq!(w.phi(0.4), 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(w.psi(0.4), 0.2, epsilon = 1e-10);
    }

    #[test]
    fn grid_convexity_certificates() {
        let g = Grid::linear(0.01, 5.0, 200).unwrap();
        assert_eq!(WeightFn::half_square().effective_convexity(&g).0, Convexity::Convex);
        // ψ = G of exponential(1) is concave.
        let (c, cert) = WeightFn::cdf_of(exp1()).unwrap().effective_convexity(&g);
        assert_eq!((c, cert), (Convexity::Concave, Certification::Grid));
        let w = WeightFn::custom("x^3", |x| 3.0 * x * x, None);
        assert_eq!(certify_convexity(&w, &g, 512, 1), Convexity::Convex);
    }

    #[test]
    fn spec_parsing() {
        let s: WeightSpec = "power:r=2".parse().unwrap();
        assert_eq!(s.r, Some(2.0));
        let w = s.build(None, None).unwrap();
        assert_eq!(w.kind(), &WeightKind::Power { r: 2.0 });
        assert!("power:q=2".parse::<WeightSpec>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn psi_increments_match_phi_integral(x in 0.0f64..4.0, y in 0.0f64..4.0) {
            let ws = vec![
                WeightFn::identity(),
                WeightFn::power(2.0).unwrap(),
                WeightFn::power(0.5).unwrap(),
                WeightFn::half_square(),
                WeightFn::cdf_of(exp1()).unwrap(),
                WeightFn::hazard_of(Arc::new(Weibull::new(2.0, 1.0).unwrap())).unwrap(),
            ];
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            prop_assume!(hi - lo > 1e-6);
            for w in &ws {
                let q = integrate_with(|u| w.phi(u), lo, hi, &QuadOptions::relative(1e-12)).unwrap().value;
                prop_assert!((w.psi(hi) - w.psi(lo) - q).abs() < 1e-8, "{}", w.label());
                prop_assert!(w.phi(hi) >= 0.0);
                prop_assert!(w.psi(lo) <= w.psi(hi));
            }
        }

        #[test]
        fn convex_weights_pass_midpoint_and_superadditivity(a in 0.0f64..5.0, b in 0.0f64..5.0) {
            for w in [WeightFn::half_square(), WeightFn::power(2.0).unwrap(), WeightFn::power(3.5).unwrap(), WeightFn::identity()] {
                prop_assert!(w.psi(0.5 * (a + b)) <= 0.5 * (w.psi(a) + w.psi(b)) + 1e-12);
                prop_assert!(w.psi(a + b) >= w.psi(a) + w.psi(b) - 1e-12);
            }
        }
    }

    #[test]
    fn closed_psi_matches_quadrature() {
        for w in [WeightFn::half_square(), WeightFn::power(2.5).unwrap(), WeightFn::cdf_of(exp1()).unwrap()] {
            for &x in &[0.3, 1.0, 2.7] {
                assert_abs_diff_eq!(w.psi(x), w.psi_by_quadrature(x).unwrap(), epsilon = 1e-7);
            }
        }
    }
}
