//! Grid-certified stochastic orders and the implications between them.
//!
//! Every check reads "X ≤_kind Y". Verdicts are relative to the grid they
//! name: `Holds` needs no violation beyond the margin and at least one strict
//! comparison; if every comparison is within the margin the verdict is
//! `Inconclusive`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

pub use crate::dist::default_grid;
use crate::dist::{default_range, describe, DiscreteLaw, Dist, Distribution, DOMAIN_FLOOR};
use crate::error::{Error, Result};
use crate::inactivity::{iwmit_classify, wmit_many};
use crate::infomeasures::{gce, variance_of_weighted, wgce};
use crate::numerics::{Grid, DEFAULT_GRID_POINTS};
use crate::weights::WeightFn;

/// Relative margin factor for every comparison.
pub const MARGIN_FACTOR: f64 = 1e-7;

/// Random interior points added to the default pair grid.
pub const EXTRA_GRID_POINTS: usize = 64;

const GRID_SEED: u64 = 0x0d15_ea5e;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderKind {
    St,
    Hr,
    Rhr,
    Mit,
    Wmit,
    Smit,
    Disp,
    Lir,
}

impl OrderKind {
    pub const ALL: [OrderKind; 8] = [
        OrderKind::St,
        OrderKind::Hr,
        OrderKind::Rhr,
        OrderKind::Mit,
        OrderKind::Wmit,
        OrderKind::Smit,
        OrderKind::Disp,
        OrderKind::Lir,
    ];

    pub fn label(self) -> &'static str {
        match self {
            OrderKind::St => "st",
            OrderKind::Hr => "hr",
            OrderKind::Rhr => "rhr",
            OrderKind::Mit => "mit",
            OrderKind::Wmit => "wmit",
            OrderKind::Smit => "smit",
            OrderKind::Disp => "disp",
            OrderKind::Lir => "lir",
        }
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for OrderKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        OrderKind::ALL
            .iter()
            .copied()
            .find(|k| k.label() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown order '{s}' (expected one of st, hr, rhr, mit, wmit, smit, disp, lir)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Holds,
    Fails,
    Inconclusive,
}

/// Where a comparison went wrong; `t2` is set for pairwise (ratio) forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderVerdict {
    pub order: String,
    pub direction: (String, String),
    pub kind: VerdictKind,
    pub witness: Option<Witness>,
    pub margin: f64,
    pub grid: String,
    pub comparisons: usize,
}

impl OrderVerdict {
    pub fn holds(&self) -> bool {
        self.kind == VerdictKind::Holds
    }
    pub fn fails(&self) -> bool {
        self.kind == VerdictKind::Fails
    }
}

/// Accumulates `lhs >= rhs` comparisons.
#[derive(Debug, Default)]
struct Tally {
    worst: Option<(f64, Witness)>,
    strict: bool,
    margin: f64,
    count: usize,
}

impl Tally {
    fn add(&mut self, t: f64, t2: Option<f64>, lhs: f64, rhs: f64, margin: f64) {
        self.count += 1;
        self.margin = self.margin.max(margin);
        let gap = lhs - rhs;
        if gap > margin {
            self.strict = true;
        } else if gap < -margin {
            let excess = -gap - margin;
            if self.worst.as_ref().is_none_or(|(e, _)| excess > *e) {
                self.worst = Some((excess, Witness { t, t2, lhs, rhs }));
            }
        }
    }

    fn finish(self, kind: OrderKind, x: &dyn Distribution, y: &dyn Distribution, grid: &str) -> OrderVerdict {
        self.finish_labels(kind.label(), describe(x), describe(y), grid)
    }

    fn finish_labels(self, order: &str, x: String, y: String, grid: &str) -> OrderVerdict {
        let (kind, witness) = match self.worst {
            Some((_, w)) => (VerdictKind::Fails, Some(w)),
            None if self.strict => (VerdictKind::Holds, None),
            None => (VerdictKind::Inconclusive, None),
        };
        OrderVerdict {
            order: order.into(),
            direction: (x, y),
            kind,
            witness,
            margin: self.margin,
            grid: grid.into(),
            comparisons: self.count,
        }
    }
}

fn pointwise_margin(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs()));
    MARGIN_FACTOR * (1.0 + scale)
}

fn product_margin(p: f64, q: f64) -> f64 {
    MARGIN_FACTOR * p.abs().max(q.abs())
}

/// Monotone-ratio check through cross-products: `num/den` increasing means
/// `num(j) den(i) >= num(i) den(j)` for all `i < j`. Pairs where both
/// products vanish are skipped.
fn ratio_increasing(tally: &mut Tally, ts: &[f64], num: &[f64], den: &[f64]) {
    for j in 0..ts.len() {
        for i in 0..j {
            let lhs = num[j] * den[i];
            let rhs = num[i] * den[j];
            if lhs == 0.0 && rhs == 0.0 {
                continue;
            }
            tally.add(ts[i], Some(ts[j]), lhs, rhs, product_margin(lhs, rhs));
        }
    }
}

fn same_law(x: &Dist, y: &Dist) -> bool {
    Arc::ptr_eq(x, y) || (x.name() != "empirical" && describe(x.as_ref()) == describe(y.as_ref()))
}

/// 512 log-spaced points over the union of both default ranges plus 64
/// seeded random interior points.
pub fn pair_grid(x: &dyn Distribution, y: &dyn Distribution) -> Result<Grid> {
    let (a0, a1) = default_range(x)?;
    let (b0, b1) = default_range(y)?;
    Ok(Grid::log_spaced(a0.min(b0), a1.max(b1), DEFAULT_GRID_POINTS)?.with_random_extra(EXTRA_GRID_POINTS, GRID_SEED))
}

fn common_domain(grid: &Grid, x: &dyn Distribution, y: &dyn Distribution) -> Result<Grid> {
    grid.restrict(|t| x.cdf(t) >= DOMAIN_FLOOR && y.cdf(t) >= DOMAIN_FLOOR)
        .ok_or_else(|| Error::Degenerate("fewer than 3 grid points where both CDFs are positive".into()))
}

/// `X ≤_kind Y` on `grid` (the default pair grid when `None`).
pub fn check_order(kind: OrderKind, x: &Dist, y: &Dist, w: Option<&WeightFn>, grid: Option<&Grid>) -> Result<OrderVerdict> {
    let half = WeightFn::half_square();
    let w = match kind {
        OrderKind::Wmit => Some(w.ok_or_else(|| Error::Config("order wmit needs a weight function".into()))?),
        OrderKind::Smit => Some(&half),
        _ => None,
    };
    let owned;
    let grid = match grid {
        Some(g) => g,
        None => {
            owned = pair_grid(x.as_ref(), y.as_ref())?;
            &owned
        }
    };
    if same_law(x, y) {
        return Ok(OrderVerdict {
            order: kind.label().into(),
            direction: (describe(x.as_ref()), describe(y.as_ref())),
            kind: VerdictKind::Holds,
            witness: None,
            margin: 0.0,
            grid: format!("{} (identical inputs)", grid.label()),
            comparisons: 0,
        });
    }
    let (xd, yd) = (x.as_ref(), y.as_ref());
    let mut tally = Tally::default();
    let label;
    match kind {
        OrderKind::St => {
            let ts = grid.points();
            let f: Vec<f64> = ts.iter().map(|&t| xd.cdf(t)).collect();
            let g: Vec<f64> = ts.iter().map(|&t| yd.cdf(t)).collect();
            let m = pointwise_margin(&f, &g);
            for i in 0..ts.len() {
                tally.add(ts[i], None, f[i], g[i], m);
            }
            label = grid.label().to_string();
        }
        OrderKind::Hr => {
            let ts = grid.points();
            let sf: Vec<f64> = ts.iter().map(|&t| xd.survival(t)).collect();
            let sg: Vec<f64> = ts.iter().map(|&t| yd.survival(t)).collect();
            ratio_increasing(&mut tally, ts, &sg, &sf);
            label = grid.label().to_string();
        }
        OrderKind::Rhr => {
            let g2 = common_domain(grid, xd, yd)?;
            let ts = g2.points();
            let f: Vec<f64> = ts.iter().map(|&t| xd.cdf(t)).collect();
            let g: Vec<f64> = ts.iter().map(|&t| yd.cdf(t)).collect();
            ratio_increasing(&mut tally, ts, &g, &f);
            label = format!("{} (common domain)", grid.label());
        }
        OrderKind::Mit | OrderKind::Wmit | OrderKind::Smit => {
            let identity = WeightFn::identity();
            let w = w.unwrap_or(&identity);
            let g2 = common_domain(grid, xd, yd)?;
            let ts = g2.points();
            let mx = wmit_many(xd, w, ts)?;
            let my = wmit_many(yd, w, ts)?;
            let m = pointwise_margin(&mx, &my);
            for i in 0..ts.len() {
                tally.add(ts[i], None, mx[i], my[i], m);
            }
            label = format!("{} (common domain)", grid.label());
        }
        OrderKind::Disp => {
            let g2 = grid
                .restrict(|t| {
                    let p = xd.cdf(t);
                    p >= DOMAIN_FLOOR && p <= 1.0 - DOMAIN_FLOOR
                })
                .ok_or_else(|| Error::Degenerate("fewer than 3 grid points inside the support of X".into()))?;
            let ts = g2.points();
            let mut h = Vec::with_capacity(ts.len());
            let mut mapped = Vec::with_capacity(ts.len());
            for &t in ts {
                let q = yd.quantile(xd.cdf(t))?;
                mapped.push(q);
                h.push(q - t);
            }
            let m = pointwise_margin(&mapped, ts);
            // Increasing: each value at least the running maximum before it.
            let (mut run_max, mut arg_max) = (h[0], ts[0]);
            let mut run_min = h[0];
            for j in 1..ts.len() {
                tally.add(arg_max, Some(ts[j]), h[j], run_max, m);
                if h[j] - run_min > m {
                    tally.strict = true;
                }
                if h[j] > run_max {
                    run_max = h[j];
                    arg_max = ts[j];
                }
                run_min = run_min.min(h[j]);
            }
            label = format!("{} (support of X)", grid.label());
        }
        OrderKind::Lir => {
            let pg = lir_grid()?;
            let identity = WeightFn::identity();
            let mut mx = Vec::new();
            let mut my = Vec::new();
            for &p in pg.points() {
                let qx = xd.quantile(p)?;
                let qy = yd.quantile(p)?;
                mx.push(wmit_many(xd, &identity, &[qx])?[0]);
                my.push(wmit_many(yd, &identity, &[qy])?[0]);
            }
            let m = pointwise_margin(&mx, &my);
            for (i, &p) in pg.points().iter().enumerate() {
                tally.add(p, None, my[i], mx[i], m);
            }
            label = pg.label().to_string();
        }
    }
    Ok(tally.finish(kind, xd, yd, &label))
}

/// Probability grid for `lir`: 99 levels over [0.01, 0.99].
pub fn lir_grid() -> Result<Grid> {
    Grid::linear(0.01, 0.99, 99)
}

/// Parses `kind` and dispatches to [`check_order`].
pub fn check_order_by_label(kind: &str, x: &Dist, y: &Dist, w: Option<&WeightFn>, grid: Option<&Grid>) -> Result<OrderVerdict> {
    check_order(kind.parse()?, x, y, w, grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscreteOrder {
    Rhr,
    Hr,
}

impl FromStr for DiscreteOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rhr" => Ok(DiscreteOrder::Rhr),
            "hr" => Ok(DiscreteOrder::Hr),
            other => Err(Error::Config(format!("unknown discrete order '{other}' (expected rhr or hr)"))),
        }
    }
}

/// `N1 ≤_kind N2` for integer laws: rhr compares `P(N ≤ k)` ratios, hr
/// compares `P(N ≥ k)` ratios, both through cross-products over `k`.
pub fn discrete_order_check(kind: DiscreteOrder, n1: &DiscreteLaw, n2: &DiscreteLaw) -> OrderVerdict {
    let label = match kind {
        DiscreteOrder::Rhr => "rhr",
        DiscreteOrder::Hr => "hr",
    };
    let kmax = n1.max_value().max(n2.max_value()) + 1;
    let grid = format!("k = 0..={kmax}");
    if n1 == n2 {
        return OrderVerdict {
            order: label.into(),
            direction: (n1.label().into(), n2.label().into()),
            kind: VerdictKind::Holds,
            witness: None,
            margin: 0.0,
            grid: format!("{grid} (identical inputs)"),
            comparisons: 0,
        };
    }
    let ks: Vec<f64> = (0..=kmax).map(|k| k as f64).collect();
    let (a, b): (Vec<f64>, Vec<f64>) = match kind {
        DiscreteOrder::Rhr => (0..=kmax).map(|k| (n1.cdf(k), n2.cdf(k))).unzip(),
        DiscreteOrder::Hr => (0..=kmax).map(|k| (n1.at_least(k), n2.at_least(k))).unzip(),
    };
    let mut tally = Tally::default();
    ratio_increasing(&mut tally, &ks, &b, &a);
    tally.finish_labels(label, n1.label().into(), n2.label().into(), &grid)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Implication {
    pub name: String,
    pub antecedent: VerdictKind,
    pub consequent: VerdictKind,
    /// Antecedent holds but consequent fails beyond the margins.
    pub violation: bool,
    pub detail: String,
}

impl Implication {
    fn new(name: &str, antecedent: VerdictKind, consequent: VerdictKind, detail: String) -> Self {
        Implication {
            name: name.into(),
            antecedent,
            consequent,
            violation: antecedent == VerdictKind::Holds && consequent == VerdictKind::Fails,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImplicationReport {
    pub x: String,
    pub y: String,
    pub weight: String,
    pub implications: Vec<Implication>,
}

impl ImplicationReport {
    pub fn violations(&self) -> Vec<&Implication> {
        self.implications.iter().filter(|i| i.violation).collect()
    }
}

/// Scalar comparison `lhs <= rhs` as a verdict.
fn scalar_at_most(lhs: f64, rhs: f64) -> VerdictKind {
    let m = MARGIN_FACTOR * (1.0 + lhs.abs().max(rhs.abs()));
    if lhs > rhs + m {
        VerdictKind::Fails
    } else if lhs < rhs - m {
        VerdictKind::Holds
    } else {
        VerdictKind::Inconclusive
    }
}

fn all_of(vs: &[VerdictKind]) -> VerdictKind {
    if vs.contains(&VerdictKind::Fails) {
        VerdictKind::Fails
    } else if vs.iter().all(|v| *v == VerdictKind::Holds) {
        VerdictKind::Holds
    } else {
        VerdictKind::Inconclusive
    }
}

/// Orders of the scalar consequents: `Fails` only if some comparison fails.
fn any_fail_else_hold(vs: &[VerdictKind]) -> VerdictKind {
    if vs.contains(&VerdictKind::Fails) {
        VerdictKind::Fails
    } else if vs.contains(&VerdictKind::Holds) {
        VerdictKind::Holds
    } else {
        VerdictKind::Inconclusive
    }
}

/// Evaluates the implications between orders for the pair `(X, Y)`:
/// rhr ⇒ wmit, wmit with convex ψ ⇒ mit, lir ⇒ variance and cumulative
/// entropy ordering, and Y ≤st X with X ≤wmit Y and an IWMIT member ⇒
/// `σ²[ψ(X)] ≥ σ²[ψ(Y)]`, `CE_{ψ,n}(X) ≥ CE_{ψ,n}(Y)`.
pub fn implication_suite(x: &Dist, y: &Dist, w: &WeightFn, grid: Option<&Grid>) -> Result<ImplicationReport> {
    let owned;
    let grid = match grid {
        Some(g) => g,
        None => {
            owned = pair_grid(x.as_ref(), y.as_ref())?;
            &owned
        }
    };
    let mut out = Vec::new();
    let rhr = check_order(OrderKind::Rhr, x, y, None, Some(grid))?;
    let wm = check_order(OrderKind::Wmit, x, y, Some(w), Some(grid))?;
    out.push(Implication::new(
        "rhr => wmit",
        rhr.kind,
        wm.kind,
        format!("rhr witness {:?}; wmit witness {:?}", rhr.witness, wm.witness),
    ));

    let (convexity, _) = w.effective_convexity(grid);
    let mit = check_order(OrderKind::Mit, x, y, None, Some(grid))?;
    let ante = if convexity.is_convex() { wm.kind } else { VerdictKind::Inconclusive };
    out.push(Implication::new(
        "wmit + convex => mit",
        ante,
        mit.kind,
        format!("psi convexity {convexity:?}; mit witness {:?}", mit.witness),
    ));

    let lir = check_order(OrderKind::Lir, x, y, None, None)?;
    if lir.holds() {
        let id = WeightFn::identity();
        let vx = variance_of_weighted(x.as_ref(), &id)?.direct;
        let vy = variance_of_weighted(y.as_ref(), &id)?.direct;
        let mut vs = vec![scalar_at_most(vx, vy)];
        let mut detail = format!("Var {vx} vs {vy}");
        for n in 1..=3 {
            let cx = gce(x.as_ref(), n)?.value;
            let cy = gce(y.as_ref(), n)?.value;
            vs.push(scalar_at_most(cx, cy));
            detail.push_str(&format!("; CE_{n} {cx} vs {cy}"));
        }
        out.push(Implication::new("lir => var, ce_n", lir.kind, any_fail_else_hold(&vs), detail));
    } else {
        out.push(Implication::new(
            "lir => var, ce_n",
            lir.kind,
            VerdictKind::Inconclusive,
            "antecedent not established".into(),
        ));
    }

    let st = check_order(OrderKind::St, y, x, None, Some(grid))?;
    let mut ante = all_of(&[st.kind, wm.kind]);
    if ante == VerdictKind::Holds {
        let ix = iwmit_classify(x, w, grid)?.direct.is_weakly_increasing();
        let iy = iwmit_classify(y, w, grid)?.direct.is_weakly_increasing();
        if !(ix || iy) {
            ante = VerdictKind::Inconclusive;
        }
    }
    if ante == VerdictKind::Holds && w.has_finite_psi() {
        let vx = variance_of_weighted(x.as_ref(), w)?.direct;
        let vy = variance_of_weighted(y.as_ref(), w)?.direct;
        let mut vs = vec![scalar_at_most(vy, vx)];
        let mut detail = format!("Var psi {vx} vs {vy}");
        for n in 1..=3 {
            let cx = wgce(x.as_ref(), w, n)?.value;
            let cy = wgce(y.as_ref(), w, n)?.value;
            vs.push(scalar_at_most(cy, cx));
            detail.push_str(&format!("; CE_psi,{n} {cx} vs {cy}"));
        }
        out.push(Implication::new("st + wmit + iwmit => var, wgce", ante, any_fail_else_hold(&vs), detail));
    } else {
        out.push(Implication::new(
            "st + wmit + iwmit => var, wgce",
            ante,
            VerdictKind::Inconclusive,
            "antecedent not established".into(),
        ));
    }

    Ok(ImplicationReport {
        x: describe(x.as_ref()),
        y: describe(y.as_ref()),
        weight: w.label(),
        implications: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Exponential, Uniform};

    fn exp(r: f64) -> Dist {
        Arc::new(Exponential::new(r).unwrap())
    }
    fn unif(b: f64) -> Dist {
        Arc::new(Uniform::new(b).unwrap())
    }

    #[test]
    fn rhr_and_disp_examples() {
        let v = check_order(OrderKind::Rhr, &exp(2.0), &exp(1.0), None, None).unwrap();
        assert_eq!(v.kind, VerdictKind::Holds, "{v:?}");
        let v = check_order(OrderKind::Rhr, &exp(1.0), &exp(2.0), None, None).unwrap();
        assert_eq!(v.kind, VerdictKind::Fails);
        let v = check_order(OrderKind::Disp, &exp(2.0), &exp(1.0), None, None).unwrap();
        assert_eq!(v.kind, VerdictKind::Holds, "{v:?}");
        let v = check_order(OrderKind::Disp, &exp(1.0), &exp(2.0), None, None).unwrap();
        assert_eq!(v.kind, VerdictKind::Fails);
    }

    #[test]
    fn reflexivity_has_zero_margin() {
        let u = unif(1.0);
        let w = WeightFn::power(2.0).unwrap();
        for k in OrderKind::ALL {
            let v = check_order(k, &u, &u.clone(), Some(&w), None).unwrap();
            assert_eq!(v.kind, VerdictKind::Holds);
            assert_eq!(v.margin, 0.0);
        }
        // Equal laws from distinct allocations are recognised too.
        let v = check_order(OrderKind::Wmit, &unif(1.0), &unif(1.0), Some(&w), None).unwrap();
        assert_eq!((v.kind, v.margin), (VerdictKind::Holds, 0.0));
    }

    #[test]
    fn lir_example() {
        let v = check_order(OrderKind::Lir, &unif(1.0), &unif(2.0), None, None).unwrap();
        assert_eq!(v.kind, VerdictKind::Holds);
        let v = check_order(OrderKind::Lir, &unif(2.0), &unif(1.0), None, None).unwrap();
        assert_eq!(v.kind, VerdictKind::Fails);
        assert!(v.witness.is_some());
    }

    #[test]
    fn st_hr_and_mit() {
        for k in [OrderKind::St, OrderKind::Hr, OrderKind::Mit, OrderKind::Smit] {
            let v = check_order(k, &exp(2.0), &exp(1.0), None, None).unwrap();
            assert_eq!(v.kind, VerdictKind::Holds, "{k}: {v:?}");
            let r = check_order(k, &exp(1.0), &exp(2.0), None, None).unwrap();
            assert_eq!(r.kind, VerdictKind::Fails, "{k}: {r:?}");
        }
    }

    #[test]
    fn smit_is_wmit_with_linear_phi() {
        let a = check_order(OrderKind::Smit, &exp(2.0), &exp(1.0), None, None).unwrap();
        let b = check_order(OrderKind::Wmit, &exp(2.0), &exp(1.0), Some(&WeightFn::half_square()), None).unwrap();
        assert_eq!((a.kind, a.margin, a.comparisons), (b.kind, b.margin, b.comparisons));
    }

    #[test]
    fn configuration_errors() {
        assert!(matches!(check_order_by_label("nope", &exp(1.0), &exp(2.0), None, None), Err(Error::Config(_))));
        assert!(matches!(check_order(OrderKind::Wmit, &exp(1.0), &exp(2.0), None, None), Err(Error::Config(_))));
    }

    #[test]
    fn discrete_examples() {
        let one = DiscreteLaw::point(1);
        let geo = DiscreteLaw::geometric(0.5).unwrap();
        assert_eq!(discrete_order_check(DiscreteOrder::Rhr, &one, &geo).kind, VerdictKind::Holds);
        let v = discrete_order_check(DiscreteOrder::Rhr, &geo, &one);
        assert_eq!(v.kind, VerdictKind::Fails);
        assert!(v.witness.is_some());
        let v = discrete_order_check(DiscreteOrder::Rhr, &geo, &geo.clone());
        assert_eq!((v.kind, v.margin), (VerdictKind::Holds, 0.0));
        assert_eq!(discrete_order_check(DiscreteOrder::Hr, &one, &DiscreteLaw::point(2)).kind, VerdictKind::Holds);
        let g4 = DiscreteLaw::geometric(0.25).unwrap();
        assert_eq!(discrete_order_check(DiscreteOrder::Hr, &geo, &g4).kind, VerdictKind::Holds);
    }

    #[test]
    fn implication_examples() {
        let w = WeightFn::power(2.0).unwrap();
        let r = implication_suite(&exp(2.0), &exp(1.0), &w, None).unwrap();
        assert!(r.violations().is_empty(), "{r:?}");
        assert_eq!(r.implications[0].antecedent, VerdictKind::Holds);
        assert_eq!(r.implications[0].consequent, VerdictKind::Holds);
        assert_eq!(r.implications[1].consequent, VerdictKind::Holds);

        let r = implication_suite(&unif(1.0), &unif(2.0), &WeightFn::identity(), None).unwrap();
        let lir = &r.implications[2];
        assert_eq!((lir.antecedent, lir.consequent), (VerdictKind::Holds, VerdictKind::Holds), "{lir:?}");
        assert!(r.violations().is_empty());
    }
}
