//! Map families, orbit generation, fixed points, and periodic cycles.

use crate::error::{Error, Result};
use crate::expr::MapExpr;
use crate::jet::Jet;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;

/// Orbits with |x| beyond this are treated as divergent.
pub const DIVERGENCE_CUTOFF: f64 = 1e12;

/// Default convergence floor: effectively off, because the interesting
/// orbits converge polynomially and must not be truncated early.
pub const DEFAULT_FLOOR: f64 = 1e-300;

/// Default grid for root bracketing on intervals of length up to ~2.
pub const DEFAULT_GRID: usize = 4096;

/// One-parameter map family with the parameter left free.
#[derive(Debug, Clone, PartialEq)]
pub enum MapFamily {
    /// `F(lam, x) = lam * x * (1 - x)`
    Logistic,
    /// `F(lam, x) = lam * exp(x)`
    Exponential,
    Custom(MapExpr),
}

impl MapFamily {
    pub fn eval_plain(&self, lam: f64, x: f64) -> Result<f64> {
        match self {
            MapFamily::Logistic => Ok(lam * x * (1.0 - x)),
            MapFamily::Exponential => Ok(lam * x.exp()),
            MapFamily::Custom(e) => e.eval_plain(lam, x),
        }
    }

    /// One application of `F` in jet arithmetic; `x` may be any jet, which is
    /// what makes composition (iterated maps) work.
    pub fn eval_jet_with(&self, lam: &Jet, x: &Jet) -> Result<Jet> {
        match self {
            MapFamily::Logistic => {
                let one = Jet::constant(1.0, x.order());
                Ok(lam.mul(x).mul(&one.sub(x)))
            }
            MapFamily::Exponential => Ok(lam.mul(&x.exp())),
            MapFamily::Custom(e) => e.eval_with(lam, x),
        }
    }

    pub fn name(&self) -> String {
        match self {
            MapFamily::Logistic => "logistic".to_string(),
            MapFamily::Exponential => "exponential".to_string(),
            MapFamily::Custom(e) => format!("expr({})", e.source()),
        }
    }
}

/// A map with fixed parameter, iterated `power` times per step.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSystem {
    pub family: MapFamily,
    pub lam: f64,
    pub power: u32,
}

impl MapSystem {
    pub fn new(family: MapFamily, lam: f64) -> MapSystem {
        MapSystem {
            family,
            lam,
            power: 1,
        }
    }

    pub fn with_power(&self, power: u32) -> MapSystem {
        assert!(power >= 1, "map power must be at least 1");
        MapSystem {
            family: self.family.clone(),
            lam: self.lam,
            power,
        }
    }

    /// `F^power(lam, x)` by plain evaluation.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let mut v = x;
        for _ in 0..self.power {
            v = self.family.eval_plain(self.lam, v)?;
        }
        Ok(v)
    }

    /// Jet of `F^power(lam, .)` at `x0`, built by composing the jet of `F`
    /// with itself, so higher derivatives of the iterate are exact.
    pub fn eval_jet(&self, x0: f64, order: usize) -> Result<Jet> {
        let lam = Jet::constant(self.lam, order);
        let mut j = Jet::variable(x0, order);
        for _ in 0..self.power {
            j = self.family.eval_jet_with(&lam, &j)?;
        }
        Ok(j)
    }

    /// Derivative of the iterated map at `x0`.
    pub fn multiplier(&self, x0: f64) -> Result<f64> {
        Ok(self.eval_jet(x0, 1)?.derivative(1))
    }

    pub fn descriptor(&self) -> String {
        format!(
            "{} lam={} power={}",
            self.family.name(),
            self.lam,
            self.power
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum StopReason {
    MaxIter,
    Converged { limit: f64 },
    Diverged { note: String },
    CycleDetected { period: usize },
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopReason::MaxIter => f.write_str("max_iter"),
            StopReason::Converged { limit } => write!(f, "converged({limit})"),
            StopReason::Diverged { note } => write!(f, "diverged({note})"),
            StopReason::CycleDetected { period } => write!(f, "cycle_detected({period})"),
        }
    }
}

/// A finite trajectory `x_1..x_N`.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub xs: Vec<f64>,
    pub map: MapSystem,
    pub x1: f64,
    pub stop_reason: StopReason,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Default burn-in prefix for asymptotic analyses: the theorems are
    /// statements about large `n`, so the transient is noise.
    pub fn default_burn_in(&self) -> usize {
        default_burn_in(self.xs.len())
    }
}

pub fn default_burn_in(len: usize) -> usize {
    let n0 = std::cmp::max(64, len / 100);
    // keep a usable tail even for short orbits
    if n0 + 16 >= len {
        len.saturating_sub(16).min(len / 2)
    } else {
        n0
    }
}

/// Generate an orbit until `max_iter` points exist, a step falls below
/// `floor`, the orbit diverges, or a value repeats exactly.
pub fn iterate(map: &MapSystem, x1: f64, max_iter: usize, floor: f64) -> Orbit {
    assert!(max_iter >= 1, "max_iter must be at least 1");
    assert!(floor >= 0.0, "floor must be nonnegative");
    let mut xs = Vec::with_capacity(max_iter.min(1 << 22));
    xs.push(x1);
    let mut seen: HashMap<u64, usize> = HashMap::new();
    seen.insert(x1.to_bits(), 0);
    let mut stop_reason = StopReason::MaxIter;
    while xs.len() < max_iter {
        let cur = *xs.last().unwrap();
        let next = match map.eval(cur) {
            Ok(v) => v,
            Err(e) => {
                stop_reason = StopReason::Diverged {
                    note: format!("evaluation failed: {e}"),
                };
                break;
            }
        };
        if !next.is_finite() || next.abs() > DIVERGENCE_CUTOFF {
            stop_reason = StopReason::Diverged {
                note: if next.is_finite() {
                    "magnitude cutoff".to_string()
                } else {
                    "non-finite value".to_string()
                },
            };
            break;
        }
        // an exact fixed point of the float map adds no information
        if next == cur {
            stop_reason = StopReason::Converged { limit: next };
            break;
        }
        if (next - cur).abs() < floor {
            xs.push(next);
            stop_reason = StopReason::Converged { limit: next };
            break;
        }
        if let Some(&first) = seen.get(&next.to_bits()) {
            stop_reason = StopReason::CycleDetected {
                period: xs.len() - first,
            };
            break;
        }
        seen.insert(next.to_bits(), xs.len());
        xs.push(next);
    }
    Orbit {
        xs,
        map: map.clone(),
        x1,
        stop_reason,
    }
}

/// A periodic trajectory of minimal period `period`.
#[derive(Debug, Clone, Serialize)]
pub struct Cycle {
    /// Sorted ascending.
    pub points: Vec<f64>,
    pub period: u32,
    /// `(F^period)'` at a point of the cycle.
    pub multiplier: f64,
}

/// Result of a cycle search; grouping failures are reported, not fatal.
#[derive(Debug, Clone, Default)]
pub struct CycleSearch {
    pub cycles: Vec<Cycle>,
    pub diagnostics: Vec<String>,
}

/// Fixed points of the iterated map on `[lo, hi]`, with their multipliers.
///
/// Brackets sign changes of `G(x) = F^q(x) - x` on a uniform grid and
/// refines by bisection. Tangential roots produce no sign change in `G`;
/// those are recovered by bracketing sign changes of `G'` and accepting
/// critical points where `|G|` is tiny. Roots closer than 1e-10 are merged.
pub fn find_fixed_points(map: &MapSystem, lo: f64, hi: f64, grid: usize) -> Vec<(f64, f64)> {
    assert!(lo < hi, "need lo < hi");
    assert!(grid >= 2, "need at least 2 grid cells");

    let g = |x: f64| -> Option<f64> {
        match map.eval(x) {
            Ok(v) if v.is_finite() => Some(v - x),
            _ => None,
        }
    };
    let gp = |x: f64| -> Option<f64> {
        match map.eval_jet(x, 1) {
            Ok(j) if j.is_finite() => Some(j.derivative(1) - 1.0),
            _ => None,
        }
    };

    let step = (hi - lo) / grid as f64;
    let nodes: Vec<f64> = (0..=grid)
        .map(|i| if i == grid { hi } else { lo + i as f64 * step })
        .collect();
    let g_vals: Vec<Option<f64>> = nodes.iter().map(|&x| g(x)).collect();

    let mut roots: Vec<f64> = Vec::new();

    for i in 0..grid {
        if let (Some(a), Some(b)) = (g_vals[i], g_vals[i + 1]) {
            if a == 0.0 {
                roots.push(nodes[i]);
            } else if a * b < 0.0 {
                if let Some(r) = bisect(&g, nodes[i], nodes[i + 1], a) {
                    roots.push(r);
                }
            }
        }
    }
    if let Some(last) = g_vals[grid] {
        if last == 0.0 {
            roots.push(nodes[grid]);
        }
    }

    // tangential roots: critical points of G where G itself nearly vanishes
    let gp_vals: Vec<Option<f64>> = nodes.iter().map(|&x| gp(x)).collect();
    for i in 0..grid {
        if let (Some(a), Some(b)) = (gp_vals[i], gp_vals[i + 1]) {
            if a * b < 0.0 || a == 0.0 {
                let xc = if a == 0.0 {
                    Some(nodes[i])
                } else {
                    bisect(&gp, nodes[i], nodes[i + 1], a)
                };
                if let Some(xc) = xc {
                    if let Some(gv) = g(xc) {
                        if gv.abs() <= 1e-12 * (1.0 + xc.abs()) {
                            roots.push(xc);
                        }
                    }
                }
            }
        }
    }

    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut dedup: Vec<f64> = Vec::new();
    for r in roots {
        match dedup.last() {
            Some(&last) if (r - last).abs() < 1e-10 => {
                // keep the candidate with the smaller residual
                let keep_new = match (g(r), g(last)) {
                    (Some(gr), Some(gl)) => gr.abs() < gl.abs(),
                    _ => false,
                };
                if keep_new {
                    *dedup.last_mut().unwrap() = r;
                }
            }
            _ => dedup.push(r),
        }
    }

    dedup
        .into_iter()
        .filter_map(|r| map.multiplier(r).ok().map(|m| (r, m)))
        .collect()
}

fn bisect(f: &dyn Fn(f64) -> Option<f64>, mut a: f64, mut b: f64, fa: f64) -> Option<f64> {
    let mut sign_a = fa.signum();
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= 1e-14 * (1.0 + mid.abs()) || mid == a || mid == b {
            return Some(mid);
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == sign_a {
            a = mid;
            sign_a = fm.signum();
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

fn proper_divisors(q: u32) -> Vec<u32> {
    (1..q).filter(|d| q.is_multiple_of(*d)).collect()
}

/// Cycles of length exactly `q` for the iterated map, found as fixed points
/// of `F^q` with lower-period points removed, grouped into orbits under `F`.
pub fn find_cycles(map: &MapSystem, q: u32, lo: f64, hi: f64, grid: usize) -> CycleSearch {
    assert!(q >= 1);
    let mut out = CycleSearch::default();

    let full_power = map.with_power(map.power * q);
    let roots_q = find_fixed_points(&full_power, lo, hi, grid);

    let mut lower: Vec<f64> = Vec::new();
    for d in proper_divisors(q) {
        let sub = map.with_power(map.power * d);
        lower.extend(find_fixed_points(&sub, lo, hi, grid).into_iter().map(|r| r.0));
    }

    let candidates: Vec<f64> = roots_q
        .into_iter()
        .map(|(r, _)| r)
        .filter(|r| lower.iter().all(|l| (r - l).abs() > 1e-9))
        .collect();

    let step_map = map.with_power(map.power);
    let mut used = vec![false; candidates.len()];

    for i in 0..candidates.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let start = candidates[i];
        let mut chain = vec![start];
        let mut cur = start;
        let mut failed = false;
        for _ in 1..q {
            let img = match step_map.eval(cur) {
                Ok(v) => v,
                Err(e) => {
                    out.diagnostics
                        .push(format!("cycle step failed at {cur}: {e}"));
                    failed = true;
                    break;
                }
            };
            let nearest = candidates
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    (img - **a).abs().partial_cmp(&(img - **b).abs()).unwrap()
                })
                .map(|(j, &v)| (j, v));
            match nearest {
                Some((j, v)) if (img - v).abs() <= 1e-8 && !used[j] => {
                    used[j] = true;
                    chain.push(v);
                    cur = v;
                }
                Some((_, v)) => {
                    out.diagnostics.push(format!(
                        "orbit of root {start} does not close: F({cur}) = {img}, nearest root {v}"
                    ));
                    failed = true;
                    break;
                }
                None => {
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            continue;
        }
        match step_map.eval(cur) {
            Ok(back) if (back - start).abs() <= 1e-8 => {}
            Ok(back) => {
                out.diagnostics.push(format!(
                    "orbit of root {start} does not return: F^{q}(start) ~ {back}"
                ));
                continue;
            }
            Err(e) => {
                out.diagnostics
                    .push(format!("cycle closure failed at {cur}: {e}"));
                continue;
            }
        }
        let multiplier = match full_power.multiplier(start) {
            Ok(m) => m,
            Err(e) => {
                out.diagnostics
                    .push(format!("multiplier failed at {start}: {e}"));
                continue;
            }
        };
        chain.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.cycles.push(Cycle {
            points: chain,
            period: q,
            multiplier,
        });
    }
    out.cycles.sort_by(|a, b| a.points[0].partial_cmp(&b.points[0]).unwrap());
    out
}

/// What distances are measured against.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Point(f64),
    Cycle(Vec<f64>),
}

impl Target {
    pub fn from_cycle(c: &Cycle) -> Target {
        Target::Cycle(c.points.clone())
    }

    pub fn points(&self) -> Vec<f64> {
        match self {
            Target::Point(p) => vec![*p],
            Target::Cycle(ps) => ps.clone(),
        }
    }

    pub fn period(&self) -> u32 {
        match self {
            Target::Point(_) => 1,
            Target::Cycle(ps) => ps.len() as u32,
        }
    }
}

/// `d_n = dist(x_n, target)`, plus the signed odd/even-index subsequences of
/// `x_n - x0` when the target is a single point (the oscillating theorems
/// analyze those two monotone halves).
#[derive(Debug, Clone)]
pub struct DistanceData {
    pub dist: Vec<f64>,
    pub odd_signed: Option<Vec<f64>>,
    pub even_signed: Option<Vec<f64>>,
}

pub fn distance_sequence(orbit: &Orbit, target: &Target) -> Result<DistanceData> {
    if orbit.is_empty() {
        return Err(Error::Precondition("orbit is empty".into()));
    }
    let pts = target.points();
    let dist: Vec<f64> = orbit
        .xs
        .iter()
        .map(|&x| {
            pts.iter()
                .map(|&a| (x - a).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let (odd, even) = match target {
        Target::Point(x0) => {
            let signed: Vec<f64> = orbit.xs.iter().map(|&x| x - x0).collect();
            // x_1, x_3, ... are the odd-index entries (1-based)
            let odd: Vec<f64> = signed.iter().copied().step_by(2).collect();
            let even: Vec<f64> = signed.iter().copied().skip(1).step_by(2).collect();
            (Some(odd), Some(even))
        }
        Target::Cycle(_) => (None, None),
    };
    Ok(DistanceData {
        dist,
        odd_signed: odd,
        even_signed: even,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logistic(lam: f64) -> MapSystem {
        MapSystem::new(MapFamily::Logistic, lam)
    }

    #[test]
    fn hand_iterated_logistic_lambda_one() {
        let orbit = iterate(&logistic(1.0), 0.5, 10, 0.0);
        assert_eq!(orbit.xs[1], 0.25);
        assert_eq!(orbit.xs[2], 0.25 * 0.75);
        assert_eq!(orbit.len(), 10);
        for w in orbit.xs.windows(2) {
            assert!(w[1] < w[0], "monotone decreasing toward 0");
        }
    }

    #[test]
    fn fixed_point_orbit_converges_immediately() {
        let orbit = iterate(&logistic(1.0), 0.0, 100, DEFAULT_FLOOR);
        assert_eq!(orbit.len(), 1);
        assert!(matches!(orbit.stop_reason, StopReason::Converged { .. }));
    }

    #[test]
    fn oscillation_around_two_thirds() {
        let orbit = iterate(&logistic(3.0), 0.5, 2000, DEFAULT_FLOOR);
        let x0 = 2.0 / 3.0;
        let burn = 200;
        for w in orbit.xs[burn..].windows(2) {
            assert!(
                (w[0] - x0) * (w[1] - x0) < 0.0,
                "signs must alternate after burn-in"
            );
        }
    }

    #[test]
    fn parsed_expressions_match_builtin_families() {
        let logistic_expr = MapSystem::new(
            MapFamily::Custom(crate::expr::MapExpr::parse("lam*x*(1-x)").unwrap()),
            3.3,
        );
        let logistic_builtin = logistic(3.3);
        let exp_expr = MapSystem::new(
            MapFamily::Custom(crate::expr::MapExpr::parse("lam*exp(x)").unwrap()),
            -1.7,
        );
        let exp_builtin = MapSystem::new(MapFamily::Exponential, -1.7);
        for i in 0..50 {
            let x = -1.0 + 0.04 * i as f64;
            assert_eq!(
                logistic_expr.eval(x).unwrap(),
                logistic_builtin.eval(x).unwrap()
            );
            assert_eq!(exp_expr.eval(x).unwrap(), exp_builtin.eval(x).unwrap());
            let a = logistic_expr.eval_jet(x, 3).unwrap();
            let b = logistic_builtin.eval_jet(x, 3).unwrap();
            for k in 0..=3 {
                let tol = 4.0 * f64::EPSILON * b.coeff(k).abs().max(1.0);
                assert!((a.coeff(k) - b.coeff(k)).abs() <= tol);
            }
        }
    }

    #[test]
    fn power_equals_repeated_application() {
        let m3 = logistic(3.7).with_power(3);
        let base = logistic(3.7);
        let mut v = 0.3;
        for _ in 0..3 {
            v = base.eval(v).unwrap();
        }
        let direct = m3.eval(0.3).unwrap();
        assert!((direct - v).abs() <= 8.0 * f64::EPSILON * v.abs().max(1.0));
    }

    #[test]
    fn divergence_detection() {
        let m = MapSystem::new(MapFamily::Exponential, 5.0);
        let orbit = iterate(&m, 1.0, 10_000, DEFAULT_FLOOR);
        assert!(matches!(orbit.stop_reason, StopReason::Diverged { .. }));
    }

    #[test]
    fn float_two_cycle_is_detected() {
        // at lam=3.2 the attracting 2-cycle pulls the float orbit onto an
        // exactly repeating pair
        let orbit = iterate(&logistic(3.2), 0.5, 1_000_000, DEFAULT_FLOOR);
        match orbit.stop_reason {
            StopReason::CycleDetected { period } => assert_eq!(period % 2, 0),
            StopReason::Converged { .. } => {}
            ref other => panic!("expected early stop, got {other:?}"),
        }
        assert!(orbit.len() < 10_000);
    }

    #[test]
    fn logistic_fixed_points_at_lambda_three() {
        let fps = find_fixed_points(&logistic(3.0), 0.0, 1.0, DEFAULT_GRID);
        assert_eq!(fps.len(), 2);
        assert!(fps[0].0.abs() < 1e-12);
        assert!((fps[0].1 - 3.0).abs() < 1e-9);
        assert!((fps[1].0 - 2.0 / 3.0).abs() < 1e-12);
        assert!((fps[1].1 + 1.0).abs() < 1e-9);
    }

    #[test]
    fn tangential_root_at_lambda_one() {
        // G(x) = -x^2 never changes sign; the critical-point path finds it
        let fps = find_fixed_points(&logistic(1.0), -0.5, 1.0, DEFAULT_GRID);
        assert_eq!(fps.len(), 1);
        assert!(fps[0].0.abs() < 1e-9);
        assert!((fps[0].1 - 1.0).abs() < 1e-7);
    }

    #[test]
    fn exponential_tangency_root() {
        let m = MapSystem::new(MapFamily::Exponential, (-1.0f64).exp());
        let fps = find_fixed_points(&m, 0.0, 2.0, DEFAULT_GRID);
        assert_eq!(fps.len(), 1);
        assert!((fps[0].0 - 1.0).abs() < 1e-7);
        assert!((fps[0].1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_cycle_matches_closed_form() {
        // roots of F^2(x) = x beyond the fixed points, solved by hand:
        // a = (lam + 1 +- sqrt((lam + 1)(lam - 3))) / (2 lam)
        let lam = 1.0 + 6.0f64.sqrt();
        let search = find_cycles(&logistic(lam), 2, 0.0, 1.0, DEFAULT_GRID);
        assert_eq!(search.cycles.len(), 1, "{:?}", search.diagnostics);
        let c = &search.cycles[0];
        let disc = ((lam + 1.0) * (lam - 3.0)).sqrt();
        let a_lo = (lam + 1.0 - disc) / (2.0 * lam);
        let a_hi = (lam + 1.0 + disc) / (2.0 * lam);
        assert!((c.points[0] - a_lo).abs() < 1e-10);
        assert!((c.points[1] - a_hi).abs() < 1e-10);
        // F maps the cycle to itself
        let f = logistic(lam);
        assert!((f.eval(c.points[0]).unwrap() - c.points[1]).abs() < 1e-10);
        assert!((f.eval(c.points[1]).unwrap() - c.points[0]).abs() < 1e-10);
        assert!((c.multiplier + 1.0).abs() < 1e-7);
    }

    #[test]
    fn period_three_tangent_cycle() {
        // at lam = 1 + sqrt(8) the period-3 orbit is born; the fixed points
        // of F^3 beyond the period-1 points form exactly one cycle that F
        // permutes in the order a1 -> a2 -> a3 -> a1
        let lam = 1.0 + 8.0f64.sqrt();
        let m = logistic(lam);
        let search = find_cycles(&m, 3, 0.0, 1.0, DEFAULT_GRID);
        assert_eq!(search.cycles.len(), 1, "{:?}", search.diagnostics);
        let c = &search.cycles[0];
        assert_eq!(c.points.len(), 3);
        assert!(c.points.windows(2).all(|w| w[0] < w[1]));
        assert!(c.points[0] > 0.0 && c.points[2] < 1.0);
        let (a1, a2, a3) = (c.points[0], c.points[1], c.points[2]);
        assert!((m.eval(a1).unwrap() - a2).abs() < 1e-8);
        assert!((m.eval(a2).unwrap() - a3).abs() < 1e-8);
        assert!((m.eval(a3).unwrap() - a1).abs() < 1e-8);
        assert!((c.multiplier - 1.0).abs() < 1e-9);
        for &a in &c.points {
            let residual = (m.with_power(3).eval(a).unwrap() - a).abs();
            assert!(residual <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn cycles_of_length_one_match_fixed_points() {
        let m = logistic(2.5);
        let fps = find_fixed_points(&m, 0.0, 1.0, DEFAULT_GRID);
        let search = find_cycles(&m, 1, 0.0, 1.0, DEFAULT_GRID);
        assert_eq!(search.cycles.len(), fps.len());
        for (c, (r, mult)) in search.cycles.iter().zip(&fps) {
            assert!((c.points[0] - r).abs() < 1e-12);
            assert!((c.multiplier - mult).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_points_are_not_reported_as_higher_cycles() {
        let search = find_cycles(&logistic(3.2), 2, 0.0, 1.0, DEFAULT_GRID);
        let fps = find_fixed_points(&logistic(3.2), 0.0, 1.0, DEFAULT_GRID);
        for c in &search.cycles {
            for p in &c.points {
                for (r, _) in &fps {
                    assert!((p - r).abs() > 1e-6, "fixed point leaked into 2-cycles");
                }
            }
        }
        assert_eq!(search.cycles.len(), 1);
    }

    #[test]
    fn distance_sequence_basics() {
        let orbit = iterate(&logistic(1.0), 0.5, 64, 0.0);
        let d = distance_sequence(&orbit, &Target::Point(0.0)).unwrap();
        assert_eq!(d.dist, orbit.xs);
        for w in d.dist.windows(2) {
            assert!(w[1] < w[0]);
        }
        let constant = iterate(&logistic(1.0), 0.0, 5, DEFAULT_FLOOR);
        let d0 = distance_sequence(&constant, &Target::Point(0.0)).unwrap();
        assert!(d0.dist.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn parity_split_monotone_for_period_doubling() {
        let orbit = iterate(&logistic(3.0), 0.5, 100_000, DEFAULT_FLOOR);
        let d = distance_sequence(&orbit, &Target::Point(2.0 / 3.0)).unwrap();
        let odd = d.odd_signed.unwrap();
        let even = d.even_signed.unwrap();
        let burn = 500;
        let s_odd = odd[burn].signum();
        for w in odd[burn..].windows(2) {
            assert_eq!(w[0].signum(), s_odd);
            assert!(w[1].abs() < w[0].abs(), "odd class must contract");
        }
        let s_even = even[burn].signum();
        assert_ne!(s_odd, s_even, "classes sit on opposite sides");
        for w in even[burn..].windows(2) {
            assert!(w[1].abs() < w[0].abs(), "even class must contract");
        }
    }

    #[test]
    fn orbit_determinism() {
        let a = iterate(&logistic(3.0), 0.5, 10_000, DEFAULT_FLOOR);
        let b = iterate(&logistic(3.0), 0.5, 10_000, DEFAULT_FLOOR);
        assert_eq!(a.xs, b.xs);
    }

    #[test]
    fn orbit_steps_recompute() {
        let m = logistic(3.0);
        let orbit = iterate(&m, 0.5, 1000, DEFAULT_FLOOR);
        for w in orbit.xs.windows(2) {
            let re = m.eval(w[0]).unwrap();
            assert!((re - w[1]).abs() <= 8.0 * f64::EPSILON * w[1].abs().max(1.0));
        }
    }
}
