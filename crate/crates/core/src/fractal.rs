//! Epsilon-neighborhood measure of finite point sets on the line, box
//! dimension estimated two independent ways, Minkowski-content estimates
//! and explicit bounds, and power-law exponent fitting.
//!
//! The sausage estimator fits `log |S_eps| = c + (1 - d) log eps` over a
//! geometric grid of radii. The rarefaction estimator works directly on a
//! decreasing sequence via `q_n = 1 / (1 + log(1/a_n) / log n)`. The two
//! routes share no code, so they cross-check each other.

use crate::error::{Error, Result};
use serde::Serialize;

/// Sorted, deduplicated finite subset of the line.
#[derive(Debug, Clone)]
pub struct PointSet {
    pts: Vec<f64>,
    pub note: String,
}

impl PointSet {
    /// Sorts, drops non-finite input, and merges points closer than
    /// `1e-15 * (1 + |x|)`.
    pub fn from_unsorted(mut values: Vec<f64>, note: &str) -> Result<PointSet> {
        values.retain(|v| v.is_finite());
        if values.is_empty() {
            return Err(Error::Precondition("point set is empty".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut pts = Vec::with_capacity(values.len());
        for v in values {
            match pts.last() {
                Some(&last) if v - last < 1e-15 * (1.0 + v.abs()) => {}
                _ => pts.push(v),
            }
        }
        Ok(PointSet {
            pts,
            note: note.to_string(),
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.pts
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn diameter(&self) -> f64 {
        self.pts.last().unwrap() - self.pts.first().unwrap()
    }

    /// Exact Lebesgue measure of the union of intervals `(p - eps, p + eps)`:
    /// one left-to-right sweep merging overlaps.
    pub fn sausage_measure(&self, eps: f64) -> Result<f64> {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::Precondition(format!(
                "sausage radius must be positive and finite, got {eps}"
            )));
        }
        let mut total = 0.0;
        let mut start = self.pts[0] - eps;
        let mut end = self.pts[0] + eps;
        for &p in &self.pts[1..] {
            if p - eps <= end {
                end = p + eps;
            } else {
                total += end - start;
                start = p - eps;
                end = p + eps;
            }
        }
        total += end - start;
        Ok(total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sausage,
    Tricot,
}

/// Box-dimension estimate with fit diagnostics.
///
/// For the sausage method `window` is the epsilon range and `fit_r2` the
/// regression r-squared; for the rarefaction method `window` is the index
/// range and `fit_r2` holds the half-spread of the tail values instead.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionEstimate {
    pub d: f64,
    pub method: Method,
    pub window: (f64, f64),
    pub fit_r2: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContentEstimate {
    pub d: f64,
    pub lower: f64,
    pub upper: f64,
    pub window: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerLawFit {
    /// Decay exponent: `a_n ~ c * n^(-beta)`.
    pub beta: f64,
    pub c: f64,
    pub window: (usize, usize),
    pub fit_r2: f64,
}

fn geometric_grid(eps_min: f64, eps_max: f64, samples: usize) -> Vec<f64> {
    let ratio = eps_min / eps_max;
    (0..samples)
        .map(|i| {
            if samples == 1 {
                eps_max
            } else {
                eps_max * ratio.powf(i as f64 / (samples - 1) as f64)
            }
        })
        .collect()
}

/// Unweighted least squares of y against t; returns (slope, intercept, r2).
fn linear_fit(t: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let mut stt = 0.0;
    let mut sty = 0.0;
    let mut syy = 0.0;
    for (&ti, &yi) in t.iter().zip(y) {
        stt += (ti - tm) * (ti - tm);
        sty += (ti - tm) * (yi - ym);
        syy += (yi - ym) * (yi - ym);
    }
    if stt == 0.0 || syy == 0.0 {
        return (0.0, ym, 0.0);
    }
    let slope = sty / stt;
    let r2 = (sty * sty) / (stt * syy);
    (slope, ym - slope * tm, r2)
}

fn check_window(eps_min: f64, eps_max: f64, samples: usize) -> Result<()> {
    let ordered = eps_min > 0.0 && eps_min < eps_max && eps_max.is_finite();
    if !ordered {
        return Err(Error::Precondition(format!(
            "need 0 < eps_min < eps_max, got [{eps_min}, {eps_max}]"
        )));
    }
    if samples < 8 {
        return Err(Error::Precondition(format!(
            "need at least 8 samples, got {samples}"
        )));
    }
    Ok(())
}

/// Default sampling window for a point set: stay inside the scaling regime.
///
/// At radius `eps` the sausage resolves one connected component per gap
/// exceeding `2 eps`. Above the 8th-largest gap fewer than ~8 components
/// remain and the measure saturates toward `diam + 2 eps` (slope 0, d -> 1);
/// once only the last eighth of the gaps stays unmerged, the finite tail
/// truncation distorts the power law instead. The window is pinned between
/// those two ranks, clamped to `[1e-13 diam, diam/10]`. Returns
/// `(eps_min, eps_max)`.
pub fn default_eps_window(s: &PointSet) -> (f64, f64) {
    let diam = s.diameter();
    if diam <= 0.0 {
        let scale = 0.1 * (1.0 + s.points()[0].abs());
        return (scale * 1e-6, scale);
    }
    let mut gaps: Vec<f64> = s.points().windows(2).map(|w| w[1] - w[0]).collect();
    gaps.sort_by(|a, b| b.partial_cmp(a).unwrap()); // descending
    let m = gaps.len();
    let mut eps_max = diam / 10.0;
    if m > 8 {
        eps_max = eps_max.min(gaps[7] / 2.0);
    }
    let mut eps_min = 1e-13 * diam;
    // gap-rank statistics only make sense on large sets; small sets (e.g.
    // exponentially convergent orbits) want the full depth
    if m >= 4096 {
        let rank = (m / 32).min(m - 1);
        eps_min = eps_min.max(gaps[rank] / 2.0);
        // keep at least ~3.5 decades of window when the gap spectrum allows,
        // without dropping into the all-isolated regime below the last gap
        let depth = eps_max * 3.16e-4;
        if eps_min > depth {
            eps_min = depth.max(gaps[m - 1] / 2.0).max(1e-13 * diam);
        }
    }
    if eps_min >= eps_max {
        eps_min = eps_max * 1e-3;
    }
    (eps_min, eps_max)
}

/// Box dimension from the scaling of the sausage measure: least-squares fit
/// of `log |S_eps|` against `log eps`; `d = 1 - slope`, clamped to [0, 1].
pub fn dim_sausage(
    s: &PointSet,
    eps_max: f64,
    eps_min: f64,
    samples: usize,
) -> Result<DimensionEstimate> {
    check_window(eps_min, eps_max, samples)?;
    let grid = geometric_grid(eps_min, eps_max, samples);
    let mut t = Vec::with_capacity(samples);
    let mut y = Vec::with_capacity(samples);
    for &eps in &grid {
        let m = s.sausage_measure(eps)?;
        t.push(eps.ln());
        y.push(m.ln());
    }
    let (slope, _, r2) = linear_fit(&t, &y);
    let degenerate = y.iter().all(|&v| v == y[0]);
    let d = if degenerate {
        0.0
    } else {
        (1.0 - slope).clamp(0.0, 1.0)
    };
    Ok(DimensionEstimate {
        d,
        method: Method::Sausage,
        window: (eps_min, eps_max),
        fit_r2: if degenerate { 0.0 } else { r2 },
        samples,
    })
}

/// Rarefaction-index dimension of a decreasing positive sequence:
/// the median of `q_n = 1 / (1 + log(1/a_n)/log n)` over the tail
/// `n in [N/10, N]`, with the half-spread reported in `fit_r2`'s slot.
///
/// Requires the differences `a_n - a_{n+1}` to be monotone nonincreasing;
/// up to 1% of the gaps may violate this to absorb floating-point jitter.
pub fn dim_tricot(a: &[f64]) -> Result<DimensionEstimate> {
    dim_tricot_indexed(a, 1, 1)
}

/// Same estimator, but entry `i` of `a` carries the original 1-based index
/// `start + i * stride`. Used for parity subsequences of oscillating orbits,
/// where the decay law is stated in terms of the full orbit's index.
pub fn dim_tricot_indexed(a: &[f64], start: usize, stride: usize) -> Result<DimensionEstimate> {
    assert!(start >= 1 && stride >= 1);
    if a.len() < 16 {
        return Err(Error::Precondition(format!(
            "rarefaction estimator needs at least 16 entries, got {}",
            a.len()
        )));
    }
    if a.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::Precondition(
            "sequence touches zero or is not positive and finite".into(),
        ));
    }
    for w in a.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::Precondition(
                "sequence is not strictly decreasing".into(),
            ));
        }
    }
    let gaps: Vec<f64> = a.windows(2).map(|w| w[0] - w[1]).collect();
    let violations = gaps.windows(2).filter(|w| w[1] > w[0]).count();
    let allowed = a.len() / 100;
    if violations > allowed {
        return Err(Error::Precondition(format!(
            "gap sequence is not monotone nonincreasing ({violations} violations in {} gaps)",
            gaps.len()
        )));
    }

    let n_max = start + (a.len() - 1) * stride;
    let n_lo = (n_max / 10).max(2);
    let mut qs: Vec<f64> = Vec::new();
    for (i, &v) in a.iter().enumerate() {
        let n = start + i * stride;
        if n < n_lo {
            continue;
        }
        let q = 1.0 / (1.0 + (1.0 / v).ln() / (n as f64).ln());
        qs.push(q);
    }
    if qs.is_empty() {
        return Err(Error::Precondition(
            "tail window is empty; sequence too short".into(),
        ));
    }
    let mut sorted = qs.clone();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let median = sorted[sorted.len() / 2];
    let spread = (sorted[sorted.len() - 1] - sorted[0]) / 2.0;
    Ok(DimensionEstimate {
        d: median.clamp(0.0, 1.0),
        method: Method::Tricot,
        window: (n_lo as f64, n_max as f64),
        fit_r2: spread.clamp(0.0, 1.0),
        samples: qs.len(),
    })
}

/// Least-squares fit of `log a_n` against `log n` over `n in [n0, N]`
/// (1-based); returns the negated slope as the decay exponent.
pub fn fit_decay_exponent(a: &[f64], n0: usize) -> Result<PowerLawFit> {
    if n0 < 1 || a.len() <= 2 * n0 {
        return Err(Error::Precondition(format!(
            "need length > 2*n0 (length {}, n0 {n0})",
            a.len()
        )));
    }
    let mut t = Vec::new();
    let mut y = Vec::new();
    for (i, &v) in a.iter().enumerate().skip(n0 - 1) {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Precondition(format!(
                "nonpositive entry {v} at index {} in fit window",
                i + 1
            )));
        }
        t.push(((i + 1) as f64).ln());
        y.push(v.ln());
    }
    let (slope, intercept, r2) = linear_fit(&t, &y);
    Ok(PowerLawFit {
        beta: -slope,
        c: intercept.exp(),
        window: (n0, a.len()),
        fit_r2: r2,
    })
}

/// Envelope constants of `a_n ~ n^(-beta)`: the min and max of `a_n * n^beta`
/// over `n >= n0`. Finite positive values witness Minkowski-style
/// nondegeneracy of the decay.
pub fn envelope_constants(a: &[f64], beta: f64, n0: usize) -> Result<(f64, f64)> {
    if n0 < 1 || a.len() <= n0 {
        return Err(Error::Precondition(format!(
            "need length > n0 (length {}, n0 {n0})",
            a.len()
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, &v) in a.iter().enumerate().skip(n0 - 1) {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Precondition(format!(
                "nonpositive entry {v} at index {}",
                i + 1
            )));
        }
        let scaled = v * ((i + 1) as f64).powf(beta);
        lo = lo.min(scaled);
        hi = hi.max(scaled);
    }
    Ok((lo, hi))
}

/// Normalized sausage measure `|S_eps| / eps^(1-d)` over a geometric grid;
/// reports the window extrema rather than claiming limits, since finite data
/// cannot certify a limsup or liminf.
pub fn content_estimate(
    s: &PointSet,
    d: f64,
    eps_max: f64,
    eps_min: f64,
    samples: usize,
) -> Result<ContentEstimate> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::Precondition(format!(
            "content exponent must lie in [0, 1], got {d}"
        )));
    }
    check_window(eps_min, eps_max, samples)?;
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for eps in geometric_grid(eps_min, eps_max, samples) {
        let v = s.sausage_measure(eps)? / eps.powf(1.0 - d);
        lower = lower.min(v);
        upper = upper.max(v);
    }
    Ok(ContentEstimate {
        d,
        lower,
        upper,
        window: (eps_min, eps_max),
    })
}

/// Closed-form lower/upper bounds on the d-dimensional Minkowski contents of
/// the trajectory of `x_{n+1} = x_n - f(x_n)` with `A x^alpha <= f <= B x^alpha`
/// and envelope constants `a_lo <= x_n n^beta <= b_hi`, where `d = 1 - 1/alpha`:
///
/// ```text
/// lower = (a_lo/b_hi) (2/B)^(1/alpha) + 2 (A a_lo^alpha / 2)^d
/// upper = (b_hi/a_lo) (2/A)^(1/alpha) + 2 (B b_hi^alpha / 2)^d
/// ```
pub fn content_bounds(
    big_a: f64,
    big_b: f64,
    a_lo: f64,
    b_hi: f64,
    alpha: f64,
) -> Result<(f64, f64)> {
    let scale_ok = 0.0 < big_a && big_a <= big_b;
    if !scale_ok {
        return Err(Error::Precondition(format!(
            "need 0 < A <= B, got A={big_a}, B={big_b}"
        )));
    }
    let envelope_ok = 0.0 < a_lo && a_lo <= b_hi;
    if !envelope_ok {
        return Err(Error::Precondition(format!(
            "need 0 < a_lo <= b_hi, got a_lo={a_lo}, b_hi={b_hi}"
        )));
    }
    let alpha_ok = alpha > 1.0;
    if !alpha_ok {
        return Err(Error::Precondition(format!("need alpha > 1, got {alpha}")));
    }
    let d = 1.0 - 1.0 / alpha;
    let lower = (a_lo / b_hi) * (2.0 / big_b).powf(1.0 / alpha)
        + 2.0 * (big_a * a_lo.powf(alpha) / 2.0).powf(d);
    let upper = (b_hi / a_lo) * (2.0 / big_a).powf(1.0 / alpha)
        + 2.0 * (big_b * b_hi.powf(alpha) / 2.0).powf(d);
    Ok((lower, upper))
}

/// Conjectured Minkowski content `(2/A)^(1/alpha) * alpha/(alpha-1)` of the
/// trajectory of `x_{n+1} = x_n - A x_n^alpha`. This value comes from a
/// numerical observation, not a proof; tests treat it as a target to bracket,
/// never as ground truth.
pub fn conjectured_content(big_a: f64, alpha: f64) -> f64 {
    assert!(big_a > 0.0 && alpha > 1.0);
    (2.0 / big_a).powf(1.0 / alpha) * alpha / (alpha - 1.0)
}
