//! Classification of fixed points and cycles, with predicted box dimension
//! and decay rate for nearby trajectories, plus bifurcation-condition checks
//! for parameterized families.
//!
//! The decision tree keys on the multiplier `mu = (F^q)'(x0)`:
//!
//! * `|mu| < 1`: hyperbolic attractor, trajectories converge exponentially,
//!   dimension 0.
//! * `|mu| > 1`: repelling, no local prediction.
//! * `mu = 1`: tangent case. The first nonvanishing derivative of order
//!   `k >= 2` gives monotone convergence at rate `n^(-1/(k-1))` and
//!   dimension `1 - 1/k`.
//! * `mu = -1`: oscillating case. The doubled map `G = F^(2q)` satisfies
//!   `G = x - g` with `g` of odd leading order `2a - 1`; trajectories decay
//!   like `n^(-1/(2a-2))` and the dimension is `1 - 1/(2a-1)`.
//!
//! Derivatives come from jets, so the sign tests see only rounding noise,
//! never truncation error.

use crate::dynamics::{
    self, default_burn_in, distance_sequence, iterate, MapFamily, MapSystem, StopReason, Target,
    DEFAULT_FLOOR,
};
use crate::error::{Error, Result};
use crate::fractal::{
    self, content_estimate, default_eps_window, dim_sausage, fit_decay_exponent, ContentEstimate,
    DimensionEstimate, PointSet, PowerLawFit,
};
use crate::jet::Jet;
use serde::Serialize;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ORDER: usize = 8;

/// Which side of the fixed point admits orbits that converge monotonically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Right,
    Left,
    Both,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivLead {
    pub order: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    /// `(F^q)'(x0)`.
    pub multiplier: f64,
    /// First nonvanishing derivative of the map itself, order >= 2.
    pub map_lead: Option<DerivLead>,
    /// First nonvanishing derivative of the doubled map (oscillating case).
    pub doubled_lead: Option<DerivLead>,
    pub side: Option<Side>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Kind {
    Hyperbolic,
    Repelling,
    TangentMonotone { alpha: u32 },
    TangentOscillating { alpha: u32 },
    SuperpolynomialSuspect,
    DegenerateUnresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub kind: Kind,
    /// Predicted box dimension of nearby trajectories, when the theory
    /// gives one.
    pub predicted_dim: Option<f64>,
    /// Predicted decay exponent: `|x_n - x0| ~ n^(-predicted_beta)`.
    pub predicted_beta: Option<f64>,
    /// Set when every derivative up to the scan order vanished, so the
    /// dimension-1 prediction rests on absence of evidence.
    pub tentative: bool,
    pub evidence: Evidence,
}

/// Classify the fixed point `x0` of the iterated map.
///
/// `x0` must satisfy `|F^q(x0) - x0| <= tol * (1 + |x0|)`. Derivatives with
/// magnitude below `tol` are treated as zero; `max_order` bounds the scan
/// for the first nonvanishing one.
pub fn classify_fixed_point(
    map: &MapSystem,
    x0: f64,
    max_order: usize,
    tol: f64,
) -> Result<Classification> {
    assert!(max_order >= 2, "need max_order >= 2");
    assert!(tol > 0.0, "need tol > 0");
    let fx = map.eval(x0)?;
    if (fx - x0).abs() > tol * (1.0 + x0.abs()) {
        return Err(Error::Precondition(format!(
            "{x0} is not a fixed point: |F(x0) - x0| = {:e}",
            (fx - x0).abs()
        )));
    }

    let jet = map.eval_jet(x0, max_order)?;
    let mu = jet.derivative(1);
    let map_lead = first_lead(&jet, max_order, tol);

    if (mu - 1.0).abs() <= tol {
        // monotone tangent: F = x - f near x0 with f of order k
        return Ok(match map_lead {
            Some(lead) => {
                let k = lead.order;
                let phi = -lead.value; // sign of f's leading coefficient
                let side = match (k % 2 == 0, phi > 0.0) {
                    (true, true) => Side::Right,
                    (true, false) => Side::Left,
                    (false, true) => Side::Both,
                    (false, false) => Side::Neither,
                };
                Classification {
                    kind: Kind::TangentMonotone { alpha: k },
                    predicted_dim: Some(1.0 - 1.0 / k as f64),
                    predicted_beta: Some(1.0 / (k - 1) as f64),
                    tentative: false,
                    evidence: Evidence {
                        multiplier: mu,
                        map_lead,
                        doubled_lead: None,
                        side: Some(side),
                    },
                }
            }
            None => superpolynomial(mu, None),
        });
    }

    if (mu + 1.0).abs() <= tol {
        // oscillating tangent: study the doubled map G = F^(2q) = x - g
        let doubled = map.with_power(map.power * 2);
        let jet_g = doubled.eval_jet(x0, max_order)?;
        let doubled_lead = first_lead(&jet_g, max_order, tol);
        return Ok(match doubled_lead {
            Some(lead) => {
                let k = lead.order;
                let gamma = -lead.value; // sign of g's leading coefficient
                if k % 2 == 1 && gamma > 0.0 {
                    let alpha = k.div_ceil(2);
                    Classification {
                        kind: Kind::TangentOscillating { alpha },
                        predicted_dim: Some(1.0 - 1.0 / k as f64),
                        predicted_beta: Some(1.0 / (k - 1) as f64),
                        tentative: false,
                        evidence: Evidence {
                            multiplier: mu,
                            map_lead,
                            doubled_lead,
                            side: Some(Side::Both),
                        },
                    }
                } else {
                    Classification {
                        kind: Kind::DegenerateUnresolved,
                        predicted_dim: None,
                        predicted_beta: None,
                        tentative: false,
                        evidence: Evidence {
                            multiplier: mu,
                            map_lead,
                            doubled_lead,
                            side: None,
                        },
                    }
                }
            }
            None => superpolynomial(mu, map_lead),
        });
    }

    let kind = if mu.abs() < 1.0 {
        Kind::Hyperbolic
    } else {
        Kind::Repelling
    };
    let predicted_dim = match kind {
        Kind::Hyperbolic => Some(0.0),
        _ => None,
    };
    Ok(Classification {
        kind,
        predicted_dim,
        predicted_beta: None,
        tentative: false,
        evidence: Evidence {
            multiplier: mu,
            map_lead,
            doubled_lead: None,
            side: None,
        },
    })
}

fn superpolynomial(mu: f64, map_lead: Option<DerivLead>) -> Classification {
    Classification {
        kind: Kind::SuperpolynomialSuspect,
        predicted_dim: Some(1.0),
        predicted_beta: None,
        tentative: true,
        evidence: Evidence {
            multiplier: mu,
            map_lead,
            doubled_lead: None,
            side: None,
        },
    }
}

fn first_lead(jet: &Jet, max_order: usize, tol: f64) -> Option<DerivLead> {
    (2..=max_order).find_map(|k| {
        let v = jet.derivative(k);
        (v.abs() > tol).then_some(DerivLead {
            order: k as u32,
            value: v,
        })
    })
}

// ── Bifurcation conditions ─────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SaddleNode,
    PeriodDoubling,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub value: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BifurcationReport {
    pub lambda0: f64,
    pub x0: f64,
    pub conditions: Vec<ConditionCheck>,
    pub verdict: Verdict,
}

/// Check the saddle-node and period-doubling hypotheses for a one-parameter
/// family at `(lambda0, x0)`.
///
/// Everything is evaluated by jets. The mixed partial of the doubled map is
/// assembled by the chain rule at the fixed point:
/// `d2(F.F)/dlam dx = (F_xl + F_xx F_l) F_x + F_x F_xl`, with `F_xl`
/// extracted from two diagonal second-order jets.
pub fn check_bifurcation_conditions(
    family: &MapFamily,
    lambda0: f64,
    x0: f64,
) -> Result<BifurcationReport> {
    let scale = 1.0 + lambda0.abs() + x0.abs();
    let eq_tol = 1e-9 * scale;
    let nonzero_tol = 1e-7 * scale;

    let sys = MapSystem::new(family.clone(), lambda0);
    let fx0 = sys.eval(x0)?;
    if (fx0 - x0).abs() > 1e-9 * (1.0 + x0.abs()) {
        return Err(Error::Precondition(format!(
            "({lambda0}, {x0}) is not a fixed point: residual {:e}",
            (fx0 - x0).abs()
        )));
    }

    // partials of F at (lambda0, x0)
    let jx = sys.eval_jet(x0, 2)?;
    let f_x = jx.derivative(1);
    let f_xx = jx.derivative(2);
    let f_l = family
        .eval_jet_with(&Jet::variable(lambda0, 1), &Jet::constant(x0, 1))?
        .derivative(1);
    // diagonal jets t -> F(lambda0 + t, x0 +- t) isolate the mixed partial
    let diag = |sigma: f64| -> Result<f64> {
        let mut x_seed = Jet::constant(x0, 2);
        x_seed = x_seed.add(&Jet::from_coeffs(vec![0.0, sigma, 0.0]));
        let out = family.eval_jet_with(&Jet::variable(lambda0, 2), &x_seed)?;
        Ok(out.coeff(2))
    };
    let f_xl = diag(1.0)? - diag(-1.0)?;
    let f_xl = f_xl / 2.0;

    // partials of the doubled map
    let sys2 = sys.with_power(2);
    let j2 = sys2.eval_jet(x0, 3)?;
    let h_xxx = j2.derivative(3);
    let h_xl = (f_xl + f_xx * f_l) * f_x + f_x * f_xl;

    let conditions = vec![
        ConditionCheck {
            name: "fixed_point_residual",
            value: fx0 - x0,
            satisfied: (fx0 - x0).abs() <= eq_tol,
        },
        ConditionCheck {
            name: "dF_dx_minus_1",
            value: f_x - 1.0,
            satisfied: (f_x - 1.0).abs() <= eq_tol,
        },
        ConditionCheck {
            name: "dF_dx_plus_1",
            value: f_x + 1.0,
            satisfied: (f_x + 1.0).abs() <= eq_tol,
        },
        ConditionCheck {
            name: "d2F_dx2",
            value: f_xx,
            satisfied: f_xx.abs() > nonzero_tol,
        },
        ConditionCheck {
            name: "dF_dlam",
            value: f_l,
            satisfied: f_l.abs() > nonzero_tol,
        },
        ConditionCheck {
            name: "d2F2_dlam_dx",
            value: h_xl,
            satisfied: h_xl.abs() > nonzero_tol,
        },
        ConditionCheck {
            name: "d3F2_dx3",
            value: h_xxx,
            satisfied: h_xxx.abs() > nonzero_tol,
        },
    ];

    let sat = |name: &str| conditions.iter().find(|c| c.name == name).unwrap().satisfied;
    let verdict = if sat("dF_dx_minus_1") && sat("d2F_dx2") && sat("dF_dlam") {
        Verdict::SaddleNode
    } else if sat("dF_dx_plus_1")
        && sat("d2F_dx2")
        && sat("d2F2_dlam_dx")
        && sat("d3F2_dx3")
    {
        Verdict::PeriodDoubling
    } else {
        Verdict::Inconclusive
    };

    Ok(BifurcationReport {
        lambda0,
        x0,
        conditions,
        verdict,
    })
}

// ── Prediction vs measurement ──────────────────────────────────

#[derive(Debug, Clone, Serialize)]
pub struct Measured {
    pub beta: Option<PowerLawFit>,
    pub dim_sausage: Option<DimensionEstimate>,
    pub dim_tricot: Option<DimensionEstimate>,
    pub content: Option<ContentEstimate>,
    /// Both content extrema inside (0.05, 50).
    pub nondegenerate: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PredictReport {
    pub classification: Classification,
    pub target_points: Vec<f64>,
    pub orbit_len: usize,
    pub stop_reason: String,
    pub burn_in: usize,
    pub measured: Option<Measured>,
    pub diagnostics: Vec<String>,
}

/// Classify the target, run an orbit from `x1`, and measure decay exponent,
/// both dimension estimates, and content at the predicted dimension.
///
/// The classification is done for `F^(q*p)` where `p` is the target period,
/// since the orbit visits the cycle points in rotation; pass a point target
/// when the map power already accounts for the cycle.
pub fn predict_and_measure(
    map: &MapSystem,
    target: &Target,
    x1: f64,
    n: usize,
) -> Result<PredictReport> {
    let period = target.period();
    let class_map = map.with_power(map.power * period);
    let ref_point = target.points()[0];
    let classification = classify_fixed_point(&class_map, ref_point, DEFAULT_MAX_ORDER, DEFAULT_TOL)?;
    if classification.predicted_dim.is_none() {
        return Err(Error::Precondition(format!(
            "classification {:?} makes no dimension prediction",
            classification.kind
        )));
    }

    let orbit = iterate(map, x1, n, DEFAULT_FLOOR);
    let data = distance_sequence(&orbit, target)?;
    let mut diagnostics = Vec::new();

    let mut report = PredictReport {
        classification: classification.clone(),
        target_points: target.points(),
        orbit_len: orbit.len(),
        stop_reason: orbit.stop_reason.to_string(),
        burn_in: 0,
        measured: None,
        diagnostics: Vec::new(),
    };

    if let StopReason::Diverged { ref note } = orbit.stop_reason {
        report.diagnostics.push(format!("orbit diverged: {note}"));
        return Ok(report);
    }
    let d_first = data.dist.first().copied().unwrap_or(0.0);
    let d_last = data.dist.last().copied().unwrap_or(0.0);
    if d_last > d_first && d_first > 0.0 {
        report
            .diagnostics
            .push("orbit moved away from the target; converged elsewhere".into());
        return Ok(report);
    }

    let burn = default_burn_in(orbit.len());
    report.burn_in = burn;

    // decay exponent over the positive prefix, original indices
    let positive_len = data
        .dist
        .iter()
        .position(|&v| v <= 0.0)
        .unwrap_or(data.dist.len());
    let beta = if positive_len > 2 * burn.max(1) {
        match fit_decay_exponent(&data.dist[..positive_len], burn.max(1)) {
            Ok(f) => Some(f),
            Err(e) => {
                diagnostics.push(format!("decay fit skipped: {e}"));
                None
            }
        }
    } else {
        diagnostics.push("decay fit skipped: too few positive distances".into());
        None
    };

    // sausage dimension of the full trajectory set: the transient adds a few
    // isolated points at coarse scales, while burn-in would clip the scale
    // range and push the window out of the scaling regime
    let (dim_s, content, nondegenerate) = match PointSet::from_unsorted(orbit.xs.clone(), "orbit")
    {
        Ok(set) => {
            let (eps_min, eps_max) = default_eps_window(&set);
            let dim_s = match dim_sausage(&set, eps_max, eps_min, 48) {
                Ok(d) => Some(d),
                Err(e) => {
                    diagnostics.push(format!("sausage estimate skipped: {e}"));
                    None
                }
            };
            let content = classification.predicted_dim.and_then(|d| {
                match content_estimate(&set, d.clamp(0.0, 1.0), eps_max, eps_min, 48) {
                    Ok(c) => Some(c),
                    Err(e) => {
                        diagnostics.push(format!("content estimate skipped: {e}"));
                        None
                    }
                }
            });
            let nondeg = content
                .as_ref()
                .map(|c| c.lower > 0.05 && c.upper < 50.0);
            (dim_s, content, nondeg)
        }
        Err(e) => {
            diagnostics.push(format!("orbit tail unusable as a point set: {e}"));
            (None, None, None)
        }
    };

    // rarefaction dimension per monotone class of the distance sequence
    let oscillating = matches!(classification.kind, Kind::TangentOscillating { .. });
    let classes = (period * if oscillating { 2 } else { 1 }) as usize;
    let dim_t = tricot_over_classes(&data.dist, burn, classes, &mut diagnostics);

    report.diagnostics = diagnostics;
    report.measured = Some(Measured {
        beta,
        dim_sausage: dim_s,
        dim_tricot: dim_t,
        content,
        nondegenerate,
    });
    Ok(report)
}

/// Split `dist[burn..]` into `classes` interleaved subsequences (the
/// monotone pieces of an oscillating orbit), run the rarefaction estimator
/// on each with original indices, and keep the largest estimate.
pub fn tricot_over_classes(
    dist: &[f64],
    burn: usize,
    classes: usize,
    diagnostics: &mut Vec<String>,
) -> Option<DimensionEstimate> {
    let classes = classes.max(1);
    let mut best: Option<DimensionEstimate> = None;
    for r in 0..classes {
        let vals: Vec<f64> = dist[burn..]
            .iter()
            .copied()
            .skip(r)
            .step_by(classes)
            .take_while(|&v| v > 0.0)
            .collect();
        if vals.len() < 16 {
            continue;
        }
        match fractal::dim_tricot_indexed(&vals, burn + r + 1, classes) {
            Ok(est) => {
                if best.as_ref().is_none_or(|b| est.d > b.d) {
                    best = Some(est);
                }
            }
            Err(e) => diagnostics.push(format!("rarefaction class {r} skipped: {e}")),
        }
    }
    if best.is_none() {
        diagnostics.push("rarefaction estimate unavailable for every class".into());
    }
    best
}

/// Convenience used by the scan command: classify every attracting or
/// neutral cycle up to `q_max` and return the first hit with its period.
pub fn find_attractor(
    map: &MapSystem,
    lo: f64,
    hi: f64,
    q_max: u32,
    grid: usize,
) -> Option<dynamics::Cycle> {
    for q in 1..=q_max {
        let search = dynamics::find_cycles(map, q, lo, hi, grid);
        let mut best: Option<dynamics::Cycle> = None;
        for c in search.cycles {
            if c.multiplier.abs() <= 1.0 + 1e-9 {
                let better = best
                    .as_ref()
                    .is_none_or(|b| c.multiplier.abs() < b.multiplier.abs());
                if better {
                    best = Some(c);
                }
            }
        }
        if best.is_some() {
            return best;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::MapExpr;

    fn logistic(lam: f64) -> MapSystem {
        MapSystem::new(MapFamily::Logistic, lam)
    }

    fn custom(src: &str, lam: f64) -> MapSystem {
        MapSystem::new(MapFamily::Custom(MapExpr::parse(src).unwrap()), lam)
    }

    #[test]
    fn hyperbolic_logistic_point() {
        let c = classify_fixed_point(&logistic(2.5), 0.6, 8, DEFAULT_TOL).unwrap();
        assert_eq!(c.kind, Kind::Hyperbolic);
        assert_eq!(c.predicted_dim, Some(0.0));
        assert!((c.evidence.multiplier + 0.5).abs() < 1e-12);
    }

    #[test]
    fn saddle_node_logistic_point() {
        let c = classify_fixed_point(&logistic(1.0), 0.0, 8, DEFAULT_TOL).unwrap();
        assert_eq!(c.kind, Kind::TangentMonotone { alpha: 2 });
        assert_eq!(c.predicted_dim, Some(0.5));
        assert_eq!(c.predicted_beta, Some(1.0));
        assert_eq!(c.evidence.side, Some(Side::Right));
    }

    #[test]
    fn period_doubling_logistic_point() {
        let c = classify_fixed_point(&logistic(3.0), 2.0 / 3.0, 8, DEFAULT_TOL).unwrap();
        assert_eq!(c.kind, Kind::TangentOscillating { alpha: 2 });
        assert_eq!(c.predicted_dim, Some(1.0 - 1.0 / 3.0));
        assert_eq!(c.predicted_beta, Some(0.5));
        let lead = c.evidence.doubled_lead.unwrap();
        assert_eq!(lead.order, 3);
    }

    #[test]
    fn oscillating_reduces_to_monotone_under_doubling() {
        // classifying the same point for F^2 must give alpha' = 2*alpha - 1
        // with an identical dimension prediction
        let osc = classify_fixed_point(&logistic(3.0), 2.0 / 3.0, 8, DEFAULT_TOL).unwrap();
        let mono =
            classify_fixed_point(&logistic(3.0).with_power(2), 2.0 / 3.0, 8, DEFAULT_TOL).unwrap();
        assert_eq!(mono.kind, Kind::TangentMonotone { alpha: 3 });
        assert_eq!(mono.predicted_dim, osc.predicted_dim);
    }

    #[test]
    fn repelling_point() {
        let c = classify_fixed_point(&logistic(3.0), 0.0, 8, DEFAULT_TOL).unwrap();
        assert_eq!(c.kind, Kind::Repelling);
        assert_eq!(c.predicted_dim, None);
    }

    #[test]
    fn cubic_tangencies_and_sides() {
        let both = classify_fixed_point(&custom("x - x^3", 0.0), 0.0, 8, DEFAULT_TOL).unwrap();
        assert_eq!(both.kind, Kind::TangentMonotone { alpha: 3 });
        assert_eq!(both.evidence.side, Some(Side::Both));
        assert_eq!(both.predicted_dim, Some(1.0 - 1.0 / 3.0));

        let neither = classify_fixed_point(&custom("x + x^3", 0.0), 0.0, 8, DEFAULT_TOL).unwrap();
        assert_eq!(neither.evidence.side, Some(Side::Neither));

        let left = classify_fixed_point(&custom("x + x^2", 0.0), 0.0, 8, DEFAULT_TOL).unwrap();
        assert_eq!(left.kind, Kind::TangentMonotone { alpha: 2 });
        assert_eq!(left.evidence.side, Some(Side::Left));
    }

    #[test]
    fn identity_map_is_superpolynomial_suspect() {
        let c = classify_fixed_point(&custom("x", 0.0), 0.0, 8, DEFAULT_TOL).unwrap();
        assert_eq!(c.kind, Kind::SuperpolynomialSuspect);
        assert_eq!(c.predicted_dim, Some(1.0));
        assert!(c.tentative);
    }

    #[test]
    fn not_a_fixed_point_errors() {
        assert!(classify_fixed_point(&logistic(3.0), 0.5, 8, DEFAULT_TOL).is_err());
    }

    #[test]
    fn tolerance_hysteresis_around_lambda_three() {
        for dl in [-1e-12, 0.0, 1e-12] {
            let lam = 3.0 + dl;
            let fps = dynamics::find_fixed_points(&logistic(lam), 0.5, 1.0, 512);
            let x0 = fps.last().unwrap().0;
            let c = classify_fixed_point(&logistic(lam), x0, 8, DEFAULT_TOL).unwrap();
            assert_eq!(c.kind, Kind::TangentOscillating { alpha: 2 }, "dl = {dl}");
        }
        // far from the bifurcation value the verdict must flip
        let fps = dynamics::find_fixed_points(&logistic(3.0001), 0.5, 1.0, 512);
        let c = classify_fixed_point(&logistic(3.0001), fps[0].0, 8, DEFAULT_TOL).unwrap();
        assert_eq!(c.kind, Kind::Repelling);
    }

    #[test]
    fn affine_conjugation_invariance() {
        // y = 2x conjugates the logistic map to lam*y*(1 - y/2)
        let c1 = classify_fixed_point(&logistic(3.0), 2.0 / 3.0, 8, DEFAULT_TOL).unwrap();
        let c2 =
            classify_fixed_point(&custom("lam*x*(1-x/2)", 3.0), 4.0 / 3.0, 8, DEFAULT_TOL)
                .unwrap();
        assert_eq!(c1.kind, c2.kind);
        assert_eq!(c1.predicted_dim, c2.predicted_dim);
        assert_eq!(c1.predicted_beta, c2.predicted_beta);

        let m1 = classify_fixed_point(&logistic(1.0), 0.0, 8, DEFAULT_TOL).unwrap();
        let m2 =
            classify_fixed_point(&custom("lam*x*(1-x/2)", 1.0), 0.0, 8, DEFAULT_TOL).unwrap();
        assert_eq!(m1.kind, m2.kind);
        assert_eq!(m1.predicted_dim, m2.predicted_dim);
    }

    #[test]
    fn bifurcation_verdicts() {
        let pd = check_bifurcation_conditions(&MapFamily::Logistic, 3.0, 2.0 / 3.0).unwrap();
        assert_eq!(pd.verdict, Verdict::PeriodDoubling);
        let h_xxx = pd
            .conditions
            .iter()
            .find(|c| c.name == "d3F2_dx3")
            .unwrap();
        assert!(h_xxx.satisfied);

        let sn = check_bifurcation_conditions(
            &MapFamily::Exponential,
            (-1.0f64).exp(),
            1.0,
        )
        .unwrap();
        assert_eq!(sn.verdict, Verdict::SaddleNode);

        // lambda-independent family cannot bifurcate
        let id = check_bifurcation_conditions(
            &MapFamily::Custom(MapExpr::parse("x").unwrap()),
            0.7,
            0.0,
        )
        .unwrap();
        assert_eq!(id.verdict, Verdict::Inconclusive);
        let dl = id.conditions.iter().find(|c| c.name == "dF_dlam").unwrap();
        assert!(!dl.satisfied);

        // dF/dlam vanishes at the origin for the logistic family
        let sn0 = check_bifurcation_conditions(&MapFamily::Logistic, 1.0, 0.0).unwrap();
        assert_eq!(sn0.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn bifurcation_values_match_finite_differences() {
        let fam = MapFamily::Logistic;
        let (l0, x0) = (3.0, 2.0 / 3.0);
        let report = check_bifurcation_conditions(&fam, l0, x0).unwrap();
        let value = |name: &str| {
            report
                .conditions
                .iter()
                .find(|c| c.name == name)
                .unwrap()
                .value
        };
        let f = |l: f64, x: f64| fam.eval_plain(l, x).unwrap();
        let f2 = |l: f64, x: f64| f(l, f(l, x));
        let h = 1e-5;
        let fd_fx = (f(l0, x0 + h) - f(l0, x0 - h)) / (2.0 * h);
        assert!((value("dF_dx_minus_1") - (fd_fx - 1.0)).abs() < 1e-7);
        let fd_fxx = (f(l0, x0 + h) - 2.0 * f(l0, x0) + f(l0, x0 - h)) / (h * h);
        assert!((value("d2F_dx2") - fd_fxx).abs() < 1e-5);
        let fd_fl = (f(l0 + h, x0) - f(l0 - h, x0)) / (2.0 * h);
        assert!((value("dF_dlam") - fd_fl).abs() < 1e-7);
        // mixed partial of the doubled map
        let hm = 1e-4;
        let h2x = |l: f64| (f2(l, x0 + hm) - f2(l, x0 - hm)) / (2.0 * hm);
        let fd_hxl = (h2x(l0 + hm) - h2x(l0 - hm)) / (2.0 * hm);
        assert!(
            (value("d2F2_dlam_dx") - fd_hxl).abs() < 1e-4,
            "jet {} vs fd {fd_hxl}",
            value("d2F2_dlam_dx")
        );
        // third derivative needs a coarser step to beat roundoff in the
        // divided differences
        let h3 = 1e-3;
        let fd_hxxx = (f2(l0, x0 + 2.0 * h3) - 2.0 * f2(l0, x0 + h3) + 2.0 * f2(l0, x0 - h3)
            - f2(l0, x0 - 2.0 * h3))
            / (2.0 * h3 * h3 * h3);
        assert!(
            (value("d3F2_dx3") - fd_hxxx).abs() < 1e-2 * value("d3F2_dx3").abs(),
            "jet {} vs fd {fd_hxxx}",
            value("d3F2_dx3")
        );
    }

    #[test]
    fn predict_and_measure_smoke() {
        let report = predict_and_measure(
            &logistic(3.0),
            &Target::Point(2.0 / 3.0),
            0.5,
            200_000,
        )
        .unwrap();
        assert_eq!(
            report.classification.kind,
            Kind::TangentOscillating { alpha: 2 }
        );
        let m = report.measured.expect("measurement should run");
        let beta = m.beta.unwrap();
        assert!((beta.beta - 0.5).abs() < 0.1, "beta {}", beta.beta);
        let ds = m.dim_sausage.unwrap();
        assert!((ds.d - 2.0 / 3.0).abs() < 0.08, "sausage {}", ds.d);
        let dt = m.dim_tricot.unwrap();
        assert!((dt.d - 2.0 / 3.0).abs() < 0.08, "tricot {}", dt.d);
    }

    #[test]
    fn predict_and_measure_rejects_runaway_orbits() {
        // start near the repelling fixed point of an expanding map
        let report = predict_and_measure(&custom("2*x", 0.0), &Target::Point(0.0), 1e-6, 1000);
        let r = report.unwrap_err();
        assert!(matches!(r, Error::Precondition(_)));
    }

    #[test]
    fn predictions_satisfy_the_dimension_formulas_exactly() {
        let cases = [
            classify_fixed_point(&logistic(1.0), 0.0, 8, DEFAULT_TOL).unwrap(),
            classify_fixed_point(&logistic(3.0), 2.0 / 3.0, 8, DEFAULT_TOL).unwrap(),
            classify_fixed_point(&custom("x - x^3", 0.0), 0.0, 8, DEFAULT_TOL).unwrap(),
            classify_fixed_point(&custom("x - x^4", 0.0), 0.0, 8, DEFAULT_TOL).unwrap(),
        ];
        for c in cases {
            match c.kind {
                Kind::TangentMonotone { alpha } => {
                    let a = alpha as f64;
                    assert_eq!(c.predicted_dim, Some(1.0 - 1.0 / a));
                    assert_eq!(c.predicted_beta, Some(1.0 / (a - 1.0)));
                }
                Kind::TangentOscillating { alpha } => {
                    let a = alpha as f64;
                    assert_eq!(c.predicted_dim, Some(1.0 - 1.0 / (2.0 * a - 1.0)));
                    assert_eq!(c.predicted_beta, Some(1.0 / (2.0 * a - 2.0)));
                }
                other => panic!("expected a tangent case, got {other:?}"),
            }
        }
    }

    #[test]
    fn find_attractor_prefers_low_period() {
        let c = find_attractor(&logistic(2.5), 0.0, 1.0, 8, 512).unwrap();
        assert_eq!(c.period, 1);
        assert!((c.points[0] - 0.6).abs() < 1e-9);
        let c = find_attractor(&logistic(3.2), 0.0, 1.0, 8, 512).unwrap();
        assert_eq!(c.period, 2);
    }
}
