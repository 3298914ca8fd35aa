//! The five subcommands.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde_json::{json, Value};

use boxdim::classify::{
    check_bifurcation_conditions, classify_fixed_point, find_attractor, predict_and_measure,
    tricot_over_classes, Kind, DEFAULT_MAX_ORDER, DEFAULT_TOL,
};
use boxdim::dynamics::{
    find_fixed_points, iterate, MapSystem, Target, DEFAULT_FLOOR, DEFAULT_GRID,
};
use boxdim::expr::parse_with_x_alias;
use boxdim::fractal::{
    conjectured_content, content_estimate, default_eps_window, dim_sausage, PointSet,
};
use boxdim::Error;

use crate::io::{emit_report, read_values_csv, write_orbit_csv, write_text};
use crate::{parse_pair, CliError, MapSpec};

// ── orbit ──────────────────────────────────────────────────────

#[derive(Args)]
pub struct OrbitArgs {
    #[command(flatten)]
    map: MapSpec,

    /// Initial point x_1
    #[arg(long, allow_negative_numbers = true)]
    x1: f64,

    /// Maximum number of points to generate
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,

    /// Stop when |x_{n+1} - x_n| falls below this
    #[arg(long, default_value_t = DEFAULT_FLOOR)]
    floor: f64,

    /// CSV output path; omitted = CSV on stdout, summary on stderr
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run_orbit(args: OrbitArgs) -> Result<(), CliError> {
    if args.n < 1 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let sys = args.map.system()?;
    let orbit = iterate(&sys, args.x1, args.n, args.floor);
    let summary = format!(
        "map: {}  points: {}  stop_reason: {}  final: {:.16e}",
        sys.descriptor(),
        orbit.len(),
        orbit.stop_reason,
        orbit.xs.last().unwrap()
    );
    match &args.out {
        Some(path) => {
            let file = File::create(path)?;
            write_orbit_csv(BufWriter::new(file), &orbit.xs)?;
            println!("{summary}");
        }
        None => {
            let stdout = std::io::stdout();
            write_orbit_csv(BufWriter::new(stdout.lock()), &orbit.xs)?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

// ── dim ────────────────────────────────────────────────────────

#[derive(Args)]
pub struct DimArgs {
    /// Orbit CSV to analyze
    #[arg(long = "in", conflicts_with = "set")]
    input: Option<PathBuf>,

    /// Synthetic set spec in n, e.g. "1/n" or "2^-n" or "n^-0.5"
    #[arg(long, requires = "count")]
    set: Option<String>,

    /// Number of synthetic points (n = 1..count)
    #[arg(long)]
    count: Option<usize>,

    /// sausage, tricot, or both
    #[arg(long, default_value = "both", value_parser = ["sausage", "tricot", "both"])]
    method: String,

    /// Measure distances to this point for the rarefaction estimator
    /// (the sausage estimator is translation-invariant and uses the raw set)
    #[arg(long, allow_negative_numbers = true, conflicts_with = "target_cycle")]
    target: Option<f64>,

    /// Measure distances to this cycle, comma-separated points
    #[arg(long = "target-cycle")]
    target_cycle: Option<String>,

    /// Discard this many leading entries in the sequence-based analyses
    /// (the sausage estimator always sees the full set: trimming a prefix
    /// only clips its usable scale range)
    #[arg(long = "burn-in", default_value_t = 0)]
    burn_in: usize,

    /// Interleaved monotone classes for the rarefaction estimator
    /// (2 per cycle point for oscillating orbits)
    #[arg(long, default_value_t = 1)]
    classes: usize,

    #[arg(long = "eps-max")]
    eps_max: Option<f64>,

    #[arg(long = "eps-min")]
    eps_min: Option<f64>,

    #[arg(long, default_value_t = 48)]
    samples: usize,

    /// JSON report path; omitted = stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_values(
    input: &Option<PathBuf>,
    set: &Option<String>,
    count: Option<usize>,
) -> Result<(Vec<f64>, Value), CliError> {
    if let Some(path) = input {
        let values = read_values_csv(path)?;
        return Ok((values, json!({"in": path})));
    }
    if let Some(spec) = set {
        let count = count.unwrap();
        let expr = parse_with_x_alias(spec, "n")?;
        let mut values = Vec::with_capacity(count);
        for n in 1..=count {
            values.push(expr.eval_plain(0.0, n as f64)?);
        }
        return Ok((values, json!({"set": spec, "count": count})));
    }
    Err(CliError::Usage(
        "one of --in or --set/--count is required".into(),
    ))
}

fn parse_target(
    target: &Option<f64>,
    target_cycle: &Option<String>,
) -> Result<Option<Target>, CliError> {
    if let Some(p) = target {
        return Ok(Some(Target::Point(*p)));
    }
    if let Some(list) = target_cycle {
        let pts: Result<Vec<f64>, _> = list.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let pts = pts.map_err(|e| CliError::Usage(format!("--target-cycle: {e}")))?;
        if pts.is_empty() {
            return Err(CliError::Usage("--target-cycle needs points".into()));
        }
        return Ok(Some(Target::Cycle(pts)));
    }
    Ok(None)
}

fn resolve_window(
    set: &PointSet,
    eps_min: Option<f64>,
    eps_max: Option<f64>,
) -> Result<(f64, f64), CliError> {
    match (eps_min, eps_max) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        (None, None) => Ok(default_eps_window(set)),
        _ => Err(CliError::Usage(
            "--eps-min and --eps-max must be given together".into(),
        )),
    }
}

pub fn run_dim(args: DimArgs) -> Result<(), CliError> {
    let (values, source_cfg) = load_values(&args.input, &args.set, args.count)?;
    let target = parse_target(&args.target, &args.target_cycle)?;
    let burn = args.burn_in.min(values.len().saturating_sub(1));

    // distances drive the sequence-based analyses; the point set for the
    // sausage estimator keeps the raw values (its dimension is invariant
    // under the translation a target represents)
    let seq: Vec<f64> = match &target {
        Some(t) => {
            let pts = t.points();
            values
                .iter()
                .map(|&x| {
                    pts.iter()
                        .map(|&a| (x - a).abs())
                        .fold(f64::INFINITY, f64::min)
                })
                .collect()
        }
        None => values.clone(),
    };
    if values[burn..].is_empty() {
        return Err(Error::Precondition("no data left after burn-in".into()).into());
    }

    let mut diagnostics = Vec::new();
    let mut estimates = Vec::new();
    let mut window_cfg = json!(null);

    if args.method == "sausage" || args.method == "both" {
        let set = PointSet::from_unsorted(values.clone(), "cli input")?;
        let (eps_min, eps_max) = resolve_window(&set, args.eps_min, args.eps_max)?;
        window_cfg = json!({"eps_min": eps_min, "eps_max": eps_max, "samples": args.samples});
        estimates.push(serde_json::to_value(dim_sausage(
            &set,
            eps_max,
            eps_min,
            args.samples,
        )?)?);
    }
    if args.method == "tricot" || args.method == "both" {
        match tricot_over_classes(&seq, burn, args.classes, &mut diagnostics) {
            Some(est) => estimates.push(serde_json::to_value(est)?),
            None if args.method == "tricot" => {
                return Err(Error::Precondition(
                    "rarefaction estimator failed on every class; try --burn-in or --classes"
                        .into(),
                )
                .into());
            }
            None => {}
        }
    }

    let config = json!({
        "source": source_cfg,
        "method": args.method,
        "target": args.target,
        "target_cycle": args.target_cycle,
        "burn_in": burn,
        "classes": args.classes,
        "window": window_cfg,
    });
    let result = json!({
        "n_points": values.len(),
        "estimates": estimates,
    });
    emit_report("dim", config, result, diagnostics, args.out.as_ref())?;
    Ok(())
}

// ── classify ───────────────────────────────────────────────────

#[derive(Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    map: MapSpec,

    /// Fixed point to classify
    #[arg(long, allow_negative_numbers = true, conflicts_with = "auto")]
    x0: Option<f64>,

    /// Locate fixed points on --interval automatically
    #[arg(long, requires = "interval")]
    auto: bool,

    /// Search interval LO:HI for --auto
    #[arg(long)]
    interval: Option<String>,

    /// Highest derivative order scanned for tangencies
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
    order: usize,

    /// Multiplier and derivative tolerance
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,

    /// Grid cells for root bracketing
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,

    /// Also check the saddle-node / period-doubling hypotheses
    #[arg(long = "family-check")]
    family_check: bool,

    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run_classify(args: ClassifyArgs) -> Result<(), CliError> {
    let sys = args.map.system()?;
    let points: Vec<f64> = match args.x0 {
        Some(x0) => vec![x0],
        None => {
            if !args.auto {
                return Err(CliError::Usage("give --x0 or --auto --interval".into()));
            }
            let (lo, hi) = parse_pair(args.interval.as_ref().unwrap(), "--interval")?;
            find_fixed_points(&sys, lo, hi, args.grid)
                .into_iter()
                .map(|(x, _)| x)
                .collect()
        }
    };
    if points.is_empty() {
        return Err(Error::Precondition(
            "no fixed point found on the interval".into(),
        )
        .into());
    }

    let mut rows = Vec::new();
    for x0 in points {
        let classification = classify_fixed_point(&sys, x0, args.order, args.tol)?;
        let mut row = json!({
            "x0": x0,
            "multiplier": classification.evidence.multiplier,
            "classification": classification,
        });
        if args.family_check {
            let report = check_bifurcation_conditions(&sys.family, sys.lam, x0)?;
            row["bifurcation"] = serde_json::to_value(report)?;
        }
        rows.push(row);
    }

    let config = json!({
        "map": args.map.config(),
        "x0": args.x0,
        "auto": args.auto,
        "interval": args.interval,
        "order": args.order,
        "tol": args.tol,
        "grid": args.grid,
        "family_check": args.family_check,
    });
    emit_report(
        "classify",
        config,
        json!({ "classifications": rows }),
        Vec::new(),
        args.out.as_ref(),
    )?;
    Ok(())
}

// ── scan ───────────────────────────────────────────────────────

#[derive(Args)]
pub struct ScanArgs {
    #[command(flatten)]
    map: MapSpec,

    /// Parameter sweep LO:HI:STEP (half-open: hi excluded)
    #[arg(long)]
    range: String,

    /// Interval searched for attractors, LO:HI
    #[arg(long, default_value = "0:1")]
    interval: String,

    /// Largest cycle period searched
    #[arg(long, default_value_t = 8)]
    qmax: u32,

    /// Also measure dimension and decay exponent from an orbit
    #[arg(long)]
    measure: bool,

    /// Orbit length for --measure
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,

    /// Orbit seed for --measure (default: interval midpoint)
    #[arg(long, allow_negative_numbers = true)]
    x1: Option<f64>,

    /// Grid cells for root bracketing
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,

    /// Emit long-format CSV (lambda,quantity,value)
    #[arg(long)]
    long: bool,

    #[arg(long)]
    out: Option<PathBuf>,
}

struct ScanRow {
    lambda: f64,
    period: Option<u32>,
    points: Vec<f64>,
    multiplier: Option<f64>,
    kind: Option<String>,
    predicted_dim: Option<f64>,
    measured_dim: Option<f64>,
    measured_beta: Option<f64>,
    error: Option<String>,
}

fn kind_label(kind: &Kind) -> String {
    match kind {
        Kind::Hyperbolic => "hyperbolic".into(),
        Kind::Repelling => "repelling".into(),
        Kind::TangentMonotone { alpha } => format!("tangent_monotone(alpha={alpha})"),
        Kind::TangentOscillating { alpha } => format!("tangent_oscillating(alpha={alpha})"),
        Kind::SuperpolynomialSuspect => "superpolynomial_suspect".into(),
        Kind::DegenerateUnresolved => "degenerate_unresolved".into(),
    }
}

fn scan_one(
    spec: &MapSpec,
    lambda: f64,
    lo: f64,
    hi: f64,
    qmax: u32,
    grid: usize,
    measure: Option<(f64, usize)>,
) -> ScanRow {
    let mut row = ScanRow {
        lambda,
        period: None,
        points: Vec::new(),
        multiplier: None,
        kind: None,
        predicted_dim: None,
        measured_dim: None,
        measured_beta: None,
        error: None,
    };
    let family = match spec.family() {
        Ok(f) => f,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let sys = MapSystem::new(family, lambda);
    let attractor = match find_attractor(&sys, lo, hi, qmax, grid) {
        Some(c) => c,
        None => {
            row.error = Some(format!("no attracting cycle with period <= {qmax}"));
            return row;
        }
    };
    row.period = Some(attractor.period);
    row.points = attractor.points.clone();
    row.multiplier = Some(attractor.multiplier);

    match classify_fixed_point(
        &sys.with_power(attractor.period),
        attractor.points[0],
        DEFAULT_MAX_ORDER,
        DEFAULT_TOL,
    ) {
        Ok(c) => {
            row.kind = Some(kind_label(&c.kind));
            row.predicted_dim = c.predicted_dim;
        }
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    }

    if let Some((x1, n)) = measure {
        let target = if attractor.period == 1 {
            Target::Point(attractor.points[0])
        } else {
            Target::Cycle(attractor.points.clone())
        };
        match predict_and_measure(&sys, &target, x1, n) {
            Ok(report) => {
                if let Some(m) = report.measured {
                    row.measured_dim = m.dim_sausage.map(|d| d.d);
                    row.measured_beta = m.beta.map(|b| b.beta);
                } else {
                    row.error = Some(report.diagnostics.join("; "));
                }
            }
            Err(e) => row.error = Some(e.to_string()),
        }
    }
    row
}

fn fmt_opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

pub fn run_scan(args: ScanArgs) -> Result<(), CliError> {
    let parts: Vec<&str> = args.range.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage("--range must look like LO:HI:STEP".into()));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|e| CliError::Usage(format!("--range: {e}")))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|e| CliError::Usage(format!("--range: {e}")))?;
    let step: f64 = parts[2]
        .parse()
        .map_err(|e| CliError::Usage(format!("--range: {e}")))?;
    let step_ok = step > 0.0;
    if !step_ok || lo > hi {
        return Err(CliError::Usage("--range needs lo <= hi and step > 0".into()));
    }
    let (ilo, ihi) = parse_pair(&args.interval, "--interval")?;
    let x1 = args.x1.unwrap_or(0.5 * (ilo + ihi));

    let mut lambdas = Vec::new();
    let mut k = 0u64;
    loop {
        let lam = lo + k as f64 * step;
        if lam >= hi - 1e-12 * step.max(1.0) {
            break;
        }
        lambdas.push(lam);
        k += 1;
    }

    let measure = args.measure.then_some((x1, args.n));
    let rows: Vec<ScanRow> = lambdas
        .par_iter()
        .map(|&lam| scan_one(&args.map, lam, ilo, ihi, args.qmax, args.grid, measure))
        .collect();

    let mut text = String::new();
    if args.long {
        text.push_str("lambda,quantity,value\n");
        for r in &rows {
            let mut push = |q: &str, v: &Option<f64>| {
                if let Some(v) = v {
                    text.push_str(&format!("{:.16e},{q},{v:.16e}\n", r.lambda));
                }
            };
            push("multiplier", &r.multiplier);
            push("predicted_dim", &r.predicted_dim);
            push("measured_dim", &r.measured_dim);
            push("measured_beta", &r.measured_beta);
        }
    } else {
        text.push_str(
            "lambda,period,points,multiplier,kind,predicted_dim,measured_dim,measured_beta,error\n",
        );
        for r in &rows {
            let points = r
                .points
                .iter()
                .map(|p| format!("{p:.16e}"))
                .collect::<Vec<_>>()
                .join(";");
            text.push_str(&format!(
                "{:.16e},{},{},{},{},{},{},{},{}\n",
                r.lambda,
                fmt_opt(&r.period),
                points,
                r.multiplier.map(|m| format!("{m:.16e}")).unwrap_or_default(),
                fmt_opt(&r.kind),
                r.predicted_dim.map(|d| format!("{d}")).unwrap_or_default(),
                r.measured_dim.map(|d| format!("{d}")).unwrap_or_default(),
                r.measured_beta.map(|b| format!("{b}")).unwrap_or_default(),
                fmt_opt(&r.error).replace(',', ";"),
            ));
        }
    }
    write_text(args.out.as_ref(), &text)?;
    Ok(())
}

// ── content ────────────────────────────────────────────────────

#[derive(Args)]
pub struct ContentArgs {
    /// Orbit CSV to analyze
    #[arg(long = "in")]
    input: PathBuf,

    /// Content exponent d in [0, 1]
    #[arg(long)]
    d: f64,

    #[arg(long = "eps-max")]
    eps_max: Option<f64>,

    #[arg(long = "eps-min")]
    eps_min: Option<f64>,

    #[arg(long, default_value_t = 48)]
    samples: usize,

    #[arg(long = "burn-in", default_value_t = 0)]
    burn_in: usize,

    /// Compare against the conjectured content for "A,ALPHA"
    #[arg(long)]
    conjecture: Option<String>,

    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run_content(args: ContentArgs) -> Result<(), CliError> {
    let values = read_values_csv(&args.input)?;
    let burn = args.burn_in.min(values.len().saturating_sub(1));
    let set = PointSet::from_unsorted(values[burn..].to_vec(), "cli input")?;
    let (eps_min, eps_max) = resolve_window(&set, args.eps_min, args.eps_max)?;
    let estimate = content_estimate(&set, args.d, eps_max, eps_min, args.samples)?;
    let nondegenerate = estimate.lower > 0.05 && estimate.upper < 50.0;

    let mut result = json!({
        "content": estimate,
        "nondegenerate": nondegenerate,
        "n_points": set.len(),
    });
    if let Some(spec) = &args.conjecture {
        let parts: Vec<&str> = spec.split(',').collect();
        if parts.len() != 2 {
            return Err(CliError::Usage("--conjecture must look like A,ALPHA".into()));
        }
        let big_a: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|e| CliError::Usage(format!("--conjecture: {e}")))?;
        let alpha: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|e| CliError::Usage(format!("--conjecture: {e}")))?;
        if !(big_a > 0.0 && alpha > 1.0) {
            return Err(CliError::Usage(
                "--conjecture needs A > 0 and ALPHA > 1".into(),
            ));
        }
        let value = conjectured_content(big_a, alpha);
        result["conjecture"] = json!({
            "a": big_a,
            "alpha": alpha,
            "value": value,
            "rel_dev_lower": estimate.lower / value - 1.0,
            "rel_dev_upper": estimate.upper / value - 1.0,
        });
    }

    let config = json!({
        "in": args.input,
        "d": args.d,
        "eps_min": eps_min,
        "eps_max": eps_max,
        "samples": args.samples,
        "burn_in": burn,
        "conjecture": args.conjecture,
    });
    emit_report("content", config, result, Vec::new(), args.out.as_ref())?;
    Ok(())
}
