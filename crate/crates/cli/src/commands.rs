use rayon::prelude::*;
use serde_json::{json, Value};

use qklab_core::barriers::{self, BarrierCheck};
use qklab_core::picard::{self, PicardOptions, WindowPolicy};
use qklab_core::rosgeom::{self, ProfileCurve, Provenance};
use qklab_core::shoot::{self, IntegrationConfig, SlopeField};
use qklab_core::tangency;
use qklab_core::Error;

use crate::args::{
    BarrierArgs, Candidate, PicardArgs, Policy, SolveArgs, Start, SweepArgs, TangencyArgs,
    Tolerances,
};
use crate::output::{Artifacts, CheckOut, CliError, CliResult, Report, Table};

/// Largest `|v|` at which the equation residual is still compared.
const RESIDUAL_SLOPE_CAP: f64 = 1e4;
const RESIDUAL_TOL: f64 = 1e-6;
const EXPLICIT_TOL: f64 = 1e-8;
const EXPLICIT_RANGE: f64 = 0.95;
const AGREEMENT_TOL: f64 = 1e-6;
const RATIO_SLACK: f64 = 0.05;
const BLOW_UP_TOL: f64 = 1e-3;
const SLOPE_MATCH_TOL: f64 = 1e-6;

pub fn check_nk(n: usize, k: usize) -> CliResult<()> {
    if n < 2 {
        return Err(CliError::Usage(format!("--n must be at least 2, got {n}")));
    }
    if k >= n {
        return Err(CliError::Usage(format!("--k must satisfy 0 <= k <= n - 1, got k = {k} for n = {n}")));
    }
    Ok(())
}

fn integration_config(t: &Tolerances) -> CliResult<IntegrationConfig> {
    let cfg = IntegrationConfig {
        rel_tol: t.rel_tol,
        abs_tol: t.abs_tol,
        r_start: t.r_start,
        r_max: t.r_max,
        v_blowup: t.v_blowup,
        ..IntegrationConfig::default()
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn max_equation_residual(curve: &ProfileCurve) -> f64 {
    curve
        .samples
        .iter()
        .filter(|s| s.du.abs() <= RESIDUAL_SLOPE_CAP)
        .filter_map(|s| rosgeom::equation_residual(s).ok())
        .fold(0.0, |m, e| m.max(e.abs()))
}

/// Integrates one `(n, k)` and collects its checks.
pub fn solve_report(a: &SolveArgs, echo: Value) -> CliResult<(ProfileCurve, Report)> {
    check_nk(a.n, a.k)?;
    let (n, k) = (a.n, a.k);
    let cfg = integration_config(&a.tol)?;
    let field = SlopeField::new(n, k)?;
    let (curve, blow) = match a.spacing {
        None => shoot::integrate(&field, &cfg)?,
        Some(h) if h > 0.0 && cfg.r_max / h <= 1e7 => {
            let m = (cfg.r_max / h).floor() as usize;
            let radii: Vec<f64> = (0..=m).map(|i| i as f64 * h).collect();
            shoot::integrate_at(&field, &cfg, &radii)?
        }
        Some(h) => return Err(CliError::Usage(format!("--spacing {h} must be positive and not too small"))),
    };
    let mut checks = vec![
        CheckOut::at_most("translator_residual", rosgeom::translator_residuals(&curve)?.max_abs, 1e-9),
        CheckOut::at_most("equation_residual", max_equation_residual(&curve), RESIDUAL_TOL),
    ];
    if (n, k) == (2, 1) {
        let inside = curve.samples.iter().filter(|s| s.r <= EXPLICIT_RANGE);
        let (mut ev, mut eu) = (0.0_f64, 0.0_f64);
        for s in inside {
            let (u, v, _) = rosgeom::explicit_q1_jet(s.r);
            ev = ev.max((s.du - v).abs());
            eu = eu.max((s.u - u).abs());
        }
        checks.push(CheckOut::at_most("explicit_v", ev, EXPLICIT_TOL));
        checks.push(CheckOut::at_most("explicit_u", eu, EXPLICIT_TOL));
    }
    let one_over_n = 1.0 / n as f64;
    if k + 1 == n {
        checks.extend(CheckOut::from_report(&barriers::sandwich_verify(&curve)?));
        let gap = if blow.detected {
            (blow.radius_estimate - one_over_n).abs()
        } else {
            f64::INFINITY
        };
        checks.push(CheckOut::at_most("blow_up_radius_vs_one_over_n", gap, BLOW_UP_TOL).informational());
    }
    let report = Report {
        n,
        k: Some(k),
        provenance: Some(curve.provenance.as_str()),
        blow_up_radius: curve.blow_up_radius,
        checks,
        config_echo: echo,
        details: json!({
            "integration": blow,
            "samples": curve.samples.len(),
            "one_over_n": one_over_n,
        }),
    };
    Ok((curve, report))
}

pub fn solve(a: &SolveArgs, out: &Artifacts, echo: Value) -> CliResult<Report> {
    let (curve, report) = solve_report(a, echo)?;
    let stem = format!("profile_n{}_k{}", a.n, a.k);
    out.profile(&stem, &curve)?;
    out.json(&format!("solve_n{}_k{}.json", a.n, a.k), &report)?;
    Ok(report)
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Last successive-difference ratio whose denominator is above the noise
/// floor of the iteration.
fn settled_ratio(trace: &picard::IterationTrace) -> f64 {
    trace
        .contraction_ratios
        .iter()
        .zip(&trace.sup_diffs)
        .filter(|(_, &prev)| prev >= 1e-10)
        .map(|(&r, _)| r)
        .next_back()
        .unwrap_or(f64::NAN)
}

pub fn picard(a: &PicardArgs, out: &Artifacts, echo: Value) -> CliResult<Report> {
    check_nk(a.n, a.n.saturating_sub(1))?;
    let n = a.n;
    let window = picard::shrink_with_nodes(n, a.nodes).map_err(|e| CliError::Usage(e.to_string()))?;
    let coefficient = picard::contraction_coefficient(&window);
    let (shot, _) = shoot::integrate(&SlopeField::extremal(n)?, &IntegrationConfig::default())?;
    let shot_nodes: Vec<f64> = window
        .grid()
        .iter()
        .map(|&r| shot.eval(r).map(|(_, v)| v).ok_or(Error::Curve("shooting curve too short".into())))
        .collect::<Result<_, _>>()?;
    let init = match a.start {
        Start::Default => picard::default_initial(&window),
        Start::Linear => picard::linear_initial(&window),
        Start::Shooting => shot_nodes.clone(),
    };
    let opts = PicardOptions {
        policy: match a.policy {
            Policy::Enforce => WindowPolicy::Enforce,
            Policy::Monitor => WindowPolicy::Monitor,
        },
        tol: a.tol,
        max_iterations: a.max_iter,
    };
    let stem = format!("picard_n{n}");
    let mut checks = Vec::new();
    let mut failure = Value::Null;
    let trace = match picard::iterate_to_fixed_point(&window, &init, &opts) {
        Ok((curve, trace)) => {
            checks.push(CheckOut::flag("window_preserved", trace.window_exits.is_empty()));
            checks.push(CheckOut::flag("converged", true));
            checks.push(CheckOut::at_most("contraction_ratio", settled_ratio(&trace), coefficient + RATIO_SLACK));
            checks.push(CheckOut::at_most(
                "agreement_with_shooting",
                sup_diff(&curve.slopes(), &shot_nodes),
                AGREEMENT_TOL,
            ));
            checks.extend(CheckOut::from_report(&picard::derivative_bound_check(&curve)));
            out.profile(&format!("{stem}_profile"), &curve)?;
            trace
        }
        Err(Error::Picard { source, trace }) => {
            failure = json!(source.to_string());
            checks.push(CheckOut::flag("window_preserved", false));
            checks.push(CheckOut::flag("converged", false));
            *trace
        }
        Err(Error::NotConverged { trace }) => {
            failure = json!("no convergence within the iteration limit");
            checks.push(CheckOut::flag("window_preserved", trace.window_exits.is_empty()));
            checks.push(CheckOut::flag("converged", false));
            checks.push(CheckOut::at_most("contraction_ratio", settled_ratio(&trace), coefficient + RATIO_SLACK));
            *trace
        }
        Err(e) => return Err(e.into()),
    };
    let mut table = Table::new(["iteration", "sup_diff", "ratio"]);
    for (i, &d) in trace.sup_diffs.iter().enumerate() {
        let ratio = if i == 0 { f64::NAN } else { trace.contraction_ratios[i - 1] };
        table.rows.push(vec![(i + 1) as f64, d, ratio]);
    }
    out.table(&format!("{stem}_trace"), &table)?;
    let report = Report {
        n,
        k: Some(n - 1),
        provenance: Some(Provenance::Picard.as_str()),
        blow_up_radius: None,
        checks,
        config_echo: echo,
        details: json!({
            "window": {
                "delta": window.delta(),
                "nodes": window.intervals(),
                "contraction_coefficient": coefficient,
                "halvings": picard::halvings(&window),
                "empty_window_radius": picard::empty_window_radius(n),
            },
            "trace": trace,
            "failure": failure,
        }),
    };
    out.json(&format!("{stem}.json"), &report)?;
    Ok(report)
}

fn barrier_check_out(c: &BarrierCheck) -> CheckOut {
    let min = c.min_margin();
    CheckOut {
        name: c.name.as_str().into(),
        passed: c.passed,
        max_violation: (-min).max(0.0),
        value: min,
        informational: false,
    }
}

pub fn barriers(a: &BarrierArgs, out: &Artifacts, echo: Value) -> CliResult<Report> {
    check_nk(a.n, a.n.saturating_sub(1))?;
    if a.points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let n = a.n;
    let grid = barriers::uniform_grid(n, a.points);
    let all = barriers::check_all(n, &grid)?;
    let mut table = Table::new(["r", "w0_sub", "w1_super", "w2_sub"]);
    for (i, &r) in grid.iter().enumerate() {
        table.rows.push(vec![r, all[0].margins[i], all[1].margins[i], all[2].margins[i]]);
    }
    out.table(&format!("barriers_n{n}"), &table)?;
    let mut checks: Vec<CheckOut> = all.iter().map(barrier_check_out).collect();
    let (curve, blow) = shoot::integrate(&SlopeField::extremal(n)?, &IntegrationConfig::default())?;
    for mut c in CheckOut::from_report(&barriers::sandwich_verify(&curve)?) {
        c.name = format!("sandwich_{}", c.name);
        checks.push(c);
    }
    let certificate = barriers::blow_up_certificate(&curve, 10.0);
    checks.push(CheckOut::flag("height_reaches_10_before_one_over_n", certificate.is_some()).informational());
    let report = Report {
        n,
        k: Some(n - 1),
        provenance: Some(Provenance::Barrier.as_str()),
        blow_up_radius: curve.blow_up_radius,
        checks,
        config_echo: echo,
        details: json!({
            "grid_points": a.points,
            "grid_end": grid.last(),
            "height_at_one_over_n": curve.eval(1.0 / n as f64).map(|(u, _)| u),
            "integration": blow,
        }),
    };
    out.json(&format!("barriers_n{n}.json"), &report)?;
    Ok(report)
}

pub fn tangency(a: &TangencyArgs, out: &Artifacts, echo: Value) -> CliResult<Report> {
    check_nk(a.n, a.n.saturating_sub(1))?;
    let n = a.n;
    if !(a.radius > 0.0) {
        return Err(CliError::Usage("--radius must be positive".into()));
    }
    let candidate = match a.candidate {
        Candidate::Bowl => {
            let cfg = IntegrationConfig {
                r_max: a.radius,
                ..IntegrationConfig::default()
            };
            shoot::integrate(&SlopeField::new(n, 0)?, &cfg)?.0
        }
        Candidate::Paraboloid => {
            if a.samples < 2 {
                return Err(CliError::Usage("--samples must be at least 2".into()));
            }
            let c = a.curvature;
            let radii: Vec<f64> = (0..=a.samples).map(|i| a.radius * i as f64 / a.samples as f64).collect();
            ProfileCurve::from_fn(n, n - 1, &radii, Provenance::Candidate, |r| (c * r * r, 2.0 * c * r, 2.0 * c))?
        }
    };
    let touch = match tangency::nonexistence_demo(n, &candidate) {
        Err(Error::Curve(m)) => return Err(CliError::Usage(m)),
        other => other?,
    };
    let mut table = Table::new(["r", "gap"]);
    for (&r, &g) in touch.radii.iter().zip(&touch.gap) {
        table.rows.push(vec![r, g]);
    }
    out.table(&format!("tangency_gap_n{n}"), &table)?;
    let checks = vec![
        CheckOut::at_most("gap_nonnegative", (-touch.min_gap()).max(0.0), tangency::GAP_TOL),
        CheckOut::flag("interior_touch", !touch.at_boundary),
        CheckOut::at_most("gradient_mismatch", touch.gradient_mismatch, SLOPE_MATCH_TOL),
        CheckOut::flag("unimodal_gap", touch.unimodal).informational(),
        CheckOut::flag("lower_curvatures_nonnegative", touch.lower_curvatures_nonnegative).informational(),
    ];
    let report = Report {
        n,
        k: Some(n - 1),
        provenance: Some(candidate.provenance.as_str()),
        blow_up_radius: None,
        checks,
        config_echo: echo,
        details: json!({
            "shift": touch.shift,
            "touch_radius": touch.touch_radius,
            "gradient_mismatch": touch.gradient_mismatch,
            "at_boundary": touch.at_boundary,
            "unimodal": touch.unimodal,
            "ellipticity": touch.ellipticity,
            "lower_curvatures_nonnegative": touch.lower_curvatures_nonnegative,
            "narrative": touch.narrative,
        }),
    };
    out.json(&format!("tangency_n{n}.json"), &report)?;
    Ok(report)
}

pub fn sweep(a: &SweepArgs, out: &Artifacts, echo: Value) -> CliResult<Report> {
    if a.n_min < 2 || a.n_max < a.n_min {
        return Err(CliError::Usage(format!("invalid range --n-min {} --n-max {}", a.n_min, a.n_max)));
    }
    integration_config(&a.tol)?;
    let jobs: Vec<(usize, usize)> = (a.n_min..=a.n_max)
        .flat_map(|n| {
            let ks = if a.extremal_only { n - 1..n } else { 0..n };
            ks.map(move |k| (n, k))
        })
        .collect();
    let dir = out.subdir("sweep")?;
    let results: Vec<CliResult<Report>> = jobs
        .par_iter()
        .map(|&(n, k)| {
            let args = SolveArgs { n, k, spacing: None, tol: a.tol.clone() };
            let job_dir = dir.subdir(&format!("n{n}_k{k}"))?;
            let echo = json!({ "sweep_job": { "n": n, "k": k } });
            solve(&args, &job_dir, echo)
        })
        .collect();
    let mut table = Table::new(["n", "k", "detected", "blow_up_radius", "passed"]);
    let mut checks = Vec::new();
    let mut errors = Vec::new();
    for (&(n, k), res) in jobs.iter().zip(&results) {
        match res {
            Ok(rep) => {
                table.rows.push(vec![
                    n as f64,
                    k as f64,
                    rep.blow_up_radius.is_some() as u8 as f64,
                    rep.blow_up_radius.unwrap_or(f64::NAN),
                    rep.passed() as u8 as f64,
                ]);
                checks.push(CheckOut::flag(&format!("n{n}_k{k}"), rep.passed()));
            }
            Err(CliError::Io { path, source }) => {
                return Err(CliError::Io {
                    path: path.clone(),
                    source: std::io::Error::new(source.kind(), source.to_string()),
                })
            }
            Err(e) => {
                table.rows.push(vec![n as f64, k as f64, f64::NAN, f64::NAN, 0.0]);
                checks.push(CheckOut::flag(&format!("n{n}_k{k}"), false));
                errors.push(json!({ "n": n, "k": k, "error": e.to_string() }));
            }
        }
    }
    out.table("sweep", &table)?;
    let report = Report {
        n: a.n_max,
        k: None,
        provenance: Some(Provenance::Shooting.as_str()),
        blow_up_radius: None,
        checks,
        config_echo: echo,
        details: json!({ "jobs": jobs.len(), "errors": errors }),
    };
    out.json("sweep.json", &report)?;
    Ok(report)
}
