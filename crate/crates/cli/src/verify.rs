use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use qklab_core::graphgeom::{self, GraphJet};
use qklab_core::rosgeom::{self, ProfileJet};
use qklab_core::symfunc::{self, CurvatureVector};

use crate::args::VerifyArgs;
use crate::commands::check_nk;
use crate::output::{Artifacts, CheckOut, CliError, CliResult, Report, Table};

const HOMOGENEITY_TOL: f64 = 1e-12;
const FD_TOL: f64 = 1e-7;
const TRACE_TOL: f64 = 1e-12;
const FD_STEP: f64 = 1e-5;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn unit_dir(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.1 {
            return d.iter().map(|x| x / norm).collect();
        }
    }
}

/// Largest pairwise disagreement among the closed-form, eigenvalue and
/// delta-contraction routes for one radial jet.
fn jet_disagreement(pj: &ProfileJet, dir: &[f64]) -> qklab_core::Result<f64> {
    let n = pj.n;
    let gj = GraphJet::radial(pj.r, pj.du, pj.ddu, dir)?;
    let mut ros = rosgeom::principal_curvatures(pj)?.into_vec();
    ros.sort_by(f64::total_cmp);
    let eig = graphgeom::principal_curvatures(&gj)?;
    let mut worst = ros
        .iter()
        .zip(eig.as_slice())
        .fold(0.0_f64, |m, (a, b)| m.max(rel(*a, *b)));
    let h = graphgeom::weingarten(&gj);
    for l in 1..=n {
        let closed = rosgeom::s_l_profile(pj, l)?;
        let delta = graphgeom::graph_s_l_delta(&h, l)?;
        let eigen = symfunc::elementary_symmetric(&eig, l)?;
        worst = worst.max(rel(closed, delta)).max(rel(closed, eigen)).max(rel(delta, eigen));
    }
    let lam = CurvatureVector::new(ros)?;
    if symfunc::in_cone(&lam, pj.k + 1)?.member {
        worst = worst.max(rel(rosgeom::q_k_profile(pj)?, symfunc::q_ratio(&eig, pj.k)?));
    }
    Ok(worst)
}

struct PropertyErrors {
    homogeneity: f64,
    gradient_fd: f64,
    gradient_min: f64,
    newton_trace: f64,
}

fn property_errors(rng: &mut ChaCha8Rng, n: usize, samples: usize) -> qklab_core::Result<PropertyErrors> {
    let mut e = PropertyErrors {
        homogeneity: 0.0,
        gradient_fd: 0.0,
        gradient_min: f64::INFINITY,
        newton_trace: 0.0,
    };
    for _ in 0..samples {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..5.0)).collect();
        let t = rng.random_range(0.01..50.0);
        let lam = CurvatureVector::new(v.clone())?;
        let s = symfunc::elementary_symmetric_all(&lam);
        for (k, &sk) in s.iter().enumerate().take(n) {
            let q = symfunc::q_ratio(&lam, k)?;
            let qt = symfunc::q_ratio(&lam.scaled(t)?, k)?;
            e.homogeneity = e.homogeneity.max((qt - t * q).abs() / (t * q).abs());
            let g = symfunc::q_gradient(&lam, k)?;
            for i in 0..n {
                let shifted = |d: f64| {
                    let mut w = v.clone();
                    w[i] += d;
                    symfunc::q_ratio(&CurvatureVector::new(w)?, k)
                };
                let fd = (shifted(FD_STEP)? - shifted(-FD_STEP)?) / (2.0 * FD_STEP);
                e.gradient_fd = e.gradient_fd.max(rel(g[i], fd));
                e.gradient_min = e.gradient_min.min(g[i]);
            }
            let tk: f64 = symfunc::newton_transform_diag(&lam, k)?.as_slice().iter().sum();
            e.newton_trace = e.newton_trace.max(rel(tk, (n - k) as f64 * sk));
        }
    }
    Ok(e)
}

pub fn verify(a: &VerifyArgs, out: &Artifacts, echo: Value) -> CliResult<Report> {
    check_nk(a.n, 0)?;
    if a.n > graphgeom::DELTA_MAX_N {
        return Err(CliError::Usage(format!(
            "--n at most {} for the delta contraction",
            graphgeom::DELTA_MAX_N
        )));
    }
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let n = a.n;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut table = Table::new(["k", "r", "du", "ddu", "disagreement"]);
    let mut worst = 0.0_f64;
    for k in 0..n {
        for _ in 0..a.samples {
            let r = rng.random_range(0.05..1.5);
            let du = rng.random_range(-2.0..3.0);
            let ddu = rng.random_range(-2.0..4.0);
            let dir = unit_dir(&mut rng, n);
            let pj = ProfileJet::new(n, k, r, 0.0, du, ddu)?;
            let d = jet_disagreement(&pj, &dir)?;
            worst = worst.max(d);
            table.rows.push(vec![k as f64, r, du, ddu, d]);
        }
    }
    out.table(&format!("verify_n{n}"), &table)?;
    let props = property_errors(&mut rng, n, a.samples)?;
    let checks = vec![
        CheckOut::at_most("cross_oracle", worst, a.tol),
        CheckOut::at_most("q_homogeneity", props.homogeneity, HOMOGENEITY_TOL),
        CheckOut::at_most("q_gradient_fd", props.gradient_fd, FD_TOL),
        CheckOut::flag("q_gradient_positive", props.gradient_min > 0.0),
        CheckOut::at_most("newton_trace", props.newton_trace, TRACE_TOL),
    ];
    let report = Report {
        n,
        k: None,
        provenance: None,
        blow_up_radius: None,
        checks,
        config_echo: echo,
        details: json!({
            "jets": n * a.samples,
            "max_cross_oracle_error": worst,
            "min_gradient_entry": props.gradient_min,
        }),
    };
    out.json(&format!("verify_n{n}.json"), &report)?;
    Ok(report)
}
