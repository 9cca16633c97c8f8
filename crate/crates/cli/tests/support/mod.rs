//! Independent reference computations for the acceptance and CLI tests.
#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

/// `S_l` as a sum over all `l`-subsets.
pub fn subset_s(lambda: &[f64], l: usize) -> f64 {
    let n = lambda.len();
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == l)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| lambda[i]).product::<f64>())
        .sum()
}

/// `S_1, ..., S_m > 0`.
pub fn in_garding_cone(lambda: &[f64], m: usize) -> bool {
    (1..=m).all(|l| subset_s(lambda, l) > 0.0)
}

/// Composite Simpson with `panels` (even) intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let inner: f64 = (1..panels)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    h / 3.0 * (f(a) + f(b) + inner)
}

/// `∫_0^{π/2} sin^{n-1}`: where the slope of the `k = n - 1` profile becomes
/// infinite.
pub fn sine_integral(n: usize) -> f64 {
    simpson(|t| t.sin().powi(n as i32 - 1), 0.0, std::f64::consts::FRAC_PI_2, 2000)
}

/// Principal curvatures of the radial graph `u(|x|)` at a jet: rotational
/// (`n - 1` copies) then radial.
pub fn radial_curvatures(n: usize, r: f64, v: f64, ddu: f64) -> Vec<f64> {
    let w = (1.0 + v * v).sqrt();
    let mut lam = vec![v / (r * w); n - 1];
    lam.push(ddu / (w * w * w));
    lam
}

pub fn qklab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qklab"))
        .arg("--output-dir")
        .arg(dir)
        .args(args)
        .env_remove("QKLAB_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

/// Every file under `dir` with its contents, sorted by relative path.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}
