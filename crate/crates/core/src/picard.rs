//! Fixed-point iteration for `v = T(v)`,
//! `T(v)(r) = ∫_0^r v(1+v²)/(v - (n-1)s) ds`, on a uniform grid over
//! `[0, δ]`, together with the window `√r <= v <= tan(nr)` and the
//! Lipschitz estimate used to pick `δ`.
//!
//! The integral is evaluated by cumulative composite Simpson. At `s = 0` the
//! integrand is `0/0`; its value there is taken from a quadratic through the
//! first three interior nodes.
//!
//! The window is checked exactly as stated. Note that `tan(nr) < √r` for
//! `r` below [`empty_window_radius`] (just under `1/n²`), so no grid
//! function satisfies both bounds at the first nodes, and the solution of the
//! profile ODE (`v ≈ n r` near the axis) sits below `√r`. With
//! [`WindowPolicy::Enforce`] a window exit is an error carrying the trace.
//! [`WindowPolicy::Monitor`] records exits and keeps iterating, which is
//! how the behaviour of the iteration itself can be studied.

use serde::Serialize;

use crate::report::ResidualReport;
use crate::rosgeom::{ProfileCurve, ProfileJet, Provenance};
use crate::shoot::reconstruct_height;
use crate::{Error, Result};

/// Default number of grid intervals.
pub const DEFAULT_NODES: usize = 1024;
/// Smallest permitted number of grid intervals.
pub const MIN_NODES: usize = 512;
/// Stop once `‖v_{j+1} - v_j‖_∞` falls below this.
pub const STOP_TOL: f64 = 1e-13;
pub const MAX_ITERATIONS: usize = 200;
/// Allowance for finite-difference error in [`derivative_bound_check`].
pub const DERIVATIVE_TOL: f64 = 1e-9;

/// `min{ arccos(sqrt(n/(n+1)))/n, 1/n² }`.
pub fn delta_bound(n: usize) -> f64 {
    let nf = n as f64;
    ((nf / (nf + 1.0)).sqrt().acos() / nf).min(1.0 / (nf * nf))
}

/// `(√r, tan(nr))`.
pub fn window_bounds(n: usize, r: f64) -> (f64, f64) {
    (r.sqrt(), (n as f64 * r).tan())
}

/// Uniform grid on `[0, δ]` with `m` intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowX {
    n: usize,
    delta: f64,
    intervals: usize,
}

impl WindowX {
    pub fn new(n: usize, delta: f64, intervals: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        if !(delta > 0.0 && delta <= delta_bound(n)) {
            return Err(Error::Config(format!(
                "window length {delta} not in (0, {}]",
                delta_bound(n)
            )));
        }
        if intervals < MIN_NODES || intervals & 1 == 1 {
            return Err(Error::Config(format!(
                "grid needs an even number >= {MIN_NODES} of intervals, got {intervals}"
            )));
        }
        Ok(Self {
            n,
            delta,
            intervals,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn spacing(&self) -> f64 {
        self.delta / self.intervals as f64
    }

    /// `m + 1` nodes `r_j = j δ / m`.
    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..=self.intervals).map(|j| j as f64 * h).collect()
    }

    /// First node at which `v` leaves `[√r, tan(nr)]`.
    pub fn check(&self, v: &[f64]) -> Result<()> {
        self.check_len(v)?;
        for (j, (&r, &x)) in self.grid().iter().zip(v).enumerate() {
            let (lower, upper) = window_bounds(self.n, r);
            if !(x >= lower && x <= upper) {
                return Err(Error::OutsideWindow {
                    node: j,
                    r,
                    value: x,
                    lower,
                    upper,
                });
            }
        }
        Ok(())
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.intervals + 1 {
            return Err(Error::Config(format!(
                "expected {} node values, got {}",
                self.intervals + 1,
                v.len()
            )));
        }
        Ok(())
    }
}

/// `δ [ (n-1) + 2 sup tan³(nr)/r + 3(n-1) sup tan²(nr) ]`, both suprema taken
/// at `r = δ` (the terms increase on `(0, π/(2n))`).
pub fn contraction_coefficient(window: &WindowX) -> f64 {
    coefficient(window.n, window.delta)
}

fn coefficient(n: usize, delta: f64) -> f64 {
    let nf = n as f64;
    let t = (nf * delta).tan();
    delta * ((nf - 1.0) + 2.0 * t * t * t / delta + 3.0 * (nf - 1.0) * t * t)
}

/// Halves `δ` from [`delta_bound`] until the coefficient is below one.
pub fn shrink_to_contraction(n: usize) -> Result<WindowX> {
    shrink_with_nodes(n, DEFAULT_NODES)
}

pub fn shrink_with_nodes(n: usize, intervals: usize) -> Result<WindowX> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    let mut delta = delta_bound(n);
    while coefficient(n, delta) >= 1.0 {
        delta *= 0.5;
    }
    WindowX::new(n, delta, intervals)
}

/// Number of halvings [`shrink_to_contraction`] performs.
pub fn halvings(window: &WindowX) -> u32 {
    (delta_bound(window.n) / window.delta).log2().round() as u32
}

fn integrand(n: usize, s: f64, v: f64) -> Result<f64> {
    let den = v - (n as f64 - 1.0) * s;
    if den == 0.0 {
        return Err(Error::SingularSlope { r: s, s: v });
    }
    let f = v * (1.0 + v * v) / den;
    if f.is_finite() {
        Ok(f)
    } else {
        Err(Error::SingularSlope { r: s, s: v })
    }
}

/// Integrand values at all nodes; node 0 by quadratic extrapolation.
fn integrand_nodes(window: &WindowX, v: &[f64]) -> Result<Vec<f64>> {
    let grid = window.grid();
    let mut f = vec![0.0; v.len()];
    for j in 1..v.len() {
        f[j] = integrand(window.n, grid[j], v[j])?;
    }
    f[0] = 3.0 * f[1] - 3.0 * f[2] + f[3];
    Ok(f)
}

/// Cumulative Simpson; odd nodes use the quadratic through `j-1, j, j+1`.
fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let m = f.len() - 1;
    let mut out = vec![0.0; m + 1];
    for j in (2..=m).step_by(2) {
        out[j] = out[j - 2] + h / 3.0 * (f[j - 2] + 4.0 * f[j - 1] + f[j]);
    }
    for j in (1..m).step_by(2) {
        out[j] = out[j - 1] + h / 12.0 * (5.0 * f[j - 1] + 8.0 * f[j] - f[j + 1]);
    }
    out
}

/// `T(v)` at the grid nodes; `v` must lie in the window.
pub fn apply_t(window: &WindowX, v: &[f64]) -> Result<Vec<f64>> {
    window.check(v)?;
    apply_t_unchecked(window, v)
}

/// `T(v)` without the window precondition (the denominator must not vanish).
pub fn apply_t_unchecked(window: &WindowX, v: &[f64]) -> Result<Vec<f64>> {
    window.check_len(v)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("iterate"));
    }
    let f = integrand_nodes(window, v)?;
    Ok(cumulative_simpson(&f, window.spacing()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowPolicy {
    /// Any iterate outside `[√r, tan(nr)]` aborts the iteration.
    Enforce,
    /// Exits are recorded in the trace; iteration continues.
    Monitor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PicardOptions {
    pub policy: WindowPolicy,
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            policy: WindowPolicy::Enforce,
            tol: STOP_TOL,
            max_iterations: MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IterationTrace {
    /// `‖v_{j+1} - v_j‖_∞` per iteration.
    pub sup_diffs: Vec<f64>,
    /// `sup_diffs[j] / sup_diffs[j-1]`.
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
    /// Iterations (1-based) whose result left the window.
    pub window_exits: Vec<usize>,
}

/// `max(√r, min(n r, tan(nr)))` at each node. Where the window is empty
/// (`tan(nr) < √r`) this is the lower bound.
pub fn default_initial(window: &WindowX) -> Vec<f64> {
    window
        .grid()
        .iter()
        .map(|&r| {
            let (lo, hi) = window_bounds(window.n, r);
            (window.n as f64 * r).min(hi).max(lo)
        })
        .collect()
}

/// Radius below which `tan(nr) < √r`, i.e. the window has no admissible
/// values; found by bisection on `(0, π/(2n))`.
pub fn empty_window_radius(n: usize) -> f64 {
    let nf = n as f64;
    let g = |r: f64| (nf * r).tan() - r.sqrt();
    let (mut lo, mut hi) = (1e-300_f64, 0.5 * std::f64::consts::FRAC_PI_2 / nf);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `n r` at each node (the sub-solution `w_0`).
pub fn linear_initial(window: &WindowX) -> Vec<f64> {
    let nf = window.n as f64;
    window.grid().iter().map(|&r| nf * r).collect()
}

/// Iterates `v <- T(v)` until the sup-difference drops below `opts.tol`.
pub fn iterate_to_fixed_point(
    window: &WindowX,
    v_init: &[f64],
    opts: &PicardOptions,
) -> Result<(ProfileCurve, IterationTrace)> {
    let mut trace = IterationTrace::default();
    let fail = |source: Error, trace: &IterationTrace| Error::Picard {
        source: Box::new(source),
        trace: Box::new(trace.clone()),
    };
    window.check_len(v_init)?;
    if opts.policy == WindowPolicy::Enforce {
        window.check(v_init).map_err(|e| fail(e, &trace))?;
    }
    let mut v = v_init.to_vec();
    for it in 1..=opts.max_iterations {
        let next = apply_t_unchecked(window, &v).map_err(|e| fail(e, &trace))?;
        let diff = next
            .iter()
            .zip(&v)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        if let Some(&prev) = trace.sup_diffs.last() {
            trace.contraction_ratios.push(diff / prev);
        }
        trace.sup_diffs.push(diff);
        v = next;
        if let Err(e) = window.check(&v) {
            trace.window_exits.push(it);
            if opts.policy == WindowPolicy::Enforce {
                return Err(fail(e, &trace));
            }
        }
        if diff < opts.tol {
            trace.converged = true;
            break;
        }
    }
    if !trace.converged {
        return Err(Error::NotConverged {
            trace: Box::new(trace),
        });
    }
    Ok((curve_from_nodes(window, &v)?, trace))
}

/// Profile curve (`k = n - 1`) from node values of `v`.
pub fn curve_from_nodes(window: &WindowX, v: &[f64]) -> Result<ProfileCurve> {
    let n = window.n;
    let f = integrand_nodes(window, v)?;
    let samples = window
        .grid()
        .iter()
        .zip(v.iter().zip(&f))
        .map(|(&r, (&x, &dx))| ProfileJet::new(n, n - 1, r, 0.0, x, dx))
        .collect::<Result<Vec<_>>>()?;
    let curve = ProfileCurve::new(n, n - 1, samples, None, Provenance::Picard)?;
    Ok(reconstruct_height(&curve))
}

/// Checks `v̇ <= sec²(nr) tan(nr) / r` at interior samples with `v̇` from
/// three-point finite differences of the slope samples. The report's
/// residuals are the slack `bound - v̇`.
pub fn derivative_bound_check(curve: &ProfileCurve) -> ResidualReport {
    let nf = curve.n as f64;
    let s = &curve.samples;
    let mut radii = Vec::new();
    let mut slack = Vec::new();
    for i in 1..s.len().saturating_sub(1) {
        let (x0, x1, x2) = (s[i - 1].r, s[i].r, s[i + 1].r);
        if x1 <= 0.0 {
            continue;
        }
        let (h0, h1) = (x1 - x0, x2 - x1);
        let dv = -h1 / (h0 * (h0 + h1)) * s[i - 1].du
            + (h1 - h0) / (h0 * h1) * s[i].du
            + h0 / (h1 * (h0 + h1)) * s[i + 1].du;
        let t = (nf * x1).tan();
        let sec2 = 1.0 + t * t;
        radii.push(x1);
        slack.push(sec2 * t / x1 - dv);
    }
    let mut rep = ResidualReport::new("derivative bound", radii.clone(), slack.clone());
    rep.push_slack_check("derivative_bound", DERIVATIVE_TOL, false, radii.into_iter().zip(slack));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn delta_bound_examples() {
        assert_relative_eq!(delta_bound(3), 1.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(delta_bound(2), 0.25, max_relative = 1e-15);
        // arccos branch for n = 2 (frozen, 30-digit evaluation)
        let arccos_branch = (2.0f64 / 3.0).sqrt().acos() / 2.0;
        assert_relative_eq!(arccos_branch, 0.307_739_854_335_193_7, max_relative = 1e-14);
        for n in [50usize, 200, 1000] {
            assert_relative_eq!(delta_bound(n) * (n * n) as f64, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn contraction_coefficient_examples() {
        let w = WindowX::new(2, 0.25, 1024).unwrap();
        // 0.799918841990473982693903953724 from a 30-digit evaluation
        assert_relative_eq!(contraction_coefficient(&w), 0.799_918_841_990_474, max_relative = 1e-14);
        let w = WindowX::new(3, 1.0 / 9.0, 1024).unwrap();
        assert_relative_eq!(contraction_coefficient(&w), 0.385_175_631_680_399_87, max_relative = 1e-14);
        let mut last = f64::INFINITY;
        for e in 0..30 {
            let c = coefficient(4, delta_bound(4) * 0.5f64.powi(e));
            assert!(c < last);
            last = c;
        }
        assert!(last < 1e-8);
    }

    #[test]
    fn shrink_terminates_below_one() {
        for n in 2..=12 {
            let w = shrink_to_contraction(n).unwrap();
            assert!(contraction_coefficient(&w) < 1.0);
            assert!(halvings(&w) < 64);
        }
        assert_eq!(shrink_to_contraction(2).unwrap().delta(), 0.25);
    }

    #[test]
    fn window_validation() {
        assert!(WindowX::new(3, 0.2, 1024).is_err());
        assert!(WindowX::new(3, 0.1, 511).is_err());
        assert!(WindowX::new(3, 0.1, 1023).is_err());
        assert!(WindowX::new(1, 0.1, 1024).is_err());
    }

    #[test]
    fn t_of_linear_is_cubic() {
        // integrand n(1 + n² s²) is quadratic, so Simpson is exact
        for n in 2..=6 {
            let w = shrink_to_contraction(n).unwrap();
            let nf = n as f64;
            let t = apply_t_unchecked(&w, &linear_initial(&w)).unwrap();
            for (&r, &x) in w.grid().iter().zip(&t) {
                assert!((x - (nf * r + nf.powi(3) * r.powi(3) / 3.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn apply_t_rejects_out_of_window() {
        let w = shrink_to_contraction(3).unwrap();
        match apply_t(&w, &linear_initial(&w)) {
            Err(Error::OutsideWindow { node, .. }) => assert_eq!(node, 1),
            other => panic!("{other:?}"),
        }
        match apply_t(&w, &default_initial(&w)) {
            Err(Error::OutsideWindow { node, value, upper, .. }) => {
                assert_eq!(node, 1);
                assert!(value > upper);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn window_empty_near_axis() {
        for n in 2..=6 {
            let rc = empty_window_radius(n);
            let (lo, hi) = window_bounds(n, rc);
            assert!((lo - hi).abs() < 1e-12);
            // just below 1/n², and inside every admissible window
            assert!(rc < 1.0 / (n * n) as f64 && rc > 0.8 / (n * n) as f64);
            let w = shrink_to_contraction(n).unwrap();
            assert!(rc < w.delta());
        }
    }

    #[test]
    fn default_initial_is_sqrt_on_window() {
        let w = shrink_to_contraction(4).unwrap();
        for (&r, &x) in w.grid().iter().zip(&default_initial(&w)) {
            assert_eq!(x, r.sqrt());
        }
    }

    #[test]
    fn tangent_boundary_meets_bound() {
        let w = shrink_to_contraction(3).unwrap();
        let nf = 3.0;
        let v: Vec<f64> = w.grid().iter().map(|&r| (nf * r).tan()).collect();
        let curve = curve_from_nodes(&w, &v).unwrap();
        let rep = derivative_bound_check(&curve);
        assert!(rep.passed(), "{:?} {:?}", rep.checks, &rep.residuals[..4]);
        // slack is small relative to the bound at the far end
        let last = *rep.residuals.last().unwrap();
        assert!((0.0..0.2).contains(&last));
    }

    #[test]
    fn explicit_n2_satisfies_derivative_bound() {
        let radii: Vec<f64> = (0..=1024).map(|j| 0.25 * j as f64 / 1024.0).collect();
        let rep = derivative_bound_check(&ProfileCurve::explicit_q1(&radii).unwrap());
        assert!(rep.passed(), "{:?}", rep.checks);
    }

    #[test]
    fn cumulative_simpson_exact_for_quadratics() {
        let h = 0.01;
        let f: Vec<f64> = (0..=10).map(|j| (j as f64 * h).powi(2)).collect();
        let out = cumulative_simpson(&f, h);
        for (j, &x) in out.iter().enumerate() {
            assert_relative_eq!(x, (j as f64 * h).powi(3) / 3.0, epsilon = 1e-17);
        }
    }
}
