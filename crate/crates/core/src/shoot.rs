//! Shooting for the first-order profile ODE `v̇ = F_k(r, v)`, `v(0) = 0`,
//! where `v = u̇`.
//!
//! The origin is a singular point of `F_k`, so integration starts at a small
//! seed radius on the axis branch `v ≈ a·r` with `a = (k+1)/(n-k)`. The
//! height `u = ∫ v` is integrated alongside `v`. Integration stops when `v`
//! crosses a blow-up threshold, when the step size collapses, or at `r_max`.

use serde::Serialize;

use crate::rk::{self, State};
use crate::rosgeom::{check_nk, ProfileCurve, ProfileJet, Provenance};
use crate::{Error, Result};

/// The right-hand side `F_k` of the profile ODE for fixed `(n, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SlopeField {
    pub n: usize,
    pub k: usize,
}

impl SlopeField {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        check_nk(n, k)?;
        Ok(Self { n, k })
    }

    /// `k = n - 1`, the case with a non-entire translator.
    pub fn extremal(n: usize) -> Result<Self> {
        Self::new(n, n.saturating_sub(1))
    }

    /// `F_k(r, s) = (n-k)/(k+1) (1+s²) (s/r) (r(k+1) - (n-k-1)s) / ((n-k)s - kr)`.
    ///
    /// For `k = 0` the factor `s` cancels and the mean-curvature form
    /// `(1+s²)(1 - (n-1)s/r)` is used, which is regular at `s = 0`.
    pub fn slope(&self, r: f64, s: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::SingularSlope { r, s });
        }
        let n = self.n as f64;
        let k = self.k as f64;
        let value = if self.k == 0 {
            (1.0 + s * s) * (1.0 - (n - 1.0) * s / r)
        } else {
            let den = (n - k) * s - k * r;
            if den == 0.0 {
                return Err(Error::SingularSlope { r, s });
            }
            (n - k) / (k + 1.0) * (1.0 + s * s) * (s / r) * (r * (k + 1.0) - (n - k - 1.0) * s)
                / den
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::SingularSlope { r, s })
        }
    }

    /// Leading slope `a` of the axis branch `v ≈ a·r`: `(k+1)/(n-k)`.
    pub fn axis_slope(&self) -> f64 {
        (self.k + 1) as f64 / (self.n - self.k) as f64
    }
}

/// Free function form of [`SlopeField::slope`].
pub fn slope(field: &SlopeField, r: f64, s: f64) -> Result<f64> {
    field.slope(r, s)
}

/// Free function form of [`SlopeField::axis_slope`].
pub fn axis_slope(field: &SlopeField) -> f64 {
    field.axis_slope()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrationConfig {
    pub r_start: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub v_blowup: f64,
    pub h_min: f64,
    pub r_max: f64,
    /// Seed slope multiplier; `1.0` seeds exactly on the axis branch.
    pub seed_scale: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            r_start: 1e-6,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            v_blowup: 1e8,
            h_min: 1e-14,
            r_max: 4.0,
            seed_scale: 1.0,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.r_start > 0.0
            && self.r_start < self.r_max
            && self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.h_min > 0.0
            && self.v_blowup > 0.0
            && self.seed_scale > 0.0
            && self.r_max.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid integration config {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// `|v|` crossed the blow-up threshold.
    Threshold,
    /// Step size fell below `h_min` (typically a singular denominator).
    StepFloor,
    /// Reached `r_max`.
    CapReached,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowUpReport {
    pub detected: bool,
    /// Extrapolated singular radius when detected, otherwise the last radius.
    pub radius_estimate: f64,
    pub last_v: f64,
    pub reason: StopReason,
    /// Radius where `v = v_blowup`.
    pub threshold_radius: Option<f64>,
    /// Radius where `v = 10·v_blowup`.
    pub second_threshold_radius: Option<f64>,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

fn rhs(field: &SlopeField, r: f64, y: &State) -> Result<State> {
    Ok([field.slope(r, y[0])?, y[0]])
}

fn error_norm(y: &State, y_new: &State, err: &State, cfg: &IntegrationConfig) -> f64 {
    let sum: f64 = (0..2)
        .map(|i| {
            let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / 2.0).sqrt()
}

/// Bisection on the dense output for `|v| = level` inside one step.
fn crossing(step: &rk::Step, r0: f64, h: f64, level: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if step.dense(mid)[0].abs() >= level {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-17 {
            break;
        }
    }
    r0 + 0.5 * (lo + hi) * h
}

/// Integrates `(v, u)` from the seed radius outwards.
///
/// The returned curve starts with the axis jet `(0, 0, 0, a)` followed by the
/// seed and every accepted step.
pub fn integrate(
    field: &SlopeField,
    config: &IntegrationConfig,
) -> Result<(ProfileCurve, BlowUpReport)> {
    run(field, config, None)
}

/// Like [`integrate`], but the curve is sampled exactly at `radii` (strictly
/// increasing, non-negative) using the continuous extension of each step.
/// Radii at or below the seed radius use the seed series; radii past the end
/// of the integration are dropped.
pub fn integrate_at(
    field: &SlopeField,
    config: &IntegrationConfig,
    radii: &[f64],
) -> Result<(ProfileCurve, BlowUpReport)> {
    if radii.first().is_some_and(|&r| !(r >= 0.0))
        || radii.windows(2).any(|w| !(w[1] > w[0]))
        || radii.iter().any(|r| !r.is_finite())
    {
        return Err(Error::Config("output radii must be finite, non-negative and increasing".into()));
    }
    run(field, config, Some(radii))
}

fn run(
    field: &SlopeField,
    config: &IntegrationConfig,
    outputs: Option<&[f64]>,
) -> Result<(ProfileCurve, BlowUpReport)> {
    config.validate()?;
    let (n, k) = (field.n, field.k);
    let a = field.axis_slope();
    let seed_a = a * config.seed_scale;
    let mut r = config.r_start;
    let mut y: State = [seed_a * r, 0.5 * seed_a * r * r];
    let mut f0 = rhs(field, r, &y)?;

    let mut samples = Vec::new();
    let mut pending = 0usize;
    match outputs {
        None => {
            samples.push(ProfileJet::new(n, k, 0.0, 0.0, 0.0, a)?);
            samples.push(ProfileJet::new(n, k, r, y[1], y[0], f0[0])?);
        }
        Some(radii) => {
            for &rho in radii.iter().take_while(|&&rho| rho <= r) {
                let jet = if rho == 0.0 {
                    ProfileJet::new(n, k, 0.0, 0.0, 0.0, a)?
                } else {
                    let v = seed_a * rho;
                    ProfileJet::new(n, k, rho, 0.5 * seed_a * rho * rho, v, field.slope(rho, v)?)?
                };
                samples.push(jet);
                pending += 1;
            }
        }
    }
    let level1 = config.v_blowup;
    let level2 = 10.0 * config.v_blowup;
    let mut r1 = None;
    let mut r2 = None;
    let mut h = 0.1 * config.r_start;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut last_rejected = false;

    let reason = loop {
        if r >= config.r_max {
            break StopReason::CapReached;
        }
        h = h.min(config.r_max - r);
        if h < config.h_min {
            if accepted == 0 {
                return Err(Error::Integration {
                    r,
                    reason: "step floor reached before any progress",
                });
            }
            break StopReason::StepFloor;
        }
        let trial = rk::step(&|x, s: &State| rhs(field, x, s), r, &y, &f0, h);
        let step = match trial {
            Ok(s) if s.y.iter().all(|x| x.is_finite()) => s,
            _ => {
                rejected += 1;
                last_rejected = true;
                h *= 0.25;
                continue;
            }
        };
        let err = error_norm(&y, &step.y, &step.err, config);
        if !(err <= 1.0) {
            rejected += 1;
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).max(0.1)
            } else {
                0.1
            };
            h *= fac;
            last_rejected = true;
            continue;
        }
        accepted += 1;
        let r_new = if (config.r_max - (r + h)).abs() <= 1e-14 * config.r_max {
            config.r_max
        } else {
            r + h
        };
        if r1.is_none() && step.y[0].abs() >= level1 {
            r1 = Some(crossing(&step, r, h, level1));
        }
        if step.y[0].abs() >= level2 {
            r2 = Some(crossing(&step, r, h, level2));
        }
        if let Some(radii) = outputs {
            while pending < radii.len() && radii[pending] <= r_new {
                let rho = radii[pending];
                let yd = step.dense(((rho - r) / h).clamp(0.0, 1.0));
                samples.push(ProfileJet::new(n, k, rho, yd[1], yd[0], field.slope(rho, yd[0])?)?);
                pending += 1;
            }
        }
        r = r_new;
        y = step.y;
        f0 = step.k7;
        if outputs.is_none() {
            samples.push(ProfileJet::new(n, k, r, y[1], y[0], f0[0])?);
        }
        if r2.is_some() {
            break StopReason::Threshold;
        }
        let mut fac = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.2) };
        fac = fac.clamp(0.2, 5.0);
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        h *= fac;
    };

    let detected = r1.is_some();
    let radius_estimate = match (r1, r2) {
        (Some(a1), Some(a2)) => (level2 * a2 - level1 * a1) / (level2 - level1),
        (Some(a1), None) => a1,
        _ => r,
    };
    let report = BlowUpReport {
        detected,
        radius_estimate: if detected {
            radius_estimate.min(config.r_max)
        } else {
            radius_estimate
        },
        last_v: y[0],
        reason,
        threshold_radius: r1,
        second_threshold_radius: r2,
        steps_accepted: accepted,
        steps_rejected: rejected,
    };
    let curve = ProfileCurve::new(
        n,
        k,
        samples,
        detected.then_some(report.radius_estimate),
        Provenance::Shooting,
    )?;
    Ok((curve, report))
}

/// Recomputes `u` from the slope samples by the end-corrected trapezoid rule
/// `∫ v ≈ h(v_a + v_b)/2 + h²(v̇_a - v̇_b)/12` (fourth order, using `ü`).
/// The first sample keeps its height; it is `0` on the axis.
pub fn reconstruct_height(curve: &ProfileCurve) -> ProfileCurve {
    let mut out = curve.clone();
    let s = &mut out.samples;
    if s[0].r == 0.0 {
        s[0].u = 0.0;
    }
    for i in 1..s.len() {
        let (a, b) = (s[i - 1], s[i]);
        let h = b.r - a.r;
        s[i].u = a.u + 0.5 * h * (a.du + b.du) + h * h * (a.ddu - b.ddu) / 12.0;
    }
    out
}
