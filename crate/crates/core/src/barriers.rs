//! Closed-form barriers for the `k = n - 1` profile equation
//! `v̇ = F_{n-1}(r, v)` on `(0, 1/n)`:
//!
//! * `w0(r) = n r`, a sub-solution;
//! * `w1(r) = n r / sqrt(1 - n²r²)`, a super-solution;
//! * `w2(r) = -ln(1 - n r)`, a height candidate whose derivative inequality
//!   reduces to a scalar inequality in `r`.
//!
//! The inequalities are evaluated on grids as formulas; no barrier ODE is
//! integrated. [`sandwich_verify`] compares a computed solution against them.

use serde::Serialize;

use crate::report::ResidualReport;
use crate::rosgeom::ProfileCurve;
use crate::shoot::SlopeField;
use crate::{Error, Result};

/// A barrier margin counts as satisfied down to this value.
pub const MARGIN_TOL: f64 = 1e-12;
/// Tolerance of the comparison in [`sandwich_verify`].
pub const SANDWICH_TOL: f64 = 1e-6;
/// Grids stop at `EDGE_FACTOR / n`.
pub const EDGE_FACTOR: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BarrierName {
    #[serde(rename = "w0_sub")]
    W0Sub,
    #[serde(rename = "w1_super")]
    W1Super,
    #[serde(rename = "w2_sub")]
    W2Sub,
}

impl BarrierName {
    pub fn as_str(self) -> &'static str {
        match self {
            BarrierName::W0Sub => "w0_sub",
            BarrierName::W1Super => "w1_super",
            BarrierName::W2Sub => "w2_sub",
        }
    }
}

/// Pointwise slack of one barrier inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierCheck {
    pub name: BarrierName,
    pub n: usize,
    pub grid: Vec<f64>,
    pub margins: Vec<f64>,
    pub passed: bool,
}

impl BarrierCheck {
    fn new(name: BarrierName, n: usize, grid: Vec<f64>, margins: Vec<f64>) -> Self {
        let passed = margins.iter().all(|&m| m >= -MARGIN_TOL);
        Self {
            name,
            n,
            grid,
            margins,
            passed,
        }
    }

    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `(r, margin)` at the most negative margin.
    pub fn worst(&self) -> Option<(f64, f64)> {
        self.grid
            .iter()
            .zip(&self.margins)
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(&r, &m)| (r, m))
    }
}

/// `points` equally spaced radii ending at `EDGE_FACTOR / n`.
pub fn uniform_grid(n: usize, points: usize) -> Vec<f64> {
    let end = EDGE_FACTOR / n as f64;
    (1..=points).map(|i| end * i as f64 / points as f64).collect()
}

fn validate(n: usize, grid: &[f64]) -> Result<()> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    let edge = 1.0 / n as f64;
    if let Some(&r) = grid.iter().find(|&&r| !(r > 0.0 && r < edge)) {
        return Err(Error::Config(format!("grid radius {r} outside (0, {edge})")));
    }
    Ok(())
}

pub fn w1(n: usize, r: f64) -> f64 {
    let nr = n as f64 * r;
    nr / (1.0 - nr * nr).sqrt()
}

pub fn w1_derivative(n: usize, r: f64) -> f64 {
    let nr = n as f64 * r;
    n as f64 / (1.0 - nr * nr).powf(1.5)
}

/// `∫_0^r w1 = (1 - sqrt(1 - n²r²)) / n`, written without cancellation.
pub fn w1_integral(n: usize, r: f64) -> f64 {
    let nf = n as f64;
    let x = nf * nf * r * r;
    x / (nf * (1.0 + (1.0 - x).sqrt()))
}

pub fn w2(n: usize, r: f64) -> f64 {
    -(-(n as f64) * r).ln_1p()
}

/// `F_{n-1}(r, n r) - n`.
pub fn check_w0(n: usize, grid: &[f64]) -> Result<BarrierCheck> {
    validate(n, grid)?;
    let field = SlopeField::extremal(n)?;
    let nf = n as f64;
    let margins = grid
        .iter()
        .map(|&r| field.slope(r, nf * r).map(|f| f - nf))
        .collect::<Result<Vec<_>>>()?;
    Ok(BarrierCheck::new(BarrierName::W0Sub, n, grid.to_vec(), margins))
}

/// `w1(1 + w1²)/r - F_{n-1}(r, w1)`, evaluated as
/// `w1(1 + w1²)(w1 - n r) / (r (w1 - (n-1) r))`.
pub fn check_w1(n: usize, grid: &[f64]) -> Result<BarrierCheck> {
    validate(n, grid)?;
    let nf = n as f64;
    let margins = grid
        .iter()
        .map(|&r| {
            let x = nf * nf * r * r;
            let d = (1.0 - x).sqrt();
            let w = nf * r / d;
            // w1 - n r = n r x / (d (1 + d))
            let excess = nf * r * x / (d * (1.0 + d));
            w * (1.0 + w * w) * excess / (r * (w - (nf - 1.0) * r))
        })
        .collect();
    Ok(BarrierCheck::new(BarrierName::W1Super, n, grid.to_vec(), margins))
}

/// Relative gap between `w1(1 + w1²)/r` and the analytic `ẇ1`.
pub fn w1_identity_error(n: usize, r: f64) -> f64 {
    let w = w1(n, r);
    let lhs = w * (1.0 + w * w) / r;
    let rhs = w1_derivative(n, r);
    ((lhs - rhs) / rhs).abs()
}

/// `((1 - n r)² + n²) / (n - (n-1) r + n(n-1) r²) - n`.
pub fn check_w2(n: usize, grid: &[f64]) -> Result<BarrierCheck> {
    validate(n, grid)?;
    let nf = n as f64;
    let margins = grid
        .iter()
        .map(|&r| {
            let num = (1.0 - nf * r).powi(2) + nf * nf;
            let den = nf - (nf - 1.0) * r + nf * (nf - 1.0) * r * r;
            num / den - nf
        })
        .collect();
    Ok(BarrierCheck::new(BarrierName::W2Sub, n, grid.to_vec(), margins))
}

/// The three barrier checks on one grid.
pub fn check_all(n: usize, grid: &[f64]) -> Result<[BarrierCheck; 3]> {
    Ok([check_w0(n, grid)?, check_w1(n, grid)?, check_w2(n, grid)?])
}

/// Compares a `k = n - 1` solution with the barriers at its samples in
/// `(0, 1/n)`.
///
/// Checks `v_lower` (`v >= n r`), `v_upper` (`v <= w1`), `u_upper`
/// (`u <= ∫ w1`) and `u_lower` (`u >= n r²/2`), all within
/// [`SANDWICH_TOL`]. `u_lower_w2` (`u >= -ln(1 - n r)`) is reported as
/// informational. The residuals are `v - n r`.
pub fn sandwich_verify(curve: &ProfileCurve) -> Result<ResidualReport> {
    let n = curve.n;
    if curve.k + 1 != n {
        return Err(Error::Curve(format!(
            "sandwich needs k = n - 1, got n = {n}, k = {}",
            curve.k
        )));
    }
    let nf = n as f64;
    let edge = 1.0 / nf;
    let inside: Vec<_> = curve
        .samples
        .iter()
        .filter(|s| s.r > 0.0 && s.r < edge)
        .copied()
        .collect();
    if inside.is_empty() {
        return Err(Error::Curve("no samples in (0, 1/n)".into()));
    }
    let radii: Vec<f64> = inside.iter().map(|s| s.r).collect();
    let lower: Vec<f64> = inside.iter().map(|s| s.du - nf * s.r).collect();
    let mut rep = ResidualReport::new(
        format!("sandwich ({})", curve.provenance.as_str()),
        radii.clone(),
        lower.clone(),
    );
    rep.push_slack_check("v_lower", SANDWICH_TOL, false, radii.iter().copied().zip(lower));
    rep.push_slack_check(
        "v_upper",
        SANDWICH_TOL,
        false,
        inside.iter().map(|s| (s.r, w1(n, s.r) - s.du)),
    );
    rep.push_slack_check(
        "u_upper",
        SANDWICH_TOL,
        false,
        inside.iter().map(|s| (s.r, w1_integral(n, s.r) - s.u)),
    );
    rep.push_slack_check(
        "u_lower",
        SANDWICH_TOL,
        false,
        inside.iter().map(|s| (s.r, s.u - 0.5 * nf * s.r * s.r)),
    );
    rep.push_slack_check(
        "u_lower_w2",
        SANDWICH_TOL,
        true,
        inside.iter().map(|s| (s.r, s.u - w2(n, s.r))),
    );
    Ok(rep)
}

/// First sampled radius below `1/n` where `u >= level`.
pub fn blow_up_certificate(curve: &ProfileCurve, level: f64) -> Option<f64> {
    let edge = 1.0 / curve.n as f64;
    curve
        .samples
        .iter()
        .find(|s| s.r < edge && s.u >= level)
        .map(|s| s.r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn w0_margin_is_cubic_term() {
        for n in 2..=8 {
            let nf = n as f64;
            let c = check_w0(n, &uniform_grid(n, 200)).unwrap();
            assert!(c.passed);
            for (&r, &m) in c.grid.iter().zip(&c.margins) {
                assert_relative_eq!(m, nf.powi(3) * r * r, max_relative = 1e-9);
            }
        }
        let f = SlopeField::extremal(2).unwrap();
        assert_relative_eq!(f.slope(0.5, 1.0).unwrap(), 4.0, max_relative = 1e-15);
    }

    #[test]
    fn w1_identity() {
        assert_relative_eq!(w1(2, 0.4), 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(w1_derivative(2, 0.4), 2.0 / 0.36f64.powf(1.5), max_relative = 1e-15);
        assert!(w1_identity_error(2, 0.4) < 1e-12);
        for n in 2..=8 {
            for r in uniform_grid(n, 100) {
                assert!(w1_identity_error(n, r) < 1e-12);
            }
        }
    }

    #[test]
    fn w1_margin_matches_direct_difference() {
        // away from cancellation the factored margin equals the plain one
        let f = SlopeField::extremal(3).unwrap();
        let grid = [0.05, 0.1, 0.2, 0.3];
        let c = check_w1(3, &grid).unwrap();
        for (&r, &m) in grid.iter().zip(&c.margins) {
            let w = w1(3, r);
            let direct = w * (1.0 + w * w) / r - f.slope(r, w).unwrap();
            assert_relative_eq!(m, direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn w2_examples() {
        let c = check_w2(2, &[0.25]).unwrap();
        assert_relative_eq!(c.margins[0], 4.25 / 1.875 - 2.0, max_relative = 1e-14);
        for n in 2..=8 {
            let nf = n as f64;
            let c = check_w2(n, &uniform_grid(n, 1000)).unwrap();
            assert!(c.passed);
            // factored form (1 - n r)(1 + n(n-2) r) / den
            for (&r, &m) in c.grid.iter().zip(&c.margins) {
                let den = nf - (nf - 1.0) * r + nf * (nf - 1.0) * r * r;
                let f = (1.0 - nf * r) * (1.0 + nf * (nf - 2.0) * r) / den;
                assert!((m - f).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn grid_outside_domain_rejected() {
        assert!(check_w0(3, &[0.0]).is_err());
        assert!(check_w1(3, &[0.34]).is_err());
        assert!(check_w2(1, &[0.1]).is_err());
        assert_eq!(uniform_grid(4, 10).len(), 10);
        assert!(*uniform_grid(4, 10).last().unwrap() < 0.25);
    }

    #[test]
    fn w1_integral_closed_form() {
        for n in 2..=5 {
            let r = 0.9 / n as f64;
            let nf = n as f64;
            let plain = (1.0 - (1.0 - nf * nf * r * r).sqrt()) / nf;
            assert_relative_eq!(w1_integral(n, r), plain, max_relative = 1e-14);
        }
    }

    #[test]
    fn sandwich_requires_extremal_k() {
        let c = ProfileCurve::from_fn(3, 1, &[0.1], crate::rosgeom::Provenance::Candidate, |r| {
            (r * r, 2.0 * r, 2.0)
        })
        .unwrap();
        assert!(sandwich_verify(&c).is_err());
    }

    #[test]
    fn explicit_profile_sandwich() {
        let radii: Vec<f64> = (1..500).map(|i| i as f64 / 1000.0).collect();
        let rep = sandwich_verify(&ProfileCurve::explicit_q1(&radii).unwrap()).unwrap();
        assert!(rep.passed(), "{:?}", rep.checks);
        assert!(!rep.check("u_lower_w2").unwrap().passed);
    }
}
