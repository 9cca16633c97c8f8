//! First-touch comparison of two rotational profiles.
//!
//! The upper profile is moved vertically by `t` until it rests on the lower
//! one: `t* = max (lower - upper)` over the common radial range. The touch
//! radius is found on the merged sample grid, refined by a parabola through
//! the three best samples and then polished by bisection on the slope
//! difference.

use serde::Serialize;

use crate::rosgeom::{self, ProfileCurve};
use crate::shoot::{self, IntegrationConfig, SlopeField};
use crate::symfunc;
use crate::{Error, Result};

/// Gap values above this count as touching.
pub const GAP_TOL: f64 = 1e-9;
/// Sampled curvatures may dip this far below zero and still count as
/// nonnegative.
pub const CURVATURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TouchReport {
    /// Vertical shift `t*` applied to the upper profile.
    pub shift: f64,
    pub touch_radius: f64,
    pub radii: Vec<f64>,
    /// `upper + t* - lower` at `radii`.
    pub gap: Vec<f64>,
    /// `|upper'(r*) - lower'(r*)|`.
    pub gradient_mismatch: f64,
    /// Touch at the outer end of the common range, or at an inner end away
    /// from the axis.
    pub at_boundary: bool,
    /// `lower - upper` rises then falls on the sample grid.
    pub unimodal: bool,
    /// `min_i ∂Q_k/∂λ_i / (1 + u̇²)` of the lower profile at `r*`, when its
    /// curvatures lie in `Γ_{k+1}`.
    pub ellipticity: Option<f64>,
    /// All sampled curvatures of the lower profile on the common range are
    /// `>= -CURVATURE_TOL`. This is a check on samples only.
    pub lower_curvatures_nonnegative: bool,
    pub narrative: Option<String>,
}

impl TouchReport {
    pub fn min_gap(&self) -> f64 {
        self.gap.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Interior touch with matching slopes.
    pub fn tangential(&self, slope_tol: f64) -> bool {
        !self.at_boundary && self.gradient_mismatch < slope_tol
    }
}

fn merged_grid(a: &ProfileCurve, b: &ProfileCurve, lo: f64, hi: f64) -> Vec<f64> {
    let mut g: Vec<f64> = a
        .samples
        .iter()
        .chain(&b.samples)
        .map(|s| s.r)
        .filter(|&r| r >= lo && r <= hi)
        .chain([lo, hi])
        .collect();
    g.sort_by(f64::total_cmp);
    g.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * y.abs().max(1e-300));
    g
}

fn is_unimodal(d: &[f64]) -> bool {
    let scale = d.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let flat = 1e-13 * scale;
    let mut falling = false;
    for w in d.windows(2) {
        let step = w[1] - w[0];
        if step < -flat {
            falling = true;
        } else if step > flat && falling {
            return false;
        }
    }
    true
}

/// Vertex of the parabola through three points, if it lies inside them.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<f64> {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d2 - d1) / (x[2] - x[0]);
    if !(curv < 0.0) {
        return None;
    }
    let v = 0.5 * (x[0] + x[1]) - d1 / (2.0 * curv);
    (v > x[0] && v < x[2]).then_some(v)
}

/// Root of `lower' - upper'` on `[a, b]` by bisection, if it changes sign.
fn slope_root(upper: &ProfileCurve, lower: &ProfileCurve, a: f64, b: f64) -> Option<f64> {
    let g = |r: f64| Some(lower.eval(r)?.1 - upper.eval(r)?.1);
    let (mut lo, mut hi) = (a, b);
    let (glo, ghi) = (g(lo)?, g(hi)?);
    if !(glo > 0.0 && ghi < 0.0) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Lowest vertical shift `t*` with `upper + t* >= lower` on the common range.
pub fn first_touch(upper: &ProfileCurve, lower: &ProfileCurve) -> Result<TouchReport> {
    let lo = upper.r_min().max(lower.r_min());
    let hi = upper.r_max().min(lower.r_max());
    if !(lo < hi) {
        return Err(Error::NoOverlap);
    }
    let radii = merged_grid(upper, lower, lo, hi);
    let diff = |r: f64| -> Result<f64> {
        let (Some((ul, _)), Some((uu, _))) = (lower.eval(r), upper.eval(r)) else {
            return Err(Error::NoOverlap);
        };
        Ok(ul - uu)
    };
    let d = radii.iter().map(|&r| diff(r)).collect::<Result<Vec<_>>>()?;
    let imax = (0..d.len())
        .max_by(|&i, &j| d[i].total_cmp(&d[j]))
        .ok_or(Error::NoOverlap)?;
    let (mut r_star, mut t_star) = (radii[imax], d[imax]);
    if imax > 0 && imax + 1 < d.len() {
        let x = [radii[imax - 1], radii[imax], radii[imax + 1]];
        let candidates = [
            parabola_vertex(x, [d[imax - 1], d[imax], d[imax + 1]]),
            slope_root(upper, lower, x[0], x[2]),
        ];
        for r in candidates.into_iter().flatten() {
            let t = diff(r)?;
            if t > t_star {
                r_star = r;
                t_star = t;
            }
        }
    }
    let gap: Vec<f64> = d.iter().map(|x| t_star - x).collect();
    let (_, du_up) = upper.eval(r_star).ok_or(Error::NoOverlap)?;
    let (_, du_lo) = lower.eval(r_star).ok_or(Error::NoOverlap)?;
    let at_boundary = r_star >= hi || (r_star <= lo && lo > 0.0);

    let ellipticity = lower.jet_at(r_star).and_then(|jet| {
        let lambda = rosgeom::principal_curvatures(&jet).ok()?;
        let grad = symfunc::q_gradient(&lambda, jet.k).ok()?;
        let m = grad.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
        Some(m / (1.0 + jet.du * jet.du))
    });
    let lower_curvatures_nonnegative = lower
        .samples
        .iter()
        .filter(|s| s.r >= lo && s.r <= hi)
        .all(|s| {
            rosgeom::principal_curvatures(s)
                .map(|l| l.as_slice().iter().all(|&x| x >= -CURVATURE_TOL))
                .unwrap_or(false)
        });

    Ok(TouchReport {
        shift: t_star,
        touch_radius: r_star,
        radii,
        unimodal: is_unimodal(&d),
        gap,
        gradient_mismatch: (du_up - du_lo).abs(),
        at_boundary,
        ellipticity,
        lower_curvatures_nonnegative,
        narrative: None,
    })
}

/// Touches the computed `k = n - 1` profile onto a convex rotational
/// `candidate` sampled on `[0, R]` with `R > 1/n`.
///
/// This is a numerical demonstration: the report states what an interior
/// tangential touch would imply for a candidate solving the same equation.
pub fn nonexistence_demo(n: usize, candidate: &ProfileCurve) -> Result<TouchReport> {
    nonexistence_demo_with(n, candidate, &IntegrationConfig::default())
}

pub fn nonexistence_demo_with(
    n: usize,
    candidate: &ProfileCurve,
    config: &IntegrationConfig,
) -> Result<TouchReport> {
    let edge = 1.0 / n as f64;
    if !(candidate.r_max() > edge) || candidate.r_min() > 0.0 {
        return Err(Error::Curve(format!(
            "candidate must be sampled on [0, R] with R > 1/n = {edge}"
        )));
    }
    let (profile, blow) = shoot::integrate(&SlopeField::extremal(n)?, config)?;
    let mut rep = first_touch(&profile, candidate)?;
    let kind = if rep.at_boundary {
        "at the edge of the common range"
    } else if rep.touch_radius == 0.0 {
        "on the axis"
    } else {
        "at an interior radius"
    };
    let mut text = format!(
        "Demonstration only, not a proof. The k = {k} profile for n = {n} ends at r ≈ {rb:.6} \
         and was lowered by t = {t:.6e}; it meets the candidate ({prov}) {kind}, \
         r* = {rs:.6e}, slope mismatch {gm:.3e}.",
        k = n - 1,
        rb = blow.radius_estimate,
        t = -rep.shift,
        prov = candidate.provenance.as_str(),
        rs = rep.touch_radius,
        gm = rep.gradient_mismatch,
    );
    if rep.tangential(1e-6) {
        text.push_str(
            " The contact is tangential. A candidate solving the same equation with \
             curvatures in the admissible cone would coincide with the profile near \
             the contact, which cannot happen for an entire graph.",
        );
    } else {
        text.push_str(" The contact is not an interior tangency; nothing follows from it.");
    }
    text.push_str(if rep.lower_curvatures_nonnegative {
        " Candidate curvatures are nonnegative at the samples (checked on samples only)."
    } else {
        " Candidate curvatures are negative somewhere on the samples."
    });
    rep.narrative = Some(text);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rosgeom::Provenance;

    fn grid(end: f64, m: usize) -> Vec<f64> {
        (0..=m).map(|i| end * i as f64 / m as f64).collect()
    }

    fn paraboloid(n: usize, k: usize, c: f64, radii: &[f64]) -> ProfileCurve {
        ProfileCurve::from_fn(n, k, radii, Provenance::Candidate, |r| (c * r * r, 2.0 * c * r, 2.0 * c))
            .unwrap()
    }

    #[test]
    fn self_touch_is_zero() {
        let c = ProfileCurve::explicit_q1(&grid(0.9, 300)).unwrap();
        let rep = first_touch(&c, &c).unwrap();
        assert_eq!(rep.shift, 0.0);
        assert!(rep.gap.iter().all(|&g| g == 0.0));
        assert_eq!(rep.gradient_mismatch, 0.0);
    }

    #[test]
    fn explicit_over_parabola_touches_on_axis() {
        let up = ProfileCurve::explicit_q1(&grid(0.95, 400)).unwrap();
        let low = paraboloid(2, 1, 1.0, &grid(0.95, 400));
        let rep = first_touch(&up, &low).unwrap();
        assert_eq!(rep.touch_radius, 0.0);
        assert_eq!(rep.shift, 0.0);
        assert!(rep.gradient_mismatch < 1e-9);
        assert!(!rep.at_boundary);
        assert!(rep.unimodal);
        assert!(rep.min_gap() >= -GAP_TOL);
    }

    #[test]
    fn interior_touch_is_refined() {
        // u = -ln(1 - r²) against 3 r²: slopes meet where 2r/(1-r²) = 6r
        let up = ProfileCurve::explicit_q1(&grid(0.95, 97)).unwrap();
        let low = paraboloid(2, 1, 3.0, &grid(0.95, 53));
        let rep = first_touch(&up, &low).unwrap();
        let r_exact = (2.0f64 / 3.0).sqrt();
        assert!((rep.touch_radius - r_exact).abs() < 1e-6, "{}", rep.touch_radius);
        assert!(rep.gradient_mismatch < 1e-6);
        assert!(!rep.at_boundary);
        assert!(rep.unimodal);
        assert!(rep.min_gap() >= -GAP_TOL);
    }

    #[test]
    fn shift_invariant_under_common_constant() {
        let radii = grid(0.9, 200);
        let up = ProfileCurve::explicit_q1(&radii).unwrap();
        let low = paraboloid(2, 1, 3.0, &radii);
        let lift = |c: &ProfileCurve| {
            let mut c = c.clone();
            c.samples.iter_mut().for_each(|s| s.u += 2.5);
            c
        };
        let a = first_touch(&up, &low).unwrap();
        let b = first_touch(&lift(&up), &lift(&low)).unwrap();
        assert!((a.shift - b.shift).abs() < 1e-12);
        assert!((a.touch_radius - b.touch_radius).abs() < 1e-12);
    }

    #[test]
    fn disjoint_ranges_rejected() {
        let a = paraboloid(2, 1, 1.0, &[0.0, 0.1]);
        let b = paraboloid(2, 1, 1.0, &[0.2, 0.3]);
        assert!(matches!(first_touch(&a, &b), Err(Error::NoOverlap)));
    }

    #[test]
    fn small_candidate_rejected() {
        let c = paraboloid(3, 0, 1.0, &grid(0.3, 10));
        assert!(nonexistence_demo(3, &c).is_err());
    }

    #[test]
    fn unimodality_detector() {
        assert!(is_unimodal(&[0.0, 1.0, 2.0, 1.0, 0.0]));
        assert!(is_unimodal(&[0.0, 0.0, 0.0]));
        assert!(!is_unimodal(&[0.0, 1.0, 0.0, 1.0]));
    }
}
