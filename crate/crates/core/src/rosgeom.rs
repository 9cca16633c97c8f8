//! Closed-form geometry of rotationally symmetric graphs
//! `{(rθ, u(r)) : θ ∈ S^{n-1}}`.
//!
//! A [`ProfileJet`] carries `(r, u, u̇, ü)` at one radius together with the
//! dimension `n` and the flow index `k`; a [`ProfileCurve`] is an ordered
//! list of jets produced by one of the solvers in this crate.

use serde::Serialize;

use crate::report::ResidualReport;
use crate::shoot::SlopeField;
use crate::symfunc::{self, CurvatureVector};
use crate::{Error, Result};

/// Radial jet of a rotational graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileJet {
    pub r: f64,
    pub u: f64,
    pub du: f64,
    pub ddu: f64,
    pub n: usize,
    pub k: usize,
}

impl ProfileJet {
    pub fn new(n: usize, k: usize, r: f64, u: f64, du: f64, ddu: f64) -> Result<Self> {
        check_nk(n, k)?;
        if !(r >= 0.0) {
            return Err(Error::InvalidJet("radius must be >= 0"));
        }
        if ![r, u, du, ddu].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("profile jet"));
        }
        Ok(Self { r, u, du, ddu, n, k })
    }
}

pub(crate) fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    if k >= n {
        return Err(Error::OutOfRange {
            what: "flow index k",
            index: k,
            max: n - 1,
        });
    }
    Ok(())
}

/// Which construction produced a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Shooting,
    Picard,
    Explicit,
    Barrier,
    /// A comparison surface supplied by the caller, not a translator.
    Candidate,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Shooting => "shooting",
            Provenance::Picard => "picard",
            Provenance::Explicit => "explicit",
            Provenance::Barrier => "barrier",
            Provenance::Candidate => "candidate",
        }
    }
}

/// A sampled radial profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileCurve {
    pub n: usize,
    pub k: usize,
    pub samples: Vec<ProfileJet>,
    pub blow_up_radius: Option<f64>,
    pub provenance: Provenance,
}

impl ProfileCurve {
    pub fn new(
        n: usize,
        k: usize,
        samples: Vec<ProfileJet>,
        blow_up_radius: Option<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        check_nk(n, k)?;
        if samples.is_empty() {
            return Err(Error::Curve("no samples".into()));
        }
        if provenance == Provenance::Explicit && (n, k) != (2, 1) {
            return Err(Error::Curve("explicit profile exists only for n = 2, k = 1".into()));
        }
        if samples.iter().any(|s| s.n != n || s.k != k) {
            return Err(Error::Curve("sample (n, k) differs from curve".into()));
        }
        if samples[0].r < 0.0 {
            return Err(Error::Curve("negative first radius".into()));
        }
        if let Some(w) = samples.windows(2).find(|w| !(w[1].r > w[0].r)) {
            return Err(Error::Curve(format!(
                "radii not strictly increasing at r = {:e}",
                w[1].r
            )));
        }
        Ok(Self {
            n,
            k,
            samples,
            blow_up_radius,
            provenance,
        })
    }

    /// Builds a curve from a closed-form `r -> (u, u̇, ü)`.
    pub fn from_fn<F>(
        n: usize,
        k: usize,
        radii: &[f64],
        provenance: Provenance,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> (f64, f64, f64),
    {
        let samples = radii
            .iter()
            .map(|&r| {
                let (u, du, ddu) = f(r);
                ProfileJet::new(n, k, r, u, du, ddu)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, k, samples, None, provenance)
    }

    /// The `n = 2`, `k = 1` translator `u = -ln(1 - r^2)` on `radii ⊂ [0, 1)`.
    pub fn explicit_q1(radii: &[f64]) -> Result<Self> {
        if radii.iter().any(|&r| !(0.0..1.0).contains(&r)) {
            return Err(Error::Curve("explicit profile needs radii in [0, 1)".into()));
        }
        let mut c = Self::from_fn(2, 1, radii, Provenance::Explicit, explicit_q1_jet)?;
        c.blow_up_radius = Some(1.0);
        Ok(c)
    }

    pub fn radii(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.r).collect()
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.du).collect()
    }

    pub fn heights(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.u).collect()
    }

    pub fn r_min(&self) -> f64 {
        self.samples[0].r
    }

    pub fn r_max(&self) -> f64 {
        self.samples[self.samples.len() - 1].r
    }

    /// `(u, u̇)` at `r` by cubic Hermite interpolation of `(u, u̇)` and
    /// `(u̇, ü)` on the bracketing interval. `None` outside the sampled range.
    pub fn eval(&self, r: f64) -> Option<(f64, f64)> {
        if !(r >= self.r_min() && r <= self.r_max()) {
            return None;
        }
        let s = &self.samples;
        if s.len() == 1 {
            return Some((s[0].u, s[0].du));
        }
        let i = s.partition_point(|j| j.r <= r).clamp(1, s.len() - 1);
        let (a, b) = (&s[i - 1], &s[i]);
        let h = b.r - a.r;
        let t = (r - a.r) / h;
        Some((
            hermite(t, h, a.u, a.du, b.u, b.du),
            hermite(t, h, a.du, a.ddu, b.du, b.ddu),
        ))
    }

    /// Interpolated jet at `r`; `ü` is the derivative of the slope interpolant.
    pub fn jet_at(&self, r: f64) -> Option<ProfileJet> {
        let (u, du) = self.eval(r)?;
        let s = &self.samples;
        let ddu = if s.len() == 1 {
            s[0].ddu
        } else {
            let i = s.partition_point(|j| j.r <= r).clamp(1, s.len() - 1);
            let (a, b) = (&s[i - 1], &s[i]);
            let h = b.r - a.r;
            hermite_slope(h, (r - a.r) / h, a.du, a.ddu, b.du, b.ddu)
        };
        ProfileJet::new(self.n, self.k, r, u, du, ddu).ok()
    }

    /// Samples with `r <= r_cut`.
    pub fn truncated(&self, r_cut: f64) -> Result<Self> {
        let samples: Vec<_> = self.samples.iter().copied().filter(|s| s.r <= r_cut).collect();
        Self::new(self.n, self.k, samples, self.blow_up_radius, self.provenance)
    }
}

fn hermite_slope(h: f64, t: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let t2 = t * t;
    ((6.0 * t2 - 6.0 * t) * y0 + (-6.0 * t2 + 6.0 * t) * y1) / h
        + (3.0 * t2 - 4.0 * t + 1.0) * d0
        + (3.0 * t2 - 2.0 * t) * d1
}

/// Closed-form jet of `u = -ln(1 - r^2)`.
pub fn explicit_q1_jet(r: f64) -> (f64, f64, f64) {
    let d = 1.0 - r * r;
    (-(d.ln()), 2.0 * r / d, 2.0 * (1.0 + r * r) / (d * d))
}

fn hermite(t: f64, h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `<ν, e_{n+1}> = 1/sqrt(1 + u̇^2)`.
pub fn normal_vertical(jet: &ProfileJet) -> f64 {
    1.0 / jet.du.hypot(1.0)
}

/// `n - 1` rotational curvatures `u̇/(r W)` followed by the radial one
/// `ü/W^3`. On the axis (`r = 0`, `u̇ = 0`) all `n` equal `ü(0)`.
pub fn principal_curvatures(jet: &ProfileJet) -> Result<CurvatureVector> {
    let w = jet.du.hypot(1.0);
    let radial = jet.ddu / (w * w * w);
    let rotational = if jet.r == 0.0 {
        if jet.du != 0.0 {
            return Err(Error::InvalidJet("cone point: r = 0 with non-zero slope"));
        }
        jet.ddu
    } else {
        jet.du / (jet.r * w)
    };
    let mut v = vec![rotational; jet.n - 1];
    v.push(radial);
    CurvatureVector::new(v)
}

fn phi(x: f64) -> f64 {
    x / x.hypot(1.0)
}

fn dphi(x: f64) -> f64 {
    (1.0 + x * x).powf(-1.5)
}

/// `S_l` from the divergence form
/// `C(n-1,l-1) / (l r^{n-1}) · d/dr (r^{n-l} φ(u̇)^l)` with the derivative
/// expanded analytically.
pub fn s_l_profile(jet: &ProfileJet, l: usize) -> Result<f64> {
    let n = jet.n;
    if l == 0 || l > n {
        return Err(Error::OutOfRange {
            what: "symmetric polynomial degree",
            index: l,
            max: n,
        });
    }
    if !(jet.r > 0.0) {
        return Err(Error::InvalidJet("divergence form needs r > 0"));
    }
    let r = jet.r;
    let p = phi(jet.du);
    let lf = l as f64;
    // r^{n-l-1} φ^l (n - l) + l r^{n-l} φ^{l-1} φ' ü, divided by r^{n-1}
    let deriv_over = (n - l) as f64 * p.powi(l as i32) / r.powi(l as i32)
        + lf * p.powi(l as i32 - 1) * dphi(jet.du) * jet.ddu / r.powi(l as i32 - 1);
    Ok(binomial(n - 1, l - 1) / lf * deriv_over)
}

/// Closed form of `Q_k` for a rotational graph, `r > 0`.
pub fn q_k_profile(jet: &ProfileJet) -> Result<f64> {
    if !(jet.r > 0.0) {
        return Err(Error::InvalidJet("closed-form Q_k needs r > 0"));
    }
    let (n, k) = (jet.n as f64, jet.k as f64);
    let (r, du, ddu) = (jet.r, jet.du, jet.ddu);
    let w2 = 1.0 + du * du;
    let w = w2.sqrt();
    if jet.k == 0 {
        // common factor u̇ cancelled
        return Ok((n - 1.0) * du / (r * w) + ddu / (w2 * w));
    }
    let den = (n - k) * w2 * du + k * r * ddu;
    if den == 0.0 {
        return Err(Error::ZeroDenominator {
            k: jet.k,
            value: den,
        });
    }
    let num = (n - k - 1.0) * w2 * du * du + (k + 1.0) * r * ddu * du;
    Ok((n - k) / ((k + 1.0) * r * w) * num / den)
}

/// `ü - F_k(r, u̇)`; zero iff the jet solves the rotational translator ODE.
pub fn translator_residual(jet: &ProfileJet) -> Result<f64> {
    if !(jet.r > 0.0) {
        return Err(Error::InvalidJet("translator ODE needs r > 0"));
    }
    let field = SlopeField::new(jet.n, jet.k)?;
    Ok(jet.ddu - field.slope(jet.r, jet.du)?)
}

/// `translator_residual` at every sample with `r > 0`.
pub fn translator_residuals(curve: &ProfileCurve) -> Result<ResidualReport> {
    let mut radii = Vec::new();
    let mut res = Vec::new();
    for s in curve.samples.iter().filter(|s| s.r > 0.0) {
        radii.push(s.r);
        res.push(translator_residual(s)?);
    }
    Ok(ResidualReport::new(
        format!("translator residual ({})", curve.provenance.as_str()),
        radii,
        res,
    ))
}

/// `Q_k(λ) - <ν, e_{n+1}>` using the symmetric-function route; defined on
/// the axis as well.
pub fn equation_residual(jet: &ProfileJet) -> Result<f64> {
    let q = symfunc::q_ratio(&principal_curvatures(jet)?, jet.k)?;
    Ok(q - normal_vertical(jet))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn explicit(r: f64) -> ProfileJet {
        let (u, du, ddu) = explicit_q1_jet(r);
        ProfileJet::new(2, 1, r, u, du, ddu).unwrap()
    }

    #[test]
    fn normal_examples() {
        let mut j = explicit(0.0);
        assert_eq!(normal_vertical(&j), 1.0);
        j.du = 4.0 / 3.0;
        assert_relative_eq!(normal_vertical(&j), 0.6, max_relative = 1e-15);
        let mut last = 1.0;
        for e in 0..12 {
            j.du = 10f64.powi(e);
            let v = normal_vertical(&j);
            assert!(v < last);
            last = v;
        }
        assert!(last < 1e-10);
    }

    #[test]
    fn explicit_curvatures() {
        let j = explicit(0.5);
        assert_relative_eq!(j.du, 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(j.ddu, 40.0 / 9.0, max_relative = 1e-15);
        let l = principal_curvatures(&j).unwrap();
        assert_relative_eq!(l[0], 1.6, max_relative = 1e-15);
        assert_relative_eq!(l[1], 0.96, max_relative = 1e-15);
        let axis = principal_curvatures(&explicit(0.0)).unwrap();
        assert_eq!(axis.into_vec(), vec![2.0, 2.0]);
        let flat = ProfileJet::new(3, 1, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(principal_curvatures(&flat).unwrap().into_vec(), vec![0.0; 3]);
        let cone = ProfileJet::new(3, 1, 0.0, 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(principal_curvatures(&cone), Err(Error::InvalidJet(_))));
    }

    #[test]
    fn s_l_examples() {
        let j = explicit(0.5);
        assert_relative_eq!(s_l_profile(&j, 2).unwrap(), 192.0 / 125.0, max_relative = 1e-14);
        let flat = ProfileJet::new(2, 1, 0.7, 0.0, 0.0, 1.25).unwrap();
        assert_relative_eq!(s_l_profile(&flat, 1).unwrap(), 1.25, max_relative = 1e-15);
        assert!(s_l_profile(&explicit(0.0), 1).is_err());
        assert!(s_l_profile(&j, 0).is_err());
    }

    #[test]
    fn q_profile_examples() {
        let j = explicit(0.5);
        assert_relative_eq!(q_k_profile(&j).unwrap(), 0.6, max_relative = 1e-14);
        assert_relative_eq!(q_k_profile(&j).unwrap(), normal_vertical(&j), max_relative = 1e-14);
        let j0 = ProfileJet::new(4, 0, 0.3, 0.0, 0.2, 0.9).unwrap();
        let q = symfunc::q_ratio(&principal_curvatures(&j0).unwrap(), 0).unwrap();
        assert_relative_eq!(q_k_profile(&j0).unwrap(), q, max_relative = 1e-14);
        let bad = ProfileJet::new(3, 2, 0.5, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(q_k_profile(&bad), Err(Error::ZeroDenominator { .. })));
    }

    #[test]
    fn residual_examples() {
        for i in 1..=99 {
            let r = i as f64 / 100.0;
            assert!(translator_residual(&explicit(r)).unwrap().abs() < 1e-10 * explicit(r).ddu.max(1.0));
        }
        // u̇ = n r with k = n - 1: F = n(1 + n^2 r^2)
        for n in 2..7 {
            let r = 0.05;
            let nf = n as f64;
            let j = ProfileJet::new(n, n - 1, r, 0.0, nf * r, 7.0).unwrap();
            assert_relative_eq!(
                translator_residual(&j).unwrap(),
                7.0 - nf * (1.0 + nf * nf * r * r),
                max_relative = 1e-13
            );
        }
        let j = ProfileJet::new(4, 2, 0.3, 0.0, 0.0, 0.25).unwrap();
        assert_eq!(translator_residual(&j).unwrap(), 0.25);
        let j = ProfileJet::new(4, 0, 0.3, 0.0, 0.0, 0.25).unwrap();
        assert_relative_eq!(translator_residual(&j).unwrap(), 0.25 - 1.0, max_relative = 1e-15);
    }

    #[test]
    fn curve_validation() {
        let j = |r| ProfileJet::new(3, 2, r, 0.0, 0.0, 0.0).unwrap();
        assert!(ProfileCurve::new(3, 2, vec![j(0.0), j(0.0)], None, Provenance::Shooting).is_err());
        assert!(ProfileCurve::new(3, 2, vec![j(0.0), j(0.1)], None, Provenance::Explicit).is_err());
        assert!(ProfileCurve::new(3, 1, vec![j(0.0)], None, Provenance::Shooting).is_err());
        assert!(ProfileCurve::explicit_q1(&[0.0, 1.0]).is_err());
        assert!(ProfileCurve::explicit_q1(&[0.0, 0.5]).is_ok());
    }

    #[test]
    fn hermite_eval_reproduces_cubics() {
        // u = r^3 is reproduced exactly by the (u, u') interpolant
        let radii: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let c = ProfileCurve::from_fn(2, 0, &radii, Provenance::Candidate, |r| {
            (r * r * r, 3.0 * r * r, 6.0 * r)
        })
        .unwrap();
        for &r in &[0.0, 0.05, 0.333, 0.999, 1.0] {
            let (u, du) = c.eval(r).unwrap();
            assert_relative_eq!(u, r * r * r, epsilon = 1e-15);
            assert_relative_eq!(du, 3.0 * r * r, epsilon = 1e-15);
        }
        assert!(c.eval(1.01).is_none());
        assert!(c.eval(-0.01).is_none());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(5, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
