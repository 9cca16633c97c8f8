//! Reference computations that share no code with the library.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// `S_l` by summing products over all `l`-subsets.
pub fn subset_s(lambda: &[f64], l: usize) -> f64 {
    let n = lambda.len();
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == l)
        .map(|m| {
            (0..n)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| lambda[i])
                .product::<f64>()
        })
        .sum()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    (1..=m)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=m {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite 20-point Gauss–Legendre on `[a, b]`.
pub fn quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let gl = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let (lo, hi) = (a + p as f64 * h, a + (p + 1) as f64 * h);
            let (c, s) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            s * gl.iter().map(|&(x, w)| w * f(c + s * x)).sum::<f64>()
        })
        .sum()
}

/// The `k = n - 1` profile written with `v = tan θ` as parameter, where the
/// ODE becomes linear: `(r sin^{n-1} θ)' = sin^{n-1} θ`.
pub struct ExactProfile {
    pub n: usize,
}

impl ExactProfile {
    pub fn r_of_theta(&self, theta: f64) -> f64 {
        let p = (self.n - 1) as i32;
        quad(|t| t.sin().powi(p), 0.0, theta, 8) / theta.sin().powi(p)
    }

    /// `∫_0^{π/2} sin^{n-1}`, the radius where `v` becomes infinite.
    pub fn blow_up_radius(&self) -> f64 {
        quad(|t| t.sin().powi(self.n as i32 - 1), 0.0, FRAC_PI_2, 8)
    }

    /// Newton on `r(θ) = r` using `r'(θ) = 1 - (n-1) r cot θ`, kept inside
    /// a bisection bracket.
    pub fn theta(&self, r: f64) -> f64 {
        let nm1 = (self.n - 1) as f64;
        let (mut lo, mut hi) = (0.0_f64, FRAC_PI_2);
        let mut t = (self.n as f64 * r).atan().min(0.5 * FRAC_PI_2);
        for _ in 0..200 {
            let rt = self.r_of_theta(t);
            let g = rt - r;
            if g < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let dr = 1.0 - nm1 * rt / t.tan();
            let mut next = t - g / dr;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-15 * t {
                return next;
            }
            t = next;
        }
        t
    }

    pub fn v(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        self.theta(r).tan()
    }

    /// `u = ∫ (tan θ - (n-1) r(θ)) dθ`.
    pub fn u(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        let nm1 = (self.n - 1) as f64;
        quad(|t| t.tan() - nm1 * self.r_of_theta(t), 0.0, self.theta(r), 8)
    }
}

/// Central difference of `f` in coordinate `i`.
pub fn central_diff<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], i: usize, h: f64) -> f64 {
    let mut a = x.to_vec();
    let mut b = x.to_vec();
    a[i] += h;
    b[i] -= h;
    (f(&a) - f(&b)) / (2.0 * h)
}

/// Slope of a least-squares line through `(x, y)`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let b = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    ((sy - b * sx) / m, b)
}
