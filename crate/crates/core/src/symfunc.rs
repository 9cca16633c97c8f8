//! Elementary symmetric polynomials of principal curvatures and the
//! curvature quotient `Q_k = S_{k+1} / S_k`.
//!
//! All functions here act on a [`CurvatureVector`], i.e. on the diagonal of
//! the Weingarten operator in a principal frame. Non-diagonal Weingarten
//! matrices are handled in [`crate::graphgeom`].

use serde::Serialize;

use crate::{Error, Result};

/// `|S_k|` below this is treated as zero by [`q_ratio`].
pub const ZERO_GUARD: f64 = 1e-300;

/// Principal curvatures `(λ_1, ..., λ_n)`, `n >= 2`, all finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureVector(Vec<f64>);

impl CurvatureVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::Dimension(entries.len()));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("curvature entry"));
        }
        Ok(Self(entries))
    }

    /// All `n` entries equal to `c`.
    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|x| t * x).collect())
    }
}

impl std::ops::Index<usize> for CurvatureVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Coefficients of `∏ (1 + λ_i t)`: returns `[S_0, S_1, ..., S_m]` for the
/// `m = values.len()` inputs.
///
/// This is the product-accumulation recurrence; it never enumerates subsets.
pub fn symmetric_values(values: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; values.len() + 1];
    s[0] = 1.0;
    for (i, &x) in values.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            s[j] += x * s[j - 1];
        }
    }
    s
}

/// `S_l(λ)` for `0 <= l <= n`.
pub fn elementary_symmetric(lambda: &CurvatureVector, l: usize) -> Result<f64> {
    let n = lambda.n();
    if l > n {
        return Err(Error::OutOfRange {
            what: "symmetric polynomial degree",
            index: l,
            max: n,
        });
    }
    Ok(symmetric_values(lambda.as_slice())[l])
}

/// `S_0(λ), ..., S_n(λ)`.
pub fn elementary_symmetric_all(lambda: &CurvatureVector) -> Vec<f64> {
    symmetric_values(lambda.as_slice())
}

/// `S_0 .. S_{n-1}` of `λ` with entry `i` removed.
fn symmetric_without(lambda: &CurvatureVector, i: usize) -> Vec<f64> {
    let rest: Vec<f64> = lambda
        .as_slice()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &x)| x)
        .collect();
    symmetric_values(&rest)
}

fn check_k(lambda: &CurvatureVector, k: usize) -> Result<()> {
    if k + 1 > lambda.n() {
        return Err(Error::OutOfRange {
            what: "flow index k",
            index: k,
            max: lambda.n() - 1,
        });
    }
    Ok(())
}

/// `Q_k(λ) = S_{k+1}(λ) / S_k(λ)` for `0 <= k <= n-1`.
pub fn q_ratio(lambda: &CurvatureVector, k: usize) -> Result<f64> {
    check_k(lambda, k)?;
    let s = elementary_symmetric_all(lambda);
    if s[k].abs() < ZERO_GUARD {
        return Err(Error::ZeroDenominator { k, value: s[k] });
    }
    Ok(s[k + 1] / s[k])
}

/// Membership of `λ` in the Garding cone `Γ_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeReport {
    /// The queried cone order `m`.
    pub order: usize,
    /// `S_l > 0` for every `l <= order`.
    pub member: bool,
    /// Largest `k` with `λ ∈ Γ_{k+1}`; `None` when `S_1 <= 0`.
    pub k_max: Option<usize>,
    /// `S_0, ..., S_n`.
    pub values: Vec<f64>,
}

/// Reports whether `S_l(λ) > 0` for `l = 0..=m` (strict, no tolerance).
pub fn in_cone(lambda: &CurvatureVector, m: usize) -> Result<ConeReport> {
    let n = lambda.n();
    if m == 0 || m > n {
        return Err(Error::OutOfRange {
            what: "cone order",
            index: m,
            max: n,
        });
    }
    let values = elementary_symmetric_all(lambda);
    let positive_prefix = values.iter().take_while(|&&s| s > 0.0).count() - 1;
    Ok(ConeReport {
        order: m,
        member: positive_prefix >= m,
        k_max: positive_prefix.checked_sub(1),
        values,
    })
}

fn require_cone(lambda: &CurvatureVector, order: usize) -> Result<Vec<f64>> {
    let s = elementary_symmetric_all(lambda);
    if let Some(l) = (0..=order).find(|&l| s[l] <= 0.0) {
        return Err(Error::ConeViolation {
            order,
            failed_at: l,
            value: s[l],
        });
    }
    Ok(s)
}

/// `∂Q_k / ∂λ_i` for `λ ∈ Γ_{k+1}`, using `∂S_l/∂λ_i = S_{l-1}(λ | i)`.
pub fn q_gradient(lambda: &CurvatureVector, k: usize) -> Result<CurvatureVector> {
    check_k(lambda, k)?;
    let s = require_cone(lambda, k + 1)?;
    let (sk, sk1) = (s[k], s[k + 1]);
    let grad = (0..lambda.n())
        .map(|i| {
            let rest = symmetric_without(lambda, i);
            let d_sk1 = rest[k];
            let d_sk = if k == 0 { 0.0 } else { rest[k - 1] };
            (d_sk1 * sk - sk1 * d_sk) / (sk * sk)
        })
        .collect();
    CurvatureVector::new(grad)
}

/// Diagonal of the Newton transformation `T_k(W)` at `W = diag(λ)`.
///
/// Uses `T_0 = I`, `T_j = S_j I - W T_{j-1}`; entry `i` equals `S_k(λ | i)`.
pub fn newton_transform_diag(lambda: &CurvatureVector, k: usize) -> Result<CurvatureVector> {
    check_k(lambda, k)?;
    let s = elementary_symmetric_all(lambda);
    let mut t = vec![1.0; lambda.n()];
    for sj in s.iter().take(k + 1).skip(1) {
        for (ti, &li) in t.iter_mut().zip(lambda.as_slice()) {
            *ti = sj - li * *ti;
        }
    }
    CurvatureVector::new(t)
}
