//! Geometry of a general graph `x_{n+1} = u(x)` at one point.
//!
//! This module does not assume rotational symmetry. It is used as an
//! independent check on the closed forms in [`crate::rosgeom`].

use nalgebra::{DMatrix, DVector};

use crate::symfunc::{self, CurvatureVector};
use crate::{Error, Result};

/// Componentwise symmetry tolerance for Hessians.
pub const SYMMETRY_TOL: f64 = 1e-14;

/// Largest `n` for which the Kronecker-delta contraction is evaluated.
pub const DELTA_MAX_N: usize = 8;

/// Gradient and Hessian of `u` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphJet {
    grad: DVector<f64>,
    hess: DMatrix<f64>,
}

impl GraphJet {
    pub fn new(grad: DVector<f64>, hess: DMatrix<f64>) -> Result<Self> {
        let n = grad.len();
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        if hess.nrows() != n || hess.ncols() != n {
            return Err(Error::InvalidJet("Hessian shape does not match gradient"));
        }
        if grad.iter().chain(hess.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("graph jet"));
        }
        for i in 0..n {
            for j in i + 1..n {
                let diff = (hess[(i, j)] - hess[(j, i)]).abs();
                if diff > SYMMETRY_TOL {
                    return Err(Error::NotSymmetric { i, j, diff });
                }
            }
        }
        Ok(Self { grad, hess })
    }

    /// Jet of the radial function `u(|x|)` at `x = r·dir`.
    ///
    /// `dir` is normalised here. At `r = 0` the slope must vanish and the
    /// Hessian is `ddu·I`.
    pub fn radial(r: f64, du: f64, ddu: f64, dir: &[f64]) -> Result<Self> {
        let n = dir.len();
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        if r < 0.0 {
            return Err(Error::InvalidJet("negative radius"));
        }
        if r == 0.0 {
            if du != 0.0 {
                return Err(Error::InvalidJet("non-zero slope on the axis"));
            }
            return Self::new(DVector::zeros(n), DMatrix::identity(n, n) * ddu);
        }
        let e = DVector::from_column_slice(dir);
        let norm = e.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidJet("zero direction"));
        }
        let e = e / norm;
        let tangential = du / r;
        let mut hess = DMatrix::identity(n, n) * tangential;
        for i in 0..n {
            for j in i..n {
                let v = hess[(i, j)] + (ddu - tangential) * e[i] * e[j];
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
        }
        Self::new(e * du, hess)
    }

    pub fn n(&self) -> usize {
        self.grad.len()
    }

    pub fn grad(&self) -> &DVector<f64> {
        &self.grad
    }

    pub fn hess(&self) -> &DMatrix<f64> {
        &self.hess
    }

    /// `sqrt(1 + |Du|^2)`.
    pub fn w(&self) -> f64 {
        (1.0 + self.grad.norm_squared()).sqrt()
    }
}

/// Mixed Weingarten coefficients; entry `(l, i)` is `h^l_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeingartenMatrix(pub DMatrix<f64>);

impl WeingartenMatrix {
    pub fn n(&self) -> usize {
        self.0.nrows()
    }
}

/// `h^l_i = D_{li}u / W - D_l u D_k u D_{ki}u / W^3`, upward normal.
pub fn weingarten(jet: &GraphJet) -> WeingartenMatrix {
    let w = jet.w();
    let p = &jet.grad;
    let hp = &jet.hess * p; // (D^2 u Du)_i, Hessian is symmetric
    let mut h = &jet.hess / w;
    let w3 = w * w * w;
    for l in 0..jet.n() {
        for i in 0..jet.n() {
            h[(l, i)] -= p[l] * hp[i] / w3;
        }
    }
    WeingartenMatrix(h)
}

/// Eigenvalues of the Weingarten map via the symmetric similar matrix
/// `g^{-1/2} D²u g^{-1/2} / W`, sorted ascending.
pub fn principal_curvatures(jet: &GraphJet) -> Result<CurvatureVector> {
    let n = jet.n();
    let w = jet.w();
    let p = &jet.grad;
    let half = DMatrix::identity(n, n) - (p * p.transpose()) / (w * (1.0 + w));
    let sym = &half * &jet.hess * &half / w;
    let sym = (&sym + sym.transpose()) * 0.5;
    let eig = sym.try_symmetric_eigen(f64::EPSILON, 10_000).ok_or(Error::Eigen)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    CurvatureVector::new(values)
}

/// `S_l` of the Weingarten map, eigenvalue route.
pub fn graph_s_l(jet: &GraphJet, l: usize) -> Result<f64> {
    symfunc::elementary_symmetric(&principal_curvatures(jet)?, l)
}

/// `S_l` by the generalized Kronecker delta contraction
/// `(1/l!) δ^{j_1..j_l}_{i_1..i_l} h^{j_1}_{i_1} ... h^{j_l}_{i_l}`.
///
/// Every ordering of a fixed set of lower indices contributes the same
/// amount, so the sum runs over increasing lower tuples and the `l!`
/// orderings cancel the prefactor. Restricted to `n <= 8`.
pub fn graph_s_l_delta(h: &WeingartenMatrix, l: usize) -> Result<f64> {
    let n = h.n();
    if n > DELTA_MAX_N {
        return Err(Error::OutOfRange {
            what: "dimension for delta contraction",
            index: n,
            max: DELTA_MAX_N,
        });
    }
    if l > n {
        return Err(Error::OutOfRange {
            what: "symmetric polynomial degree",
            index: l,
            max: n,
        });
    }
    if l == 0 {
        return Ok(1.0);
    }
    let perms = signed_permutations(l);
    let mut total = 0.0;
    for lower in combinations(n, l) {
        for (sign, perm) in &perms {
            let prod: f64 = perm
                .iter()
                .zip(&lower)
                .map(|(&pj, &i)| h.0[(lower[pj], i)])
                .product();
            total += sign * prod;
        }
    }
    Ok(total)
}

/// `Q_k(Du, D²u) - 1/sqrt(1 + |Du|^2)`.
pub fn graph_residual(jet: &GraphJet, k: usize) -> Result<f64> {
    let q = symfunc::q_ratio(&principal_curvatures(jet)?, k)?;
    Ok(q - 1.0 / jet.w())
}

/// Increasing `l`-tuples from `0..n`.
pub(crate) fn combinations(n: usize, l: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, l: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, l, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, l, &mut Vec::with_capacity(l), &mut out);
    out
}

/// All permutations of `0..l` paired with their sign.
pub(crate) fn signed_permutations(l: usize) -> Vec<(f64, Vec<usize>)> {
    fn rec(depth: usize, p: &mut Vec<usize>, sign: f64, out: &mut Vec<(f64, Vec<usize>)>) {
        if depth == p.len() {
            out.push((sign, p.clone()));
            return;
        }
        for i in depth..p.len() {
            p.swap(depth, i);
            rec(depth + 1, p, if i == depth { sign } else { -sign }, out);
            p.swap(depth, i);
        }
    }
    let mut out = Vec::new();
    rec(0, &mut (0..l).collect(), 1.0, &mut out);
    out
}
