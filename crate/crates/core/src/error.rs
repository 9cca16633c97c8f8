use thiserror::Error;

use crate::picard::IterationTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension n = {0} is not supported (need n >= 2)")]
    Dimension(usize),

    #[error("index {index} out of range 0..={max} for {what}")]
    OutOfRange {
        what: &'static str,
        index: usize,
        max: usize,
    },

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("division by S_{k} = {value:e}")]
    ZeroDenominator { k: usize, value: f64 },

    #[error("curvature vector is outside the cone Gamma_{order} (S_{failed_at} = {value:e})")]
    ConeViolation {
        order: usize,
        failed_at: usize,
        value: f64,
    },

    #[error("singular slope denominator at r = {r:e}, s = {s:e}")]
    SingularSlope { r: f64, s: f64 },

    #[error("invalid jet: {0}")]
    InvalidJet(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("matrix is not symmetric: |H[{i}][{j}] - H[{j}][{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },

    #[error("eigenvalue computation did not converge")]
    Eigen,

    #[error("integration failed at r = {r:e}: {reason}")]
    Integration { r: f64, reason: &'static str },

    #[error(
        "value {value:e} at node {node} (r = {r:e}) leaves the window [{lower:e}, {upper:e}]"
    )]
    OutsideWindow {
        node: usize,
        r: f64,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("fixed-point iteration failed after {} iterations: {source}", trace.sup_diffs.len())]
    Picard {
        source: Box<Error>,
        trace: Box<IterationTrace>,
    },

    #[error("fixed-point iteration did not converge in {} iterations (last sup-diff {:e})", trace.sup_diffs.len(), trace.sup_diffs.last().copied().unwrap_or(f64::NAN))]
    NotConverged { trace: Box<IterationTrace> },

    #[error("curves do not overlap")]
    NoOverlap,

    #[error("invalid curve: {0}")]
    Curve(String),
}
