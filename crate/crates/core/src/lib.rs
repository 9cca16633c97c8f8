//! Numerics for rotationally symmetric `Q_k`-translating graphs in
//! `R^{n+1}`, where `Q_k = S_{k+1}/S_k` is the quotient of elementary
//! symmetric polynomials of the principal curvatures.
//!
//! * [`symfunc`]: `S_l`, `Q_k`, Garding cones, gradients, Newton transforms.
//! * [`graphgeom`]: Weingarten map and curvatures of a general graph jet.
//! * [`rosgeom`]: closed forms for rotational graphs; profile curves.
//! * [`shoot`]: adaptive integration of the profile ODE with blow-up detection.
//! * [`picard`]: fixed-point iteration of the integral form of the ODE.
//! * [`barriers`]: sub- and super-solutions checked on grids.
//! * [`tangency`]: first-touch comparison of two profiles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
mod rk;

pub mod barriers;
pub mod graphgeom;
pub mod picard;
pub mod report;
pub mod rosgeom;
pub mod shoot;
pub mod symfunc;
pub mod tangency;

pub use error::{Error, Result};
pub use report::{Check, ResidualReport};
pub use rosgeom::{ProfileCurve, ProfileJet, Provenance};
pub use shoot::{BlowUpReport, IntegrationConfig, SlopeField};
pub use symfunc::CurvatureVector;
