//! Curvature snapshots: from metric fields through second-order jets, from
//! closed-form catalog constructions, and from raw `(g, R)` pairs.

pub mod catalog;
mod field;
mod snapshot;

pub use catalog::{
    conformal_exp, flat_field, random_metric_field, round_sphere, sphere_product, CatalogId,
};
pub use field::{
    christoffel, riemann_from_connection, snapshot_from_field, snapshot_from_field_via,
    snapshot_from_jet, AutoJetFn, ClosedJetFn, Connection, MetricField, Route, TwoJet,
};
pub use snapshot::{
    product_snapshot, space_form_on, space_form_snapshot, synthetic_snapshot, weyl_from,
    CurvatureSnapshot, InvariantReport, RIEMANN_SYMMETRY_TOL,
};

use crate::tensorkit::{Signature, TensorError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChartError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("inconsistent input: {0}")]
    Inconsistent(&'static str),
    #[error("{op} needs dimension at least {min}, got {dim}")]
    DimensionTooSmall {
        op: &'static str,
        dim: usize,
        min: usize,
    },
    #[error("signature {signature:?} does not match dimension {dim}")]
    SignatureMismatch { dim: usize, signature: Signature },
    #[error("metric is singular at {point:?}: {detail}")]
    SingularMetric { point: Vec<f64>, detail: String },
    #[error("point has {found} coordinates, the chart has {expected}")]
    PointDimension { expected: usize, found: usize },
    #[error("field has no {0:?} evaluator")]
    RouteUnavailable(Route),
    #[error("point outside the chart domain: {0}")]
    OutOfDomain(String),
    #[error("unknown catalog id `{0}`")]
    UnknownCatalogId(String),
}
