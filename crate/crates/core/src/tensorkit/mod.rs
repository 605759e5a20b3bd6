//! Dense multilinear algebra in a fixed chart basis.

mod algebra;
mod fit;
mod metric;
pub mod random;
mod tensor;

pub use algebra::{
    curvature_action, g_tensor, kulkarni_nomizu, metric_product, mixed, operator_compose,
    raise_first, ricci_contraction, tachibana, trace,
};
pub use fit::{gram_fit, GramFit, GRAM_RANK_CUTOFF};
pub use metric::{MetricPoint, Signature};
pub use tensor::{DenseTensor, Symmetry, SYMMETRY_TOL};


use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("chart dimension must be positive")]
    ZeroDimension,
    #[error("component array has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("shape mismatch: (dim, rank) {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("expected rank {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("{op} does not support rank {rank}")]
    UnsupportedRank { op: &'static str, rank: usize },
    #[error("{what} is not symmetric (relative deviation {deviation:e})")]
    NotSymmetric { what: &'static str, deviation: f64 },
    #[error("declared symmetry {class:?} violated (relative deviation {deviation:e})")]
    SymmetryViolation { class: Symmetry, deviation: f64 },
    #[error("metric is singular (smallest |eigenvalue| {min_eigenvalue:e})")]
    Singular { min_eigenvalue: f64 },
    #[error("g·g⁻¹ deviates from the identity by {residual:e}")]
    InverseResidual { residual: f64 },
    #[error("fit basis is empty")]
    EmptyBasis,
}
