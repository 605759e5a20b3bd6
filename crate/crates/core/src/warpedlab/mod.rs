//! Warped products `M̄ ×_F Ñ` with a one-dimensional base: warping families,
//! closed-form curvature assembly, and the block formulas for `Q(g,R)`,
//! `Q(S,R)`, `V` and `P`.

mod assemble;
mod blocks;
mod warping;

pub use assemble::{
    vv1_residual, warped_field, warped_metric, warped_snapshot, WarpedPoint, WarpedSpec,
};
pub use blocks::{reassemble_six, reassemble_v, vrs_rhs, warped_blocks, WarpedBlocks};
pub use warping::{
    b8_check, b9_residual, b9_residual_of, warp_scalars, warping_jet, Amplitude, Branch,
    WarpJetFn, WarpScalars, WarpingFunction, WarpingJet,
};

use crate::chartgeo::ChartError;
use crate::tensorkit::TensorError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WarpError {
    #[error("invalid warping parameters: {0}")]
    InvalidParameters(&'static str),
    #[error("warping function is not positive at x1 = {x1} (F = {value})")]
    NonPositive { x1: f64, value: f64 },
    #[error("dimension {dim} is below the minimum {min}")]
    DimensionTooSmall { dim: usize, min: usize },
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}
