//! Numerical curvature workbench for warped products with a one-dimensional
//! base and for pointwise curvature data in general.
//!
//! Everything is evaluated on [`CurvatureSnapshot`]s, the pointwise bundle
//! `(g, R, S, κ, C, G)`. Snapshots come from metric fields via second-order
//! forward jets ([`chartgeo`]), from the closed-form warped-product formulas
//! ([`warpedlab`]), or from hypersurface data through the Gauss equation
//! ([`gaussfiber`]). [`conditionlab`] then evaluates and fits the
//! pseudosymmetry-type conditions `R·C − C·R = L·Q(S,R)` and relatives.
//!
//! The numeric core is generic over [`Scalar`] (`f32`, `f64`); the aliases at
//! the crate root fix `f64`, which every tolerance in the condition suites
//! assumes.

pub mod chartgeo;
pub mod conditionlab;
pub mod gaussfiber;
pub mod jet;
pub mod scalar;
pub mod tensorkit;
pub mod warpedlab;

pub use scalar::Scalar;
pub use tensorkit::{DenseTensor, MetricPoint, Signature, Symmetry, TensorError};

pub type Tensor = DenseTensor<f64>;
pub type Metric = MetricPoint<f64>;
pub type Snapshot = chartgeo::CurvatureSnapshot<f64>;
pub type Field = chartgeo::MetricField<f64>;
pub type Warping = warpedlab::WarpingFunction<f64>;
pub type WarpedSpec = warpedlab::WarpedSpec<f64>;
pub type Hypersurface = gaussfiber::HypersurfaceData<f64>;
pub type Fit = conditionlab::FitResult<f64>;
