//! Pseudosymmetry-type curvature conditions evaluated on a snapshot.
//!
//! Condition fits compare a left-hand `(0,6)` tensor with one or more
//! Tachibana tensors. Every "is this zero" decision is made against the
//! natural curvature scale of the snapshot (`‖R‖`, `‖g⁻¹‖·‖R‖` for `S`, ...)
//! so that round-off in an exactly vanishing tensor is not read as structure.

mod fit;
mod predicates;
mod ptensor;
mod quasi;
mod sets;
pub mod synthetic;

pub use fit::{
    evaluate, fit_all, fit_condition, roter_fit, ConditionId, FitContext, FitResult, FitStatus,
    ALL_CONDITIONS,
};
pub use predicates::{
    check_d1_d3, check_genein1, check_h1, check_sr2, theorem2_1_check, D1D3Report,
    Genein1Report, Theorem21Report,
};
pub use ptensor::{ge_residual, p_from_v, p_tensor, v_tensor};
pub use quasi::{quasi_einstein, QuasiEinsteinResult};
pub use sets::{classify_sets, SetMembership};

use std::cell::OnceCell;

use crate::chartgeo::{ChartError, CurvatureSnapshot};
use crate::scalar::Scalar;
use crate::tensorkit::{curvature_action, tachibana, DenseTensor, TensorError};
use thiserror::Error;

/// Default relative tolerance for set membership and fits.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConditionError {
    #[error("{op} needs dimension at least {min}, got {dim}")]
    DimensionTooSmall {
        op: &'static str,
        dim: usize,
        min: usize,
    },
    #[error("snapshot is not Einstein (relative Ricci deviation {deviation:e})")]
    NotEinstein { deviation: f64 },
    #[error("eigenvalue computation did not converge: {0}")]
    Undecided(String),
    #[error("unknown condition id `{0}`")]
    UnknownCondition(String),
    #[error("{0} is not a single-coefficient condition")]
    NotAFit(ConditionId),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

/// Lazily computed products of one snapshot, shared between conditions.
pub(crate) struct Products<'a, T: Scalar> {
    pub snap: &'a CurvatureSnapshot<T>,
    r_c: OnceCell<DenseTensor<T>>,
    c_r: OnceCell<DenseTensor<T>>,
    diff: OnceCell<DenseTensor<T>>,
    r_r: OnceCell<DenseTensor<T>>,
    r_s: OnceCell<DenseTensor<T>>,
    c_s: OnceCell<DenseTensor<T>>,
    q_s_r: OnceCell<DenseTensor<T>>,
    q_g_r: OnceCell<DenseTensor<T>>,
    q_g_c: OnceCell<DenseTensor<T>>,
    q_s_c: OnceCell<DenseTensor<T>>,
    q_g_s: OnceCell<DenseTensor<T>>,
    p: OnceCell<DenseTensor<T>>,
}

fn cached<T: Scalar>(
    cell: &OnceCell<DenseTensor<T>>,
    make: impl FnOnce() -> Result<DenseTensor<T>, TensorError>,
) -> Result<&DenseTensor<T>, TensorError> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let v = make()?;
    Ok(cell.get_or_init(|| v))
}

impl<'a, T: Scalar> Products<'a, T> {
    pub fn new(snap: &'a CurvatureSnapshot<T>) -> Self {
        Self {
            snap,
            r_c: OnceCell::new(),
            c_r: OnceCell::new(),
            diff: OnceCell::new(),
            r_r: OnceCell::new(),
            r_s: OnceCell::new(),
            c_s: OnceCell::new(),
            q_s_r: OnceCell::new(),
            q_g_r: OnceCell::new(),
            q_g_c: OnceCell::new(),
            q_s_c: OnceCell::new(),
            q_g_s: OnceCell::new(),
            p: OnceCell::new(),
        }
    }

    fn act(&self, b: &DenseTensor<T>, t: &DenseTensor<T>) -> Result<DenseTensor<T>, TensorError> {
        curvature_action(b, self.snap.g_inv(), t)
    }

    pub fn r_c(&self) -> Result<&DenseTensor<T>, TensorError> {
        cached(&self.r_c, || self.act(&self.snap.r, &self.snap.c))
    }

    pub fn c_r(&self) -> Result<&DenseTensor<T>, TensorError> {
        cached(&self.c_r, || self.act(&self.snap.c, &self.snap.r))
    }

    /// `R·C − C·R`
    pub fn difference(&self) -> Result<&DenseTensor<T>, TensorError> {
        cached(&self.diff, || {
            let mut d = self.r_c()?.clone();
            d.axpy(-T::one(), self.c_r()?)?;
            Ok(d)
        })
    }

    pub fn r_r(&self) -> Result<&DenseTensor<T>, TensorError> {
        cached(&self.r_r, || self.act(&self.snap.r, &self.snap.r))
    }

    pub fn r_s(&self) -> Result<&DenseTensor<T>, TensorError> {
        cached(&self.r_s, || self.act(&self.snap.r, &self.snap.s))
    }

    pub fn c_s(&self) -> Result<&DenseTensor<T>, TensorError> {
        cached(&self.c_s, || self.act(&self.snap.c, &self.snap.s))
    }

    pub fn q_s_r(&self) -> Result<&DenseTensor<T>, TensorError> {
        cached(&self.q_s_r, || tachibana(&self.snap.s, &self.snap.r))
    }

    pub fn q_g_r(&self) -> Result<&DenseTensor<T>, TensorError> {
        cached(&self.q_g_r, || tachibana(self.snap.g(), &self.snap.r))
    }

    pub fn q_g_c(&self) -> Result<&DenseTensor<T>, TensorError> {
        cached(&self.q_g_c, || tachibana(self.snap.g(), &self.snap.c))
    }

    pub fn q_s_c(&self) -> Result<&DenseTensor<T>, TensorError> {
        cached(&self.q_s_c, || tachibana(&self.snap.s, &self.snap.c))
    }

    pub fn q_g_s(&self) -> Result<&DenseTensor<T>, TensorError> {
        cached(&self.q_g_s, || tachibana(self.snap.g(), &self.snap.s))
    }

    pub fn p(&self) -> Result<&DenseTensor<T>, TensorError> {
        cached(&self.p, || p_tensor(self.snap))
    }

    pub fn scales(&self) -> Scales<T> {
        Scales::of(self.snap)
    }
}

/// Natural magnitudes of the snapshot ingredients.
///
/// `S` and `C` are measured against the curvature they come from rather than
/// their own norm, so an `S` that is pure round-off stays negligible.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Scales<T> {
    pub r: T,
    pub s: T,
    pub g: T,
    pub g_inv: T,
}

impl<T: Scalar> Scales<T> {
    pub fn of(snap: &CurvatureSnapshot<T>) -> Self {
        let r = snap.r.norm();
        let g_inv = snap.g_inv().norm();
        Self {
            r,
            s: g_inv * r,
            g: snap.g().norm(),
            g_inv,
        }
    }

    /// Scale of an action `B·T` with `B` curvature-like and `T` of scale `t`.
    pub fn action(&self, t: T) -> T {
        self.g_inv * self.r * t
    }
}

/// Relative gap `‖D − X‖ / max(‖D‖, ‖X‖, floor·natural)`.
pub(crate) fn rel_gap<T: Scalar>(
    d: &DenseTensor<T>,
    x: &DenseTensor<T>,
    natural: T,
    floor: T,
) -> Result<T, TensorError> {
    let mut diff = d.clone();
    diff.axpy(-T::one(), x)?;
    let den = d.norm().max(x.norm()).max(floor * natural);
    Ok(crate::scalar::ratio(diff.norm(), den))
}
