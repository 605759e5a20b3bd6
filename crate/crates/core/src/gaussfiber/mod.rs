//! Fiber snapshots from hypersurface data through the Gauss equation
//! `R̃ = (ε/2)·H∧H + τ/((n−1)n)·G̃`, and the checks of the shape operator
//! relations `A³ = tr(A)A² + λA`, the induced `S̃∘R̃` identity, the fiber
//! difference tensor identity and `λ = 0, (n−2)τ = nκ̃`.
//!
//! Throughout, `n` is the fiber dimension plus one, matching the dimension
//! of the warped product the fiber is meant for.

mod fixtures;

pub use fixtures::{diagonal_fixture, jordan3_fixture};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::chartgeo::{synthetic_snapshot, ChartError, CurvatureSnapshot};
use crate::conditionlab::ConditionError;
use crate::scalar::{ratio, Scalar};
use crate::tensorkit::{
    curvature_action, g_tensor, kulkarni_nomizu, metric_product, operator_compose, tachibana,
    DenseTensor, MetricPoint, Symmetry, TensorError,
};

/// Relative tolerance for the self-adjointness of the shape operator.
pub const SELF_ADJOINT_TOL: f64 = 1e-12;
/// Relative tolerance for accepting a fitted `λ`.
pub const E1_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussError {
    #[error("fiber dimension {dim} is below the minimum {min}")]
    DimensionTooSmall { dim: usize, min: usize },
    #[error("Gauss sign must be +1 or -1, got {0}")]
    BadSign(f64),
    #[error("second fundamental tensor is not symmetric (relative deviation {deviation:e})")]
    NotSelfAdjoint { deviation: f64 },
    #[error("A³ = tr(A)A² + λA fails: best relative residual {residual:e}")]
    E1Failed { residual: f64 },
    #[error("closed-form Ricci tensor disagrees with the contraction ({deviation:e})")]
    RicciMismatch { deviation: f64 },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Condition(#[from] ConditionError),
}

/// Pointwise hypersurface data: induced metric, second fundamental tensor,
/// ambient scalar curvature and Gauss sign.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfaceData<T> {
    pub metric: MetricPoint<T>,
    pub h: DenseTensor<T>,
    pub tau: T,
    pub gauss_sign: T,
    /// Set by [`HypersurfaceData::solve_lambda`].
    pub lambda: Option<T>,
}

/// Least-squares `λ` of `A³ = tr(A)A² + λA`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct E1Fit<T> {
    pub lambda: T,
    /// `‖A³ − tr(A)A² − λA‖` over the largest of the three term norms.
    pub residual: T,
    /// `A = 0`: `λ` is undetermined and reported as zero.
    pub umbilic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct E2Report<T> {
    pub lambda: T,
    /// `μ = (n−2)τ/((n−1)n) − ελ`
    pub mu: T,
    /// `S̃∘R̃ = μ(R̃ − cG̃) + c(g̃_{βγ}S̃_{μδ} − g̃_{βδ}S̃_{μγ})`
    pub residual: T,
    /// `R̃·S̃ = c·Q(g̃,S̃)`
    pub rs_residual: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct E4Report<T> {
    pub lambda: T,
    pub lambda_zero: bool,
    /// `(n−2)τ = nκ̃`
    pub kappa_relation: bool,
    pub kappa_deviation: T,
    /// `(tr A)² = tr(A²)`, equivalent to the κ relation by the Gauss contraction.
    pub trace_identity: bool,
    pub trace_deviation: T,
}

impl<T: Scalar> HypersurfaceData<T> {
    pub fn new(g: DenseTensor<T>, h: DenseTensor<T>, tau: T, gauss_sign: T) -> Result<Self, GaussError> {
        let metric = MetricPoint::new(g)?;
        if h.rank() != 2 || h.dim() != metric.dim() {
            return Err(TensorError::ShapeMismatch {
                left: (metric.dim(), 2),
                right: (h.dim(), h.rank()),
            }
            .into());
        }
        if gauss_sign.abs() != T::one() {
            return Err(GaussError::BadSign(gauss_sign.to_f64_lossy()));
        }
        let deviation = h.symmetry_deviation(Symmetry::SymmetricPair)?;
        if deviation > T::lit(SELF_ADJOINT_TOL) {
            return Err(GaussError::NotSelfAdjoint {
                deviation: deviation.to_f64_lossy(),
            });
        }
        let h = h.assume_symmetry(Symmetry::SymmetricPair);
        Ok(Self {
            metric,
            h,
            tau,
            gauss_sign,
            lambda: None,
        })
    }

    pub fn fiber_dim(&self) -> usize {
        self.metric.dim()
    }

    /// Dimension `n` of the warped product the fiber belongs to.
    pub fn n(&self) -> usize {
        self.fiber_dim() + 1
    }

    /// `c = τ/((n−1)n)`
    pub fn c(&self) -> T {
        let n = T::from_usize_lossy(self.n());
        self.tau / ((n - T::one()) * n)
    }

    /// Shape operator `A = g̃⁻¹H` as a matrix acting on column vectors.
    pub fn shape_operator(&self) -> Result<DMatrix<T>, GaussError> {
        Ok(self.metric.g_inv.to_matrix()? * self.h.to_matrix()?)
    }

    /// Pull back by a change of basis `x = P·y`: `g ↦ PᵀgP`, `H ↦ PᵀHP`.
    pub fn transformed(&self, p: &DMatrix<T>) -> Result<Self, GaussError> {
        let pull = |t: &DenseTensor<T>| -> Result<DenseTensor<T>, GaussError> {
            let m = p.transpose() * t.to_matrix()? * p;
            let m = (&m + m.transpose()) * T::lit(0.5);
            Ok(DenseTensor::from_matrix(&m)?)
        };
        let mut out = Self::new(pull(&self.metric.g)?, pull(&self.h)?, self.tau, self.gauss_sign)?;
        out.lambda = self.lambda;
        Ok(out)
    }

    /// Solves for `λ` and stores it.
    pub fn solve_lambda(&mut self) -> Result<T, GaussError> {
        let fit = e1_lambda(self)?;
        self.lambda = Some(fit.lambda);
        Ok(fit.lambda)
    }
}

/// Fits `λ` in `A³ = tr(A)A² + λA`; fails when the relative residual exceeds [`E1_TOL`].
pub fn e1_lambda<T: Scalar>(data: &HypersurfaceData<T>) -> Result<E1Fit<T>, GaussError> {
    let a = data.shape_operator()?;
    let a2 = &a * &a;
    let a3 = &a2 * &a;
    let tr = a.trace();
    let target = &a3 - &a2 * tr;
    let a_norm2 = a.norm_squared();
    if a_norm2 == T::zero() {
        return Ok(E1Fit {
            lambda: T::zero(),
            residual: T::zero(),
            umbilic: true,
        });
    }
    let lambda = target.dot(&a) / a_norm2;
    let resid = (&target - &a * lambda).norm();
    // ‖A‖³ keeps nilpotent operators, where every term vanishes, from dividing noise by noise
    let a_norm = a_norm2.sqrt();
    let scale = a3
        .norm()
        .max((&a2 * tr).norm())
        .max((&a * lambda).norm())
        .max(a_norm * a_norm2);
    let residual = ratio(resid, scale);
    if residual > T::lit(E1_TOL) {
        return Err(GaussError::E1Failed {
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(E1Fit {
        lambda,
        residual,
        umbilic: false,
    })
}

/// `S̃ = ε(tr(A)·H − H g̃⁻¹ H) + (n−2)c·g̃`, the Ricci tensor implied by the Gauss equation.
pub fn gauss_ricci<T: Scalar>(data: &HypersurfaceData<T>) -> Result<DenseTensor<T>, GaussError> {
    let gi = &data.metric.g_inv;
    let tr = crate::tensorkit::trace(&data.h, gi);
    let h2 = metric_product(&data.h, gi, &data.h);
    let n = T::from_usize_lossy(data.n());
    Ok(DenseTensor::linear_combination(&[
        (data.gauss_sign * tr, &data.h),
        (-data.gauss_sign, &h2),
        ((n - T::lit(2.0)) * data.c(), &data.metric.g),
    ])?)
}

/// Fiber snapshot from the Gauss equation, cross-checked against [`gauss_ricci`].
pub fn gauss_snapshot<T: Scalar>(data: &HypersurfaceData<T>) -> Result<CurvatureSnapshot<T>, GaussError> {
    let m = data.fiber_dim();
    if m < 3 {
        return Err(GaussError::DimensionTooSmall { dim: m, min: 3 });
    }
    let g = &data.metric.g;
    let hh = kulkarni_nomizu(&data.h, &data.h)?;
    let r = DenseTensor::linear_combination(&[
        (data.gauss_sign * T::lit(0.5), &hh),
        (data.c(), &g_tensor(g)),
    ])?
    .assume_symmetry(Symmetry::GeneralizedCurvature);
    let snap = synthetic_snapshot(g.clone(), r)?;
    let closed = gauss_ricci(data)?;
    let scale = snap.g_inv().norm() * snap.r.norm();
    let deviation = ratio((&snap.s - &closed).norm(), snap.s.norm().max(scale));
    if deviation > T::lit(1e-10) {
        return Err(GaussError::RicciMismatch {
            deviation: deviation.to_f64_lossy(),
        });
    }
    Ok(snap)
}

fn lambda_of<T: Scalar>(data: &HypersurfaceData<T>) -> Result<T, GaussError> {
    match data.lambda {
        Some(l) => Ok(l),
        None => Ok(e1_lambda(data)?.lambda),
    }
}

fn gap<T: Scalar>(a: &DenseTensor<T>, b: &DenseTensor<T>) -> Result<T, GaussError> {
    let diff = (a - b).norm();
    Ok(ratio(diff, a.norm().max(b.norm())))
}

/// Residuals of the `S̃∘R̃` identity implied by `A³ = tr(A)A² + λA`, and of its
/// consequence `R̃·S̃ = c·Q(g̃,S̃)`.
pub fn e2_check<T: Scalar>(data: &HypersurfaceData<T>) -> Result<E2Report<T>, GaussError> {
    let lambda = lambda_of(data)?;
    let snap = gauss_snapshot(data)?;
    let m = snap.dim();
    let c = data.c();
    let n = T::from_usize_lossy(data.n());
    let mu = (n - T::lit(2.0)) * c - data.gauss_sign * lambda;
    let (g, s) = (snap.g(), &snap.s);
    let x = DenseTensor::from_fn(m, 4, |ix| {
        let (mu_, b, gm, d) = (ix[0], ix[1], ix[2], ix[3]);
        g.at2(b, gm) * s.at2(mu_, d) - g.at2(b, d) * s.at2(mu_, gm)
    });
    let rhs = DenseTensor::linear_combination(&[(mu, &snap.r), (-mu * c, &snap.big_g), (c, &x)])?;
    let v = operator_compose(s, snap.g_inv(), &snap.r)?;
    let rs = curvature_action(&snap.r, snap.g_inv(), s)?;
    let qgs = tachibana(g, s)?.scale(c);
    Ok(E2Report {
        lambda,
        mu,
        residual: gap(&v, &rhs)?,
        rs_residual: gap(&rs, &qgs)?,
    })
}

/// Residual of `(n−3)(R̃·C̃ − C̃·R̃) = Q(S̃,R̃) + ((n−2)c − ελ − κ̃/(n−2))·Q(g̃,R̃)`;
/// `None` for a 3-dimensional fiber.
pub fn e3_check<T: Scalar>(data: &HypersurfaceData<T>) -> Result<Option<T>, GaussError> {
    let m = data.fiber_dim();
    if m < 4 {
        return Ok(None);
    }
    let lambda = lambda_of(data)?;
    let snap = gauss_snapshot(data)?;
    let gi = snap.g_inv();
    let n = T::from_usize_lossy(data.n());
    let two = T::lit(2.0);
    let mut lhs = curvature_action(&snap.r, gi, &snap.c)?;
    lhs.axpy(-T::one(), &curvature_action(&snap.c, gi, &snap.r)?)?;
    let lhs = lhs.scale(n - T::lit(3.0));
    let coef = (n - two) * data.c() - data.gauss_sign * lambda - snap.kappa / (n - two);
    let rhs = DenseTensor::linear_combination(&[
        (T::one(), &tachibana(&snap.s, &snap.r)?),
        (coef, &tachibana(snap.g(), &snap.r)?),
    ])?;
    Ok(Some(gap(&lhs, &rhs)?))
}

/// Checks `λ = 0` and `(n−2)τ = nκ̃` at relative tolerance `tol`.
pub fn e4_check<T: Scalar>(data: &HypersurfaceData<T>, tol: f64) -> Result<E4Report<T>, GaussError> {
    let lambda = lambda_of(data)?;
    let snap = gauss_snapshot(data)?;
    let a = data.shape_operator()?;
    let a_sq = a.norm_squared();
    let tol_t = T::lit(tol);
    let n = T::from_usize_lossy(data.n());
    let lhs = (n - T::lit(2.0)) * data.tau;
    let rhs = n * snap.kappa;
    let kappa_scale = lhs.abs().max(rhs.abs()).max(n * a_sq);
    let kappa_deviation = ratio((lhs - rhs).abs(), kappa_scale);
    let tr = a.trace();
    let tr2 = (&a * &a).trace();
    let trace_deviation = ratio((tr * tr - tr2).abs(), a_sq.max(tr * tr));
    Ok(E4Report {
        lambda,
        lambda_zero: ratio(lambda.abs(), a_sq) <= tol_t,
        kappa_relation: kappa_deviation <= tol_t,
        kappa_deviation,
        trace_identity: trace_deviation <= tol_t,
        trace_deviation,
    })
}

#[cfg(test)]
mod tests;
