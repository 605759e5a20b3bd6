use super::{GaussError, HypersurfaceData};
use crate::scalar::Scalar;
use crate::tensorkit::DenseTensor;

/// Riemannian fiber `g̃ = I` with diagonal shape operator.
pub fn diagonal_fixture<T: Scalar>(
    eigenvalues: &[T],
    tau: T,
    gauss_sign: T,
) -> Result<HypersurfaceData<T>, GaussError> {
    let m = eigenvalues.len();
    if m < 3 {
        return Err(GaussError::DimensionTooSmall { dim: m, min: 3 });
    }
    HypersurfaceData::new(DenseTensor::identity(m), DenseTensor::diagonal(eigenvalues), tau, gauss_sign)
}

/// Indefinite fiber with a nilpotent shape operator of Jordan type 3.
///
/// Basis `(u, v, e, e₄, …)` with `u, v` null, `g̃(u,v) = 1`, the rest
/// orthonormal spacelike. `Au = 0`, `Ae = u`, `Av = e`, `A = 0` on the
/// remaining vectors, so `A³ = 0`, `A² ≠ 0` and `tr A = tr A² = 0`.
pub fn jordan3_fixture<T: Scalar>(
    fiber_dim: usize,
    tau: T,
    gauss_sign: T,
) -> Result<HypersurfaceData<T>, GaussError> {
    if fiber_dim < 3 {
        return Err(GaussError::DimensionTooSmall {
            dim: fiber_dim,
            min: 3,
        });
    }
    let g = DenseTensor::from_fn(fiber_dim, 2, |ix| match (ix[0], ix[1]) {
        (0, 1) | (1, 0) => T::one(),
        (i, j) if i == j && i >= 2 => T::one(),
        _ => T::zero(),
    });
    // H_{ij} = g̃(A xᵢ, xⱼ): only H(v,e) = g̃(e,e) = H(e,v) = g̃(u,v) = 1
    let h = DenseTensor::from_fn(fiber_dim, 2, |ix| match (ix[0], ix[1]) {
        (1, 2) | (2, 1) => T::one(),
        _ => T::zero(),
    });
    HypersurfaceData::new(g, h, tau, gauss_sign)
}
