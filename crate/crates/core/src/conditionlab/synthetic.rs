//! Algebraic fixtures with planted structure: Roter-type, (H1), Einstein.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::ConditionError;
use crate::chartgeo::{product_snapshot, space_form_snapshot, synthetic_snapshot, CurvatureSnapshot};
use crate::scalar::Scalar;
use crate::tensorkit::random::{random_frame, random_gen_curvature, random_metric};
use crate::tensorkit::{g_tensor, kulkarni_nomizu, DenseTensor, Signature, Symmetry};

/// Random Einstein curvature: the Weyl part of a random tensor plus `κ/((n−1)n)·G`.
pub fn einstein_snapshot<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    kappa: T,
    negative: usize,
) -> Result<CurvatureSnapshot<T>, ConditionError> {
    if dim < 4 {
        return Err(ConditionError::DimensionTooSmall {
            op: "einstein_snapshot",
            dim,
            min: 4,
        });
    }
    let m = random_metric::<T, R>(rng, dim, negative);
    let raw = random_gen_curvature(rng, &m.g, 3);
    let weyl = synthetic_snapshot(m.g.clone(), raw)?.c;
    let nf = T::from_usize_lossy(dim);
    let mut r = weyl;
    r.axpy(kappa / ((nf - T::one()) * nf), &g_tensor(&m.g))?;
    let r = r.assume_symmetry(Symmetry::GeneralizedCurvature);
    Ok(synthetic_snapshot(m.g, r)?)
}

/// Einstein factor of dimension `n − 1` times a flat line: satisfies
/// `S∘R = κ/(n−1)·R` without being Einstein or conformally flat.
pub fn h1_snapshot<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    kappa: T,
    negative: usize,
) -> Result<CurvatureSnapshot<T>, ConditionError> {
    if dim < 5 {
        return Err(ConditionError::DimensionTooSmall {
            op: "h1_snapshot",
            dim,
            min: 5,
        });
    }
    let factor = einstein_snapshot(rng, dim - 1, kappa, negative)?;
    let line = space_form_snapshot(1, T::zero(), Signature::riemannian(1))?;
    Ok(product_snapshot(&factor, &line)?)
}

/// Roter-type curvature `R = (φ/2)S∧S + μ g∧S + η G` with the given coefficients.
///
/// `S` has two real eigenvalues of multiplicity `n/2` each; they are the
/// roots that make the Ricci contraction of the right side reproduce `S`.
/// Fails when those roots are complex or `n` is odd.
pub fn roter_snapshot<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    negative: usize,
    phi: T,
    mu: T,
    eta: T,
) -> Result<CurvatureSnapshot<T>, ConditionError> {
    if dim < 4 || dim % 2 == 1 {
        return Err(ConditionError::DimensionTooSmall {
            op: "roter_snapshot (even dimension)",
            dim,
            min: 4,
        });
    }
    let (s1, s2) = roter_eigenvalues(dim, phi, mu, eta).ok_or(ConditionError::Chart(
        crate::chartgeo::ChartError::Inconsistent("Roter coefficients give complex Ricci eigenvalues"),
    ))?;
    let sig = Signature::new(negative, dim - negative);
    let b = random_frame::<T, R>(rng, dim);
    let eta_m = DMatrix::from_diagonal(&DVector::from_vec(sig.diagonal::<T>()));
    let d = DMatrix::from_diagonal(&DVector::from_fn(dim, |i, _| if i < dim / 2 { s1 } else { s2 }));
    let g = b.transpose() * &eta_m * &b;
    let a = b.transpose() * &eta_m * d * &b;
    let sym = |m: DMatrix<T>| -> Result<DenseTensor<T>, ConditionError> {
        let m = (&m + m.transpose()) * T::lit(0.5);
        Ok(DenseTensor::from_matrix(&m)?.with_symmetry(Symmetry::SymmetricPair)?)
    };
    let (g, a) = (sym(g)?, sym(a)?);
    let r = DenseTensor::linear_combination(&[
        (phi * T::lit(0.5), &kulkarni_nomizu(&a, &a)?),
        (mu, &kulkarni_nomizu(&g, &a)?),
        (eta, &g_tensor(&g)),
    ])?
    .assume_symmetry(Symmetry::GeneralizedCurvature);
    Ok(synthetic_snapshot(g, r)?)
}

/// Ricci eigenvalues `(s₁, s₂)` of a Roter tensor with equal multiplicities.
///
/// Each eigenvalue `a` of `S` must satisfy
/// `φ(t·a − a²) + μ((n−2)a + t) + η(n−1) = a` with `t = tr S = (n/2)(s₁+s₂)`.
pub fn roter_eigenvalues<T: Scalar>(dim: usize, phi: T, mu: T, eta: T) -> Option<(T, T)> {
    if phi == T::zero() {
        return None;
    }
    let n = T::from_usize_lossy(dim);
    let two = T::lit(2.0);
    let sum = (T::one() - mu * (n - two)) / (phi * (n / two - T::one()));
    let t = n / two * sum;
    let prod = -(mu * t + eta * (n - T::one())) / phi;
    let disc = sum * sum - T::lit(4.0) * prod;
    if disc < T::zero() {
        return None;
    }
    let root = disc.sqrt();
    Some(((sum + root) / two, (sum - root) / two))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditionlab::{check_h1, classify_sets};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn einstein_fixture_is_einstein() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let snap = einstein_snapshot::<f64, _>(&mut rng, 5, 3.0, 1).unwrap();
        assert!(snap.s.rel_distance(&snap.g().scale(0.6)).unwrap() < 1e-12);
        assert!((snap.kappa - 3.0).abs() < 1e-12);
    }

    #[test]
    fn h1_fixture_satisfies_h1() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let snap = h1_snapshot::<f64, _>(&mut rng, 5, 2.0, 0).unwrap();
        assert!(check_h1(&snap).unwrap() < 1e-12);
        let m = classify_sets(&snap, 1e-8).unwrap();
        assert!(m.in_us && m.in_uc);
    }

    #[test]
    fn roter_fixture_reproduces_its_ricci_tensor() {
        let (phi, mu, eta) = (0.7, -0.3, 0.2);
        let (s1, s2) = roter_eigenvalues(4, phi, mu, eta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let snap = roter_snapshot::<f64, _>(&mut rng, 4, 1, phi, mu, eta).unwrap();
        assert!((snap.kappa - 2.0 * (s1 + s2)).abs() < 1e-10);
        let m = classify_sets(&snap, 1e-8).unwrap();
        assert!(m.in_u1, "{m:?}");
    }

    #[test]
    fn complex_roter_roots_rejected() {
        assert!(roter_eigenvalues(4, 1.0, 0.0, -1.0).is_none());
    }
}
