use nalgebra::{DMatrix, DVector};

use super::{DenseTensor, TensorError};
use crate::scalar::Scalar;

/// Gram singular values below this fraction of the largest count as rank deficiency.
pub const GRAM_RANK_CUTOFF: f64 = 1e-13;

/// Least-squares fit of a tensor against a list of basis tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct GramFit<T> {
    pub coefficients: Vec<T>,
    /// `‖D − Σ cᵢBᵢ‖ / max(‖D‖, maxᵢ‖Bᵢ‖)`
    pub residual: T,
    pub rank_deficient: bool,
    pub target_norm: T,
    pub basis_norms: Vec<T>,
}

/// Minimizes `‖D − Σ cᵢ Bᵢ‖` in the chart-component inner product.
///
/// Columns are equilibrated by their norms before the Gram system is solved
/// through its eigen-decomposition; a singular Gram matrix yields the
/// minimum-norm solution with `rank_deficient` set.
pub fn gram_fit<T: Scalar>(
    target: &DenseTensor<T>,
    basis: &[&DenseTensor<T>],
) -> Result<GramFit<T>, TensorError> {
    if basis.is_empty() {
        return Err(TensorError::EmptyBasis);
    }
    for b in basis {
        target.check_shape(b)?;
    }
    let k = basis.len();
    let norms: Vec<T> = basis.iter().map(|b| b.norm()).collect();
    let scale: Vec<T> = norms
        .iter()
        .map(|&v| if v > T::zero() { T::one() / v } else { T::zero() })
        .collect();
    let (mut coefficients, mut rank_deficient) = solve_scaled(target, basis, &scale)?;
    if rank_deficient {
        // equilibration changes which solution is minimal; redo on the raw columns
        let unit: Vec<T> = vec![T::one(); k];
        coefficients = solve_scaled(target, basis, &unit)?.0;
    }
    rank_deficient |= norms.iter().any(|v| *v == T::zero());

    let mut diff = target.clone();
    for (c, b) in coefficients.iter().zip(basis) {
        diff.axpy(-*c, b)?;
    }
    let target_norm = target.norm();
    let denom = norms
        .iter()
        .fold(target_norm, |a, &v| a.max(v))
        .max(T::lit(1e-300).max(T::min_value().unwrap_or(T::zero())));
    let residual = diff.norm() / denom;
    Ok(GramFit {
        coefficients,
        residual,
        rank_deficient,
        target_norm,
        basis_norms: norms,
    })
}

fn solve_scaled<T: Scalar>(
    target: &DenseTensor<T>,
    basis: &[&DenseTensor<T>],
    scale: &[T],
) -> Result<(Vec<T>, bool), TensorError> {
    let k = basis.len();
    let mut gram = DMatrix::<T>::zeros(k, k);
    let mut rhs = DVector::<T>::zeros(k);
    for i in 0..k {
        for j in i..k {
            let v = basis[i].inner_product(basis[j])? * scale[i] * scale[j];
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
        rhs[i] = basis[i].inner_product(target)? * scale[i];
    }
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let cutoff = top * T::lit(GRAM_RANK_CUTOFF).max(T::machine_eps() * T::lit(16.0));
    let mut rank_deficient = false;
    let mut sol = DVector::<T>::zeros(k);
    for (idx, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam <= cutoff {
            rank_deficient = true;
            continue;
        }
        let v = eig.eigenvectors.column(idx);
        let proj = v.dot(&rhs) / lam;
        sol += v * proj;
    }
    Ok(((0..k).map(|i| sol[i] * scale[i]).collect(), rank_deficient))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorkit::random::random_symmetric;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_a_multiple() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_symmetric::<f64, _>(&mut rng, 4);
        let d = b.scale(3.0);
        let fit = gram_fit(&d, &[&b]).unwrap();
        assert!((fit.coefficients[0] - 3.0).abs() < 1e-14);
        assert!(fit.residual < 1e-15);
        assert!(!fit.rank_deficient);
    }

    #[test]
    fn orthogonal_target_gives_zero_and_unit_residual() {
        let mut d = DenseTensor::<f64>::zeros(3, 2);
        d.set(&[0, 0], 2.0);
        let mut b = DenseTensor::<f64>::zeros(3, 2);
        b.set(&[1, 2], 1.0);
        let fit = gram_fit(&d, &[&b]).unwrap();
        assert_eq!(fit.coefficients[0], 0.0);
        assert!((fit.residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_basis_rejected() {
        let d = DenseTensor::<f64>::zeros(3, 2);
        assert!(matches!(gram_fit(&d, &[]), Err(TensorError::EmptyBasis)));
    }

    #[test]
    fn dependent_basis_gets_minimum_norm_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = random_symmetric::<f64, _>(&mut rng, 3);
        let b2 = b.scale(2.0);
        let d = b.scale(5.0);
        let fit = gram_fit(&d, &[&b, &b2]).unwrap();
        assert!(fit.rank_deficient);
        assert!(fit.residual < 1e-14);
        // minimum norm: c₁ + 2c₂ = 5 with c ∝ (1, 2)
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_basis_flagged() {
        let d = DenseTensor::<f64>::identity(3);
        let z = DenseTensor::<f64>::zeros(3, 2);
        let fit = gram_fit(&d, &[&z]).unwrap();
        assert!(fit.rank_deficient);
        assert_eq!(fit.coefficients[0], 0.0);
    }
}
