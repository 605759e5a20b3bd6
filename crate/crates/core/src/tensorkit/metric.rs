use nalgebra::{DMatrix, SymmetricEigen};

use super::{DenseTensor, Symmetry, TensorError};
use crate::scalar::Scalar;

/// Signature `(s, n − s)`: counts of negative and positive directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub negative: usize,
    pub positive: usize,
}

impl Signature {
    pub fn new(negative: usize, positive: usize) -> Self {
        Self { negative, positive }
    }

    pub fn riemannian(dim: usize) -> Self {
        Self::new(0, dim)
    }

    pub fn lorentzian(dim: usize) -> Self {
        Self::new(1, dim - 1)
    }

    pub fn dim(&self) -> usize {
        self.negative + self.positive
    }

    /// Diagonal entries of the flat metric `η`, negative directions first.
    pub fn diagonal<T: Scalar>(&self) -> Vec<T> {
        (0..self.dim())
            .map(|i| if i < self.negative { -T::one() } else { T::one() })
            .collect()
    }

    /// Signature of a direct sum.
    pub fn sum(self, other: Self) -> Self {
        Self::new(self.negative + other.negative, self.positive + other.positive)
    }
}

/// Metric at one point: `g`, its inverse, and the signature read off `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricPoint<T> {
    pub g: DenseTensor<T>,
    pub g_inv: DenseTensor<T>,
    pub signature: Signature,
}

impl<T: Scalar> MetricPoint<T> {
    /// Validates symmetry and nondegeneracy, inverts, and counts eigenvalue signs.
    pub fn new(g: DenseTensor<T>) -> Result<Self, TensorError> {
        if g.rank() != 2 {
            return Err(TensorError::RankMismatch {
                expected: 2,
                found: g.rank(),
            });
        }
        let g = g.with_symmetry_tol(Symmetry::SymmetricPair, 1e-12)?;
        let n = g.dim();
        let m = g.to_matrix()?;
        let eig = SymmetricEigen::new(m.clone());
        let scale = eig.eigenvalues.iter().fold(T::zero(), |a, v| a.max(v.abs()));
        let cutoff = scale * T::machine_eps() * T::lit(1e3);
        let min_abs = eig
            .eigenvalues
            .iter()
            .fold(scale, |a, v| a.min(v.abs()));
        if scale == T::zero() || min_abs <= cutoff {
            return Err(TensorError::Singular {
                min_eigenvalue: min_abs.to_f64_lossy(),
            });
        }
        let negative = eig.eigenvalues.iter().filter(|v| **v < T::zero()).count();
        let inv = m
            .clone()
            .try_inverse()
            .ok_or(TensorError::Singular {
                min_eigenvalue: min_abs.to_f64_lossy(),
            })?;
        let inv = (&inv + inv.transpose()) * T::lit(0.5);
        let residual = identity_residual(&m, &inv);
        if residual > T::attainable(1e-12) * T::lit(1e2).max(condition(scale, min_abs)) {
            return Err(TensorError::InverseResidual {
                residual: residual.to_f64_lossy(),
            });
        }
        let g_inv = DenseTensor::from_matrix(&inv)?.assume_symmetry(Symmetry::SymmetricPair);
        Ok(Self {
            g,
            g_inv,
            signature: Signature::new(negative, n - negative),
        })
    }

    pub fn flat(signature: Signature) -> Self {
        let d = signature.diagonal::<T>();
        let g = DenseTensor::diagonal(&d).assume_symmetry(Symmetry::SymmetricPair);
        Self {
            g_inv: g.clone(),
            g,
            signature,
        }
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// Relative residual of `g · g⁻¹ − I`.
    pub fn inverse_residual(&self) -> T {
        let m = self.g.to_matrix().expect("rank 2");
        let inv = self.g_inv.to_matrix().expect("rank 2");
        identity_residual(&m, &inv)
    }
}

fn condition<T: Scalar>(max: T, min: T) -> T {
    if min > T::zero() {
        max / min
    } else {
        T::one()
    }
}

fn identity_residual<T: Scalar>(m: &DMatrix<T>, inv: &DMatrix<T>) -> T {
    let n = m.nrows();
    let prod = m * inv;
    let mut r = T::zero();
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { T::one() } else { T::zero() };
            r = r.max((prod[(i, j)] - target).abs());
        }
    }
    r
}
