use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use super::TensorError;
use crate::scalar::{ratio, Scalar};

/// Relative tolerance used when a declared symmetry class is verified.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Declared symmetry class of a [`DenseTensor`].
///
/// The class is verified when declared, never enforced by the storage layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    None,
    /// Rank 2 with `T[i,j] = T[j,i]`.
    SymmetricPair,
    /// Rank 4 with the algebraic symmetries of a Riemann tensor.
    GeneralizedCurvature,
}

/// Covariant tensor of rank `k` over an `n`-dimensional chart, stored densely
/// in row-major index order.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<T> {
    dim: usize,
    rank: usize,
    data: Vec<T>,
    symmetry: Symmetry,
}

impl<T: Scalar> DenseTensor<T> {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Self {
            dim,
            rank,
            data: vec![T::zero(); dim.pow(rank as u32)],
            symmetry: Symmetry::None,
        }
    }

    pub fn from_vec(dim: usize, rank: usize, data: Vec<T>) -> Result<Self, TensorError> {
        if dim == 0 {
            return Err(TensorError::ZeroDimension);
        }
        let expected = dim.pow(rank as u32);
        if data.len() != expected {
            return Err(TensorError::LengthMismatch {
                expected,
                found: data.len(),
            });
        }
        Ok(Self {
            dim,
            rank,
            data,
            symmetry: Symmetry::None,
        })
    }

    /// Builds a tensor by evaluating `f` on every index tuple.
    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let mut t = Self::zeros(dim, rank);
        let mut idx = vec![0usize; rank];
        for slot in t.data.iter_mut() {
            *slot = f(&idx);
            advance(&mut idx, dim);
        }
        t
    }

    /// Rank-2 tensor from a square matrix.
    pub fn from_matrix(m: &DMatrix<T>) -> Result<Self, TensorError> {
        if m.nrows() != m.ncols() {
            return Err(TensorError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let n = m.nrows();
        Ok(Self::from_fn(n, 2, |ix| m[(ix[0], ix[1])]))
    }

    /// Rank-2 diagonal tensor.
    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, 2, |ix| if ix[0] == ix[1] { values[ix[0]] } else { T::zero() })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![T::one(); dim])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        self.symmetry = Symmetry::None;
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> T {
        self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], value: T) {
        let o = self.offset(idx);
        self.data[o] = value;
        self.symmetry = Symmetry::None;
    }

    #[inline]
    pub fn at2(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn at4(&self, h: usize, i: usize, j: usize, k: usize) -> T {
        let n = self.dim;
        self.data[((h * n + i) * n + j) * n + k]
    }

    #[inline]
    pub fn at6(&self, h: usize, i: usize, j: usize, k: usize, l: usize, m: usize) -> T {
        let n = self.dim;
        self.data[((((h * n + i) * n + j) * n + k) * n + l) * n + m]
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rank == other.rank
    }

    pub(crate) fn check_shape(&self, other: &Self) -> Result<(), TensorError> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(TensorError::ShapeMismatch {
                left: (self.dim, self.rank),
                right: (other.dim, other.rank),
            })
        }
    }

    /// Chart-basis Euclidean inner product of the component arrays.
    pub fn inner_product(&self, other: &Self) -> Result<T, TensorError> {
        self.check_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b))
    }

    pub fn norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &a| acc + a * a).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &a| if a.abs() > acc { a.abs() } else { acc })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == T::zero())
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            rank: self.rank,
            data: self.data.iter().map(|&v| v * s).collect(),
            symmetry: self.symmetry,
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: T, other: &Self) -> Result<(), TensorError> {
        self.check_shape(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
        if self.symmetry != other.symmetry {
            self.symmetry = Symmetry::None;
        }
        Ok(())
    }

    /// `Σ cᵢ Tᵢ`; the terms must share one shape.
    pub fn linear_combination(terms: &[(T, &Self)]) -> Result<Self, TensorError> {
        let (_, first) = terms.first().ok_or(TensorError::EmptyBasis)?;
        let mut out = Self::zeros(first.dim, first.rank);
        out.symmetry = first.symmetry;
        for (c, t) in terms {
            out.axpy(*c, t)?;
        }
        Ok(out)
    }

    /// Relative distance `‖self − other‖ / max(‖self‖, ‖other‖)`.
    pub fn rel_distance(&self, other: &Self) -> Result<T, TensorError> {
        self.check_shape(other)?;
        let diff = self
            .data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
            .sqrt();
        let scale = self.norm().max(other.norm());
        Ok(ratio(diff, scale))
    }

    /// Swaps two slots.
    pub fn transpose(&self, a: usize, b: usize) -> Self {
        let mut src = vec![0usize; self.rank];
        Self::from_fn(self.dim, self.rank, |ix| {
            src.copy_from_slice(ix);
            src.swap(a, b);
            self.get(&src)
        })
    }

    /// Largest relative deviation from the given symmetry class.
    pub fn symmetry_deviation(&self, sym: Symmetry) -> Result<T, TensorError> {
        let scale = self.max_abs();
        let n = self.dim;
        let dev = match sym {
            Symmetry::None => T::zero(),
            Symmetry::SymmetricPair => {
                if self.rank != 2 {
                    return Err(TensorError::RankMismatch {
                        expected: 2,
                        found: self.rank,
                    });
                }
                let mut d = T::zero();
                for i in 0..n {
                    for j in 0..n {
                        d = d.max((self.at2(i, j) - self.at2(j, i)).abs());
                    }
                }
                d
            }
            Symmetry::GeneralizedCurvature => {
                if self.rank != 4 {
                    return Err(TensorError::RankMismatch {
                        expected: 4,
                        found: self.rank,
                    });
                }
                let mut d = T::zero();
                for h in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            for k in 0..n {
                                let v = self.at4(h, i, j, k);
                                d = d.max((v + self.at4(i, h, j, k)).abs());
                                d = d.max((v + self.at4(h, i, k, j)).abs());
                                d = d.max((v - self.at4(j, k, h, i)).abs());
                                let bianchi = v + self.at4(i, j, h, k) + self.at4(j, h, i, k);
                                d = d.max(bianchi.abs());
                            }
                        }
                    }
                }
                d
            }
        };
        Ok(ratio(dev, scale))
    }

    /// Declares and verifies a symmetry class at [`SYMMETRY_TOL`].
    pub fn with_symmetry(self, sym: Symmetry) -> Result<Self, TensorError> {
        self.with_symmetry_tol(sym, SYMMETRY_TOL)
    }

    pub fn with_symmetry_tol(mut self, sym: Symmetry, tol: f64) -> Result<Self, TensorError> {
        let dev = self.symmetry_deviation(sym)?;
        if dev > T::attainable(tol) {
            return Err(TensorError::SymmetryViolation {
                class: sym,
                deviation: dev.to_f64_lossy(),
            });
        }
        self.symmetry = sym;
        Ok(self)
    }

    /// Marks a symmetry class that holds by construction.
    pub(crate) fn assume_symmetry(mut self, sym: Symmetry) -> Self {
        self.symmetry = sym;
        self
    }

    pub fn to_matrix(&self) -> Result<DMatrix<T>, TensorError> {
        if self.rank != 2 {
            return Err(TensorError::RankMismatch {
                expected: 2,
                found: self.rank,
            });
        }
        Ok(DMatrix::from_row_slice(self.dim, self.dim, &self.data))
    }

    /// Debug dump: one `(i, j, ...) value` line per nonzero entry, 17 significant digits.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut idx = vec![0usize; self.rank];
        for &v in &self.data {
            if v != T::zero() {
                let tuple: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
                let _ = writeln!(out, "({}) {:.16e}", tuple.join(", "), v);
            }
            advance(&mut idx, self.dim);
        }
        out
    }
}

/// Odometer increment of a row-major index tuple.
#[inline]
pub(crate) fn advance(idx: &mut [usize], dim: usize) {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < dim {
            return;
        }
        *slot = 0;
    }
}

impl<T: Scalar> Add for &DenseTensor<T> {
    type Output = DenseTensor<T>;

    /// Panics on shape mismatch.
    fn add(self, rhs: Self) -> DenseTensor<T> {
        DenseTensor::linear_combination(&[(T::one(), self), (T::one(), rhs)])
            .expect("tensor shapes must agree")
    }
}

impl<T: Scalar> Sub for &DenseTensor<T> {
    type Output = DenseTensor<T>;

    /// Panics on shape mismatch.
    fn sub(self, rhs: Self) -> DenseTensor<T> {
        DenseTensor::linear_combination(&[(T::one(), self), (-T::one(), rhs)])
            .expect("tensor shapes must agree")
    }
}

impl<T: Scalar> Mul<T> for &DenseTensor<T> {
    type Output = DenseTensor<T>;

    fn mul(self, rhs: T) -> DenseTensor<T> {
        self.scale(rhs)
    }
}

impl<T: Scalar> Neg for &DenseTensor<T> {
    type Output = DenseTensor<T>;

    fn neg(self) -> DenseTensor<T> {
        self.scale(-T::one())
    }
}
