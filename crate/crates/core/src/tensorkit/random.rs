//! Seeded random tensors for fixtures and property suites.

use nalgebra::DMatrix;
use rand::Rng;

use super::{kulkarni_nomizu, DenseTensor, MetricPoint, Signature, Symmetry};
use crate::scalar::Scalar;

fn uniform<T: Scalar, R: Rng + ?Sized>(rng: &mut R, half_width: f64) -> T {
    T::lit(rng.gen_range(-half_width..half_width))
}

/// Random symmetric `(0,2)` tensor with entries in `[-1, 1)`.
pub fn random_symmetric<T: Scalar, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DenseTensor<T> {
    let mut vals = vec![T::zero(); dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v = uniform(rng, 1.0);
            vals[i * dim + j] = v;
            vals[j * dim + i] = v;
        }
    }
    DenseTensor::from_vec(dim, 2, vals)
        .expect("square")
        .assume_symmetry(Symmetry::SymmetricPair)
}

/// Random well-conditioned change of basis `B = I + ½·noise`.
pub fn random_frame<T: Scalar, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<T> {
    DMatrix::from_fn(dim, dim, |i, j| {
        let d = if i == j { T::one() } else { T::zero() };
        d + uniform::<T, R>(rng, 0.5)
    })
}

/// Random metric `Bᵀ η B` with `negative` negative directions.
pub fn random_metric<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    negative: usize,
) -> MetricPoint<T> {
    let sig = Signature::new(negative, dim - negative);
    loop {
        let b = random_frame::<T, R>(rng, dim);
        let eta = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sig.diagonal::<T>()));
        let g = b.transpose() * eta * &b;
        let g = DenseTensor::from_matrix(&((&g + g.transpose()) * T::lit(0.5))).expect("square");
        if let Ok(mp) = MetricPoint::new(g) {
            if mp.signature == sig && condition_ok(&mp) {
                return mp;
            }
        }
    }
}

fn condition_ok<T: Scalar>(mp: &MetricPoint<T>) -> bool {
    mp.g_inv.max_abs() < T::lit(50.0)
}

/// Random generalized curvature tensor `Σ Eᵢ ∧ Fᵢ`, plus a multiple of `g∧g`.
pub fn random_gen_curvature<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    g: &DenseTensor<T>,
    terms: usize,
) -> DenseTensor<T> {
    let n = g.dim();
    let mut acc = kulkarni_nomizu(g, g).expect("symmetric metric").scale(uniform(rng, 1.0));
    for _ in 0..terms {
        let e = random_symmetric::<T, R>(rng, n);
        let f = random_symmetric::<T, R>(rng, n);
        let kn = kulkarni_nomizu(&e, &f).expect("symmetric");
        acc.axpy(T::one(), &kn).expect("same shape");
    }
    acc.assume_symmetry(Symmetry::GeneralizedCurvature)
}
