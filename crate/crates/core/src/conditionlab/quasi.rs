use nalgebra::{DMatrix, Schur};

use super::sets::einstein_deviation;
use super::{ConditionError, Scales};
use crate::chartgeo::CurvatureSnapshot;
use crate::scalar::Scalar;
use crate::tensorkit::mixed;

/// Roots of `det(S − αg)` closer than this fraction of the Ricci scale are one
/// root. Wide enough to absorb the `√ε` splitting of a 2×2 Jordan block.
const ROOT_CLUSTER: f64 = 1e-5;
const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiEinsteinResult<T> {
    pub is_einstein: bool,
    pub is_quasi_einstein: bool,
    /// The root with `rank(S − αg) ≤ 1`, when quasi-Einstein.
    pub alpha: Option<T>,
    pub einstein_deviation: T,
    /// Clustered real roots of `det(S − αg)`, ascending.
    pub roots: Vec<T>,
    /// Multiplicity of each clustered root.
    pub multiplicities: Vec<usize>,
    /// `rank(S − αg)` at each root.
    pub ranks: Vec<usize>,
    /// Roots with a significant imaginary part, as `(re, im)`; never used as `α`.
    pub complex_roots: Vec<(T, T)>,
    /// Smallest rank over the real roots (`n` when there are none).
    pub min_rank: usize,
}

/// Einstein and quasi-Einstein detection from the mixed Ricci operator.
///
/// `α` candidates are the real eigenvalues of `g⁻¹S`; the rank of
/// `S − αg` is counted by singular values above `tol` relative to `‖g⁻¹S‖₂`.
pub fn quasi_einstein<T: Scalar>(
    snap: &CurvatureSnapshot<T>,
    tol: f64,
) -> Result<QuasiEinsteinResult<T>, ConditionError> {
    let sc = Scales::of(snap);
    quasi_with(snap, einstein_deviation(snap, sc.s), tol)
}

pub(crate) fn quasi_with<T: Scalar>(
    snap: &CurvatureSnapshot<T>,
    dev_s: T,
    tol: f64,
) -> Result<QuasiEinsteinResult<T>, ConditionError> {
    let n = snap.dim();
    let tol_t = T::lit(tol);
    let is_einstein = dev_s <= tol_t;
    let m = mixed(&snap.s, snap.g_inv()).to_matrix()?;
    let norm2 = spectral_norm(&m);

    let (roots, multiplicities, complex_roots) = if norm2 == T::zero() {
        (vec![T::zero()], vec![n], Vec::new())
    } else {
        let eigs = eigenvalues(&m, norm2)?;
        cluster(eigs.into_iter(), norm2)
    };

    let cutoff = tol_t * norm2;
    let ranks: Vec<usize> = roots
        .iter()
        .map(|&a| {
            let shifted = &m - DMatrix::<T>::identity(n, n) * a;
            shifted
                .singular_values()
                .iter()
                .filter(|&&sv| sv > cutoff)
                .count()
        })
        .collect();
    let min_rank = ranks.iter().copied().min().unwrap_or(n);
    let alpha = if is_einstein {
        None
    } else {
        roots
            .iter()
            .zip(&ranks)
            .filter(|(_, &r)| r <= 1)
            .map(|(&a, _)| a)
            .next()
    };
    Ok(QuasiEinsteinResult {
        is_einstein,
        is_quasi_einstein: alpha.is_some(),
        alpha,
        einstein_deviation: dev_s,
        roots,
        multiplicities,
        ranks,
        complex_roots,
        min_rank,
    })
}

/// Eigenvalues of `m` as `(re, im)`.
///
/// The QR iteration's deflation test can stall on clustered eigenvalues
/// perturbed at round-off level; a stalled run is retried with a looser
/// deflation threshold and on shifted copies.
fn eigenvalues<T: Scalar>(m: &DMatrix<T>, scale: T) -> Result<Vec<(T, T)>, ConditionError> {
    let n = m.nrows();
    let unit = m / scale;
    for loosen in [1.0, 16.0, 256.0] {
        for shift in [0.0, 1.618_033_988_749_895, -2.414_213_562_373_095] {
            let s = T::lit(shift);
            let shifted = &unit + DMatrix::<T>::identity(n, n) * s;
            let eps = T::machine_eps() * T::lit(loosen);
            if let Some(schur) = Schur::try_new(shifted, eps, SCHUR_MAX_ITER) {
                return Ok(schur
                    .complex_eigenvalues()
                    .iter()
                    .map(|z| ((z.re - s) * scale, z.im * scale))
                    .collect());
            }
        }
    }
    Err(ConditionError::Undecided("Schur iteration for g⁻¹S".into()))
}

fn spectral_norm<T: Scalar>(m: &DMatrix<T>) -> T {
    m.singular_values().iter().fold(T::zero(), |a, &v| a.max(v))
}

type Clusters<T> = (Vec<T>, Vec<usize>, Vec<(T, T)>);

/// Groups nearly real eigenvalues; each cluster is represented by its mean,
/// which is far more accurate than its members when the root is defective.
fn cluster<T: Scalar>(eigs: impl Iterator<Item = (T, T)>, scale: T) -> Clusters<T> {
    let radius = T::lit(ROOT_CLUSTER) * scale;
    let mut real = Vec::new();
    let mut complex = Vec::new();
    for (re, im) in eigs {
        if im.abs() <= radius {
            real.push(re);
        } else {
            complex.push((re, im));
        }
    }
    real.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut roots = Vec::new();
    let mut mult = Vec::new();
    let mut group: Vec<T> = Vec::new();
    for x in real {
        if let Some(&last) = group.last() {
            if x - last > radius {
                flush(&mut group, &mut roots, &mut mult);
            }
        }
        group.push(x);
    }
    flush(&mut group, &mut roots, &mut mult);
    (roots, mult, complex)
}

fn flush<T: Scalar>(group: &mut Vec<T>, roots: &mut Vec<T>, mult: &mut Vec<usize>) {
    if group.is_empty() {
        return;
    }
    let k = group.len();
    let sum = group.iter().fold(T::zero(), |a, &b| a + b);
    roots.push(sum / T::from_usize_lossy(k));
    mult.push(k);
    group.clear();
}
