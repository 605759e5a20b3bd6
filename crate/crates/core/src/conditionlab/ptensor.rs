use super::{ConditionError, Products};
use crate::chartgeo::CurvatureSnapshot;
use crate::scalar::{ratio, Scalar};
use crate::tensorkit::{operator_compose, DenseTensor, TensorError};

/// `V_{hijk} = S_h^{ l} R_{lijk}`.
pub fn v_tensor<T: Scalar>(snap: &CurvatureSnapshot<T>) -> Result<DenseTensor<T>, TensorError> {
    operator_compose(&snap.s, snap.g_inv(), &snap.r)
}

/// The 12-term `(0,6)` tensor built from a metric `g` and a `(0,4)` tensor `V`.
///
/// ```text
/// P_hijklm = g_hl V_mijk − g_hm V_lijk − g_il V_mhjk + g_im V_lhjk
///          + g_jl V_mkhi − g_jm V_lkhi − g_kl V_mjhi + g_km V_ljhi
///          − g_ij (V_hklm + V_khlm) − g_hk (V_ijlm + V_jilm)
///          + g_ik (V_hjlm + V_jhlm) + g_hj (V_iklm + V_kilm)
/// ```
pub fn p_from_v<T: Scalar>(
    g: &DenseTensor<T>,
    v: &DenseTensor<T>,
) -> Result<DenseTensor<T>, TensorError> {
    if g.rank() != 2 {
        return Err(TensorError::RankMismatch {
            expected: 2,
            found: g.rank(),
        });
    }
    if v.rank() != 4 {
        return Err(TensorError::RankMismatch {
            expected: 4,
            found: v.rank(),
        });
    }
    if g.dim() != v.dim() {
        return Err(TensorError::DimensionMismatch {
            left: g.dim(),
            right: v.dim(),
        });
    }
    let n = g.dim();
    let gg = |a: usize, b: usize| g.at2(a, b);
    let vv = |a: usize, b: usize, c: usize, d: usize| v.at4(a, b, c, d);
    Ok(DenseTensor::from_fn(n, 6, |ix| {
        let (h, i, j, k, l, m) = (ix[0], ix[1], ix[2], ix[3], ix[4], ix[5]);
        gg(h, l) * vv(m, i, j, k) - gg(h, m) * vv(l, i, j, k) - gg(i, l) * vv(m, h, j, k)
            + gg(i, m) * vv(l, h, j, k)
            + gg(j, l) * vv(m, k, h, i)
            - gg(j, m) * vv(l, k, h, i)
            - gg(k, l) * vv(m, j, h, i)
            + gg(k, m) * vv(l, j, h, i)
            - gg(i, j) * (vv(h, k, l, m) + vv(k, h, l, m))
            - gg(h, k) * (vv(i, j, l, m) + vv(j, i, l, m))
            + gg(i, k) * (vv(h, j, l, m) + vv(j, h, l, m))
            + gg(h, j) * (vv(i, k, l, m) + vv(k, i, l, m))
    }))
}

/// `P` of a snapshot, assembled from `V = S∘R`.
pub fn p_tensor<T: Scalar>(snap: &CurvatureSnapshot<T>) -> Result<DenseTensor<T>, TensorError> {
    p_from_v(snap.g(), &v_tensor(snap)?)
}

/// Relative residual of `(n−2)(R·C − C·R) = Q(S,R) − κ/(n−1)·Q(g,R) + P`.
///
/// Normalized by the largest of the four term norms, so cancellation among
/// large terms is not mistaken for agreement.
pub fn ge_residual<T: Scalar>(snap: &CurvatureSnapshot<T>) -> Result<T, ConditionError> {
    ge_residual_with(&Products::new(snap))
}

pub(crate) fn ge_residual_with<T: Scalar>(p: &Products<'_, T>) -> Result<T, ConditionError> {
    let n = p.snap.dim();
    if n < 4 {
        return Err(ConditionError::DimensionTooSmall {
            op: "ge_residual",
            dim: n,
            min: 4,
        });
    }
    let nf = T::from_usize_lossy(n);
    let lhs = p.difference()?.scale(nf - T::lit(2.0));
    let qsr = p.q_s_r()?;
    let qgr = p.q_g_r()?.scale(p.snap.kappa / (nf - T::one()));
    let pt = p.p()?;
    let mut diff = lhs.clone();
    diff.axpy(-T::one(), qsr)?;
    diff.axpy(T::one(), &qgr)?;
    diff.axpy(-T::one(), pt)?;
    let scale = [lhs.norm(), qsr.norm(), qgr.norm(), pt.norm()]
        .into_iter()
        .fold(T::zero(), |a, b| a.max(b));
    Ok(ratio(diff.norm(), scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgeo::{product_snapshot, space_form_snapshot, synthetic_snapshot};
    use crate::tensorkit::testing::{random_gen_curvature, random_metric};
    use crate::tensorkit::Signature;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_and_ricci_flat_give_zero_p() {
        let flat = space_form_snapshot::<f64>(5, 0.0, Signature::lorentzian(5)).unwrap();
        assert!(p_tensor(&flat).unwrap().is_zero());
        assert_eq!(ge_residual(&flat).unwrap(), 0.0);
    }

    #[test]
    fn identity_holds_on_random_snapshots() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 4..=6 {
            for neg in [0, 1, 2] {
                let m = random_metric(&mut rng, n, neg);
                let r = random_gen_curvature(&mut rng, &m.g, 3);
                let snap = synthetic_snapshot(m.g.clone(), r).unwrap();
                let res = ge_residual(&snap).unwrap();
                assert!(res < 1e-12, "n={n} neg={neg} res={res:e}");
            }
        }
    }

    #[test]
    fn sphere_product_identity() {
        let s2 = space_form_snapshot::<f64>(2, 2.0, Signature::riemannian(2)).unwrap();
        let snap = product_snapshot(&s2, &s2).unwrap();
        assert!(ge_residual(&snap).unwrap() < 1e-14);
    }

    #[test]
    fn three_dimensions_rejected() {
        let s3 = space_form_snapshot::<f64>(3, 6.0, Signature::riemannian(3)).unwrap();
        assert!(matches!(
            ge_residual(&s3),
            Err(ConditionError::DimensionTooSmall { min: 4, .. })
        ));
    }

    #[test]
    fn p_from_v_checks_shapes() {
        let g = DenseTensor::<f64>::identity(4);
        assert!(p_from_v(&g, &DenseTensor::zeros(4, 2)).is_err());
        assert!(p_from_v(&g, &DenseTensor::zeros(3, 4)).is_err());
    }
}
