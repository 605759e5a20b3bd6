use super::{quasi::quasi_with, ConditionError, Products};
use crate::chartgeo::CurvatureSnapshot;
use crate::scalar::{ratio, Scalar};
use crate::tensorkit::DenseTensor;

/// Below this fraction of its natural scale a tensor's own norm is not trusted
/// as a denominator.
pub(crate) const NOISE_FLOOR: f64 = 1e-6;

/// Membership of a point in the sets `U_R`, `U_S`, `U_C`, `U`, `𝒰`, `U₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct SetMembership<T> {
    pub in_ur: bool,
    pub in_us: bool,
    pub in_uc: bool,
    /// `Q(S,R) ≠ 0`
    pub in_u: bool,
    /// `U ∩ U_S ∩ U_C`
    pub in_curly_u: bool,
    /// `U_S ∩ U_C` and `rank(S − αg) ≥ 2` for every real `α`
    pub in_u1: bool,
    /// `‖R − κ/((n−1)n)·G‖ / ‖R‖`
    pub dev_r: T,
    /// `‖S − (κ/n)·g‖ / ‖S‖`
    pub dev_s: T,
    /// `‖C‖ / ‖R‖`
    pub dev_c: T,
    /// `‖Q(S,R)‖ / (‖S‖·‖R‖)`
    pub dev_q: T,
    /// Smallest `rank(S − αg)` over the real candidate roots.
    pub min_ricci_rank: usize,
    pub tol: T,
}

pub(crate) fn einstein_deviation<T: Scalar>(snap: &CurvatureSnapshot<T>, s_scale: T) -> T {
    let n = T::from_usize_lossy(snap.dim());
    let dev = (&snap.s - &snap.g().scale(snap.kappa / n)).norm();
    ratio(dev, snap.s.norm().max(T::lit(NOISE_FLOOR) * s_scale))
}

/// Decides each membership by comparing the defining deviation with `tol`.
pub fn classify_sets<T: Scalar>(
    snap: &CurvatureSnapshot<T>,
    tol: f64,
) -> Result<SetMembership<T>, ConditionError> {
    classify_with(&Products::new(snap), tol)
}

pub(crate) fn classify_with<T: Scalar>(
    p: &Products<'_, T>,
    tol: f64,
) -> Result<SetMembership<T>, ConditionError> {
    let snap = p.snap;
    let sc = p.scales();
    let floor = T::lit(NOISE_FLOOR);
    let tol_t = T::lit(tol);
    let nf = T::from_usize_lossy(snap.dim());

    let dev_r = if snap.dim() >= 2 {
        let model: DenseTensor<T> = snap.big_g.scale(snap.kappa / ((nf - T::one()) * nf));
        ratio((&snap.r - &model).norm(), sc.r)
    } else {
        T::zero()
    };
    let dev_s = einstein_deviation(snap, sc.s);
    let dev_c = ratio(snap.c.norm(), sc.r);
    let dev_q = ratio(
        p.q_s_r()?.norm(),
        (snap.s.norm() * sc.r).max(floor * sc.s * sc.r),
    );

    let in_ur = dev_r > tol_t;
    let in_us = dev_s > tol_t;
    let in_uc = dev_c > tol_t;
    let in_u = dev_q > tol_t;
    let qe = quasi_with(snap, dev_s, tol)?;
    Ok(SetMembership {
        in_ur,
        in_us,
        in_uc,
        in_u,
        in_curly_u: in_u && in_us && in_uc,
        in_u1: in_us && in_uc && qe.min_rank >= 2,
        dev_r,
        dev_s,
        dev_c,
        dev_q,
        min_ricci_rank: qe.min_rank,
        tol: tol_t,
    })
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
    fn space_form_is_in_no_set() {
        for kappa in [0.0, 12.0, -12.0] {
            let snap = space_form_snapshot::<f64>(4, kappa, Signature::lorentzian(4)).unwrap();
            let m = classify_sets(&snap, 1e-8).unwrap();
            assert!(!m.in_ur && !m.in_us && !m.in_uc && !m.in_curly_u && !m.in_u1, "{m:?}");
        }
    }

    #[test]
    fn sphere_product_memberships() {
        let s2 = space_form_snapshot::<f64>(2, 2.0, Signature::riemannian(2)).unwrap();
        let snap = product_snapshot(&s2, &s2).unwrap();
        let m = classify_sets(&snap, 1e-8).unwrap();
        assert!(!m.in_us && m.in_uc && m.in_ur);
        // S = g here, so Q(S,R) = Q(g,R), which does not vanish
        assert!(m.in_u);
        assert!(!m.in_curly_u);
    }

    #[test]
    fn random_point_is_generic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_metric(&mut rng, 5, 1);
        let r = random_gen_curvature(&mut rng, &m.g, 4);
        let snap = synthetic_snapshot(m.g.clone(), r).unwrap();
        let s = classify_sets(&snap, 1e-8).unwrap();
        assert!(s.in_ur && s.in_us && s.in_uc && s.in_u && s.in_curly_u && s.in_u1);
    }

    #[test]
    fn ricci_flat_point_is_outside_us() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_metric(&mut rng, 5, 0);
        let r = random_gen_curvature(&mut rng, &m.g, 3);
        let snap = synthetic_snapshot(m.g.clone(), r).unwrap();
        // keep only the Weyl part: Ricci flat up to round-off
        let weyl = synthetic_snapshot(m.g.clone(), snap.c.clone()).unwrap();
        assert!(weyl.s.norm() < 1e-12 * weyl.r.norm());
        let s = classify_sets(&weyl, 1e-8).unwrap();
        assert!(!s.in_us && !s.in_u && s.in_uc && s.in_ur, "{s:?}");
    }
}
