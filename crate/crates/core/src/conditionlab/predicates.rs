use super::fit::{fit_with, ConditionId, FitContext, FitStatus};
use super::ptensor::v_tensor;
use super::sets::{classify_with, einstein_deviation, NOISE_FLOOR};
use super::{rel_gap, ConditionError, Products};
use crate::chartgeo::CurvatureSnapshot;
use crate::scalar::{ratio, Scalar};
use crate::tensorkit::DenseTensor;

fn floor<T: Scalar>() -> T {
    T::lit(NOISE_FLOOR)
}

fn require_dim(op: &'static str, dim: usize, min: usize) -> Result<(), ConditionError> {
    if dim < min {
        return Err(ConditionError::DimensionTooSmall { op, dim, min });
    }
    Ok(())
}

/// Relative residual of `S∘R = κ/(n−1)·R`, with `(S∘R)_{hijk} = S_h^{ l} R_{lijk}`.
pub fn check_h1<T: Scalar>(snap: &CurvatureSnapshot<T>) -> Result<T, ConditionError> {
    Ok(h1_with(&Products::new(snap))?.0)
}

pub(crate) fn h1_with<T: Scalar>(p: &Products<'_, T>) -> Result<(T, T), ConditionError> {
    let snap = p.snap;
    require_dim("check_h1", snap.dim(), 2)?;
    let sc = p.scales();
    let coef = snap.kappa / (T::from_usize_lossy(snap.dim()) - T::one());
    let v = v_tensor(snap)?;
    let res = rel_gap(&v, &snap.r.scale(coef), sc.g_inv * sc.s * sc.r, floor())?;
    Ok((res, coef))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Genein1Report<T> {
    /// `κ/((n−1)n)`
    pub coefficient: T,
    /// `R·C − C·R` against `coefficient·Q(g,R)`
    pub residual_qgr: T,
    /// `R·C − C·R` against `coefficient·Q(g,C)`
    pub residual_qgc: T,
}

/// Both equalities of `R·C − C·R = κ/((n−1)n)·Q(g,R) = κ/((n−1)n)·Q(g,C)`.
///
/// Rejects snapshots whose Ricci tensor deviates from `(κ/n)g` by more than `tol`.
pub fn check_genein1<T: Scalar>(
    snap: &CurvatureSnapshot<T>,
    tol: f64,
) -> Result<Genein1Report<T>, ConditionError> {
    genein1_with(&Products::new(snap), tol)
}

pub(crate) fn genein1_with<T: Scalar>(
    p: &Products<'_, T>,
    tol: f64,
) -> Result<Genein1Report<T>, ConditionError> {
    let snap = p.snap;
    let n = snap.dim();
    require_dim("check_genein1", n, 4)?;
    let sc = p.scales();
    let dev = einstein_deviation(snap, sc.s);
    if dev > T::lit(tol) {
        return Err(ConditionError::NotEinstein {
            deviation: dev.to_f64_lossy(),
        });
    }
    let nf = T::from_usize_lossy(n);
    let coefficient = snap.kappa / ((nf - T::one()) * nf);
    let d = p.difference()?;
    let natural = sc.action(sc.r);
    Ok(Genein1Report {
        coefficient,
        residual_qgr: rel_gap(d, &p.q_g_r()?.scale(coefficient), natural, floor())?,
        residual_qgc: rel_gap(d, &p.q_g_c()?.scale(coefficient), natural, floor())?,
    })
}

/// Residual of the fiber condition
/// `S̃∘R̃ = κ̃/(n−1)·R̃ + εa²(g̃_{βγ}S̃_{μδ} − g̃_{βδ}S̃_{μγ}) − εa²κ̃/(n−1)·G̃`
/// on an `(n−1)`-dimensional fiber snapshot.
pub fn check_sr2<T: Scalar>(fiber: &CurvatureSnapshot<T>, ea2: T) -> Result<T, ConditionError> {
    sr2_with(&Products::new(fiber), ea2)
}

pub(crate) fn sr2_with<T: Scalar>(p: &Products<'_, T>, ea2: T) -> Result<T, ConditionError> {
    let snap = p.snap;
    let m = snap.dim();
    require_dim("check_sr2", m, 3)?;
    let sc = p.scales();
    let c = snap.kappa / T::from_usize_lossy(m);
    let g = snap.g();
    let s = &snap.s;
    let x = DenseTensor::from_fn(m, 4, |ix| {
        let (mu, b, gm, d) = (ix[0], ix[1], ix[2], ix[3]);
        g.at2(b, gm) * s.at2(mu, d) - g.at2(b, d) * s.at2(mu, gm)
    });
    let rhs = DenseTensor::linear_combination(&[
        (c, &snap.r),
        (ea2, &x),
        (-ea2 * c, &snap.big_g),
    ])?;
    let v = v_tensor(snap)?;
    Ok(rel_gap(&v, &rhs, sc.g_inv * sc.s * sc.r, floor())?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct D1D3Report<T> {
    /// `R̃·S̃ = εa²·Q(g̃,S̃)`
    pub d1: T,
    /// `(n−3)(R̃·C̃ − C̃·R̃) = Q(S̃,R̃) − κ̃/((n−1)(n−2))·Q(g̃,R̃)`; `None` on a 3-dimensional fiber.
    pub d3: Option<T>,
}

/// Residuals of the two fiber consequences of SR2; `n − 1` is the fiber dimension.
pub fn check_d1_d3<T: Scalar>(
    fiber: &CurvatureSnapshot<T>,
    ea2: T,
) -> Result<D1D3Report<T>, ConditionError> {
    d1_d3_with(&Products::new(fiber), ea2)
}

pub(crate) fn d1_d3_with<T: Scalar>(
    p: &Products<'_, T>,
    ea2: T,
) -> Result<D1D3Report<T>, ConditionError> {
    let snap = p.snap;
    let m = snap.dim();
    require_dim("check_d1_d3", m, 3)?;
    let sc = p.scales();
    let d1 = rel_gap(p.r_s()?, &p.q_g_s()?.scale(ea2), sc.action(sc.s), floor())?;
    let d3 = if m >= 4 {
        let mf = T::from_usize_lossy(m);
        let lhs = p.difference()?.scale(mf - T::lit(2.0));
        let rhs = DenseTensor::linear_combination(&[
            (T::one(), p.q_s_r()?),
            (-snap.kappa / (mf * (mf - T::one())), p.q_g_r()?),
        ])?;
        Some(rel_gap(&lhs, &rhs, sc.action(sc.r), floor())?)
    } else {
        None
    };
    Ok(D1D3Report { d1, d3 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem21Report<T> {
    /// `R·C − C·R = L·Q(g,C)` holds with a non-degenerate fit.
    pub hypothesis_holds: bool,
    pub in_us_uc: bool,
    /// Hypothesis or membership fails; nothing to verify.
    pub vacuous: bool,
    pub l: Option<T>,
    /// `R·R` against `L·Q(g,R)`; zero when vacuous.
    pub rr_residual: T,
    /// `‖C·R‖` relative to its natural scale; zero when vacuous.
    pub cr_relative: T,
    /// Conclusions verified (always true when vacuous).
    pub passed: bool,
}

/// If `R·C − C·R = L·Q(g,C)` holds on `U_S ∩ U_C`, checks `R·R = L·Q(g,R)` and `C·R = 0`.
pub fn theorem2_1_check<T: Scalar>(
    snap: &CurvatureSnapshot<T>,
    ctx: &FitContext,
) -> Result<Theorem21Report<T>, ConditionError> {
    theorem21_with(&Products::new(snap), ctx)
}

pub(crate) fn theorem21_with<T: Scalar>(
    p: &Products<'_, T>,
    ctx: &FitContext,
) -> Result<Theorem21Report<T>, ConditionError> {
    let n = p.snap.dim();
    require_dim("theorem2_1_check", n, 4)?;
    let fit = fit_with(p, ConditionId::Qgc, ctx)?;
    let hypothesis_holds = fit.holds && fit.status == FitStatus::Fitted;
    let sets = classify_with(p, ctx.tol)?;
    let in_us_uc = sets.in_us && sets.in_uc;
    let l = fit.coefficient();
    if !(hypothesis_holds && in_us_uc) {
        return Ok(Theorem21Report {
            hypothesis_holds,
            in_us_uc,
            vacuous: true,
            l,
            rr_residual: T::zero(),
            cr_relative: T::zero(),
            passed: true,
        });
    }
    let lv = l.unwrap_or_else(T::zero);
    let sc = p.scales();
    let natural = sc.action(sc.r);
    let rr_residual = rel_gap(p.r_r()?, &p.q_g_r()?.scale(lv), natural, floor())?;
    let cr_relative = ratio(p.c_r()?.norm(), natural);
    let tol = T::lit(ctx.tol);
    Ok(Theorem21Report {
        hypothesis_holds,
        in_us_uc,
        vacuous: false,
        l,
        rr_residual,
        cr_relative,
        passed: rr_residual <= tol && cr_relative <= tol,
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

    fn s2s2() -> CurvatureSnapshot<f64> {
        let s2 = space_form_snapshot::<f64>(2, 2.0, Signature::riemannian(2)).unwrap();
        product_snapshot(&s2, &s2).unwrap()
    }

    #[test]
    fn genein1_on_sphere_product() {
        let rep = check_genein1(&s2s2(), 1e-8).unwrap();
        assert!((rep.coefficient - 1.0 / 3.0).abs() < 1e-15);
        assert!(rep.residual_qgr < 1e-12 && rep.residual_qgc < 1e-12, "{rep:?}");
    }

    #[test]
    fn genein1_rejects_non_einstein() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_metric(&mut rng, 4, 0);
        let r = random_gen_curvature(&mut rng, &m.g, 3);
        let snap = synthetic_snapshot(m.g.clone(), r).unwrap();
        assert!(matches!(
            check_genein1(&snap, 1e-8),
            Err(ConditionError::NotEinstein { .. })
        ));
        let flat = space_form_snapshot::<f64>(4, 0.0, Signature::riemannian(4)).unwrap();
        let rep = check_genein1(&flat, 1e-8).unwrap();
        assert_eq!((rep.residual_qgr, rep.residual_qgc), (0.0, 0.0));
    }

    #[test]
    fn h1_on_flat_and_space_forms() {
        let flat = space_form_snapshot::<f64>(4, 0.0, Signature::lorentzian(4)).unwrap();
        assert_eq!(check_h1(&flat).unwrap(), 0.0);
        let s4 = space_form_snapshot::<f64>(4, 12.0, Signature::riemannian(4)).unwrap();
        // S∘R = 3R but κ/(n−1) = 4
        assert!((check_h1(&s4).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn sr2_einstein_fiber_any_ea2() {
        let fiber = s2s2();
        for ea2 in [-1.5, 0.0, 0.3, 7.0] {
            assert!(check_sr2(&fiber, ea2).unwrap() < 1e-14);
            let d = check_d1_d3(&fiber, ea2).unwrap();
            // R·S = 0 and Q(g,S) = 0 on an Einstein fiber
            assert_eq!(d.d1, 0.0);
        }
    }

    #[test]
    fn sr2_fails_on_sphere_times_line() {
        let s2 = space_form_snapshot::<f64>(2, 2.0, Signature::riemannian(2)).unwrap();
        let line = space_form_snapshot::<f64>(1, 0.0, Signature::riemannian(1)).unwrap();
        let fiber = product_snapshot(&s2, &line).unwrap();
        assert!(check_sr2(&fiber, 0.0).unwrap() > 0.1);
        assert!(check_d1_d3(&fiber, 0.0).unwrap().d3.is_none());
    }

    #[test]
    fn unit_three_sphere_satisfies_sr2_with_zero() {
        let s3 = space_form_snapshot::<f64>(3, 6.0, Signature::riemannian(3)).unwrap();
        assert!(check_sr2(&s3, 0.0).unwrap() < 1e-14);
    }

    #[test]
    fn theorem21_vacuous_cases() {
        let ctx = FitContext::default();
        assert!(theorem2_1_check(&s2s2(), &ctx).unwrap().vacuous);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = random_metric(&mut rng, 5, 1);
        let r = random_gen_curvature(&mut rng, &m.g, 3);
        let snap = synthetic_snapshot(m.g.clone(), r).unwrap();
        let rep = theorem2_1_check(&snap, &ctx).unwrap();
        assert!(rep.vacuous && !rep.hypothesis_holds && rep.passed);
    }
}
