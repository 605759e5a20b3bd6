use super::*;
use crate::conditionlab::{check_d1_d3, check_sr2, fit_condition, quasi_einstein, ConditionId, FitContext};
use crate::tensorkit::random::random_frame;
use crate::warpedlab::{warped_snapshot, WarpedSpec, WarpingFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn diag1200() -> HypersurfaceData<f64> {
    diagonal_fixture(&[1.0, 2.0, 0.0, 0.0], 20.0, 1.0).unwrap()
}

#[test]
fn e1_lambda_examples() {
    assert!((e1_lambda(&diag1200()).unwrap().lambda + 2.0).abs() < 1e-14);
    let id = diagonal_fixture(&[1.0f64; 5], 3.0, -1.0).unwrap();
    assert!((e1_lambda(&id).unwrap().lambda + 4.0).abs() < 1e-14);
    let j = jordan3_fixture(4, 20.0, 1.0).unwrap();
    let fit = e1_lambda(&j).unwrap();
    assert_eq!(fit.lambda, 0.0);
    assert!(!fit.umbilic);
    let zero = diagonal_fixture(&[0.0; 3], 1.0, 1.0).unwrap();
    assert!(e1_lambda(&zero).unwrap().umbilic);
}

#[test]
fn e1_rejects_three_nonzero_principal_curvatures() {
    let d = diagonal_fixture(&[1.0, 2.0, 3.0], 0.0, 1.0).unwrap();
    assert!(matches!(e1_lambda(&d), Err(GaussError::E1Failed { .. })));
    assert!(matches!(e2_check(&d), Err(GaussError::E1Failed { .. })));
}

#[test]
fn solve_lambda_stores_value() {
    let mut d = diag1200();
    assert_eq!(d.lambda, None);
    d.solve_lambda().unwrap();
    assert!((d.lambda.unwrap() + 2.0).abs() < 1e-14);
}

#[test]
fn construction_guards() {
    let g = DenseTensor::<f64>::identity(3);
    let mut h = DenseTensor::zeros(3, 2);
    h.set(&[0, 1], 1.0);
    assert!(matches!(
        HypersurfaceData::new(g.clone(), h, 1.0, 1.0),
        Err(GaussError::NotSelfAdjoint { .. })
    ));
    assert!(matches!(
        HypersurfaceData::new(g, DenseTensor::zeros(3, 2), 1.0, 0.5),
        Err(GaussError::BadSign(_))
    ));
    assert!(jordan3_fixture::<f64>(2, 1.0, 1.0).is_err());
}

#[test]
fn umbilic_free_fiber_is_space_form() {
    let d = diagonal_fixture(&[0.0; 4], 20.0, 1.0).unwrap();
    let snap = gauss_snapshot(&d).unwrap();
    // c = 1
    assert!(snap.r.rel_distance(&snap.big_g).unwrap() < 1e-15);
    assert!(snap.c.norm() < 1e-14);
    let e2 = e2_check(&d).unwrap();
    assert!(e2.residual < 1e-15 && e2.rs_residual == 0.0);
    assert!(e3_check(&d).unwrap().unwrap() < 1e-15);
    let e4 = e4_check(&d, 1e-10).unwrap();
    assert!(e4.lambda_zero && e4.trace_identity);
}

#[test]
fn diagonal_ricci_eigenvalues() {
    let d = diag1200();
    let snap = gauss_snapshot(&d).unwrap();
    // (n−2)c = 3·1
    let dev = &snap.s - &snap.g().scale(3.0);
    let expected = DenseTensor::diagonal(&[2.0, 2.0, 0.0, 0.0]);
    assert!(dev.rel_distance(&expected).unwrap() < 1e-14);
}

#[test]
fn gauss_contraction_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (data, sign) in [(diag1200(), 1.0), (jordan3_fixture(5, -7.0, -1.0).unwrap(), -1.0)] {
        let p = random_frame::<f64, _>(&mut rng, data.fiber_dim());
        let data = data.transformed(&p).unwrap();
        let snap = gauss_snapshot(&data).unwrap();
        let a = data.shape_operator().unwrap();
        let n = data.n() as f64;
        let expected = sign * (a.trace().powi(2) - (&a * &a).trace()) + (n - 1.0) * (n - 2.0) * data.c();
        assert!((snap.kappa - expected).abs() <= 1e-10 * expected.abs().max(1.0));
    }
}

#[test]
fn e2_e3_hold_on_diagonal_fixture() {
    let d = diag1200();
    let e2 = e2_check(&d).unwrap();
    assert!(e2.residual < 1e-12 && e2.rs_residual < 1e-12, "{e2:?}");
    assert!((e2.mu - (3.0 + 2.0)).abs() < 1e-14);
    assert!(e3_check(&d).unwrap().unwrap() < 1e-12);
    let e4 = e4_check(&d, 1e-10).unwrap();
    assert!(!e4.lambda_zero && !e4.kappa_relation && !e4.trace_identity);
}

#[test]
fn e3_skipped_on_three_dimensional_fiber() {
    let j = jordan3_fixture(3, -12.0, 1.0).unwrap();
    assert_eq!(e3_check(&j).unwrap(), None);
}

#[test]
fn jordan_fixture_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (m, tau, sign) in [(3, -12.0, 1.0), (4, 20.0, 1.0), (5, 7.5, -1.0)] {
        let base = jordan3_fixture(m, tau, sign).unwrap();
        let p = random_frame::<f64, _>(&mut rng, m);
        for data in [base.clone(), base.transformed(&p).unwrap()] {
            let snap = gauss_snapshot(&data).unwrap();
            let q = quasi_einstein(&snap, 1e-8).unwrap();
            assert!(!q.is_einstein && q.is_quasi_einstein, "m={m}: {q:?}");
            assert!((q.alpha.unwrap() - (data.n() as f64 - 2.0) * data.c()).abs() < 1e-9);
            let e4 = e4_check(&data, 1e-10).unwrap();
            assert!(e4.lambda_zero && e4.kappa_relation && e4.trace_identity, "{e4:?}");
            let e2 = e2_check(&data).unwrap();
            assert!(e2.residual < 1e-10, "{e2:?}");
            assert!(check_sr2(&snap, data.c()).unwrap() < 1e-10);
            assert!(check_d1_d3(&snap, data.c()).unwrap().d1 < 1e-10);
            if m >= 4 {
                assert!(e3_check(&data).unwrap().unwrap() < 1e-9);
                assert!(check_d1_d3(&snap, data.c()).unwrap().d3.unwrap() < 1e-9);
            }
        }
    }
}

#[test]
fn sr2_fails_with_wrong_ea2() {
    let data = jordan3_fixture(4, 20.0, 1.0).unwrap();
    let snap = gauss_snapshot(&data).unwrap();
    assert!(check_sr2(&snap, data.c() + 0.5).unwrap() > 1e-3);
}

// With F = (ax+b)² and ea2 = c the warped product satisfies S∘R = κ/(n−1)·R with
// κ = 0 and a null rank-one Ricci tensor. Both sides of the A1 equation vanish,
// so the point lies outside U and L is not determined by the fit.
#[test]
fn warped_product_over_jordan_fiber_is_degenerate_for_a1() {
    for (m, eps, a, b) in [(3usize, -1.0, 1.0, 2.0), (4, 1.0, 0.5, 3.0), (4, -1.0, 1.5, 4.0)] {
        let n = (m + 1) as f64;
        let tau = eps * a * a * (n - 1.0) * n;
        let fiber = gauss_snapshot(&jordan3_fixture(m, tau, 1.0).unwrap()).unwrap();
        for x1 in [0.1, 0.7] {
            let spec = WarpedSpec::new(eps, WarpingFunction::Quadratic { a, b }, x1, fiber.clone()).unwrap();
            let snap = warped_snapshot(&spec).unwrap();
            let fit = fit_condition(&snap, ConditionId::A1, &FitContext::default()).unwrap();
            assert_eq!(fit.status, crate::conditionlab::FitStatus::Degenerate, "m={m}: {fit:?}");
            assert!(fit.lhs_norm <= 1e-12 * snap.r.norm().powi(2));
            assert!(snap.kappa.abs() < 1e-12);
            assert!(crate::conditionlab::check_h1(&snap).unwrap() < 1e-12);
            let sets = crate::conditionlab::classify_sets(&snap, 1e-8).unwrap();
            assert!(!sets.in_u);
        }
    }
}
