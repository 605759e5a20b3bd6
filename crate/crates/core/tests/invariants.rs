use grw_core::chartgeo::synthetic_snapshot;
use grw_core::conditionlab::{classify_sets, fit_condition, ge_residual, quasi_einstein, ConditionId, FitContext};
use grw_core::tensorkit::random::{random_gen_curvature, random_metric};
use grw_core::Snapshot;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_snapshot(seed: u64, dim: usize, negative: usize, terms: usize) -> Snapshot {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_metric(&mut rng, dim, negative);
    let r = random_gen_curvature(&mut rng, &m.g, terms);
    synthetic_snapshot(m.g, r).unwrap()
}

fn scaled(snap: &Snapshot, lambda: f64) -> Snapshot {
    synthetic_snapshot(snap.g().clone(), snap.r.scale(lambda)).unwrap()
}

const SINGLE: [ConditionId; 9] = [
    ConditionId::A1,
    ConditionId::Geneintsu,
    ConditionId::Qgc,
    ConditionId::R77,
    ConditionId::R777,
    ConditionId::R877,
    ConditionId::Pseudo,
    ConditionId::RicciPseudo,
    ConditionId::Qsc,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ge_identity_holds(seed in any::<u64>(), dim in 4usize..=6, neg in 0usize..=2, terms in 1usize..=4) {
        let snap = random_snapshot(seed, dim, neg.min(dim), terms);
        let res = ge_residual(&snap).unwrap();
        prop_assert!(res <= 1e-11, "residual {res:e}");
    }

    #[test]
    fn fits_are_scale_invariant(seed in any::<u64>(), dim in 4usize..=5, lambda in prop::sample::select(vec![0.5, 2.0, 10.0])) {
        let snap = random_snapshot(seed, dim, 1, 2);
        let big = scaled(&snap, lambda);
        let ctx = FitContext::default();
        for id in SINGLE {
            let a = fit_condition(&snap, id, &ctx).unwrap();
            let b = fit_condition(&big, id, &ctx).unwrap();
            prop_assert_eq!(a.holds, b.holds);
            prop_assert_eq!(a.status, b.status);
            prop_assert!((a.residual - b.residual).abs() <= 1e-8 * a.residual.max(1e-12), "{id}: {} vs {}", a.residual, b.residual);
        }
    }

    #[test]
    fn ricci_and_weyl_sets_imply_curvature_set(seed in any::<u64>(), dim in 4usize..=6, neg in 0usize..=1) {
        let snap = random_snapshot(seed, dim, neg, 2);
        let m = classify_sets(&snap, 1e-8).unwrap();
        if m.in_us && m.in_uc {
            prop_assert!(m.in_ur);
        }
        if m.in_u1 {
            prop_assert!(m.in_us && m.in_uc && m.min_ricci_rank >= 2);
        }
    }

    #[test]
    fn generic_points_are_not_quasi_einstein(seed in any::<u64>(), dim in 4usize..=6) {
        let snap = random_snapshot(seed, dim, 0, 3);
        let q = quasi_einstein(&snap, 1e-8).unwrap();
        prop_assert!(!q.is_einstein);
        prop_assert!(!q.is_quasi_einstein, "{q:?}");
    }
}

#[test]
fn weyl_only_curvature_is_outside_ricci_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let snap = grw_core::conditionlab::synthetic::einstein_snapshot::<f64, _>(&mut rng, 5, 0.0, 1).unwrap();
    let m = classify_sets(&snap, 1e-8).unwrap();
    assert!(!m.in_us && m.in_uc && m.in_ur);
}
