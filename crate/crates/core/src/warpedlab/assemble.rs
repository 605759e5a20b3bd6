use std::sync::Arc;

use super::{warp_scalars, warping_jet, WarpError, WarpScalars, WarpingFunction, WarpingJet};
use crate::chartgeo::{christoffel, CurvatureSnapshot, MetricField, TwoJet};
use crate::jet::Jet;
use crate::scalar::{ratio, Scalar};
use crate::tensorkit::{DenseTensor, MetricPoint, Signature, Symmetry};

/// Warped product `M̄ ×_F Ñ` with one-dimensional base `ḡ₁₁ = ε`, evaluated at
/// base coordinate `x1` over a pointwise fiber snapshot.
#[derive(Clone)]
pub struct WarpedSpec<T> {
    pub epsilon: T,
    pub warping: WarpingFunction<T>,
    pub x1: T,
    pub fiber: CurvatureSnapshot<T>,
}

impl<T: Scalar> std::fmt::Debug for WarpedSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WarpedSpec")
            .field("epsilon", &self.epsilon)
            .field("warping", &self.warping)
            .field("x1", &self.x1)
            .field("fiber_dim", &self.fiber.dim())
            .finish()
    }
}

/// Everything the closed-form formulas need at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpedPoint<T> {
    /// Total dimension `1 + dim Ñ`.
    pub n: usize,
    pub epsilon: T,
    pub jet: WarpingJet<T>,
    pub scalars: WarpScalars<T>,
}

impl<T: Scalar> WarpedSpec<T> {
    pub fn new(
        epsilon: T,
        warping: WarpingFunction<T>,
        x1: T,
        fiber: CurvatureSnapshot<T>,
    ) -> Result<Self, WarpError> {
        let spec = Self {
            epsilon,
            warping,
            x1,
            fiber,
        };
        spec.point()?;
        Ok(spec)
    }

    /// Validates the spec and evaluates the warping jet.
    pub fn point(&self) -> Result<WarpedPoint<T>, WarpError> {
        if self.epsilon != T::one() && self.epsilon != -T::one() {
            return Err(WarpError::InvalidParameters("ε must be ±1"));
        }
        let m = self.fiber.dim();
        if m < 3 {
            return Err(WarpError::DimensionTooSmall { dim: m, min: 3 });
        }
        let jet = warping_jet(&self.warping, self.x1)?;
        Ok(WarpedPoint {
            n: m + 1,
            epsilon: self.epsilon,
            jet,
            scalars: warp_scalars(&jet, self.epsilon),
        })
    }

    pub fn dim(&self) -> usize {
        self.fiber.dim() + 1
    }

    /// Same spec at another base coordinate.
    pub fn at(&self, x1: T) -> Self {
        Self {
            x1,
            ..self.clone()
        }
    }
}

fn base_signature(epsilon: f64) -> Signature {
    if epsilon < 0.0 {
        Signature::new(1, 0)
    } else {
        Signature::new(0, 1)
    }
}

/// `g = ε dx¹² ⊕ F g̃` at the point.
pub fn warped_metric<T: Scalar>(spec: &WarpedSpec<T>) -> Result<MetricPoint<T>, WarpError> {
    let wp = spec.point()?;
    let f = wp.jet.f;
    let n = wp.n;
    let fib = &spec.fiber;
    let block = |t00: T, t: &DenseTensor<T>, s: T| {
        DenseTensor::from_fn(n, 2, |ix| match (ix[0], ix[1]) {
            (0, 0) => t00,
            (0, _) | (_, 0) => T::zero(),
            (a, b) => s * t.at2(a - 1, b - 1),
        })
        .assume_symmetry(Symmetry::SymmetricPair)
    };
    Ok(MetricPoint {
        g: block(spec.epsilon, fib.g(), f),
        g_inv: block(spec.epsilon, fib.g_inv(), T::one() / f),
        signature: base_signature(spec.epsilon.to_f64_lossy()).sum(fib.signature()),
    })
}

/// Closed-form snapshot: `R`, `S`, `κ` from the warped-product formulas, `C` from the Weyl formula.
pub fn warped_snapshot<T: Scalar>(spec: &WarpedSpec<T>) -> Result<CurvatureSnapshot<T>, WarpError> {
    let wp = spec.point()?;
    let metric = warped_metric(spec)?;
    let (n, f) = (wp.n, wp.jet.f);
    let WarpScalars {
        t11,
        tr_t,
        delta_over_4f: d,
        ..
    } = wp.scalars;
    let half = T::lit(0.5);
    let nf = T::from_usize_lossy(n);
    let fib = &spec.fiber;

    // R_{α11β} = −½ T₁₁ g̃_{αβ}, R_{αβγδ} = F(R̃ − (Δ₁F/4F) G̃)
    let r = DenseTensor::from_fn(n, 4, |ix| {
        let ones = ix.iter().filter(|&&i| i == 0).count();
        match ones {
            0 => {
                let (a, b, c, e) = (ix[0] - 1, ix[1] - 1, ix[2] - 1, ix[3] - 1);
                f * (fib.r.at4(a, b, c, e) - d * fib.big_g.at4(a, b, c, e))
            }
            2 => {
                let mixed = -half * t11;
                match (ix[0] == 0, ix[1] == 0, ix[2] == 0, ix[3] == 0) {
                    // R_{α11β}
                    (false, true, true, false) => mixed * fib.g().at2(ix[0] - 1, ix[3] - 1),
                    // R_{1αβ1}
                    (true, false, false, true) => mixed * fib.g().at2(ix[1] - 1, ix[2] - 1),
                    // R_{1α1β}
                    (true, false, true, false) => -mixed * fib.g().at2(ix[1] - 1, ix[3] - 1),
                    // R_{α1β1}
                    (false, true, false, true) => -mixed * fib.g().at2(ix[0] - 1, ix[2] - 1),
                    _ => T::zero(),
                }
            }
            _ => T::zero(),
        }
    })
    .assume_symmetry(Symmetry::GeneralizedCurvature);

    let shift = tr_t * half + (nf - T::lit(2.0)) * d;
    let s = DenseTensor::from_fn(n, 2, |ix| match (ix[0], ix[1]) {
        (0, 0) => -(nf - T::one()) / (T::lit(2.0) * f) * t11,
        (0, _) | (_, 0) => T::zero(),
        (a, b) => fib.s.at2(a - 1, b - 1) - shift * fib.g().at2(a - 1, b - 1),
    })
    .assume_symmetry(Symmetry::SymmetricPair);
    let kappa = (fib.kappa - (nf - T::one()) * (tr_t + (nf - T::lit(2.0)) * d)) / f;
    Ok(CurvatureSnapshot::from_parts(metric, r, s, kappa)?)
}

/// Metric field `ε dx¹² ⊕ F(x¹) g̃(y)` over a fiber metric field.
///
/// Coordinates are `(x¹, y¹, …, y^{n−1})`. The closed-form route is available
/// when the fiber ships one.
pub fn warped_field<T: Scalar>(
    epsilon: T,
    warping: &WarpingFunction<T>,
    fiber: &MetricField<T>,
) -> Result<MetricField<T>, WarpError> {
    warping.validate()?;
    let m = fiber.dim;
    let n = m + 1;
    let fiber_auto = fiber
        .auto_components()
        .cloned()
        .ok_or(WarpError::InvalidParameters("fiber field has no jet evaluator"))?;
    let w = warping.clone();
    let auto = move |x: &[Jet<T>]| -> Vec<Jet<T>> {
        let nv = x[0].nvars();
        let fx = w.on_jet(&x[0]);
        let gt = fiber_auto(&x[1..]);
        let mut out = vec![Jet::constant(nv, T::zero()); n * n];
        out[0] = Jet::constant(nv, epsilon);
        for a in 0..m {
            for b in 0..m {
                out[(a + 1) * n + b + 1] = &fx * &gt[a * m + b];
            }
        }
        out
    };
    let signature = base_signature(epsilon.to_f64_lossy()).sum(fiber.signature);
    let mut field = MetricField::automatic(
        n,
        signature,
        format!("warped(eps={:?};{:?};{})", epsilon, warping, fiber.provenance),
        Arc::new(auto),
    );
    if fiber.has_closed_form() {
        let w = warping.clone();
        let fiber = fiber.clone();
        field = field.with_closed_form(Arc::new(move |x: &[T]| {
            let (f, fp, fpp) = w.raw_jet(x[0]);
            let nan = T::lit(f64::NAN);
            let fj = fiber.two_jet_via(&x[1..], crate::chartgeo::Route::ClosedForm).unwrap_or_else(|_| TwoJet {
                g: DenseTensor::from_fn(m, 2, |_| nan),
                dg: DenseTensor::zeros(m, 3),
                ddg: DenseTensor::zeros(m, 4),
            });
            closed_warped_jet(epsilon, (f, fp, fpp), &fj)
        }));
    }
    Ok(field)
}

fn closed_warped_jet<T: Scalar>(epsilon: T, (f, fp, fpp): (T, T, T), fj: &TwoJet<T>) -> TwoJet<T> {
    let m = fj.dim();
    let n = m + 1;
    let g = DenseTensor::from_fn(n, 2, |ix| match (ix[0], ix[1]) {
        (0, 0) => epsilon,
        (0, _) | (_, 0) => T::zero(),
        (a, b) => f * fj.g.at2(a - 1, b - 1),
    });
    let dg = DenseTensor::from_fn(n, 3, |ix| match (ix[0], ix[1], ix[2]) {
        (_, 0, _) | (_, _, 0) => T::zero(),
        (0, a, b) => fp * fj.g.at2(a - 1, b - 1),
        (c, a, b) => f * fj.dg.get(&[c - 1, a - 1, b - 1]),
    });
    let ddg = DenseTensor::from_fn(n, 4, |ix| match (ix[0], ix[1], ix[2], ix[3]) {
        (_, _, 0, _) | (_, _, _, 0) => T::zero(),
        (0, 0, a, b) => fpp * fj.g.at2(a - 1, b - 1),
        (0, c, a, b) | (c, 0, a, b) => fp * fj.dg.get(&[c - 1, a - 1, b - 1]),
        (c, e, a, b) => f * fj.ddg.at4(c - 1, e - 1, a - 1, b - 1),
    });
    TwoJet { g, dg, ddg }
}

/// Largest deviation of the chart Christoffel symbols of the warped field at
/// `point` from `Γ¹₁₁ = Γ¹_{α1} = Γ^α_{11} = 0`, `Γ¹_{αβ} = −(ε/2)F′g̃_{αβ}`,
/// `Γ^α_{1β} = (F′/2F)δ^α_β`, `Γ^α_{βγ} = Γ̃^α_{βγ}`, relative to `max |Γ|`.
pub fn vv1_residual<T: Scalar>(
    epsilon: T,
    warping: &WarpingFunction<T>,
    fiber: &MetricField<T>,
    point: &[T],
) -> Result<T, WarpError> {
    let field = warped_field(epsilon, warping, fiber)?;
    let conn = christoffel(&field.two_jet(point)?, point)?;
    let fconn = christoffel(&fiber.two_jet(&point[1..])?, &point[1..])?;
    let wj = warping_jet(warping, point[0])?;
    let n = field.dim;
    let half = T::lit(0.5);
    let gt = &fconn.metric.g;
    let expected = DenseTensor::from_fn(n, 3, |ix| match (ix[0], ix[1], ix[2]) {
        (0, 0, _) | (0, _, 0) => T::zero(),
        (0, a, b) => -epsilon * half * wj.fp * gt.at2(a - 1, b - 1),
        (_, 0, 0) => T::zero(),
        (a, 0, b) | (a, b, 0) => {
            if a == b {
                wj.fp / (T::lit(2.0) * wj.f)
            } else {
                T::zero()
            }
        }
        (a, b, c) => fconn.gamma(a - 1, b - 1, c - 1),
    });
    let diff = (&conn.second_kind - &expected).max_abs();
    Ok(ratio(diff, conn.second_kind.max_abs().max(expected.max_abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgeo::{
        flat_field, product_snapshot, round_sphere, snapshot_from_field, space_form_snapshot,
        sphere_product, Route,
    };
    use crate::warpedlab::{Amplitude, Branch};

    fn s2xs2() -> CurvatureSnapshot<f64> {
        let s2 = space_form_snapshot(2, 2.0, Signature::riemannian(2)).unwrap();
        product_snapshot(&s2, &s2).unwrap()
    }

    fn s3() -> CurvatureSnapshot<f64> {
        space_form_snapshot(3, 6.0, Signature::riemannian(3)).unwrap()
    }

    #[test]
    fn robertson_walker_is_conformally_flat() {
        let spec = WarpedSpec::new(-1.0, WarpingFunction::Quadratic { a: 1.0, b: 1.0 }, 0.3, s3()).unwrap();
        let snap = warped_snapshot(&spec).unwrap();
        assert!(snap.c.norm() <= 1e-10 * snap.r.norm());
        assert_eq!(snap.signature(), Signature::new(1, 3));
        assert!(snap.check_invariants().worst() < 1e-12);
    }

    #[test]
    fn flat_fiber_unit_warp_is_flat() {
        let flat = space_form_snapshot(3, 0.0, Signature::riemannian(3)).unwrap();
        let spec = WarpedSpec::new(1.0, WarpingFunction::Quadratic { a: 0.0, b: 1.0 }, 0.0, flat).unwrap();
        let snap = warped_snapshot(&spec).unwrap();
        assert!(snap.r.is_zero() && snap.s.is_zero() && snap.kappa == 0.0);
    }

    #[test]
    fn small_fiber_rejected() {
        let s2 = space_form_snapshot(2, 2.0, Signature::riemannian(2)).unwrap();
        let err = WarpedSpec::new(1.0, WarpingFunction::Quadratic { a: 0.0, b: 1.0 }, 0.0, s2).unwrap_err();
        assert!(matches!(err, WarpError::DimensionTooSmall { dim: 2, min: 3 }));
    }

    #[test]
    fn closed_form_matches_contractions() {
        let warps = [
            WarpingFunction::Quadratic { a: 2.0, b: 3.0 },
            WarpingFunction::Exponential {
                b: 2.0,
                c: 1.0,
                c1: 1.0 / 3.0,
                epsilon: -1.0,
                branch: Branch::Upper,
            },
        ];
        for w in warps {
            let spec = WarpedSpec::new(-1.0, w, 0.4, s2xs2()).unwrap();
            let snap = warped_snapshot(&spec).unwrap();
            assert!(snap.check_invariants().worst() < 1e-12, "{:?}", snap.check_invariants());
        }
    }

    #[test]
    fn chart_route_agrees_with_closed_form() {
        let sphere = round_sphere::<f64>(3);
        let w = WarpingFunction::Sinusoidal {
            b: 0.2,
            c: 1.3,
            c1: 0.5,
            epsilon: 1.0,
            amplitude: Amplitude::Corrected,
        };
        let point = [0.35, 0.9, 1.1, 0.4];
        let field = warped_field(1.0, &w, &sphere).unwrap();
        let a = field.two_jet_via(&point, Route::ClosedForm).unwrap();
        let b = field.two_jet_via(&point, Route::Automatic).unwrap();
        assert!(a.ddg.rel_distance(&b.ddg).unwrap() < 1e-13);
        let chart = snapshot_from_field(&field, &point).unwrap();
        let fiber = snapshot_from_field(&sphere, &point[1..]).unwrap();
        let closed = warped_snapshot(&WarpedSpec::new(1.0, w.clone(), point[0], fiber).unwrap()).unwrap();
        let scale = chart.r.max_abs().max(closed.r.max_abs());
        assert!((&chart.r - &closed.r).max_abs() / scale < 1e-7);
        assert!(vv1_residual(1.0, &w, &sphere, &point).unwrap() < 1e-10);
    }

    #[test]
    fn vv1_on_flat_fiber_quadratic() {
        let w = WarpingFunction::Quadratic { a: 2.0, b: 3.0 };
        for eps in [-1.0, 1.0] {
            let fib = flat_field::<f64>(Signature::riemannian(3));
            let field = warped_field(eps, &w, &fib).unwrap();
            let p = [1.0, 0.0, 0.0, 0.0];
            let conn = christoffel(&field.two_jet(&p).unwrap(), &p).unwrap();
            assert!((conn.gamma(0, 1, 1) + 10.0 * eps).abs() < 1e-12);
            assert!((conn.gamma(2, 0, 2) - 0.4).abs() < 1e-14);
            assert!(vv1_residual(eps, &w, &fib, &p).unwrap() < 1e-14);
        }
        let _ = sphere_product::<f64>(2, 2);
    }
}
