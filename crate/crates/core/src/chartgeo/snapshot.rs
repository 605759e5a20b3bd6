use super::ChartError;
use crate::scalar::{ratio, Scalar};
use crate::tensorkit::{
    g_tensor, kulkarni_nomizu, ricci_contraction, trace, DenseTensor, MetricPoint, Signature,
    Symmetry,
};

/// Relative tolerance for the Riemann symmetries of generated snapshots.
pub const RIEMANN_SYMMETRY_TOL: f64 = 1e-9;

/// Pointwise curvature bundle `(g, R, S, κ, C, G)`.
///
/// `R` follows `R(X,Y,Z,W) = g(𝓡(X,Y)Z, W)` with
/// `𝓡(X,Y) = [∇_X, ∇_Y] − ∇_{[X,Y]}`, so the unit sphere has `R = G`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureSnapshot<T> {
    pub metric: MetricPoint<T>,
    pub r: DenseTensor<T>,
    pub s: DenseTensor<T>,
    pub kappa: T,
    /// Weyl tensor; identically zero when `dim < 3`.
    pub c: DenseTensor<T>,
    pub big_g: DenseTensor<T>,
}

/// Worst relative deviations of the snapshot invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantReport<T> {
    pub riemann_symmetry: T,
    pub ricci_consistency: T,
    pub kappa_consistency: T,
    pub g_tensor_consistency: T,
    /// Single g-contractions of `C`, relative to `‖R‖`.
    pub weyl_trace: T,
    /// `‖C‖ / ‖R‖` in dimension 3, zero otherwise.
    pub dim3_weyl: T,
    pub inverse_residual: T,
}

impl<T: Scalar> InvariantReport<T> {
    pub fn worst(&self) -> T {
        [
            self.riemann_symmetry,
            self.ricci_consistency,
            self.kappa_consistency,
            self.g_tensor_consistency,
            self.weyl_trace,
            self.dim3_weyl,
            self.inverse_residual,
        ]
        .into_iter()
        .fold(T::zero(), |a, v| a.max(v))
    }
}

impl<T: Scalar> CurvatureSnapshot<T> {
    /// Assembles a snapshot from `g`, `R`, `S`, `κ`; `C` and `G` are derived.
    pub fn from_parts(
        metric: MetricPoint<T>,
        r: DenseTensor<T>,
        s: DenseTensor<T>,
        kappa: T,
    ) -> Result<Self, ChartError> {
        let n = metric.dim();
        if r.dim() != n || r.rank() != 4 || s.dim() != n || s.rank() != 2 {
            return Err(ChartError::Inconsistent("R and S must be rank 4 and 2 in the metric dimension"));
        }
        let big_g = g_tensor(&metric.g);
        let c = if n >= 3 {
            weyl_from(&metric.g, &r, &s, kappa)?
        } else {
            DenseTensor::zeros(n, 4)
        };
        Ok(Self {
            metric,
            r,
            s,
            kappa,
            c,
            big_g,
        })
    }

    /// Derives `S = g^{hk}R_{hijk}` and `κ = tr S` from a metric and curvature tensor.
    pub fn from_curvature(metric: MetricPoint<T>, r: DenseTensor<T>) -> Result<Self, ChartError> {
        let s = ricci_contraction(&r, &metric.g_inv)?;
        let kappa = trace(&s, &metric.g_inv);
        Self::from_parts(metric, r, s, kappa)
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn signature(&self) -> Signature {
        self.metric.signature
    }

    pub fn g(&self) -> &DenseTensor<T> {
        &self.metric.g
    }

    pub fn g_inv(&self) -> &DenseTensor<T> {
        &self.metric.g_inv
    }

    pub fn check_invariants(&self) -> InvariantReport<T> {
        let n = self.dim();
        let rnorm = self.r.norm();
        let riemann_symmetry = self
            .r
            .symmetry_deviation(Symmetry::GeneralizedCurvature)
            .unwrap_or_else(|_| T::one());
        let s_re = ricci_contraction(&self.r, self.g_inv()).expect("shapes checked");
        let ricci_consistency = s_re.rel_distance(&self.s).expect("same shape");
        let k_re = trace(&self.s, self.g_inv());
        let kappa_consistency = ratio(
            (k_re - self.kappa).abs(),
            self.kappa.abs().max(k_re.abs()).max(self.s.norm()),
        );
        let half_gg = kulkarni_nomizu(self.g(), self.g())
            .expect("symmetric metric")
            .scale(T::lit(0.5));
        let g_tensor_consistency = half_gg.rel_distance(&self.big_g).expect("same shape");
        let weyl_trace = if n >= 3 {
            let t1 = ricci_contraction(&self.c, self.g_inv()).expect("shapes checked");
            let gi = self.g_inv();
            let t2 = DenseTensor::from_fn(n, 2, |ix| {
                let mut acc = T::zero();
                for h in 0..n {
                    for j in 0..n {
                        acc += gi.at2(h, j) * self.c.at4(h, ix[0], j, ix[1]);
                    }
                }
                acc
            });
            ratio(t1.norm().max(t2.norm()), rnorm)
        } else {
            T::zero()
        };
        let dim3_weyl = if n == 3 {
            ratio(self.c.norm(), rnorm)
        } else {
            T::zero()
        };
        InvariantReport {
            riemann_symmetry,
            ricci_consistency,
            kappa_consistency,
            g_tensor_consistency,
            weyl_trace,
            dim3_weyl,
            inverse_residual: self.metric.inverse_residual(),
        }
    }
}

/// Weyl tensor `C = R − (g∧S − κ/(n−1)·G)/(n−2)`.
pub fn weyl_from<T: Scalar>(
    g: &DenseTensor<T>,
    r: &DenseTensor<T>,
    s: &DenseTensor<T>,
    kappa: T,
) -> Result<DenseTensor<T>, ChartError> {
    let n = g.dim();
    if n < 3 {
        return Err(ChartError::DimensionTooSmall {
            op: "weyl_from",
            dim: n,
            min: 3,
        });
    }
    let nf = T::from_usize_lossy(n);
    let gs = kulkarni_nomizu(g, s)?;
    let big_g = g_tensor(g);
    let c = DenseTensor::linear_combination(&[
        (T::one(), r),
        (-T::one() / (nf - T::lit(2.0)), &gs),
        (kappa / ((nf - T::lit(2.0)) * (nf - T::one())), &big_g),
    ])?;
    Ok(if r.symmetry() == Symmetry::GeneralizedCurvature {
        c.assume_symmetry(Symmetry::GeneralizedCurvature)
    } else {
        c
    })
}

/// Space of constant curvature at a given metric: `R = κ/((n−1)n)·G`, `S = (κ/n)·g`.
pub fn space_form_on<T: Scalar>(metric: MetricPoint<T>, kappa: T) -> Result<CurvatureSnapshot<T>, ChartError> {
    let n = metric.dim();
    if n < 2 {
        if kappa != T::zero() {
            return Err(ChartError::Inconsistent("a one-dimensional space has zero curvature"));
        }
        let r = DenseTensor::zeros(n, 4).assume_symmetry(Symmetry::GeneralizedCurvature);
        let s = DenseTensor::zeros(n, 2).assume_symmetry(Symmetry::SymmetricPair);
        return CurvatureSnapshot::from_parts(metric, r, s, kappa);
    }
    let nf = T::from_usize_lossy(n);
    let r = g_tensor(&metric.g).scale(kappa / ((nf - T::one()) * nf));
    let s = metric.g.scale(kappa / nf);
    let mut snap = CurvatureSnapshot::from_parts(metric, r, s, kappa)?;
    // exactly conformally flat
    snap.c = DenseTensor::zeros(n, 4).assume_symmetry(Symmetry::GeneralizedCurvature);
    Ok(snap)
}

/// Space form in the flat chart `g = η` of the given signature.
pub fn space_form_snapshot<T: Scalar>(
    dim: usize,
    kappa: T,
    signature: Signature,
) -> Result<CurvatureSnapshot<T>, ChartError> {
    if signature.dim() != dim {
        return Err(ChartError::SignatureMismatch {
            dim,
            signature,
        });
    }
    space_form_on(MetricPoint::flat(signature), kappa)
}

/// Direct product: block-diagonal `g`, `R` without mixed components, `κ = κ₁ + κ₂`.
pub fn product_snapshot<T: Scalar>(
    a: &CurvatureSnapshot<T>,
    b: &CurvatureSnapshot<T>,
) -> Result<CurvatureSnapshot<T>, ChartError> {
    let (na, nb) = (a.dim(), b.dim());
    let n = na + nb;
    let block2 = |ta: &DenseTensor<T>, tb: &DenseTensor<T>| {
        DenseTensor::from_fn(n, 2, |ix| match (ix[0] < na, ix[1] < na) {
            (true, true) => ta.at2(ix[0], ix[1]),
            (false, false) => tb.at2(ix[0] - na, ix[1] - na),
            _ => T::zero(),
        })
    };
    let g = block2(a.g(), b.g()).assume_symmetry(Symmetry::SymmetricPair);
    let g_inv = block2(a.g_inv(), b.g_inv()).assume_symmetry(Symmetry::SymmetricPair);
    let metric = MetricPoint {
        g,
        g_inv,
        signature: a.signature().sum(b.signature()),
    };
    let r = DenseTensor::from_fn(n, 4, |ix| {
        if ix.iter().all(|&i| i < na) {
            a.r.at4(ix[0], ix[1], ix[2], ix[3])
        } else if ix.iter().all(|&i| i >= na) {
            b.r.at4(ix[0] - na, ix[1] - na, ix[2] - na, ix[3] - na)
        } else {
            T::zero()
        }
    })
    .assume_symmetry(Symmetry::GeneralizedCurvature);
    let s = block2(&a.s, &b.s).assume_symmetry(Symmetry::SymmetricPair);
    CurvatureSnapshot::from_parts(metric, r, s, a.kappa + b.kappa)
}

/// Snapshot from a raw `(g, R)` pair; `R` must be a generalized curvature tensor.
pub fn synthetic_snapshot<T: Scalar>(
    g: DenseTensor<T>,
    r: DenseTensor<T>,
) -> Result<CurvatureSnapshot<T>, ChartError> {
    let metric = MetricPoint::new(g)?;
    if r.dim() != metric.dim() || r.rank() != 4 {
        return Err(ChartError::Inconsistent("R must be rank 4 in the metric dimension"));
    }
    let r = if r.is_zero() {
        r.assume_symmetry(Symmetry::GeneralizedCurvature)
    } else {
        r.with_symmetry(Symmetry::GeneralizedCurvature)?
    };
    CurvatureSnapshot::from_curvature(metric, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorkit::random::{random_gen_curvature, random_metric};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_three_sphere_space_form() {
        let s3 = space_form_snapshot(3, 6.0, Signature::riemannian(3)).unwrap();
        assert!(s3.s.rel_distance(&s3.g().scale(2.0)).unwrap() < 1e-15);
        assert!(s3.r.rel_distance(&s3.big_g).unwrap() < 1e-15);
        assert!(s3.check_invariants().worst() < 1e-14);
    }

    #[test]
    fn flat_minkowski_and_hyperbolic() {
        let m = space_form_snapshot(4, 0.0, Signature::lorentzian(4)).unwrap();
        assert!(m.r.is_zero() && m.s.is_zero() && m.c.is_zero());
        let h = space_form_snapshot(4, -12.0, Signature::riemannian(4)).unwrap();
        assert!(h.r.rel_distance(&h.big_g.scale(-1.0)).unwrap() < 1e-15);
    }

    #[test]
    fn signature_must_match_dimension() {
        assert!(space_form_snapshot(4, 1.0, Signature::riemannian(3)).is_err());
    }

    #[test]
    fn weyl_needs_three_dimensions() {
        let g = DenseTensor::<f64>::identity(2);
        let r = g_tensor(&g);
        assert!(matches!(
            weyl_from(&g, &r, &g, 2.0),
            Err(ChartError::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn weyl_vanishes_in_dimension_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for neg in 0..2 {
            let mp = random_metric::<f64, _>(&mut rng, 3, neg);
            let r = random_gen_curvature(&mut rng, &mp.g, 3);
            let snap = synthetic_snapshot(mp.g.clone(), r).unwrap();
            let rep = snap.check_invariants();
            assert!(rep.dim3_weyl < 1e-12, "{rep:?}");
        }
    }

    #[test]
    fn synthetic_snapshot_invariants_and_g() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mp = random_metric::<f64, _>(&mut rng, 5, 1);
        let r = random_gen_curvature(&mut rng, &mp.g, 4);
        let snap = synthetic_snapshot(mp.g.clone(), r).unwrap();
        assert!(snap.check_invariants().worst() < 1e-12);
        assert!(snap.c.norm() > 1e-3);

        // (g, G) contracts to κ = (n−1)n
        let sg = synthetic_snapshot(mp.g.clone(), g_tensor(&mp.g)).unwrap();
        assert!((sg.kappa - 20.0).abs() < 1e-12);
        assert!(sg.c.norm() < 1e-12 * sg.r.norm());

        let flat = synthetic_snapshot(mp.g.clone(), DenseTensor::zeros(5, 4)).unwrap();
        assert!(flat.s.is_zero() && flat.kappa == 0.0);
    }

    #[test]
    fn synthetic_rejects_non_curvature_tensor() {
        let g = DenseTensor::<f64>::identity(3);
        let mut r = DenseTensor::zeros(3, 4);
        r.set(&[0, 1, 0, 1], 1.0);
        assert!(matches!(
            synthetic_snapshot(g, r),
            Err(ChartError::Tensor(_))
        ));
    }

    #[test]
    fn product_of_spheres_is_einstein_not_conformally_flat() {
        let s2 = space_form_snapshot::<f64>(2, 2.0, Signature::riemannian(2)).unwrap();
        let p = product_snapshot(&s2, &s2).unwrap();
        assert_eq!(p.dim(), 4);
        assert!((p.kappa - 4.0).abs() < 1e-15);
        assert!(p.s.rel_distance(p.g()).unwrap() < 1e-15);
        assert!(p.c.norm() > 0.5);
        assert!(p.check_invariants().worst() < 1e-14);

        let e2 = space_form_snapshot::<f64>(2, 0.0, Signature::riemannian(2)).unwrap();
        let flat = product_snapshot(&e2, &e2).unwrap();
        assert!(flat.r.is_zero());

        let mixed = product_snapshot(&s2, &e2).unwrap();
        assert!((mixed.kappa - 2.0).abs() < 1e-15);
        let diag: Vec<f64> = (0..4).map(|i| mixed.s.at2(i, i)).collect();
        assert_eq!(diag, vec![1.0, 1.0, 0.0, 0.0]);
    }
}
