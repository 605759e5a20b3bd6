//! Catalog metric fields. Every catalog entry except the random polynomial
//! family ships a closed-form two-jet next to its jet-arithmetic evaluator.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ChartError, MetricField, TwoJet};
use crate::jet::Jet;
use crate::scalar::Scalar;
use crate::tensorkit::{DenseTensor, Signature};

/// One-variable factor of a diagonal metric entry.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Factor {
    /// `sin²(x)`
    Sin2,
    /// `exp(r·x)`
    Exp(f64),
}

impl Factor {
    fn jet3<T: Scalar>(self, x: T) -> (T, T, T) {
        match self {
            Factor::Sin2 => {
                let (s, c) = (x.sin(), x.cos());
                let two = T::lit(2.0);
                (s * s, two * s * c, two * (c * c - s * s))
            }
            Factor::Exp(r) => {
                let r = T::lit(r);
                let e = (r * x).exp();
                (e, r * e, r * r * e)
            }
        }
    }

    fn on_jet<T: Scalar>(self, x: &Jet<T>) -> Jet<T> {
        match self {
            Factor::Sin2 => x.sin().square(),
            Factor::Exp(r) => x.scale(T::lit(r)).exp(),
        }
    }
}

/// Diagonal metric `g_kk = c_k Π_j f_{kj}(x_j)` with factors on distinct variables.
#[derive(Clone, Debug)]
struct DiagonalProduct {
    constants: Vec<f64>,
    factors: Vec<Vec<(usize, Factor)>>,
}

impl DiagonalProduct {
    fn closed<T: Scalar>(&self, x: &[T]) -> TwoJet<T> {
        let n = self.constants.len();
        let mut g = DenseTensor::zeros(n, 2);
        let mut dg = DenseTensor::zeros(n, 3);
        let mut ddg = DenseTensor::zeros(n, 4);
        for k in 0..n {
            let vals: Vec<(usize, (T, T, T))> = self.factors[k]
                .iter()
                .map(|&(v, f)| (v, f.jet3(x[v])))
                .collect();
            let c = T::lit(self.constants[k]);
            // product of all factor values except those at positions in `skip`
            let rest = |skip: &[usize]| {
                vals.iter()
                    .enumerate()
                    .filter(|(p, _)| !skip.contains(p))
                    .fold(c, |acc, (_, (_, f))| acc * f.0)
            };
            g.set(&[k, k], rest(&[]));
            for (p, &(a, (_, fa1, fa2))) in vals.iter().enumerate() {
                dg.set(&[a, k, k], fa1 * rest(&[p]));
                ddg.set(&[a, a, k, k], fa2 * rest(&[p]));
                for (q, &(b, (_, fb1, _))) in vals.iter().enumerate() {
                    if q != p {
                        ddg.set(&[a, b, k, k], fa1 * fb1 * rest(&[p, q]));
                    }
                }
            }
        }
        TwoJet { g, dg, ddg }
    }

    fn auto<T: Scalar>(&self, x: &[Jet<T>]) -> Vec<Jet<T>> {
        let n = self.constants.len();
        let nv = x.first().map_or(0, Jet::nvars);
        let mut out = vec![Jet::constant(nv, T::zero()); n * n];
        for k in 0..n {
            let mut entry = Jet::constant(nv, T::lit(self.constants[k]));
            for &(v, f) in &self.factors[k] {
                entry = &entry * &f.on_jet(&x[v]);
            }
            out[k * n + k] = entry;
        }
        out
    }

    fn into_field<T: Scalar>(self, signature: Signature, provenance: String) -> MetricField<T> {
        let dim = self.constants.len();
        let shared = Arc::new(self);
        let for_auto = Arc::clone(&shared);
        MetricField::automatic(dim, signature, provenance, Arc::new(move |x| for_auto.auto(x)))
            .with_closed_form(Arc::new(move |x| shared.closed(x)))
    }
}

/// Flat pseudo-Euclidean field `g = η` (negative directions first).
pub fn flat_field<T: Scalar>(signature: Signature) -> MetricField<T> {
    DiagonalProduct {
        constants: signature.diagonal::<f64>(),
        factors: vec![Vec::new(); signature.dim()],
    }
    .into_field(signature, format!("flat({},{})", signature.negative, signature.positive))
}

fn sphere_factors(m: usize, offset: usize) -> Vec<Vec<(usize, Factor)>> {
    (0..m)
        .map(|k| (0..k).map(|j| (offset + j, Factor::Sin2)).collect())
        .collect()
}

/// Unit round `S^m` in hyperspherical coordinates:
/// `g = diag(1, sin²θ₁, sin²θ₁ sin²θ₂, …)`.
pub fn round_sphere<T: Scalar>(m: usize) -> MetricField<T> {
    DiagonalProduct {
        constants: vec![1.0; m],
        factors: sphere_factors(m, 0),
    }
    .into_field(Signature::riemannian(m), format!("sphere({m})"))
}

/// Riemannian product `S^{m₁} × S^{m₂}` of unit spheres.
pub fn sphere_product<T: Scalar>(m1: usize, m2: usize) -> MetricField<T> {
    let mut factors = sphere_factors(m1, 0);
    factors.extend(sphere_factors(m2, m1));
    DiagonalProduct {
        constants: vec![1.0; m1 + m2],
        factors,
    }
    .into_field(Signature::riemannian(m1 + m2), format!("sphere_product({m1},{m2})"))
}

/// Conformally flat `g = e^{2u} η` with `u = rate·x¹`.
pub fn conformal_exp<T: Scalar>(signature: Signature, rate: f64) -> MetricField<T> {
    let dim = signature.dim();
    DiagonalProduct {
        constants: signature.diagonal::<f64>(),
        factors: vec![vec![(0, Factor::Exp(2.0 * rate))]; dim],
    }
    .into_field(signature, format!("conformal_exp({dim},{rate})"))
}

/// `g = η + amplitude·p(x)` with `p` a symmetric matrix of random polynomials of
/// degree ≤ 2, coefficients uniform in `[−1, 1]` drawn from ChaCha8 with `seed`.
pub fn random_metric_field<T: Scalar>(
    signature: Signature,
    seed: u64,
    amplitude: f64,
) -> MetricField<T> {
    let n = signature.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // per component (i ≤ j): constant, n linear, n(n+1)/2 quadratic coefficients
    let mut coeffs = vec![Vec::new(); n * n];
    for i in 0..n {
        for j in i..n {
            let count = 1 + n + n * (n + 1) / 2;
            let c: Vec<f64> = (0..count).map(|_| amplitude * rng.gen_range(-1.0..=1.0)).collect();
            coeffs[i * n + j] = c.clone();
            coeffs[j * n + i] = c;
        }
    }
    let eta: Vec<f64> = signature.diagonal();
    let eval = move |x: &[Jet<T>]| -> Vec<Jet<T>> {
        let nv = x.first().map_or(0, Jet::nvars);
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let c = &coeffs[i * n + j];
                let base = c[0] + if i == j { eta[i] } else { 0.0 };
                let mut p = Jet::constant(nv, T::lit(base));
                for a in 0..n {
                    p = p + x[a].scale(T::lit(c[1 + a]));
                }
                let mut q = 1 + n;
                for a in 0..n {
                    for b in a..n {
                        p = p + (&x[a] * &x[b]).scale(T::lit(c[q]));
                        q += 1;
                    }
                }
                out.push(p);
            }
        }
        out
    };
    MetricField::automatic(
        n,
        signature,
        format!("random({},{};seed={seed};amp={amplitude})", signature.negative, signature.positive),
        Arc::new(eval),
    )
}

/// Catalog entries addressable by id from configuration files.
#[derive(Clone, Debug, PartialEq)]
pub enum CatalogId {
    Flat { negative: usize, positive: usize },
    Sphere { dim: usize },
    SphereProduct { m1: usize, m2: usize },
    ConformalExp { negative: usize, positive: usize, rate: f64 },
    Random { negative: usize, positive: usize, seed: u64, amplitude: f64 },
}

impl CatalogId {
    /// Parses an id and its numeric parameters, e.g. `("sphere", [3])`.
    pub fn parse(id: &str, params: &[f64]) -> Result<Self, ChartError> {
        let usize_at = |k: usize| -> Result<usize, ChartError> {
            let v = *params
                .get(k)
                .ok_or_else(|| ChartError::OutOfDomain(format!("`{id}` needs parameter #{}", k + 1)))?;
            if v < 0.0 || v.fract() != 0.0 {
                return Err(ChartError::OutOfDomain(format!("`{id}` parameter #{} must be a non-negative integer", k + 1)));
            }
            Ok(v as usize)
        };
        let f64_at = |k: usize| -> Result<f64, ChartError> {
            params
                .get(k)
                .copied()
                .ok_or_else(|| ChartError::OutOfDomain(format!("`{id}` needs parameter #{}", k + 1)))
        };
        Ok(match id {
            "flat" => CatalogId::Flat { negative: usize_at(0)?, positive: usize_at(1)? },
            "sphere" => CatalogId::Sphere { dim: usize_at(0)? },
            "sphere_product" => CatalogId::SphereProduct { m1: usize_at(0)?, m2: usize_at(1)? },
            "conformal_exp" => CatalogId::ConformalExp {
                negative: usize_at(0)?,
                positive: usize_at(1)?,
                rate: f64_at(2)?,
            },
            "random" => CatalogId::Random {
                negative: usize_at(0)?,
                positive: usize_at(1)?,
                seed: usize_at(2)? as u64,
                amplitude: f64_at(3)?,
            },
            other => return Err(ChartError::UnknownCatalogId(other.to_string())),
        })
    }

    pub fn build<T: Scalar>(&self) -> Result<MetricField<T>, ChartError> {
        let check = |dim: usize| {
            if dim == 0 {
                Err(ChartError::OutOfDomain("catalog field of dimension 0".into()))
            } else {
                Ok(())
            }
        };
        Ok(match *self {
            CatalogId::Flat { negative, positive } => {
                check(negative + positive)?;
                flat_field(Signature::new(negative, positive))
            }
            CatalogId::Sphere { dim } => {
                check(dim)?;
                round_sphere(dim)
            }
            CatalogId::SphereProduct { m1, m2 } => {
                check(m1.min(m2))?;
                sphere_product(m1, m2)
            }
            CatalogId::ConformalExp { negative, positive, rate } => {
                check(negative + positive)?;
                conformal_exp(Signature::new(negative, positive), rate)
            }
            CatalogId::Random { negative, positive, seed, amplitude } => {
                check(negative + positive)?;
                random_metric_field(Signature::new(negative, positive), seed, amplitude)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgeo::{
        product_snapshot, snapshot_from_field, snapshot_from_field_via, space_form_snapshot, Route,
    };
    use std::f64::consts::FRAC_PI_2;

    fn fd_two_jet(field: &MetricField<f64>, x: &[f64], h: f64) -> (DenseTensor<f64>, DenseTensor<f64>) {
        let n = x.len();
        let g_at = |p: &[f64]| field.two_jet(p).unwrap().g;
        let dg = DenseTensor::from_fn(n, 3, |ix| {
            let mut p = x.to_vec();
            p[ix[0]] += h;
            let up = g_at(&p).at2(ix[1], ix[2]);
            p[ix[0]] -= 2.0 * h;
            let dn = g_at(&p).at2(ix[1], ix[2]);
            (up - dn) / (2.0 * h)
        });
        let ddg = DenseTensor::from_fn(n, 4, |ix| {
            let corner = |sa: f64, sb: f64| {
                let mut p = x.to_vec();
                p[ix[0]] += sa * h;
                p[ix[1]] += sb * h;
                g_at(&p).at2(ix[2], ix[3])
            };
            (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                / (4.0 * h * h)
        });
        (dg, ddg)
    }

    #[test]
    fn flat_field_has_vanishing_derivatives() {
        let f = flat_field::<f64>(Signature::lorentzian(4));
        let jet = f.two_jet(&[0.3, -1.0, 2.0, 0.5]).unwrap();
        assert!(jet.dg.is_zero() && jet.ddg.is_zero());
        let snap = snapshot_from_field(&f, &[0.0; 4]).unwrap();
        assert!(snap.r.is_zero() && snap.s.is_zero() && snap.kappa == 0.0);
    }

    #[test]
    fn sphere_equator_jet_matches_step_sweep() {
        let f = round_sphere::<f64>(2);
        let x = [FRAC_PI_2, 0.4];
        let jet = f.two_jet(&x).unwrap();
        assert!((jet.g.at2(0, 0) - 1.0).abs() < 1e-15);
        assert!((jet.g.at2(1, 1) - 1.0).abs() < 1e-15);
        assert!(jet.dg.get(&[0, 1, 1]).abs() < 1e-15);
        assert!((jet.ddg.at4(0, 0, 1, 1) + 2.0).abs() < 1e-15);
        for h in [1e-3, 1e-4] {
            let (dg, _) = fd_two_jet(&f, &x, h);
            assert!(dg.rel_distance(&jet.dg).unwrap() < 1e-6 || dg.max_abs() < 1e-8);
        }
    }

    #[test]
    fn conformal_exp_first_derivative() {
        let f = conformal_exp::<f64>(Signature::riemannian(3), 0.1);
        let jet = f.two_jet(&[0.0; 3]).unwrap();
        for i in 0..3 {
            assert!((jet.dg.get(&[0, i, i]) - 0.2).abs() < 1e-15);
        }
        let (dg, ddg) = fd_two_jet(&f, &[0.0; 3], 1e-4);
        assert!((dg.get(&[0, 1, 1]) - 0.2).abs() < 1e-8);
        assert!((ddg.at4(0, 0, 2, 2) - 0.04).abs() < 1e-6);
    }

    #[test]
    fn closed_and_automatic_routes_agree() {
        let fields: Vec<MetricField<f64>> = vec![
            round_sphere(3),
            sphere_product(2, 2),
            conformal_exp(Signature::lorentzian(4), -0.3),
        ];
        let x = [0.7, 1.1, 0.4, 1.9];
        for f in &fields {
            let p = &x[..f.dim];
            let a = f.two_jet_via(p, Route::ClosedForm).unwrap();
            let b = f.two_jet_via(p, Route::Automatic).unwrap();
            assert!(a.g.rel_distance(&b.g).unwrap() < 1e-14);
            assert!(a.dg.rel_distance(&b.dg).unwrap() < 1e-14);
            assert!(a.ddg.rel_distance(&b.ddg).unwrap() < 1e-14, "{}", f.provenance);
        }
    }

    #[test]
    fn sphere_fields_match_space_forms() {
        let s3 = snapshot_from_field(&round_sphere::<f64>(3), &[0.8, 1.2, 0.3]).unwrap();
        assert!((s3.kappa - 6.0).abs() < 1e-12);
        assert!(s3.c.norm() <= 1e-9 * s3.r.norm());
        let oracle = crate::chartgeo::space_form_on(s3.metric.clone(), 6.0).unwrap();
        assert!(s3.r.rel_distance(&oracle.r).unwrap() < 1e-7);

        let p = [0.9, 0.2, 1.3, 2.0];
        let s22 = snapshot_from_field_via(&sphere_product::<f64>(2, 2), &p, Route::Automatic).unwrap();
        assert!((s22.kappa - 4.0).abs() < 1e-12);
        assert!(s22.s.rel_distance(s22.g()).unwrap() < 1e-12);
        assert!(s22.c.norm() > 0.1);
        let a = snapshot_from_field(&round_sphere::<f64>(2), &p[..2]).unwrap();
        let b = snapshot_from_field(&round_sphere::<f64>(2), &p[2..]).unwrap();
        let oracle = product_snapshot(&a, &b).unwrap();
        assert!(s22.r.rel_distance(&oracle.r).unwrap() < 1e-7);
        let _ = space_form_snapshot::<f64>(2, 2.0, Signature::riemannian(2)).unwrap();
    }

    #[test]
    fn random_field_is_deterministic_and_flat_at_zero_amplitude() {
        let sig = Signature::lorentzian(4);
        let p = [0.1, -0.2, 0.05, 0.3];
        let a = random_metric_field::<f64>(sig, 42, 0.05).two_jet(&p).unwrap();
        let b = random_metric_field::<f64>(sig, 42, 0.05).two_jet(&p).unwrap();
        assert_eq!(a, b);
        let flat = random_metric_field::<f64>(sig, 7, 0.0);
        let snap = snapshot_from_field(&flat, &p).unwrap();
        assert!(snap.r.is_zero());
        let inv = snapshot_from_field(&random_metric_field::<f64>(sig, 3, 0.05), &p).unwrap();
        assert!(inv.check_invariants().worst() < 1e-9);
    }

    #[test]
    fn singular_point_is_rejected_with_diagnostic() {
        let err = round_sphere::<f64>(2).metric_at(&[0.0, 0.3]).unwrap_err();
        assert!(matches!(err, ChartError::SingularMetric { .. }), "{err}");
    }

    #[test]
    fn catalog_ids_parse() {
        assert_eq!(CatalogId::parse("sphere", &[3.0]).unwrap(), CatalogId::Sphere { dim: 3 });
        assert!(matches!(
            CatalogId::parse("torus", &[]),
            Err(ChartError::UnknownCatalogId(_))
        ));
        assert!(CatalogId::parse("sphere", &[2.5]).is_err());
    }
}
