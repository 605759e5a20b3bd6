//! Index formulas for the tensor building blocks: Kulkarni–Nomizu products,
//! Tachibana tensors `Q(A,T)` and the curvature action `B·T`.

use super::{DenseTensor, Symmetry, TensorError};
use crate::scalar::Scalar;

const MAX_ACTION_RANK: usize = 4;

fn require_symmetric<T: Scalar>(e: &DenseTensor<T>, what: &'static str) -> Result<(), TensorError> {
    if e.rank() != 2 {
        return Err(TensorError::RankMismatch {
            expected: 2,
            found: e.rank(),
        });
    }
    let dev = e.symmetry_deviation(Symmetry::SymmetricPair)?;
    if dev > T::attainable(1e-12) {
        return Err(TensorError::NotSymmetric {
            what,
            deviation: dev.to_f64_lossy(),
        });
    }
    Ok(())
}

fn require_dim<T: Scalar>(a: &DenseTensor<T>, b: &DenseTensor<T>) -> Result<(), TensorError> {
    if a.dim() != b.dim() {
        return Err(TensorError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// Kulkarni–Nomizu product `E ∧ T` of a symmetric `(0,2)` tensor with a `(0,k)` tensor, `k ≥ 2`.
///
/// `(E∧T)(X₁,X₂,X₃,X₄;Y₃..Yₖ) = E₁₄T₂₃… + E₂₃T₁₄… − E₁₃T₂₄… − E₂₄T₁₃…`
pub fn kulkarni_nomizu<T: Scalar>(
    e: &DenseTensor<T>,
    t: &DenseTensor<T>,
) -> Result<DenseTensor<T>, TensorError> {
    require_dim(e, t)?;
    require_symmetric(e, "E")?;
    let k = t.rank();
    if k < 2 {
        return Err(TensorError::UnsupportedRank {
            op: "kulkarni_nomizu",
            rank: k,
        });
    }
    if k + 2 > 6 {
        return Err(TensorError::UnsupportedRank {
            op: "kulkarni_nomizu",
            rank: k,
        });
    }
    let n = e.dim();
    let tail = n.pow((k - 2) as u32);
    let ed = e.as_slice();
    let td = t.as_slice();
    let mut out = DenseTensor::zeros(n, k + 2);
    let od = out.as_mut_slice();
    let tix = |a: usize, b: usize, y: usize| (a * n + b) * tail + y;
    let mut o = 0;
    for x1 in 0..n {
        for x2 in 0..n {
            for x3 in 0..n {
                for x4 in 0..n {
                    let e14 = ed[x1 * n + x4];
                    let e23 = ed[x2 * n + x3];
                    let e13 = ed[x1 * n + x3];
                    let e24 = ed[x2 * n + x4];
                    for y in 0..tail {
                        od[o] = e14 * td[tix(x2, x3, y)] + e23 * td[tix(x1, x4, y)]
                            - e13 * td[tix(x2, x4, y)]
                            - e24 * td[tix(x1, x3, y)];
                        o += 1;
                    }
                }
            }
        }
    }
    let both_symmetric_pairs = k == 2
        && t
            .symmetry_deviation(Symmetry::SymmetricPair)
            .map(|d| d <= T::attainable(1e-12))
            .unwrap_or(false);
    Ok(if both_symmetric_pairs {
        out.assume_symmetry(Symmetry::GeneralizedCurvature)
    } else {
        out
    })
}

/// `G = ½ g∧g`, i.e. `G_{hijk} = g_{hk}g_{ij} − g_{hj}g_{ik}`.
pub fn g_tensor<T: Scalar>(g: &DenseTensor<T>) -> DenseTensor<T> {
    let n = g.dim();
    DenseTensor::from_fn(n, 4, |ix| {
        let (h, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        g.at2(h, k) * g.at2(i, j) - g.at2(h, j) * g.at2(i, k)
    })
    .assume_symmetry(Symmetry::GeneralizedCurvature)
}

/// Tachibana tensor `Q(A,T)` for a symmetric `A` and a `(0,k)` tensor, `1 ≤ k ≤ 4`.
///
/// `Q(A,T)_{x₁..xₖ l m} = Σₛ A_{xₛ l} T_{..m..} − A_{xₛ m} T_{..l..}` with the
/// replacement in slot `s`.
pub fn tachibana<T: Scalar>(
    a: &DenseTensor<T>,
    t: &DenseTensor<T>,
) -> Result<DenseTensor<T>, TensorError> {
    require_dim(a, t)?;
    require_symmetric(a, "A")?;
    let k = t.rank();
    if k == 0 || k > MAX_ACTION_RANK {
        return Err(TensorError::UnsupportedRank { op: "tachibana", rank: k });
    }
    let n = a.dim();
    let ad = a.as_slice();
    let td = t.as_slice();
    let strides: Vec<usize> = (0..k).map(|s| n.pow((k - 1 - s) as u32)).collect();
    let tsize = td.len();
    let mut out = DenseTensor::zeros(n, k + 2);
    let od = out.as_mut_slice();
    let mut x = vec![0usize; k];
    for base in 0..tsize {
        // decode the leading k indices
        let mut rem = base;
        for s in 0..k {
            x[s] = rem / strides[s];
            rem %= strides[s];
        }
        for l in 0..n {
            for m in 0..n {
                let mut acc = T::zero();
                for s in 0..k {
                    let xs = x[s];
                    let without = base - xs * strides[s];
                    acc += ad[xs * n + l] * td[without + m * strides[s]]
                        - ad[xs * n + m] * td[without + l * strides[s]];
                }
                od[(base * n + l) * n + m] = acc;
            }
        }
    }
    Ok(out)
}

/// Curvature action `B·T` of a generalized curvature tensor on a `(0,k)` tensor, `k ∈ {2,4}`.
///
/// `(B·T)_{x₁..xₖ l m} = g^{pq} Σₛ T_{..p..} B_{q xₛ l m}`.
pub fn curvature_action<T: Scalar>(
    b: &DenseTensor<T>,
    g_inv: &DenseTensor<T>,
    t: &DenseTensor<T>,
) -> Result<DenseTensor<T>, TensorError> {
    require_dim(b, t)?;
    require_dim(g_inv, t)?;
    if b.rank() != 4 {
        return Err(TensorError::RankMismatch {
            expected: 4,
            found: b.rank(),
        });
    }
    let k = t.rank();
    if k != 2 && k != 4 {
        return Err(TensorError::UnsupportedRank {
            op: "curvature_action",
            rank: k,
        });
    }
    let n = t.dim();
    // raised[p][x][l][m] = g^{pq} B_{q x l m}
    let raised = raise_first(g_inv, b);
    let rd = raised.as_slice();
    let td = t.as_slice();
    let strides: Vec<usize> = (0..k).map(|s| n.pow((k - 1 - s) as u32)).collect();
    let n3 = n * n * n;
    let mut out = DenseTensor::zeros(n, k + 2);
    let od = out.as_mut_slice();
    let mut x = vec![0usize; k];
    for base in 0..td.len() {
        let mut rem = base;
        for s in 0..k {
            x[s] = rem / strides[s];
            rem %= strides[s];
        }
        for l in 0..n {
            for m in 0..n {
                let lm = l * n + m;
                let mut acc = T::zero();
                for s in 0..k {
                    let xs = x[s];
                    let without = base - xs * strides[s];
                    for p in 0..n {
                        acc += td[without + p * strides[s]] * rd[p * n3 + xs * n * n + lm];
                    }
                }
                od[(base * n + l) * n + m] = acc;
            }
        }
    }
    Ok(out)
}

/// Raises the first slot: `(g⁻¹T)^{p}_{…} = g^{pq} T_{q…}`.
pub fn raise_first<T: Scalar>(g_inv: &DenseTensor<T>, t: &DenseTensor<T>) -> DenseTensor<T> {
    let n = t.dim();
    let rest = t.as_slice().len() / n;
    let td = t.as_slice();
    let mut out = DenseTensor::zeros(n, t.rank());
    let od = out.as_mut_slice();
    for p in 0..n {
        for q in 0..n {
            let gpq = g_inv.at2(p, q);
            if gpq == T::zero() {
                continue;
            }
            for r in 0..rest {
                od[p * rest + r] += gpq * td[q * rest + r];
            }
        }
    }
    out
}

/// Ricci contraction `S_{ij} = g^{hk} R_{hijk}`.
pub fn ricci_contraction<T: Scalar>(
    r: &DenseTensor<T>,
    g_inv: &DenseTensor<T>,
) -> Result<DenseTensor<T>, TensorError> {
    require_dim(r, g_inv)?;
    let n = r.dim();
    let s = DenseTensor::from_fn(n, 2, |ix| {
        let (i, j) = (ix[0], ix[1]);
        let mut acc = T::zero();
        for h in 0..n {
            for k in 0..n {
                acc += g_inv.at2(h, k) * r.at4(h, i, j, k);
            }
        }
        acc
    });
    // symmetrize away round-off; R's pair symmetry makes S symmetric exactly
    let st = s.transpose(0, 1);
    Ok((&(&s + &st) * T::lit(0.5)).assume_symmetry(Symmetry::SymmetricPair))
}

/// Full trace `g^{ij} A_{ij}`.
pub fn trace<T: Scalar>(a: &DenseTensor<T>, g_inv: &DenseTensor<T>) -> T {
    let n = a.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            acc += g_inv.at2(i, j) * a.at2(i, j);
        }
    }
    acc
}

/// `(A∘T)_{h…} = A_h^{ l} T_{l…} = g^{lm} A_{hl} T_{m…}`; with `A = S`, `T = R` this is `V`.
pub fn operator_compose<T: Scalar>(
    a: &DenseTensor<T>,
    g_inv: &DenseTensor<T>,
    t: &DenseTensor<T>,
) -> Result<DenseTensor<T>, TensorError> {
    require_dim(a, t)?;
    require_dim(g_inv, t)?;
    let n = t.dim();
    let raised = raise_first(g_inv, t);
    let rd = raised.as_slice();
    let rest = rd.len() / n;
    let mut out = DenseTensor::zeros(n, t.rank());
    let od = out.as_mut_slice();
    for h in 0..n {
        for l in 0..n {
            let ahl = a.at2(h, l);
            if ahl == T::zero() {
                continue;
            }
            for r in 0..rest {
                od[h * rest + r] += ahl * rd[l * rest + r];
            }
        }
    }
    Ok(out)
}

/// Mixed matrix `A_h^{ l} = A_{hm} g^{ml}` of a rank-2 tensor, i.e. `A g⁻¹`.
pub fn mixed<T: Scalar>(a: &DenseTensor<T>, g_inv: &DenseTensor<T>) -> DenseTensor<T> {
    let n = a.dim();
    DenseTensor::from_fn(n, 2, |ix| {
        (0..n).fold(T::zero(), |acc, m| acc + a.at2(ix[0], m) * g_inv.at2(m, ix[1]))
    })
}

/// `A g⁻¹ B`, the covariant square when `A = B`.
pub fn metric_product<T: Scalar>(
    a: &DenseTensor<T>,
    g_inv: &DenseTensor<T>,
    b: &DenseTensor<T>,
) -> DenseTensor<T> {
    let n = a.dim();
    let am = mixed(a, g_inv);
    DenseTensor::from_fn(n, 2, |ix| {
        (0..n).fold(T::zero(), |acc, m| acc + am.at2(ix[0], m) * b.at2(m, ix[1]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorkit::testing::{random_gen_curvature, random_metric, random_symmetric};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn g_wedge_g_is_twice_g_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_metric(&mut rng, 4, 1);
        let gg = kulkarni_nomizu(&g.g, &g.g).unwrap();
        let big_g = g_tensor(&g.g);
        assert!(gg.rel_distance(&big_g.scale(2.0)).unwrap() < 1e-15);
        assert_eq!(gg.symmetry(), Symmetry::GeneralizedCurvature);
    }

    #[test]
    fn zero_factor_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = random_symmetric(&mut rng, 4);
        let z = DenseTensor::zeros(4, 2);
        assert!(kulkarni_nomizu(&z, &t).unwrap().is_zero());
    }

    #[test]
    fn kulkarni_nomizu_rejects_bad_inputs() {
        let e = DenseTensor::<f64>::from_vec(2, 2, vec![1.0, 2.0, 0.0, 1.0]).unwrap();
        let t = DenseTensor::<f64>::identity(2);
        assert!(matches!(
            kulkarni_nomizu(&e, &t),
            Err(TensorError::NotSymmetric { .. })
        ));
        assert!(matches!(
            kulkarni_nomizu(&t, &DenseTensor::identity(3)),
            Err(TensorError::DimensionMismatch { .. })
        ));
        assert!(kulkarni_nomizu(&t, &DenseTensor::zeros(2, 1)).is_err());
    }

    #[test]
    fn tachibana_of_g_on_g_tensor_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_metric(&mut rng, 5, 2);
        let q = tachibana(&g.g, &g_tensor(&g.g)).unwrap();
        assert!(q.max_abs() < 1e-12);
    }

    #[test]
    fn tachibana_rejects_rank_zero_and_large() {
        let g = DenseTensor::<f64>::identity(3);
        assert!(tachibana(&g, &DenseTensor::zeros(3, 0)).is_err());
        assert!(tachibana(&g, &DenseTensor::zeros(3, 5)).is_err());
    }

    #[test]
    fn curvature_action_rejects_rank_three() {
        let g = DenseTensor::<f64>::identity(3);
        let b = g_tensor(&g);
        assert!(matches!(
            curvature_action(&b, &g, &DenseTensor::zeros(3, 3)),
            Err(TensorError::UnsupportedRank { .. })
        ));
    }

    #[test]
    fn curvature_action_matches_derivation_definition() {
        // brute-force oracle from the endomorphism form: −Σₛ T(.., B(X,Y)Xₛ, ..)
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 3;
        let mp = random_metric(&mut rng, n, 1);
        let b = random_gen_curvature(&mut rng, &mp.g, 2);
        let t = random_symmetric(&mut rng, n);
        let fast = curvature_action(&b, &mp.g_inv, &t).unwrap();
        // B(X,Y)Z = endo with components: B(∂l,∂m)∂x = Σ_p g^{pq} B_{l m x q} ∂p
        let endo = |l: usize, m: usize, x: usize, p: usize| {
            (0..n).fold(0.0, |acc, q| acc + mp.g_inv.at2(p, q) * b.at4(l, m, x, q))
        };
        for h in 0..n {
            for k in 0..n {
                for l in 0..n {
                    for m in 0..n {
                        let mut v = 0.0;
                        for p in 0..n {
                            v -= endo(l, m, h, p) * t.at2(p, k) + endo(l, m, k, p) * t.at2(h, p);
                        }
                        assert!((fast.get(&[h, k, l, m]) - v).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn single_precision_products() {
        let g = DenseTensor::<f32>::diagonal(&[-1.0, 1.0, 2.0, 1.5]);
        let gg = kulkarni_nomizu(&g, &g).unwrap();
        assert!(gg.rel_distance(&g_tensor(&g).scale(2.0)).unwrap() < 1e-6);
    }
}
