//! Fiber-index blocks of `Q(g,R)`, `Q(S,R)`, `V = S∘R` and `P` on a warped
//! product, and their reassembly into full chart tensors.
//!
//! Index `0` of the full chart is the base coordinate. Block tensors are
//! stored with their fiber indices in the order they appear in the pattern,
//! e.g. `qsr_1bgd1m[β][γ][δ][μ] = Q(S,R)_{1βγδ1μ}`.

use super::{WarpError, WarpScalars, WarpedSpec};
use crate::conditionlab::p_from_v;
use crate::scalar::Scalar;
use crate::tensorkit::{curvature_action, operator_compose, tachibana, DenseTensor, Symmetry};

#[derive(Clone, Debug, PartialEq)]
pub struct WarpedBlocks<T> {
    pub n: usize,
    pub qgr_1bgd1m: DenseTensor<T>,
    pub qgr_abgdlm: DenseTensor<T>,
    pub qsr_1bgd1m: DenseTensor<T>,
    pub qsr_1b1dlm: DenseTensor<T>,
    pub qsr_abgdlm: DenseTensor<T>,
    pub v_1bg1: DenseTensor<T>,
    pub v_a11d: DenseTensor<T>,
    pub v_abgd: DenseTensor<T>,
    pub p_1b1dlm: DenseTensor<T>,
    pub p_1bgd1m: DenseTensor<T>,
    pub p_abgdlm: DenseTensor<T>,
}

/// Block components from the closed-form warped-product formulas.
pub fn warped_blocks<T: Scalar>(spec: &WarpedSpec<T>) -> Result<WarpedBlocks<T>, WarpError> {
    let wp = spec.point()?;
    let (n, eps, f) = (wp.n, wp.epsilon, wp.jet.f);
    let WarpScalars {
        t11,
        tr_t,
        delta_over_4f: d,
        ..
    } = wp.scalars;
    let m = n - 1;
    let nf = T::from_usize_lossy(n);
    let two = T::lit(2.0);
    let half_tr = tr_t / two;
    let fib = &spec.fiber;
    let (gt, gti, rt, st, big_gt) = (fib.g(), fib.g_inv(), &fib.r, &fib.s, &fib.big_g);
    // tr T/2 + (n−2) Δ₁F/(4F) and tr T/2 − Δ₁F/(4F)
    let shift = half_tr + (nf - two) * d;
    let diff = half_tr - d;

    let q_gr = tachibana(gt, rt)?;
    let q_sr = tachibana(st, rt)?;
    let q_sg = tachibana(st, big_gt)?;
    let q_gs = tachibana(gt, st)?;
    let r_s = curvature_action(rt, gti, st)?;
    let s_r = operator_compose(st, gti, rt)?;

    // pattern (β,γ,δ,μ) ↦ X_{μβγδ}
    let lead_mu = |t: &DenseTensor<T>, ix: &[usize]| t.at4(ix[3], ix[0], ix[1], ix[2]);
    // g̃_{βγ}S̃_{δμ} − g̃_{βδ}S̃_{γμ}
    let gs_pair = |ix: &[usize]| gt.at2(ix[0], ix[1]) * st.at2(ix[2], ix[3]) - gt.at2(ix[0], ix[2]) * st.at2(ix[1], ix[3]);

    let qgr_1bgd1m = DenseTensor::from_fn(m, 4, |ix| {
        f * eps * (lead_mu(rt, ix) + diff * lead_mu(big_gt, ix))
    });
    let qgr_abgdlm = q_gr.scale(f * f);
    let qsr_1bgd1m = DenseTensor::from_fn(m, 4, |ix| {
        -half_tr
            * eps
            * ((nf - T::one()) * lead_mu(rt, ix) - gs_pair(ix) + diff * lead_mu(big_gt, ix))
    });
    let qsr_1b1dlm = q_gs.scale(-half_tr * eps);
    let qsr_abgdlm = DenseTensor::linear_combination(&[
        (f, &q_sr),
        (-f * d, &q_sg),
        (-f * shift, &q_gr),
    ])?;

    let v_1bg1 = gt.scale((nf - T::one()) / (T::lit(4.0) * f) * tr_t * t11);
    let v_a11d = DenseTensor::from_fn(m, 2, |ix| {
        -tr_t / (two * f) * eps * (st.at2(ix[0], ix[1]) - shift * gt.at2(ix[0], ix[1]))
    });
    let v_abgd = DenseTensor::from_fn(m, 4, |ix| {
        let (a, b, c, e) = (ix[0], ix[1], ix[2], ix[3]);
        s_r.at4(a, b, c, e) - shift * rt.at4(a, b, c, e)
            - d * (gt.at2(b, c) * st.at2(a, e) - gt.at2(b, e) * st.at2(a, c))
            + shift * d * big_gt.at4(a, b, c, e)
    });

    let p_1b1dlm = DenseTensor::linear_combination(&[(eps, &r_s), (eps * diff, &q_gs)])?;
    let g_coef = (nf - two) * d * d - tr_t * tr_t / T::lit(4.0) - (nf - T::lit(3.0)) * half_tr * d;
    let p_1bgd1m = DenseTensor::from_fn(m, 4, |ix| {
        eps * (lead_mu(&s_r, ix) - shift * lead_mu(rt, ix) + diff * gs_pair(ix) + g_coef * lead_mu(big_gt, ix))
    });
    let p_abgdlm = p_from_v(&gt.scale(f), &v_abgd)?;

    Ok(WarpedBlocks {
        n,
        qgr_1bgd1m,
        qgr_abgdlm,
        qsr_1bgd1m,
        qsr_1b1dlm,
        qsr_abgdlm,
        v_1bg1,
        v_a11d,
        v_abgd,
        p_1b1dlm,
        p_1bgd1m,
        p_abgdlm,
    })
}

/// Full `(0,6)` tensor with generalized-curvature symmetry in the first four
/// slots and antisymmetry in the last two, from its three warped blocks.
pub fn reassemble_six<T: Scalar>(
    n: usize,
    b_1bgd1m: &DenseTensor<T>,
    b_1b1dlm: &DenseTensor<T>,
    b_abgdlm: &DenseTensor<T>,
) -> DenseTensor<T> {
    DenseTensor::from_fn(n, 6, |ix| {
        let ones: Vec<usize> = (0..6).filter(|&p| ix[p] == 0).collect();
        let f = |p: usize| ix[p] - 1;
        match ones.as_slice() {
            [] => b_abgdlm.get(&[f(0), f(1), f(2), f(3), f(4), f(5)]),
            &[s, t] if s < 4 && t >= 4 => {
                // move the base index to slot 0 using the curvature symmetries
                let (sign, b, c, e) = match s {
                    0 => (T::one(), f(1), f(2), f(3)),
                    1 => (-T::one(), f(0), f(2), f(3)),
                    2 => (T::one(), f(3), f(0), f(1)),
                    _ => (-T::one(), f(2), f(0), f(1)),
                };
                let (sign, mu) = if t == 4 { (sign, f(5)) } else { (-sign, f(4)) };
                sign * b_1bgd1m.at4(b, c, e, mu)
            }
            &[s, t] if t < 4 => {
                let (l, mm) = (f(4), f(5));
                match (s, t) {
                    (0, 2) => b_1b1dlm.at4(f(1), f(3), l, mm),
                    (0, 3) => -b_1b1dlm.at4(f(1), f(2), l, mm),
                    (1, 2) => -b_1b1dlm.at4(f(0), f(3), l, mm),
                    (1, 3) => b_1b1dlm.at4(f(0), f(2), l, mm),
                    _ => T::zero(),
                }
            }
            _ => T::zero(),
        }
    })
}

/// Full `V` from its blocks `V_{1βγ1}`, `V_{α11δ}`, `V_{αβγδ}`.
pub fn reassemble_v<T: Scalar>(
    n: usize,
    v_1bg1: &DenseTensor<T>,
    v_a11d: &DenseTensor<T>,
    v_abgd: &DenseTensor<T>,
) -> DenseTensor<T> {
    DenseTensor::from_fn(n, 4, |ix| {
        let z: Vec<bool> = ix.iter().map(|&i| i == 0).collect();
        let f = |p: usize| ix[p] - 1;
        match (z[0], z[1], z[2], z[3]) {
            (false, false, false, false) => v_abgd.at4(f(0), f(1), f(2), f(3)),
            (true, false, false, true) => v_1bg1.at2(f(1), f(2)),
            (true, false, true, false) => -v_1bg1.at2(f(1), f(3)),
            (false, true, true, false) => v_a11d.at2(f(0), f(3)),
            (false, true, false, true) => -v_a11d.at2(f(0), f(2)),
            _ => T::zero(),
        }
    })
}

impl<T: Scalar> WarpedBlocks<T> {
    pub fn q_g_r(&self) -> DenseTensor<T> {
        let zero = DenseTensor::zeros(self.n - 1, 4);
        reassemble_six(self.n, &self.qgr_1bgd1m, &zero, &self.qgr_abgdlm)
    }

    pub fn q_s_r(&self) -> DenseTensor<T> {
        reassemble_six(self.n, &self.qsr_1bgd1m, &self.qsr_1b1dlm, &self.qsr_abgdlm)
    }

    pub fn v(&self) -> DenseTensor<T> {
        reassemble_v(self.n, &self.v_1bg1, &self.v_a11d, &self.v_abgd)
    }

    pub fn p(&self) -> DenseTensor<T> {
        reassemble_six(self.n, &self.p_1bgd1m, &self.p_1b1dlm, &self.p_abgdlm)
    }

    /// `V_{αβγδ} + V_{βαγδ}` on fiber indices.
    pub fn v_symmetrized(&self) -> DenseTensor<T> {
        &self.v_abgd + &self.v_abgd.transpose(0, 1)
    }
}

/// `(R̃·S̃) − (Δ₁F/4F) Q(g̃,S̃)` on fiber indices, the closed form of
/// `V_{αβγδ} + V_{βαγδ}`.
pub fn vrs_rhs<T: Scalar>(spec: &WarpedSpec<T>) -> Result<DenseTensor<T>, WarpError> {
    let wp = spec.point()?;
    let fib = &spec.fiber;
    let r_s = curvature_action(&fib.r, fib.g_inv(), &fib.s)?;
    let q_gs = tachibana(fib.g(), &fib.s)?;
    Ok(DenseTensor::linear_combination(&[
        (T::one(), &r_s),
        (-wp.scalars.delta_over_4f, &q_gs),
    ])?
    .assume_symmetry(Symmetry::None))
}
