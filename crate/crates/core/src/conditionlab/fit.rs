use std::fmt;
use std::str::FromStr;

use super::predicates::{
    d1_d3_with, genein1_with, h1_with, sr2_with, theorem21_with,
};
use super::ptensor::ge_residual_with;
use super::sets::{classify_with, NOISE_FLOOR};
use super::{ConditionError, Products, DEFAULT_TOL};
use crate::chartgeo::CurvatureSnapshot;
use crate::scalar::{ratio, Scalar};
use crate::tensorkit::{g_tensor, gram_fit, kulkarni_nomizu, DenseTensor};

/// Condition identifiers addressable from configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConditionId {
    /// `R·C − C·R = L·Q(S,R)`
    A1,
    /// `R·C − C·R = L₁·Q(g,R)`
    Geneintsu,
    /// `R·C − C·R = L·Q(g,C)`
    Qgc,
    /// `C·R = L·Q(g,R)`
    R77,
    /// `C·S = L·Q(g,S)`
    R777,
    /// `R·R − Q(S,R) = L·Q(g,C)`
    R877,
    /// `R·R = L_R·Q(g,R)`
    Pseudo,
    /// `R·S = L_S·Q(g,S)`
    RicciPseudo,
    /// `R·C − C·R = L·Q(S,C)`
    Qsc,
    H1,
    Genein1,
    Sr2,
    D1,
    D3,
    Roter,
    Ge,
    Thm21,
}

pub const ALL_CONDITIONS: [ConditionId; 17] = [
    ConditionId::A1,
    ConditionId::Geneintsu,
    ConditionId::Qgc,
    ConditionId::R77,
    ConditionId::R777,
    ConditionId::R877,
    ConditionId::Pseudo,
    ConditionId::RicciPseudo,
    ConditionId::Qsc,
    ConditionId::H1,
    ConditionId::Genein1,
    ConditionId::Sr2,
    ConditionId::D1,
    ConditionId::D3,
    ConditionId::Roter,
    ConditionId::Ge,
    ConditionId::Thm21,
];

impl ConditionId {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::A1 => "A1",
            Self::Geneintsu => "GENEINTSU",
            Self::Qgc => "QGC",
            Self::R77 => "R77",
            Self::R777 => "R777",
            Self::R877 => "R877",
            Self::Pseudo => "PSEUDO",
            Self::RicciPseudo => "RICCIPSEUDO",
            Self::Qsc => "QSC",
            Self::H1 => "H1",
            Self::Genein1 => "GENEIN1",
            Self::Sr2 => "SR2",
            Self::D1 => "D1",
            Self::D3 => "D3",
            Self::Roter => "ROTER",
            Self::Ge => "GE",
            Self::Thm21 => "THM21",
        }
    }

    /// True for the conditions fitted with one coefficient by [`fit_condition`].
    pub fn is_single_fit(self) -> bool {
        matches!(
            self,
            Self::A1
                | Self::Geneintsu
                | Self::Qgc
                | Self::R77
                | Self::R777
                | Self::R877
                | Self::Pseudo
                | Self::RicciPseudo
                | Self::Qsc
        )
    }

    /// Conditions that read the snapshot as a fiber and need `εa²`.
    pub fn needs_ea2(self) -> bool {
        matches!(self, Self::Sr2 | Self::D1 | Self::D3)
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConditionId {
    type Err = ConditionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.trim().to_ascii_uppercase();
        ALL_CONDITIONS
            .iter()
            .copied()
            .find(|c| c.as_str() == up)
            .ok_or_else(|| ConditionError::UnknownCondition(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitStatus {
    Fitted,
    /// The basis tensor vanishes at its natural scale; the condition says nothing.
    Degenerate,
    /// An implication check whose hypothesis does not hold at the point.
    Vacuous,
    /// Not applicable (dimension, missing `εa²`, non-Einstein input).
    Skipped,
}

impl FitStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fitted => "fitted",
            Self::Degenerate => "degenerate",
            Self::Vacuous => "vacuous",
            Self::Skipped => "skipped",
        }
    }
}

/// Tolerances for fits and residual checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitContext {
    /// A condition holds when its residual is at most `tol`.
    pub tol: f64,
    /// A basis tensor below this fraction of its natural scale is degenerate.
    pub degenerate_tol: f64,
    /// Candidate `εa²` for the fiber conditions SR2, D1, D3.
    pub ea2: Option<f64>,
}

impl Default for FitContext {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            degenerate_tol: 1e-10,
            ea2: None,
        }
    }
}

impl FitContext {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Outcome of one condition at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult<T> {
    pub condition: ConditionId,
    /// `L`, or `(φ, μ, η)` for ROTER, or the fixed coefficient of a predicate.
    pub coefficients: Vec<T>,
    pub residual: T,
    /// `residual ≤ tolerance`; a NaN residual never holds.
    pub holds: bool,
    pub status: FitStatus,
    pub lhs_norm: T,
    pub basis_norms: Vec<T>,
    pub tolerance: T,
    /// Named by-products such as the derived `L_R` of a Roter fit.
    pub extras: Vec<(&'static str, T)>,
}

impl<T: Scalar> FitResult<T> {
    fn new(condition: ConditionId, status: FitStatus, residual: T, tol: f64) -> Self {
        let tolerance = T::lit(tol);
        Self {
            condition,
            coefficients: Vec::new(),
            residual,
            holds: residual <= tolerance,
            status,
            lhs_norm: T::zero(),
            basis_norms: Vec::new(),
            tolerance,
            extras: Vec::new(),
        }
    }

    pub(crate) fn skipped(condition: ConditionId, tol: f64) -> Self {
        Self::new(condition, FitStatus::Skipped, T::lit(f64::NAN), tol)
    }

    pub(crate) fn residual_check(
        condition: ConditionId,
        residual: T,
        coefficient: Option<T>,
        tol: f64,
    ) -> Self {
        let mut out = Self::new(condition, FitStatus::Fitted, residual, tol);
        out.coefficients.extend(coefficient);
        out
    }

    pub fn coefficient(&self) -> Option<T> {
        self.coefficients.first().copied()
    }

    pub fn extra(&self, name: &str) -> Option<T> {
        self.extras.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }
}

/// Left side, basis, and their natural scales.
type SingleTerms<'p, T> = (DenseTensor<T>, &'p DenseTensor<T>, T, T);

/// Left side, basis and their natural scales for a one-coefficient condition.
fn single_terms<'p, T: Scalar>(p: &'p Products<'_, T>, id: ConditionId) -> Result<SingleTerms<'p, T>, ConditionError> {
    let sc = p.scales();
    let (rr, rs, gr) = (sc.r, sc.s, sc.g * sc.r);
    Ok(match id {
        ConditionId::A1 => (p.difference()?.clone(), p.q_s_r()?, sc.action(rr), rs * rr),
        ConditionId::Geneintsu => (p.difference()?.clone(), p.q_g_r()?, sc.action(rr), gr),
        ConditionId::Qgc => (p.difference()?.clone(), p.q_g_c()?, sc.action(rr), gr),
        ConditionId::R77 => (p.c_r()?.clone(), p.q_g_r()?, sc.action(rr), gr),
        ConditionId::R777 => (p.c_s()?.clone(), p.q_g_s()?, sc.action(rs), sc.g * rs),
        ConditionId::R877 => {
            let mut lhs = p.r_r()?.clone();
            lhs.axpy(-T::one(), p.q_s_r()?)?;
            (lhs, p.q_g_c()?, sc.action(rr), gr)
        }
        ConditionId::Pseudo => (p.r_r()?.clone(), p.q_g_r()?, sc.action(rr), gr),
        ConditionId::RicciPseudo => (p.r_s()?.clone(), p.q_g_s()?, sc.action(rs), sc.g * rs),
        ConditionId::Qsc => (p.difference()?.clone(), p.q_s_c()?, sc.action(rr), rs * rr),
        other => return Err(ConditionError::NotAFit(other)),
    })
}

/// One-coefficient least-squares fit `lhs ≈ L·basis`.
///
/// The residual is `‖lhs − L·basis‖` relative to `‖lhs‖`, floored at a small
/// fraction of the left side's natural scale so that a left side that is zero
/// up to round-off counts as satisfied.
pub fn fit_condition<T: Scalar>(
    snap: &CurvatureSnapshot<T>,
    id: ConditionId,
    ctx: &FitContext,
) -> Result<FitResult<T>, ConditionError> {
    fit_with(&Products::new(snap), id, ctx)
}

pub(crate) fn fit_with<T: Scalar>(
    p: &Products<'_, T>,
    id: ConditionId,
    ctx: &FitContext,
) -> Result<FitResult<T>, ConditionError> {
    let (lhs, basis, lhs_scale, basis_scale) = single_terms(p, id)?;
    let fit = gram_fit(&lhs, &[basis])?;
    let bnorm = fit.basis_norms[0];
    let degenerate = bnorm <= T::lit(ctx.degenerate_tol) * basis_scale || bnorm == T::zero();
    let coef = if degenerate { T::zero() } else { fit.coefficients[0] };
    let mut diff = lhs.clone();
    diff.axpy(-coef, basis)?;
    let den = fit.target_norm.max(T::lit(NOISE_FLOOR) * lhs_scale);
    let residual = ratio(diff.norm(), den);
    let status = if degenerate {
        FitStatus::Degenerate
    } else {
        FitStatus::Fitted
    };
    let mut out = FitResult::new(id, status, residual, ctx.tol);
    out.coefficients = vec![coef];
    out.lhs_norm = fit.target_norm;
    out.basis_norms = vec![bnorm];
    Ok(out)
}

/// Three-coefficient fit `R ≈ (φ/2)·S∧S + μ·g∧S + η·G`.
///
/// When the fit holds and `φ ≠ 0`, the extras carry
/// `L_R = φ⁻¹((n−2)(μ² − φη) − μ)` and the independently fitted PSEUDO
/// coefficient for comparison.
pub fn roter_fit<T: Scalar>(
    snap: &CurvatureSnapshot<T>,
    ctx: &FitContext,
) -> Result<FitResult<T>, ConditionError> {
    roter_with(&Products::new(snap), ctx)
}

pub(crate) fn roter_with<T: Scalar>(
    p: &Products<'_, T>,
    ctx: &FitContext,
) -> Result<FitResult<T>, ConditionError> {
    let snap = p.snap;
    let n = snap.dim();
    if n < 4 {
        return Ok(FitResult::skipped(ConditionId::Roter, ctx.tol));
    }
    let sc = p.scales();
    let half_ss = kulkarni_nomizu(&snap.s, &snap.s)?.scale(T::lit(0.5));
    let gs = kulkarni_nomizu(snap.g(), &snap.s)?;
    let big_g = g_tensor(snap.g());
    let fit = gram_fit(&snap.r, &[&half_ss, &gs, &big_g])?;
    let scales = [sc.s * sc.s, sc.g * sc.s, sc.g * sc.g];
    let degenerate = fit.rank_deficient
        || fit
            .basis_norms
            .iter()
            .zip(scales)
            .any(|(&b, s)| b <= T::lit(ctx.degenerate_tol) * s);
    let mut diff = snap.r.clone();
    for (c, b) in fit.coefficients.iter().zip([&half_ss, &gs, &big_g]) {
        diff.axpy(-*c, b)?;
    }
    let residual = ratio(diff.norm(), fit.target_norm);
    let status = if degenerate {
        FitStatus::Degenerate
    } else {
        FitStatus::Fitted
    };
    let mut out = FitResult::new(ConditionId::Roter, status, residual, ctx.tol);
    out.coefficients = fit.coefficients.clone();
    out.lhs_norm = fit.target_norm;
    out.basis_norms = fit.basis_norms.clone();

    let membership = classify_with(p, ctx.tol)?;
    out.extras
        .push(("in_u1", if membership.in_u1 { T::one() } else { T::zero() }));
    let (phi, mu, eta) = (fit.coefficients[0], fit.coefficients[1], fit.coefficients[2]);
    if out.holds && !degenerate && phi != T::zero() {
        let nf = T::from_usize_lossy(n);
        let l_r = ((nf - T::lit(2.0)) * (mu * mu - phi * eta) - mu) / phi;
        out.extras.push(("L_R", l_r));
        let pseudo = fit_with(p, ConditionId::Pseudo, ctx)?;
        if let Some(lp) = pseudo.coefficient() {
            out.extras.push(("L_R_pseudo_fit", lp));
            out.extras.push(("pseudo_residual", pseudo.residual));
        }
    }
    Ok(out)
}

/// Evaluates any condition id: fits, predicates, the identity and the implication check.
pub fn evaluate<T: Scalar>(
    snap: &CurvatureSnapshot<T>,
    id: ConditionId,
    ctx: &FitContext,
) -> Result<FitResult<T>, ConditionError> {
    evaluate_with(&Products::new(snap), id, ctx)
}

pub(crate) fn evaluate_with<T: Scalar>(
    p: &Products<'_, T>,
    id: ConditionId,
    ctx: &FitContext,
) -> Result<FitResult<T>, ConditionError> {
    let n = p.snap.dim();
    if id.is_single_fit() {
        if n < 3 {
            return Ok(FitResult::skipped(id, ctx.tol));
        }
        return fit_with(p, id, ctx);
    }
    match id {
        ConditionId::Roter => roter_with(p, ctx),
        ConditionId::H1 => {
            let (res, coef) = h1_with(p)?;
            Ok(FitResult::residual_check(id, res, Some(coef), ctx.tol))
        }
        ConditionId::Genein1 => match genein1_with(p, ctx.tol) {
            Ok(rep) => Ok(FitResult::residual_check(
                id,
                rep.residual_qgr.max(rep.residual_qgc),
                Some(rep.coefficient),
                ctx.tol,
            )),
            Err(ConditionError::NotEinstein { .. } | ConditionError::DimensionTooSmall { .. }) => {
                Ok(FitResult::skipped(id, ctx.tol))
            }
            Err(e) => Err(e),
        },
        ConditionId::Sr2 | ConditionId::D1 | ConditionId::D3 => {
            let Some(ea2) = ctx.ea2 else {
                return Ok(FitResult::skipped(id, ctx.tol));
            };
            let ea2 = T::lit(ea2);
            if n < 3 {
                return Ok(FitResult::skipped(id, ctx.tol));
            }
            if id == ConditionId::Sr2 {
                return Ok(FitResult::residual_check(id, sr2_with(p, ea2)?, Some(ea2), ctx.tol));
            }
            let rep = d1_d3_with(p, ea2)?;
            match (id, rep.d3) {
                (ConditionId::D1, _) => Ok(FitResult::residual_check(id, rep.d1, Some(ea2), ctx.tol)),
                (_, Some(d3)) => Ok(FitResult::residual_check(id, d3, None, ctx.tol)),
                (_, None) => Ok(FitResult::skipped(id, ctx.tol)),
            }
        }
        ConditionId::Ge => {
            if n < 4 {
                return Ok(FitResult::skipped(id, ctx.tol));
            }
            Ok(FitResult::residual_check(id, ge_residual_with(p)?, None, ctx.tol))
        }
        ConditionId::Thm21 => {
            let rep = theorem21_with(p, ctx)?;
            if rep.vacuous {
                let mut out = FitResult::new(id, FitStatus::Vacuous, T::zero(), ctx.tol);
                out.coefficients.extend(rep.l);
                return Ok(out);
            }
            let res = rep.rr_residual.max(rep.cr_relative);
            let mut out = FitResult::residual_check(id, res, rep.l, ctx.tol);
            out.extras.push(("rr_residual", rep.rr_residual));
            out.extras.push(("cr_relative", rep.cr_relative));
            Ok(out)
        }
        _ => Err(ConditionError::NotAFit(id)),
    }
}

/// Evaluates several conditions on one snapshot, sharing intermediate tensors.
pub fn fit_all<T: Scalar>(
    snap: &CurvatureSnapshot<T>,
    ids: &[ConditionId],
    ctx: &FitContext,
) -> Result<Vec<FitResult<T>>, ConditionError> {
    let p = Products::new(snap);
    ids.iter().map(|&id| evaluate_with(&p, id, ctx)).collect()
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
    fn ids_round_trip() {
        for id in ALL_CONDITIONS {
            assert_eq!(id.as_str().parse::<ConditionId>().unwrap(), id);
        }
        assert_eq!("ricciPseudo".parse::<ConditionId>().unwrap(), ConditionId::RicciPseudo);
        assert!("A2".parse::<ConditionId>().is_err());
    }

    #[test]
    fn geneintsu_on_sphere_product() {
        let r = fit_condition(&s2s2(), ConditionId::Geneintsu, &FitContext::default()).unwrap();
        assert_eq!(r.status, FitStatus::Fitted);
        assert!(r.holds, "{r:?}");
        assert!((r.coefficients[0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn space_form_fits_are_degenerate() {
        let snap = space_form_snapshot::<f64>(5, 20.0, Signature::lorentzian(5)).unwrap();
        let r = fit_condition(&snap, ConditionId::Qgc, &FitContext::default()).unwrap();
        assert_eq!(r.status, FitStatus::Degenerate);
        // both sides vanish, so the (empty) condition is satisfied
        assert!(r.holds);
        let a1 = fit_condition(&snap, ConditionId::A1, &FitContext::default()).unwrap();
        assert_eq!(a1.status, FitStatus::Degenerate);
        assert_eq!(a1.coefficients, vec![0.0]);
    }

    #[test]
    fn random_point_fails_a1() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let m = random_metric(&mut rng, 5, 1);
        let r = random_gen_curvature(&mut rng, &m.g, 4);
        let snap = synthetic_snapshot(m.g.clone(), r).unwrap();
        let results = fit_all(&snap, &ALL_CONDITIONS, &FitContext::default()).unwrap();
        for res in &results {
            match res.condition {
                ConditionId::Ge => assert!(res.holds),
                ConditionId::Thm21 => assert_eq!(res.status, FitStatus::Vacuous),
                c if c.is_single_fit() => {
                    assert_eq!(res.status, FitStatus::Fitted);
                    assert!(!res.holds, "{c}: {res:?}");
                }
                _ => {}
            }
        }
    }

    #[test]
    fn einstein_roter_is_degenerate() {
        let r = roter_fit(&s2s2(), &FitContext::default()).unwrap();
        assert_eq!(r.status, FitStatus::Degenerate);
    }

    #[test]
    fn missing_ea2_skips_fiber_conditions() {
        let r = evaluate(&s2s2(), ConditionId::Sr2, &FitContext::default()).unwrap();
        assert_eq!(r.status, FitStatus::Skipped);
        assert!(!r.holds && r.residual.is_nan());
    }
}
