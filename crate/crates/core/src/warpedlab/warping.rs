use std::fmt;
use std::sync::Arc;

use super::WarpError;
use crate::jet::Jet;
use crate::scalar::Scalar;

/// Which branch of `exp(±b x/2)` the exponential family uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    fn sign<T: Scalar>(self) -> T {
        match self {
            Branch::Upper => T::one(),
            Branch::Lower => -T::one(),
        }
    }
}

/// Amplitude of the sinusoidal family: `2εC₁/c²` (solves the warping ODE) or
/// the literal `2εC₁/c`, kept for comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Amplitude {
    Corrected,
    Printed,
}

pub type WarpJetFn<T> = Arc<dyn Fn(&Jet<T>) -> Jet<T> + Send + Sync>;

/// Warping function `F(x¹)` of the one-dimensional base.
#[derive(Clone)]
pub enum WarpingFunction<T> {
    /// `(a x + b)²`
    Quadratic { a: T, b: T },
    /// `(c/2)(exp(±b x/2) − (2εC₁/(b²c)) exp(∓b x/2))²`, `c > 0`, `b ≠ 0`
    Exponential {
        b: T,
        c: T,
        c1: T,
        epsilon: T,
        branch: Branch,
    },
    /// `A (1 + sin(c x + b))`
    Sinusoidal {
        b: T,
        c: T,
        c1: T,
        epsilon: T,
        amplitude: Amplitude,
    },
    /// Any function written in jet arithmetic.
    Custom { label: String, f: WarpJetFn<T> },
}

impl<T: Scalar> fmt::Debug for WarpingFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WarpingFunction::Quadratic { a, b } => write!(f, "Quadratic(a={a:?}, b={b:?})"),
            WarpingFunction::Exponential {
                b,
                c,
                c1,
                epsilon,
                branch,
            } => write!(
                f,
                "Exponential(b={b:?}, c={c:?}, C1={c1:?}, eps={epsilon:?}, {branch:?})"
            ),
            WarpingFunction::Sinusoidal {
                b,
                c,
                c1,
                epsilon,
                amplitude,
            } => write!(
                f,
                "Sinusoidal(b={b:?}, c={c:?}, C1={c1:?}, eps={epsilon:?}, {amplitude:?})"
            ),
            WarpingFunction::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

/// `(F, F′, F″)` at a base coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpingJet<T> {
    pub x1: T,
    pub f: T,
    pub fp: T,
    pub fpp: T,
}

/// Scalars of the base derived from the warping function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpScalars<T> {
    /// `F″ − (F′)²/(2F)`
    pub t11: T,
    /// `ε T₁₁`
    pub tr_t: T,
    /// `ε (F′)²`
    pub delta1_f: T,
    /// `Δ₁F / (4F)`
    pub delta_over_4f: T,
}

impl<T: Scalar> WarpingFunction<T> {
    /// The quadratic solution `εC₁ (x + εc/C₁)²` of the warping ODE, `εC₁ > 0`.
    pub fn ode_quadratic(c: T, c1: T, epsilon: T) -> Result<Self, WarpError> {
        let ec1 = epsilon * c1;
        if ec1 <= T::zero() {
            return Err(WarpError::InvalidParameters("quadratic ODE solution needs εC₁ > 0"));
        }
        let a = ec1.sqrt();
        // εC₁(x + εc/C₁)² = (a x + a εc/C₁)²
        Ok(WarpingFunction::Quadratic {
            a,
            b: a * epsilon * c / c1,
        })
    }

    /// Checks the family's parameter constraints (not positivity at a point).
    pub fn validate(&self) -> Result<(), WarpError> {
        match *self {
            WarpingFunction::Exponential { b, c, epsilon, .. } => {
                if c <= T::zero() {
                    return Err(WarpError::InvalidParameters("exponential warp needs c > 0"));
                }
                if b == T::zero() {
                    return Err(WarpError::InvalidParameters("exponential warp needs b ≠ 0"));
                }
                check_sign(epsilon)
            }
            WarpingFunction::Sinusoidal { c, epsilon, .. } => {
                if c == T::zero() {
                    return Err(WarpError::InvalidParameters("sinusoidal warp needs c ≠ 0"));
                }
                check_sign(epsilon)
            }
            _ => Ok(()),
        }
    }

    /// For sinusoidal warps: whether `εC₁/c > 0` (as printed) and `εC₁ > 0`
    /// (what positivity of the corrected amplitude needs) hold.
    pub fn sinusoidal_constraints(&self) -> Option<(bool, bool)> {
        match *self {
            WarpingFunction::Sinusoidal { c, c1, epsilon, .. } => {
                Some((epsilon * c1 / c > T::zero(), epsilon * c1 > T::zero()))
            }
            _ => None,
        }
    }

    fn sinusoidal_amplitude(c: T, c1: T, epsilon: T, amplitude: Amplitude) -> T {
        let two = T::lit(2.0);
        match amplitude {
            Amplitude::Corrected => two * epsilon * c1 / (c * c),
            Amplitude::Printed => two * epsilon * c1 / c,
        }
    }

    /// `F` in jet arithmetic, for composing with metric fields.
    pub fn on_jet(&self, x: &Jet<T>) -> Jet<T> {
        let half = T::lit(0.5);
        match self {
            WarpingFunction::Quadratic { a, b } => x.scale(*a).add_const(*b).square(),
            WarpingFunction::Exponential {
                b,
                c,
                c1,
                epsilon,
                branch,
            } => {
                let s = branch.sign::<T>() * *b * half;
                let k = T::lit(2.0) * *epsilon * *c1 / (*b * *b * *c);
                let h = x.scale(s).exp() - x.scale(-s).exp().scale(k);
                h.square().scale(*c * half)
            }
            WarpingFunction::Sinusoidal {
                b,
                c,
                c1,
                epsilon,
                amplitude,
            } => {
                let amp = Self::sinusoidal_amplitude(*c, *c1, *epsilon, *amplitude);
                x.scale(*c).add_const(*b).sin().add_const(T::one()).scale(amp)
            }
            WarpingFunction::Custom { f, .. } => f(x),
        }
    }

    /// Raw `(F, F′, F″)` without the positivity check.
    pub(crate) fn raw_jet(&self, x1: T) -> (T, T, T) {
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        match *self {
            WarpingFunction::Quadratic { a, b } => {
                let u = a * x1 + b;
                (u * u, two * a * u, two * a * a)
            }
            WarpingFunction::Exponential {
                b,
                c,
                c1,
                epsilon,
                branch,
            } => {
                let s = branch.sign::<T>() * b * half;
                let k = two * epsilon * c1 / (b * b * c);
                let u = (s * x1).exp();
                let h = u - k / u;
                let hp = s * (u + k / u);
                let hpp = s * s * h;
                (c * half * h * h, c * h * hp, c * (hp * hp + h * hpp))
            }
            WarpingFunction::Sinusoidal {
                b,
                c,
                c1,
                epsilon,
                amplitude,
            } => {
                let amp = Self::sinusoidal_amplitude(c, c1, epsilon, amplitude);
                let th = c * x1 + b;
                (
                    amp * (T::one() + th.sin()),
                    amp * c * th.cos(),
                    -amp * c * c * th.sin(),
                )
            }
            WarpingFunction::Custom { ref f, .. } => {
                let j = f(&Jet::variable(1, 0, x1));
                (j.val, j.d(0), j.dd(0, 0))
            }
        }
    }

    /// Smallest admissible value of `F` at a sample point.
    fn positivity_floor(&self) -> T {
        match *self {
            WarpingFunction::Sinusoidal {
                c,
                c1,
                epsilon,
                amplitude,
                ..
            } => Self::sinusoidal_amplitude(c, c1, epsilon, amplitude).abs() * T::lit(1e-6),
            _ => T::zero(),
        }
    }
}

fn check_sign<T: Scalar>(epsilon: T) -> Result<(), WarpError> {
    if epsilon == T::one() || epsilon == -T::one() {
        Ok(())
    } else {
        Err(WarpError::InvalidParameters("ε must be ±1"))
    }
}

/// `(F, F′, F″)` at `x1`: closed form for catalog families, jets for custom ones.
pub fn warping_jet<T: Scalar>(warping: &WarpingFunction<T>, x1: T) -> Result<WarpingJet<T>, WarpError> {
    warping.validate()?;
    let (f, fp, fpp) = warping.raw_jet(x1);
    if f.partial_cmp(&warping.positivity_floor()) != Some(std::cmp::Ordering::Greater) || !f.is_finite() || !fp.is_finite() || !fpp.is_finite() {
        return Err(WarpError::NonPositive {
            x1: x1.to_f64_lossy(),
            value: f.to_f64_lossy(),
        });
    }
    Ok(WarpingJet { x1, f, fp, fpp })
}

/// `T₁₁`, `tr T`, `Δ₁F` and `Δ₁F/(4F)`.
pub fn warp_scalars<T: Scalar>(jet: &WarpingJet<T>, epsilon: T) -> WarpScalars<T> {
    let t11 = jet.fpp - jet.fp * jet.fp / (T::lit(2.0) * jet.f);
    let delta1_f = epsilon * jet.fp * jet.fp;
    WarpScalars {
        t11,
        tr_t: epsilon * t11,
        delta1_f,
        delta_over_4f: delta1_f / (T::lit(4.0) * jet.f),
    }
}

/// `F F″ − (F′)² + 2εC₁F`, normalized by `max(|F F″|, (F′)², |2εC₁F|, 1)`.
pub fn b9_residual<T: Scalar>(
    warping: &WarpingFunction<T>,
    x1: T,
    epsilon: T,
    c1: T,
) -> Result<T, WarpError> {
    let j = warping_jet(warping, x1)?;
    Ok(b9_residual_of(&j, epsilon, c1))
}

pub fn b9_residual_of<T: Scalar>(j: &WarpingJet<T>, epsilon: T, c1: T) -> T {
    let ffpp = j.f * j.fpp;
    let fp2 = j.fp * j.fp;
    let lin = T::lit(2.0) * epsilon * c1 * j.f;
    let scale = ffpp.abs().max(fp2).max(lin.abs()).max(T::one());
    (ffpp - fp2 + lin).abs() / scale
}

/// `|Δ₁F/(4F) − tr T/2 − κ̃/((n−1)(n−2))|` relative to `max(|κ̃/((n−1)(n−2))|, 1)`.
pub fn b8_check<T: Scalar>(jet: &WarpingJet<T>, epsilon: T, kappa_fiber: T, n: usize) -> Result<T, WarpError> {
    if n < 4 {
        return Err(WarpError::DimensionTooSmall { dim: n, min: 4 });
    }
    let ws = warp_scalars(jet, epsilon);
    let nf = T::from_usize_lossy(n);
    let target = kappa_fiber / ((nf - T::one()) * (nf - T::lit(2.0)));
    let lhs = ws.delta_over_4f - ws.tr_t * T::lit(0.5);
    Ok((lhs - target).abs() / target.abs().max(T::one()))
}
