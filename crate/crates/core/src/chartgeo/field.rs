use std::fmt;
use std::sync::Arc;

use super::{ChartError, CurvatureSnapshot};
use crate::jet::Jet;
use crate::scalar::Scalar;
use crate::tensorkit::{DenseTensor, MetricPoint, Signature, Symmetry};

use super::snapshot::RIEMANN_SYMMETRY_TOL;

/// Closed-form two-jet evaluator.
pub type ClosedJetFn<T> = Arc<dyn Fn(&[T]) -> TwoJet<T> + Send + Sync>;
/// Metric components (row-major `n × n`) written in jet arithmetic.
pub type AutoJetFn<T> = Arc<dyn Fn(&[Jet<T>]) -> Vec<Jet<T>> + Send + Sync>;

/// Which derivative route produced a two-jet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    ClosedForm,
    Automatic,
}

/// Metric two-jet `(g, ∂g, ∂∂g)` at a point.
///
/// `dg[a][i][j] = ∂_a g_{ij}` and `ddg[a][b][i][j] = ∂_a∂_b g_{ij}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoJet<T> {
    pub g: DenseTensor<T>,
    pub dg: DenseTensor<T>,
    pub ddg: DenseTensor<T>,
}

impl<T: Scalar> TwoJet<T> {
    pub fn from_components(jets: &[Jet<T>], n: usize) -> Self {
        assert_eq!(jets.len(), n * n, "metric needs n² components");
        let g = DenseTensor::from_fn(n, 2, |ix| jets[ix[0] * n + ix[1]].val);
        let dg = DenseTensor::from_fn(n, 3, |ix| jets[ix[1] * n + ix[2]].d(ix[0]));
        let ddg = DenseTensor::from_fn(n, 4, |ix| jets[ix[2] * n + ix[3]].dd(ix[0], ix[1]));
        Self { g, dg, ddg }
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }
}

/// Metric field on a chart: a map from coordinates to the metric two-jet.
#[derive(Clone)]
pub struct MetricField<T> {
    pub dim: usize,
    pub signature: Signature,
    /// Catalog id or a user label.
    pub provenance: String,
    closed: Option<ClosedJetFn<T>>,
    auto: Option<AutoJetFn<T>>,
}

impl<T> fmt::Debug for MetricField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("dim", &self.dim)
            .field("signature", &self.signature)
            .field("provenance", &self.provenance)
            .field("closed_form", &self.closed.is_some())
            .field("automatic", &self.auto.is_some())
            .finish()
    }
}

impl<T: Scalar> MetricField<T> {
    /// A user-defined field; derivatives come from forward jets.
    pub fn automatic(
        dim: usize,
        signature: Signature,
        provenance: impl Into<String>,
        components: AutoJetFn<T>,
    ) -> Self {
        Self {
            dim,
            signature,
            provenance: provenance.into(),
            closed: None,
            auto: Some(components),
        }
    }

    /// Attaches a closed-form two-jet, preferred by [`MetricField::two_jet`].
    pub fn with_closed_form(mut self, closed: ClosedJetFn<T>) -> Self {
        self.closed = Some(closed);
        self
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed.is_some()
    }

    pub fn auto_components(&self) -> Option<&AutoJetFn<T>> {
        self.auto.as_ref()
    }

    /// Two-jet at `point`: closed form when the field ships one, forward jets otherwise.
    pub fn two_jet(&self, point: &[T]) -> Result<TwoJet<T>, ChartError> {
        if self.closed.is_some() {
            self.two_jet_via(point, Route::ClosedForm)
        } else {
            self.two_jet_via(point, Route::Automatic)
        }
    }

    pub fn two_jet_via(&self, point: &[T], route: Route) -> Result<TwoJet<T>, ChartError> {
        if point.len() != self.dim {
            return Err(ChartError::PointDimension {
                expected: self.dim,
                found: point.len(),
            });
        }
        let jet = match route {
            Route::ClosedForm => {
                let f = self.closed.as_ref().ok_or(ChartError::RouteUnavailable(route))?;
                f(point)
            }
            Route::Automatic => {
                let f = self.auto.as_ref().ok_or(ChartError::RouteUnavailable(route))?;
                TwoJet::from_components(&f(&Jet::seed(point)), self.dim)
            }
        };
        if jet.g.symmetry_deviation(Symmetry::SymmetricPair)? > T::attainable(1e-12) {
            return Err(ChartError::Inconsistent("metric field returned a non-symmetric g"));
        }
        Ok(jet)
    }

    pub fn metric_at(&self, point: &[T]) -> Result<MetricPoint<T>, ChartError> {
        let jet = self.two_jet(point)?;
        metric_from_jet(&jet, point)
    }
}

fn metric_from_jet<T: Scalar>(jet: &TwoJet<T>, point: &[T]) -> Result<MetricPoint<T>, ChartError> {
    MetricPoint::new(jet.g.clone()).map_err(|e| ChartError::SingularMetric {
        point: point.iter().map(|v| v.to_f64_lossy()).collect(),
        detail: e.to_string(),
    })
}

/// Levi-Civita connection data at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection<T> {
    pub metric: MetricPoint<T>,
    /// `Γ^h_{ij}` stored as `[h][i][j]`.
    pub second_kind: DenseTensor<T>,
    /// `Γ_{l,ij} = ½(∂_i g_{lj} + ∂_j g_{li} − ∂_l g_{ij})` stored as `[l][i][j]`.
    pub first_kind: DenseTensor<T>,
    /// `∂_k Γ^h_{ij}` stored as `[k][h][i][j]`.
    pub derivative: DenseTensor<T>,
}

impl<T: Scalar> Connection<T> {
    pub fn gamma(&self, h: usize, i: usize, j: usize) -> T {
        self.second_kind.get(&[h, i, j])
    }

    /// Largest relative violation of `∂_k g_{ij} = Γ_{i,kj} + Γ_{j,ki}` and of the
    /// lower-index symmetry of `Γ`.
    pub fn compatibility_residual(&self, jet: &TwoJet<T>) -> T {
        let n = self.metric.dim();
        let scale = jet.dg.max_abs().max(self.second_kind.max_abs());
        let mut worst = T::zero();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut rhs = T::zero();
                    for l in 0..n {
                        rhs += self.metric.g.at2(i, l) * self.gamma(l, k, j)
                            + self.metric.g.at2(j, l) * self.gamma(l, k, i);
                    }
                    worst = worst.max((jet.dg.get(&[k, i, j]) - rhs).abs());
                    worst = worst.max((self.gamma(k, i, j) - self.gamma(k, j, i)).abs());
                }
            }
        }
        crate::scalar::ratio(worst, scale)
    }
}

/// Christoffel symbols and their first derivatives from a metric two-jet.
pub fn christoffel<T: Scalar>(jet: &TwoJet<T>, point: &[T]) -> Result<Connection<T>, ChartError> {
    let metric = metric_from_jet(jet, point)?;
    let n = jet.dim();
    let half = T::lit(0.5);
    let dg = |a: usize, i: usize, j: usize| jet.dg.get(&[a, i, j]);
    let ddg = |a: usize, b: usize, i: usize, j: usize| jet.ddg.at4(a, b, i, j);
    let gi = &metric.g_inv;

    let first_kind = DenseTensor::from_fn(n, 3, |ix| {
        let (l, i, j) = (ix[0], ix[1], ix[2]);
        half * (dg(i, l, j) + dg(j, l, i) - dg(l, i, j))
    });
    let second_kind = DenseTensor::from_fn(n, 3, |ix| {
        let (h, i, j) = (ix[0], ix[1], ix[2]);
        (0..n).fold(T::zero(), |acc, l| acc + gi.at2(h, l) * first_kind.get(&[l, i, j]))
    });
    // ∂_k g^{hl} = −g^{ha} ∂_k g_{ab} g^{bl}
    let dginv = DenseTensor::from_fn(n, 3, |ix| {
        let (k, h, l) = (ix[0], ix[1], ix[2]);
        let mut acc = T::zero();
        for a in 0..n {
            for b in 0..n {
                acc += gi.at2(h, a) * dg(k, a, b) * gi.at2(b, l);
            }
        }
        -acc
    });
    let derivative = DenseTensor::from_fn(n, 4, |ix| {
        let (k, h, i, j) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = T::zero();
        for l in 0..n {
            let d_first = half * (ddg(k, i, l, j) + ddg(k, j, l, i) - ddg(k, l, i, j));
            acc += dginv.get(&[k, h, l]) * first_kind.get(&[l, i, j]) + gi.at2(h, l) * d_first;
        }
        acc
    });
    Ok(Connection {
        metric,
        second_kind,
        first_kind,
        derivative,
    })
}

/// `R_{hijk} = g_{kl}(∂_hΓ^l_{ij} − ∂_iΓ^l_{hj}) + Γ_{k,hm}Γ^m_{ij} − Γ_{k,im}Γ^m_{hj}`.
pub fn riemann_from_connection<T: Scalar>(conn: &Connection<T>) -> DenseTensor<T> {
    let n = conn.metric.dim();
    let g = &conn.metric.g;
    let gam = |h: usize, i: usize, j: usize| conn.second_kind.get(&[h, i, j]);
    let low = |l: usize, i: usize, j: usize| conn.first_kind.get(&[l, i, j]);
    let d = |k: usize, h: usize, i: usize, j: usize| conn.derivative.at4(k, h, i, j);
    DenseTensor::from_fn(n, 4, |ix| {
        let (h, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = T::zero();
        for l in 0..n {
            acc += g.at2(k, l) * (d(h, l, i, j) - d(i, l, h, j));
        }
        for m in 0..n {
            acc += low(k, h, m) * gam(m, i, j) - low(k, i, m) * gam(m, h, j);
        }
        acc
    })
}

/// Curvature snapshot of a metric field at a point.
pub fn snapshot_from_field<T: Scalar>(
    field: &MetricField<T>,
    point: &[T],
) -> Result<CurvatureSnapshot<T>, ChartError> {
    let jet = field.two_jet(point)?;
    snapshot_from_jet(&jet, point)
}

/// Like [`snapshot_from_field`] but forcing a derivative route.
pub fn snapshot_from_field_via<T: Scalar>(
    field: &MetricField<T>,
    point: &[T],
    route: Route,
) -> Result<CurvatureSnapshot<T>, ChartError> {
    let jet = field.two_jet_via(point, route)?;
    snapshot_from_jet(&jet, point)
}

pub fn snapshot_from_jet<T: Scalar>(jet: &TwoJet<T>, point: &[T]) -> Result<CurvatureSnapshot<T>, ChartError> {
    let conn = christoffel(jet, point)?;
    let r = riemann_from_connection(&conn);
    let r = if r.max_abs() == T::zero() {
        r.assume_symmetry(Symmetry::GeneralizedCurvature)
    } else {
        r.with_symmetry_tol(Symmetry::GeneralizedCurvature, RIEMANN_SYMMETRY_TOL)?
    };
    CurvatureSnapshot::from_curvature(conn.metric, r)
}
