//! Scenario configuration (TOML) and snapshot construction.
//!
//! ```toml
//! seed = 7
//! conditions = ["A1", "GE"]
//! ea2 = -1.0                # needed by SR2 / D1 / D3
//!
//! [tolerances]
//! fit = 1e-8
//! degenerate = 1e-10
//!
//! [manifold]
//! kind = "warped"           # warped | field | fiber | synthetic
//! epsilon = -1.0
//! x1 = [0.0, 0.5, 1.0]
//!
//! [manifold.warping]
//! family = "quadratic"      # quadratic | exponential | sinusoidal
//! a = 2.0
//! b = 3.0
//!
//! [manifold.fiber]
//! kind = "product"          # sphere | space_form | product | field | gauss | random
//! factors = [{ kind = "sphere", dim = 2 }, { kind = "sphere", dim = 2 }]
//!
//! [output]
//! path = "report.json"
//! format = "json"           # json | csv | table
//!
//! [sweep]                   # `grw sweep` only
//! x1 = [0.0, 0.25]
//! grid = { a = [1.0, 2.0, 3.0] }
//! ```
//!
//! Unknown keys anywhere are errors.

use std::collections::BTreeMap;
use std::path::PathBuf;

use grw_core::chartgeo::{product_snapshot, snapshot_from_field, space_form_snapshot, synthetic_snapshot, CatalogId};
use grw_core::conditionlab::synthetic::{einstein_snapshot, h1_snapshot, roter_snapshot};
use grw_core::conditionlab::{ConditionId, FitContext, ALL_CONDITIONS};
use grw_core::gaussfiber::{diagonal_fixture, gauss_snapshot, jordan3_fixture};
use grw_core::tensorkit::random::{random_gen_curvature, random_metric};
use grw_core::warpedlab::{self, warp_scalars, warped_snapshot, warping_jet};
use grw_core::{Signature, Snapshot, WarpedSpec, Warping};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub manifold: ManifoldSpec,
    #[serde(default = "default_conditions")]
    pub conditions: Vec<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub ea2: Option<f64>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

fn default_conditions() -> Vec<String> {
    vec!["A1".into()]
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub fit: f64,
    pub degenerate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let ctx = FitContext::default();
        Self {
            fit: ctx.tol,
            degenerate: ctx.degenerate_tol,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Base coordinates; defaults to the manifold's `x1`.
    #[serde(default)]
    pub x1: Option<Vec<f64>>,
    /// Warping parameter name → values.
    #[serde(default)]
    pub grid: BTreeMap<String, Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldSpec {
    /// Catalog metric field sampled at points.
    Field {
        id: String,
        #[serde(default)]
        params: Vec<f64>,
        points: Vec<Vec<f64>>,
    },
    Warped {
        epsilon: f64,
        warping: WarpingSpec,
        x1: Vec<f64>,
        fiber: FiberSpec,
    },
    /// A single pointwise snapshot, e.g. a Gauss fiber on its own.
    Fiber { fiber: FiberSpec },
    Synthetic {
        family: SyntheticFamily,
        dim: usize,
        #[serde(default)]
        negative: usize,
        #[serde(default)]
        params: Vec<f64>,
        #[serde(default = "one")]
        count: usize,
    },
}

fn one() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticFamily {
    /// params `[φ, μ, η]`
    Roter,
    /// params `[κ]`
    Einstein,
    /// params `[κ]`
    H1,
    /// params `[terms]`
    Random,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchSpec {
    #[default]
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeSpec {
    #[default]
    Corrected,
    Printed,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum WarpingSpec {
    Quadratic {
        a: f64,
        b: f64,
    },
    Exponential {
        b: f64,
        c: f64,
        c1: f64,
        /// Defaults to the manifold's `ε`.
        epsilon: Option<f64>,
        #[serde(default)]
        branch: BranchSpec,
    },
    Sinusoidal {
        b: f64,
        c: f64,
        c1: f64,
        epsilon: Option<f64>,
        #[serde(default)]
        amplitude: AmplitudeSpec,
    },
}

impl WarpingSpec {
    pub fn build(&self, manifold_eps: f64) -> Warping {
        match *self {
            WarpingSpec::Quadratic { a, b } => Warping::Quadratic { a, b },
            WarpingSpec::Exponential { b, c, c1, epsilon, branch } => Warping::Exponential {
                b,
                c,
                c1,
                epsilon: epsilon.unwrap_or(manifold_eps),
                branch: match branch {
                    BranchSpec::Upper => warpedlab::Branch::Upper,
                    BranchSpec::Lower => warpedlab::Branch::Lower,
                },
            },
            WarpingSpec::Sinusoidal { b, c, c1, epsilon, amplitude } => Warping::Sinusoidal {
                b,
                c,
                c1,
                epsilon: epsilon.unwrap_or(manifold_eps),
                amplitude: match amplitude {
                    AmplitudeSpec::Corrected => warpedlab::Amplitude::Corrected,
                    AmplitudeSpec::Printed => warpedlab::Amplitude::Printed,
                },
            },
        }
    }

    /// Copy with one named parameter replaced, for sweeps.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self, CliError> {
        let mut out = self.clone();
        let slot = match (&mut out, name) {
            (WarpingSpec::Quadratic { a, .. }, "a") => a,
            (WarpingSpec::Quadratic { b, .. }, "b")
            | (WarpingSpec::Exponential { b, .. }, "b")
            | (WarpingSpec::Sinusoidal { b, .. }, "b") => b,
            (WarpingSpec::Exponential { c, .. }, "c") | (WarpingSpec::Sinusoidal { c, .. }, "c") => c,
            (WarpingSpec::Exponential { c1, .. }, "c1") | (WarpingSpec::Sinusoidal { c1, .. }, "c1") => c1,
            _ => {
                return Err(CliError::Config(format!(
                    "sweep parameter `{name}` does not apply to warping family `{}`",
                    self.family()
                )))
            }
        };
        *slot = value;
        Ok(out)
    }

    pub fn family(&self) -> &'static str {
        match self {
            WarpingSpec::Quadratic { .. } => "quadratic",
            WarpingSpec::Exponential { .. } => "exponential",
            WarpingSpec::Sinusoidal { .. } => "sinusoidal",
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussFixture {
    Jordan3,
    Diagonal,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FiberSpec {
    /// Unit round sphere, `κ = m(m−1)`.
    Sphere { dim: usize },
    SpaceForm {
        dim: usize,
        kappa: f64,
        #[serde(default)]
        negative: usize,
    },
    Product { factors: Vec<FiberSpec> },
    /// Catalog field evaluated at one point.
    Field {
        id: String,
        #[serde(default)]
        params: Vec<f64>,
        point: Vec<f64>,
    },
    Gauss {
        fixture: GaussFixture,
        #[serde(default)]
        fiber_dim: Option<usize>,
        tau: f64,
        #[serde(default = "unit")]
        sign: f64,
        /// Principal curvatures of the diagonal fixture.
        #[serde(default)]
        eigenvalues: Vec<f64>,
    },
    /// Random algebraic curvature at a random metric; seed defaults to the config seed.
    Random {
        dim: usize,
        #[serde(default)]
        negative: usize,
        seed: Option<u64>,
    },
}

fn err(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl FiberSpec {
    pub fn build(&self, seed: u64) -> Result<Snapshot, CliError> {
        match self {
            FiberSpec::Sphere { dim } => {
                let m = *dim;
                if m == 0 {
                    return Err(config_err("sphere of dimension 0"));
                }
                space_form_snapshot(m, (m * (m - 1)) as f64, Signature::riemannian(m)).map_err(config_err)
            }
            FiberSpec::SpaceForm { dim, kappa, negative } => {
                if negative > dim {
                    return Err(config_err("space form: negative exceeds dimension"));
                }
                space_form_snapshot(*dim, *kappa, Signature::new(*negative, dim - negative)).map_err(config_err)
            }
            FiberSpec::Product { factors } => {
                let mut it = factors.iter();
                let first = it.next().ok_or_else(|| config_err("product fiber needs at least one factor"))?;
                let mut acc = first.build(seed)?;
                for f in it {
                    acc = product_snapshot(&acc, &f.build(seed)?).map_err(err)?;
                }
                Ok(acc)
            }
            FiberSpec::Field { id, params, point } => {
                let field = CatalogId::parse(id, params).map_err(config_err)?.build::<f64>().map_err(config_err)?;
                snapshot_from_field(&field, point).map_err(err)
            }
            FiberSpec::Gauss { fixture, fiber_dim, tau, sign, eigenvalues } => {
                let data = match fixture {
                    GaussFixture::Jordan3 => {
                        let m = fiber_dim.ok_or_else(|| config_err("jordan3 fixture needs fiber_dim"))?;
                        jordan3_fixture(m, *tau, *sign)
                    }
                    GaussFixture::Diagonal => diagonal_fixture(eigenvalues, *tau, *sign),
                }
                .map_err(config_err)?;
                gauss_snapshot(&data).map_err(err)
            }
            FiberSpec::Random { dim, negative, seed: own } => {
                if negative > dim || *dim < 2 {
                    return Err(config_err("random fiber: need dim ≥ 2 and negative ≤ dim"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(own.unwrap_or(seed));
                let m = random_metric::<f64, _>(&mut rng, *dim, *negative);
                let r = random_gen_curvature(&mut rng, &m.g, 2);
                synthetic_snapshot(m.g, r).map_err(err)
            }
        }
    }
}

/// One evaluation point of a scenario.
#[derive(Clone, Debug)]
pub struct PointSpec {
    pub label: String,
    pub snapshot: Snapshot,
    pub scalars: Vec<(String, f64)>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let t = self.tolerances;
        if !(t.fit > 0.0 && t.degenerate > 0.0) {
            return Err(config_err("tolerances must be positive"));
        }
        self.condition_ids()?;
        Ok(())
    }

    /// Requested conditions, deduplicated in first-seen order; `all` expands.
    pub fn condition_ids(&self) -> Result<Vec<ConditionId>, CliError> {
        let mut out: Vec<ConditionId> = Vec::new();
        for name in &self.conditions {
            let ids: Vec<ConditionId> = if name.eq_ignore_ascii_case("all") {
                ALL_CONDITIONS.to_vec()
            } else {
                vec![name
                    .parse::<ConditionId>()
                    .map_err(|_| CliError::Config(format!("unknown condition id `{name}`")))?]
            };
            for id in ids {
                if !out.contains(&id) {
                    out.push(id);
                }
            }
        }
        if out.is_empty() {
            return Err(config_err("no conditions requested"));
        }
        Ok(out)
    }

    pub fn fit_context(&self, tol_override: Option<f64>) -> Result<FitContext, CliError> {
        let tol = tol_override.unwrap_or(self.tolerances.fit);
        if tol <= 0.0 || !tol.is_finite() {
            return Err(config_err("--tol must be positive"));
        }
        Ok(FitContext {
            tol,
            degenerate_tol: self.tolerances.degenerate,
            ea2: self.ea2,
        })
    }

    pub fn points(&self, seed: u64) -> Result<Vec<PointSpec>, CliError> {
        match &self.manifold {
            ManifoldSpec::Field { id, params, points } => {
                let field = CatalogId::parse(id, params).map_err(config_err)?.build::<f64>().map_err(config_err)?;
                points
                    .iter()
                    .map(|p| {
                        Ok(PointSpec {
                            label: format!("{id}@{p:?}"),
                            snapshot: snapshot_from_field(&field, p).map_err(err)?,
                            scalars: p.iter().enumerate().map(|(i, &x)| (format!("x{}", i + 1), x)).collect(),
                        })
                    })
                    .collect()
            }
            ManifoldSpec::Warped { epsilon, warping, x1, fiber } => {
                let fib = fiber.build(seed)?;
                x1.iter()
                    .map(|&x| warped_point(*epsilon, warping, x, &fib))
                    .collect()
            }
            ManifoldSpec::Fiber { fiber } => Ok(vec![PointSpec {
                label: "fiber".into(),
                snapshot: fiber.build(seed)?,
                scalars: Vec::new(),
            }]),
            ManifoldSpec::Synthetic { family, dim, negative, params, count } => {
                if negative > dim {
                    return Err(config_err("synthetic: negative exceeds dimension"));
                }
                (0..*count)
                    .map(|k| {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
                        let param = |i: usize, name: &str| {
                            params
                                .get(i)
                                .copied()
                                .ok_or_else(|| CliError::Config(format!("synthetic family needs parameter {name}")))
                        };
                        let snapshot = match family {
                            SyntheticFamily::Roter => roter_snapshot(
                                &mut rng,
                                *dim,
                                *negative,
                                param(0, "φ")?,
                                param(1, "μ")?,
                                param(2, "η")?,
                            )
                            .map_err(config_err)?,
                            SyntheticFamily::Einstein => {
                                einstein_snapshot(&mut rng, *dim, param(0, "κ")?, *negative).map_err(config_err)?
                            }
                            SyntheticFamily::H1 => {
                                h1_snapshot(&mut rng, *dim, param(0, "κ")?, *negative).map_err(config_err)?
                            }
                            SyntheticFamily::Random => {
                                let terms = params.first().copied().unwrap_or(3.0).max(1.0) as usize;
                                let m = random_metric::<f64, _>(&mut rng, *dim, *negative);
                                let r = random_gen_curvature(&mut rng, &m.g, terms);
                                synthetic_snapshot(m.g, r).map_err(err)?
                            }
                        };
                        Ok(PointSpec {
                            label: format!("{family:?}#{k}").to_lowercase(),
                            snapshot,
                            scalars: Vec::new(),
                        })
                    })
                    .collect()
            }
        }
    }
}

pub fn warped_point(epsilon: f64, warping: &WarpingSpec, x1: f64, fiber: &Snapshot) -> Result<PointSpec, CliError> {
    let w = warping.build(epsilon);
    let spec = WarpedSpec::new(epsilon, w.clone(), x1, fiber.clone()).map_err(config_err)?;
    let snapshot = warped_snapshot(&spec).map_err(err)?;
    let ws = warp_scalars(&warping_jet(&w, x1).map_err(err)?, epsilon);
    Ok(PointSpec {
        label: format!("{}@x1={x1}", warping.family()),
        snapshot,
        scalars: vec![
            ("x1".into(), x1),
            ("trT".into(), ws.tr_t),
            ("delta1F_over_4F".into(), ws.delta_over_4f),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const COR42: &str = r#"
conditions = ["A1", "GE"]

[manifold]
kind = "warped"
epsilon = -1.0
x1 = [0.0, 0.5]

[manifold.warping]
family = "quadratic"
a = 2.0
b = 3.0

[manifold.fiber]
kind = "product"
factors = [{ kind = "sphere", dim = 2 }, { kind = "sphere", dim = 2 }]
"#;

    #[test]
    fn parses_warped_config() {
        let cfg = ScenarioConfig::parse(COR42).unwrap();
        assert_eq!(cfg.condition_ids().unwrap(), vec![ConditionId::A1, ConditionId::Ge]);
        let pts = cfg.points(0).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].snapshot.dim(), 5);
    }

    #[test]
    fn unknown_family_names_the_id() {
        let text = COR42.replace("\"quadratic\"", "\"cubic\"");
        let e = ScenarioConfig::parse(&text).unwrap_err().to_string();
        assert!(e.contains("cubic"), "{e}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = COR42.replace("a = 2.0", "a = 2.0\nd = 1.0");
        assert!(ScenarioConfig::parse(&text).is_err());
        let text = format!("colour = 1\n{COR42}");
        assert!(ScenarioConfig::parse(&text).is_err());
    }

    #[test]
    fn unknown_condition_rejected() {
        let text = COR42.replace("\"GE\"", "\"A2\"");
        let e = ScenarioConfig::parse(&text).unwrap_err().to_string();
        assert!(e.contains("A2"));
    }

    #[test]
    fn sweep_parameters_are_family_specific() {
        let q = WarpingSpec::Quadratic { a: 1.0, b: 2.0 };
        assert!(matches!(q.with_param("a", 3.0).unwrap(), WarpingSpec::Quadratic { a, .. } if a == 3.0));
        assert!(q.with_param("c1", 3.0).is_err());
    }

    #[test]
    fn nonpositive_tolerance_rejected() {
        let text = format!("{COR42}\n[tolerances]\nfit = 0.0\n");
        assert!(ScenarioConfig::parse(&text).is_err());
    }
}
