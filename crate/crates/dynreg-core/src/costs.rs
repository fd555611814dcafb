//! Per-round cost functions and seeded scenario generation.
//!
//! Four families ship: quadratics (strongly convex), vector Huber costs
//! (convex and smooth), norm-distance costs (convex, nonsmooth), and
//! logistic losses over a linear score (exp-concave, smooth, boundary
//! minimizers). Every family has a unique minimizer over the shipped sets
//! and a closed-form minimizer oracle, so regularity measures computed from
//! minimizer sequences are exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FeasibleSet, Point};
use crate::rng::SplitMix64;
use crate::solver::{self, Objective, SolveResult};

/// Convexity class observed by the environment. Metadata only: no learner
/// ever reads these moduli, which is the point of the universal reduction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexityClass {
    Convex,
    StronglyConvex { modulus: f64 },
    ExpConcave { modulus: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostFamily {
    /// (curvature/2) ||x - center||^2
    Quadratic { center: Point, curvature: f64 },
    /// Huber transform of ||x - center||: quadratic inside `threshold`,
    /// linear outside. Convex and 1-smooth but not strongly convex.
    Huber { center: Point, threshold: f64 },
    /// ||x - center||; the kink at the center takes subgradient zero.
    NormDistance { center: Point },
    /// ln(1 + exp(-label * feature' x)) with label in {-1, +1}.
    #[serde(rename = "logloss")]
    LogLoss { feature: Point, label: f64 },
}

/// One round's cost: family plus the constants used by bound evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostFunction {
    pub family: CostFamily,
    pub class: ConvexityClass,
    /// Lipschitz constant K valid over the experiment's feasible set.
    pub lipschitz: f64,
    /// Smoothness modulus L when the family is smooth.
    pub smoothness: Option<f64>,
}

impl CostFunction {
    /// Builds a cost and derives its constants from the family parameters
    /// and the feasible set.
    pub fn new(family: CostFamily, set: &FeasibleSet) -> Result<Self> {
        let dim = set.dim();
        let diameter = set.diameter();
        match &family {
            CostFamily::Quadratic { center, curvature } => {
                check_dim(dim, center.dim())?;
                if !(*curvature > 0.0 && curvature.is_finite()) {
                    return Err(Error::config("quadratic curvature must be positive"));
                }
                Ok(CostFunction {
                    class: ConvexityClass::StronglyConvex {
                        modulus: *curvature,
                    },
                    lipschitz: curvature * diameter,
                    smoothness: Some(*curvature),
                    family,
                })
            }
            CostFamily::Huber { center, threshold } => {
                check_dim(dim, center.dim())?;
                if !(*threshold > 0.0 && threshold.is_finite()) {
                    return Err(Error::config("huber threshold must be positive"));
                }
                Ok(CostFunction {
                    class: ConvexityClass::Convex,
                    lipschitz: threshold.min(diameter),
                    smoothness: Some(1.0),
                    family,
                })
            }
            CostFamily::NormDistance { center } => {
                check_dim(dim, center.dim())?;
                Ok(CostFunction {
                    class: ConvexityClass::Convex,
                    lipschitz: 1.0,
                    smoothness: None,
                    family,
                })
            }
            CostFamily::LogLoss { feature, label } => {
                check_dim(dim, feature.dim())?;
                if *label != 1.0 && *label != -1.0 {
                    return Err(Error::config("logloss label must be +1 or -1"));
                }
                let a_norm = feature.norm();
                if a_norm <= 1e-12 {
                    return Err(Error::config("logloss feature must be nonzero"));
                }
                // Exp-concavity modulus over the bounded score range.
                let (lo, hi) = set.linear_range(feature);
                let score_bound = lo.abs().max(hi.abs());
                Ok(CostFunction {
                    class: ConvexityClass::ExpConcave {
                        modulus: (-score_bound).exp(),
                    },
                    lipschitz: a_norm,
                    smoothness: Some(0.25 * a_norm * a_norm),
                    family,
                })
            }
        }
    }

    pub fn eval(&self, x: &Point) -> f64 {
        match &self.family {
            CostFamily::Quadratic { center, curvature } => {
                let d = x.dist(center);
                0.5 * curvature * d * d
            }
            CostFamily::Huber { center, threshold } => {
                let t = x.dist(center);
                if t <= *threshold {
                    0.5 * t * t
                } else {
                    threshold * (t - 0.5 * threshold)
                }
            }
            CostFamily::NormDistance { center } => x.dist(center),
            CostFamily::LogLoss { feature, label } => softplus(-label * feature.dot(x)),
        }
    }

    /// Analytic gradient; kinks return the documented designated subgradient.
    pub fn gradient(&self, x: &Point) -> Point {
        match &self.family {
            CostFamily::Quadratic { center, curvature } => {
                x.sub(center).scale(*curvature)
            }
            CostFamily::Huber { center, threshold } => {
                let offset = x.sub(center);
                let t = offset.norm();
                if t <= *threshold {
                    offset
                } else {
                    offset.scale(threshold / t)
                }
            }
            CostFamily::NormDistance { center } => {
                let offset = x.sub(center);
                let t = offset.norm();
                if t == 0.0 {
                    Point::zeros(x.dim())
                } else {
                    offset.scale(1.0 / t)
                }
            }
            CostFamily::LogLoss { feature, label } => {
                let s = label * feature.dot(x);
                feature.scale(-label * sigmoid(-s))
            }
        }
    }

    /// Closed-form point of argmin over the set (unique for every shipped
    /// family on valid inputs), nearest to `x`. Since the minimizer set is a
    /// singleton the result does not depend on `x`.
    pub fn minimizer_projection(&self, set: &FeasibleSet, _x: &Point) -> Result<Point> {
        match &self.family {
            CostFamily::Quadratic { center, .. }
            | CostFamily::Huber { center, .. }
            | CostFamily::NormDistance { center } => Ok(set.project(center)),
            CostFamily::LogLoss { feature, label } => {
                // Minimizing the logistic cost means maximizing the score
                // label * feature' x over the set.
                let w = feature.scale(*label);
                match set {
                    FeasibleSet::Ball { center, radius } => {
                        Ok(center.add_scaled(*radius / w.norm(), &w))
                    }
                    FeasibleSet::Box { lower, upper } => {
                        let mut coords = Vec::with_capacity(w.dim());
                        for ((wi, l), u) in
                            w.coords().iter().zip(lower.coords()).zip(upper.coords())
                        {
                            if *wi > 0.0 {
                                coords.push(*u);
                            } else if *wi < 0.0 || l == u {
                                coords.push(*l);
                            } else {
                                return Err(Error::NonUniqueMinimizer(
                                    "logloss over a box needs nonzero feature coordinates"
                                        .into(),
                                ));
                            }
                        }
                        Ok(Point::new(coords)?)
                    }
                    FeasibleSet::Simplex { dimension } => {
                        let mut best = 0usize;
                        for i in 1..*dimension {
                            if w.coords()[i] > w.coords()[best] {
                                best = i;
                            }
                        }
                        if w.coords()
                            .iter()
                            .enumerate()
                            .any(|(i, v)| i != best && *v == w.coords()[best])
                        {
                            return Err(Error::NonUniqueMinimizer(
                                "logloss over the simplex needs a unique max feature coordinate"
                                    .into(),
                            ));
                        }
                        let mut coords = vec![0.0; *dimension];
                        coords[best] = 1.0;
                        Ok(Point::new(coords)?)
                    }
                }
            }
        }
    }

    /// Black-box fallback oracle: numerically minimizes the cost over the
    /// set. Convergence failures propagate to the caller, which decides how
    /// to degrade.
    pub fn minimizer_via_solver(
        &self,
        set: &FeasibleSet,
        warm_start: &Point,
        tol: f64,
        max_iter: usize,
    ) -> Result<SolveResult> {
        solver::minimize(self, set, warm_start, tol, max_iter)
    }
}

impl Objective for CostFunction {
    fn value(&self, x: &Point) -> f64 {
        self.eval(x)
    }
    fn gradient(&self, x: &Point) -> Point {
        CostFunction::gradient(self, x)
    }
    fn smoothness(&self) -> Option<f64> {
        self.smoothness
    }
    fn strong_convexity(&self) -> Option<f64> {
        match self.class {
            ConvexityClass::StronglyConvex { modulus } => Some(modulus),
            _ => None,
        }
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

/// ln(1 + exp(s)) without overflow.
fn softplus(s: f64) -> f64 {
    if s > 0.0 {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    }
}

/// 1 / (1 + exp(-u)) without overflow.
fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

// ---------------------------------------------------------------------------
// Scenario specification and generation
// ---------------------------------------------------------------------------

/// Minimizer drift process for generated scenarios. All processes project
/// drifting parameters back onto the feasible set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Drift {
    /// Every step has Euclidean length `delta` (before boundary clipping),
    /// in a seeded uniformly random direction.
    ConstantStep { delta: f64 },
    /// Step k has length c * k^(-exponent); with exponent 1/2 every step is
    /// at least c/sqrt(T), which separates path length from squared path length.
    DecayingStep { c: f64, exponent: f64 },
    /// Independent Gaussian steps with coordinatewise deviation `sigma`.
    RandomWalk { sigma: f64 },
}

/// One entry of the per-round family schedule.
// No deny_unknown_fields here: the untagged MixEntry wrapper deserializes
// through a buffer, which cannot replay the tag for strict variants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyCfg {
    Quadratic {
        #[serde(default = "default_curvature")]
        curvature: f64,
    },
    Huber {
        #[serde(default = "default_threshold")]
        threshold: f64,
    },
    NormDistance,
    #[serde(rename = "logloss")]
    LogLoss {
        #[serde(default = "default_feature_scale")]
        feature_scale: f64,
        #[serde(default = "default_label")]
        label: f64,
    },
}

fn default_curvature() -> f64 {
    1.0
}
fn default_threshold() -> f64 {
    0.5
}
fn default_feature_scale() -> f64 {
    1.0
}
fn default_label() -> f64 {
    1.0
}

/// Mix entries accept either a bare family name or a parameterized object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MixEntry {
    Name(String),
    Cfg(FamilyCfg),
}

impl MixEntry {
    fn resolve(&self) -> Result<FamilyCfg> {
        match self {
            MixEntry::Cfg(cfg) => Ok(cfg.clone()),
            MixEntry::Name(name) => match name.as_str() {
                "quadratic" => Ok(FamilyCfg::Quadratic {
                    curvature: default_curvature(),
                }),
                "huber" => Ok(FamilyCfg::Huber {
                    threshold: default_threshold(),
                }),
                "norm_distance" => Ok(FamilyCfg::NormDistance),
                "logloss" => Ok(FamilyCfg::LogLoss {
                    feature_scale: default_feature_scale(),
                    label: default_label(),
                }),
                other => Err(Error::config(format!(
                    "scenario.mix: unknown family tag {other:?}"
                ))),
            },
        }
    }
}

/// Declarative description of one environment: horizon, feasible set, drift
/// process, per-round family schedule (cycled), and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub horizon: usize,
    pub set: FeasibleSet,
    pub drift: Drift,
    pub mix: Vec<MixEntry>,
    pub seed: u64,
}

/// A fully generated environment: per-round costs, their true minimizers,
/// and the scenario-level constants used in bounds.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub costs: Vec<CostFunction>,
    /// Unique per-round minimizers over the feasible set.
    pub minimizers: Vec<Point>,
    /// max over rounds of the per-round Lipschitz constant.
    pub k_f: f64,
    /// max over rounds of the smoothness modulus, present only when every
    /// round is smooth.
    pub l_f: Option<f64>,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        self.set.validate()?;
        if self.horizon == 0 {
            return Err(Error::config("scenario.horizon: must be >= 1"));
        }
        if self.mix.is_empty() {
            return Err(Error::config(
                "scenario.mix: schedule must contain at least one family",
            ));
        }
        for entry in &self.mix {
            entry.resolve()?;
        }
        match self.drift {
            Drift::ConstantStep { delta } => {
                if !(delta >= 0.0 && delta.is_finite()) {
                    return Err(Error::config(
                        "scenario.drift.delta: must be finite and nonnegative",
                    ));
                }
            }
            Drift::DecayingStep { c, exponent } => {
                if !c.is_finite() || !exponent.is_finite() {
                    return Err(Error::config(
                        "scenario.drift.c / exponent: must be finite",
                    ));
                }
            }
            Drift::RandomWalk { sigma } => {
                if !(sigma >= 0.0 && sigma.is_finite()) {
                    return Err(Error::config(
                        "scenario.drift.sigma: must be finite and nonnegative",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Step length for the k-th transition, k = 1 .. T-1. Random-walk steps
    /// are drawn separately.
    fn step_length(&self, k: usize) -> f64 {
        match self.drift {
            Drift::ConstantStep { delta } => delta,
            Drift::DecayingStep { c, exponent } => c * (k as f64).powf(-exponent),
            Drift::RandomWalk { .. } => 0.0,
        }
    }
}

/// Deterministically generates the cost sequence for a spec.
///
/// Two seeded substreams drive the environment: stream 0 moves the center
/// path inside the set (quadratic, huber, norm-distance rounds), stream 1
/// moves a unit direction path on the sphere (logloss features), so logloss
/// minimizers drift along the boundary at the same scale as the drift
/// process.
pub fn make_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.validate()?;
    let set = &spec.set;
    let dim = set.dim();
    let t_max = spec.horizon;

    let schedule: Vec<FamilyCfg> = spec
        .mix
        .iter()
        .map(MixEntry::resolve)
        .collect::<Result<_>>()?;

    let mut center_rng = SplitMix64::stream(spec.seed, 0);
    let mut dir_rng = SplitMix64::stream(spec.seed, 1);

    let mut centers = Vec::with_capacity(t_max);
    centers.push(set.center());
    let mut directions = Vec::with_capacity(t_max);
    directions.push(Point::new(dir_rng.unit_vector(dim))?);

    for k in 1..t_max {
        let prev = &centers[k - 1];
        let step = match spec.drift {
            Drift::RandomWalk { sigma } => {
                Point::new(center_rng.next_normal_vec(dim))?.scale(sigma)
            }
            _ => {
                let dir = Point::new(center_rng.unit_vector(dim))?;
                dir.scale(spec.step_length(k))
            }
        };
        centers.push(set.project(&prev.add_scaled(1.0, &step)));

        let prev_dir = &directions[k - 1];
        let dir_step = match spec.drift {
            Drift::RandomWalk { sigma } => {
                Point::new(dir_rng.next_normal_vec(dim))?.scale(sigma)
            }
            _ => Point::new(dir_rng.unit_vector(dim))?.scale(spec.step_length(k)),
        };
        let moved = prev_dir.add_scaled(1.0, &dir_step);
        let norm = moved.norm();
        directions.push(if norm > 1e-12 {
            moved.scale(1.0 / norm)
        } else {
            prev_dir.clone()
        });
    }

    let mut costs = Vec::with_capacity(t_max);
    let mut minimizers = Vec::with_capacity(t_max);
    for t in 0..t_max {
        let cfg = &schedule[t % schedule.len()];
        let family = match cfg {
            FamilyCfg::Quadratic { curvature } => CostFamily::Quadratic {
                center: centers[t].clone(),
                curvature: *curvature,
            },
            FamilyCfg::Huber { threshold } => CostFamily::Huber {
                center: centers[t].clone(),
                threshold: *threshold,
            },
            FamilyCfg::NormDistance => CostFamily::NormDistance {
                center: centers[t].clone(),
            },
            FamilyCfg::LogLoss {
                feature_scale,
                label,
            } => CostFamily::LogLoss {
                feature: directions[t].scale(*feature_scale),
                label: *label,
            },
        };
        let cost = CostFunction::new(family, set)?;
        let minimizer = cost.minimizer_projection(set, &centers[t])?;
        costs.push(cost);
        minimizers.push(minimizer);
    }

    let k_f = costs.iter().map(|c| c.lipschitz).fold(0.0, f64::max);
    let l_f = costs
        .iter()
        .map(|c| c.smoothness)
        .try_fold(0.0f64, |acc, l| l.map(|l| acc.max(l)));

    Ok(Scenario {
        spec: spec.clone(),
        costs,
        minimizers,
        k_f,
        l_f,
    })
}
