//! Experiment configuration: the JSON schema the CLI consumes and its
//! resolution into validated domain objects.
//!
//! Unknown keys are rejected everywhere, so the learner schema provably has
//! no field for a strong-convexity or exp-concavity modulus: universality is
//! enforced by construction, not convention.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::costs::{make_scenario, Scenario, ScenarioSpec};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::learners::{auto_inner_iterations, Learner, LearnerKind, StepSchedule};
use crate::metrics::BoundChecks;
use crate::uniclass::UniclassLoss;

/// Loss selection as it appears in config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "loss", rename_all = "snake_case", deny_unknown_fields)]
pub enum LossSpec {
    Squared,
    ScaledSquared { lambda: f64 },
    EpsilonInsensitive { epsilon: f64 },
}

impl LossSpec {
    pub fn resolve(&self) -> Result<UniclassLoss> {
        match self {
            LossSpec::Squared => Ok(UniclassLoss::squared()),
            LossSpec::ScaledSquared { lambda } => UniclassLoss::scaled_squared(*lambda),
            LossSpec::EpsilonInsensitive { epsilon } => {
                UniclassLoss::epsilon_insensitive(*epsilon)
            }
        }
    }
}

/// Inner-iteration count: an explicit integer or "auto", which resolves to
/// the smallest count guaranteeing per-round halving.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InnerIterations {
    Fixed(usize),
    Named(String),
}

/// Initial action: explicit coordinates or the set's canonical center.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitAction {
    Named(String),
    Coords(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmTag {
    UniclassOgd,
    UniclassOmgd,
    UniclassPa,
    BaselineOgd,
}

/// Learner section of the config. Note there is deliberately no field for
/// any cost-side modulus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerConfig {
    pub algorithm: AlgorithmTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<InnerIterations>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<LossSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1: Option<InitAction>,
    /// Baseline only: scale of the decaying step c / sqrt(t). Mutually
    /// exclusive with a constant `eta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_c: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertions {
    #[serde(default)]
    pub check_contraction: bool,
    #[serde(default)]
    pub check_theorem1: bool,
    #[serde(default)]
    pub check_theorem2: bool,
}

impl Assertions {
    pub fn to_checks(self) -> BoundChecks {
        BoundChecks {
            contraction: self.check_contraction,
            theorem1: self.check_theorem1,
            theorem2: self.check_theorem2,
        }
    }
}

fn default_repetitions() -> u32 {
    1
}

/// Top-level experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSpec,
    pub learner: LearnerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub assertions: Assertions,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
}

/// A config resolved and validated against the scenario: concrete learner
/// kind, initial action, and digests.
#[derive(Clone, Debug)]
pub struct ResolvedExperiment {
    pub scenario: Scenario,
    pub learner_kind: LearnerKind,
    pub x1: Point,
    pub checks: BoundChecks,
    pub scenario_digest: String,
    pub learner_digest: String,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        Ok(cfg)
    }

    /// Validates everything that can fail before any round runs and builds
    /// the generated scenario. `seed_offset` shifts the scenario seed, which
    /// is how repetitions and CI shards get distinct streams.
    pub fn resolve(&self, seed_offset: u64) -> Result<ResolvedExperiment> {
        if self.repetitions == 0 {
            return Err(Error::config("repetitions: must be >= 1"));
        }
        let mut spec = self.scenario.clone();
        spec.seed = spec.seed.wrapping_add(seed_offset);
        let scenario = make_scenario(&spec)?;
        let set = &scenario.spec.set;

        let learner_kind = self.resolve_learner_kind(&scenario)?;

        let x1 = match &self.learner.x1 {
            None => set.center(),
            Some(InitAction::Named(name)) if name == "set_center" => set.center(),
            Some(InitAction::Named(other)) => {
                return Err(Error::config(format!(
                    "learner.x1: unknown named initial action {other:?} (expected \"set_center\")"
                )));
            }
            Some(InitAction::Coords(coords)) => {
                let p = Point::new(coords.clone())?;
                if p.dim() != set.dim() {
                    return Err(Error::config(format!(
                        "learner.x1: dimension {} does not match the set dimension {}",
                        p.dim(),
                        set.dim()
                    )));
                }
                if !set.contains(&p, 1e-9) {
                    return Err(Error::config("learner.x1: not inside the feasible set"));
                }
                p
            }
        };

        // Assertion compatibility.
        let checks = self.assertions.to_checks();
        let is_uniclass_gd = matches!(
            learner_kind,
            LearnerKind::UniclassOgd { .. } | LearnerKind::UniclassOmgd { .. }
        );
        if (checks.contraction || checks.theorem1) && !is_uniclass_gd {
            return Err(Error::config(
                "assertions: contraction and theorem1 checks need a uniclass gradient learner",
            ));
        }
        if checks.theorem2 {
            match &learner_kind {
                LearnerKind::UniclassOmgd { loss, eta, m } => {
                    if scenario.l_f.is_none() {
                        return Err(Error::config(
                            "assertions.check_theorem2: the scenario must be smooth in every round",
                        ));
                    }
                    let needed =
                        auto_inner_iterations(loss.strong_modulus.unwrap(), *eta)?;
                    if *m < needed {
                        return Err(Error::config(format!(
                            "assertions.check_theorem2: m = {m} is below the halving \
                             threshold {needed} for this loss and eta"
                        )));
                    }
                }
                _ => {
                    return Err(Error::config(
                        "assertions.check_theorem2: requires the uniclass_omgd learner",
                    ));
                }
            }
        }

        // Validate the learner construction itself (rate bound, feasibility).
        Learner::new(learner_kind.clone(), x1.clone(), set)?;

        Ok(ResolvedExperiment {
            scenario_digest: digest(&spec),
            learner_digest: digest(&self.learner),
            scenario,
            learner_kind,
            x1,
            checks,
        })
    }

    fn resolve_learner_kind(&self, scenario: &Scenario) -> Result<LearnerKind> {
        let lc = &self.learner;
        let forbid = |field: &str, present: bool, algo: &str| -> Result<()> {
            if present {
                Err(Error::config(format!(
                    "learner.{field}: not accepted by the {algo} algorithm"
                )))
            } else {
                Ok(())
            }
        };
        match lc.algorithm {
            AlgorithmTag::UniclassOgd | AlgorithmTag::UniclassOmgd => {
                forbid("epsilon", lc.epsilon.is_some(), "uniclass gradient")?;
                forbid("eta_c", lc.eta_c.is_some(), "uniclass gradient")?;
                let loss = lc
                    .loss
                    .as_ref()
                    .ok_or_else(|| {
                        Error::config("learner.loss: required for uniclass learners")
                    })?
                    .resolve()?;
                let smooth = loss.smooth_modulus.ok_or_else(|| {
                    Error::config(
                        "learner.loss: uniclass gradient learners need a smooth loss \
                         (squared or scaled_squared)",
                    )
                })?;
                let strong = loss.strong_modulus.ok_or_else(|| {
                    Error::config(
                        "learner.loss: uniclass gradient learners need a strongly convex loss",
                    )
                })?;
                // Default to the largest admissible rate, which minimizes the
                // contraction factor.
                let eta = lc.eta.unwrap_or(1.0 / smooth);
                match lc.algorithm {
                    AlgorithmTag::UniclassOgd => {
                        forbid("m", lc.m.is_some(), "uniclass_ogd")?;
                        Ok(LearnerKind::UniclassOgd { loss, eta })
                    }
                    _ => {
                        let m = match &lc.m {
                            None => auto_inner_iterations(strong, eta)?,
                            Some(InnerIterations::Named(name)) if name == "auto" => {
                                auto_inner_iterations(strong, eta)?
                            }
                            Some(InnerIterations::Named(other)) => {
                                return Err(Error::config(format!(
                                    "learner.m: unknown value {other:?} (expected an integer or \"auto\")"
                                )));
                            }
                            Some(InnerIterations::Fixed(m)) => *m,
                        };
                        Ok(LearnerKind::UniclassOmgd { loss, eta, m })
                    }
                }
            }
            AlgorithmTag::UniclassPa => {
                forbid("eta", lc.eta.is_some(), "uniclass_pa")?;
                forbid("eta_c", lc.eta_c.is_some(), "uniclass_pa")?;
                forbid("m", lc.m.is_some(), "uniclass_pa")?;
                forbid("loss", lc.loss.is_some(), "uniclass_pa")?;
                let epsilon = lc.epsilon.unwrap_or(0.0);
                Ok(LearnerKind::UniclassPa { epsilon })
            }
            AlgorithmTag::BaselineOgd => {
                forbid("m", lc.m.is_some(), "baseline_ogd")?;
                forbid("loss", lc.loss.is_some(), "baseline_ogd")?;
                forbid("epsilon", lc.epsilon.is_some(), "baseline_ogd")?;
                let schedule = match (lc.eta, lc.eta_c) {
                    (Some(_), Some(_)) => {
                        return Err(Error::config(
                            "learner.eta / eta_c: choose a constant rate or a decaying scale, not both",
                        ));
                    }
                    (Some(eta), None) => StepSchedule::Constant(eta),
                    (None, Some(c)) => StepSchedule::InverseSqrt(c),
                    (None, None) => {
                        // Standard tuning: diameter over the Lipschitz bound.
                        let c = scenario.spec.set.diameter() / scenario.k_f.max(1e-12);
                        StepSchedule::InverseSqrt(c)
                    }
                };
                Ok(LearnerKind::BaselineOgd { schedule })
            }
        }
    }
}

/// Stable hex digest of a serializable config section.
pub fn digest<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string(value).expect("config sections always serialize");
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    hex::encode(hasher.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "scenario": {
            "name": "t",
            "horizon": 16,
            "set": {"kind": "ball", "center": [0.0, 0.0], "radius": 1.0},
            "drift": {"kind": "constant_step", "delta": 0.01},
            "mix": ["quadratic"],
            "seed": 7
        },
        "learner": {"algorithm": "uniclass_ogd", "eta": 1.0, "loss": {"loss": "squared"}},
        "assertions": {"check_contraction": true, "check_theorem1": true}
    }"#;

    #[test]
    fn parses_and_resolves_base_config() {
        let cfg = ExperimentConfig::from_json(BASE).unwrap();
        let resolved = cfg.resolve(0).unwrap();
        assert_eq!(resolved.scenario.costs.len(), 16);
        assert!(matches!(
            resolved.learner_kind,
            LearnerKind::UniclassOgd { .. }
        ));
    }

    #[test]
    fn unknown_learner_fields_are_rejected_by_schema() {
        let bad = BASE.replace(
            r#""eta": 1.0,"#,
            r#""eta": 1.0, "strong_convexity_modulus": 2.0,"#,
        );
        let err = ExperimentConfig::from_json(&bad).unwrap_err();
        assert!(err.to_string().contains("strong_convexity_modulus"));
    }

    #[test]
    fn eta_above_rate_bound_is_a_usage_error() {
        let bad = BASE.replace(r#""eta": 1.0"#, r#""eta": 2.5"#);
        let cfg = ExperimentConfig::from_json(&bad).unwrap();
        let err = cfg.resolve(0).unwrap_err();
        assert!(err.to_string().contains("eta <= 1/L"));
    }

    #[test]
    fn omgd_auto_inner_iterations_resolve() {
        let omgd = BASE.replace(
            r#""algorithm": "uniclass_ogd", "eta": 1.0"#,
            r#""algorithm": "uniclass_omgd", "eta": 1.0, "m": "auto""#,
        );
        let cfg = ExperimentConfig::from_json(&omgd).unwrap();
        let resolved = cfg.resolve(0).unwrap();
        match resolved.learner_kind {
            LearnerKind::UniclassOmgd { m, .. } => assert_eq!(m, 3),
            other => panic!("unexpected learner {other:?}"),
        }
    }

    #[test]
    fn theorem2_check_requires_smooth_scenario() {
        let cfg_text = BASE
            .replace(
                r#""algorithm": "uniclass_ogd", "eta": 1.0"#,
                r#""algorithm": "uniclass_omgd", "eta": 1.0"#,
            )
            .replace(
                r#""mix": ["quadratic"]"#,
                r#""mix": ["quadratic", "norm_distance"]"#,
            )
            .replace(
                r#""check_theorem1": true"#,
                r#""check_theorem1": true, "check_theorem2": true"#,
            );
        let cfg = ExperimentConfig::from_json(&cfg_text).unwrap();
        let err = cfg.resolve(0).unwrap_err();
        assert!(err.to_string().contains("smooth"));
    }

    #[test]
    fn seed_offset_shifts_the_scenario() {
        let cfg = ExperimentConfig::from_json(BASE).unwrap();
        let a = cfg.resolve(0).unwrap();
        let b = cfg.resolve(1).unwrap();
        assert_ne!(a.scenario.minimizers[5], b.scenario.minimizers[5]);
        assert_ne!(a.scenario_digest, b.scenario_digest);
    }

    #[test]
    fn digests_are_stable() {
        let cfg = ExperimentConfig::from_json(BASE).unwrap();
        let a = cfg.resolve(0).unwrap();
        let b = cfg.resolve(0).unwrap();
        assert_eq!(a.scenario_digest, b.scenario_digest);
        assert_eq!(a.learner_digest, b.learner_digest);
    }
}
