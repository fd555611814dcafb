//! Uniclass loss functions: the user-chosen distance-to-target losses that
//! drive the surrogate learners, together with a validator that certifies
//! the declared curvature moduli by sampling.
//!
//! The loss is stateless: the per-round target (the nearest cost minimizer)
//! is always supplied by the caller, so the hypotheses behind the
//! contraction guarantee can be checked once, offline.

use serde::{Deserialize, Serialize};

use crate::geometry::{FeasibleSet, Point};
use crate::rng::SplitMix64;
use crate::solver::{self, Objective};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// 0.5 ||x - target||^2; 1-strongly convex and 1-smooth (tight).
    Squared,
    /// (lambda/2) ||x - target||^2; lambda-strongly convex and lambda-smooth.
    ScaledSquared { lambda: f64 },
    /// max(||x - target|| - epsilon, 0); convex with a flat region, so it
    /// carries no strong-convexity modulus and suits only the
    /// passive-aggressive learner.
    EpsilonInsensitive { epsilon: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniclassLoss {
    pub kind: LossKind,
    /// Declared strong-convexity modulus; the tight value for the kind
    /// unless deliberately overridden for validator exercises.
    pub strong_modulus: Option<f64>,
    /// Declared smoothness modulus.
    pub smooth_modulus: Option<f64>,
}

impl UniclassLoss {
    pub fn squared() -> Self {
        UniclassLoss {
            kind: LossKind::Squared,
            strong_modulus: Some(1.0),
            smooth_modulus: Some(1.0),
        }
    }

    pub fn scaled_squared(lambda: f64) -> crate::error::Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(crate::error::Error::config(
                "loss.lambda: must be positive and finite",
            ));
        }
        Ok(UniclassLoss {
            kind: LossKind::ScaledSquared { lambda },
            strong_modulus: Some(lambda),
            smooth_modulus: Some(lambda),
        })
    }

    pub fn epsilon_insensitive(epsilon: f64) -> crate::error::Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(crate::error::Error::config(
                "loss.epsilon: must be nonnegative and finite",
            ));
        }
        Ok(UniclassLoss {
            kind: LossKind::EpsilonInsensitive { epsilon },
            strong_modulus: None,
            smooth_modulus: None,
        })
    }

    /// Constructs a loss with arbitrary declared moduli. The validator is
    /// expected to reject declarations the kind cannot support.
    pub fn with_declared_moduli(
        kind: LossKind,
        strong_modulus: Option<f64>,
        smooth_modulus: Option<f64>,
    ) -> Self {
        UniclassLoss {
            kind,
            strong_modulus,
            smooth_modulus,
        }
    }

    pub fn eval(&self, x: &Point, target: &Point) -> f64 {
        let d = x.dist(target);
        match &self.kind {
            LossKind::Squared => 0.5 * d * d,
            LossKind::ScaledSquared { lambda } => 0.5 * lambda * d * d,
            LossKind::EpsilonInsensitive { epsilon } => (d - epsilon).max(0.0),
        }
    }

    /// Exact gradient; flat regions and kinks return the zero vector.
    pub fn gradient(&self, x: &Point, target: &Point) -> Point {
        match &self.kind {
            LossKind::Squared => x.sub(target),
            LossKind::ScaledSquared { lambda } => x.sub(target).scale(*lambda),
            LossKind::EpsilonInsensitive { epsilon } => {
                let offset = x.sub(target);
                let d = offset.norm();
                if d <= *epsilon || d == 0.0 {
                    Point::zeros(x.dim())
                } else {
                    offset.scale(1.0 / d)
                }
            }
        }
    }
}

/// Sampled certification of the hypotheses the contraction guarantee needs:
/// declared strong convexity, declared smoothness, and that the constrained
/// minimizer of the loss is the target itself.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Worst (most negative) slack of the strong-convexity inequality, when
    /// a modulus is declared.
    pub strong_convexity_slack: Option<f64>,
    /// Worst slack of the smoothness inequality, when a modulus is declared.
    pub smoothness_slack: Option<f64>,
    /// Largest distance between the solved argmin of the loss over the set
    /// and the target it was built from.
    pub argmin_distance: f64,
    pub failures: Vec<String>,
    pub passed: bool,
}

pub const SLACK_TOL: f64 = 1e-9;
pub const ARGMIN_TOL: f64 = 1e-8;

struct LossObjective<'a> {
    loss: &'a UniclassLoss,
    target: &'a Point,
}

impl Objective for LossObjective<'_> {
    fn value(&self, x: &Point) -> f64 {
        self.loss.eval(x, self.target)
    }
    fn gradient(&self, x: &Point) -> Point {
        self.loss.gradient(x, self.target)
    }
    fn smoothness(&self) -> Option<f64> {
        self.loss.smooth_modulus
    }
    fn strong_convexity(&self) -> Option<f64> {
        self.loss.strong_modulus
    }
}

/// Checks the declared moduli on `samples` random targets and point pairs
/// drawn inside the set. Structured pairs near each target are included so
/// flat regions are always probed.
pub fn validate_loss(
    loss: &UniclassLoss,
    set: &FeasibleSet,
    samples: usize,
    seed: u64,
) -> ValidationReport {
    let mut rng = SplitMix64::stream(seed, 17);
    let mut failures = Vec::new();

    let mut sc_slack: Option<f64> = None;
    let mut sm_slack: Option<f64> = None;
    let mut argmin_distance: f64 = 0.0;

    let near_scale = match &loss.kind {
        LossKind::EpsilonInsensitive { epsilon } if *epsilon > 0.0 => 0.3 * epsilon,
        _ => 1e-3 * set.diameter().max(1e-6),
    };

    for i in 0..samples.max(1) {
        let target = set.sample(&mut rng);
        let x = set.sample(&mut rng);
        let y = set.sample(&mut rng);
        // Pair inside the near-target region (flat for the insensitive loss).
        let dim = set.dim();
        let u1 = Point::new(rng.unit_vector(dim)).expect("finite unit vector");
        let u2 = Point::new(rng.unit_vector(dim)).expect("finite unit vector");
        let xn = set.project(&target.add_scaled(near_scale, &u1));
        let yn = set.project(&target.add_scaled(near_scale, &u2));

        for (a, b) in [(&x, &y), (&xn, &yn), (&x, &target)] {
            if let Some(lambda) = loss.strong_modulus {
                let gap = b.dist(a);
                let slack = loss.eval(b, &target)
                    - loss.eval(a, &target)
                    - loss.gradient(a, &target).dot(&b.sub(a))
                    - 0.5 * lambda * gap * gap;
                sc_slack = Some(sc_slack.map_or(slack, |s| s.min(slack)));
            }
            if let Some(l) = loss.smooth_modulus {
                let gap = b.dist(a);
                let slack = loss.eval(a, &target)
                    + loss.gradient(a, &target).dot(&b.sub(a))
                    + 0.5 * l * gap * gap
                    - loss.eval(b, &target);
                sm_slack = Some(sm_slack.map_or(slack, |s| s.min(slack)));
            }
        }

        // Solve for the constrained argmin from a handful of the targets;
        // one solve per 16 samples keeps validation cheap.
        if i % 16 == 0 {
            let obj = LossObjective {
                loss,
                target: &target,
            };
            let start = set.sample(&mut rng);
            match solver::minimize(&obj, set, &start, 1e-10, 50_000) {
                Ok(res) => {
                    argmin_distance = argmin_distance.max(res.x_star.dist(&target));
                    if !res.converged {
                        failures.push("argmin solve did not converge".into());
                    }
                }
                Err(e) => failures.push(format!("argmin solve failed: {e}")),
            }
        }
    }

    if loss.strong_modulus.is_none() {
        failures.push(
            "no declared strong-convexity modulus: the contraction guarantee cannot apply"
                .into(),
        );
    }
    if loss.smooth_modulus.is_none() {
        failures.push("no declared smoothness modulus: no admissible learning rate".into());
    }
    if let Some(s) = sc_slack {
        if s < -SLACK_TOL {
            failures.push(format!("strong-convexity slack {s:e} below -{SLACK_TOL:e}"));
        }
    }
    if let Some(s) = sm_slack {
        if s < -SLACK_TOL {
            failures.push(format!("smoothness slack {s:e} below -{SLACK_TOL:e}"));
        }
    }
    if argmin_distance > ARGMIN_TOL {
        failures.push(format!(
            "argmin sits {argmin_distance:e} from the target (tolerance {ARGMIN_TOL:e})"
        ));
    }

    ValidationReport {
        strong_convexity_slack: sc_slack,
        smoothness_slack: sm_slack,
        argmin_distance,
        passed: failures.is_empty(),
        failures,
    }
}
