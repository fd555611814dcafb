//! Online decision-makers sharing one round-loop contract: uniclass
//! projected gradient descent, its multi-step variant, the
//! passive-aggressive uniclass learner, and plain gradient descent on the
//! raw costs as a baseline.

use crate::costs::CostFunction;
use crate::error::{Error, Result};
use crate::geometry::{FeasibleSet, Point};
use crate::solver;
use crate::uniclass::UniclassLoss;

/// Per-round contraction factor of the uniclass gradient step:
/// sqrt(1 - lambda / (lambda + 1/eta)), strictly inside (0, 1).
pub fn rho(lambda: f64, eta: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::config("rho: lambda must be positive"));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::config("rho: eta must be positive"));
    }
    Ok((1.0 - lambda / (lambda + 1.0 / eta)).sqrt())
}

/// Smallest inner-iteration count that halves the distance to the target
/// every round: ceil(((lambda + 1/eta) / lambda) * ln 4).
pub fn auto_inner_iterations(lambda: f64, eta: f64) -> Result<usize> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::config("auto_inner_iterations: lambda must be positive"));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::config("auto_inner_iterations: eta must be positive"));
    }
    let m = ((lambda + 1.0 / eta) / lambda * 4f64.ln()).ceil();
    Ok(m as usize)
}

/// One projected gradient step on the uniclass loss toward a fixed target.
pub fn ogd_step(
    x: &Point,
    target: &Point,
    loss: &UniclassLoss,
    eta: f64,
    set: &FeasibleSet,
) -> Point {
    let g = loss.gradient(x, target);
    solver::proximal_step(&g, x, eta, set)
}

/// m repeated projected gradient steps against the same target.
pub fn omgd_step(
    x: &Point,
    target: &Point,
    loss: &UniclassLoss,
    eta: f64,
    m: usize,
    set: &FeasibleSet,
) -> Point {
    let mut z = x.clone();
    for _ in 0..m {
        z = ogd_step(&z, target, loss, eta, set);
    }
    z
}

/// Passive-aggressive update: move toward the target just far enough to
/// zero the insensitive loss. Coincidence with the target is a no-op.
pub fn pa_step(x: &Point, target: &Point, epsilon: f64) -> Point {
    let offset = target.sub(x);
    let d = offset.norm();
    if d <= epsilon || d == 0.0 {
        return x.clone();
    }
    x.add_scaled((d - epsilon) / d, &offset)
}

/// Projected gradient step on the raw cost, for comparison runs.
pub fn baseline_ogd_step(x: &Point, g: &Point, eta_t: f64, set: &FeasibleSet) -> Point {
    solver::proximal_step(g, x, eta_t, set)
}

/// Step-size schedule for the baseline learner.
#[derive(Clone, Debug, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// eta_t = c / sqrt(t)
    InverseSqrt(f64),
}

impl StepSchedule {
    fn at(&self, t: usize) -> f64 {
        match self {
            StepSchedule::Constant(eta) => *eta,
            StepSchedule::InverseSqrt(c) => c / (t as f64).sqrt(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum LearnerKind {
    UniclassOgd { loss: UniclassLoss, eta: f64 },
    UniclassOmgd { loss: UniclassLoss, eta: f64, m: usize },
    UniclassPa { epsilon: f64 },
    BaselineOgd { schedule: StepSchedule },
}

impl LearnerKind {
    /// The contraction factor the kind guarantees per round, when one exists.
    pub fn effective_contraction(&self) -> Option<f64> {
        match self {
            LearnerKind::UniclassOgd { loss, eta } => {
                rho(loss.strong_modulus?, *eta).ok()
            }
            LearnerKind::UniclassOmgd { loss, eta, m } => {
                Some(rho(loss.strong_modulus?, *eta).ok()?.powi(*m as i32))
            }
            _ => None,
        }
    }

    /// The single-step contraction factor, when one exists.
    pub fn rho(&self) -> Option<f64> {
        match self {
            LearnerKind::UniclassOgd { loss, eta }
            | LearnerKind::UniclassOmgd { loss, eta, .. } => {
                rho(loss.strong_modulus?, *eta).ok()
            }
            _ => None,
        }
    }
}

/// Everything recorded about a single round.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundOutcome {
    /// 1-based round index.
    pub t: usize,
    /// The action played this round.
    pub action: Point,
    pub cost_value: f64,
    pub min_value: f64,
    /// Nearest cost minimizer to the played action (the uniclass target).
    pub target: Point,
    /// Distance from the played action to the round's minimizer set.
    pub dist_before: f64,
    /// Distance from the *next* action to the *same* round's minimizer set:
    /// the exact quantity the contraction guarantee controls.
    pub dist_after: f64,
    /// Cost-gradient norm at the minimizer.
    pub grad_at_min_norm: f64,
    /// Set when the minimizer oracle failed to converge this round.
    pub degraded: bool,
}

/// How the per-round minimizer is computed.
#[derive(Clone, Debug)]
pub enum OracleMode {
    /// Closed forms; exact for every shipped family.
    ClosedForm,
    /// Numerical fallback, warm-started from the previous round's minimizer.
    /// Rounds where it fails to converge are marked degraded.
    Solver { tol: f64, max_iter: usize },
}

/// A learner mid-run: the current action plus the algorithm configuration.
#[derive(Clone, Debug)]
pub struct Learner {
    kind: LearnerKind,
    x: Point,
    oracle: OracleMode,
    prev_minimizer: Option<Point>,
}

impl Learner {
    /// Validates the configuration against the set and builds the learner.
    pub fn new(kind: LearnerKind, x1: Point, set: &FeasibleSet) -> Result<Self> {
        if x1.dim() != set.dim() {
            return Err(Error::DimensionMismatch {
                expected: set.dim(),
                got: x1.dim(),
            });
        }
        if !set.contains(&x1, 1e-9) {
            return Err(Error::config("learner.x1: initial action is infeasible"));
        }
        match &kind {
            LearnerKind::UniclassOgd { loss, eta }
            | LearnerKind::UniclassOmgd { loss, eta, .. } => {
                let smooth = loss.smooth_modulus.ok_or_else(|| {
                    Error::config(
                        "learner.loss: uniclass gradient learners need a smooth loss",
                    )
                })?;
                loss.strong_modulus.ok_or_else(|| {
                    Error::config(
                        "learner.loss: uniclass gradient learners need a strongly convex loss",
                    )
                })?;
                if !eta.is_finite() || *eta <= 0.0 {
                    return Err(Error::config("learner.eta: must be positive"));
                }
                if *eta > 1.0 / smooth + 1e-12 {
                    return Err(Error::config(format!(
                        "learner.eta: {} exceeds 1/L = {}; the per-round contraction \
                         guarantee requires eta <= 1/L for the loss's smoothness modulus L",
                        eta,
                        1.0 / smooth
                    )));
                }
                if let LearnerKind::UniclassOmgd { m, .. } = &kind {
                    if *m == 0 {
                        return Err(Error::config("learner.m: must be >= 1"));
                    }
                }
            }
            LearnerKind::UniclassPa { epsilon } => {
                if !(*epsilon >= 0.0 && epsilon.is_finite()) {
                    return Err(Error::config("learner.epsilon: must be nonnegative"));
                }
            }
            LearnerKind::BaselineOgd { schedule } => {
                let ok = match schedule {
                    StepSchedule::Constant(eta) => *eta > 0.0 && eta.is_finite(),
                    StepSchedule::InverseSqrt(c) => *c > 0.0 && c.is_finite(),
                };
                if !ok {
                    return Err(Error::config("learner.eta: step size must be positive"));
                }
            }
        }
        Ok(Learner {
            kind,
            x: x1,
            oracle: OracleMode::ClosedForm,
            prev_minimizer: None,
        })
    }

    /// Test hook: builds the learner without the learning-rate check, so the
    /// contraction audit can be shown to catch a mis-tuned eta.
    pub(crate) fn new_unchecked(kind: LearnerKind, x1: Point) -> Self {
        Learner {
            kind,
            x: x1,
            oracle: OracleMode::ClosedForm,
            prev_minimizer: None,
        }
    }

    pub fn with_oracle(mut self, oracle: OracleMode) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn kind(&self) -> &LearnerKind {
        &self.kind
    }

    pub fn current_action(&self) -> &Point {
        &self.x
    }

    fn minimizer(&mut self, cost: &CostFunction, set: &FeasibleSet) -> Result<(Point, bool)> {
        match &self.oracle {
            OracleMode::ClosedForm => {
                Ok((cost.minimizer_projection(set, &self.x)?, false))
            }
            OracleMode::Solver { tol, max_iter } => {
                let warm = self
                    .prev_minimizer
                    .clone()
                    .unwrap_or_else(|| set.center());
                let res = cost.minimizer_via_solver(set, &warm, *tol, *max_iter)?;
                let degraded = !res.converged;
                Ok((res.x_star, degraded))
            }
        }
    }

    /// Plays the current action against `cost`, records the round, and
    /// advances the internal state to the next action.
    pub fn run_round(
        &mut self,
        t: usize,
        cost: &CostFunction,
        set: &FeasibleSet,
    ) -> Result<RoundOutcome> {
        let action = self.x.clone();
        let cost_value = cost.eval(&action);
        let (target, degraded) = self.minimizer(cost, set)?;
        self.prev_minimizer = Some(target.clone());
        let min_value = cost.eval(&target);
        let dist_before = action.dist(&target);
        let grad_at_min_norm = cost.gradient(&target).norm();

        let next = match &self.kind {
            LearnerKind::UniclassOgd { loss, eta } => {
                ogd_step(&action, &target, loss, *eta, set)
            }
            LearnerKind::UniclassOmgd { loss, eta, m } => {
                omgd_step(&action, &target, loss, *eta, *m, set)
            }
            LearnerKind::UniclassPa { epsilon } => pa_step(&action, &target, *epsilon),
            LearnerKind::BaselineOgd { schedule } => {
                let g = cost.gradient(&action);
                baseline_ogd_step(&action, &g, schedule.at(t), set)
            }
        };
        // Distance measured against the same round's minimizer set; with a
        // unique minimizer that is just the distance to the target.
        let dist_after = next.dist(&target);
        self.x = next;

        Ok(RoundOutcome {
            t,
            action,
            cost_value,
            min_value,
            target,
            dist_before,
            dist_after,
            grad_at_min_norm,
            degraded,
        })
    }
}
