//! Regret accounting, regularity measures, and bound evaluation.
//!
//! Every displayed inequality the artifact verifies is evaluated here from
//! a completed trace: the two regret notions, path-length measures computed
//! from the true minimizer sequence, the gradient-energy term, the two
//! regret bounds, and the per-round contraction audit.

use serde::{Deserialize, Serialize};

use crate::costs::{CostFamily, CostFunction, Scenario};
use crate::error::{Error, Result};
use crate::geometry::{FeasibleSet, Point};
use crate::learners::{LearnerKind, RoundOutcome};
use crate::rng::SplitMix64;
use crate::solver::{self, Objective};

/// Absolute slack allowed on regret-scale inequalities.
pub const REGRET_TOL: f64 = 1e-6;
/// Absolute slack allowed on distance-scale inequalities.
pub const DIST_TOL: f64 = 1e-9;
/// Sample count for the Monte-Carlo variation estimate.
pub const VARIATION_SAMPLES: usize = 10_000;

/// A completed run: per-round records plus the scenario-level constants.
#[derive(Clone, Debug)]
pub struct ExperimentTrace {
    pub rounds: Vec<RoundOutcome>,
    pub scenario_digest: String,
    pub learner_digest: String,
    pub k_f: f64,
    pub l_f: Option<f64>,
}

impl ExperimentTrace {
    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    pub fn dim(&self) -> usize {
        self.rounds.first().map_or(0, |r| r.action.dim())
    }

    /// Distance from the first action to the first minimizer set.
    pub fn init_dist(&self) -> f64 {
        self.rounds.first().map_or(0.0, |r| r.dist_before)
    }

    pub fn sum_dist_before(&self) -> f64 {
        self.rounds.iter().map(|r| r.dist_before).sum()
    }
}

/// Cumulative cost minus the sum of per-round minimum costs.
pub fn dynamic_regret(trace: &ExperimentTrace) -> f64 {
    let played: f64 = trace.rounds.iter().map(|r| r.cost_value).sum();
    let minima: f64 = trace.rounds.iter().map(|r| r.min_value).sum();
    played - minima
}

struct AggregateCost<'a> {
    costs: &'a [CostFunction],
}

impl Objective for AggregateCost<'_> {
    fn value(&self, x: &Point) -> f64 {
        self.costs.iter().map(|c| c.eval(x)).sum()
    }
    fn gradient(&self, x: &Point) -> Point {
        let mut g = Point::zeros(x.dim());
        for c in self.costs {
            g = g.add_scaled(1.0, &c.gradient(x));
        }
        g
    }
    fn smoothness(&self) -> Option<f64> {
        self.costs
            .iter()
            .map(|c| c.smoothness)
            .try_fold(0.0f64, |acc, l| l.map(|l| acc + l))
    }
    fn strong_convexity(&self) -> Option<f64> {
        let total: f64 = self
            .costs
            .iter()
            .filter_map(|c| c.strong_convexity())
            .sum();
        (total > 0.0).then_some(total)
    }
}

/// Cumulative cost minus the best fixed action in hindsight. Returns the
/// regret and whether the comparator value is exact (closed form or a
/// converged solve).
pub fn static_regret(scenario: &Scenario, trace: &ExperimentTrace) -> (f64, bool) {
    let played: f64 = trace.rounds.iter().map(|r| r.cost_value).sum();
    let set = &scenario.spec.set;

    // All-quadratic scenarios have a closed-form comparator: the projection
    // of the curvature-weighted mean of centers.
    let quad: Option<Vec<(&Point, f64)>> = scenario
        .costs
        .iter()
        .map(|c| match &c.family {
            CostFamily::Quadratic { center, curvature } => Some((center, *curvature)),
            _ => None,
        })
        .collect();
    if let Some(pairs) = quad {
        let total: f64 = pairs.iter().map(|(_, k)| k).sum();
        let mut mean = Point::zeros(set.dim());
        for (c, k) in &pairs {
            mean = mean.add_scaled(*k / total, c);
        }
        let comparator = set.project(&mean);
        let agg = AggregateCost {
            costs: &scenario.costs,
        };
        return (played - agg.value(&comparator), true);
    }

    let agg = AggregateCost {
        costs: &scenario.costs,
    };
    // Warm start at the projected mean of the per-round minimizers.
    let mut mean = Point::zeros(set.dim());
    for m in &scenario.minimizers {
        mean = mean.add_scaled(1.0 / scenario.minimizers.len() as f64, m);
    }
    match solver::minimize(&agg, set, &set.project(&mean), 1e-8, 20_000) {
        Ok(res) => (played - res.f_star, res.converged),
        Err(_) => (f64::NAN, false),
    }
}

/// Sum of consecutive distances along a minimizer sequence; 0 for a single
/// round.
pub fn path_length(minimizers: &[Point]) -> f64 {
    minimizers.windows(2).map(|w| w[0].dist(&w[1])).sum()
}

/// Same with squared summands.
pub fn squared_path_length(minimizers: &[Point]) -> f64 {
    minimizers
        .windows(2)
        .map(|w| {
            let d = w[0].dist(&w[1]);
            d * d
        })
        .sum()
}

/// A variation-functional value together with its provenance: exact when
/// every consecutive pair admits a closed form, otherwise a sampled lower
/// estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationEstimate {
    pub value: f64,
    pub exact: bool,
}

/// Sum over rounds of sup_x |f_t(x) - f_{t-1}(x)|.
///
/// Exact pairs: equal-curvature quadratics (the gap is affine, so its sup is
/// a support-function evaluation) and norm-distance pairs with feasible
/// centers (the sup is the distance between centers, attained at either
/// center). Everything else is bounded from below by sampling.
pub fn variation_estimate(
    costs: &[CostFunction],
    set: &FeasibleSet,
    samples: usize,
    seed: u64,
) -> VariationEstimate {
    let mut rng = SplitMix64::stream(seed, 23);
    let mut total = 0.0;
    let mut exact = true;
    for pair in costs.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        if let Some(sup) = exact_pair_variation(prev, next, set) {
            total += sup;
        } else {
            exact = false;
            let mut best = 0.0f64;
            for _ in 0..samples {
                let x = set.sample(&mut rng);
                best = best.max((next.eval(&x) - prev.eval(&x)).abs());
            }
            total += best;
        }
    }
    VariationEstimate {
        value: total,
        exact,
    }
}

fn exact_pair_variation(
    prev: &CostFunction,
    next: &CostFunction,
    set: &FeasibleSet,
) -> Option<f64> {
    match (&prev.family, &next.family) {
        (
            CostFamily::Quadratic {
                center: c0,
                curvature: k0,
            },
            CostFamily::Quadratic {
                center: c1,
                curvature: k1,
            },
        ) if k0 == k1 => {
            // f_next - f_prev = a'x + b with a = -k (c1 - c0).
            let a = c1.sub(c0).scale(-k0);
            let b = 0.5 * k0 * (c1.dot(c1) - c0.dot(c0));
            let (lo, hi) = set.linear_range(&a);
            Some((lo + b).abs().max((hi + b).abs()))
        }
        (
            CostFamily::NormDistance { center: c0 },
            CostFamily::NormDistance { center: c1 },
        ) if set.contains(c0, 1e-12) && set.contains(c1, 1e-12) => Some(c0.dist(c1)),
        _ => None,
    }
}

/// Sum of squared cost-gradient norms at the per-round minimizers.
pub fn grad_norm_sum(trace: &ExperimentTrace) -> f64 {
    trace
        .rounds
        .iter()
        .map(|r| r.grad_at_min_norm * r.grad_at_min_norm)
        .sum()
}

/// Path-length regret bound: K (P + d1) / (1 - rho).
pub fn theorem1_rhs(k_f: f64, rho: f64, p_star: f64, init_dist: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::config(format!(
            "theorem1_rhs: contraction factor {rho} must lie in [0, 1)"
        )));
    }
    Ok(k_f * p_star / (1.0 - rho) + k_f * init_dist / (1.0 - rho))
}

/// Two-branch regret bound for the multi-step learner. Returns the bound
/// (min of both branches, the second evaluated at the closed-form optimal
/// alpha) together with that alpha.
pub fn theorem2_rhs(
    k_f: f64,
    l_f: f64,
    g_star: f64,
    s_star: f64,
    p_star: f64,
    init_dist: f64,
) -> (f64, f64) {
    let branch1 = 2.0 * k_f * p_star + 2.0 * k_f * init_dist;
    // q multiplies (L + alpha) in the second branch.
    let q = 2.0 * s_star + init_dist * init_dist;
    let (branch2, alpha_star) = if g_star <= 0.0 {
        // alpha -> 0 limit.
        (l_f * q, 0.0)
    } else if q <= 0.0 {
        // alpha -> infinity limit: the whole branch vanishes.
        (0.0, 0.0)
    } else {
        let alpha = (g_star / (2.0 * q)).sqrt();
        (g_star / (2.0 * alpha) + (l_f + alpha) * q, alpha)
    };
    (branch1.min(branch2), alpha_star)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Which asserted inequality failed.
    pub check: String,
    /// Round index for per-round checks.
    pub round: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Rounds where the recorded distances break the expected per-round
/// contraction, excluding degraded rounds.
pub fn contraction_audit(trace: &ExperimentTrace, rho_expected: f64) -> Vec<Violation> {
    trace
        .rounds
        .iter()
        .filter(|r| !r.degraded)
        .filter_map(|r| {
            let bound = rho_expected * r.dist_before + DIST_TOL;
            (r.dist_after > bound).then(|| Violation {
                check: "contraction".into(),
                round: Some(r.t),
                lhs: r.dist_after,
                rhs: bound,
            })
        })
        .collect()
}

/// Which inequalities the report should assert.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundChecks {
    pub contraction: bool,
    pub theorem1: bool,
    pub theorem2: bool,
}

/// Every metric and asserted inequality derived from one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub scenario_digest: String,
    pub learner_digest: String,
    pub horizon: usize,
    pub k_f: f64,
    pub l_f: Option<f64>,
    pub init_dist: f64,
    pub dynamic_regret: f64,
    pub static_regret: f64,
    /// False when the hindsight comparator came from a non-converged solve.
    pub static_regret_exact: bool,
    pub p_star: f64,
    pub s_star: f64,
    pub v_f: f64,
    /// False when v_f is a sampled lower estimate rather than a closed form.
    pub v_f_exact: bool,
    pub g_star: f64,
    /// Effective per-round contraction factor the run is audited against
    /// (single-step factor for the one-step learner, its m-th power for the
    /// multi-step learner); absent for learners without a guarantee.
    pub rho_used: Option<f64>,
    pub theorem1_rhs: Option<f64>,
    pub theorem2_rhs: Option<f64>,
    pub alpha_star: Option<f64>,
    /// Max over non-degraded rounds of dist_after / dist_before.
    pub per_round_contraction_max: Option<f64>,
    pub violations: Vec<Violation>,
}

/// Computes the full report for a completed run.
pub fn bound_report(
    scenario: &Scenario,
    learner: &LearnerKind,
    trace: &ExperimentTrace,
    checks: BoundChecks,
) -> BoundReport {
    let d1 = trace.init_dist();
    let t_len = trace.horizon();
    let dyn_regret = dynamic_regret(trace);
    let (stat_regret, stat_exact) = static_regret(scenario, trace);
    let p_star = path_length(&scenario.minimizers);
    let s_star = squared_path_length(&scenario.minimizers);
    let variation = variation_estimate(
        &scenario.costs,
        &scenario.spec.set,
        VARIATION_SAMPLES,
        scenario.spec.seed,
    );
    let g_star = grad_norm_sum(trace);

    let rho_eff = learner.effective_contraction();
    let t1 = rho_eff.and_then(|r| theorem1_rhs(trace.k_f, r, p_star, d1).ok());
    let is_omgd = matches!(learner, LearnerKind::UniclassOmgd { .. });
    let t2 = (is_omgd && trace.l_f.is_some()).then(|| {
        theorem2_rhs(trace.k_f, trace.l_f.unwrap(), g_star, s_star, p_star, d1)
    });

    let contraction_max = trace
        .rounds
        .iter()
        .filter(|r| !r.degraded && r.dist_before > 1e-12)
        .map(|r| r.dist_after / r.dist_before)
        .fold(None, |acc: Option<f64>, x| {
            Some(acc.map_or(x, |a| a.max(x)))
        });

    let mut violations = Vec::new();

    if checks.contraction {
        match rho_eff {
            Some(r) => {
                violations.extend(contraction_audit(trace, r));
                // Aggregate-error consequence of the per-round contraction.
                let lhs = trace.sum_dist_before();
                let rhs = (p_star + d1) / (1.0 - r) + t_len as f64 * DIST_TOL;
                if lhs > rhs {
                    violations.push(Violation {
                        check: "aggregate_error".into(),
                        round: None,
                        lhs,
                        rhs,
                    });
                }
            }
            None => violations.push(Violation {
                check: "contraction".into(),
                round: None,
                lhs: f64::NAN,
                rhs: f64::NAN,
            }),
        }
    }

    // The Lipschitz reduction chain holds for any learner; assert it always.
    {
        let rhs = trace.k_f * trace.sum_dist_before() + t_len as f64 * REGRET_TOL;
        if dyn_regret > rhs {
            violations.push(Violation {
                check: "lipschitz_chain".into(),
                round: None,
                lhs: dyn_regret,
                rhs,
            });
        }
    }

    if checks.theorem1 {
        match t1 {
            Some(bound) => {
                if dyn_regret > bound + REGRET_TOL {
                    violations.push(Violation {
                        check: "theorem1".into(),
                        round: None,
                        lhs: dyn_regret,
                        rhs: bound + REGRET_TOL,
                    });
                }
            }
            None => violations.push(Violation {
                check: "theorem1".into(),
                round: None,
                lhs: f64::NAN,
                rhs: f64::NAN,
            }),
        }
    }

    if checks.theorem2 {
        match t2 {
            Some((bound, _alpha)) => {
                if dyn_regret > bound + REGRET_TOL {
                    violations.push(Violation {
                        check: "theorem2".into(),
                        round: None,
                        lhs: dyn_regret,
                        rhs: bound + REGRET_TOL,
                    });
                }
                // Per-round halving audit behind the two-branch bound.
                for v in contraction_audit(trace, 0.5) {
                    violations.push(Violation {
                        check: "halving".into(),
                        ..v
                    });
                }
                // Squared-distance decomposition along the minimizer path.
                let lhs: f64 = trace
                    .rounds
                    .iter()
                    .map(|r| r.dist_before * r.dist_before)
                    .sum();
                let carried: f64 = trace.rounds[..t_len.saturating_sub(1)]
                    .iter()
                    .map(|r| r.dist_after * r.dist_after)
                    .sum();
                let rhs = d1 * d1 + 2.0 * carried + 2.0 * s_star + t_len as f64 * DIST_TOL;
                if lhs > rhs {
                    violations.push(Violation {
                        check: "squared_decomposition".into(),
                        round: None,
                        lhs,
                        rhs,
                    });
                }
            }
            None => violations.push(Violation {
                check: "theorem2".into(),
                round: None,
                lhs: f64::NAN,
                rhs: f64::NAN,
            }),
        }
    }

    BoundReport {
        scenario_digest: trace.scenario_digest.clone(),
        learner_digest: trace.learner_digest.clone(),
        horizon: t_len,
        k_f: trace.k_f,
        l_f: trace.l_f,
        init_dist: d1,
        dynamic_regret: dyn_regret,
        static_regret: stat_regret,
        static_regret_exact: stat_exact,
        p_star,
        s_star,
        v_f: variation.value,
        v_f_exact: variation.exact,
        g_star,
        rho_used: rho_eff,
        theorem1_rhs: t1,
        theorem2_rhs: t2.map(|(v, _)| v),
        alpha_star: t2.map(|(_, a)| a),
        per_round_contraction_max: contraction_max,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::{make_scenario, Drift, FamilyCfg, MixEntry, ScenarioSpec};
    use crate::geometry::FeasibleSet;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn path_length_examples() {
        let line: Vec<Point> = (0..5).map(|i| pt(&[0.1 * i as f64, 0.0])).collect();
        assert!((path_length(&line) - 0.4).abs() < 1e-12);
        assert!((squared_path_length(&line) - 4.0 * 0.01).abs() < 1e-12);
        let constant = vec![pt(&[1.0, 1.0]); 4];
        assert_eq!(path_length(&constant), 0.0);
        assert_eq!(path_length(&constant[..1]), 0.0);
    }

    #[test]
    fn inverse_sqrt_steps_separate_the_measures() {
        // Steps of 1/sqrt(T) make the path length grow like sqrt(T) while
        // the squared path length stays below 1.
        let t = 400usize;
        let step = 1.0 / (t as f64).sqrt();
        let seq: Vec<Point> = (0..t).map(|i| pt(&[step * i as f64, 0.0])).collect();
        let p = path_length(&seq);
        let s = squared_path_length(&seq);
        assert!((p - (t - 1) as f64 / (t as f64).sqrt()).abs() < 1e-9);
        assert!(s < 1.0);
        assert!((s - (t - 1) as f64 / t as f64).abs() < 1e-9);
    }

    #[test]
    fn theorem1_rhs_formula() {
        assert_eq!(theorem1_rhs(1.0, 0.5, 0.0, 0.0).unwrap(), 0.0);
        assert!((theorem1_rhs(1.0, 0.5, 3.0, 1.0).unwrap() - 8.0).abs() < 1e-12);
        assert!(theorem1_rhs(1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn theorem2_rhs_branches() {
        // First branch: 2K(P + d1).
        let (v, _) = theorem2_rhs(1.0, 100.0, 1e9, 1e9, 3.0, 1.0);
        assert!((v - 8.0).abs() < 1e-12);
        // Zero gradient energy: limit branch 2L S + L d1^2.
        let (v, a) = theorem2_rhs(10.0, 2.0, 0.0, 0.5, 1e9, 1.0);
        assert!((v - (2.0 * 2.0 * 0.5 + 2.0 * 1.0)).abs() < 1e-12);
        assert_eq!(a, 0.0);
    }

    #[test]
    fn alpha_star_minimizes_second_branch() {
        let (k, l, g, s, p, d1) = (2.0, 1.5, 0.7, 0.3, 1e9, 0.2);
        let (value, alpha) = theorem2_rhs(k, l, g, s, p, d1);
        let q = 2.0 * s + d1 * d1;
        let eval = |a: f64| g / (2.0 * a) + (l + a) * q;
        assert!((eval(alpha) - value).abs() < 1e-12);
        // Log-grid scan never beats the closed form.
        let mut grid_min = f64::INFINITY;
        for i in -60..=60 {
            let a = 10f64.powf(i as f64 / 10.0);
            grid_min = grid_min.min(eval(a));
        }
        assert!(grid_min >= value - 1e-9);
    }

    #[test]
    fn variation_exact_for_quadratic_pairs() {
        let set = FeasibleSet::Ball {
            center: Point::zeros(2),
            radius: 2.0,
        };
        let costs = vec![
            CostFunction::new(
                CostFamily::Quadratic {
                    center: pt(&[0.5, 0.0]),
                    curvature: 1.0,
                },
                &set,
            )
            .unwrap(),
            CostFunction::new(
                CostFamily::Quadratic {
                    center: pt(&[-0.5, 0.0]),
                    curvature: 1.0,
                },
                &set,
            )
            .unwrap(),
        ];
        let est = variation_estimate(&costs, &set, 100, 1);
        assert!(est.exact);
        // Gap is a'x + b with a = -(c1 - c0) = (1, 0), b = 0; sup over the
        // radius-2 ball is 2.
        assert!((est.value - 2.0).abs() < 1e-12);
        // The sampled estimate from below never exceeds the exact sup.
        let sampled = {
            let mut rng = SplitMix64::stream(1, 23);
            let mut best = 0.0f64;
            for _ in 0..100_000 {
                let x = set.sample(&mut rng);
                best = best.max((costs[1].eval(&x) - costs[0].eval(&x)).abs());
            }
            best
        };
        assert!(sampled <= est.value + 1e-12);
        assert!(sampled >= est.value * 0.99);
    }

    #[test]
    fn variation_zero_for_identical_costs() {
        let set = FeasibleSet::Ball {
            center: Point::zeros(2),
            radius: 1.0,
        };
        let f = CostFunction::new(
            CostFamily::Huber {
                center: pt(&[0.1, 0.1]),
                threshold: 0.5,
            },
            &set,
        )
        .unwrap();
        let est = variation_estimate(&[f.clone(), f], &set, 256, 9);
        assert_eq!(est.value, 0.0);
        assert!(!est.exact);
    }

    #[test]
    fn playing_the_minimizer_gives_zero_regret() {
        let rounds = (1..=5)
            .map(|t| {
                let p = pt(&[0.1 * t as f64, 0.0]);
                crate::learners::RoundOutcome {
                    t,
                    action: p.clone(),
                    target: p,
                    cost_value: 0.25,
                    min_value: 0.25,
                    dist_before: 0.0,
                    dist_after: 0.0,
                    grad_at_min_norm: 0.0,
                    degraded: false,
                }
            })
            .collect();
        let trace = ExperimentTrace {
            rounds,
            scenario_digest: String::new(),
            learner_digest: String::new(),
            k_f: 1.0,
            l_f: None,
        };
        assert_eq!(dynamic_regret(&trace), 0.0);
    }

    #[test]
    fn static_environment_equates_the_two_regrets() {
        let spec = ScenarioSpec {
            name: "static".into(),
            horizon: 30,
            set: FeasibleSet::Ball {
                center: Point::zeros(2),
                radius: 1.0,
            },
            drift: Drift::ConstantStep { delta: 0.0 },
            mix: vec![MixEntry::Name("quadratic".into())],
            seed: 6,
        };
        let scenario = make_scenario(&spec).unwrap();
        let mut learner = crate::learners::Learner::new(
            crate::learners::LearnerKind::UniclassOgd {
                loss: crate::uniclass::UniclassLoss::squared(),
                eta: 1.0,
            },
            pt(&[0.7, 0.1]),
            &spec.set,
        )
        .unwrap();
        let rounds: Vec<_> = scenario
            .costs
            .iter()
            .enumerate()
            .map(|(i, c)| learner.run_round(i + 1, c, &spec.set).unwrap())
            .collect();
        let trace = ExperimentTrace {
            rounds,
            scenario_digest: String::new(),
            learner_digest: String::new(),
            k_f: scenario.k_f,
            l_f: scenario.l_f,
        };
        let dynamic = dynamic_regret(&trace);
        let (stat, exact) = static_regret(&scenario, &trace);
        assert!(exact);
        assert!((dynamic - stat).abs() < 1e-12);
        // The fixed comparator can never beat the sum of per-round minima.
        let played: f64 = trace.rounds.iter().map(|r| r.cost_value).sum();
        let minima: f64 = trace.rounds.iter().map(|r| r.min_value).sum();
        assert!(played - stat >= minima - 1e-12);
    }

    #[test]
    fn grad_norm_at_projected_boundary_minimizer() {
        // Quadratic centered outside the ball: the gradient norm at the
        // constrained minimizer is curvature times the clipped distance.
        let set = FeasibleSet::Ball {
            center: Point::zeros(2),
            radius: 1.0,
        };
        let center = pt(&[3.0, 4.0]);
        let cost = CostFunction::new(
            CostFamily::Quadratic {
                center: center.clone(),
                curvature: 2.0,
            },
            &set,
        )
        .unwrap();
        let m = cost.minimizer_projection(&set, &Point::zeros(2)).unwrap();
        let expected = 2.0 * (center.norm() - 1.0); // kappa * dist(center, set)
        assert!((cost.gradient(&m).norm() - expected).abs() < 1e-12);
    }

    #[test]
    fn static_regret_closed_form_equal_curvatures() {
        // Equal-curvature quadratics on a large box: comparator is the mean
        // of centers.
        let set = FeasibleSet::Box {
            lower: pt(&[-10.0, -10.0]),
            upper: pt(&[10.0, 10.0]),
        };
        let spec = ScenarioSpec {
            name: "s".into(),
            horizon: 3,
            set: set.clone(),
            drift: Drift::ConstantStep { delta: 0.5 },
            mix: vec![MixEntry::Cfg(FamilyCfg::Quadratic { curvature: 2.0 })],
            seed: 4,
        };
        let scenario = make_scenario(&spec).unwrap();
        let mut mean = Point::zeros(2);
        for c in &scenario.minimizers {
            mean = mean.add_scaled(1.0 / 3.0, c);
        }
        let agg = AggregateCost {
            costs: &scenario.costs,
        };
        // First-order check: aggregate gradient vanishes at the mean.
        assert!(agg.gradient(&mean).norm() < 1e-12);
    }
}
