//! The built-in property suite: every module's laws checked on seeded random
//! inputs, each reported with its worst observed slack.
//!
//! One property is an expected failure by construction: a learner built
//! through the test hook with a learning rate above 1/L must be caught by
//! the contraction audit. The suite passes when the audit does catch it.

use crate::costs::{make_scenario, CostFamily, CostFunction, Drift, FamilyCfg, MixEntry, ScenarioSpec};
use crate::geometry::{FeasibleSet, Point};
use crate::learners::{
    auto_inner_iterations, ogd_step, pa_step, rho, Learner, LearnerKind, RoundOutcome,
};
use crate::metrics::{self, contraction_audit, ExperimentTrace};
use crate::rng::SplitMix64;
use crate::solver;
use crate::uniclass::{validate_loss, LossKind, UniclassLoss};

const SEED: u64 = 0xD1CE;

#[derive(Clone, Debug)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed slack, signed so that the failing direction is
    /// positive (how far past its bound the worst sample landed).
    pub worst_slack: f64,
    pub detail: String,
}

impl PropertyResult {
    fn pass_if(name: &'static str, worst: f64, tol: f64, detail: impl Into<String>) -> Self {
        PropertyResult {
            name,
            passed: worst <= tol,
            worst_slack: worst,
            detail: detail.into(),
        }
    }
}

fn set_battery() -> Vec<FeasibleSet> {
    vec![
        FeasibleSet::Ball {
            center: Point::new(vec![0.1, -0.2, 0.0]).unwrap(),
            radius: 1.2,
        },
        FeasibleSet::Box {
            lower: Point::new(vec![-1.0, 0.0, -0.5]).unwrap(),
            upper: Point::new(vec![1.0, 2.0, 0.5]).unwrap(),
        },
        FeasibleSet::Simplex { dimension: 4 },
    ]
}

fn family_battery(set: &FeasibleSet, rng: &mut SplitMix64) -> Vec<CostFunction> {
    let c = set.sample(rng);
    let mut out = vec![
        CostFunction::new(
            CostFamily::Quadratic {
                center: c.clone(),
                curvature: 2.0,
            },
            set,
        )
        .unwrap(),
        CostFunction::new(
            CostFamily::Huber {
                center: c.clone(),
                threshold: 0.4,
            },
            set,
        )
        .unwrap(),
        CostFunction::new(CostFamily::NormDistance { center: c }, set)
            .unwrap(),
    ];
    let feature = Point::new(rng.unit_vector(set.dim())).unwrap();
    out.push(
        CostFunction::new(
            CostFamily::LogLoss {
                feature,
                label: 1.0,
            },
            set,
        )
        .unwrap(),
    );
    out
}

fn random_ambient(set: &FeasibleSet, rng: &mut SplitMix64) -> Point {
    let dim = set.dim();
    Point::new((0..dim).map(|_| rng.next_range(-2.5, 2.5)).collect()).unwrap()
}

fn drifting_quadratic_spec(dim: usize, horizon: usize) -> ScenarioSpec {
    ScenarioSpec {
        name: "selftest-drift".into(),
        horizon,
        set: FeasibleSet::Ball {
            center: Point::zeros(dim),
            radius: 1.0,
        },
        drift: Drift::RandomWalk { sigma: 0.04 },
        mix: vec![MixEntry::Cfg(FamilyCfg::Quadratic { curvature: 1.5 })],
        seed: SEED,
    }
}

fn run_learner(spec: &ScenarioSpec, mut learner: Learner) -> Vec<RoundOutcome> {
    let scenario = make_scenario(spec).unwrap();
    scenario
        .costs
        .iter()
        .enumerate()
        .map(|(i, c)| learner.run_round(i + 1, c, &spec.set).unwrap())
        .collect()
}

fn trace_from(rounds: Vec<RoundOutcome>, k_f: f64, l_f: Option<f64>) -> ExperimentTrace {
    ExperimentTrace {
        rounds,
        scenario_digest: String::new(),
        learner_digest: String::new(),
        k_f,
        l_f,
    }
}

pub fn run_selftest() -> Vec<PropertyResult> {
    vec![
        projection_idempotence(),
        projection_nonexpansiveness(),
        projection_variational_inequality(),
        projection_membership(),
        gradient_finite_difference(),
        lipschitz_pairs(),
        pointwise_reduction_gap(),
        smoothness_pairs(),
        strong_convexity_pairs(),
        strong_convexity_gap(),
        prox_model_equivalence(),
        loss_validator_verdicts(),
        minimizer_oracle_optimality(),
        logloss_oracle_matches_solver(),
        contraction_clean_run(),
        contraction_mistuned_counterexample(),
        omgd_halving(),
        reduction_chain(),
        aggregate_error_chain(),
        squared_distance_decomposition(),
        pa_consistency(),
        variation_closed_form_vs_sampling(),
        scenario_determinism(),
    ]
}

fn projection_idempotence() -> PropertyResult {
    let mut rng = SplitMix64::stream(SEED, 1);
    let mut worst = 0.0f64;
    for set in set_battery() {
        for _ in 0..1000 {
            let y = random_ambient(&set, &mut rng);
            let p = set.project(&y);
            worst = worst.max(set.project(&p).dist(&p));
        }
    }
    PropertyResult::pass_if(
        "projection_idempotence",
        worst,
        1e-12,
        "||P(P(y)) - P(y)|| over 1000 ambient points per set",
    )
}

fn projection_nonexpansiveness() -> PropertyResult {
    let mut rng = SplitMix64::stream(SEED, 2);
    let mut worst = f64::NEG_INFINITY;
    for set in set_battery() {
        for _ in 0..1000 {
            let y1 = random_ambient(&set, &mut rng);
            let y2 = random_ambient(&set, &mut rng);
            worst = worst.max(set.project(&y1).dist(&set.project(&y2)) - y1.dist(&y2));
        }
    }
    PropertyResult::pass_if(
        "projection_nonexpansiveness",
        worst,
        1e-12,
        "||P(y1) - P(y2)|| - ||y1 - y2|| over random pairs",
    )
}

fn projection_variational_inequality() -> PropertyResult {
    let mut rng = SplitMix64::stream(SEED, 3);
    let mut worst = f64::NEG_INFINITY;
    for set in set_battery() {
        for _ in 0..1000 {
            let y = random_ambient(&set, &mut rng);
            let p = set.project(&y);
            let x = set.sample(&mut rng);
            worst = worst.max(y.sub(&p).dot(&x.sub(&p)));
        }
    }
    PropertyResult::pass_if(
        "projection_variational_inequality",
        worst,
        1e-10,
        "(y - P(y))'(x - P(y)) for feasible x",
    )
}

fn projection_membership() -> PropertyResult {
    let mut rng = SplitMix64::stream(SEED, 4);
    let mut failures = 0usize;
    let mut total = 0usize;
    for set in set_battery() {
        for _ in 0..1000 {
            let y = random_ambient(&set, &mut rng);
            total += 1;
            if !set.contains(&set.project(&y), 1e-10) {
                failures += 1;
            }
        }
    }
    PropertyResult::pass_if(
        "projection_membership",
        failures as f64,
        0.0,
        format!("projections outside tolerance: {failures}/{total}"),
    )
}

fn gradient_finite_difference() -> PropertyResult {
    let mut rng = SplitMix64::stream(SEED, 5);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for set in set_battery() {
        let costs = family_battery(&set, &mut rng);
        for cost in &costs {
            let mut checked = 0;
            while checked < 100 {
                let x = set.sample(&mut rng);
                if near_kink(cost, &x) {
                    continue;
                }
                checked += 1;
                let g = cost.gradient(&x);
                let mut fd = Vec::with_capacity(x.dim());
                for i in 0..x.dim() {
                    let mut hi = x.coords().to_vec();
                    let mut lo = hi.clone();
                    hi[i] += h;
                    lo[i] -= h;
                    let fhi = cost.eval(&Point::new(hi).unwrap());
                    let flo = cost.eval(&Point::new(lo).unwrap());
                    fd.push((fhi - flo) / (2.0 * h));
                }
                let fd = Point::new(fd).unwrap();
                let rel = fd.dist(&g) / g.norm().max(1.0);
                worst = worst.max(rel);
            }
        }
    }
    PropertyResult::pass_if(
        "gradient_finite_difference",
        worst,
        1e-6,
        "relative error vs central differences, 100 non-kink points per family",
    )
}

fn near_kink(cost: &CostFunction, x: &Point) -> bool {
    match &cost.family {
        CostFamily::Huber { center, threshold } => {
            (x.dist(center) - threshold).abs() < 1e-3
        }
        CostFamily::NormDistance { center } => x.dist(center) < 1e-3,
        _ => false,
    }
}

fn lipschitz_pairs() -> PropertyResult {
    let mut rng = SplitMix64::stream(SEED, 6);
    let mut worst = f64::NEG_INFINITY;
    for set in set_battery() {
        for cost in family_battery(&set, &mut rng) {
            for _ in 0..1000 {
                let x = set.sample(&mut rng);
                let y = set.sample(&mut rng);
                worst = worst
                    .max((cost.eval(&x) - cost.eval(&y)).abs() - cost.lipschitz * x.dist(&y));
            }
        }
    }
    PropertyResult::pass_if(
        "lipschitz_pairs",
        worst,
        1e-10,
        "|f(x) - f(y)| - K ||x - y|| over 1000 feasible pairs per family",
    )
}

fn pointwise_reduction_gap() -> PropertyResult {
    // The pointwise inequality the whole reduction rests on:
    // f(x) - f(nearest minimizer) <= K ||x - nearest minimizer||.
    let mut rng = SplitMix64::stream(SEED, 7);
    let mut worst = f64::NEG_INFINITY;
    for set in set_battery() {
        for cost in family_battery(&set, &mut rng) {
            for _ in 0..1000 {
                let x = set.sample(&mut rng);
                let m = cost.minimizer_projection(&set, &x).unwrap();
                worst =
                    worst.max(cost.eval(&x) - cost.eval(&m) - cost.lipschitz * x.dist(&m));
            }
        }
    }
    PropertyResult::pass_if(
        "pointwise_reduction_gap",
        worst,
        1e-10,
        "f(x) - f(P(x)) - K ||x - P(x)|| over feasible samples",
    )
}

fn smoothness_pairs() -> PropertyResult {
    let mut rng = SplitMix64::stream(SEED, 8);
    let mut worst = f64::NEG_INFINITY;
    for set in set_battery() {
        for cost in family_battery(&set, &mut rng) {
            let Some(l) = cost.smoothness else { continue };
            for _ in 0..1000 {
                let x = set.sample(&mut rng);
                let y = set.sample(&mut rng);
                let d = y.dist(&x);
                let violation = cost.eval(&y)
                    - cost.eval(&x)
                    - cost.gradient(&x).dot(&y.sub(&x))
                    - 0.5 * l * d * d;
                worst = worst.max(violation);
            }
        }
    }
    PropertyResult::pass_if(
        "smoothness_pairs",
        worst,
        1e-10,
        "f(y) - quadratic upper model, smooth families only",
    )
}

fn strong_convexity_pairs() -> PropertyResult {
    let mut rng = SplitMix64::stream(SEED, 9);
    let mut worst = f64::NEG_INFINITY;
    for set in set_battery() {
        let c = set.sample(&mut rng);
        let cost = CostFunction::new(
            CostFamily::Quadratic {
                center: c,
                curvature: 2.0,
            },
            &set,
        )
        .unwrap();
        let modulus = 2.0;
        for _ in 0..1000 {
            let x = set.sample(&mut rng);
            let y = set.sample(&mut rng);
            let d = y.dist(&x);
            let violation = cost.eval(&x) + cost.gradient(&x).dot(&y.sub(&x))
                + 0.5 * modulus * d * d
                - cost.eval(&y);
            worst = worst.max(violation);
        }
    }
    PropertyResult::pass_if(
        "strong_convexity_pairs",
        worst,
        1e-10,
        "quadratic lower model minus f(y), strongly convex families",
    )
}

fn strong_convexity_gap() -> PropertyResult {
    // Value gap to the constrained minimizer dominates (lambda/2) d^2, with
    // interior and boundary minimizers both exercised.
    let mut rng = SplitMix64::stream(SEED, 10);
    let set = FeasibleSet::Ball {
        center: Point::zeros(3),
        radius: 1.0,
    };
    let mut worst = f64::NEG_INFINITY;
    for boundary in [false, true] {
        let center = if boundary {
            Point::new(vec![1.7, -0.4, 0.3]).unwrap()
        } else {
            Point::new(vec![0.3, 0.1, -0.2]).unwrap()
        };
        let cost = CostFunction::new(
            CostFamily::Quadratic {
                center,
                curvature: 2.0,
            },
            &set,
        )
        .unwrap();
        let m = cost.minimizer_projection(&set, &Point::zeros(3)).unwrap();
        for _ in 0..1000 {
            let x = set.sample(&mut rng);
            let d = x.dist(&m);
            worst = worst.max(0.5 * 2.0 * d * d - (cost.eval(&x) - cost.eval(&m)));
        }
    }
    PropertyResult::pass_if(
        "strong_convexity_gap",
        worst,
        1e-10,
        "(lambda/2) ||x - x*||^2 - (f(x) - f(x*)), 1000 samples each case",
    )
}

struct ProxModel {
    g: Point,
    x: Point,
    eta: f64,
}

impl solver::Objective for ProxModel {
    fn value(&self, z: &Point) -> f64 {
        let d = z.dist(&self.x);
        self.g.dot(&z.sub(&self.x)) + d * d / (2.0 * self.eta)
    }
    fn gradient(&self, z: &Point) -> Point {
        self.g.add_scaled(1.0 / self.eta, &z.sub(&self.x))
    }
    fn smoothness(&self) -> Option<f64> {
        Some(1.0 / self.eta)
    }
    fn strong_convexity(&self) -> Option<f64> {
        Some(1.0 / self.eta)
    }
}

fn prox_model_equivalence() -> PropertyResult {
    // The projected gradient step, the closed-form prox, and the numerically
    // solved model problem all coincide.
    let mut rng = SplitMix64::stream(SEED, 11);
    let set = FeasibleSet::Ball {
        center: Point::zeros(2),
        radius: 1.0,
    };
    let loss = UniclassLoss::squared();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = set.sample(&mut rng);
        let target = set.sample(&mut rng);
        let eta = rng.next_range(0.05, 1.0);
        let g = loss.gradient(&x, &target);

        let via_step = ogd_step(&x, &target, &loss, eta, &set);
        let via_prox = solver::proximal_step(&g, &x, eta, &set);
        worst = worst.max(via_step.dist(&via_prox)); // identical formula

        let model = ProxModel {
            g,
            x: x.clone(),
            eta,
        };
        let solved = solver::minimize(&model, &set, &x, 1e-12, 100_000).unwrap();
        worst = worst.max(via_prox.dist(&solved.x_star));
    }
    PropertyResult::pass_if(
        "prox_model_equivalence",
        worst,
        1e-8,
        "update vs closed-form prox vs solved model problem, 1000 instances",
    )
}

fn loss_validator_verdicts() -> PropertyResult {
    let set = FeasibleSet::Ball {
        center: Point::zeros(2),
        radius: 1.0,
    };
    let ok = validate_loss(&UniclassLoss::squared(), &set, 200, SEED).passed
        && validate_loss(&UniclassLoss::scaled_squared(2.0).unwrap(), &set, 200, SEED).passed;
    let overdeclared = validate_loss(
        &UniclassLoss::with_declared_moduli(
            LossKind::ScaledSquared { lambda: 2.0 },
            Some(3.0),
            Some(3.0),
        ),
        &set,
        200,
        SEED,
    );
    let insensitive = validate_loss(
        &UniclassLoss::with_declared_moduli(
            LossKind::EpsilonInsensitive { epsilon: 0.2 },
            Some(0.5),
            Some(1.0),
        ),
        &set,
        200,
        SEED,
    );
    let verdicts_correct = ok && !overdeclared.passed && !insensitive.passed;
    PropertyResult {
        name: "loss_validator_verdicts",
        passed: verdicts_correct,
        worst_slack: overdeclared.strong_convexity_slack.unwrap_or(f64::NAN),
        detail: "tight moduli certify; overdeclared and flat losses are rejected".into(),
    }
}

fn minimizer_oracle_optimality() -> PropertyResult {
    let mut rng = SplitMix64::stream(SEED, 12);
    let mut worst = f64::NEG_INFINITY;
    for set in set_battery() {
        for cost in family_battery(&set, &mut rng) {
            let m = cost.minimizer_projection(&set, &set.center());
            let m = match m {
                Ok(m) => m,
                Err(_) => continue, // ties are rejected, not mis-answered
            };
            for _ in 0..1000 {
                let z = set.sample(&mut rng);
                worst = worst.max(cost.eval(&m) - cost.eval(&z));
            }
        }
    }
    PropertyResult::pass_if(
        "minimizer_oracle_optimality",
        worst,
        1e-8,
        "f(oracle) - f(z) over 1000 feasible z per family",
    )
}

fn logloss_oracle_matches_solver() -> PropertyResult {
    let mut rng = SplitMix64::stream(SEED, 13);
    let sets = [
        FeasibleSet::Ball {
            center: Point::new(vec![0.2, -0.1]).unwrap(),
            radius: 0.8,
        },
        FeasibleSet::Box {
            lower: Point::new(vec![-1.0, -2.0]).unwrap(),
            upper: Point::new(vec![2.0, 1.0]).unwrap(),
        },
    ];
    let mut worst = 0.0f64;
    for set in sets {
        for _ in 0..20 {
            let feature = Point::new(rng.unit_vector(2)).unwrap();
            let label = if rng.next_f64() < 0.5 { 1.0 } else { -1.0 };
            let cost =
                CostFunction::new(CostFamily::LogLoss { feature, label }, &set).unwrap();
            let closed = cost.minimizer_projection(&set, &set.center()).unwrap();
            let solved = cost
                .minimizer_via_solver(&set, &set.center(), 1e-9, 200_000)
                .unwrap();
            if solved.converged {
                worst = worst.max(closed.dist(&solved.x_star));
            } else {
                worst = worst.max(1.0); // a stalled oracle is a failure here
            }
        }
    }
    PropertyResult::pass_if(
        "logloss_oracle_matches_solver",
        worst,
        1e-6,
        "closed-form boundary minimizer vs inner solve",
    )
}

fn contraction_clean_run() -> PropertyResult {
    let spec = drifting_quadratic_spec(3, 400);
    let mut worst = f64::NEG_INFINITY;
    for eta in [1.0, 0.5] {
        let r = rho(1.0, eta).unwrap();
        let learner = Learner::new(
            LearnerKind::UniclassOgd {
                loss: UniclassLoss::squared(),
                eta,
            },
            spec.set.center(),
            &spec.set,
        )
        .unwrap();
        for out in run_learner(&spec, learner) {
            worst = worst.max(out.dist_after - r * out.dist_before);
        }
    }
    PropertyResult::pass_if(
        "contraction_clean_run",
        worst,
        1e-9,
        "dist_after - rho * dist_before across 400 drifting rounds, two rates",
    )
}

fn contraction_mistuned_counterexample() -> PropertyResult {
    // Expected failure: eta = 3 breaks the rate precondition (forced through
    // the unchecked constructor) and the audit must flag it.
    let spec = drifting_quadratic_spec(2, 200);
    let learner = Learner::new_unchecked(
        LearnerKind::UniclassOgd {
            loss: UniclassLoss::squared(),
            eta: 3.0,
        },
        spec.set.center(),
    );
    let rounds = run_learner(&spec, learner);
    let trace = trace_from(rounds, 1.5 * 2.0, Some(1.5));
    let r = rho(1.0, 3.0).unwrap();
    let violations = contraction_audit(&trace, r);
    let worst_excess = violations
        .iter()
        .map(|v| v.lhs - v.rhs)
        .fold(0.0f64, f64::max);
    PropertyResult {
        name: "contraction_mistuned_counterexample",
        passed: !violations.is_empty(),
        worst_slack: worst_excess,
        detail: format!(
            "audit flagged {} rounds for the mis-tuned rate, as intended",
            violations.len()
        ),
    }
}

fn omgd_halving() -> PropertyResult {
    let spec = drifting_quadratic_spec(3, 400);
    let m = auto_inner_iterations(1.0, 1.0).unwrap();
    let learner = Learner::new(
        LearnerKind::UniclassOmgd {
            loss: UniclassLoss::squared(),
            eta: 1.0,
            m,
        },
        spec.set.center(),
        &spec.set,
    )
    .unwrap();
    let mut worst = f64::NEG_INFINITY;
    for out in run_learner(&spec, learner) {
        worst = worst.max(out.dist_after - 0.5 * out.dist_before);
    }
    PropertyResult::pass_if(
        "omgd_halving",
        worst,
        1e-9,
        "dist_after - dist_before / 2 with auto inner iterations",
    )
}

fn reduction_chain() -> PropertyResult {
    // Cumulative form of the Lipschitz reduction: dynamic regret is covered
    // by K times the summed distances.
    let spec = drifting_quadratic_spec(3, 400);
    let scenario = make_scenario(&spec).unwrap();
    let learner = Learner::new(
        LearnerKind::UniclassOgd {
            loss: UniclassLoss::squared(),
            eta: 1.0,
        },
        spec.set.center(),
        &spec.set,
    )
    .unwrap();
    let trace = trace_from(run_learner(&spec, learner), scenario.k_f, scenario.l_f);
    let regret = metrics::dynamic_regret(&trace);
    let bound = trace.k_f * trace.sum_dist_before() + trace.horizon() as f64 * 1e-6;
    PropertyResult::pass_if(
        "reduction_chain",
        regret - bound,
        0.0,
        "dynamic regret minus K * sum of distances",
    )
}

fn aggregate_error_chain() -> PropertyResult {
    // Contraction turns the summed distances into the path-length form.
    let spec = drifting_quadratic_spec(3, 400);
    let scenario = make_scenario(&spec).unwrap();
    let r = rho(1.0, 1.0).unwrap();
    let learner = Learner::new(
        LearnerKind::UniclassOgd {
            loss: UniclassLoss::squared(),
            eta: 1.0,
        },
        spec.set.center(),
        &spec.set,
    )
    .unwrap();
    let trace = trace_from(run_learner(&spec, learner), scenario.k_f, scenario.l_f);
    let p_star = metrics::path_length(&scenario.minimizers);
    let bound = (p_star + trace.init_dist()) / (1.0 - r) + trace.horizon() as f64 * 1e-9;
    PropertyResult::pass_if(
        "aggregate_error_chain",
        trace.sum_dist_before() - bound,
        0.0,
        "sum of distances minus (P + d1)/(1 - rho)",
    )
}

fn squared_distance_decomposition() -> PropertyResult {
    let spec = drifting_quadratic_spec(3, 400);
    let scenario = make_scenario(&spec).unwrap();
    let m = auto_inner_iterations(1.0, 1.0).unwrap();
    let learner = Learner::new(
        LearnerKind::UniclassOmgd {
            loss: UniclassLoss::squared(),
            eta: 1.0,
            m,
        },
        spec.set.center(),
        &spec.set,
    )
    .unwrap();
    let trace = trace_from(run_learner(&spec, learner), scenario.k_f, scenario.l_f);
    let t_len = trace.horizon();
    let lhs: f64 = trace
        .rounds
        .iter()
        .map(|r| r.dist_before * r.dist_before)
        .sum();
    let carried: f64 = trace.rounds[..t_len - 1]
        .iter()
        .map(|r| r.dist_after * r.dist_after)
        .sum();
    let s_star = metrics::squared_path_length(&scenario.minimizers);
    let d1 = trace.init_dist();
    let rhs = d1 * d1 + 2.0 * carried + 2.0 * s_star + t_len as f64 * 1e-9;
    PropertyResult::pass_if(
        "squared_distance_decomposition",
        lhs - rhs,
        0.0,
        "summed squared distances vs carried-over plus squared path length",
    )
}

fn pa_consistency() -> PropertyResult {
    // The passive-aggressive step is a gradient step on the insensitive loss
    // with the loss value as the learning rate.
    let mut rng = SplitMix64::stream(SEED, 14);
    let set = FeasibleSet::Box {
        lower: Point::new(vec![-50.0, -50.0]).unwrap(),
        upper: Point::new(vec![50.0, 50.0]).unwrap(),
    };
    let epsilon = 0.3;
    let loss = UniclassLoss::epsilon_insensitive(epsilon).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = set.sample(&mut rng);
        let target = set.sample(&mut rng);
        if (x.dist(&target) - epsilon).abs() < 1e-9 {
            continue;
        }
        let eta_t = loss.eval(&x, &target);
        worst = worst.max(
            pa_step(&x, &target, epsilon).dist(&ogd_step(&x, &target, &loss, eta_t, &set)),
        );
    }
    PropertyResult::pass_if(
        "pa_consistency",
        worst,
        1e-12,
        "pa_step vs gradient step with loss-valued rate at non-kink points",
    )
}

fn variation_closed_form_vs_sampling() -> PropertyResult {
    // The exact affine-gap sup for an equal-curvature quadratic pair, with a
    // large Monte-Carlo sample as the lower-bound oracle.
    let set = FeasibleSet::Ball {
        center: Point::zeros(2),
        radius: 1.5,
    };
    let c0 = Point::new(vec![0.6, -0.3]).unwrap();
    let c1 = Point::new(vec![-0.4, 0.5]).unwrap();
    let costs = vec![
        CostFunction::new(
            CostFamily::Quadratic {
                center: c0,
                curvature: 1.0,
            },
            &set,
        )
        .unwrap(),
        CostFunction::new(
            CostFamily::Quadratic {
                center: c1,
                curvature: 1.0,
            },
            &set,
        )
        .unwrap(),
    ];
    let exact = metrics::variation_estimate(&costs, &set, 0, SEED);
    let mut rng = SplitMix64::stream(SEED, 15);
    let mut sampled = 0.0f64;
    for _ in 0..1_000_000 {
        let x = set.sample(&mut rng);
        sampled = sampled.max((costs[1].eval(&x) - costs[0].eval(&x)).abs());
    }
    let lower_bound_ok = sampled <= exact.value + 1e-12;
    let rel_gap = (exact.value - sampled) / exact.value;
    PropertyResult {
        name: "variation_closed_form_vs_sampling",
        passed: exact.exact && lower_bound_ok && rel_gap <= 1e-3,
        worst_slack: rel_gap,
        detail: "sampled sup within 1e-3 relative of the closed form, never above it".into(),
    }
}

fn scenario_determinism() -> PropertyResult {
    let spec = drifting_quadratic_spec(3, 200);
    let a = make_scenario(&spec).unwrap();
    let b = make_scenario(&spec).unwrap();
    let identical = a
        .minimizers
        .iter()
        .zip(&b.minimizers)
        .all(|(x, y)| x == y);
    PropertyResult {
        name: "scenario_determinism",
        passed: identical,
        worst_slack: 0.0,
        detail: "regenerated minimizer sequences are bit-identical".into(),
    }
}
