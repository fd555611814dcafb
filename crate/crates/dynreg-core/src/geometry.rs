//! Points, feasible sets, and closed-form Euclidean projections.
//!
//! Only set kinds with an exact projection ship here: axis-aligned boxes
//! (coordinatewise clamp), Euclidean balls (radial scaling), and the
//! probability simplex (sort-and-threshold). Keeping projection exact keeps
//! projection error out of every downstream bound check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// A fixed-dimension real vector: actions, minimizers, and gradients all use it.
///
/// Coordinates are always finite; construction rejects NaN and infinities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point coordinate"));
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.check_dim(other);
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.check_dim(other);
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn sub(&self, other: &Point) -> Point {
        self.check_dim(other);
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// self + s * other
    pub fn add_scaled(&self, s: f64, other: &Point) -> Point {
        self.check_dim(other);
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|a| a * s).collect())
    }

    #[inline]
    fn check_dim(&self, other: &Point) {
        assert_eq!(
            self.dim(),
            other.dim(),
            "dimension mismatch between points"
        );
    }
}

/// A closed convex feasible set with an exact Euclidean projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FeasibleSet {
    Box { lower: Point, upper: Point },
    Ball { center: Point, radius: f64 },
    Simplex { dimension: usize },
}

impl FeasibleSet {
    pub fn validate(&self) -> Result<()> {
        match self {
            FeasibleSet::Box { lower, upper } => {
                if lower.dim() != upper.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: lower.dim(),
                        got: upper.dim(),
                    });
                }
                if lower.dim() == 0 {
                    return Err(Error::config("set.lower: box must have dimension >= 1"));
                }
                if lower
                    .coords()
                    .iter()
                    .zip(upper.coords())
                    .any(|(l, u)| l > u)
                {
                    return Err(Error::config(
                        "set.lower: box lower bound exceeds upper bound",
                    ));
                }
                Ok(())
            }
            FeasibleSet::Ball { center, radius } => {
                if center.dim() == 0 {
                    return Err(Error::config("set.center: ball must have dimension >= 1"));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::config("set.radius: ball radius must be positive"));
                }
                Ok(())
            }
            FeasibleSet::Simplex { dimension } => {
                if *dimension == 0 {
                    return Err(Error::config(
                        "set.dimension: simplex dimension must be >= 1",
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Box { lower, .. } => lower.dim(),
            FeasibleSet::Ball { center, .. } => center.dim(),
            FeasibleSet::Simplex { dimension } => *dimension,
        }
    }

    /// Exact Euclidean projection onto the set.
    pub fn project(&self, y: &Point) -> Point {
        assert_eq!(self.dim(), y.dim(), "dimension mismatch in project");
        match self {
            FeasibleSet::Box { lower, upper } => Point(
                y.coords()
                    .iter()
                    .zip(lower.coords())
                    .zip(upper.coords())
                    .map(|((v, l), u)| v.max(*l).min(*u))
                    .collect(),
            ),
            FeasibleSet::Ball { center, radius } => {
                let offset = y.sub(center);
                let norm = offset.norm();
                if norm <= *radius {
                    y.clone()
                } else {
                    center.add_scaled(*radius / norm, &offset)
                }
            }
            FeasibleSet::Simplex { dimension } => project_simplex(y, *dimension),
        }
    }

    /// True iff x is within `tol` of its projection onto the set.
    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        x.dist(&self.project(x)) <= tol
    }

    /// Supremum of pairwise Euclidean distances.
    pub fn diameter(&self) -> f64 {
        match self {
            FeasibleSet::Box { lower, upper } => upper.sub(lower).norm(),
            FeasibleSet::Ball { radius, .. } => 2.0 * radius,
            FeasibleSet::Simplex { dimension } => {
                if *dimension >= 2 {
                    std::f64::consts::SQRT_2
                } else {
                    0.0
                }
            }
        }
    }

    /// Canonical interior point: ball center, box midpoint, simplex barycenter.
    pub fn center(&self) -> Point {
        match self {
            FeasibleSet::Box { lower, upper } => Point(
                lower
                    .coords()
                    .iter()
                    .zip(upper.coords())
                    .map(|(l, u)| 0.5 * (l + u))
                    .collect(),
            ),
            FeasibleSet::Ball { center, .. } => center.clone(),
            FeasibleSet::Simplex { dimension } => {
                Point(vec![1.0 / *dimension as f64; *dimension])
            }
        }
    }

    /// Range (min, max) of the linear functional a'x over the set.
    pub fn linear_range(&self, a: &Point) -> (f64, f64) {
        assert_eq!(self.dim(), a.dim(), "dimension mismatch in linear_range");
        match self {
            FeasibleSet::Box { lower, upper } => {
                let mut lo = 0.0;
                let mut hi = 0.0;
                for ((ai, l), u) in a.coords().iter().zip(lower.coords()).zip(upper.coords()) {
                    lo += (ai * l).min(ai * u);
                    hi += (ai * l).max(ai * u);
                }
                (lo, hi)
            }
            FeasibleSet::Ball { center, radius } => {
                let mid = a.dot(center);
                let spread = radius * a.norm();
                (mid - spread, mid + spread)
            }
            FeasibleSet::Simplex { .. } => {
                let lo = a.coords().iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = a
                    .coords()
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
        }
    }

    /// Draws a point uniformly from the set (box, ball) or from the flat
    /// Dirichlet distribution (simplex).
    pub fn sample(&self, rng: &mut SplitMix64) -> Point {
        match self {
            FeasibleSet::Box { lower, upper } => Point(
                lower
                    .coords()
                    .iter()
                    .zip(upper.coords())
                    .map(|(l, u)| rng.next_range(*l, *u))
                    .collect(),
            ),
            FeasibleSet::Ball { center, radius } => {
                let dim = center.dim();
                let dir = Point(rng.unit_vector(dim));
                let r = radius * rng.next_f64().powf(1.0 / dim as f64);
                center.add_scaled(r, &dir)
            }
            FeasibleSet::Simplex { dimension } => {
                // Normalized exponential spacings give the flat Dirichlet.
                let mut draws: Vec<f64> = (0..*dimension)
                    .map(|_| -(1.0 - rng.next_f64()).ln())
                    .collect();
                let total: f64 = draws.iter().sum();
                for d in &mut draws {
                    *d /= total;
                }
                Point(draws)
            }
        }
    }
}

/// Projection onto the probability simplex via sort-and-threshold.
///
/// The threshold is the largest k of active coordinates for which
/// sorted_k > (sum of the top k+1 entries - 1)/(k+1); the loop condition is
/// exact, so the projection carries no iterative error.
fn project_simplex(y: &Point, _dim: usize) -> Point {
    let mut sorted: Vec<f64> = y.coords().to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if v - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    Point(y.coords().iter().map(|v| (v - theta).max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    fn ball2(r: f64) -> FeasibleSet {
        FeasibleSet::Ball {
            center: Point::zeros(2),
            radius: r,
        }
    }

    fn unit_box2() -> FeasibleSet {
        FeasibleSet::Box {
            lower: pt(&[0.0, 0.0]),
            upper: pt(&[1.0, 1.0]),
        }
    }

    #[test]
    fn rejects_non_finite_points() {
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn ball_projection_radial() {
        let p = ball2(1.0).project(&pt(&[2.0, 0.0]));
        assert!(p.dist(&pt(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn box_projection_clamps() {
        let set = unit_box2();
        assert_eq!(set.project(&pt(&[0.5, 0.5])), pt(&[0.5, 0.5]));
        assert_eq!(set.project(&pt(&[1.5, -0.5])), pt(&[1.0, 0.0]));
    }

    #[test]
    fn simplex_projection_symmetric_point() {
        let set = FeasibleSet::Simplex { dimension: 3 };
        let p = set.project(&pt(&[1.0, 1.0, 1.0]));
        for c in p.coords() {
            assert!((c - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn simplex_projection_matches_known_case() {
        // Projection of (1.1, 0.2, -0.3) onto the simplex: threshold on the
        // top coordinate alone gives (1, 0.1, -0.4)/... worked example below.
        let set = FeasibleSet::Simplex { dimension: 3 };
        let p = set.project(&pt(&[1.1, 0.2, -0.3]));
        // Active support {1.1, 0.2}: theta = (1.3 - 1)/2 = 0.15 -> (0.95, 0.05, 0).
        assert!(p.dist(&pt(&[0.95, 0.05, 0.0])) < 1e-12);
    }

    #[test]
    fn contains_with_tolerances() {
        let set = ball2(1.0);
        assert!(set.contains(&pt(&[0.5, 0.0]), 0.0));
        assert!(!set.contains(&pt(&[1.0 + 1e-6, 0.0]), 1e-9));
        assert!(set.contains(&pt(&[1.0 + 1e-6, 0.0]), 1e-3));
    }

    #[test]
    fn diameters() {
        assert!((ball2(1.0).diameter() - 2.0).abs() < 1e-15);
        assert!((unit_box2().diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert!(
            (FeasibleSet::Simplex { dimension: 2 }.diameter() - 2f64.sqrt()).abs() < 1e-15
        );
        assert_eq!(FeasibleSet::Simplex { dimension: 1 }.diameter(), 0.0);
    }

    #[test]
    fn linear_range_over_sets() {
        let a = pt(&[1.0, -2.0]);
        let (lo, hi) = unit_box2().linear_range(&a);
        assert_eq!((lo, hi), (-2.0, 1.0));
        let (lo, hi) = ball2(1.0).linear_range(&a);
        let n = 5f64.sqrt();
        assert!((lo + n).abs() < 1e-12 && (hi - n).abs() < 1e-12);
        let (lo, hi) = FeasibleSet::Simplex { dimension: 2 }.linear_range(&a);
        assert_eq!((lo, hi), (-2.0, 1.0));
    }

    #[test]
    fn projection_laws_on_random_inputs() {
        let sets = [
            ball2(0.8),
            unit_box2(),
            FeasibleSet::Simplex { dimension: 3 },
        ];
        let mut rng = SplitMix64::new(11);
        for set in &sets {
            let dim = set.dim();
            for _ in 0..500 {
                let y = Point::new((0..dim).map(|_| rng.next_range(-3.0, 3.0)).collect())
                    .unwrap();
                let p = set.project(&y);
                // Idempotence.
                assert!(set.project(&p).dist(&p) <= 1e-12);
                // Membership.
                assert!(set.contains(&p, 1e-10));
                // Variational inequality against random feasible points.
                let x = set.sample(&mut rng);
                let gap = y.sub(&p).dot(&x.sub(&p));
                assert!(gap <= 1e-10, "variational inequality violated: {gap}");
                // Nonexpansiveness.
                let y2 = Point::new((0..dim).map(|_| rng.next_range(-3.0, 3.0)).collect())
                    .unwrap();
                let p2 = set.project(&y2);
                assert!(p.dist(&p2) <= y.dist(&y2) + 1e-12);
            }
        }
    }
}
