//! Fixtures on the three-hexagon space built by
//! [`build_example52`](crate::metric::build_example52): the finite subset,
//! tolerance and function that defeat the Lip-LTP, and batteries of optimal
//! measures for the LD2P search.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::functionals::PairMeasure;
use crate::lipschitz::{LipschitzError, LipschitzFunction};
use crate::metric::{FiniteMetricSpace, MetricError, OrderedPair, PointIndex};
use crate::random::random_optimal_measure;
use crate::scalar::Scalar;

/// Seed used for random batteries when none is supplied.
pub const DEFAULT_SEED: u64 = 52;

/// Random measures added to the unit atoms in the default battery.
pub const RANDOM_MEASURES: usize = 20;

pub const CORE_LABELS: [&str; 6] = ["x1", "x2", "x3", "y1", "y2", "y3"];

/// The six points `x_i, y_i`.
pub fn core_points<S: Scalar>(space: &FiniteMetricSpace<S>) -> Result<BTreeSet<PointIndex>, MetricError> {
    CORE_LABELS.iter().map(|l| space.index_of(l)).collect()
}

/// All 30 ordered pairs of distinct core points, in pair order.
pub fn core_pairs<S: Scalar>(space: &FiniteMetricSpace<S>) -> Result<Vec<OrderedPair>, MetricError> {
    let core = core_points(space)?;
    Ok(space
        .pairs()
        .filter(|p| core.contains(&p.from()) && core.contains(&p.to()))
        .collect())
}

/// The tolerance `1/14` of the Lip-LTP counterexample.
pub fn epsilon<S: Scalar>() -> S {
    S::ratio(1, 14)
}

/// `f(x1) = f(y3) = 0`, `f(y2) = 1/2`, `f(y1) = f(x3) = 3/2`, `f(x2) = 2`,
/// and 1 on every `u`/`v` point. Norm one.
pub fn fixture_function<S: Scalar>(space: &FiniteMetricSpace<S>) -> Result<LipschitzFunction<S>, LipschitzError> {
    let values = space
        .labels()
        .iter()
        .map(|l| match l.as_str() {
            "x1" | "y3" => S::zero(),
            "y2" => S::ratio(1, 2),
            "y1" | "x3" => S::ratio(3, 2),
            "x2" => S::from_i64(2),
            _ => S::one(),
        })
        .collect();
    LipschitzFunction::new(space, values)
}

/// The level `j` of a `u_i^j` / `v_i^j` label, `None` for core points.
pub fn level_of(label: &str) -> Option<usize> {
    label.split_once('^').and_then(|(_, j)| j.parse().ok())
}

/// `count` random optimal measures of norm one on an integer metric.
///
/// Each is supported on one to three pairs along which a random integer
/// 1-Lipschitz function has slope exactly 1 (so the support is cyclically
/// monotonic), with random integer weights normalized to total mass 1.
/// Pairs touching level `avoid_level` are never used.
pub fn random_optimal_measures<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    count: usize,
    avoid_level: Option<usize>,
    seed: u64,
) -> Vec<PairMeasure<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let allowed: Vec<bool> = space
        .labels()
        .iter()
        .map(|l| avoid_level.is_none() || level_of(l.as_str()) != avoid_level)
        .collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if let Some(mu) = random_optimal_measure(&mut rng, space, 3, |p| allowed[p.from().0] && allowed[p.to().0]) {
            out.push(mu);
        }
    }
    out
}

/// Unit atoms on all core pairs followed by [`RANDOM_MEASURES`] random
/// optimal measures avoiding the top level.
pub fn default_battery<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    levels: usize,
    seed: u64,
) -> Result<Vec<PairMeasure<S>>, MetricError> {
    let mut battery: Vec<PairMeasure<S>> = core_pairs(space)?.into_iter().map(PairMeasure::unit).collect();
    battery.extend(random_optimal_measures(space, RANDOM_MEASURES, Some(levels), seed));
    Ok(battery)
}

/// The pair `(u_i^j, v_i^j)` chosen by the example's case analysis for an
/// integer-valued `f` in the unit ball and a finite set `points`.
///
/// `j` is the first level none of whose points lies in `points`; `i` is the
/// first index with `x_i` or `y_i` outside `points`, or failing that the
/// first with `|f(x_i) - f(y_i)| <= 1`. Returns `None` when the space does
/// not have the example's labels or every level is touched.
pub fn case_analysis_pair<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    points: &BTreeSet<PointIndex>,
    f: &LipschitzFunction<S>,
) -> Option<(PointIndex, PointIndex)> {
    let core = |name: String| space.index_of(&name).ok();
    let sides: Vec<(PointIndex, PointIndex)> = (1..=3)
        .map(|i| Some((core(format!("x{i}"))?, core(format!("y{i}"))?)))
        .collect::<Option<_>>()?;
    let top = space.labels().iter().filter_map(|l| level_of(l.as_str())).max()?;
    let touched: BTreeSet<usize> = points
        .iter()
        .filter_map(|&p| level_of(space.label(p).as_str()))
        .collect();
    let j = (1..=top).find(|j| !touched.contains(j))?;
    let i = (0..3)
        .find(|&i| !points.contains(&sides[i].0) || !points.contains(&sides[i].1))
        .or_else(|| {
            (0..3).find(|&i| (f.value(sides[i].0).clone() - f.value(sides[i].1).clone()).abs() <= S::one())
        })?;
    Some((core(format!("u{}^{j}", i + 1))?, core(format!("v{}^{j}", i + 1))?))
}
