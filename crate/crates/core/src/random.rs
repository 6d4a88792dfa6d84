//! Seeded generators of random instances for property tests and the
//! example batteries.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::functionals::PairMeasure;
use crate::lipschitz::{lip_norm, LipschitzFunction};
use crate::lpcore::LinearProgram;
use crate::metric::{FiniteMetricSpace, OrderedPair, PairSet, PointId, PointIndex};
use crate::scalar::Scalar;

/// Shortest-path closure of random edge weights `k / denominator`,
/// `k` uniform in `1..=max_numerator`, on `n` points labelled `p0, p1, …`
/// with base `p0`. Every distance is a multiple of `1/denominator` in
/// `[1/denominator, max_numerator/denominator]`.
pub fn random_metric<S: Scalar>(
    rng: &mut impl Rng,
    n: usize,
    max_numerator: i64,
    denominator: i64,
) -> FiniteMetricSpace<S> {
    let mut d = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = S::ratio(rng.gen_range(1..=max_numerator), denominator);
            d[i][j] = w.clone();
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k].clone() + d[k][j].clone();
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let labels = (0..n).map(|i| PointId::new(format!("p{i}"))).collect();
    FiniteMetricSpace::new(labels, "p0", d).expect("square matrix with base p0")
}

/// Integer metric with distances in `1..=max`.
pub fn random_integer_metric<S: Scalar>(rng: &mut impl Rng, n: usize, max: i64) -> FiniteMetricSpace<S> {
    random_metric(rng, n, max, 1)
}

/// Up to `max_len` distinct random pairs (possibly none).
pub fn random_pair_set<S: Scalar>(rng: &mut impl Rng, space: &FiniteMetricSpace<S>, max_len: usize) -> PairSet {
    let mut all: Vec<OrderedPair> = space.pairs().collect();
    all.shuffle(rng);
    let len = rng.gen_range(0..=max_len.min(all.len()));
    all.into_iter().take(len).collect()
}

/// A uniformly random integer-valued 1-Lipschitz function on an integer
/// metric, vanishing at the base. Points are fixed in random order, each
/// taking an integer from the range left open by the points fixed so far.
pub fn random_integer_lipschitz<S: Scalar>(space: &FiniteMetricSpace<S>, rng: &mut impl Rng) -> LipschitzFunction<S> {
    let base = space.base();
    let mut order: Vec<PointIndex> = space.points().filter(|&p| p != base).collect();
    order.shuffle(rng);
    let mut values: Vec<Option<S>> = vec![None; space.len()];
    values[base.0] = Some(S::zero());
    let mut fixed = vec![base];
    for p in order {
        let value_at = |q: PointIndex| values[q.0].clone().expect("fixed point");
        let lo = fixed.iter().map(|&q| value_at(q) - space.d(p, q).clone()).max().expect("base is fixed");
        let hi = fixed.iter().map(|&q| value_at(q) + space.d(p, q).clone()).min().expect("base is fixed");
        let mut choices = Vec::new();
        let mut c = -(-lo).floor();
        while c <= hi {
            choices.push(c.clone());
            c = c + S::one();
        }
        values[p.0] = Some(choices[rng.gen_range(0..choices.len())].clone());
        fixed.push(p);
    }
    LipschitzFunction::new(space, values.into_iter().map(|v| v.expect("all fixed")).collect())
        .expect("base value is zero")
}

/// A random function in the unit ball: random values with denominator
/// `denominator`, divided by their Lipschitz norm when it exceeds 1.
pub fn random_unit_ball_function<S: Scalar>(
    rng: &mut impl Rng,
    space: &FiniteMetricSpace<S>,
    denominator: i64,
) -> LipschitzFunction<S> {
    let base = space.base();
    let raw: Vec<S> = space
        .points()
        .map(|p| {
            if p == base {
                S::zero()
            } else {
                S::ratio(rng.gen_range(-4 * denominator..=4 * denominator), denominator)
            }
        })
        .collect();
    let f = LipschitzFunction::new(space, raw).expect("base value is zero");
    let norm = lip_norm(space, &f);
    if norm > S::one() {
        let inv = S::one() / norm;
        LipschitzFunction::linear_combination(space, [(&inv, &f)])
    } else {
        f
    }
}

/// A positive measure on 1 to `max_atoms` random pairs with weights in
/// `{1/4, …, 2}`.
pub fn random_positive_measure<S: Scalar>(
    rng: &mut impl Rng,
    space: &FiniteMetricSpace<S>,
    max_atoms: usize,
) -> PairMeasure<S> {
    let mut all: Vec<OrderedPair> = space.pairs().collect();
    all.shuffle(rng);
    let k = rng.gen_range(1..=max_atoms.min(all.len()));
    PairMeasure::from_atoms(all.into_iter().take(k).map(|p| (p, S::ratio(rng.gen_range(1..=8), 4))))
        .expect("distinct pairs, positive weights")
}

/// A signed measure on 1 to `max_atoms` random pairs with nonzero weights
/// in `[-2, 2]`.
pub fn random_signed_measure<S: Scalar>(
    rng: &mut impl Rng,
    space: &FiniteMetricSpace<S>,
    max_atoms: usize,
) -> PairMeasure<S> {
    let mut all: Vec<OrderedPair> = space.pairs().collect();
    all.shuffle(rng);
    let k = rng.gen_range(1..=max_atoms.min(all.len()));
    PairMeasure::from_atoms(all.into_iter().take(k).map(|p| {
        let mut w = 0;
        while w == 0 {
            w = rng.gen_range(-8..=8);
        }
        (p, S::ratio(w, 4))
    }))
    .expect("distinct pairs, nonzero weights")
}

/// An optimal positive measure of total mass 1 on an integer metric,
/// supported on up to `max_atoms` pairs across which a random integer
/// 1-Lipschitz function has slope 1. Pairs rejected by `allowed` are not
/// used. Returns `None` if no allowed pair is tight for the drawn function.
pub fn random_optimal_measure<S: Scalar>(
    rng: &mut impl Rng,
    space: &FiniteMetricSpace<S>,
    max_atoms: usize,
    allowed: impl Fn(&OrderedPair) -> bool,
) -> Option<PairMeasure<S>> {
    let h = random_integer_lipschitz(space, rng);
    let tight: Vec<OrderedPair> = space
        .pairs()
        .filter(|p| allowed(p))
        .filter(|p| h.value(p.from()).clone() - h.value(p.to()).clone() == *space.pair_distance(p))
        .collect();
    if tight.is_empty() {
        return None;
    }
    let k = rng.gen_range(1..=max_atoms.min(tight.len()));
    let chosen: Vec<OrderedPair> = tight.choose_multiple(rng, k).copied().collect();
    let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=4)).collect();
    let total = S::from_i64(weights.iter().sum());
    Some(
        PairMeasure::from_atoms(
            chosen
                .into_iter()
                .zip(weights)
                .map(|(p, w)| (p, S::from_i64(w) / total.clone())),
        )
        .expect("distinct pairs, positive weights"),
    )
}

/// A random program with `1..=max_vars` variables, `0..=max_constraints`
/// constraints, small integer coefficients and bounds.
pub fn random_lp<S: Scalar>(rng: &mut impl Rng, max_vars: usize, max_constraints: usize) -> LinearProgram<S> {
    let k = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(0..=max_constraints);
    let objective = (0..k).map(|_| S::from_i64(rng.gen_range(-3..=3))).collect();
    let mut lp = LinearProgram::maximize(objective);
    for _ in 0..m {
        let row = (0..k).map(|_| S::from_i64(rng.gen_range(-3..=3))).collect();
        lp.add_constraint(row, S::from_i64(rng.gen_range(-5..=5))).expect("row length matches");
    }
    lp
}
