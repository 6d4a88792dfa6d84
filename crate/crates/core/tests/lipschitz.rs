use std::collections::BTreeMap;

use lipfree::functionals::PairMeasure;
use lipfree::lipschitz::{
    check_one_lipschitz, floor_round, lip_norm, mcshane_inf_extension, mcshane_sup_extension, slope, PartialFunction,
};
use lipfree::metric::{FiniteMetricSpace, PairSet, PointIndex};
use lipfree::monotone::{brute_force_cm_oracle, check_gamma_cm, prune_to_cm, Gamma};
use lipfree::random::{random_integer_metric, random_metric, random_positive_measure, random_unit_ball_function};
use lipfree::{Rational, Scalar};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// Grid values `k/4` covering every value a 1-Lipschitz extension can take.
fn grid(lo: &Rational, hi: &Rational) -> impl Iterator<Item = Rational> {
    let lo4 = (lo.clone() * q(4, 1)).floor().to_integer();
    let hi4 = (hi.clone() * q(4, 1)).floor().to_integer();
    let lo4: i64 = lo4.try_into().unwrap();
    let hi4: i64 = hi4.try_into().unwrap();
    (lo4 - 4..=hi4 + 4).map(|k| q(k, 4))
}

#[test]
fn mcshane_extensions_bracket_every_extension() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let space: FiniteMetricSpace<Rational> = random_metric(&mut rng, 5, 8, 4);
        let f = random_unit_ball_function(&mut rng, &space, 4);
        let domain: BTreeMap<PointIndex, Rational> = space
            .points()
            .filter(|_| rng.gen_bool(0.5))
            .map(|p| (p, f.value(p).clone()))
            .collect();
        if domain.is_empty() {
            continue;
        }
        let partial = PartialFunction::new(domain).unwrap();
        let low = mcshane_sup_extension(&partial, &space).unwrap();
        let high = mcshane_inf_extension(&partial, &space).unwrap();
        for ext in [&low, &high] {
            assert!(lip_norm(&space, &ext.function) <= q(1, 1));
            for (p, v) in partial.iter() {
                assert_eq!(ext.function.value(p).clone() - ext.shift.clone(), *v);
            }
        }
        // pointwise: a value below the smallest (above the largest)
        // extension at any point already breaks the 1-Lipschitz condition
        for y in space.points().filter(|&y| partial.get(y).is_none()) {
            let lo = low.function.value(y).clone() - low.shift.clone();
            let hi = high.function.value(y).clone() - high.shift.clone();
            assert!(lo <= hi);
            for t in grid(&lo, &hi) {
                let mut extended = partial.clone();
                extended.insert(y, t.clone());
                let admissible = check_one_lipschitz(&space, &extended).is_ok();
                assert_eq!(admissible, lo <= t && t <= hi, "value {t} at {y:?}");
            }
        }
    }
}

#[test]
fn floor_round_keeps_unit_slopes() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut with_pairs = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=7);
        let space: FiniteMetricSpace<Rational> = random_integer_metric(&mut rng, n, 4);
        let g = random_unit_ball_function(&mut rng, &space, 4);
        let tight: PairSet = space.pairs().filter(|p| slope(&space, &g, p).is_one()).collect();
        with_pairs += usize::from(!tight.is_empty());
        let h = floor_round(&space, &g, &tight).unwrap();
        assert!(h.values().iter().all(Scalar::is_integer));
        assert!(lip_norm(&space, &h) <= q(1, 1));
        assert!(h.value(space.base()).is_zero());
        for p in &tight {
            assert!(slope(&space, &h, p).is_one());
        }
    }
    assert!(with_pairs > 50, "only {with_pairs} instances with tight pairs");
}

#[test]
fn pruning_meets_mass_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pruned_something = 0;
    for case in 0..200 {
        let n = rng.gen_range(2..=6);
        let bound = rng.gen_range(1..=4u32);
        let space: FiniteMetricSpace<Rational> = random_integer_metric(&mut rng, n, i64::from(bound));
        // bound·(1-γ) < 1
        let gamma = Gamma::new(q(1, 1) - q(1, i64::from(bound) + rng.gen_range(1..=3))).unwrap();
        let f = random_unit_ball_function(&mut rng, &space, 4);
        let steep: PairSet = space.pairs().filter(|p| slope(&space, &f, p) >= *gamma.value()).collect();
        assert!(check_gamma_cm(&space, &steep, &gamma).is_monotone());
        let measure: PairMeasure<Rational> = random_positive_measure(&mut rng, &space, 6);
        let result = prune_to_cm(&space, &steep, &measure, &gamma, bound).unwrap();

        assert_eq!(result.kept.len() + result.dropped.len(), steep.len());
        assert!(result.kept.iter().all(|p| steep.contains(p)));
        assert!(check_gamma_cm(&space, &result.kept, &Gamma::one()).is_monotone());
        if result.kept.len() <= 10 {
            assert!(brute_force_cm_oracle(&space, &result.kept, &Gamma::one()).unwrap(), "case {case}");
        }
        let slack = Rational::from_i64(i64::from(bound)) * (q(1, 1) - gamma.value().clone());
        let lower = measure.mass_of(&steep) - q(2, 1) * slack * measure.total_mass();
        assert!(measure.mass_of(&result.kept) >= lower, "case {case}");
        pruned_something += usize::from(!result.dropped.is_empty());
    }
    assert!(pruned_something > 0);
}
