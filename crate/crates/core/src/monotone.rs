//! γ-cyclic monotonicity of finite pair sets.
//!
//! A set `A = {(x_i, y_i)}` is γ-cyclically monotonic when every cyclic
//! sequence of its pairs has a nonnegative sum of
//!
//! ```text
//! β_ij(γ) = min{ d(x_i, y_j) - γ·d(x_i, y_i), d(y_i, y_j) }
//! ```
//!
//! over consecutive indices. Equivalently the difference system
//! `α_i <= α_j + β_ij` is feasible, which is decided here by shortest paths
//! on the complete digraph over the indices of `A` with edge `j -> i`
//! weighted `β_ij`. A feasible system yields potentials (a
//! [`CmCertificate`]); an infeasible one yields a negative cycle (a
//! [`CmViolation`]). Both replay independently of the search.

use thiserror::Error;

use crate::functionals::PairMeasure;
use crate::lipschitz::{
    lip_norm, mcshane_inf_extension, slope, LipschitzError, LipschitzFunction, PartialFunction,
};
use crate::metric::{project, FiniteMetricSpace, OrderedPair, PairSet, PointIndex};
use crate::scalar::Scalar;

/// Largest pair set the brute-force oracle accepts.
pub const ORACLE_MAX_PAIRS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonotoneError {
    #[error("gamma = {0} is outside (0, 1]")]
    GammaOutOfRange(String),
    #[error("brute-force oracle is limited to {ORACLE_MAX_PAIRS} pairs, got {0}")]
    OracleTooLarge(usize),
    #[error("certificate does not replay: {0}")]
    InvalidCertificate(String),
    #[error("augmenting pair has equal endpoints")]
    DegenerateAugmentation,
    #[error("pair set is not {0}-cyclically monotonic")]
    NotMonotone(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Lipschitz(#[from] LipschitzError),
    #[error("internal soundness check failed: {0}")]
    Internal(String),
}

/// Relaxation parameter γ ∈ (0, 1].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Gamma<S>(S);

impl<S: Scalar> Gamma<S> {
    pub fn new(value: S) -> Result<Self, MonotoneError> {
        if value.is_positive() && value <= S::one() {
            Ok(Gamma(value))
        } else {
            Err(MonotoneError::GammaOutOfRange(value.to_string()))
        }
    }

    pub fn one() -> Self {
        Gamma(S::one())
    }

    pub fn value(&self) -> &S {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

/// `β_ij(γ)` for `i = first`, `j = second`.
pub fn beta<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    first: &OrderedPair,
    second: &OrderedPair,
    gamma: &Gamma<S>,
) -> S {
    let (xi, yi, yj) = (first.from(), first.to(), second.to());
    let a = space.d(xi, yj).clone() - gamma.value().clone() * space.d(xi, yi).clone();
    let b = space.d(yi, yj).clone();
    a.min_of(b)
}

/// Potentials `α_i` (one per pair, in pair-set order) with
/// `α_i <= α_j + β_ij(γ)` for all `i, j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmCertificate<S> {
    pub potentials: Vec<S>,
}

impl<S: Scalar> CmCertificate<S> {
    pub fn verify(
        &self,
        space: &FiniteMetricSpace<S>,
        pairs: &PairSet,
        gamma: &Gamma<S>,
    ) -> Result<(), MonotoneError> {
        if self.potentials.len() != pairs.len() {
            return Err(MonotoneError::InvalidCertificate(format!(
                "{} potentials for {} pairs",
                self.potentials.len(),
                pairs.len()
            )));
        }
        let ps = pairs.as_slice();
        for (i, pi) in ps.iter().enumerate() {
            for (j, pj) in ps.iter().enumerate() {
                let bound = self.potentials[j].clone() + beta(space, pi, pj, gamma);
                if self.potentials[i] > bound {
                    return Err(MonotoneError::InvalidCertificate(format!(
                        "alpha_{i} = {} > alpha_{j} + beta_{i}{j} = {bound}",
                        self.potentials[i]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A simple cycle of pair indices whose β-sum (`deficit`) is negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmViolation<S> {
    pub cycle: Vec<usize>,
    pub deficit: S,
}

impl<S: Scalar> CmViolation<S> {
    pub fn cycle_sum(&self, space: &FiniteMetricSpace<S>, pairs: &PairSet, gamma: &Gamma<S>) -> Option<S> {
        let ps = pairs.as_slice();
        let k = self.cycle.len();
        let mut sum = S::zero();
        for t in 0..k {
            let i = *ps.get(self.cycle[t])?;
            let j = *ps.get(self.cycle[(t + 1) % k])?;
            sum = sum + beta(space, &i, &j, gamma);
        }
        Some(sum)
    }

    pub fn verify(
        &self,
        space: &FiniteMetricSpace<S>,
        pairs: &PairSet,
        gamma: &Gamma<S>,
    ) -> Result<(), MonotoneError> {
        if self.cycle.is_empty() {
            return Err(MonotoneError::InvalidCertificate("empty cycle".into()));
        }
        let mut seen = self.cycle.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.cycle.len() {
            return Err(MonotoneError::InvalidCertificate("cycle is not simple".into()));
        }
        let sum = self
            .cycle_sum(space, pairs, gamma)
            .ok_or_else(|| MonotoneError::InvalidCertificate("cycle index out of range".into()))?;
        if sum != self.deficit || !sum.is_negative() {
            return Err(MonotoneError::InvalidCertificate(format!(
                "cycle sum {sum}, claimed deficit {}",
                self.deficit
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CmVerdict<S> {
    Monotone(CmCertificate<S>),
    Violated(CmViolation<S>),
}

impl<S: Scalar> CmVerdict<S> {
    pub fn is_monotone(&self) -> bool {
        matches!(self, CmVerdict::Monotone(_))
    }

    pub fn certificate(&self) -> Option<&CmCertificate<S>> {
        match self {
            CmVerdict::Monotone(c) => Some(c),
            CmVerdict::Violated(_) => None,
        }
    }

    pub fn violation(&self) -> Option<&CmViolation<S>> {
        match self {
            CmVerdict::Violated(v) => Some(v),
            CmVerdict::Monotone(_) => None,
        }
    }

    pub fn verify(
        &self,
        space: &FiniteMetricSpace<S>,
        pairs: &PairSet,
        gamma: &Gamma<S>,
    ) -> Result<(), MonotoneError> {
        match self {
            CmVerdict::Monotone(c) => c.verify(space, pairs, gamma),
            CmVerdict::Violated(v) => v.verify(space, pairs, gamma),
        }
    }
}

/// Decides γ-cyclic monotonicity of `pairs`.
///
/// Bellman-Ford from a virtual source joined to every index by a zero edge.
/// Without a negative cycle the distances are the pointwise largest
/// nonpositive feasible potentials. Otherwise the predecessor walk from a
/// node still relaxing in round `|A| + 1` lands on a negative cycle.
pub fn check_gamma_cm<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    pairs: &PairSet,
    gamma: &Gamma<S>,
) -> CmVerdict<S> {
    let ps = pairs.as_slice();
    let n = ps.len();
    let weights: Vec<Vec<S>> = ps
        .iter()
        .map(|pi| ps.iter().map(|pj| beta(space, pi, pj, gamma)).collect())
        .collect();
    let mut dist = vec![S::zero(); n];
    let mut pred: Vec<Option<usize>> = vec![None; n];

    let relax = |dist: &mut Vec<S>, pred: &mut Vec<Option<usize>>| -> Option<usize> {
        let mut last = None;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let candidate = dist[j].clone() + weights[i][j].clone();
                if candidate < dist[i] {
                    dist[i] = candidate;
                    pred[i] = Some(j);
                    last = Some(i);
                }
            }
        }
        last
    };

    for _ in 0..n {
        if relax(&mut dist, &mut pred).is_none() {
            return CmVerdict::Monotone(CmCertificate { potentials: dist });
        }
    }
    let Some(mut x) = relax(&mut dist, &mut pred) else {
        return CmVerdict::Monotone(CmCertificate { potentials: dist });
    };
    for _ in 0..n {
        x = pred[x].expect("relaxed node has a predecessor");
    }
    let start = x;
    let mut cycle = vec![start];
    let mut y = pred[start].expect("cycle node has a predecessor");
    while y != start {
        cycle.push(y);
        y = pred[y].expect("cycle node has a predecessor");
    }
    let k = cycle.len();
    let deficit = (0..k).fold(S::zero(), |acc, t| acc + weights[cycle[t]][cycle[(t + 1) % k]].clone());
    assert!(deficit.is_negative(), "predecessor cycle with nonnegative weight");
    CmVerdict::Violated(CmViolation { cycle, deficit })
}

/// Checks the defining inequality on every simple cycle of `pairs`
/// (including 1-cycles). Exponential; test oracle only.
///
/// Terms are computed straight from the defining sum, independently of
/// [`beta`] and the shortest-path machinery.
pub fn brute_force_cm_oracle<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    pairs: &PairSet,
    gamma: &Gamma<S>,
) -> Result<bool, MonotoneError> {
    let n = pairs.len();
    if n > ORACLE_MAX_PAIRS {
        return Err(MonotoneError::OracleTooLarge(n));
    }
    let ps = pairs.as_slice();
    let g = gamma.value();
    let term = |i: usize, next: usize| -> S {
        let (x, y) = (ps[i].from(), ps[i].to());
        let y_next = ps[next].to();
        let first = space.d(x, y_next).clone() - g.clone() * space.d(x, y).clone();
        let second = space.d(y, y_next).clone();
        if first < second {
            first
        } else {
            second
        }
    };

    // Depth-first over cycles whose smallest index is `start`.
    fn extend<S: Scalar>(
        path: &mut Vec<usize>,
        used: &mut Vec<bool>,
        partial: S,
        n: usize,
        term: &dyn Fn(usize, usize) -> S,
    ) -> bool {
        let start = path[0];
        let last = *path.last().unwrap();
        if (partial.clone() + term(last, start)).is_negative() {
            return false;
        }
        for next in (start + 1)..n {
            if used[next] {
                continue;
            }
            used[next] = true;
            path.push(next);
            let ok = extend(path, used, partial.clone() + term(last, next), n, term);
            path.pop();
            used[next] = false;
            if !ok {
                return false;
            }
        }
        true
    }

    for start in 0..n {
        let mut used = vec![false; n];
        used[start] = true;
        if !extend(&mut vec![start], &mut used, S::zero(), n, &term) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A 1-Lipschitz `f` with `slope(f, p) >= γ` on every pair of `pairs`,
/// built as `f(x) = min_i (α_i + d(x, y_i))` and shifted to vanish at the base.
pub fn synthesize_witness<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    pairs: &PairSet,
    gamma: &Gamma<S>,
    certificate: &CmCertificate<S>,
) -> Result<LipschitzFunction<S>, MonotoneError> {
    certificate.verify(space, pairs, gamma)?;
    if pairs.is_empty() {
        return Ok(LipschitzFunction::zero(space));
    }
    let mut partial = PartialFunction::new(
        [(pairs.as_slice()[0].to(), certificate.potentials[0].clone())]
            .into_iter()
            .collect(),
    )?;
    for (p, a) in pairs.iter().zip(&certificate.potentials) {
        partial.insert(p.to(), a.clone());
    }
    let f = mcshane_inf_extension(&partial, space)?.function;
    replay_witness(space, pairs, gamma, &f)?;
    Ok(f)
}

/// Checks `lip_norm(f) <= 1` and `slope(f, p) >= γ` on `pairs`.
pub fn replay_witness<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    pairs: &PairSet,
    gamma: &Gamma<S>,
    f: &LipschitzFunction<S>,
) -> Result<(), MonotoneError> {
    let norm = lip_norm(space, f);
    if norm > S::one() {
        return Err(MonotoneError::Internal(format!("witness has norm {norm}")));
    }
    for p in pairs {
        let s = slope(space, f, p);
        if s < *gamma.value() {
            return Err(MonotoneError::Internal(format!(
                "witness slope {s} < gamma on ({}, {})",
                space.label(p.from()),
                space.label(p.to())
            )));
        }
    }
    Ok(())
}

/// Outcome of testing `A ∪ {(u, v)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedCheck<S> {
    pub pairs: PairSet,
    pub verdict: CmVerdict<S>,
    /// Witness for the augmented set when it is γ-CM.
    pub witness: Option<LipschitzFunction<S>>,
}

/// Checks `f(y) - f(x) + γ·d(u, v) <= d(x, u) + d(y, v)` for all `x, y` in `points`.
pub fn augmentation_inequality_holds<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    points: &std::collections::BTreeSet<PointIndex>,
    gamma: &Gamma<S>,
    f: &LipschitzFunction<S>,
    u: PointIndex,
    v: PointIndex,
) -> bool {
    let duv = gamma.value().clone() * space.d(u, v).clone();
    points.iter().all(|&x| {
        points.iter().all(|&y| {
            f.value(y).clone() - f.value(x).clone() + duv.clone()
                <= space.d(x, u).clone() + space.d(y, v).clone()
        })
    })
}

/// Decides whether `A ∪ {(u, v)}` is γ-CM. On success the witness of the
/// augmented set is also checked against the inequality form over
/// `project(A)`.
pub fn check_augmented<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    pairs: &PairSet,
    gamma: &Gamma<S>,
    u: PointIndex,
    v: PointIndex,
) -> Result<AugmentedCheck<S>, MonotoneError> {
    let extra = OrderedPair::new(u, v).map_err(|_| MonotoneError::DegenerateAugmentation)?;
    let augmented = pairs.with(extra);
    let verdict = check_gamma_cm(space, &augmented, gamma);
    let witness = match &verdict {
        CmVerdict::Monotone(cert) => {
            let f = synthesize_witness(space, &augmented, gamma, cert)?;
            if !augmentation_inequality_holds(space, &project(pairs), gamma, &f, u, v) {
                return Err(MonotoneError::Internal(
                    "augmented witness violates the pairwise inequality".into(),
                ));
            }
            Some(f)
        }
        CmVerdict::Violated(_) => None,
    };
    Ok(AugmentedCheck {
        pairs: augmented,
        verdict,
        witness,
    })
}

/// Result of pruning a γ-CM set to a cyclically monotonic subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pruned<S> {
    pub kept: PairSet,
    pub dropped: PairSet,
    /// Number of fractional-part buckets `K`; `None` when γ = 1 and nothing is pruned.
    pub buckets: Option<usize>,
    /// The dropped bucket `k` in `1..=K`.
    pub dropped_bucket: Option<usize>,
    /// Integer potentials certifying `kept` at γ = 1.
    pub certificate: CmCertificate<S>,
}

/// Prunes a γ-CM set `A` on a metric with integer distances in `{0, …, bound}`
/// to a cyclically monotonic `B ⊆ A` with
/// `μ(B) >= μ(A) - 2·bound·(1-γ)·μ(total)`.
///
/// Potentials of `A` are bucketed by fractional part into `K` half-open
/// intervals of width `1/K`, `K` the largest integer with
/// `bound·(1-γ) <= 1/K`; the lightest bucket `k` is dropped and
/// `⌊α_i - k/K⌋` certifies the rest.
pub fn prune_to_cm<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    pairs: &PairSet,
    measure: &PairMeasure<S>,
    gamma: &Gamma<S>,
    bound: u32,
) -> Result<Pruned<S>, MonotoneError> {
    let n = S::from_i64(i64::from(bound));
    if bound == 0 {
        return Err(MonotoneError::Precondition("distance bound must be positive".into()));
    }
    if !space.is_integer_metric() || space.max_distance() > n {
        return Err(MonotoneError::Precondition(format!(
            "distances must be integers in 0..={bound}"
        )));
    }
    if !measure.is_positive() {
        return Err(MonotoneError::Precondition("measure must be positive".into()));
    }
    let slack = n.clone() * (S::one() - gamma.value().clone());
    if slack >= S::one() {
        return Err(MonotoneError::Precondition(format!(
            "bound·(1 - gamma) = {slack} must be < 1"
        )));
    }
    let tilde = match check_gamma_cm(space, pairs, gamma) {
        CmVerdict::Monotone(c) => c,
        CmVerdict::Violated(_) => return Err(MonotoneError::NotMonotone(gamma.value().to_string())),
    };
    let one = Gamma::one();

    if slack.is_zero() {
        let certificate = match check_gamma_cm(space, pairs, &one) {
            CmVerdict::Monotone(c) => c,
            CmVerdict::Violated(_) => return Err(MonotoneError::Internal("γ = 1 check disagrees".into())),
        };
        return Ok(Pruned {
            kept: pairs.clone(),
            dropped: PairSet::new(),
            buckets: None,
            dropped_bucket: None,
            certificate,
        });
    }

    let mut k_max = 1usize;
    while S::from_i64(k_max as i64 + 1) * slack.clone() <= S::one() {
        k_max += 1;
    }
    let kk = S::from_i64(k_max as i64);
    debug_assert!(S::one() <= S::from_i64(2) * kk.clone() * slack.clone());

    // bucket b in 0..K holds fract(α̃_i) ∈ [b/K, (b+1)/K)
    let bucket_of = |a: &S| -> usize {
        let scaled = (a.fractional_part() * kk.clone()).floor();
        (0..k_max)
            .find(|&b| S::from_i64(b as i64) == scaled)
            .expect("fractional part lies in [0, 1)")
    };
    let buckets: Vec<usize> = tilde.potentials.iter().map(bucket_of).collect();
    let mut mass = vec![S::zero(); k_max];
    for (p, &b) in pairs.iter().zip(&buckets) {
        mass[b] = mass[b].clone() + measure.weight(p);
    }
    let lightest = (0..k_max)
        .min_by(|&a, &b| mass[a].cmp(&mass[b]).then(a.cmp(&b)))
        .expect("at least one bucket");
    let k = lightest + 1;
    let offset = S::from_i64(k as i64) / kk.clone();

    let mut kept = PairSet::new();
    let mut dropped = PairSet::new();
    let mut potentials = Vec::new();
    for ((p, &b), a) in pairs.iter().zip(&buckets).zip(&tilde.potentials) {
        if b == lightest {
            dropped.insert(*p);
        } else {
            kept.insert(*p);
            potentials.push((a.clone() - offset.clone()).floor());
        }
    }
    let certificate = CmCertificate { potentials };
    certificate
        .verify(space, &kept, &one)
        .map_err(|e| MonotoneError::Internal(format!("pruned potentials: {e}")))?;
    if !check_gamma_cm(space, &kept, &one).is_monotone() {
        return Err(MonotoneError::Internal("pruned set fails the γ = 1 check".into()));
    }
    let lower = measure.mass_of(pairs)
        - S::from_i64(2) * slack * measure.total_mass();
    if measure.mass_of(&kept) < lower {
        return Err(MonotoneError::Internal("pruning mass bound violated".into()));
    }
    Ok(Pruned {
        kept,
        dropped,
        buckets: Some(k_max),
        dropped_bucket: Some(k),
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{build_example52, line};
    use crate::{Rational, Rational64};

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn gamma(n: i64, d: i64) -> Gamma<Rational> {
        Gamma::new(q(n, d)).unwrap()
    }

    fn pairs(space: &FiniteMetricSpace<Rational>, list: &[(&str, &str)]) -> PairSet {
        list.iter().map(|(a, b)| space.pair(a, b).unwrap()).collect()
    }

    #[test]
    fn gamma_range() {
        assert!(Gamma::new(q(0, 1)).is_err());
        assert!(Gamma::new(q(3, 2)).is_err());
        assert!(Gamma::new(q(1, 1)).is_ok());
    }

    #[test]
    fn empty_set_is_monotone() {
        let s = line::<Rational>(3).unwrap();
        let v = check_gamma_cm(&s, &PairSet::new(), &gamma(1, 2));
        assert_eq!(v, CmVerdict::Monotone(CmCertificate { potentials: vec![] }));
        assert!(brute_force_cm_oracle(&s, &PairSet::new(), &gamma(1, 2)).unwrap());
    }

    #[test]
    fn both_directions_violate() {
        let s = line::<Rational>(3).unwrap();
        let a = pairs(&s, &[("0", "2"), ("2", "0")]);
        let g = gamma(1, 2);
        let v = check_gamma_cm(&s, &a, &g);
        let violation = v.violation().expect("violation").clone();
        assert_eq!(violation.cycle.len(), 2);
        // each term is -γ·d = -1
        assert_eq!(violation.deficit, q(-2, 1));
        violation.verify(&s, &a, &g).unwrap();
        assert!(!brute_force_cm_oracle(&s, &a, &g).unwrap());
    }

    #[test]
    fn line_chain_is_monotone() {
        let s = line::<Rational>(3).unwrap();
        let a = pairs(&s, &[("2", "1"), ("1", "0")]);
        let g = Gamma::one();
        let v = check_gamma_cm(&s, &a, &g);
        let cert = v.certificate().expect("certificate");
        cert.verify(&s, &a, &g).unwrap();
        // difference system: α_0 <= α_1 + 1 and α_1 <= α_0 - 1
        assert_eq!(cert.potentials, vec![q(0, 1), q(-1, 1)]);
        assert!(brute_force_cm_oracle(&s, &a, &g).unwrap());
        let f = synthesize_witness(&s, &a, &g, cert).unwrap();
        for p in &a {
            assert_eq!(slope(&s, &f, p), q(1, 1));
        }
        assert_eq!(f.values(), &[q(0, 1), q(1, 1), q(2, 1)]);
    }

    #[test]
    fn singleton_cycle_term_vanishes() {
        let s = line::<Rational>(2).unwrap();
        let a = pairs(&s, &[("1", "0")]);
        for g in [gamma(1, 4), gamma(1, 1)] {
            assert!(brute_force_cm_oracle(&s, &a, &g).unwrap());
            assert!(check_gamma_cm(&s, &a, &g).is_monotone());
        }
    }

    #[test]
    fn oracle_size_guard() {
        let s = line::<Rational>(5).unwrap();
        let a: PairSet = s.pairs().take(11).collect();
        assert_eq!(
            brute_force_cm_oracle(&s, &a, &gamma(1, 2)),
            Err(MonotoneError::OracleTooLarge(11))
        );
    }

    #[test]
    fn witness_rejects_bad_certificate() {
        let s = line::<Rational>(3).unwrap();
        let a = pairs(&s, &[("2", "1"), ("1", "0")]);
        let bad = CmCertificate { potentials: vec![q(5, 1), q(0, 1)] };
        assert!(matches!(
            synthesize_witness(&s, &a, &Gamma::one(), &bad),
            Err(MonotoneError::InvalidCertificate(_))
        ));
        assert_eq!(
            synthesize_witness(&s, &PairSet::new(), &Gamma::one(), &CmCertificate { potentials: vec![] }).unwrap(),
            LipschitzFunction::zero(&s)
        );
    }

    #[test]
    fn augmented_checks() {
        let s = line::<Rational>(3).unwrap();
        let (u, v) = (PointIndex(2), PointIndex(0));
        let r = check_augmented(&s, &PairSet::new(), &gamma(1, 2), u, v).unwrap();
        assert!(r.verdict.is_monotone());
        assert!(r.witness.is_some());

        let a: PairSet = [OrderedPair::new(v, u).unwrap()].into_iter().collect();
        let r = check_augmented(&s, &a, &gamma(1, 2), u, v).unwrap();
        assert!(!r.verdict.is_monotone());
        assert!(check_augmented(&s, &a, &gamma(1, 2), u, u).is_err());
    }

    #[test]
    fn augmented_example_matches_oracle() {
        let s = build_example52::<Rational>(1).unwrap();
        let a = pairs(&s, &[("x1", "y1")]);
        let g = gamma(1, 2);
        let u = s.index_of("u2^1").unwrap();
        let v = s.index_of("v2^1").unwrap();
        let r = check_augmented(&s, &a, &g, u, v).unwrap();
        assert_eq!(r.verdict.is_monotone(), brute_force_cm_oracle(&s, &r.pairs, &g).unwrap());
        assert!(r.verdict.is_monotone());
    }

    #[test]
    fn generic_over_machine_rationals() {
        let s = line::<Rational64>(4).unwrap();
        let a: PairSet = [s.pair("3", "1").unwrap(), s.pair("1", "0").unwrap()].into_iter().collect();
        let g = Gamma::new(Rational64::ratio(3, 4)).unwrap();
        assert!(check_gamma_cm(&s, &a, &g).is_monotone());
        assert!(brute_force_cm_oracle(&s, &a, &g).unwrap());
    }

    #[test]
    fn prune_is_identity_at_gamma_one() {
        let s = line::<Rational>(3).unwrap();
        let a = pairs(&s, &[("2", "1"), ("1", "0")]);
        let mu = PairMeasure::from_atoms(a.iter().map(|p| (*p, q(1, 2)))).unwrap();
        let out = prune_to_cm(&s, &a, &mu, &Gamma::one(), 2).unwrap();
        assert_eq!(out.kept, a);
        assert!(out.dropped.is_empty());
    }

    #[test]
    fn prune_preconditions() {
        let s = line::<Rational>(4).unwrap();
        let a = pairs(&s, &[("2", "1")]);
        let mu = PairMeasure::from_atoms(a.iter().map(|p| (*p, q(1, 1)))).unwrap();
        // max distance 3 exceeds the bound 2
        assert!(matches!(prune_to_cm(&s, &a, &mu, &gamma(9, 10), 2), Err(MonotoneError::Precondition(_))));
        // 3·(1 - 1/2) >= 1
        assert!(matches!(prune_to_cm(&s, &a, &mu, &gamma(1, 2), 3), Err(MonotoneError::Precondition(_))));
        let neg = PairMeasure::from_atoms(a.iter().map(|p| (*p, q(-1, 1)))).unwrap();
        assert!(matches!(prune_to_cm(&s, &a, &neg, &gamma(9, 10), 3), Err(MonotoneError::Precondition(_))));
    }

    #[test]
    fn prune_keeps_certified_subset() {
        let s = line::<Rational>(3).unwrap();
        let a = pairs(&s, &[("2", "1"), ("1", "0")]);
        let g = gamma(3, 4);
        assert!(check_gamma_cm(&s, &a, &g).is_monotone());
        let mu = PairMeasure::from_atoms([(a.as_slice()[0], q(1, 4)), (a.as_slice()[1], q(3, 4))]).unwrap();
        let out = prune_to_cm(&s, &a, &mu, &g, 2).unwrap();
        assert!(check_gamma_cm(&s, &out.kept, &Gamma::one()).is_monotone());
        assert_eq!(out.buckets, Some(2));
        let bound = mu.mass_of(&a) - q(2, 1) * q(2, 1) * q(1, 4) * mu.total_mass();
        assert!(mu.mass_of(&out.kept) >= bound);
    }
}
