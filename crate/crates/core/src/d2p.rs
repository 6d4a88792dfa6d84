//! Certificate search for diameter-two properties of `Lip₀(M)`.
//!
//! Every search here is scoped to one given instance (a measure, a pair
//! set, a function on a finite subset) and returns either a certificate
//! whose inequalities replay exactly, or an exhaustion log. Candidate pairs
//! `(u, v)` are scanned in declaration order; scans run in parallel chunks
//! but always return the lowest-ordered success.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::example52::case_analysis_pair;
use crate::functionals::{is_optimal, FunctionalError, OptimalityVerdict, PairMeasure};
use crate::lipschitz::{floor_round, lip_norm, slope, LipschitzError, LipschitzFunction};
use crate::metric::{project, FiniteMetricSpace, OrderedPair, PairSet, PointIndex};
use crate::monotone::{
    check_gamma_cm, synthesize_witness, CmCertificate, CmVerdict, CmViolation, Gamma, MonotoneError,
};
use crate::scalar::Scalar;

/// Largest support whose subsets are enumerated as candidate sets.
pub const MAX_SUPPORT: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum D2pError {
    #[error("epsilon = {0} is outside (0, 1)")]
    EpsilonOutOfRange(String),
    #[error("gamma must be < 1 for this search")]
    GammaNotBelowOne,
    #[error("function has Lipschitz norm {0} > 1")]
    NotInUnitBall(String),
    #[error("pair set is not cyclically monotonic")]
    NotCyclicallyMonotone,
    #[error("measure is not optimal")]
    NotOptimal,
    #[error("measure must have norm 1, got {0}")]
    NotNormalized(String),
    #[error("no measures given")]
    NoMeasures,
    #[error("support of {0} pairs exceeds the subset search limit {MAX_SUPPORT}")]
    SupportTooLarge(usize),
    #[error("convex weights must be nonnegative and sum to 1")]
    BadWeights,
    #[error("certificate does not replay: {0}")]
    Replay(String),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error(transparent)]
    Monotone(#[from] MonotoneError),
    #[error(transparent)]
    Lipschitz(#[from] LipschitzError),
}

fn replay(msg: impl Into<String>) -> D2pError {
    D2pError::Replay(msg.into())
}

/// Runs `probe` over `items` in parallel chunks and returns the
/// lowest-indexed success together with the failures of all earlier items.
fn first_hit<I, T, L, E, F>(items: &[I], probe: F) -> Result<(Option<(usize, T)>, Vec<(usize, L)>), E>
where
    I: Sync,
    T: Send,
    L: Send,
    E: Send,
    F: Fn(&I) -> Result<Result<T, L>, E> + Sync,
{
    let chunk = (rayon::current_num_threads() * 4).max(1);
    let mut failures = Vec::new();
    for (c, block) in items.chunks(chunk).enumerate() {
        let results: Vec<Result<Result<T, L>, E>> = block.par_iter().map(&probe).collect();
        for (k, r) in results.into_iter().enumerate() {
            let index = c * chunk + k;
            match r? {
                Ok(hit) => return Ok((Some((index, hit)), failures)),
                Err(miss) => failures.push((index, miss)),
            }
        }
    }
    Ok((None, failures))
}

// ---------------------------------------------------------------- Lip-LTP

/// One `(x, y)` at which `(1-ε)(|f(x)-f(y)| + d(u,v)) <= d(x,u) + d(y,v)` fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtpViolation<S> {
    pub x: PointIndex,
    pub y: PointIndex,
    /// `1 - ε`.
    pub factor: S,
    /// `|f(x) - f(y)| + d(u, v)`.
    pub bracket: S,
    /// `factor · bracket`.
    pub lhs: S,
    /// `d(x, u) + d(y, v)`.
    pub rhs: S,
    /// `lhs - rhs > 0`.
    pub excess: S,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtpCandidate<S> {
    pub u: PointIndex,
    pub v: PointIndex,
    /// Every violating `(x, y)`, in declaration order.
    pub violations: Vec<LtpViolation<S>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LipLtpWitness<S> {
    Found {
        u: PointIndex,
        v: PointIndex,
        /// Candidates rejected before `(u, v)`.
        rejected: Vec<LtpCandidate<S>>,
    },
    Absent {
        candidates: Vec<LtpCandidate<S>>,
    },
}

impl<S> LipLtpWitness<S> {
    pub fn is_found(&self) -> bool {
        matches!(self, LipLtpWitness::Found { .. })
    }
}

fn ltp_violations<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    subset: &BTreeSet<PointIndex>,
    factor: &S,
    f: &LipschitzFunction<S>,
    u: PointIndex,
    v: PointIndex,
) -> Vec<LtpViolation<S>> {
    let duv = space.d(u, v).clone();
    let mut out = Vec::new();
    for &x in subset {
        for &y in subset {
            let bracket = (f.value(x).clone() - f.value(y).clone()).abs() + duv.clone();
            let lhs = factor.clone() * bracket.clone();
            let rhs = space.d(x, u).clone() + space.d(y, v).clone();
            if lhs > rhs {
                out.push(LtpViolation {
                    x,
                    y,
                    factor: factor.clone(),
                    bracket,
                    excess: lhs.clone() - rhs.clone(),
                    lhs,
                    rhs,
                });
            }
        }
    }
    out
}

/// Searches for `u != v` with `(1-ε)(|f(x)-f(y)| + d(u,v)) <= d(x,u) + d(y,v)`
/// for all `x, y` in `subset`.
pub fn lip_ltp_witness<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    subset: &BTreeSet<PointIndex>,
    epsilon: &S,
    f: &LipschitzFunction<S>,
) -> Result<LipLtpWitness<S>, D2pError> {
    if !epsilon.is_positive() || *epsilon >= S::one() {
        return Err(D2pError::EpsilonOutOfRange(epsilon.to_string()));
    }
    let norm = lip_norm(space, f);
    if norm > S::one() {
        return Err(D2pError::NotInUnitBall(norm.to_string()));
    }
    let factor = S::one() - epsilon.clone();
    let pairs: Vec<OrderedPair> = space.pairs().collect();
    let (hit, misses) = first_hit(&pairs, |p| {
        let violations = ltp_violations(space, subset, &factor, f, p.from(), p.to());
        Ok::<_, D2pError>(if violations.is_empty() {
            Ok(())
        } else {
            Err(LtpCandidate {
                u: p.from(),
                v: p.to(),
                violations,
            })
        })
    })?;
    let rejected = misses.into_iter().map(|(_, c)| c).collect();
    Ok(match hit {
        Some((i, ())) => LipLtpWitness::Found {
            u: pairs[i].from(),
            v: pairs[i].to(),
            rejected,
        },
        None => LipLtpWitness::Absent { candidates: rejected },
    })
}

/// Re-checks a claimed Lip-LTP verdict without searching: a found pair must
/// satisfy every inequality, and an absent verdict must list every pair
/// with a genuine violation.
pub fn verify_lip_ltp<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    subset: &BTreeSet<PointIndex>,
    epsilon: &S,
    f: &LipschitzFunction<S>,
    witness: &LipLtpWitness<S>,
) -> Result<(), D2pError> {
    let factor = S::one() - epsilon.clone();
    let check_listed = |c: &LtpCandidate<S>| -> Result<(), D2pError> {
        if c.violations.is_empty() {
            return Err(replay("candidate rejected without a violation"));
        }
        for w in &c.violations {
            let bracket = (f.value(w.x).clone() - f.value(w.y).clone()).abs() + space.d(c.u, c.v).clone();
            let rhs = space.d(w.x, c.u).clone() + space.d(w.y, c.v).clone();
            let lhs = factor.clone() * bracket.clone();
            if w.bracket != bracket || w.rhs != rhs || w.lhs != lhs || w.factor != factor || lhs <= rhs {
                return Err(replay(format!(
                    "listed violation at ({}, {}) does not hold",
                    space.label(w.x),
                    space.label(w.y)
                )));
            }
        }
        Ok(())
    };
    match witness {
        LipLtpWitness::Found { u, v, rejected } => {
            if u == v || !ltp_violations(space, subset, &factor, f, *u, *v).is_empty() {
                return Err(replay("found pair violates an inequality"));
            }
            rejected.iter().try_for_each(check_listed)
        }
        LipLtpWitness::Absent { candidates } => {
            let listed: BTreeSet<(PointIndex, PointIndex)> = candidates.iter().map(|c| (c.u, c.v)).collect();
            if listed.len() != space.len() * (space.len() - 1) || listed.iter().any(|(u, v)| u == v) {
                return Err(replay("absent verdict does not cover every pair"));
            }
            candidates.iter().try_for_each(check_listed)
        }
    }
}

// ------------------------------------------------------ augmented sets

/// Why a candidate `(u, v)` was rejected: the violated augmented set(s).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentationFailure<S> {
    pub u: PointIndex,
    pub v: PointIndex,
    /// Violating cycle of `A ∪ {(u, v)}`, if any (the last index is the new pair).
    pub forward: Option<CmViolation<S>>,
    /// Violating cycle of `A ∪ {(v, u)}`, if any.
    pub backward: Option<CmViolation<S>>,
}

impl<S: Scalar> AugmentationFailure<S> {
    /// Replays the listed violating cycle(s); at least one is required.
    pub fn verify(&self, space: &FiniteMetricSpace<S>, set: &PairSet, gamma: &Gamma<S>) -> Result<(), D2pError> {
        if self.forward.is_none() && self.backward.is_none() {
            return Err(replay("rejected pair lists no violation"));
        }
        if let Some(c) = &self.forward {
            c.verify(space, &augment(set, self.u, self.v)?, gamma)?;
        }
        if let Some(c) = &self.backward {
            c.verify(space, &augment(set, self.v, self.u)?, gamma)?;
        }
        Ok(())
    }
}

/// Checks that `failures` are exactly the pairs before `stop` (all pairs
/// when `stop` is `None`) in scan order, each with a genuine violation.
fn verify_scan_log<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    set: &PairSet,
    gamma: &Gamma<S>,
    failures: &[AugmentationFailure<S>],
    stop: Option<(PointIndex, PointIndex)>,
) -> Result<(), D2pError> {
    let expected: Vec<(PointIndex, PointIndex)> = space
        .pairs()
        .map(|p| (p.from(), p.to()))
        .take_while(|&uv| Some(uv) != stop)
        .collect();
    let listed: Vec<(PointIndex, PointIndex)> = failures.iter().map(|f| (f.u, f.v)).collect();
    if listed != expected {
        return Err(replay("rejection log does not match the scan order"));
    }
    failures.iter().try_for_each(|f| f.verify(space, set, gamma))
}

/// Potential certificates for both augmentations of `A` by `(u, v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Augmentations<S> {
    /// Certifies `A ∪ {(u, v)}` (pair order: `A`, then `(u, v)`).
    pub forward: CmCertificate<S>,
    /// Certifies `A ∪ {(v, u)}`.
    pub backward: CmCertificate<S>,
}

fn augment(set: &PairSet, u: PointIndex, v: PointIndex) -> Result<PairSet, D2pError> {
    let extra = OrderedPair::new(u, v).map_err(|_| MonotoneError::DegenerateAugmentation)?;
    Ok(set.with(extra))
}

fn augmentations<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    set: &PairSet,
    gamma: &Gamma<S>,
    u: PointIndex,
    v: PointIndex,
) -> Result<Result<Augmentations<S>, AugmentationFailure<S>>, D2pError> {
    let forward = check_gamma_cm(space, &augment(set, u, v)?, gamma);
    let backward = check_gamma_cm(space, &augment(set, v, u)?, gamma);
    Ok(match (forward, backward) {
        (CmVerdict::Monotone(forward), CmVerdict::Monotone(backward)) => Ok(Augmentations { forward, backward }),
        (f, b) => Err(AugmentationFailure {
            u,
            v,
            forward: f.violation().cloned(),
            backward: b.violation().cloned(),
        }),
    })
}

impl<S: Scalar> Augmentations<S> {
    pub fn verify(
        &self,
        space: &FiniteMetricSpace<S>,
        set: &PairSet,
        gamma: &Gamma<S>,
        u: PointIndex,
        v: PointIndex,
    ) -> Result<(), D2pError> {
        self.forward.verify(space, &augment(set, u, v)?, gamma)?;
        self.backward.verify(space, &augment(set, v, u)?, gamma)?;
        Ok(())
    }

    /// Witnesses with slope at least γ on `A` and across `(u, v)`, resp. `(v, u)`.
    pub fn spread(
        &self,
        space: &FiniteMetricSpace<S>,
        set: &PairSet,
        gamma: &Gamma<S>,
        u: PointIndex,
        v: PointIndex,
    ) -> Result<(LipschitzFunction<S>, LipschitzFunction<S>), D2pError> {
        let up = synthesize_witness(space, &augment(set, u, v)?, gamma, &self.forward)?;
        let down = synthesize_witness(space, &augment(set, v, u)?, gamma, &self.backward)?;
        Ok((up, down))
    }
}

/// Checks `max{f(x)-f(y), g(y)-g(x)} + γ·d(u,v) <= d(x,u) + d(y,v)` on `points`.
fn two_sided_holds<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    points: &BTreeSet<PointIndex>,
    gamma: &S,
    f: &LipschitzFunction<S>,
    g: &LipschitzFunction<S>,
    u: PointIndex,
    v: PointIndex,
) -> Result<(), D2pError> {
    let duv = gamma.clone() * space.d(u, v).clone();
    for &x in points {
        for &y in points {
            let left = (f.value(x).clone() - f.value(y).clone()).max_of(g.value(y).clone() - g.value(x).clone());
            let rhs = space.d(x, u).clone() + space.d(y, v).clone();
            if left.clone() + duv.clone() > rhs {
                return Err(replay(format!(
                    "at ({}, {}): {left} + {duv} > {rhs}",
                    space.label(x),
                    space.label(y)
                )));
            }
        }
    }
    Ok(())
}

fn check_unit_ball_slopes<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    set: &PairSet,
    gamma: &S,
    h: &LipschitzFunction<S>,
    name: &str,
) -> Result<(), D2pError> {
    let norm = lip_norm(space, h);
    if norm > S::one() {
        return Err(replay(format!("{name} has norm {norm}")));
    }
    for p in set {
        let s = slope(space, h, p);
        if s < *gamma {
            return Err(replay(format!(
                "{name} has slope {s} < {gamma} on ({}, {})",
                space.label(p.from()),
                space.label(p.to())
            )));
        }
    }
    Ok(())
}

// ----------------------------------------------------------- 2-Lip-LTP

/// Functions and pair realizing the 2-Lip-LTP for one pair set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoLipLtp<S> {
    pub u: PointIndex,
    pub v: PointIndex,
    pub gamma: Gamma<S>,
    /// Synthesized from `A ∪ {(v, u)}`.
    pub f: LipschitzFunction<S>,
    /// Synthesized from `A ∪ {(u, v)}`.
    pub g: LipschitzFunction<S>,
    pub certificates: Augmentations<S>,
}

impl<S: Scalar> TwoLipLtp<S> {
    pub fn verify(&self, space: &FiniteMetricSpace<S>, set: &PairSet) -> Result<(), D2pError> {
        let gamma = self.gamma.value();
        self.certificates.verify(space, set, &self.gamma, self.u, self.v)?;
        check_unit_ball_slopes(space, set, gamma, &self.f, "f")?;
        check_unit_ball_slopes(space, set, gamma, &self.g, "g")?;
        two_sided_holds(space, &project(set), gamma, &self.f, &self.g, self.u, self.v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoLipLtpOutcome<S> {
    Found {
        witness: TwoLipLtp<S>,
        rejected: Vec<AugmentationFailure<S>>,
    },
    Absent {
        candidates: Vec<AugmentationFailure<S>>,
    },
}

impl<S> TwoLipLtpOutcome<S> {
    pub fn is_found(&self) -> bool {
        matches!(self, TwoLipLtpOutcome::Found { .. })
    }
}

impl<S: Scalar> TwoLipLtpOutcome<S> {
    /// Replays the witness or the full rejection log for `A` and `ε`.
    pub fn verify(&self, space: &FiniteMetricSpace<S>, set: &PairSet, epsilon: &S) -> Result<(), D2pError> {
        let gamma = Gamma::new(S::one() - epsilon.clone())?;
        match self {
            TwoLipLtpOutcome::Found { witness, rejected } => {
                if witness.gamma != gamma {
                    return Err(replay("witness gamma is not 1 - epsilon"));
                }
                witness.verify(space, set)?;
                verify_scan_log(space, set, &gamma, rejected, Some((witness.u, witness.v)))
            }
            TwoLipLtpOutcome::Absent { candidates } => verify_scan_log(space, set, &gamma, candidates, None),
        }
    }
}

/// For a cyclically monotonic `A`, finds the first `(u, v)` such that both
/// `A ∪ {(u, v)}` and `A ∪ {(v, u)}` are `(1-ε)`-cyclically monotonic.
pub fn two_lip_ltp_witness<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    set: &PairSet,
    epsilon: &S,
) -> Result<TwoLipLtpOutcome<S>, D2pError> {
    if !epsilon.is_positive() || *epsilon >= S::one() {
        return Err(D2pError::EpsilonOutOfRange(epsilon.to_string()));
    }
    if !check_gamma_cm(space, set, &Gamma::one()).is_monotone() {
        return Err(D2pError::NotCyclicallyMonotone);
    }
    let gamma = Gamma::new(S::one() - epsilon.clone())?;
    let pairs: Vec<OrderedPair> = space.pairs().collect();
    let (hit, misses) = first_hit(&pairs, |p| augmentations(space, set, &gamma, p.from(), p.to()))?;
    let failures: Vec<AugmentationFailure<S>> = misses.into_iter().map(|(_, m)| m).collect();
    let Some((i, certificates)) = hit else {
        return Ok(TwoLipLtpOutcome::Absent { candidates: failures });
    };
    let (u, v) = (pairs[i].from(), pairs[i].to());
    let (g, f) = certificates.spread(space, set, &gamma, u, v)?;
    let witness = TwoLipLtp {
        u,
        v,
        gamma,
        f,
        g,
        certificates,
    };
    witness.verify(space, set)?;
    Ok(TwoLipLtpOutcome::Found {
        witness,
        rejected: failures,
    })
}

// ---------------------------------------------------------------- LD2P

/// How the functions of an [`Ld2pCertificate`] were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ld2pRoute {
    /// Integer-valued `f = g` from rounding a slope-1 witness; `(u, v)`
    /// satisfies `|f(x)-f(y)| + d(u,v) <= d(x,u) + d(y,v)`.
    IntegerRounding,
    /// `f`, `g` synthesized from the two augmented sets.
    Augmented,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ld2pCertificate<S> {
    pub set: PairSet,
    pub f: LipschitzFunction<S>,
    pub g: LipschitzFunction<S>,
    pub u: PointIndex,
    pub v: PointIndex,
    pub gamma: Gamma<S>,
    pub route: Ld2pRoute,
    pub certificates: Augmentations<S>,
}

impl<S: Scalar> Ld2pCertificate<S> {
    /// Replays every invariant against `mu` without searching.
    pub fn verify(&self, space: &FiniteMetricSpace<S>, mu: &PairMeasure<S>) -> Result<(), D2pError> {
        let gamma = self.gamma.value();
        if self.u == self.v {
            return Err(replay("u = v"));
        }
        let need = gamma.clone() * mu.total_mass();
        let have = mu.mass_of(&self.set);
        if have < need {
            return Err(replay(format!("mu(A) = {have} < {need}")));
        }
        check_unit_ball_slopes(space, &self.set, gamma, &self.f, "f")?;
        check_unit_ball_slopes(space, &self.set, gamma, &self.g, "g")?;
        self.certificates.verify(space, &self.set, &self.gamma, self.u, self.v)?;
        two_sided_holds(space, &project(&self.set), gamma, &self.f, &self.g, self.u, self.v)?;
        if self.route == Ld2pRoute::IntegerRounding {
            if self.f != self.g || !self.f.values().iter().all(|x| x.is_integer()) {
                return Err(replay("rounded route needs one integer-valued function"));
            }
            let points = project(&self.set);
            let duv = space.d(self.u, self.v).clone();
            for &x in &points {
                for &y in &points {
                    let lhs = (self.f.value(x).clone() - self.f.value(y).clone()).abs() + duv.clone();
                    if lhs > space.d(x, self.u).clone() + space.d(y, self.v).clone() {
                        return Err(replay("rounded inequality fails"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Members of the slice far apart across `(u, v)`: the first has slope
    /// at least γ across `(u, v)`, the second across `(v, u)`, and both on `A`.
    pub fn spread(&self, space: &FiniteMetricSpace<S>) -> Result<(LipschitzFunction<S>, LipschitzFunction<S>), D2pError> {
        self.certificates.spread(space, &self.set, &self.gamma, self.u, self.v)
    }
}

/// What was tried for one candidate set before giving up on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetExhaustion<S> {
    pub set: PairSet,
    pub mass: S,
    pub failures: Vec<AugmentationFailure<S>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ld2pOutcome<S> {
    Found(Ld2pCertificate<S>),
    Absent { tried: Vec<SetExhaustion<S>> },
}

impl<S> Ld2pOutcome<S> {
    pub fn certificate(&self) -> Option<&Ld2pCertificate<S>> {
        match self {
            Ld2pOutcome::Found(c) => Some(c),
            Ld2pOutcome::Absent { .. } => None,
        }
    }
}

impl<S: Scalar> Ld2pOutcome<S> {
    /// Replays the certificate, or for an exhaustion: every candidate set
    /// is either listed with a complete rejection log or is not cyclically
    /// monotonic.
    pub fn verify(&self, space: &FiniteMetricSpace<S>, mu: &PairMeasure<S>, gamma: &Gamma<S>) -> Result<(), D2pError> {
        match self {
            Ld2pOutcome::Found(c) => {
                if c.gamma != *gamma {
                    return Err(replay("certificate gamma differs"));
                }
                c.verify(space, mu)
            }
            Ld2pOutcome::Absent { tried } => {
                let mut listed = tried.iter();
                let one = Gamma::one();
                for (set, mass) in candidate_sets(mu, gamma)? {
                    match check_gamma_cm(space, &set, &one) {
                        CmVerdict::Violated(v) => v.verify(space, &set, &one)?,
                        CmVerdict::Monotone(_) => {
                            let entry = listed.next().ok_or_else(|| replay("candidate set missing from log"))?;
                            if entry.set != set || entry.mass != mass {
                                return Err(replay("exhaustion log out of order"));
                            }
                            verify_scan_log(space, &set, gamma, &entry.failures, None)?;
                        }
                    }
                }
                if listed.next().is_some() {
                    return Err(replay("exhaustion log lists extra sets"));
                }
                Ok(())
            }
        }
    }
}

fn check_measure<S: Scalar>(space: &FiniteMetricSpace<S>, mu: &PairMeasure<S>) -> Result<(), D2pError> {
    match is_optimal(space, mu)? {
        OptimalityVerdict::Optimal { norm, .. } if norm.is_one() => Ok(()),
        OptimalityVerdict::Optimal { norm, .. } => Err(D2pError::NotNormalized(norm.to_string())),
        OptimalityVerdict::NotOptimal { .. } => Err(D2pError::NotOptimal),
    }
}

/// Subsets of `supp μ` with `μ(A) >= γ·μ(M̃)`, by decreasing mass and then
/// lexicographic pair order.
pub fn candidate_sets<S: Scalar>(mu: &PairMeasure<S>, gamma: &Gamma<S>) -> Result<Vec<(PairSet, S)>, D2pError> {
    let support: Vec<(OrderedPair, S)> = mu.atoms().map(|(p, w)| (*p, w.clone())).collect();
    let k = support.len();
    if k > MAX_SUPPORT {
        return Err(D2pError::SupportTooLarge(k));
    }
    let need = gamma.value().clone() * mu.total_mass();
    let mut out: Vec<(Vec<OrderedPair>, S)> = (1u32..(1u32 << k))
        .filter_map(|mask| {
            let chosen: Vec<&(OrderedPair, S)> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| &support[i]).collect();
            let mass = chosen.iter().fold(S::zero(), |acc, (_, w)| acc + w.clone());
            (mass >= need).then(|| (chosen.into_iter().map(|(p, _)| *p).collect(), mass))
        })
        .collect();
    out.sort_by(|(a, ma), (b, mb)| mb.cmp(ma).then_with(|| a.cmp(b)));
    Ok(out.into_iter().map(|(ps, m)| (ps.into_iter().collect(), m)).collect())
}

/// On an integer metric: a slope-1 integer function on `set` and a pair
/// `(u, v)` with `|f(x)-f(y)| + d(u,v) <= d(x,u) + d(y,v)` on `π(set)`.
fn integer_route<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    set: &PairSet,
) -> Result<Option<(LipschitzFunction<S>, PointIndex, PointIndex)>, D2pError> {
    let one = Gamma::one();
    let CmVerdict::Monotone(cert) = check_gamma_cm(space, set, &one) else {
        return Ok(None);
    };
    let smooth = synthesize_witness(space, set, &one, &cert)?;
    let f = floor_round(space, &smooth, set)?;
    let points = project(set);
    let spreads = |u: PointIndex, v: PointIndex| {
        let duv = space.d(u, v);
        points.iter().all(|&x| {
            points.iter().all(|&y| {
                (f.value(x).clone() - f.value(y).clone()).abs() + duv.clone()
                    <= space.d(x, u).clone() + space.d(y, v).clone()
            })
        })
    };
    // on the three-hexagon space the pair comes from its case analysis;
    // elsewhere, or if that pair does not spread, scan all pairs
    let found = case_analysis_pair(space, &points, &f)
        .filter(|&(u, v)| spreads(u, v))
        .or_else(|| space.pairs().map(|p| (p.from(), p.to())).find(|&(u, v)| spreads(u, v)));
    Ok(found.map(|(u, v)| (f, u, v)))
}

/// Searches an LD2P certificate for an optimal normalized positive `μ`.
pub fn ld2p_certificate<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    mu: &PairMeasure<S>,
    gamma: &Gamma<S>,
) -> Result<Ld2pOutcome<S>, D2pError> {
    if gamma.is_one() {
        return Err(D2pError::GammaNotBelowOne);
    }
    check_measure(space, mu)?;
    let integer = space.is_integer_metric();
    let mut tried = Vec::new();
    for (set, mass) in candidate_sets(mu, gamma)? {
        if let Some(cert) = certify_set(space, &set, gamma, integer)? {
            let cert = match cert {
                Ok(c) => c,
                Err(failures) => {
                    tried.push(SetExhaustion { set, mass, failures });
                    continue;
                }
            };
            cert.verify(space, mu)?;
            return Ok(Ld2pOutcome::Found(cert));
        }
    }
    Ok(Ld2pOutcome::Absent { tried })
}

/// Integer route first, then the generic scan. The outer `Option` is `None`
/// only when `set` itself is not cyclically monotonic.
#[allow(clippy::type_complexity)]
fn certify_set<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    set: &PairSet,
    gamma: &Gamma<S>,
    integer: bool,
) -> Result<Option<Result<Ld2pCertificate<S>, Vec<AugmentationFailure<S>>>>, D2pError> {
    if !check_gamma_cm(space, set, &Gamma::one()).is_monotone() {
        return Ok(None);
    }
    if integer {
        if let Some((f, u, v)) = integer_route(space, set)? {
            let certificates = match augmentations(space, set, gamma, u, v)? {
                Ok(c) => c,
                Err(_) => return Err(replay("rounded pair fails an augmented check")),
            };
            return Ok(Some(Ok(Ld2pCertificate {
                set: set.clone(),
                g: f.clone(),
                f,
                u,
                v,
                gamma: gamma.clone(),
                route: Ld2pRoute::IntegerRounding,
                certificates,
            })));
        }
    }
    let pairs: Vec<OrderedPair> = space.pairs().collect();
    let (hit, misses) = first_hit(&pairs, |p| augmentations(space, set, gamma, p.from(), p.to()))?;
    let Some((i, certificates)) = hit else {
        return Ok(Some(Err(misses.into_iter().map(|(_, m)| m).collect())));
    };
    let (u, v) = (pairs[i].from(), pairs[i].to());
    let (g, f) = certificates.spread(space, set, gamma, u, v)?;
    Ok(Some(Ok(Ld2pCertificate {
        set: set.clone(),
        f,
        g,
        u,
        v,
        gamma: gamma.clone(),
        route: Ld2pRoute::Augmented,
        certificates,
    })))
}

// ---------------------------------------------------------------- SD2P

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sd2pPart<S> {
    pub set: PairSet,
    /// Synthesized from `Aᵢ ∪ {(v, u)}`.
    pub f: LipschitzFunction<S>,
    /// Synthesized from `Aᵢ ∪ {(u, v)}`.
    pub g: LipschitzFunction<S>,
    pub certificates: Augmentations<S>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sd2pCertificate<S> {
    pub u: PointIndex,
    pub v: PointIndex,
    pub gamma: Gamma<S>,
    pub parts: Vec<Sd2pPart<S>>,
}

impl<S: Scalar> Sd2pCertificate<S> {
    pub fn verify(&self, space: &FiniteMetricSpace<S>, measures: &[PairMeasure<S>]) -> Result<(), D2pError> {
        if measures.len() != self.parts.len() {
            return Err(replay("one part per measure is required"));
        }
        if self.u == self.v {
            return Err(replay("u = v"));
        }
        let gamma = self.gamma.value();
        for (mu, part) in measures.iter().zip(&self.parts) {
            let need = gamma.clone() * mu.total_mass();
            if mu.mass_of(&part.set) < need {
                return Err(replay("a part has too little mass"));
            }
            part.certificates.verify(space, &part.set, &self.gamma, self.u, self.v)?;
            check_unit_ball_slopes(space, &part.set, gamma, &part.f, "f")?;
            check_unit_ball_slopes(space, &part.set, gamma, &part.g, "g")?;
            if slope(space, &part.f, &OrderedPair::new(self.v, self.u).expect("u != v")) < *gamma
                || slope(space, &part.g, &OrderedPair::new(self.u, self.v).expect("u != v")) < *gamma
            {
                return Err(replay("a part lacks slope across the common pair"));
            }
            two_sided_holds(space, &project(&part.set), gamma, &part.f, &part.g, self.u, self.v)?;
        }
        Ok(())
    }

    /// Replays the convex-combination bound: with `h = Σ λᵢ fᵢ` and
    /// `k = Σ λᵢ gᵢ`, each `fᵢ`, `gᵢ` lies in the open slice
    /// `S(Φ*μᵢ, α)`, and `slope(k - h, (u, v)) >= 2γ`. Requires
    /// `γ² >= 1 - α/2`. Returns the slope.
    pub fn verify_convex_combination(
        &self,
        space: &FiniteMetricSpace<S>,
        measures: &[PairMeasure<S>],
        weights: &[S],
        alpha: &S,
    ) -> Result<S, D2pError> {
        self.verify(space, measures)?;
        if weights.len() != self.parts.len()
            || weights.iter().any(|w| w.is_negative())
            || weights.iter().fold(S::zero(), |a, w| a + w.clone()) != S::one()
        {
            return Err(D2pError::BadWeights);
        }
        let gamma = self.gamma.value();
        let two = S::from_i64(2);
        if gamma.clone() * gamma.clone() < S::one() - alpha.clone() / two.clone() {
            return Err(replay(format!("gamma^2 < 1 - alpha/2 for alpha = {alpha}")));
        }
        let level = S::one() - alpha.clone();
        for (mu, part) in measures.iter().zip(&self.parts) {
            for h in [&part.f, &part.g] {
                if crate::functionals::apply(space, mu, h) <= level {
                    return Err(replay("a part function is outside its slice"));
                }
            }
        }
        let h = LipschitzFunction::linear_combination(space, weights.iter().zip(self.parts.iter().map(|p| &p.f)));
        let k = LipschitzFunction::linear_combination(space, weights.iter().zip(self.parts.iter().map(|p| &p.g)));
        let s = slope(space, &k.sub(&h), &OrderedPair::new(self.u, self.v).expect("u != v"));
        if s < two * gamma.clone() {
            return Err(replay(format!("combined slope {s} < 2 gamma")));
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sd2pOutcome<S> {
    Found(Sd2pCertificate<S>),
    /// For each rejected pair, the first measure index without a usable set.
    Absent { rejected: Vec<(OrderedPair, usize)> },
}

impl<S> Sd2pOutcome<S> {
    pub fn certificate(&self) -> Option<&Sd2pCertificate<S>> {
        match self {
            Sd2pOutcome::Found(c) => Some(c),
            Sd2pOutcome::Absent { .. } => None,
        }
    }
}

impl<S: Scalar> Sd2pOutcome<S> {
    /// Replays the certificate, or for an exhaustion: every pair is listed
    /// in scan order and, for the measure it names, each candidate set
    /// fails an augmented check at that pair.
    pub fn verify(
        &self,
        space: &FiniteMetricSpace<S>,
        measures: &[PairMeasure<S>],
        gamma: &Gamma<S>,
    ) -> Result<(), D2pError> {
        match self {
            Sd2pOutcome::Found(c) => {
                if c.gamma != *gamma {
                    return Err(replay("certificate gamma differs"));
                }
                c.verify(space, measures)
            }
            Sd2pOutcome::Absent { rejected } => {
                let listed: Vec<OrderedPair> = rejected.iter().map(|(p, _)| *p).collect();
                if listed != space.pairs().collect::<Vec<_>>() {
                    return Err(replay("rejection log does not cover every pair in order"));
                }
                for (p, i) in rejected {
                    let mu = measures.get(*i).ok_or_else(|| replay("measure index out of range"))?;
                    for (set, _) in candidate_sets(mu, gamma)? {
                        if augmentations(space, &set, gamma, p.from(), p.to())?.is_ok() {
                            return Err(replay("a rejected pair has a usable set"));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// Searches a common `(u, v)` and sets `Aᵢ ⊆ supp μᵢ` with `μᵢ(Aᵢ) >= γ`
/// whose two augmentations are all γ-cyclically monotonic.
pub fn sd2p_certificate<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    measures: &[PairMeasure<S>],
    gamma: &Gamma<S>,
) -> Result<Sd2pOutcome<S>, D2pError> {
    if measures.is_empty() {
        return Err(D2pError::NoMeasures);
    }
    if gamma.is_one() {
        return Err(D2pError::GammaNotBelowOne);
    }
    let mut candidates = Vec::with_capacity(measures.len());
    for mu in measures {
        check_measure(space, mu)?;
        let sets: Vec<PairSet> = candidate_sets(mu, gamma)?.into_iter().map(|(s, _)| s).collect();
        candidates.push(sets);
    }
    let pairs: Vec<OrderedPair> = space.pairs().collect();
    let (hit, misses) = first_hit(&pairs, |p| {
        let (u, v) = (p.from(), p.to());
        let mut chosen = Vec::with_capacity(measures.len());
        for (i, sets) in candidates.iter().enumerate() {
            let mut found = None;
            for set in sets {
                if let Ok(c) = augmentations(space, set, gamma, u, v)? {
                    found = Some((set.clone(), c));
                    break;
                }
            }
            match found {
                Some(x) => chosen.push(x),
                None => return Ok::<_, D2pError>(Err(i)),
            }
        }
        Ok(Ok(chosen))
    })?;
    let Some((i, chosen)) = hit else {
        return Ok(Sd2pOutcome::Absent {
            rejected: misses.into_iter().map(|(k, m)| (pairs[k], m)).collect(),
        });
    };
    let (u, v) = (pairs[i].from(), pairs[i].to());
    let mut parts = Vec::with_capacity(chosen.len());
    for (set, certificates) in chosen {
        let (g, f) = certificates.spread(space, &set, gamma, u, v)?;
        parts.push(Sd2pPart { set, f, g, certificates });
    }
    let cert = Sd2pCertificate {
        u,
        v,
        gamma: gamma.clone(),
        parts,
    };
    cert.verify(space, measures)?;
    Ok(Sd2pOutcome::Found(cert))
}
