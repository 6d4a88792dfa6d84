//! Finitely supported signed measures on the pair space, the functionals
//! they induce on Lipschitz functions, and exact norm computations.
//!
//! A measure `μ` acts on `f` by `∫ f̃ dμ = Σ w · slope(f, p)`. The norm of
//! this functional is a linear program over the unit ball of `Lip₀`, which
//! on a finite space is the polytope `{f : f(p) - f(q) <= d(p, q), f(base) = 0}`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::lipschitz::{lip_norm, slope, LipschitzFunction};
use crate::lpcore::{solve_lp, LinearProgram, LpOutcome};
use crate::metric::{project, FiniteMetricSpace, OrderedPair, PairSet, PointIndex};
use crate::monotone::{
    check_gamma_cm, synthesize_witness, CmCertificate, CmVerdict, CmViolation, Gamma, MonotoneError,
};
use crate::scalar::Scalar;

/// Largest candidate set for the exhaustive subset search.
pub const MAX_SUBSET_SEARCH: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctionalError {
    #[error("atom at pair {0:?} has zero weight")]
    ZeroWeight(OrderedPair),
    #[error("pair {0:?} appears twice")]
    DuplicateAtom(OrderedPair),
    #[error("pair {0:?} has an endpoint outside the space")]
    ForeignPair(OrderedPair),
    #[error("measure must be positive")]
    NotPositive,
    #[error("functional must have norm 1, got {0}")]
    NotNormalized(String),
    #[error("the zero functional cannot be normalized")]
    ZeroFunctional,
    #[error("alpha = {0} is outside (0, 2]")]
    AlphaOutOfRange(String),
    #[error("{0} candidate pairs exceed the subset search limit {MAX_SUBSET_SEARCH}")]
    TooManyCandidates(usize),
    #[error("linear program unexpectedly {0}")]
    Solver(&'static str),
    #[error(transparent)]
    Monotone(#[from] MonotoneError),
    #[error("internal soundness check failed: {0}")]
    Internal(String),
}

/// A signed measure with finitely many nonzero atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairMeasure<S> {
    atoms: BTreeMap<OrderedPair, S>,
}

impl<S: Scalar> PairMeasure<S> {
    pub fn new() -> Self {
        PairMeasure { atoms: BTreeMap::new() }
    }

    /// Builds a measure from explicit atoms; zero weights and repeated
    /// pairs are rejected.
    pub fn from_atoms(atoms: impl IntoIterator<Item = (OrderedPair, S)>) -> Result<Self, FunctionalError> {
        let mut out = BTreeMap::new();
        for (p, w) in atoms {
            if w.is_zero() {
                return Err(FunctionalError::ZeroWeight(p));
            }
            if out.insert(p, w).is_some() {
                return Err(FunctionalError::DuplicateAtom(p));
            }
        }
        Ok(PairMeasure { atoms: out })
    }

    /// Unit atom at `p`, i.e. the molecule of `p`.
    pub fn unit(p: OrderedPair) -> Self {
        PairMeasure {
            atoms: [(p, S::one())].into_iter().collect(),
        }
    }

    /// Adds `w` to the atom at `p`, removing it if the result is zero.
    pub fn add(&mut self, p: OrderedPair, w: S) {
        let entry = self.atoms.entry(p).or_insert_with(S::zero);
        *entry = entry.clone() + w;
        if entry.is_zero() {
            self.atoms.remove(&p);
        }
    }

    pub fn check_space(&self, space: &FiniteMetricSpace<S>) -> Result<(), FunctionalError> {
        match self
            .atoms
            .keys()
            .find(|p| p.from().0 >= space.len() || p.to().0 >= space.len())
        {
            Some(p) => Err(FunctionalError::ForeignPair(*p)),
            None => Ok(()),
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&OrderedPair, &S)> + '_ {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight(&self, p: &OrderedPair) -> S {
        self.atoms.get(p).cloned().unwrap_or_else(S::zero)
    }

    /// `μ(A)`.
    pub fn mass_of(&self, set: &PairSet) -> S {
        set.iter().fold(S::zero(), |acc, p| acc + self.weight(p))
    }

    /// `μ(M̃)`.
    pub fn total_mass(&self) -> S {
        self.atoms.values().fold(S::zero(), |acc, w| acc + w.clone())
    }

    /// `|μ|(M̃)`, the norm of the measure.
    pub fn total_variation(&self) -> S {
        self.atoms.values().fold(S::zero(), |acc, w| acc + w.abs())
    }

    pub fn is_positive(&self) -> bool {
        self.atoms.values().all(|w| w.is_positive())
    }

    /// Support in pair order.
    pub fn support(&self) -> PairSet {
        self.atoms.keys().copied().collect()
    }

    pub fn positive_part(&self) -> Self {
        PairMeasure {
            atoms: self.atoms.iter().filter(|(_, w)| w.is_positive()).map(|(p, w)| (*p, w.clone())).collect(),
        }
    }

    /// `μ⁻`, as a positive measure.
    pub fn negative_part(&self) -> Self {
        PairMeasure {
            atoms: self.atoms.iter().filter(|(_, w)| w.is_negative()).map(|(p, w)| (*p, -w.clone())).collect(),
        }
    }

    pub fn scaled(&self, factor: &S) -> Self {
        if factor.is_zero() {
            return Self::new();
        }
        PairMeasure {
            atoms: self.atoms.iter().map(|(p, w)| (*p, w.clone() * factor.clone())).collect(),
        }
    }
}

/// `∫ f̃ dμ`.
pub fn apply<S: Scalar>(space: &FiniteMetricSpace<S>, mu: &PairMeasure<S>, f: &LipschitzFunction<S>) -> S {
    mu.atoms()
        .fold(S::zero(), |acc, (p, w)| acc + w.clone() * slope(space, f, p))
}

/// Moves every negative atom at `(x, y)` to a positive atom at `(y, x)`.
/// The induced functional and the total variation are unchanged.
pub fn positivize<S: Scalar>(nu: &PairMeasure<S>) -> PairMeasure<S> {
    let mut out = PairMeasure::new();
    for (p, w) in nu.atoms() {
        if w.is_negative() {
            out.add(p.reflect(), -w.clone());
        } else {
            out.add(*p, w.clone());
        }
    }
    out
}

/// The unit ball of `Lip₀` over a finite space as a system of linear
/// inequalities in the values at non-base points.
///
/// Only constraints `|f(p) - f(q)| <= d(p, q)` on pairs without an exact
/// intermediate point (`d(p, r) + d(r, q) = d(p, q)`) are kept; the others
/// follow by adding constraints along a chain.
#[derive(Clone, Debug)]
pub struct UnitBall<S> {
    variable: Vec<Option<usize>>,
    program: LinearProgram<S>,
}

impl<S: Scalar> UnitBall<S> {
    pub fn new(space: &FiniteMetricSpace<S>) -> Self {
        let base = space.base();
        let mut variable = Vec::with_capacity(space.len());
        let mut next = 0;
        for p in space.points() {
            if p == base {
                variable.push(None);
            } else {
                variable.push(Some(next));
                next += 1;
            }
        }
        let mut program = LinearProgram::maximize(vec![S::zero(); next]);
        for p in space.points() {
            for q in space.points().filter(|q| q.0 > p.0) {
                let dpq = space.d(p, q);
                let implied = space
                    .points()
                    .any(|r| r != p && r != q && space.d(p, r).clone() + space.d(r, q).clone() == *dpq);
                if implied {
                    continue;
                }
                for (a, b) in [(p, q), (q, p)] {
                    let mut terms = Vec::with_capacity(2);
                    if let Some(i) = variable[a.0] {
                        terms.push((i, S::one()));
                    }
                    if let Some(j) = variable[b.0] {
                        terms.push((j, -S::one()));
                    }
                    program.add_sparse(&terms, dpq.clone()).expect("indices in range");
                }
            }
        }
        UnitBall { variable, program }
    }

    pub fn num_vars(&self) -> usize {
        self.program.num_vars()
    }

    /// Index of the LP variable holding `f(p)`; `None` for the base.
    pub fn variable(&self, p: PointIndex) -> Option<usize> {
        self.variable[p.0]
    }

    /// The unit-ball constraints with a zero objective.
    pub fn program(&self) -> &LinearProgram<S> {
        &self.program
    }

    /// Objective row of `f ↦ ∫ f̃ dμ`.
    pub fn measure_row(&self, space: &FiniteMetricSpace<S>, mu: &PairMeasure<S>) -> Vec<S> {
        let mut row = vec![S::zero(); self.num_vars()];
        for (p, w) in mu.atoms() {
            let c = w.clone() / space.pair_distance(p).clone();
            if let Some(i) = self.variable(p.from()) {
                row[i] = row[i].clone() + c.clone();
            }
            if let Some(j) = self.variable(p.to()) {
                row[j] = row[j].clone() - c;
            }
        }
        row
    }

    /// Objective row of `f ↦ slope(f, p)`.
    pub fn slope_row(&self, space: &FiniteMetricSpace<S>, p: &OrderedPair) -> Vec<S> {
        self.measure_row(space, &PairMeasure::unit(*p))
    }

    /// The unit ball intersected with the closed slice `∫ f̃ dμ >= level`.
    pub fn slice(&self, space: &FiniteMetricSpace<S>, mu: &PairMeasure<S>, level: &S) -> LinearProgram<S> {
        let mut lp = self.program.clone();
        let row = self.measure_row(space, mu).into_iter().map(|c| -c).collect();
        lp.add_constraint(row, -level.clone()).expect("row length matches");
        lp
    }

    /// The function whose non-base values are `point`.
    pub fn function(&self, space: &FiniteMetricSpace<S>, point: &[S]) -> LipschitzFunction<S> {
        let values = space
            .points()
            .map(|p| match self.variable(p) {
                Some(i) => point[i].clone(),
                None => S::zero(),
            })
            .collect();
        LipschitzFunction::new(space, values).expect("base value is zero")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualNormResult<S> {
    pub norm: S,
    pub maximizer: LipschitzFunction<S>,
}

/// `‖Φ*μ‖`, with a unit-ball function attaining it.
pub fn dual_norm<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    mu: &PairMeasure<S>,
) -> Result<DualNormResult<S>, FunctionalError> {
    dual_norm_with(space, &UnitBall::new(space), mu)
}

/// [`dual_norm`] reusing a prebuilt unit ball of `space`.
pub fn dual_norm_with<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    ball: &UnitBall<S>,
    mu: &PairMeasure<S>,
) -> Result<DualNormResult<S>, FunctionalError> {
    mu.check_space(space)?;
    let lp = ball
        .program()
        .with_objective(ball.measure_row(space, mu))
        .expect("row length matches");
    let (norm, point) = optimum(&lp)?;
    let maximizer = ball.function(space, &point);
    if lip_norm(space, &maximizer) > S::one() || apply(space, mu, &maximizer) != norm {
        return Err(FunctionalError::Internal("dual norm maximizer does not replay".into()));
    }
    Ok(DualNormResult { norm, maximizer })
}

fn optimum<S: Scalar>(lp: &LinearProgram<S>) -> Result<(S, Vec<S>), FunctionalError> {
    match solve_lp(lp) {
        LpOutcome::Optimal { value, point } => Ok((value, point)),
        LpOutcome::Infeasible => Err(FunctionalError::Solver("infeasible")),
        LpOutcome::Unbounded => Err(FunctionalError::Solver("unbounded")),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OptimalityVerdict<S> {
    /// The support is cyclically monotonic and `‖Φ*μ‖ = ‖μ‖`.
    Optimal {
        certificate: CmCertificate<S>,
        norm: S,
    },
    /// The support contains a violating cycle and `‖Φ*μ‖ < ‖μ‖` by `gap`.
    NotOptimal {
        violation: CmViolation<S>,
        norm: S,
        gap: S,
    },
}

impl<S> OptimalityVerdict<S> {
    pub fn is_optimal(&self) -> bool {
        matches!(self, OptimalityVerdict::Optimal { .. })
    }
}

/// Decides whether a positive `μ` is optimal, i.e. `‖Φ*μ‖ = ‖μ‖`.
///
/// For finite support this happens exactly when the support is cyclically
/// monotonic. Both the cycle test and the norm LP are run; disagreement is
/// reported as an internal error.
pub fn is_optimal<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    mu: &PairMeasure<S>,
) -> Result<OptimalityVerdict<S>, FunctionalError> {
    is_optimal_with(space, &UnitBall::new(space), mu)
}

pub fn is_optimal_with<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    ball: &UnitBall<S>,
    mu: &PairMeasure<S>,
) -> Result<OptimalityVerdict<S>, FunctionalError> {
    if !mu.is_positive() {
        return Err(FunctionalError::NotPositive);
    }
    let support = mu.support();
    let one = Gamma::one();
    let verdict = check_gamma_cm(space, &support, &one);
    verdict.verify(space, &support, &one)?;
    let norm = dual_norm_with(space, ball, mu)?.norm;
    let mass = mu.total_variation();
    match verdict {
        CmVerdict::Monotone(certificate) => {
            if norm != mass {
                return Err(FunctionalError::Internal(format!(
                    "cyclically monotonic support but norm {norm} < mass {mass}"
                )));
            }
            Ok(OptimalityVerdict::Optimal { certificate, norm })
        }
        CmVerdict::Violated(violation) => {
            let gap = mass - norm.clone();
            if !gap.is_positive() {
                return Err(FunctionalError::Internal(
                    "support has a violating cycle but the norm is attained".into(),
                ));
            }
            Ok(OptimalityVerdict::NotOptimal { violation, norm, gap })
        }
    }
}

/// Outcome of the signed norm-attainment search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttestationResult<S> {
    /// `set` is γ-CM with `ν⁺(set) + ν⁻(𝔯(set)) = score >= γ·|ν|(M̃)`;
    /// `witness` has slope at least γ on `set`.
    Attained {
        set: PairSet,
        score: S,
        witness: LipschitzFunction<S>,
    },
    /// No subset of the candidate pairs qualifies.
    Exhausted {
        candidates: PairSet,
        /// Subsets whose score met the threshold (all were not γ-CM).
        examined: usize,
        threshold: S,
    },
}

impl<S> AttestationResult<S> {
    pub fn is_attained(&self) -> bool {
        matches!(self, AttestationResult::Attained { .. })
    }
}

/// Searches subsets `A` of `supp ν⁺ ∪ 𝔯(supp ν⁻)` for a γ-CM set with
/// `ν⁺(A) + ν⁻(𝔯(A)) >= γ·|ν|(M̃)`, highest score first.
pub fn check_norm_attainment_signed<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    nu: &PairMeasure<S>,
    gamma: &Gamma<S>,
) -> Result<AttestationResult<S>, FunctionalError> {
    nu.check_space(space)?;
    let plus = nu.positive_part();
    let minus = nu.negative_part();
    let mut candidates = plus.support();
    for p in &minus.support() {
        candidates.insert(p.reflect());
    }
    let k = candidates.len();
    if k > MAX_SUBSET_SEARCH {
        return Err(FunctionalError::TooManyCandidates(k));
    }
    let gains: Vec<S> = candidates
        .iter()
        .map(|p| plus.weight(p) + minus.weight(&p.reflect()))
        .collect();
    let threshold = gamma.value().clone() * nu.total_variation();

    let mut scored: Vec<(S, u32)> = (0u32..(1u32 << k))
        .filter_map(|mask| {
            let score = (0..k)
                .filter(|i| mask & (1 << i) != 0)
                .fold(S::zero(), |acc, i| acc + gains[i].clone());
            (score >= threshold).then_some((score, mask))
        })
        .collect();
    scored.sort_by(|(a, ma), (b, mb)| b.cmp(a).then(ma.cmp(mb)));

    let examined = scored.len();
    for (score, mask) in scored {
        let set: PairSet = (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| candidates.as_slice()[i])
            .collect();
        if let CmVerdict::Monotone(cert) = check_gamma_cm(space, &set, gamma) {
            let witness = synthesize_witness(space, &set, gamma, &cert)?;
            return Ok(AttestationResult::Attained { set, score, witness });
        }
    }
    Ok(AttestationResult::Exhausted {
        candidates,
        examined,
        threshold,
    })
}

/// Supremal diameter of a slice and a pair of slice members realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceDiameter<S> {
    /// `sup ‖f - g‖` over the slice (attained on its closure).
    pub diameter: S,
    /// The pair `(u, v)` across which `f - g` has slope `diameter`.
    pub pair: Option<OrderedPair>,
    pub f: LipschitzFunction<S>,
    pub g: LipschitzFunction<S>,
    /// Factor the measure was multiplied by before slicing (1 unless auto-normalized).
    pub scale: S,
    /// Number of pairs `(u, v)` whose two programs were solved.
    pub pairs_examined: usize,
}

/// Supremal diameter of `S(Φ*μ, α) = {f ∈ B : ∫ f̃ dμ > 1 - α}`.
///
/// `‖f - g‖` is the largest slope of `f - g`, so the diameter is the maximum
/// over `(u, v)` of the largest slope across `(u, v)` plus the largest slope
/// across `(v, u)`, each a linear program over the closed slice. Pairs are
/// tried farthest from the support first and the scan stops once the
/// trivial bound 2 is reached. With `normalize` the measure is first scaled
/// by the reciprocal of its norm; otherwise the norm must already be 1.
pub fn slice_diameter<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    mu: &PairMeasure<S>,
    alpha: &S,
    normalize: bool,
) -> Result<SliceDiameter<S>, FunctionalError> {
    let two = S::from_i64(2);
    if !alpha.is_positive() || *alpha > two {
        return Err(FunctionalError::AlphaOutOfRange(alpha.to_string()));
    }
    let ball = UnitBall::new(space);
    let norm = dual_norm_with(space, &ball, mu)?.norm;
    let scale = if norm.is_one() {
        S::one()
    } else if !normalize {
        return Err(FunctionalError::NotNormalized(norm.to_string()));
    } else if norm.is_zero() {
        return Err(FunctionalError::ZeroFunctional);
    } else {
        S::one() / norm
    };
    let mu = mu.scaled(&scale);
    let level = S::one() - alpha.clone();
    let slice = ball.slice(space, &mu, &level);

    let near = project(&mu.support());
    let reach = |p: PointIndex| -> S {
        near.iter()
            .map(|q| space.d(p, *q).clone())
            .min()
            .unwrap_or_else(S::zero)
    };
    let mut order: Vec<(S, OrderedPair)> = space
        .pairs()
        .filter(|p| p.from() < p.to())
        .map(|p| (reach(p.from()) + reach(p.to()) + space.pair_distance(&p).clone(), p))
        .collect();
    order.sort_by(|(a, p), (b, q)| b.cmp(a).then(p.cmp(q)));

    let best_across = |p: &OrderedPair| -> Result<(S, Vec<S>), FunctionalError> {
        let lp = slice.with_objective(ball.slope_row(space, p)).expect("row length matches");
        optimum(&lp)
    };
    let solve_pair = |p: &OrderedPair| -> Result<(S, LipschitzFunction<S>, LipschitzFunction<S>), FunctionalError> {
        let (up, fp) = best_across(p)?;
        let (down, gp) = best_across(&p.reflect())?;
        Ok((up + down, ball.function(space, &fp), ball.function(space, &gp)))
    };

    let chunk = rayon::current_num_threads().max(1);
    let mut best: Option<(S, OrderedPair, LipschitzFunction<S>, LipschitzFunction<S>)> = None;
    let mut examined = 0;
    'scan: for block in order.chunks(chunk) {
        let results: Vec<_> = block.par_iter().map(|(_, p)| solve_pair(p)).collect();
        for ((_, p), r) in block.iter().zip(results) {
            let (value, f, g) = r?;
            examined += 1;
            if best.as_ref().is_none_or(|(b, ..)| value > *b) {
                best = Some((value, *p, f, g));
            }
            if best.as_ref().is_some_and(|(b, ..)| *b >= two) {
                break 'scan;
            }
        }
    }

    let (diameter, pair, f, g) = match best {
        Some((value, p, f, g)) => {
            // (f, g) maximize across p; keep the orientation with f above g
            (value, Some(p), f, g)
        }
        None => {
            let (_, point) = optimum(&slice)?;
            let f = ball.function(space, &point);
            (S::zero(), None, f.clone(), f)
        }
    };
    // replay
    for h in [&f, &g] {
        if lip_norm(space, h) > S::one() || apply(space, &mu, h) < level {
            return Err(FunctionalError::Internal("slice member does not replay".into()));
        }
    }
    if let Some(p) = pair {
        if slope(space, &f.sub(&g), &p) != diameter || lip_norm(space, &f.sub(&g)) != diameter {
            return Err(FunctionalError::Internal("slice diameter does not replay".into()));
        }
    }
    Ok(SliceDiameter {
        diameter,
        pair,
        f,
        g,
        scale,
        pairs_examined: examined,
    })
}
