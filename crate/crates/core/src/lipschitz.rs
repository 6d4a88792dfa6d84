//! Real functions on a pointed metric space: Lipschitz norm, difference
//! quotients, McShane extensions and integer rounding.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::metric::{FiniteMetricSpace, OrderedPair, PairSet, PointId, PointIndex};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LipschitzError {
    #[error("function has {got} values but the space has {expected} points")]
    LengthMismatch { got: usize, expected: usize },
    #[error("function value at the base point `{0}` is not zero")]
    NonzeroAtBase(PointId),
    #[error("partial function has an empty domain")]
    EmptyDomain,
    #[error("partial function is not 1-Lipschitz on ({0}, {1})")]
    NotOneLipschitz(PointId, PointId),
    #[error("the metric has non-integer distances")]
    NonIntegerMetric,
    #[error("function has Lipschitz norm {0} > 1")]
    NormAboveOne(String),
    #[error("slope on ({0}, {1}) is {2}, expected 1")]
    SlopeNotOne(PointId, PointId, String),
}

/// A function vanishing at the base point, stored per point in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LipschitzFunction<S> {
    values: Vec<S>,
}

impl<S: Scalar> LipschitzFunction<S> {
    pub fn new(space: &FiniteMetricSpace<S>, values: Vec<S>) -> Result<Self, LipschitzError> {
        if values.len() != space.len() {
            return Err(LipschitzError::LengthMismatch {
                got: values.len(),
                expected: space.len(),
            });
        }
        if !values[space.base().0].is_zero() {
            return Err(LipschitzError::NonzeroAtBase(space.label(space.base()).clone()));
        }
        Ok(LipschitzFunction { values })
    }

    pub fn zero(space: &FiniteMetricSpace<S>) -> Self {
        LipschitzFunction {
            values: vec![S::zero(); space.len()],
        }
    }

    /// Evaluates `value` on every point and subtracts the value at the base.
    pub fn from_fn_normalized(space: &FiniteMetricSpace<S>, value: impl Fn(PointIndex) -> S) -> Self {
        let raw: Vec<S> = space.points().map(value).collect();
        let at_base = raw[space.base().0].clone();
        LipschitzFunction {
            values: raw.into_iter().map(|v| v - at_base.clone()).collect(),
        }
    }

    pub fn value(&self, p: PointIndex) -> &S {
        &self.values[p.0]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn sub(&self, other: &Self) -> Self {
        LipschitzFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    /// `Σ weight_k · f_k`; all functions must live on the same space.
    pub fn linear_combination<'a>(
        space: &FiniteMetricSpace<S>,
        terms: impl IntoIterator<Item = (&'a S, &'a Self)>,
    ) -> Self {
        let mut values = vec![S::zero(); space.len()];
        for (w, f) in terms {
            for (acc, v) in values.iter_mut().zip(&f.values) {
                *acc = acc.clone() + w.clone() * v.clone();
            }
        }
        LipschitzFunction { values }
    }
}

/// Difference quotient `(f(from) - f(to)) / d(from, to)`; equals `f` applied to
/// the molecule of the pair.
pub fn slope<S: Scalar>(space: &FiniteMetricSpace<S>, f: &LipschitzFunction<S>, p: &OrderedPair) -> S {
    (f.value(p.from()).clone() - f.value(p.to()).clone()) / space.pair_distance(p).clone()
}

/// Maximum of `|f(x) - f(y)| / d(x, y)` over unordered pairs; 0 on a one-point space.
pub fn lip_norm<S: Scalar>(space: &FiniteMetricSpace<S>, f: &LipschitzFunction<S>) -> S {
    let mut best = S::zero();
    for p in space.points() {
        for q in space.points().filter(|q| q.0 > p.0) {
            let s = ((f.value(p).clone() - f.value(q).clone()) / space.d(p, q).clone()).abs();
            if s > best {
                best = s;
            }
        }
    }
    best
}

/// A function known on a nonempty subset of the points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFunction<S> {
    values: BTreeMap<PointIndex, S>,
}

impl<S: Scalar> PartialFunction<S> {
    pub fn new(values: BTreeMap<PointIndex, S>) -> Result<Self, LipschitzError> {
        if values.is_empty() {
            return Err(LipschitzError::EmptyDomain);
        }
        Ok(PartialFunction { values })
    }

    /// Restriction of `f` to `domain`.
    pub fn restrict(
        f: &LipschitzFunction<S>,
        domain: impl IntoIterator<Item = PointIndex>,
    ) -> Result<Self, LipschitzError> {
        Self::new(domain.into_iter().map(|p| (p, f.value(p).clone())).collect())
    }

    pub fn get(&self, p: PointIndex) -> Option<&S> {
        self.values.get(&p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (PointIndex, &S)> + '_ {
        self.values.iter().map(|(p, v)| (*p, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn insert(&mut self, p: PointIndex, value: S) {
        self.values.insert(p, value);
    }
}

/// Result of an extension: the base-normalized function and the constant
/// that was added to the raw extension to make it vanish at the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension<S> {
    pub function: LipschitzFunction<S>,
    pub shift: S,
}

pub fn check_one_lipschitz<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    partial: &PartialFunction<S>,
) -> Result<(), LipschitzError> {
    for (p, fp) in partial.iter() {
        for (q, fq) in partial.iter() {
            if p < q && (fp.clone() - fq.clone()).abs() > *space.d(p, q) {
                return Err(LipschitzError::NotOneLipschitz(
                    space.label(p).clone(),
                    space.label(q).clone(),
                ));
            }
        }
    }
    Ok(())
}

fn normalize<S: Scalar>(space: &FiniteMetricSpace<S>, raw: Vec<S>) -> Extension<S> {
    let shift = -raw[space.base().0].clone();
    let values = raw.into_iter().map(|v| v + shift.clone()).collect();
    Extension {
        function: LipschitzFunction { values },
        shift,
    }
}

/// Smallest 1-Lipschitz extension: `g(y) = max_{x ∈ D} (partial(x) - d(x, y))`.
pub fn mcshane_sup_extension<S: Scalar>(
    partial: &PartialFunction<S>,
    space: &FiniteMetricSpace<S>,
) -> Result<Extension<S>, LipschitzError> {
    check_one_lipschitz(space, partial)?;
    let raw = space
        .points()
        .map(|y| match partial.get(y) {
            Some(v) => v.clone(),
            None => partial
                .iter()
                .map(|(x, fx)| fx.clone() - space.d(x, y).clone())
                .max()
                .expect("nonempty domain"),
        })
        .collect();
    Ok(normalize(space, raw))
}

/// Largest 1-Lipschitz extension: `g(y) = min_{x ∈ D} (partial(x) + d(x, y))`.
pub fn mcshane_inf_extension<S: Scalar>(
    partial: &PartialFunction<S>,
    space: &FiniteMetricSpace<S>,
) -> Result<Extension<S>, LipschitzError> {
    check_one_lipschitz(space, partial)?;
    let raw = space
        .points()
        .map(|y| match partial.get(y) {
            Some(v) => v.clone(),
            None => partial
                .iter()
                .map(|(x, fx)| fx.clone() + space.d(x, y).clone())
                .min()
                .expect("nonempty domain"),
        })
        .collect();
    Ok(normalize(space, raw))
}

/// Integer rounding of a 1-Lipschitz function with slope 1 on `pairs`.
///
/// Requires an integer metric. Returns `x ↦ ⌊g(x)⌋ - ⌊g(base)⌋`, which is
/// integer valued, still 1-Lipschitz, and still has slope exactly 1 on `pairs`.
pub fn floor_round<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    g: &LipschitzFunction<S>,
    pairs: &PairSet,
) -> Result<LipschitzFunction<S>, LipschitzError> {
    if !space.is_integer_metric() {
        return Err(LipschitzError::NonIntegerMetric);
    }
    let norm = lip_norm(space, g);
    if norm > S::one() {
        return Err(LipschitzError::NormAboveOne(norm.to_string()));
    }
    for p in pairs {
        let s = slope(space, g, p);
        if !s.is_one() {
            return Err(LipschitzError::SlopeNotOne(
                space.label(p.from()).clone(),
                space.label(p.to()).clone(),
                s.to_string(),
            ));
        }
    }
    Ok(LipschitzFunction::from_fn_normalized(space, |p| g.value(p).floor()))
}
