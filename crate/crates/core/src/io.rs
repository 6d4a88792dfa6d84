//! JSON file formats and named builtin spaces.
//!
//! Every number is a string holding an integer or a fraction `"p/q"`, so
//! values round-trip exactly. Points are always referred to by label.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::functionals::{FunctionalError, PairMeasure};
use crate::lipschitz::{LipschitzError, LipschitzFunction};
use crate::metric::{build_example52, line, FiniteMetricSpace, MetricError, OrderedPair, PairSet, PointId, PointIndex};
use crate::scalar::{parse_scalar, Scalar};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("`{0}` is not a rational number")]
    Number(String),
    #[error("unknown builtin `{0}` (expected example52:J or line:n)")]
    Builtin(String),
    #[error("function has no value for point `{0}`")]
    MissingValue(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Lipschitz(#[from] LipschitzError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub fn parse_number<S: Scalar>(text: &str) -> Result<S, IoError> {
    parse_scalar(text).ok_or_else(|| IoError::Number(text.to_owned()))
}

/// Canonical text of a scalar: `"p"` for integers, `"p/q"` otherwise.
pub fn format_number<S: Scalar>(value: &S) -> String {
    value.to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricFile {
    pub points: Vec<String>,
    pub base: String,
    pub distances: Vec<Vec<String>>,
}

impl MetricFile {
    /// Builds the space, checking shape and labels; the metric axioms are
    /// checked separately by `validate_metric`.
    pub fn to_space<S: Scalar>(&self) -> Result<FiniteMetricSpace<S>, IoError> {
        let dist = self
            .distances
            .iter()
            .map(|row| row.iter().map(|e| parse_number(e)).collect::<Result<Vec<S>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let labels = self.points.iter().map(|l| PointId::new(l.clone())).collect();
        Ok(FiniteMetricSpace::new(labels, &self.base, dist)?)
    }

    pub fn from_space<S: Scalar>(space: &FiniteMetricSpace<S>) -> Self {
        MetricFile {
            points: space.labels().iter().map(|l| l.as_str().to_owned()).collect(),
            base: space.label(space.base()).as_str().to_owned(),
            distances: space
                .distances()
                .iter()
                .map(|row| row.iter().map(format_number).collect())
                .collect(),
        }
    }
}

/// `example52:J` or `line:n`.
pub fn builtin_space<S: Scalar>(spec: &str) -> Result<FiniteMetricSpace<S>, IoError> {
    let bad = || IoError::Builtin(spec.to_owned());
    let (name, arg) = spec.split_once(':').ok_or_else(bad)?;
    let n: usize = arg.trim().parse().map_err(|_| bad())?;
    match name.trim() {
        "example52" => Ok(build_example52(n)?),
        "line" if n > 0 => Ok(line(n)?),
        _ => Err(bad()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub values: BTreeMap<String, String>,
}

impl FunctionFile {
    pub fn to_function<S: Scalar>(&self, space: &FiniteMetricSpace<S>) -> Result<LipschitzFunction<S>, IoError> {
        for label in self.values.keys() {
            space.index_of(label)?;
        }
        let values = space
            .labels()
            .iter()
            .map(|l| {
                let text = self
                    .values
                    .get(l.as_str())
                    .ok_or_else(|| IoError::MissingValue(l.as_str().to_owned()))?;
                parse_number(text)
            })
            .collect::<Result<Vec<S>, _>>()?;
        Ok(LipschitzFunction::new(space, values)?)
    }

    pub fn from_function<S: Scalar>(space: &FiniteMetricSpace<S>, f: &LipschitzFunction<S>) -> Self {
        FunctionFile {
            values: space
                .points()
                .map(|p| (space.label(p).as_str().to_owned(), format_number(f.value(p))))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairsFile {
    pub pairs: Vec<[String; 2]>,
}

impl PairsFile {
    pub fn to_pairs<S: Scalar>(&self, space: &FiniteMetricSpace<S>) -> Result<PairSet, IoError> {
        let pairs = self
            .pairs
            .iter()
            .map(|[a, b]| space.pair(a, b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PairSet::from_pairs(pairs)?)
    }

    pub fn from_pairs<S: Scalar>(space: &FiniteMetricSpace<S>, pairs: &PairSet) -> Self {
        PairsFile {
            pairs: pairs.iter().map(|p| pair_labels(space, p)).collect(),
        }
    }
}

pub fn pair_labels<S: Scalar>(space: &FiniteMetricSpace<S>, p: &OrderedPair) -> [String; 2] {
    [
        space.label(p.from()).as_str().to_owned(),
        space.label(p.to()).as_str().to_owned(),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub from: String,
    pub to: String,
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub atoms: Vec<Atom>,
}

impl MeasureFile {
    pub fn to_measure<S: Scalar>(&self, space: &FiniteMetricSpace<S>) -> Result<PairMeasure<S>, IoError> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok((space.pair(&a.from, &a.to)?, parse_number(&a.weight)?)))
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(PairMeasure::from_atoms(atoms)?)
    }

    pub fn from_measure<S: Scalar>(space: &FiniteMetricSpace<S>, mu: &PairMeasure<S>) -> Self {
        MeasureFile {
            atoms: mu
                .atoms()
                .map(|(p, w)| {
                    let [from, to] = pair_labels(space, p);
                    Atom {
                        from,
                        to,
                        weight: format_number(w),
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointsFile {
    pub points: Vec<String>,
}

impl PointsFile {
    pub fn to_points<S: Scalar>(&self, space: &FiniteMetricSpace<S>) -> Result<BTreeSet<PointIndex>, IoError> {
        Ok(self.points.iter().map(|l| space.index_of(l)).collect::<Result<_, _>>()?)
    }
}
