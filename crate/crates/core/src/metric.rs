//! Finite pointed metric spaces and the space of ordered pairs of distinct points.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Label of a point, unique within its space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(String);

impl PointId {
    pub fn new(label: impl Into<String>) -> Self {
        PointId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PointId {
    fn from(s: &str) -> Self {
        PointId(s.to_owned())
    }
}

/// Position of a point in its space's declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointIndex(pub usize);

/// An element `(from, to)` of the pair space, with `from != to`.
///
/// Pairs order lexicographically by the declaration order of their endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedPair {
    from: PointIndex,
    to: PointIndex,
}

impl OrderedPair {
    pub fn new(from: PointIndex, to: PointIndex) -> Result<Self, MetricError> {
        if from == to {
            return Err(MetricError::DegeneratePair(from.0));
        }
        Ok(OrderedPair { from, to })
    }

    pub fn from(&self) -> PointIndex {
        self.from
    }

    pub fn to(&self) -> PointIndex {
        self.to
    }

    /// `(x, y) -> (y, x)`.
    pub fn reflect(&self) -> OrderedPair {
        OrderedPair {
            from: self.to,
            to: self.from,
        }
    }
}

/// A finite set of ordered pairs. Iteration follows insertion order, which
/// is also the pair indexing used by certificates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairSet {
    pairs: Vec<OrderedPair>,
}

impl PairSet {
    pub fn new() -> Self {
        PairSet::default()
    }

    /// Builds a set from a list that must not contain duplicates.
    pub fn from_pairs(pairs: Vec<OrderedPair>) -> Result<Self, MetricError> {
        let mut set = PairSet::new();
        for p in pairs {
            if !set.insert(p) {
                return Err(MetricError::DuplicatePair(p.from.0, p.to.0));
            }
        }
        Ok(set)
    }

    /// Returns false if the pair was already present.
    pub fn insert(&mut self, pair: OrderedPair) -> bool {
        if self.contains(&pair) {
            return false;
        }
        self.pairs.push(pair);
        true
    }

    pub fn contains(&self, pair: &OrderedPair) -> bool {
        self.pairs.contains(pair)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &OrderedPair> + '_ {
        self.pairs.iter()
    }

    pub fn as_slice(&self) -> &[OrderedPair] {
        &self.pairs
    }

    pub fn get(&self, i: usize) -> Option<&OrderedPair> {
        self.pairs.get(i)
    }

    /// `self ∪ {pair}`, keeping the existing order and appending `pair` last.
    pub fn with(&self, pair: OrderedPair) -> PairSet {
        let mut out = self.clone();
        out.insert(pair);
        out
    }

    pub fn reflect(&self) -> PairSet {
        reflect_set(self)
    }

    pub fn project(&self) -> BTreeSet<PointIndex> {
        project(self)
    }
}

impl FromIterator<OrderedPair> for PairSet {
    /// Collects, silently dropping duplicates.
    fn from_iter<I: IntoIterator<Item = OrderedPair>>(iter: I) -> Self {
        let mut set = PairSet::new();
        for p in iter {
            set.insert(p);
        }
        set
    }
}

impl<'a> IntoIterator for &'a PairSet {
    type Item = &'a OrderedPair;
    type IntoIter = std::slice::Iter<'a, OrderedPair>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

pub fn reflect(p: OrderedPair) -> OrderedPair {
    p.reflect()
}

pub fn reflect_set(set: &PairSet) -> PairSet {
    set.iter().map(OrderedPair::reflect).collect()
}

/// Union of the endpoints of all pairs.
pub fn project(set: &PairSet) -> BTreeSet<PointIndex> {
    set.iter().flat_map(|p| [p.from, p.to]).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("distance matrix has {rows} rows but the space declares {points} points")]
    RowCount { rows: usize, points: usize },
    #[error("row {row} of the distance matrix has length {len}, expected {points}")]
    RowLength { row: usize, len: usize, points: usize },
    #[error("base point `{0}` is not a point of the space")]
    UnknownBase(String),
    #[error("unknown point label `{0}`")]
    UnknownPoint(String),
    #[error("point label `{0}` is declared twice")]
    DuplicateLabel(String),
    #[error("a metric space needs at least one point")]
    Empty,
    #[error("pair ({0}, {0}) has equal endpoints")]
    DegeneratePair(usize),
    #[error("pair ({0}, {1}) listed twice")]
    DuplicatePair(usize, usize),
    #[error("example space needs at least one level")]
    NoLevels,
    #[error("not a metric: {0}")]
    NotAMetric(String),
}

/// The first metric axiom found violated, by point label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricViolation<S> {
    NonzeroDiagonal { point: PointId, value: S },
    Asymmetric { p: PointId, q: PointId, forward: S, backward: S },
    NonPositive { p: PointId, q: PointId, value: S },
    Triangle { p: PointId, q: PointId, r: PointId, direct: S, via: S },
}

impl<S: Scalar> fmt::Display for MetricViolation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricViolation::NonzeroDiagonal { point, value } => {
                write!(f, "d({point}, {point}) = {value} is not 0")
            }
            MetricViolation::Asymmetric { p, q, forward, backward } => {
                write!(f, "d({p}, {q}) = {forward} but d({q}, {p}) = {backward}")
            }
            MetricViolation::NonPositive { p, q, value } => {
                write!(f, "d({p}, {q}) = {value} is not positive for distinct points")
            }
            MetricViolation::Triangle { p, q, r, direct, via } => write!(
                f,
                "triangle inequality fails on ({p}, {q}, {r}): d({p}, {r}) = {direct} > {via} = d({p}, {q}) + d({q}, {r})"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationReport<S> {
    Valid,
    Violation(MetricViolation<S>),
}

impl<S> ValidationReport<S> {
    pub fn is_valid(&self) -> bool {
        matches!(self, ValidationReport::Valid)
    }
}

/// A finite pointed metric space with exact distances.
///
/// Construction only checks the shape of the data; [`validate_metric`] checks
/// the metric axioms. Operations elsewhere in the crate assume a validated
/// space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetricSpace<S> {
    labels: Vec<PointId>,
    index: HashMap<PointId, usize>,
    base: usize,
    dist: Vec<Vec<S>>,
}

impl<S: Scalar> FiniteMetricSpace<S> {
    pub fn new(labels: Vec<PointId>, base: &str, dist: Vec<Vec<S>>) -> Result<Self, MetricError> {
        let n = labels.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        if dist.len() != n {
            return Err(MetricError::RowCount { rows: dist.len(), points: n });
        }
        for (row, r) in dist.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::RowLength { row, len: r.len(), points: n });
            }
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(MetricError::DuplicateLabel(l.to_string()));
            }
        }
        let base = *index
            .get(&PointId::new(base))
            .ok_or_else(|| MetricError::UnknownBase(base.to_owned()))?;
        Ok(FiniteMetricSpace { labels, index, base, dist })
    }

    /// [`FiniteMetricSpace::new`] followed by [`validate_metric`].
    pub fn new_validated(
        labels: Vec<PointId>,
        base: &str,
        dist: Vec<Vec<S>>,
    ) -> Result<Self, MetricError> {
        let space = Self::new(labels, base, dist)?;
        match validate_metric(&space) {
            ValidationReport::Valid => Ok(space),
            ValidationReport::Violation(v) => Err(MetricError::NotAMetric(v.to_string())),
        }
    }

    /// Builds the matrix from a distance function on indices.
    pub fn from_fn(
        labels: Vec<PointId>,
        base: &str,
        d: impl Fn(usize, usize) -> S,
    ) -> Result<Self, MetricError> {
        let n = labels.len();
        let dist = (0..n).map(|i| (0..n).map(|j| d(i, j)).collect()).collect();
        Self::new(labels, base, dist)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn base(&self) -> PointIndex {
        PointIndex(self.base)
    }

    pub fn labels(&self) -> &[PointId] {
        &self.labels
    }

    pub fn label(&self, p: PointIndex) -> &PointId {
        &self.labels[p.0]
    }

    pub fn index_of(&self, label: &str) -> Result<PointIndex, MetricError> {
        self.index
            .get(&PointId::new(label))
            .map(|&i| PointIndex(i))
            .ok_or_else(|| MetricError::UnknownPoint(label.to_owned()))
    }

    pub fn d(&self, p: PointIndex, q: PointIndex) -> &S {
        &self.dist[p.0][q.0]
    }

    pub fn pair_distance(&self, p: &OrderedPair) -> &S {
        self.d(p.from(), p.to())
    }

    pub fn distances(&self) -> &[Vec<S>] {
        &self.dist
    }

    pub fn points(&self) -> impl Iterator<Item = PointIndex> + Clone {
        (0..self.len()).map(PointIndex)
    }

    /// All `n(n-1)` ordered pairs, lexicographic in declaration order.
    pub fn pairs(&self) -> impl Iterator<Item = OrderedPair> + '_ {
        self.points().flat_map(move |p| {
            self.points()
                .filter(move |&q| q != p)
                .map(move |q| OrderedPair { from: p, to: q })
        })
    }

    /// Pair between two labelled points.
    pub fn pair(&self, from: &str, to: &str) -> Result<OrderedPair, MetricError> {
        OrderedPair::new(self.index_of(from)?, self.index_of(to)?)
    }

    /// True if every distance is an integer.
    pub fn is_integer_metric(&self) -> bool {
        self.dist.iter().flatten().all(|d| d.is_integer())
    }

    pub fn max_distance(&self) -> S {
        self.dist.iter().flatten().cloned().max().unwrap_or_else(S::zero)
    }
}

/// Checks every axiom exhaustively (O(n³)) and reports the first violation.
///
/// Order of checks: diagonal, symmetry, positivity, then the triangle
/// inequality over triples in declaration order.
pub fn validate_metric<S: Scalar>(space: &FiniteMetricSpace<S>) -> ValidationReport<S> {
    let n = space.len();
    let d = &space.dist;
    let lab = |i: usize| space.labels[i].clone();
    for i in 0..n {
        if !d[i][i].is_zero() {
            return ValidationReport::Violation(MetricViolation::NonzeroDiagonal {
                point: lab(i),
                value: d[i][i].clone(),
            });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if d[i][j] != d[j][i] {
                return ValidationReport::Violation(MetricViolation::Asymmetric {
                    p: lab(i),
                    q: lab(j),
                    forward: d[i][j].clone(),
                    backward: d[j][i].clone(),
                });
            }
            if !d[i][j].is_positive() {
                return ValidationReport::Violation(MetricViolation::NonPositive {
                    p: lab(i),
                    q: lab(j),
                    value: d[i][j].clone(),
                });
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                let via = d[p][q].clone() + d[q][r].clone();
                if d[p][r] > via {
                    return ValidationReport::Violation(MetricViolation::Triangle {
                        p: lab(p),
                        q: lab(q),
                        r: lab(r),
                        direct: d[p][r].clone(),
                        via,
                    });
                }
            }
        }
    }
    ValidationReport::Valid
}

/// Points `0, 1, ..., n-1` on the real line with base `0`.
pub fn line<S: Scalar>(n: usize) -> Result<FiniteMetricSpace<S>, MetricError> {
    let labels = (0..n).map(|i| PointId::new(i.to_string())).collect();
    FiniteMetricSpace::from_fn(labels, "0", |i, j| S::from_i64((i as i64 - j as i64).abs()))
}

/// Label of the point `u_i^j`, `i` in `1..=3`, `j >= 1`.
pub fn example52_u(i: usize, j: usize) -> String {
    format!("u{i}^{j}")
}

pub fn example52_v(i: usize, j: usize) -> String {
    format!("v{i}^{j}")
}

/// Truncation of the three-hexagon space with `levels` copies of each
/// `u_i^j, v_i^j` path.
///
/// Points are declared as `x1, x2, x3, y1, y2, y3`, then per level `j`
/// the points `u1^j, v1^j, u2^j, v2^j, u3^j, v3^j`. Distance-1 links:
/// `y1-x2, y2-x3, y3-x1` and `x_i-u_i^j-v_i^j-y_i`; every other pair of
/// distinct points is at distance 2. The base point is `x1`.
pub fn build_example52<S: Scalar>(levels: usize) -> Result<FiniteMetricSpace<S>, MetricError> {
    if levels == 0 {
        return Err(MetricError::NoLevels);
    }
    let mut labels: Vec<String> = Vec::with_capacity(6 + 6 * levels);
    labels.extend((1..=3).map(|i| format!("x{i}")));
    labels.extend((1..=3).map(|i| format!("y{i}")));
    for j in 1..=levels {
        for i in 1..=3 {
            labels.push(example52_u(i, j));
            labels.push(example52_v(i, j));
        }
    }
    let pos: HashMap<&str, usize> = labels.iter().enumerate().map(|(k, l)| (l.as_str(), k)).collect();
    let mut edges: Vec<(usize, usize)> = vec![
        (pos["y1"], pos["x2"]),
        (pos["y2"], pos["x3"]),
        (pos["y3"], pos["x1"]),
    ];
    for i in 1..=3 {
        for j in 1..=levels {
            let (x, y) = (pos[format!("x{i}").as_str()], pos[format!("y{i}").as_str()]);
            let u = pos[example52_u(i, j).as_str()];
            let v = pos[example52_v(i, j).as_str()];
            edges.extend([(x, u), (u, v), (v, y)]);
        }
    }
    let n = labels.len();
    let mut adjacent = vec![vec![false; n]; n];
    for (a, b) in edges {
        adjacent[a][b] = true;
        adjacent[b][a] = true;
    }
    let labels = labels.into_iter().map(PointId::new).collect();
    FiniteMetricSpace::from_fn(labels, "x1", |a, b| {
        if a == b {
            S::zero()
        } else if adjacent[a][b] {
            S::one()
        } else {
            S::from_i64(2)
        }
    })
}
