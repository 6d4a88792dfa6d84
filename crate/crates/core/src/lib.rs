//! Exact certificates for Lipschitz function spaces over finite pointed
//! metric spaces.
//!
//! The crate decides γ-cyclic monotonicity of finite pair sets, computes
//! norms of the functionals induced by finitely supported measures on the
//! pair space, and searches certificates for local and strong diameter-two
//! properties. Every positive or negative answer carries data that replays
//! exactly: potentials, violating cycles, witness functions, exhaustion
//! logs. All arithmetic is exact; see [`Scalar`].

pub mod d2p;
pub mod example52;
pub mod functionals;
pub mod io;
pub mod lipschitz;
pub mod lpcore;
pub mod metric;
pub mod monotone;
pub mod random;
pub mod scalar;

pub use functionals::{apply, dual_norm, is_optimal, positivize, slice_diameter, PairMeasure};
pub use lipschitz::{lip_norm, slope, LipschitzFunction, PartialFunction};
pub use metric::{build_example52, FiniteMetricSpace, OrderedPair, PairSet, PointId, PointIndex};
pub use monotone::{check_gamma_cm, CmCertificate, CmVerdict, CmViolation, Gamma};
pub use scalar::Scalar;

/// Arbitrary-precision rationals; the default scalar.
pub type Rational = num_rational::BigRational;

/// Rationals over `i64`; faster, but may overflow on long computations.
pub type Rational64 = num_rational::Rational64;
