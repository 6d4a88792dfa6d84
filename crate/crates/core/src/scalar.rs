//! Exact ordered-field scalars.
//!
//! Every algorithm in this crate compares values with `==` and `<` and
//! relies on those comparisons being exact, so the scalar bound is an
//! ordered field with floor. Binary floats do not qualify; the bound is
//! implemented for `num_rational::Ratio<T>` over any signed integer type.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed};

/// An exact ordered field with floor, usable as the value type of
/// distances, function values and measure weights.
pub trait Scalar:
    Clone + Ord + Debug + Display + FromStr + Num + Signed + Send + Sync + 'static
{
    fn from_i64(value: i64) -> Self;

    /// Largest integer not exceeding `self` (rounds toward negative infinity).
    fn floor(&self) -> Self;

    fn is_integer(&self) -> bool;

    /// `numerator / denominator`; panics on a zero denominator.
    fn ratio(numerator: i64, denominator: i64) -> Self {
        Self::from_i64(numerator) / Self::from_i64(denominator)
    }

    /// Fractional part `self - floor(self)`, in `[0, 1)`.
    fn fractional_part(&self) -> Self {
        self.clone() - self.floor()
    }

    fn min_of(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    fn max_of(self, other: Self) -> Self {
        std::cmp::max(self, other)
    }
}

impl<T> Scalar for Ratio<T>
where
    T: Clone + Integer + Signed + Debug + Display + FromStr + From<i64> + Send + Sync + 'static,
{
    fn from_i64(value: i64) -> Self {
        Ratio::from_integer(T::from(value))
    }

    fn floor(&self) -> Self {
        Ratio::floor(self)
    }

    fn is_integer(&self) -> bool {
        Ratio::is_integer(self)
    }
}

/// Parses `"p"` or `"p/q"`; surrounding whitespace is ignored.
pub fn parse_scalar<S: Scalar>(text: &str) -> Option<S> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        if den.contains('/') {
            return None;
        }
        let num: S = num.trim().parse().ok()?;
        let den: S = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(num / den)
    } else {
        text.parse().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Rational64};

    #[test]
    fn floor_rounds_toward_negative_infinity() {
        let r = Rational::ratio(-1, 2);
        assert_eq!(r.floor(), Rational::from_i64(-1));
        assert_eq!(Rational::ratio(5, 2).floor(), Rational::from_i64(2));
        assert_eq!(Rational::ratio(-1, 2).fractional_part(), Rational::ratio(1, 2));
    }

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_scalar::<Rational>("3"), Some(Rational::from_i64(3)));
        assert_eq!(parse_scalar::<Rational>(" -6/4 "), Some(Rational::ratio(-3, 2)));
        assert_eq!(parse_scalar::<Rational64>("7/14"), Some(Rational64::ratio(1, 2)));
        assert_eq!(parse_scalar::<Rational>("1/0"), None);
        assert_eq!(parse_scalar::<Rational>("x"), None);
    }

    #[test]
    fn display_is_reduced_fraction() {
        assert_eq!(Rational::ratio(65, 28).to_string(), "65/28");
        assert_eq!(Rational::ratio(4, 2).to_string(), "2");
    }
}
