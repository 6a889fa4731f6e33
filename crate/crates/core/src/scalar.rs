//! Numeric value types a set function may return.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Exact rational values backed by 64-bit integers.
pub type Rational = Ratio<i64>;

/// Scalar field for function values, marginal gains and densities.
///
/// Implemented for `f32`, `f64` and [`Rational`]. Floating types carry a
/// small absolute tolerance for inequality checks; the rational type
/// compares exactly.
pub trait Scalar:
    Num + Signed + PartialOrd + Copy + Send + Sync + Debug + Display + FromPrimitive + ToPrimitive + Sum + 'static
{
    /// Absolute slack allowed when checking `lhs <= rhs` style inequalities.
    fn tolerance() -> Self;

    /// Slack under which two marginal densities count as tied.
    fn tie_slack() -> Self;

    /// Whether arithmetic is exact (no rounding).
    fn is_exact() -> bool {
        false
    }

    fn from_cost(c: u64) -> Self {
        Self::from_u64(c).expect("cost representable in scalar type")
    }

    /// `num / den` for small integer literals. Generators use this so the
    /// values they emit are exact in every scalar type.
    fn ratio(num: i64, den: i64) -> Self {
        let n = Self::from_i64(num).expect("numerator representable");
        let d = Self::from_i64(den).expect("denominator representable");
        n / d
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }

    fn tie_slack() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-4
    }

    fn tie_slack() -> Self {
        1e-6
    }
}

impl Scalar for Rational {
    fn is_exact() -> bool {
        true
    }

    fn tolerance() -> Self {
        Ratio::from_integer(0)
    }

    fn tie_slack() -> Self {
        Ratio::from_integer(0)
    }
}
