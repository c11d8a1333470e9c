//! Scalar types for normalized estimates.
//!
//! Distances themselves are always exact integers or half-integers. Only the
//! final division by a window length goes through [`Scalar`], so callers pick
//! between exact rationals and floats without touching the combinatorics.

use std::fmt::Debug;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// Numeric type an estimate can be expressed in.
pub trait Scalar: Num + PartialOrd + Clone + Debug + Send + Sync + 'static {
    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: u64, den: u64) -> Self;

    fn from_count(n: u64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn approx_f64(&self) -> f64;

    /// Lossless for rational scalars; floats round.
    fn exact(&self) -> bool;
}

impl Scalar for f64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn approx_f64(&self) -> f64 {
        *self
    }
    fn exact(&self) -> bool {
        false
    }
}

impl Scalar for f32 {
    fn from_ratio(num: u64, den: u64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn approx_f64(&self) -> f64 {
        *self as f64
    }
    fn exact(&self) -> bool {
        false
    }
}

macro_rules! impl_ratio_scalar {
    ($int:ty) => {
        impl Scalar for Ratio<$int> {
            fn from_ratio(num: u64, den: u64) -> Self {
                Ratio::new(num as $int, den as $int)
            }
            fn approx_f64(&self) -> f64 {
                self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
            }
            fn exact(&self) -> bool {
                true
            }
        }
    };
}

impl_ratio_scalar!(i64);
impl_ratio_scalar!(i128);

/// Renders a rational as `num/den`, or just `num` when the denominator is 1.
pub fn ratio_text<T: Clone + Integer + std::fmt::Display>(r: &Ratio<T>) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Reduces `num/den` and returns the pair.
pub fn reduced(num: u64, den: u64) -> (u64, u64) {
    let g = num.gcd(&den).max(1);
    (num / g, den / g)
}
