//! Dill maps on one-sided configurations, deletion-only edit distances, and
//! finite-budget estimators for the sliding Hamming (Weyl) and sliding
//! Levenshtein pseudo-metrics.

pub mod classify;
pub mod dillmaps;
pub mod distances;
pub mod proptests;
pub mod pseudometrics;
pub mod reproduce;
pub mod scalar;
pub mod words;

pub use num_rational::Ratio;

/// Exact rational used for all reported values.
pub type Rational = Ratio<i64>;

/// Sliding estimate with an exact rational value.
pub type ExactEstimate = pseudometrics::SlidingEstimate<Rational>;

/// Sliding estimate rounded to `f64`.
pub type FloatEstimate = pseudometrics::SlidingEstimate<f64>;
