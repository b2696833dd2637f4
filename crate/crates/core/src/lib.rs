//! Harmonic subsums `K0` and `K1` over the positive integers whose base-`b`
//! representation contains a two-digit string zero times or exactly once,
//! to any number of certified decimal digits.
//!
//! ```
//! use kempner_core::{k1, PatternSpec};
//!
//! let r = k1(PatternSpec::parse(10, "42").unwrap(), 20).unwrap();
//! assert!(r.to_decimal().starts_with("230.25882132143350840"));
//! ```

pub mod counting;
pub mod digits;
pub mod error;
pub mod exec;
pub mod fixed;
pub mod moments;
pub mod oracle;
pub mod stieltjes;
pub mod summation;

pub use digits::{count_occurrences, leading_value, length, to_digits, DigitVector, PatternSpec};
pub use error::{Error, Result};
pub use fixed::{bits_for_digits, Fixed, Rounding};
pub use moments::{compute_moments, MomentTable};
pub use oracle::{brute_partial, SandwichBound};
pub use stieltjes::SeriesValue;
pub use summation::{k0, k1, k1_statistics, KRequest, KResult, Which};
