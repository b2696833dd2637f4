use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),

    #[error("digit {digit} is out of range for base {base}")]
    DigitOutOfRange { digit: u32, base: u32 },

    #[error("pattern {0:?} is not a two-digit string in the given base")]
    InvalidPattern(String),

    #[error("the integer 0 has no digit windows")]
    ZeroNotAllowed,

    #[error("prefix length {requested} is outside 1..={available}")]
    PrefixOutOfRange { requested: u32, available: u32 },

    #[error("series needs moment {needed} but the table stops at {available}")]
    NotEnoughMoments { needed: usize, available: usize },

    #[error("moment {sequence}_{index} is not positive and strictly decreasing at {bits} bits")]
    MomentPrecision { sequence: char, index: usize, bits: u32 },

    #[error("operation requires {0}")]
    WrongCase(&'static str),

    #[error("enumeration of {base}^{len} integers exceeds the feasibility guard")]
    Infeasible { base: u32, len: u32 },

    #[error("occurrence count must be 0 or 1, got {0}")]
    Occurrences(u32),

    #[error("target precision must be at least one digit")]
    ZeroDigits,

    #[error("could not reach {digits} digits within {attempts} planning attempts")]
    PlanExhausted { digits: u32, attempts: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
