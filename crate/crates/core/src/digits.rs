//! Base-`b` digit strings, integer lengths and two-digit window counts.

use std::fmt;

use crate::error::{Error, Result};

const ALPHABET: &[u8; 36] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// A base together with the two-digit string `alpha beta` being counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PatternSpec {
    base: u32,
    alpha: u32,
    beta: u32,
}

impl PatternSpec {
    pub fn new(base: u32, alpha: u32, beta: u32) -> Result<Self> {
        check_base(base)?;
        for digit in [alpha, beta] {
            if digit >= base {
                return Err(Error::DigitOutOfRange { digit, base });
            }
        }
        Ok(Self { base, alpha, beta })
    }

    /// Parses a pattern written in the base's own alphabet (`0-9A-Z`,
    /// case-insensitive), so `"42"` always means the digits 4 then 2.
    pub fn parse(base: u32, pattern: &str) -> Result<Self> {
        check_base(base)?;
        let digits: Vec<u32> = pattern
            .chars()
            .map(|c| c.to_digit(36).ok_or_else(|| Error::InvalidPattern(pattern.into())))
            .collect::<Result<_>>()?;
        match digits.as_slice() {
            &[a, b] => Self::new(base, a, b),
            _ => Err(Error::InvalidPattern(pattern.into())),
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    /// True when both digits of the pattern coincide.
    pub fn same(&self) -> bool {
        self.alpha == self.beta
    }

    /// The pattern as a two-digit integer `alpha*b + beta`.
    pub fn value(&self) -> u64 {
        self.alpha as u64 * self.base as u64 + self.beta as u64
    }

    /// Every pattern of a base, in lexicographic order.
    pub fn all(base: u32) -> Result<Vec<Self>> {
        check_base(base)?;
        Ok((0..base)
            .flat_map(|a| {
                (0..base).map(move |b| Self {
                    base,
                    alpha: a,
                    beta: b,
                })
            })
            .collect())
    }

    /// Counts occurrences of the pattern in a digit sequence, overlapping
    /// windows included.
    pub fn count_in(&self, digits: &[u32]) -> u32 {
        digits
            .windows(2)
            .filter(|w| w[0] == self.alpha && w[1] == self.beta)
            .count() as u32
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.base <= 36 {
            write!(
                f,
                "{}{}",
                ALPHABET[self.alpha as usize] as char, ALPHABET[self.beta as usize] as char
            )
        } else {
            write!(f, "({},{})", self.alpha, self.beta)
        }
    }
}

fn check_base(base: u32) -> Result<()> {
    if base < 2 {
        Err(Error::InvalidBase(base))
    } else {
        Ok(())
    }
}

/// Digits most significant first. The empty vector is the none-string,
/// which represents zero with length zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DigitVector {
    digits: Vec<u32>,
}

impl DigitVector {
    pub fn new(digits: Vec<u32>, base: u32) -> Result<Self> {
        check_base(base)?;
        if let Some(&digit) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::DigitOutOfRange { digit, base });
        }
        Ok(Self { digits })
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn leading_digit(&self) -> Option<u32> {
        self.digits.first().copied()
    }

    /// `n(X)`: the integer the digits spell, leading zeros allowed.
    pub fn value(&self, base: u32) -> u128 {
        self.digits.iter().fold(0u128, |acc, &d| acc * base as u128 + d as u128)
    }

    pub fn concat(&self, other: &DigitVector) -> DigitVector {
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&other.digits);
        DigitVector { digits }
    }
}

/// The minimal-length representation of `n`; empty for zero.
pub fn to_digits(n: u64, base: u32) -> Result<DigitVector> {
    check_base(base)?;
    let mut digits = Vec::new();
    let mut rest = n;
    while rest > 0 {
        digits.push((rest % base as u64) as u32);
        rest /= base as u64;
    }
    digits.reverse();
    Ok(DigitVector { digits })
}

/// Smallest `l` with `n < b^l`; `length(0) == 0`.
pub fn length(n: u64, base: u32) -> Result<u32> {
    check_base(base)?;
    let mut l = 0;
    let mut rest = n;
    while rest > 0 {
        rest /= base as u64;
        l += 1;
    }
    Ok(l)
}

/// Number of positions where the pattern occurs in the canonical
/// representation of `n`.
pub fn count_occurrences(n: u64, pattern: &PatternSpec) -> Result<u32> {
    if n == 0 {
        return Err(Error::ZeroNotAllowed);
    }
    Ok(count_windows(n, pattern))
}

/// Window scan over `n`'s digits, least significant first. `n > 0`.
#[inline]
pub(crate) fn count_windows(n: u64, pattern: &PatternSpec) -> u32 {
    let b = pattern.base as u64;
    let (alpha, beta) = (pattern.alpha as u64, pattern.beta as u64);
    let mut count = 0;
    let mut low = n % b;
    let mut rest = n / b;
    while rest > 0 {
        let high = rest % b;
        if high == alpha && low == beta {
            count += 1;
        }
        low = high;
        rest /= b;
    }
    count
}

/// The integer formed by the first `l` digits of `m`.
pub fn leading_value(m: u64, l: u32, base: u32) -> Result<u64> {
    let len = length(m, base)?;
    if l == 0 || l > len {
        return Err(Error::PrefixOutOfRange {
            requested: l,
            available: len,
        });
    }
    Ok(m / (base as u64).pow(len - l))
}

/// Integer whose base-`b` digits are `digits` (most significant first).
pub fn from_digits(digits: &[u32], base: u32) -> u64 {
    digits.iter().fold(0u64, |acc, &d| acc * base as u64 + d as u64)
}
