//! Independent checks: brute-force partial sums with rigorous enclosures,
//! enumeration counts, and closed-form series known for base 2.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::counting::tail_mass;
use crate::digits::{count_windows, PatternSpec};
use crate::error::{Error, Result};
use crate::exec;
use crate::fixed::{Fixed, Rounding};
use crate::stieltjes::SeriesValue;

/// Largest `b^N` enumerated by default.
pub const ENUMERATION_LIMIT: u64 = 1 << 34;

/// Above this precision the partial sum runs on big integers.
const NATIVE_BITS: u32 = 120;

const CHUNK: u64 = 1 << 16;

/// Brute-force partial sum over lengths `<= max_len` plus the exact tail
/// mass, giving `lower < K < upper`.
#[derive(Clone, Debug)]
pub struct SandwichBound {
    pub pattern: PatternSpec,
    pub occurrences: u32,
    pub max_len: u32,
    /// `S_N` rounded down; the true partial sum is within
    /// `terms_counted` ulps above it.
    pub partial_sum: Fixed,
    /// `r_N = sum_{l > N} count_l b^-l`.
    pub tail_mass: BigRational,
    /// `S_N + r_N`, rounded down.
    pub lower: Fixed,
    /// `S_N + b r_N`, rounded up.
    pub upper: Fixed,
    pub terms_counted: u64,
    /// Admissible integers seen per length, index 0 included.
    pub counts_per_length: Vec<u64>,
}

impl SandwichBound {
    pub fn contains(&self, x: &Fixed) -> bool {
        &self.lower < x && x < &self.upper
    }

    /// `S_N + b ln(b) r_N / (b - 1)`: a point estimate that assumes the
    /// omitted reciprocals average like `1/x` over each length band. Not a
    /// bound.
    pub fn heuristic_estimate(&self) -> f64 {
        let b = self.pattern.base() as f64;
        let r = self.tail_mass.to_f64().unwrap_or(f64::NAN);
        self.partial_sum.to_f64() + b * b.ln() * r / (b - 1.0)
    }
}

fn check_occurrences(occurrences: u32) -> Result<()> {
    if occurrences > 1 {
        Err(Error::Occurrences(occurrences))
    } else {
        Ok(())
    }
}

/// `[b^0, b^1, ..., b^len]`, refusing anything past `ENUMERATION_LIMIT`.
fn length_bounds(base: u32, len: u32) -> Result<Vec<u64>> {
    let infeasible = Error::Infeasible { base, len };
    let mut out = vec![1u64];
    for _ in 0..len {
        let next = out
            .last()
            .and_then(|x| x.checked_mul(base as u64))
            .filter(|&x| x <= ENUMERATION_LIMIT)
            .ok_or(infeasible.clone())?;
        out.push(next);
    }
    Ok(out)
}

/// Number of integers of each length `0..=l_max` whose representation
/// holds the pattern exactly `occurrences` times.
pub fn count_by_enumeration(p: &PatternSpec, occurrences: u32, l_max: u32) -> Result<Vec<u64>> {
    check_occurrences(occurrences)?;
    let powers = length_bounds(p.base(), l_max)?;
    let mut counts = vec![0u64];
    for l in 1..=l_max as usize {
        let c = exec::fold_range(
            powers[l - 1],
            powers[l],
            CHUNK,
            || 0u64,
            |acc, n| acc + u64::from(count_windows(n, p) == occurrences),
            |a, b| a + b,
        );
        counts.push(c);
    }
    Ok(counts)
}

/// Sum of `floor(2^bits / n)` over admissible `n` in `lo..hi`, with the count.
fn floor_sum(p: &PatternSpec, occurrences: u32, lo: u64, hi: u64, bits: u32) -> (BigInt, u64) {
    if bits <= NATIVE_BITS {
        let one = 1u128 << bits;
        let (sum, count) = exec::fold_range(
            lo,
            hi,
            CHUNK,
            || (0u128, 0u64),
            |(s, c), n| {
                if count_windows(n, p) == occurrences {
                    (s + one / n as u128, c + 1)
                } else {
                    (s, c)
                }
            },
            |a, b| (a.0 + b.0, a.1 + b.1),
        );
        (BigInt::from(sum), count)
    } else {
        let one = BigInt::one() << bits;
        exec::fold_range(
            lo,
            hi,
            CHUNK,
            || (BigInt::zero(), 0u64),
            |(s, c), n| {
                if count_windows(n, p) == occurrences {
                    (s + &one / BigInt::from(n), c + 1)
                } else {
                    (s, c)
                }
            },
            |a, b| (a.0 + b.0, a.1 + b.1),
        )
    }
}

/// Enumerates every admissible integer below `b^max_len` and encloses
/// `K0` or `K1` using the exact tail mass.
pub fn brute_partial(p: &PatternSpec, occurrences: u32, max_len: u32, bits: u32) -> Result<SandwichBound> {
    check_occurrences(occurrences)?;
    let powers = length_bounds(p.base(), max_len)?;
    let mut raw = BigInt::zero();
    let mut counts = vec![0u64];
    for l in 1..=max_len as usize {
        let (s, c) = floor_sum(p, occurrences, powers[l - 1], powers[l], bits);
        raw += s;
        counts.push(c);
    }
    let terms_counted: u64 = counts.iter().sum();
    let tail = tail_mass(p, occurrences, max_len as usize)?;
    let partial_sum = Fixed::from_raw(raw, bits);
    let lower = &partial_sum + &Fixed::from_rational(&tail, bits, Rounding::Floor);
    let b_tail = &tail * BigRational::from_integer(BigInt::from(p.base()));
    let upper = &(&partial_sum + &Fixed::from_raw(BigInt::from(terms_counted), bits))
        + &Fixed::from_rational(&b_tail, bits, Rounding::Ceil);
    Ok(SandwichBound {
        pattern: *p,
        occurrences,
        max_len,
        partial_sum,
        tail_mass: tail,
        lower,
        upper,
        terms_counted,
        counts_per_length: counts,
    })
}

/// Sums `1/den` for each denominator, rounding each term to nearest.
fn reciprocal_sum(dens: impl Iterator<Item = BigInt>, bits: u32) -> (Fixed, f64) {
    let one = BigInt::one() << bits;
    let mut acc = BigInt::zero();
    let mut count = 0u64;
    for d in dens {
        acc += crate::fixed::div_round(&one, &d, Rounding::Nearest);
        count += 1;
    }
    (Fixed::from_raw(acc, bits), 0.5 * count as f64)
}

/// `K1` for base 2 and pattern `10` or `01` from the double series over
/// `1^a 0^c 1^d`-shaped integers, through bit length `max_len`.
///
/// `10`: `sum_{n>=2} sum_{0<=j1<j2<n} 1/(2^n - 2^j2 + 2^j1 - 1)`;
/// `01`: twice the same sum over `n >= 3`, `0 < j1 < j2 < n`.
pub fn direct_series_b2(pattern: &str, max_len: u32, bits: u32) -> Result<SeriesValue> {
    let (factor, first_n, first_j1) = match pattern {
        "10" => (1u32, 2u32, 0u32),
        "01" => (2, 3, 1),
        _ => return Err(Error::InvalidPattern(pattern.into())),
    };
    if max_len < 4 {
        return Err(Error::WrongCase("at least four bit lengths"));
    }
    let dens = (first_n..=max_len).flat_map(|n| {
        (first_j1..n).flat_map(move |j1| {
            (j1 + 1..n).map(move |j2| {
                let one = BigInt::one();
                (&one << n) - (&one << j2) + (&one << j1) - 1
            })
        })
    });
    let (value, ulps) = reciprocal_sum(dens, bits);
    let value = value.mul_int(&BigInt::from(factor));
    // Each length-k term is at most 2^(1-k) and there are at most
    // C(k,2) of them; the ratio of consecutive bounds is (k+1)/(2(k-1)).
    let k = max_len as u64 + 1;
    let first = BigRational::new(BigInt::from(factor as u64 * k * (k - 1)), BigInt::one() << (k - 1));
    let ratio = BigRational::new(BigInt::from(k + 1), BigInt::from(2 * (k - 1)));
    let tail = first / (BigRational::one() - ratio);
    Ok(SeriesValue {
        value,
        trunc_bound: Fixed::from_rational(&tail, bits, Rounding::Ceil),
        rounding_ulps: ulps * factor as f64,
        terms_used: max_len as usize,
    })
}

/// `sum_{n=1}^{terms} 1/(2^n - 1)`; the rest is below `2^(1-terms)`.
pub fn erdos_borwein_direct(terms: u32, bits: u32) -> SeriesValue {
    let dens = (1..=terms).map(|n| (BigInt::one() << n) - 1);
    let (value, ulps) = reciprocal_sum(dens, bits);
    SeriesValue {
        value,
        trunc_bound: Fixed::from_ratio(&BigInt::from(2), &(BigInt::one() << terms), bits, Rounding::Ceil),
        rounding_ulps: ulps,
        terms_used: terms as usize,
    }
}

/// The same constant as `sum_n 2^(-n^2) (1 + 2^-n)/(1 - 2^-n)`, whose
/// terms fall off like `2^(-n^2)`.
pub fn erdos_borwein_clausen(terms: u32, bits: u32) -> SeriesValue {
    assert!(terms >= 1);
    let one = BigInt::one() << bits;
    let mut acc = BigInt::zero();
    for n in 1..=terms {
        // 2^(-n^2) (2^n + 1) / (2^n - 1)
        let num = &one * ((BigInt::one() << n) + 1);
        let den = ((BigInt::one() << n) - 1) << (n * n);
        acc += crate::fixed::div_round(&num, &den, Rounding::Nearest);
    }
    // Omitted terms are each at most 3 * 2^(-n^2) and shrink by 2^-(2n+1).
    let next = terms + 1;
    let tail = Fixed::from_ratio(
        &BigInt::from(6),
        &(BigInt::one() << (next * next)),
        bits,
        Rounding::Ceil,
    );
    SeriesValue {
        value: Fixed::from_raw(acc, bits),
        trunc_bound: tail,
        rounding_ulps: 0.5 * terms as f64,
        terms_used: terms as usize,
    }
}
