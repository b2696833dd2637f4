//! Binary fixed-point reals over `BigInt`.
//!
//! A [`Fixed`] stores `raw * 2^-bits`. Every operation that can lose
//! information takes an explicit [`Rounding`], so callers can count the
//! rounding sites and turn them into rigorous error bounds (one unit in the
//! last place, `2^-bits`, per `Floor`/`Ceil` site and half a unit per
//! `Nearest` site).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Floor,
    Ceil,
    Nearest,
}

/// Rounded quotient `num / den` for `den != 0`.
pub fn div_round(num: &BigInt, den: &BigInt, mode: Rounding) -> BigInt {
    let (num, den) = if den.is_negative() {
        (-num, -den)
    } else {
        (num.clone(), den.clone())
    };
    match mode {
        Rounding::Floor => num.div_floor(&den),
        Rounding::Ceil => -((-num).div_floor(&den)),
        Rounding::Nearest => (num * 2u32 + &den).div_floor(&(den * 2u32)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed {
    raw: BigInt,
    bits: u32,
}

impl Fixed {
    pub fn zero(bits: u32) -> Self {
        Self {
            raw: BigInt::zero(),
            bits,
        }
    }

    pub fn from_raw(raw: BigInt, bits: u32) -> Self {
        Self { raw, bits }
    }

    /// The smallest positive value, `2^-bits`.
    pub fn ulp(bits: u32) -> Self {
        Self::from_raw(BigInt::one(), bits)
    }

    pub fn from_integer(n: impl Into<BigInt>, bits: u32) -> Self {
        Self::from_raw(n.into() << bits, bits)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u32, mode: Rounding) -> Self {
        Self::from_raw(div_round(&(num << bits), den, mode), bits)
    }

    pub fn from_rational(q: &BigRational, bits: u32, mode: Rounding) -> Self {
        Self::from_ratio(q.numer(), q.denom(), bits, mode)
    }

    /// Rounds a non-negative count of ulps (tracked in floating point) up to
    /// a representable bound.
    pub fn from_ulps(ulps: f64, bits: u32) -> Self {
        assert!(ulps.is_finite() && ulps >= 0.0, "invalid ulp count {ulps}");
        let whole = BigInt::from(ulps.ceil() as u128);
        Self::from_raw(whole, bits)
    }

    /// Parses a plain decimal literal such as `-230.25882 13214`; embedded
    /// spaces and underscores are ignored.
    pub fn parse_decimal(text: &str, bits: u32) -> Option<Self> {
        let q = parse_rational(text)?;
        Some(Self::from_rational(&q, bits, Rounding::Nearest))
    }

    pub fn raw(&self) -> &BigInt {
        &self.raw
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.raw.is_positive()
    }

    pub fn abs(&self) -> Self {
        Self::from_raw(self.raw.abs(), self.bits)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self::from_raw(&self.raw * k, self.bits)
    }

    pub fn div_int(&self, d: &BigInt, mode: Rounding) -> Self {
        Self::from_raw(div_round(&self.raw, d, mode), self.bits)
    }

    pub fn mul(&self, other: &Fixed, mode: Rounding) -> Self {
        assert_eq!(self.bits, other.bits, "mixed fixed-point scales");
        let prod = &self.raw * &other.raw;
        Self::from_raw(div_round(&prod, &(BigInt::one() << self.bits), mode), self.bits)
    }

    /// Re-expresses the value with a different number of fractional bits.
    pub fn rescale(&self, bits: u32, mode: Rounding) -> Self {
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => Self::from_raw(&self.raw << (bits - self.bits), bits),
            Ordering::Less => {
                let den = BigInt::one() << (self.bits - bits);
                Self::from_raw(div_round(&self.raw, &den, mode), bits)
            }
        }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.raw.clone(), BigInt::one() << self.bits)
    }

    pub fn to_f64(&self) -> f64 {
        if self.raw.is_zero() {
            return 0.0;
        }
        let shift = self.raw.bits() as i64 - 64;
        let (mantissa, exp) = if shift > 0 {
            (&self.raw >> shift as usize, shift - self.bits as i64)
        } else {
            (self.raw.clone(), -(self.bits as i64))
        };
        let m = mantissa.to_f64().unwrap_or(f64::NAN);
        m * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// Decimal expansion with exactly `digits` digits after the point,
    /// rounded to nearest.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scaled = div_round(
            &(&self.raw * BigInt::from(10u32).pow(digits)),
            &(BigInt::one() << self.bits),
            Rounding::Nearest,
        );
        let negative = scaled.is_negative();
        let mut text = scaled.abs().to_str_radix(10);
        let width = digits as usize + 1;
        if text.len() < width {
            text = format!("{}{}", "0".repeat(width - text.len()), text);
        }
        if digits > 0 {
            text.insert(text.len() - digits as usize, '.');
        }
        if negative {
            text.insert(0, '-');
        }
        text
    }

    /// Scientific notation for `|self|`, rounded up to `sig` significant
    /// digits. Meant for printing error bounds.
    pub fn to_sci_upper(&self, sig: u32) -> String {
        let sig = sig.max(1);
        if self.raw.is_zero() {
            return "0".to_string();
        }
        let mag = self.raw.abs();
        // 10^shift * mag / 2^bits has at least sig + 2 integer digits.
        let lead = (self.bits as f64 - mag.bits() as f64) * std::f64::consts::LOG10_2;
        let shift = (lead.ceil() as i64 + sig as i64 + 2).max(0) as u32;
        let q = div_round(
            &(&mag * BigInt::from(10u32).pow(shift)),
            &(BigInt::one() << self.bits),
            Rounding::Ceil,
        );
        let text = q.to_str_radix(10);
        let head: BigInt = text[..sig as usize].parse().expect("decimal digits");
        let exact = text[sig as usize..].bytes().all(|c| c == b'0');
        let head = if exact { head } else { head + 1 };
        let mut head_text = head.to_str_radix(10);
        // Rounding up can carry into a new digit (e.g. 999 -> 1000).
        let mut exponent = text.len() as i64 - 1 - shift as i64;
        if head_text.len() > sig as usize {
            head_text.truncate(sig as usize);
            exponent += 1;
        }
        let mantissa = if sig == 1 {
            head_text
        } else {
            format!("{}.{}", &head_text[..1], &head_text[1..])
        };
        format!("{mantissa}e{exponent}")
    }
}

fn parse_rational(text: &str) -> Option<BigRational> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
    let (negative, body) = match cleaned.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, cleaned.strip_prefix('+').unwrap_or(&cleaned)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num = BigInt::parse_bytes(digits.as_bytes(), 10)?;
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    let q = BigRational::new(num, den);
    Some(if negative { -q } else { q })
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20) as u32;
        f.write_str(&self.to_decimal(digits))
    }
}

impl PartialOrd for Fixed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fixed {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.bits.cmp(&other.bits) {
            Ordering::Equal => self.raw.cmp(&other.raw),
            Ordering::Less => (&self.raw << (other.bits - self.bits)).cmp(&other.raw),
            Ordering::Greater => self.raw.cmp(&(&other.raw << (self.bits - other.bits))),
        }
    }
}

impl<'a> Add<&'a Fixed> for &'a Fixed {
    type Output = Fixed;
    fn add(self, rhs: &'a Fixed) -> Fixed {
        assert_eq!(self.bits, rhs.bits, "mixed fixed-point scales");
        Fixed::from_raw(&self.raw + &rhs.raw, self.bits)
    }
}

impl<'a> Sub<&'a Fixed> for &'a Fixed {
    type Output = Fixed;
    fn sub(self, rhs: &'a Fixed) -> Fixed {
        assert_eq!(self.bits, rhs.bits, "mixed fixed-point scales");
        Fixed::from_raw(&self.raw - &rhs.raw, self.bits)
    }
}

impl Add for Fixed {
    type Output = Fixed;
    fn add(self, rhs: Fixed) -> Fixed {
        &self + &rhs
    }
}

impl Sub for Fixed {
    type Output = Fixed;
    fn sub(self, rhs: Fixed) -> Fixed {
        &self - &rhs
    }
}

impl AddAssign<&Fixed> for Fixed {
    fn add_assign(&mut self, rhs: &Fixed) {
        assert_eq!(self.bits, rhs.bits, "mixed fixed-point scales");
        self.raw += &rhs.raw;
    }
}

impl SubAssign<&Fixed> for Fixed {
    fn sub_assign(&mut self, rhs: &Fixed) {
        assert_eq!(self.bits, rhs.bits, "mixed fixed-point scales");
        self.raw -= &rhs.raw;
    }
}

impl Neg for Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed::from_raw(-self.raw, self.bits)
    }
}

/// Upper bound on `num / den` as an `f64`, for positive big integers of any
/// size. Used to propagate ulp counts through exact integer recurrences.
pub(crate) fn ratio_upper(num: &BigInt, den: &BigInt) -> f64 {
    debug_assert!(den.sign() == Sign::Plus);
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits().saturating_sub(64);
    let n = (num.abs() >> shift) + 1u32;
    let d = den >> shift;
    let r = n.to_f64().unwrap_or(f64::INFINITY) / d.to_f64().unwrap_or(1.0);
    r * (1.0 + 1e-12)
}

/// Number of fractional bits needed for `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 / std::f64::consts::LOG10_2).ceil() as u32 + 4
}
