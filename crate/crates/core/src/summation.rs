//! `K0` and `K1` assembled from transforms at two- to four-digit
//! arguments, with automatic choice of moment count and precision.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::digits::PatternSpec;
use crate::error::{Error, Result};
use crate::exec;
use crate::fixed::{bits_for_digits, Fixed, Rounding};
use crate::moments::{compute_moments, MomentTable};
use crate::stieltjes::{LinearForm, SeriesValue, Transform};

/// Which subsum: no occurrence or exactly one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    K0,
    K1,
}

impl Which {
    pub fn occurrences(self) -> u32 {
        match self {
            Which::K0 => 0,
            Which::K1 => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KRequest {
    pub pattern: PatternSpec,
    pub which: Which,
    pub target_digits: u32,
}

impl KRequest {
    pub fn new(pattern: PatternSpec, which: Which, target_digits: u32) -> Result<Self> {
        if target_digits == 0 {
            return Err(Error::ZeroDigits);
        }
        Ok(Self {
            pattern,
            which,
            target_digits,
        })
    }
}

#[derive(Clone, Debug)]
pub struct KResult {
    pub request: KRequest,
    pub value: Fixed,
    /// Sum of every truncation bound and rounding allowance.
    pub error_bound: Fixed,
    pub m_used: usize,
    pub precision_bits: u32,
    pub precision_digits: u32,
    /// Planning rounds needed beyond the first.
    pub escalations: u32,
}

impl KResult {
    /// The value with `target_digits` decimals.
    pub fn to_decimal(&self) -> String {
        self.value.to_decimal(self.request.target_digits)
    }
}

/// Moment count and working precision for a request.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Plan {
    pub terms: usize,
    pub digits: u32,
    pub bits: u32,
}

const MAX_ATTEMPTS: u32 = 6;

/// Every evaluation sits at an argument `n >= b` and its moments never
/// exceed `b^2`, so `count * b^2 / b^(M+2)` bounds the total truncation.
/// `M` is the least value pushing that below `10^-(digits+2)`.
pub fn plan(req: &KRequest) -> Plan {
    let form = two_step_form(&req.pattern, req.which);
    plan_for(req.pattern.base(), req.target_digits, form.terms.len())
}

fn plan_for(base: u32, digits: u32, count: usize) -> Plan {
    let lb = (base as f64).log10();
    let need = digits as f64 + 2.0 + (base as f64 * base as f64 * count.max(1) as f64).log10();
    let terms = ((need / lb).ceil() as i64 - 2).max(1) as usize;
    let work = digits + (terms as f64).log10().ceil() as u32 + 10;
    Plan {
        terms,
        digits: work,
        bits: bits_for_digits(work),
    }
}

/// `which` as a combination of transforms at two- to four-digit arguments.
pub fn two_step_form(p: &PatternSpec, which: Which) -> LinearForm {
    let b = p.base() as u64;
    let a = p.alpha() as u64;
    let c = p.beta() as u64;
    let s = p.value();
    let mut form = LinearForm::new();
    let two_digit = || (b..b * b).filter(move |&n| n != s);
    match (p.same(), which) {
        (false, Which::K0) => {
            form.constant = harmonic(1, b);
            for n in two_digit() {
                form.push(1, Transform::U, n);
            }
            for n1 in 1..b {
                form.push(-1, Transform::U, n1 * b * b + s);
            }
        }
        (false, Which::K1) => {
            for n in two_digit() {
                form.push(1, Transform::V, n);
            }
            for n1 in 1..b {
                form.push(-1, Transform::V, n1 * b * b + s);
                form.push(1, Transform::U, n1 * b * b + s);
            }
            if a != 0 {
                form.push(1, Transform::U, s);
            }
        }
        (true, Which::K0) => {
            form.constant = harmonic(1, b);
            for n in two_digit() {
                form.push(1, Transform::U, n);
            }
            for n1 in 1..b {
                for n2 in (0..b).filter(|&d| d != a) {
                    form.push(1, Transform::U, (n1 * b + n2) * b + a);
                }
            }
        }
        (true, Which::K1) => {
            if a != 0 {
                form.push(1, Transform::U, s);
            }
            for n in two_digit() {
                form.push(1, Transform::V, n);
            }
            for n1 in (1..b).filter(|&d| d != a) {
                form.push(1, Transform::U, n1 * b * b + s);
            }
            for n1 in 1..b {
                for n2 in (0..b).filter(|&d| d != a) {
                    let three = (n1 * b + n2) * b + a;
                    form.push(1, Transform::V, three);
                    form.push(1, Transform::U, three * b + c);
                }
            }
        }
    }
    form
}

/// `K1` from the one-step expansion, distinct digits only:
/// `sum_{n<b} V(n) - [alpha != 0] (V(alpha beta) - U(alpha beta))`.
/// Arguments start at 1, so the series converge slowly; this form only
/// serves as a cross-check of the two-step form.
pub fn level_one_form(p: &PatternSpec) -> Result<LinearForm> {
    if p.same() {
        return Err(Error::WrongCase("distinct pattern digits"));
    }
    let b = p.base() as u64;
    let mut form = LinearForm::new();
    for n in 1..b {
        form.push(1, Transform::V, n);
    }
    if p.alpha() != 0 {
        form.push(-1, Transform::V, p.value());
        form.push(1, Transform::U, p.value());
    }
    Ok(form)
}

fn harmonic(lo: u64, hi: u64) -> BigRational {
    (lo..hi).fold(BigRational::zero(), |acc, n| {
        acc + BigRational::new(BigInt::one(), BigInt::from(n))
    })
}

/// Evaluates the two-step form with an existing table and `terms` moments.
pub fn evaluate_with(table: &MomentTable, which: Which, terms: usize) -> Result<SeriesValue> {
    two_step_form(table.pattern(), which).evaluate(table, terms)
}

fn tolerance(digits: u32, bits: u32) -> Fixed {
    Fixed::from_ratio(&BigInt::one(), &BigInt::from(10u32).pow(digits), bits, Rounding::Floor)
}

/// Computes `K0` or `K1` with `error_bound < 10^-target_digits`,
/// increasing moments and precision until the bound is met.
pub fn compute(req: &KRequest) -> Result<KResult> {
    let form = two_step_form(&req.pattern, req.which);
    let mut plan = plan_for(req.pattern.base(), req.target_digits, form.terms.len());
    for attempt in 0..MAX_ATTEMPTS {
        let outcome = compute_moments(&req.pattern, plan.terms + 1, plan.bits)
            .and_then(|table| form.evaluate(&table, plan.terms));
        match outcome {
            Ok(series) => {
                let bound = series.error_bound();
                if bound < tolerance(req.target_digits, plan.bits) {
                    return Ok(KResult {
                        request: *req,
                        value: series.value,
                        error_bound: bound,
                        m_used: plan.terms,
                        precision_bits: plan.bits,
                        precision_digits: plan.digits,
                        escalations: attempt,
                    });
                }
                plan.terms += plan.terms / 4 + 4;
                plan.digits += 10;
            }
            Err(Error::MomentPrecision { .. }) => plan.digits += plan.digits / 2 + 10,
            Err(e) => return Err(e),
        }
        plan.bits = bits_for_digits(plan.digits);
    }
    Err(Error::PlanExhausted {
        digits: req.target_digits,
        attempts: MAX_ATTEMPTS,
    })
}

pub fn k0(pattern: PatternSpec, digits: u32) -> Result<KResult> {
    compute(&KRequest::new(pattern, Which::K0, digits)?)
}

pub fn k1(pattern: PatternSpec, digits: u32) -> Result<KResult> {
    compute(&KRequest::new(pattern, Which::K1, digits)?)
}

/// `atanh(num/den)` for `0 < num/den <= 1/3`, within a few ulps.
fn atanh_ratio(num: u64, den: u64, bits: u32) -> Fixed {
    let (n2, d2) = (BigInt::from(num * num), BigInt::from(den * den));
    let mut power = Fixed::from_ratio(&BigInt::from(num), &BigInt::from(den), bits, Rounding::Nearest);
    let mut total = Fixed::zero(bits);
    let mut k = 1u64;
    while !power.is_zero() {
        total += &power.div_int(&BigInt::from(k), Rounding::Nearest);
        power = power.mul_int(&n2).div_int(&d2, Rounding::Nearest);
        k += 2;
    }
    total
}

/// Natural logarithm of an integer `b >= 1` to `bits` fractional bits,
/// accurate to well under one unit in the last place.
pub fn ln_integer(b: u64, bits: u32) -> Fixed {
    assert!(b >= 1);
    let guard = bits + 64;
    let e = 63 - b.leading_zeros() as u64;
    let low = 1u64 << e;
    let ln2 = atanh_ratio(1, 3, guard).mul_int(&BigInt::from(2 * e));
    let frac = if b == low {
        Fixed::zero(guard)
    } else {
        // ln(b / 2^e) = 2 atanh((b - 2^e) / (b + 2^e)), ratio below 1/3.
        let g = num_integer::gcd(b - low, b + low);
        atanh_ratio((b - low) / g, (b + low) / g, guard).mul_int(&BigInt::from(2))
    };
    (&ln2 + &frac).rescale(bits, Rounding::Nearest)
}

#[derive(Clone, Debug)]
pub struct PatternStat {
    pub pattern: PatternSpec,
    pub value: Fixed,
    pub error_bound: Fixed,
    /// `K1 - b^2 ln b`.
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct K1Statistics {
    pub base: u32,
    pub digits: u32,
    /// `b^2 ln b`.
    pub reference: Fixed,
    pub entries: Vec<PatternStat>,
    pub max_deviation: f64,
    pub max_deviation_distinct: f64,
    /// Patterns whose `K1` lies below the reference, in lexicographic order.
    pub below: Vec<PatternSpec>,
}

/// `K1` for every pattern of the base, compared with `b^2 ln b`.
pub fn k1_statistics(base: u32, digits: u32) -> Result<K1Statistics> {
    let patterns = PatternSpec::all(base)?;
    let results = exec::map(&patterns, |p| k1(*p, digits));
    let bits = bits_for_digits(digits + 10);
    let b2 = BigInt::from(base as u64 * base as u64);
    let reference = ln_integer(base as u64, bits).mul_int(&b2);

    let mut entries = Vec::with_capacity(patterns.len());
    for r in results {
        let r = r?;
        let value = r.value.rescale(bits, Rounding::Nearest);
        let deviation = (&value - &reference).to_f64();
        entries.push(PatternStat {
            pattern: r.request.pattern,
            value,
            error_bound: r.error_bound,
            deviation,
        });
    }
    let max_abs = |distinct_only: bool| {
        entries
            .iter()
            .filter(|e| !distinct_only || !e.pattern.same())
            .map(|e| e.deviation.abs())
            .fold(0.0, f64::max)
    };
    let max_deviation = max_abs(false);
    let max_deviation_distinct = max_abs(true);
    let below = entries
        .iter()
        .filter(|e| e.value < reference)
        .map(|e| e.pattern)
        .collect();
    Ok(K1Statistics {
        base,
        digits,
        reference,
        entries,
        max_deviation,
        max_deviation_distinct,
        below,
    })
}
