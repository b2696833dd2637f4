//! `U(n)` and `V(n)`: integrals of `1/(n+x)` against the moment measures,
//! evaluated as alternating series in the moments.
//!
//! `U(n) = u_0/n - u_1/n^2 + u_2/n^3 - ...` and likewise for `V`. Moments
//! are positive and strictly decreasing, so terms alternate with
//! decreasing magnitude and the first omitted term bounds the tail.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::digits::PatternSpec;
use crate::error::{Error, Result};
use crate::exec;
use crate::fixed::{div_round, Fixed, Rounding};
use crate::moments::{MomentTable, Recurrence};

/// Largest base for which the zero-th moment blocks are summed exactly.
pub const EXACT_LEADING_MAX_BASE: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Transform {
    U,
    V,
}

/// A truncated series value with rigorous error components.
#[derive(Clone, Debug)]
pub struct SeriesValue {
    pub value: Fixed,
    /// Magnitude bound of the omitted tail (first omitted term).
    pub trunc_bound: Fixed,
    /// Accumulated rounding, in ulps of `value`.
    pub rounding_ulps: f64,
    pub terms_used: usize,
}

impl SeriesValue {
    /// `trunc_bound` plus the rounding allowance.
    pub fn error_bound(&self) -> Fixed {
        &self.trunc_bound + &Fixed::from_ulps(self.rounding_ulps, self.value.bits())
    }
}

fn moments_of(table: &MomentTable, kind: Transform) -> (&[Fixed], BigInt) {
    match kind {
        Transform::U => (table.u_values(), table.u0()),
        Transform::V => (table.v_values(), table.v0()),
    }
}

fn check_terms(table: &MomentTable, terms: usize) -> Result<()> {
    if terms >= table.max_index() {
        return Err(Error::NotEnoughMoments {
            needed: terms + 1,
            available: table.max_index(),
        });
    }
    Ok(())
}

/// `sum_{m=1}^{terms} (-1)^m x_m / n^{m+1}` with the bound on everything
/// after it. The `m = 0` term is left to the caller.
pub fn moment_tail(n: u64, table: &MomentTable, kind: Transform, terms: usize) -> Result<SeriesValue> {
    assert!(n >= 1, "transforms are evaluated at positive integers");
    check_terms(table, terms)?;
    let bits = table.bits();
    let (moments, _) = moments_of(table, kind);
    let nb = BigInt::from(n);
    let inv_n = 1.0 / n as f64;
    let mut n_pow = nb.clone();
    let mut acc = BigInt::zero();
    let mut ulps = 0.0;
    for (m, moment) in moments.iter().enumerate().take(terms + 1).skip(1) {
        n_pow *= &nb;
        let term = div_round(moment.raw(), &n_pow, Rounding::Nearest);
        if m % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
        let err = match kind {
            Transform::U => table.u_error(m),
            Transform::V => table.v_error(m),
        };
        ulps += 0.5 + err * inv_n.powi(m as i32 + 1) * (1.0 + 1e-12);
    }
    n_pow *= &nb;
    let next = match kind {
        Transform::U => table.u_upper(terms + 1),
        Transform::V => table.v_upper(terms + 1),
    };
    Ok(SeriesValue {
        value: Fixed::from_raw(acc, bits),
        trunc_bound: next.div_int(&n_pow, Rounding::Ceil),
        rounding_ulps: ulps,
        terms_used: terms,
    })
}

fn full_series(n: u64, table: &MomentTable, kind: Transform, terms: usize) -> Result<SeriesValue> {
    let tail = moment_tail(n, table, kind, terms)?;
    let (_, x0) = moments_of(table, kind);
    let lead = Fixed::from_ratio(&x0, &BigInt::from(n), table.bits(), Rounding::Nearest);
    Ok(SeriesValue {
        value: &lead + &tail.value,
        trunc_bound: tail.trunc_bound,
        rounding_ulps: tail.rounding_ulps + 0.5,
        terms_used: terms,
    })
}

/// `U(n)` through moment `terms`.
pub fn u_transform(n: u64, table: &MomentTable, terms: usize) -> Result<SeriesValue> {
    full_series(n, table, Transform::U, terms)
}

/// `V(n)` through moment `terms`; the leading coefficient is `v_0`.
pub fn v_transform(n: u64, table: &MomentTable, terms: usize) -> Result<SeriesValue> {
    full_series(n, table, Transform::V, terms)
}

/// `U_beta(n) = U(nb + beta)`, meaningful for distinct digits only.
pub fn u_beta(n: u64, table: &MomentTable, terms: usize) -> Result<SeriesValue> {
    let p = table.pattern();
    if p.same() {
        return Err(Error::WrongCase("distinct pattern digits"));
    }
    u_transform(n * p.base() as u64 + p.beta() as u64, table, terms)
}

/// `constant + sum sign * T(n)` over a list of transform evaluations.
#[derive(Clone, Debug)]
pub struct LinearForm {
    pub constant: BigRational,
    pub terms: Vec<(i32, Transform, u64)>,
}

impl LinearForm {
    pub fn new() -> Self {
        Self {
            constant: BigRational::zero(),
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, sign: i32, kind: Transform, n: u64) {
        self.terms.push((sign, kind, n));
    }

    /// Smallest argument among the evaluations.
    pub fn min_argument(&self) -> Option<u64> {
        self.terms.iter().map(|t| t.2).min()
    }

    /// Evaluates with `terms` moments per transform. The constant and the
    /// zero-th moment contributions are combined exactly and rounded once
    /// when the base is small enough; the moment tails run in parallel.
    pub fn evaluate(&self, table: &MomentTable, terms: usize) -> Result<SeriesValue> {
        let bits = table.bits();
        check_terms(table, terms)?;
        let tails = exec::map(&self.terms, |&(_, kind, n)| moment_tail(n, table, kind, terms));
        let mut value = Fixed::zero(bits);
        let mut trunc = Fixed::zero(bits);
        let mut ulps = 0.0;
        for (tail, &(sign, _, _)) in tails.into_iter().zip(&self.terms) {
            let tail = tail?;
            let scaled = tail.value.mul_int(&BigInt::from(sign));
            value += &scaled;
            trunc += &tail.trunc_bound.mul_int(&BigInt::from(sign.abs()));
            ulps += tail.rounding_ulps * sign.unsigned_abs() as f64;
        }

        let (lead, lead_ulps) = self.leading_part(table);
        value += &lead;
        ulps += lead_ulps;
        Ok(SeriesValue {
            value,
            trunc_bound: trunc,
            rounding_ulps: ulps,
            terms_used: terms,
        })
    }

    fn leading_part(&self, table: &MomentTable) -> (Fixed, f64) {
        let bits = table.bits();
        let (u0, v0) = (table.u0(), table.v0());
        let coeff = |sign: i32, kind: Transform| -> BigInt {
            BigInt::from(sign)
                * match kind {
                    Transform::U => &u0,
                    Transform::V => &v0,
                }
        };
        if table.pattern().base() <= EXACT_LEADING_MAX_BASE {
            let mut fractions: Vec<(BigInt, BigInt)> = self
                .terms
                .iter()
                .map(|&(sign, kind, n)| (coeff(sign, kind), BigInt::from(n)))
                .collect();
            fractions.push((self.constant.numer().clone(), self.constant.denom().clone()));
            let (num, den) = sum_fractions(&fractions);
            (Fixed::from_ratio(&num, &den, bits, Rounding::Nearest), 0.5)
        } else {
            let mut total = Fixed::from_rational(&self.constant, bits, Rounding::Nearest);
            for &(sign, kind, n) in &self.terms {
                total += &Fixed::from_ratio(&coeff(sign, kind), &BigInt::from(n), bits, Rounding::Nearest);
            }
            (total, 0.5 * (self.terms.len() + 1) as f64)
        }
    }
}

impl Default for LinearForm {
    fn default() -> Self {
        Self::new()
    }
}

/// Exact `sum a_i / d_i` as an unreduced fraction, by a product tree.
fn sum_fractions(parts: &[(BigInt, BigInt)]) -> (BigInt, BigInt) {
    match parts {
        [] => (BigInt::zero(), BigInt::one()),
        [single] => single.clone(),
        _ => {
            let (left, right) = parts.split_at(parts.len() / 2);
            let (a, b) = sum_fractions(left);
            let (c, d) = sum_fractions(right);
            (a * &d + c * &b, b * d)
        }
    }
}

/// Result of checking one functional identity numerically.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    /// `|LHS - RHS|`.
    pub residual: Fixed,
    /// Sum of every constituent truncation and rounding bound.
    pub tolerance: Fixed,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// The identity for `T(n)` written as `T(n) - RHS = 0`.
pub fn identity_form(kind: Transform, n: u64, p: &PatternSpec) -> LinearForm {
    let b = p.base() as u64;
    let a = p.alpha() as u64;
    let s = p.value();
    let mut form = LinearForm::new();
    form.push(1, kind, n);
    match (Recurrence::for_pattern(p), kind) {
        (Recurrence::Distinct, Transform::U) => {
            form.constant = -BigRational::new(BigInt::one(), BigInt::from(n));
            for d in 0..b {
                form.push(-1, Transform::U, n * b + d);
            }
            form.push(1, Transform::U, n * b * b + s);
        }
        (Recurrence::Distinct, Transform::V) => {
            for d in 0..b {
                form.push(-1, Transform::V, n * b + d);
            }
            form.push(1, Transform::V, n * b * b + s);
            form.push(-1, Transform::U, n * b * b + s);
        }
        (Recurrence::Repeated, Transform::U) => {
            form.constant = -BigRational::new(BigInt::one(), BigInt::from(n));
            for d in (0..b).filter(|&d| d != a) {
                form.push(-1, Transform::U, n * b + d);
                form.push(-1, Transform::U, n * b * b + d * b + a);
            }
        }
        (Recurrence::Repeated, Transform::V) => {
            for d in (0..b).filter(|&d| d != a) {
                form.push(-1, Transform::V, n * b + d);
                form.push(-1, Transform::V, n * b * b + d * b + a);
                form.push(-1, Transform::U, n * b * b * b + d * b * b + a * b + a);
            }
        }
    }
    form
}

/// Evaluates both sides of the functional identity for `kind` at `n`.
pub fn check_functional_identity(kind: Transform, n: u64, table: &MomentTable, terms: usize) -> Result<IdentityCheck> {
    let form = identity_form(kind, n, table.pattern());
    let diff = form.evaluate(table, terms)?;
    Ok(IdentityCheck {
        residual: diff.value.abs(),
        tolerance: diff.error_bound(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed::bits_for_digits;
    use crate::moments::compute_moments;

    fn table(b: u32, a: u32, c: u32, m: usize, digits: u32) -> MomentTable {
        compute_moments(&PatternSpec::new(b, a, c).unwrap(), m, bits_for_digits(digits)).unwrap()
    }

    #[test]
    fn zero_terms_is_leading_coefficient() {
        let t = table(10, 4, 2, 5, 30);
        let u = u_transform(7, &t, 0).unwrap();
        assert_eq!(
            u.value,
            Fixed::from_ratio(&100.into(), &7.into(), t.bits(), Rounding::Nearest)
        );
        let bound = t.u_upper(1).div_int(&49.into(), Rounding::Ceil);
        assert_eq!(u.trunc_bound, bound);

        let v = v_transform(7, &t, 0).unwrap();
        assert_eq!(v.value, u.value);
        let dd = table(10, 3, 3, 5, 30);
        let v = v_transform(7, &dd, 0).unwrap();
        assert_eq!(
            v.value,
            Fixed::from_ratio(&90.into(), &7.into(), dd.bits(), Rounding::Nearest)
        );
    }

    #[test]
    fn rejects_too_many_terms() {
        let t = table(10, 4, 2, 5, 30);
        assert!(matches!(u_transform(10, &t, 5), Err(Error::NotEnoughMoments { .. })));
        assert!(u_transform(10, &t, 4).is_ok());
    }

    #[test]
    fn u_beta_is_shifted_u() {
        let t = table(10, 4, 2, 40, 30);
        let a = u_beta(7, &t, 30).unwrap();
        let b = u_transform(72, &t, 30).unwrap();
        assert_eq!(a.value, b.value);
        let bin = table(2, 1, 0, 40, 30);
        assert_eq!(
            u_beta(1, &bin, 30).unwrap().value,
            u_transform(2, &bin, 30).unwrap().value
        );
        let dd = table(10, 4, 4, 10, 20);
        assert!(matches!(u_beta(7, &dd, 5), Err(Error::WrongCase(_))));
    }

    #[test]
    fn partial_sums_bracket_the_limit() {
        let t = table(3, 1, 2, 400, 60);
        let limit = u_transform(4, &t, 300).unwrap().value;
        for m in 1..20 {
            let lo_hi = [
                u_transform(4, &t, m).unwrap().value,
                u_transform(4, &t, m + 1).unwrap().value,
            ];
            let (lo, hi) = if lo_hi[0] < lo_hi[1] {
                (&lo_hi[0], &lo_hi[1])
            } else {
                (&lo_hi[1], &lo_hi[0])
            };
            assert!(lo <= &limit && &limit <= hi, "m={m}");
        }
    }

    #[test]
    fn identities_hold_on_small_grid() {
        for (b, a, c) in [(10, 4, 2), (2, 1, 0), (2, 0, 0), (3, 2, 2)] {
            let t = table(b, a, c, 150, 40);
            for n in [1, 2, 3, 7] {
                for kind in [Transform::U, Transform::V] {
                    let check = check_functional_identity(kind, n, &t, 120).unwrap();
                    assert!(
                        check.holds(),
                        "b={b} {a}{c} n={n} {kind:?}: {} > {}",
                        check.residual.to_sci_upper(3),
                        check.tolerance.to_sci_upper(3)
                    );
                }
            }
        }
    }

    #[test]
    fn identity_detects_wrong_pattern() {
        // Moments of one pattern do not satisfy the identity of another.
        let t = table(10, 4, 2, 150, 40);
        let form = identity_form(Transform::U, 5, &PatternSpec::new(10, 4, 3).unwrap());
        let diff = form.evaluate(&t, 120).unwrap();
        assert!(diff.value.abs() > diff.error_bound());
    }

    #[test]
    fn exact_and_rounded_leading_parts_agree() {
        let mut form = LinearForm::new();
        form.constant = BigRational::new(1.into(), 3.into());
        for n in 10..60 {
            form.push(if n % 3 == 0 { -1 } else { 1 }, Transform::U, n);
        }
        let t = table(10, 1, 2, 10, 30);
        let (exact, _) = form.leading_part(&t);
        let mut rounded = Fixed::from_rational(&form.constant, t.bits(), Rounding::Nearest);
        for &(s, _, n) in &form.terms {
            rounded += &Fixed::from_ratio(&BigInt::from(100 * s), &BigInt::from(n), t.bits(), Rounding::Nearest);
        }
        assert!(
            (&exact - &rounded).abs()
                <= Fixed::from_integer(1, t.bits()).div_int(&BigInt::from(1u64 << 40), Rounding::Ceil)
        );
    }

    #[test]
    fn remark_terms_positive_and_decreasing() {
        // (n1 b + alpha)^{-m-1} - (n1 b^2 + alpha b + beta)^{-m-1} > 0, decreasing in m.
        for (b, a, c) in [(10u64, 4u64, 2u64), (2, 1, 0), (7, 0, 5)] {
            for n1 in 1..b {
                let x = BigRational::new(BigInt::one(), BigInt::from(n1 * b + a));
                let y = BigRational::new(BigInt::one(), BigInt::from(n1 * b * b + a * b + c));
                let mut prev: Option<BigRational> = None;
                let (mut xp, mut yp) = (x.clone(), y.clone());
                for _ in 0..40 {
                    let d = &xp - &yp;
                    assert!(d > BigRational::zero());
                    if let Some(p) = &prev {
                        assert!(&d < p);
                    }
                    prev = Some(d);
                    xp *= &x;
                    yp *= &y;
                }
            }
        }
    }
}
