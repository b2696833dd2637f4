//! Moment sequences `u_m`, `v_m` of the string measures pushed to `[0, 1)`.
//!
//! For distinct digits the sequences are the moments of `mu` (no
//! occurrence) and `nu` (exactly one). For a repeated digit they are the
//! moments of `sigma = mu - mu_alpha` and `tau = nu - nu_alpha`, i.e. the
//! same measures with strings led by `alpha` removed.
//!
//! Each recurrence is multiplied through by a power of `b` so that every
//! coefficient is an exact integer. The convolution over earlier moments
//! is then exact on the fixed-point mantissas and the only rounding is the
//! final division, which keeps the error propagation a short closed form.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::counting::{mass_gf, MassGf};
use crate::digits::PatternSpec;
use crate::error::{Error, Result};
use crate::exec;
use crate::fixed::{div_round, ratio_upper, Fixed, Rounding};

/// Exact power sums over digits used by the recurrences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSums {
    /// `sum_{0<=d<b} d^j`
    pub gamma: Vec<BigInt>,
    /// `sum_{d != alpha} d^j`
    pub gamma_prime: Vec<BigInt>,
    /// `sum_{d != alpha} (d b + alpha)^j`
    pub theta_prime: Vec<BigInt>,
    /// `sum_{d != alpha} (d b^2 + alpha b + alpha)^j`
    pub kappa_prime: Vec<BigInt>,
}

pub fn compute_power_sums(p: &PatternSpec, max_j: usize) -> PowerSums {
    let b = p.base() as u64;
    let a = p.alpha() as u64;
    let digits: Vec<u64> = (0..b).collect();
    let others: Vec<u64> = digits.iter().copied().filter(|&d| d != a).collect();
    let sums = |bases: Vec<u64>| -> Vec<BigInt> {
        let bases: Vec<BigInt> = bases.into_iter().map(BigInt::from).collect();
        let mut powers: Vec<BigInt> = vec![BigInt::one(); bases.len()];
        let mut out = Vec::with_capacity(max_j + 1);
        for _ in 0..=max_j {
            out.push(powers.iter().sum());
            for (pw, base) in powers.iter_mut().zip(&bases) {
                *pw *= base;
            }
        }
        out
    };
    PowerSums {
        gamma: sums(digits),
        gamma_prime: sums(others.clone()),
        theta_prime: sums(others.iter().map(|d| d * b + a).collect()),
        kappa_prime: sums(others.iter().map(|d| d * b * b + a * b + a).collect()),
    }
}

/// Which pair of recurrences produced a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recurrence {
    /// Moments of `mu` and `nu`; the pattern digits differ.
    Distinct,
    /// Moments of `sigma` and `tau`; the pattern is `alpha alpha`.
    Repeated,
}

impl Recurrence {
    pub fn for_pattern(p: &PatternSpec) -> Self {
        if p.same() {
            Recurrence::Repeated
        } else {
            Recurrence::Distinct
        }
    }
}

/// `u_0..=u_M` and `v_0..=v_M` at a fixed binary precision, with a
/// rigorous per-entry rounding bound in units of `2^-bits`.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pattern: PatternSpec,
    bits: u32,
    recurrence: Recurrence,
    u: Vec<Fixed>,
    v: Vec<Fixed>,
    u_err: Vec<f64>,
    v_err: Vec<f64>,
}

impl MomentTable {
    pub fn pattern(&self) -> &PatternSpec {
        &self.pattern
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn recurrence(&self) -> Recurrence {
        self.recurrence
    }

    /// Largest moment index available.
    pub fn max_index(&self) -> usize {
        self.u.len() - 1
    }

    pub fn u(&self, m: usize) -> &Fixed {
        &self.u[m]
    }

    pub fn v(&self, m: usize) -> &Fixed {
        &self.v[m]
    }

    pub fn u_values(&self) -> &[Fixed] {
        &self.u
    }

    pub fn v_values(&self) -> &[Fixed] {
        &self.v
    }

    /// Rounding error bound of `u_m`, in ulps.
    pub fn u_error(&self, m: usize) -> f64 {
        self.u_err[m]
    }

    pub fn v_error(&self, m: usize) -> f64 {
        self.v_err[m]
    }

    /// Exact `u_0 = b^2`.
    pub fn u0(&self) -> BigInt {
        let b = BigInt::from(self.pattern.base());
        &b * &b
    }

    /// Exact `v_0`: `b^2` for distinct digits, `b(b-1)` for a repeated one.
    pub fn v0(&self) -> BigInt {
        let b = BigInt::from(self.pattern.base());
        match self.recurrence {
            Recurrence::Distinct => &b * &b,
            Recurrence::Repeated => &b * (&b - 1),
        }
    }

    /// Upper bound on the true `u_m`.
    pub fn u_upper(&self, m: usize) -> Fixed {
        &self.u[m] + &Fixed::from_ulps(self.u_err[m], self.bits)
    }

    pub fn v_upper(&self, m: usize) -> Fixed {
        &self.v[m] + &Fixed::from_ulps(self.v_err[m], self.bits)
    }
}

/// Per-step convolution sums, each `sum_j C(m,j) w_j x_{m-j}` over `j >= 1`.
#[derive(Default)]
struct Sums {
    a_u: BigInt,
    b_u: BigInt,
    a_v: BigInt,
    b_v: BigInt,
    k_u: BigInt,
}

impl Sums {
    fn merge(mut self, other: Sums) -> Sums {
        self.a_u += other.a_u;
        self.b_u += other.b_u;
        self.a_v += other.a_v;
        self.b_v += other.b_v;
        self.k_u += other.k_u;
        self
    }
}

/// Computes `u_0..=u_max` and `v_0..=v_max` with `bits` fractional bits.
pub fn compute_moments(p: &PatternSpec, max_m: usize, bits: u32) -> Result<MomentTable> {
    let recurrence = Recurrence::for_pattern(p);
    let sums = compute_power_sums(p, max_m);
    let b = BigInt::from(p.base());
    let bm1 = &b - 1u32;
    let s = BigInt::from(p.value());

    let mut table = MomentTable {
        pattern: *p,
        bits,
        recurrence,
        u: Vec::with_capacity(max_m + 1),
        v: Vec::with_capacity(max_m + 1),
        u_err: Vec::with_capacity(max_m + 1),
        v_err: Vec::with_capacity(max_m + 1),
    };
    let u0 = table.u0();
    let v0 = table.v0();
    table.u.push(Fixed::from_integer(u0, bits));
    table.v.push(Fixed::from_integer(v0, bits));
    table.u_err.push(0.0);
    table.v_err.push(0.0);

    // Per-digit bases whose m-th powers give the closed-form coefficient sums
    // used for error propagation, e.g. sum_{j>=1} C(m,j) gamma_j = sum_d ((1+d)^m - 1).
    let a = p.alpha() as u64;
    let bb = p.base() as u64;
    let others: Vec<u64> = (0..bb).filter(|&d| d != a).collect();
    let mut row: Vec<BigInt> = vec![BigInt::one()];
    let mut b_pow = b.clone(); // b^{m+1}, advanced at the top of each step
    let (mut max_eu, mut max_ev) = (0f64, 0f64);

    for m in 1..=max_m {
        // Binomial row m from row m-1.
        row.push(BigInt::one());
        for j in (1..m).rev() {
            let prev = row[j - 1].clone();
            row[j] += prev;
        }
        b_pow *= &b;

        let js: Vec<usize> = (1..=m).collect();
        let u_raw: Vec<&BigInt> = table.u.iter().map(Fixed::raw).collect();
        let v_raw: Vec<&BigInt> = table.v.iter().map(Fixed::raw).collect();
        let s_pow = |j: usize| -> BigInt { Pow::pow(&s, j as u32) };
        let partials = exec::map(&js, |&j| {
            let cu = &row[j] * u_raw[m - j];
            let cv = &row[j] * v_raw[m - j];
            match recurrence {
                Recurrence::Distinct => {
                    let sj = s_pow(j);
                    Sums {
                        a_u: &sums.gamma[j] * &cu,
                        b_u: &sj * &cu,
                        a_v: &sums.gamma[j] * &cv,
                        b_v: &sj * &cv,
                        k_u: BigInt::zero(),
                    }
                }
                Recurrence::Repeated => Sums {
                    a_u: &sums.gamma_prime[j] * &cu,
                    b_u: &sums.theta_prime[j] * &cu,
                    a_v: &sums.gamma_prime[j] * &cv,
                    b_v: &sums.theta_prime[j] * &cv,
                    k_u: &sums.kappa_prime[j] * &cu,
                },
            }
        });
        let acc = partials.into_iter().fold(Sums::default(), Sums::merge);
        let pow_m = |base: u64| -> BigInt { Pow::pow(BigInt::from(base), m as u32) };

        let (u_m, eu, v_m, ev) = match recurrence {
            Recurrence::Distinct => {
                // (b^{2m+2} - b^{m+2} + 1) u_m = b^{m+1} A - B
                let den = &b_pow * &b_pow - &b_pow * &b + 1u32;
                let num_u = &acc.a_u * &b_pow - &acc.b_u;
                let u_m = div_round(&num_u, &den, Rounding::Nearest);

                let gamma_total: BigInt = (1..=bb).map(pow_m).sum::<BigInt>() - &b;
                let s_total = pow_m(p.value() + 1);
                let rho_u = ratio_upper(&(&b_pow * &gamma_total + &s_total - 1u32), &den);
                let eu = 0.5 + rho_u * max_eu;

                let num_v = &acc.a_v * &b_pow - &acc.b_v + &acc.b_u + &u_m;
                let v_m = div_round(&num_v, &den, Rounding::Nearest);
                let rho_vv = ratio_upper(&(&b_pow * &gamma_total + &s_total - 1u32), &den);
                let rho_vu = ratio_upper(&s_total, &den);
                let ev = 0.5 + rho_vv * max_ev + rho_vu * max_eu.max(eu);
                (u_m, eu, v_m, ev)
            }
            Recurrence::Repeated => {
                // (b^{2m+2} - (b-1) b^{m+1} - (b-1)) u_m = b^{m+1} A + B
                let den = &b_pow * &b_pow - &bm1 * &b_pow - &bm1;
                let num_u = &acc.a_u * &b_pow + &acc.b_u;
                let u_m = div_round(&num_u, &den, Rounding::Nearest);

                let g_total: BigInt = others.iter().map(|&d| pow_m(1 + d) - 1u32).sum();
                let t_total: BigInt = others.iter().map(|&d| pow_m(1 + d * bb + a) - 1u32).sum();
                let k_total: BigInt = others.iter().map(|&d| pow_m(1 + d * bb * bb + a * bb + a) - 1u32).sum();
                let rho_u = ratio_upper(&(&b_pow * &g_total + &t_total), &den);
                let eu = 0.5 + rho_u * max_eu;

                // b^{m+1} * den = b^{3m+3} - (b-1) b^{2m+2} - (b-1) b^{m+1}
                let den_v = &den * &b_pow;
                let num_v = &acc.a_v * &b_pow * &b_pow + &acc.b_v * &b_pow + &acc.k_u + &bm1 * &u_m;
                let v_m = div_round(&num_v, &den_v, Rounding::Nearest);
                let rho_vv = ratio_upper(&(&b_pow * &b_pow * &g_total + &b_pow * &t_total), &den_v);
                let rho_vu = ratio_upper(&(&k_total + &bm1), &den_v);
                let ev = 0.5 + rho_vv * max_ev + rho_vu * max_eu.max(eu);
                (u_m, eu, v_m, ev)
            }
        };

        check_step('u', m, &table.u[m - 1], table.u_err[m - 1], &u_m, eu, bits)?;
        check_step('v', m, &table.v[m - 1], table.v_err[m - 1], &v_m, ev, bits)?;

        max_eu = max_eu.max(eu);
        max_ev = max_ev.max(ev);
        table.u.push(Fixed::from_raw(u_m, bits));
        table.v.push(Fixed::from_raw(v_m, bits));
        table.u_err.push(eu);
        table.v_err.push(ev);
    }
    Ok(table)
}

/// Rigorous positivity and strict decrease given the tracked errors.
fn check_step(
    sequence: char,
    index: usize,
    previous: &Fixed,
    previous_err: f64,
    current: &BigInt,
    err: f64,
    bits: u32,
) -> Result<()> {
    let e_prev = BigInt::from(previous_err.ceil() as u128);
    let e_cur = BigInt::from(err.ceil() as u128);
    let positive = current > &e_cur;
    let decreasing = current + &e_cur < previous.raw() - &e_prev;
    if positive && decreasing {
        Ok(())
    } else {
        Err(Error::MomentPrecision { sequence, index, bits })
    }
}

/// Which moment sequence an oracle query targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sequence {
    U,
    V,
}

/// Enumeration estimate with its rigorous truncation bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    pub truncation_bound: f64,
    pub strings: u64,
}

/// Direct evaluation of `sum_X x(X)^m b^-|X|` over admissible strings of
/// length at most `depth`, for the measure behind `sequence`.
///
/// Strings are generated digit by digit and pruned as soon as they exceed
/// the allowed occurrence count. The omitted strings carry the measure's
/// total mass minus the enumerated mass, and `x^m <= 1` on them, which
/// gives the truncation bound.
pub fn moment_oracle(p: &PatternSpec, sequence: Sequence, m: u32, depth: u32) -> Result<OracleEstimate> {
    let b = p.base();
    if depth as f64 * (b as f64).log2() > 40.0 {
        return Err(Error::Infeasible { base: b, len: depth });
    }
    let target = match sequence {
        Sequence::U => 0u32,
        Sequence::V => 1u32,
    };
    let skip_alpha_lead = p.same();

    // Totals from the closed-form masses.
    let (total, leading_alpha) = match sequence {
        Sequence::U => (
            mass_gf(p, MassGf::W)?.at_one(),
            mass_gf(p, MassGf::WLeading(p.alpha()))?.at_one(),
        ),
        Sequence::V => (
            mass_gf(p, MassGf::Z)?.at_one(),
            mass_gf(p, MassGf::ZLeading(p.alpha()))?.at_one(),
        ),
    };
    let total = if skip_alpha_lead { total - leading_alpha } else { total };
    let total = num_traits::ToPrimitive::to_f64(&total).unwrap_or(f64::NAN);

    let inv_b = 1.0 / b as f64;
    let mut value = 0.0f64;
    let mut mass = 0.0f64;
    let mut strings = 0u64;

    // (n, length, last digit, occurrences, scale = b^-length)
    let mut stack: Vec<(u64, u32, u32, u32, f64)> = vec![(0, 0, u32::MAX, 0, 1.0)];
    while let Some((n, len, last, occ, scale)) = stack.pop() {
        if occ == target {
            strings += 1;
            mass += scale;
            let x = n as f64 * scale;
            value += if m == 0 { scale } else { x.powi(m as i32) * scale };
        }
        if len == depth {
            continue;
        }
        for d in 0..b {
            if len == 0 && skip_alpha_lead && d == p.alpha() {
                continue;
            }
            let hit = u32::from(last == p.alpha() && d == p.beta());
            let next_occ = occ + hit;
            if next_occ > target {
                continue;
            }
            stack.push((n * b as u64 + d as u64, len + 1, d, next_occ, scale * inv_b));
        }
    }
    // Float accumulation slack, far below the truncation term in practice.
    let slack = (strings as f64 + 1.0) * f64::EPSILON * total.max(1.0) * 4.0;
    Ok(OracleEstimate {
        value,
        truncation_bound: (total - mass).max(0.0) + slack,
        strings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed::bits_for_digits;

    fn pat(b: u32, a: u32, c: u32) -> PatternSpec {
        PatternSpec::new(b, a, c).unwrap()
    }

    #[test]
    fn power_sum_examples() {
        let ps = compute_power_sums(&pat(10, 4, 2), 3);
        assert_eq!(ps.gamma[0], BigInt::from(10));
        assert_eq!(ps.gamma[1], BigInt::from(45));
        assert_eq!(ps.gamma_prime[0], BigInt::from(9));

        let ps = compute_power_sums(&pat(2, 1, 0), 6);
        for j in 1..=6 {
            assert_eq!(ps.gamma_prime[j], BigInt::zero());
            assert_eq!(ps.theta_prime[j], BigInt::one());
        }
        let ps = compute_power_sums(&pat(2, 0, 0), 2);
        assert_eq!(ps.kappa_prime[1], BigInt::from(4));
        assert_eq!(ps.theta_prime[0], BigInt::one());
    }

    #[test]
    fn first_moments_binary_ten() {
        let t = compute_moments(&pat(2, 1, 0), 4, 200).unwrap();
        assert_eq!(t.recurrence(), Recurrence::Distinct);
        assert_eq!(t.u(0), &Fixed::from_integer(4, 200));
        assert_eq!(t.v(0), &Fixed::from_integer(4, 200));
        let eight_ninths = Fixed::from_ratio(&BigInt::from(8), &BigInt::from(9), 200, Rounding::Nearest);
        assert!((t.u(1) - &eight_ninths).abs() <= Fixed::ulp(200));
    }

    #[test]
    fn decimal_forty_two_first_step() {
        // (100 - 10 + 10^-2) u_1 = (45 - 42/100) * 100
        let t = compute_moments(&pat(10, 4, 2), 1, 300).unwrap();
        let num = BigInt::from(4458) * 100;
        let den = BigInt::from(9001);
        let expected = Fixed::from_ratio(&num, &den, 300, Rounding::Nearest);
        assert!((t.u(1) - &expected).abs() <= Fixed::ulp(300));
        assert!(t.u(1).to_f64() < 50.0);
    }

    #[test]
    fn repeated_digit_leading_terms() {
        let t = compute_moments(&pat(2, 0, 0), 3, 100).unwrap();
        assert_eq!(t.recurrence(), Recurrence::Repeated);
        assert_eq!(t.v0(), BigInt::from(2));
        assert_eq!(t.u0(), BigInt::from(4));
        let t = compute_moments(&pat(10, 7, 7), 3, 100).unwrap();
        assert_eq!(t.v(0), &Fixed::from_integer(90, 100));
    }

    #[test]
    fn repeated_v_recurrence_at_zero_gives_b_times_b_minus_one() {
        // m = 0 instance of the scaled recurrence: b v_0 = (b-1) u_0.
        for b in 2..=20i64 {
            let den = b * b * b - (b - 1) * b * b - (b - 1) * b;
            assert_eq!(den, b);
            assert_eq!((b - 1) * b * b / den, b * (b - 1));
        }
    }

    #[test]
    fn moments_decrease_and_distinct_first_moment_below_half() {
        for p in [pat(2, 1, 0), pat(2, 0, 1), pat(3, 2, 0), pat(10, 4, 2), pat(10, 0, 9)] {
            let t = compute_moments(&p, 60, bits_for_digits(40)).unwrap();
            assert!(t.u(1).to_f64() < 0.5 * t.u(0).to_f64(), "{p}");
            for m in 1..=60 {
                assert!(t.u(m) < t.u(m - 1) && t.v(m) < t.v(m - 1));
            }
        }
    }

    #[test]
    fn low_precision_is_reported() {
        let err = compute_moments(&pat(2, 1, 0), 400, 12).unwrap_err();
        assert!(matches!(err, Error::MomentPrecision { .. }));
    }

    #[test]
    fn errors_stay_small() {
        let t = compute_moments(&pat(10, 9, 8), 200, bits_for_digits(60)).unwrap();
        for m in 0..=200 {
            assert!(t.u_error(m) < 1e3 && t.v_error(m) < 1e3, "m={m}");
        }
    }

    #[test]
    fn oracle_matches_closed_form_first_moment() {
        let est = moment_oracle(&pat(2, 1, 0), Sequence::U, 1, 30).unwrap();
        assert!((est.value - 8.0 / 9.0).abs() <= est.truncation_bound);
        assert!(est.truncation_bound < 1e-6);
        let mass = moment_oracle(&pat(2, 1, 0), Sequence::U, 0, 40).unwrap();
        assert!((mass.value - 4.0).abs() <= mass.truncation_bound);
    }

    #[test]
    fn oracle_sigma_total_mass() {
        let est = moment_oracle(&pat(2, 0, 0), Sequence::U, 0, 30).unwrap();
        assert!((est.value - 4.0).abs() <= est.truncation_bound + 1e-12);
        assert!(est.truncation_bound < 0.05);
        let tau = moment_oracle(&pat(2, 0, 0), Sequence::V, 0, 30).unwrap();
        assert!((tau.value - 2.0).abs() <= tau.truncation_bound + 1e-12);
    }

    #[test]
    fn oracle_guard() {
        assert!(moment_oracle(&pat(10, 4, 2), Sequence::U, 1, 20).is_err());
    }
}
