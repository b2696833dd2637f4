//! Exact generating functions for string masses and admissible-integer
//! counts per length.
//!
//! The measure `mu` gives weight `b^-l` to each length-`l` string avoiding
//! the pattern, `nu` the same weight to strings with exactly one
//! occurrence. Their per-length masses have rational generating functions
//! with a quadratic denominator (squared for `nu`), so coefficients follow
//! a short linear recurrence. Replacing `T` by `bT` turns masses into counts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::digits::PatternSpec;
use crate::error::{Error, Result};

/// Integer polynomial in `T`, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<BigInt>);

impl Poly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = Poly(coeffs);
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    /// `p(cT)`.
    pub fn scale_variable(&self, c: &BigInt) -> Poly {
        let mut power = BigInt::one();
        let mut out = Vec::with_capacity(self.0.len());
        for a in &self.0 {
            out.push(a * &power);
            power *= c;
        }
        Poly::new(out)
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, a| {
            acc * t + BigRational::from_integer(a.clone())
        })
    }
}

/// Ratio of integer polynomials with nonzero constant term downstairs,
/// read as a formal power series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalGF {
    numerator: Poly,
    denominator: Poly,
}

impl RationalGF {
    pub fn new(numerator: Poly, denominator: Poly) -> Self {
        assert!(
            !denominator.coeff(0).is_zero(),
            "denominator must have a nonzero constant term"
        );
        Self { numerator, denominator }
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    /// First `count` power-series coefficients from the recurrence
    /// `q0 a_l = p_l - sum_{k>=1} q_k a_{l-k}`.
    pub fn coefficients(&self, count: usize) -> Vec<BigRational> {
        let q = self.denominator.coeffs();
        let q0 = BigRational::from_integer(q[0].clone());
        let mut out: Vec<BigRational> = Vec::with_capacity(count);
        for l in 0..count {
            let mut acc = BigRational::from_integer(self.numerator.coeff(l));
            for (k, qk) in q.iter().enumerate().skip(1).take(l) {
                if !qk.is_zero() {
                    acc -= &out[l - k] * BigRational::from_integer(qk.clone());
                }
            }
            out.push(acc / &q0);
        }
        out
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.numerator.eval(t) / self.denominator.eval(t)
    }

    pub fn at_one(&self) -> BigRational {
        self.eval(&BigRational::one())
    }

    /// `F(cT)`.
    pub fn scale_variable(&self, c: &BigInt) -> RationalGF {
        RationalGF::new(self.numerator.scale_variable(c), self.denominator.scale_variable(c))
    }

    pub fn mul(&self, other: &RationalGF) -> RationalGF {
        RationalGF::new(
            self.numerator.mul(&other.numerator),
            self.denominator.mul(&other.denominator),
        )
    }

    pub fn add(&self, other: &RationalGF) -> RationalGF {
        if self.denominator == other.denominator {
            return RationalGF::new(self.numerator.add(&other.numerator), self.denominator.clone());
        }
        RationalGF::new(
            self.numerator
                .mul(&other.denominator)
                .add(&other.numerator.mul(&self.denominator)),
            self.denominator.mul(&other.denominator),
        )
    }

    /// Equality as rational functions (cross multiplication).
    pub fn same_function(&self, other: &RationalGF) -> bool {
        self.numerator.mul(&other.denominator) == other.numerator.mul(&self.denominator)
    }
}

/// Which closed-form mass generating function to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MassGf {
    /// `W`: masses of `mu` on all strings of each length (none-string included).
    W,
    /// `W_d`: `mu` restricted to strings with leading digit `d`.
    WLeading(u32),
    /// `Z`: masses of `nu`.
    Z,
    /// `Z_d`: `nu` restricted to leading digit `d`.
    ZLeading(u32),
}

/// The quadratic `b^2 - b(b-1)T - (b-1)T^2` (equal digits) or
/// `b^2 - b^2 T + T^2` (distinct digits) shared by all mass series.
pub fn base_denominator(p: &PatternSpec) -> Poly {
    let b = p.base() as i64;
    if p.same() {
        Poly::from_i64(&[b * b, -b * (b - 1), -(b - 1)])
    } else {
        Poly::from_i64(&[b * b, -b * b, 1])
    }
}

pub fn mass_gf(p: &PatternSpec, which: MassGf) -> Result<RationalGF> {
    let b = p.base() as i64;
    let q = base_denominator(p);
    let q2 = q.mul(&q);
    let check = |d: u32| {
        if d < p.base() {
            Ok(d)
        } else {
            Err(Error::DigitOutOfRange {
                digit: d,
                base: p.base(),
            })
        }
    };
    let gf = match which {
        MassGf::W if p.same() => RationalGF::new(Poly::from_i64(&[b * b, b]), q),
        MassGf::W => RationalGF::new(Poly::from_i64(&[b * b]), q),
        MassGf::WLeading(d) => {
            let d = check(d)?;
            let num = match (p.same(), d == p.alpha()) {
                (true, true) => Poly::from_i64(&[0, b]),
                (true, false) => Poly::from_i64(&[0, b, 1]),
                (false, true) => Poly::from_i64(&[0, b, -1]),
                (false, false) => Poly::from_i64(&[0, b]),
            };
            RationalGF::new(num, q)
        }
        MassGf::Z => RationalGF::new(Poly::from_i64(&[0, 0, b * b]), q2),
        MassGf::ZLeading(d) => {
            let num = if check(d)? == p.alpha() {
                Poly::from_i64(&[0, 0, b * b, -b * (b - 1)])
            } else {
                Poly::from_i64(&[0, 0, 0, b])
            };
            RationalGF::new(num, q2)
        }
    };
    Ok(gf)
}

/// What a [`MassSequence`] measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MassKind {
    MuTotal,
    MuLeading(u32),
    NuTotal,
    NuLeading(u32),
    IntegerCount,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassSequence {
    pub kind: MassKind,
    pub values: Vec<BigRational>,
}

impl MassSequence {
    /// Values as integers, when they all are.
    pub fn as_integers(&self) -> Option<Vec<BigInt>> {
        self.values
            .iter()
            .map(|v| v.is_integer().then(|| v.to_integer()))
            .collect()
    }

    pub fn as_u64(&self) -> Option<Vec<u64>> {
        self.as_integers()?.iter().map(ToPrimitive::to_u64).collect()
    }
}

/// Per-length masses `mu(D_l)`, `M(l,d)`, `nu(D_l)` or `N(l,d)` for `l <= l_max`.
pub fn mass_sequence(p: &PatternSpec, kind: MassKind, l_max: usize) -> Result<MassSequence> {
    let which = match kind {
        MassKind::MuTotal => MassGf::W,
        MassKind::MuLeading(d) => MassGf::WLeading(d),
        MassKind::NuTotal => MassGf::Z,
        MassKind::NuLeading(d) => MassGf::ZLeading(d),
        MassKind::IntegerCount => return count_per_length(p, 1, &(1..p.base()).collect::<Vec<_>>(), l_max),
    };
    Ok(MassSequence {
        kind,
        values: mass_gf(p, which)?.coefficients(l_max + 1),
    })
}

fn leading_gf(p: &PatternSpec, occurrences: u32, d: u32) -> Result<RationalGF> {
    match occurrences {
        0 => mass_gf(p, MassGf::WLeading(d)),
        1 => mass_gf(p, MassGf::ZLeading(d)),
        k => Err(Error::Occurrences(k)),
    }
}

/// Mass generating function of the admissible strings whose leading digit
/// is in `leading`.
pub fn restricted_mass_gf(p: &PatternSpec, occurrences: u32, leading: &[u32]) -> Result<RationalGF> {
    let mut total: Option<RationalGF> = None;
    for &d in leading {
        let g = leading_gf(p, occurrences, d)?;
        total = Some(match total {
            Some(acc) => acc.add(&g),
            None => g,
        });
    }
    match total {
        Some(gf) => Ok(gf),
        // Empty digit set: the zero series.
        None => Ok(RationalGF::new(Poly::new(Vec::new()), Poly::from_i64(&[1]))),
    }
}

/// Counts of admissible strings of each length `0..=l_max` with leading
/// digit in `leading` and exactly `occurrences` windows equal to the
/// pattern. With `leading = 1..b` these are counts of positive integers.
pub fn count_per_length(p: &PatternSpec, occurrences: u32, leading: &[u32], l_max: usize) -> Result<MassSequence> {
    let gf = restricted_mass_gf(p, occurrences, leading)?;
    let counts = gf.scale_variable(&BigInt::from(p.base()));
    Ok(MassSequence {
        kind: MassKind::IntegerCount,
        values: counts.coefficients(l_max + 1),
    })
}

/// `sum_{l > n} count_l b^-l` over positive integers, as an exact rational.
pub fn tail_mass(p: &PatternSpec, occurrences: u32, n: usize) -> Result<BigRational> {
    let leading: Vec<u32> = (1..p.base()).collect();
    let gf = restricted_mass_gf(p, occurrences, &leading)?;
    let head: BigRational = gf.coefficients(n + 1).into_iter().sum();
    Ok(gf.at_one() - head)
}

/// Asymptotic ratio `r_{l+1}/r_l` of consecutive tail masses: the inverse
/// of the smallest root modulus of the mass denominator.
pub fn dominant_tail_ratio(p: &PatternSpec, occurrences: u32) -> Result<f64> {
    if occurrences > 1 {
        return Err(Error::Occurrences(occurrences));
    }
    let q = base_denominator(p);
    let c = q.coeff(0).to_f64().unwrap_or(f64::NAN);
    let bq = q.coeff(1).to_f64().unwrap_or(f64::NAN);
    let a = q.coeff(2).to_f64().unwrap_or(f64::NAN);
    let disc = bq * bq - 4.0 * a * c;
    let smallest = if disc >= 0.0 {
        let s = disc.sqrt();
        let r1 = ((-bq + s) / (2.0 * a)).abs();
        let r2 = ((-bq - s) / (2.0 * a)).abs();
        r1.min(r2)
    } else {
        (c / a).abs().sqrt()
    };
    Ok(1.0 / smallest)
}
