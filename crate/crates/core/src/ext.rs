//! Exact scalars and extended non-negative reals.
//!
//! [`Rational`] is the exact scalar used everywhere. Norm values live in
//! [`ExtReal`], which is either an exact rational, a binary64 approximation
//! carrying an explicit relative error bound, or `+∞`.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms.
pub type Rational = BigRational;

/// Relative error charged for every floating-point operation.
pub const OP_ERR: f64 = 1e-12;

const UNIT: f64 = f64::EPSILON / 2.0;

// Exponents with larger numerators/denominators are never attempted exactly.
const MAX_EXACT_EXPONENT: i64 = 4096;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.5"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num::pow(BigInt::from(10), frac.len());
        let frac_part = Rational::new(frac_num, scale);
        let whole = Rational::from_integer(whole.abs());
        let v = whole + frac_part;
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical text form: `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    to_f64(&Rational::from_integer(top)).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational, robust to huge numerators/denominators.
pub fn ln_rational(r: &Rational) -> f64 {
    debug_assert!(r.is_positive());
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

/// `ln(1 + x)` for rational `x > -1`, accurate near zero.
pub fn ln1p_rational(x: &Rational) -> f64 {
    if x.abs() < int(1) {
        to_f64(x).ln_1p()
    } else {
        ln_rational(&(x + int(1)))
    }
}

/// `x^n` for an integer exponent (negative allowed when `x != 0`).
pub fn powi(x: &Rational, n: i64) -> Rational {
    let e = n.unsigned_abs() as usize;
    let num = num::pow(x.numer().clone(), e);
    let den = num::pow(x.denom().clone(), e);
    if n >= 0 {
        Rational::new(num, den)
    } else {
        Rational::new(den, num)
    }
}

fn exact_root_int(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(k);
    if num::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

/// Exact `k`-th root of a non-negative rational, if it is rational.
pub fn exact_root(x: &Rational, k: u32) -> Option<Rational> {
    let n = exact_root_int(x.numer(), k)?;
    let d = exact_root_int(x.denom(), k)?;
    Some(Rational::new(n, d))
}

fn small_parts(e: &Rational) -> Option<(i64, u32)> {
    let r = e.numer().to_i64()?;
    let s = e.denom().to_i64()?;
    if r.abs() > MAX_EXACT_EXPONENT || s > MAX_EXACT_EXPONENT {
        return None;
    }
    Some((r, s as u32))
}

/// `x^e` for `x ≥ 0` and rational `e`; exact whenever the result is rational.
pub fn pow_rat(x: &Rational, e: &Rational) -> ExtReal {
    if e.is_zero() {
        return ExtReal::one();
    }
    if x.is_zero() {
        return if e.is_positive() {
            ExtReal::zero()
        } else {
            ExtReal::Infinity
        };
    }
    if x.is_one() {
        return ExtReal::one();
    }
    if let Some((r, s)) = small_parts(e) {
        if let Some(root) = exact_root(x, s) {
            return ExtReal::Exact(powi(&root, r));
        }
    }
    let ef = to_f64(e);
    let l = ln_rational(x);
    let v = (ef * l).exp();
    ExtReal::approx(v, OP_ERR + 4.0 * UNIT * (1.0 + (ef * l).abs()))
}

/// Exact comparison of `base^e` against `rhs`, for `base > 0`, `rhs > 0`.
pub fn cmp_pow(base: &Rational, e: &Rational, rhs: &Rational) -> Ordering {
    debug_assert!(base.is_positive() && rhs.is_positive());
    match small_parts(e) {
        Some((r, s)) => powi(base, r).cmp(&powi(rhs, s as i64)),
        None => {
            let l = to_f64(e) * ln_rational(base);
            l.partial_cmp(&ln_rational(rhs)).unwrap_or(Ordering::Equal)
        }
    }
}

/// Exact comparison of `c1·t^e1` against `c2·t^e2` at `t > 0`.
pub fn cmp_power_values(c1: &Rational, e1: &Rational, c2: &Rational, e2: &Rational, t: &Rational) -> Ordering {
    match (c1.is_zero(), c2.is_zero()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        // c1 t^e1 vs c2 t^e2  <=>  t^(e1-e2) vs c2/c1
        (false, false) => cmp_pow(t, &(e1 - e2), &(c2 / c1)),
    }
}

/// Non-negative extended real: exact, approximate with a relative error
/// bound, or `+∞`.
#[derive(Clone, Debug)]
pub enum ExtReal {
    Exact(Rational),
    Approx { value: f64, rel_err: f64 },
    Infinity,
}

impl ExtReal {
    pub fn zero() -> Self {
        ExtReal::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        ExtReal::Exact(Rational::one())
    }

    pub fn approx(value: f64, rel_err: f64) -> Self {
        if value.is_infinite() {
            return ExtReal::Infinity;
        }
        ExtReal::Approx {
            value: value.max(0.0),
            rel_err,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ExtReal::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExtReal::Exact(r) => r.is_zero(),
            ExtReal::Approx { value, .. } => *value == 0.0,
            ExtReal::Infinity => false,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            ExtReal::Exact(r) => Some(r),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Exact(r) => to_f64(r),
            ExtReal::Approx { value, .. } => *value,
            ExtReal::Infinity => f64::INFINITY,
        }
    }

    /// Relative error bound; zero for exact values and `+∞`.
    pub fn rel_err(&self) -> f64 {
        match self {
            ExtReal::Approx { rel_err, .. } => *rel_err,
            _ => 0.0,
        }
    }

    pub fn add(&self, other: &ExtReal) -> ExtReal {
        use ExtReal::*;
        match (self, other) {
            (Infinity, _) | (_, Infinity) => Infinity,
            (Exact(a), Exact(b)) => Exact(a + b),
            _ => ExtReal::approx(
                self.to_f64() + other.to_f64(),
                self.rel_err().max(other.rel_err()) + OP_ERR,
            ),
        }
    }

    /// Product with the measure-theoretic convention `0·∞ = 0`.
    pub fn mul(&self, other: &ExtReal) -> ExtReal {
        use ExtReal::*;
        if self.is_zero() || other.is_zero() {
            return ExtReal::zero();
        }
        match (self, other) {
            (Infinity, _) | (_, Infinity) => Infinity,
            (Exact(a), Exact(b)) => Exact(a * b),
            _ => ExtReal::approx(
                self.to_f64() * other.to_f64(),
                self.rel_err() + other.rel_err() + OP_ERR,
            ),
        }
    }

    pub fn mul_rat(&self, k: &Rational) -> ExtReal {
        self.mul(&ExtReal::Exact(k.clone()))
    }

    /// Quotient with `x/0 = ∞` for `x > 0`, `0/y = 0`, and `∞/∞` undefined
    /// (reported as `∞`).
    pub fn div(&self, other: &ExtReal) -> ExtReal {
        use ExtReal::*;
        if self.is_zero() {
            return ExtReal::zero();
        }
        if other.is_zero() {
            return Infinity;
        }
        match (self, other) {
            (Infinity, _) => Infinity,
            (_, Infinity) => ExtReal::zero(),
            (Exact(a), Exact(b)) => Exact(a / b),
            _ => ExtReal::approx(
                self.to_f64() / other.to_f64(),
                self.rel_err() + other.rel_err() + OP_ERR,
            ),
        }
    }

    /// `self^e` for rational `e`.
    pub fn pow(&self, e: &Rational) -> ExtReal {
        if e.is_zero() {
            return ExtReal::one();
        }
        match self {
            ExtReal::Exact(r) => pow_rat(r, e),
            ExtReal::Infinity => {
                if e.is_positive() {
                    ExtReal::Infinity
                } else {
                    ExtReal::zero()
                }
            }
            ExtReal::Approx { value, rel_err } => {
                if *value == 0.0 {
                    return if e.is_positive() {
                        ExtReal::zero()
                    } else {
                        ExtReal::Infinity
                    };
                }
                let ef = to_f64(e);
                let v = value.powf(ef);
                let l = (ef * value.ln()).abs();
                ExtReal::approx(v, ef.abs() * rel_err + OP_ERR + 4.0 * UNIT * (1.0 + l))
            }
        }
    }

    pub fn max(&self, other: &ExtReal) -> ExtReal {
        if self.cmp_value(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// Sum of non-negative terms; approximate error is charged once for the
    /// whole reduction.
    pub fn sum<'a, I: IntoIterator<Item = &'a ExtReal>>(terms: I) -> ExtReal {
        let mut exact = Rational::zero();
        let mut approx = 0.0f64;
        let mut max_err = 0.0f64;
        let mut n_approx = 0usize;
        for t in terms {
            match t {
                ExtReal::Exact(r) => exact += r,
                ExtReal::Approx { value, rel_err } => {
                    approx += value;
                    max_err = max_err.max(*rel_err);
                    n_approx += 1;
                }
                ExtReal::Infinity => return ExtReal::Infinity,
            }
        }
        if n_approx == 0 {
            ExtReal::Exact(exact)
        } else {
            ExtReal::approx(
                approx + to_f64(&exact),
                max_err + OP_ERR + (n_approx as f64 + 1.0) * UNIT,
            )
        }
    }

    /// Total order by value (`+∞` largest); exact when both sides are exact.
    pub fn cmp_value(&self, other: &ExtReal) -> Ordering {
        use ExtReal::*;
        match (self, other) {
            (Infinity, Infinity) => Ordering::Equal,
            (Infinity, _) => Ordering::Greater,
            (_, Infinity) => Ordering::Less,
            (Exact(a), Exact(b)) => a.cmp(b),
            _ => self.to_f64().partial_cmp(&other.to_f64()).unwrap_or(Ordering::Equal),
        }
    }

    /// `self ≤ other`, exactly when both are exact, otherwise with relative
    /// slack `tol` widened by the carried error bounds.
    pub fn le_tol(&self, other: &ExtReal, tol: f64) -> bool {
        use ExtReal::*;
        match (self, other) {
            (_, Infinity) => true,
            (Infinity, _) => false,
            (Exact(a), Exact(b)) => a <= b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                let slack = tol + self.rel_err() + other.rel_err();
                a <= b + slack * a.abs().max(b.abs())
            }
        }
    }

    /// Equality, exact when both are exact, otherwise within relative `tol`.
    pub fn approx_eq(&self, other: &ExtReal, tol: f64) -> bool {
        match (self, other) {
            (ExtReal::Exact(a), ExtReal::Exact(b)) => a == b,
            _ => self.le_tol(other, tol) && other.le_tol(self, tol),
        }
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        use ExtReal::*;
        match (self, other) {
            (Exact(a), Exact(b)) => a == b,
            (Infinity, Infinity) => true,
            (Approx { value: a, .. }, Approx { value: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl From<Rational> for ExtReal {
    fn from(r: Rational) -> Self {
        ExtReal::Exact(r)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Exact(r) => write!(f, "{}", format_rational(r)),
            ExtReal::Approx { value, rel_err } => write!(f, "{value:.12} (±{rel_err:.1e} rel)"),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Exact(r) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("kind", "exact")?;
                m.serialize_entry("value", &format_rational(r))?;
                m.end()
            }
            ExtReal::Approx { value, rel_err } => {
                let mut m = s.serialize_map(Some(3))?;
                m.serialize_entry("error_bound", rel_err)?;
                m.serialize_entry("kind", "approx")?;
                m.serialize_entry("value", value)?;
                m.end()
            }
            ExtReal::Infinity => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("kind", "infinity")?;
                m.end()
            }
        }
    }
}

/// Serializes a rational as its canonical `"p/q"` string.
pub fn serialize_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// The binary64 value `x` as an exact rational.
pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

/// The simplest rational (smallest denominator) in the closed interval
/// `[lo, hi]`, with `0 ≤ lo ≤ hi`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if fl.clone() + int(1) <= *hi {
        return fl + int(1);
    }
    // Both in (fl, fl + 1): recurse on reciprocals of the fractional parts.
    let lo_f = lo - &fl;
    let hi_f = hi - &fl;
    let inner = simplest_between(&hi_f.recip(), &lo_f.recip());
    fl + inner.recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("0.5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&rat(-3, 9)), "-1/3");
    }

    #[test]
    fn exact_powers() {
        assert_eq!(pow_rat(&rat(1, 100), &rat(1, 2)), ExtReal::Exact(rat(1, 10)));
        assert_eq!(pow_rat(&int(8), &rat(-2, 3)), ExtReal::Exact(rat(1, 4)));
        assert_eq!(pow_rat(&int(0), &rat(-1, 2)), ExtReal::Infinity);
        let r2 = pow_rat(&int(2), &rat(1, 2));
        assert!(!r2.is_exact());
        assert!((r2.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn pow_comparison_is_exact() {
        // 2^(1/2) < 3/2 < 2^(2/3)
        assert_eq!(cmp_pow(&int(2), &rat(1, 2), &rat(3, 2)), Ordering::Less);
        assert_eq!(cmp_pow(&int(2), &rat(2, 3), &rat(3, 2)), Ordering::Greater);
        assert_eq!(cmp_pow(&int(4), &rat(1, 2), &int(2)), Ordering::Equal);
    }

    #[test]
    fn infinity_conventions() {
        let inf = ExtReal::Infinity;
        assert!(inf.add(&ExtReal::one()).is_infinite());
        assert!(inf.mul(&ExtReal::zero()).is_zero());
        assert!(ExtReal::one().le_tol(&inf, 0.0));
        assert!(!inf.le_tol(&ExtReal::one(), 0.0));
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&rat(199, 100), &rat(201, 100)), int(2));
        assert_eq!(simplest_between(&rat(3, 10), &rat(4, 10)), rat(1, 3));
        assert_eq!(simplest_between(&rat(1, 2), &rat(1, 2)), rat(1, 2));
    }

    #[test]
    fn approx_sum_tracks_error() {
        let terms = [ExtReal::approx(1.0, 1e-12), ExtReal::Exact(rat(1, 2))];
        let s = ExtReal::sum(terms.iter());
        assert!((s.to_f64() - 1.5).abs() < 1e-15);
        assert!(s.rel_err() >= 1e-12);
    }
}
