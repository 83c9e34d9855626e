//! Closed-form integrals and suprema of single power pieces.

use num::{One, Signed, Zero};

use crate::ext::{ln1p_rational, pow_rat, to_f64, ExtReal, Rational, OP_ERR};

/// `∫_a^b c·t^β dt` for `0 ≤ a < b ≤ ∞` (`b == None` is `+∞`).
///
/// Exact whenever `a^(β+1)` and `b^(β+1)` are rational; the logarithmic case
/// `β = -1` is always approximate. Divergent improper integrals give `+∞`.
pub fn power_integral(c: &ExtReal, beta: &Rational, a: &Rational, b: Option<&Rational>) -> ExtReal {
    if c.is_zero() {
        return ExtReal::zero();
    }
    let k = beta + Rational::one();
    if k.is_zero() {
        return match b {
            Some(b) if a.is_positive() => {
                // ln(b/a) = ln1p((b - a)/a)
                let l = ln1p_rational(&((b - a) / a));
                c.mul(&ExtReal::approx(l, OP_ERR))
            }
            _ => ExtReal::Infinity,
        };
    }
    if k.is_positive() {
        let Some(b) = b else {
            return ExtReal::Infinity;
        };
        let bk = pow_rat(b, &k);
        if a.is_zero() {
            return c.mul(&bk).mul(&ExtReal::Exact(k.recip()));
        }
        let ak = pow_rat(a, &k);
        if let (ExtReal::Exact(x), ExtReal::Exact(y)) = (&bk, &ak) {
            return c.mul(&ExtReal::Exact((x - y) / &k));
        }
        c.mul(&stable_difference(a, b, &k, &ak))
    } else {
        if a.is_zero() {
            return ExtReal::Infinity;
        }
        let ak = pow_rat(a, &k);
        let Some(b) = b else {
            // ∫_a^∞ t^β = a^k / |k|
            return c.mul(&ak).mul(&ExtReal::Exact((-&k).recip()));
        };
        let bk = pow_rat(b, &k);
        if let (ExtReal::Exact(x), ExtReal::Exact(y)) = (&bk, &ak) {
            return c.mul(&ExtReal::Exact((x - y) / &k));
        }
        c.mul(&stable_difference(a, b, &k, &ak))
    }
}

/// `(b^k - a^k)/k` for `0 < a < b`, evaluated as `a^k·expm1(k·ln(b/a))/k`
/// so that close endpoints do not cancel.
fn stable_difference(a: &Rational, b: &Rational, k: &Rational, ak: &ExtReal) -> ExtReal {
    let kf = to_f64(k);
    let l = ln1p_rational(&((b - a) / a));
    let x = kf * l;
    let e = x.exp_m1() / kf;
    let rel = OP_ERR + 8.0 * f64::EPSILON * (1.0 + x.abs());
    ak.mul(&ExtReal::approx(e, rel))
}

/// `sup { c·t^e : t ∈ [a, b) }`, taking closure limits at the endpoints.
pub fn sup_power(c: &Rational, e: &Rational, a: &Rational, b: Option<&Rational>) -> ExtReal {
    if c.is_zero() {
        return ExtReal::zero();
    }
    let cc = ExtReal::Exact(c.clone());
    if e.is_zero() {
        cc
    } else if e.is_positive() {
        match b {
            Some(b) => pow_rat(b, e).mul(&cc),
            None => ExtReal::Infinity,
        }
    } else if a.is_zero() {
        ExtReal::Infinity
    } else {
        pow_rat(a, e).mul(&cc)
    }
}
