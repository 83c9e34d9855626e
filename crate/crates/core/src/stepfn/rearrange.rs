use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{Signed, Zero};

use super::calculus::power_integral;
use super::{Interval, MonotoneProfile, Piece, Ppf, StepFunction};
use crate::error::{Error, Result};
use crate::ext::{int, pow_rat, simplest_between, to_f64, ExtReal, Rational, OP_ERR};

/// Measure of `{t ∈ piece : c·t^α > s}` (or `≥ s` when `strict` is false).
fn piece_measure_above(p: &Piece, s: &Rational, strict: bool) -> ExtReal {
    let full = || match p.interval.length() {
        Some(l) => ExtReal::Exact(l),
        None => ExtReal::Infinity,
    };
    if p.exponent.is_zero() {
        let hit = if strict { p.coeff > *s } else { p.coeff >= *s };
        return if hit { full() } else { ExtReal::zero() };
    }
    if s.is_zero() {
        // c·t^α > 0 everywhere on the piece except possibly at t = 0
        return full();
    }
    // c·t^α > s  <=>  t^α > s/c; the crossing point is (s/c)^(1/α).
    let threshold = pow_rat(&(s / &p.coeff), &p.exponent.recip());
    let a = &p.interval.start;
    let b = p.interval.end.as_ref();
    if p.exponent.is_negative() {
        // region t < threshold
        match &threshold {
            ExtReal::Exact(th) => {
                let hi = match b {
                    Some(b) if b < th => b.clone(),
                    _ => th.clone(),
                };
                ExtReal::Exact(if hi > *a { hi - a } else { Rational::zero() })
            }
            ExtReal::Infinity => full(),
            ExtReal::Approx { value, rel_err } => {
                let bf = b.map_or(f64::INFINITY, to_f64);
                let af = to_f64(a);
                if *value >= bf {
                    return full();
                }
                let m = (value - af).max(0.0);
                let rel = if m > 0.0 { value * rel_err / m + OP_ERR } else { OP_ERR };
                ExtReal::approx(m, rel)
            }
        }
    } else {
        // region t > threshold
        let Some(b) = b else {
            return ExtReal::Infinity;
        };
        match &threshold {
            ExtReal::Exact(th) => {
                let lo = if th > a { th.clone() } else { a.clone() };
                ExtReal::Exact(if *b > lo { b - lo } else { Rational::zero() })
            }
            ExtReal::Infinity => ExtReal::zero(),
            ExtReal::Approx { value, rel_err } => {
                let af = to_f64(a);
                if *value <= af {
                    return full();
                }
                let m = (to_f64(b) - value).max(0.0);
                let rel = if m > 0.0 { value * rel_err / m + OP_ERR } else { OP_ERR };
                ExtReal::approx(m, rel)
            }
        }
    }
}

/// Distribution function `μ_f(s) = λ{t : f(t) > s}`.
pub fn distribution(f: &Ppf, s: &Rational) -> ExtReal {
    debug_assert!(!s.is_negative());
    let parts: Vec<ExtReal> = f.pieces.iter().map(|p| piece_measure_above(p, s, true)).collect();
    ExtReal::sum(parts.iter())
}

/// `λ{t : f(t) ≥ s}`, the left limit of the distribution function at `s > 0`.
pub fn superlevel_measure(f: &Ppf, s: &Rational) -> ExtReal {
    let parts: Vec<ExtReal> = f.pieces.iter().map(|p| piece_measure_above(p, s, false)).collect();
    ExtReal::sum(parts.iter())
}

/// Non-increasing rearrangement of a step function: distinct values sorted
/// descending, each occupying the total measure of its level set.
pub fn rearrange_step(f: &StepFunction) -> MonotoneProfile {
    // value -> total measure (None = infinite)
    let mut levels: BTreeMap<Rational, Option<Rational>> = BTreeMap::new();
    for p in f.pieces() {
        let entry = levels.entry(p.coeff.clone()).or_insert_with(|| Some(Rational::zero()));
        *entry = match (entry.take(), p.interval.length()) {
            (Some(acc), Some(l)) => Some(acc + l),
            _ => None,
        };
    }
    let mut pieces = Vec::with_capacity(levels.len());
    let mut cursor = Rational::zero();
    for (value, measure) in levels.into_iter().rev() {
        match measure {
            Some(m) => {
                let end = &cursor + &m;
                pieces.push(Piece {
                    interval: Interval {
                        start: cursor.clone(),
                        end: Some(end.clone()),
                    },
                    coeff: value,
                    exponent: Rational::zero(),
                });
                cursor = end;
            }
            None => {
                pieces.push(Piece {
                    interval: Interval {
                        start: cursor.clone(),
                        end: None,
                    },
                    coeff: value,
                    exponent: Rational::zero(),
                });
                break;
            }
        }
    }
    MonotoneProfile(Ppf { pieces })
}

/// Exact rearrangement when one is available: step functions are
/// rearranged, already non-increasing profiles are returned as they are.
pub fn rearrange(f: &Ppf) -> Result<MonotoneProfile> {
    if f.is_step() {
        return Ok(rearrange_step(&StepFunction(f.clone())));
    }
    MonotoneProfile::new(f.clone()).map_err(|_| {
        Error::NotRearrangeable("mixed power pieces are only rearranged pointwise (rearrange_eval)".into())
    })
}

/// `f*(t) = inf { s ≥ 0 : μ_f(s) ≤ t }` for `t > 0`.
///
/// Step functions are answered exactly. Otherwise `s` is bisected to
/// relative width `tol`, and the bracket is then tested for an exact
/// answer: a plateau value of `f`, or the simplest rational in the bracket
/// when the distribution function is continuous and strictly decreasing
/// there. Failing that the midpoint is returned as an approximation.
pub fn rearrange_eval(f: &Ppf, t: &Rational, tol: f64) -> ExtReal {
    debug_assert!(t.is_positive());
    if f.is_step() {
        return rearrange_step(&StepFunction(f.clone())).evaluate(t);
    }
    let exceeds = |s: &Rational| distribution(f, s).cmp_value(&ExtReal::Exact(t.clone())) == Ordering::Greater;
    if !exceeds(&Rational::zero()) {
        return ExtReal::zero();
    }
    let unbounded_growth = f
        .pieces
        .iter()
        .any(|p| p.exponent.is_positive() && p.interval.end.is_none());
    if unbounded_growth {
        return ExtReal::Infinity;
    }
    let mut lo = Rational::zero();
    let mut hi = int(1);
    let mut doublings = 0;
    while exceeds(&hi) {
        lo = hi.clone();
        hi *= int(2);
        doublings += 1;
        if doublings > 4000 {
            return ExtReal::Infinity;
        }
    }
    let tol = tol.max(1e-15);
    while to_f64(&(&hi - &lo)) > tol * to_f64(&hi) {
        let mid = (&lo + &hi) / int(2);
        if exceeds(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let target = ExtReal::Exact(t.clone());
    let mut candidates: Vec<Rational> = f
        .pieces
        .iter()
        .filter(|p| p.exponent.is_zero())
        .map(|p| p.coeff.clone())
        .filter(|v| *v >= lo && *v <= hi)
        .collect();
    let simple = simplest_between(&lo, &hi);
    candidates.push(simple.clone());
    for v in candidates {
        if v.is_zero() {
            continue;
        }
        let at = distribution(f, &v);
        let (ExtReal::Exact(mu), ExtReal::Exact(tt)) = (&at, &target) else {
            continue;
        };
        if mu > tt {
            continue;
        }
        let left = superlevel_measure(f, &v);
        let jump = left.cmp_value(&target) == Ordering::Greater && left.is_exact() || left.is_infinite();
        let strictly_decreasing = mu == tt
            && f.pieces
                .iter()
                .any(|p| !p.exponent.is_zero() && value_range_contains(p, &v));
        if jump || strictly_decreasing {
            return ExtReal::Exact(v);
        }
    }
    let mid = to_f64(&((&lo + &hi) / int(2)));
    ExtReal::approx(mid, tol)
}

/// Whether `v` lies strictly inside the range of values of a power piece.
fn value_range_contains(p: &Piece, v: &Rational) -> bool {
    let (at_start, at_end) = (
        p.value_at(&p.interval.start),
        match &p.interval.end {
            Some(e) => p.value_at(e),
            None => {
                if p.exponent.is_negative() {
                    ExtReal::zero()
                } else {
                    ExtReal::Infinity
                }
            }
        },
    );
    let v = ExtReal::Exact(v.clone());
    let (lo, hi) = if at_start.cmp_value(&at_end) == Ordering::Less {
        (at_start, at_end)
    } else {
        (at_end, at_start)
    };
    lo.cmp_value(&v) == Ordering::Less && v.cmp_value(&hi) == Ordering::Less
}

/// `∫_0^t g dλ`; `t == None` integrates over the whole half-line.
pub fn partial_integral(g: &Ppf, t: Option<&Rational>) -> ExtReal {
    let mut parts = Vec::with_capacity(g.pieces.len());
    for p in &g.pieces {
        let a = &p.interval.start;
        if let Some(t) = t {
            if a >= t {
                break;
            }
        }
        let b = match (p.interval.end.as_ref(), t) {
            (Some(e), Some(t)) => Some(if e < t { e } else { t }),
            (Some(e), None) => Some(e),
            (None, t) => t,
        };
        parts.push(power_integral(&ExtReal::Exact(p.coeff.clone()), &p.exponent, a, b));
    }
    ExtReal::sum(parts.iter())
}

/// `μ_f = μ_g`, decided through canonical rearrangements.
pub fn equimeasurable(f: &StepFunction, g: &StepFunction) -> bool {
    rearrange_step(f) == rearrange_step(g)
}
