//! Exact calculus of non-negative piecewise-power functions on `[0, ∞)`.
//!
//! A [`Ppf`] is a finite, sorted list of disjoint half-open pieces
//! `[a, b)` each carrying `c·t^α`; the function vanishes off the pieces.
//! [`StepFunction`] is the case where every exponent is zero, and
//! [`MonotoneProfile`] a function certified non-increasing on `[0, ∞)`,
//! the canonical form of a non-increasing rearrangement.

mod algebra;
pub mod calculus;
pub mod io;
mod rearrange;

use std::fmt;
use std::ops::Deref;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ext::{cmp_power_values, format_rational, int, pow_rat, ExtReal, Rational};

pub use rearrange::{
    distribution, equimeasurable, partial_integral, rearrange, rearrange_eval, rearrange_step, superlevel_measure,
};

/// Half-open interval `[start, end)`; `end == None` stands for `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    start: Rational,
    end: Option<Rational>,
}

impl Interval {
    pub fn new(start: Rational, end: Option<Rational>) -> Result<Self> {
        if start.is_negative() {
            return Err(Error::InvalidInterval(format!(
                "start {} is negative",
                format_rational(&start)
            )));
        }
        if let Some(e) = &end {
            if *e <= start {
                return Err(Error::InvalidInterval(format!(
                    "[{}, {}) is empty",
                    format_rational(&start),
                    format_rational(e)
                )));
            }
        }
        Ok(Interval { start, end })
    }

    /// `[a, b)`; panics on an empty or negative interval.
    pub fn bounded(a: Rational, b: Rational) -> Self {
        Interval::new(a, Some(b)).expect("valid bounded interval")
    }

    /// `[a, ∞)`.
    pub fn from(a: Rational) -> Self {
        Interval::new(a, None).expect("valid unbounded interval")
    }

    pub fn whole_line() -> Self {
        Interval::from(Rational::zero())
    }

    pub fn start(&self) -> &Rational {
        &self.start
    }

    pub fn end(&self) -> Option<&Rational> {
        self.end.as_ref()
    }

    pub fn is_bounded(&self) -> bool {
        self.end.is_some()
    }

    /// Lebesgue measure, `None` for unbounded intervals.
    pub fn length(&self) -> Option<Rational> {
        self.end.as_ref().map(|e| e - &self.start)
    }

    pub fn contains(&self, t: &Rational) -> bool {
        *t >= self.start && self.end.as_ref().is_none_or(|e| t < e)
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let start = (&self.start).max(&other.start).clone();
        let end = match (&self.end, &other.end) {
            (None, None) => None,
            (Some(e), None) | (None, Some(e)) => Some(e.clone()),
            (Some(a), Some(b)) => Some(a.min(b).clone()),
        };
        Interval::new(start, end).ok()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.end {
            Some(e) => write!(f, "[{}, {})", format_rational(&self.start), format_rational(e)),
            None => write!(f, "[{}, inf)", format_rational(&self.start)),
        }
    }
}

/// One piece `c·t^α` on an interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Piece {
    pub interval: Interval,
    pub coeff: Rational,
    pub exponent: Rational,
}

impl Piece {
    pub fn new(interval: Interval, coeff: Rational, exponent: Rational) -> Result<Self> {
        if coeff.is_negative() {
            return Err(Error::NegativeCoefficient(format_rational(&coeff)));
        }
        Ok(Piece {
            interval,
            coeff,
            exponent,
        })
    }

    pub fn constant(interval: Interval, value: Rational) -> Result<Self> {
        Piece::new(interval, value, Rational::zero())
    }

    pub fn is_constant(&self) -> bool {
        self.exponent.is_zero()
    }

    /// `c·t^α` at a point of the closure of the piece.
    pub fn value_at(&self, t: &Rational) -> ExtReal {
        if self.coeff.is_zero() {
            return ExtReal::zero();
        }
        if self.exponent.is_zero() {
            return ExtReal::Exact(self.coeff.clone());
        }
        pow_rat(t, &self.exponent).mul_rat(&self.coeff)
    }

    fn same_formula(&self, other: &Piece) -> bool {
        self.coeff == other.coeff && self.exponent == other.exponent
    }

    fn with_interval(&self, interval: Interval) -> Piece {
        Piece {
            interval,
            coeff: self.coeff.clone(),
            exponent: self.exponent.clone(),
        }
    }
}

/// Non-negative piecewise-power function on `[0, ∞)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Ppf {
    pieces: Vec<Piece>,
}

impl Ppf {
    pub fn zero() -> Self {
        Ppf { pieces: Vec::new() }
    }

    /// Sorts, rejects overlaps, drops zero pieces and merges touching pieces
    /// with identical formulas.
    pub fn normalize(mut raw: Vec<Piece>) -> Result<Self> {
        for p in &raw {
            if p.coeff.is_negative() {
                return Err(Error::NegativeCoefficient(format_rational(&p.coeff)));
            }
        }
        raw.sort_by(|a, b| a.interval.start.cmp(&b.interval.start));
        for w in raw.windows(2) {
            let overlaps = w[0].interval.end.as_ref().is_none_or(|e| *e > w[1].interval.start);
            if overlaps {
                return Err(Error::OverlappingPieces(
                    w[0].interval.to_string(),
                    w[1].interval.to_string(),
                ));
            }
        }
        let mut pieces: Vec<Piece> = Vec::with_capacity(raw.len());
        for p in raw.into_iter().filter(|p| !p.coeff.is_zero()) {
            if let Some(last) = pieces.last_mut() {
                if last.same_formula(&p) && last.interval.end.as_ref() == Some(&p.interval.start) {
                    last.interval.end = p.interval.end;
                    continue;
                }
            }
            pieces.push(p);
        }
        Ok(Ppf { pieces })
    }

    /// Step function from `(a, b, c)` triples; `b == None` means `+∞`.
    pub fn step(blocks: &[(Rational, Option<Rational>, Rational)]) -> Result<Self> {
        let raw = blocks
            .iter()
            .map(|(a, b, c)| Piece::constant(Interval::new(a.clone(), b.clone())?, c.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ppf::normalize(raw)
    }

    /// `c·χ_[a,b)`.
    pub fn indicator(a: Rational, b: Rational, c: Rational) -> Self {
        Ppf::step(&[(a, Some(b), c)]).expect("valid indicator")
    }

    /// `c·t^α` on `[a, b)`.
    pub fn power(a: Rational, b: Option<Rational>, c: Rational, alpha: Rational) -> Result<Self> {
        Ppf::normalize(vec![Piece::new(Interval::new(a, b)?, c, alpha)?])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn into_pieces(self) -> Vec<Piece> {
        self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_step(&self) -> bool {
        self.pieces.iter().all(Piece::is_constant)
    }

    /// Smallest `T` with `f = 0` on `[T, ∞)`; `None` if the support is unbounded.
    pub fn support_end(&self) -> Option<Rational> {
        match self.pieces.last() {
            None => Some(Rational::zero()),
            Some(p) => p.interval.end.clone(),
        }
    }

    /// Sorted, de-duplicated finite breakpoints.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(2 * self.pieces.len());
        for p in &self.pieces {
            out.push(p.interval.start.clone());
            if let Some(e) = &p.interval.end {
                out.push(e.clone());
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn piece_at(&self, t: &Rational) -> Option<&Piece> {
        let idx = self.pieces.partition_point(|p| p.interval.start <= *t);
        if idx == 0 {
            return None;
        }
        let p = &self.pieces[idx - 1];
        p.interval.contains(t).then_some(p)
    }

    /// `f(t)`, right-continuous at breakpoints. `+∞` only at `t = 0` for a
    /// piece `c·t^α` with `α < 0` starting at the origin.
    pub fn evaluate(&self, t: &Rational) -> ExtReal {
        debug_assert!(!t.is_negative());
        match self.piece_at(t) {
            Some(p) => p.value_at(t),
            None => ExtReal::zero(),
        }
    }

    /// `f·χ_I`.
    pub fn restrict(&self, interval: &Interval) -> Ppf {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| p.interval.intersect(interval).map(|i| p.with_interval(i)))
            .collect();
        Ppf { pieces }
    }

    /// `(D_t f)(s) = f(ts)`. Fails when some `t^α` is irrational, since the
    /// dilated coefficient would leave the exact model.
    pub fn dilate(&self, t: &Rational) -> Result<Ppf> {
        if !t.is_positive() {
            return Err(Error::InvalidInterval(format!(
                "dilation factor {} must be positive",
                format_rational(t)
            )));
        }
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let factor = match pow_rat(t, &p.exponent) {
                ExtReal::Exact(r) => r,
                _ => {
                    return Err(Error::UnsupportedCombination(format!(
                        "{}^{} is irrational",
                        format_rational(t),
                        format_rational(&p.exponent)
                    )))
                }
            };
            let start = &p.interval.start / t;
            let end = p.interval.end.as_ref().map(|e| e / t);
            pieces.push(Piece {
                interval: Interval { start, end },
                coeff: &p.coeff * factor,
                exponent: p.exponent.clone(),
            });
        }
        Ok(Ppf { pieces })
    }
}

impl fmt::Display for Ppf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "0");
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if p.exponent.is_zero() {
                write!(f, "{}·χ{}", format_rational(&p.coeff), p.interval)?;
            } else {
                write!(
                    f,
                    "{}·t^({})·χ{}",
                    format_rational(&p.coeff),
                    format_rational(&p.exponent),
                    p.interval
                )?;
            }
        }
        Ok(())
    }
}

/// A [`Ppf`] whose exponents are all zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct StepFunction(Ppf);

impl StepFunction {
    pub fn zero() -> Self {
        StepFunction(Ppf::zero())
    }

    pub fn from_blocks(blocks: &[(Rational, Option<Rational>, Rational)]) -> Result<Self> {
        Ppf::step(blocks).map(StepFunction)
    }

    /// Distinct non-zero values.
    pub fn values(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.0.pieces.iter().map(|p| p.coeff.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn as_ppf(&self) -> &Ppf {
        &self.0
    }

    pub fn into_ppf(self) -> Ppf {
        self.0
    }
}

impl TryFrom<Ppf> for StepFunction {
    type Error = Error;

    fn try_from(f: Ppf) -> Result<Self> {
        if f.is_step() {
            Ok(StepFunction(f))
        } else {
            Err(Error::NotStepFunction)
        }
    }
}

impl Deref for StepFunction {
    type Target = Ppf;

    fn deref(&self) -> &Ppf {
        &self.0
    }
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A [`Ppf`] verified non-increasing on `[0, ∞)`: pieces are contiguous from
/// the origin, each piece is non-increasing in `t`, and values never jump up
/// at a breakpoint.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MonotoneProfile(Ppf);

impl MonotoneProfile {
    pub fn new(f: Ppf) -> Result<Self> {
        let mut expected_start = Rational::zero();
        for (i, p) in f.pieces.iter().enumerate() {
            if p.interval.start != expected_start {
                return Err(Error::NotMonotone(format!("gap before {}", p.interval)));
            }
            if p.exponent.is_positive() {
                return Err(Error::NotMonotone(format!("increasing piece on {}", p.interval)));
            }
            if let Some(next) = f.pieces.get(i + 1) {
                // Left limit of this piece at the breakpoint must dominate the
                // value of the next piece there.
                let at = next.interval.start.clone();
                let order = cmp_power_values(&p.coeff, &p.exponent, &next.coeff, &next.exponent, &at);
                if order == std::cmp::Ordering::Less {
                    return Err(Error::NotMonotone(format!("jump up at {}", format_rational(&at))));
                }
            }
            match &p.interval.end {
                Some(e) => expected_start = e.clone(),
                None => {
                    if i + 1 != f.pieces.len() {
                        return Err(Error::NotMonotone("piece after unbounded piece".into()));
                    }
                }
            }
        }
        Ok(MonotoneProfile(f))
    }

    /// `g(0)` as a limit from the right, i.e. `‖g‖_∞`.
    pub fn value_at_zero(&self) -> ExtReal {
        match self.0.pieces.first() {
            None => ExtReal::zero(),
            Some(p) if p.exponent.is_negative() => ExtReal::Infinity,
            Some(p) => ExtReal::Exact(p.coeff.clone()),
        }
    }

    pub fn as_ppf(&self) -> &Ppf {
        &self.0
    }

    pub fn into_ppf(self) -> Ppf {
        self.0
    }

    /// Step profile if every exponent is zero.
    pub fn as_step(&self) -> Option<StepFunction> {
        self.0.is_step().then(|| StepFunction(self.0.clone()))
    }
}

impl Deref for MonotoneProfile {
    type Target = Ppf;

    fn deref(&self) -> &Ppf {
        &self.0
    }
}

impl fmt::Display for MonotoneProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `[0, 1)`, the local window of the amalgam split.
pub fn unit_window() -> Interval {
    Interval::bounded(Rational::zero(), int(1))
}

/// `[1, ∞)`, the global window of the amalgam split.
pub fn tail_window() -> Interval {
    Interval::from(int(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::rat;

    fn blocks(b: &[(i64, i64, i64)]) -> Ppf {
        Ppf::step(
            &b.iter()
                .map(|&(a, e, c)| (int(a), Some(int(e)), int(c)))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn normalize_merges_equal_neighbours() {
        let f = blocks(&[(0, 1, 2), (1, 3, 2)]);
        assert_eq!(f, Ppf::indicator(int(0), int(3), int(2)));
        assert_eq!(f.pieces().len(), 1);
    }

    #[test]
    fn normalize_rejects_overlap_and_negative() {
        let overlap = Ppf::step(&[(int(0), Some(int(1)), int(1)), (rat(1, 2), Some(int(2)), int(1))]);
        assert!(matches!(overlap, Err(Error::OverlappingPieces(..))));
        let neg = Ppf::step(&[(int(0), Some(int(1)), int(-1))]);
        assert!(matches!(neg, Err(Error::NegativeCoefficient(_))));
        assert!(Ppf::normalize(vec![]).unwrap().is_zero());
    }

    #[test]
    fn evaluate_is_right_continuous() {
        let f = Ppf::indicator(int(0), int(2), int(3));
        assert_eq!(f.evaluate(&int(2)), ExtReal::zero());
        assert_eq!(f.evaluate(&int(0)), ExtReal::Exact(int(3)));
        let g = Ppf::power(int(1), Some(int(4)), int(1), rat(-1, 2)).unwrap();
        assert_eq!(g.evaluate(&int(4)), ExtReal::zero());
        assert_eq!(g.evaluate(&int(1)), ExtReal::one());
        assert_eq!(g.evaluate(&rat(9, 4)), ExtReal::Exact(rat(2, 3)));
    }

    #[test]
    fn restrict_clips_pieces() {
        let f = blocks(&[(0, 1, 5), (1, 2, 2)]);
        assert_eq!(f.restrict(&unit_window()), Ppf::indicator(int(0), int(1), int(5)));
        let g = Ppf::indicator(int(0), int(3), int(2));
        assert_eq!(
            g.restrict(&Interval::from(int(1))),
            Ppf::indicator(int(1), int(3), int(2))
        );
        assert_eq!(g.restrict(&Interval::whole_line()), g);
    }

    #[test]
    fn dilation_examples() {
        let f = Ppf::indicator(int(0), int(4), int(1));
        assert_eq!(f.dilate(&int(2)).unwrap(), Ppf::indicator(int(0), int(2), int(1)));
        let g = Ppf::indicator(int(0), int(1), int(1));
        assert_eq!(g.dilate(&rat(1, 2)).unwrap(), Ppf::indicator(int(0), int(2), int(1)));
        let h = Ppf::power(int(1), Some(int(2)), int(1), int(-1)).unwrap();
        let d = h.dilate(&int(2)).unwrap();
        assert_eq!(d.pieces()[0].coeff, rat(1, 2));
        assert_eq!(*d.pieces()[0].interval.start(), rat(1, 2));
        // (D_2 h)(s) = h(2s) = 1/(2s)
        for s in [rat(1, 2), rat(3, 4)] {
            assert_eq!(d.evaluate(&s), h.evaluate(&(int(2) * &s)));
            assert_eq!(d.evaluate(&s), ExtReal::Exact((int(2) * s).recip()));
        }
        let irr = Ppf::power(int(1), Some(int(2)), int(1), rat(-1, 2)).unwrap();
        assert!(irr.dilate(&int(2)).is_err());
    }

    #[test]
    fn monotone_profile_validation() {
        assert!(MonotoneProfile::new(blocks(&[(0, 1, 5), (1, 2, 2)])).is_ok());
        assert!(MonotoneProfile::new(blocks(&[(0, 1, 2), (1, 2, 5)])).is_err());
        assert!(MonotoneProfile::new(blocks(&[(1, 2, 2)])).is_err());
        let p = Ppf::power(int(0), Some(int(1)), int(1), rat(-1, 3)).unwrap();
        let m = MonotoneProfile::new(p).unwrap();
        assert!(m.value_at_zero().is_infinite());
        // t^(-1) on [0,1) followed by 1 on [1,2): left limit 1 == 1, allowed
        let mut pieces = Ppf::power(int(0), Some(int(1)), int(1), int(-1)).unwrap().into_pieces();
        pieces.push(Piece::constant(Interval::bounded(int(1), int(2)), int(1)).unwrap());
        assert!(MonotoneProfile::new(Ppf::normalize(pieces).unwrap()).is_ok());
    }
}
