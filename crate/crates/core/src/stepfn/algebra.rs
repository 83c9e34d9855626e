use std::cmp::Ordering;

use num::{Signed, Zero};

use super::{Interval, Piece, Ppf};
use crate::error::{Error, Result};
use crate::ext::{cmp_power_values, format_rational, pow_rat, ExtReal, Rational};

impl Ppf {
    /// Pointwise sum. Pieces that overlap must share an exponent.
    pub fn add(&self, other: &Ppf) -> Result<Ppf> {
        let mut cuts: Vec<Rational> = self.breakpoints();
        cuts.extend(other.breakpoints());
        cuts.sort();
        cuts.dedup();
        let unbounded = self.support_end().is_none() || other.support_end().is_none();
        let mut raw = Vec::with_capacity(cuts.len());
        let cells = cuts
            .windows(2)
            .map(|w| Interval::bounded(w[0].clone(), w[1].clone()))
            .chain(unbounded.then(|| cuts.last().cloned().map(Interval::from)).flatten());
        for cell in cells {
            let probe = cell.start().clone();
            let formula = match (self.piece_at(&probe), other.piece_at(&probe)) {
                (None, None) => None,
                (Some(p), None) | (None, Some(p)) => Some((p.coeff.clone(), p.exponent.clone())),
                (Some(p), Some(q)) => {
                    if p.exponent != q.exponent {
                        return Err(Error::UnsupportedCombination(format!(
                            "sum of t^{} and t^{} on {}",
                            format_rational(&p.exponent),
                            format_rational(&q.exponent),
                            cell
                        )));
                    }
                    Some((&p.coeff + &q.coeff, p.exponent.clone()))
                }
            };
            if let Some((coeff, exponent)) = formula {
                raw.push(Piece {
                    interval: cell,
                    coeff,
                    exponent,
                });
            }
        }
        Ppf::normalize(raw)
    }

    /// `k·f` for `k ≥ 0`.
    pub fn scale(&self, k: &Rational) -> Result<Ppf> {
        if k.is_negative() {
            return Err(Error::NegativeCoefficient(format_rational(k)));
        }
        let raw = self
            .pieces
            .iter()
            .map(|p| Piece {
                interval: p.interval.clone(),
                coeff: &p.coeff * k,
                exponent: p.exponent.clone(),
            })
            .collect();
        Ppf::normalize(raw)
    }

    /// `min(f, v)`.
    pub fn min_with_const(&self, v: &Rational) -> Result<Ppf> {
        let mut raw = Vec::with_capacity(self.pieces.len() + 1);
        for p in &self.pieces {
            for (part, above) in split_at_level(p, v)? {
                if above {
                    raw.push(Piece {
                        interval: part.interval,
                        coeff: v.clone(),
                        exponent: Rational::zero(),
                    });
                } else {
                    raw.push(part);
                }
            }
        }
        Ppf::normalize(raw)
    }

    /// `max(f - v, 0)`. Only constant pieces can lie above `v`.
    pub fn subtract_const_clamped(&self, v: &Rational) -> Result<Ppf> {
        let mut raw = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            for (part, above) in split_at_level(p, v)? {
                if !above {
                    continue;
                }
                if !part.exponent.is_zero() && !v.is_zero() {
                    return Err(Error::UnsupportedCombination(format!(
                        "t^{} minus a constant on {}",
                        format_rational(&part.exponent),
                        part.interval
                    )));
                }
                raw.push(Piece {
                    coeff: &part.coeff - v,
                    ..part
                });
            }
        }
        Ppf::normalize(raw)
    }
}

/// Splits a piece where it crosses level `v`, tagging each part with
/// whether it lies above `v`. Fails if the crossing point is irrational.
fn split_at_level(p: &Piece, v: &Rational) -> Result<Vec<(Piece, bool)>> {
    if p.exponent.is_zero() {
        return Ok(vec![(p.clone(), p.coeff > *v)]);
    }
    if v.is_zero() {
        return Ok(vec![(p.clone(), true)]);
    }
    let zero = Rational::zero();
    // Ordering of c·t^α against v at a closure endpoint; `None` = t at 0 or ∞.
    let against_v = |t: Option<&Rational>| -> Ordering {
        match t {
            Some(t) if t.is_positive() => cmp_power_values(&p.coeff, &p.exponent, v, &zero, t),
            Some(_) => {
                if p.exponent.is_negative() {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            None => {
                if p.exponent.is_negative() {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    };
    let at_start = against_v(Some(p.interval.start()));
    let at_end = against_v(p.interval.end());
    let decreasing = p.exponent.is_negative();
    let (first_side, last_side) = if decreasing {
        (at_start, at_end)
    } else {
        (at_end, at_start)
    };
    // first_side: value at the high end; last_side: value at the low end
    if last_side != Ordering::Less {
        return Ok(vec![(p.clone(), true)]);
    }
    if first_side != Ordering::Greater {
        return Ok(vec![(p.clone(), false)]);
    }
    let crossing = match pow_rat(&(v / &p.coeff), &p.exponent.recip()) {
        ExtReal::Exact(t) => t,
        _ => {
            return Err(Error::UnsupportedCombination(format!(
                "level {} is crossed at an irrational point of {}",
                format_rational(v),
                p.interval
            )))
        }
    };
    let first = Piece {
        interval: Interval::bounded(p.interval.start().clone(), crossing.clone()),
        ..p.clone()
    };
    let second = Piece {
        interval: Interval::new(crossing, p.interval.end().cloned())?,
        ..p.clone()
    };
    Ok(vec![(first, decreasing), (second, !decreasing)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::{int, rat};

    fn two_blocks() -> Ppf {
        Ppf::step(&[(int(0), Some(int(1)), int(5)), (int(1), Some(int(2)), int(2))]).unwrap()
    }

    #[test]
    fn clamped_difference_and_minimum() {
        let f = two_blocks();
        assert_eq!(
            f.subtract_const_clamped(&int(2)).unwrap(),
            Ppf::indicator(int(0), int(1), int(3))
        );
        assert_eq!(
            f.min_with_const(&int(2)).unwrap(),
            Ppf::indicator(int(0), int(2), int(2))
        );
    }

    #[test]
    fn decomposition_sums_back() {
        let f = two_blocks();
        for v in [int(0), int(1), int(2), rat(7, 2), int(6)] {
            let g = f.subtract_const_clamped(&v).unwrap();
            let h = f.min_with_const(&v).unwrap();
            assert_eq!(g.add(&h).unwrap(), f);
        }
    }

    #[test]
    fn sums_refine_breakpoints() {
        let a = Ppf::indicator(int(0), int(2), int(1));
        let b = Ppf::indicator(int(1), int(3), int(2));
        let expected = Ppf::step(&[
            (int(0), Some(int(1)), int(1)),
            (int(1), Some(int(2)), int(3)),
            (int(2), Some(int(3)), int(2)),
        ])
        .unwrap();
        assert_eq!(a.add(&b).unwrap(), expected);
        let tail = Ppf::step(&[(int(1), None, int(1))]).unwrap();
        let s = a.add(&tail).unwrap();
        assert_eq!(s.evaluate(&int(100)), ExtReal::one());
        assert_eq!(s.evaluate(&rat(3, 2)), ExtReal::Exact(int(2)));
        let p = Ppf::power(int(0), Some(int(1)), int(1), rat(-1, 2)).unwrap();
        assert!(p.add(&a).is_err());
    }

    #[test]
    fn power_pieces_split_at_rational_crossings() {
        // t^(-1/2) on (0,4): crosses 1 at t = 1
        let p = Ppf::power(int(0), Some(int(4)), int(1), rat(-1, 2)).unwrap();
        let m = p.min_with_const(&int(1)).unwrap();
        assert_eq!(m.evaluate(&rat(1, 4)), ExtReal::one());
        assert_eq!(m.evaluate(&int(1)), ExtReal::one());
        assert_eq!(m.evaluate(&rat(9, 4)), ExtReal::Exact(rat(2, 3)));
        assert!(p.subtract_const_clamped(&int(1)).is_err());
        assert!(p.min_with_const(&int(2)).is_ok());
        // t^(-2) on [1,4) crosses 1/2 at the irrational point √2
        let q = Ppf::power(int(1), Some(int(4)), int(1), int(-2)).unwrap();
        assert!(q.min_with_const(&rat(1, 2)).is_err());
        // but level 2 lies above the whole piece
        assert_eq!(q.min_with_const(&int(2)).unwrap(), q);
        assert!(q.subtract_const_clamped(&int(2)).unwrap().is_zero());
        let scaled = p.scale(&int(2)).unwrap();
        assert_eq!(scaled.evaluate(&int(1)), ExtReal::Exact(int(2)));
    }
}
