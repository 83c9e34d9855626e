//! Counterexample families with certified convergence and divergence.
//!
//! Infinite constructions are described analytically and certified with
//! series bounds; each bundle also carries a finite truncation as an exact
//! step function (irrational widths and heights rounded to binary64 and
//! then taken exactly) that is re-evaluated with the norm routines.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::amalgam::{wiener_norm, wl_norm};
use crate::error::{Error, Result};
use crate::ext::{
    format_rational, int, pow_rat, powi, rat, rational_from_f64, serialize_rational, to_f64, ExtReal, Rational, OP_ERR,
};
use crate::laws::hlp_compare;
use crate::norms::{norm_eval, Exponent, NormSpec};
use crate::stepfn::calculus::power_integral;
use crate::stepfn::{tail_window, Interval, Piece, Ppf, StepFunction};

/// Relative tolerance for re-evaluating closed forms and truncations.
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SeriesVerdict {
    Convergent { upper_bound: ExtReal },
    Divergent { lower_bound: ExtReal },
}

/// Bound on `Σ_{n≥1} n^{-s}` (integral test) or `Σ_{n≥0} r^n` (geometric).
#[derive(Clone, Debug, Serialize)]
pub struct SeriesCertificate {
    pub series: String,
    #[serde(serialize_with = "serialize_rational")]
    pub parameter: Rational,
    pub method: &'static str,
    pub terms: u64,
    pub partial_sum: ExtReal,
    #[serde(flatten)]
    pub verdict: SeriesVerdict,
}

impl SeriesCertificate {
    pub fn is_convergent(&self) -> bool {
        matches!(self.verdict, SeriesVerdict::Convergent { .. })
    }

    /// Upper bound for the full series, `+∞` if divergent.
    pub fn upper_bound(&self) -> ExtReal {
        match &self.verdict {
            SeriesVerdict::Convergent { upper_bound } => upper_bound.clone(),
            SeriesVerdict::Divergent { .. } => ExtReal::Infinity,
        }
    }

    /// Certified lower bound for the partial sum (divergent case) or the
    /// partial sum itself.
    pub fn lower_bound(&self) -> ExtReal {
        match &self.verdict {
            SeriesVerdict::Convergent { .. } => self.partial_sum.clone(),
            SeriesVerdict::Divergent { lower_bound } => lower_bound.clone(),
        }
    }

    /// Internal consistency: the bound sits on the right side of the
    /// computed partial sum.
    pub fn is_consistent(&self) -> bool {
        match &self.verdict {
            SeriesVerdict::Convergent { upper_bound } => self.partial_sum.le_tol(upper_bound, 0.0),
            SeriesVerdict::Divergent { lower_bound } => lower_bound.le_tol(&self.partial_sum, 0.0),
        }
    }
}

/// `Σ_{n=1}^{N} n^{-s}` in binary64, summed from the smallest term.
fn pseries_partial(s: &Rational, n: u64) -> ExtReal {
    if s.is_zero() {
        return ExtReal::Exact(Rational::from_integer(n.into()));
    }
    let sf = to_f64(s);
    let acc: f64 = (1..=n).rev().map(|k| (k as f64).powf(-sf)).sum();
    let term_err = 4.0 * f64::EPSILON * (1.0 + sf.abs() * (n as f64).ln());
    ExtReal::approx(acc, OP_ERR + term_err + n as f64 * f64::EPSILON)
}

/// Integral-test certificate for `Σ_{n≥1} n^{-s}` from the first `N` terms.
///
/// `s > 1`: upper bound `Σ_{n≤N} n^{-s} + N^{1-s}/(s-1)`. `0 ≤ s ≤ 1`:
/// divergent, with `∫_1^{N+1} x^{-s} dx ≤ Σ_{n≤N} n^{-s}`.
pub fn pseries_certificate(s: &Rational, n: u64) -> Result<SeriesCertificate> {
    if s.is_negative() || n < 2 {
        return Err(Error::InvalidSpec(format!(
            "p-series certificate needs s ≥ 0 and N ≥ 2 (s = {}, N = {n})",
            format_rational(s)
        )));
    }
    let partial = pseries_partial(s, n);
    let big_n = Rational::from_integer(n.into());
    let one = Rational::one();
    let verdict = if *s > one {
        let tail = pow_rat(&big_n, &(&one - s)).mul_rat(&(s - &one).recip());
        SeriesVerdict::Convergent {
            upper_bound: partial.add(&tail),
        }
    } else {
        SeriesVerdict::Divergent {
            lower_bound: power_integral(&ExtReal::one(), &-s, &one, Some(&(big_n + &one))),
        }
    };
    Ok(SeriesCertificate {
        series: format!("sum_{{n>=1}} n^(-{})", format_rational(s)),
        parameter: s.clone(),
        method: "integral-test",
        terms: n,
        partial_sum: partial,
        verdict,
    })
}

/// `Σ_{n≥0} r^n = 1/(1-r)` for `0 < r < 1`, with the exact partial sum of
/// the terms `n = 0..=N`.
pub fn geometric_certificate(r: &Rational, n: u64) -> SeriesCertificate {
    debug_assert!(r.is_positive() && *r < Rational::one());
    let one = Rational::one();
    let partial = (&one - powi(r, n as i64 + 1)) / (&one - r);
    SeriesCertificate {
        series: format!("sum_{{n>=0}} ({})^n", format_rational(r)),
        parameter: r.clone(),
        method: "geometric",
        terms: n + 1,
        partial_sum: ExtReal::Exact(partial),
        verdict: SeriesVerdict::Convergent {
            upper_bound: ExtReal::Exact((&one - r).recip()),
        },
    }
}

/// One side of a witness: a functional label and its value on the witness.
#[derive(Clone, Debug, Serialize)]
pub struct NormSide {
    pub space: String,
    pub value: ExtReal,
    pub basis: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SeriesCertificate>,
}

/// Finite truncation of an infinite family, evaluated exactly.
#[derive(Clone, Debug, Serialize)]
pub struct Truncation {
    pub terms: u64,
    pub function: Ppf,
    pub values: BTreeMap<String, ExtReal>,
}

/// A function (or analytic family) that is finite for one functional and
/// infinite for another.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessBundle {
    pub name: String,
    pub family: String,
    pub parameters: BTreeMap<String, String>,
    pub finite: NormSide,
    pub infinite: NormSide,
    pub certificates: BTreeMap<String, SeriesCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<Ppf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
    pub note: String,
    pub verified: bool,
}

/// Free parameters of the Wiener-amalgam families; `None` picks midpoints.
#[derive(Clone, Debug, Default)]
pub struct FamilyOptions {
    pub a: Option<Rational>,
    pub b: Option<Rational>,
    /// Number of terms to materialize (default: all `N`).
    pub materialize: Option<u64>,
}

fn lebesgue(p: &Exponent) -> NormSpec {
    NormSpec::Lebesgue(p.clone())
}

fn params(entries: &[(&str, String)]) -> BTreeMap<String, String> {
    entries.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// `f(t) = t^{-1/p_B}` on `(0,1)` (or `t^{-1/(2p_A)}` when `p_B = ∞`):
/// finite `L^{p_A}` norm on `[0,1]`, infinite `L^{p_B}` norm.
pub fn tem_local_witness(pa: &Exponent, pb: &Exponent) -> Result<WitnessBundle> {
    let Some(pa_r) = pa.as_finite().filter(|_| pa < pb) else {
        return Err(Error::UnsupportedIndices(format!(
            "local witness needs p_A < p_B (got {pa}, {pb})"
        )));
    };
    let (beta, closed, basis) = match pb {
        Exponent::Finite(pb_r) => (
            pb_r.recip(),
            pow_rat(&(pb_r / (pb_r - pa_r)), &pa_r.recip()),
            "integral of t^(-1) over (0,1) diverges".to_string(),
        ),
        Exponent::Infinity => (
            (int(2) * pa_r).recip(),
            pow_rat(&int(2), &pa_r.recip()),
            "unbounded near 0".to_string(),
        ),
    };
    let f = Ppf::power(Rational::zero(), Some(Rational::one()), Rational::one(), -&beta)?;
    let finite_eval = norm_eval(&lebesgue(pa), &f)?;
    let infinite_eval = norm_eval(&lebesgue(pb), &f)?;
    let verified = finite_eval.approx_eq(&closed, WITNESS_TOL) && infinite_eval.is_infinite();
    Ok(WitnessBundle {
        name: "tem-local".into(),
        family: format!("t^(-{}) on (0,1)", format_rational(&beta)),
        parameters: params(&[("p_A", pa.to_string()), ("p_B", pb.to_string())]),
        finite: NormSide {
            space: lebesgue(pa).to_string(),
            value: closed,
            basis: "closed form".into(),
            certificate: None,
        },
        infinite: NormSide {
            space: lebesgue(pb).to_string(),
            value: infinite_eval,
            basis,
            certificate: None,
        },
        certificates: BTreeMap::new(),
        function: Some(f),
        truncation: None,
        note: "local components differ on a profile singular at the origin".into(),
        verified,
    })
}

/// `f = χ_[0,1) + t^{-1/q_C}χ_[1,∞)`: finite `L^{q_B}` tail, infinite
/// `L^{q_C}` tail.
pub fn tem_global_witness(qb: &Exponent, qc: &Exponent) -> Result<WitnessBundle> {
    let Some(qc_r) = qc.as_finite().filter(|_| qb > qc) else {
        return Err(Error::UnsupportedIndices(format!(
            "global witness needs q_B > q_C with q_C finite (got {qb}, {qc})"
        )));
    };
    let closed = match qb {
        Exponent::Finite(qb_r) => pow_rat(&(qb_r / qc_r - Rational::one()), &-qb_r.recip()),
        Exponent::Infinity => ExtReal::one(),
    };
    let mut pieces = vec![Piece::constant(
        Interval::bounded(Rational::zero(), Rational::one()),
        Rational::one(),
    )?];
    pieces.push(Piece::new(tail_window(), Rational::one(), -qc_r.recip())?);
    let f = Ppf::normalize(pieces)?;
    let tail = f.restrict(&tail_window());
    let finite_eval = norm_eval(&lebesgue(qb), &tail)?;
    let infinite_eval = norm_eval(&lebesgue(qc), &tail)?;
    let verified = finite_eval.approx_eq(&closed, WITNESS_TOL) && infinite_eval.is_infinite();
    Ok(WitnessBundle {
        name: "tem-global".into(),
        family: format!("1 on [0,1), t^(-{}) on [1,inf)", format_rational(&qc_r.recip())),
        parameters: params(&[("q_B", qb.to_string()), ("q_C", qc.to_string())]),
        finite: NormSide {
            space: lebesgue(qb).to_string(),
            value: closed,
            basis: "closed form".into(),
            certificate: None,
        },
        infinite: NormSide {
            space: lebesgue(qc).to_string(),
            value: infinite_eval,
            basis: "integral of t^(-1) over (1,inf) diverges".into(),
            certificate: None,
        },
        certificates: BTreeMap::new(),
        function: Some(f),
        truncation: None,
        note: "global components differ on a slowly decaying tail; f*(1) = 1".into(),
        verified,
    })
}

fn materialized_count(n: u64, opts: &FamilyOptions) -> u64 {
    opts.materialize.map_or(n, |m| m.min(n))
}

/// Union of `[n, n + n^{-a})` (finite `p`) or `[n, n + 2^{-n})` (`p = ∞`):
/// finite measure, infinite `W(L^p, ℓ^q)` norm of the indicator, for `q < p`.
pub fn rwnbfs_p4_family(p: &Exponent, q: &Exponent, n: u64, opts: &FamilyOptions) -> Result<WitnessBundle> {
    let not_applicable =
        || Error::IndicesNotApplicable(format!("finite-measure witness needs 1 ≤ q < p (got p = {p}, q = {q})"));
    if !q.at_least_one() || q >= p {
        return Err(not_applicable());
    }
    let q_r = q.as_finite().ok_or_else(not_applicable)?.clone();
    let m = materialized_count(n, opts);
    let wiener = format!("W:{p}:{q}");
    let mut certificates = BTreeMap::new();
    let (family, a_param, measure_cert, norm_cert, pieces) = match p {
        Exponent::Finite(p_r) => {
            let a = opts
                .a
                .clone()
                .unwrap_or_else(|| (Rational::one() + p_r / &q_r) / int(2));
            if a <= Rational::one() || a >= p_r / &q_r {
                return Err(Error::IndicesNotApplicable(format!(
                    "a = {} outside (1, p/q)",
                    format_rational(&a)
                )));
            }
            let measure = pseries_certificate(&a, n)?;
            let norm = pseries_certificate(&(&a * &q_r / p_r), n)?;
            let af = to_f64(&a);
            let pieces: Vec<(u64, Rational)> = (1..=m).map(|k| (k, rational_from_f64((k as f64).powf(-af)))).collect();
            (
                format!("union of [n, n + n^(-{})], n >= 1", format_rational(&a)),
                Some(a),
                measure,
                norm,
                pieces,
            )
        }
        Exponent::Infinity => {
            let half = rat(1, 2);
            let measure = geometric_certificate(&half, n);
            // every cell [n, n+1) has sup-norm 1, so the ℓ^q sum counts cells
            let norm = pseries_certificate(&Rational::zero(), n)?;
            let mut width = Rational::one();
            let mut pieces = Vec::with_capacity(m as usize + 1);
            for k in 0..=m {
                pieces.push((k, width.clone()));
                width /= int(2);
            }
            (
                "union of [n, n + 2^(-n)], n >= 0".to_string(),
                None,
                measure,
                norm,
                pieces,
            )
        }
    };
    let step = StepFunction::from_blocks(
        &pieces
            .iter()
            .map(|(k, w)| {
                let start = Rational::from_integer((*k).into());
                (start.clone(), Some(start + w), Rational::one())
            })
            .collect::<Vec<_>>(),
    )?;
    let measure_n = norm_eval(&NormSpec::Lebesgue(Exponent::int(1)), step.as_ppf())?;
    let wiener_n = wiener_norm(p, q, &step);
    let mut values = BTreeMap::new();
    values.insert("measure".to_string(), measure_n.clone());
    values.insert("wiener_norm".to_string(), wiener_n.clone());
    // Expected truncated sums of the two series over the materialized terms.
    let (measure_partial, norm_partial) = match (p, &a_param) {
        (Exponent::Finite(p_r), Some(a)) => (pseries_partial(a, m), pseries_partial(&(a * &q_r / p_r), m)),
        _ => (
            geometric_certificate(&rat(1, 2), m).partial_sum,
            ExtReal::Exact(Rational::from_integer((m + 1).into())),
        ),
    };
    let verified = measure_cert.is_consistent()
        && norm_cert.is_consistent()
        && measure_cert.is_convergent()
        && !norm_cert.is_convergent()
        && measure_n.approx_eq(&measure_partial, WITNESS_TOL)
        && wiener_n.pow(&q_r).approx_eq(&norm_partial, WITNESS_TOL);
    certificates.insert("measure".to_string(), measure_cert.clone());
    certificates.insert("wiener_norm_power_q".to_string(), norm_cert.clone());
    let mut parameters = params(&[("p", p.to_string()), ("q", q.to_string()), ("N", n.to_string())]);
    if let Some(a) = &a_param {
        parameters.insert("a".into(), format_rational(a));
    }
    Ok(WitnessBundle {
        name: "rwnbfs-p4".into(),
        family,
        parameters,
        finite: NormSide {
            space: "L:1".into(),
            value: measure_cert.upper_bound(),
            basis: "measure of E, convergent series".into(),
            certificate: Some(measure_cert),
        },
        infinite: NormSide {
            space: wiener,
            value: ExtReal::Infinity,
            basis: "q-th power of the indicator's norm is a divergent series".into(),
            certificate: Some(norm_cert),
        },
        certificates,
        function: None,
        truncation: Some(Truncation {
            terms: m,
            function: step.into_ppf(),
            values,
        }),
        note: "a set of finite measure whose indicator has infinite Wiener norm".into(),
        verified,
    })
}

/// `f = Σ_n n^{(b-a)/p} χ_[n, n+n^{-b})` (or heights `n^{b/p}` for
/// `q = ∞`): finite `W(L^p, ℓ^q)` norm, supported on a set `E` of finite
/// measure with `∫_E f = ∞`, for `p < q`.
pub fn rwnbfs_p5_family(p: &Exponent, q: &Exponent, n: u64, opts: &FamilyOptions) -> Result<WitnessBundle> {
    let not_applicable = || {
        Error::IndicesNotApplicable(format!(
            "local-integrability witness needs 1 ≤ p < q (got p = {p}, q = {q})"
        ))
    };
    if !p.at_least_one() || p >= q {
        return Err(not_applicable());
    }
    let p_r = p.as_finite().ok_or_else(not_applicable)?.clone();
    let one = Rational::one();
    let b_max = (p_r > one).then(|| match q {
        Exponent::Finite(_) => None,
        Exponent::Infinity => Some(&p_r / (&p_r - &one)),
    });
    let (a, b_upper) = match q {
        Exponent::Finite(q_r) => {
            let a = opts.a.clone().unwrap_or_else(|| (&p_r / q_r + &one) / int(2));
            if a <= &p_r / q_r || a >= one {
                return Err(Error::IndicesNotApplicable(format!(
                    "a = {} outside (p/q, 1)",
                    format_rational(&a)
                )));
            }
            let upper = (p_r > one).then(|| (&p_r - &a) / (&p_r - &one));
            (Some(a), upper)
        }
        Exponent::Infinity => (None, b_max.flatten()),
    };
    let b = opts.b.clone().unwrap_or_else(|| match &b_upper {
        Some(u) => (&one + u) / int(2),
        None => int(2),
    });
    if b <= one || b_upper.as_ref().is_some_and(|u| b >= *u) {
        return Err(Error::IndicesNotApplicable(format!(
            "b = {} outside the admissible range",
            format_rational(&b)
        )));
    }
    // heights n^e, widths n^{-b}
    let a_or_zero = a.clone().unwrap_or_default();
    let e = (&b - &a_or_zero) / &p_r;
    let measure_cert = pseries_certificate(&b, n)?;
    let integral_exp = &b - &e;
    let integral_cert = pseries_certificate(&integral_exp, n)?;
    let mut certificates = BTreeMap::new();
    let (finite_value, finite_cert, norm_exp) = match (q, &a) {
        (Exponent::Finite(q_r), Some(a)) => {
            let s = a * q_r / &p_r;
            let cert = pseries_certificate(&s, n)?;
            (cert.upper_bound().pow(&q_r.recip()), Some(cert), Some(s))
        }
        // each cell has L^p norm exactly 1
        _ => (ExtReal::one(), None, None),
    };
    let m = materialized_count(n, opts);
    let (ef, bf) = (to_f64(&e), to_f64(&b));
    let blocks: Vec<(Rational, Option<Rational>, Rational)> = (1..=m)
        .map(|k| {
            let start = Rational::from_integer(k.into());
            let width = rational_from_f64((k as f64).powf(-bf));
            let height = rational_from_f64((k as f64).powf(ef));
            (start.clone(), Some(start + width), height)
        })
        .collect();
    let step = StepFunction::from_blocks(&blocks)?;
    let indicator = StepFunction::from_blocks(
        &blocks
            .iter()
            .map(|(s, t, _)| (s.clone(), t.clone(), one.clone()))
            .collect::<Vec<_>>(),
    )?;
    let measure_n = norm_eval(&NormSpec::Lebesgue(Exponent::int(1)), indicator.as_ppf())?;
    let integral_n = norm_eval(&NormSpec::Lebesgue(Exponent::int(1)), step.as_ppf())?;
    let wiener_n = wiener_norm(p, q, &step);
    let norm_ok = match (&norm_exp, q) {
        (Some(s), Exponent::Finite(q_r)) => wiener_n.pow(q_r).approx_eq(&pseries_partial(s, m), WITNESS_TOL),
        _ => wiener_n.approx_eq(&ExtReal::one(), WITNESS_TOL),
    };
    let verified = measure_cert.is_convergent()
        && measure_cert.is_consistent()
        && integral_cert.is_consistent()
        && !integral_cert.is_convergent()
        && finite_cert
            .as_ref()
            .is_none_or(|c| c.is_convergent() && c.is_consistent())
        && measure_n.approx_eq(&pseries_partial(&b, m), WITNESS_TOL)
        && integral_n.approx_eq(&pseries_partial(&integral_exp, m), WITNESS_TOL)
        && norm_ok;
    let mut values = BTreeMap::new();
    values.insert("measure".to_string(), measure_n);
    values.insert("integral".to_string(), integral_n);
    values.insert("wiener_norm".to_string(), wiener_n);
    certificates.insert("measure".to_string(), measure_cert);
    certificates.insert("integral".to_string(), integral_cert.clone());
    if let Some(c) = &finite_cert {
        certificates.insert("wiener_norm_power_q".to_string(), c.clone());
    }
    let mut parameters = params(&[
        ("p", p.to_string()),
        ("q", q.to_string()),
        ("N", n.to_string()),
        ("b", format_rational(&b)),
    ]);
    if let Some(a) = &a {
        parameters.insert("a".into(), format_rational(a));
    }
    Ok(WitnessBundle {
        name: "rwnbfs-p5".into(),
        family: format!(
            "sum_{{n>=1}} n^({}) on [n, n + n^(-{})]",
            format_rational(&e),
            format_rational(&b)
        ),
        parameters,
        finite: NormSide {
            space: format!("W:{p}:{q}"),
            value: finite_value,
            basis: match q {
                Exponent::Finite(_) => "q-th power is a convergent series".into(),
                Exponent::Infinity => "every cell has norm 1".into(),
            },
            certificate: finite_cert,
        },
        infinite: NormSide {
            space: "integral over E".into(),
            value: ExtReal::Infinity,
            basis: "divergent series".into(),
            certificate: Some(integral_cert),
        },
        certificates,
        function: None,
        truncation: Some(Truncation {
            terms: m,
            function: step.into_ppf(),
            values,
        }),
        note: "finite Wiener norm on a finite-measure set with divergent integral".into(),
        verified,
    })
}

/// `f_N = (1/N)χ_[0,N)` against `g = χ_[0,1)` in `WL(L¹, L^p)`.
#[derive(Clone, Debug, Serialize)]
pub struct ChlpFamily {
    #[serde(serialize_with = "serialize_rational")]
    pub p: Rational,
    #[serde(rename = "N")]
    pub n: u64,
    pub space: String,
    pub f: StepFunction,
    pub g: StepFunction,
    pub dominated: bool,
    pub ratio: ExtReal,
    pub verified: bool,
}

/// `f_N` is dominated by `g` in the partial-integral order, while
/// `‖f_N‖/‖g‖ = (1 + (N-1)^{1/p})/N` in `WL(L¹, L^p)`, unbounded for
/// `p < 1` and identically 1 for `p = 1`.
pub fn chlp_family(p: &Rational, n: u64) -> Result<ChlpFamily> {
    if !p.is_positive() || *p > Rational::one() || n == 0 {
        return Err(Error::IndicesNotApplicable(format!(
            "family needs 0 < p ≤ 1 and N ≥ 1 (got p = {}, N = {n})",
            format_rational(p)
        )));
    }
    let big_n = Rational::from_integer(n.into());
    let f = StepFunction::from_blocks(&[(Rational::zero(), Some(big_n.clone()), big_n.recip())])?;
    let g = StepFunction::from_blocks(&[(Rational::zero(), Some(Rational::one()), Rational::one())])?;
    let ratio = pow_rat(&(&big_n - Rational::one()), &p.recip())
        .add(&ExtReal::one())
        .mul_rat(&big_n.recip());
    let local = NormSpec::Lebesgue(Exponent::int(1));
    let global = NormSpec::Lebesgue(Exponent::finite(p.clone())?);
    let measured = wl_norm(&local, &global, &f)?.div(&wl_norm(&local, &global, &g)?);
    let dominated = hlp_compare(&f, &g);
    Ok(ChlpFamily {
        p: p.clone(),
        n,
        space: format!("WL:{local}:{global}"),
        verified: dominated && measured.approx_eq(&ratio, WITNESS_TOL),
        f,
        g,
        dominated,
        ratio,
    })
}
