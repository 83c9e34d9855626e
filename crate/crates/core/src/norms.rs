//! Lebesgue and Lorentz functionals, dual exponents and component order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ext::{format_rational, int, parse_rational, pow_rat, ExtReal, Rational};
use crate::stepfn::calculus::{power_integral, sup_power};
use crate::stepfn::{rearrange_step, Ppf, StepFunction};

/// Integrability index: a positive rational or `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational),
    Infinity,
}

impl Exponent {
    pub fn finite(p: Rational) -> Result<Self> {
        if !p.is_positive() {
            return Err(Error::InvalidSpec(format!(
                "exponent {} must be positive",
                format_rational(&p)
            )));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn int(n: i64) -> Self {
        Exponent::finite(int(n)).expect("positive integer exponent")
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Exponent::finite(crate::ext::rat(n, d)).expect("positive exponent")
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            Exponent::Finite(p) => Some(p),
            Exponent::Infinity => None,
        }
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn recip(&self) -> Rational {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinity => Rational::zero(),
        }
    }

    /// `p ≥ 1`.
    pub fn at_least_one(&self) -> bool {
        self.recip() <= Rational::one()
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        // larger exponent = smaller reciprocal
        other.recip().cmp(&self.recip())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{}", format_rational(p)),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            other => Exponent::finite(parse_rational(other)?),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A rearrangement-invariant functional evaluated on `f*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NormSpec {
    Lebesgue(Exponent),
    Lorentz(Exponent, Exponent),
}

impl NormSpec {
    pub fn lebesgue(p: Exponent) -> Self {
        NormSpec::Lebesgue(p)
    }

    /// `L^{p,q}`; `L^{∞,∞}` is returned as `L^∞`.
    pub fn lorentz(p: Exponent, q: Exponent) -> Result<Self> {
        match (&p, &q) {
            (Exponent::Infinity, Exponent::Infinity) => Ok(NormSpec::Lebesgue(Exponent::Infinity)),
            (Exponent::Infinity, _) => Err(Error::InvalidSpec(format!("Lorentz:inf:{q} is the trivial space"))),
            _ => Ok(NormSpec::Lorentz(p, q)),
        }
    }

    /// `(p, q)` with `L^p` read as `L^{p,p}`.
    pub fn indices(&self) -> (&Exponent, &Exponent) {
        match self {
            NormSpec::Lebesgue(p) => (p, p),
            NormSpec::Lorentz(p, q) => (p, q),
        }
    }

    pub fn primary(&self) -> &Exponent {
        self.indices().0
    }

    fn validate(&self) -> Result<()> {
        if let NormSpec::Lorentz(Exponent::Infinity, q) = self {
            if !q.is_infinite() {
                return Err(Error::InvalidSpec(format!("Lorentz:inf:{q} is the trivial space")));
            }
        }
        Ok(())
    }

    /// Parses one descriptor from the front of a `:`-separated token stream.
    pub(crate) fn parse_tokens<'a, I: Iterator<Item = &'a str>>(tokens: &mut I) -> Result<Self> {
        let mut next = |what: &str| {
            tokens
                .next()
                .ok_or_else(|| Error::InvalidSpec(format!("missing {what}")))
        };
        match next("family")? {
            "L" => Ok(NormSpec::Lebesgue(next("exponent")?.parse()?)),
            "Lorentz" => {
                let p = next("primary index")?.parse()?;
                let q = next("secondary index")?.parse()?;
                NormSpec::lorentz(p, q)
            }
            other => Err(Error::InvalidSpec(format!("unknown family '{other}'"))),
        }
    }
}

impl FromStr for NormSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split(':');
        let spec = NormSpec::parse_tokens(&mut tokens)?;
        match tokens.next() {
            None => Ok(spec),
            Some(extra) => Err(Error::InvalidSpec(format!("trailing '{extra}' in '{s}'"))),
        }
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::Lebesgue(p) => write!(f, "L:{p}"),
            NormSpec::Lorentz(p, q) => write!(f, "Lorentz:{p}:{q}"),
        }
    }
}

impl Serialize for NormSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Evaluates `spec` on a profile `g`, assumed to be (a restriction of) a
/// non-increasing rearrangement. Lebesgue integrals and suprema are taken
/// piece by piece; the Lorentz weight `t^{1/p}` uses the literal variable.
pub fn norm_eval(spec: &NormSpec, g: &Ppf) -> Result<ExtReal> {
    spec.validate()?;
    let (p, q) = spec.indices();
    let pieces = g.pieces();
    let value = match q {
        Exponent::Infinity => {
            // weight exponent 1/p (zero for Lebesgue(∞))
            let w = match spec {
                NormSpec::Lebesgue(_) => Rational::zero(),
                NormSpec::Lorentz(..) => p.recip(),
            };
            pieces
                .iter()
                .map(|pc| sup_power(&pc.coeff, &(&pc.exponent + &w), pc.interval.start(), pc.interval.end()))
                .fold(ExtReal::zero(), |acc, v| acc.max(&v))
        }
        Exponent::Finite(q) => {
            // ∫ (t^w · c t^α)^q dt/t^k with (w, k) = (0, 0) or (1/p, 1)
            let (w, shift) = match spec {
                NormSpec::Lebesgue(_) => (Rational::zero(), Rational::zero()),
                NormSpec::Lorentz(..) => (p.recip(), Rational::one()),
            };
            let terms: Vec<ExtReal> = pieces
                .iter()
                .map(|pc| {
                    let beta = (&pc.exponent + &w) * q - &shift;
                    power_integral(&pow_rat(&pc.coeff, q), &beta, pc.interval.start(), pc.interval.end())
                })
                .collect();
            ExtReal::sum(terms.iter()).pow(&q.recip())
        }
    };
    Ok(value)
}

/// `norm_eval(spec, f*)`. Lebesgue values are also checked against the
/// integral of `f` itself in debug builds.
pub fn norm_of(spec: &NormSpec, f: &StepFunction) -> Result<ExtReal> {
    let value = norm_eval(spec, rearrange_step(f).as_ppf())?;
    if cfg!(debug_assertions) && matches!(spec, NormSpec::Lebesgue(_)) {
        let direct = norm_eval(spec, f.as_ppf())?;
        debug_assert!(value.approx_eq(&direct, 1e-9), "{value} vs {direct}");
    }
    Ok(value)
}

/// Hölder conjugate `p'` with `1/p + 1/p' = 1`.
pub fn dual_exponent(p: &Exponent) -> Result<Exponent> {
    match p {
        Exponent::Infinity => Ok(Exponent::int(1)),
        Exponent::Finite(r) => match r.cmp(&Rational::one()) {
            Ordering::Less => Err(Error::NotNormable(format!("L^{p} has a trivial associate"))),
            Ordering::Equal => Ok(Exponent::Infinity),
            Ordering::Greater => Exponent::finite(r / (r - Rational::one())),
        },
    }
}

/// Associate space of a normable spec: `L^{p'}` or `L^{p',q'}`.
pub fn dual_spec(spec: &NormSpec) -> Result<NormSpec> {
    match spec {
        NormSpec::Lebesgue(p) => Ok(NormSpec::Lebesgue(dual_exponent(p)?)),
        NormSpec::Lorentz(p, q) => {
            if !lorentz_normable(p, q) {
                return Err(Error::NotNormable(spec.to_string()));
            }
            NormSpec::lorentz(dual_exponent(p)?, dual_exponent(q)?)
        }
    }
}

/// `L^{p,q}` with `1 < p < ∞, q ≥ 1`, or `p = q = 1`: the range where
/// Hölder against `L^{p',q'}` holds with constant one.
fn lorentz_normable(p: &Exponent, q: &Exponent) -> bool {
    match p.as_finite() {
        Some(p) if *p > Rational::one() => q.at_least_one(),
        Some(p) if p.is_one() => *q == Exponent::int(1),
        _ => false,
    }
}

fn compare_indices(a: &NormSpec, b: &NormSpec, primary_wins: Ordering) -> bool {
    let (pa, qa) = a.indices();
    let (pb, qb) = b.indices();
    match pa.cmp(pb) {
        Ordering::Equal => qa <= qb,
        order => order == primary_wins,
    }
}

/// Whether finiteness of `‖f*χ_[0,1)‖_a` forces finiteness of `‖f*χ_[0,1)‖_b`.
///
/// Lebesgue: `p_a ≥ p_b`. Lorentz with distinct primary indices:
/// `p_a > p_b`. Equal primary indices (a Lebesgue index read as `L^{p,p}`)
/// fall back to the nesting `L^{p,q_a} ⊂ L^{p,q_b}` for `q_a ≤ q_b`.
pub fn local_stronger(a: &NormSpec, b: &NormSpec) -> bool {
    compare_indices(a, b, Ordering::Greater)
}

/// Mirror of [`local_stronger`] for the tails `f*χ_[1,∞)`: the smaller
/// primary index wins; equal primary indices nest as before.
pub fn global_stronger(a: &NormSpec, b: &NormSpec) -> bool {
    compare_indices(a, b, Ordering::Less)
}

/// Modulus of concavity `C` with `‖f + g‖ ≤ C(‖f‖ + ‖g‖)`.
///
/// `1` for Lebesgue `p ≥ 1` and Lorentz `1 ≤ q ≤ p`; `2^{1/p-1}` for
/// Lebesgue `p < 1`; otherwise the bound `2^{1/p}·max(1, 2^{1/q-1})`
/// from `(f+g)*(t) ≤ f*(t/2) + g*(t/2)`.
pub fn modulus_of_concavity(spec: &NormSpec) -> ExtReal {
    let two = int(2);
    match spec {
        NormSpec::Lebesgue(p) => {
            if p.at_least_one() {
                ExtReal::one()
            } else {
                pow_rat(&two, &(p.recip() - Rational::one()))
            }
        }
        NormSpec::Lorentz(p, q) => {
            if q.at_least_one() && q <= p {
                return ExtReal::one();
            }
            let outer = (q.recip() - Rational::one()).max(Rational::zero());
            pow_rat(&two, &(p.recip() + outer))
        }
    }
}

/// `‖χ_[0,1)‖`: `1` for Lebesgue, `(p/q)^{1/q}` for `L^{p,q}`.
pub fn unit_indicator_norm(spec: &NormSpec) -> ExtReal {
    match spec {
        NormSpec::Lebesgue(_) => ExtReal::one(),
        NormSpec::Lorentz(p, q) => match (p.as_finite(), q.as_finite()) {
            (Some(p), Some(q)) => pow_rat(&(p / q), &q.recip()),
            _ => ExtReal::one(),
        },
    }
}

/// Constant `C` with `∫_0^1 g ≤ C‖gχ_[0,1)‖` (the local integrability
/// axiom on the unit interval): `‖χ_[0,1)‖` of the associate space.
pub fn local_integrability_constant(spec: &NormSpec) -> Result<ExtReal> {
    Ok(unit_indicator_norm(&dual_spec(spec)?))
}

/// Operator norm of the dilation `D_t`, which is exactly `t^{-1/p}` for
/// both families.
pub fn dilation_norm(spec: &NormSpec, t: &Rational) -> ExtReal {
    pow_rat(t, &-spec.primary().recip())
}
