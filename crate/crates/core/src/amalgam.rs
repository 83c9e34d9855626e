//! Wiener–Luxemburg amalgams, the Wiener amalgam `W(L^p, ℓ^q)` and the
//! integrable norm.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Peekable;
use std::str::FromStr;

use num::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ext::{int, pow_rat, rat, ExtReal, Rational};
use crate::norms::{dilation_norm, modulus_of_concavity, norm_eval, norm_of, Exponent, NormSpec};
use crate::stepfn::{partial_integral, rearrange_step, tail_window, unit_window, MonotoneProfile, Ppf, StepFunction};

/// Descriptor of any functional the library evaluates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpaceSpec {
    Simple(NormSpec),
    WL { local: NormSpec, global: NormSpec },
    Wiener { p: Exponent, q: Exponent },
    Integrable(Box<SpaceSpec>),
}

impl SpaceSpec {
    pub fn wl(local: NormSpec, global: NormSpec) -> Self {
        SpaceSpec::WL { local, global }
    }

    pub fn wiener(p: Exponent, q: Exponent) -> Result<Self> {
        if !p.at_least_one() || !q.at_least_one() {
            return Err(Error::InvalidSpec(format!("W:{p}:{q} needs p, q ≥ 1")));
        }
        Ok(SpaceSpec::Wiener { p, q })
    }

    pub fn integrable(inner: SpaceSpec) -> Result<Self> {
        match inner {
            SpaceSpec::Simple(_) | SpaceSpec::WL { .. } => Ok(SpaceSpec::Integrable(Box::new(inner))),
            other => Err(Error::InvalidSpec(format!(
                "Int:{other} needs a simple or WL inner spec"
            ))),
        }
    }

    fn parse_tokens<'a, I: Iterator<Item = &'a str>>(tokens: &mut Peekable<I>) -> Result<Self> {
        match tokens.peek().copied() {
            Some("WL") => {
                tokens.next();
                let local = NormSpec::parse_tokens(tokens)?;
                let global = NormSpec::parse_tokens(tokens)?;
                Ok(SpaceSpec::wl(local, global))
            }
            Some("W") => {
                tokens.next();
                let mut next = || {
                    tokens
                        .next()
                        .ok_or_else(|| Error::InvalidSpec("missing Wiener index".into()))
                };
                let p = next()?.parse()?;
                let q = next()?.parse()?;
                SpaceSpec::wiener(p, q)
            }
            Some("Int") => {
                tokens.next();
                SpaceSpec::integrable(SpaceSpec::parse_tokens(tokens)?)
            }
            _ => Ok(SpaceSpec::Simple(NormSpec::parse_tokens(tokens)?)),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split(':').peekable();
        let spec = SpaceSpec::parse_tokens(&mut tokens)?;
        match tokens.next() {
            None => Ok(spec),
            Some(extra) => Err(Error::InvalidSpec(format!("trailing '{extra}' in '{s}'"))),
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Simple(s) => write!(f, "{s}"),
            SpaceSpec::WL { local, global } => write!(f, "WL:{local}:{global}"),
            SpaceSpec::Wiener { p, q } => write!(f, "W:{p}:{q}"),
            SpaceSpec::Integrable(inner) => write!(f, "Int:{inner}"),
        }
    }
}

impl Serialize for SpaceSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl From<NormSpec> for SpaceSpec {
    fn from(spec: NormSpec) -> Self {
        SpaceSpec::Simple(spec)
    }
}

/// Value of `spec` at a step function.
pub fn space_norm(spec: &SpaceSpec, f: &StepFunction) -> Result<ExtReal> {
    match spec {
        SpaceSpec::Simple(s) => norm_of(s, f),
        SpaceSpec::WL { local, global } => wl_norm(local, global, f),
        SpaceSpec::Wiener { p, q } => Ok(wiener_norm(p, q, f)),
        SpaceSpec::Integrable(inner) => integrable_norm(inner, f),
    }
}

/// Value of a rearrangement-invariant `spec` at a function whose
/// rearrangement is `g`. Wiener specs are not rearrangement-invariant and
/// are only accepted for step profiles, where they are evaluated on `g`.
pub fn space_norm_profile(spec: &SpaceSpec, g: &MonotoneProfile) -> Result<ExtReal> {
    match spec {
        SpaceSpec::Simple(s) => norm_eval(s, g),
        SpaceSpec::WL { local, global } => wl_norm_profile(local, global, g),
        SpaceSpec::Wiener { p, q } => match g.as_step() {
            Some(step) => Ok(wiener_norm(p, q, &step)),
            None => Err(Error::UnsupportedCombination(format!("{spec} of a power profile"))),
        },
        SpaceSpec::Integrable(inner) => {
            let base = space_norm_profile(inner, g)?;
            Ok(base.max(&l1_linf_term(g)))
        }
    }
}

/// `(‖g·χ_[0,1)‖_local, ‖g·χ_[1,∞)‖_global)` for a rearrangement `g`. The
/// tail is evaluated as it stands, without shifting it back to the origin.
pub fn wl_components_profile(local: &NormSpec, global: &NormSpec, g: &MonotoneProfile) -> Result<(ExtReal, ExtReal)> {
    let head = norm_eval(local, &g.restrict(&unit_window()))?;
    let tail = norm_eval(global, &g.restrict(&tail_window()))?;
    Ok((head, tail))
}

pub fn wl_components(local: &NormSpec, global: &NormSpec, f: &StepFunction) -> Result<(ExtReal, ExtReal)> {
    wl_components_profile(local, global, &rearrange_step(f))
}

pub fn wl_norm_profile(local: &NormSpec, global: &NormSpec, g: &MonotoneProfile) -> Result<ExtReal> {
    let (head, tail) = wl_components_profile(local, global, g)?;
    Ok(head.add(&tail))
}

/// `‖f*χ_[0,1)‖_local + ‖f*χ_[1,∞)‖_global`.
pub fn wl_norm(local: &NormSpec, global: &NormSpec, f: &StepFunction) -> Result<ExtReal> {
    wl_norm_profile(local, global, &rearrange_step(f))
}

/// `(Σ_n ‖f·χ_[n,n+1)‖_p^q)^{1/q}` (a supremum for `q = ∞`) over unit cells.
///
/// Runs of whole cells covered by one constant piece are aggregated, so
/// long supports cost one term per piece rather than one per cell.
pub fn wiener_norm(p: &Exponent, q: &Exponent, f: &StepFunction) -> ExtReal {
    // partially covered cells: index -> [(value, covered length)]
    let mut partial: BTreeMap<Rational, Vec<(Rational, Rational)>> = BTreeMap::new();
    // whole cells: (value, number of cells)
    let mut whole: Vec<(Rational, Rational)> = Vec::new();
    for piece in f.pieces() {
        let c = piece.coeff.clone();
        let a = piece.interval.start().clone();
        let first_full = a.ceil();
        if first_full > a {
            let cell = a.floor();
            let stop = match piece.interval.end() {
                Some(b) if *b < first_full => b.clone(),
                _ => first_full.clone(),
            };
            partial.entry(cell).or_default().push((c.clone(), stop - &a));
        }
        let Some(b) = piece.interval.end() else {
            // infinitely many whole cells carry the value c
            match q {
                Exponent::Finite(_) => return ExtReal::Infinity,
                Exponent::Infinity => {
                    whole.push((c, int(1)));
                    continue;
                }
            }
        };
        let last_full = b.floor();
        if last_full > first_full {
            whole.push((c.clone(), &last_full - &first_full));
        }
        if *b > last_full && last_full >= first_full {
            partial.entry(last_full.clone()).or_default().push((c, b - &last_full));
        }
    }
    // Norm of one cell given its (value, length) parts.
    let cell_norm = |parts: &[(Rational, Rational)]| -> ExtReal {
        match p {
            Exponent::Infinity => ExtReal::Exact(parts.iter().map(|(c, _)| c).max().cloned().unwrap_or_default()),
            Exponent::Finite(p) => {
                let terms: Vec<ExtReal> = parts.iter().map(|(c, l)| pow_rat(c, p).mul_rat(l)).collect();
                ExtReal::sum(terms.iter()).pow(&p.recip())
            }
        }
    };
    match q {
        Exponent::Infinity => {
            let mut best = ExtReal::zero();
            for (c, _) in &whole {
                best = best.max(&ExtReal::Exact(c.clone()));
            }
            for parts in partial.values() {
                best = best.max(&cell_norm(parts));
            }
            best
        }
        Exponent::Finite(q) => {
            let mut terms: Vec<ExtReal> = whole.iter().map(|(c, n)| pow_rat(c, q).mul_rat(n)).collect();
            terms.extend(partial.values().map(|parts| cell_norm(parts).pow(q)));
            ExtReal::sum(terms.iter()).pow(&q.recip())
        }
    }
}

/// `‖f*‖_{W(L^p, ℓ^q)}`.
pub fn rearranged_wiener(p: &Exponent, q: &Exponent, f: &StepFunction) -> ExtReal {
    let star = rearrange_step(f)
        .as_step()
        .expect("rearrangement of a step function is a step function");
    wiener_norm(p, q, &star)
}

/// `∫_0^1 g + g(1)`, the `WL(L¹, L^∞)` norm of a rearrangement `g`.
fn l1_linf_term(g: &MonotoneProfile) -> ExtReal {
    partial_integral(g, Some(&Rational::one())).add(&g.evaluate(&Rational::one()))
}

/// `max{‖f‖_inner, ∫_0^1 f* + f*(1)}`.
pub fn integrable_norm(inner: &SpaceSpec, f: &StepFunction) -> Result<ExtReal> {
    if !matches!(inner, SpaceSpec::Simple(_) | SpaceSpec::WL { .. }) {
        return Err(Error::InvalidSpec(format!(
            "Int:{inner} needs a simple or WL inner spec"
        )));
    }
    let base = space_norm(inner, f)?;
    Ok(base.max(&l1_linf_term(&rearrange_step(f))))
}

/// `2^{1/p + 1/q}`, the quasi-triangle constant of `f ↦ ‖f*‖_{W(L^p, ℓ^q)}`.
pub fn tia_modulus_bound(p: &Exponent, q: &Exponent) -> ExtReal {
    pow_rat(&int(2), &(p.recip() + q.recip()))
}

/// Quasi-triangle constant for `WL(A, B)` assembled from the dilation
/// argument: `C_A‖D_{1/2}‖_A + C_B‖D_{1/2}‖_B·max(1, K)` with
/// `K = ‖χ_[0,1/2)‖_B / ‖χ_[0,1/2)‖_A`.
pub fn wl_modulus_bound(local: &NormSpec, global: &NormSpec) -> Result<ExtReal> {
    let half = rat(1, 2);
    let chi_half = Ppf::indicator(Rational::zero(), half.clone(), Rational::one());
    let k = norm_eval(global, &chi_half)?.div(&norm_eval(local, &chi_half)?);
    let head = modulus_of_concavity(local).mul(&dilation_norm(local, &half));
    let tail = modulus_of_concavity(global)
        .mul(&dilation_norm(global, &half))
        .mul(&k.max(&ExtReal::one()));
    Ok(head.add(&tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(s: &str) -> NormSpec {
        s.parse().unwrap()
    }

    fn step(blocks: &[(Rational, Rational, Rational)]) -> StepFunction {
        StepFunction::from_blocks(
            &blocks
                .iter()
                .map(|(a, b, c)| (a.clone(), Some(b.clone()), c.clone()))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn grammar() {
        for s in ["WL:L:1:L:inf", "W:2:1", "Int:L:1/2", "Int:WL:Lorentz:2:1:L:3", "L:2"] {
            assert_eq!(s.parse::<SpaceSpec>().unwrap().to_string(), s);
        }
        assert!("W:1/2:1".parse::<SpaceSpec>().is_err());
        assert!("Int:W:1:1".parse::<SpaceSpec>().is_err());
        assert!("Int:Int:L:1".parse::<SpaceSpec>().is_err());
        assert!("WL:L:1".parse::<SpaceSpec>().is_err());
    }

    #[test]
    fn wl_examples() {
        let f = step(&[(int(0), int(2), int(3))]);
        assert_eq!(
            wl_norm(&norm("L:1"), &norm("L:inf"), &f).unwrap(),
            ExtReal::Exact(int(6))
        );
        assert_eq!(
            wl_components(&norm("L:1"), &norm("L:inf"), &f).unwrap(),
            (ExtReal::Exact(int(3)), ExtReal::Exact(int(3)))
        );
        let chi2 = step(&[(int(0), int(2), int(1))]);
        assert_eq!(
            wl_norm(&norm("L:1"), &norm("L:1"), &chi2).unwrap(),
            ExtReal::Exact(int(2))
        );
        let flat = step(&[(int(0), int(100), rat(1, 100))]);
        assert_eq!(
            wl_norm(&norm("L:1"), &norm("L:1/2"), &flat).unwrap(),
            ExtReal::Exact(rat(9802, 100))
        );
        let chi1 = step(&[(int(0), int(1), int(1))]);
        let (head, tail) = wl_components(&norm("Lorentz:2:1"), &norm("L:3"), &chi1).unwrap();
        assert_eq!((head, tail), (ExtReal::Exact(int(2)), ExtReal::zero()));
        let two = step(&[(int(0), int(1), int(5)), (int(1), int(2), int(2))]);
        assert_eq!(
            wl_components(&norm("L:inf"), &norm("L:1"), &two).unwrap(),
            (ExtReal::Exact(int(5)), ExtReal::Exact(int(2)))
        );
    }

    #[test]
    fn wiener_examples() {
        let f = step(&[(int(0), rat(3, 2), int(1))]);
        let w = wiener_norm(&Exponent::int(2), &Exponent::int(1), &f);
        assert!(!w.is_exact());
        assert!((w.to_f64() - (1.0 + 0.5f64.sqrt())).abs() < 1e-12);
        assert_eq!(
            wiener_norm(&Exponent::int(2), &Exponent::int(1), &StepFunction::zero()),
            ExtReal::zero()
        );
        let shifted = step(&[(int(5), int(6), int(1))]);
        assert_eq!(
            rearranged_wiener(&Exponent::int(2), &Exponent::int(1), &shifted),
            ExtReal::one()
        );
        let many = step(&[(rat(1, 3), rat(17, 2), int(2)), (int(9), int(12), int(1))]);
        for p in ["1", "2", "3/2", "inf"] {
            let e: Exponent = p.parse().unwrap();
            let w = wiener_norm(&e, &e, &many);
            let l = norm_of(&NormSpec::Lebesgue(e.clone()), &many).unwrap();
            assert!(w.approx_eq(&l, 1e-12), "{p}: {w} vs {l}");
        }
    }

    #[test]
    fn wiener_matches_cellwise_oracle() {
        // Direct oracle: evaluate each unit cell separately.
        let f = step(&[
            (rat(1, 4), rat(5, 2), int(3)),
            (rat(5, 2), rat(7, 2), rat(1, 2)),
            (int(7), rat(29, 3), int(2)),
        ]);
        let (p, q) = (Exponent::int(2), Exponent::int(3));
        let mut cells = Vec::new();
        for n in 0..10 {
            let cell = f.restrict(&crate::stepfn::Interval::bounded(int(n), int(n + 1)));
            let v = norm_eval(&NormSpec::Lebesgue(p.clone()), &cell).unwrap();
            cells.push(v.to_f64().powi(3));
        }
        let oracle = cells.iter().sum::<f64>().cbrt();
        let w = wiener_norm(&p, &q, &f);
        assert!((w.to_f64() - oracle).abs() / oracle < 1e-12);
        let sup = wiener_norm(&p, &Exponent::Infinity, &f);
        assert_eq!(sup, ExtReal::Exact(int(3)));
        let tail = StepFunction::from_blocks(&[(rat(1, 2), None, int(1))]).unwrap();
        assert!(wiener_norm(&p, &q, &tail).is_infinite());
        assert_eq!(wiener_norm(&p, &Exponent::Infinity, &tail), ExtReal::one());
    }

    #[test]
    fn integrable_examples() {
        let inner: SpaceSpec = "L:1/2".parse().unwrap();
        let chi1 = step(&[(int(0), int(1), int(1))]);
        assert_eq!(integrable_norm(&inner, &chi1).unwrap(), ExtReal::one());
        let flat = step(&[(int(0), int(100), rat(1, 100))]);
        assert_eq!(integrable_norm(&inner, &flat).unwrap(), ExtReal::Exact(int(100)));
        let int_spec: SpaceSpec = "Int:L:1/2".parse().unwrap();
        assert_eq!(space_norm(&int_spec, &flat).unwrap(), ExtReal::Exact(int(100)));
        // the L¹–L^∞ term alone
        let g = rearrange_step(&flat);
        assert_eq!(l1_linf_term(&g), ExtReal::Exact(rat(2, 100)));
    }

    #[test]
    fn modulus_constants() {
        assert_eq!(
            tia_modulus_bound(&Exponent::int(1), &Exponent::int(1)),
            ExtReal::Exact(int(4))
        );
        assert_eq!(
            tia_modulus_bound(&Exponent::Infinity, &Exponent::Infinity),
            ExtReal::one()
        );
        assert_eq!(
            tia_modulus_bound(&Exponent::int(2), &Exponent::int(2)),
            ExtReal::Exact(int(2))
        );
        // WL(L¹, L¹): 2 + 2 = 4
        assert_eq!(
            wl_modulus_bound(&norm("L:1"), &norm("L:1")).unwrap(),
            ExtReal::Exact(int(4))
        );
        // WL(L¹, L^{1/2}): 2 + 2·4·max(1, 1/2) = 10
        assert_eq!(
            wl_modulus_bound(&norm("L:1"), &norm("L:1/2")).unwrap(),
            ExtReal::Exact(int(10))
        );
    }
}
