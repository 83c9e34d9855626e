//! Pairings `∫fg`, Hölder checks and lower bounds for associate norms.

use num::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::amalgam::{space_norm_profile, wl_norm, SpaceSpec};
use crate::error::{Error, Result};
use crate::ext::{int, rat, ExtReal, Rational};
use crate::norms::{dual_exponent, dual_spec, norm_of, Exponent, NormSpec};
use crate::stepfn::calculus::power_integral;
use crate::stepfn::{rearrange_step, MonotoneProfile, Ppf, StepFunction};

/// Relative slack for comparisons involving approximate values.
pub const CHECK_TOL: f64 = 1e-9;

/// `∫ f·g dλ` over the common refinement of the two piece lists.
pub fn raw_pairing(f: &Ppf, g: &Ppf) -> ExtReal {
    let (fp, gp) = (f.pieces(), g.pieces());
    let mut terms = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < fp.len() && j < gp.len() {
        let (a, b) = (&fp[i], &gp[j]);
        if let Some(common) = a.interval.intersect(&b.interval) {
            terms.push(power_integral(
                &ExtReal::Exact(&a.coeff * &b.coeff),
                &(&a.exponent + &b.exponent),
                common.start(),
                common.end(),
            ));
        }
        // advance whichever piece ends first
        let a_first = match (a.interval.end(), b.interval.end()) {
            (Some(x), Some(y)) => x <= y,
            (Some(_), None) => true,
            (None, _) => false,
        };
        if a_first {
            i += 1;
        } else {
            j += 1;
        }
    }
    ExtReal::sum(terms.iter())
}

/// `∫_0^∞ f*·g* dλ`.
pub fn rearranged_pairing(f: &StepFunction, g: &StepFunction) -> ExtReal {
    raw_pairing(rearrange_step(f).as_ppf(), rearrange_step(g).as_ppf())
}

#[derive(Clone, Debug, Serialize)]
pub struct HolderReport {
    pub spec: NormSpec,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    pub pass: bool,
}

/// `∫fg ≤ ‖f‖_X·‖g‖_{X'}` for `X = spec` and its associate `X'`.
pub fn holder_check(spec: &NormSpec, f: &StepFunction, g: &StepFunction) -> Result<HolderReport> {
    let dual = dual_spec(spec)?;
    let lhs = raw_pairing(f, g);
    let rhs = norm_of(spec, f)?.mul(&norm_of(&dual, g)?);
    let pass = lhs.le_tol(&rhs, CHECK_TOL);
    Ok(HolderReport {
        spec: spec.clone(),
        lhs,
        rhs,
        pass,
    })
}

/// Finite list of test functions for the associate supremum, each stored
/// with its norm under `spec`.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    spec: SpaceSpec,
    candidates: Vec<(MonotoneProfile, ExtReal)>,
}

impl CandidateSet {
    /// Fails with `DegenerateCandidate` if some norm is zero or infinite.
    pub fn new(spec: SpaceSpec, profiles: Vec<MonotoneProfile>) -> Result<Self> {
        let candidates = profiles
            .into_iter()
            .map(|g| {
                let n = space_norm_profile(&spec, &g)?;
                if n.is_zero() || n.is_infinite() {
                    return Err(Error::DegenerateCandidate);
                }
                Ok((g, n))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CandidateSet { spec, candidates })
    }

    /// Indicators `χ_[0,2^k)` for `k ∈ [-10, 10]` and power profiles
    /// `t^{-j/16}χ_(0,1)` for `j = 1..15`, keeping those with finite
    /// positive norm under `spec`.
    pub fn default_family(spec: SpaceSpec) -> Self {
        let mut profiles = Vec::new();
        for k in -10i32..=10 {
            let s = if k >= 0 { int(1 << k) } else { rat(1, 1 << -k) };
            profiles.push(indicator_profile(s));
        }
        for j in 1..16 {
            let g = Ppf::power(Rational::zero(), Some(Rational::one()), Rational::one(), rat(-j, 16))
                .expect("valid power piece");
            profiles.push(MonotoneProfile::new(g).expect("decreasing power piece"));
        }
        let candidates = profiles
            .into_iter()
            .filter_map(|g| {
                let n = space_norm_profile(&spec, &g).ok()?;
                (!n.is_zero() && n.is_finite()).then_some((g, n))
            })
            .collect();
        CandidateSet { spec, candidates }
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

fn indicator_profile(s: Rational) -> MonotoneProfile {
    MonotoneProfile::new(Ppf::indicator(Rational::zero(), s, Rational::one())).expect("indicator is monotone")
}

/// `max_g ∫f*g / ‖g‖` over the candidates: a lower bound for the associate
/// norm of `f` with respect to the candidates' spec.
pub fn associate_lower_bound(f: &StepFunction, candidates: &CandidateSet) -> Result<ExtReal> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let star = rearrange_step(f);
    let best = candidates
        .candidates
        .par_iter()
        .map(|(g, n)| raw_pairing(star.as_ppf(), g.as_ppf()).div(n))
        .reduce(ExtReal::zero, |a, b| a.max(&b));
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub local: Exponent,
    pub global: Exponent,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    pub pass: bool,
}

/// `∫f*g* ≤ ‖f‖_{WL(L^{p'}, L^{q'})}·‖g‖_{WL(L^p, L^q)}`.
pub fn wl_duality_check(p: &Exponent, q: &Exponent, f: &StepFunction, g: &StepFunction) -> Result<DualityReport> {
    let (pd, qd) = (dual_exponent(p)?, dual_exponent(q)?);
    let lhs = rearranged_pairing(f, g);
    let dual_norm = wl_norm(&NormSpec::Lebesgue(pd), &NormSpec::Lebesgue(qd), f)?;
    let norm = wl_norm(&NormSpec::Lebesgue(p.clone()), &NormSpec::Lebesgue(q.clone()), g)?;
    let rhs = dual_norm.mul(&norm);
    let pass = lhs.le_tol(&rhs, CHECK_TOL);
    Ok(DualityReport {
        local: p.clone(),
        global: q.clone(),
        lhs,
        rhs,
        pass,
    })
}
