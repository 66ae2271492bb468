//! Numerical ε → 0 limits, association and generalized non-negativity.
//!
//! A limit is estimated from pairings on a geometric ε grid. The verdict is
//! one of: convergence (power-law tail extrapolated, or a flat tail at the
//! rounding floor), divergence with a fitted order, or inconclusive.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{fit_loglog, LineFit};
use crate::genfunc::{GenScalar, Sampler, Sign, SmoothSide, TestForm, Weight};
use crate::mollifier::Mollifier;

/// Below this many samples no verdict other than inconclusive is issued.
pub const MIN_SAMPLES: usize = 8;
/// Smallest admissible ε.
pub const EPS_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsSchedule {
    pub eps0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for EpsSchedule {
    /// `ε_j = 0.2·0.7^j`, `j = 0..24`.
    fn default() -> Self {
        Self {
            eps0: 0.2,
            ratio: 0.7,
            count: 25,
        }
    }
}

impl EpsSchedule {
    /// Schedules with fewer than [`MIN_SAMPLES`] points are accepted but only
    /// ever yield inconclusive verdicts.
    pub fn new(eps0: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(eps0 > 0.0 && eps0 <= 1.0) {
            return Err(Error::InvalidArgument(format!("eps0 = {eps0} outside (0, 1]")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidArgument(format!("ratio = {ratio} outside (0, 1)")));
        }
        if count < 2 {
            return Err(Error::InvalidArgument(format!("schedule needs at least 2 points, got {count}")));
        }
        let s = Self { eps0, ratio, count };
        if s.smallest() < EPS_FLOOR {
            return Err(Error::InvalidArgument(format!(
                "smallest eps {:e} is below the floor {EPS_FLOOR:e}",
                s.smallest()
            )));
        }
        Ok(s)
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.count)
            .map(|j| self.eps0 * self.ratio.powi(j as i32))
            .collect()
    }

    pub fn smallest(&self) -> f64 {
        self.eps0 * self.ratio.powi(self.count as i32 - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerdictOptions {
    /// Convergence tolerance, relative to `1 + |limit|`.
    pub rel_tol: f64,
    /// Minimum power-law order of the differences for extrapolation.
    pub min_slope: f64,
    /// Maximum RMS residual of a log-log fit.
    pub max_fit_residual: f64,
    pub min_divergence_order: f64,
    /// Number of trailing samples used in fits.
    pub fit_window: usize,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-4,
            min_slope: 0.5,
            max_fit_residual: 0.15,
            min_divergence_order: 0.3,
            fit_window: 12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LimitKind {
    ConvergedTo(f64),
    /// `I(ε) ≈ constant · ε^{-order}`.
    DivergesOrder { order: f64, constant: f64 },
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitVerdict {
    pub kind: LimitKind,
    /// Fitted order: the divergence order, or the decay order of the
    /// successive differences for a converged limit (infinite when the tail
    /// is exactly constant).
    pub fitted_order: f64,
    pub fit_residual: f64,
    /// `(ε, value)` in schedule order.
    pub samples: Vec<(f64, f64)>,
}

impl LimitVerdict {
    pub fn limit(&self) -> Option<f64> {
        match self.kind {
            LimitKind::ConvergedTo(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_zero(&self, opts: &VerdictOptions) -> bool {
        matches!(self.kind, LimitKind::ConvergedTo(v) if v.abs() <= opts.rel_tol)
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.kind, LimitKind::Inconclusive(_))
    }

    pub fn last_sample(&self) -> f64 {
        self.samples.last().map(|s| s.1).unwrap_or(f64::NAN)
    }
}

impl fmt::Display for LimitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            LimitKind::ConvergedTo(v) => write!(f, "converged to {v:.6e}"),
            LimitKind::DivergesOrder { order, constant } => {
                write!(f, "diverges as {constant:.4e} * eps^-{order:.3}")
            }
            LimitKind::Inconclusive(why) => write!(f, "inconclusive ({why})"),
        }
    }
}

fn verdict(kind: LimitKind, fit: Option<LineFit>, order: f64, samples: &[(f64, f64)]) -> LimitVerdict {
    LimitVerdict {
        kind,
        fitted_order: order,
        fit_residual: fit.map(|f| f.residual).unwrap_or(0.0),
        samples: samples.to_vec(),
    }
}

/// Classify a sampled ε-sequence (ε decreasing).
pub fn classify(samples: &[(f64, f64)], opts: &VerdictOptions) -> LimitVerdict {
    let n = samples.len();
    if n < MIN_SAMPLES {
        return verdict(
            LimitKind::Inconclusive(format!("{n} samples, need at least {MIN_SAMPLES}")),
            None,
            f64::NAN,
            samples,
        );
    }
    if samples.iter().any(|s| !s.1.is_finite()) {
        return verdict(
            LimitKind::Inconclusive("non-finite sample".into()),
            None,
            f64::NAN,
            samples,
        );
    }
    let tail = &samples[n - opts.fit_window.clamp(3, n)..];
    let (eps, vals): (Vec<f64>, Vec<f64>) = tail.iter().copied().unzip();
    let last = *vals.last().unwrap();

    if vals.iter().all(|v| *v == 0.0) {
        return verdict(LimitKind::ConvergedTo(0.0), None, f64::INFINITY, samples);
    }

    // Divergence: one sign throughout and a clean power law.
    let one_sign = vals.iter().all(|v| *v > 0.0) || vals.iter().all(|v| *v < 0.0);
    if one_sign {
        if let Some(fit) = fit_loglog(&eps, &vals) {
            let p = -fit.slope;
            if p >= opts.min_divergence_order && fit.residual <= opts.max_fit_residual {
                return verdict(
                    LimitKind::DivergesOrder {
                        order: p,
                        constant: last.signum() * fit.intercept.exp(),
                    },
                    Some(fit),
                    p,
                    samples,
                );
            }
        }
    }

    let tol = opts.rel_tol * (1.0 + last.abs());
    let diffs: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
    let deps: Vec<f64> = eps[1..].to_vec();

    // Power-law tail of the successive differences, extrapolated
    // geometrically.
    if let Some(fit) = fit_loglog(&deps, &diffs) {
        let q = fit.slope;
        let d_last = *diffs.last().unwrap();
        let same_sign = diffs.iter().all(|d| d.signum() == d_last.signum() || *d == 0.0);
        if q >= opts.min_slope && fit.residual <= opts.max_fit_residual && same_sign {
            let ratio = eps[eps.len() - 1] / eps[eps.len() - 2];
            let rq = ratio.powf(q);
            let limit = last + d_last * rq / (1.0 - rq);
            if (last - limit).abs() <= opts.rel_tol * (1.0 + limit.abs()) {
                return verdict(LimitKind::ConvergedTo(limit), Some(fit), q, samples);
            }
        }
    }

    // Flat tail: the last samples agree to well within the tolerance, which
    // is what remains once the differences reach the rounding floor.
    let k = 6.min(vals.len());
    let recent = &vals[vals.len() - k..];
    let spread = recent.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
        - recent.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    if spread <= 0.1 * tol {
        return verdict(
            LimitKind::ConvergedTo(last),
            fit_loglog(&deps, &diffs),
            fit_loglog(&deps, &diffs).map(|f| f.slope).unwrap_or(f64::NAN),
            samples,
        );
    }

    verdict(
        LimitKind::Inconclusive("neither a stable limit nor a clean divergence".into()),
        fit_loglog(&eps, &vals),
        f64::NAN,
        samples,
    )
}

/// Samples `pair(u, w, ε)` over the schedule, in schedule order.
pub fn sample_pairs(u: &GenScalar, w: &dyn Weight, s: &EpsSchedule) -> Result<Vec<(f64, f64)>> {
    s.grid()
        .into_par_iter()
        .map(|e| Ok((e, Sampler::new(u, e)?.pair(w)?)))
        .collect()
}

/// Samples the negative-part pairing over the schedule.
pub fn sample_negative_parts(
    u: &GenScalar,
    w: &dyn Weight,
    s: &EpsSchedule,
) -> Result<Vec<(f64, f64)>> {
    s.grid()
        .into_par_iter()
        .map(|e| Ok((e, Sampler::new(u, e)?.negative_part(w)?)))
        .collect()
}

pub fn estimate_limit(
    u: &GenScalar,
    w: &dyn Weight,
    s: &EpsSchedule,
    opts: &VerdictOptions,
) -> Result<LimitVerdict> {
    Ok(classify(&sample_pairs(u, w, s)?, opts))
}

pub fn estimate_negative_part_limit(
    u: &GenScalar,
    w: &dyn Weight,
    s: &EpsSchedule,
    opts: &VerdictOptions,
) -> Result<LimitVerdict> {
    Ok(classify(&sample_negative_parts(u, w, s)?, opts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::Fails => "fails",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct FormVerdict {
    pub form_index: usize,
    pub form: TestForm,
    pub verdict: LimitVerdict,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub outcome: Outcome,
    pub forms: Vec<FormVerdict>,
    /// First form responsible for a non-holding outcome.
    pub offending: Option<usize>,
    /// Largest fitted order among the forms (divergence orders for failing
    /// non-negativity checks).
    pub worst_order: f64,
}

fn aggregate(forms: Vec<FormVerdict>, holds: impl Fn(&LimitVerdict) -> bool) -> Report {
    let inconclusive = forms.iter().find(|f| f.verdict.is_inconclusive());
    let failing = forms
        .iter()
        .find(|f| !f.verdict.is_inconclusive() && !holds(&f.verdict));
    let (outcome, offending) = match (inconclusive, failing) {
        (Some(f), _) => (Outcome::Inconclusive, Some(f.form_index)),
        (None, Some(f)) => (Outcome::Fails, Some(f.form_index)),
        (None, None) => (Outcome::Holds, None),
    };
    let worst_order = forms
        .iter()
        .map(|f| match f.verdict.kind {
            LimitKind::DivergesOrder { order, .. } => order,
            _ => f64::NEG_INFINITY,
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Report {
        outcome,
        forms,
        offending,
        worst_order,
    }
}

/// `(ε, value)` sequences per corpus form. One memoizing sampler per ε is
/// shared by all forms, so forms with a common integration domain reuse
/// evaluations.
fn sample_corpus(
    u: &GenScalar,
    corpus: &[TestForm],
    s: &EpsSchedule,
    negative: bool,
) -> Result<Vec<Vec<(f64, f64)>>> {
    let by_eps: Vec<Vec<f64>> = s
        .grid()
        .into_par_iter()
        .map(|e| {
            let sampler = Sampler::new(u, e)?;
            corpus
                .iter()
                .map(|w| {
                    if negative {
                        sampler.negative_part(w)
                    } else {
                        sampler.pair(w)
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let grid = s.grid();
    Ok((0..corpus.len())
        .map(|i| grid.iter().zip(&by_eps).map(|(e, v)| (*e, v[i])).collect())
        .collect())
}

/// Pair samples for every corpus form, indexed `[form][ε]`.
pub fn sample_pairs_corpus(
    u: &GenScalar,
    corpus: &[TestForm],
    s: &EpsSchedule,
) -> Result<Vec<Vec<(f64, f64)>>> {
    sample_corpus(u, corpus, s, false)
}

/// Negative-part samples for every corpus form, indexed `[form][ε]`.
pub fn sample_negative_parts_corpus(
    u: &GenScalar,
    corpus: &[TestForm],
    s: &EpsSchedule,
) -> Result<Vec<Vec<(f64, f64)>>> {
    sample_corpus(u, corpus, s, true)
}

fn per_form(corpus: &[TestForm], samples: Vec<Vec<(f64, f64)>>, opts: &VerdictOptions) -> Vec<FormVerdict> {
    corpus
        .iter()
        .zip(samples)
        .enumerate()
        .map(|(i, (w, smp))| FormVerdict {
            form_index: i,
            form: *w,
            verdict: classify(&smp, opts),
        })
        .collect()
}

/// `u ≈ v`: the pairing of `u - v` converges to 0 against every form.
pub fn associated(
    u: &GenScalar,
    v: &GenScalar,
    corpus: &[TestForm],
    s: &EpsSchedule,
    opts: &VerdictOptions,
) -> Result<Report> {
    let diff = u.sub(v)?;
    let forms = per_form(corpus, sample_pairs_corpus(&diff, corpus, s)?, opts);
    Ok(aggregate(forms, |v| v.is_zero(opts)))
}

/// `u ≥ 0` in the generalized sense: the negative part pairs to 0 in the
/// limit against every form.
pub fn is_nonnegative(
    u: &GenScalar,
    corpus: &[TestForm],
    s: &EpsSchedule,
    opts: &VerdictOptions,
) -> Result<Report> {
    let forms = per_form(corpus, sample_negative_parts_corpus(u, corpus, s)?, opts);
    Ok(aggregate(forms, |v| v.is_zero(opts)))
}

/// Right-hand side of `f·δ⁽ᵏ⁾ = Σ_j (-1)^j C(k,j) f⁽ʲ⁾(0) δ⁽ᵏ⁻ʲ⁾`.
pub fn smooth_product_rhs(moll: &Arc<Mollifier>, f: &SmoothSide, k: usize) -> Result<GenScalar> {
    if k > 2 {
        return Err(Error::DeltaOrderOutOfRange(k));
    }
    if f.order() < k {
        return Err(Error::MissingDerivative {
            available: f.order(),
            requested: k,
        });
    }
    let j0 = f.jet(0.0);
    let binom = [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 2.0, 1.0]];
    let mut terms = Vec::new();
    for j in 0..=k {
        let c = if j % 2 == 0 { 1.0 } else { -1.0 } * binom[k][j] * j0.d(j);
        terms.push(GenScalar::embed_delta_deriv(moll, k - j)?.scale(c));
    }
    GenScalar::sum(&terms)
}

/// `ι(f)·ι(δ⁽ᵏ⁾) ≈ Σ_j (-1)^j C(k,j) f⁽ʲ⁾(0) ι(δ⁽ᵏ⁻ʲ⁾)` for smooth `f`.
pub fn smooth_product_rule_check(
    moll: &Arc<Mollifier>,
    f: &SmoothSide,
    k: usize,
    corpus: &[TestForm],
    s: &EpsSchedule,
    opts: &VerdictOptions,
) -> Result<Report> {
    let lhs = GenScalar::smooth(moll, f.clone()).mul(&GenScalar::embed_delta_deriv(moll, k)?)?;
    associated(&lhs, &smooth_product_rhs(moll, f, k)?, corpus, s, opts)
}

/// What a suite rule asserts.
#[derive(Clone, Debug)]
pub enum RuleKind {
    /// `lhs ≈ rhs`.
    Associated { lhs: GenScalar, rhs: GenScalar },
    /// Whether `u` is generalized non-negative.
    Nonnegative { u: GenScalar, expected: bool },
    /// If `u ≥ 0` and `u ≈ v` then `v ≥ 0`.
    Stability { u: GenScalar, v: GenScalar },
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub id: String,
    pub description: String,
    pub kind: RuleKind,
}

#[derive(Clone, Debug)]
pub struct RuleResult {
    pub id: String,
    pub description: String,
    pub outcome: Outcome,
    /// Per-form verdicts of the quantity whose limit decides the rule.
    pub forms: Vec<FormVerdict>,
    pub message: String,
}

/// Association and non-negativity identities for products of embedded
/// Heaviside and delta nets. Ids carry the moment order.
pub fn rule_suite(moll: &Arc<Mollifier>) -> Result<Vec<Rule>> {
    let m = moll.moment_order();
    let hp = GenScalar::embed_heaviside(moll, Sign::Plus);
    let hm = GenScalar::embed_heaviside(moll, Sign::Minus);
    let d0 = GenScalar::embed_delta(moll);
    let d1 = GenScalar::embed_delta_deriv(moll, 1)?;
    let d2 = GenScalar::embed_delta_deriv(moll, 2)?;
    let dsq = d0.square();
    let dd1 = d0.mul(&d1)?;
    let mut rules = Vec::new();
    let mut assoc = |id: &str, desc: &str, lhs: GenScalar, rhs: GenScalar| {
        rules.push(Rule {
            id: format!("{id}/m{m}"),
            description: desc.to_string(),
            kind: RuleKind::Associated { lhs, rhs },
        })
    };
    assoc("theta_sq", "H+^2 ~ H+", hp.square(), hp.clone());
    assoc("theta_minus_sq", "H-^2 ~ H-", hm.square(), hm.clone());
    assoc("theta_plus_delta", "H+ delta ~ delta/2", hp.mul(&d0)?, d0.scale(0.5));
    assoc("theta_minus_delta", "H- delta ~ delta/2", hm.mul(&d0)?, d0.scale(0.5));
    assoc(
        "theta_plus_delta1",
        "H+ delta' ~ delta'/2 - delta^2",
        hp.mul(&d1)?,
        d1.scale(0.5).sub(&dsq)?,
    );
    assoc(
        "theta_minus_delta1",
        "H- delta' ~ delta'/2 + delta^2",
        hm.mul(&d1)?,
        d1.scale(0.5).add(&dsq)?,
    );
    assoc(
        "theta_plus_delta2",
        "H+ delta'' ~ delta''/2 - 3 delta delta'",
        hp.mul(&d2)?,
        d2.scale(0.5).sub(&dd1.scale(3.0))?,
    );
    assoc(
        "theta_minus_delta2",
        "H- delta'' ~ delta''/2 + 3 delta delta'",
        hm.mul(&d2)?,
        d2.scale(0.5).add(&dd1.scale(3.0))?,
    );
    let x = SmoothSide::polynomial(crate::genfunc::Side::All, &[0.0, 1.0]);
    let x2 = SmoothSide::polynomial(crate::genfunc::Side::All, &[0.0, 0.0, 1.0]);
    assoc(
        "smooth_delta1",
        "x delta' ~ -delta",
        GenScalar::smooth(moll, x.clone()).mul(&d1)?,
        smooth_product_rhs(moll, &x, 1)?,
    );
    assoc(
        "smooth_delta2",
        "x^2 delta'' ~ 2 delta",
        GenScalar::smooth(moll, x2.clone()).mul(&d2)?,
        smooth_product_rhs(moll, &x2, 2)?,
    );
    let mut nonneg = |id: &str, desc: &str, u: GenScalar, expected: bool| {
        rules.push(Rule {
            id: format!("{id}/m{m}"),
            description: desc.to_string(),
            kind: RuleKind::Nonnegative { u, expected },
        })
    };
    nonneg("delta_sq_nonneg", "delta^2 >= 0", dsq.clone(), true);
    nonneg("delta2_not_nonneg", "delta'' not >= 0", d2.clone(), false);
    nonneg("theta_nonneg", "H+ >= 0", hp.clone(), true);
    if m == 0 {
        nonneg("delta_nonneg", "delta >= 0 for a non-negative profile", d0.clone(), true);
    }
    rules.push(Rule {
        id: format!("stability/m{m}"),
        description: "H+ delta >= 0 and H+ delta ~ delta/2 imply delta/2 >= 0".into(),
        kind: RuleKind::Stability {
            u: hp.mul(&d0)?,
            v: d0.scale(0.5),
        },
    });
    Ok(rules)
}

/// Whether every form's support misses the support of `u` at the largest ε.
fn misses_support(u: &GenScalar, corpus: &[TestForm], s: &EpsSchedule) -> bool {
    let (lo, hi) = u.support(s.eps0);
    corpus.iter().all(|w| {
        let (a, b) = w.support();
        lo > hi || b <= lo || a >= hi
    })
}

pub fn run_rule(
    rule: &Rule,
    corpus: &[TestForm],
    s: &EpsSchedule,
    opts: &VerdictOptions,
) -> Result<RuleResult> {
    let done = |outcome: Outcome, forms: Vec<FormVerdict>, message: String| RuleResult {
        id: rule.id.clone(),
        description: rule.description.clone(),
        outcome,
        forms,
        message,
    };
    let describe = |r: &Report| {
        r.offending
            .map(|i| format!("form {i}: {}", r.forms[i].verdict))
            .unwrap_or_default()
    };
    Ok(match &rule.kind {
        RuleKind::Associated { lhs, rhs } => {
            let r = associated(lhs, rhs, corpus, s, opts)?;
            let msg = describe(&r);
            done(r.outcome, r.forms, msg)
        }
        RuleKind::Nonnegative { u, expected } => {
            let r = is_nonnegative(u, corpus, s, opts)?;
            let msg = describe(&r);
            // No form can witness a failure of a quantity it never meets.
            let unseen = !*expected && r.outcome == Outcome::Holds && misses_support(u, corpus, s);
            let outcome = match r.outcome {
                Outcome::Inconclusive => Outcome::Inconclusive,
                Outcome::Holds if *expected || unseen => Outcome::Holds,
                Outcome::Fails if !*expected => Outcome::Holds,
                _ => Outcome::Fails,
            };
            let msg = if unseen {
                "vacuous: no form meets the support".to_string()
            } else if *expected || outcome != Outcome::Holds {
                msg
            } else {
                format!("negative part diverges with order {:.3}", r.worst_order)
            };
            done(outcome, r.forms, msg)
        }
        RuleKind::Stability { u, v } => {
            let nu = is_nonnegative(u, corpus, s, opts)?;
            let assoc = associated(u, v, corpus, s, opts)?;
            let nv = is_nonnegative(v, corpus, s, opts)?;
            let outcome = match (nu.outcome, assoc.outcome, nv.outcome) {
                (Outcome::Inconclusive, ..) | (_, Outcome::Inconclusive, _) => Outcome::Inconclusive,
                (Outcome::Holds, Outcome::Holds, Outcome::Holds) => Outcome::Holds,
                (Outcome::Holds, Outcome::Holds, Outcome::Fails) => Outcome::Fails,
                (Outcome::Holds, Outcome::Holds, Outcome::Inconclusive) => Outcome::Inconclusive,
                // The premise fails, so the implication holds vacuously.
                _ => Outcome::Holds,
            };
            let msg = format!(
                "u >= 0: {}, u ~ v: {}, v >= 0: {}",
                nu.outcome, assoc.outcome, nv.outcome
            );
            done(outcome, nv.forms, msg)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        EpsSchedule::default().grid().into_iter().map(|e| (e, f(e))).collect()
    }

    #[test]
    fn schedule_grid() {
        let s = EpsSchedule::default();
        let g = s.grid();
        assert_eq!(g.len(), 25);
        assert_eq!(g[0], 0.2);
        assert!((s.smallest() - 0.2 * 0.7f64.powi(24)).abs() < 1e-20);
        assert!(EpsSchedule::new(0.2, 0.1, 25).is_err());
        assert!(EpsSchedule::new(0.2, 0.7, 1).is_err());
    }

    #[test]
    fn classifies_power_law_convergence() {
        let v = classify(&samples(|e| 3.0 + 2.0 * e), &VerdictOptions::default());
        match v.kind {
            LimitKind::ConvergedTo(l) => assert!((l - 3.0).abs() < 1e-10),
            k => panic!("{k:?}"),
        }
        assert!((v.fitted_order - 1.0).abs() < 1e-8);
    }

    #[test]
    fn classifies_divergence() {
        let v = classify(&samples(|e| -0.5 / (e * e) + 1.0 / e), &VerdictOptions::default());
        match v.kind {
            LimitKind::DivergesOrder { order, constant } => {
                assert!((order - 2.0).abs() < 0.05);
                assert!((constant + 0.5).abs() < 0.05);
            }
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn noise_floor_counts_as_converged() {
        let v = classify(
            &samples(|e| 1.0 + 1e-9 * (1e6 * e).sin()),
            &VerdictOptions::default(),
        );
        assert!(matches!(v.kind, LimitKind::ConvergedTo(l) if (l - 1.0).abs() < 1e-8));
    }

    #[test]
    fn oscillation_is_inconclusive() {
        let v = classify(&samples(|e| (1.0 / e).sin()), &VerdictOptions::default());
        assert!(v.is_inconclusive());
        let few: Vec<_> = samples(|_| 1.0).into_iter().take(2).collect();
        assert!(classify(&few, &VerdictOptions::default()).is_inconclusive());
    }

    #[test]
    fn exact_zero() {
        let v = classify(&samples(|_| 0.0), &VerdictOptions::default());
        assert_eq!(v.kind, LimitKind::ConvergedTo(0.0));
    }
}
