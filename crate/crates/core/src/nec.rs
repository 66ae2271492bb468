//! Null energy condition for the quadratic `F(R)` thin-shell wormhole.
//!
//! Two quantities decide the condition at the shell: `κσ` (the `η̃`
//! inequality) and `κ(σ - ν_ϑ)` (the angular one, shared by `ϑ` and `φ`).
//! Both are assembled in full from mollified metric and Christoffel
//! components, and separately reduced to delta polynomials by the
//! substitution ansatz.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::association::{
    classify, sample_negative_parts_corpus, sample_pairs_corpus, EpsSchedule, LimitKind,
    LimitVerdict, VerdictOptions,
};
use crate::error::{Error, Result};
use crate::genfunc::{negative_part_pair, pair, GenScalar, Node, Sign, TestForm};
use crate::jet::Jet;
use crate::mollifier::Mollifier;
use crate::wormhole::{embedded_component, throat_constants, Component, WormholeParams};

/// `c_delta δ + c_delta1 δ′ + c_delta2 δ″ + c_deltasq δ² + c_delta_delta1 δδ′`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DeltaPolynomial {
    pub c_delta: f64,
    pub c_delta1: f64,
    pub c_delta2: f64,
    pub c_deltasq: f64,
    /// Only produced by the substitution rule for `Θ·δ″`.
    pub c_delta_delta1: f64,
}

impl DeltaPolynomial {
    pub fn coefficients(&self) -> [f64; 5] {
        [
            self.c_delta,
            self.c_delta1,
            self.c_delta2,
            self.c_deltasq,
            self.c_delta_delta1,
        ]
    }

    /// Largest coefficient difference.
    pub fn max_abs_diff(&self, other: &DeltaPolynomial) -> f64 {
        self.coefficients()
            .iter()
            .zip(other.coefficients())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_genscalar(&self, moll: &Arc<Mollifier>) -> Result<GenScalar> {
        let d0 = GenScalar::embed_delta(moll);
        let d1 = GenScalar::embed_delta_deriv(moll, 1)?;
        GenScalar::sum(&[
            d0.scale(self.c_delta),
            d1.scale(self.c_delta1),
            GenScalar::embed_delta_deriv(moll, 2)?.scale(self.c_delta2),
            d0.square().scale(self.c_deltasq),
            d0.mul(&d1)?.scale(self.c_delta_delta1),
        ])
    }
}

impl fmt::Display for DeltaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.10e} d + {:.10e} d' + {:.10e} d'' + {:.10e} d^2",
            self.c_delta, self.c_delta1, self.c_delta2, self.c_deltasq
        )?;
        if self.c_delta_delta1 != 0.0 {
            write!(f, " + {:.10e} d d'", self.c_delta_delta1)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Inequality {
    /// `κσ ≥ 0`.
    Sigma,
    /// `κ(σ - ν_ϑ) ≥ 0`; the `φ` inequality is identical.
    SigmaMinusNu,
}

impl Inequality {
    pub const ALL: [Inequality; 2] = [Inequality::Sigma, Inequality::SigmaMinusNu];

    pub fn as_str(&self) -> &'static str {
        match self {
            Inequality::Sigma => "sigma",
            Inequality::SigmaMinusNu => "sigma_minus_nu",
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// `-(4/a)A^{3/2}`: the general-relativity `κσ`, times δ.
pub fn classical_sigma(p: &WormholeParams) -> f64 {
    -4.0 / p.throat_radius * p.lapse_at_throat().powf(1.5)
}

/// `(6M - 2a)√A`: the general-relativity `κ(σ - ν_ϑ)`, times δ.
pub fn classical_sigma_minus_nu(p: &WormholeParams) -> f64 {
    (6.0 * p.mass - 2.0 * p.throat_radius) * p.lapse_at_throat().sqrt()
}

/// `κσ` with the mollified components.
pub fn assemble_sigma(p: &WormholeParams, moll: &Arc<Mollifier>) -> Result<GenScalar> {
    let c = throat_constants(p);
    let a2 = p.alpha2;
    let d0 = GenScalar::embed_delta(moll);
    let mut terms = vec![d0.scale(classical_sigma(p))];
    if a2 != 0.0 {
        let d1 = GenScalar::embed_delta_deriv(moll, 1)?;
        let d2 = GenScalar::embed_delta_deriv(moll, 2)?;
        let dsq = d0.square();
        let gtt = embedded_component(Component::Gtt, p, moll)?;
        let gam = embedded_component(Component::GammaTt(Sign::Minus), p, moll)?
            .add(&embedded_component(Component::GammaTt(Sign::Plus), p, moll)?)?;
        terms.push(gam.mul(&d1)?.scale(-2.0 * a2 * c.alpha));
        terms.push(gtt.mul(&d2)?.scale(-2.0 * a2 * c.alpha));
        terms.push(gtt.mul(&dsq)?.scale(-a2 * c.alpha * c.alpha));
        terms.push(dsq.scale(-2.0 * a2 * c.alpha * c.beta));
    }
    GenScalar::sum(&terms)
}

/// `κ(σ - ν_ϑ)` with the mollified components.
pub fn assemble_sigma_minus_nu(p: &WormholeParams, moll: &Arc<Mollifier>) -> Result<GenScalar> {
    let c = throat_constants(p);
    let a2 = p.alpha2;
    let d0 = GenScalar::embed_delta(moll);
    let mut terms = vec![d0.scale(classical_sigma_minus_nu(p))];
    if a2 != 0.0 {
        let d1 = GenScalar::embed_delta_deriv(moll, 1)?;
        let dsq = d0.square();
        let gtt = embedded_component(Component::Gtt, p, moll)?;
        let gthth = embedded_component(Component::Gthth, p, moll)?;
        let gam_tt = embedded_component(Component::GammaTt(Sign::Minus), p, moll)?
            .add(&embedded_component(Component::GammaTt(Sign::Plus), p, moll)?)?;
        let gam_thth = embedded_component(Component::GammaThth(Sign::Minus), p, moll)?
            .add(&embedded_component(Component::GammaThth(Sign::Plus), p, moll)?)?;
        let k = 2.0 * a2 * c.alpha;
        terms.push(
            gthth
                .scale(c.beta)
                .add(&gtt.scale(c.gamma))?
                .mul(&dsq)?
                .scale(-k),
        );
        terms.push(
            gtt.mul(&gam_thth)?
                .sub(&gthth.mul(&gam_tt)?)?
                .mul(&d1)?
                .scale(k),
        );
    }
    GenScalar::sum(&terms)
}

/// Closed-form reduction of `κσ`.
pub fn simplified_sigma(p: &WormholeParams) -> DeltaPolynomial {
    let (m, a, a2) = (p.mass, p.throat_radius, p.alpha2);
    let lapse = p.lapse_at_throat();
    let l32 = lapse.powf(1.5);
    let u = m / a;
    DeltaPolynomial {
        c_delta: 4.0 / a
            * (6.0 * a2 * m / a.powi(3) * (u * u * (a / (a - 2.0 * m)).sqrt() - 4.0 * l32) - l32),
        c_delta2: 8.0 * a2 / a * lapse.sqrt() * (2.0 - 3.0 * u),
        c_deltasq: 16.0 * a2 / (a * a) * (u + 2.0 * lapse) * (5.0 * u + 2.0 * lapse),
        ..Default::default()
    }
}

/// Closed-form reduction of `κ(σ - ν_ϑ)`. The `δ²` terms cancel exactly.
pub fn simplified_sigma_minus_nu(p: &WormholeParams) -> DeltaPolynomial {
    let (m, a) = (p.mass, p.throat_radius);
    let lapse = p.lapse_at_throat();
    let alpha = throat_constants(p).alpha;
    DeltaPolynomial {
        c_delta: classical_sigma_minus_nu(p)
            + 2.0 * p.alpha2 * alpha * (m * m / (a * a) - lapse * (1.0 + m / a)),
        ..Default::default()
    }
}

/// `(θ⁺, θ⁻)` weights of one factor: its one-sided jets at the shell.
fn side_jets(node: &Node) -> Result<(Jet, Jet)> {
    Ok(match node {
        Node::Constant(c) => (Jet::constant(*c), Jet::constant(*c)),
        Node::Heaviside(Sign::Plus) => (Jet::constant(1.0), Jet::constant(0.0)),
        Node::Heaviside(Sign::Minus) => (Jet::constant(0.0), Jet::constant(1.0)),
        Node::Embedded { kernel, order: 0 } => kernel.shell_jets(),
        Node::Smooth { f, order } => {
            let mut j = f.jet(0.0);
            for _ in 0..*order {
                j = j.shift();
            }
            (j, j)
        }
        other => {
            return Err(Error::Unsupported(format!(
                "no substitution rule for the factor {other}"
            )))
        }
    })
}

fn binomial(k: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// Relative tolerance for treating a coefficient of `δ²` or `δδ′` as
/// continuous across the shell.
const CONTINUITY_TOL: f64 = 1e-12;

/// Reduce a tree to a delta polynomial.
///
/// Each product `f·δ⁽ᵏ⁾` becomes
/// `Σ_j (-1)^j C(k,j) (f₊⁽ʲ⁾(0)Θ⁺ + f₋⁽ʲ⁾(0)Θ⁻) δ⁽ᵏ⁻ʲ⁾`, then the
/// Heaviside-delta products are replaced by
/// `Θ±δ ≈ δ/2`, `Θ±δ′ ≈ δ′/2 ∓ δ²` and `Θ±δ″ ≈ δ″/2 ∓ 3δδ′`.
/// Coefficients of `δ²` and `δδ′` must be continuous at the shell and are
/// replaced by their shell value.
pub fn substitution_engine(u: &GenScalar) -> Result<DeltaPolynomial> {
    let nf = u.normal_form()?;
    let mut out = DeltaPolynomial::default();
    for mono in crate::genfunc::expand(nf.node())? {
        let mut deltas = Vec::new();
        let mut plus = Jet::constant(mono.coeff);
        let mut minus = Jet::constant(mono.coeff);
        for f in &mono.factors {
            if let Node::DeltaDeriv(k) = **f {
                deltas.push(k);
            } else {
                let (p, q) = side_jets(f)?;
                plus = plus * p;
                minus = minus * q;
            }
        }
        deltas.sort_unstable();
        let continuous = || {
            let (p, q) = (plus.value(), minus.value());
            if (p - q).abs() <= CONTINUITY_TOL * p.abs().max(q.abs()).max(1.0) {
                Ok(0.5 * (p + q))
            } else {
                Err(Error::Unsupported(format!(
                    "coefficient of a squared delta jumps at the shell ({p} vs {q})"
                )))
            }
        };
        match deltas.as_slice() {
            [] => {
                return Err(Error::Unsupported(
                    "term without a delta factor is not shell-supported".into(),
                ))
            }
            [k] if *k <= 2 => {
                for j in 0..=*k {
                    let c = if j % 2 == 0 { 1.0 } else { -1.0 } * binomial(*k, j);
                    let (p, q) = (c * plus.d(j), c * minus.d(j));
                    let mean = 0.5 * (p + q);
                    match k - j {
                        0 => out.c_delta += mean,
                        1 => {
                            out.c_delta1 += mean;
                            out.c_deltasq -= p - q;
                        }
                        _ => {
                            out.c_delta2 += mean;
                            out.c_delta_delta1 -= 3.0 * (p - q);
                        }
                    }
                }
            }
            [0, 0] => out.c_deltasq += continuous()?,
            [0, 1] => out.c_delta_delta1 += continuous()?,
            [k] => return Err(Error::DeltaOrderOutOfRange(*k)),
            _ => {
                return Err(Error::Unsupported(format!(
                    "no substitution rule for the delta product {deltas:?}"
                )))
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    /// Root of `M²/a² - A(1 + M/a)`, where the `α₂` part of the angular
    /// `δ` coefficient changes sign: `(1 + √13)M/2`.
    pub a1: f64,
    /// Sign change of the classical angular coefficient: `3M`.
    pub classical: f64,
    /// Sign change of the simplified `κσ` `δ` coefficient inside the
    /// scanned range, if any.
    pub sigma_delta_root: Option<f64>,
    /// Throat radii where both summands of the simplified angular `δ`
    /// coefficient are non-negative; `None` if empty.
    pub admissible: Option<(f64, f64)>,
}

fn brent(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    let mut conv = roots::SimpleConvergency {
        eps: 1e-15 * hi.abs().max(1.0),
        max_iter: 200,
    };
    roots::find_root_brent(lo, hi, f, &mut conv).map_err(|e| Error::Bracketing(e.to_string()))
}

/// Sign thresholds of the simplified coefficients in the throat radius.
pub fn sign_analysis(mass: f64, alpha2: f64, a_range: (f64, f64)) -> Result<Thresholds> {
    let (lo, hi) = a_range;
    if !(mass > 0.0 && lo > 2.0 * mass && hi > lo) {
        return Err(Error::InvalidArgument(format!(
            "a range [{lo}, {hi}] must lie above 2M = {}",
            2.0 * mass
        )));
    }
    let m = mass;
    let g = |a: f64| m * m / (a * a) - (1.0 - 2.0 * m / a) * (1.0 + m / a);
    let a1 = brent(g, 2.0 * m, 3.0 * m)?;
    let classical = 3.0 * m;

    let c_delta = |a: f64| {
        WormholeParams::new(m, a, alpha2)
            .map(|p| simplified_sigma(&p).c_delta)
            .unwrap_or(f64::NAN)
    };
    let n = 400;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let mut sigma_delta_root = None;
    for w in grid.windows(2) {
        let (fa, fb) = (c_delta(w[0]), c_delta(w[1]));
        if fa == 0.0 {
            sigma_delta_root = Some(w[0]);
            break;
        }
        if fa * fb < 0.0 {
            sigma_delta_root = Some(brent(c_delta, w[0], w[1])?);
            break;
        }
    }

    let admissible = if alpha2 > 0.0 {
        Some((2.0 * m, a1.min(classical)))
    } else if alpha2 < 0.0 {
        (a1 < classical).then_some((a1, classical))
    } else {
        Some((2.0 * m, classical))
    };
    Ok(Thresholds {
        a1,
        classical,
        sigma_delta_root,
        admissible,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NecVerdict {
    Holds,
    Violated,
    Inconclusive,
}

impl NecVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            NecVerdict::Holds => "holds",
            NecVerdict::Violated => "violated",
            NecVerdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for NecVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct NecFormRow {
    pub form_index: usize,
    pub form: TestForm,
    pub pair: LimitVerdict,
    pub negative_part: LimitVerdict,
}

#[derive(Clone, Debug)]
pub struct InequalityReport {
    pub inequality: Inequality,
    pub verdict: NecVerdict,
    pub forms: Vec<NecFormRow>,
}

/// One row of the δ″ obstruction measurement at a fixed ε.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObstructionRow {
    pub eps: f64,
    /// `c_deltasq ∫ρ_ε² w`.
    pub square_mass: f64,
    /// `|∫(c_delta2 ρ_ε″)₋ w|`.
    pub second_derivative_negative_mass: f64,
}

impl ObstructionRow {
    pub fn ratio(&self) -> f64 {
        self.square_mass / self.second_derivative_negative_mass
    }
}

#[derive(Clone, Debug)]
pub struct NecReport {
    pub params: WormholeParams,
    pub simplified_sigma: DeltaPolynomial,
    pub simplified_sigma_minus_nu: DeltaPolynomial,
    pub thresholds: Thresholds,
    pub inequalities: Vec<InequalityReport>,
    /// Measured on the first corpus form covering the shell; empty if none
    /// does or if `α₂ = 0`.
    pub obstruction: Vec<ObstructionRow>,
}

impl NecReport {
    pub fn inequality(&self, which: Inequality) -> &InequalityReport {
        self.inequalities
            .iter()
            .find(|r| r.inequality == which)
            .expect("both inequalities are always present")
    }
}

pub fn assemble(which: Inequality, p: &WormholeParams, moll: &Arc<Mollifier>) -> Result<GenScalar> {
    match which {
        Inequality::Sigma => assemble_sigma(p, moll),
        Inequality::SigmaMinusNu => assemble_sigma_minus_nu(p, moll),
    }
}

fn inequality_verdict(rows: &[NecFormRow], opts: &VerdictOptions) -> NecVerdict {
    if rows.iter().any(|r| r.negative_part.is_inconclusive()) {
        NecVerdict::Inconclusive
    } else if rows.iter().all(|r| r.negative_part.is_zero(opts)) {
        NecVerdict::Holds
    } else {
        NecVerdict::Violated
    }
}

/// Generalized non-negativity of both inequalities, with pair limits for
/// context, the simplified coefficients and the sign thresholds.
pub fn nec_verdict(
    p: &WormholeParams,
    moll: &Arc<Mollifier>,
    corpus: &[TestForm],
    s: &EpsSchedule,
    opts: &VerdictOptions,
    a_range: (f64, f64),
) -> Result<NecReport> {
    let mut inequalities = Vec::new();
    for which in Inequality::ALL {
        let u = assemble(which, p, moll)?;
        let pairs = sample_pairs_corpus(&u, corpus, s)?;
        let negs = sample_negative_parts_corpus(&u, corpus, s)?;
        let forms: Vec<NecFormRow> = corpus
            .iter()
            .zip(pairs.iter().zip(&negs))
            .enumerate()
            .map(|(i, (w, (p, n)))| NecFormRow {
                form_index: i,
                form: *w,
                pair: classify(p, opts),
                negative_part: classify(n, opts),
            })
            .collect();
        inequalities.push(InequalityReport {
            inequality: which,
            verdict: inequality_verdict(&forms, opts),
            forms,
        });
    }
    let simplified = simplified_sigma(p);
    let obstruction = match corpus.iter().find(|w| w.covers(0.0)) {
        Some(w) if p.alpha2 != 0.0 => obstruction_table(&simplified, moll, w, s)?,
        _ => Vec::new(),
    };
    Ok(NecReport {
        params: *p,
        simplified_sigma: simplified,
        simplified_sigma_minus_nu: simplified_sigma_minus_nu(p),
        thresholds: sign_analysis(p.mass, p.alpha2, a_range)?,
        inequalities,
        obstruction,
    })
}

/// Positive `δ²` mass against the negative part of the `δ″` term, per ε.
pub fn obstruction_table(
    poly: &DeltaPolynomial,
    moll: &Arc<Mollifier>,
    w: &TestForm,
    s: &EpsSchedule,
) -> Result<Vec<ObstructionRow>> {
    let sq = GenScalar::embed_delta(moll).square().scale(poly.c_deltasq);
    let d2 = GenScalar::embed_delta_deriv(moll, 2)?.scale(poly.c_delta2);
    s.grid()
        .into_par_iter()
        .map(|eps| {
            Ok(ObstructionRow {
                eps,
                square_mass: pair(&sq, w, eps)?,
                second_derivative_negative_mass: negative_part_pair(&d2, w, eps)?.abs(),
            })
        })
        .collect()
}

/// Limit classification helper for reports: the fitted order column.
pub fn fitted_order(v: &LimitVerdict) -> f64 {
    match v.kind {
        LimitKind::DivergesOrder { order, .. } => order,
        _ => v.fitted_order,
    }
}
