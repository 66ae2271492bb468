//! Subcommand drivers. Each returns a text report, optional CSV and an exit
//! code: 0 success, 1 failure, 2 inconclusive.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::association::{rule_suite, run_rule, EpsSchedule, Outcome};
use crate::config::RunConfig;
use crate::error::Result;
use crate::genfunc::{Sign, TestForm};
use crate::mollifier::build_mollifier;
use crate::nec::{
    classical_sigma, classical_sigma_minus_nu, fitted_order, nec_verdict, Inequality, NecReport,
};
use crate::wormhole::{
    proper_distance, proper_distance_by_quadrature, radius_from_distance, throat_constants,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub exit_code: i32,
    pub report: String,
    /// Starts with the configuration echo.
    pub csv: Option<String>,
    pub warnings: Vec<String>,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn schedule(cfg: &RunConfig) -> Result<EpsSchedule> {
    EpsSchedule::new(cfg.schedule.eps0, cfg.schedule.ratio, cfg.schedule.count)
}

fn vacuous_warning(corpus: &[TestForm]) -> Option<String> {
    (!corpus.iter().any(|w| w.covers(0.0))).then(|| {
        "no test form meets the shell at 0; shell-supported verdicts are vacuous".to_string()
    })
}

/// The association and non-negativity rule suite for every configured
/// moment order.
pub fn run_rules(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let corpus = cfg.corpus()?;
    let s = schedule(cfg)?;
    let mut report = cfg.echo();
    let mut csv = cfg.echo();
    csv.push_str("rule_id,form_id,eps,value,verdict\n");
    let warnings: Vec<String> = vacuous_warning(&corpus).into_iter().collect();
    let (mut failed, mut inconclusive) = (false, false);
    let _ = writeln!(report, "{:<28} {:<13} detail", "rule", "verdict");
    for &m in &cfg.rule_moment_orders {
        let moll = build_mollifier(m, cfg.mollifier_kind)?;
        for rule in rule_suite(&moll)? {
            let r = run_rule(&rule, &corpus, &s, &cfg.verdict)?;
            failed |= r.outcome == Outcome::Fails;
            inconclusive |= r.outcome == Outcome::Inconclusive;
            let _ = writeln!(report, "{:<28} {:<13} {}", r.id, r.outcome, r.message);
            for f in &r.forms {
                for (eps, v) in &f.verdict.samples {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{}",
                        r.id,
                        f.form_index,
                        num(*eps),
                        num(*v),
                        r.outcome
                    );
                }
            }
        }
    }
    let exit_code = if failed {
        EXIT_FAILURE
    } else if inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    Ok(RunOutput {
        exit_code,
        report,
        csv: Some(csv),
        warnings,
    })
}

/// Proper distance table, round-trip residuals and throat constants.
pub fn run_geometry(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let p = cfg.params()?;
    let mut report = cfg.echo();
    let mut csv = cfg.echo();
    csv.push_str("r,eta,eta_quadrature,roundtrip_residual\n");
    let mut worst = 0.0f64;
    let _ = writeln!(
        report,
        "{:>12} {:>24} {:>24} {:>12}",
        "r", "eta", "eta (quadrature)", "|dr|/r"
    );
    for &r in &cfg.geometry_radii {
        let eta = proper_distance(r, Sign::Plus, &p)?;
        let eq = proper_distance_by_quadrature(r, Sign::Plus, &p)?;
        let res = (radius_from_distance(eta, &p)? - r).abs() / r;
        worst = worst.max(res);
        let _ = writeln!(report, "{r:>12} {eta:>24.16e} {eq:>24.16e} {res:>12.3e}");
        let _ = writeln!(csv, "{},{},{},{}", num(r), num(eta), num(eq), num(res));
    }
    let c = throat_constants(&p);
    let _ = writeln!(report, "alpha = {:.10}", c.alpha);
    let _ = writeln!(report, "beta  = {:.10}", c.beta);
    let _ = writeln!(report, "gamma = {:.10}", c.gamma);
    let _ = writeln!(report, "classical sigma coefficient          = {:.10}", classical_sigma(&p));
    let _ = writeln!(
        report,
        "classical sigma - nu coefficient     = {:.10}",
        classical_sigma_minus_nu(&p)
    );
    let ok = worst <= 1e-10;
    let _ = writeln!(
        report,
        "round trip: worst relative residual {worst:.3e} ({})",
        if ok { "ok" } else { "exceeds 1e-10" }
    );
    Ok(RunOutput {
        exit_code: if ok { EXIT_OK } else { EXIT_FAILURE },
        report,
        csv: Some(csv),
        warnings: Vec::new(),
    })
}

pub fn run_mollifier_report(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let r = build_mollifier(cfg.moment_order, cfg.mollifier_kind)?.report()?;
    let mut csv = cfg.echo();
    csv.push_str(&r.to_csv());
    Ok(RunOutput {
        exit_code: if r.support_ok { EXIT_OK } else { EXIT_FAILURE },
        report: cfg.echo() + &r.to_text(),
        csv: Some(csv),
        warnings: Vec::new(),
    })
}

pub const SWEEP_HEADER: &str = "M,a,alpha2,inequality,form_id,eps,pair_value,negpart_value,fitted_order,verdict,c_delta,c_delta2,c_deltasq,a1_threshold";

/// NEC verdicts over the `(a, α₂)` grid. Cells run in parallel; rows are
/// ordered by `a`, `α₂`, inequality, form and ascending ε.
pub fn run_nec_sweep(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let corpus = cfg.corpus()?;
    let s = schedule(cfg)?;
    let moll = build_mollifier(cfg.moment_order, cfg.mollifier_kind)?;
    let a_range = (cfg.a_min, cfg.a_max.max(cfg.a_min * (1.0 + 1e-9)));
    let cells: Vec<(f64, f64)> = cfg
        .sweep_radii()
        .into_iter()
        .flat_map(|a| cfg.sweep_alpha2.iter().map(move |&a2| (a, a2)))
        .collect();
    let results: Vec<std::result::Result<NecReport, String>> = cells
        .par_iter()
        .map(|&(a, a2)| {
            let p = crate::wormhole::WormholeParams::new(cfg.mass, a, a2)
                .map_err(|e| format!("a = {a}, alpha2 = {a2}: {e}"))?;
            nec_verdict(&p, &moll, &corpus, &s, &cfg.verdict, a_range)
                .map_err(|e| format!("a = {a}, alpha2 = {a2}: {e}"))
        })
        .collect();

    let mut report = cfg.echo();
    let mut csv = cfg.echo();
    csv.push_str(SWEEP_HEADER);
    csv.push('\n');
    let mut warnings: Vec<String> = vacuous_warning(&corpus).into_iter().collect();
    let _ = writeln!(
        report,
        "{:>8} {:>7} {:>14} {:>14} {:>14} {:>14} {:>14}",
        "a", "alpha2", "sigma", "sigma-nu", "c_delta", "c_delta2", "c_deltasq"
    );
    let mut errors = Vec::new();
    for r in &results {
        let rep = match r {
            Ok(rep) => rep,
            Err(e) => {
                errors.push(e.clone());
                continue;
            }
        };
        let p = &rep.params;
        let sig = &rep.simplified_sigma;
        let _ = writeln!(
            report,
            "{:>8.4} {:>7} {:>14} {:>14} {:>14.6e} {:>14.6e} {:>14.6e}",
            p.throat_radius,
            p.alpha2,
            rep.inequality(Inequality::Sigma).verdict,
            rep.inequality(Inequality::SigmaMinusNu).verdict,
            sig.c_delta,
            sig.c_delta2,
            sig.c_deltasq
        );
        if let Some(last) = rep.obstruction.last() {
            let _ = writeln!(
                report,
                "{:>17} obstruction ratio at eps {:.3e}: {:.6e}",
                "",
                last.eps,
                last.ratio()
            );
        }
        for ineq in &rep.inequalities {
            let poly = match ineq.inequality {
                Inequality::Sigma => rep.simplified_sigma,
                Inequality::SigmaMinusNu => rep.simplified_sigma_minus_nu,
            };
            for row in &ineq.forms {
                let order = fitted_order(&row.negative_part);
                for (j, (eps, pv)) in row.pair.samples.iter().enumerate().rev() {
                    let nv = row.negative_part.samples[j].1;
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                        num(p.mass),
                        num(p.throat_radius),
                        num(p.alpha2),
                        ineq.inequality,
                        row.form_index,
                        num(*eps),
                        num(*pv),
                        num(nv),
                        num(order),
                        ineq.verdict,
                        num(poly.c_delta),
                        num(poly.c_delta2),
                        num(poly.c_deltasq),
                        num(rep.thresholds.a1)
                    );
                }
            }
        }
    }
    if let Some(Ok(rep)) = results.first() {
        let t = &rep.thresholds;
        let _ = writeln!(report, "a1 = {:.10}, classical threshold = {}", t.a1, t.classical);
    }
    for e in &errors {
        let _ = writeln!(report, "error: {e}");
    }
    warnings.extend(errors.iter().map(|e| format!("evaluation failed for {e}")));
    Ok(RunOutput {
        exit_code: if errors.is_empty() { EXIT_OK } else { EXIT_FAILURE },
        report,
        csv: Some(csv),
        warnings,
    })
}
