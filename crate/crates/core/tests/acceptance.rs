//! One PASS/FAIL line per acceptance criterion, with the tolerances used.
//! Exits non-zero if any criterion fails.

use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use colombeau::association::{
    classify, estimate_limit, estimate_negative_part_limit, is_nonnegative, rule_suite, run_rule,
    sample_negative_parts_corpus, sample_pairs_corpus, EpsSchedule, LimitKind, Outcome,
    RuleKind, VerdictOptions,
};
use colombeau::config::RunConfig;
use colombeau::genfunc::{default_corpus, GenScalar, Sign, TestForm};
use colombeau::mollifier::{build_mollifier, Mollifier, ProfileKind};
use colombeau::nec::{
    assemble, assemble_sigma, assemble_sigma_minus_nu, nec_verdict, sign_analysis,
    simplified_sigma, simplified_sigma_minus_nu, substitution_engine, Inequality, NecVerdict,
};
use colombeau::quad::{integrate, QuadOptions};
use colombeau::run::run_nec_sweep;
use colombeau::wormhole::{
    embedded_component, proper_distance, radius_from_distance, Component, WormholeParams,
};
use colombeau::Error;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn moll(m: usize) -> Arc<Mollifier> {
    build_mollifier(m, ProfileKind::BumpPoly).expect("profile builds")
}

fn e(err: Error) -> String {
    err.to_string()
}

fn tight() -> QuadOptions {
    QuadOptions::with_tolerances(1e-15, 1e-14)
}

/// Sign changes of `f` on (-1, 1), refined by Brent.
fn sign_changes(f: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = 4000;
    let h = 2.0 / n as f64;
    (0..n)
        .map(|i| -1.0 + i as f64 * h)
        .filter(|&y| f(y) * f(y + h) < 0.0)
        .map(|y| {
            let mut c = roots::SimpleConvergency { eps: 1e-15, max_iter: 200 };
            roots::find_root_brent(y, y + h, &f, &mut c).expect("bracketed")
        })
        .collect()
}

fn association_suite() -> Check {
    let corpus = default_corpus();
    let s = EpsSchedule::default();
    let opts = VerdictOptions::default();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for m in [0, 2] {
        let moll = moll(m);
        for rule in rule_suite(&moll).map_err(e)? {
            let r = run_rule(&rule, &corpus, &s, &opts).map_err(e)?;
            ensure(r.outcome == Outcome::Holds, format!("{}: {} {}", r.id, r.outcome, r.message))?;
            if let RuleKind::Associated { .. } = rule.kind {
                for f in &r.forms {
                    ensure(f.verdict.is_zero(&opts), format!("{} form {}: {}", r.id, f.form_index, f.verdict))?;
                    let bound = 1e-3 * f.form.sup_norm() * f.form.width();
                    let last = f.verdict.last_sample().abs();
                    ensure(last <= bound, format!("{} form {}: final sample {last:.3e} > {bound:.3e}", r.id, f.form_index))?;
                    worst = worst.max(last / bound);
                    checked += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 60.0, format!("suite took {secs:.1} s > 60 s"))?;
    Ok(format!(
        "{checked} rule/form limits converge to 0, worst |final|/(1e-3 |w| width) = {worst:.3}, {secs:.1} s <= 60 s"
    ))
}

fn divergence_orders() -> Check {
    let m = moll(0);
    let s = EpsSchedule::default();
    let opts = VerdictOptions::default();
    let w = TestForm::new(0.0, 1.0).map_err(e)?;
    let psi2 = integrate(|y| m.value(y).powi(2), -1.0, 1.0, &[0.0], &tight()).map_err(e)?.value;
    let roots = sign_changes(|y| m.deriv(2, y));
    let neg = integrate(|y| m.deriv(2, y).min(0.0), -1.0, 1.0, &roots, &tight()).map_err(e)?.value;

    let sq = estimate_limit(&GenScalar::embed_delta(&m).square(), &w, &s, &opts).map_err(e)?;
    let (p1, c1) = match sq.kind {
        LimitKind::DivergesOrder { order, constant } => (order, constant),
        ref k => return Err(format!("delta^2 pairing: {k:?}")),
    };
    let want1 = w.value(0.0) * psi2;
    ensure((p1 - 1.0).abs() <= 0.1, format!("delta^2 order {p1:.4} not within 1 +- 0.1"))?;
    ensure((c1 / want1 - 1.0).abs() <= 0.05, format!("delta^2 constant {c1:.6e} vs {want1:.6e}"))?;

    let d2 = GenScalar::embed_delta_deriv(&m, 2).map_err(e)?;
    let np = estimate_negative_part_limit(&d2, &w, &s, &opts).map_err(e)?;
    let (p2, c2) = match np.kind {
        LimitKind::DivergesOrder { order, constant } => (order, constant),
        ref k => return Err(format!("delta'' negative part: {k:?}")),
    };
    let want2 = w.value(0.0) * neg;
    ensure((p2 - 2.0).abs() <= 0.15, format!("delta'' order {p2:.4} not within 2 +- 0.15"))?;
    ensure((c2 / want2 - 1.0).abs() <= 0.10, format!("delta'' constant {c2:.6e} vs {want2:.6e}"))?;
    Ok(format!(
        "delta^2: order {p1:.4} (1 +- 0.1), constant {:+.2}% (5%); delta'' negative part: order {p2:.4} (2 +- 0.15), constant {:+.2}% (10%)",
        100.0 * (c1 / want1 - 1.0),
        100.0 * (c2 / want2 - 1.0)
    ))
}

fn nonnegativity() -> Check {
    let m = moll(0);
    let corpus = default_corpus();
    let s = EpsSchedule::default();
    let opts = VerdictOptions::default();
    let d0 = GenScalar::embed_delta(&m);
    let hp = GenScalar::embed_heaviside(&m, Sign::Plus);

    let sq = is_nonnegative(&d0.square(), &corpus, &s, &opts).map_err(e)?;
    ensure(sq.outcome == Outcome::Holds, "delta^2 not judged non-negative")?;
    for f in &sq.forms {
        ensure(
            f.verdict.samples.iter().all(|(_, v)| *v == 0.0),
            format!("delta^2 negative part nonzero on form {}", f.form_index),
        )?;
    }
    let d2 = is_nonnegative(&GenScalar::embed_delta_deriv(&m, 2).map_err(e)?, &corpus, &s, &opts).map_err(e)?;
    ensure(d2.outcome == Outcome::Fails, format!("delta'' judged {}", d2.outcome))?;
    let th = is_nonnegative(&hp, &corpus, &s, &opts).map_err(e)?;
    ensure(th.outcome == Outcome::Holds, format!("Heaviside judged {}", th.outcome))?;

    // Stability on (δΘ, δ/2), with a premise that actually holds.
    let u = d0.mul(&hp).map_err(e)?;
    let v = d0.scale(0.5);
    let nu = is_nonnegative(&u, &corpus, &s, &opts).map_err(e)?;
    let assoc = colombeau::association::associated(&u, &v, &corpus, &s, &opts).map_err(e)?;
    let nv = is_nonnegative(&v, &corpus, &s, &opts).map_err(e)?;
    ensure(
        nu.outcome == Outcome::Holds && assoc.outcome == Outcome::Holds && nv.outcome == Outcome::Holds,
        format!("stability: u >= 0 {}, u ~ v {}, v >= 0 {}", nu.outcome, assoc.outcome, nv.outcome),
    )?;
    Ok(format!(
        "delta^2 negative part exactly 0 at all eps; delta'' fails (order {:.3}); H+ holds; stability premise and conclusion hold",
        d2.worst_order
    ))
}

fn slope(eps: &[f64], err: &[f64]) -> f64 {
    let (lx, ly): (Vec<f64>, Vec<f64>) = eps
        .iter()
        .zip(err)
        .filter(|(_, r)| **r > 0.0)
        .map(|(e, r)| (e.ln(), r.ln()))
        .unzip();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn geometry() -> Check {
    let p = WormholeParams::new(1.0, 2.5, 0.0).map_err(e)?;
    let mut worst: f64 = 0.0;
    for r in [2.6, 3.0, 5.0, 10.0, 100.0] {
        let s = proper_distance(r, Sign::Plus, &p).map_err(e)?;
        let res = (radius_from_distance(s, &p).map_err(e)? - r).abs() / r;
        ensure(res <= 1e-10, format!("round trip at r = {r}: {res:.3e}"))?;
        worst = worst.max(res);
    }
    let m = moll(0);
    let grid: Vec<f64> = (0..12).map(|j| 0.2 * 0.6f64.powi(j)).collect();
    let cases = [
        (Component::Gtt, 0.0),
        (Component::Gthth, 0.0),
        (Component::Gtt, -0.05),
        (Component::Gthth, 0.05),
        (Component::GammaTt(Sign::Plus), 0.05),
        (Component::GammaTt(Sign::Minus), -0.05),
        (Component::GammaThth(Sign::Plus), 0.05),
        (Component::GammaThth(Sign::Minus), -0.05),
    ];
    let mut min_slope = f64::INFINITY;
    let mut max_c: f64 = 0.0;
    for (c, s) in cases {
        let u = embedded_component(c, &p, &m).map_err(e)?;
        let want = c.classical(s, &p).map_err(e)?;
        let errs: Vec<f64> = grid.iter().map(|&x| (u.value(x, s) - want).abs()).collect();
        let k = slope(&grid, &errs);
        ensure(k >= 0.9, format!("{} at {s}: slope {k:.3} < 0.9", c.label()))?;
        min_slope = min_slope.min(k);
        max_c = grid.iter().zip(&errs).map(|(x, r)| r / x).fold(max_c, f64::max);
    }
    Ok(format!(
        "round-trip residual {worst:.1e} <= 1e-10; embedded components: min slope {min_slope:.3} >= 0.9, error <= {max_c:.3} eps"
    ))
}

fn classical_checkpoint() -> Check {
    let m = moll(0);
    let p = WormholeParams::new(1.0, 2.5, 0.0).map_err(e)?;
    let s = EpsSchedule::default();
    let opts = VerdictOptions::default();
    let corpus = default_corpus();
    let sigma = assemble_sigma(&p, &m).map_err(e)?;
    let smn = assemble_sigma_minus_nu(&p, &m).map_err(e)?;
    let mut worst: f64 = 0.0;
    for w in corpus.iter().filter(|w| w.covers(0.0)) {
        for (u, coeff) in [(&sigma, -0.143_108_4), (&smn, 0.447_213_6)] {
            let v = estimate_limit(u, w, &s, &opts).map_err(e)?;
            let l = v.limit().ok_or_else(|| format!("no limit for {w:?}: {v}"))?;
            let want = coeff * w.value(0.0);
            let rel = (l / want - 1.0).abs();
            ensure(rel <= 5e-3, format!("{w:?}: {l:.8e} vs {want:.8e}"))?;
            worst = worst.max(rel);
        }
    }
    let rep = nec_verdict(&p, &m, &corpus, &s, &opts, (2.05, 3.0)).map_err(e)?;
    let sv = rep.inequality(Inequality::Sigma).verdict;
    ensure(sv == NecVerdict::Violated, format!("sigma verdict {sv}"))?;
    Ok(format!(
        "limits match -0.1431084 w(0) and +0.4472136 w(0), worst rel {worst:.1e} <= 5e-3; sigma verdict {sv}"
    ))
}

fn simplification() -> Check {
    let m = moll(0);
    let mut worst: f64 = 0.0;
    let mut worst_sq: f64 = 0.0;
    for a in [2.1, 2.3, 2.5, 2.9] {
        for a2 in [0.0, 0.5, 1.0] {
            let p = WormholeParams::new(1.0, a, a2).map_err(e)?;
            let s = substitution_engine(&assemble_sigma(&p, &m).map_err(e)?).map_err(e)?;
            let n = substitution_engine(&assemble_sigma_minus_nu(&p, &m).map_err(e)?).map_err(e)?;
            let d = s.max_abs_diff(&simplified_sigma(&p)).max(n.max_abs_diff(&simplified_sigma_minus_nu(&p)));
            ensure(d <= 1e-10, format!("a = {a}, alpha2 = {a2}: engine differs by {d:.3e}"))?;
            ensure(n.c_deltasq.abs() <= 1e-12, format!("a = {a}, alpha2 = {a2}: delta^2 coefficient {:.3e}", n.c_deltasq))?;
            worst = worst.max(d);
            worst_sq = worst_sq.max(n.c_deltasq.abs());
        }
    }
    let t = sign_analysis(1.0, 1.0, (2.05, 3.0)).map_err(e)?;
    let a1 = (1.0 + 13f64.sqrt()) / 2.0;
    ensure((t.a1 - a1).abs() <= 1e-9, format!("a1 = {}", t.a1))?;
    ensure(t.a1 < 3.0, "a1 >= 3M")?;
    Ok(format!(
        "engine vs closed form {worst:.1e} <= 1e-10; sigma-nu delta^2 {worst_sq:.1e} <= 1e-12; a1 = {:.10} (err {:.1e} <= 1e-9) < 3M",
        t.a1,
        (t.a1 - a1).abs()
    ))
}

/// The fixture behind the golden CSV.
fn golden_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    for kv in [
        "sweep.a_min=2.1",
        "sweep.a_max=2.9",
        "sweep.a_steps=3",
        "sweep.alpha2=0,1",
        "corpus.centers=0,2",
        "corpus.half_widths=0.5,1",
        "schedule.count=16",
    ] {
        cfg.apply_override(kv).expect("valid override");
    }
    cfg
}

fn sweep_csv(cfg: &RunConfig, threads: usize) -> Result<String, String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|x| x.to_string())?;
    let out = pool.install(|| run_nec_sweep(cfg)).map_err(e)?;
    ensure(out.exit_code == 0, format!("sweep exit code {}", out.exit_code))?;
    out.csv.ok_or_else(|| "sweep produced no CSV".into())
}

/// The echoed output path is the only line that depends on where the CSV goes.
fn without_output_path(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with("# output.path"))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn reproducibility() -> Check {
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/nec_sweep_golden.csv");
    let golden = std::fs::read_to_string(&golden_path)
        .map_err(|x| format!("cannot read {}: {x}", golden_path.display()))?;
    let cfg = golden_config();
    let one = sweep_csv(&cfg, 1)?;
    let again = sweep_csv(&cfg, 1)?;
    let four = sweep_csv(&cfg, 4)?;
    ensure(one == again, "two runs differ")?;
    ensure(one == four, "1 and 4 threads differ")?;
    ensure(without_output_path(&one) == golden, "output differs from the golden CSV")?;

    // Full 20 x 3 grid, 25 eps, 5 forms.
    let mut full = RunConfig::default();
    full.apply_override("corpus.centers=0,-0.5,0.5,-2,2").map_err(e)?;
    full.apply_override("corpus.half_widths=1").map_err(e)?;
    let start = Instant::now();
    let out = run_nec_sweep(&full).map_err(e)?;
    let secs = start.elapsed().as_secs_f64();
    ensure(out.exit_code == 0, format!("full sweep exit code {}", out.exit_code))?;
    ensure(secs <= 600.0, format!("full sweep took {secs:.0} s > 600 s"))?;
    let rows = out.csv.map(|c| c.lines().filter(|l| !l.starts_with('#')).count() - 1).unwrap_or(0);
    ensure(rows == 20 * 3 * 2 * 5 * 25, format!("full sweep has {rows} rows"))?;
    Ok(format!(
        "golden CSV identical across 2 runs and 1/4 threads; 20x3 sweep ({rows} rows) in {secs:.0} s <= 600 s on {} thread(s)",
        rayon::current_num_threads()
    ))
}

fn negative_controls() -> Check {
    let m = moll(0);
    let d0 = GenScalar::embed_delta(&m);
    let d1 = GenScalar::embed_delta_deriv(&m, 1).map_err(e)?;
    let d2 = GenScalar::embed_delta_deriv(&m, 2).map_err(e)?;
    let hp = GenScalar::embed_heaviside(&m, Sign::Plus);
    let hm = GenScalar::embed_heaviside(&m, Sign::Minus);
    let p = WormholeParams::new(1.0, 2.2, 1.0).map_err(e)?;
    let mut quantities = vec![
        d0.clone(),
        d1.clone(),
        d2.clone(),
        d0.square(),
        d0.mul(&d1).map_err(e)?,
        hp.mul(&d2).map_err(e)?,
        hm.mul(&d1).map_err(e)?.add(&d0.square()).map_err(e)?,
        hp.square().sub(&hp).map_err(e)?,
        hp.add(&hm).map_err(e)?.scale(-1.0).add(&GenScalar::constant(&m, 1.0)).map_err(e)?,
        embedded_component(Component::GammaTt(Sign::Plus), &p, &m).map_err(e)?.mul(&d1).map_err(e)?,
    ];
    for which in Inequality::ALL {
        quantities.push(assemble(which, &p, &m).map_err(e)?);
    }
    let forms = [
        TestForm::new(2.0, 1.0).map_err(e)?,
        TestForm::new(-3.0, 0.5).map_err(e)?,
        TestForm::new(0.9, 0.6).map_err(e)?,
    ];
    let mut evaluated = 0;
    for w in &forms {
        let dist = w.distance_to(0.0);
        // ε values strictly below the distance, down to the floor.
        let s = EpsSchedule::new((0.95 * dist).min(1.0), 0.6, 20).map_err(e)?;
        for (i, u) in quantities.iter().enumerate() {
            let pairs = sample_pairs_corpus(u, std::slice::from_ref(w), &s).map_err(e)?;
            let negs = sample_negative_parts_corpus(u, std::slice::from_ref(w), &s).map_err(e)?;
            for (eps, v) in pairs[0].iter().chain(&negs[0]) {
                ensure(*v == 0.0, format!("quantity {i}, form {w:?}, eps {eps:e}: {v:e}"))?;
                evaluated += 1;
            }
            ensure(classify(&pairs[0], &VerdictOptions::default()).limit() == Some(0.0), "limit not 0")?;
        }
    }
    let other = build_mollifier(0, ProfileKind::BsplinePoly).map_err(e)?;
    let foreign = GenScalar::embed_delta(&other);
    let other_order = GenScalar::embed_delta(&moll(2));
    for r in [d0.mul(&foreign), d0.add(&foreign), hp.mul(&other_order), GenScalar::product(&[d0.clone(), foreign.clone()])] {
        ensure(matches!(r, Err(Error::MixedMollifiers)), "mixed-mollifier product accepted")?;
    }
    Ok(format!(
        "{evaluated} disjoint-form samples exactly 0; 4 mixed-mollifier combinations rejected"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("association suite", association_suite),
        ("divergence orders", divergence_orders),
        ("non-negativity engine", nonnegativity),
        ("geometry", geometry),
        ("classical checkpoint", classical_checkpoint),
        ("simplification checkpoints", simplification),
        ("sweep reproducibility", reproducibility),
        ("negative controls", negative_controls),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
