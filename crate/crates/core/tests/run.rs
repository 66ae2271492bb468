use colombeau::config::RunConfig;
use colombeau::run::{
    run_geometry, run_mollifier_report, run_nec_sweep, run_rules, EXIT_INCONCLUSIVE, EXIT_OK,
    SWEEP_HEADER,
};

fn small_sweep() -> RunConfig {
    let mut cfg = RunConfig::default();
    for kv in [
        "sweep.a_min=2.2",
        "sweep.a_max=3.0",
        "sweep.a_steps=2",
        "sweep.alpha2=0,1",
        "corpus.centers=0,2",
        "corpus.half_widths=0.5",
        "schedule.count=14",
    ] {
        cfg.apply_override(kv).unwrap();
    }
    cfg
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn every_output_echoes_the_configuration() {
    let cfg = small_sweep();
    for out in [
        run_geometry(&cfg).unwrap(),
        run_mollifier_report(&cfg).unwrap(),
    ] {
        assert!(out.report.starts_with(&cfg.echo()));
        assert!(out.csv.unwrap().starts_with(&cfg.echo()));
    }
}

#[test]
fn geometry_round_trips() {
    let out = run_geometry(&RunConfig::default()).unwrap();
    assert_eq!(out.exit_code, EXIT_OK);
    let rows = data_rows(out.csv.as_ref().unwrap());
    assert_eq!(rows.len(), 5);
    for r in rows {
        let res: f64 = r[3].parse().unwrap();
        assert!(res <= 1e-10);
    }
    assert!(out.report.contains("alpha = 2.8621670112"));
}

#[test]
fn too_short_schedule_is_inconclusive() {
    let mut cfg = RunConfig::default();
    cfg.apply_override("schedule.count=2").unwrap();
    cfg.apply_override("rules.moment_orders=0").unwrap();
    let out = run_rules(&cfg).unwrap();
    assert_eq!(out.exit_code, EXIT_INCONCLUSIVE);
}

#[test]
fn vacuous_corpus_warns() {
    let mut cfg = RunConfig::default();
    cfg.apply_override("corpus.centers=3").unwrap();
    cfg.apply_override("corpus.half_widths=0.5,1").unwrap();
    cfg.apply_override("rules.moment_orders=0").unwrap();
    let out = run_rules(&cfg).unwrap();
    assert_eq!(out.exit_code, EXIT_OK);
    assert!(out.warnings.iter().any(|w| w.contains("vacuous")));
}

#[test]
fn rules_csv_columns() {
    let mut cfg = RunConfig::default();
    cfg.apply_override("rules.moment_orders=0").unwrap();
    let out = run_rules(&cfg).unwrap();
    assert_eq!(out.exit_code, EXIT_OK);
    let csv = out.csv.unwrap();
    assert!(csv.contains("\nrule_id,form_id,eps,value,verdict\n"));
    let rows = data_rows(&csv);
    assert!(rows.iter().all(|r| r.len() == 5 && r[4] == "holds"));
}

#[test]
fn sweep_rows_are_ordered_and_classical_cells_agree() {
    let cfg = small_sweep();
    let out = run_nec_sweep(&cfg).unwrap();
    assert_eq!(out.exit_code, EXIT_OK);
    let csv = out.csv.unwrap();
    assert!(csv.contains(&format!("\n{SWEEP_HEADER}\n")));
    let rows = data_rows(&csv);
    // 2 radii × 2 α₂ × 2 inequalities × 2 forms × 14 ε.
    assert_eq!(rows.len(), 2 * 2 * 2 * 2 * 14);
    let key = |r: &Vec<String>| {
        let f = |i: usize| r[i].parse::<f64>().unwrap();
        (f(1), f(2), r[3].clone(), r[4].parse::<usize>().unwrap(), f(5))
    };
    for w in rows.windows(2) {
        let (a, b) = (key(&w[0]), key(&w[1]));
        let same_series = (a.0, a.1, &a.2, a.3) == (b.0, b.1, &b.2, b.3);
        if same_series {
            assert!(b.4 > a.4, "eps must ascend within a series");
        } else {
            assert!((a.0, a.1, &a.2, a.3) < (b.0, b.1, &b.2, b.3));
        }
    }
    for r in &rows {
        if r[2].parse::<f64>().unwrap() == 0.0 {
            let want = if r[3] == "sigma" { "violated" } else { "holds" };
            assert_eq!(r[9], want, "{r:?}");
            if r[3] == "sigma_minus_nu" && r[1].parse::<f64>().unwrap() == 3.0 {
                assert!(r[10].parse::<f64>().unwrap().abs() <= 1e-12);
            }
        }
        let a1: f64 = r[13].parse().unwrap();
        assert!((a1 - (1.0 + 13f64.sqrt()) / 2.0).abs() < 1e-9);
    }
    // The sweep is a pure function of the configuration.
    assert_eq!(run_nec_sweep(&cfg).unwrap().csv.unwrap(), csv);
}
