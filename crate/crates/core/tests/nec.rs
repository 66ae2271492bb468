use std::sync::Arc;

use colombeau::association::{estimate_limit, sample_pairs, EpsSchedule, VerdictOptions};
use colombeau::genfunc::{default_corpus, negative_part_pair, pair, GenScalar, Side, SmoothSide, TestForm};
use colombeau::mollifier::{build_mollifier, Mollifier, ProfileKind};
use colombeau::nec::{
    assemble, assemble_sigma, assemble_sigma_minus_nu, classical_sigma, classical_sigma_minus_nu,
    nec_verdict, sign_analysis, simplified_sigma, simplified_sigma_minus_nu, substitution_engine,
    DeltaPolynomial, Inequality, NecVerdict,
};
use colombeau::wormhole::WormholeParams;
use colombeau::Error;
use proptest::prelude::*;

fn m0() -> Arc<Mollifier> {
    build_mollifier(0, ProfileKind::BumpPoly).unwrap()
}

fn params(a: f64, alpha2: f64) -> WormholeParams {
    WormholeParams::new(1.0, a, alpha2).unwrap()
}

/// Closed forms written out independently of the library.
fn oracle_sigma(m: f64, a: f64, a2: f64) -> [f64; 3] {
    let lapse = 1.0 - 2.0 * m / a;
    let l32 = lapse.powf(1.5);
    let c_delta = 4.0 / a
        * (6.0 * a2 * m / a.powi(3) * (m * m / (a * a) * (a / (a - 2.0 * m)).sqrt() - 4.0 * l32) - l32);
    let c_delta2 = 8.0 * a2 / a * lapse.sqrt() * (2.0 - 3.0 * m / a);
    let c_deltasq = 16.0 * a2 / (a * a) * (m / a + 2.0 * lapse) * (5.0 * m / a + 2.0 * lapse);
    [c_delta, c_delta2, c_deltasq]
}

fn oracle_sigma_minus_nu(m: f64, a: f64, a2: f64) -> f64 {
    let lapse = 1.0 - 2.0 * m / a;
    let alpha = (a / (a - 2.0 * m)).sqrt() * 4.0 * m / (a * a) + 8.0 / a * lapse.sqrt();
    (6.0 * m - 2.0 * a) * lapse.sqrt() + 2.0 * a2 * alpha * (m * m / (a * a) - lapse * (1.0 + m / a))
}

#[test]
fn classical_coefficients() {
    let p = params(2.5, 0.0);
    assert!((classical_sigma(&p) + 0.143_108_350_559_986_54).abs() < 1e-15);
    assert!((classical_sigma_minus_nu(&p) - 0.447_213_595_499_957_9).abs() < 1e-15);
    assert_eq!(classical_sigma_minus_nu(&params(3.0, 0.0)), 0.0);
    for a in [2.1, 2.5, 2.9] {
        let p = params(a, 0.0);
        assert_eq!(simplified_sigma(&p).c_delta, classical_sigma(&p));
        assert_eq!(simplified_sigma(&p).c_delta2, 0.0);
        assert_eq!(simplified_sigma(&p).c_deltasq, 0.0);
        assert_eq!(simplified_sigma_minus_nu(&p).c_delta, classical_sigma_minus_nu(&p));
    }
}

#[test]
fn simplified_forms_match_the_oracle() {
    for i in 0..200 {
        let a = 2.0 + 1e-3 + 8.0 * i as f64 / 200.0;
        for a2 in [-1.0, 0.0, 0.5, 1.0, 3.0] {
            let p = params(a, a2);
            let s = simplified_sigma(&p);
            let o = oracle_sigma(1.0, a, a2);
            assert!((s.c_delta - o[0]).abs() <= 1e-12 * (1.0 + o[0].abs()));
            assert!((s.c_delta2 - o[1]).abs() <= 1e-12 * (1.0 + o[1].abs()));
            assert!((s.c_deltasq - o[2]).abs() <= 1e-12 * (1.0 + o[2].abs()));
            if a2 > 0.0 {
                assert!(s.c_deltasq > 0.0);
            }
            let n = simplified_sigma_minus_nu(&p);
            let on = oracle_sigma_minus_nu(1.0, a, a2);
            assert!((n.c_delta - on).abs() <= 1e-12 * (1.0 + on.abs()));
        }
    }
}

#[test]
fn engine_reproduces_closed_forms() {
    let m = m0();
    for a in [2.1, 2.3, 2.5, 2.9] {
        for a2 in [0.0, 0.5, 1.0] {
            let p = params(a, a2);
            let s = substitution_engine(&assemble_sigma(&p, &m).unwrap()).unwrap();
            assert!(s.max_abs_diff(&simplified_sigma(&p)) <= 1e-10, "a={a} a2={a2}: {s}");
            let n = substitution_engine(&assemble_sigma_minus_nu(&p, &m).unwrap()).unwrap();
            assert!(n.max_abs_diff(&simplified_sigma_minus_nu(&p)) <= 1e-10, "a={a} a2={a2}: {n}");
            assert!(n.c_deltasq.abs() <= 1e-12);
        }
    }
}

#[test]
fn delta_square_cancels_on_a_dense_grid() {
    let m = m0();
    for i in 0..60 {
        let a = 2.0 + 1e-3 + 8.0 * i as f64 / 60.0;
        let p = params(a, 1.0);
        let n = substitution_engine(&assemble_sigma_minus_nu(&p, &m).unwrap()).unwrap();
        assert!(n.c_deltasq.abs() <= 1e-12 * (1.0 + a * a), "a={a}: {}", n.c_deltasq);
    }
}

#[test]
fn engine_examples() {
    let m = m0();
    let x = SmoothSide::polynomial(Side::All, &[0.0, 1.0]);
    let u = GenScalar::smooth(&m, x).mul(&GenScalar::embed_delta_deriv(&m, 1).unwrap()).unwrap();
    let r = substitution_engine(&u).unwrap();
    assert_eq!(r, DeltaPolynomial { c_delta: -1.0, ..Default::default() });

    let r = substitution_engine(&GenScalar::embed_delta(&m).square()).unwrap();
    assert_eq!(r, DeltaPolynomial { c_deltasq: 1.0, ..Default::default() });

    // A smooth term off the shell has no delta reduction.
    assert!(substitution_engine(&GenScalar::constant(&m, 1.0)).is_err());
    // Neither does a third-order delta.
    let d2 = GenScalar::embed_delta_deriv(&m, 2).unwrap();
    assert!(matches!(
        substitution_engine(&d2.lie_derivative().unwrap()),
        Err(Error::DeltaOrderOutOfRange(3))
    ));
}

#[test]
fn sign_thresholds() {
    let want = (1.0 + 13f64.sqrt()) / 2.0;
    for a2 in [0.0, 1.0, -1.0] {
        let t = sign_analysis(1.0, a2, (2.05, 3.0)).unwrap();
        assert!((t.a1 - want).abs() <= 1e-9);
        assert_eq!(t.classical, 3.0);
        assert!(t.a1 < t.classical);
    }
    for m in [0.1, 1.0, 7.0] {
        let t = sign_analysis(m, 1.0, (2.01 * m, 3.5 * m)).unwrap();
        assert!((t.a1 - m * want).abs() <= 1e-9 * m);
        assert!(t.a1 < 3.0 * m);
    }
    // The second summand of the angular coefficient changes sign at a₁.
    let g = |a: f64| 1.0 / (a * a) - (1.0 - 2.0 / a) * (1.0 + 1.0 / a);
    assert!(g(want - 1e-6) > 0.0 && g(want + 1e-6) < 0.0);
    assert!(sign_analysis(1.0, 0.0, (1.9, 3.0)).is_err());
}

#[test]
fn classical_checkpoint() {
    let m = m0();
    let p = params(2.5, 0.0);
    let s = EpsSchedule::default();
    let opts = VerdictOptions::default();
    let w = TestForm::new(0.0, 1.0).unwrap();
    let sig = estimate_limit(&assemble_sigma(&p, &m).unwrap(), &w, &s, &opts).unwrap();
    let want = -0.143_108_35 * w.value(0.0);
    assert!((sig.limit().unwrap() / want - 1.0).abs() < 1e-3);
    let smn = estimate_limit(&assemble_sigma_minus_nu(&p, &m).unwrap(), &w, &s, &opts).unwrap();
    let want = 0.447_213_6 * w.value(0.0);
    assert!((smn.limit().unwrap() / want - 1.0).abs() < 1e-3);
}

#[test]
fn classical_verdicts() {
    let m = m0();
    let corpus = default_corpus();
    let report = nec_verdict(
        &params(2.5, 0.0),
        &m,
        &corpus,
        &EpsSchedule::default(),
        &VerdictOptions::default(),
        (2.05, 3.0),
    )
    .unwrap();
    assert_eq!(report.inequality(Inequality::Sigma).verdict, NecVerdict::Violated);
    assert_eq!(report.inequality(Inequality::SigmaMinusNu).verdict, NecVerdict::Holds);
    assert!(report.obstruction.is_empty());
    for ineq in &report.inequalities {
        for row in &ineq.forms {
            if !row.form.covers(0.0) {
                assert!(row.pair.samples.iter().all(|(_, v)| *v == 0.0));
                assert!(row.negative_part.samples.iter().all(|(_, v)| *v == 0.0));
            }
        }
    }
    assert_eq!(report.inequalities.len(), 2);
}

#[test]
fn away_from_the_shell_everything_vanishes() {
    let m = m0();
    let w = TestForm::new(2.0, 1.0).unwrap();
    for a2 in [0.0, 1.0] {
        let p = params(2.2, a2);
        for which in Inequality::ALL {
            let u = assemble(which, &p, &m).unwrap();
            for &eps in &[0.2, 0.01, 1e-5] {
                assert_eq!(pair(&u, &w, eps).unwrap(), 0.0);
                assert_eq!(negative_part_pair(&u, &w, eps).unwrap(), 0.0);
            }
        }
    }
}

#[test]
fn quadratic_gravity_measurements() {
    let m = m0();
    let p = params(2.1, 1.0);
    let corpus = vec![TestForm::new(0.0, 1.0).unwrap()];
    let report = nec_verdict(
        &p,
        &m,
        &corpus,
        &EpsSchedule::default(),
        &VerdictOptions::default(),
        (2.05, 3.0),
    )
    .unwrap();
    let s = report.simplified_sigma;
    assert!(s.c_deltasq > 0.0 && s.c_delta2 > 0.0);
    let sigma = report.inequality(Inequality::Sigma);
    assert_eq!(sigma.verdict, NecVerdict::Violated);
    // Driven by the δ″ term, whose negative part grows like ε⁻².
    let order = colombeau::nec::fitted_order(&sigma.forms[0].negative_part);
    assert!((order - 2.0).abs() < 0.15, "{order}");
    // The positive δ² mass loses to the δ″ negative part as ε shrinks.
    let ratios: Vec<f64> = report.obstruction.iter().map(|r| r.ratio()).collect();
    assert_eq!(ratios.len(), 25);
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn to_genscalar_pairs_to_the_regular_part() {
    let m = m0();
    let poly = DeltaPolynomial {
        c_delta: 0.7,
        c_delta1: -1.3,
        c_delta2: 0.4,
        ..Default::default()
    };
    let u = poly.to_genscalar(&m).unwrap();
    let w = TestForm::new(0.2, 1.0).unwrap();
    let want = 0.7 * w.value(0.0) + 1.3 * w.deriv(1, 0.0) + 0.4 * w.deriv(2, 0.0);
    let samples = sample_pairs(&u, &w, &EpsSchedule::default()).unwrap();
    assert!((samples.last().unwrap().1 - want).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn positivity_of_the_alpha_combination(a in 2.0001f64..10.0) {
        let p = params(a, 0.0);
        let c = colombeau::wormhole::throat_constants(&p);
        let v = p.lapse_at_throat() * c.alpha * c.alpha - 2.0 * c.alpha * c.beta;
        prop_assert!(v > 0.0);
        // It equals −2α times the (negative) classical σ coefficient.
        prop_assert!((v + 2.0 * c.alpha * classical_sigma(&p)).abs() <= 1e-12 * v.abs().max(1.0));
    }

    #[test]
    fn sigma_minus_nu_has_no_delta_square(a in 2.0001f64..10.0, a2 in -2.0f64..2.0) {
        let n = simplified_sigma_minus_nu(&params(a, a2));
        prop_assert_eq!(n.c_deltasq, 0.0);
        prop_assert_eq!(n.c_delta2, 0.0);
    }
}
