mod common;

use common::*;
use divbar::dist::CompoundClaimDistribution;
use divbar::dividend::*;
use divbar::scale::{build_scale_grid, scale_derivative, ScaleFunctionGrid, ScaleOptions};
use divbar::shape::{check_compound_log_convex_density, Holds};
use divbar::{ClaimDistribution, CountingCompounder, Error, RiskModel};

fn grid(m: &RiskModel, q: f64) -> ScaleFunctionGrid {
    build_scale_grid(m, q, &ScaleOptions::default()).unwrap()
}

fn grid_on(m: &RiskModel, q: f64, x_max: f64) -> ScaleFunctionGrid {
    let opts = ScaleOptions {
        x_max: Some(x_max),
        ..ScaleOptions::default()
    };
    build_scale_grid(m, q, &opts).unwrap()
}

/// Argmin of `f` over `n + 1` equally spaced points of `[lo, hi]`.
fn brute_argmin(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut best = (lo, f(lo));
    for i in 1..=n {
        let x = lo + i as f64 * h;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best.0
}

#[test]
fn barrier_value_branches() {
    let g = grid(&classical(), 0.1);
    for b in [0.5, 2.0, 4.0] {
        let inner = g.w(b) / g.w1(b);
        assert!((barrier_value(&g, b, b).unwrap() - inner).abs() < 1e-15);
        let above = barrier_value(&g, b, b + 5.0).unwrap();
        assert!((above - inner - 5.0).abs() < 1e-12);
    }
}

#[test]
fn barrier_value_matches_partial_fraction_ratio() {
    let oracle = single_exponential_scale(2.0, 0.0, 1.0, 1.0, 0.1);
    let g = grid(&classical(), 0.1);
    let expected = oracle.w(1.0) / oracle.deriv(2.0, 1);
    let got = barrier_value(&g, 2.0, 1.0).unwrap();
    assert!((got - expected).abs() < 1e-8, "{got} vs {expected}");
    let policy = BarrierPolicy::new(&g, 2.0).unwrap();
    assert_eq!(policy.value(1.0).unwrap(), got);
}

#[test]
fn brownian_like_b_star_matches_brute_force() {
    let (c, sigma, lambda, beta, q) = (1.0, 1.0, 1e-6, 1.0, 0.5);
    let oracle = single_exponential_scale(c, sigma, lambda, beta, q);
    let d1 = |x: f64| oracle.deriv(x, 1);
    let coarse = brute_argmin(d1, 0.0, 5.0, 1_000_000);
    let h = 5.0 / 1e6;
    let fine = brute_argmin(d1, coarse - h, coarse + h, 1_000_000);

    let m = model(c, sigma, lambda, CountingCompounder::degenerate(), exp(beta));
    let (b, _) = find_b_star(&grid(&m, q)).unwrap();
    assert!((b - fine).abs() < 1e-6, "{b} vs {fine}");
}

#[test]
fn large_discount_rate_pays_out_immediately() {
    let oracle = single_exponential_scale(2.0, 0.0, 1.0, 1.0, 5.0);
    // W' increasing everywhere on a dense scan
    let mut prev = oracle.deriv(0.0, 1);
    for i in 1..=100_000 {
        let v = oracle.deriv(i as f64 * 1e-4, 1);
        assert!(v > prev);
        prev = v;
    }
    let m = model(2.0, 0.0, 1.0, CountingCompounder::degenerate(), exp(1.0));
    let (b, w1) = find_b_star(&grid(&m, 5.0)).unwrap();
    assert_eq!(b, 0.0);
    assert!(w1 > 0.0);
}

#[test]
fn b_star_minimises_the_tabulated_derivative() {
    let cases = [
        (classical(), 0.1),
        (jump_diffusion(), 0.5),
        (model(2.0, 0.0, 1.0, log(0.3), hyper(&[0.3, 0.7], &[1.0, 5.0])), 0.1),
    ];
    for (m, q) in cases {
        let g = grid(&m, q);
        let (b, w1) = find_b_star(&g).unwrap();
        assert!(b >= 0.0 && b < g.x_max());
        assert!(g.w1_values().iter().all(|v| w1 <= *v), "b={b}");
    }
}

#[test]
fn short_grid_is_reported() {
    let g = grid_on(&classical(), 0.1, 3.0);
    match find_b_star(&g) {
        Err(Error::GridTooShort { x_max, suggested }) => {
            assert_eq!(x_max, 3.0);
            assert!(suggested > x_max);
        }
        other => panic!("expected GridTooShort, got {other:?}"),
    }
}

#[test]
fn certificate_examples() {
    let m = model(2.0, 0.0, 1.0, geo(0.5), exp(1.0));
    let cert = certify_optimality(&m, &grid(&m, 0.1)).unwrap();
    assert_eq!(cert.rule, CertifyingRule::CompletelyMonotoneClaims);
    assert_eq!(cert.rule.label(), "Thm4.1");

    // The logarithmic + hyperexponential case satisfies the DFR rule, and
    // also the completely-monotone rule that precedes it in priority.
    let m = model(2.0, 0.0, 1.0, log(0.3), hyper(&[0.3, 0.7], &[1.0, 5.0]));
    let cert = certify_optimality(&m, &grid(&m, 0.1)).unwrap();
    assert!(cert.applicable.contains(&CertifyingRule::DiscreteCmWithDfrClaims));
    assert!(cert
        .applicable
        .contains(&CertifyingRule::GeometricOrLogarithmicWithDfrClaims));
    assert_eq!(cert.rule, cert.applicable[0]);

    let genlog = CountingCompounder::generalized_logarithmic(2.0, 0.3).unwrap();
    let m = model(2.0, 0.0, 1.0, genlog.clone(), exp(1.0));
    let cert = certify_optimality(&m, &grid(&m, 0.1)).unwrap();
    assert_eq!(cert.rule.label(), "Thm4.3");
    assert!(!cert.conjectural);
    let compound = CompoundClaimDistribution::new(genlog, exp(1.0)).unwrap();
    assert!(check_compound_log_convex_density(&compound).unwrap().is_yes());
}

#[test]
fn uncertified_models_report_none() {
    let m = model(
        3.0,
        0.0,
        1.0,
        CountingCompounder::explicit(vec![0.5, 0.4, 0.1], 0.0).unwrap(),
        ClaimDistribution::erlang(3, 2.0).unwrap(),
    );
    let cert = certify_optimality(&m, &grid(&m, 0.1)).unwrap();
    assert_eq!(cert.rule, CertifyingRule::None);
    assert!(cert.summary().contains("barrier-optimal on grid only"));
    assert!(cert.b_star >= 0.0);
    assert_eq!(cert.skipped.len(), CertifyingRule::ALL.len() - 1);
}

#[test]
fn certified_rules_rest_on_yes_verdicts() {
    let cases = [
        model(2.0, 0.0, 1.0, geo(0.5), exp(1.0)),
        model(2.0, 0.3, 1.0, log(0.3), hyper(&[0.3, 0.7], &[1.0, 5.0])),
        model(
            2.0,
            0.0,
            1.0,
            CountingCompounder::generalized_logarithmic(2.0, 0.3).unwrap(),
            exp(1.0),
        ),
        model(2.0, 0.0, 1.0, geo(0.4), ClaimDistribution::erlang(2, 2.0).unwrap()),
    ];
    for m in cases {
        let cert = certify_optimality(&m, &grid(&m, 0.1)).unwrap();
        assert!(cert.grid_minimum_confirmed);
        assert_eq!(cert.conjectural, cert.rule.is_conjectural());
        for s in &cert.skipped {
            assert!(!cert.applicable.contains(&s.rule));
            assert!(!s.reason.is_empty());
        }
        if cert.rule != CertifyingRule::None {
            assert!(cert.applicable.contains(&cert.rule));
        }
        if cert.rule.is_theorem_backed() {
            assert!(cert.evidence.iter().any(|v| v.holds == Holds::Yes));
        }
    }
}

#[test]
fn value_at_zero() {
    let g = grid(&jump_diffusion(), 0.5);
    let (b, _) = find_b_star(&g).unwrap();
    assert_eq!(value_function(&g, b, 0.0).unwrap(), 0.0);

    let g = grid(&classical(), 0.1);
    let (b, w1) = find_b_star(&g).unwrap();
    let v0 = value_function(&g, b, 0.0).unwrap();
    assert!((v0 - 0.5 / w1).abs() < 1e-12 && v0 > 0.0);
}

#[test]
fn optimal_barrier_dominates_other_barriers() {
    for (m, q) in [(classical(), 0.1), (jump_diffusion(), 0.5)] {
        let g = grid(&m, q);
        let (b_star, _) = find_b_star(&g).unwrap();
        let xs: Vec<f64> = (0..20).map(|i| 0.25 * b_star.max(1.0) * i as f64).collect();
        let mut barriers = vec![0.5 * b_star, 2.0 * b_star];
        barriers.extend((0..40).map(|i| g.x_max() * 0.5 * i as f64 / 40.0));
        for b in barriers {
            for &x in &xs {
                let best = value_function(&g, b_star, x).unwrap();
                let other = barrier_value(&g, b, x).unwrap();
                assert!(best >= other - 1e-6, "b={b} x={x}: {best} < {other}");
            }
        }
    }
}

#[test]
fn smooth_fit_at_the_optimal_barrier() {
    let m = jump_diffusion();
    let g = grid(&m, 0.5);
    let (b, _) = find_b_star(&g).unwrap();
    assert!(b > 0.0);
    let w2 = scale_derivative(&g, b, 2).unwrap();
    let scale = g.w2_values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    assert!(w2.value.abs() < 1e-6 * scale.max(1.0), "W''(b*) = {}", w2.value);
}

#[test]
fn value_table_csv() {
    let g = grid(&classical(), 0.1);
    let mut buf = Vec::new();
    write_value_table(&g, 4.0, &[0.0, 1.0, 5.0], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,V");
    assert_eq!(lines.len(), 4);
}

#[test]
fn degenerate_barrier_is_an_error() {
    let g = grid(&classical(), 0.1);
    assert!(barrier_value(&g, -1.0, 0.0).is_err());
    assert!(barrier_value(&g, 1.0, f64::NAN).is_err());
}
