mod common;

use common::*;
use divbar::dist::CompoundClaimDistribution;
use divbar::shape::*;
use divbar::CountingCompounder;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn discrete_log_convexity_examples() {
    let v = compounder_log_convex(&geo(0.5), false);
    assert_eq!((v.holds, v.method), (Holds::Yes, Method::Analytic));
    let v = check_discrete_log_convex(&geo(0.5).pmf_prefix(10), false).unwrap();
    assert_eq!(v.holds, Holds::Yes);

    let genlog = CountingCompounder::generalized_logarithmic(2.0, 0.3).unwrap();
    let v = check_discrete_log_convex(&genlog.pmf_prefix(20), true).unwrap();
    assert_eq!(v.holds, Holds::Yes);
    assert!(compounder_log_convex(&genlog, true).is_yes());

    let v = check_discrete_log_convex(&[0.5, 0.4, 0.1], false).unwrap();
    assert_eq!(v.holds, Holds::No);
    let cx = v.counterexample().unwrap();
    assert_eq!(cx.location, 2.0);
    // p_1 p_3 = 0.05 < p_2^2 = 0.16
    assert!(cx.margin < 0.0);
}

#[test]
fn discrete_cm_examples() {
    let v = compounder_discrete_cm(&geo(0.7));
    assert_eq!((v.holds, v.method), (Holds::Yes, Method::Analytic));

    let theta: f64 = 0.5;
    let shifted: Vec<f64> = (0..=30)
        .map(|n| theta.powi(n + 1) / (-((n + 1) as f64) * (1.0 - theta).ln()))
        .collect();
    assert_eq!(check_discrete_cm(&shifted).unwrap().holds, Holds::Yes);

    let v = check_discrete_cm(&[0.2, 0.5, 0.3]).unwrap();
    assert_eq!(v.holds, Holds::No);
    let cx = v.counterexample().unwrap();
    assert_eq!(cx.location, 0.0);
    assert!(cx.quantity.starts_with("(-1)^1"));
}

/// `(-1)^n f^{(n)}(z)` of a mixture of exponentials, from the definition.
fn signed_mixture_derivative(w: &[f64], rates: &[f64], n: i32, z: f64) -> f64 {
    w.iter()
        .zip(rates)
        .map(|(w, b)| w * b.powi(n + 1) * (-b * z).exp())
        .sum()
}

#[test]
fn density_cm_examples() {
    assert!(check_density_cm(&exp(2.0)).unwrap().is_yes());
    let v = check_density_cm(&erlang(2, 1.0)).unwrap();
    assert_eq!(v.holds, Holds::No);
    let (w, r) = ([0.3, 0.7], [1.0, 5.0]);
    assert!(check_density_cm(&hyper(&w, &r)).unwrap().is_yes());
    for i in 0..10 {
        let z = 0.05 + 0.6 * i as f64;
        for n in 0..6 {
            assert!(signed_mixture_derivative(&w, &r, n, z) > 0.0);
        }
    }
}

#[test]
fn dfr_examples() {
    assert!(check_dfr(&exp(1.0)).unwrap().is_yes());
    let v = check_dfr(&erlang(3, 1.0)).unwrap();
    assert_eq!(v.holds, Holds::No);
    let cc = CompoundClaimDistribution::new(geo(0.4), exp(2.0)).unwrap();
    assert!(check_dfr(&cc).unwrap().is_yes());
}

#[test]
fn log_convex_density_examples() {
    assert!(check_log_convex_density(&exp(3.0)).unwrap().is_yes());
    assert_eq!(check_log_convex_density(&erlang(2, 1.0)).unwrap().holds, Holds::No);
    let h = hyper(&[0.5, 0.5], &[1.0, 10.0]);
    assert!(check_log_convex_density(&h).unwrap().is_yes());
    // numeric confirmation: (ln f)'' = (f f'' - f'^2)/f^2 >= 0
    for i in 0..20 {
        let z = 0.01 + 0.3 * i as f64;
        let f = 0.5 * ((-z).exp() + 10.0 * (-10.0 * z).exp());
        let f1 = -0.5 * ((-z).exp() + 100.0 * (-10.0 * z).exp());
        let f2 = 0.5 * ((-z).exp() + 1000.0 * (-10.0 * z).exp());
        assert!(f * f2 - f1 * f1 >= 0.0);
    }
}

/// Second central difference of `g` at `z`.
fn second_difference(g: impl Fn(f64) -> f64, z: f64) -> f64 {
    let h = 1e-3 * z.max(1e-2);
    g(z + h) - 2.0 * g(z) + g(z - h)
}

#[test]
fn counterexamples_are_genuine_violations() {
    // log-concave density: ln f has negative curvature at the reported point
    let e = erlang(2, 1.0);
    let v = check_log_convex_density(&e).unwrap();
    let z = v.counterexample().unwrap().location;
    assert!(z > 0.0);
    assert!(second_difference(|x| (x * (-x).exp()).ln(), z) < 0.0);

    // IFR: ln F̄ is concave at the reported point
    let v = check_dfr(&erlang(3, 1.0)).unwrap();
    let z = v.counterexample().unwrap().location;
    let ln_tail = |x: f64| -x + (1.0 + x + 0.5 * x * x).ln();
    assert!(second_difference(ln_tail, z) < 0.0);

    // density increasing near 0 violates the first CM inequality
    let v = check_density_cm(&erlang(2, 1.0)).unwrap();
    let z = v.counterexample().unwrap().location;
    assert!((1.0 - z) * (-z).exp() > 0.0, "f'(z) > 0 at z = {z}");

    let v = check_discrete_log_convex(&[0.1, 0.6, 0.2, 0.1], false).unwrap();
    let n = v.counterexample().unwrap().location as usize;
    let p = [0.0, 0.1, 0.6, 0.2, 0.1];
    assert!(p[n - 1] * p[n + 1] < p[n] * p[n]);
}

#[test]
fn verdicts_are_deterministic() {
    let h = hyper(&[0.2, 0.8], &[0.5, 3.0]);
    let cc = CompoundClaimDistribution::new(log(0.4), h.clone()).unwrap();
    assert_eq!(check_dfr(&h).unwrap(), check_dfr(&h).unwrap());
    assert_eq!(check_dfr(&cc).unwrap(), check_dfr(&cc).unwrap());
    assert_eq!(
        check_compound_log_convex_density(&cc).unwrap(),
        check_compound_log_convex_density(&cc).unwrap()
    );
}

#[test]
fn yes_and_no_verdicts_carry_finite_evidence() {
    let verdicts = vec![
        compounder_discrete_cm(&log(0.3)),
        compounder_log_convex(&geo(0.2), true),
        compounder_dfr(&geo(0.2)),
        check_density_cm(&erlang(3, 2.0)).unwrap(),
        check_dfr(&hyper(&[0.4, 0.6], &[1.0, 2.0])).unwrap(),
        check_log_convex_density(&exp(1.0)).unwrap(),
    ];
    for v in verdicts {
        if v.holds != Holds::Inconclusive {
            assert!(!v.evidence.is_empty(), "{v:?}");
        }
        if v.method == Method::Analytic {
            assert!(v.rule.is_some());
        }
        assert!(v.evidence.iter().all(|e| e.margin.is_finite()));
        if v.holds == Holds::No {
            assert!(v.counterexample().is_some());
        }
    }
}

#[test]
fn hierarchy_implications_hold_on_random_family_members() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let c = random_compounder(&mut rng);
        if compounder_discrete_cm(&c).is_yes() {
            assert!(compounder_log_convex(&c, false).is_yes(), "{:?}", c.kind());
        }
        let claim = random_claim(&mut rng);
        if check_density_cm(&claim).unwrap().is_yes() {
            assert!(check_log_convex_density(&claim).unwrap().is_yes(), "{:?}", claim.kind());
        }
    }
}

#[test]
fn geometric_compounding_preserves_dfr() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tested = 0;
    while tested < 20 {
        let claim = random_claim(&mut rng);
        if !check_dfr(&claim).unwrap().is_yes() {
            continue;
        }
        let cc = CompoundClaimDistribution::new(geo(rng.random_range(0.05..0.9)), claim.clone()).unwrap();
        assert!(check_dfr(&cc).unwrap().is_yes(), "{:?}", claim.kind());
        tested += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn geometric_sequences_are_cm_and_log_convex(rho in 0.01f64..0.95, scale in 0.1f64..10.0) {
        let r: Vec<f64> = (0..25).map(|n| scale * rho.powi(n)).collect();
        prop_assert_eq!(check_discrete_cm(&r).unwrap().holds, Holds::Yes);
        prop_assert!(check_discrete_log_convex(&r, false).unwrap().is_yes());
    }

    #[test]
    fn interior_bumps_break_log_convexity(a in 0.05f64..0.3, bump in 0.35f64..0.6) {
        let rest = 1.0 - a - bump;
        let v = check_discrete_log_convex(&[a, bump, rest * 0.5, rest * 0.5], false).unwrap();
        if a * rest * 0.5 < bump * bump {
            prop_assert_eq!(v.holds, Holds::No);
        }
    }
}
