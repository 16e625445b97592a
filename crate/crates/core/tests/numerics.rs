mod common;

use macjscc::classexp::{es_class, solve_rho_gamma, tilted_log_mean, RhoGamma};
use macjscc::gallager::{e_0, e_s, e_s_prime, PtpChannel};
use macjscc::model::{Class, InputDistribution};
use macjscc::oracle::{direct_e_0, direct_e_s, es_class_by_lambda, fd_derivative, grid_max_rho};
use macjscc::search::golden_section_max;
use macjscc::ExtReal;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_ptp(rng: &mut ChaCha8Rng) -> (InputDistribution, PtpChannel) {
    let nin = rng.gen_range(2..=5);
    let nout = rng.gen_range(2..=5);
    let mut w = Vec::new();
    for _ in 0..nin {
        w.extend(common::simplex(rng, nout, true));
    }
    let q = InputDistribution::new(common::simplex(rng, nin, true)).unwrap();
    (q, PtpChannel { nin, nout, w })
}

fn rho_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn source_function_is_convex(seed in any::<u64>(), r1 in -0.9f64..5.0, r2 in -0.9f64..5.0, t in 0.0f64..1.0) {
        let src = common::random_source(&mut ChaCha8Rng::seed_from_u64(seed));
        let mid = e_s(t * r1 + (1.0 - t) * r2, &src).unwrap();
        let chord = t * e_s(r1, &src).unwrap() + (1.0 - t) * e_s(r2, &src).unwrap();
        prop_assert!(mid <= chord + 1e-12);
        prop_assert!(e_s(0.0, &src).unwrap().abs() < 1e-14);
    }

    #[test]
    fn source_derivative_matches_finite_differences(seed in any::<u64>(), rho in -0.5f64..2.0) {
        let src = common::random_source(&mut ChaCha8Rng::seed_from_u64(seed));
        let fd = fd_derivative(|r| e_s(r, &src).unwrap(), rho, 1e-5);
        prop_assert!((fd - e_s_prime(rho, &src).unwrap()).abs() < 1e-6);
        prop_assert!((direct_e_s(rho, &src.probs) - e_s(rho, &src).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn channel_function_is_concave_and_nondecreasing(seed in any::<u64>()) {
        let (q, ch) = random_ptp(&mut ChaCha8Rng::seed_from_u64(seed));
        let g = rho_grid(40);
        let v: Vec<f64> = g.iter().map(|&r| e_0(r, &q, &ch).unwrap()).collect();
        prop_assert!(v[0].abs() < 1e-14);
        for k in 1..v.len() {
            prop_assert!(v[k] >= v[k - 1] - 1e-12);
            if k + 1 < v.len() {
                prop_assert!(v[k] >= 0.5 * (v[k - 1] + v[k + 1]) - 1e-12);
            }
        }
        for &r in &[0.0, 0.37, 1.0] {
            prop_assert!((e_0(r, &q, &ch).unwrap() - direct_e_0(r, &q.probs, &ch)).abs() < 1e-12);
        }
    }

    #[test]
    fn threshold_root_back_substitutes(seed in any::<u64>(), u in 0.0f64..1.0) {
        let src = common::random_source(&mut ChaCha8Rng::seed_from_u64(seed));
        let (lo, hi) = (src.min_prob(), src.max_prob());
        let gamma = lo + u * (hi - lo);
        if let RhoGamma::Interior { beta } = solve_rho_gamma(gamma, &src).unwrap() {
            if beta > 0.0 {
                let rho = 1.0 / beta - 1.0;
                prop_assert!((tilted_log_mean(rho, &src).unwrap() - gamma.ln()).abs() < 1e-10);
            }
        } else {
            prop_assert!(false, "in-support threshold must have an interior root");
        }
    }

    #[test]
    fn class_exponents_are_monotone_in_gamma(seed in any::<u64>(), rho in 0.0f64..1.0) {
        let src = common::random_source(&mut ChaCha8Rng::seed_from_u64(seed));
        let gammas: Vec<f64> = (0..=60).map(|k| k as f64 / 60.0).collect();
        let e1: Vec<ExtReal> = gammas.iter().map(|&g| es_class(Class::One, rho, &src, g).unwrap()).collect();
        let e2: Vec<ExtReal> = gammas.iter().map(|&g| es_class(Class::Two, rho, &src, g).unwrap()).collect();
        let slack = ExtReal::Finite(1e-12);
        for k in 1..gammas.len() {
            prop_assert!(e1[k] <= e1[k - 1].checked_add(slack).unwrap(), "class 1 at {}", gammas[k]);
            prop_assert!(e2[k].checked_add(slack).unwrap() >= e2[k - 1], "class 2 at {}", gammas[k]);
        }
    }

    #[test]
    fn class_exponents_lie_below_source_function_and_are_convex(seed in any::<u64>(), g in 0.0f64..1.0) {
        let src = common::random_source(&mut ChaCha8Rng::seed_from_u64(seed));
        let grid = rho_grid(50);
        for class in Class::ALL {
            let v: Vec<ExtReal> = grid.iter().map(|&r| es_class(class, r, &src, g).unwrap()).collect();
            if !v[0].is_finite() {
                prop_assert!(v.iter().all(|x| *x == ExtReal::MinusInf));
                continue;
            }
            let v: Vec<f64> = v.iter().map(|x| x.finite().unwrap()).collect();
            for (k, &r) in grid.iter().enumerate() {
                prop_assert!(v[k] <= e_s(r, &src).unwrap() + 1e-12);
                if k > 0 && k + 1 < v.len() {
                    prop_assert!(v[k] <= 0.5 * (v[k - 1] + v[k + 1]) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn class_exponents_match_tilt_minimization(seed in any::<u64>(), g in 0.0f64..1.0, rho in 0.0f64..1.0) {
        let src = common::random_source(&mut ChaCha8Rng::seed_from_u64(seed));
        for class in Class::ALL {
            let a = es_class(class, rho, &src, g).unwrap();
            let b = es_class_by_lambda(class, rho, &src.probs, g);
            match (a, b) {
                (ExtReal::Finite(x), ExtReal::Finite(y)) => prop_assert!((x - y).abs() < 1e-9, "{x} vs {y}"),
                _ => prop_assert_eq!(a, b),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn golden_section_agrees_with_grid_on_concave_objectives(
        a in 0.01f64..10.0, c in -0.5f64..1.5, s in -3.0f64..3.0, b in 0.0f64..2.0,
    ) {
        let f = |x: f64| -a * (x - c) * (x - c) + s * x - b * (1.0 + x).ln();
        let (_, gv) = golden_section_max(f, 0.0, 1.0, 1e-10);
        let (_, ov) = grid_max_rho(f, 10_000);
        prop_assert!((gv - ov).abs() < 1e-6, "{gv} vs {ov}");
    }
}
