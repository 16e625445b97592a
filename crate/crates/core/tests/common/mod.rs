#![allow(dead_code)]

use macjscc::model::{ClassPolicy, InputDistribution, MacChannel, SourceSpec, SystemModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random probability vector; with some probability one entry is zeroed.
pub fn simplex(rng: &mut ChaCha8Rng, n: usize, allow_zero: bool) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| -rng.gen_range(1e-9f64..1.0).ln()).collect();
    if allow_zero && n > 1 && rng.gen_bool(0.3) {
        let k = rng.gen_range(0..n);
        v[k] = 0.0;
    }
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

/// Small model: binary sources with `P(1)` in `[0.01, 0.5]`, 2 or 3 inputs per
/// user, binary output.
pub fn random_model(seed: u64, identical_classes: bool) -> SystemModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p1 = rng.gen_range(0.01..=0.5);
    let p2 = rng.gen_range(0.01..=0.5);
    let n1 = rng.gen_range(2..=3);
    let n2 = rng.gen_range(2..=3);
    let mut w = Vec::new();
    for _ in 0..n1 * n2 {
        let a: f64 = rng.gen_range(0.0..1.0);
        w.extend_from_slice(&[a, 1.0 - a]);
    }
    let mut dist = |n| InputDistribution::new(simplex(&mut rng, n, true)).unwrap();
    let q1 = [dist(n1), dist(n1)];
    let q2 = [dist(n2), dist(n2)];
    let q = if identical_classes {
        [
            [q1[0].clone(), q1[0].clone()],
            [q2[0].clone(), q2[0].clone()],
        ]
    } else {
        [q1, q2]
    };
    SystemModel {
        source1: SourceSpec::new(vec![p1, 1.0 - p1]).unwrap(),
        source2: SourceSpec::new(vec![p2, 1.0 - p2]).unwrap(),
        channel: MacChannel::new(n1, n2, 2, w).unwrap(),
        policy: ClassPolicy { q, gamma: None },
    }
    .validated()
    .unwrap()
}

pub fn random_source(rng: &mut ChaCha8Rng) -> SourceSpec {
    let n = rng.gen_range(2..=5);
    loop {
        let v = simplex(rng, n, false);
        if v.iter().all(|&p| p > 1e-6) {
            return SourceSpec::new(v).unwrap();
        }
    }
}
