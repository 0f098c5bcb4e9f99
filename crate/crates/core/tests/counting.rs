mod common;

use std::collections::BTreeSet;

use common::{grid_pattern_count, random_relu_layer};
use tropical_regions::bounds::relu_layer_bound;
use tropical_regions::layer_file::{generate_layer, GenKind};
use tropical_regions::oracle::{
    count_arrangement_regions, count_by_input_sampling, count_regions_exact, DEFAULT_INPUT_SCALE,
};
use tropical_regions::sampler::{sample_layer_configurations, SampleMode, SamplePlan};
use tropical_regions::tropical::make_maxout;
use tropical_regions::{LayerSpec, DEFAULT_ENUMERATION_CAP, DEFAULT_TOL};

#[test]
fn exact_arrangement_and_input_sampling_agree() {
    for case in 0..50u64 {
        let n = 2 + (case % 3) as usize;
        let m = 2 + (case % 7) as usize;
        let layer = random_relu_layer(n, m, 500 + case);
        let exact = count_regions_exact(&layer, DEFAULT_TOL, DEFAULT_ENUMERATION_CAP).unwrap();
        let arr = count_arrangement_regions(&layer, DEFAULT_TOL).unwrap();
        assert_eq!(exact.count, arr.count, "case {case} n={n} m={m}");

        let bound = relu_layer_bound(n as u64, m as u64).unwrap().bound;
        assert_eq!(num_bigint::BigUint::from(exact.count), bound, "tightness case {case}");

        for r in &exact.regions {
            let p = layer.pattern(&r.witness, DEFAULT_TOL).unwrap();
            assert_eq!(p.configuration, r.configuration);
            assert!(!p.tied);
        }

        if n == 2 && m <= 6 {
            let sampled = count_by_input_sampling(&layer, 100_000, case, DEFAULT_INPUT_SCALE, DEFAULT_TOL).unwrap();
            assert!(sampled <= exact.count, "input sampling case {case} m={m}");
        }
    }
}

/// Input sampling finds every region of small planar ReLU layers.
///
/// Fails on generic random layers: bounded cells of area ~1e-3 near the
/// origin, or thin cells far out, are missed by 1e5 Gaussian inputs at any
/// single scale (e.g. seed 503 finds 14 of 16 regions).
#[test]
#[ignore = "input sampling misses small cells of generic random arrangements"]
fn input_sampling_matches_exact_on_small_planar_layers() {
    for case in (0..50u64).filter(|c| c % 3 == 0 && 2 + c % 7 <= 6) {
        let m = 2 + (case % 7) as usize;
        let layer = random_relu_layer(2, m, 500 + case);
        let exact = count_regions_exact(&layer, DEFAULT_TOL, DEFAULT_ENUMERATION_CAP).unwrap();
        let sampled = count_by_input_sampling(&layer, 100_000, case, DEFAULT_INPUT_SCALE, DEFAULT_TOL).unwrap();
        assert_eq!(sampled, exact.count, "case {case} m={m}");
    }
}

#[test]
fn maxout_counts_stay_below_bound_and_dominate_input_sampling() {
    use tropical_regions::bounds::maxout_layer_bound;
    for case in 0..12u64 {
        let (n, m, k) = (2 + (case % 2) as usize, 2 + (case % 3) as usize, 3);
        let layer = generate_layer(GenKind::Maxout { k }, n, m, 900 + case).unwrap().to_layer().unwrap();
        let exact = count_regions_exact(&layer, DEFAULT_TOL, DEFAULT_ENUMERATION_CAP).unwrap();
        let bound = maxout_layer_bound(n as u64, m as u64, k as u64).unwrap().bound;
        assert!(num_bigint::BigUint::from(exact.count) <= bound);
        let sampled = count_by_input_sampling(&layer, 20_000, case, DEFAULT_INPUT_SCALE, DEFAULT_TOL).unwrap();
        assert!(sampled <= exact.count);
        for r in &exact.regions {
            assert_eq!(layer.pattern(&r.witness, DEFAULT_TOL).unwrap().configuration, r.configuration);
        }
    }
}

#[test]
fn rank_three_pair_three_way_agreement() {
    let p = make_maxout(&[vec![1.0, 1.0], vec![2.0, 0.0], vec![1.0, 2.0]], &[0.0; 3]).unwrap();
    let q = make_maxout(&[vec![0.0, 0.0], vec![0.0, -1.0], vec![2.0, -2.0]], &[0.0; 3]).unwrap();
    let layer = LayerSpec::from_polynomials(2, vec![p, q]).unwrap();
    let exact = count_regions_exact(&layer, DEFAULT_TOL, DEFAULT_ENUMERATION_CAP).unwrap();
    let grid = grid_pattern_count(&layer, -30.0, 25.0, 551);
    let sampled = count_by_input_sampling(&layer, 100_000, 2, DEFAULT_INPUT_SCALE, DEFAULT_TOL).unwrap();
    assert_eq!(exact.count, grid);
    assert_eq!(exact.count, sampled);
    // All biases vanish, so regions are cones and match the hull vertices of
    // the projected sum polygon.
    let a = [[1.0, 1.0], [2.0, 0.0], [1.0, 2.0]];
    let b = [[0.0, 0.0], [0.0, -1.0], [2.0, -2.0]];
    let sums: Vec<Vec<f64>> = a.iter().flat_map(|u| b.iter().map(move |v| vec![u[0] + v[0], u[1] + v[1]])).collect();
    assert_eq!(exact.count, common::planar_hull(&sums).len());
    assert_eq!(exact.count, 5);
}

#[test]
fn sampler_is_sound_and_prefix_monotone() {
    for case in 0..30u64 {
        let n = 1 + (case % 3) as usize;
        let m = 1 + (case % 5) as usize;
        let layer = random_relu_layer(n, m, 2000 + case);
        let exact: BTreeSet<_> = count_regions_exact(&layer, DEFAULT_TOL, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .regions
            .into_iter()
            .map(|r| r.configuration)
            .collect();
        let mut prev = BTreeSet::new();
        for k in [1, 5, 20, 100, 500] {
            let plan = SamplePlan::new(k, 0.01, SampleMode::Upper, case).unwrap();
            let got = sample_layer_configurations(&layer, &plan, DEFAULT_TOL).unwrap().configurations;
            assert!(got.is_subset(&exact), "case {case}");
            assert!(prev.is_subset(&got), "prefix case {case}");
            prev = got;
        }
    }
}
