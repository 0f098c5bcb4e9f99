mod common;

use std::collections::BTreeSet;

use common::random_relu_layer;
use tropical_regions::geometry::{eliminate_redundant, minkowski_candidates};
use tropical_regions::oracle::count_regions_exact;
use tropical_regions::rng::normal_vector;
use tropical_regions::sampler::{
    estimate_solid_angles, layer_angles, required_samples_upper, sample_direction,
    sample_layer_configurations, SampleMode, SamplePlan,
};
use tropical_regions::tropical::make_maxout;
use tropical_regions::{LayerSpec, Polytope, DEFAULT_ENUMERATION_CAP, DEFAULT_TOL};

#[test]
fn corner_truncated_angles_and_sample_size() {
    let p = make_maxout(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]], &[0.0; 3]).unwrap();
    let layer = LayerSpec::from_polynomials(2, vec![p]).unwrap();
    let angles = layer_angles(&layer, 400_000, 5, DEFAULT_TOL, DEFAULT_ENUMERATION_CAP).unwrap();
    assert_eq!(angles.upper.len(), 3);
    // Right-angle corner at the origin: full cone 1/4, the others 3/8; the
    // c_1 >= 0 cut halves each.
    let up = angles.upper_spectrum();
    for (v, w) in angles.upper.iter().map(|&i| &angles.polytope.points()[i]).zip(&up.truncated) {
        let expected = if v[1] == 0.0 && v[2] == 0.0 { 0.125 } else { 0.1875 };
        assert!((w - expected).abs() < 0.003, "{v:?}: {w}");
    }
    let k = angles.required_samples_upper(0.01).unwrap();
    assert!((41..=45).contains(&k), "K = {k}");
}

#[test]
fn accepted_directions_are_reflected_normals() {
    let dim = 4;
    let n = 100_000u64;
    let mut mean = vec![0.0; dim];
    for j in 0..n {
        let g = sample_direction(17, j, dim, SampleMode::Upper);
        assert!(g[0] >= 0.0);
        mean.iter_mut().zip(&g).for_each(|(m, v)| *m += v / n as f64);
    }
    // E|g_1| = sqrt(2/π) ≈ 0.798; the other coordinates stay centered.
    assert!((mean[0] - (2.0 / std::f64::consts::PI).sqrt()).abs() < 0.01, "{mean:?}");
    for m in &mean[1..] {
        assert!(m.abs() < 0.01, "{mean:?}");
    }
}

#[test]
fn full_cone_angles_sum_to_one() {
    let segs: Vec<Polytope> = (0..4u64)
        .map(|i| Polytope::new(vec![vec![0.0; 3], normal_vector(3, i, 3)]).unwrap())
        .collect();
    let zono = eliminate_redundant(&minkowski_candidates(&segs, DEFAULT_ENUMERATION_CAP).unwrap().polytope, DEFAULT_TOL).unwrap();
    let a = estimate_solid_angles(&zono, zono.points(), 100_000, 8, DEFAULT_TOL).unwrap();
    let tol = 3.0 * a.full_total_stderr();
    assert!((a.full_total() - 1.0).abs() <= tol.max(1e-12), "{} ± {}", a.full_total(), tol);
    assert!(a.full.iter().chain(&a.truncated).all(|w| (0.0..=1.0).contains(w)));
    // Zonotopes are centrally symmetric: every vertex also has its mirror image.
    let total_truncated: f64 = a.truncated.iter().sum();
    assert!((total_truncated - 0.5).abs() < 0.01);
}

#[test]
fn upper_sampler_misses_rarely_at_required_k() {
    let layer = random_relu_layer(2, 4, 31);
    let exact: BTreeSet<_> = count_regions_exact(&layer, DEFAULT_TOL, DEFAULT_ENUMERATION_CAP)
        .unwrap()
        .regions
        .into_iter()
        .map(|r| r.configuration)
        .collect();
    let angles = layer_angles(&layer, 1_000_000, 99, DEFAULT_TOL, DEFAULT_ENUMERATION_CAP).unwrap();
    assert_eq!(angles.upper_configurations.iter().cloned().collect::<BTreeSet<_>>(), exact);
    let k = required_samples_upper(&angles.upper_spectrum(), exact.len(), 0.1).unwrap();
    let runs = 200;
    let misses = (0..runs)
        .filter(|&seed| {
            let plan = SamplePlan::new(k, 0.1, SampleMode::Upper, 10_000 + seed).unwrap();
            sample_layer_configurations(&layer, &plan, DEFAULT_TOL).unwrap().configurations != exact
        })
        .count();
    assert!(misses as f64 / runs as f64 <= 0.15, "{misses} of {runs} runs missed a region (K = {k})");
}

#[test]
fn upper_sampler_recovers_exact_set_at_required_k() {
    let mut complete = 0;
    let runs = 100u64;
    for run in 0..runs {
        let n = 1 + (run % 3) as usize;
        let m = 1 + (run % 5) as usize;
        let layer = random_relu_layer(n, m, 7000 + run);
        let exact: BTreeSet<_> = count_regions_exact(&layer, DEFAULT_TOL, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .regions
            .into_iter()
            .map(|r| r.configuration)
            .collect();
        let angles = layer_angles(&layer, 1_000_000, run, DEFAULT_TOL, DEFAULT_ENUMERATION_CAP).unwrap();
        let k = match angles.required_samples_upper(0.01) {
            Ok(k) => k + 1,
            // An estimate of zero: the cone is too thin to resolve with this
            // many angle samples, so the run counts as incomplete.
            Err(_) => continue,
        };
        let plan = SamplePlan::new(k, 0.01, SampleMode::Upper, run).unwrap();
        let got = sample_layer_configurations(&layer, &plan, DEFAULT_TOL).unwrap().configurations;
        assert!(got.is_subset(&exact));
        if got == exact {
            complete += 1;
        }
    }
    assert!(complete >= 95, "{complete} of {runs} runs complete");
}
