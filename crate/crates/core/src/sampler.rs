//! Randomized vertex counting on Minkowski sums.
//!
//! Each sample draws a Gaussian direction `g` and records, per summand, the
//! index of the point maximizing `g·v`. The tuple of indices identifies a
//! vertex of the sum (and, for directions with positive first coordinate,
//! a linear region). In `Full` mode the minimizers are recorded as well; in
//! `Upper` mode `g` is reflected into the half-space `g_1 >= 0` and only
//! maximizers are kept.
//!
//! Sample `j` always uses substream `j` of the seed, so the set found with
//! `K` samples is contained in the set found with any `K' > K`, and results
//! do not depend on the thread count.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{eliminate_redundant, minkowski_candidates, newton_polytope, upper_hull_vertices, Polytope};
use crate::rng::normal_vector;
use crate::tropical::{dot, Configuration, LayerSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    Full,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub samples: usize,
    pub delta: f64,
    pub mode: SampleMode,
    pub seed: u64,
}

impl SamplePlan {
    pub fn new(samples: usize, delta: f64, mode: SampleMode, seed: u64) -> Result<Self> {
        let plan = SamplePlan { samples, delta, mode, seed };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::validation("sample count K must be at least 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::validation(format!("delta {} must lie in (0, 1)", self.delta)));
        }
        Ok(())
    }
}

/// The direction used by sample `index`: standard normal, reflected into
/// `g_1 >= 0` in `Upper` mode.
pub fn sample_direction(seed: u64, index: u64, dim: usize, mode: SampleMode) -> Vec<f64> {
    let mut g = normal_vector(seed, index, dim);
    if mode == SampleMode::Upper && g[0] < 0.0 {
        g.iter_mut().for_each(|v| *v = -*v);
    }
    g
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleResult {
    pub configurations: BTreeSet<Configuration>,
    /// Recorded configurations in which some argmax was tied within `tol`.
    pub degenerate: usize,
    pub samples: usize,
}

impl SampleResult {
    pub fn count(&self) -> usize {
        self.configurations.len()
    }

    fn merge(mut self, other: SampleResult) -> SampleResult {
        self.configurations.extend(other.configurations);
        self.degenerate += other.degenerate;
        self.samples += other.samples;
        self
    }
}

fn record(polytopes: &[Polytope], g: &[f64], tol: f64) -> (Configuration, bool) {
    let mut tied = false;
    let idx = polytopes
        .iter()
        .map(|p| {
            let (i, t) = p.argmax(g, tol);
            tied |= t;
            i
        })
        .collect();
    (Configuration(idx), tied)
}

/// Runs the sampler over polytopes given in V-representation. Configuration
/// entries index each polytope's point list.
pub fn sample_configurations(polytopes: &[Polytope], plan: &SamplePlan, tol: f64) -> Result<SampleResult> {
    plan.validate()?;
    let Some(first) = polytopes.first() else {
        return Err(Error::validation("no polytopes to sample"));
    };
    let dim = first.ambient_dim();
    for p in polytopes {
        Error::check_dim(dim, p.ambient_dim())?;
    }
    let result = (0..plan.samples as u64)
        .into_par_iter()
        .fold(SampleResult::default, |mut acc, j| {
            let g = sample_direction(plan.seed, j, dim, plan.mode);
            let (cfg, tied) = record(polytopes, &g, tol);
            acc.degenerate += tied as usize;
            acc.configurations.insert(cfg);
            if plan.mode == SampleMode::Full {
                let neg: Vec<f64> = g.iter().map(|v| -v).collect();
                let (cfg, tied) = record(polytopes, &neg, tol);
                acc.degenerate += tied as usize;
                acc.configurations.insert(cfg);
            }
            acc.samples += 1;
            acc
        })
        .reduce(SampleResult::default, SampleResult::merge);
    Ok(result)
}

/// Runs the sampler on a layer's Newton polytopes; configurations index the
/// units' terms, matching [`LayerSpec::pattern`].
pub fn sample_layer_configurations(layer: &LayerSpec, plan: &SamplePlan, tol: f64) -> Result<SampleResult> {
    let polys: Vec<Polytope> = layer.units().iter().map(|u| newton_polytope(&u.poly)).collect();
    sample_configurations(&polys, plan, tol)
}

/// Monte-Carlo Gaussian measures of normal cones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSpectrum {
    /// Estimated `ω(N_P(v))` per requested vertex.
    pub full: Vec<f64>,
    /// Estimated `ω(N'_P(v))`, the cone cut down to `c_1 >= 0`.
    pub truncated: Vec<f64>,
    pub full_stderr: Vec<f64>,
    pub truncated_stderr: Vec<f64>,
    pub samples: usize,
}

impl AngleSpectrum {
    pub fn full_total(&self) -> f64 {
        self.full.iter().sum()
    }

    /// Standard error of [`full_total`](Self::full_total) treating the
    /// per-vertex estimates as independent (conservative).
    pub fn full_total_stderr(&self) -> f64 {
        self.full_stderr.iter().map(|s| s * s).sum::<f64>().sqrt()
    }
}

impl AngleSpectrum {
    /// The entries for the given vertex indices, in that order.
    pub fn select(&self, indices: &[usize]) -> AngleSpectrum {
        let pick = |v: &[f64]| indices.iter().map(|&i| v[i]).collect();
        AngleSpectrum {
            full: pick(&self.full),
            truncated: pick(&self.truncated),
            full_stderr: pick(&self.full_stderr),
            truncated_stderr: pick(&self.truncated_stderr),
            samples: self.samples,
        }
    }
}

fn stderr(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Estimates the solid angles of the normal cones at `vertices` by counting
/// how often a standard normal `g` lies in each cone, i.e. how often `v`
/// maximizes `g·z` over `P` within `tol`.
pub fn estimate_solid_angles(
    polytope: &Polytope,
    vertices: &[Vec<f64>],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<AngleSpectrum> {
    if samples == 0 {
        return Err(Error::validation("need at least one sample"));
    }
    for v in vertices {
        if polytope.position(v, 0.0).is_none() {
            return Err(Error::UnknownPoint);
        }
    }
    let dim = polytope.ambient_dim();
    let nv = vertices.len();
    let counts = (0..samples as u64)
        .into_par_iter()
        .fold(
            || vec![0u64; 2 * nv],
            |mut acc, j| {
                let g = normal_vector(seed, j, dim);
                let max = polytope
                    .points()
                    .iter()
                    .map(|z| dot(&g, z))
                    .fold(f64::NEG_INFINITY, f64::max);
                for (k, v) in vertices.iter().enumerate() {
                    if dot(&g, v) >= max - tol {
                        acc[k] += 1;
                        if g[0] >= 0.0 {
                            acc[nv + k] += 1;
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; 2 * nv],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let freq = |c: u64| c as f64 / samples as f64;
    let full: Vec<f64> = counts[..nv].iter().map(|&c| freq(c)).collect();
    let truncated: Vec<f64> = counts[nv..].iter().map(|&c| freq(c)).collect();
    Ok(AngleSpectrum {
        full_stderr: full.iter().map(|&p| stderr(p, samples)).collect(),
        truncated_stderr: truncated.iter().map(|&p| stderr(p, samples)).collect(),
        full,
        truncated,
        samples,
    })
}

/// The reduced Minkowski sum of a layer's Newton polytopes together with
/// normal-cone angle estimates for all of its vertices.
#[derive(Clone, Debug)]
pub struct LayerAngles {
    pub polytope: Polytope,
    pub spectrum: AngleSpectrum,
    /// Indices (into `polytope.points()`) of the region-defining vertices.
    pub upper: Vec<usize>,
    /// Term configuration of each region-defining vertex, aligned with `upper`.
    pub upper_configurations: Vec<Configuration>,
}

impl LayerAngles {
    pub fn upper_spectrum(&self) -> AngleSpectrum {
        self.spectrum.select(&self.upper)
    }

    pub fn required_samples_full(&self, delta: f64) -> Result<usize> {
        required_samples_full(&self.spectrum, self.polytope.len(), delta)
    }

    pub fn required_samples_upper(&self, delta: f64) -> Result<usize> {
        required_samples_upper(&self.upper_spectrum(), self.upper.len(), delta)
    }
}

/// Builds the layer's sum polytope (enumerating at most `cap` candidates),
/// reduces it, finds its region-defining vertices and estimates all normal
/// cone angles with `samples` Gaussian directions.
pub fn layer_angles(layer: &LayerSpec, samples: usize, seed: u64, tol: f64, cap: u128) -> Result<LayerAngles> {
    let polys: Vec<Polytope> = layer.units().iter().map(|u| newton_polytope(&u.poly)).collect();
    let cands = minkowski_candidates(&polys, cap)?;
    let polytope = eliminate_redundant(&cands.polytope, tol)?;
    let spectrum = estimate_solid_angles(&polytope, polytope.points(), samples, seed, tol)?;
    let upper_points = if polytope.ambient_dim() >= 2 {
        upper_hull_vertices(&polytope, tol)?
    } else {
        Vec::new()
    };
    let mut upper = Vec::with_capacity(upper_points.len());
    let mut upper_configurations = Vec::with_capacity(upper_points.len());
    for v in &upper_points {
        let idx = polytope.position(v, 0.0).ok_or(Error::UnknownPoint)?;
        let cand = cands.polytope.position(v, 0.0).ok_or(Error::UnknownPoint)?;
        upper.push(idx);
        upper_configurations.push(cands.origins[cand][0].clone());
    }
    Ok(LayerAngles { polytope, spectrum, upper, upper_configurations })
}

/// Smallest `K >= 1` with `n · q^K <= delta`.
fn smallest_k(n: usize, q: f64, delta: f64) -> usize {
    let n = n as f64;
    if q <= 0.0 || n <= delta {
        return 1;
    }
    let fails = |k: usize| n * q.powi(k as i32) > delta;
    let mut k = ((n / delta).ln() / -q.ln()).ceil().max(1.0) as usize;
    while k > 1 && !fails(k - 1) {
        k -= 1;
    }
    while fails(k) {
        k += 1;
    }
    k
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!("delta {delta} must be positive")))
    }
}

fn zero_entries(values: &[f64]) -> Vec<usize> {
    values.iter().enumerate().filter(|(_, &w)| w <= 0.0).map(|(i, _)| i).collect()
}

/// Samples needed in `Full` mode so that all `n_vertices` vertices are found
/// with probability at least `1 - delta`: the smallest `K` with
/// `N · max_k(1 - 2ω_k)^K <= delta`.
pub fn required_samples_full(angles: &AngleSpectrum, n_vertices: usize, delta: f64) -> Result<usize> {
    check_delta(delta)?;
    let zeros = zero_entries(&angles.full);
    if !zeros.is_empty() {
        return Err(Error::UnboundedSamples { vertices: zeros });
    }
    let q = angles.full.iter().map(|w| 1.0 - 2.0 * w).fold(f64::NEG_INFINITY, f64::max);
    Ok(smallest_k(n_vertices, q, delta))
}

/// Samples needed in `Upper` mode so that all `n_vertices` upper-hull
/// vertices are found with probability at least `1 - delta`: the smallest
/// `K` with `N · max_k(1 - ω'_k)^K <= delta`, using the truncated-cone
/// estimates. A single upper-hull vertex is found by every sample.
pub fn required_samples_upper(angles: &AngleSpectrum, n_vertices: usize, delta: f64) -> Result<usize> {
    check_delta(delta)?;
    if n_vertices <= 1 {
        return Ok(1);
    }
    let zeros = zero_entries(&angles.truncated);
    if !zeros.is_empty() {
        return Err(Error::UnboundedSamples { vertices: zeros });
    }
    let q = angles.truncated.iter().map(|w| 1.0 - w).fold(f64::NEG_INFINITY, f64::max);
    Ok(smallest_k(n_vertices, q, delta))
}

/// Samples needed to find every vertex whose normal cone has angle at
/// least `eta`, with probability `1 - delta`: `⌈ln(N/δ) / (2η)⌉`, at least 1.
pub fn required_samples_eta(eta: f64, n_vertices: usize, delta: f64) -> Result<usize> {
    if !(eta > 0.0 && eta < 0.5) {
        return Err(Error::validation(format!("eta {eta} must lie in (0, 1/2)")));
    }
    check_delta(delta)?;
    let k = ((n_vertices as f64 / delta).ln() / (2.0 * eta)).ceil();
    Ok(if k.is_nan() || k < 1.0 { 1 } else { k as usize })
}
