//! Exact region counting and the independent oracles used to check it.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{closed_region_nonempty, strict_feasibility};
use crate::rng::substream;
use crate::tropical::{Configuration, LayerSpec};
use rand::Rng;
use rand_distr::StandardNormal;

/// Default spread of the Gaussian inputs used by [`count_by_input_sampling`].
pub const DEFAULT_INPUT_SCALE: f64 = 10.0;

/// Largest ReLU layer accepted by [`count_arrangement_regions`].
pub const MAX_ARRANGEMENT_UNITS: usize = 25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub configuration: Configuration,
    /// An input point strictly inside the region.
    pub witness: Vec<f64>,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactCount {
    pub count: usize,
    /// Sorted by configuration.
    pub regions: Vec<Region>,
    /// Candidates whose cell is nonempty but has no interior.
    pub degenerate: usize,
}

enum Verdict {
    Region(Region),
    Degenerate,
    Empty,
}

/// Feasibility of one selection of terms (one index per unit): either a
/// full-dimensional region with a witness, a lower-dimensional cell, or empty.
fn classify(layer: &LayerSpec, cfg: &Configuration, tol: f64) -> Result<Verdict> {
    let mut targets = Vec::with_capacity(layer.num_units());
    let mut competitors = Vec::with_capacity(layer.num_units());
    for (unit, &i) in layer.units().iter().zip(cfg.indices()) {
        let terms = unit.poly.terms();
        targets.push(terms[i].lifted());
        competitors.push(
            terms
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, t)| t.lifted())
                .collect::<Vec<_>>(),
        );
    }
    let with_config = |e: Error| match e {
        Error::Solver { reason, .. } => Error::Solver { reason, configuration: Some(cfg.clone()) },
        other => other,
    };
    let res = strict_feasibility(&targets, &competitors, true, tol).map_err(with_config)?;
    if res.feasible {
        let w = res.witness.expect("feasible result carries a witness");
        return Ok(Verdict::Region(Region {
            configuration: cfg.clone(),
            witness: w[1..].to_vec(),
            margin: res.margin,
        }));
    }
    if closed_region_nonempty(&targets, &competitors, tol).map_err(with_config)? {
        Ok(Verdict::Degenerate)
    } else {
        Ok(Verdict::Empty)
    }
}

/// Counts linear regions by testing every configuration for a strictly
/// feasible input point. Fails when the number of configurations exceeds
/// `cap`.
pub fn count_regions_exact(layer: &LayerSpec, tol: f64, cap: u128) -> Result<ExactCount> {
    let total = layer.configuration_count();
    if total > cap {
        return Err(Error::CapExceeded { candidates: total, cap });
    }
    let ranks = layer.ranks();
    let verdicts = (0..total)
        .into_par_iter()
        .map(|code| classify(layer, &Configuration::from_mixed_radix(code, &ranks), tol))
        .collect::<Result<Vec<_>>>()?;
    let mut regions = Vec::new();
    let mut degenerate = 0;
    for v in verdicts {
        match v {
            Verdict::Region(r) => regions.push(r),
            Verdict::Degenerate => degenerate += 1,
            Verdict::Empty => {}
        }
    }
    Ok(ExactCount { count: regions.len(), regions, degenerate })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementCount {
    pub count: usize,
    /// Sign patterns realized only on a lower-dimensional set.
    pub degenerate: usize,
}

/// Counts the cells of the hyperplane arrangement `{w_i·x + b_i = 0}` of a
/// layer of rank-2 units by enumerating sign vectors and testing each one
/// for a strictly feasible point. Each hyperplane is taken as the
/// difference of the unit's two terms, with `+` meaning term 1 wins.
pub fn count_arrangement_regions(layer: &LayerSpec, tol: f64) -> Result<ArrangementCount> {
    let m = layer.num_units();
    if m > MAX_ARRANGEMENT_UNITS {
        return Err(Error::validation(format!(
            "arrangement oracle supports at most {MAX_ARRANGEMENT_UNITS} units, got {m}"
        )));
    }
    let mut planes = Vec::with_capacity(m);
    for (i, unit) in layer.units().iter().enumerate() {
        let t = unit.poly.terms();
        if t.len() != 2 {
            return Err(Error::validation(format!(
                "unit {i} has rank {}; the arrangement oracle needs rank-2 units",
                t.len()
            )));
        }
        let normal: Vec<f64> = t[1].coeffs.iter().zip(&t[0].coeffs).map(|(a, b)| a - b).collect();
        planes.push((t[1].bias - t[0].bias, normal));
    }
    let n = layer.input_dim();
    let results = (0u64..1u64 << m)
        .into_par_iter()
        .map(|signs| {
            // Homogeneous point (t; x) with s_i (b_i t + w_i·x) > 0.
            let mut targets = Vec::with_capacity(m);
            let mut comps = Vec::with_capacity(m);
            for (i, (b, w)) in planes.iter().enumerate() {
                let s = if signs >> i & 1 == 1 { 1.0 } else { -1.0 };
                let mut row = Vec::with_capacity(n + 1);
                row.push(s * b);
                row.extend(w.iter().map(|v| s * v));
                targets.push(row);
                comps.push(vec![vec![0.0; n + 1]]);
            }
            let strict = strict_feasibility(&targets, &comps, true, tol)?;
            if strict.feasible {
                Ok((1usize, 0usize))
            } else if closed_region_nonempty(&targets, &comps, tol)? {
                Ok((0, 1))
            } else {
                Ok((0, 0))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let (count, degenerate) = results.iter().fold((0, 0), |(a, b), (c, d)| (a + c, b + d));
    Ok(ArrangementCount { count, degenerate })
}

/// Number of distinct activation patterns over `samples` Gaussian inputs of
/// standard deviation `input_scale`. A lower bound on the region count.
pub fn count_by_input_sampling(
    layer: &LayerSpec,
    samples: usize,
    seed: u64,
    input_scale: f64,
    tol: f64,
) -> Result<usize> {
    if samples == 0 {
        return Err(Error::validation("need at least one sample"));
    }
    if !(input_scale > 0.0 && input_scale.is_finite()) {
        return Err(Error::validation("input scale must be positive"));
    }
    let n = layer.input_dim();
    let patterns = (0..samples as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = substream(seed, j);
            let x: Vec<f64> = (0..n).map(|_| input_scale * rng.sample::<f64, _>(StandardNormal)).collect();
            layer.pattern(&x, tol).map(|p| p.configuration)
        })
        .collect::<Result<BTreeSet<_>>>()?;
    Ok(patterns.len())
}
