//! V-represented polytopes and the margin linear programs behind every
//! vertex and region test.
//!
//! Newton polytopes live in R^{n+1} with the bias coordinate first. A vertex
//! test asks for a direction `c` with `c·(v - u) > 0` for every competitor
//! `u`; a region test additionally requires `c` to have the form `(1, x)`,
//! so that `x` is an input point where the selected terms win.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LpError};
use crate::tropical::{argmax_with_tie, dot, Configuration, TropicalPolynomial};

/// Default cap on the number of enumerated Minkowski-sum candidates.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    ambient_dim: usize,
    points: Vec<Vec<f64>>,
    reduced: bool,
}

impl Polytope {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::validation("a polytope needs at least one point"));
        };
        let ambient_dim = first.len();
        if ambient_dim == 0 {
            return Err(Error::validation("ambient dimension must be positive"));
        }
        for p in &points {
            Error::check_dim(ambient_dim, p.len())?;
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation("polytope point has a non-finite entry"));
            }
        }
        Ok(Polytope { ambient_dim, points, reduced: false })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Whether the point list is known to be exactly the vertex set.
    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Lowest-index maximizer of `g·p` over the listed points, and whether
    /// another point tied within `tol`.
    pub fn argmax(&self, g: &[f64], tol: f64) -> (usize, bool) {
        argmax_with_tie(self.points.iter().map(|p| dot(p, g)), tol)
    }

    /// Index of `v` among the listed points, matching within `tol` in every
    /// coordinate.
    pub fn position(&self, v: &[f64], tol: f64) -> Option<usize> {
        self.points
            .iter()
            .position(|p| p.len() == v.len() && max_abs_diff(p, v) <= tol)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Points `(b_i; c_i)` of the polynomial's terms. Not reduced.
pub fn newton_polytope(p: &TropicalPolynomial) -> Polytope {
    Polytope {
        ambient_dim: p.input_dim() + 1,
        points: p.terms().iter().map(|t| t.lifted()).collect(),
        reduced: false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub feasible: bool,
    /// Separating direction. With `fix_first` it has the form `(1, x)`.
    pub witness: Option<Vec<f64>>,
    /// Optimal margin of the bounded LP; zero when infeasible.
    pub margin: f64,
}

/// Decides whether a direction `c` exists with `c·(targets[i] - u) > tol`
/// for every `u` in `competitors[i]`, by maximizing the common margin over
/// the box `‖c‖∞ <= 1`.
///
/// With `fix_first` the direction is restricted to the ray through `(1, x)`.
/// This is solved in homogeneous form: `c = (t, y)` with `t >= margin`,
/// `t <= 1`, `‖y‖∞ <= 1`, and the witness is rescaled to `(1, y / t)`, so
/// input points arbitrarily far from the origin are reachable.
///
/// Competitors exactly equal to their target are skipped.
pub fn strict_feasibility(
    targets: &[Vec<f64>],
    competitors: &[Vec<Vec<f64>>],
    fix_first: bool,
    tol: f64,
) -> Result<FeasibilityResult> {
    if targets.len() != competitors.len() {
        return Err(Error::validation(format!(
            "{} targets but {} competitor lists",
            targets.len(),
            competitors.len()
        )));
    }
    let Some(dim) = targets.first().map(Vec::len) else {
        return Err(Error::validation("no targets given"));
    };
    if dim == 0 {
        return Err(Error::validation("zero-dimensional target"));
    }
    let mut diffs: Vec<Vec<f64>> = Vec::new();
    for (t, comps) in targets.iter().zip(competitors) {
        Error::check_dim(dim, t.len())?;
        for u in comps {
            Error::check_dim(dim, u.len())?;
            if u != t {
                diffs.push(t.iter().zip(u).map(|(a, b)| a - b).collect());
            }
        }
    }

    if fix_first {
        solve_region_margin(&diffs, dim, tol)
    } else {
        solve_vertex_margin(&diffs, dim, tol)
    }
}

fn solver_error(e: LpError) -> Error {
    Error::Solver { reason: e.to_string(), configuration: None }
}

// Variables: c+ (d), c- (d), s.
fn solve_vertex_margin(diffs: &[Vec<f64>], dim: usize, tol: f64) -> Result<FeasibilityResult> {
    let nvar = 2 * dim + 1;
    let s = 2 * dim;
    let mut a = Vec::with_capacity(diffs.len() + nvar);
    let mut b = Vec::with_capacity(diffs.len() + nvar);
    for d in diffs {
        let mut row = vec![0.0; nvar];
        for j in 0..dim {
            row[j] = -d[j];
            row[dim + j] = d[j];
        }
        row[s] = 1.0;
        a.push(row);
        b.push(0.0);
    }
    for j in 0..nvar {
        let mut row = vec![0.0; nvar];
        row[j] = 1.0;
        a.push(row);
        b.push(1.0);
    }
    let mut obj = vec![0.0; nvar];
    obj[s] = 1.0;
    let sol = lp::maximize(&obj, &a, &b).map_err(solver_error)?;
    let margin = sol.objective.max(0.0);
    let feasible = margin > tol;
    let witness = feasible.then(|| (0..dim).map(|j| sol.x[j] - sol.x[dim + j]).collect());
    Ok(FeasibilityResult { feasible, witness, margin })
}

// Variables: t, y+ (d-1), y- (d-1), s.
fn solve_region_margin(diffs: &[Vec<f64>], dim: usize, tol: f64) -> Result<FeasibilityResult> {
    let r = dim - 1;
    let nvar = 2 * r + 2;
    let s = nvar - 1;
    let mut a = Vec::with_capacity(diffs.len() + nvar + 1);
    let mut b = Vec::with_capacity(diffs.len() + nvar + 1);
    for d in diffs {
        let mut row = vec![0.0; nvar];
        row[0] = -d[0];
        for j in 0..r {
            row[1 + j] = -d[1 + j];
            row[1 + r + j] = d[1 + j];
        }
        row[s] = 1.0;
        a.push(row);
        b.push(0.0);
    }
    // s <= t
    let mut row = vec![0.0; nvar];
    row[0] = -1.0;
    row[s] = 1.0;
    a.push(row);
    b.push(0.0);
    for j in 0..nvar - 1 {
        let mut row = vec![0.0; nvar];
        row[j] = 1.0;
        a.push(row);
        b.push(1.0);
    }
    let mut obj = vec![0.0; nvar];
    obj[s] = 1.0;
    let sol = lp::maximize(&obj, &a, &b).map_err(solver_error)?;
    let margin = sol.objective.max(0.0);
    let t = sol.x[0];
    let feasible = margin > tol && t > 0.0;
    let witness = feasible.then(|| {
        let mut w = Vec::with_capacity(dim);
        w.push(1.0);
        w.extend((0..r).map(|j| (sol.x[1 + j] - sol.x[1 + r + j]) / t));
        w
    });
    Ok(FeasibilityResult { feasible: feasible && witness.is_some(), witness, margin })
}

/// Whether some `(1, x)` satisfies the selection with non-strict
/// inequalities, i.e. the selection's closed cell is nonempty. Used to tell
/// lower-dimensional (degenerate) cells from empty ones.
pub fn closed_region_nonempty(
    targets: &[Vec<f64>],
    competitors: &[Vec<Vec<f64>>],
    tol: f64,
) -> Result<bool> {
    let dim = targets.first().map_or(0, Vec::len);
    if dim == 0 || targets.len() != competitors.len() {
        return Err(Error::validation("malformed region test"));
    }
    let r = dim - 1;
    let nvar = 1 + 2 * r;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (t, comps) in targets.iter().zip(competitors) {
        for u in comps {
            if u == t {
                continue;
            }
            let mut row = vec![0.0; nvar];
            row[0] = -(t[0] - u[0]);
            for j in 0..r {
                let d = t[1 + j] - u[1 + j];
                row[1 + j] = -d;
                row[1 + r + j] = d;
            }
            a.push(row);
            b.push(0.0);
        }
    }
    for j in 0..nvar {
        let mut row = vec![0.0; nvar];
        row[j] = 1.0;
        a.push(row);
        b.push(1.0);
    }
    let mut obj = vec![0.0; nvar];
    obj[0] = 1.0;
    let sol = lp::maximize(&obj, &a, &b).map_err(solver_error)?;
    Ok(sol.objective > tol)
}

fn dedup_within(points: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !kept.iter().any(|q| max_abs_diff(p, q) <= tol) {
            kept.push(p.clone());
        }
    }
    kept
}

/// Minimal V-representation: near-duplicates (within `tol`) are merged, then
/// a point is kept iff it can be strictly separated from all the others.
pub fn eliminate_redundant(p: &Polytope, tol: f64) -> Result<Polytope> {
    let pts = dedup_within(&p.points, tol);
    let keep = pts
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let rest: Vec<Vec<f64>> = pts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, u)| u.clone())
                .collect();
            strict_feasibility(std::slice::from_ref(v), &[rest], false, tol).map(|r| r.feasible)
        })
        .collect::<Result<Vec<bool>>>()?;
    let points = pts.into_iter().zip(keep).filter(|(_, k)| *k).map(|(v, _)| v).collect();
    Ok(Polytope { ambient_dim: p.ambient_dim, points, reduced: true })
}

#[derive(Clone, Debug)]
pub struct MinkowskiCandidates {
    /// Distinct candidate sums, not reduced.
    pub polytope: Polytope,
    /// For each candidate point, every configuration that sums to it.
    pub origins: Vec<Vec<Configuration>>,
}

/// All sums picking one point per summand, each tagged with the
/// configuration(s) producing it. Fails once the number of candidates
/// exceeds `cap`.
pub fn minkowski_candidates(polytopes: &[Polytope], cap: u128) -> Result<MinkowskiCandidates> {
    let Some(first) = polytopes.first() else {
        return Err(Error::validation("Minkowski sum of zero polytopes"));
    };
    let dim = first.ambient_dim;
    for p in polytopes {
        Error::check_dim(dim, p.ambient_dim)?;
    }
    let ranks: Vec<usize> = polytopes.iter().map(Polytope::len).collect();
    let total = ranks.iter().fold(1u128, |acc, &r| acc.saturating_mul(r as u128));
    if total > cap {
        return Err(Error::CapExceeded { candidates: total, cap });
    }

    let mut index: std::collections::HashMap<Vec<u64>, usize> = std::collections::HashMap::new();
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut origins: Vec<Vec<Configuration>> = Vec::new();
    for code in 0..total {
        let cfg = Configuration::from_mixed_radix(code, &ranks);
        let mut sum = vec![0.0; dim];
        for (p, &i) in polytopes.iter().zip(cfg.indices()) {
            for (s, v) in sum.iter_mut().zip(&p.points[i]) {
                *s += v;
            }
        }
        // +0.0 normalizes negative zero so equal sums hash together.
        let key: Vec<u64> = sum.iter().map(|v| (v + 0.0).to_bits()).collect();
        match index.get(&key) {
            Some(&k) => origins[k].push(cfg),
            None => {
                index.insert(key, points.len());
                points.push(sum);
                origins.push(vec![cfg]);
            }
        }
    }
    Ok(MinkowskiCandidates {
        polytope: Polytope { ambient_dim: dim, points, reduced: false },
        origins,
    })
}

/// Points maximizing some direction `(1, x)`: the region-defining vertices.
pub fn upper_hull_vertices(p: &Polytope, tol: f64) -> Result<Vec<Vec<f64>>> {
    if p.ambient_dim < 2 {
        return Err(Error::validation("upper hull needs ambient dimension >= 2"));
    }
    let pts = dedup_within(&p.points, tol);
    let keep = pts
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let rest: Vec<Vec<f64>> = pts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, u)| u.clone())
                .collect();
            strict_feasibility(std::slice::from_ref(v), &[rest], true, tol).map(|r| r.feasible)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(pts.into_iter().zip(keep).filter(|(_, k)| *k).map(|(v, _)| v).collect())
}

/// Whether `c` lies in the normal cone of `P` at `v`: `c·(z - v) <= tol` for
/// every listed `z`.
pub fn normal_cone_contains(p: &Polytope, v: &[f64], c: &[f64], tol: f64) -> Result<bool> {
    Error::check_dim(p.ambient_dim, c.len())?;
    if p.position(v, 0.0).is_none() {
        return Err(Error::UnknownPoint);
    }
    let cv = dot(c, v);
    Ok(p.points.iter().all(|z| dot(c, z) - cv <= tol))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorCount {
    /// Number of pairwise non-parallel direction classes.
    pub count: usize,
    /// Indices of zero-length segments, excluded from the count.
    pub zero_length: Vec<usize>,
}

/// Counts direction classes among segments, treating antiparallel
/// directions as parallel. Directions are normalized to unit length with a
/// positive leading nonzero entry and compared within `tol`.
pub fn nonparallel_generator_count(segments: &[(Vec<f64>, Vec<f64>)], tol: f64) -> GeneratorCount {
    let mut classes: Vec<Vec<f64>> = Vec::new();
    let mut zero_length = Vec::new();
    for (i, (a, b)) in segments.iter().enumerate() {
        let mut d: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        let norm = dot(&d, &d).sqrt();
        if norm <= tol {
            zero_length.push(i);
            continue;
        }
        let lead = d.iter().copied().find(|v| v.abs() > tol * norm).unwrap_or(1.0);
        let scale = lead.signum() / norm;
        d.iter_mut().for_each(|v| *v *= scale);
        if !classes.iter().any(|c| max_abs_diff(c, &d) <= tol.max(1e-12) * 10.0) {
            classes.push(d);
        }
    }
    GeneratorCount { count: classes.len(), zero_length }
}
