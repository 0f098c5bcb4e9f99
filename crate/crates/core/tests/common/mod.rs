#![allow(dead_code)]

use tropical_regions::layer_file::{generate_layer, GenKind};
use tropical_regions::LayerSpec;

pub fn random_relu_layer(n: usize, m: usize, seed: u64) -> LayerSpec {
    generate_layer(GenKind::Relu, n, m, seed).unwrap().to_layer().unwrap()
}

/// Solves a small square system by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Brute-force vertex count for point sets in general position: a point is
/// counted when it lies on a supporting hyperplane spanned by `d` of the
/// points. Valid when every candidate on a face is a vertex of that face
/// (true for sums of generic segments).
pub fn supporting_plane_vertex_count(points: &[Vec<f64>]) -> usize {
    let d = points[0].len();
    let mut on_boundary = vec![false; points.len()];
    for combo in subsets(points.len(), d) {
        // Hyperplane a·z = 1 through the chosen points (shifted to avoid the origin).
        let shift: Vec<f64> = (0..d).map(|j| 1000.0 + j as f64 * 7.0).collect();
        let rows: Vec<Vec<f64>> = combo
            .iter()
            .map(|&i| points[i].iter().zip(&shift).map(|(p, s)| p + s).collect())
            .collect();
        let Some(a) = solve(rows, vec![1.0; d]) else { continue };
        let vals: Vec<f64> = points
            .iter()
            .map(|p| p.iter().zip(&shift).zip(&a).map(|((p, s), a)| (p + s) * a).sum::<f64>() - 1.0)
            .collect();
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
        let eps = 1e-9 * scale.max(1.0);
        let above = vals.iter().any(|&v| v > eps);
        let below = vals.iter().any(|&v| v < -eps);
        if above && below {
            continue;
        }
        for (i, v) in vals.iter().enumerate() {
            if v.abs() <= eps {
                on_boundary[i] = true;
            }
        }
    }
    on_boundary.iter().filter(|&&b| b).count()
}

/// Strict convex hull of planar points (Andrew's monotone chain, collinear
/// points dropped).
pub fn planar_hull(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts.into_iter().map(|(x, y)| vec![x, y]).collect();
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower.into_iter().map(|(x, y)| vec![x, y]).collect()
}

pub fn sorted(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Distinct tie-free activation patterns on a regular grid over `[lo, hi]^2`.
pub fn grid_pattern_count(layer: &LayerSpec, lo: f64, hi: f64, steps: usize) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    for i in 0..=steps {
        for j in 0..=steps {
            let x = lo + (hi - lo) * i as f64 / steps as f64;
            let y = lo + (hi - lo) * j as f64 / steps as f64;
            let p = layer.pattern(&[x, y], 1e-9).unwrap();
            if !p.tied {
                seen.insert(p.configuration);
            }
        }
    }
    seen.len()
}
