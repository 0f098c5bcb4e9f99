//! Dense primal simplex for small problems of the form
//!
//! ```text
//! maximize    c·x
//! subject to  A x <= b,  x >= 0,  b >= 0
//! ```
//!
//! With `b >= 0` the origin is a basic feasible solution, so no phase one is
//! needed. Pivoting follows Bland's rule, which rules out cycling on the
//! heavily degenerate margin problems built by [`crate::geometry`].

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    NegativeRhs(usize),
    Unbounded,
    IterationLimit,
    Shape(String),
}

impl std::fmt::Display for LpError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LpError::NegativeRhs(i) => write!(f, "row {i} has a negative right-hand side"),
            LpError::Unbounded => write!(f, "objective is unbounded"),
            LpError::IterationLimit => write!(f, "iteration limit reached"),
            LpError::Shape(s) => write!(f, "shape error: {s}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
}

/// Solves `max c·x` s.t. `A x <= b`, `x >= 0`, requiring `b >= 0`.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution, LpError> {
    let n = c.len();
    let m = b.len();
    if a.len() != m {
        return Err(LpError::Shape(format!("{} rows but {} right-hand sides", a.len(), m)));
    }
    if let Some(i) = a.iter().position(|row| row.len() != n) {
        return Err(LpError::Shape(format!("row {i} has the wrong length")));
    }
    if let Some(i) = b.iter().position(|&v| v.is_nan() || v < 0.0) {
        return Err(LpError::NegativeRhs(i));
    }

    // Columns: n structural, m slack, then the rhs.
    let width = n + m + 1;
    let mut t = vec![0.0; (m + 1) * width];
    for i in 0..m {
        let row = &mut t[i * width..(i + 1) * width];
        row[..n].copy_from_slice(&a[i]);
        row[n + i] = 1.0;
        row[width - 1] = b[i];
    }
    // Objective row holds reduced costs c_j - z_j; optimal when all <= 0.
    {
        let obj = &mut t[m * width..];
        obj[..n].copy_from_slice(c);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let max_iter = 50 * (n + m + 10);
    for _ in 0..max_iter {
        let obj = &t[m * width..];
        let Some(enter) = (0..n + m).find(|&j| obj[j] > COST_EPS) else {
            let mut x = vec![0.0; n];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < n {
                    x[bv] = t[i * width + width - 1];
                }
            }
            let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
            return Ok(LpSolution { objective, x });
        };

        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let aij = t[i * width + enter];
            if aij > PIVOT_EPS {
                let ratio = t[i * width + width - 1] / aij;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - 1e-13
                            || (ratio <= best + 1e-13 && basis[i] < basis[r])
                        {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        let Some((row, _)) = leave else {
            return Err(LpError::Unbounded);
        };
        pivot(&mut t, width, m, row, enter);
        basis[row] = enter;
    }
    Err(LpError::IterationLimit)
}

fn pivot(t: &mut [f64], width: usize, m: usize, row: usize, col: usize) {
    let p = t[row * width + col];
    for v in &mut t[row * width..(row + 1) * width] {
        *v /= p;
    }
    let pivot_row: Vec<f64> = t[row * width..(row + 1) * width].to_vec();
    for i in 0..=m {
        if i == row {
            continue;
        }
        let f = t[i * width + col];
        if f != 0.0 {
            for (v, pr) in t[i * width..(i + 1) * width].iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            t[i * width + col] = 0.0;
        }
    }
    // Keep rhs nonnegative against round-off.
    for i in 0..m {
        let rhs = &mut t[i * width + width - 1];
        if *rhs < 0.0 && *rhs > -1e-12 {
            *rhs = 0.0;
        }
    }
}
