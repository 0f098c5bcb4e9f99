//! Max-plus arithmetic on tropical signomials and the constructors that map
//! ReLU, leaky ReLU and maxout units onto them.
//!
//! A polynomial is stored as its list of affine terms `b + c·x`; tropical
//! addition is a pointwise max (term union) and tropical multiplication is a
//! pointwise sum (all pairwise term sums).

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used wherever a `tol` parameter is not supplied.
pub const DEFAULT_TOL: f64 = 1e-9;

/// One affine piece `bias + coeffs·x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TropicalTerm {
    pub bias: f64,
    pub coeffs: Vec<f64>,
}

impl TropicalTerm {
    pub fn new(bias: f64, coeffs: Vec<f64>) -> Self {
        TropicalTerm { bias, coeffs }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.bias + dot(&self.coeffs, x)
    }

    /// The term as a point of R^{n+1}, bias first.
    pub fn lifted(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.coeffs.len() + 1);
        p.push(self.bias);
        p.extend_from_slice(&self.coeffs);
        p
    }

    fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.coeffs.iter().all(|c| c.is_finite())
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.bias.total_cmp(&other.bias).then_with(|| {
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A finite maximum of affine terms over R^n. Never empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TropicalPolynomial {
    input_dim: usize,
    terms: Vec<TropicalTerm>,
}

impl TropicalPolynomial {
    /// Builds a polynomial, dropping exact duplicate terms (first occurrence
    /// wins). Near-duplicates are kept.
    pub fn new(input_dim: usize, terms: Vec<TropicalTerm>) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::validation("input dimension must be positive"));
        }
        if terms.is_empty() {
            return Err(Error::validation("a tropical polynomial needs at least one term"));
        }
        let mut kept: Vec<TropicalTerm> = Vec::with_capacity(terms.len());
        for (i, t) in terms.into_iter().enumerate() {
            Error::check_dim(input_dim, t.coeffs.len())?;
            if !t.is_finite() {
                return Err(Error::validation(format!("term {i} has a non-finite entry")));
            }
            if !kept.contains(&t) {
                kept.push(t);
            }
        }
        Ok(TropicalPolynomial { input_dim, terms: kept })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn terms(&self) -> &[TropicalTerm] {
        &self.terms
    }

    /// Number of distinct terms.
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    /// True when every term has the same coefficient vector, i.e. the
    /// function is affine and the unit contributes a single region.
    pub fn is_degenerate(&self) -> bool {
        self.terms.iter().all(|t| t.coeffs == self.terms[0].coeffs)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Error::check_dim(self.input_dim, x.len())?;
        Ok(self
            .terms
            .iter()
            .map(|t| t.eval(x))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Indices of the terms within `tol` of the maximum. Two or more indices
    /// means `x` lies on the tropical hypersurface.
    pub fn active_terms(&self, x: &[f64], tol: f64) -> Result<Vec<usize>> {
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::validation("tolerance must be nonnegative"));
        }
        Error::check_dim(self.input_dim, x.len())?;
        let values: Vec<f64> = self.terms.iter().map(|t| t.eval(x)).collect();
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= max - tol)
            .map(|(i, _)| i)
            .collect())
    }

    /// Lowest-index maximizing term and whether another term tied within `tol`.
    pub fn argmax(&self, x: &[f64], tol: f64) -> Result<(usize, bool)> {
        Error::check_dim(self.input_dim, x.len())?;
        Ok(argmax_with_tie(self.terms.iter().map(|t| t.eval(x)), tol))
    }

    /// Tropical sum: pointwise max, i.e. the union of the term lists.
    pub fn trop_add(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.input_dim, other.input_dim)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        TropicalPolynomial::new(self.input_dim, terms)
    }

    /// Tropical product: pointwise sum, i.e. all pairwise term sums.
    pub fn trop_mul(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.input_dim, other.input_dim)?;
        let mut terms = Vec::with_capacity(self.rank() * other.rank());
        for p in &self.terms {
            for q in &other.terms {
                terms.push(TropicalTerm {
                    bias: p.bias + q.bias,
                    coeffs: p.coeffs.iter().zip(&q.coeffs).map(|(a, b)| a + b).collect(),
                });
            }
        }
        TropicalPolynomial::new(self.input_dim, terms)
    }

    /// Same polynomial with terms in a canonical (sorted) order, for
    /// comparing term sets.
    pub fn canonical(&self) -> Self {
        let mut terms = self.terms.clone();
        terms.sort_by(|a, b| a.total_cmp(b));
        TropicalPolynomial { input_dim: self.input_dim, terms }
    }
}

pub(crate) fn argmax_with_tie(values: impl Iterator<Item = f64>, tol: f64) -> (usize, bool) {
    let values: Vec<f64> = values.collect();
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    let max = values[best];
    let tied = values
        .iter()
        .enumerate()
        .any(|(i, &v)| i != best && v >= max - tol);
    (best, tied)
}

fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::validation(format!("{what} has a non-finite entry")))
    }
}

/// `max(0, w·x + b)`.
pub fn make_relu(w: &[f64], b: f64) -> Result<TropicalPolynomial> {
    if w.is_empty() {
        return Err(Error::validation("ReLU weight vector is empty"));
    }
    check_finite(w, "ReLU weight")?;
    check_finite(&[b], "ReLU bias")?;
    TropicalPolynomial::new(
        w.len(),
        vec![TropicalTerm::new(0.0, vec![0.0; w.len()]), TropicalTerm::new(b, w.to_vec())],
    )
}

/// `max(α(w·x + b), w·x + b)` with `0 < α < 1`.
pub fn make_leaky_relu(w: &[f64], b: f64, alpha: f64) -> Result<TropicalPolynomial> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::validation(format!("leaky ReLU slope {alpha} must lie in (0, 1)")));
    }
    if w.is_empty() {
        return Err(Error::validation("leaky ReLU weight vector is empty"));
    }
    check_finite(w, "leaky ReLU weight")?;
    check_finite(&[b], "leaky ReLU bias")?;
    TropicalPolynomial::new(
        w.len(),
        vec![
            TropicalTerm::new(alpha * b, w.iter().map(|x| alpha * x).collect()),
            TropicalTerm::new(b, w.to_vec()),
        ],
    )
}

/// `max_j (W_j·x + b_j)` over the rows of `weights`.
pub fn make_maxout(weights: &[Vec<f64>], biases: &[f64]) -> Result<TropicalPolynomial> {
    if weights.is_empty() {
        return Err(Error::validation("maxout needs at least one row"));
    }
    if weights.len() != biases.len() {
        return Err(Error::validation(format!(
            "maxout has {} weight rows but {} biases",
            weights.len(),
            biases.len()
        )));
    }
    let n = weights[0].len();
    let terms = weights
        .iter()
        .zip(biases)
        .enumerate()
        .map(|(j, (row, &b))| {
            if row.len() != n {
                return Err(Error::validation(format!(
                    "maxout row {j} has length {}, expected {n}",
                    row.len()
                )));
            }
            check_finite(row, &format!("maxout row {j}"))?;
            check_finite(&[b], &format!("maxout bias {j}"))?;
            Ok(TropicalTerm::new(b, row.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    TropicalPolynomial::new(n, terms)
}

/// Where a unit came from. Kept so a layer can be written back out with the
/// parameters it was read with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum UnitKind {
    Relu { w: Vec<f64>, b: f64 },
    Lrelu { w: Vec<f64>, b: f64, alpha: f64 },
    Maxout { weights: Vec<Vec<f64>>, biases: Vec<f64> },
    Raw,
}

impl UnitKind {
    pub fn name(&self) -> &'static str {
        match self {
            UnitKind::Relu { .. } => "relu",
            UnitKind::Lrelu { .. } => "lrelu",
            UnitKind::Maxout { .. } => "maxout",
            UnitKind::Raw => "raw",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Unit {
    pub kind: UnitKind,
    pub poly: TropicalPolynomial,
}

impl Unit {
    pub fn relu(w: &[f64], b: f64) -> Result<Self> {
        Ok(Unit { kind: UnitKind::Relu { w: w.to_vec(), b }, poly: make_relu(w, b)? })
    }

    pub fn leaky_relu(w: &[f64], b: f64, alpha: f64) -> Result<Self> {
        Ok(Unit {
            kind: UnitKind::Lrelu { w: w.to_vec(), b, alpha },
            poly: make_leaky_relu(w, b, alpha)?,
        })
    }

    pub fn maxout(weights: &[Vec<f64>], biases: &[f64]) -> Result<Self> {
        Ok(Unit {
            kind: UnitKind::Maxout { weights: weights.to_vec(), biases: biases.to_vec() },
            poly: make_maxout(weights, biases)?,
        })
    }

    pub fn raw(poly: TropicalPolynomial) -> Self {
        Unit { kind: UnitKind::Raw, poly }
    }
}

/// A single layer: `m` units over a shared input dimension `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerSpec {
    input_dim: usize,
    units: Vec<Unit>,
}

impl LayerSpec {
    pub fn new(input_dim: usize, units: Vec<Unit>) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::validation("layer input dimension must be positive"));
        }
        if units.is_empty() {
            return Err(Error::validation("layer needs at least one unit"));
        }
        for (i, u) in units.iter().enumerate() {
            if u.poly.input_dim() != input_dim {
                return Err(Error::validation(format!(
                    "unit {i} has input dimension {}, layer has {input_dim}",
                    u.poly.input_dim()
                )));
            }
        }
        Ok(LayerSpec { input_dim, units })
    }

    /// Convenience constructor for a ReLU layer `max(0, Wx + b)`.
    pub fn relu(weights: &[Vec<f64>], biases: &[f64]) -> Result<Self> {
        if weights.len() != biases.len() {
            return Err(Error::validation("weight rows and biases differ in length"));
        }
        let n = weights.first().map_or(0, Vec::len);
        let units = weights
            .iter()
            .zip(biases)
            .map(|(w, &b)| Unit::relu(w, b))
            .collect::<Result<Vec<_>>>()?;
        LayerSpec::new(n, units)
    }

    pub fn from_polynomials(input_dim: usize, polys: Vec<TropicalPolynomial>) -> Result<Self> {
        LayerSpec::new(input_dim, polys.into_iter().map(Unit::raw).collect())
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn num_units(&self) -> usize {
        self.units.len()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.units.iter().map(|u| u.poly.rank()).collect()
    }

    /// Product of unit ranks, saturating.
    pub fn configuration_count(&self) -> u128 {
        self.units
            .iter()
            .fold(1u128, |acc, u| acc.saturating_mul(u.poly.rank() as u128))
    }

    /// Per-unit argmax term at `x` (lowest index on ties).
    pub fn pattern(&self, x: &[f64], tol: f64) -> Result<LayerPattern> {
        Error::check_dim(self.input_dim, x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("input point has a non-finite entry"));
        }
        let mut indices = Vec::with_capacity(self.units.len());
        let mut tied = false;
        for u in &self.units {
            let (i, t) = u.poly.argmax(x, tol)?;
            indices.push(i);
            tied |= t;
        }
        Ok(LayerPattern { configuration: Configuration(indices), tied })
    }
}

/// `layer.pattern(x, tol)` as a free function.
pub fn layer_pattern(layer: &LayerSpec, x: &[f64], tol: f64) -> Result<LayerPattern> {
    layer.pattern(x, tol)
}

/// One selected term (or vertex) per unit: the combinatorial identity of a
/// candidate linear region.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration(pub Vec<usize>);

impl Configuration {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// Decodes `code` in the mixed radix given by `ranks` (first unit is the
    /// most significant digit).
    pub fn from_mixed_radix(mut code: u128, ranks: &[usize]) -> Self {
        let mut idx = vec![0; ranks.len()];
        for (slot, &r) in idx.iter_mut().zip(ranks).rev() {
            *slot = (code % r as u128) as usize;
            code /= r as u128;
        }
        Configuration(idx)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerPattern {
    pub configuration: Configuration,
    /// Some unit had a second term within tolerance of its maximum.
    pub tied: bool,
}
