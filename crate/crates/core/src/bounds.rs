//! Closed-form upper bounds on the number of linear regions of a single
//! layer, in exact big-integer arithmetic.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the `min` produced the bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `2^m` or `k^m`: every configuration realized.
    Exponential,
    /// The binomial-sum side.
    BinomialSum,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Exponential => "exponential",
            Branch::BinomialSum => "binomial_sum",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundParameters {
    pub n: Option<u64>,
    pub m: Option<u64>,
    pub k: Option<u64>,
    pub d: Option<u64>,
    pub p: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub bound: BigUint,
    pub branch: Branch,
    pub parameters: BoundParameters,
}

/// `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `Σ_{j=0}^{upto} C(n, j)`.
pub fn binomial_prefix_sum(n: u64, upto: u64) -> BigUint {
    (0..=upto.min(n)).map(|j| binomial(n, j)).sum()
}

fn pick(exponential: BigUint, binomial_side: BigUint) -> (BigUint, Branch) {
    if exponential <= binomial_side {
        (exponential, Branch::Exponential)
    } else {
        (binomial_side, Branch::BinomialSum)
    }
}

/// `min(2^m, Σ_{j=0}^{n} C(m, j))` for a ReLU or leaky-ReLU layer with `n`
/// inputs and `m` units.
pub fn relu_layer_bound(n: u64, m: u64) -> Result<BoundReport> {
    if n == 0 || m == 0 {
        return Err(Error::validation("n and m must be at least 1"));
    }
    let (bound, branch) = pick(BigUint::one() << m, binomial_prefix_sum(m, n));
    Ok(BoundReport {
        bound,
        branch,
        parameters: BoundParameters { n: Some(n), m: Some(m), ..Default::default() },
    })
}

/// `min(k^m, 2·Σ_{j=0}^{n} C(m·k(k-1)/2, j))` for `m` maxout units of rank `k`.
pub fn maxout_layer_bound(n: u64, m: u64, k: u64) -> Result<BoundReport> {
    if n == 0 || m == 0 {
        return Err(Error::validation("n and m must be at least 1"));
    }
    if k < 2 {
        return Err(Error::validation("maxout rank k must be at least 2"));
    }
    let edges = m
        .checked_mul(k * (k - 1) / 2)
        .ok_or_else(|| Error::validation("edge count overflows"))?;
    let exponential = num_traits::pow(BigUint::from(k), m as usize);
    let (bound, branch) = pick(exponential, binomial_prefix_sum(edges, n) * 2u32);
    Ok(BoundReport {
        bound,
        branch,
        parameters: BoundParameters { n: Some(n), m: Some(m), k: Some(k), ..Default::default() },
    })
}

/// Both bounds that apply to a rank-2 layer, labeled: the ReLU-specific one
/// and the coarser maxout one with `k = 2`.
pub fn rank_two_bounds(n: u64, m: u64) -> Result<[(&'static str, BoundReport); 2]> {
    Ok([("relu", relu_layer_bound(n, m)?), ("maxout_k2", maxout_layer_bound(n, m, 2)?)])
}

/// Single-channel, stride-1 convolution on a `d × d` image with a `k × k`
/// filter and padding `p`: the ReLU bound with `n = d²` and
/// `m = (d - k + 2p + 1)²`.
pub fn conv_layer_bound(d: u64, k: u64, p: u64) -> Result<BoundReport> {
    if d == 0 || k == 0 {
        return Err(Error::validation("image side and filter size must be at least 1"));
    }
    let padded = d + 2 * p;
    if k > padded {
        return Err(Error::validation(format!(
            "filter size {k} exceeds padded image side {padded}; output side would be nonpositive"
        )));
    }
    let side = padded - k + 1;
    let mut report = relu_layer_bound(d * d, side * side)?;
    report.parameters = BoundParameters {
        n: Some(d * d),
        m: Some(side * side),
        k: Some(k),
        d: Some(d),
        p: Some(p),
    };
    Ok(report)
}

/// Upper bound on the number of `i`-faces of a Minkowski sum whose edges
/// span `m` directions, in the given ambient dimension:
/// `2·C(m, i)·Σ_{j=0}^{ambient-1-i} C(m-1-i, j)`.
pub fn zonotope_face_bound(m: u64, ambient: u64, i: u64) -> Result<BigUint> {
    if m == 0 {
        return Err(Error::validation("need at least one generator"));
    }
    if ambient == 0 || i >= ambient {
        return Err(Error::validation(format!(
            "face dimension {i} out of range for ambient dimension {ambient}"
        )));
    }
    let upto = ambient - 1 - i;
    let inner: BigUint = match (m - 1).checked_sub(i) {
        Some(top) => binomial_prefix_sum(top, upto),
        // No generators left beyond the face: only the j = 0 term survives.
        None => BigUint::one(),
    };
    Ok(binomial(m, i) * inner * 2u32)
}
