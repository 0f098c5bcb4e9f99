//! Piecewise-linear layers as tropical polynomials.
//!
//! A layer of ReLU, leaky-ReLU or maxout units is a list of max-plus
//! polynomials. Its linear regions correspond to the region-defining
//! vertices of the Minkowski sum of the units' Newton polytopes. This crate
//! provides
//!
//! * max-plus arithmetic and unit constructors ([`tropical`]),
//! * V-polytopes, Minkowski sums and LP-based vertex/region tests ([`geometry`], [`lp`]),
//! * closed-form region-count bounds ([`bounds`]),
//! * exact counting with independent cross-checks ([`oracle`]),
//! * randomized vertex sampling and sample-size calculators ([`sampler`]),
//! * the JSON layer file format ([`layer_file`]).

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod layer_file;
pub mod lp;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod tropical;

pub use error::{Error, Result};
pub use geometry::{FeasibilityResult, Polytope, DEFAULT_ENUMERATION_CAP};
pub use tropical::{Configuration, LayerSpec, TropicalPolynomial, TropicalTerm, Unit, UnitKind, DEFAULT_TOL};
