//! JSON layer files (schema version 1).
//!
//! ```json
//! {"schema_version": 1, "inputs": 2, "units": [
//!   {"kind": "relu", "w": [1, 0], "b": 0},
//!   {"kind": "lrelu", "w": [0, 1], "b": 0, "alpha": 0.1},
//!   {"kind": "maxout", "W": [[1, 0], [0, 1], [0, 0]], "b": [0, 0, 0]},
//!   {"kind": "raw", "terms": [{"b": 0, "c": [1, 1]}]}
//! ]}
//! ```

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rng::substream;
use crate::tropical::{LayerSpec, TropicalPolynomial, TropicalTerm, Unit, UnitKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawTerm {
    pub b: f64,
    pub c: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum UnitRecord {
    Relu {
        w: Vec<f64>,
        b: f64,
    },
    Lrelu {
        w: Vec<f64>,
        b: f64,
        alpha: f64,
    },
    Maxout {
        #[serde(rename = "W")]
        weights: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    Raw {
        terms: Vec<RawTerm>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerFile {
    pub schema_version: u32,
    pub inputs: usize,
    pub units: Vec<UnitRecord>,
}

fn unit_error(index: usize, e: impl std::fmt::Display) -> Error {
    Error::validation(format!("unit {index}: {e}"))
}

impl LayerFile {
    /// Parses JSON text. Syntax errors report line and column; unit errors
    /// report the unit index.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| {
            Error::validation(format!("malformed JSON at line {} column {}: {e}", e.line(), e.column()))
        })?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::validation("layer file must be a JSON object"))?;
        let schema_version = obj
            .get("schema_version")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::validation("field `schema_version` missing or not an integer"))?;
        if schema_version != SCHEMA_VERSION as u64 {
            return Err(Error::validation(format!("unsupported schema_version {schema_version}")));
        }
        let inputs = obj
            .get("inputs")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::validation("field `inputs` missing or not a nonnegative integer"))?
            as usize;
        let units_value = obj
            .get("units")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::validation("field `units` missing or not an array"))?;
        let units = units_value
            .iter()
            .enumerate()
            .map(|(i, u)| {
                if let Some(kind) = u.get("kind").and_then(Value::as_str) {
                    if !matches!(kind, "relu" | "lrelu" | "maxout" | "raw") {
                        return Err(unit_error(i, format!("unknown kind `{kind}`")));
                    }
                }
                UnitRecord::deserialize(u).map_err(|e| unit_error(i, e))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LayerFile { schema_version: SCHEMA_VERSION, inputs, units })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("layer files always serialize");
        s.push('\n');
        s
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json())
            .map_err(|e| Error::validation(format!("cannot write {}: {e}", path.display())))
    }

    /// Validates dimensions and parameters and builds the layer.
    pub fn to_layer(&self) -> Result<LayerSpec> {
        let n = self.inputs;
        if n == 0 {
            return Err(Error::validation("`inputs` must be positive"));
        }
        let units = self
            .units
            .iter()
            .enumerate()
            .map(|(i, rec)| {
                let check = |len: usize, what: &str| {
                    if len == n {
                        Ok(())
                    } else {
                        Err(unit_error(i, format!("{what} has {len} entries, expected inputs = {n}")))
                    }
                };
                match rec {
                    UnitRecord::Relu { w, b } => {
                        check(w.len(), "field `w`")?;
                        Unit::relu(w, *b).map_err(|e| unit_error(i, e))
                    }
                    UnitRecord::Lrelu { w, b, alpha } => {
                        check(w.len(), "field `w`")?;
                        Unit::leaky_relu(w, *b, *alpha).map_err(|e| unit_error(i, e))
                    }
                    UnitRecord::Maxout { weights, b } => {
                        for (j, row) in weights.iter().enumerate() {
                            check(row.len(), &format!("row {j} of field `W`"))?;
                        }
                        Unit::maxout(weights, b).map_err(|e| unit_error(i, e))
                    }
                    UnitRecord::Raw { terms } => {
                        for (j, t) in terms.iter().enumerate() {
                            check(t.c.len(), &format!("field `c` of term {j}"))?;
                        }
                        let terms = terms.iter().map(|t| TropicalTerm::new(t.b, t.c.clone())).collect();
                        TropicalPolynomial::new(n, terms).map(Unit::raw).map_err(|e| unit_error(i, e))
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        LayerSpec::new(n, units)
    }

    pub fn from_layer(layer: &LayerSpec) -> Self {
        let units = layer
            .units()
            .iter()
            .map(|u| match &u.kind {
                UnitKind::Relu { w, b } => UnitRecord::Relu { w: w.clone(), b: *b },
                UnitKind::Lrelu { w, b, alpha } => UnitRecord::Lrelu { w: w.clone(), b: *b, alpha: *alpha },
                UnitKind::Maxout { weights, biases } => {
                    UnitRecord::Maxout { weights: weights.clone(), b: biases.clone() }
                }
                UnitKind::Raw => UnitRecord::Raw {
                    terms: u.poly.terms().iter().map(|t| RawTerm { b: t.bias, c: t.coeffs.clone() }).collect(),
                },
            })
            .collect();
        LayerFile { schema_version: SCHEMA_VERSION, inputs: layer.input_dim(), units }
    }
}

/// Reads and validates a layer file.
pub fn parse_layer(path: impl AsRef<Path>) -> Result<LayerSpec> {
    LayerFile::read(path)?.to_layer()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GenKind {
    Relu,
    Lrelu { alpha: f64 },
    Maxout { k: usize },
}

/// A random layer with standard normal weights and biases. Unit `i` draws
/// from substream `i` of `seed`.
pub fn generate_layer(kind: GenKind, n: usize, m: usize, seed: u64) -> Result<LayerFile> {
    if n == 0 || m == 0 {
        return Err(Error::validation("n and m must be at least 1"));
    }
    match kind {
        GenKind::Maxout { k } if k < 2 => {
            return Err(Error::validation(format!("maxout rank must be at least 2, got {k}")))
        }
        GenKind::Lrelu { alpha } if !(alpha > 0.0 && alpha < 1.0) => {
            return Err(Error::validation(format!("leaky ReLU slope {alpha} must lie in (0, 1)")))
        }
        _ => {}
    }
    let units = (0..m as u64)
        .map(|i| {
            let mut rng = substream(seed, i);
            let mut normals = |len: usize| -> Vec<f64> { (0..len).map(|_| rng.sample(StandardNormal)).collect() };
            match kind {
                GenKind::Relu => {
                    let w = normals(n);
                    UnitRecord::Relu { w, b: normals(1)[0] }
                }
                GenKind::Lrelu { alpha } => {
                    let w = normals(n);
                    UnitRecord::Lrelu { w, b: normals(1)[0], alpha }
                }
                GenKind::Maxout { k } => {
                    let weights = (0..k).map(|_| normals(n)).collect();
                    UnitRecord::Maxout { weights, b: normals(k) }
                }
            }
        })
        .collect();
    Ok(LayerFile { schema_version: SCHEMA_VERSION, inputs: n, units })
}
