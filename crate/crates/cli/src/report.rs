//! Run reports and their human, JSON and CSV renderings.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use tropical_regions::bounds::BoundReport;

/// Column order of the CSV rendering, one row per entry.
pub const CSV_HEADER: [&str; 9] = ["method", "count", "bound", "branch", "seed", "degenerate", "K", "delta", "elapsed_ms"];

/// One counting or bounding result, tagged with the method that produced it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub method: String,
    pub count: Option<u64>,
    /// Decimal string; closed-form bounds can exceed 64 bits.
    pub bound: Option<String>,
    pub branch: Option<String>,
    pub seed: Option<u64>,
    pub degenerate: Option<u64>,
    #[serde(rename = "K")]
    pub k: Option<u64>,
    pub delta: Option<f64>,
    pub elapsed_ms: f64,
}

impl Entry {
    pub fn new(method: impl Into<String>) -> Self {
        Entry { method: method.into(), ..Default::default() }
    }

    pub fn with_bound(mut self, report: &BoundReport) -> Self {
        self.bound = Some(report.bound.to_string());
        self.branch = Some(report.branch.as_str().to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexAngle {
    pub point: Vec<f64>,
    /// Whether the vertex defines a linear region.
    pub upper: bool,
    /// Term index per unit, for region-defining vertices.
    pub configuration: Option<Vec<usize>>,
    pub full: f64,
    pub full_stderr: f64,
    pub truncated: f64,
    pub truncated_stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleReport {
    pub samples: u64,
    pub full_total: f64,
    pub full_total_stderr: f64,
    pub vertices: Vec<VertexAngle>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Arguments after the program name.
    pub command: Vec<String>,
    pub seed: u64,
    pub tol: f64,
    pub entries: Vec<Entry>,
    pub angles: Option<AngleReport>,
}

impl RunReport {
    /// The report with every wall-clock field zeroed.
    pub fn without_timing(&self) -> RunReport {
        let mut r = self.clone();
        r.entries.iter_mut().for_each(|e| e.elapsed_ms = 0.0);
        r
    }

    pub fn write_json(&self, out: &mut dyn Write) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(CSV_HEADER)?;
        for e in &self.entries {
            w.serialize(e)?;
        }
        w.flush()
    }

    pub fn write_human(&self, out: &mut dyn Write) -> io::Result<()> {
        for e in &self.entries {
            let mut parts = Vec::new();
            if let Some(c) = e.count {
                parts.push(format!("count {c}"));
            }
            if let Some(b) = &e.bound {
                match &e.branch {
                    Some(br) => parts.push(format!("bound {b} ({br})")),
                    None => parts.push(format!("bound {b}")),
                }
            }
            if let Some(d) = e.degenerate {
                parts.push(format!("degenerate {d}"));
            }
            if let Some(k) = e.k {
                parts.push(format!("K {k}"));
            }
            if let Some(d) = e.delta {
                parts.push(format!("delta {d}"));
            }
            if let Some(s) = e.seed {
                parts.push(format!("seed {s}"));
            }
            writeln!(out, "{}: {} [{:.1} ms]", e.method, parts.join(", "), e.elapsed_ms)?;
        }
        if let Some(a) = &self.angles {
            writeln!(
                out,
                "solid angles from {} samples (full-cone total {:.4} ± {:.4}):",
                a.samples, a.full_total, a.full_total_stderr
            )?;
            for v in &a.vertices {
                let point: Vec<String> = v.point.iter().map(|x| format!("{x:.4}")).collect();
                let tag = match &v.configuration {
                    Some(c) => format!(" region {c:?}"),
                    None => String::new(),
                };
                writeln!(
                    out,
                    "  [{}] full {:.5} ± {:.5}, truncated {:.5} ± {:.5}{tag}",
                    point.join(", "),
                    v.full,
                    v.full_stderr,
                    v.truncated,
                    v.truncated_stderr
                )?;
            }
        }
        Ok(())
    }
}
