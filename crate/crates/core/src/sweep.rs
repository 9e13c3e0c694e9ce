//! Parameter sweeps: one gallery template, one swept field, one CSV row per value.
//!
//! A plan looks like
//!
//! ```json
//! {
//!   "v": 1,
//!   "generator": {"kind": "lemma51", "n": 0},
//!   "parameter": "n",
//!   "values": [20, 40, 80],
//!   "extraction": {"mode": "frame", "eps": 0.25, "c": 0.1},
//!   "metrics": ["selected", "required", "finalRiesz"],
//!   "output": "sweep.csv",
//!   "seed": 7
//! }
//! ```
//!
//! The CSV header is `parameter,value,status` followed by the requested
//! metric names in plan order. `status` is `ok` or the error kind of a row
//! that failed; the metric cells of a failed row are empty. Rows are sorted
//! by swept value. When the template has no `seed` field but its generator
//! takes one, the plan seed is inserted.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::extraction::{
    extract_biorthogonal, extract_frame, theoretical_bound, ExtractionMode, ExtractionTrace,
};
use crate::frame::{frame_report, DEFAULT_TOLERANCE};
use crate::gallery::{generate, GallerySpec};
use crate::io::from_json;
use crate::metrics::{basis_metrics, BasisMetrics};
use crate::selection::DEFAULT_C;
use crate::system::VectorSystem;

/// Names accepted in `metrics`.
pub const METRIC_NAMES: &[&str] = &[
    "dim",
    "count",
    "lowerBound",
    "upperBound",
    "riesz",
    "hilbertian",
    "besselian",
    "schauder",
    "separation",
    "selected",
    "required",
    "rounds",
    "stopReason",
    "finalRiesz",
    "theoreticalBound",
];

const EXTRACTION_METRICS: &[&str] = &[
    "selected",
    "required",
    "rounds",
    "stopReason",
    "finalRiesz",
    "theoreticalBound",
];

fn default_c() -> f64 {
    DEFAULT_C
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepExtraction {
    pub mode: ExtractionMode,
    pub eps: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub v: u32,
    /// Gallery spec with the swept field present (its value is replaced).
    pub generator: Map<String, Value>,
    pub parameter: String,
    pub values: Vec<serde_json::Number>,
    #[serde(default)]
    pub extraction: Option<SweepExtraction>,
    pub metrics: Vec<String>,
    pub output: PathBuf,
    pub seed: u64,
}

impl SweepPlan {
    pub fn from_json(text: &str) -> Result<Self> {
        let plan: SweepPlan = from_json(text)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.v != crate::io::SCHEMA_VERSION {
            return Err(Error::schema(
                "field `v`",
                format!("unsupported schema version {}", self.v),
            ));
        }
        if !self.generator.contains_key(&self.parameter) {
            return Err(Error::schema(
                "field `parameter`",
                format!(
                    "`{}` is not a field of the generator template",
                    self.parameter
                ),
            ));
        }
        if self.parameter == "kind" {
            return Err(Error::schema(
                "field `parameter`",
                "cannot sweep the generator kind",
            ));
        }
        if self.values.is_empty() {
            return Err(Error::schema("field `values`", "value list is empty"));
        }
        for name in &self.metrics {
            if !METRIC_NAMES.contains(&name.as_str()) {
                return Err(Error::schema(
                    "field `metrics`",
                    format!("unknown metric `{name}`"),
                ));
            }
            if EXTRACTION_METRICS.contains(&name.as_str()) && self.extraction.is_none() {
                return Err(Error::schema(
                    "field `metrics`",
                    format!("metric `{name}` needs an `extraction` section"),
                ));
            }
        }
        // every instantiated template must parse
        for value in &self.values {
            self.spec_for(value)?;
        }
        Ok(())
    }

    fn spec_for(&self, value: &serde_json::Number) -> Result<GallerySpec> {
        let mut object = self.generator.clone();
        object.insert(self.parameter.clone(), Value::Number(value.clone()));
        let takes_seed = object.get("kind").and_then(Value::as_str) == Some("randomFrame");
        if takes_seed && !object.contains_key("seed") {
            object.insert("seed".into(), Value::from(self.seed));
        }
        serde_json::from_value(Value::Object(object)).map_err(|e| {
            Error::schema(
                format!("field `generator` with {} = {value}", self.parameter),
                e.to_string(),
            )
        })
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["parameter".to_string(), "value".into(), "status".into()];
        h.extend(self.metrics.iter().cloned());
        h
    }
}

struct RowData {
    system: VectorSystem,
    metrics: Option<BasisMetrics>,
    trace: Option<ExtractionTrace>,
    bound: Option<f64>,
}

fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        "inf".into()
    }
}

fn cell(name: &str, d: &RowData) -> String {
    let m = d.metrics.as_ref();
    let t = d.trace.as_ref();
    match name {
        "dim" => d.system.dim().to_string(),
        "count" => d.system.count().to_string(),
        "lowerBound" => fmt_f64(frame_report(&d.system, DEFAULT_TOLERANCE).lower_bound),
        "upperBound" => fmt_f64(frame_report(&d.system, DEFAULT_TOLERANCE).upper_bound),
        "riesz" => m.map(|m| fmt_f64(m.riesz.to_f64())).unwrap_or_default(),
        "hilbertian" => m.map(|m| fmt_f64(m.hilbertian)).unwrap_or_default(),
        "besselian" => m.map(|m| fmt_f64(m.besselian.to_f64())).unwrap_or_default(),
        "schauder" => m.map(|m| fmt_f64(m.schauder.to_f64())).unwrap_or_default(),
        "separation" => m.map(|m| fmt_f64(m.separation)).unwrap_or_default(),
        "selected" => t
            .map(|t| t.selected_count().to_string())
            .unwrap_or_default(),
        "required" => t
            .map(|t| t.parameters.required_size.to_string())
            .unwrap_or_default(),
        "rounds" => t.map(|t| t.rounds.len().to_string()).unwrap_or_default(),
        "stopReason" => t
            .and_then(|t| serde_json::to_value(t.stop_reason).ok())
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default(),
        "finalRiesz" => t
            .map(|t| fmt_f64(t.final_riesz_constant.to_f64()))
            .unwrap_or_default(),
        "theoreticalBound" => d.bound.map(fmt_f64).unwrap_or_default(),
        other => unreachable!("metric `{other}` passed validation"),
    }
}

fn needs_metrics(plan: &SweepPlan) -> bool {
    plan.metrics.iter().any(|m| {
        ["riesz", "hilbertian", "besselian", "schauder", "separation"].contains(&m.as_str())
    })
}

fn evaluate(plan: &SweepPlan, value: &serde_json::Number) -> Result<RowData> {
    let system = generate(&plan.spec_for(value)?)?;
    let metrics = needs_metrics(plan).then(|| basis_metrics(&system));
    let (trace, bound) = match &plan.extraction {
        None => (None, None),
        Some(x) => {
            let trace = match x.mode {
                ExtractionMode::Biorthogonal => extract_biorthogonal(&system, x.eps, x.c)?,
                ExtractionMode::Frame => extract_frame(&system, x.eps, x.c, x.delta)?,
            };
            let p = &trace.parameters;
            let bound = match (x.mode, p.separation, p.hilbertian) {
                (ExtractionMode::Biorthogonal, Some(d), Some(l)) => {
                    theoretical_bound(x.eps, d, l, x.c).ok()
                }
                _ => None,
            };
            (Some(trace), bound)
        }
    };
    Ok(RowData {
        system,
        metrics,
        trace,
        bound,
    })
}

/// Runs every row (concurrently) and renders the CSV text.
pub fn run_sweep(plan: &SweepPlan) -> Result<String> {
    plan.validate()?;
    let mut values = plan.values.clone();
    values.sort_by(|a, b| {
        let (x, y) = (
            a.as_f64().unwrap_or(f64::NAN),
            b.as_f64().unwrap_or(f64::NAN),
        );
        x.total_cmp(&y)
    });
    let rows: Vec<Vec<String>> = values
        .par_iter()
        .map(|value| {
            let mut row = vec![plan.parameter.clone(), value.to_string()];
            match evaluate(plan, value) {
                Ok(data) => {
                    row.push("ok".into());
                    row.extend(plan.metrics.iter().map(|m| cell(m, &data)));
                }
                Err(e) => {
                    row.push(e.kind().into());
                    row.extend(plan.metrics.iter().map(|_| String::new()));
                }
            }
            row
        })
        .collect();

    let mut writer = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Error::schema("csv", e.to_string());
    writer.write_record(plan.header()).map_err(io_err)?;
    for row in rows {
        writer.write_record(row).map_err(io_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::schema("csv", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV cells are UTF-8"))
}
