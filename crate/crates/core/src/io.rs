//! JSON file formats.
//!
//! Every document carries a schema version `"v": 1`. Floating-point numbers
//! are written with 17 significant digits so that reading a file back
//! reproduces every value bit for bit.
//!
//! A vector system is stored as
//!
//! ```json
//! {"v":1,"dim":2,"count":3,"columns":[[1.0,0.0],[0.0,0.0], ...],"labels":null}
//! ```
//!
//! with `columns` holding `dim * count` `[re, im]` pairs in column-major order.

use std::io;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::extraction::ExtractionTrace;
use crate::frame::FrameReport;
use crate::linalg::{c64, CMatrix};
use crate::metrics::BasisMetrics;
use crate::system::VectorSystem;

pub const SCHEMA_VERSION: u32 = 1;

/// Compact JSON with `{:.16e}` floats.
#[derive(Debug, Clone, Copy, Default)]
struct Precise;

impl Formatter for Precise {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value == 0.0 {
            // keeps the sign of -0.0
            return write!(
                writer,
                "{}",
                if value.is_sign_negative() {
                    "-0.0"
                } else {
                    "0.0"
                }
            );
        }
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as one line of JSON (no trailing newline).
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Precise);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::schema("serialize", e.to_string()))?;
    // the formatter only emits ASCII
    Ok(String::from_utf8(out).expect("JSON output is UTF-8"))
}

/// Parses `text`, reporting the position of syntax and type errors.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::schema(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    v: u32,
    #[serde(flatten)]
    body: &'a T,
}

#[derive(Deserialize)]
struct VersionedOwned<T> {
    v: u32,
    #[serde(flatten)]
    body: T,
}

fn check_version(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::schema(
            "field `v`",
            format!("unsupported schema version {v}, expected {SCHEMA_VERSION}"),
        ));
    }
    Ok(())
}

fn write_versioned<T: Serialize>(body: &T) -> Result<String> {
    to_json(&Versioned {
        v: SCHEMA_VERSION,
        body,
    })
}

fn read_versioned<T: DeserializeOwned>(text: &str) -> Result<T> {
    let doc: VersionedOwned<T> = from_json(text)?;
    check_version(doc.v)?;
    Ok(doc.body)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    v: u32,
    dim: usize,
    count: usize,
    columns: Vec<[f64; 2]>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

pub fn system_to_json(system: &VectorSystem) -> Result<String> {
    let m = system.matrix();
    let file = SystemFile {
        v: SCHEMA_VERSION,
        dim: system.dim(),
        count: system.count(),
        columns: m.iter().map(|z| [z.re, z.im]).collect(),
        labels: system.labels().map(<[String]>::to_vec),
    };
    to_json(&file)
}

pub fn system_from_json(text: &str) -> Result<VectorSystem> {
    let file: SystemFile = from_json(text)?;
    check_version(file.v)?;
    if file.dim == 0 {
        return Err(Error::schema("field `dim`", "must be at least 1"));
    }
    if file.count == 0 {
        return Err(Error::schema("field `count`", "must be at least 1"));
    }
    let expected = file
        .dim
        .checked_mul(file.count)
        .ok_or_else(|| Error::schema("field `count`", "dim * count overflows"))?;
    if file.columns.len() != expected {
        return Err(Error::schema(
            "field `columns`",
            format!(
                "expected {expected} [re, im] pairs, found {}",
                file.columns.len()
            ),
        ));
    }
    if let Some(pos) = file
        .columns
        .iter()
        .position(|p| !p[0].is_finite() || !p[1].is_finite())
    {
        return Err(Error::schema(
            format!("field `columns[{pos}]`"),
            "entry is not finite",
        ));
    }
    if let Some(labels) = &file.labels {
        if labels.len() != file.count {
            return Err(Error::schema(
                "field `labels`",
                format!("expected {} labels, found {}", file.count, labels.len()),
            ));
        }
    }
    let matrix = CMatrix::from_iterator(
        file.dim,
        file.count,
        file.columns.iter().map(|p| c64(p[0], p[1])),
    );
    VectorSystem::with_labels(matrix, file.labels).map_err(|e| match e {
        Error::InvalidSystem(msg) => Error::schema("field `labels`", msg),
        other => other,
    })
}

pub fn trace_to_json(trace: &ExtractionTrace) -> Result<String> {
    write_versioned(trace)
}

pub fn trace_from_json(text: &str) -> Result<ExtractionTrace> {
    read_versioned(text)
}

pub fn metrics_to_json(metrics: &BasisMetrics) -> Result<String> {
    write_versioned(metrics)
}

pub fn metrics_from_json(text: &str) -> Result<BasisMetrics> {
    read_versioned(text)
}

/// Output of `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Analysis {
    pub frame: FrameReport,
    pub metrics: BasisMetrics,
}

pub fn analysis_to_json(analysis: &Analysis) -> Result<String> {
    write_versioned(analysis)
}

pub fn analysis_from_json(text: &str) -> Result<Analysis> {
    read_versioned(text)
}

/// Reads a file, mapping I/O failures to schema errors naming the path.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::schema(format!("file {}", path.display()), e.to_string()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut body = text.to_owned();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    std::fs::write(path, body)
        .map_err(|e| Error::schema(format!("file {}", path.display()), e.to_string()))
}

pub fn read_system(path: &Path) -> Result<VectorSystem> {
    system_from_json(&read_text(path)?)
}

pub fn write_system(path: &Path, system: &VectorSystem) -> Result<()> {
    write_text(path, &system_to_json(system)?)
}
