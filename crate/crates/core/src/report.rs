//! Flat output records and their JSON and CSV encodings.
//!
//! Floats are always written with 17 significant digits so that output is
//! byte-stable and re-parses to the same `f64`.

use std::io;

use serde::ser::Serialize;
use serde::Deserialize;

use crate::inversion::GridOutcome;
use crate::rh::{ReconstructionReport, SampleError};

/// One output row. The `record` field names the variant.
#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Eval {
        function: String,
        k: usize,
        z_re: f64,
        z_im: f64,
        value_re: f64,
        value_im: f64,
        est_error: f64,
    },
    Zeta {
        k: usize,
        value: f64,
    },
    Inversion {
        k: usize,
        z_re: f64,
        z_im: f64,
        lhs_re: f64,
        lhs_im: f64,
        residual_re: f64,
        residual_im: f64,
        residual_abs: f64,
        error: Option<String>,
    },
    InversionSummary {
        points: usize,
        failed: usize,
        max_residual: f64,
        threshold: f64,
        pass: bool,
    },
    Level {
        k: usize,
        mode: String,
        c_plus_re: f64,
        c_plus_im: f64,
        c_minus_re: f64,
        c_minus_im: f64,
        liouville_defect: f64,
        max_error_plus: f64,
        max_error_minus: f64,
        quadrature_error_estimate: f64,
        tail_estimate: f64,
        line_points: usize,
    },
    Sample {
        k: usize,
        side: String,
        z_re: f64,
        z_im: f64,
        value_re: f64,
        value_im: f64,
        reference_re: f64,
        reference_im: f64,
        error: f64,
    },
    ReconstructSummary {
        levels: usize,
        max_error: f64,
        threshold: f64,
        pass: bool,
        aborted: Option<String>,
    },
}

impl Record {
    pub fn kind(&self) -> &'static str {
        match self {
            Record::Eval { .. } => "eval",
            Record::Zeta { .. } => "zeta",
            Record::Inversion { .. } => "inversion",
            Record::InversionSummary { .. } => "inversion_summary",
            Record::Level { .. } => "level",
            Record::Sample { .. } => "sample",
            Record::ReconstructSummary { .. } => "reconstruct_summary",
        }
    }

    pub fn is_summary(&self) -> bool {
        matches!(
            self,
            Record::InversionSummary { .. } | Record::ReconstructSummary { .. }
        )
    }

    /// `(column, value)` pairs in declaration order.
    fn fields(&self) -> Vec<(String, String)> {
        split_flat_object(&record_json(self))
    }
}

impl From<&GridOutcome<f64>> for Record {
    fn from(o: &GridOutcome<f64>) -> Self {
        match &o.result {
            Ok(r) => Record::Inversion {
                k: o.k,
                z_re: o.z.re,
                z_im: o.z.im,
                lhs_re: r.lhs.re,
                lhs_im: r.lhs.im,
                residual_re: r.residual.re,
                residual_im: r.residual.im,
                residual_abs: r.residual.norm(),
                error: None,
            },
            Err(e) => Record::Inversion {
                k: o.k,
                z_re: o.z.re,
                z_im: o.z.im,
                lhs_re: 0.0,
                lhs_im: 0.0,
                residual_re: 0.0,
                residual_im: 0.0,
                residual_abs: 0.0,
                error: Some(e.to_string()),
            },
        }
    }
}

impl From<&ReconstructionReport<f64>> for Record {
    fn from(r: &ReconstructionReport<f64>) -> Self {
        Record::Level {
            k: r.k,
            mode: r.diagnostics.mode.name().to_string(),
            c_plus_re: r.c_plus.re,
            c_plus_im: r.c_plus.im,
            c_minus_re: r.c_minus.re,
            c_minus_im: r.c_minus.im,
            liouville_defect: r.liouville_defect,
            max_error_plus: r.max_error_plus(),
            max_error_minus: r.max_error_minus(),
            quadrature_error_estimate: r.diagnostics.quadrature_error_estimate,
            tail_estimate: r.diagnostics.tail_estimate,
            line_points: r.diagnostics.line_points,
        }
    }
}

/// Per-point records of one level, plus side first.
pub fn sample_records(r: &ReconstructionReport<f64>) -> Vec<Record> {
    let row = |side: &str, s: &SampleError<f64>| Record::Sample {
        k: r.k,
        side: side.to_string(),
        z_re: s.z.re,
        z_im: s.z.im,
        value_re: s.value.re,
        value_im: s.value.im,
        reference_re: s.reference.re,
        reference_im: s.reference.im,
        error: s.error,
    };
    r.sample_errors_plus
        .iter()
        .map(|s| row("plus", s))
        .chain(r.sample_errors_minus.iter().map(|s| row("minus", s)))
        .collect()
}

/// `serde_json` formatter writing every float as `{:.16e}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedFloats;

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", format_float(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn record_json(r: &Record) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats);
    r.serialize(&mut ser).expect("records serialize");
    String::from_utf8(buf).expect("utf8")
}

/// A JSON array with one flat object per line.
pub fn to_json(records: &[Record]) -> String {
    let mut out = String::from("[\n");
    for (i, r) in records.iter().enumerate() {
        out.push_str("  ");
        out.push_str(&record_json(r));
        if i + 1 < records.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]\n");
    out
}

pub fn from_json(text: &str) -> serde_json::Result<Vec<Record>> {
    serde_json::from_str(text)
}

/// Splits `{"a":1,"b":"x"}` as produced by [`record_json`] into raw pairs.
/// Values never contain nested objects.
fn split_flat_object(text: &str) -> Vec<(String, String)> {
    let v: serde_json::Map<String, serde_json::Value> = serde_json::from_str(text)
        .expect("flat object");
    let mut order = Vec::new();
    let mut rest = &text[1..text.len() - 1];
    while !rest.is_empty() {
        let key_end = rest[1..].find('"').expect("key") + 1;
        let key = rest[1..key_end].to_string();
        rest = &rest[key_end + 2..];
        let mut end = rest.len();
        let mut in_str = false;
        let mut escaped = false;
        for (i, ch) in rest.char_indices() {
            match ch {
                _ if escaped => escaped = false,
                '\\' if in_str => escaped = true,
                '"' => in_str = !in_str,
                ',' if !in_str => {
                    end = i;
                    break;
                }
                _ => {}
            }
        }
        let raw = &rest[..end];
        let cell = match &v[&key] {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Null => String::new(),
            _ => raw.to_string(),
        };
        order.push((key, cell));
        rest = if end < rest.len() { &rest[end + 1..] } else { "" };
    }
    order
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV with a header from the first data record; rows of other kinds than
/// the first are dropped, and summaries become trailing `#` lines.
pub fn to_csv(records: &[Record]) -> String {
    let mut out = String::new();
    let main_kind = records.iter().find(|r| !r.is_summary()).map(Record::kind);
    let mut header_done = false;
    for r in records.iter().filter(|r| Some(r.kind()) == main_kind) {
        let fields = r.fields();
        if !header_done {
            let names: Vec<String> = fields.iter().skip(1).map(|(k, _)| k.clone()).collect();
            out.push_str(&names.join(","));
            out.push('\n');
            header_done = true;
        }
        let cells: Vec<String> = fields.iter().skip(1).map(|(_, v)| csv_cell(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    for r in records.iter().filter(|r| r.is_summary()) {
        let pairs: Vec<String> = r
            .fields()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        out.push_str("# ");
        out.push_str(&pairs.join(" "));
        out.push('\n');
    }
    out
}
