//! Output records and their renderings.
//!
//! Every subcommand reports through the same tagged [`Record`] enum, so
//! the three formats stay mechanical: `json` prints one object per line,
//! `csv` groups records of the same kind under a shared header, and
//! `text` prints one readable line per record.

use edconst::bound::{BetaBracket, GSign};
use edconst::montecarlo::{ConfidenceInterval, SampleStats};
use edconst::ExactRational;
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    ExactAlpha {
        k: u64,
        n: usize,
        e: ExactRational,
        alpha: ExactRational,
    },
    Eccentricity {
        k: u64,
        x: String,
        ecc: ExactRational,
    },
    Class {
        k: u64,
        n: usize,
        representative: String,
        size: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        ecc: Option<ExactRational>,
    },
    Stats(SampleStats),
    Interval(ConfidenceInterval),
    Bracket {
        k: u64,
        eps: f64,
        budget: u32,
        precision_bits: u32,
        #[serde(flatten)]
        bracket: BetaBracket,
    },
    TraceStep {
        step: usize,
        lower: f64,
        upper: f64,
    },
    GBracket {
        k: u64,
        beta: f64,
        eps: f64,
        lo: f64,
        hi: f64,
    },
    Sign {
        k: u64,
        beta: f64,
        budget: u32,
        sign: GSign,
    },
    ClosedForm {
        k: u64,
        beta_hat: f64,
        m_lo: f64,
        m_hi: f64,
    },
    Ball {
        k: u64,
        n: u64,
        r: u64,
        u: String,
        css: String,
    },
    Floor {
        k: u64,
        n: u64,
        r_star: u64,
        value: f64,
    },
    Rate {
        n: usize,
        q: f64,
        half_q: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    Defect {
        k: u64,
        n: usize,
        #[serde(rename = "N")]
        nsamples: u64,
        seed: u64,
        alpha_tilde: f64,
        c_alpha: f64,
    },
    TableRow {
        table: String,
        k: u64,
        n: usize,
        #[serde(rename = "N")]
        nsamples: u64,
        metric: String,
        value: f64,
        provenance: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

type FlatRow = Vec<(String, String)>;

/// Flattens a JSON object into `(dotted.key, scalar)` pairs, depth first,
/// in field order.
fn flatten(prefix: &str, value: &serde_json::Value, out: &mut FlatRow) {
    match value {
        serde_json::Value::Object(map) => {
            for (key, inner) in map {
                let path = if prefix.is_empty() {
                    key.clone()
                } else {
                    format!("{prefix}.{key}")
                };
                flatten(&path, inner, out);
            }
        }
        serde_json::Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// A rational serialized by the core crate; rendered compactly in text.
fn rational_text(map: &serde_json::Map<String, serde_json::Value>) -> Option<String> {
    if map.len() != 3 {
        return None;
    }
    let num = map.get("num")?.as_str()?;
    let den = map.get("den")?.as_str()?;
    let double = map.get("double")?;
    Some(format!("{num}/{den} (~{double})"))
}

fn text_line(value: &serde_json::Value) -> String {
    let obj = value.as_object().expect("records serialize to objects");
    let tag = obj
        .get("record")
        .and_then(|v| v.as_str())
        .unwrap_or("record")
        .to_string();
    let mut parts = vec![tag];
    for (key, inner) in obj {
        if key == "record" {
            continue;
        }
        match inner {
            serde_json::Value::Object(map) => {
                if let Some(r) = rational_text(map) {
                    parts.push(format!("{key}={r}"));
                } else {
                    let mut flat = Vec::new();
                    flatten(key, inner, &mut flat);
                    parts.extend(flat.into_iter().map(|(k, v)| format!("{k}={v}")));
                }
            }
            serde_json::Value::String(s) => parts.push(format!("{key}={s}")),
            other => parts.push(format!("{key}={other}")),
        }
    }
    parts.join(" ")
}

/// Collects records during a run and writes them all at the end, which
/// lets the CSV renderer group rows by kind.
pub struct Sink {
    records: Vec<Record>,
}

impl Sink {
    pub fn new() -> Sink {
        Sink { records: Vec::new() }
    }

    pub fn emit(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        let values: Vec<serde_json::Value> = self
            .records
            .iter()
            .map(|r| serde_json::to_value(r).expect("record serialization"))
            .collect();
        match format {
            Format::Json => {
                for v in &values {
                    writeln!(out, "{v}")?;
                }
            }
            Format::Text => {
                for v in &values {
                    writeln!(out, "{}", text_line(v))?;
                }
            }
            Format::Csv => {
                let mut groups: Vec<(String, Vec<FlatRow>)> = Vec::new();
                for v in &values {
                    let mut flat = Vec::new();
                    flatten("", v, &mut flat);
                    let tag = flat
                        .iter()
                        .find(|(k, _)| k == "record")
                        .map(|(_, v)| v.clone())
                        .unwrap_or_default();
                    match groups.iter_mut().find(|(t, _)| *t == tag) {
                        Some((_, rows)) => rows.push(flat),
                        None => groups.push((tag, vec![flat])),
                    }
                }
                for (i, (_, rows)) in groups.iter().enumerate() {
                    if i > 0 {
                        writeln!(out)?;
                    }
                    let mut header: Vec<String> = Vec::new();
                    for row in rows {
                        for (k, _) in row {
                            if !header.contains(k) {
                                header.push(k.clone());
                            }
                        }
                    }
                    writeln!(out, "{}", header.join(","))?;
                    for row in rows {
                        let line: Vec<String> = header
                            .iter()
                            .map(|h| {
                                row.iter()
                                    .find(|(k, _)| k == h)
                                    .map(|(_, v)| csv_escape(v))
                                    .unwrap_or_default()
                            })
                            .collect();
                        writeln!(out, "{}", line.join(","))?;
                    }
                }
            }
        }
        Ok(())
    }
}
