use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use laminath::{Error, Result};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    fn from_name(s: &str) -> Option<Format> {
        Format::from_str(s, true).ok()
    }
}

/// Where and how a report is written.
#[derive(Clone, Debug)]
pub struct Sink {
    pub format: Format,
    pub path: Option<PathBuf>,
}

impl Sink {
    /// `--emit` takes a format name or a file whose extension names the
    /// format; `--out` takes a file, or a bare format name meaning stdout.
    pub fn resolve(emit: Option<&str>, out: Option<&str>) -> Result<Sink> {
        let mut format = None;
        let mut path = None;
        if let Some(e) = emit {
            match Format::from_name(e) {
                Some(f) => format = Some(f),
                None => {
                    let ext = e.rsplit_once('.').map(|(_, x)| x).unwrap_or("");
                    format = Some(Format::from_name(ext).ok_or_else(|| {
                        Error::InvalidArgument(format!("--emit expects text, json, csv or a .json/.csv/.txt file, got {e:?}"))
                    })?);
                    path = Some(PathBuf::from(e));
                }
            }
        }
        if let Some(o) = out {
            match Format::from_name(o) {
                Some(f) if format.is_none() || format == Some(f) => format = Some(f),
                Some(f) => {
                    return Err(Error::InvalidArgument(format!(
                        "--out {f:?} conflicts with --emit {:?}",
                        format.unwrap()
                    )))
                }
                None => {
                    if path.is_some() {
                        return Err(Error::InvalidArgument("output file given twice".into()));
                    }
                    if format.is_none() {
                        let ext = o.rsplit_once('.').map(|(_, x)| x).unwrap_or("");
                        format = Format::from_name(ext).or(Some(Format::Text));
                    }
                    path = Some(PathBuf::from(o));
                }
            }
        }
        Ok(Sink {
            format: format.unwrap_or(Format::Text),
            path,
        })
    }

    pub fn write(&self, report: &Report) -> Result<()> {
        let body = match self.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&report.json).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => report.text.clone(),
            Format::Csv => report.csv.clone().ok_or_else(|| {
                Error::InvalidArgument("csv output is only available for growth tables and measure ledgers".into())
            })?,
        };
        match &self.path {
            Some(p) => fs::write(p, body).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(body.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| Error::InvalidArgument(format!("stdout: {e}")))
            }
        }
    }
}

/// One command's result in every supported shape.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub csv: Option<String>,
}

impl Report {
    pub fn new(json: Value, text: String) -> Self {
        Report { json, text, csv: None }
    }

    pub fn with_csv(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).expect("in-memory csv");
        for r in rows {
            w.write_record(&r).expect("in-memory csv");
        }
        self.csv = Some(String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8"));
        self
    }
}

/// `key: value` lines.
pub fn lines(pairs: &[(&str, String)]) -> String {
    let mut s = String::new();
    for (k, v) in pairs {
        s.push_str(k);
        s.push_str(": ");
        s.push_str(v);
        s.push('\n');
    }
    s
}

pub fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("document serializes")
}
