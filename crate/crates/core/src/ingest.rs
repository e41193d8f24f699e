//! Loading tweet-like corpora from CSV or JSONL files.
//!
//! Only the `id`, `created_at`, `text` and `lang` fields are read; every
//! other column (author handles, follower counts, geo, ...) is dropped at
//! load time, so no author-identifying data ever reaches a [`RawPost`].

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, RecordError, Result};
use crate::time::{TimeWindow, Timestamp};

/// A social-media message as collected, before normalization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPost {
    pub id: String,
    pub created_at: Timestamp,
    pub text: String,
    pub lang: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for InputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(InputFormat::Csv),
            "jsonl" | "ndjson" => Ok(InputFormat::Jsonl),
            other => Err(Error::Validation(format!("unknown input format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// strftime-style pattern for `created_at`; ISO-8601 when unset.
    pub time_format: Option<String>,
}

/// Posts read from a file together with the records that were skipped.
#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    pub posts: Vec<RawPost>,
    pub errors: Vec<RecordError>,
}

/// Share of malformed records above which a load is aborted.
pub const MAX_MALFORMED_FRACTION: f64 = 0.10;

pub fn load_posts(path: &Path, format: InputFormat, options: &LoadOptions) -> Result<LoadReport> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_posts(BufReader::new(file), format, options, path)
}

/// Reads posts from any reader; `origin` is only used in error messages.
pub fn read_posts<R: Read>(
    reader: R,
    format: InputFormat,
    options: &LoadOptions,
    origin: &Path,
) -> Result<LoadReport> {
    let report = match format {
        InputFormat::Csv => read_csv(reader, options, origin)?,
        InputFormat::Jsonl => read_jsonl(reader, options, origin)?,
    };
    let total = report.posts.len() + report.errors.len();
    if !report.errors.is_empty() && report.errors.len() as f64 > MAX_MALFORMED_FRACTION * total as f64 {
        return Err(Error::TooManyMalformed {
            path: origin.to_path_buf(),
            malformed: report.errors.len(),
            total,
            first: report.errors[0].clone(),
        });
    }
    Ok(report)
}

const COLUMNS: [&str; 4] = ["id", "created_at", "text", "lang"];

fn read_csv<R: Read>(reader: R, options: &LoadOptions, origin: &Path) -> Result<LoadReport> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::format(origin, e.to_string()))?
        .clone();
    let mut report = LoadReport::default();
    if headers.is_empty() {
        return Ok(report);
    }
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::format(origin, format!("missing column {name:?} in header")))?;
    }

    for record in rdr.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                report.errors.push(RecordError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(idx[i]);
        let parsed = match (field(0), field(1), field(2), field(3)) {
            (Some(id), Some(ts), Some(text), Some(lang)) => build_post(id, ts, text, lang, options),
            _ => Err(format!("expected at least {} fields, found {}", idx.iter().max().unwrap() + 1, record.len())),
        };
        match parsed {
            Ok(post) => report.posts.push(post),
            Err(message) => report.errors.push(RecordError { line, message }),
        }
    }
    Ok(report)
}

fn read_jsonl<R: Read>(reader: R, options: &LoadOptions, origin: &Path) -> Result<LoadReport> {
    let mut report = LoadReport::default();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_json_record(&line, options) {
            Ok(post) => report.posts.push(post),
            Err(message) => report.errors.push(RecordError {
                line: line_no,
                message,
            }),
        }
    }
    Ok(report)
}

fn parse_json_record(line: &str, options: &LoadOptions) -> std::result::Result<RawPost, String> {
    let value: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let obj = value.as_object().ok_or("record is not a JSON object")?;
    let string_field = |name: &str| -> std::result::Result<String, String> {
        match obj.get(name) {
            Some(serde_json::Value::String(s)) => Ok(s.clone()),
            Some(serde_json::Value::Number(n)) if name == "id" => Ok(n.to_string()),
            Some(_) => Err(format!("field {name:?} has the wrong type")),
            None => Err(format!("missing field {name:?}")),
        }
    };
    build_post(
        &string_field("id")?,
        &string_field("created_at")?,
        &string_field("text")?,
        &string_field("lang")?,
        options,
    )
}

fn build_post(
    id: &str,
    created_at: &str,
    text: &str,
    lang: &str,
    options: &LoadOptions,
) -> std::result::Result<RawPost, String> {
    let id = id.trim();
    if id.is_empty() {
        return Err("empty id".to_string());
    }
    let created_at = match &options.time_format {
        Some(fmt) => Timestamp::parse_with_format(created_at, fmt),
        None => Timestamp::parse_iso(created_at),
    }
    .map_err(|e| e.to_string())?;
    Ok(RawPost {
        id: id.to_string(),
        created_at,
        text: text.to_string(),
        lang: lang.trim().to_lowercase(),
    })
}

/// Keeps posts whose timestamp lies inside the inclusive window.
pub fn filter_window(posts: Vec<RawPost>, window: &TimeWindow) -> Vec<RawPost> {
    posts.into_iter().filter(|p| window.contains(p.created_at)).collect()
}

/// Keeps posts whose language tag equals `tag`, ignoring case.
pub fn filter_language(posts: Vec<RawPost>, tag: &str) -> Result<Vec<RawPost>> {
    let tag = tag.trim();
    if tag.is_empty() {
        return Err(Error::Validation("language tag must not be empty".into()));
    }
    let tag = tag.to_lowercase();
    Ok(posts
        .into_iter()
        .filter(|p| p.lang.to_lowercase() == tag)
        .collect())
}

/// Writes one JSON object per line.
pub fn write_jsonl<T: Serialize, W: Write>(items: &[T], mut writer: W) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut writer, item)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}
