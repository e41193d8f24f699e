//! Prediction CSV: `id,created_at,label_id,label_name,confidence`.
//! Ambiguous rows carry `-1,ambiguous`; `created_at` is empty for inputs
//! without timestamps (labeled corpus rows).

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::Prediction;
use crate::error::{Error, Result};
use crate::label::PredictedLabel;
use crate::time::Timestamp;

pub const PREDICTION_HEADER: [&str; 5] = ["id", "created_at", "label_id", "label_name", "confidence"];

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub id: String,
    pub created_at: Option<Timestamp>,
    pub prediction: Prediction,
}

pub fn write_predictions<W: Write>(records: &[PredictionRecord], writer: W) -> Result<()> {
    let io = |e: csv::Error| Error::io("<predictions>", std::io::Error::other(e));
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(PREDICTION_HEADER).map_err(io)?;
    for r in records {
        wtr.write_record([
            r.id.clone(),
            r.created_at.map(|t| t.to_string()).unwrap_or_default(),
            r.prediction.label.code().to_string(),
            r.prediction.label.key().to_string(),
            format!("{:.6}", r.prediction.confidence),
        ])
        .map_err(io)?;
    }
    wtr.flush().map_err(|e| Error::io("<predictions>", e))
}

pub fn read_predictions_file(path: &Path) -> Result<Vec<PredictionRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_predictions(file, path)
}

pub fn read_predictions<R: Read>(reader: R, origin: &Path) -> Result<Vec<PredictionRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::format(origin, e.to_string()))?;
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    if headers.iter().ne(PREDICTION_HEADER) {
        return Err(Error::format(origin, format!("expected header {}", PREDICTION_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::format(origin, e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let bad = |m: String| Error::format(origin, format!("line {line}: {m}"));
        let created_at = match record[1].trim() {
            "" => None,
            s => Some(Timestamp::parse_iso(s).map_err(|e| bad(e.to_string()))?),
        };
        let code: i64 = record[2].trim().parse().map_err(|_| bad(format!("bad label_id {:?}", &record[2])))?;
        let label = PredictedLabel::from_code(code).map_err(|e| bad(e.to_string()))?;
        if !label.key().eq_ignore_ascii_case(record[3].trim()) {
            return Err(bad(format!("label_name {:?} does not match label_id {code}", &record[3])));
        }
        let confidence: f64 = record[4]
            .trim()
            .parse()
            .ok()
            .filter(|c: &f64| (0.0..=1.0).contains(c))
            .ok_or_else(|| bad(format!("bad confidence {:?}", &record[4])))?;
        out.push(PredictionRecord {
            id: record[0].to_string(),
            created_at,
            prediction: Prediction { label, confidence },
        });
    }
    Ok(out)
}
