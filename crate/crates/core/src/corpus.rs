//! Labeled-corpus preparation: validated-label filtering, class balancing by
//! seeded downsampling, and stratified train/test splitting.

use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, RecordError, Result};
use crate::label::{EmotionLabel, NUM_EMOTIONS};
use crate::normalize::{collapse_whitespace, turkish_lowercase};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub entry_id: String,
    pub text: String,
    pub emotion: EmotionLabel,
    pub validated_emotion: Option<EmotionLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitCorpus {
    pub train: Vec<LabeledExample>,
    pub test: Vec<LabeledExample>,
}

/// Canonical corpus columns.
pub const CORPUS_HEADER: [&str; 4] = ["ID", "Entry", "Emotion", "ValidatedEmotion"];

/// Maps canonical column names to the headers used by a particular file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub id: String,
    pub entry: String,
    pub emotion: String,
    pub validated: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            id: CORPUS_HEADER[0].into(),
            entry: CORPUS_HEADER[1].into(),
            emotion: CORPUS_HEADER[2].into(),
            validated: CORPUS_HEADER[3].into(),
        }
    }
}

impl FromStr for ColumnMap {
    type Err = Error;

    /// `ID=tweet_id,Entry=sentence`; unmentioned columns keep their names.
    fn from_str(s: &str) -> Result<Self> {
        let mut map = ColumnMap::default();
        for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::Validation(format!("column mapping {pair:?} is not KEY=HEADER")))?;
            let slot = match key.trim() {
                "ID" => &mut map.id,
                "Entry" => &mut map.entry,
                "Emotion" => &mut map.emotion,
                "ValidatedEmotion" => &mut map.validated,
                other => return Err(Error::Validation(format!("unknown corpus column {other:?}"))),
            };
            *slot = value.trim().to_string();
        }
        Ok(map)
    }
}

/// Examples read from a corpus file plus the rows that were skipped.
#[derive(Debug, Clone, Default)]
pub struct CorpusLoad {
    pub examples: Vec<LabeledExample>,
    pub errors: Vec<RecordError>,
}

pub fn load_corpus(path: &Path, columns: &ColumnMap) -> Result<CorpusLoad> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(file, columns, path)
}

/// Reads a corpus CSV. Entry text is lowercased (Turkish rules) and
/// whitespace-collapsed; an empty or `Ambiguous` validated cell means the
/// row was not validated. Aborts when more than 10% of rows are malformed.
pub fn read_corpus<R: Read>(reader: R, columns: &ColumnMap, origin: &Path) -> Result<CorpusLoad> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::format(origin, e.to_string()))?.clone();
    let mut load = CorpusLoad::default();
    if headers.is_empty() {
        return Ok(load);
    }
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::format(origin, format!("missing column {name:?} in header")))
    };
    let idx = [find(&columns.id)?, find(&columns.entry)?, find(&columns.emotion)?];
    // ValidatedEmotion is optional: without it nothing counts as validated.
    let validated_idx = headers.iter().position(|h| h.trim() == columns.validated);

    for record in rdr.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                load.errors.push(RecordError {
                    line: e.position().map(|p| p.line()).unwrap_or(0),
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let parsed = (|| -> std::result::Result<LabeledExample, String> {
            let get = |i: usize| record.get(i).ok_or_else(|| format!("missing field {}", i + 1));
            let entry_id = get(idx[0])?.trim().to_string();
            if entry_id.is_empty() {
                return Err("empty ID".into());
            }
            let text = collapse_whitespace(&turkish_lowercase(get(idx[1])?));
            if text.is_empty() {
                return Err("empty Entry".into());
            }
            let emotion = get(idx[2])?.parse::<EmotionLabel>().map_err(|e| e.to_string())?;
            let validated_emotion = match validated_idx.and_then(|i| record.get(i)).map(str::trim) {
                None | Some("") => None,
                Some(v) if v.eq_ignore_ascii_case("ambiguous") => None,
                Some(v) => Some(v.parse::<EmotionLabel>().map_err(|e| e.to_string())?),
            };
            Ok(LabeledExample {
                entry_id,
                text,
                emotion,
                validated_emotion,
            })
        })();
        match parsed {
            Ok(ex) => load.examples.push(ex),
            Err(message) => load.errors.push(RecordError { line, message }),
        }
    }
    let total = load.examples.len() + load.errors.len();
    if !load.errors.is_empty() && load.errors.len() * 10 > total {
        return Err(Error::TooManyMalformed {
            path: origin.to_path_buf(),
            malformed: load.errors.len(),
            total,
            first: load.errors[0].clone(),
        });
    }
    Ok(load)
}

pub fn write_corpus<W: Write>(examples: &[LabeledExample], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::io("<corpus output>", std::io::Error::other(e));
    wtr.write_record(CORPUS_HEADER).map_err(io)?;
    for ex in examples {
        wtr.write_record([
            ex.entry_id.as_str(),
            ex.text.as_str(),
            ex.emotion.name(),
            ex.validated_emotion.map(EmotionLabel::name).unwrap_or(""),
        ])
        .map_err(io)?;
    }
    wtr.flush().map_err(|e| Error::io("<corpus output>", e))
}

/// Keeps validated examples only, relabelled with their validated emotion.
pub fn filter_validated(examples: Vec<LabeledExample>) -> Vec<LabeledExample> {
    examples
        .into_iter()
        .filter_map(|ex| {
            ex.validated_emotion.map(|v| LabeledExample {
                emotion: v,
                ..ex
            })
        })
        .collect()
}

pub fn class_counts(examples: &[LabeledExample]) -> [usize; NUM_EMOTIONS] {
    let mut counts = [0; NUM_EMOTIONS];
    for ex in examples {
        counts[ex.emotion.index()] += 1;
    }
    counts
}

fn group_by_class(examples: &[LabeledExample]) -> [Vec<usize>; NUM_EMOTIONS] {
    let mut groups: [Vec<usize>; NUM_EMOTIONS] = Default::default();
    for (i, ex) in examples.iter().enumerate() {
        groups[ex.emotion.index()].push(i);
    }
    groups
}

/// Downsamples every class to the size of the smallest one.
///
/// Selected members keep their input order and the output is grouped by
/// label code, so balancing an already balanced corpus is the identity.
pub fn balance(examples: &[LabeledExample], seed: u64) -> Result<Vec<LabeledExample>> {
    let groups = group_by_class(examples);
    if let Some(missing) = EmotionLabel::ALL.into_iter().find(|l| groups[l.index()].is_empty()) {
        return Err(Error::MissingClass(missing));
    }
    let target = groups.iter().map(Vec::len).min().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(target * NUM_EMOTIONS);
    for members in &groups {
        if members.len() == target {
            out.extend(members.iter().map(|&i| examples[i].clone()));
        } else {
            let mut picked = index::sample(&mut rng, members.len(), target).into_vec();
            picked.sort_unstable();
            out.extend(picked.into_iter().map(|k| examples[members[k]].clone()));
        }
    }
    Ok(out)
}

/// Round half up, tolerant of representation error just below `.5`.
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}

/// Seeded, per-class stratified split. Each class contributes
/// `round_half_up(count * test_fraction)` examples to the test side; both
/// sides keep the shuffled order.
pub fn split(examples: &[LabeledExample], test_fraction: f64, seed: u64) -> Result<SplitCorpus> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Validation(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let counts = class_counts(examples);
    for label in EmotionLabel::ALL {
        match counts[label.index()] {
            0 => return Err(Error::MissingClass(label)),
            1 => return Err(Error::ClassTooSmall { label, count: 1 }),
            _ => {}
        }
    }
    let mut seen = HashSet::with_capacity(examples.len());
    if let Some(dup) = examples.iter().find(|ex| !seen.insert(ex.entry_id.as_str())) {
        return Err(Error::DuplicateId(dup.entry_id.clone()));
    }

    let quota: Vec<usize> = counts.iter().map(|&n| round_half_up(n as f64 * test_fraction)).collect();
    let mut order: Vec<usize> = (0..examples.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut taken = [0usize; NUM_EMOTIONS];
    let mut split = SplitCorpus {
        train: Vec::with_capacity(examples.len()),
        test: Vec::new(),
    };
    for i in order {
        let ex = &examples[i];
        let c = ex.emotion.index();
        if taken[c] < quota[c] {
            taken[c] += 1;
            split.test.push(ex.clone());
        } else {
            split.train.push(ex.clone());
        }
    }
    Ok(split)
}
