//! File-to-file stage functions and the end-to-end chain built from them.
//!
//! Each stage reads its inputs from disk and writes its outputs with fixed
//! names, so running the stages one at a time produces the same bytes as
//! [`run_pipeline`].

use std::fmt;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter};
use std::path::{Path, PathBuf};

use crate::aggregate::{self, EmotionCounts, Resolution};
use crate::config::{BackendChoice, PipelineConfig};
use crate::corpus::{self, ColumnMap, LabeledExample};
use crate::error::{Error, RecordError, Result};
use crate::eval::{self, EvalReport};
use crate::ingest::{self, InputFormat, LoadOptions};
use crate::label::NUM_EMOTIONS;
use crate::normalize::{self, EmojiLexicon, NormalizeStats, NormalizedPost};
use crate::report;
use crate::score::{self, DecisionRule, KeywordBackend, KeywordTable, PredictionRecord, ScorerBackend};
use crate::time::TimeWindow;

pub const POSTS_FILE: &str = "posts.jsonl";
pub const NORMALIZED_FILE: &str = "normalized.jsonl";
pub const BALANCED_FILE: &str = "balanced.csv";
pub const TRAIN_FILE: &str = "train.csv";
pub const TEST_FILE: &str = "test.csv";
pub const TEST_PREDICTIONS_FILE: &str = "test_predictions.csv";
pub const EVALUATION_FILE: &str = "evaluation.json";
pub const PREDICTIONS_FILE: &str = "predictions.csv";
pub const AGGREGATES_DIR: &str = "aggregates";
pub const CHARTS_DIR: &str = "charts";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Normalize,
    Balance,
    Split,
    Predict,
    Evaluate,
    Aggregate,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Normalize => "normalize",
            Stage::Balance => "corpus balance",
            Stage::Split => "corpus split",
            Stage::Predict => "predict",
            Stage::Evaluate => "evaluate",
            Stage::Aggregate => "aggregate",
            Stage::Report => "report",
        })
    }
}

#[derive(Debug)]
pub struct StageError {
    pub stage: Stage,
    pub error: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

pub trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError> {
        self.map_err(|error| StageError { stage, error })
    }
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Validation(format!("{what} {} does not exist", path.display())))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_jsonl_file<T: serde::Serialize>(items: &[T], path: &Path) -> Result<()> {
    ingest::write_jsonl(items, create(path)?).map_err(|e| Error::io(path, e))
}

/// `.jsonl`/`.ndjson` files are JSON lines, everything else CSV.
pub fn detect_format(path: &Path) -> InputFormat {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("jsonl" | "ndjson" | "json") => InputFormat::Jsonl,
        _ => InputFormat::Csv,
    }
}

pub fn open_lexicon(path: Option<&Path>) -> Result<EmojiLexicon> {
    match path {
        None => Ok(EmojiLexicon::bundled()),
        Some(p) => {
            require_file(p, "lexicon")?;
            EmojiLexicon::load(p)
        }
    }
}

pub fn open_backend(config: &PipelineConfig) -> Result<Box<dyn ScorerBackend>> {
    match config.backend {
        BackendChoice::Mock => {
            let table = match &config.keywords {
                None => KeywordTable::bundled(),
                Some(p) => {
                    require_file(p, "keyword table")?;
                    KeywordTable::load(p)?
                }
            };
            Ok(Box::new(KeywordBackend::new(table)))
        }
        BackendChoice::Interchange => open_interchange(config.require_path(&config.model, "model")?),
    }
}

#[cfg(feature = "interchange")]
fn open_interchange(dir: &Path) -> Result<Box<dyn ScorerBackend>> {
    let artifact = score::ModelArtifact::open(dir)?;
    Ok(Box::new(score::InterchangeBackend::load(&artifact)?))
}

#[cfg(not(feature = "interchange"))]
fn open_interchange(_dir: &Path) -> Result<Box<dyn ScorerBackend>> {
    Err(Error::Validation("this build has no interchange backend; use --backend mock".into()))
}

#[derive(Debug, Clone, Default)]
pub struct IngestSummary {
    pub loaded: usize,
    pub kept: usize,
    pub skipped: Vec<RecordError>,
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions<'a> {
    pub format: Option<InputFormat>,
    pub time_format: Option<String>,
    pub window: Option<&'a TimeWindow>,
    pub lang: Option<&'a str>,
}

/// Loads raw posts, applies window and language filters, writes JSON lines.
pub fn run_ingest(input: &Path, opts: &IngestOptions<'_>, out: &Path) -> Result<IngestSummary> {
    require_file(input, "input")?;
    let format = opts.format.unwrap_or_else(|| detect_format(input));
    let load = ingest::load_posts(
        input,
        format,
        &LoadOptions {
            time_format: opts.time_format.clone(),
        },
    )?;
    let loaded = load.posts.len();
    let mut posts = load.posts;
    if let Some(w) = opts.window {
        posts = ingest::filter_window(posts, w);
    }
    if let Some(lang) = opts.lang {
        posts = ingest::filter_language(posts, lang)?;
    }
    write_jsonl_file(&posts, out)?;
    Ok(IngestSummary {
        loaded,
        kept: posts.len(),
        skipped: load.errors,
    })
}

pub fn run_normalize(input: &Path, lexicon: &EmojiLexicon, out: &Path) -> Result<NormalizeStats> {
    require_file(input, "input")?;
    let load = ingest::load_posts(input, detect_format(input), &LoadOptions::default())?;
    let (normalized, stats) = normalize::normalize_posts(&load.posts, lexicon);
    write_jsonl_file(&normalized, out)?;
    Ok(stats)
}

pub fn read_normalized(path: &Path) -> Result<Vec<NormalizedPost>> {
    require_file(path, "input")?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let post = serde_json::from_str(&line).map_err(|e| Error::format(path, format!("line {}: {e}", n + 1)))?;
        out.push(post);
    }
    Ok(out)
}

fn load_examples(path: &Path, columns: &ColumnMap) -> Result<Vec<LabeledExample>> {
    require_file(path, "corpus")?;
    Ok(corpus::load_corpus(path, columns)?.examples)
}

/// Keeps validated examples and downsamples every class to the smallest.
pub fn run_balance(input: &Path, columns: &ColumnMap, seed: u64, out: &Path) -> Result<[usize; NUM_EMOTIONS]> {
    let examples = corpus::filter_validated(load_examples(input, columns)?);
    let balanced = corpus::balance(&examples, seed)?;
    corpus::write_corpus(&balanced, create(out)?)?;
    Ok(corpus::class_counts(&balanced))
}

/// Writes `train.csv` and `test.csv` into `out_dir`.
pub fn run_split(input: &Path, columns: &ColumnMap, test_fraction: f64, seed: u64, out_dir: &Path) -> Result<(usize, usize)> {
    let examples = load_examples(input, columns)?;
    let parts = corpus::split(&examples, test_fraction, seed)?;
    corpus::write_corpus(&parts.train, create(&out_dir.join(TRAIN_FILE))?)?;
    corpus::write_corpus(&parts.test, create(&out_dir.join(TEST_FILE))?)?;
    Ok((parts.train.len(), parts.test.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictInput<'a> {
    /// Normalized posts as JSON lines.
    Posts(&'a Path),
    /// A labeled corpus CSV; rows carry no timestamp.
    Corpus(&'a Path),
}

#[derive(Debug, Default)]
pub struct PredictSummary {
    pub scored: usize,
    pub ambiguous: usize,
    pub failures: Vec<Error>,
}

pub fn run_predict(
    input: PredictInput<'_>,
    backend: &dyn ScorerBackend,
    rule: DecisionRule,
    skip_errors: bool,
    out: &Path,
) -> Result<PredictSummary> {
    let outcome = match input {
        PredictInput::Posts(p) => score::batch_predict(&read_normalized(p)?, backend, rule, skip_errors)?,
        PredictInput::Corpus(p) => {
            score::batch_predict(&load_examples(p, &ColumnMap::default())?, backend, rule, skip_errors)?
        }
    };
    score::write_predictions(&outcome.records, create(out)?)?;
    Ok(PredictSummary {
        scored: outcome.records.len(),
        ambiguous: outcome.records.iter().filter(|r| r.prediction.label.emotion().is_none()).count(),
        failures: outcome.failures,
    })
}

/// Writes JSON, or CSV when `out` ends in `.csv`.
pub fn run_evaluate(truth: &Path, preds: &Path, out: &Path) -> Result<EvalReport> {
    let examples = load_examples(truth, &ColumnMap::default())?;
    require_file(preds, "predictions")?;
    let records = score::read_predictions_file(preds)?;
    let (t, p) = eval::align(&examples, &records)?;
    let report = eval::report(&eval::confusion(&t, &p)?)?;
    let text = if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        report.to_csv()
    } else {
        report.to_json()
    };
    fs::write(out, text).map_err(|e| Error::io(out, e))?;
    Ok(report)
}

#[derive(Debug, Clone, Default)]
pub struct AggregateOptions {
    pub resolution: Option<Resolution>,
    /// Restricts every output to one calendar year.
    pub year: Option<i32>,
    pub window: Option<TimeWindow>,
    pub paper_style: bool,
}

/// Writes distribution, monthly, series and totals CSVs into `out_dir`.
pub fn run_aggregate(preds: &Path, opts: &AggregateOptions, out_dir: &Path) -> Result<EmotionCounts> {
    require_file(preds, "predictions")?;
    let records: Vec<PredictionRecord> = score::read_predictions_file(preds)?;
    let window = match opts.year {
        Some(y) => Some(TimeWindow::year(y)?),
        None => opts.window,
    };
    let counts = aggregate::count_emotions(&records, window.as_ref());
    let rows = aggregate::distribution(&counts)?;
    let monthly = aggregate::monthly_volume(&records, window.as_ref());
    let series = aggregate::emotion_series(&records, opts.resolution.unwrap_or(Resolution::Month), window.as_ref());

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    report::write_distribution(&rows, opts.paper_style, create(&out_dir.join(report::DISTRIBUTION_FILE))?)?;
    if !monthly.is_empty() {
        report::write_monthly(&monthly, opts.paper_style, create(&out_dir.join(report::MONTHLY_FILE))?)?;
    }
    if !series.is_empty() {
        report::write_series(&series, create(&out_dir.join(report::SERIES_FILE))?)?;
    }
    report::write_totals(&counts, create(&out_dir.join(report::TOTALS_FILE))?)?;
    Ok(counts)
}

pub fn run_report(from: &Path, charts: &Path) -> Result<Vec<PathBuf>> {
    report::render_directory(from, charts)
}

#[derive(Debug)]
pub struct PipelineSummary {
    pub ingest: IngestSummary,
    pub normalize: NormalizeStats,
    pub balanced: [usize; NUM_EMOTIONS],
    pub split: (usize, usize),
    pub evaluation: EvalReport,
    pub predict: PredictSummary,
    pub counts: EmotionCounts,
    pub out: PathBuf,
}

/// Runs every stage in order into `config.out`. The held-out split is
/// scored with a plain argmax; posts use the configured threshold.
pub fn run_pipeline(config: &PipelineConfig, backend: &dyn ScorerBackend) -> std::result::Result<PipelineSummary, StageError> {
    let input = config.require_path(&config.input, "input").at(Stage::Config)?;
    let corpus_path = config.require_path(&config.corpus, "corpus").at(Stage::Config)?;
    let out = config.require_path(&config.out, "out").at(Stage::Config)?;
    let seed = config.require_seed().at(Stage::Config)?;
    let rule = DecisionRule::threshold(config.threshold).at(Stage::Config)?;
    let lexicon = open_lexicon(config.lexicon.as_deref()).at(Stage::Normalize)?;

    let ingest = run_ingest(
        input,
        &IngestOptions {
            format: config.format,
            time_format: config.time_format.clone(),
            window: config.window.as_ref(),
            lang: config.lang.as_deref(),
        },
        &out.join(POSTS_FILE),
    )
    .at(Stage::Ingest)?;
    let normalize = run_normalize(&out.join(POSTS_FILE), &lexicon, &out.join(NORMALIZED_FILE)).at(Stage::Normalize)?;
    let balanced = run_balance(corpus_path, &config.columns, seed, &out.join(BALANCED_FILE)).at(Stage::Balance)?;
    let split = run_split(&out.join(BALANCED_FILE), &ColumnMap::default(), config.test_fraction, seed, out).at(Stage::Split)?;
    run_predict(
        PredictInput::Corpus(&out.join(TEST_FILE)),
        backend,
        DecisionRule::Argmax,
        false,
        &out.join(TEST_PREDICTIONS_FILE),
    )
    .at(Stage::Predict)?;
    let evaluation = run_evaluate(&out.join(TEST_FILE), &out.join(TEST_PREDICTIONS_FILE), &out.join(EVALUATION_FILE)).at(Stage::Evaluate)?;
    let predict = run_predict(PredictInput::Posts(&out.join(NORMALIZED_FILE)), backend, rule, false, &out.join(PREDICTIONS_FILE))
        .at(Stage::Predict)?;
    let counts = run_aggregate(
        &out.join(PREDICTIONS_FILE),
        &AggregateOptions {
            resolution: Some(config.resolution),
            year: config.year,
            window: config.window,
            paper_style: config.paper_style,
        },
        &out.join(AGGREGATES_DIR),
    )
    .at(Stage::Aggregate)?;
    run_report(&out.join(AGGREGATES_DIR), &out.join(CHARTS_DIR)).at(Stage::Report)?;
    Ok(PipelineSummary {
        ingest,
        normalize,
        balanced,
        split,
        evaluation,
        predict,
        counts,
        out: out.to_path_buf(),
    })
}
