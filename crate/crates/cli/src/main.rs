//! `sessiz`: batch emotion analysis for Turkish social-media posts.
//!
//! Settings merge from flags, an optional `--config` file and `SESSIZ_*`
//! environment variables, in that order of precedence. File paths of a single
//! stage are always given as flags.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sessiz_core::config::{env_layer, Layer, PipelineConfig};
use sessiz_core::normalize::EmojiLexicon;
use sessiz_core::pipeline::{self, AggregateOptions, AtStage, IngestOptions, PredictInput, Stage, StageError};
use sessiz_core::score::{DecisionRule, KeywordTable, ModelArtifact};
use sessiz_core::{Error, ErrorKind};

type StageResult<T = ()> = Result<T, StageError>;

#[derive(Parser)]
#[command(name = "sessiz", about = "Emotion analysis for Turkish social-media posts", disable_version_flag = true)]
struct Cli {
    /// Key-value config file; flags override it, it overrides SESSIZ_* variables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Print version, lexicon and model metadata.
    #[arg(short = 'V', long)]
    version: bool,

    /// Model directory to describe with --version.
    #[arg(long, requires = "version")]
    model: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Load raw posts, filter by window and language, write JSON lines.
    Ingest(IngestArgs),
    /// Normalize post text and translate emoji.
    Normalize(NormalizeArgs),
    /// Labeled-corpus preparation.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Score normalized posts or a labeled corpus.
    Predict(PredictArgs),
    /// Compare corpus labels with predictions.
    Evaluate(EvaluateArgs),
    /// Tally predictions into distribution, monthly and series tables.
    Aggregate(AggregateArgs),
    /// Render charts from aggregate tables.
    Report(ReportArgs),
    /// Run every stage into one output directory.
    Pipeline(PipelineArgs),
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Keep validated rows and downsample every class to the smallest.
    Balance(BalanceArgs),
    /// Stratified train/test split.
    Split(SplitArgs),
}

#[derive(Args, Default)]
struct WindowArgs {
    /// Earliest timestamp or YYYY-MM-DD date to keep.
    #[arg(long)]
    from: Option<String>,
    /// Latest timestamp or YYYY-MM-DD date to keep (whole day).
    #[arg(long)]
    to: Option<String>,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    /// csv or jsonl; detected from the extension when omitted.
    #[arg(long)]
    format: Option<String>,
    /// strftime pattern for created_at.
    #[arg(long)]
    time_format: Option<String>,
    #[arg(long)]
    lang: Option<String>,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NormalizeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Emoji lexicon CSV; the bundled lexicon when omitted.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BalanceArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Header overrides such as `ID=id,Entry=sentence`.
    #[arg(long)]
    columns: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    columns: Option<String>,
    #[arg(long)]
    test_fraction: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory receiving train.csv and test.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Default)]
struct BackendArgs {
    /// interchange or mock.
    #[arg(long)]
    backend: Option<String>,
    /// Exported model directory for the interchange backend.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Keyword table JSON for the mock backend.
    #[arg(long)]
    keywords: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct PredictArgs {
    /// Normalized posts (JSON lines).
    #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
    input: Option<PathBuf>,
    /// Labeled corpus CSV.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[command(flatten)]
    backend: BackendArgs,
    /// Plain argmax without the confidence threshold.
    #[arg(long)]
    no_threshold: bool,
    /// Skip posts the backend fails on instead of aborting.
    #[arg(long)]
    skip_errors: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    /// Report file; `.csv` for a table, JSON otherwise.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Default)]
struct AggregateSettings {
    /// Series bucket size: day or month.
    #[arg(long)]
    resolution: Option<String>,
    #[arg(long)]
    year: Option<i32>,
    /// Print whole-number percentages without a decimal.
    #[arg(long)]
    paper_style: bool,
}

#[derive(Args)]
struct AggregateArgs {
    #[arg(long)]
    pred: PathBuf,
    #[command(flatten)]
    settings: AggregateSettings,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding aggregate CSVs.
    #[arg(long)]
    from: PathBuf,
    /// Directory receiving .svg and .csv pairs.
    #[arg(long)]
    charts: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    /// Raw posts (CSV or JSON lines).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    time_format: Option<String>,
    #[arg(long)]
    lang: Option<String>,
    #[command(flatten)]
    window: WindowArgs,
    /// Labeled corpus CSV to balance, split and evaluate on.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    columns: Option<String>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[command(flatten)]
    backend: BackendArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    test_fraction: Option<f64>,
    #[command(flatten)]
    aggregate: AggregateSettings,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Default)]
struct Flags(Layer);

impl Flags {
    fn set<T: ToString>(&mut self, key: &str, value: Option<T>) -> &mut Self {
        if let Some(v) = value {
            self.0.insert(key.to_string(), v.to_string());
        }
        self
    }

    fn path(&mut self, key: &str, value: &Option<PathBuf>) -> &mut Self {
        self.set(key, value.as_ref().map(|p| p.display().to_string()))
    }

    fn switch(&mut self, key: &str, on: bool) -> &mut Self {
        self.set(key, on.then_some("true"))
    }

    fn window(&mut self, w: &WindowArgs) -> &mut Self {
        self.set("from", w.from.as_ref()).set("to", w.to.as_ref())
    }

    fn backend(&mut self, b: &BackendArgs) -> &mut Self {
        self.set("backend", b.backend.as_ref())
            .path("model", &b.model)
            .path("keywords", &b.keywords)
            .set("threshold", b.threshold)
    }

    fn aggregate(&mut self, a: &AggregateSettings) -> &mut Self {
        self.set("resolution", a.resolution.as_ref())
            .set("year", a.year)
            .switch("paper_style", a.paper_style)
    }
}

fn resolve(flags: &Flags, config: Option<&Path>, stage: Stage) -> StageResult<PipelineConfig> {
    PipelineConfig::resolve(&flags.0, config, &env_layer(std::env::vars())).at(stage)
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Validation => 1,
        ErrorKind::Data => 2,
        ErrorKind::Backend => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sessiz: {e}");
            ExitCode::from(exit_code(e.error.kind()))
        }
    }
}

fn run(cli: Cli) -> StageResult {
    let config = cli.config.as_deref();
    if cli.version {
        return print_version(cli.model, config);
    }
    let Some(command) = cli.command else {
        return Err(Error::Validation("no subcommand given; see `sessiz --help`".into())).at(Stage::Config);
    };
    match command {
        Command::Ingest(a) => ingest(a, config),
        Command::Normalize(a) => normalize(a, config),
        Command::Corpus(CorpusCommand::Balance(a)) => balance(a, config),
        Command::Corpus(CorpusCommand::Split(a)) => split(a, config),
        Command::Predict(a) => predict(a, config),
        Command::Evaluate(a) => evaluate(a),
        Command::Aggregate(a) => aggregate(a, config),
        Command::Report(a) => report(a),
        Command::Pipeline(a) => run_pipeline(a, config),
    }
}

fn print_version(model: Option<PathBuf>, config: Option<&Path>) -> StageResult {
    let mut flags = Flags::default();
    flags.path("model", &model);
    let cfg = resolve(&flags, config, Stage::Config)?;
    println!("sessiz {}", env!("CARGO_PKG_VERSION"));
    match &cfg.lexicon {
        Some(p) => println!("lexicon: {} ({} entries)", p.display(), pipeline::open_lexicon(Some(p)).at(Stage::Config)?.len()),
        None => println!("lexicon: bundled ({} entries)", EmojiLexicon::bundled().len()),
    }
    let stems: usize = sessiz_core::EmotionLabel::ALL.iter().map(|&l| KeywordTable::bundled().stems(l).len()).sum();
    println!("mock backend: lexicon-mock 1 ({stems} bundled stems)");
    match &cfg.model {
        Some(dir) => {
            let a = ModelArtifact::open(dir).at(Stage::Config)?;
            println!("model: {} {} ({})", a.metadata.name, a.metadata.version, a.dir.display());
            println!("base model: {}", a.base_model.as_deref().unwrap_or("unknown"));
            println!("max length: {}", a.max_length);
        }
        None => println!("model: none configured"),
    }
    Ok(())
}

fn ingest(a: IngestArgs, config: Option<&Path>) -> StageResult {
    let mut flags = Flags::default();
    flags.set("format", a.format.as_ref()).set("time_format", a.time_format.as_ref()).set("lang", a.lang.as_ref()).window(&a.window);
    let cfg = resolve(&flags, config, Stage::Ingest)?;
    let summary = pipeline::run_ingest(
        &a.input,
        &IngestOptions {
            format: cfg.format,
            time_format: cfg.time_format.clone(),
            window: cfg.window.as_ref(),
            lang: cfg.lang.as_deref(),
        },
        &a.out,
    )
    .at(Stage::Ingest)?;
    for e in &summary.skipped {
        eprintln!("ingest: skipped {e}");
    }
    eprintln!("ingest: {} loaded, {} kept, {} skipped", summary.loaded, summary.kept, summary.skipped.len());
    Ok(())
}

fn normalize(a: NormalizeArgs, config: Option<&Path>) -> StageResult {
    let mut flags = Flags::default();
    flags.path("lexicon", &a.lexicon);
    let cfg = resolve(&flags, config, Stage::Normalize)?;
    let lexicon = pipeline::open_lexicon(cfg.lexicon.as_deref()).at(Stage::Normalize)?;
    let stats = pipeline::run_normalize(&a.input, &lexicon, &a.out).at(Stage::Normalize)?;
    eprintln!("normalize: {} posts, {} unknown emoji removed", stats.posts, stats.unknown_emoji_removed);
    Ok(())
}

fn balance(a: BalanceArgs, config: Option<&Path>) -> StageResult {
    let mut flags = Flags::default();
    flags.set("columns", a.columns.as_ref()).set("seed", a.seed);
    let cfg = resolve(&flags, config, Stage::Balance)?;
    let seed = cfg.require_seed().at(Stage::Balance)?;
    let counts = pipeline::run_balance(&a.corpus, &cfg.columns, seed, &a.out).at(Stage::Balance)?;
    eprintln!("corpus balance: {} per class, {} total", counts[0], counts.iter().sum::<usize>());
    Ok(())
}

fn split(a: SplitArgs, config: Option<&Path>) -> StageResult {
    let mut flags = Flags::default();
    flags.set("columns", a.columns.as_ref()).set("seed", a.seed).set("test_fraction", a.test_fraction);
    let cfg = resolve(&flags, config, Stage::Split)?;
    let seed = cfg.require_seed().at(Stage::Split)?;
    let (train, test) = pipeline::run_split(&a.corpus, &cfg.columns, cfg.test_fraction, seed, &a.out).at(Stage::Split)?;
    eprintln!("corpus split: {train} train, {test} test");
    Ok(())
}

fn predict(a: PredictArgs, config: Option<&Path>) -> StageResult {
    let mut flags = Flags::default();
    flags.backend(&a.backend);
    let cfg = resolve(&flags, config, Stage::Predict)?;
    let backend = pipeline::open_backend(&cfg).at(Stage::Predict)?;
    let rule = if a.no_threshold {
        DecisionRule::Argmax
    } else {
        DecisionRule::threshold(cfg.threshold).at(Stage::Predict)?
    };
    let input = match (&a.input, &a.corpus) {
        (Some(p), _) => PredictInput::Posts(p),
        (None, Some(p)) => PredictInput::Corpus(p),
        (None, None) => unreachable!("clap requires one input"),
    };
    let summary = pipeline::run_predict(input, backend.as_ref(), rule, a.skip_errors, &a.out).at(Stage::Predict)?;
    for f in &summary.failures {
        eprintln!("predict: skipped {f}");
    }
    eprintln!(
        "predict: {} scored with {} {}, {} ambiguous, {} failed",
        summary.scored,
        backend.metadata().name,
        backend.metadata().version,
        summary.ambiguous,
        summary.failures.len()
    );
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> StageResult {
    let report = pipeline::run_evaluate(&a.truth, &a.pred, &a.out).at(Stage::Evaluate)?;
    eprintln!("evaluate: accuracy {:.4} over {}", report.accuracy, report.matrix.total());
    Ok(())
}

fn aggregate(a: AggregateArgs, config: Option<&Path>) -> StageResult {
    let mut flags = Flags::default();
    flags.aggregate(&a.settings).window(&a.window);
    let cfg = resolve(&flags, config, Stage::Aggregate)?;
    let counts = pipeline::run_aggregate(&a.pred, &aggregate_options(&cfg), &a.out).at(Stage::Aggregate)?;
    eprintln!("aggregate: {} classified, {} ambiguous", counts.classified_total(), counts.ambiguous);
    Ok(())
}

fn aggregate_options(cfg: &PipelineConfig) -> AggregateOptions {
    AggregateOptions {
        resolution: Some(cfg.resolution),
        year: cfg.year,
        window: cfg.window,
        paper_style: cfg.paper_style,
    }
}

fn report(a: ReportArgs) -> StageResult {
    let written = pipeline::run_report(&a.from, &a.charts).at(Stage::Report)?;
    eprintln!("report: {} files written to {}", written.len(), a.charts.display());
    Ok(())
}

fn run_pipeline(a: PipelineArgs, config: Option<&Path>) -> StageResult {
    let mut flags = Flags::default();
    flags
        .path("input", &a.input)
        .set("format", a.format.as_ref())
        .set("time_format", a.time_format.as_ref())
        .set("lang", a.lang.as_ref())
        .window(&a.window)
        .path("corpus", &a.corpus)
        .set("columns", a.columns.as_ref())
        .path("lexicon", &a.lexicon)
        .backend(&a.backend)
        .set("seed", a.seed)
        .set("test_fraction", a.test_fraction)
        .aggregate(&a.aggregate)
        .path("out", &a.out);
    let cfg = resolve(&flags, config, Stage::Config)?;
    let backend = pipeline::open_backend(&cfg).at(Stage::Predict)?;
    let s = pipeline::run_pipeline(&cfg, backend.as_ref())?;
    eprintln!("pipeline: {} posts kept of {}, {} skipped", s.ingest.kept, s.ingest.loaded, s.ingest.skipped.len());
    eprintln!("pipeline: balanced {} per class, split {} train / {} test", s.balanced[0], s.split.0, s.split.1);
    eprintln!("pipeline: held-out accuracy {:.4}", s.evaluation.accuracy);
    eprintln!(
        "pipeline: {} classified, {} ambiguous; outputs in {}",
        s.counts.classified_total(),
        s.counts.ambiguous,
        s.out.display()
    );
    Ok(())
}
