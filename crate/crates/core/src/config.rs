//! Run configuration merged from three layers. Command-line flags win over
//! a `key = value` config file, which wins over `SESSIZ_*` environment
//! variables.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::aggregate::Resolution;
use crate::corpus::ColumnMap;
use crate::error::{Error, Result};
use crate::ingest::InputFormat;
use crate::score::{DecisionRule, DEFAULT_THRESHOLD};
use crate::time::TimeWindow;

pub const ENV_PREFIX: &str = "SESSIZ_";
pub const DEFAULT_TEST_FRACTION: f64 = 0.1;

/// Every recognised key. Hyphens in keys are read as underscores.
pub const KEYS: [&str; 19] = [
    "input",
    "format",
    "time_format",
    "lang",
    "from",
    "to",
    "corpus",
    "columns",
    "lexicon",
    "backend",
    "model",
    "keywords",
    "threshold",
    "seed",
    "test_fraction",
    "resolution",
    "year",
    "paper_style",
    "out",
];

/// Keys holding file paths. In a config file they are relative to the file.
pub const PATH_KEYS: [&str; 6] = ["input", "corpus", "lexicon", "model", "keywords", "out"];

pub type Layer = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackendChoice {
    #[default]
    Interchange,
    Mock,
}

impl FromStr for BackendChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "interchange" | "onnx" => Ok(BackendChoice::Interchange),
            "mock" => Ok(BackendChoice::Mock),
            other => Err(Error::Validation(format!("unknown backend {other:?} (expected interchange or mock)"))),
        }
    }
}

impl fmt::Display for BackendChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendChoice::Interchange => "interchange",
            BackendChoice::Mock => "mock",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    /// Detected from the file extension when unset.
    pub format: Option<InputFormat>,
    pub time_format: Option<String>,
    pub lang: Option<String>,
    pub window: Option<TimeWindow>,
    pub corpus: Option<PathBuf>,
    pub columns: ColumnMap,
    /// Bundled lexicon when unset.
    pub lexicon: Option<PathBuf>,
    pub backend: BackendChoice,
    pub model: Option<PathBuf>,
    pub keywords: Option<PathBuf>,
    pub threshold: f64,
    pub seed: Option<u64>,
    pub test_fraction: f64,
    pub resolution: Resolution,
    pub year: Option<i32>,
    pub paper_style: bool,
    pub out: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: None,
            format: None,
            time_format: None,
            lang: None,
            window: None,
            corpus: None,
            columns: ColumnMap::default(),
            lexicon: None,
            backend: BackendChoice::default(),
            model: None,
            keywords: None,
            threshold: DEFAULT_THRESHOLD,
            seed: None,
            test_fraction: DEFAULT_TEST_FRACTION,
            resolution: Resolution::Month,
            year: None,
            paper_style: false,
            out: None,
        }
    }
}

fn canonical_key(raw: &str) -> String {
    raw.trim().to_ascii_lowercase().replace('-', "_")
}

fn known(key: &str) -> bool {
    KEYS.contains(&key)
}

/// Parses `key = value` lines. Blank lines and lines starting with `#` are
/// skipped; values may be wrapped in double quotes.
pub fn parse_config(text: &str, origin: &Path) -> Result<Layer> {
    let mut layer = Layer::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |m: &str| Error::Validation(format!("{}:{}: {m}", origin.display(), n + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
        let key = canonical_key(key);
        if !known(&key) {
            return Err(bad(&format!("unknown key {key:?}")));
        }
        let value = value.trim();
        let value = value.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(value);
        layer.insert(key, value.to_string());
    }
    Ok(layer)
}

pub fn load_config(path: &Path) -> Result<Layer> {
    if !path.is_file() {
        return Err(Error::Validation(format!("config file {} does not exist", path.display())));
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut layer = parse_config(&text, path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    for key in PATH_KEYS {
        if let Some(v) = layer.get_mut(key) {
            if !v.is_empty() && Path::new(v.as_str()).is_relative() {
                *v = base.join(v.as_str()).display().to_string();
            }
        }
    }
    Ok(layer)
}

/// Picks `SESSIZ_<KEY>` variables for recognised keys.
pub fn env_layer<I: IntoIterator<Item = (String, String)>>(vars: I) -> Layer {
    vars.into_iter()
        .filter_map(|(k, v)| {
            let key = canonical_key(k.strip_prefix(ENV_PREFIX)?);
            known(&key).then_some((key, v))
        })
        .collect()
}

/// Later layers override earlier ones.
pub fn merge<'a, I: IntoIterator<Item = &'a Layer>>(layers: I) -> Layer {
    let mut out = Layer::new();
    for layer in layers {
        out.extend(layer.iter().map(|(k, v)| (k.clone(), v.clone())));
    }
    out
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Validation(format!("invalid value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" | "" => Ok(false),
        _ => Err(Error::Validation(format!("invalid boolean {value:?} for {key}"))),
    }
}

impl PipelineConfig {
    /// Resolves flags over an optional config file over the environment.
    pub fn resolve(flags: &Layer, file: Option<&Path>, env: &Layer) -> Result<Self> {
        let file = file.map(load_config).transpose()?.unwrap_or_default();
        Self::from_layer(&merge([env, &file, flags]))
    }

    pub fn from_layer(layer: &Layer) -> Result<Self> {
        let mut c = PipelineConfig::default();
        let get = |k: &str| layer.get(k).map(String::as_str).filter(|v| !v.trim().is_empty());
        let path = |k: &str| get(k).map(PathBuf::from);
        c.input = path("input");
        c.format = get("format").map(str::parse).transpose()?;
        c.time_format = get("time_format").map(str::to_string);
        c.lang = get("lang").map(str::to_string);
        c.window = TimeWindow::from_bounds(get("from"), get("to"))?;
        c.corpus = path("corpus");
        if let Some(v) = get("columns") {
            c.columns = v.parse()?;
        }
        c.lexicon = path("lexicon");
        if let Some(v) = get("backend") {
            c.backend = v.parse()?;
        }
        c.model = path("model");
        c.keywords = path("keywords");
        if let Some(v) = get("threshold") {
            c.threshold = parse_value("threshold", v)?;
        }
        c.seed = get("seed").map(|v| parse_value("seed", v)).transpose()?;
        if let Some(v) = get("test_fraction") {
            c.test_fraction = parse_value("test_fraction", v)?;
        }
        if let Some(v) = get("resolution") {
            c.resolution = v.parse()?;
        }
        c.year = get("year").map(|v| parse_value("year", v)).transpose()?;
        if let Some(v) = layer.get("paper_style") {
            c.paper_style = parse_bool("paper_style", v)?;
        }
        c.out = path("out");
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        DecisionRule::threshold(self.threshold)?;
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Validation(format!(
                "test fraction must lie strictly between 0 and 1, got {}",
                self.test_fraction
            )));
        }
        if let Some(lang) = &self.lang {
            if lang.trim().is_empty() {
                return Err(Error::Validation("language tag must not be empty".into()));
            }
        }
        Ok(())
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Validation("a seed is required (--seed, config `seed`, or SESSIZ_SEED)".into()))
    }

    pub fn require_path<'a>(&self, value: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| Error::Validation(format!("missing required setting `{key}`")))
    }
}
