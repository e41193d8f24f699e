//! Plot-ready CSV files for the aggregates and static SVG charts drawn from them.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::aggregate::{parse_percent, DistributionRow, EmotionCounts, EmotionSeries, MonthlyRow, Resolution};
use crate::error::{Error, Result};
use crate::label::{EmotionLabel, NUM_EMOTIONS};

pub const DISTRIBUTION_FILE: &str = "distribution.csv";
pub const MONTHLY_FILE: &str = "monthly.csv";
pub const SERIES_FILE: &str = "series.csv";
pub const TOTALS_FILE: &str = "totals.csv";

const SERIES_HEADER: [&str; 7] = ["bucket", "happy", "fear", "sadness", "disgust", "surprise", "anger"];

fn csv_err(origin: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::format(origin, e.to_string())
}

fn write_all<W: Write>(mut w: W, s: &str) -> Result<()> {
    w.write_all(s.as_bytes()).and_then(|_| w.flush()).map_err(|e| Error::io("<output>", e))
}

pub fn write_distribution<W: Write>(rows: &[DistributionRow], paper_style: bool, w: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Empty("distribution has no rows".into()));
    }
    let mut s = String::from("emotion,count,percentage\n");
    for r in rows {
        writeln!(s, "{},{},{}", r.emotion.key(), r.count, crate::aggregate::format_percent(r.percent_tenths, paper_style)).unwrap();
    }
    write_all(w, &s)
}

pub fn write_monthly<W: Write>(rows: &[MonthlyRow], paper_style: bool, w: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Empty("monthly volume has no rows".into()));
    }
    let mut s = String::from("month,count,percentage\n");
    for r in rows {
        writeln!(s, "{},{},{}", r.key(), r.count, crate::aggregate::format_percent(r.percent_tenths, paper_style)).unwrap();
    }
    write_all(w, &s)
}

pub fn write_series<W: Write>(series: &EmotionSeries, w: W) -> Result<()> {
    if series.is_empty() {
        return Err(Error::Empty("emotion series has no buckets".into()));
    }
    let mut s = SERIES_HEADER.join(",");
    s.push('\n');
    for (date, counts) in &series.buckets {
        s.push_str(&series.bucket_key(*date));
        for c in counts {
            write!(s, ",{c}").unwrap();
        }
        s.push('\n');
    }
    write_all(w, &s)
}

pub fn write_totals<W: Write>(counts: &EmotionCounts, w: W) -> Result<()> {
    write_all(w, &format!("classified_total,ambiguous\n{},{}\n", counts.classified_total(), counts.ambiguous))
}

fn expect_header(rdr: &mut csv::Reader<impl Read>, want: &[&str], origin: &Path) -> Result<()> {
    let headers = rdr.headers().map_err(csv_err(origin))?;
    if headers.iter().ne(want.iter().copied()) {
        return Err(Error::format(origin, format!("expected header {}", want.join(","))));
    }
    Ok(())
}

fn cell<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, origin: &Path) -> Result<T> {
    let line = record.position().map_or(0, |p| p.line());
    record
        .get(i)
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::format(origin, format!("line {line}: bad value in column {}", i + 1)))
}

fn percent_cell(record: &csv::StringRecord, origin: &Path) -> Result<u64> {
    let line = record.position().map_or(0, |p| p.line());
    record
        .get(2)
        .and_then(parse_percent)
        .ok_or_else(|| Error::format(origin, format!("line {line}: bad percentage")))
}

pub fn read_distribution<R: Read>(r: R, origin: &Path) -> Result<Vec<DistributionRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    expect_header(&mut rdr, &["emotion", "count", "percentage"], origin)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err(origin))?;
        rows.push(DistributionRow {
            emotion: cell::<EmotionLabel>(&record, 0, origin)?,
            count: cell(&record, 1, origin)?,
            percent_tenths: percent_cell(&record, origin)?,
        });
    }
    Ok(rows)
}

pub fn read_monthly<R: Read>(r: R, origin: &Path) -> Result<Vec<MonthlyRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    expect_header(&mut rdr, &["month", "count", "percentage"], origin)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err(origin))?;
        let month = EmotionSeries::parse_bucket(Resolution::Month, record[0].trim())
            .ok_or_else(|| Error::format(origin, format!("bad month {:?}", &record[0])))?;
        rows.push(MonthlyRow {
            month,
            count: cell(&record, 1, origin)?,
            percent_tenths: percent_cell(&record, origin)?,
        });
    }
    Ok(rows)
}

/// Resolution is inferred from the bucket key width.
pub fn read_series<R: Read>(r: R, origin: &Path) -> Result<EmotionSeries> {
    let mut rdr = csv::Reader::from_reader(r);
    expect_header(&mut rdr, &SERIES_HEADER, origin)?;
    let mut series: Option<EmotionSeries> = None;
    for record in rdr.records() {
        let record = record.map_err(csv_err(origin))?;
        let key = record[0].trim();
        let resolution = if key.len() == 7 { Resolution::Month } else { Resolution::Day };
        let s = series.get_or_insert_with(|| EmotionSeries {
            resolution,
            buckets: Default::default(),
        });
        let date = EmotionSeries::parse_bucket(s.resolution, key)
            .ok_or_else(|| Error::format(origin, format!("bad bucket {key:?}")))?;
        let mut counts = [0u64; NUM_EMOTIONS];
        for (i, c) in counts.iter_mut().enumerate() {
            *c = cell(&record, i + 1, origin)?;
        }
        if s.buckets.insert(date, counts).is_some() {
            return Err(Error::format(origin, format!("repeated bucket {key:?}")));
        }
    }
    series.ok_or_else(|| Error::Empty(format!("{} has no rows", origin.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    LineSeries,
    BarDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// CSV written by this module: a series file for line charts, a
    /// distribution or monthly file for bar charts.
    pub data: PathBuf,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const PALETTE: [&str; NUM_EMOTIONS] = ["#e6b422", "#6a3d9a", "#1f78b4", "#33a02c", "#ff7f00", "#e31a1c"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders the chart described by `spec` as a standalone SVG document.
pub fn render_chart(spec: &ChartSpec) -> Result<String> {
    if !spec.data.is_file() {
        return Err(Error::Validation(format!("chart data {} does not exist", spec.data.display())));
    }
    let text = fs::read_to_string(&spec.data).map_err(|e| Error::io(&spec.data, e))?;
    match spec.kind {
        ChartKind::BarDistribution => {
            let bars = read_bars(text.as_bytes(), &spec.data)?;
            Ok(bar_chart(spec, &bars))
        }
        ChartKind::LineSeries => {
            let series = read_series(text.as_bytes(), &spec.data)?;
            Ok(line_chart(spec, &series))
        }
    }
}

pub fn render_chart_to(spec: &ChartSpec, out: &Path) -> Result<()> {
    let svg = render_chart(spec)?;
    fs::write(out, svg).map_err(|e| Error::io(out, e))
}

fn read_bars(bytes: &[u8], origin: &Path) -> Result<Vec<(String, u64)>> {
    let mut rdr = csv::Reader::from_reader(bytes);
    let header = rdr.headers().map_err(csv_err(origin))?.clone();
    if header.len() < 2 || &header[1] != "count" {
        return Err(Error::format(origin, "expected a label,count,... table"));
    }
    let mut bars = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err(origin))?;
        bars.push((record[0].to_string(), cell(&record, 1, origin)?));
    }
    if bars.is_empty() {
        return Err(Error::Empty(format!("{} has no rows", origin.display())));
    }
    Ok(bars)
}

fn frame(spec: &ChartSpec, y_max: u64) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    )
    .unwrap();
    writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>").unwrap();
    writeln!(s, "<text x=\"{:.1}\" y=\"28\" font-size=\"16\" text-anchor=\"middle\">{}</text>", WIDTH / 2.0, escape(&spec.title)).unwrap();
    let (x0, y0, x1) = (LEFT, HEIGHT - BOTTOM, WIDTH - RIGHT);
    writeln!(s, "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>").unwrap();
    writeln!(s, "<line x1=\"{x0}\" y1=\"{TOP}\" x2=\"{x0}\" y2=\"{y0}\" stroke=\"black\"/>").unwrap();
    for i in 0..=4u64 {
        let v = y_max * i / 4;
        let y = y_of(v, y_max);
        writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{v}</text>", x0 - 6.0, y + 4.0).unwrap();
    }
    writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", (x0 + x1) / 2.0, HEIGHT - 15.0, escape(&spec.x_label)).unwrap();
    writeln!(
        s,
        "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>",
        (TOP + y0) / 2.0,
        (TOP + y0) / 2.0,
        escape(&spec.y_label)
    )
    .unwrap();
    s
}

fn y_of(v: u64, y_max: u64) -> f64 {
    let plot = HEIGHT - BOTTOM - TOP;
    HEIGHT - BOTTOM - plot * v as f64 / y_max.max(1) as f64
}

fn bar_chart(spec: &ChartSpec, bars: &[(String, u64)]) -> String {
    let y_max = bars.iter().map(|b| b.1).max().unwrap_or(0).max(1);
    let mut s = frame(spec, y_max);
    let slot = (WIDTH - RIGHT - LEFT) / bars.len() as f64;
    let rotate = bars.len() > 8;
    for (i, (label, count)) in bars.iter().enumerate() {
        let x = LEFT + slot * i as f64 + slot * 0.15;
        let y = y_of(*count, y_max);
        let color = label.parse::<EmotionLabel>().map_or("#4c72b0", |e| PALETTE[e.index()]);
        writeln!(
            s,
            "<rect class=\"bar\" x=\"{x:.1}\" y=\"{y:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"{color}\"><title>{} {count}</title></rect>",
            slot * 0.7,
            HEIGHT - BOTTOM - y,
            escape(label)
        )
        .unwrap();
        let cx = LEFT + slot * (i as f64 + 0.5);
        let ly = HEIGHT - BOTTOM + 16.0;
        if rotate {
            writeln!(s, "<text x=\"{cx:.1}\" y=\"{ly:.1}\" text-anchor=\"end\" transform=\"rotate(-45 {cx:.1} {ly:.1})\">{}</text>", escape(label)).unwrap();
        } else {
            writeln!(s, "<text x=\"{cx:.1}\" y=\"{ly:.1}\" text-anchor=\"middle\">{}</text>", escape(label)).unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

fn line_chart(spec: &ChartSpec, series: &EmotionSeries) -> String {
    let y_max = series.buckets.values().flatten().copied().max().unwrap_or(0).max(1);
    let mut s = frame(spec, y_max);
    let n = series.buckets.len();
    let width = WIDTH - RIGHT - LEFT;
    let x_of = |i: usize| if n == 1 { LEFT + width / 2.0 } else { LEFT + width * i as f64 / (n - 1) as f64 };
    let keys: Vec<_> = series.buckets.keys().collect();
    let step = n.div_ceil(8).max(1);
    for (i, k) in keys.iter().enumerate().step_by(step) {
        writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", x_of(i), HEIGHT - BOTTOM + 16.0, series.bucket_key(**k)).unwrap();
    }
    for e in EmotionLabel::ALL {
        let color = PALETTE[e.index()];
        let points: Vec<String> = series
            .buckets
            .values()
            .enumerate()
            .map(|(i, c)| format!("{:.1},{:.1}", x_of(i), y_of(c[e.index()], y_max)))
            .collect();
        if n > 1 {
            writeln!(s, "<polyline class=\"series\" data-emotion=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>", e.key(), points.join(" ")).unwrap();
        }
        for p in &points {
            let (x, y) = p.split_once(',').unwrap();
            writeln!(s, "<circle class=\"point\" data-emotion=\"{}\" cx=\"{x}\" cy=\"{y}\" r=\"2.5\" fill=\"{color}\"/>", e.key()).unwrap();
        }
        let ly = TOP + 18.0 * e.index() as f64;
        let lx = WIDTH - RIGHT + 20.0;
        writeln!(s, "<rect x=\"{lx:.1}\" y=\"{:.1}\" width=\"12\" height=\"12\" fill=\"{color}\"/>", ly - 10.0).unwrap();
        writeln!(s, "<text x=\"{:.1}\" y=\"{ly:.1}\">{}</text>", lx + 18.0, e.name()).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// Copies each aggregate CSV found in `from` into `out` and renders an SVG
/// next to it. Returns the files written.
pub fn render_directory(from: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let plans = [
        (DISTRIBUTION_FILE, ChartKind::BarDistribution, "Emotion distribution", "Emotion", "Count"),
        (MONTHLY_FILE, ChartKind::BarDistribution, "Classified posts by month", "Month", "Count"),
        (SERIES_FILE, ChartKind::LineSeries, "Emotions over time", "Bucket", "Count"),
    ];
    if !from.is_dir() {
        return Err(Error::Validation(format!("aggregate directory {} does not exist", from.display())));
    }
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut written = Vec::new();
    for (file, kind, title, x, y) in plans {
        let data = from.join(file);
        if !data.is_file() {
            continue;
        }
        let spec = ChartSpec {
            kind,
            title: title.into(),
            x_label: x.into(),
            y_label: y.into(),
            data: data.clone(),
        };
        let svg = render_chart(&spec)?;
        let csv_out = out.join(file);
        let svg_out = csv_out.with_extension("svg");
        if csv_out != data {
            fs::copy(&data, &csv_out).map_err(|e| Error::io(&csv_out, e))?;
        }
        fs::write(&svg_out, svg).map_err(|e| Error::io(&svg_out, e))?;
        written.push(csv_out);
        written.push(svg_out);
    }
    if written.is_empty() {
        return Err(Error::Validation(format!("no aggregate outputs found in {}", from.display())));
    }
    Ok(written)
}
