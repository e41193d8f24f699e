//! Emotion tallies, distribution tables, monthly volume and per-bucket series.
//!
//! Ambiguous predictions never enter a denominator. Percentages are kept as
//! integer tenths rounded half up so that table cells are reproducible exactly.
//! Records without a timestamp are counted by [`count_emotions`] when no window
//! is given but are skipped by every time-bucketed view.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, Months, NaiveDate, Utc};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::label::{EmotionLabel, PredictedLabel, NUM_EMOTIONS};
use crate::score::PredictionRecord;
use crate::time::{TimeWindow, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EmotionCounts {
    pub counts: [u64; NUM_EMOTIONS],
    pub ambiguous: u64,
}

impl EmotionCounts {
    pub fn from_counts(counts: [u64; NUM_EMOTIONS]) -> Self {
        EmotionCounts { counts, ambiguous: 0 }
    }

    pub fn classified_total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn get(&self, label: EmotionLabel) -> u64 {
        self.counts[label.index()]
    }

    fn add(&mut self, label: PredictedLabel) {
        match label.emotion() {
            Some(e) => self.counts[e.index()] += 1,
            None => self.ambiguous += 1,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.ambiguous += other.ambiguous;
        self
    }
}

fn in_window(r: &PredictionRecord, window: Option<&TimeWindow>) -> bool {
    match (window, r.created_at) {
        (None, _) => true,
        (Some(w), Some(t)) => w.contains(t),
        (Some(_), None) => false,
    }
}

pub fn count_emotions(preds: &[PredictionRecord], window: Option<&TimeWindow>) -> EmotionCounts {
    preds
        .par_iter()
        .filter(|r| in_window(r, window))
        .fold(EmotionCounts::default, |mut acc, r| {
            acc.add(r.prediction.label);
            acc
        })
        .reduce(EmotionCounts::default, EmotionCounts::merge)
}

/// `round(1000 * part / total) / 10` with ties rounded up, in integer arithmetic.
pub fn percent_tenths(part: u64, total: u64) -> u64 {
    assert!(total > 0, "percentage of an empty total");
    let (part, total) = (part as u128, total as u128);
    ((2000 * part + total) / (2 * total)) as u64
}

/// Renders tenths as `43.6`. With `paper_style`, whole numbers drop the
/// decimal (`0`, `2`) the way the monthly table prints them.
pub fn format_percent(tenths: u64, paper_style: bool) -> String {
    if paper_style && tenths % 10 == 0 {
        format!("{}", tenths / 10)
    } else {
        format!("{}.{}", tenths / 10, tenths % 10)
    }
}

pub(crate) fn parse_percent(s: &str) -> Option<u64> {
    match s.trim().split_once('.') {
        Some((whole, frac)) if frac.len() == 1 => Some(whole.parse::<u64>().ok()? * 10 + frac.parse::<u64>().ok()?),
        None => Some(s.trim().parse::<u64>().ok()? * 10),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistributionRow {
    pub emotion: EmotionLabel,
    pub count: u64,
    pub percent_tenths: u64,
}

impl DistributionRow {
    pub fn percent(&self) -> f64 {
        self.percent_tenths as f64 / 10.0
    }
}

/// One row per emotion in label-code order.
pub fn distribution(counts: &EmotionCounts) -> Result<[DistributionRow; NUM_EMOTIONS]> {
    let total = counts.classified_total();
    if total == 0 {
        return Err(Error::Empty("no classified predictions to distribute".into()));
    }
    Ok(EmotionLabel::ALL.map(|emotion| {
        let count = counts.get(emotion);
        DistributionRow {
            emotion,
            count,
            percent_tenths: percent_tenths(count, total),
        }
    }))
}

pub fn yearly_distribution(preds: &[PredictionRecord], year: i32) -> Result<[DistributionRow; NUM_EMOTIONS]> {
    let window = TimeWindow::year(year)?;
    distribution(&count_emotions(preds, Some(&window)))
        .map_err(|_| Error::Empty(format!("no classified predictions in {year}")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonthlyRow {
    /// First day of the month.
    pub month: NaiveDate,
    pub count: u64,
    pub percent_tenths: u64,
}

impl MonthlyRow {
    pub fn key(&self) -> String {
        self.month.format("%Y-%m").to_string()
    }
}

fn month_start(d: NaiveDate) -> NaiveDate {
    d.with_day(1).expect("day 1 exists")
}

fn months_between(first: NaiveDate, last: NaiveDate) -> impl Iterator<Item = NaiveDate> {
    std::iter::successors(Some(first), move |m| m.checked_add_months(Months::new(1)).filter(|n| *n <= last))
}

fn bounded(t: Timestamp) -> Option<NaiveDate> {
    let dt = t.datetime();
    (dt != DateTime::<Utc>::MIN_UTC && dt != DateTime::<Utc>::MAX_UTC).then(|| month_start(t.date()))
}

/// Classified volume per month as a share of the classified total over all
/// emitted months. Gap months are filled with zeros; with a window, its whole
/// span is emitted.
pub fn monthly_volume(preds: &[PredictionRecord], window: Option<&TimeWindow>) -> Vec<MonthlyRow> {
    let series = emotion_series(preds, Resolution::Month, window);
    let mut first = series.buckets.keys().next().copied();
    let mut last = series.buckets.keys().next_back().copied();
    if let Some(w) = window {
        first = bounded(w.start()).or(first);
        last = bounded(w.end()).or(last);
    }
    let (Some(first), Some(last)) = (first, last) else {
        return Vec::new();
    };
    let totals: Vec<(NaiveDate, u64)> = months_between(first, last)
        .map(|m| (m, series.buckets.get(&m).map_or(0, |c| c.iter().sum())))
        .collect();
    let grand: u64 = totals.iter().map(|t| t.1).sum();
    totals
        .into_iter()
        .map(|(month, count)| MonthlyRow {
            month,
            count,
            percent_tenths: if grand == 0 { 0 } else { percent_tenths(count, grand) },
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Resolution {
    Day,
    Month,
}

impl FromStr for Resolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "day" => Ok(Resolution::Day),
            "month" => Ok(Resolution::Month),
            other => Err(Error::Validation(format!("unknown resolution {other:?} (expected day or month)"))),
        }
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Resolution::Day => "day",
            Resolution::Month => "month",
        })
    }
}

/// Per-bucket emotion counts. Month buckets are keyed by their first day.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmotionSeries {
    pub resolution: Resolution,
    pub buckets: BTreeMap<NaiveDate, [u64; NUM_EMOTIONS]>,
}

impl EmotionSeries {
    pub fn bucket_key(&self, date: NaiveDate) -> String {
        match self.resolution {
            Resolution::Day => date.format("%Y-%m-%d").to_string(),
            Resolution::Month => date.format("%Y-%m").to_string(),
        }
    }

    pub fn parse_bucket(resolution: Resolution, key: &str) -> Option<NaiveDate> {
        match resolution {
            Resolution::Day => NaiveDate::parse_from_str(key, "%Y-%m-%d").ok(),
            Resolution::Month => NaiveDate::parse_from_str(&format!("{key}-01"), "%Y-%m-%d").ok(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn to_months(&self) -> EmotionSeries {
        let mut buckets: BTreeMap<NaiveDate, [u64; NUM_EMOTIONS]> = BTreeMap::new();
        for (day, counts) in &self.buckets {
            let slot = buckets.entry(month_start(*day)).or_default();
            for (a, b) in slot.iter_mut().zip(counts) {
                *a += b;
            }
        }
        EmotionSeries {
            resolution: Resolution::Month,
            buckets,
        }
    }

    pub fn totals(&self) -> EmotionCounts {
        self.buckets
            .values()
            .fold(EmotionCounts::default(), |acc, c| acc.merge(EmotionCounts::from_counts(*c)))
    }
}

pub fn emotion_series(preds: &[PredictionRecord], resolution: Resolution, window: Option<&TimeWindow>) -> EmotionSeries {
    let buckets = preds
        .par_iter()
        .filter(|r| in_window(r, window))
        .filter_map(|r| Some((r.created_at?, r.prediction.label.emotion()?)))
        .fold(BTreeMap::new, |mut acc: BTreeMap<NaiveDate, [u64; NUM_EMOTIONS]>, (t, e)| {
            let key = match resolution {
                Resolution::Day => t.date(),
                Resolution::Month => month_start(t.date()),
            };
            acc.entry(key).or_default()[e.index()] += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                let slot = a.entry(k).or_default();
                for (x, y) in slot.iter_mut().zip(v) {
                    *x += y;
                }
            }
            a
        });
    EmotionSeries { resolution, buckets }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::Prediction;
    use proptest::prelude::*;

    const TABLE4: [u64; 6] = [954, 4581, 3512, 338, 13656, 17839];
    const TABLE5: [u64; 6] = [12, 135, 185, 1, 815, 303];
    const TABLE6: [u64; 6] = [942, 4446, 3327, 337, 12841, 17536];

    fn rec(id: usize, ts: Option<Timestamp>, code: i64) -> PredictionRecord {
        PredictionRecord {
            id: id.to_string(),
            created_at: ts,
            prediction: Prediction {
                label: PredictedLabel::from_code(code).unwrap(),
                confidence: 0.9,
            },
        }
    }

    fn ts(y: i32, m: u32, d: u32) -> Option<Timestamp> {
        Timestamp::from_ymd_hms(y, m, d, 12, 0, 0)
    }

    fn tenths(rows: &[DistributionRow]) -> Vec<u64> {
        rows.iter().map(|r| r.percent_tenths).collect()
    }

    /// Independent float oracle: round half up at one decimal.
    fn oracle(part: u64, total: u64) -> u64 {
        (1000.0 * part as f64 / total as f64 + 0.5 + 1e-9).floor() as u64
    }

    #[test]
    fn empty_input_counts_nothing() {
        let c = count_emotions(&[], None);
        assert_eq!(c, EmotionCounts::default());
        assert_eq!(c.classified_total(), 0);
        assert!(distribution(&c).is_err());
    }

    #[test]
    fn ambiguous_kept_apart() {
        let codes = [0, 1, -1, 2, 3, -1, 4, 5, -1, 5];
        let preds: Vec<_> = codes.iter().enumerate().map(|(i, &c)| rec(i, None, c)).collect();
        let c = count_emotions(&preds, None);
        assert_eq!(c.classified_total(), 7);
        assert_eq!(c.ambiguous, 3);
    }

    #[test]
    fn overall_table() {
        let c = EmotionCounts::from_counts(TABLE4);
        assert_eq!(c.classified_total(), 40_880);
        assert_eq!(tenths(&distribution(&c).unwrap()), [23, 112, 86, 8, 334, 436]);
    }

    #[test]
    fn year_tables() {
        let d5 = distribution(&EmotionCounts::from_counts(TABLE5)).unwrap();
        assert_eq!(TABLE5.iter().sum::<u64>(), 1_451);
        assert_eq!(tenths(&d5), [8, 93, 127, 1, 562, 209]);
        let d6 = distribution(&EmotionCounts::from_counts(TABLE6)).unwrap();
        assert_eq!(TABLE6.iter().sum::<u64>(), 39_429);
        assert_eq!(tenths(&d6), [24, 113, 84, 9, 326, 445]);
    }

    #[test]
    fn single_emotion_is_everything() {
        let d = distribution(&EmotionCounts::from_counts([0, 0, 7, 0, 0, 0])).unwrap();
        assert_eq!(tenths(&d), [0, 0, 1000, 0, 0, 0]);
    }

    #[test]
    fn yearly_distribution_filters_by_year() {
        let mut preds = Vec::new();
        for (code, &n) in TABLE5.iter().enumerate() {
            for _ in 0..n {
                preds.push(rec(preds.len(), ts(2021, 7, 3), code as i64));
            }
        }
        preds.push(rec(9999, ts(2022, 1, 1), 0));
        assert_eq!(tenths(&yearly_distribution(&preds, 2021).unwrap()), [8, 93, 127, 1, 562, 209]);
        assert!(yearly_distribution(&preds, 2020).is_err());
    }

    #[test]
    fn percent_formatting() {
        assert_eq!(format_percent(436, false), "43.6");
        assert_eq!(format_percent(0, false), "0.0");
        assert_eq!(format_percent(0, true), "0");
        assert_eq!(format_percent(20, true), "2");
        assert_eq!(format_percent(519, true), "51.9");
        for t in [0, 5, 20, 436, 1000] {
            assert_eq!(parse_percent(&format_percent(t, false)), Some(t));
            assert_eq!(parse_percent(&format_percent(t, true)), Some(t));
        }
    }

    #[test]
    fn percent_tenths_matches_float_oracle() {
        for total in [1u64, 3, 7, 1451, 39429, 40880] {
            for part in (0..=total).step_by((total as usize / 97).max(1)) {
                assert_eq!(percent_tenths(part, total), oracle(part, total), "{part}/{total}");
            }
        }
    }

    #[test]
    fn monthly_gap_filled_and_one_month_is_whole() {
        let preds = vec![rec(0, ts(2022, 1, 5), 1), rec(1, ts(2022, 3, 9), 2), rec(2, ts(2022, 3, 9), -1)];
        let rows = monthly_volume(&preds, None);
        let keys: Vec<_> = rows.iter().map(|r| (r.key(), r.count)).collect();
        assert_eq!(keys, [("2022-01".into(), 1), ("2022-02".into(), 0), ("2022-03".into(), 1)]);

        let one = monthly_volume(&preds[..1], None);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].percent_tenths, 1000);
    }

    #[test]
    fn monthly_window_span_emitted() {
        let preds = vec![rec(0, ts(2022, 5, 5), 1)];
        let w = TimeWindow::year(2022).unwrap();
        let rows = monthly_volume(&preds, Some(&w));
        assert_eq!(rows.len(), 12);
        assert_eq!(rows.iter().map(|r| r.count).sum::<u64>(), 1);
        assert!(monthly_volume(&[], None).is_empty());
    }

    #[test]
    fn same_day_bucket() {
        let preds = vec![rec(0, ts(2022, 5, 1), 4), rec(1, ts(2022, 5, 1), 5)];
        let s = emotion_series(&preds, Resolution::Day, None);
        assert_eq!(s.buckets.len(), 1);
        assert_eq!(s.buckets.values().next().unwrap(), &[0, 0, 0, 0, 1, 1]);
        assert_eq!(s.bucket_key(*s.buckets.keys().next().unwrap()), "2022-05-01");
    }

    #[test]
    fn resolution_parsing() {
        assert_eq!("Day".parse::<Resolution>().unwrap(), Resolution::Day);
        assert!("week".parse::<Resolution>().is_err());
    }

    fn record_strategy() -> impl Strategy<Value = Vec<PredictionRecord>> {
        prop::collection::vec((0u32..600, 0u32..86_400, -1i64..6), 0..200).prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (day, sec, code))| {
                    let base = Timestamp::from_ymd_hms(2021, 6, 1, 0, 0, 0).unwrap().datetime();
                    let t = base + chrono::Duration::days(day as i64) + chrono::Duration::seconds(sec as i64);
                    rec(i, Some(Timestamp::new(t)), code)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn day_rollup_equals_month_series(preds in record_strategy()) {
            let days = emotion_series(&preds, Resolution::Day, None);
            let months = emotion_series(&preds, Resolution::Month, None);
            prop_assert_eq!(days.to_months(), months);
        }

        #[test]
        fn monthly_sums_to_classified_total(preds in record_strategy()) {
            let total: u64 = monthly_volume(&preds, None).iter().map(|r| r.count).sum();
            prop_assert_eq!(total, count_emotions(&preds, None).classified_total());
        }

        #[test]
        fn distribution_sums(counts in prop::array::uniform6(0u64..100_000)) {
            let c = EmotionCounts::from_counts(counts);
            prop_assume!(c.classified_total() > 0);
            let rows = distribution(&c).unwrap();
            prop_assert_eq!(rows.iter().map(|r| r.count).sum::<u64>(), c.classified_total());
            let pct: i64 = rows.iter().map(|r| r.percent_tenths as i64).sum();
            prop_assert!((pct - 1000).abs() <= 3);
            for r in rows {
                prop_assert_eq!(r.percent_tenths, oracle(r.count, c.classified_total()));
            }
        }

        #[test]
        fn distribution_scale_invariant(counts in prop::array::uniform6(0u64..10_000), k in 1u64..50) {
            let c = EmotionCounts::from_counts(counts);
            prop_assume!(c.classified_total() > 0);
            let scaled = EmotionCounts::from_counts(counts.map(|n| n * k));
            prop_assert_eq!(tenths(&distribution(&c).unwrap()), tenths(&distribution(&scaled).unwrap()));
        }
    }
}
