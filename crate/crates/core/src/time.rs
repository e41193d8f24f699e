//! UTC timestamps at second precision and inclusive time windows.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime, NaiveTime, SubsecRound, TimeZone, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(DateTime<Utc>);

impl Timestamp {
    pub fn new(dt: DateTime<Utc>) -> Self {
        Timestamp(dt.trunc_subsecs(0))
    }

    pub fn from_ymd_hms(y: i32, mo: u32, d: u32, h: u32, mi: u32, s: u32) -> Option<Self> {
        Utc.with_ymd_and_hms(y, mo, d, h, mi, s).single().map(Timestamp)
    }

    pub fn datetime(&self) -> DateTime<Utc> {
        self.0
    }

    pub fn date(&self) -> NaiveDate {
        self.0.date_naive()
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }

    /// `YYYY-MM` key of the UTC month.
    pub fn month_key(&self) -> String {
        format!("{:04}-{:02}", self.0.year(), self.0.month())
    }

    /// Parses an ISO-8601 timestamp. Offsets are converted to UTC; a missing
    /// offset is read as UTC. Both `T` and a space separate date and time.
    pub fn parse_iso(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
            return Ok(Timestamp::new(dt.with_timezone(&Utc)));
        }
        for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f%:z"] {
            if let Ok(dt) = DateTime::parse_from_str(s, fmt) {
                return Ok(Timestamp::new(dt.with_timezone(&Utc)));
            }
            if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
                return Ok(Timestamp::new(naive.and_utc()));
            }
        }
        if let Some(stripped) = s.strip_suffix(" UTC").or_else(|| s.strip_suffix('Z')) {
            if let Ok(naive) = NaiveDateTime::parse_from_str(stripped.trim(), "%Y-%m-%d %H:%M:%S%.f") {
                return Ok(Timestamp::new(naive.and_utc()));
            }
        }
        Err(Error::Validation(format!("unparseable timestamp {s:?}")))
    }

    /// Parses with an explicit strftime-style pattern. Patterns without an
    /// offset specifier are read as UTC.
    pub fn parse_with_format(s: &str, format: &str) -> Result<Self> {
        let s = s.trim();
        DateTime::parse_from_str(s, format)
            .map(|dt| Timestamp::new(dt.with_timezone(&Utc)))
            .or_else(|_| NaiveDateTime::parse_from_str(s, format).map(|n| Timestamp::new(n.and_utc())))
            .map_err(|e| Error::Validation(format!("timestamp {s:?} does not match {format:?}: {e}")))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%dT%H:%M:%SZ"))
    }
}

impl FromStr for Timestamp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Timestamp::parse_iso(s)
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Timestamp::parse_iso(&s).map_err(serde::de::Error::custom)
    }
}

/// Inclusive `[start, end]` interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeWindow {
    start: Timestamp,
    end: Timestamp,
}

impl TimeWindow {
    pub fn new(start: Timestamp, end: Timestamp) -> Result<Self> {
        if start > end {
            return Err(Error::Validation(format!(
                "time window start {start} is after end {end}"
            )));
        }
        Ok(TimeWindow { start, end })
    }

    /// June 1, 2021 through December 31, 2022, inclusive.
    pub fn study_period() -> Self {
        TimeWindow {
            start: Timestamp::from_ymd_hms(2021, 6, 1, 0, 0, 0).unwrap(),
            end: Timestamp::from_ymd_hms(2022, 12, 31, 23, 59, 59).unwrap(),
        }
    }

    /// The whole calendar year in UTC.
    pub fn year(year: i32) -> Result<Self> {
        let start = Timestamp::from_ymd_hms(year, 1, 1, 0, 0, 0);
        let end = Timestamp::from_ymd_hms(year, 12, 31, 23, 59, 59);
        match (start, end) {
            (Some(start), Some(end)) => Ok(TimeWindow { start, end }),
            _ => Err(Error::Validation(format!("year {year} out of range"))),
        }
    }

    /// Builds a window from optional bounds given as timestamps or bare
    /// `YYYY-MM-DD` dates. A bare end date covers that whole day.
    pub fn from_bounds(from: Option<&str>, to: Option<&str>) -> Result<Option<Self>> {
        if from.is_none() && to.is_none() {
            return Ok(None);
        }
        let start = match from {
            Some(s) => parse_bound(s, false)?,
            None => Timestamp::new(DateTime::<Utc>::MIN_UTC),
        };
        let end = match to {
            Some(s) => parse_bound(s, true)?,
            None => Timestamp::new(DateTime::<Utc>::MAX_UTC),
        };
        TimeWindow::new(start, end).map(Some)
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    pub fn end(&self) -> Timestamp {
        self.end
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        self.start <= t && t <= self.end
    }
}

fn parse_bound(s: &str, is_end: bool) -> Result<Timestamp> {
    if let Ok(date) = NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d") {
        let time = if is_end {
            NaiveTime::from_hms_opt(23, 59, 59).unwrap()
        } else {
            NaiveTime::MIN
        };
        return Ok(Timestamp::new(date.and_time(time).and_utc()));
    }
    Timestamp::parse_iso(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_iso_variants() {
        let want = Timestamp::from_ymd_hms(2022, 5, 3, 10, 0, 0).unwrap();
        for s in [
            "2022-05-03T10:00:00Z",
            "2022-05-03T10:00:00",
            "2022-05-03 10:00:00",
            "2022-05-03T13:00:00+03:00",
            "2022-05-03T10:00:00.250Z",
            "2022-05-03 10:00:00 UTC",
        ] {
            assert_eq!(Timestamp::parse_iso(s).unwrap(), want, "{s}");
        }
        assert!(Timestamp::parse_iso("yesterday").is_err());
    }

    #[test]
    fn legacy_twitter_format() {
        let t = Timestamp::parse_with_format("Tue May 03 10:00:00 +0000 2022", "%a %b %d %H:%M:%S %z %Y").unwrap();
        assert_eq!(t.to_string(), "2022-05-03T10:00:00Z");
        let t = Timestamp::parse_with_format("03/05/2022 10:00", "%d/%m/%Y %H:%M").unwrap();
        assert_eq!(t.to_string(), "2022-05-03T10:00:00Z");
    }

    #[test]
    fn window_rejects_inverted_bounds() {
        let a = Timestamp::from_ymd_hms(2022, 1, 1, 0, 0, 0).unwrap();
        let b = Timestamp::from_ymd_hms(2021, 1, 1, 0, 0, 0).unwrap();
        assert!(TimeWindow::new(a, b).is_err());
        assert!(TimeWindow::new(a, a).is_ok());
    }

    #[test]
    fn date_bounds_cover_whole_days() {
        let w = TimeWindow::from_bounds(Some("2021-06-01"), Some("2022-12-31")).unwrap().unwrap();
        assert_eq!(w, TimeWindow::study_period());
        assert!(TimeWindow::from_bounds(None, None).unwrap().is_none());
    }
}
