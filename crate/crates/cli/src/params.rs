//! Parsing of list, range and filter arguments.

use chrono::NaiveDate;
use unitrace_core::stats::TimeMapping;
use unitrace_core::RoundingOrder;

use crate::error::{CliError, CliResult};

/// Parses `2,4`, `1..7`, `1..=7`, `1-7` or any comma-separated mix.
/// Ranges are inclusive. Duplicates are dropped, first occurrence wins.
pub fn parse_uint_list(text: &str, what: &str) -> CliResult<Vec<u64>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim) {
        if part.is_empty() {
            return Err(CliError::param(format!("empty item in {what} list `{text}`")));
        }
        let bounds = part
            .split_once("..=")
            .or_else(|| part.split_once(".."))
            .or_else(|| part.split_once('-'));
        let num = |s: &str| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| CliError::param(format!("invalid {what} `{s}`")))
        };
        match bounds {
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo > hi {
                    return Err(CliError::param(format!("empty {what} range `{part}`")));
                }
                out.extend(lo..=hi);
            }
            None => out.push(num(part)?),
        }
    }
    let mut seen = Vec::with_capacity(out.len());
    for v in out {
        if !seen.contains(&v) {
            seen.push(v);
        }
    }
    if seen.is_empty() {
        return Err(CliError::param(format!("empty {what} list")));
    }
    Ok(seen)
}

pub fn parse_k_list(text: &str) -> CliResult<Vec<usize>> {
    let ks = parse_uint_list(text, "k")?;
    if ks.contains(&0) {
        return Err(CliError::param("k must be at least 1"));
    }
    Ok(ks.into_iter().map(|k| k as usize).collect())
}

pub fn parse_round_list(text: &str, allow_high: bool) -> CliResult<Vec<RoundingOrder>> {
    parse_uint_list(text, "rounding order")?
        .into_iter()
        .map(|r| {
            let r = u8::try_from(r).map_err(|_| CliError::param(format!("rounding order {r} too large")))?;
            let order = if allow_high {
                RoundingOrder::with_override(r)
            } else {
                RoundingOrder::new(r)
            };
            order.map_err(|e| CliError::param(e.to_string()))
        })
        .collect()
}

pub fn parse_values(text: &str) -> CliResult<Vec<u64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| CliError::param(format!("invalid query value `{s}`")))
        })
        .collect()
}

/// Hour-of-day range `a-b` meaning `a <= hour < b`, wrapping past midnight
/// when `a > b`; a single `h` selects one hour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HourRange {
    pub start: u32,
    pub end: u32,
}

impl HourRange {
    pub fn parse(text: &str) -> CliResult<Self> {
        let bad = || CliError::param(format!("invalid hour range `{text}`"));
        let hour = |s: &str| -> CliResult<u32> {
            let h: u32 = s.trim().parse().map_err(|_| bad())?;
            (h <= 24).then_some(h).ok_or_else(bad)
        };
        let range = match text.split_once('-') {
            Some((a, b)) => Self {
                start: hour(a)?,
                end: hour(b)?,
            },
            None => {
                let h = hour(text)?;
                Self { start: h, end: h + 1 }
            }
        };
        if range.start == range.end || range.start >= 24 {
            return Err(bad());
        }
        Ok(range)
    }

    pub fn contains(&self, hour: u32) -> bool {
        if self.start < self.end {
            (self.start..self.end).contains(&hour)
        } else {
            hour >= self.start || hour < self.end
        }
    }
}

/// Bound of a time filter: raw timestamp or calendar date.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeBound {
    Raw(u64),
    /// Local epoch seconds of a date's midnight.
    Local(i64),
}

impl TimeBound {
    pub fn parse(text: &str) -> CliResult<Self> {
        if let Ok(raw) = text.trim().parse::<u64>() {
            return Ok(TimeBound::Raw(raw));
        }
        parse_date(text.trim())
            .map(TimeBound::Local)
            .ok_or_else(|| CliError::param(format!("invalid time bound `{text}` (use an integer timestamp or YYYY-MM-DD)")))
    }
}

/// Restricts window starts by timestamp and hour of day.
#[derive(Debug, Clone, Default)]
pub struct TimeFilter {
    pub from: Option<TimeBound>,
    pub to: Option<TimeBound>,
    pub hours: Option<HourRange>,
}

impl TimeFilter {
    pub fn is_empty(&self) -> bool {
        self.from.is_none() && self.to.is_none() && self.hours.is_none()
    }

    /// Whether the window starting at `timestamp` is kept. `from` is
    /// inclusive and `to` exclusive.
    pub fn keeps(&self, timestamp: u64, mapping: &TimeMapping) -> CliResult<bool> {
        let local = |ts: u64| mapping.local_seconds(ts).map_err(|e| CliError::param(e.to_string()));
        let at_or_after = |bound: &TimeBound| -> CliResult<bool> {
            Ok(match *bound {
                TimeBound::Raw(b) => timestamp >= b,
                TimeBound::Local(b) => local(timestamp)? >= b,
            })
        };
        if let Some(from) = &self.from {
            if !at_or_after(from)? {
                return Ok(false);
            }
        }
        if let Some(to) = &self.to {
            if at_or_after(to)? {
                return Ok(false);
            }
        }
        if let Some(hours) = &self.hours {
            let secs = local(timestamp)?;
            let hour = secs.rem_euclid(86_400) / 3600;
            if !hours.contains(hour as u32) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn parse_date(text: &str) -> Option<i64> {
    let date = NaiveDate::parse_from_str(text, "%Y-%m-%d").ok()?;
    Some(date.and_hms_opt(0, 0, 0)?.and_utc().timestamp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_k_list("2,4").unwrap(), vec![2, 4]);
        assert_eq!(parse_k_list("1..7").unwrap(), (1..=7).collect::<Vec<_>>());
        assert_eq!(parse_k_list("1..=3,5,3").unwrap(), vec![1, 2, 3, 5]);
        assert_eq!(parse_k_list("2-4").unwrap(), vec![2, 3, 4]);
        assert!(parse_k_list("5..3").is_err());
        assert!(parse_k_list("").is_err());
        assert!(parse_k_list("0").is_err());
        assert!(parse_k_list("a").is_err());
    }

    #[test]
    fn rounding_orders() {
        let r = parse_round_list("0,1,2,3", false).unwrap();
        assert_eq!(r, RoundingOrder::standard().to_vec());
        assert!(parse_round_list("4", false).is_err());
        assert_eq!(parse_round_list("4", true).unwrap()[0].get(), 4);
        assert!(parse_round_list("300", true).is_err());
    }

    #[test]
    fn hours() {
        let evening = HourRange::parse("18-22").unwrap();
        assert!(evening.contains(18) && evening.contains(21) && !evening.contains(22));
        let night = HourRange::parse("22-6").unwrap();
        assert!(night.contains(23) && night.contains(0) && !night.contains(6));
        assert!(HourRange::parse("12").unwrap().contains(12));
        assert!(HourRange::parse("5-5").is_err());
        assert!(HourRange::parse("25").is_err());
    }

    #[test]
    fn dates() {
        assert_eq!(TimeBound::parse("2019-01-01").unwrap(), TimeBound::Local(1_546_300_800));
        assert_eq!(TimeBound::parse("1970-01-02").unwrap(), TimeBound::Local(86_400));
        assert_eq!(TimeBound::parse("42").unwrap(), TimeBound::Raw(42));
        assert!(TimeBound::parse("2019-13-01").is_err());
    }

    #[test]
    fn filter_by_date_and_hour() {
        let mapping = TimeMapping::epoch();
        let filter = TimeFilter {
            from: Some(TimeBound::parse("2019-01-02").unwrap()),
            to: None,
            hours: Some(HourRange::parse("18-22").unwrap()),
        };
        let day2 = 1_546_387_200;
        assert!(!filter.keeps(1_546_300_800 + 19 * 3600, &mapping).unwrap());
        assert!(filter.keeps(day2 + 19 * 3600, &mapping).unwrap());
        assert!(!filter.keeps(day2 + 9 * 3600, &mapping).unwrap());

        let raw = TimeFilter {
            from: Some(TimeBound::Raw(2)),
            to: Some(TimeBound::Raw(4)),
            hours: None,
        };
        let keep: Vec<u64> = (0..6).filter(|&t| raw.keeps(t, &mapping).unwrap()).collect();
        assert_eq!(keep, vec![2, 3]);
    }
}
