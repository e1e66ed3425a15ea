//! Calendar month used as the canonical time axis.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A calendar month. Ordered by `(year, month)`; serialized as `YYYY-MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthIndex {
    year: i32,
    month: u8,
}

impl MonthIndex {
    pub fn new(year: i32, month: u32) -> Result<Self, Error> {
        if !(1..=12).contains(&month) {
            return Err(Error::MalformedInput(format!("month {month} out of range 1..12")));
        }
        Ok(Self { year, month: month as u8 })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    /// Month of year, 1..=12.
    pub fn month(self) -> u32 {
        u32::from(self.month)
    }

    /// Zero-based position of the month within its year (January = 0).
    pub fn month0(self) -> usize {
        usize::from(self.month - 1)
    }

    fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    fn from_ordinal(ord: i64) -> Self {
        let year = ord.div_euclid(12) as i32;
        let month = (ord.rem_euclid(12) + 1) as u8;
        Self { year, month }
    }

    pub fn succ(self) -> Self {
        self.add_months(1)
    }

    pub fn pred(self) -> Self {
        self.add_months(-1)
    }

    pub fn add_months(self, delta: i64) -> Self {
        Self::from_ordinal(self.ordinal() + delta)
    }

    /// Signed number of months from `earlier` to `self`.
    pub fn months_since(self, earlier: MonthIndex) -> i64 {
        self.ordinal() - earlier.ordinal()
    }
}

impl fmt::Display for MonthIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for MonthIndex {
    type Err = Error;

    /// Strict `YYYY-MM`: four digit year, two digit month.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::MalformedInput(format!("malformed month token {s:?}, expected YYYY-MM"));
        let bytes = s.as_bytes();
        if bytes.len() != 7 || bytes[4] != b'-' {
            return Err(bad());
        }
        let digits = |r: std::ops::Range<usize>| -> Option<u32> {
            let part = &s[r];
            if part.bytes().all(|b| b.is_ascii_digit()) {
                part.parse().ok()
            } else {
                None
            }
        };
        let year = digits(0..4).ok_or_else(bad)?;
        let month = digits(5..7).ok_or_else(bad)?;
        MonthIndex::new(year as i32, month).map_err(|_| bad())
    }
}

impl Serialize for MonthIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonthIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(y: i32, mo: u32) -> MonthIndex {
        MonthIndex::new(y, mo).unwrap()
    }

    #[test]
    fn successor_wraps_year() {
        assert_eq!(m(2015, 12).succ(), m(2016, 1));
        assert_eq!(m(2016, 1).pred(), m(2015, 12));
        assert_eq!(m(2015, 1).add_months(46), m(2018, 11));
    }

    #[test]
    fn ordering_is_year_then_month() {
        assert!(m(2015, 12) < m(2016, 1));
        assert!(m(2016, 2) > m(2016, 1));
        assert_eq!(m(2018, 11).months_since(m(2015, 1)), 46);
    }

    #[test]
    fn strict_token_parsing() {
        assert_eq!("2015-03".parse::<MonthIndex>().unwrap(), m(2015, 3));
        for bad in ["2015-3", "15-03", "2015/03", "2015-13", "2015-00", "abcd-01", " 2015-01", "+201-01"] {
            assert!(bad.parse::<MonthIndex>().is_err(), "{bad} accepted");
        }
    }

    #[test]
    fn serde_as_string() {
        let json = serde_json::to_string(&m(2018, 11)).unwrap();
        assert_eq!(json, "\"2018-11\"");
        let back: MonthIndex = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m(2018, 11));
    }
}
