//! Calendar arithmetic on year-month panels.
//!
//! Every clock in the pipeline runs on [`YearMonth`]: pollution panels are
//! monthly, birth cohorts are monthly, and treatment milestones are recorded
//! as year-months. Differences are exact integer month counts; there is no
//! day-of-month resolution anywhere. Event time is binned with the
//! convention that the bin ending the month before the event is -1 and the
//! bin starting at the event month is 0, for any bin width.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A Gregorian calendar month. Ordering is calendar order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    year: i32,
    month: u8,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidMonth(month));
        }
        Ok(Self {
            year,
            month: month as u8,
        })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    /// Month of year in 1..=12.
    pub fn month(self) -> u32 {
        self.month as u32
    }

    /// Months since 0000-01; the working representation for differences.
    fn index(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    fn from_index(index: i64) -> Self {
        Self {
            year: index.div_euclid(12) as i32,
            month: (index.rem_euclid(12) + 1) as u8,
        }
    }

    /// Calendar shift by a signed number of months.
    pub fn add_months(self, months: i64) -> Self {
        Self::from_index(self.index() + months)
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::ParseYearMonth(s.to_owned());
        let (y, m) = s.rsplit_once('-').ok_or_else(err)?;
        let year: i32 = y.parse().map_err(|_| err())?;
        let month: u32 = m.parse().map_err(|_| err())?;
        Self::new(year, month).map_err(|_| err())
    }
}

impl Serialize for YearMonth {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YearMonth {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Position of a month relative to a treatment schedule. The three phases
/// partition the time axis: Pre before submission, Adjustment from
/// submission up to (excluding) operation, Post from operation on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreatmentPhase {
    Pre,
    Adjustment,
    Post,
}

/// Signed month count from `a` to `b`; antisymmetric.
pub fn months_between(a: YearMonth, b: YearMonth) -> i64 {
    b.index() - a.index()
}

/// Conception under the standard nine-month full-term assumption.
pub fn conception_month(birth: YearMonth) -> YearMonth {
    birth.add_months(-9)
}

/// Relative event time of `t` in bins of `bin_width_months`.
///
/// Floor division, so the bin covering the `bin_width_months` months before
/// the event is -1 and the bin starting at the event month is 0.
pub fn relative_event_time(event: YearMonth, t: YearMonth, bin_width_months: u32) -> i64 {
    assert!(bin_width_months > 0, "bin width must be positive");
    months_between(event, t).div_euclid(bin_width_months as i64)
}

/// Keeps items whose clock lies within `half_width_months` of `event`,
/// inclusive on both edges. Idempotent.
pub fn trim_to_window<T, F>(
    items: Vec<T>,
    event: YearMonth,
    half_width_months: i64,
    time_of: F,
) -> Vec<T>
where
    F: Fn(&T) -> YearMonth,
{
    assert!(half_width_months > 0, "window half-width must be positive");
    items
        .into_iter()
        .filter(|item| months_between(event, time_of(item)).abs() <= half_width_months)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ym(year: i32, month: u32) -> YearMonth {
        YearMonth::new(year, month).unwrap()
    }

    #[test]
    fn months_between_examples() {
        assert_eq!(months_between(ym(1960, 3), ym(1960, 3)), 0);
        assert_eq!(months_between(ym(1960, 1), ym(1961, 1)), 12);
        assert_eq!(months_between(ym(1962, 11), ym(1961, 5)), -18);
    }

    #[test]
    fn month_range_is_validated() {
        assert!(YearMonth::new(1960, 0).is_err());
        assert!(YearMonth::new(1960, 13).is_err());
        assert!(YearMonth::new(1960, 12).is_ok());
    }

    #[test]
    fn conception_is_nine_months_before_birth() {
        assert_eq!(conception_month(ym(1960, 9)), ym(1959, 12));
        assert_eq!(conception_month(ym(1960, 1)), ym(1959, 4));
        assert_eq!(conception_month(ym(1958, 3)), ym(1957, 6));
    }

    #[test]
    fn relative_event_time_six_month_bins() {
        let event = ym(1960, 1);
        // Conceived six months before submission: bin -1.
        assert_eq!(relative_event_time(event, event.add_months(-6), 6), -1);
        // Conceived twelve months after submission: bin 2.
        assert_eq!(relative_event_time(event, event.add_months(12), 6), 2);
    }

    #[test]
    fn relative_event_time_monthly_bins() {
        let event = ym(1960, 1);
        assert_eq!(relative_event_time(event, event, 1), 0);
        assert_eq!(relative_event_time(event, event.add_months(-1), 1), -1);
    }

    #[test]
    fn trim_window_is_inclusive_and_idempotent() {
        let event = ym(1960, 1);
        let months: Vec<YearMonth> = (-70..=70).map(|m| event.add_months(m)).collect();
        let trimmed = trim_to_window(months, event, 60, |t| *t);
        assert_eq!(trimmed.len(), 121);
        assert_eq!(trimmed.first().copied(), Some(event.add_months(-60)));
        assert_eq!(trimmed.last().copied(), Some(event.add_months(60)));
        let again = trim_to_window(trimmed.clone(), event, 60, |t| *t);
        assert_eq!(again, trimmed);
    }

    #[test]
    fn narrow_trim_reproduces_two_year_sample() {
        let event = ym(1960, 1);
        let months: Vec<YearMonth> = (-70..=70).map(|m| event.add_months(m)).collect();
        let trimmed = trim_to_window(months, event, 24, |t| *t);
        assert_eq!(trimmed.len(), 49);
    }

    #[test]
    fn year_month_round_trips_through_text() {
        for (y, m) in [(1955, 1), (1960, 12), (2026, 7)] {
            let v = ym(y, m);
            assert_eq!(v.to_string().parse::<YearMonth>().unwrap(), v);
        }
        assert!("1960-13".parse::<YearMonth>().is_err());
        assert!("1960".parse::<YearMonth>().is_err());
        assert!("196O-01".parse::<YearMonth>().is_err());
    }

    #[test]
    fn serde_uses_year_month_strings() {
        let v = ym(1962, 4);
        assert_eq!(serde_json::to_string(&v).unwrap(), "\"1962-04\"");
        let back: YearMonth = serde_json::from_str("\"1962-04\"").unwrap();
        assert_eq!(back, v);
    }

    proptest! {
        #[test]
        fn months_between_is_antisymmetric(
            y1 in 1900i32..2100, m1 in 1u32..=12,
            y2 in 1900i32..2100, m2 in 1u32..=12,
        ) {
            let a = ym(y1, m1);
            let b = ym(y2, m2);
            prop_assert_eq!(months_between(a, b), -months_between(b, a));
        }

        #[test]
        fn add_months_inverts_difference(
            y in 1900i32..2100, m in 1u32..=12, delta in -600i64..600,
        ) {
            let a = ym(y, m);
            let b = a.add_months(delta);
            prop_assert_eq!(months_between(a, b), delta);
            prop_assert!((1..=12).contains(&b.month()));
        }

        #[test]
        fn ordering_matches_month_difference(
            y1 in 1900i32..2100, m1 in 1u32..=12,
            y2 in 1900i32..2100, m2 in 1u32..=12,
        ) {
            let a = ym(y1, m1);
            let b = ym(y2, m2);
            prop_assert_eq!(a < b, months_between(a, b) > 0);
        }

        #[test]
        fn bin_minus_one_ends_at_event(offset in -120i64..120, width in prop::sample::select(vec![1u32, 6])) {
            let event = ym(1960, 1);
            let t = event.add_months(offset);
            let tau = relative_event_time(event, t, width);
            // Bin index matches the half-open month range [tau*w, (tau+1)*w).
            prop_assert!(tau * width as i64 <= offset);
            prop_assert!(offset < (tau + 1) * width as i64);
        }
    }
}
