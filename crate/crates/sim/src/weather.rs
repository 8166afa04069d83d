//! Monthly wind and temperature series per borough: prevailing vector
//! plus a rotating seasonal component and independent per-borough noise
//! streams.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use smokeshift_core::{months_between, WindVector, YearMonth};

use crate::config::SimConfig;
use crate::rng::{stream, Domain};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeatherSeries {
    pub cb_id: String,
    /// Consecutive months, ascending.
    pub months: Vec<YearMonth>,
    pub wind: Vec<WindVector>,
    pub temperature_c: Vec<f64>,
}

impl WeatherSeries {
    /// (month, wind) pairs in the shape `mean_wind` consumes.
    pub fn wind_series(&self) -> Vec<(YearMonth, WindVector)> {
        self.months.iter().copied().zip(self.wind.iter().copied()).collect()
    }

    fn index(&self, t: YearMonth) -> Option<usize> {
        let first = *self.months.first()?;
        let offset = months_between(first, t);
        if offset < 0 || offset as usize >= self.months.len() {
            return None;
        }
        Some(offset as usize)
    }

    pub fn temperature_at(&self, t: YearMonth) -> Option<f64> {
        Some(self.temperature_c[self.index(t)?])
    }

    /// Temperatures for `from..=to`, or None when the series does not
    /// cover the whole range.
    pub fn temperature_between(&self, from: YearMonth, to: YearMonth) -> Option<Vec<f64>> {
        let lo = self.index(from)?;
        let hi = self.index(to)?;
        if hi < lo {
            return None;
        }
        Some(self.temperature_c[lo..=hi].to_vec())
    }
}

/// Months the weather series must span: the station panel window, plus
/// conception-through-age-two exposure around the cohort window, plus the
/// two years of wind history before the earliest possible submission.
pub fn weather_window(cfg: &SimConfig) -> (YearMonth, YearMonth) {
    let lo = cfg
        .panel_window
        .0
        .min(cfg.cohort_window.0.add_months(-9))
        .min(cfg.submission_window.0.add_months(-24));
    let hi = cfg.panel_window.1.max(cfg.cohort_window.1.add_months(24));
    (lo, hi)
}

/// One deterministic series per borough (ids follow the rollout naming),
/// spanning [`weather_window`].
pub fn generate_weather(cfg: &SimConfig) -> Vec<WeatherSeries> {
    let (lo, hi) = weather_window(cfg);
    let n_months = months_between(lo, hi) as usize + 1;
    let months: Vec<YearMonth> = (0..n_months).map(|k| lo.add_months(k as i64)).collect();
    let w = &cfg.weather;
    let wind_noise = Normal::new(0.0, w.wind_noise_sd).expect("validated sd");
    let temp_noise = Normal::new(0.0, w.temperature_noise_sd).expect("validated sd");

    (0..cfg.n_cbs)
        .map(|k| {
            let mut rng = stream(cfg.seed, Domain::Weather, k as u64);
            let mut wind = Vec::with_capacity(n_months);
            let mut temperature_c = Vec::with_capacity(n_months);
            for m in &months {
                let phase = 2.0 * std::f64::consts::PI * (m.month() - 1) as f64 / 12.0;
                let u = w.prevailing_east
                    + w.wind_seasonal_amplitude * phase.sin()
                    + wind_noise.sample(&mut rng);
                let v = w.prevailing_north
                    + w.wind_seasonal_amplitude * phase.cos()
                    + wind_noise.sample(&mut rng);
                let t = w.temperature_mean_c
                    - w.temperature_seasonal_amplitude_c * phase.cos()
                    + temp_noise.sample(&mut rng);
                wind.push(WindVector::new(u, v));
                temperature_c.push(t);
            }
            WeatherSeries {
                cb_id: format!("cb_{k:03}"),
                months: months.clone(),
                wind,
                temperature_c,
            }
        })
        .collect()
}
