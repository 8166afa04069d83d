//! Station-level pollution panel: monthly black smoke and SO2 series
//! with station intercepts, seasonality, station trends, noise, and the
//! injected SCA effects on black smoke only.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use smokeshift_core::{
    months_between, phase_of, PanelObservation, Point, Pollutant, TreatmentPhase, YearMonth,
};

use crate::config::{GroundTruth, SimConfig};
use crate::rng::{stream, Domain};
use crate::rollout::{Rollout, CB_SIDE_M};

/// Mean black smoke level at an untreated station, mcg/m³. High enough
/// that the linear DGP stays positive at the configured noise levels.
pub const BLACK_SMOKE_BASE: f64 = 120.0;

/// Mean SO2 level, mcg/m³; SO2 carries no injected effect.
pub const SO2_BASE: f64 = 90.0;

/// S.d. of station intercepts around the base level.
pub const STATION_INTERCEPT_SD: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulatedStation {
    pub station_id: String,
    pub cb_id: String,
    pub location: Point,
    /// SCA id when the station sits inside one.
    pub inside_sca: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationPanel {
    pub stations: Vec<SimulatedStation>,
    pub observations: Vec<PanelObservation>,
    pub truth: GroundTruth,
}

/// Uniform draw from the borough square, inset 5% per side so stations
/// never sit on shared CB edges.
pub(crate) fn interior_point<R: Rng>(rng: &mut R, x0: f64, y0: f64, side: f64) -> Point {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    Point::new(x0 + (0.05 + 0.9 * u) * side, y0 + (0.05 + 0.9 * v) * side)
}

/// Monthly observations for every station over the panel window:
/// y = intercept + seasonal cosine + station trend + injected phase
/// effect (black smoke, inside SCA only) + noise.
pub fn generate_panel(cfg: &SimConfig, rollout: &Rollout) -> StationPanel {
    let (lo, hi) = cfg.panel_window;
    let n_months = months_between(lo, hi) as usize + 1;
    let months: Vec<YearMonth> = (0..n_months).map(|k| lo.add_months(k as i64)).collect();
    let intercept = Normal::new(0.0, STATION_INTERCEPT_SD).expect("fixed sd");
    let trend = Normal::new(0.0, cfg.station_trend_sd).expect("validated sd");
    let noise = Normal::new(0.0, cfg.noise_sd).expect("validated sd");

    let mut stations = Vec::new();
    let mut observations = Vec::new();
    for (k, site) in rollout.cbs.iter().enumerate() {
        let mut rng = stream(cfg.seed, Domain::StationPanel, k as u64);
        let (bb_min, _) = site.cb.boundary.bounding_box();
        for s in 0..cfg.n_stations_per_cb {
            let location = interior_point(&mut rng, bb_min.easting, bb_min.northing, CB_SIDE_M);
            let inside = site
                .sca
                .as_ref()
                .filter(|sca| sca.boundary.contains(location));
            let intercept_bs = BLACK_SMOKE_BASE + intercept.sample(&mut rng);
            let intercept_so2 = SO2_BASE + intercept.sample(&mut rng);
            let trend_bs = trend.sample(&mut rng);
            let trend_so2 = trend.sample(&mut rng);
            let station_id = format!("st_{k:03}_{s:02}");

            for &m in &months {
                let t_years = months_between(lo, m) as f64 / 12.0;
                let phase = 2.0 * std::f64::consts::PI * (m.month() - 1) as f64 / 12.0;
                let seasonal = cfg.seasonal_amplitude * phase.cos();
                let effect = match inside {
                    Some(sca) => match phase_of(m, sca.submission, sca.operation) {
                        TreatmentPhase::Pre => 0.0,
                        TreatmentPhase::Adjustment => cfg.effects.beta_adj,
                        TreatmentPhase::Post => cfg.effects.beta_post,
                    },
                    None => 0.0,
                };
                let bs = intercept_bs
                    + seasonal
                    + trend_bs * t_years
                    + effect
                    + noise.sample(&mut rng);
                let so2 = intercept_so2
                    + 0.6 * seasonal
                    + trend_so2 * t_years
                    + noise.sample(&mut rng);
                for (pollutant, value) in
                    [(Pollutant::BlackSmoke, bs), (Pollutant::So2, so2)]
                {
                    observations.push(PanelObservation {
                        station_id: station_id.clone(),
                        cb_id: site.cb.cb_id.clone(),
                        location,
                        time: m,
                        pollutant,
                        concentration: value,
                    });
                }
            }
            stations.push(SimulatedStation {
                station_id,
                cb_id: site.cb.cb_id.clone(),
                location,
                inside_sca: inside.map(|sca| sca.sca_id.clone()),
            });
        }
    }
    StationPanel {
        stations,
        observations,
        truth: cfg.effects,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rollout::generate_rollout;

    /// Deterministic schedule: every borough adopts, submission pinned to
    /// 1960-06, operation 1961-10.
    fn pinned_config() -> SimConfig {
        let mut cfg = SimConfig::default();
        cfg.n_cbs = 10;
        cfg.share_adopting = 1.0;
        cfg.submission_window = (
            YearMonth::new(1960, 6).unwrap(),
            YearMonth::new(1960, 6).unwrap(),
        );
        cfg
    }

    #[test]
    fn panel_is_deterministic_and_complete() {
        let cfg = SimConfig::default();
        let rollout = generate_rollout(&cfg).unwrap();
        let a = generate_panel(&cfg, &rollout);
        let b = generate_panel(&cfg, &rollout);
        assert_eq!(a, b);
        let n_months = months_between(cfg.panel_window.0, cfg.panel_window.1) as usize + 1;
        assert_eq!(a.stations.len(), cfg.n_cbs * cfg.n_stations_per_cb);
        assert_eq!(a.observations.len(), a.stations.len() * n_months * 2);
    }

    #[test]
    fn without_noise_or_effects_stations_differ_by_constants() {
        let mut cfg = pinned_config();
        cfg.noise_sd = 0.0;
        cfg.station_trend_sd = 0.0;
        cfg.effects.beta_adj = 0.0;
        cfg.effects.beta_post = 0.0;
        let rollout = generate_rollout(&cfg).unwrap();
        let panel = generate_panel(&cfg, &rollout);
        let series = |sid: &str| -> Vec<f64> {
            panel
                .observations
                .iter()
                .filter(|o| o.station_id == sid && o.pollutant == Pollutant::BlackSmoke)
                .map(|o| o.concentration)
                .collect()
        };
        let a = series(&panel.stations[0].station_id);
        let b = series(&panel.stations[1].station_id);
        let gap = a[0] - b[0];
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y - gap).abs() < 1e-9);
        }
    }

    #[test]
    fn injected_effects_shift_only_treated_phases_of_black_smoke() {
        let mut cfg = pinned_config();
        cfg.noise_sd = 0.0;
        cfg.station_trend_sd = 0.0;
        let rollout = generate_rollout(&cfg).unwrap();
        let panel = generate_panel(&cfg, &rollout);
        let inside = panel
            .stations
            .iter()
            .find(|s| s.inside_sca.is_some())
            .expect("some station falls inside an SCA");
        let at = |t: YearMonth, pollutant: Pollutant| -> f64 {
            panel
                .observations
                .iter()
                .find(|o| o.station_id == inside.station_id && o.time == t && o.pollutant == pollutant)
                .unwrap()
                .concentration
        };
        // Same month-of-year, so seasonality cancels: pre 1956-01,
        // adjustment 1961-01, post 1962-01.
        let pre = at(YearMonth::new(1956, 1).unwrap(), Pollutant::BlackSmoke);
        let adj = at(YearMonth::new(1961, 1).unwrap(), Pollutant::BlackSmoke);
        let post = at(YearMonth::new(1962, 1).unwrap(), Pollutant::BlackSmoke);
        assert!((adj - pre - cfg.effects.beta_adj).abs() < 1e-9);
        assert!((post - pre - cfg.effects.beta_post).abs() < 1e-9);
        // SO2 is untouched by the schedule.
        let pre_so2 = at(YearMonth::new(1956, 1).unwrap(), Pollutant::So2);
        let post_so2 = at(YearMonth::new(1962, 1).unwrap(), Pollutant::So2);
        assert!((post_so2 - pre_so2).abs() < 1e-9);
    }

    #[test]
    fn outside_stations_never_receive_the_effect() {
        let mut cfg = pinned_config();
        cfg.noise_sd = 0.0;
        cfg.station_trend_sd = 0.0;
        let rollout = generate_rollout(&cfg).unwrap();
        let panel = generate_panel(&cfg, &rollout);
        let outside = panel
            .stations
            .iter()
            .find(|s| s.inside_sca.is_none())
            .expect("some station falls outside every SCA");
        let series: Vec<&PanelObservation> = panel
            .observations
            .iter()
            .filter(|o| o.station_id == outside.station_id && o.pollutant == Pollutant::BlackSmoke)
            .collect();
        let pre = series
            .iter()
            .find(|o| o.time == YearMonth::new(1956, 1).unwrap())
            .unwrap()
            .concentration;
        let post = series
            .iter()
            .find(|o| o.time == YearMonth::new(1962, 1).unwrap())
            .unwrap()
            .concentration;
        assert!((post - pre).abs() < 1e-9);
    }

    #[test]
    fn concentrations_stay_positive_at_default_noise() {
        let cfg = SimConfig::default();
        let rollout = generate_rollout(&cfg).unwrap();
        let panel = generate_panel(&cfg, &rollout);
        assert!(panel.observations.iter().all(|o| o.concentration > 0.0));
    }
}
