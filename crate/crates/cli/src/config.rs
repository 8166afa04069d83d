//! Run configuration: one JSON file with global settings plus one block
//! per command. Unknown keys are rejected everywhere, and the manifest
//! echoes the config back with every default materialized.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use smokeshift_core::PlumeConfig;
use smokeshift_estimators::{ComparisonGroup, DesignSpec};
use smokeshift_sim::SimConfig;

use crate::error::{Error, Result};
use crate::format::read_json;

/// Which downwind region construction to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DownwindMethod {
    Triangle,
    ScaledPolygon,
    Plume,
}

/// Downwind classification settings: a construction method and the
/// weather file (one series per borough) that supplies the mean wind
/// over the 24 months before each SCA's submission.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DownwindConfig {
    pub method: DownwindMethod,
    pub weather: PathBuf,
    /// Plume grid settings; only read by the plume method.
    #[serde(default)]
    pub plume: PlumeConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignConfig {
    pub panel: PathBuf,
    pub boundaries: PathBuf,
    #[serde(default)]
    pub downwind: Option<DownwindConfig>,
}

fn default_population() -> f64 {
    100_000.0
}

/// Single-SCA plume evaluation: raster field plus downwind contour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlumeCommandConfig {
    pub boundaries: PathBuf,
    pub sca_id: String,
    /// Explicit monthly-mean wind in m/s; when absent, `weather` must be
    /// given and the pre-submission mean wind is used.
    #[serde(default)]
    pub wind_east: Option<f64>,
    #[serde(default)]
    pub wind_north: Option<f64>,
    #[serde(default)]
    pub weather: Option<PathBuf>,
    #[serde(default)]
    pub config: PlumeConfig,
    /// Emission scale; the contour is threshold-relative, so this only
    /// rescales reported concentrations.
    #[serde(default = "default_population")]
    pub cb_population_1951: f64,
}

fn default_pollutant() -> String {
    "black_smoke".to_owned()
}

/// Shared block for `event-study` and `did`: a station panel or an
/// individual cohort, boundaries, and a full design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    #[serde(default)]
    pub panel: Option<PathBuf>,
    #[serde(default)]
    pub individuals: Option<PathBuf>,
    pub boundaries: PathBuf,
    /// Station runs only; which pollutant series to keep.
    #[serde(default = "default_pollutant")]
    pub pollutant: String,
    pub spec: DesignSpec,
    /// Keep treated rows within this many months of their submission.
    #[serde(default)]
    pub trim_months: Option<i64>,
    #[serde(default)]
    pub downwind: Option<DownwindConfig>,
}

/// Which schedule month marks a station's treatment start in the
/// group-time estimator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreatmentAnchor {
    /// Conversions start at submission; this is the event anchor.
    #[default]
    Submission,
    Operation,
}

fn default_reps() -> usize {
    smokeshift_estimators::DEFAULT_BOOTSTRAP_REPS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GtaConfig {
    pub panel: PathBuf,
    pub boundaries: PathBuf,
    #[serde(default = "default_pollutant")]
    pub pollutant: String,
    #[serde(default)]
    pub comparison: ComparisonGroup,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub anchor: TreatmentAnchor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseTimingConfig {
    pub panel: PathBuf,
    pub boundaries: PathBuf,
    #[serde(default = "default_pollutant")]
    pub pollutant: String,
}

/// The whole run configuration. The global `seed` feeds every random
/// stage (simulation sub-seeds, bootstrap reps); a `seed` inside the
/// simulate block is overridden by it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub threads: usize,
    pub output_dir: PathBuf,
    pub log_level: String,
    pub simulate: Option<SimConfig>,
    pub assign: Option<AssignConfig>,
    pub plume: Option<PlumeCommandConfig>,
    pub event_study: Option<EstimateConfig>,
    pub did: Option<EstimateConfig>,
    pub gta: Option<GtaConfig>,
    pub diagnose_timing: Option<DiagnoseTimingConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            threads: 1,
            output_dir: PathBuf::from("out"),
            log_level: "warn".to_owned(),
            simulate: None,
            assign: None,
            plume: None,
            event_study: None,
            did: None,
            gta: None,
            diagnose_timing: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let config: Self = read_json(path)?;
        if config.threads == 0 {
            return Err(Error::Config("threads must be at least 1".to_owned()));
        }
        Ok(config)
    }

    /// Command-line flags win over the file.
    pub fn apply_overrides(
        &mut self,
        seed: Option<u64>,
        threads: Option<usize>,
        out: Option<PathBuf>,
    ) -> Result<()> {
        if let Some(seed) = seed {
            self.seed = seed;
        }
        if let Some(threads) = threads {
            if threads == 0 {
                return Err(Error::Config("threads must be at least 1".to_owned()));
            }
            self.threads = threads;
        }
        if let Some(out) = out {
            self.output_dir = out;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load_str(json: &str) -> Result<RunConfig> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        std::fs::write(&path, json).unwrap();
        RunConfig::load(&path)
    }

    #[test]
    fn empty_object_gets_all_defaults() {
        let config = load_str("{}").unwrap();
        assert_eq!(config, RunConfig::default());
        assert_eq!(config.seed, 1);
        assert_eq!(config.threads, 1);
        assert_eq!(config.output_dir, PathBuf::from("out"));
    }

    #[test]
    fn unknown_keys_are_rejected_at_every_level() {
        let top = load_str(r#"{"seeed": 3}"#).unwrap_err().to_string();
        assert!(top.contains("seeed"), "{top}");
        let nested = load_str(r#"{"simulate": {"n_cbs": 4, "n_cbz": 4}}"#)
            .unwrap_err()
            .to_string();
        assert!(nested.contains("n_cbz"), "{nested}");
        let block = load_str(r#"{"gta": {"panel": "p.csv", "boundaries": "b.geojson", "rep": 9}}"#)
            .unwrap_err()
            .to_string();
        assert!(block.contains("rep"), "{block}");
    }

    #[test]
    fn overrides_win_over_the_file() {
        let mut config = load_str(r#"{"seed": 7, "threads": 2}"#).unwrap();
        config
            .apply_overrides(Some(11), Some(4), Some(PathBuf::from("elsewhere")))
            .unwrap();
        assert_eq!(config.seed, 11);
        assert_eq!(config.threads, 4);
        assert_eq!(config.output_dir, PathBuf::from("elsewhere"));
        assert!(config.apply_overrides(None, Some(0), None).is_err());
    }

    #[test]
    fn gta_block_defaults_are_filled() {
        let config = load_str(
            r#"{"gta": {"panel": "p.csv", "boundaries": "b.geojson"}}"#,
        )
        .unwrap();
        let gta = config.gta.unwrap();
        assert_eq!(gta.pollutant, "black_smoke");
        assert_eq!(gta.comparison, ComparisonGroup::NeverTreated);
        assert_eq!(gta.reps, 999);
        assert_eq!(gta.anchor, TreatmentAnchor::Submission);
    }
}
