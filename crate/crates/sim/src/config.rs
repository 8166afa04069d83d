//! Simulation configuration: rollout shape, injected ground truth, and
//! nuisance-process parameters. Everything downstream is a pure function
//! of one `SimConfig`, seed included.

use rand::Rng;
use serde::{Deserialize, Serialize};
use smokeshift_core::{OutcomeKind, YearMonth};

use crate::error::{Error, Result};

/// Distribution of the gap in months between submission and operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum GapDistribution {
    PointMass { months: u32 },
    Uniform { min_months: u32, max_months: u32 },
}

impl Default for GapDistribution {
    fn default() -> Self {
        GapDistribution::PointMass { months: 16 }
    }
}

impl GapDistribution {
    pub fn validate(&self) -> Result<()> {
        if let GapDistribution::Uniform {
            min_months,
            max_months,
        } = self
        {
            if min_months > max_months {
                return Err(Error::InvalidConfig(format!(
                    "gap range {min_months}..{max_months} is empty"
                )));
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        match *self {
            GapDistribution::PointMass { months } => months,
            GapDistribution::Uniform {
                min_months,
                max_months,
            } => rng.random_range(min_months..=max_months),
        }
    }
}

/// Per-outcome coefficients on (standardized polygenic score) x (inside,
/// post-at-conception), in the outcome's own units per score s.d.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PgsInteractions {
    pub birth_weight: f64,
    pub height: f64,
    pub education: f64,
    pub fluid_intelligence: f64,
}

impl PgsInteractions {
    pub fn get(&self, kind: OutcomeKind) -> f64 {
        match kind {
            OutcomeKind::BirthWeight => self.birth_weight,
            OutcomeKind::Height => self.height,
            OutcomeKind::YearsEducation => self.education,
            OutcomeKind::FluidIntelligence => self.fluid_intelligence,
        }
    }
}

/// The injected treatment effects every estimator is judged against.
/// Station effects are in mcg/m³; individual effects are in the outcome's
/// units and apply to births conceived in the post phase inside an SCA.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroundTruth {
    /// Concentration shift while an SCA is between submission and operation.
    pub beta_adj: f64,
    /// Concentration shift from the operation month onward.
    pub beta_post: f64,
    /// Grams of birth weight.
    pub effect_bw: f64,
    /// Centimeters of adult height.
    pub effect_height: f64,
    /// Years of education.
    pub effect_edu: f64,
    /// Fluid intelligence, in z units.
    pub effect_fi: f64,
    /// Extra birth-weight grams of the effect for male births.
    pub sex_interaction: f64,
    /// Extra birth-weight grams of the effect in low-SES areas.
    pub ses_interaction: f64,
    pub pgs_interaction: PgsInteractions,
}

impl Default for GroundTruth {
    fn default() -> Self {
        Self {
            beta_adj: -8.0,
            beta_post: -19.0,
            effect_bw: 60.0,
            effect_height: 1.0,
            effect_edu: 0.0,
            effect_fi: 0.0,
            sex_interaction: 0.0,
            ses_interaction: 0.0,
            pgs_interaction: PgsInteractions::default(),
        }
    }
}

impl GroundTruth {
    /// Base (female, average-score, non-low-SES) effect for an outcome.
    pub fn outcome_effect(&self, kind: OutcomeKind) -> f64 {
        match kind {
            OutcomeKind::BirthWeight => self.effect_bw,
            OutcomeKind::Height => self.effect_height,
            OutcomeKind::YearsEducation => self.effect_edu,
            OutcomeKind::FluidIntelligence => self.effect_fi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let values = [
            self.beta_adj,
            self.beta_post,
            self.effect_bw,
            self.effect_height,
            self.effect_edu,
            self.effect_fi,
            self.sex_interaction,
            self.ses_interaction,
            self.pgs_interaction.birth_weight,
            self.pgs_interaction.height,
            self.pgs_interaction.education,
            self.pgs_interaction.fluid_intelligence,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("non-finite ground truth".to_owned()));
        }
        Ok(())
    }
}

/// Wind and temperature process parameters. The wind is a prevailing
/// vector plus a rotating seasonal component and i.i.d. noise; the
/// temperature is a seasonal sinusoid with January at the minimum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeatherModel {
    pub prevailing_east: f64,
    pub prevailing_north: f64,
    pub wind_seasonal_amplitude: f64,
    pub wind_noise_sd: f64,
    pub temperature_mean_c: f64,
    pub temperature_seasonal_amplitude_c: f64,
    pub temperature_noise_sd: f64,
}

impl Default for WeatherModel {
    fn default() -> Self {
        Self {
            prevailing_east: 3.0,
            prevailing_north: 0.5,
            wind_seasonal_amplitude: 1.0,
            wind_noise_sd: 0.4,
            temperature_mean_c: 9.5,
            temperature_seasonal_amplitude_c: 6.0,
            temperature_noise_sd: 1.0,
        }
    }
}

impl WeatherModel {
    pub fn validate(&self) -> Result<()> {
        let values = [
            self.prevailing_east,
            self.prevailing_north,
            self.wind_seasonal_amplitude,
            self.wind_noise_sd,
            self.temperature_mean_c,
            self.temperature_seasonal_amplitude_c,
            self.temperature_noise_sd,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("non-finite weather model".to_owned()));
        }
        if self.wind_noise_sd < 0.0 || self.temperature_noise_sd < 0.0 {
            return Err(Error::InvalidConfig(
                "weather noise s.d. must be non-negative".to_owned(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub seed: u64,
    pub n_cbs: usize,
    pub n_stations_per_cb: usize,
    pub n_individuals_per_cb: usize,
    /// SNPs behind each synthetic polygenic score.
    pub n_snps: usize,
    /// Fraction of CBs that adopt an SCA; adopters = floor(share x n_cbs).
    pub share_adopting: f64,
    /// Inclusive month range submissions are drawn from.
    pub submission_window: (YearMonth, YearMonth),
    /// Inclusive month range of station observations.
    pub panel_window: (YearMonth, YearMonth),
    /// Inclusive month range of birth months.
    pub cohort_window: (YearMonth, YearMonth),
    pub adjustment_gap_months: GapDistribution,
    pub effects: GroundTruth,
    /// Amplitude of the station-level seasonal concentration cycle.
    pub seasonal_amplitude: f64,
    /// S.d. of station-specific linear trends, in mcg/m³ per year.
    pub station_trend_sd: f64,
    /// S.d. of the station measurement noise.
    pub noise_sd: f64,
    pub weather: WeatherModel,
    /// Probability that each individual outcome is independently missing.
    pub missing_share: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_cbs: 20,
            n_stations_per_cb: 3,
            n_individuals_per_cb: 40,
            n_snps: 32,
            share_adopting: 0.5,
            submission_window: (
                YearMonth::new(1959, 1).expect("valid month"),
                YearMonth::new(1964, 12).expect("valid month"),
            ),
            panel_window: (
                YearMonth::new(1955, 1).expect("valid month"),
                YearMonth::new(1970, 12).expect("valid month"),
            ),
            cohort_window: (
                YearMonth::new(1955, 1).expect("valid month"),
                YearMonth::new(1970, 12).expect("valid month"),
            ),
            adjustment_gap_months: GapDistribution::default(),
            effects: GroundTruth::default(),
            seasonal_amplitude: 15.0,
            station_trend_sd: 0.5,
            noise_sd: 10.0,
            weather: WeatherModel::default(),
            missing_share: 0.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_cbs == 0 || self.n_stations_per_cb == 0 || self.n_individuals_per_cb == 0 {
            return Err(Error::InvalidConfig("counts must be positive".to_owned()));
        }
        if self.n_snps == 0 {
            return Err(Error::InvalidConfig("n_snps must be positive".to_owned()));
        }
        if !(self.share_adopting > 0.0 && self.share_adopting <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "share_adopting {} outside (0, 1]",
                self.share_adopting
            )));
        }
        for (name, (lo, hi)) in [
            ("submission_window", self.submission_window),
            ("panel_window", self.panel_window),
            ("cohort_window", self.cohort_window),
        ] {
            if lo > hi {
                return Err(Error::InvalidConfig(format!("{name} {lo}..{hi} is empty")));
            }
        }
        self.adjustment_gap_months.validate()?;
        self.effects.validate()?;
        self.weather.validate()?;
        for (name, v) in [
            ("seasonal_amplitude", self.seasonal_amplitude),
            ("station_trend_sd", self.station_trend_sd),
            ("noise_sd", self.noise_sd),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if !(0.0..1.0).contains(&self.missing_share) {
            return Err(Error::InvalidConfig(format!(
                "missing_share {} outside [0, 1)",
                self.missing_share
            )));
        }
        Ok(())
    }
}
