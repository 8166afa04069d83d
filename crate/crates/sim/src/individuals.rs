//! Birth cohorts with known injected effects: births placed uniformly in
//! each borough, outcomes built from area effects, cohort trends,
//! covariate loads, polygenic scores, and the configured treatment
//! effects applied to babies conceived in the post phase inside an SCA.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};
use smokeshift_core::{
    conception_month, months_between, phase_of, IndividualRecord, OutcomeKind, Outcomes, Sex,
    TreatmentPhase,
};

use crate::config::{GroundTruth, SimConfig};
use crate::error::{Error, Result};
use crate::panel::interior_point;
use crate::pgs::{aggregate_polygenic_score, GenotypeMatrix};
use crate::rng::{stream, Domain};
use crate::rollout::{Rollout, CB_SIDE_M};
use crate::weather::WeatherSeries;

/// Minor-allele frequency of every synthetic SNP.
pub const INDIVIDUAL_MAF: f64 = 0.3;

/// Months of weather exposure kept per person: conception through the
/// second birthday.
pub const EXPOSURE_MONTHS: usize = 34;

const fn outcome_index(kind: OutcomeKind) -> usize {
    match kind {
        OutcomeKind::BirthWeight => 0,
        OutcomeKind::Height => 1,
        OutcomeKind::YearsEducation => 2,
        OutcomeKind::FluidIntelligence => 3,
    }
}

// Nuisance-process constants, indexed like OutcomeKind::ALL
// (grams, centimeters, years, z units).
const BASE: [f64; 4] = [3400.0, 168.0, 13.0, 0.0];
const NOISE_SD: [f64; 4] = [450.0, 6.5, 2.5, 1.0];
const CB_EFFECT_SD: [f64; 4] = [40.0, 1.0, 0.6, 0.15];
const COHORT_TREND_PER_YEAR: [f64; 4] = [2.0, 0.05, 0.08, 0.0];
const CB_TREND_SD_PER_YEAR: [f64; 4] = [1.0, 0.02, 0.03, 0.01];
const MALE_MAIN: [f64; 4] = [115.0, 13.0, -0.3, 0.0];
const OTHER_ETHNICITY_MAIN: [f64; 4] = [-120.0, -1.5, 0.2, 0.0];
const PGS_MAIN: [f64; 4] = [40.0, 1.8, 0.5, 0.35];
const LOW_SES_MAIN: [f64; 4] = [-90.0, -0.8, -1.2, -0.25];
const WEATHER_MAIN_PER_C: [f64; 4] = [-1.5, 0.0, 0.0, 0.0];
const PC1_MAIN: [f64; 4] = [10.0, 0.2, 0.1, 0.05];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cohort {
    pub records: Vec<IndividualRecord>,
    pub truth: GroundTruth,
}

/// Generates one cohort over the rollout geography. `weather` must be
/// the per-borough series from `generate_weather` on the same config:
/// exposure strings are cut from it, so it has to cover conception
/// through age two for every birth month.
pub fn generate_individuals(
    cfg: &SimConfig,
    rollout: &Rollout,
    weather: &[WeatherSeries],
) -> Result<Cohort> {
    cfg.validate()?;
    if weather.len() != rollout.cbs.len() {
        return Err(Error::InvalidConfig(format!(
            "{} weather series for {} boroughs",
            weather.len(),
            rollout.cbs.len()
        )));
    }
    let n_pp = cfg.n_individuals_per_cb;
    let n_total = rollout.cbs.len() * n_pp;

    // Whole-cohort genotypes, then one standardized score per trait.
    let mut grng = stream(cfg.seed, Domain::Genotypes, 0);
    let weight_dist = Normal::new(0.0, 1.0).expect("fixed sd");
    let trait_weights: Vec<Vec<f64>> = (0..OutcomeKind::ALL.len())
        .map(|_| (0..cfg.n_snps).map(|_| weight_dist.sample(&mut grng)).collect())
        .collect();
    let allele = Binomial::new(2, INDIVIDUAL_MAF).expect("fixed probability");
    let counts: Vec<Vec<u8>> = (0..n_total)
        .map(|_| (0..cfg.n_snps).map(|_| allele.sample(&mut grng) as u8).collect())
        .collect();
    let geno = GenotypeMatrix::new(counts, trait_weights[0].clone())?;
    let mut scores: Vec<Vec<f64>> = Vec::new();
    for w in &trait_weights {
        scores.push(aggregate_polygenic_score(&geno.with_weights(w.clone())?)?);
    }

    let (cohort_lo, cohort_hi) = cfg.cohort_window;
    let span = months_between(cohort_lo, cohort_hi);
    let truth = cfg.effects;
    let mut records = Vec::with_capacity(n_total);
    for (i, site) in rollout.cbs.iter().enumerate() {
        let mut rng = stream(cfg.seed, Domain::Individuals, i as u64);
        let mut miss = stream(cfg.seed, Domain::Missingness, i as u64);
        let cb_effect: Vec<f64> = CB_EFFECT_SD
            .iter()
            .map(|&sd| Normal::new(0.0, sd).expect("fixed sd").sample(&mut rng))
            .collect();
        let cb_trend: Vec<f64> = CB_TREND_SD_PER_YEAR
            .iter()
            .map(|&sd| Normal::new(0.0, sd).expect("fixed sd").sample(&mut rng))
            .collect();
        let (bb_min, _) = site.cb.boundary.bounding_box();
        let low_ses = if site.low_ses_area { 1.0 } else { 0.0 };

        for p in 0..n_pp {
            let global = i * n_pp + p;
            let location = interior_point(&mut rng, bb_min.easting, bb_min.northing, CB_SIDE_M);
            let birth = cohort_lo.add_months(rng.random_range(0..=span));
            let male = rng.random::<f64>() < 0.5;
            let other_ethnicity = rng.random::<f64>() < 0.1;
            let pcs = [
                weight_dist.sample(&mut rng),
                weight_dist.sample(&mut rng),
            ];
            let noises: Vec<f64> = NOISE_SD
                .iter()
                .map(|&sd| Normal::new(0.0, sd).expect("fixed sd").sample(&mut rng))
                .collect();

            let conception = conception_month(birth);
            let exposure = weather[i]
                .temperature_between(conception, birth.add_months(24))
                .ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "weather series for {} does not cover {} births",
                        site.cb.cb_id, birth
                    ))
                })?;
            let exposure_dev = exposure.iter().sum::<f64>() / exposure.len() as f64
                - cfg.weather.temperature_mean_c;
            let treated_post = site.sca.as_ref().is_some_and(|sca| {
                sca.boundary.contains(location)
                    && phase_of(conception, sca.submission, sca.operation) == TreatmentPhase::Post
            });
            let t_years = months_between(cohort_lo, birth) as f64 / 12.0;
            let male_f = if male { 1.0 } else { 0.0 };
            let other_f = if other_ethnicity { 1.0 } else { 0.0 };

            let mut values = [0.0f64; 4];
            for kind in OutcomeKind::ALL {
                let k = outcome_index(kind);
                let mut y = BASE[k]
                    + cb_effect[k]
                    + (COHORT_TREND_PER_YEAR[k] + cb_trend[k]) * t_years
                    + MALE_MAIN[k] * male_f
                    + OTHER_ETHNICITY_MAIN[k] * other_f
                    + PGS_MAIN[k] * scores[k][global]
                    + LOW_SES_MAIN[k] * low_ses
                    + WEATHER_MAIN_PER_C[k] * exposure_dev
                    + PC1_MAIN[k] * pcs[0]
                    + noises[k];
                if treated_post {
                    y += truth.outcome_effect(kind)
                        + truth.pgs_interaction.get(kind) * scores[k][global];
                    if kind == OutcomeKind::BirthWeight {
                        y += truth.sex_interaction * male_f + truth.ses_interaction * low_ses;
                    }
                }
                values[k] = y;
            }

            // Missingness draws come from their own stream so turning the
            // share up or down never changes the values themselves.
            let mut present = [true; 4];
            for slot in &mut present {
                *slot = miss.random::<f64>() >= cfg.missing_share;
            }

            let keep = |k: usize, scale: f64| -> Option<f64> {
                present[k].then_some(values[k] * scale)
            };
            records.push(IndividualRecord {
                person_id: format!("p_{i:03}_{p:04}"),
                birth_location: location,
                birth,
                sex: if male { Sex::M } else { Sex::F },
                ethnicity: if other_ethnicity { "other" } else { "white_british" }.to_owned(),
                outcomes: Outcomes {
                    // Generated in grams, stored in the record's kg units.
                    birth_weight_kg: keep(0, 1e-3),
                    height_cm: keep(1, 1.0),
                    years_education: keep(2, 1.0),
                    fluid_intelligence: keep(3, 1.0),
                },
                weather_exposure: exposure,
                pgs: OutcomeKind::ALL
                    .iter()
                    .map(|&kind| (kind, scores[outcome_index(kind)][global]))
                    .collect(),
                principal_components: pcs.to_vec(),
                low_ses_area: site.low_ses_area,
            });
        }
    }
    Ok(Cohort { records, truth })
}
