//! Multiplier bootstrap for the group-time estimator: Mammen two-point
//! weights drawn per unit, aggregates recomputed under each draw, and a
//! sup-t critical value for bands that cover the whole dynamic path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smokeshift_core::months_between;

use crate::error::{Error, Result};
use crate::estimate::CI95_Z;
use crate::gta::{
    aggregate_dynamic, aggregate_overall, att_surface_in, weighted_aggregates, AggregatedAtt,
    ComparisonGroup, GtPanel,
};

pub const DEFAULT_BOOTSTRAP_REPS: usize = 999;
pub const MIN_BOOTSTRAP_REPS: usize = 99;

/// One event-time step of the aggregated dynamic path with pointwise and
/// uniform (sup-t) 95% intervals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicCell {
    pub event_time: i64,
    pub estimate: f64,
    pub se: f64,
    pub ci95: (f64, f64),
    pub uniform_ci95: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub dynamic: Vec<DynamicCell>,
    pub overall: AggregatedAtt,
    /// 95% critical value for max_e |theta*_e - theta_e| / se_e; NaN when
    /// every step is degenerate.
    pub sup_t_critical: f64,
    pub reps: usize,
    pub seed: u64,
    /// Set when a post-treatment step (or the overall effect) has zero
    /// bootstrap variance, e.g. a single unit per arm.
    pub degenerate: bool,
}

/// Mammen two-point multiplier: v = -(sqrt(5)-1)/2 with probability
/// (sqrt(5)+1)/(2 sqrt(5)), else (sqrt(5)+1)/2, so E[v] = 0 and
/// E[v^2] = 1. The returned weight is 1 + v.
fn mammen_weight<R: Rng>(rng: &mut R) -> f64 {
    let s5 = 5.0_f64.sqrt();
    if rng.random::<f64>() < (s5 + 1.0) / (2.0 * s5) {
        1.0 - (s5 - 1.0) / 2.0
    } else {
        1.0 + (s5 + 1.0) / 2.0
    }
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Upper empirical quantile with index ceil(q n) - 1 on the sorted draws.
fn upper_quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let idx = ((q * sorted.len() as f64).ceil() as usize)
        .saturating_sub(1)
        .min(sorted.len() - 1);
    sorted[idx]
}

/// Bootstraps the dynamic and overall aggregates of the ATT(g, t)
/// surface under never-treated comparison units. Each rep reweights
/// units by an independent Mammen draw seeded at `seed + rep`, so
/// results are reproducible for a given seed and independent of thread
/// count.
pub fn multiplier_bootstrap(panel: &GtPanel, reps: usize, seed: u64) -> Result<BootstrapResult> {
    multiplier_bootstrap_in(panel, ComparisonGroup::NeverTreated, reps, seed)
}

/// [`multiplier_bootstrap`] with an explicit comparison-group choice.
pub fn multiplier_bootstrap_in(
    panel: &GtPanel,
    comparison: ComparisonGroup,
    reps: usize,
    seed: u64,
) -> Result<BootstrapResult> {
    if reps < MIN_BOOTSTRAP_REPS {
        return Err(Error::TooFewReps(reps));
    }
    let surface = att_surface_in(panel, comparison)?;
    let mut horizons: Vec<i64> = surface
        .iter()
        .map(|c| months_between(c.group, c.time))
        .collect();
    horizons.sort_unstable();
    horizons.dedup();

    let point_dynamic: Vec<f64> = horizons
        .iter()
        .map(|&e| aggregate_dynamic(&surface, e).map(|a| a.estimate))
        .collect::<Result<_>>()?;
    let point_overall = aggregate_overall(&surface)?;

    let n_units = panel.units().len();
    let draws: Vec<(Vec<f64>, f64)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(rep as u64));
            let weights: Vec<f64> = (0..n_units).map(|_| mammen_weight(&mut rng)).collect();
            weighted_aggregates(panel, &surface, &horizons, &weights, comparison)
        })
        .collect();

    let ses: Vec<f64> = (0..horizons.len())
        .map(|i| sample_std(&draws.iter().map(|d| d.0[i]).collect::<Vec<f64>>()))
        .collect();
    let overall_draws: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let overall_se = sample_std(&overall_draws);

    // The base-period step (event time -1) is zero by construction; only
    // genuine steps decide degeneracy and enter the sup-t statistic.
    let live: Vec<usize> = (0..horizons.len())
        .filter(|&i| horizons[i] != -1 && ses[i] > 0.0)
        .collect();
    let degenerate = (0..horizons.len()).any(|i| horizons[i] != -1 && !(ses[i] > 0.0))
        || !(overall_se > 0.0);

    let sup_t_critical = if live.is_empty() {
        f64::NAN
    } else {
        let mut maxes: Vec<f64> = draws
            .iter()
            .map(|d| {
                live.iter()
                    .map(|&i| ((d.0[i] - point_dynamic[i]) / ses[i]).abs())
                    .fold(0.0_f64, f64::max)
            })
            .collect();
        maxes.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite sup-t draws"));
        upper_quantile(&maxes, 0.95)
    };

    let dynamic = horizons
        .iter()
        .zip(point_dynamic.iter().zip(ses.iter()))
        .map(|(&e, (&est, &se))| DynamicCell {
            event_time: e,
            estimate: est,
            se,
            ci95: (est - CI95_Z * se, est + CI95_Z * se),
            uniform_ci95: (est - sup_t_critical * se, est + sup_t_critical * se),
        })
        .collect();

    Ok(BootstrapResult {
        dynamic,
        overall: AggregatedAtt {
            se: overall_se,
            ci95: (
                point_overall.estimate - CI95_Z * overall_se,
                point_overall.estimate + CI95_Z * overall_se,
            ),
            ..point_overall
        },
        sup_t_critical,
        reps,
        seed,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gta::att_surface;
    use rand_distr::{Distribution, Normal};
    use smokeshift_core::YearMonth;

    fn ym(year: i32, month: u32) -> YearMonth {
        YearMonth::new(year, month).unwrap()
    }

    /// Treated units adopt in 1960-03 of a 4-month panel; outcomes carry
    /// unit intercepts, a common period effect, noise, and `effect` from
    /// adoption onward.
    fn noisy_panel(n_treated: usize, n_control: usize, effect: f64, seed: u64) -> GtPanel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let times: Vec<YearMonth> = (0..4).map(|k| ym(1960, 1 + k)).collect();
        let mut units = Vec::new();
        let mut group = Vec::new();
        let mut y = Vec::new();
        for u in 0..n_treated + n_control {
            let treated = u < n_treated;
            units.push(format!("u{u}"));
            group.push(treated.then(|| ym(1960, 3)));
            let intercept = 50.0 + rng.random::<f64>() * 10.0;
            for (k, _) in times.iter().enumerate() {
                let post = treated && k >= 2;
                let period = 0.5 * k as f64;
                y.push(intercept + period + noise.sample(&mut rng)
                    + if post { effect } else { 0.0 });
            }
        }
        GtPanel::new(units, group, times, y).unwrap()
    }

    #[test]
    fn mammen_weights_sit_on_two_points_with_unit_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s5 = 5.0_f64.sqrt();
        let lo = 1.0 - (s5 - 1.0) / 2.0;
        let hi = 1.0 + (s5 + 1.0) / 2.0;
        let n = 100_000;
        let mut sum_v = 0.0;
        let mut sum_v2 = 0.0;
        for _ in 0..n {
            let w = mammen_weight(&mut rng);
            assert!(w == lo || w == hi, "weight {w} off support");
            let v = w - 1.0;
            sum_v += v;
            sum_v2 += v * v;
        }
        assert!((sum_v / n as f64).abs() < 0.015, "mean {}", sum_v / n as f64);
        assert!(
            (sum_v2 / n as f64 - 1.0).abs() < 0.02,
            "second moment {}",
            sum_v2 / n as f64
        );
    }

    #[test]
    fn bootstrap_is_reproducible_and_seed_sensitive() {
        let panel = noisy_panel(8, 8, -3.0, 11);
        let a = multiplier_bootstrap(&panel, 99, 42).unwrap();
        let b = multiplier_bootstrap(&panel, 99, 42).unwrap();
        assert_eq!(a, b);
        let c = multiplier_bootstrap(&panel, 99, 43).unwrap();
        assert!(
            a.dynamic.iter().zip(&c.dynamic).any(|(x, y)| x.se != y.se),
            "different seeds should perturb the bootstrap standard errors"
        );
    }

    #[test]
    fn point_estimates_match_the_unweighted_aggregates() {
        let panel = noisy_panel(8, 8, -3.0, 5);
        let surface = att_surface(&panel).unwrap();
        let boot = multiplier_bootstrap(&panel, 99, 1).unwrap();
        let overall = aggregate_overall(&surface).unwrap();
        assert_eq!(boot.overall.estimate, overall.estimate);
        for cell in &boot.dynamic {
            let agg = aggregate_dynamic(&surface, cell.event_time).unwrap();
            assert_eq!(cell.estimate, agg.estimate);
            assert_eq!(cell.ci95.0, cell.estimate - CI95_Z * cell.se);
            assert_eq!(cell.ci95.1, cell.estimate + CI95_Z * cell.se);
        }
    }

    #[test]
    fn bootstrap_se_tracks_the_two_sample_analytic_se() {
        let panel = noisy_panel(150, 150, -2.0, 9);
        let analytic = crate::gta::att_gt(&panel, ym(1960, 3), ym(1960, 3)).unwrap();
        let boot = multiplier_bootstrap(&panel, 400, 3).unwrap();
        let cell = boot
            .dynamic
            .iter()
            .find(|c| c.event_time == 0)
            .expect("horizon 0 present");
        // Only one group, so the dynamic step at 0 is ATT(g, g) itself.
        assert!((cell.estimate - analytic.att).abs() < 1e-12);
        assert!(
            (cell.se - analytic.se).abs() / analytic.se < 0.2,
            "bootstrap se {} vs analytic {}",
            cell.se,
            analytic.se
        );
    }

    #[test]
    fn sup_t_band_is_sane_and_wraps_the_path() {
        let panel = noisy_panel(40, 40, -2.0, 21);
        let boot = multiplier_bootstrap(&panel, 999, 17).unwrap();
        assert!(!boot.degenerate);
        // The max over several standardized steps dominates each single
        // step, so its 0.95 quantile sits near or above the pointwise one.
        assert!(
            boot.sup_t_critical > 1.7 && boot.sup_t_critical < 5.0,
            "sup-t critical value {}",
            boot.sup_t_critical
        );
        for cell in &boot.dynamic {
            assert!(cell.uniform_ci95.0 <= cell.ci95.0 + 0.3 * cell.se);
            assert!(cell.uniform_ci95.1 >= cell.ci95.1 - 0.3 * cell.se);
        }
    }

    #[test]
    fn single_unit_arms_are_flagged_degenerate() {
        // A weighted mean of one unit ignores its weight, so every rep
        // reproduces the point estimate exactly.
        let panel = GtPanel::new(
            vec!["t".into(), "c".into()],
            vec![Some(ym(1960, 2)), None],
            vec![ym(1960, 1), ym(1960, 2)],
            vec![10.0, 7.0, 10.0, 9.0],
        )
        .unwrap();
        let boot = multiplier_bootstrap(&panel, 99, 0).unwrap();
        assert!(boot.degenerate);
        assert!(boot.sup_t_critical.is_nan());
        let zero = boot
            .dynamic
            .iter()
            .find(|c| c.event_time == 0)
            .expect("horizon 0 present");
        assert_eq!(zero.estimate, -2.0);
        assert_eq!(zero.se, 0.0);
    }

    #[test]
    fn doubling_the_outcome_doubles_every_standard_error() {
        let panel = noisy_panel(10, 10, -3.0, 4);
        let mut y = Vec::new();
        for u in 0..panel.units().len() {
            for t in 0..panel.times().len() {
                y.push(2.0 * panel.value(u, t));
            }
        }
        let doubled = GtPanel::new(
            panel.units().to_vec(),
            panel.groups().to_vec(),
            panel.times().to_vec(),
            y,
        )
        .unwrap();
        let a = multiplier_bootstrap(&panel, 99, 6).unwrap();
        let b = multiplier_bootstrap(&doubled, 99, 6).unwrap();
        // Scaling by 2 is exact in floating point, so equality is exact.
        assert_eq!(b.overall.se, 2.0 * a.overall.se);
        for (x, y) in a.dynamic.iter().zip(&b.dynamic) {
            assert_eq!(y.estimate, 2.0 * x.estimate);
            assert_eq!(y.se, 2.0 * x.se);
        }
    }

    #[test]
    fn too_few_reps_is_rejected() {
        let panel = noisy_panel(4, 4, 0.0, 2);
        assert!(matches!(
            multiplier_bootstrap(&panel, 98, 0),
            Err(Error::TooFewReps(98))
        ));
    }

    #[test]
    fn base_period_step_is_pinned_at_zero() {
        let panel = noisy_panel(8, 8, -3.0, 30);
        let boot = multiplier_bootstrap(&panel, 99, 8).unwrap();
        let base = boot
            .dynamic
            .iter()
            .find(|c| c.event_time == -1)
            .expect("base step present");
        assert_eq!(base.estimate, 0.0);
        assert_eq!(base.se, 0.0);
        assert!(!boot.degenerate);
    }
}
