//! Synthetic geography and adoption schedule: county boroughs on a square
//! grid, an SCA centered in each adopting borough, and submission dates
//! drawn uniformly over the configured window.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use smokeshift_core::{CbBoundary, Point, Polygon, TreatmentSchedule, YearMonth};

use crate::config::SimConfig;
use crate::error::Result;
use crate::rng::{stream, Domain};

/// Side of each square county borough, in meters.
pub const CB_SIDE_M: f64 = 10_000.0;

/// Side of the square SCA centered in an adopting borough, in meters.
pub const SCA_SIDE_M: f64 = 5_000.0;

/// One county borough with its optional smoke control area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CbSite {
    pub cb: CbBoundary,
    pub sca: Option<TreatmentSchedule>,
    /// Area-level SES flag shared by all births in the borough.
    pub low_ses_area: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rollout {
    pub cbs: Vec<CbSite>,
}

impl Rollout {
    pub fn schedules(&self) -> Vec<TreatmentSchedule> {
        self.cbs.iter().filter_map(|c| c.sca.clone()).collect()
    }

    pub fn cb_boundaries(&self) -> Vec<CbBoundary> {
        self.cbs.iter().map(|c| c.cb.clone()).collect()
    }
}

pub fn square(x0: f64, y0: f64, side: f64) -> Polygon {
    Polygon::new(
        vec![
            Point::new(x0, y0),
            Point::new(x0 + side, y0),
            Point::new(x0 + side, y0 + side),
            Point::new(x0, y0 + side),
            Point::new(x0, y0),
        ],
        vec![],
    )
    .expect("axis-aligned square is a valid ring")
}

/// Adopter count: floor(share x n), with an absolute 1e-9 guard so that
/// decimal shares whose product is an integer (0.6 of 50) do not lose a
/// unit to float representation.
pub fn adopting_count(n: usize, share: f64) -> usize {
    let x = share * n as f64;
    let rounded = x.round();
    let count = if (x - rounded).abs() < 1e-9 {
        rounded
    } else {
        x.floor()
    };
    (count as usize).min(n)
}

/// Lays out `n_cbs` boroughs on a near-square grid, picks floor(share x n)
/// adopters by a seeded shuffle, and draws each adopter's submission month
/// uniformly from the window with operation = submission + gap.
pub fn generate_rollout(cfg: &SimConfig) -> Result<Rollout> {
    cfg.validate()?;
    let n = cfg.n_cbs;
    let n_cols = (n as f64).sqrt().ceil() as usize;

    let mut picker = stream(cfg.seed, Domain::Rollout, 0);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut picker);
    let n_adopt = adopting_count(n, cfg.share_adopting);
    let mut adopting = vec![false; n];
    for &k in &order[..n_adopt] {
        adopting[k] = true;
    }

    let (window_lo, window_hi) = cfg.submission_window;
    let span = smokeshift_core::months_between(window_lo, window_hi);
    let mut cbs = Vec::with_capacity(n);
    for k in 0..n {
        let col = (k % n_cols) as f64;
        let row = (k / n_cols) as f64;
        let x0 = col * CB_SIDE_M;
        let y0 = row * CB_SIDE_M;
        let cb_id = format!("cb_{k:03}");

        // Per-borough stream so attributes do not depend on neighbors.
        let mut rng = stream(cfg.seed, Domain::Rollout, 1 + k as u64);
        let low_ses_area = rng.random::<f64>() < 0.5;
        let sca = if adopting[k] {
            let submission: YearMonth = window_lo.add_months(rng.random_range(0..=span));
            let gap = cfg.adjustment_gap_months.sample(&mut rng);
            let margin = (CB_SIDE_M - SCA_SIDE_M) / 2.0;
            Some(TreatmentSchedule::new(
                format!("sca_{k:03}"),
                cb_id.clone(),
                square(x0 + margin, y0 + margin, SCA_SIDE_M),
                submission,
                submission.add_months(gap as i64),
            )?)
        } else {
            None
        };

        cbs.push(CbSite {
            cb: CbBoundary {
                cb_id,
                boundary: square(x0, y0, CB_SIDE_M),
                adopting: adopting[k],
            },
            sca,
            low_ses_area,
        });
    }
    Ok(Rollout { cbs })
}
