//! Regression design: treatment-term construction from per-row treatment
//! context, and the `DesignSpec` describing a full fit.

use serde::{Deserialize, Serialize};
use smokeshift_core::{months_between, phase_of, relative_event_time, TreatmentPhase, YearMonth};

use crate::error::{Error, Result};
use crate::frame::Frame;

/// Treatment state of one observation row. `clock` is the month the
/// treatment terms are evaluated at: the measurement month for station
/// rows, the conception month for individual rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreatmentContext {
    pub clock: YearMonth,
    /// Own-SCA schedule dates when the unit sits inside an SCA.
    pub inside: Option<(YearMonth, YearMonth)>,
    /// Schedule dates of the earliest-submitted upwind SCA, when the unit
    /// is downwind of at least one SCA.
    pub downwind: Option<(YearMonth, YearMonth)>,
}

impl TreatmentContext {
    pub fn untreated(clock: YearMonth) -> Self {
        Self {
            clock,
            inside: None,
            downwind: None,
        }
    }
}

/// Which treatment terms enter the design.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TreatmentTerms {
    /// Relative-time dummies `tau_*` in bins of `bin_width_months`,
    /// covering offsets within `window_months` of the event; the
    /// `reference` bin is omitted.
    EventStudy {
        bin_width_months: u32,
        #[serde(default = "default_window")]
        window_months: i64,
        #[serde(default = "default_reference")]
        reference: i64,
    },
    /// `inside_adj` and `inside_post`.
    #[serde(rename = "static_did")]
    StaticDiD,
    /// Static terms plus `downwind_adj` and `downwind_post`.
    #[serde(rename = "static_did_downwind")]
    StaticDiDWithDownwind,
}

fn default_window() -> i64 {
    60
}

fn default_reference() -> i64 {
    -1
}

/// Moderator interactions added on top of the treatment terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interactions {
    /// Float column whose product with each treatment term is added.
    pub by: String,
    /// Also interact the moderator with every covariate and principal
    /// component, so moderated treatment terms are not proxying for
    /// moderated background characteristics.
    #[serde(default)]
    pub keller_controls: bool,
}

/// A complete fit description. Serialized form mirrors the struct; the
/// trend is one optional categorical dimension whose groups each receive
/// an absorbed linear term in calendar time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    pub outcome: String,
    /// Categorical columns absorbed as fixed effects, e.g. station and
    /// year-month, or CB-by-inside and birth month.
    pub fixed_effects: Vec<String>,
    /// Categorical column whose groups get unit-specific linear trends;
    /// use the first fixed-effect dimension for unit trends or a coarser
    /// grouping (e.g. CB) for shared trends.
    #[serde(default)]
    pub trend: Option<String>,
    pub treatment_terms: TreatmentTerms,
    #[serde(default)]
    pub covariates: Vec<String>,
    /// Principal-component column names (controls, and part of the
    /// Keller interaction set).
    #[serde(default)]
    pub principal_components: Vec<String>,
    #[serde(default)]
    pub interactions: Option<Interactions>,
    pub cluster: String,
    #[serde(default = "default_demean_tol")]
    pub demean_tol: f64,
    #[serde(default = "default_demean_max_iter")]
    pub demean_max_iter: usize,
}

fn default_demean_tol() -> f64 {
    1e-8
}

fn default_demean_max_iter() -> usize {
    10_000
}

impl DesignSpec {
    pub fn validate(&self, frame: &Frame) -> Result<()> {
        if self.cluster.is_empty() {
            return Err(Error::InvalidSpec("cluster dimension is empty".to_owned()));
        }
        if !frame.has_cat(&self.cluster) {
            return Err(Error::MissingColumn(self.cluster.clone()));
        }
        if self.fixed_effects.is_empty() {
            return Err(Error::InvalidSpec(
                "at least one fixed-effect dimension is required".to_owned(),
            ));
        }
        frame.float(&self.outcome)?;
        for dim in &self.fixed_effects {
            frame.cat(dim)?;
        }
        if let Some(trend) = &self.trend {
            frame.cat(trend)?;
        }
        for c in self.covariates.iter().chain(&self.principal_components) {
            frame.float(c)?;
        }
        if let Some(i) = &self.interactions {
            frame.float(&i.by)?;
        }
        if let TreatmentTerms::EventStudy {
            bin_width_months,
            window_months,
            ..
        } = self.treatment_terms
        {
            if bin_width_months == 0 {
                return Err(Error::InvalidSpec("bin width must be positive".to_owned()));
            }
            if window_months <= 0 {
                return Err(Error::InvalidSpec("window must be positive".to_owned()));
            }
        }
        Ok(())
    }
}

/// One named design column.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignColumn {
    pub name: String,
    pub values: Vec<f64>,
}

/// Event-study dummy with its relative-time bin.
#[derive(Clone, Debug, PartialEq)]
pub struct EventDummy {
    pub tau: i64,
    pub column: DesignColumn,
}

/// Builds one indicator per relative-time bin present in the window,
/// sorted by bin. A row scores 1 on bin tau when its unit is inside an
/// SCA, its clock offset from submission is within the window, and the
/// binned offset equals tau; the reference bin is omitted and rows of
/// never-treated units are zero everywhere.
pub fn build_event_dummies(
    contexts: &[TreatmentContext],
    bin_width_months: u32,
    window_months: i64,
    reference: i64,
) -> Vec<EventDummy> {
    assert!(window_months > 0, "window must be positive");
    let mut taus: Vec<i64> = Vec::new();
    let assigned: Vec<Option<i64>> = contexts
        .iter()
        .map(|ctx| {
            let (submission, _) = ctx.inside?;
            let offset = months_between(submission, ctx.clock);
            if offset.abs() > window_months {
                return None;
            }
            let tau = relative_event_time(submission, ctx.clock, bin_width_months);
            (tau != reference).then_some(tau)
        })
        .collect();
    for tau in assigned.iter().flatten() {
        if !taus.contains(tau) {
            taus.push(*tau);
        }
    }
    taus.sort_unstable();
    taus.into_iter()
        .map(|tau| {
            let values = assigned
                .iter()
                .map(|a| if *a == Some(tau) { 1.0 } else { 0.0 })
                .collect();
            EventDummy {
                tau,
                column: DesignColumn {
                    name: format!("tau_{tau}"),
                    values,
                },
            }
        })
        .collect()
}

/// Builds the static difference-in-difference terms: `inside_adj` and
/// `inside_post` from each row's own schedule, plus `downwind_adj` and
/// `downwind_post` from the earliest upwind schedule when requested.
pub fn build_static_terms(
    contexts: &[TreatmentContext],
    with_downwind: bool,
) -> Vec<DesignColumn> {
    let phase_dummies = |dates: fn(&TreatmentContext) -> Option<(YearMonth, YearMonth)>| {
        let mut adj = vec![0.0; contexts.len()];
        let mut post = vec![0.0; contexts.len()];
        for (i, ctx) in contexts.iter().enumerate() {
            if let Some((submission, operation)) = dates(ctx) {
                match phase_of(ctx.clock, submission, operation) {
                    TreatmentPhase::Adjustment => adj[i] = 1.0,
                    TreatmentPhase::Post => post[i] = 1.0,
                    TreatmentPhase::Pre => {}
                }
            }
        }
        (adj, post)
    };
    let (adj, post) = phase_dummies(|c| c.inside);
    let mut cols = vec![
        DesignColumn {
            name: "inside_adj".to_owned(),
            values: adj,
        },
        DesignColumn {
            name: "inside_post".to_owned(),
            values: post,
        },
    ];
    if with_downwind {
        let (adj, post) = phase_dummies(|c| c.downwind);
        cols.push(DesignColumn {
            name: "downwind_adj".to_owned(),
            values: adj,
        });
        cols.push(DesignColumn {
            name: "downwind_post".to_owned(),
            values: post,
        });
    }
    cols
}

/// Row mask keeping untreated rows and treated rows within
/// `half_width_months` of their submission; `None` keeps everything.
pub fn event_window_mask(
    contexts: &[TreatmentContext],
    half_width_months: Option<i64>,
) -> Vec<bool> {
    match half_width_months {
        None => vec![true; contexts.len()],
        Some(w) => {
            assert!(w > 0, "trim window must be positive");
            contexts
                .iter()
                .map(|ctx| match ctx.inside {
                    None => true,
                    Some((submission, _)) => months_between(submission, ctx.clock).abs() <= w,
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ym(year: i32, month: u32) -> YearMonth {
        YearMonth::new(year, month).unwrap()
    }

    fn treated(clock: YearMonth) -> TreatmentContext {
        TreatmentContext {
            clock,
            inside: Some((ym(1960, 1), ym(1961, 5))),
            downwind: None,
        }
    }

    #[test]
    fn reference_month_has_all_dummies_zero() {
        let contexts = vec![
            treated(ym(1959, 12)), // submission - 1: the reference month
            treated(ym(1960, 1)),
            TreatmentContext::untreated(ym(1960, 1)),
        ];
        let dummies = build_event_dummies(&contexts, 1, 60, -1);
        for d in &dummies {
            assert_eq!(d.column.values[0], 0.0, "reference row scored on {}", d.tau);
            assert_eq!(d.column.values[2], 0.0, "never-treated row scored");
        }
        let tau0 = dummies.iter().find(|d| d.tau == 0).unwrap();
        assert_eq!(tau0.column.values[1], 1.0);
        assert!(dummies.iter().all(|d| d.tau != -1), "reference bin emitted");
    }

    #[test]
    fn six_month_bins_follow_the_conception_examples() {
        // Conceived six months before submission -> bin -1 (reference);
        // conceived twelve months after -> bin 2.
        let contexts = vec![treated(ym(1959, 7)), treated(ym(1961, 1))];
        let dummies = build_event_dummies(&contexts, 6, 60, -1);
        assert!(dummies.iter().all(|d| d.column.values[0] == 0.0));
        let tau2 = dummies.iter().find(|d| d.tau == 2).unwrap();
        assert_eq!(tau2.column.values[1], 1.0);
    }

    #[test]
    fn window_excludes_distant_offsets() {
        let contexts = vec![treated(ym(1970, 2)), treated(ym(1964, 12))];
        let dummies = build_event_dummies(&contexts, 1, 60, -1);
        // 1970-02 is 121 months after submission: outside the window, so
        // it contributes no bin at all; 1964-12 (offset 59) does.
        assert!(dummies.iter().all(|d| d.column.values[0] == 0.0));
        assert!(dummies.iter().any(|d| d.tau == 59 && d.column.values[1] == 1.0));
        assert!(dummies.iter().all(|d| d.tau.abs() <= 60));
    }

    #[test]
    fn static_terms_partition_the_schedule() {
        let contexts = vec![
            treated(ym(1959, 12)),
            treated(ym(1960, 1)),
            treated(ym(1961, 4)),
            treated(ym(1961, 5)),
            TreatmentContext::untreated(ym(1961, 5)),
        ];
        let cols = build_static_terms(&contexts, false);
        assert_eq!(cols.len(), 2);
        let adj = &cols[0];
        let post = &cols[1];
        assert_eq!(adj.name, "inside_adj");
        assert_eq!(post.name, "inside_post");
        assert_eq!(adj.values, vec![0.0, 1.0, 1.0, 0.0, 0.0]);
        assert_eq!(post.values, vec![0.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn downwind_terms_use_the_upwind_schedule() {
        let ctx = TreatmentContext {
            clock: ym(1960, 6),
            inside: None,
            downwind: Some((ym(1960, 1), ym(1961, 5))),
        };
        let cols = build_static_terms(&[ctx], true);
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[0].values, vec![0.0]); // inside_adj
        assert_eq!(cols[2].name, "downwind_adj");
        assert_eq!(cols[2].values, vec![1.0]);
        assert_eq!(cols[3].name, "downwind_post");
        assert_eq!(cols[3].values, vec![0.0]);
    }

    #[test]
    fn trim_mask_keeps_untreated_rows() {
        let contexts = vec![
            treated(ym(1970, 2)),
            TreatmentContext::untreated(ym(1970, 2)),
            treated(ym(1961, 1)),
        ];
        assert_eq!(event_window_mask(&contexts, Some(24)), vec![false, true, true]);
        assert_eq!(event_window_mask(&contexts, None), vec![true, true, true]);
    }
}
