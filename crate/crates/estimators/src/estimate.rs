//! The full fixed-effects fit: treatment-term construction, listwise
//! deletion, interaction expansion, absorption, least squares, and
//! cluster-robust inference, reported as an estimate table.

use serde::{Deserialize, Serialize};
use smokeshift_core::months_between;

use crate::demean::{demean, FeDim, TrendDim};
use crate::design::{
    build_event_dummies, build_static_terms, DesignColumn, DesignSpec, TreatmentContext,
    TreatmentTerms,
};
use crate::error::{Error, Result};
use crate::frame::{recode, Frame};
use crate::ols::ols;
use crate::vcov::cluster_vcov;

/// Two-sided 95% normal critical value used for every reported interval.
pub const CI95_Z: f64 = 1.959964;

/// A regression-ready dataset: the column store plus one treatment
/// context per row (aligned by index).
#[derive(Clone, Debug)]
pub struct RegressionInput {
    pub frame: Frame,
    pub contexts: Vec<TreatmentContext>,
}

impl RegressionInput {
    pub fn new(frame: Frame, contexts: Vec<TreatmentContext>) -> Result<Self> {
        if contexts.len() != frame.n_rows() {
            return Err(Error::ColumnLength {
                name: "contexts".to_owned(),
                expected: frame.n_rows(),
                got: contexts.len(),
            });
        }
        Ok(Self { frame, contexts })
    }

    /// Drops treated rows farther than `half_width_months` from their own
    /// submission month; untreated rows always stay.
    pub fn trim_event_window(&self, half_width_months: Option<i64>) -> Self {
        let keep = crate::design::event_window_mask(&self.contexts, half_width_months);
        self.filter(&keep)
    }

    pub fn filter(&self, keep: &[bool]) -> Self {
        let contexts = self
            .contexts
            .iter()
            .zip(keep)
            .filter_map(|(c, k)| k.then_some(*c))
            .collect();
        Self {
            frame: self.frame.filter(keep),
            contexts,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub term: String,
    pub coef: f64,
    pub se: f64,
    pub t: f64,
    pub ci95: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateTable {
    pub rows: Vec<EstimateRow>,
    pub n_obs: usize,
    pub n_clusters: usize,
    pub fe_dims: Vec<String>,
    pub converged: bool,
    pub demeaning_iterations: usize,
    /// Requested terms dropped as collinear.
    pub dropped_terms: Vec<String>,
}

impl EstimateTable {
    pub fn row(&self, term: &str) -> Option<&EstimateRow> {
        self.rows.iter().find(|r| r.term == term)
    }

    /// Aligned text rendering for logs and the CLI.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<28} {:>14} {:>12} {:>9} {:>14} {:>14}\n",
            "term", "coef", "se", "t", "ci_lo", "ci_hi"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<28} {:>14.6} {:>12.6} {:>9.3} {:>14.6} {:>14.6}\n",
                r.term, r.coef, r.se, r.t, r.ci95.0, r.ci95.1
            ));
        }
        out.push_str(&format!(
            "n_obs={} n_clusters={} fe={} converged={} sweeps={}\n",
            self.n_obs,
            self.n_clusters,
            self.fe_dims.join("+"),
            self.converged,
            self.demeaning_iterations
        ));
        out
    }
}

/// Fits `spec` on `input`: builds treatment terms from the row contexts,
/// applies listwise deletion over every used float column, absorbs the
/// fixed effects and optional group trends, and reports CR1
/// cluster-robust estimates for the explicit regressors.
pub fn estimate(input: &RegressionInput, spec: &DesignSpec) -> Result<EstimateTable> {
    spec.validate(&input.frame)?;

    // Listwise deletion over the columns this design touches.
    let mut used: Vec<&str> = vec![spec.outcome.as_str()];
    used.extend(spec.covariates.iter().map(|s| s.as_str()));
    used.extend(spec.principal_components.iter().map(|s| s.as_str()));
    if let Some(i) = &spec.interactions {
        used.push(i.by.as_str());
    }
    let mut keep = vec![true; input.frame.n_rows()];
    for name in &used {
        for (k, v) in keep.iter_mut().zip(input.frame.float(name)?) {
            *k &= v.is_finite();
        }
    }
    let data = input.filter(&keep);
    let n = data.frame.n_rows();
    if n == 0 {
        return Err(Error::EmptyTreated);
    }

    // Treatment terms from the per-row contexts.
    let mut treatment: Vec<DesignColumn> = match spec.treatment_terms {
        TreatmentTerms::EventStudy {
            bin_width_months,
            window_months,
            reference,
        } => build_event_dummies(&data.contexts, bin_width_months, window_months, reference)
            .into_iter()
            .map(|d| d.column)
            .collect(),
        TreatmentTerms::StaticDiD => build_static_terms(&data.contexts, false),
        TreatmentTerms::StaticDiDWithDownwind => build_static_terms(&data.contexts, true),
    };
    if treatment
        .iter()
        .all(|c| c.values.iter().all(|v| *v == 0.0))
    {
        return Err(Error::EmptyTreated);
    }

    // Moderator interactions, then background controls.
    let mut controls: Vec<DesignColumn> = Vec::new();
    if let Some(inter) = &spec.interactions {
        let by = data.frame.float(&inter.by)?;
        let moderated: Vec<DesignColumn> = treatment
            .iter()
            .map(|c| DesignColumn {
                name: format!("{}_x_{}", c.name, inter.by),
                values: c.values.iter().zip(by).map(|(v, m)| v * m).collect(),
            })
            .collect();
        treatment.extend(moderated);
        let in_controls = spec
            .covariates
            .iter()
            .chain(&spec.principal_components)
            .any(|c| *c == inter.by);
        if !in_controls {
            controls.push(DesignColumn {
                name: inter.by.clone(),
                values: by.to_vec(),
            });
        }
        if inter.keller_controls {
            for name in spec.covariates.iter().chain(&spec.principal_components) {
                if *name == inter.by {
                    continue;
                }
                let col = data.frame.float(name)?;
                controls.push(DesignColumn {
                    name: format!("{}_x_{}", inter.by, name),
                    values: col.iter().zip(by).map(|(v, m)| v * m).collect(),
                });
            }
        }
    }
    for name in spec.covariates.iter().chain(&spec.principal_components) {
        controls.push(DesignColumn {
            name: name.clone(),
            values: data.frame.float(name)?.to_vec(),
        });
    }

    let names: Vec<String> = treatment
        .iter()
        .chain(&controls)
        .map(|c| c.name.clone())
        .collect();
    let y = data.frame.float(&spec.outcome)?.to_vec();
    let mut columns: Vec<Vec<f64>> = std::iter::once(y)
        .chain(treatment.into_iter().map(|c| c.values))
        .chain(controls.into_iter().map(|c| c.values))
        .collect();

    // Fixed-effect layout and the absorbed parameter count.
    let mut fe_dims = Vec::new();
    let mut k_absorbed = 0usize;
    for (d, name) in spec.fixed_effects.iter().enumerate() {
        let r = recode(data.frame.cat(name)?);
        let n_groups = r.labels.len();
        k_absorbed += if d == 0 { n_groups } else { n_groups - 1 };
        fe_dims.push(FeDim {
            codes: r.codes,
            n_groups,
        });
    }
    let trend = match &spec.trend {
        None => None,
        Some(name) => {
            let r = recode(data.frame.cat(name)?);
            let n_groups = r.labels.len();
            // Group intercepts are already spanned by the fixed effects
            // (the trend dimension is the unit dimension or coarser), so
            // the trend adds one slope per group.
            k_absorbed += n_groups;
            let start = data
                .contexts
                .iter()
                .map(|c| c.clock)
                .min()
                .expect("nonempty sample");
            let t = data
                .contexts
                .iter()
                .map(|c| months_between(start, c.clock) as f64 / 12.0)
                .collect();
            Some(TrendDim {
                codes: r.codes,
                n_groups,
                t,
            })
        }
    };

    let info = demean(
        &mut columns,
        &fe_dims,
        trend.as_ref(),
        spec.demean_tol,
        spec.demean_max_iter,
    );
    if !info.converged {
        log::warn!(
            "demeaning stopped at {} sweeps without reaching tol {}",
            info.iterations,
            spec.demean_tol
        );
    }

    let y_t = columns.remove(0);
    let fit = ols(&columns, &y_t)?;

    let cluster = recode(data.frame.cat(&spec.cluster)?);
    let n_clusters = cluster.labels.len();
    let x_kept: Vec<&[f64]> = fit.kept.iter().map(|&j| columns[j].as_slice()).collect();
    let vcov = cluster_vcov(
        &x_kept,
        &fit.residuals,
        &fit.xtx_inv,
        &cluster.codes,
        n_clusters,
        k_absorbed,
    )?;

    let rows = fit
        .kept
        .iter()
        .enumerate()
        .map(|(pos, &j)| {
            let coef = fit.coefficients[pos];
            let se = vcov[(pos, pos)].sqrt();
            EstimateRow {
                term: names[j].clone(),
                coef,
                se,
                t: coef / se,
                ci95: (coef - CI95_Z * se, coef + CI95_Z * se),
            }
        })
        .collect();
    Ok(EstimateTable {
        rows,
        n_obs: n,
        n_clusters,
        fe_dims: spec.fixed_effects.clone(),
        converged: info.converged,
        demeaning_iterations: info.iterations,
        dropped_terms: fit.dropped.iter().map(|&j| names[j].clone()).collect(),
    })
}
