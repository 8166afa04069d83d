//! Group-time average treatment effects in the Callaway-Sant'Anna style:
//! ATT(g, t) compares outcome changes from the base period g-1 between
//! the group first treated at g and the never-treated units, then
//! aggregates along event time and overall.

use serde::{Deserialize, Serialize};
use smokeshift_core::{months_between, YearMonth};

use crate::error::{Error, Result};

/// Which untreated units anchor the comparison at each (g, t) cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonGroup {
    /// Units never treated in the panel window.
    #[default]
    NeverTreated,
    /// Never-treated units plus units first treated strictly after t.
    NotYetTreated,
}

fn in_comparison(
    unit_group: Option<YearMonth>,
    g: YearMonth,
    t: YearMonth,
    comparison: ComparisonGroup,
) -> bool {
    match unit_group {
        None => true,
        Some(gu) => comparison == ComparisonGroup::NotYetTreated && gu != g && gu > t,
    }
}

/// A unit-by-month outcome panel for the group-time estimator. `group`
/// holds each unit's first treatment month (`None` = never treated);
/// missing outcomes are NaN.
#[derive(Clone, Debug)]
pub struct GtPanel {
    units: Vec<String>,
    group: Vec<Option<YearMonth>>,
    times: Vec<YearMonth>,
    /// Unit-major: y[unit * n_times + time].
    y: Vec<f64>,
}

impl GtPanel {
    pub fn new(
        units: Vec<String>,
        group: Vec<Option<YearMonth>>,
        times: Vec<YearMonth>,
        y: Vec<f64>,
    ) -> Result<Self> {
        if group.len() != units.len() {
            return Err(Error::ColumnLength {
                name: "group".to_owned(),
                expected: units.len(),
                got: group.len(),
            });
        }
        if y.len() != units.len() * times.len() {
            return Err(Error::ColumnLength {
                name: "y".to_owned(),
                expected: units.len() * times.len(),
                got: y.len(),
            });
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCell(
                "panel periods must be strictly increasing".to_owned(),
            ));
        }
        Ok(Self {
            units,
            group,
            times,
            y,
        })
    }

    /// Builds the rectangular panel from long records, NaN-filling gaps.
    /// `groups` maps treated unit ids to their first treatment month.
    pub fn from_records(
        records: &[(String, YearMonth, f64)],
        groups: &std::collections::BTreeMap<String, YearMonth>,
    ) -> Result<Self> {
        let mut units: Vec<String> = Vec::new();
        let mut times: Vec<YearMonth> = Vec::new();
        for (unit, time, _) in records {
            if !units.contains(unit) {
                units.push(unit.clone());
            }
            if !times.contains(time) {
                times.push(*time);
            }
        }
        times.sort_unstable();
        let mut y = vec![f64::NAN; units.len() * times.len()];
        for (unit, time, value) in records {
            let u = units.iter().position(|x| x == unit).expect("unit indexed");
            let t = times.binary_search(time).expect("time indexed");
            let cell = &mut y[u * times.len() + t];
            if !cell.is_nan() {
                return Err(Error::InvalidCell(format!(
                    "duplicate observation for unit {unit} at {time}"
                )));
            }
            *cell = *value;
        }
        let group = units.iter().map(|u| groups.get(u).copied()).collect();
        Self::new(units, group, times, y)
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn times(&self) -> &[YearMonth] {
        &self.times
    }

    pub fn groups(&self) -> &[Option<YearMonth>] {
        &self.group
    }

    /// Outcome of unit index `unit` at time index `time_idx` (NaN when
    /// unobserved).
    pub fn value(&self, unit: usize, time_idx: usize) -> f64 {
        self.y[unit * self.times.len() + time_idx]
    }

    fn time_index(&self, t: YearMonth) -> Option<usize> {
        self.times.binary_search(&t).ok()
    }

    /// Distinct treatment months, ascending.
    pub fn treatment_groups(&self) -> Vec<YearMonth> {
        let mut gs: Vec<YearMonth> = self.group.iter().flatten().copied().collect();
        gs.sort_unstable();
        gs.dedup();
        gs
    }

    /// Outcome changes y_t - y_{g-1} for every unit with both ends
    /// observed, split into (treated-in-g, comparison) with the given
    /// per-unit weights. Returns None when either side is empty or
    /// weightless.
    fn weighted_cell(
        &self,
        g: YearMonth,
        t: YearMonth,
        weights: &[f64],
        comparison: ComparisonGroup,
    ) -> Option<(f64, f64, usize, usize)> {
        let base = self.time_index(g.add_months(-1))?;
        let at = self.time_index(t)?;
        let mut tr_sum = 0.0;
        let mut tr_w = 0.0;
        let mut tr_n = 0usize;
        let mut co_sum = 0.0;
        let mut co_w = 0.0;
        let mut co_n = 0usize;
        for u in 0..self.units.len() {
            let delta = self.value(u, at) - self.value(u, base);
            if !delta.is_finite() {
                continue;
            }
            if self.group[u] == Some(g) {
                tr_sum += weights[u] * delta;
                tr_w += weights[u];
                tr_n += 1;
            } else if in_comparison(self.group[u], g, t, comparison) {
                co_sum += weights[u] * delta;
                co_w += weights[u];
                co_n += 1;
            }
        }
        if tr_n == 0 || co_n == 0 || tr_w == 0.0 || co_w == 0.0 {
            return None;
        }
        Some((tr_sum / tr_w - co_sum / co_w, tr_w, tr_n, co_n))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupTimeAtt {
    pub group: YearMonth,
    pub time: YearMonth,
    pub att: f64,
    /// Analytic two-sample standard error; NaN when a side has a single
    /// unit. Bootstrap inference is the supported path for aggregates.
    pub se: f64,
    pub n_treated: usize,
    pub n_control: usize,
}

/// ATT(g, t) anchored at base period g-1 with never-treated comparison
/// units, complete cases only (units observed at both ends).
pub fn att_gt(panel: &GtPanel, g: YearMonth, t: YearMonth) -> Result<GroupTimeAtt> {
    att_gt_in(panel, g, t, ComparisonGroup::NeverTreated)
}

/// [`att_gt`] with an explicit comparison-group choice.
pub fn att_gt_in(
    panel: &GtPanel,
    g: YearMonth,
    t: YearMonth,
    comparison: ComparisonGroup,
) -> Result<GroupTimeAtt> {
    let base_month = g.add_months(-1);
    if t < base_month {
        return Err(Error::InvalidCell(format!(
            "period {t} precedes base period {base_month} of group {g}"
        )));
    }
    if panel.time_index(base_month).is_none() {
        return Err(Error::InvalidCell(format!(
            "base period {base_month} for group {g} is not in the panel"
        )));
    }
    let weights = vec![1.0; panel.units.len()];
    let (att, _, n_treated, n_control) = panel
        .weighted_cell(g, t, &weights, comparison)
        .ok_or(Error::MissingCell { group: g, time: t })?;

    // Unweighted dispersion of the deltas for the analytic fallback SE.
    let base = panel.time_index(base_month).expect("checked above");
    let at = panel.time_index(t).expect("weighted_cell found it");
    let mut tr = Vec::new();
    let mut co = Vec::new();
    for u in 0..panel.units.len() {
        let delta = panel.value(u, at) - panel.value(u, base);
        if !delta.is_finite() {
            continue;
        }
        if panel.group[u] == Some(g) {
            tr.push(delta);
        } else if in_comparison(panel.group[u], g, t, comparison) {
            co.push(delta);
        }
    }
    let var = |v: &[f64]| -> f64 {
        if v.len() < 2 {
            return f64::NAN;
        }
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    };
    let se = (var(&tr) / tr.len() as f64 + var(&co) / co.len() as f64).sqrt();

    Ok(GroupTimeAtt {
        group: g,
        time: t,
        att,
        se,
        n_treated,
        n_control,
    })
}

/// Every computable ATT(g, t) for t >= g-1, in (g, t) order, with
/// never-treated comparison units. Cells whose treated or comparison side
/// is empty are skipped.
pub fn att_surface(panel: &GtPanel) -> Result<Vec<GroupTimeAtt>> {
    att_surface_in(panel, ComparisonGroup::NeverTreated)
}

/// [`att_surface`] with an explicit comparison-group choice.
pub fn att_surface_in(panel: &GtPanel, comparison: ComparisonGroup) -> Result<Vec<GroupTimeAtt>> {
    let groups = panel.treatment_groups();
    if groups.is_empty() {
        return Err(Error::EmptyTreated);
    }
    let mut out = Vec::new();
    for g in groups {
        if panel.time_index(g.add_months(-1)).is_none() {
            log::warn!("group {g} has no base period {} in the panel", g.add_months(-1));
            continue;
        }
        for &t in &panel.times {
            if t < g.add_months(-1) {
                continue;
            }
            match att_gt_in(panel, g, t, comparison) {
                Ok(cell) => out.push(cell),
                Err(Error::MissingCell { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyAggregation("no computable (g, t) cells".to_owned()));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "event_time")]
pub enum AggregationKind {
    Dynamic(i64),
    Overall,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregatedAtt {
    pub kind: AggregationKind,
    pub estimate: f64,
    /// Filled by the multiplier bootstrap; NaN from the point aggregator.
    pub se: f64,
    pub ci95: (f64, f64),
}

fn group_sizes(atts: &[GroupTimeAtt]) -> std::collections::BTreeMap<YearMonth, f64> {
    let mut sizes = std::collections::BTreeMap::new();
    for a in atts {
        sizes.entry(a.group).or_insert(a.n_treated as f64);
    }
    sizes
}

/// Group-size-weighted average of ATT(g, g+e) over groups observed at
/// month horizon e.
pub fn aggregate_dynamic(atts: &[GroupTimeAtt], event_time: i64) -> Result<AggregatedAtt> {
    let sizes = group_sizes(atts);
    let mut num = 0.0;
    let mut den = 0.0;
    for a in atts {
        if months_between(a.group, a.time) == event_time {
            let w = sizes[&a.group];
            num += w * a.att;
            den += w;
        }
    }
    if den == 0.0 {
        return Err(Error::NoHorizon(event_time));
    }
    let estimate = num / den;
    Ok(AggregatedAtt {
        kind: AggregationKind::Dynamic(event_time),
        estimate,
        se: f64::NAN,
        ci95: (f64::NAN, f64::NAN),
    })
}

/// Weighted average of post-treatment cells (t >= g): group weights
/// proportional to group size, spread uniformly over each group's post
/// periods.
pub fn aggregate_overall(atts: &[GroupTimeAtt]) -> Result<AggregatedAtt> {
    let sizes = group_sizes(atts);
    let mut post_counts: std::collections::BTreeMap<YearMonth, f64> =
        std::collections::BTreeMap::new();
    for a in atts {
        if a.time >= a.group {
            *post_counts.entry(a.group).or_insert(0.0) += 1.0;
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for a in atts {
        if a.time >= a.group {
            let w = sizes[&a.group] / post_counts[&a.group];
            num += w * a.att;
            den += w;
        }
    }
    if den == 0.0 {
        return Err(Error::EmptyAggregation(
            "no post-treatment cells".to_owned(),
        ));
    }
    Ok(AggregatedAtt {
        kind: AggregationKind::Overall,
        estimate: num / den,
        se: f64::NAN,
        ci95: (f64::NAN, f64::NAN),
    })
}

/// Point estimates recomputed under per-unit weights, used by the
/// multiplier bootstrap. Horizons and the overall weights mirror the
/// unweighted aggregation (group sizes from the unweighted panel).
pub(crate) fn weighted_aggregates(
    panel: &GtPanel,
    template: &[GroupTimeAtt],
    horizons: &[i64],
    weights: &[f64],
    comparison: ComparisonGroup,
) -> (Vec<f64>, f64) {
    let sizes = group_sizes(template);
    let mut cells: Vec<(YearMonth, YearMonth, f64)> = Vec::with_capacity(template.len());
    for cell in template {
        if let Some((att, _, _, _)) =
            panel.weighted_cell(cell.group, cell.time, weights, comparison)
        {
            cells.push((cell.group, cell.time, att));
        }
    }
    let dynamic: Vec<f64> = horizons
        .iter()
        .map(|&e| {
            let mut num = 0.0;
            let mut den = 0.0;
            for (g, t, att) in &cells {
                if months_between(*g, *t) == e {
                    let w = sizes[g];
                    num += w * att;
                    den += w;
                }
            }
            if den == 0.0 {
                f64::NAN
            } else {
                num / den
            }
        })
        .collect();

    let mut post_counts: std::collections::BTreeMap<YearMonth, f64> =
        std::collections::BTreeMap::new();
    for (g, t, _) in &cells {
        if t >= g {
            *post_counts.entry(*g).or_insert(0.0) += 1.0;
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (g, t, att) in &cells {
        if t >= g {
            let w = sizes[g] / post_counts[g];
            num += w * att;
            den += w;
        }
    }
    let overall = if den == 0.0 { f64::NAN } else { num / den };
    (dynamic, overall)
}
