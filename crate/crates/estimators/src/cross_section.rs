//! Plain OLS for one-row-per-unit diagnostics (adoption timing on
//! density and status, within-area selection checks), reported with
//! heteroskedasticity-robust standard errors and an optional absorbed
//! fixed effect.

use crate::demean::{demean, FeDim};
use crate::error::{Error, Result};
use crate::estimate::{EstimateRow, EstimateTable, CI95_Z};
use crate::frame::{recode, Frame};
use crate::ols::ols;
use crate::vcov::hc1_vcov;

/// Fits `outcome` on `regressors` plus `controls` by OLS with HC1
/// standard errors. Without a fixed effect an intercept named `const`
/// leads the design, so constant regressors are the ones dropped as
/// collinear; with `fixed_effect` naming a categorical column, its
/// groups are absorbed instead and counted in the residual degrees of
/// freedom.
pub fn cross_section_ols(
    frame: &Frame,
    outcome: &str,
    regressors: &[String],
    controls: &[String],
    fixed_effect: Option<&str>,
) -> Result<EstimateTable> {
    if regressors.is_empty() {
        return Err(Error::InvalidSpec("no regressors".to_owned()));
    }
    let mut used: Vec<&str> = vec![outcome];
    used.extend(regressors.iter().map(|s| s.as_str()));
    used.extend(controls.iter().map(|s| s.as_str()));
    let mut keep = vec![true; frame.n_rows()];
    for name in &used {
        for (k, v) in keep.iter_mut().zip(frame.float(name)?) {
            *k &= v.is_finite();
        }
    }
    if let Some(name) = fixed_effect {
        frame.cat(name)?;
    }
    let data = frame.filter(&keep);
    let n = data.n_rows();

    let mut names: Vec<String> = Vec::new();
    if fixed_effect.is_none() {
        names.push("const".to_owned());
    }
    names.extend(regressors.iter().cloned());
    names.extend(controls.iter().cloned());

    let mut columns: Vec<Vec<f64>> = vec![data.float(outcome)?.to_vec()];
    if fixed_effect.is_none() {
        columns.push(vec![1.0; n]);
    }
    for name in regressors.iter().chain(controls) {
        columns.push(data.float(name)?.to_vec());
    }

    let mut fe_dims = Vec::new();
    let mut k_absorbed = 0usize;
    if let Some(name) = fixed_effect {
        let r = recode(data.cat(name)?);
        k_absorbed = r.labels.len();
        fe_dims.push(FeDim {
            codes: r.codes,
            n_groups: r.labels.len(),
        });
        // A single dimension is projected out exactly in one sweep.
        let info = demean(&mut columns, &fe_dims, None, 1e-10, 10);
        debug_assert!(info.converged);
    }

    let y = columns.remove(0);
    let fit = ols(&columns, &y)?;
    let x_kept: Vec<&[f64]> = fit.kept.iter().map(|&j| columns[j].as_slice()).collect();
    let vcov = hc1_vcov(&x_kept, &fit.residuals, &fit.xtx_inv, k_absorbed)?;

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
        // Every observation is its own cluster under HC1.
        n_clusters: n,
        fe_dims: fixed_effect.map(|s| vec![s.to_owned()]).unwrap_or_default(),
        converged: true,
        demeaning_iterations: 0,
        dropped_terms: fit.dropped.iter().map(|&j| names[j].clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn owned(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn outcome_on_itself_has_unit_coefficient() {
        let mut frame = Frame::new(6);
        let x = vec![3.0, -1.0, 4.0, 1.0, 5.0, 9.0];
        frame.add_float("timing", x.clone()).unwrap();
        frame.add_float("timing_copy", x).unwrap();
        let table =
            cross_section_ols(&frame, "timing", &owned(&["timing_copy"]), &[], None).unwrap();
        let slope = table.row("timing_copy").unwrap();
        assert!((slope.coef - 1.0).abs() < 1e-12);
        assert!((table.row("const").unwrap().coef).abs() < 1e-10);
    }

    #[test]
    fn exact_line_is_recovered_with_vanishing_se() {
        let mut frame = Frame::new(5);
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 + 2.0 * v).collect();
        frame.add_float("x", x).unwrap();
        frame.add_float("y", y).unwrap();
        let table = cross_section_ols(&frame, "y", &owned(&["x"]), &[], None).unwrap();
        let slope = table.row("x").unwrap();
        let intercept = table.row("const").unwrap();
        assert!((slope.coef - 2.0).abs() < 1e-12);
        assert!((intercept.coef - 3.0).abs() < 1e-12);
        assert!(slope.se < 1e-6);
        assert_eq!(table.n_clusters, 5);
    }

    #[test]
    fn constant_regressor_loses_to_the_intercept() {
        let mut frame = Frame::new(5);
        frame
            .add_float("y", vec![1.0, 2.0, 3.0, 4.0, 5.0])
            .unwrap();
        frame
            .add_float("flat", vec![2.0, 2.0, 2.0, 2.0, 2.0])
            .unwrap();
        frame
            .add_float("x", vec![0.0, 1.0, 2.0, 3.0, 4.0])
            .unwrap();
        let table = cross_section_ols(&frame, "y", &owned(&["flat", "x"]), &[], None).unwrap();
        assert_eq!(table.dropped_terms, vec!["flat".to_owned()]);
        assert!((table.row("x").unwrap().coef - 1.0).abs() < 1e-12);
        assert!(table.row("const").is_some());
    }

    #[test]
    fn absorbed_groups_recover_the_within_slope() {
        // y = group intercept + 2 x, exactly.
        let mut frame = Frame::new(6);
        let x = vec![0.0, 1.0, 2.0, 0.0, 1.0, 2.0];
        let g = vec!["a", "a", "a", "b", "b", "b"];
        let y: Vec<f64> = x
            .iter()
            .zip(&g)
            .map(|(v, s)| if *s == "a" { 10.0 } else { -4.0 } + 2.0 * v)
            .collect();
        frame.add_float("x", x).unwrap();
        frame.add_float("y", y).unwrap();
        frame
            .add_cat("grp", g.iter().map(|s| s.to_string()).collect())
            .unwrap();
        let table = cross_section_ols(&frame, "y", &owned(&["x"]), &[], Some("grp")).unwrap();
        assert!((table.row("x").unwrap().coef - 2.0).abs() < 1e-12);
        assert!(table.row("const").is_none());
        assert_eq!(table.fe_dims, vec!["grp".to_owned()]);
    }

    #[test]
    fn absorbed_groups_count_against_degrees_of_freedom() {
        // 3 groups + 1 slope = 4 parameters on 4 rows: no residual df.
        let mut frame = Frame::new(4);
        frame.add_float("x", vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        frame.add_float("y", vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        frame
            .add_cat("grp", owned(&["a", "a", "b", "c"]))
            .unwrap();
        assert!(matches!(
            cross_section_ols(&frame, "y", &owned(&["x"]), &[], Some("grp")),
            Err(Error::TooFewRows { .. })
        ));
    }

    #[test]
    fn missing_rows_are_dropped_listwise() {
        let mut frame = Frame::new(4);
        frame
            .add_float("x", vec![0.0, 1.0, f64::NAN, 3.0])
            .unwrap();
        frame.add_float("y", vec![1.0, 3.0, 7.0, 7.0]).unwrap();
        let table = cross_section_ols(&frame, "y", &owned(&["x"]), &[], None).unwrap();
        assert_eq!(table.n_obs, 3);
    }
}
