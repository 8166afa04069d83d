//! Fixed-effect absorption by alternating projections: each sweep removes
//! group means along every fixed-effect dimension and, when configured,
//! projects out a per-group {intercept, time} trend. Iterates to a fixed
//! point, which equals the residual from regressing on the full dummy
//! (and dummy-by-time) set.

use rayon::prelude::*;

/// One fixed-effect dimension as dense group codes.
#[derive(Clone, Debug)]
pub struct FeDim {
    pub codes: Vec<u32>,
    pub n_groups: usize,
}

/// Per-group linear trend: groups from `codes`, regressor `t` (calendar
/// time; any affine scaling spans the same space).
#[derive(Clone, Debug)]
pub struct TrendDim {
    pub codes: Vec<u32>,
    pub n_groups: usize,
    pub t: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DemeanInfo {
    pub iterations: usize,
    pub converged: bool,
}

/// Sufficient statistics for one trend group, fixed across sweeps.
struct TrendGroup {
    n: f64,
    sum_t: f64,
    sum_tt: f64,
}

fn sweep_fe(column: &mut [f64], dim: &FeDim) {
    let mut sums = vec![0.0; dim.n_groups];
    let mut counts = vec![0usize; dim.n_groups];
    for (v, &g) in column.iter().zip(&dim.codes) {
        sums[g as usize] += *v;
        counts[g as usize] += 1;
    }
    for g in 0..dim.n_groups {
        if counts[g] > 0 {
            sums[g] /= counts[g] as f64;
        }
    }
    for (v, &g) in column.iter_mut().zip(&dim.codes) {
        *v -= sums[g as usize];
    }
}

fn sweep_trend(column: &mut [f64], trend: &TrendDim, groups: &[TrendGroup]) {
    let mut sum_y = vec![0.0; trend.n_groups];
    let mut sum_ty = vec![0.0; trend.n_groups];
    for ((v, &g), &t) in column.iter().zip(&trend.codes).zip(&trend.t) {
        sum_y[g as usize] += *v;
        sum_ty[g as usize] += t * *v;
    }
    // Per group solve [n St; St Stt][a b]' = [Sy Sty]'; a group with a
    // constant time value degenerates to its mean.
    let mut intercept = vec![0.0; trend.n_groups];
    let mut slope = vec![0.0; trend.n_groups];
    for g in 0..trend.n_groups {
        let s = &groups[g];
        let det = s.n * s.sum_tt - s.sum_t * s.sum_t;
        if det.abs() > 1e-12 * (s.n * s.sum_tt).max(1.0) {
            intercept[g] = (s.sum_tt * sum_y[g] - s.sum_t * sum_ty[g]) / det;
            slope[g] = (s.n * sum_ty[g] - s.sum_t * sum_y[g]) / det;
        } else if s.n > 0.0 {
            intercept[g] = sum_y[g] / s.n;
        }
    }
    for ((v, &g), &t) in column.iter_mut().zip(&trend.codes).zip(&trend.t) {
        *v -= intercept[g as usize] + slope[g as usize] * t;
    }
}

/// Demeans every column in place. Stops when the largest absolute change
/// any entry sees in a full sweep falls below `tol`, or flags
/// `converged = false` after `max_iter` sweeps.
pub fn demean(
    columns: &mut [Vec<f64>],
    fe_dims: &[FeDim],
    trend: Option<&TrendDim>,
    tol: f64,
    max_iter: usize,
) -> DemeanInfo {
    assert!(tol > 0.0, "tolerance must be positive");
    let trend_groups: Option<Vec<TrendGroup>> = trend.map(|tr| {
        let mut groups: Vec<TrendGroup> = (0..tr.n_groups)
            .map(|_| TrendGroup {
                n: 0.0,
                sum_t: 0.0,
                sum_tt: 0.0,
            })
            .collect();
        for (&g, &t) in tr.codes.iter().zip(&tr.t) {
            let s = &mut groups[g as usize];
            s.n += 1.0;
            s.sum_t += t;
            s.sum_tt += t * t;
        }
        groups
    });

    for iteration in 1..=max_iter {
        let max_change = columns
            .par_iter_mut()
            .map(|column| {
                let before = column.clone();
                for dim in fe_dims {
                    sweep_fe(column, dim);
                }
                if let (Some(tr), Some(groups)) = (trend, trend_groups.as_ref()) {
                    sweep_trend(column, tr, groups);
                }
                before
                    .iter()
                    .zip(column.iter())
                    .map(|(b, a)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        if max_change < tol {
            return DemeanInfo {
                iterations: iteration,
                converged: true,
            };
        }
    }
    DemeanInfo {
        iterations: max_iter,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dim(codes: Vec<u32>) -> FeDim {
        let n_groups = codes.iter().map(|c| c + 1).max().unwrap_or(0) as usize;
        FeDim { codes, n_groups }
    }

    #[test]
    fn single_dimension_demeans_in_one_pass() {
        let mut cols = vec![vec![1.0, 3.0, 10.0, 14.0]];
        let info = demean(&mut cols, &[dim(vec![0, 0, 1, 1])], None, 1e-8, 100);
        assert_eq!(cols[0], vec![-1.0, 1.0, -2.0, 2.0]);
        // The first sweep is exact; the second just verifies convergence.
        assert!(info.converged);
        assert_eq!(info.iterations, 2);
    }

    #[test]
    fn constant_within_groups_goes_to_zero() {
        let mut cols = vec![vec![5.0, 5.0, -3.0, -3.0]];
        demean(&mut cols, &[dim(vec![0, 0, 1, 1])], None, 1e-8, 100);
        assert_eq!(cols[0], vec![0.0; 4]);
    }

    #[test]
    fn balanced_two_way_matches_within_transform() {
        // 2x2 balanced panel: y_it - yi. - y.t + y.. is the exact
        // two-way projection.
        let y = [3.0, 7.0, 4.0, 12.0]; // (unit, time): (0,0),(0,1),(1,0),(1,1)
        let unit = dim(vec![0, 0, 1, 1]);
        let time = dim(vec![0, 1, 0, 1]);
        let grand = y.iter().sum::<f64>() / 4.0;
        let expect: Vec<f64> = (0..4)
            .map(|i| {
                let ui = (y[i / 2 * 2] + y[i / 2 * 2 + 1]) / 2.0;
                let ti = (y[i % 2] + y[i % 2 + 2]) / 2.0;
                y[i] - ui - ti + grand
            })
            .collect();
        let mut cols = vec![y.to_vec()];
        let info = demean(&mut cols, &[unit, time], None, 1e-12, 1000);
        assert!(info.converged);
        for (got, want) in cols[0].iter().zip(&expect) {
            assert_relative_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn trend_projection_removes_group_lines() {
        // Two groups, each with y exactly linear in t: residuals vanish.
        let t = vec![0.0, 1.0, 2.0, 0.0, 1.0, 2.0];
        let y = vec![1.0, 3.0, 5.0, 10.0, 8.0, 6.0];
        let codes = vec![0, 0, 0, 1, 1, 1];
        let trend = TrendDim {
            codes: codes.clone(),
            n_groups: 2,
            t,
        };
        let mut cols = vec![y];
        let info = demean(&mut cols, &[], Some(&trend), 1e-10, 100);
        assert!(info.converged);
        for v in &cols[0] {
            assert!(v.abs() < 1e-12, "residual {v} after trend projection");
        }
    }

    #[test]
    fn singleton_trend_group_degenerates_to_mean() {
        let trend = TrendDim {
            codes: vec![0, 1, 1],
            n_groups: 2,
            t: vec![4.0, 0.0, 2.0],
        };
        let mut cols = vec![vec![7.0, 1.0, 3.0]];
        demean(&mut cols, &[], Some(&trend), 1e-10, 100);
        assert_eq!(cols[0][0], 0.0, "singleton group must zero out");
        assert!(cols[0][1].abs() < 1e-12 && cols[0][2].abs() < 1e-12);
    }

    #[test]
    fn non_convergence_is_flagged() {
        // An unbalanced two-way layout that cannot finish in two sweeps.
        let mut cols = vec![vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]];
        let unit = dim(vec![0, 0, 1, 1, 2, 2]);
        let time = dim(vec![0, 1, 0, 2, 1, 2]);
        let info = demean(&mut cols, &[unit, time], None, 1e-30, 3);
        assert!(!info.converged);
        assert_eq!(info.iterations, 3);
    }
}
