//! Sandwich variance estimators: CR1 cluster-robust covariance for panel
//! fits and HC1 heteroskedasticity-robust covariance for cross sections.
//! The degrees-of-freedom correction counts absorbed fixed-effect and
//! trend parameters alongside the kept regressors.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// CR1 cluster sandwich over the kept design columns:
/// (XᵀX)⁻¹ (Σ_g s_g s_gᵀ) (XᵀX)⁻¹ · G/(G−1) · (N−1)/(N−K)
/// with s_g the within-cluster score sum and K = kept + absorbed.
pub fn cluster_vcov(
    x_kept: &[&[f64]],
    residuals: &[f64],
    xtx_inv: &DMatrix<f64>,
    cluster_codes: &[u32],
    n_clusters: usize,
    k_absorbed: usize,
) -> Result<DMatrix<f64>> {
    if n_clusters < 2 {
        return Err(Error::TooFewClusters(n_clusters));
    }
    let n = residuals.len();
    let k = x_kept.len();
    let k_total = k + k_absorbed;
    if n <= k_total {
        return Err(Error::TooFewRows {
            n_obs: n,
            n_params: k_total,
        });
    }

    let mut scores = vec![vec![0.0; k]; n_clusters];
    for i in 0..n {
        let s = &mut scores[cluster_codes[i] as usize];
        for (l, col) in x_kept.iter().enumerate() {
            s[l] += residuals[i] * col[i];
        }
    }
    let mut meat = DMatrix::zeros(k, k);
    for s in &scores {
        for a in 0..k {
            for b in a..k {
                let v = s[a] * s[b];
                meat[(a, b)] += v;
                if a != b {
                    meat[(b, a)] += v;
                }
            }
        }
    }

    let g = n_clusters as f64;
    let scale = g / (g - 1.0) * (n as f64 - 1.0) / ((n - k_total) as f64);
    let vcov = xtx_inv * meat * xtx_inv * scale;
    Ok(symmetrize(vcov))
}

/// HC1 sandwich: (XᵀX)⁻¹ (Σ_i e_i² x_i x_iᵀ) (XᵀX)⁻¹ · N/(N−K).
pub fn hc1_vcov(
    x_kept: &[&[f64]],
    residuals: &[f64],
    xtx_inv: &DMatrix<f64>,
    k_absorbed: usize,
) -> Result<DMatrix<f64>> {
    let n = residuals.len();
    let k = x_kept.len();
    let k_total = k + k_absorbed;
    if n <= k_total {
        return Err(Error::TooFewRows {
            n_obs: n,
            n_params: k_total,
        });
    }
    let mut meat = DMatrix::zeros(k, k);
    for i in 0..n {
        let e2 = residuals[i] * residuals[i];
        for a in 0..k {
            for b in a..k {
                let v = e2 * x_kept[a][i] * x_kept[b][i];
                meat[(a, b)] += v;
                if a != b {
                    meat[(b, a)] += v;
                }
            }
        }
    }
    let scale = n as f64 / (n - k_total) as f64;
    let vcov = xtx_inv * meat * xtx_inv * scale;
    Ok(symmetrize(vcov))
}

/// The sandwich is symmetric in exact arithmetic; average away the
/// floating-point asymmetry of the triple product.
fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}
