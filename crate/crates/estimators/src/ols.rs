//! Least squares via modified Gram-Schmidt QR with one reorthogonalization
//! pass. Collinear columns are detected from the residual norm and dropped
//! deterministically left to right, so the first of two duplicated columns
//! always survives.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative residual-norm threshold below which a column counts as
/// linearly dependent on its predecessors.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct OlsFit {
    /// Coefficients for the kept columns, in kept order.
    pub coefficients: Vec<f64>,
    /// Indices of the input columns that survived rank screening.
    pub kept: Vec<usize>,
    /// Indices dropped as collinear (or identically zero).
    pub dropped: Vec<usize>,
    pub residuals: Vec<f64>,
    /// (XᵀX)⁻¹ over the kept columns, from the R factor.
    pub xtx_inv: DMatrix<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves min ||y - Xb|| for the columns of `x`. Requires at least one
/// independent column and more rows than kept columns.
pub fn ols(x: &[Vec<f64>], y: &[f64]) -> Result<OlsFit> {
    let n = y.len();
    for col in x {
        assert_eq!(col.len(), n, "design column length mismatch");
    }
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut r_cols: Vec<Vec<f64>> = Vec::new(); // R column per kept column
    let mut kept = Vec::new();
    let mut dropped = Vec::new();

    for (j, col) in x.iter().enumerate() {
        let orig = norm(col);
        let mut v = col.clone();
        let mut r = vec![0.0; q.len()];
        for (i, qi) in q.iter().enumerate() {
            let c = dot(qi, &v);
            for (ve, qe) in v.iter_mut().zip(qi) {
                *ve -= c * qe;
            }
            r[i] = c;
        }
        // Second pass recovers orthogonality lost to cancellation.
        for (i, qi) in q.iter().enumerate() {
            let c = dot(qi, &v);
            for (ve, qe) in v.iter_mut().zip(qi) {
                *ve -= c * qe;
            }
            r[i] += c;
        }
        let nv = norm(&v);
        if orig == 0.0 || nv <= RANK_TOL * orig {
            log::warn!("design column {j} is collinear with its predecessors; dropped");
            dropped.push(j);
            continue;
        }
        for ve in v.iter_mut() {
            *ve /= nv;
        }
        r.push(nv);
        q.push(v);
        r_cols.push(r);
        kept.push(j);
    }

    let k = kept.len();
    if k == 0 {
        return Err(Error::InvalidSpec(
            "no independent design columns remain".to_owned(),
        ));
    }
    if n <= k {
        return Err(Error::TooFewRows {
            n_obs: n,
            n_params: k,
        });
    }

    let qty: Vec<f64> = q.iter().map(|qi| dot(qi, y)).collect();
    // Back-substitute R b = Qᵀy.
    let mut beta = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = qty[i];
        for j in (i + 1)..k {
            s -= r_cols[j][i] * beta[j];
        }
        beta[i] = s / r_cols[i][i];
    }

    // Residuals from the projection: y minus its component in span(Q).
    let mut residuals = y.to_vec();
    for (qi, c) in q.iter().zip(&qty) {
        for (re, qe) in residuals.iter_mut().zip(qi) {
            *re -= c * qe;
        }
    }

    // (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ. Invert R by back-substitution on the identity.
    let mut rinv = DMatrix::zeros(k, k);
    for col in 0..k {
        let mut e = vec![0.0; k];
        e[col] = 1.0;
        for i in (0..k).rev() {
            let mut s = e[i];
            for j in (i + 1)..k {
                s -= r_cols[j][i] * rinv[(j, col)];
            }
            rinv[(i, col)] = s / r_cols[i][i];
        }
    }
    let xtx_inv = &rinv * rinv.transpose();

    Ok(OlsFit {
        coefficients: beta,
        kept,
        dropped,
        residuals,
        xtx_inv,
    })
}
