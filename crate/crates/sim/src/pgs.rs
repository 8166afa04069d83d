//! Polygenic scores: a weighted sum of per-SNP minor-allele counts,
//! standardized to mean zero and unit population standard deviation over
//! the provided sample.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minor-allele counts (persons x SNPs, entries 0/1/2) with per-SNP
/// weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenotypeMatrix {
    counts: Vec<Vec<u8>>,
    weights: Vec<f64>,
}

impl GenotypeMatrix {
    pub fn new(counts: Vec<Vec<u8>>, weights: Vec<f64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidConfig("no persons in genotype matrix".to_owned()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidConfig("non-finite SNP weight".to_owned()));
        }
        for (person, row) in counts.iter().enumerate() {
            if row.len() != weights.len() {
                return Err(Error::WeightCount {
                    snps: row.len(),
                    weights: weights.len(),
                });
            }
            for (snp, &value) in row.iter().enumerate() {
                if value > 2 {
                    return Err(Error::InvalidGenotype { person, snp, value });
                }
            }
        }
        Ok(Self { counts, weights })
    }

    pub fn n_persons(&self) -> usize {
        self.counts.len()
    }

    pub fn n_snps(&self) -> usize {
        self.weights.len()
    }

    /// Same counts, different trait weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.counts.clone(), weights)
    }
}

/// Random counts Binomial(2, maf) with N(0, 1) weights, for synthetic
/// cohorts.
pub fn random_genotypes<R: Rng>(
    rng: &mut R,
    n_persons: usize,
    n_snps: usize,
    maf: f64,
) -> Result<GenotypeMatrix> {
    if !(0.0..=1.0).contains(&maf) {
        return Err(Error::InvalidConfig(format!("allele frequency {maf}")));
    }
    let allele = Binomial::new(2, maf).expect("checked probability");
    let weight = Normal::new(0.0, 1.0).expect("fixed sd");
    let weights: Vec<f64> = (0..n_snps).map(|_| weight.sample(rng)).collect();
    let counts: Vec<Vec<u8>> = (0..n_persons)
        .map(|_| (0..n_snps).map(|_| allele.sample(rng) as u8).collect())
        .collect();
    GenotypeMatrix::new(counts, weights)
}

/// G_i = sum_j w_j x_ij, standardized to mean 0 and population s.d. 1.
pub fn aggregate_polygenic_score(geno: &GenotypeMatrix) -> Result<Vec<f64>> {
    let n = geno.counts.len();
    let raw: Vec<f64> = geno
        .counts
        .iter()
        .map(|row| {
            row.iter()
                .zip(&geno.weights)
                .map(|(&c, &w)| w * c as f64)
                .sum::<f64>()
        })
        .collect();
    let mean = raw.iter().sum::<f64>() / n as f64;
    let variance = raw.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n as f64;
    if variance <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let sd = variance.sqrt();
    Ok(raw.iter().map(|r| (r - mean) / sd).collect())
}
