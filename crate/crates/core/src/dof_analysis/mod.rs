//! Gaussian mutual information of the scheme observations, pre-log slope
//! fits, rank identities and Monte Carlo SDoF estimates.
//!
//! All logarithms are base 2. Thermal noise has identity covariance at every
//! receive antenna.

mod monte_carlo;
mod mutual_info;
mod ranks;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{log2_det_identity_plus, CMatrix};

pub use crate::linalg::numeric_rank;
pub use monte_carlo::{monte_carlo_sdof, theory_values, Estimate, MonteCarloConfig, SimulationRecord, TheoryValue};
pub use mutual_info::{
    conditional_mi, leakage_eaves, message_leakage, message_mi, mi_curve, mutual_info_legit, observation_entropy,
    MiOptions,
};
pub use ranks::{
    is_decodable, rank_trials, verify_ranks, DecodeTally, IdentityTally, RankFailure, RankRecord, RankReport,
    RankTrials,
};

/// Transmit powers `P` (linear scale), strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrGrid {
    powers: Vec<f64>,
}

impl SnrGrid {
    pub const DEFAULT_DB: [f64; 4] = [40.0, 60.0, 80.0, 100.0];

    pub fn from_powers(powers: Vec<f64>) -> Result<Self> {
        if powers.len() < 2 {
            return Err(Error::InvalidGrid("need at least two points".into()));
        }
        if powers.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(Error::InvalidGrid("powers must be positive and finite".into()));
        }
        if powers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("powers must be strictly increasing".into()));
        }
        Ok(Self { powers })
    }

    pub fn from_db(db: &[f64]) -> Result<Self> {
        Self::from_powers(db.iter().map(|d| 10f64.powf(d / 10.0)).collect())
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn db(&self) -> Vec<f64> {
        self.powers.iter().map(|p| 10.0 * p.log10()).collect()
    }

    pub fn log2_powers(&self) -> Vec<f64> {
        self.powers.iter().map(|p| p.log2()).collect()
    }

    pub fn span_db(&self) -> f64 {
        let db = self.db();
        db[db.len() - 1] - db[0]
    }
}

impl Default for SnrGrid {
    fn default() -> Self {
        Self::from_db(&Self::DEFAULT_DB).expect("default grid is valid")
    }
}

/// Mutual information in bits at every grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiCurve {
    pub grid: SnrGrid,
    pub values: Vec<f64>,
}

impl MiCurve {
    pub fn slope(&self) -> SlopeEstimate {
        fit_slope(&self.grid.log2_powers(), &self.values)
    }
}

/// Least-squares line through `(log2 P, bits)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the fit residuals.
    pub residual: f64,
}

/// Ordinary least squares of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> SlopeEstimate {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    SlopeEstimate {
        slope,
        intercept,
        residual,
    }
}

/// Slope of `log2 det(I + P A A^H)` against `log2 P`, which tends to
/// `rank(A)` as `P` grows.
pub fn rank_lemma_check(a: &CMatrix, grid: &SnrGrid) -> SlopeEstimate {
    let values: Vec<f64> = grid.powers().iter().map(|&p| log2_det_identity_plus(a, p)).collect();
    fit_slope(&grid.log2_powers(), &values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_model::{gaussian_matrix, Seed};
    use crate::linalg::{identity, zeros};
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_validation() {
        assert!(SnrGrid::from_db(&[40.0]).is_err());
        assert!(SnrGrid::from_db(&[60.0, 40.0]).is_err());
        assert!(SnrGrid::from_powers(vec![0.0, 1.0]).is_err());
        let g = SnrGrid::default();
        assert_abs_diff_eq!(g.powers()[0], 1e4, epsilon = 1e-6);
        assert_abs_diff_eq!(g.span_db(), 60.0, epsilon = 1e-9);
    }

    #[test]
    fn exact_line_fit() {
        let s = fit_slope(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]);
        assert_abs_diff_eq!(s.slope, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.intercept, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.residual, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rank_lemma_examples() {
        let grid = SnrGrid::from_db(&[40.0, 60.0, 80.0, 100.0]).unwrap();
        assert_abs_diff_eq!(rank_lemma_check(&identity(2), &grid).slope, 2.0, epsilon = 1e-3);
        assert_abs_diff_eq!(rank_lemma_check(&zeros(3, 3), &grid).slope, 0.0, epsilon = 1e-12);
        let mut rng = Seed(3).stream_rng(0);
        let a = gaussian_matrix(&mut rng, 3, 5);
        assert_abs_diff_eq!(rank_lemma_check(&a, &grid).slope, 3.0, epsilon = 1e-2);
    }
}
