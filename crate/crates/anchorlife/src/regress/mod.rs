//! Statistical core: ordinary least squares with confidence / prediction
//! intervals, damped nonlinear least squares, and Monte-Carlo parameter
//! sampling.
//!
//! Everything here is deterministic; random sampling takes an explicit
//! seed and reproducibility is part of the contract.

mod nls;
mod tdist;

pub use nls::{nls_fit, NLSFit, NlsConfig};
pub use tdist::{incomplete_beta, ln_gamma, student_t_cdf, student_t_quantile};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

#[derive(Debug, Error)]
pub enum RegressError {
    #[error("x and y have different lengths ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least {required} points, got {found}")]
    TooFewPoints { found: usize, required: usize },
    #[error("regressor is degenerate: zero spread in x")]
    DegenerateX,
    #[error("model produced a non-finite value at iteration {iteration}")]
    NonFiniteModel { iteration: usize },
    #[error("normal equations are singular")]
    SingularJacobian,
    #[error("confidence level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),
}

/// Which regression band to report.
///
/// Prediction intervals include observation scatter and are the default
/// for extrapolated failure times; mean-confidence intervals cover the
/// fitted line only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    #[default]
    Prediction,
    MeanConfidence,
}

/// Straight-line least-squares fit with everything needed to rebuild
/// confidence and prediction bands later: `y = slope * x + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    #[serde(rename = "n")]
    pub n_points: usize,
    /// Residual variance s^2 = SSE / (n - 2).
    #[serde(rename = "s2")]
    pub residual_variance: f64,
    pub xbar: f64,
    /// Centered sum of squares of the regressor.
    pub sxx: f64,
    /// Covariance of (slope, intercept).
    #[serde(rename = "cov")]
    pub covariance: [[f64; 2]; 2],
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    pub fn params(&self) -> [f64; 2] {
        [self.slope, self.intercept]
    }

    pub fn covariance_rows(&self) -> Vec<Vec<f64>> {
        self.covariance.iter().map(|r| r.to_vec()).collect()
    }

    /// Half-width of the interval of the given kind at `x0`.
    pub fn band_halfwidth(
        &self,
        x0: f64,
        level: f64,
        kind: IntervalKind,
    ) -> Result<f64, RegressError> {
        if !(level > 0.0 && level < 1.0) {
            return Err(RegressError::InvalidLevel(level));
        }
        let df = (self.n_points - 2) as f64;
        let t = student_t_quantile(0.5 * (1.0 + level), df);
        let leading = match kind {
            IntervalKind::Prediction => 1.0,
            IntervalKind::MeanConfidence => 0.0,
        };
        let n = self.n_points as f64;
        let dx = x0 - self.xbar;
        let s = self.residual_variance.sqrt();
        Ok(t * s * (leading + 1.0 / n + dx * dx / self.sxx).sqrt())
    }
}

/// Ordinary least squares of `y` on `x`.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<LinearFit, RegressError> {
    if x.len() != y.len() {
        return Err(RegressError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(RegressError::TooFewPoints {
            found: n,
            required: 3,
        });
    }
    let nf = n as f64;
    let xbar = x.iter().sum::<f64>() / nf;
    let ybar = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - xbar) * (xi - xbar);
        sxy += (xi - xbar) * (yi - ybar);
    }
    if sxx == 0.0 {
        return Err(RegressError::DegenerateX);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - (slope * xi + intercept);
            r * r
        })
        .sum();
    let s2 = sse / (nf - 2.0);
    let var_slope = s2 / sxx;
    let var_intercept = s2 * (1.0 / nf + xbar * xbar / sxx);
    let cov_si = -s2 * xbar / sxx;
    Ok(LinearFit {
        slope,
        intercept,
        n_points: n,
        residual_variance: s2,
        xbar,
        sxx,
        covariance: [[var_slope, cov_si], [cov_si, var_intercept]],
    })
}

/// Interval for the response at `x0`: the mean response when
/// `kind = MeanConfidence`, a new observation when `kind = Prediction`.
pub fn prediction_interval(
    fit: &LinearFit,
    x0: f64,
    level: f64,
    kind: IntervalKind,
) -> Result<(f64, f64), RegressError> {
    let w = fit.band_halfwidth(x0, level, kind)?;
    let y = fit.predict(x0);
    Ok((y - w, y + w))
}

/// Draw `n_draws` parameter vectors from the multivariate normal with the
/// given mean and covariance. The covariance must be positive
/// semi-definite; a jitter of `1e-12 * trace` is added if the Cholesky
/// factorization stalls. Deterministic for a fixed seed.
pub fn sample_params(
    mean: &[f64],
    covariance: &[Vec<f64>],
    n_draws: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let k = mean.len();
    debug_assert!(covariance.len() == k && covariance.iter().all(|r| r.len() == k));
    let l = linalg::cholesky_psd(covariance)
        .unwrap_or_else(|| vec![vec![0.0; k]; k]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let z: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
        let lz = linalg::lower_tri_mul(&l, &z);
        draws.push(mean.iter().zip(lz).map(|(m, d)| m + d).collect());
    }
    draws
}
