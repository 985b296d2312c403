//! Damped Gauss-Newton nonlinear least squares.
//!
//! Levenberg-style damping on the normal equations with a numeric
//! forward-difference Jacobian. Trial steps that raise the SSE or drive
//! the model non-finite are rejected by inflating the damping factor, so
//! the accepted SSE sequence is non-increasing by construction.

use serde::{Deserialize, Serialize};

use super::RegressError;
use crate::linalg;

#[derive(Debug, Clone)]
pub struct NlsConfig {
    /// Relative SSE improvement below which the fit counts as converged.
    pub sse_tolerance: f64,
    pub max_iterations: usize,
    /// Initial Levenberg damping factor.
    pub initial_lambda: f64,
}

impl Default for NlsConfig {
    fn default() -> Self {
        NlsConfig {
            sse_tolerance: 1e-10,
            max_iterations: 200,
            initial_lambda: 1e-3,
        }
    }
}

/// Result of a nonlinear least-squares fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NLSFit {
    pub params: Vec<f64>,
    /// Parameter covariance `s^2 (J^T J)^-1` at the solution.
    pub covariance: Vec<Vec<f64>>,
    pub sse: f64,
    pub iterations: usize,
    pub converged: bool,
    /// SSE after each accepted step, for diagnostics.
    #[serde(skip)]
    pub sse_trace: Vec<f64>,
}

fn residuals<F>(model: &F, params: &[f64], x: &[f64], y: &[f64]) -> Option<Vec<f64>>
where
    F: Fn(&[f64], f64) -> f64,
{
    let mut r = Vec::with_capacity(x.len());
    for (&xi, &yi) in x.iter().zip(y) {
        let v = model(params, xi);
        if !v.is_finite() {
            return None;
        }
        r.push(yi - v);
    }
    Some(r)
}

fn sse_of(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Numeric Jacobian of the model at `params`, forward differences with a
/// backward fallback when the forward point leaves the model's domain.
/// Step size `max(1e-8, 1e-8 |p_j|)` copes with parameters spanning many
/// decades.
fn jacobian<F>(
    model: &F,
    params: &[f64],
    x: &[f64],
    base: &[f64],
) -> Result<Vec<Vec<f64>>, RegressError>
where
    F: Fn(&[f64], f64) -> f64,
{
    let k = params.len();
    let m = x.len();
    let mut jac = vec![vec![0.0; k]; m];
    for j in 0..k {
        let h = (1e-8 * params[j].abs()).max(1e-8);
        let mut p = params.to_vec();
        p[j] += h;
        let mut ok = true;
        for (i, &xi) in x.iter().enumerate() {
            let v = model(&p, xi);
            if !v.is_finite() {
                ok = false;
                break;
            }
            jac[i][j] = (v - base[i]) / h;
        }
        if !ok {
            // backward step
            let mut p = params.to_vec();
            p[j] -= h;
            for (i, &xi) in x.iter().enumerate() {
                let v = model(&p, xi);
                if !v.is_finite() {
                    return Err(RegressError::SingularJacobian);
                }
                jac[i][j] = (base[i] - v) / h;
            }
        }
    }
    Ok(jac)
}

fn normal_matrix(jac: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = jac[0].len();
    let mut a = vec![vec![0.0; k]; k];
    for row in jac {
        for i in 0..k {
            for j in 0..=i {
                a[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            a[i][j] = a[j][i];
        }
    }
    a
}

/// Fit `model(params, x) ~ y` by minimizing the sum of squared residuals.
///
/// Runs damped Gauss-Newton from `init`; returns the best parameters seen
/// with `converged = false` when the iteration budget runs out before the
/// relative SSE improvement drops below tolerance.
pub fn nls_fit<F>(
    model: F,
    x: &[f64],
    y: &[f64],
    init: &[f64],
    config: &NlsConfig,
) -> Result<NLSFit, RegressError>
where
    F: Fn(&[f64], f64) -> f64,
{
    if x.len() != y.len() {
        return Err(RegressError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    let k = init.len();
    if x.len() < k + 1 {
        return Err(RegressError::TooFewPoints {
            found: x.len(),
            required: k + 1,
        });
    }

    let mut params = init.to_vec();
    let mut res = residuals(&model, &params, x, y)
        .ok_or(RegressError::NonFiniteModel { iteration: 0 })?;
    let mut sse = sse_of(&res);
    let mut lambda = config.initial_lambda;
    let mut converged = false;
    let mut iterations = 0;
    let mut sse_trace = vec![sse];

    'outer: for iter in 1..=config.max_iterations {
        iterations = iter;
        let base: Vec<f64> = x
            .iter()
            .zip(&res)
            .zip(y)
            .map(|((_, r), yi)| yi - r)
            .collect();
        let jac = jacobian(&model, &params, x, &base)?;
        let a = normal_matrix(&jac);
        let mut g = vec![0.0; k];
        for (row, r) in jac.iter().zip(&res) {
            for j in 0..k {
                g[j] += row[j] * r;
            }
        }

        // inflate damping until a step improves the SSE
        loop {
            let mut damped = a.clone();
            for j in 0..k {
                damped[j][j] += lambda;
            }
            let step = match linalg::solve(&damped, &g) {
                Some(s) => s,
                None => {
                    lambda *= 10.0;
                    if lambda > 1e12 {
                        return Err(RegressError::SingularJacobian);
                    }
                    continue;
                }
            };
            let trial: Vec<f64> = params.iter().zip(&step).map(|(p, s)| p + s).collect();
            if let Some(trial_res) = residuals(&model, &trial, x, y) {
                let trial_sse = sse_of(&trial_res);
                if trial_sse < sse {
                    let improvement = (sse - trial_sse) / sse.max(f64::MIN_POSITIVE);
                    params = trial;
                    res = trial_res;
                    sse = trial_sse;
                    sse_trace.push(sse);
                    lambda = (lambda * 0.3).max(1e-14);
                    if improvement < config.sse_tolerance {
                        converged = true;
                        break 'outer;
                    }
                    break;
                }
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                // no improving step exists at this point; treat a stall on
                // an already tiny SSE as convergence
                converged = sse <= config.sse_tolerance.max(1e-300)
                    || sse_trace.len() > 1
                        && (sse_trace[sse_trace.len() - 2] - sse)
                            / sse_trace[sse_trace.len() - 2].max(f64::MIN_POSITIVE)
                            < config.sse_tolerance;
                break 'outer;
            }
        }
    }

    // covariance at the solution
    let base: Vec<f64> = x
        .iter()
        .zip(&res)
        .zip(y)
        .map(|((_, r), yi)| yi - r)
        .collect();
    let jac = jacobian(&model, &params, x, &base)?;
    let a = normal_matrix(&jac);
    let inv = linalg::invert(&a).ok_or(RegressError::SingularJacobian)?;
    let dof = (x.len() - k).max(1) as f64;
    let s2 = sse / dof;
    let covariance = inv
        .into_iter()
        .map(|row| row.into_iter().map(|v| v * s2).collect())
        .collect();

    Ok(NLSFit {
        params,
        covariance,
        sse,
        iterations,
        converged,
        sse_trace,
    })
}
