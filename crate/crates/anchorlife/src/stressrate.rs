//! Stress against minimum creep rate: the uniform bond stress mapping and
//! the two creep laws fitted to (stress, rate) observations.
//!
//! * Norton-Bailey power law `rate = A tau^m`, a straight line in log-log
//!   space. Simple, but the exponent drifts with the load level.
//! * Prandtl-Garofalo `tau = tau0 [1 + c1 asinh(rate / c2)]`, a
//!   rate-theory form whose plateau `tau0` is a stress below which no
//!   tertiary creep failure occurs.
//!
//! Non-failed low-load specimens may contribute stabilized-rate proxies
//! to these fits; that approximation is conservative since stabilized
//! rates overestimate the eventual minimum.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regress::{self, LinearFit, NLSFit, NlsConfig, RegressError};

#[derive(Debug, Error)]
pub enum StressRateError {
    #[error("{what} must be strictly positive, got {value}")]
    NonPositiveInput { what: &'static str, value: f64 },
    #[error("need at least {required} points, got {found}")]
    TooFewPoints { found: usize, required: usize },
    #[error("stress {stress} does not exceed the threshold tau0 = {tau0}: no creep failure in this domain")]
    BelowThresholdStress { stress: f64, tau0: f64 },
    #[error(transparent)]
    Regress(#[from] RegressError),
}

/// Which area the uniform bond model divides the load by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BondArea {
    /// Literal formula: pi r^2 h_ef.
    #[default]
    AsPrinted,
    /// Lateral surface of the embedded rod: pi (2r) h_ef.
    LateralSurface,
}

/// Uniform bond stress for a sustained load, MPa (N/mm^2).
pub fn bond_stress(
    load_n: f64,
    radius_mm: f64,
    h_ef_mm: f64,
    area: BondArea,
) -> Result<f64, StressRateError> {
    for (what, value) in [
        ("load_n", load_n),
        ("radius_mm", radius_mm),
        ("h_ef_mm", h_ef_mm),
    ] {
        if !(value > 0.0) {
            return Err(StressRateError::NonPositiveInput { what, value });
        }
    }
    let area_mm2 = match area {
        BondArea::AsPrinted => std::f64::consts::PI * radius_mm * radius_mm * h_ef_mm,
        BondArea::LateralSurface => std::f64::consts::PI * 2.0 * radius_mm * h_ef_mm,
    };
    Ok(load_n / area_mm2)
}

/// Whether the stress axis carries absolute MPa or load-level fractions.
/// Fits must not mix the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StressAxis {
    #[default]
    AbsoluteMpa,
    LoadLevel,
}

/// Unit of the creep rate on the rate axis; must match the MG variant a
/// fit is later composed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateUnit {
    /// Strain rate, 1/s.
    #[default]
    StrainPerS,
    /// Displacement rate, mm/s.
    DispMmPerS,
}

/// One (stress, minimum or stabilized creep rate) observation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StressRatePoint {
    pub stress: f64,
    pub min_creep_rate: f64,
    /// False marks a stabilized-rate proxy from a still-running test.
    pub failed: bool,
}

fn check_points(points: &[StressRatePoint], required: usize) -> Result<(), StressRateError> {
    if points.len() < required {
        return Err(StressRateError::TooFewPoints {
            found: points.len(),
            required,
        });
    }
    for p in points {
        if !(p.stress > 0.0) {
            return Err(StressRateError::NonPositiveInput {
                what: "stress",
                value: p.stress,
            });
        }
        if !(p.min_creep_rate > 0.0) {
            return Err(StressRateError::NonPositiveInput {
                what: "min_creep_rate",
                value: p.min_creep_rate,
            });
        }
    }
    Ok(())
}

/// Norton-Bailey fit: OLS of ln rate on ln stress.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent_m: f64,
    pub ln_prefactor: f64,
    pub fit: LinearFit,
    pub axis: StressAxis,
    pub rate_unit: RateUnit,
}

impl PowerLawFit {
    /// m > 0 is the physical orientation (faster creep at higher stress).
    pub fn exponent_is_physical(&self) -> bool {
        self.exponent_m > 0.0
    }
}

pub fn fit_power_law(
    points: &[StressRatePoint],
    axis: StressAxis,
    rate_unit: RateUnit,
) -> Result<PowerLawFit, StressRateError> {
    check_points(points, 3)?;
    let ln_tau: Vec<f64> = points.iter().map(|p| p.stress.ln()).collect();
    let ln_rate: Vec<f64> = points.iter().map(|p| p.min_creep_rate.ln()).collect();
    let fit = regress::ols_fit(&ln_tau, &ln_rate)?;
    Ok(PowerLawFit {
        exponent_m: fit.slope,
        ln_prefactor: fit.intercept,
        fit,
        axis,
        rate_unit,
    })
}

/// Which residuals the Prandtl-Garofalo fit minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SinhResponse {
    /// Stress as the response, the equation's own orientation.
    #[default]
    Stress,
    /// ln rate as the response, for sensitivity studies.
    LnRate,
}

/// Prandtl-Garofalo fit `tau = tau0 [1 + c1 asinh(rate / c2)]`.
///
/// The solver works in log-parameter space, so positivity of all three
/// parameters is structural; `nls` holds the log-space solution and
/// covariance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SinhFit {
    pub tau0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Log-space fit: params = [ln tau0, ln c1, ln c2].
    pub nls: NLSFit,
    pub axis: StressAxis,
    pub rate_unit: RateUnit,
    pub response: SinhResponse,
}

impl SinhFit {
    /// Stress on the fitted curve at a creep rate (rate >= 0).
    pub fn stress_at_rate(&self, rate: f64) -> f64 {
        self.tau0 * (1.0 + self.c1 * (rate / self.c2).asinh())
    }

    /// Closed-form inverse; the domain is stress > tau0.
    pub fn rate_at_stress(&self, stress: f64) -> Result<f64, StressRateError> {
        if stress <= self.tau0 {
            return Err(StressRateError::BelowThresholdStress {
                stress,
                tau0: self.tau0,
            });
        }
        Ok(self.c2 * ((stress / self.tau0 - 1.0) / self.c1).sinh())
    }
}

fn sinh_model_stress(log_params: &[f64], rate: f64) -> f64 {
    let (tau0, c1, c2) = (
        log_params[0].exp(),
        log_params[1].exp(),
        log_params[2].exp(),
    );
    tau0 * (1.0 + c1 * (rate / c2).asinh())
}

fn sinh_model_ln_rate(log_params: &[f64], stress: f64) -> f64 {
    let (tau0, c1, c2) = (
        log_params[0].exp(),
        log_params[1].exp(),
        log_params[2].exp(),
    );
    // NaN outside the domain; the solver rejects such steps
    (c2 * ((stress / tau0 - 1.0) / c1).sinh()).ln()
}

pub fn fit_sinh(
    points: &[StressRatePoint],
    axis: StressAxis,
    rate_unit: RateUnit,
) -> Result<SinhFit, StressRateError> {
    fit_sinh_with_response(points, axis, rate_unit, SinhResponse::Stress)
}

pub fn fit_sinh_with_response(
    points: &[StressRatePoint],
    axis: StressAxis,
    rate_unit: RateUnit,
    response: SinhResponse,
) -> Result<SinhFit, StressRateError> {
    check_points(points, 4)?;

    // initialization: tau0 below every observed stress, c2 at the
    // geometric mean rate, c1 from the two extreme-rate points
    let tau_min = points.iter().map(|p| p.stress).fold(f64::INFINITY, f64::min);
    let tau0_init = 0.9 * tau_min;
    let c2_init = (points
        .iter()
        .map(|p| p.min_creep_rate.ln())
        .sum::<f64>()
        / points.len() as f64)
        .exp();
    let lo = points
        .iter()
        .min_by(|a, b| a.min_creep_rate.total_cmp(&b.min_creep_rate))
        .expect("non-empty");
    let hi = points
        .iter()
        .max_by(|a, b| a.min_creep_rate.total_cmp(&b.min_creep_rate))
        .expect("non-empty");
    let c1_from = |p: &StressRatePoint| {
        let arg = (p.min_creep_rate / c2_init).asinh();
        if arg.abs() > 1e-12 {
            (p.stress / tau0_init - 1.0) / arg
        } else {
            f64::NAN
        }
    };
    let (ca, cb) = (c1_from(lo), c1_from(hi));
    let c1_init = match (ca > 0.0, cb > 0.0) {
        (true, true) => (ca * cb).sqrt(),
        (true, false) => ca,
        (false, true) => cb,
        _ => 0.1,
    };

    let init = [tau0_init.ln(), c1_init.ln(), c2_init.ln()];
    let config = NlsConfig::default();
    let nls = match response {
        SinhResponse::Stress => {
            let x: Vec<f64> = points.iter().map(|p| p.min_creep_rate).collect();
            let y: Vec<f64> = points.iter().map(|p| p.stress).collect();
            regress::nls_fit(sinh_model_stress, &x, &y, &init, &config)?
        }
        SinhResponse::LnRate => {
            let x: Vec<f64> = points.iter().map(|p| p.stress).collect();
            let y: Vec<f64> = points.iter().map(|p| p.min_creep_rate.ln()).collect();
            regress::nls_fit(sinh_model_ln_rate, &x, &y, &init, &config)?
        }
    };
    Ok(SinhFit {
        tau0: nls.params[0].exp(),
        c1: nls.params[1].exp(),
        c2: nls.params[2].exp(),
        nls,
        axis,
        rate_unit,
        response,
    })
}

/// Either stress-rate law, as persisted to disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StressRateFit {
    Power(PowerLawFit),
    Sinh(SinhFit),
}

impl StressRateFit {
    pub fn axis(&self) -> StressAxis {
        match self {
            StressRateFit::Power(f) => f.axis,
            StressRateFit::Sinh(f) => f.axis,
        }
    }

    pub fn rate_unit(&self) -> RateUnit {
        match self {
            StressRateFit::Power(f) => f.rate_unit,
            StressRateFit::Sinh(f) => f.rate_unit,
        }
    }

    pub fn kind_label(&self) -> &'static str {
        match self {
            StressRateFit::Power(_) => "power",
            StressRateFit::Sinh(_) => "sinh",
        }
    }
}

/// Creep rate predicted by a law at a stress.
pub fn rate_at_stress(fit: &StressRateFit, stress: f64) -> Result<f64, StressRateError> {
    match fit {
        StressRateFit::Power(p) => {
            if !(stress > 0.0) {
                return Err(StressRateError::NonPositiveInput {
                    what: "stress",
                    value: stress,
                });
            }
            Ok((p.ln_prefactor + p.exponent_m * stress.ln()).exp())
        }
        StressRateFit::Sinh(s) => s.rate_at_stress(stress),
    }
}

/// Stress on a law's curve at a creep rate (the closed-form inverses).
pub fn stress_at_rate(fit: &StressRateFit, rate: f64) -> Result<f64, StressRateError> {
    match fit {
        StressRateFit::Power(p) => {
            if !(rate > 0.0) {
                return Err(StressRateError::NonPositiveInput {
                    what: "rate",
                    value: rate,
                });
            }
            Ok(((rate.ln() - p.ln_prefactor) / p.exponent_m).exp())
        }
        StressRateFit::Sinh(s) => Ok(s.stress_at_rate(rate)),
    }
}
