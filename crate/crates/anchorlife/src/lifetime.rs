//! The Monkman-Grant family of failure criteria.
//!
//! The criterion links the minimum creep rate to the failure time through
//! `ln(rate_min) = n ln(t_f) + c` with product-dependent constants n and
//! c. Three variants are supported:
//!
//! * `displacement` — raw displacement rates, mm/s;
//! * `strain` — rates divided by the embedment depth, 1/s, which makes
//!   the fit unit-free and comparable across geometries;
//! * `modified` — failure times additionally normalized by the strain at
//!   failure (Dobes-Milicka), which tightens cross-geometry scatter.
//!
//! Fits regress ln rate on ln time, matching how the criterion is
//! written; inverting the mean line for predictions is the default. An
//! optional direct mode regresses ln time on ln rate instead for
//! sensitivity studies.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regress::{self, IntervalKind, LinearFit, RegressError};

#[derive(Debug, Error)]
pub enum LifetimeError {
    #[error("need at least {required} points, got {found}")]
    TooFewPoints { found: usize, required: usize },
    #[error("specimen {specimen_id}: modified variant requires a failure strain")]
    MissingFailureStrain { specimen_id: String },
    #[error("specimen {specimen_id}: {what} must be strictly positive")]
    NonPositivePoint {
        specimen_id: String,
        what: &'static str,
    },
    #[error("fitted slope is zero; the mean line cannot be inverted")]
    ZeroSlope,
    #[error("rate must be strictly positive, got {0}")]
    NonPositiveRate(f64),
    #[error(transparent)]
    Regress(#[from] RegressError),
}

/// Which Monkman-Grant formulation a fit uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MGVariant {
    Displacement,
    Strain,
    Modified,
}

impl std::fmt::Display for MGVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MGVariant::Displacement => write!(f, "displacement"),
            MGVariant::Strain => write!(f, "strain"),
            MGVariant::Modified => write!(f, "modified"),
        }
    }
}

/// Regression orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MGDirection {
    /// ln rate regressed on ln t_f; predictions invert the mean line.
    #[default]
    RateOnTime,
    /// ln t_f regressed on ln rate; predictions evaluate directly.
    TimeOnRate,
}

/// One specimen's (minimum creep rate, failure time) observation.
/// The rate unit follows the variant: mm/s for `displacement`, 1/s
/// otherwise. `failure_strain` is required by the `modified` variant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MGDataPoint {
    pub specimen_id: String,
    pub min_creep_rate: f64,
    pub failure_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_strain: Option<f64>,
}

/// Fitted Monkman-Grant relation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "MGFitJson", into = "MGFitJson")]
pub struct MGFit {
    pub variant: MGVariant,
    pub direction: MGDirection,
    /// Regression per the direction; for `RateOnTime` the slope is the
    /// exponent n and the intercept is c.
    pub fit: LinearFit,
    pub dataset_ids: Vec<String>,
}

/// On-disk shape: {variant, n, c, cov, n_points, s2, ...}.
#[derive(Serialize, Deserialize)]
struct MGFitJson {
    variant: MGVariant,
    #[serde(default)]
    direction: MGDirection,
    n: f64,
    c: f64,
    cov: [[f64; 2]; 2],
    n_points: usize,
    s2: f64,
    xbar: f64,
    sxx: f64,
    dataset_ids: Vec<String>,
}

impl From<MGFitJson> for MGFit {
    fn from(j: MGFitJson) -> Self {
        MGFit {
            variant: j.variant,
            direction: j.direction,
            fit: LinearFit {
                slope: j.n,
                intercept: j.c,
                n_points: j.n_points,
                residual_variance: j.s2,
                xbar: j.xbar,
                sxx: j.sxx,
                covariance: j.cov,
            },
            dataset_ids: j.dataset_ids,
        }
    }
}

impl From<MGFit> for MGFitJson {
    fn from(f: MGFit) -> Self {
        MGFitJson {
            variant: f.variant,
            direction: f.direction,
            n: f.fit.slope,
            c: f.fit.intercept,
            cov: f.fit.covariance,
            n_points: f.fit.n_points,
            s2: f.fit.residual_variance,
            xbar: f.fit.xbar,
            sxx: f.fit.sxx,
            dataset_ids: f.dataset_ids,
        }
    }
}

impl MGFit {
    /// Exponent n of the criterion.
    pub fn exponent(&self) -> f64 {
        self.fit.slope
    }

    /// Constant c (ln C).
    pub fn constant(&self) -> f64 {
        self.fit.intercept
    }

    /// Faster creep should mean shorter life: n < 0 for `RateOnTime`.
    /// A violation is a warning for the caller to surface, not an error.
    pub fn slope_is_physical(&self) -> bool {
        self.fit.slope < 0.0
    }
}

/// Mean failure time and interval for a queried rate. For the `modified`
/// variant all three values are normalized times `t_f / failure_strain`;
/// multiply by an assumed failure strain to recover absolute times.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PredictedFailure {
    pub t_mean_s: f64,
    pub t_lo_s: f64,
    pub t_hi_s: f64,
}

fn check_points(points: &[MGDataPoint], variant: MGVariant) -> Result<(), LifetimeError> {
    if points.len() < 3 {
        return Err(LifetimeError::TooFewPoints {
            found: points.len(),
            required: 3,
        });
    }
    for p in points {
        if !(p.min_creep_rate > 0.0) {
            return Err(LifetimeError::NonPositivePoint {
                specimen_id: p.specimen_id.clone(),
                what: "min_creep_rate",
            });
        }
        if !(p.failure_time_s > 0.0) {
            return Err(LifetimeError::NonPositivePoint {
                specimen_id: p.specimen_id.clone(),
                what: "failure_time_s",
            });
        }
        if variant == MGVariant::Modified {
            match p.failure_strain {
                None => {
                    return Err(LifetimeError::MissingFailureStrain {
                        specimen_id: p.specimen_id.clone(),
                    })
                }
                Some(s) if !(s > 0.0) => {
                    return Err(LifetimeError::NonPositivePoint {
                        specimen_id: p.specimen_id.clone(),
                        what: "failure_strain",
                    })
                }
                _ => {}
            }
        }
    }
    Ok(())
}

/// Normalized failure time per variant: `t_f` as-is, or `t_f / strain`
/// for the modified criterion.
fn normalized_time(p: &MGDataPoint, variant: MGVariant) -> f64 {
    match variant {
        MGVariant::Modified => p.failure_time_s / p.failure_strain.expect("checked"),
        _ => p.failure_time_s,
    }
}

/// Fit the criterion to a set of failed specimens.
pub fn fit_mg(points: &[MGDataPoint], variant: MGVariant) -> Result<MGFit, LifetimeError> {
    fit_mg_directed(points, variant, MGDirection::RateOnTime)
}

pub fn fit_mg_directed(
    points: &[MGDataPoint],
    variant: MGVariant,
    direction: MGDirection,
) -> Result<MGFit, LifetimeError> {
    check_points(points, variant)?;
    let ln_t: Vec<f64> = points
        .iter()
        .map(|p| normalized_time(p, variant).ln())
        .collect();
    let ln_r: Vec<f64> = points.iter().map(|p| p.min_creep_rate.ln()).collect();
    let fit = match direction {
        MGDirection::RateOnTime => regress::ols_fit(&ln_t, &ln_r)?,
        MGDirection::TimeOnRate => regress::ols_fit(&ln_r, &ln_t)?,
    };
    Ok(MGFit {
        variant,
        direction,
        fit,
        dataset_ids: points.iter().map(|p| p.specimen_id.clone()).collect(),
    })
}

/// Predict the failure time for a (stable or minimum) creep rate.
///
/// RateOnTime: the mean line is inverted, and the interval comes from
/// intersecting the horizontal line `ln rate = const` with the fit's band
/// (bisection over `ln t_mean +- 40`). TimeOnRate: the band is evaluated
/// directly at `ln rate`.
pub fn predict_failure_time(
    fit: &MGFit,
    rate: f64,
    level: f64,
    kind: IntervalKind,
) -> Result<PredictedFailure, LifetimeError> {
    if !(rate > 0.0) {
        return Err(LifetimeError::NonPositiveRate(rate));
    }
    let ln_r = rate.ln();
    match fit.direction {
        MGDirection::TimeOnRate => {
            let (lo, hi) = regress::prediction_interval(&fit.fit, ln_r, level, kind)?;
            Ok(PredictedFailure {
                t_mean_s: fit.fit.predict(ln_r).exp(),
                t_lo_s: lo.exp(),
                t_hi_s: hi.exp(),
            })
        }
        MGDirection::RateOnTime => {
            let n = fit.fit.slope;
            if n == 0.0 || !n.is_finite() {
                return Err(LifetimeError::ZeroSlope);
            }
            let x_mean = (ln_r - fit.fit.intercept) / n;
            if fit.fit.residual_variance == 0.0 {
                let t = x_mean.exp();
                return Ok(PredictedFailure {
                    t_mean_s: t,
                    t_lo_s: t,
                    t_hi_s: t,
                });
            }
            // band boundaries as functions of ln t
            let upper = |x: f64| {
                fit.fit.predict(x) + fit.fit.band_halfwidth(x, level, kind).expect("level checked")
            };
            let lower = |x: f64| {
                fit.fit.predict(x) - fit.fit.band_halfwidth(x, level, kind).expect("level checked")
            };
            // for n < 0 the upper boundary exits the band to the right of
            // the mean crossing and the lower one to the left; mirrored
            // for n > 0
            let (x_hi, x_lo) = if n < 0.0 {
                (
                    solve_crossing(&upper, ln_r, x_mean, x_mean + 40.0),
                    solve_crossing(&lower, ln_r, x_mean, x_mean - 40.0),
                )
            } else {
                (
                    solve_crossing(&lower, ln_r, x_mean, x_mean + 40.0),
                    solve_crossing(&upper, ln_r, x_mean, x_mean - 40.0),
                )
            };
            Ok(PredictedFailure {
                t_mean_s: x_mean.exp(),
                t_lo_s: x_lo.exp(),
                t_hi_s: x_hi.exp(),
            })
        }
    }
}

/// Bisection for `f(x) = target` between `from` (where the band brackets
/// the target by construction) and `to`. Falls back to the bracket end
/// when the boundary never crosses inside it.
fn solve_crossing(f: &dyn Fn(f64) -> f64, target: f64, from: f64, to: f64) -> f64 {
    let g_from = f(from) - target;
    let g_to = f(to) - target;
    if g_from == 0.0 {
        return from;
    }
    if g_from.signum() == g_to.signum() {
        return to;
    }
    let (mut a, mut b) = (from, to);
    let mut ga = g_from;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let gm = f(mid) - target;
        if gm == 0.0 {
            return mid;
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
        if (b - a).abs() <= 1e-12 * b.abs().max(1.0) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Data-availability resampling cases: which third of the points,
/// ranked by creep rate, is withheld.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResampleCase {
    /// Case (i): rates between the minimum and maximum are neglected.
    DropMiddle,
    /// Case (ii): the higher creep rates are neglected.
    DropHighest,
    /// Case (iii): the lower creep rates are neglected.
    DropLowest,
}

impl ResampleCase {
    /// Paper-style labels `i`, `ii`, `iii`.
    pub fn parse(s: &str) -> Option<ResampleCase> {
        match s {
            "i" => Some(ResampleCase::DropMiddle),
            "ii" => Some(ResampleCase::DropHighest),
            "iii" => Some(ResampleCase::DropLowest),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ResampleCase::DropMiddle => "i",
            ResampleCase::DropHighest => "ii",
            ResampleCase::DropLowest => "iii",
        }
    }
}

/// Retained (fitting) and excluded (holdout) subsets of a resampling.
#[derive(Debug, Clone)]
pub struct Resampled {
    pub retained: Vec<MGDataPoint>,
    pub excluded: Vec<MGDataPoint>,
}

/// Split the points by rate rank and drop the third selected by `case`.
/// Remainder points (when n is not divisible by 3) stay in the retained
/// set. Input order is preserved within both lists.
pub fn resample_case(
    points: &[MGDataPoint],
    case: ResampleCase,
) -> Result<Resampled, LifetimeError> {
    let n = points.len();
    if n < 6 {
        return Err(LifetimeError::TooFewPoints {
            found: n,
            required: 6,
        });
    }
    let k = n / 3;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .min_creep_rate
            .total_cmp(&points[b].min_creep_rate)
            .then(a.cmp(&b))
    });
    let dropped: Vec<usize> = match case {
        ResampleCase::DropMiddle => {
            let start = (n - k) / 2;
            order[start..start + k].to_vec()
        }
        ResampleCase::DropHighest => order[n - k..].to_vec(),
        ResampleCase::DropLowest => order[..k].to_vec(),
    };
    let mut is_dropped = vec![false; n];
    for i in &dropped {
        is_dropped[*i] = true;
    }
    let (mut retained, mut excluded) = (Vec::with_capacity(n - k), Vec::with_capacity(k));
    for (i, p) in points.iter().enumerate() {
        if is_dropped[i] {
            excluded.push(p.clone());
        } else {
            retained.push(p.clone());
        }
    }
    Ok(Resampled { retained, excluded })
}

/// One holdout specimen's prediction error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointScore {
    pub specimen_id: String,
    pub observed_s: f64,
    pub predicted_s: f64,
    pub lo_s: f64,
    pub hi_s: f64,
    pub error_s: f64,
}

/// RMSE / NRMSE prediction quality over a holdout set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub rmse_s: f64,
    /// RMSE over the range of observed failure times; undefined when the
    /// observed times do not span a range.
    pub nrmse: Option<f64>,
    pub nrmse_undefined: bool,
    pub points: Vec<PointScore>,
}

/// Score a fit's predictions against observed failure times. For the
/// modified variant, normalized predictions are rescaled by each holdout
/// point's own failure strain before comparison.
pub fn score_prediction(
    fit: &MGFit,
    holdout: &[MGDataPoint],
    level: f64,
    kind: IntervalKind,
) -> Result<EvaluationReport, LifetimeError> {
    if holdout.is_empty() {
        return Err(LifetimeError::TooFewPoints {
            found: 0,
            required: 1,
        });
    }
    let mut points = Vec::with_capacity(holdout.len());
    let mut sq_sum = 0.0;
    for p in holdout {
        let scale = match fit.variant {
            MGVariant::Modified => p.failure_strain.ok_or_else(|| {
                LifetimeError::MissingFailureStrain {
                    specimen_id: p.specimen_id.clone(),
                }
            })?,
            _ => 1.0,
        };
        let pred = predict_failure_time(fit, p.min_creep_rate, level, kind)?;
        let predicted = pred.t_mean_s * scale;
        let error = predicted - p.failure_time_s;
        sq_sum += error * error;
        points.push(PointScore {
            specimen_id: p.specimen_id.clone(),
            observed_s: p.failure_time_s,
            predicted_s: predicted,
            lo_s: pred.t_lo_s * scale,
            hi_s: pred.t_hi_s * scale,
            error_s: error,
        });
    }
    let rmse = (sq_sum / holdout.len() as f64).sqrt();
    let (t_max, t_min) = holdout
        .iter()
        .map(|p| p.failure_time_s)
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), t| {
            (hi.max(t), lo.min(t))
        });
    let range = t_max - t_min;
    let nrmse_undefined = range <= 0.0;
    Ok(EvaluationReport {
        rmse_s: rmse,
        nrmse: (!nrmse_undefined).then(|| rmse / range),
        nrmse_undefined,
        points,
    })
}
