//! Stress versus time-to-failure curves.
//!
//! A stress-rate law predicts the minimum creep rate at a given sustained
//! stress; the Monkman-Grant relation turns that rate into a failure
//! time. Composing the two reconstructs the TTF curve. Uncertainty is
//! propagated by Monte Carlo: both fits' parameters are drawn
//! independently from their covariances, every draw produces a curve, and
//! the 2.5 / 97.5 percentiles over draws form the band. Draws are
//! pre-generated from a fixed seed, so results do not depend on
//! evaluation order.
//!
//! The independence of the two parameter draws ignores the correlation
//! induced by fitting both laws to the same specimens; that approximation
//! is documented here rather than hidden.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lifetime::{LifetimeError, MGDirection, MGFit, MGVariant};
use crate::regress::sample_params;
use crate::stressrate::{rate_at_stress, RateUnit, StressAxis, StressRateError, StressRateFit};

/// The service-life constant used wherever "50 years" appears:
/// 50 * 365.25 * 86400 s = 1.57788e9 s.
pub const SECONDS_PER_50_YEARS: f64 = 50.0 * 365.25 * 86400.0;

/// Seed offset separating the stress-rate draw stream from the MG stream.
const LAW_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

const MIN_DRAWS: usize = 1000;

#[derive(Debug, Error)]
pub enum TtfError {
    #[error("stresses must be sorted ascending")]
    StressesNotAscending,
    #[error("need at least {required} Monte-Carlo draws, got {found}")]
    TooFewDraws { found: usize, required: usize },
    #[error("MG variant `{variant}` expects {expected:?} rates but the stress-rate fit carries {found:?}")]
    UnitMismatch {
        variant: MGVariant,
        expected: RateUnit,
        found: RateUnit,
    },
    #[error("modified MG predictions need an assumed failure strain to recover absolute times")]
    MissingFailureStrain,
    #[error("composed mean curve is not strictly decreasing (MG slope {mg_slope}, law exponent sign {law_increasing})")]
    NonDecreasingCurve { mg_slope: f64, law_increasing: bool },
    #[error("no stress solves the target life: {reason}")]
    NoRoot { reason: String },
    #[error("target life must be positive, got {0}")]
    NonPositiveTargetLife(f64),
    #[error(transparent)]
    StressRate(#[from] StressRateError),
    #[error(transparent)]
    Lifetime(#[from] LifetimeError),
}

/// One sampled point of the curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTFSample {
    pub stress: f64,
    pub t_mean_s: f64,
    pub t_lo_s: f64,
    pub t_hi_s: f64,
}

/// Sampled stress versus time-to-failure curve with Monte-Carlo bands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TTFCurve {
    pub axis: StressAxis,
    pub stress_law: String,
    pub mg_variant: MGVariant,
    pub samples: Vec<TTFSample>,
    /// Stresses at or below the sinh threshold, skipped rather than
    /// extrapolated: no creep failure is predicted there.
    pub skipped_below_threshold: Vec<f64>,
    pub mc_draws: usize,
    pub seed: u64,
}

impl TTFCurve {
    /// CSV export, `stress,t_mean_s,t_lo_s,t_hi_s`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("stress,t_mean_s,t_lo_s,t_hi_s\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{}\n",
                s.stress, s.t_mean_s, s.t_lo_s, s.t_hi_s
            ));
        }
        out
    }
}

/// Sustained-load strength for a target service life, expressed as a
/// fraction of the short-term pull-out stress.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrengthEstimate {
    pub target_life_s: f64,
    pub load_level_mean: f64,
    pub load_level_lo: f64,
    pub load_level_hi: f64,
    /// True when the target life exceeds the predicted life just above
    /// the sinh threshold: the strength is the plateau itself and the
    /// life below it is unbounded.
    pub below_threshold: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

fn check_units(sr_fit: &StressRateFit, mg_fit: &MGFit) -> Result<(), TtfError> {
    let expected = match mg_fit.variant {
        MGVariant::Displacement => RateUnit::DispMmPerS,
        MGVariant::Strain | MGVariant::Modified => RateUnit::StrainPerS,
    };
    if sr_fit.rate_unit() != expected {
        return Err(TtfError::UnitMismatch {
            variant: mg_fit.variant,
            expected,
            found: sr_fit.rate_unit(),
        });
    }
    Ok(())
}

/// Absolute-time scale for the MG variant: modified predictions are
/// normalized by the failure strain and need one supplied back.
fn time_scale(mg_fit: &MGFit, assumed_failure_strain: Option<f64>) -> Result<f64, TtfError> {
    match mg_fit.variant {
        MGVariant::Modified => match assumed_failure_strain {
            Some(s) if s > 0.0 => Ok(s),
            _ => Err(TtfError::MissingFailureStrain),
        },
        _ => Ok(1.0),
    }
}

/// ln t from MG parameters at ln rate, per the fit direction.
fn mg_ln_time(params: &[f64], direction: MGDirection, ln_rate: f64) -> f64 {
    match direction {
        MGDirection::RateOnTime => (ln_rate - params[1]) / params[0],
        MGDirection::TimeOnRate => params[0] * ln_rate + params[1],
    }
}

enum LawDraws {
    Power(Vec<Vec<f64>>),
    /// Natural-unit (tau0, c1, c2) per draw.
    Sinh(Vec<Vec<f64>>),
}

impl LawDraws {
    /// Rate predicted by draw `i` at `stress`; zero below a sinh draw's
    /// threshold, which maps to an unbounded failure time downstream.
    fn rate(&self, i: usize, stress: f64) -> f64 {
        match self {
            LawDraws::Power(d) => (d[i][1] + d[i][0] * stress.ln()).exp(),
            LawDraws::Sinh(d) => {
                let (tau0, c1, c2) = (d[i][0], d[i][1], d[i][2]);
                if stress <= tau0 {
                    0.0
                } else {
                    c2 * ((stress / tau0 - 1.0) / c1).sinh()
                }
            }
        }
    }

    fn tau0_values(&self) -> Option<Vec<f64>> {
        match self {
            LawDraws::Power(_) => None,
            LawDraws::Sinh(d) => Some(d.iter().map(|p| p[0]).collect()),
        }
    }
}

struct JointDraws {
    mg: Vec<Vec<f64>>,
    law: LawDraws,
}

fn generate_draws(
    sr_fit: &StressRateFit,
    mg_fit: &MGFit,
    n_draws: usize,
    seed: u64,
) -> JointDraws {
    let mg = sample_params(
        &mg_fit.fit.params(),
        &mg_fit.fit.covariance_rows(),
        n_draws,
        seed,
    );
    let law_seed = seed.wrapping_add(LAW_SEED_OFFSET);
    let law = match sr_fit {
        StressRateFit::Power(p) => LawDraws::Power(sample_params(
            &p.fit.params(),
            &p.fit.covariance_rows(),
            n_draws,
            law_seed,
        )),
        StressRateFit::Sinh(s) => {
            let log_draws = sample_params(&s.nls.params, &s.nls.covariance, n_draws, law_seed);
            LawDraws::Sinh(
                log_draws
                    .into_iter()
                    .map(|d| d.into_iter().map(f64::exp).collect())
                    .collect(),
            )
        }
    };
    JointDraws { mg, law }
}

/// Failure times over all draws at one stress. Non-finite garbage
/// (measure-zero degenerate draws) is dropped; unbounded lives stay as
/// +inf and sort last.
fn draw_times(
    draws: &JointDraws,
    direction: MGDirection,
    stress: f64,
    scale: f64,
) -> Vec<f64> {
    let n = draws.mg.len();
    let mut times = Vec::with_capacity(n);
    for i in 0..n {
        let rate = draws.law.rate(i, stress);
        let t = mg_ln_time(&draws.mg[i], direction, rate.ln()).exp() * scale;
        if !t.is_nan() {
            times.push(t);
        }
    }
    times
}

/// Nearest-rank percentile of an unsorted sample.
fn percentile(values: &mut [f64], p: f64) -> f64 {
    values.sort_unstable_by(|a, b| a.total_cmp(b));
    let m = values.len();
    let idx = ((p * m as f64).ceil() as usize).saturating_sub(1).min(m - 1);
    values[idx]
}

/// Compose a stress-rate law with an MG fit into a TTF curve.
///
/// `stresses` must be ascending and in the axis of the stress-rate fit.
/// For the sinh law, stresses at or below the fitted threshold are
/// skipped and recorded. `assumed_failure_strain` is required for the
/// modified variant. Deterministic for fixed `seed`.
pub fn compose_ttf(
    sr_fit: &StressRateFit,
    mg_fit: &MGFit,
    stresses: &[f64],
    n_draws: usize,
    seed: u64,
    assumed_failure_strain: Option<f64>,
) -> Result<TTFCurve, TtfError> {
    if stresses.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TtfError::StressesNotAscending);
    }
    if n_draws < MIN_DRAWS {
        return Err(TtfError::TooFewDraws {
            found: n_draws,
            required: MIN_DRAWS,
        });
    }
    check_units(sr_fit, mg_fit)?;
    let scale = time_scale(mg_fit, assumed_failure_strain)?;
    let draws = generate_draws(sr_fit, mg_fit, n_draws, seed);

    let mut samples = Vec::with_capacity(stresses.len());
    let mut skipped = Vec::new();
    for &stress in stresses {
        let rate = match rate_at_stress(sr_fit, stress) {
            Ok(r) => r,
            Err(StressRateError::BelowThresholdStress { .. }) => {
                skipped.push(stress);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let t_mean = mg_ln_time(&mg_fit.fit.params(), mg_fit.direction, rate.ln()).exp() * scale;
        let mut times = draw_times(&draws, mg_fit.direction, stress, scale);
        let t_lo = percentile(&mut times, 0.025).min(t_mean);
        let t_hi = percentile(&mut times, 0.975).max(t_mean);
        samples.push(TTFSample {
            stress,
            t_mean_s: t_mean,
            t_lo_s: t_lo,
            t_hi_s: t_hi,
        });
    }
    Ok(TTFCurve {
        axis: sr_fit.axis(),
        stress_law: sr_fit.kind_label().to_string(),
        mg_variant: mg_fit.variant,
        samples,
        skipped_below_threshold: skipped,
        mc_draws: n_draws,
        seed,
    })
}

/// Mean-curve failure time at a stress; +inf below the sinh threshold.
fn mean_time(
    sr_fit: &StressRateFit,
    mg_fit: &MGFit,
    scale: f64,
    stress: f64,
) -> f64 {
    match rate_at_stress(sr_fit, stress) {
        Ok(rate) => mg_ln_time(&mg_fit.fit.params(), mg_fit.direction, rate.ln()).exp() * scale,
        Err(_) => f64::INFINITY,
    }
}

/// Expand a bracket around `start` and bisect `curve(stress) = target`
/// for a strictly decreasing curve. Returns the stress to 1e-6 relative.
fn solve_stress_for_life(
    curve: &dyn Fn(f64) -> f64,
    target: f64,
    start: f64,
) -> Result<f64, TtfError> {
    let mut lo = start; // want curve(lo) > target
    let mut expansions = 0;
    while curve(lo) <= target {
        lo *= 0.5;
        expansions += 1;
        if expansions > 2000 {
            return Err(TtfError::NoRoot {
                reason: format!("life never reaches {target} s at any stress above zero"),
            });
        }
    }
    let mut hi = lo.max(start); // want curve(hi) < target
    expansions = 0;
    while curve(hi) >= target {
        hi *= 2.0;
        expansions += 1;
        if expansions > 2000 {
            return Err(TtfError::NoRoot {
                reason: format!("life exceeds {target} s at every examined stress"),
            });
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if curve(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-6 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sustained-load strength: the stress whose mean predicted life equals
/// `target_life_s`, divided by the pull-out stress, with bounds from the
/// 2.5 / 97.5 percentile curves. For the sinh law, a target life beyond
/// the life just above the threshold reports the plateau itself with
/// `below_threshold = true`.
pub fn sustained_strength(
    sr_fit: &StressRateFit,
    mg_fit: &MGFit,
    pullout_stress: f64,
    target_life_s: f64,
    n_draws: usize,
    seed: u64,
    assumed_failure_strain: Option<f64>,
) -> Result<StrengthEstimate, TtfError> {
    if !(target_life_s > 0.0) {
        return Err(TtfError::NonPositiveTargetLife(target_life_s));
    }
    if n_draws < MIN_DRAWS {
        return Err(TtfError::TooFewDraws {
            found: n_draws,
            required: MIN_DRAWS,
        });
    }
    check_units(sr_fit, mg_fit)?;
    let scale = time_scale(mg_fit, assumed_failure_strain)?;

    // strict decrease requires a negative MG exponent and an increasing law
    let mg_decreasing = match mg_fit.direction {
        MGDirection::RateOnTime | MGDirection::TimeOnRate => mg_fit.fit.slope < 0.0,
    };
    let law_increasing = match sr_fit {
        StressRateFit::Power(p) => p.exponent_m > 0.0,
        StressRateFit::Sinh(_) => true,
    };
    if !mg_decreasing || !law_increasing {
        return Err(TtfError::NonDecreasingCurve {
            mg_slope: mg_fit.fit.slope,
            law_increasing,
        });
    }

    let caveat = match sr_fit {
        StressRateFit::Sinh(_) => Some(
            "strength rests on the fitted threshold stress tau0; the plateau lacks experimental validation"
                .to_string(),
        ),
        StressRateFit::Power(_) => None,
    };
    let draws = generate_draws(sr_fit, mg_fit, n_draws, seed);
    let level = |stress: f64| (stress / pullout_stress).min(1.0);

    // unbounded-life domain of the sinh law
    if let StressRateFit::Sinh(s) = sr_fit {
        let floor = s.tau0 * (1.0 + 1e-9);
        if mean_time(sr_fit, mg_fit, scale, floor) < target_life_s {
            let (lo, hi) = match draws.law.tau0_values() {
                Some(mut tau0s) => {
                    let lo = percentile(&mut tau0s, 0.025);
                    let hi = percentile(&mut tau0s, 0.975);
                    (lo, hi)
                }
                None => (s.tau0, s.tau0),
            };
            return Ok(StrengthEstimate {
                target_life_s,
                load_level_mean: level(s.tau0),
                load_level_lo: level(lo.min(s.tau0)),
                load_level_hi: level(hi.max(s.tau0)),
                below_threshold: true,
                caveat,
            });
        }
    }

    let mean_curve = |tau: f64| mean_time(sr_fit, mg_fit, scale, tau);
    let draws_ref = &draws;
    let pct_curve = |p: f64| {
        move |tau: f64| {
            let mut times = draw_times(draws_ref, mg_fit.direction, tau, scale);
            if times.is_empty() {
                return f64::INFINITY;
            }
            percentile(&mut times, p)
        }
    };
    let stress_mean = solve_stress_for_life(&mean_curve, target_life_s, pullout_stress)?;
    let stress_lo = solve_stress_for_life(&pct_curve(0.025), target_life_s, pullout_stress)?;
    let stress_hi = solve_stress_for_life(&pct_curve(0.975), target_life_s, pullout_stress)?;

    let mean = level(stress_mean);
    Ok(StrengthEstimate {
        target_life_s,
        load_level_mean: mean,
        load_level_lo: level(stress_lo).min(mean),
        load_level_hi: level(stress_hi).max(mean),
        below_threshold: false,
        caveat,
    })
}
