//! Synthetic three-stage creep records with known ground truth.
//!
//! The displacement model is
//!
//! ```text
//! d(t) = d0 + A t^p + v t + B [(1 - t/tr)^-q - 1]
//! ```
//!
//! a decelerating Andrade primary term, a linear secondary term whose
//! slope `v` is the designed steady-state rate, and a tertiary term with
//! a finite-time blow-up at `tr` so every record has an unambiguous
//! rupture time to score failure-time estimators against. The rate and
//! its derivative are closed-form, so the true minimum creep rate is the
//! root of `d''(t) = 0`, found by bisection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{DisplacementSeries, IngestError, Sample, SpecimenMeta};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("{field}: {message}")]
    InvalidParams {
        field: &'static str,
        message: String,
    },
    #[error(
        "no interior rate minimum inside the sampled window: primary and tertiary stages do not separate"
    )]
    SeparationViolated,
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

/// Parameters of one synthetic displacement history.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthParams {
    /// Elastic offset d0 at load application, mm.
    pub elastic_offset_mm: f64,
    /// Primary (Andrade) coefficient A, mm/s^p.
    pub primary_coeff: f64,
    /// Primary exponent p in (0, 1).
    pub primary_exponent: f64,
    /// Secondary slope v, mm/s: the designed steady-state rate.
    pub secondary_rate_mm_per_s: f64,
    /// Tertiary blow-up coefficient B, mm. Zero disables rupture.
    pub tertiary_coeff_mm: f64,
    /// Tertiary exponent q > 0.
    pub tertiary_exponent: f64,
    /// Finite blow-up (rupture) time tr, s.
    pub rupture_time_s: f64,
    /// Lognormal sigma applied to displacement increments.
    pub noise_sigma: f64,
    pub seed: u64,
    /// Log-spaced sample count.
    pub n_samples: usize,
    pub t_start_s: f64,
    /// Last sample time; must stay below 0.999 tr.
    pub t_end_s: f64,
}

impl SynthParams {
    pub fn displacement(&self, t: f64) -> f64 {
        let primary = self.primary_coeff * t.powf(self.primary_exponent);
        let tertiary = if self.tertiary_coeff_mm > 0.0 {
            self.tertiary_coeff_mm
                * ((1.0 - t / self.rupture_time_s).powf(-self.tertiary_exponent) - 1.0)
        } else {
            0.0
        };
        self.elastic_offset_mm + primary + self.secondary_rate_mm_per_s * t + tertiary
    }

    pub fn rate(&self, t: f64) -> f64 {
        let primary = if self.primary_coeff > 0.0 {
            self.primary_coeff * self.primary_exponent * t.powf(self.primary_exponent - 1.0)
        } else {
            0.0
        };
        primary + self.secondary_rate_mm_per_s + self.tertiary_rate(t)
    }

    fn tertiary_rate(&self, t: f64) -> f64 {
        if self.tertiary_coeff_mm > 0.0 {
            self.tertiary_coeff_mm * self.tertiary_exponent / self.rupture_time_s
                * (1.0 - t / self.rupture_time_s).powf(-self.tertiary_exponent - 1.0)
        } else {
            0.0
        }
    }

    pub fn accel(&self, t: f64) -> f64 {
        let p = self.primary_exponent;
        let primary = if self.primary_coeff > 0.0 {
            self.primary_coeff * p * (p - 1.0) * t.powf(p - 2.0)
        } else {
            0.0
        };
        let q = self.tertiary_exponent;
        let tertiary = if self.tertiary_coeff_mm > 0.0 {
            self.tertiary_coeff_mm * q * (q + 1.0) / self.rupture_time_s.powi(2)
                * (1.0 - t / self.rupture_time_s).powf(-q - 2.0)
        } else {
            0.0
        };
        primary + tertiary
    }

    /// The documented separation condition: the primary rate falls below
    /// a tenth of the secondary slope somewhere before half the rupture
    /// time. Reported as a quality flag, not an error; the generator only
    /// requires the rate minimum to be observable within the record.
    pub fn well_separated(&self) -> bool {
        if self.primary_coeff == 0.0 {
            return true;
        }
        let half = 0.5 * self.rupture_time_s;
        self.primary_coeff * self.primary_exponent * half.powf(self.primary_exponent - 1.0)
            < 0.1 * self.secondary_rate_mm_per_s
    }

    fn validate(&self) -> Result<(), SynthError> {
        let bad = |field: &'static str, message: String| {
            Err(SynthError::InvalidParams { field, message })
        };
        if !(self.secondary_rate_mm_per_s > 0.0) {
            return bad("secondary_rate_mm_per_s", "must be positive".into());
        }
        if self.primary_coeff < 0.0 || self.tertiary_coeff_mm < 0.0 || self.elastic_offset_mm < 0.0
        {
            return bad("coefficients", "must be non-negative".into());
        }
        if self.primary_coeff > 0.0
            && !(self.primary_exponent > 0.0 && self.primary_exponent < 1.0)
        {
            return bad("primary_exponent", "must lie in (0, 1)".into());
        }
        if self.tertiary_coeff_mm > 0.0 && !(self.tertiary_exponent > 0.0) {
            return bad("tertiary_exponent", "must be positive".into());
        }
        if !(self.rupture_time_s > 0.0) {
            return bad("rupture_time_s", "must be positive".into());
        }
        if !(self.noise_sigma >= 0.0) {
            return bad("noise_sigma", "must be non-negative".into());
        }
        if self.n_samples < crate::ingest::MIN_SAMPLES {
            return bad("n_samples", format!("need at least {}", crate::ingest::MIN_SAMPLES));
        }
        if !(self.t_start_s > 0.0 && self.t_start_s < self.t_end_s) {
            return bad("t_start_s", "need 0 < t_start < t_end".into());
        }
        if self.t_end_s >= 0.999 * self.rupture_time_s {
            return bad("t_end_s", "samples must end before 0.999 * rupture time".into());
        }
        Ok(())
    }
}

/// Ground truth attached to a generated record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthTruth {
    pub specimen_id: String,
    pub min_rate_disp_mm_per_s: f64,
    pub min_rate_strain_per_s: f64,
    pub min_rate_time_s: f64,
    /// Blow-up time; absent for records without a tertiary stage.
    pub rupture_time_s: Option<f64>,
    /// Time where the primary term has decayed to 10% of the total rate.
    pub t_primary_end_s: Option<f64>,
    /// Time where the tertiary term has grown to 10% of the total rate.
    pub t_secondary_end_s: Option<f64>,
    pub secondary_rate_mm_per_s: f64,
    pub well_separated: bool,
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    // callers guarantee f(lo) < 0 < f(hi)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-10 * hi.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn analytic_minimum(params: &SynthParams) -> Result<(f64, f64), SynthError> {
    let (a, b) = (params.primary_coeff, params.tertiary_coeff_mm);
    let (lo, hi) = (params.t_start_s, params.t_end_s);
    let t_min = if a > 0.0 && b > 0.0 {
        // d'' runs from negative (primary decay) to positive (blow-up);
        // the minimum must be observable inside the sampled window
        if !(params.accel(lo) < 0.0 && params.accel(hi) > 0.0) {
            return Err(SynthError::SeparationViolated);
        }
        bisect(lo, hi, |t| params.accel(t))
    } else if b > 0.0 {
        lo // rate strictly increasing
    } else {
        hi // rate strictly decreasing (or constant)
    };
    Ok((t_min, params.rate(t_min)))
}

/// Time where `fraction(t) - 0.1` changes sign, if it does so inside the
/// sampled window. `rising` selects the crossing direction.
fn ten_percent_crossing(
    params: &SynthParams,
    fraction: impl Fn(&SynthParams, f64) -> f64,
    rising: bool,
) -> Option<f64> {
    let (lo, hi) = (params.t_start_s, params.t_end_s);
    let g = |t: f64| {
        let v = fraction(params, t) - 0.1;
        if rising {
            v
        } else {
            -v
        }
    };
    if g(lo) < 0.0 && g(hi) > 0.0 {
        Some(bisect(lo, hi, g))
    } else {
        None
    }
}

/// Generate one synthetic record and its ground truth.
pub fn generate(
    params: &SynthParams,
    meta: SpecimenMeta,
) -> Result<(DisplacementSeries, SynthTruth), SynthError> {
    params.validate()?;
    let (t_min, min_rate) = analytic_minimum(params)?;

    let t_primary_end = if params.primary_coeff > 0.0 {
        ten_percent_crossing(
            params,
            |p, t| {
                p.primary_coeff * p.primary_exponent * t.powf(p.primary_exponent - 1.0) / p.rate(t)
            },
            false,
        )
    } else {
        None
    };
    let t_secondary_end = if params.tertiary_coeff_mm > 0.0 {
        ten_percent_crossing(params, |p, t| p.tertiary_rate(t) / p.rate(t), true)
    } else {
        None
    };

    // log-spaced schedule
    let n = params.n_samples;
    let (ln_lo, ln_hi) = (params.t_start_s.ln(), params.t_end_s.ln());
    let times: Vec<f64> = (0..n)
        .map(|i| (ln_lo + (ln_hi - ln_lo) * i as f64 / (n - 1) as f64).exp())
        .collect();

    let clean: Vec<f64> = times.iter().map(|&t| params.displacement(t)).collect();
    let displacements = if params.noise_sigma == 0.0 {
        clean
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut out = Vec::with_capacity(n);
        let mut prev = clean[0];
        out.push(prev);
        for w in clean.windows(2) {
            let z: f64 = StandardNormal.sample(&mut rng);
            prev += (w[1] - w[0]) * (params.noise_sigma * z).exp();
            out.push(prev);
        }
        out
    };

    let failed = params.tertiary_coeff_mm > 0.0;
    let failure_displacement = failed.then(|| *displacements.last().unwrap());
    let samples = times
        .iter()
        .zip(&displacements)
        .map(|(&t, &d)| Sample {
            time_s: t,
            displacement_mm: d,
        })
        .collect();
    let h_ef = meta.embedment_depth_mm;
    let specimen_id = meta.specimen_id.clone();
    let series = DisplacementSeries::new(meta, samples, failed, failure_displacement)?;

    let truth = SynthTruth {
        specimen_id,
        min_rate_disp_mm_per_s: min_rate,
        min_rate_strain_per_s: min_rate / h_ef,
        min_rate_time_s: t_min,
        rupture_time_s: failed.then_some(params.rupture_time_s),
        t_primary_end_s: t_primary_end,
        t_secondary_end_s: t_secondary_end,
        secondary_rate_mm_per_s: params.secondary_rate_mm_per_s,
        well_separated: params.well_separated(),
    };
    Ok((series, truth))
}

/// A whole campaign of synthetic specimens sharing anchor geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    pub adhesive_id: String,
    pub anchor_radius_mm: f64,
    pub embedment_depth_mm: f64,
    pub pullout_reference_n: f64,
    pub temperature_c: f64,
    pub seed: u64,
    pub noise_sigma: f64,
    pub n_samples: usize,
    pub specimens: Vec<SpecimenSpec>,
}

/// Per-specimen load level and curve parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecimenSpec {
    pub specimen_id: String,
    /// Sustained load as a fraction of the pull-out reference.
    pub load_level: f64,
    pub elastic_offset_mm: f64,
    pub primary_coeff: f64,
    pub primary_exponent: f64,
    pub secondary_rate_mm_per_s: f64,
    pub tertiary_coeff_mm: f64,
    pub tertiary_exponent: f64,
    pub rupture_time_s: f64,
    pub t_start_s: f64,
    /// Last sample time as a fraction of the rupture time, below 0.999.
    pub t_end_frac: f64,
}

/// Generate every specimen of a campaign. Specimen `i` uses the campaign
/// seed plus `i`, so records are independent but reproducible.
pub fn generate_campaign(
    spec: &CampaignSpec,
) -> Result<(Vec<DisplacementSeries>, Vec<SynthTruth>), SynthError> {
    let mut series = Vec::with_capacity(spec.specimens.len());
    let mut truths = Vec::with_capacity(spec.specimens.len());
    for (i, sp) in spec.specimens.iter().enumerate() {
        let params = SynthParams {
            elastic_offset_mm: sp.elastic_offset_mm,
            primary_coeff: sp.primary_coeff,
            primary_exponent: sp.primary_exponent,
            secondary_rate_mm_per_s: sp.secondary_rate_mm_per_s,
            tertiary_coeff_mm: sp.tertiary_coeff_mm,
            tertiary_exponent: sp.tertiary_exponent,
            rupture_time_s: sp.rupture_time_s,
            noise_sigma: spec.noise_sigma,
            seed: spec.seed.wrapping_add(i as u64),
            n_samples: spec.n_samples,
            t_start_s: sp.t_start_s,
            t_end_s: sp.t_end_frac * sp.rupture_time_s,
        };
        let meta = SpecimenMeta::new(
            sp.specimen_id.clone(),
            spec.adhesive_id.clone(),
            spec.anchor_radius_mm,
            spec.embedment_depth_mm,
            sp.load_level * spec.pullout_reference_n,
            spec.pullout_reference_n,
            spec.temperature_c,
            None,
        )?;
        let (s, t) = generate(&params, meta)?;
        series.push(s);
        truths.push(t);
    }
    Ok((series, truths))
}
