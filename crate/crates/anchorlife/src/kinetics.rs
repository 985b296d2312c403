//! Creep kinetics: rate estimation, stage segmentation, minimum creep
//! rate, and failure time per specimen.
//!
//! The displacement rate is the slope of a moving-window least-squares
//! line, which tolerates noisy and irregularly logged data better than a
//! central difference. Stage boundaries come from an exhaustive search
//! for the best continuous three-piece linear fit in (ln t, ln rate)
//! space; the failure time is the intersection of the secondary and
//! tertiary regression lines in the same space, the classic construction
//! for time-to-failure records.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::DisplacementSeries;
use crate::regress::{self, LinearFit, RegressError};

pub const DEFAULT_WINDOW_HALFWIDTH: usize = 3;

#[derive(Debug, Error)]
pub enum KineticsError {
    #[error("too few samples: {found} (need at least {required})")]
    TooFewSamples { found: usize, required: usize },
    #[error("window halfwidth must be at least 1")]
    ZeroWindow,
    #[error("rate series is degenerate: no distinguishable creep stages")]
    DegenerateSeries,
    #[error("secondary and tertiary lines are parallel: no intersection")]
    ParallelLines,
    #[error(transparent)]
    Regress(#[from] RegressError),
}

/// Displacement rate history derived from a [`DisplacementSeries`].
#[derive(Debug, Clone, PartialEq)]
pub struct RateSeries {
    /// (time s, rate mm/s); timestamps are the window-center samples.
    pub samples: Vec<(f64, f64)>,
    pub window_halfwidth: usize,
}

impl RateSeries {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last_time(&self) -> f64 {
        self.samples.last().map(|s| s.0).unwrap_or(0.0)
    }
}

/// End times of the primary and secondary creep stages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageBounds {
    pub t_primary_end: f64,
    pub t_secondary_end: f64,
}

/// Failure time from the two-line intersection, flagged when the raw
/// intersection fell outside the admissible window and was clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureTime {
    pub seconds: f64,
    pub clamped: bool,
}

/// Everything extracted from one specimen's displacement history.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecimenKinetics {
    pub specimen_id: String,
    pub min_creep_rate_disp: f64,
    pub min_creep_rate_strain: f64,
    pub failure_time: f64,
    pub failure_time_clamped: bool,
    pub failure_displacement: f64,
    pub stage_bounds: StageBounds,
    /// Secondary-stage line in (ln t, ln rate).
    pub secondary_fit: LinearFit,
    /// Tertiary-stage line in (ln t, ln rate).
    pub tertiary_fit: LinearFit,
}

/// Moving-window regression derivative: the rate at index `i` is the OLS
/// slope over samples `[i - w, i + w]`. Exact for affine displacement
/// histories regardless of window size.
pub fn estimate_rates(
    series: &DisplacementSeries,
    window_halfwidth: usize,
) -> Result<RateSeries, KineticsError> {
    let w = window_halfwidth;
    if w < 1 {
        return Err(KineticsError::ZeroWindow);
    }
    let n = series.len();
    if n < 2 * w + 2 {
        return Err(KineticsError::TooFewSamples {
            found: n,
            required: 2 * w + 2,
        });
    }
    let mut samples = Vec::with_capacity(n - 2 * w);
    for center in w..n - w {
        let window = &series.samples[center - w..=center + w];
        let m = window.len() as f64;
        let tbar = window.iter().map(|s| s.time_s).sum::<f64>() / m;
        let dbar = window.iter().map(|s| s.displacement_mm).sum::<f64>() / m;
        let mut stt = 0.0;
        let mut std = 0.0;
        for s in window {
            stt += (s.time_s - tbar) * (s.time_s - tbar);
            std += (s.time_s - tbar) * (s.displacement_mm - dbar);
        }
        samples.push((series.samples[center].time_s, std / stt));
    }
    Ok(RateSeries {
        samples,
        window_halfwidth: w,
    })
}

/// (ln t, ln rate) points with non-positive rates clamped to the smallest
/// positive rate, so sensor dips do not produce -inf.
fn log_points(rates: &RateSeries) -> Result<Vec<(f64, f64)>, KineticsError> {
    let floor = rates
        .samples
        .iter()
        .map(|s| s.1)
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !floor.is_finite() {
        return Err(KineticsError::DegenerateSeries);
    }
    Ok(rates
        .samples
        .iter()
        .map(|&(t, r)| (t.ln(), r.max(floor).ln()))
        .collect())
}

const MIN_SEGMENT_POINTS: usize = 4;

/// Locate the two stage boundaries by exhaustively minimizing the total
/// squared residual of a continuous three-piece linear fit in
/// (ln t, ln rate) space, with at least four points per segment. O(n^2)
/// over breakpoint pairs; each candidate fit is assembled in O(1) from
/// prefix sums.
pub fn segment_stages(rates: &RateSeries) -> Result<StageBounds, KineticsError> {
    let n = rates.len();
    if n < 3 * MIN_SEGMENT_POINTS {
        return Err(KineticsError::TooFewSamples {
            found: n,
            required: 3 * MIN_SEGMENT_POINTS,
        });
    }
    let (rmin, rmax) = rates
        .samples
        .iter()
        .map(|s| s.1)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r), hi.max(r))
        });
    if (rmax - rmin).abs() <= 1e-12 * rmax.abs().max(rmin.abs()) {
        return Err(KineticsError::DegenerateSeries);
    }

    let pts = log_points(rates)?;
    // center for conditioning; SSE is unaffected
    let xbar = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let ybar = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0 - xbar).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1 - ybar).collect();

    // prefix sums; index k holds the sum over points [0, k)
    let mut p0 = vec![0.0; n + 1];
    let mut p1 = vec![0.0; n + 1];
    let mut p2 = vec![0.0; n + 1];
    let mut py = vec![0.0; n + 1];
    let mut pxy = vec![0.0; n + 1];
    let mut pyy = vec![0.0; n + 1];
    for k in 0..n {
        p0[k + 1] = p0[k] + 1.0;
        p1[k + 1] = p1[k] + xs[k];
        p2[k + 1] = p2[k] + xs[k] * xs[k];
        py[k + 1] = py[k] + ys[k];
        pxy[k + 1] = pxy[k] + xs[k] * ys[k];
        pyy[k + 1] = pyy[k] + ys[k] * ys[k];
    }
    let suffix = |p: &[f64], k: usize| p[n] - p[k];

    let mut best: Option<(f64, usize, usize)> = None;
    for i in MIN_SEGMENT_POINTS - 1..n {
        if n - 1 - i < 2 * MIN_SEGMENT_POINTS {
            break;
        }
        let a = xs[i];
        // sums over points strictly right of knot a
        let (s0a, s1a, s2a) = (suffix(&p0, i + 1), suffix(&p1, i + 1), suffix(&p2, i + 1));
        let (sya, sxya) = (suffix(&py, i + 1), suffix(&pxy, i + 1));
        for j in i + MIN_SEGMENT_POINTS..n - MIN_SEGMENT_POINTS {
            let b = xs[j];
            let (s0b, s1b, s2b) =
                (suffix(&p0, j + 1), suffix(&p1, j + 1), suffix(&p2, j + 1));
            let (syb, sxyb) = (suffix(&py, j + 1), suffix(&pxy, j + 1));

            // normal equations for basis {1, x, (x-a)+, (x-b)+}
            let m = [
                [n as f64, p1[n], s1a - a * s0a, s1b - b * s0b],
                [p1[n], p2[n], s2a - a * s1a, s2b - b * s1b],
                [
                    s1a - a * s0a,
                    s2a - a * s1a,
                    s2a - 2.0 * a * s1a + a * a * s0a,
                    s2b - (a + b) * s1b + a * b * s0b,
                ],
                [
                    s1b - b * s0b,
                    s2b - b * s1b,
                    s2b - (a + b) * s1b + a * b * s0b,
                    s2b - 2.0 * b * s1b + b * b * s0b,
                ],
            ];
            let v = [py[n], pxy[n], sxya - a * sya, sxyb - b * syb];
            let sse = match crate::linalg::solve4(&m, &v) {
                Some(beta) => {
                    let explained: f64 = beta.iter().zip(&v).map(|(b, v)| b * v).sum();
                    (pyy[n] - explained).max(0.0)
                }
                None => f64::INFINITY,
            };
            if best.map_or(true, |(b_sse, _, _)| sse < b_sse) {
                best = Some((sse, i, j));
            }
        }
    }

    let (_, i, j) = best.ok_or(KineticsError::DegenerateSeries)?;
    Ok(StageBounds {
        t_primary_end: rates.samples[i].0,
        t_secondary_end: rates.samples[j].0,
    })
}

/// Minimum creep rate over the secondary window: the OLS slope of
/// displacement on time between the stage bounds. Returns the rate in
/// mm/s and, divided by the embedment depth, in 1/s.
pub fn min_creep_rate(
    series: &DisplacementSeries,
    bounds: &StageBounds,
) -> Result<(f64, f64), KineticsError> {
    let window: Vec<_> = series
        .samples
        .iter()
        .filter(|s| s.time_s >= bounds.t_primary_end && s.time_s <= bounds.t_secondary_end)
        .collect();
    if window.len() < MIN_SEGMENT_POINTS {
        return Err(KineticsError::TooFewSamples {
            found: window.len(),
            required: MIN_SEGMENT_POINTS,
        });
    }
    let t: Vec<f64> = window.iter().map(|s| s.time_s).collect();
    let d: Vec<f64> = window.iter().map(|s| s.displacement_mm).collect();
    let fit = regress::ols_fit(&t, &d)?;
    Ok((fit.slope, fit.slope / series.meta.embedment_depth_mm))
}

/// Regression lines through the secondary and tertiary rate points in
/// (ln t, ln rate) space.
pub fn stage_fits(
    rates: &RateSeries,
    bounds: &StageBounds,
) -> Result<(LinearFit, LinearFit), KineticsError> {
    let pts = log_points(rates)?;
    let mut sec: (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    let mut ter: (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    for (&(t, _), &(lx, ly)) in rates.samples.iter().zip(&pts) {
        if t >= bounds.t_primary_end && t <= bounds.t_secondary_end {
            sec.0.push(lx);
            sec.1.push(ly);
        } else if t > bounds.t_secondary_end {
            ter.0.push(lx);
            ter.1.push(ly);
        }
    }
    for window in [&sec, &ter] {
        if window.0.len() < MIN_SEGMENT_POINTS {
            return Err(KineticsError::TooFewSamples {
                found: window.0.len(),
                required: MIN_SEGMENT_POINTS,
            });
        }
    }
    Ok((
        regress::ols_fit(&sec.0, &sec.1)?,
        regress::ols_fit(&ter.0, &ter.1)?,
    ))
}

/// Intersection of the secondary and tertiary lines, clamped to
/// `[t_primary_end, t_last]`.
pub fn intersect_stage_lines(
    secondary: &LinearFit,
    tertiary: &LinearFit,
    t_primary_end: f64,
    t_last: f64,
) -> Result<FailureTime, KineticsError> {
    let denom = secondary.slope - tertiary.slope;
    let scale = secondary.slope.abs().max(tertiary.slope.abs()).max(1.0);
    if denom.abs() <= 1e-12 * scale {
        return Err(KineticsError::ParallelLines);
    }
    let ln_t = (tertiary.intercept - secondary.intercept) / denom;
    let raw = ln_t.exp();
    let seconds = raw.clamp(t_primary_end, t_last);
    Ok(FailureTime {
        seconds,
        clamped: seconds != raw,
    })
}

/// Failure time of a specimen: fit the two stage lines and intersect.
pub fn failure_time(
    rates: &RateSeries,
    bounds: &StageBounds,
) -> Result<FailureTime, KineticsError> {
    let (sec, ter) = stage_fits(rates, bounds)?;
    intersect_stage_lines(&sec, &ter, bounds.t_primary_end, rates.last_time())
}

/// Full kinetics pipeline for one specimen.
pub fn analyze(
    series: &DisplacementSeries,
    window_halfwidth: usize,
) -> Result<SpecimenKinetics, KineticsError> {
    let rates = estimate_rates(series, window_halfwidth)?;
    let bounds = segment_stages(&rates)?;
    let (min_disp, min_strain) = min_creep_rate(series, &bounds)?;
    let (secondary_fit, tertiary_fit) = stage_fits(&rates, &bounds)?;
    let ft = intersect_stage_lines(
        &secondary_fit,
        &tertiary_fit,
        bounds.t_primary_end,
        rates.last_time(),
    )?;
    let failure_displacement = series
        .failure_displacement_mm
        .unwrap_or_else(|| series.samples.last().map(|s| s.displacement_mm).unwrap_or(0.0));
    Ok(SpecimenKinetics {
        specimen_id: series.meta.specimen_id.clone(),
        min_creep_rate_disp: min_disp,
        min_creep_rate_strain: min_strain,
        failure_time: ft.seconds,
        failure_time_clamped: ft.clamped,
        failure_displacement,
        stage_bounds: bounds,
        secondary_fit,
        tertiary_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Sample, SpecimenMeta};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn meta() -> SpecimenMeta {
        SpecimenMeta::new(
            "S1".into(),
            "P1".into(),
            8.0,
            75.0,
            100_000.0,
            157_320.0,
            23.0,
            None,
        )
        .unwrap()
    }

    fn series_from(f: impl Fn(f64) -> f64, times: &[f64]) -> DisplacementSeries {
        let samples = times
            .iter()
            .map(|&t| Sample {
                time_s: t,
                displacement_mm: f(t),
            })
            .collect();
        DisplacementSeries::new(meta(), samples, true, None).unwrap()
    }

    #[test]
    fn affine_displacement_gives_exact_slope() {
        let times: Vec<f64> = (0..40).map(|i| 0.5 + 1.3 * i as f64).collect();
        let series = series_from(|t| 2.0 + 3.0 * t, &times);
        for w in 1..=5 {
            let rates = estimate_rates(&series, w).unwrap();
            assert_eq!(rates.len(), 40 - 2 * w);
            for &(_, r) in &rates.samples {
                assert!((r - 3.0).abs() < 1e-9, "w={w}: rate {r}");
            }
        }
    }

    #[test]
    fn parabola_rate_matches_analytic_derivative_at_center() {
        let times: Vec<f64> = (0..=100).map(|i| 0.1 * i as f64).collect();
        let series = series_from(|t| t * t, &times);
        let rates = estimate_rates(&series, 2).unwrap();
        let (t, r) = rates
            .samples
            .iter()
            .copied()
            .min_by(|a, b| (a.0 - 5.0).abs().total_cmp(&(b.0 - 5.0).abs()))
            .unwrap();
        assert!((t - 5.0).abs() < 1e-12);
        assert!((r - 10.0).abs() < 1e-9, "rate at t=5 was {r}");
    }

    #[test]
    fn window_larger_than_series_is_rejected() {
        let times: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let series = series_from(|t| t, &times);
        // RateSeries would need 2w+2 = 12 samples
        let err = estimate_rates(&series, 5).unwrap_err();
        assert!(matches!(err, KineticsError::TooFewSamples { .. }));
    }

    /// Continuous three-segment polyline in (ln t, ln rate) with breaks at
    /// the given times; times must be sample positions.
    fn polyline_rates(
        times: &[f64],
        breaks: (f64, f64),
        slopes: (f64, f64, f64),
        y0: f64,
        noise: Option<(f64, u64)>,
    ) -> RateSeries {
        let (b1, b2) = (breaks.0.ln(), breaks.1.ln());
        let x0 = times[0].ln();
        let mut rng = noise.map(|(sigma, seed)| (sigma, ChaCha8Rng::seed_from_u64(seed)));
        let samples = times
            .iter()
            .map(|&t| {
                let x = t.ln();
                let mut y = y0 + slopes.0 * (x.min(b1) - x0);
                if x > b1 {
                    y += slopes.1 * (x.min(b2) - b1);
                }
                if x > b2 {
                    y += slopes.2 * (x - b2);
                }
                if let Some((sigma, rng)) = rng.as_mut() {
                    let z: f64 = rand_distr::Distribution::sample(
                        &rand_distr::StandardNormal,
                        rng,
                    );
                    y += *sigma * z;
                }
                (t, y.exp())
            })
            .collect();
        RateSeries {
            samples,
            window_halfwidth: 1,
        }
    }

    #[test]
    fn segmentation_recovers_exact_breakpoints() {
        // log-spaced grid that contains t = 100 and t = 10_000 exactly
        let times: Vec<f64> = (0..=60).map(|k| 10f64.powf(k as f64 / 10.0)).collect();
        let rates = polyline_rates(&times, (100.0, 10_000.0), (-1.4, -0.05, 2.2), -12.0, None);
        let bounds = segment_stages(&rates).unwrap();
        assert!((bounds.t_primary_end - 100.0).abs() < 1e-9);
        assert!((bounds.t_secondary_end - 10_000.0).abs() < 1e-9);
    }

    #[test]
    fn segmentation_survives_multiplicative_noise() {
        let times: Vec<f64> = (0..=60).map(|k| 10f64.powf(k as f64 / 10.0)).collect();
        let mut hits = 0;
        for trial in 0..100 {
            let rates = polyline_rates(
                &times,
                (100.0, 10_000.0),
                (-1.4, -0.05, 2.2),
                -12.0,
                Some((0.01, trial)),
            );
            let bounds = segment_stages(&rates).unwrap();
            let ok1 = (bounds.t_primary_end / 100.0 - 1.0).abs() <= 0.10;
            let ok2 = (bounds.t_secondary_end / 10_000.0 - 1.0).abs() <= 0.10;
            if ok1 && ok2 {
                hits += 1;
            }
        }
        assert!(hits >= 95, "only {hits}/100 trials within 10%");
    }

    #[test]
    fn constant_rates_are_degenerate() {
        let samples: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64, 1e-6)).collect();
        let rates = RateSeries {
            samples,
            window_halfwidth: 1,
        };
        assert!(matches!(
            segment_stages(&rates).unwrap_err(),
            KineticsError::DegenerateSeries
        ));
    }

    #[test]
    fn min_rate_on_linear_window_is_exact() {
        let times: Vec<f64> = (0..40).map(|i| 100.0 * i as f64).collect();
        let series = series_from(|t| 1.0 + 1e-6 * t, &times);
        let bounds = StageBounds {
            t_primary_end: 500.0,
            t_secondary_end: 2500.0,
        };
        let (disp, strain) = min_creep_rate(&series, &bounds).unwrap();
        assert!((disp - 1e-6).abs() < 1e-18);
        assert!((strain - 1e-6 / 75.0).abs() < 1e-20);
        assert!((strain - 1.3333333333333e-8).abs() < 1e-12 * strain);
    }

    #[test]
    fn min_rate_needs_four_samples() {
        let times: Vec<f64> = (0..40).map(|i| 100.0 * i as f64).collect();
        let series = series_from(|t| 1.0 + 1e-6 * t, &times);
        let bounds = StageBounds {
            t_primary_end: 0.0,
            t_secondary_end: 250.0,
        };
        assert!(matches!(
            min_creep_rate(&series, &bounds).unwrap_err(),
            KineticsError::TooFewSamples { found: 3, .. }
        ));
    }

    #[test]
    fn failure_time_solves_hand_example() {
        // secondary ln r = -1 ln t - 10, tertiary ln r = 2 ln t - 40;
        // the lines cross at ln t = 10, inside the tertiary window
        let sec_times: Vec<f64> = (0..6).map(|i| (6.0 + 0.2 * i as f64).exp()).collect();
        let ter_times: Vec<f64> = (0..6).map(|i| (9.6 + 0.2 * i as f64).exp()).collect();
        let mut samples: Vec<(f64, f64)> = sec_times
            .iter()
            .map(|&t| (t, (-1.0 * t.ln() - 10.0).exp()))
            .collect();
        samples.extend(ter_times.iter().map(|&t| (t, (2.0 * t.ln() - 40.0).exp())));
        let rates = RateSeries {
            samples,
            window_halfwidth: 1,
        };
        let bounds = StageBounds {
            t_primary_end: sec_times[0],
            t_secondary_end: sec_times[5],
        };
        let ft = failure_time(&rates, &bounds).unwrap();
        assert!(!ft.clamped);
        assert!(
            (ft.seconds - 10f64.exp()).abs() < 1e-6 * 10f64.exp(),
            "t_f = {}",
            ft.seconds
        );
    }

    #[test]
    fn parallel_lines_are_detected() {
        let sec = regress::ols_fit(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let mut ter = sec.clone();
        ter.intercept += 1.0;
        assert!(matches!(
            intersect_stage_lines(&sec, &ter, 1.0, 100.0).unwrap_err(),
            KineticsError::ParallelLines
        ));
    }

    /// Three-stage displacement curve used by the scaling property tests.
    fn three_stage(t: f64) -> f64 {
        let (delta0, a_p, p, v_s, b_t, q, t_r) = (0.5, 0.05, 0.3, 2e-7, 0.01, 2.0, 1e6);
        delta0 + a_p * t.powf(p) + v_s * t + b_t * ((1.0 - t / t_r).powf(-q) - 1.0)
    }

    fn three_stage_times() -> Vec<f64> {
        let n = 200;
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                10f64.powf(0.0 + f * (0.999e6f64.log10() - 0.0))
            })
            .collect()
    }

    #[test]
    fn displacement_scaling_moves_rates_but_not_times() {
        let times = three_stage_times();
        let base = series_from(three_stage, &times);
        let scaled = series_from(|t| 3.7 * three_stage(t), &times);

        let r1 = estimate_rates(&base, 3).unwrap();
        let r2 = estimate_rates(&scaled, 3).unwrap();
        for (a, b) in r1.samples.iter().zip(&r2.samples) {
            assert!((b.1 - 3.7 * a.1).abs() <= 1e-9 * b.1.abs().max(1e-300));
        }

        let b1 = segment_stages(&r1).unwrap();
        let b2 = segment_stages(&r2).unwrap();
        assert_eq!(b1, b2);

        let (m1, _) = min_creep_rate(&base, &b1).unwrap();
        let (m2, _) = min_creep_rate(&scaled, &b2).unwrap();
        assert!((m2 / m1 - 3.7).abs() < 1e-9);

        let f1 = failure_time(&r1, &b1).unwrap();
        let f2 = failure_time(&r2, &b2).unwrap();
        assert!((f1.seconds - f2.seconds).abs() <= 1e-6 * f1.seconds);
    }

    #[test]
    fn time_scaling_scales_failure_time() {
        let times = three_stage_times();
        let k = 4.0;
        let base = series_from(three_stage, &times);
        let stretched_times: Vec<f64> = times.iter().map(|&t| k * t).collect();
        // same displacement values attached to stretched timestamps
        let stretched = series_from(|t| three_stage(t / k), &stretched_times);

        let r1 = estimate_rates(&base, 3).unwrap();
        let r2 = estimate_rates(&stretched, 3).unwrap();
        let b1 = segment_stages(&r1).unwrap();
        let b2 = segment_stages(&r2).unwrap();
        assert!((b2.t_primary_end / b1.t_primary_end - k).abs() < 1e-9);
        assert!((b2.t_secondary_end / b1.t_secondary_end - k).abs() < 1e-9);
        let f1 = failure_time(&r1, &b1).unwrap();
        let f2 = failure_time(&r2, &b2).unwrap();
        assert!(
            (f2.seconds / f1.seconds - k).abs() < 1e-9,
            "ratio {}",
            f2.seconds / f1.seconds
        );
    }

    #[test]
    fn analyze_produces_consistent_kinetics() {
        let times = three_stage_times();
        let series = series_from(three_stage, &times);
        let k = analyze(&series, 3).unwrap();
        assert!(k.stage_bounds.t_primary_end > 0.0);
        assert!(k.stage_bounds.t_primary_end < k.stage_bounds.t_secondary_end);
        assert!(k.stage_bounds.t_secondary_end < series.last_time());
        assert!(k.failure_time >= k.stage_bounds.t_primary_end);
        assert!(k.failure_time <= series.last_time());
        assert_eq!(k.min_creep_rate_strain, k.min_creep_rate_disp / 75.0);
        // secondary slope in log-log should be mild, tertiary steep
        assert!(k.tertiary_fit.slope > k.secondary_fit.slope);
        // analytic minimum of the rate curve on a fine grid
        let rate = |t: f64| {
            0.05 * 0.3 * t.powf(-0.7) + 2e-7 + 0.01 * 2.0 / 1e6 * (1.0 - t / 1e6).powf(-3.0)
        };
        let analytic_min = (0..200_000)
            .map(|i| rate(1.0 + (0.999e6 - 1.0) * i as f64 / 199_999.0))
            .fold(f64::INFINITY, f64::min);
        assert!(
            (k.min_creep_rate_disp / analytic_min - 1.0).abs() < 0.10,
            "min rate {} vs analytic {analytic_min}",
            k.min_creep_rate_disp
        );
    }

    #[test]
    fn noisy_rates_with_dips_are_clamped_not_fatal() {
        let times: Vec<f64> = (0..=60).map(|k| 10f64.powf(k as f64 / 10.0)).collect();
        let mut rates =
            polyline_rates(&times, (100.0, 10_000.0), (-1.4, -0.05, 2.2), -12.0, None);
        // sensor dip: a couple of non-positive smoothed rates
        rates.samples[20].1 = 0.0;
        rates.samples[30].1 = -1e-9;
        let bounds = segment_stages(&rates).unwrap();
        assert!(bounds.t_primary_end < bounds.t_secondary_end);
    }

    #[test]
    fn random_windows_never_return_nonfinite_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(12..80);
            let mut t = 0.0;
            let times: Vec<f64> = (0..n)
                .map(|_| {
                    t += rng.gen_range(0.01..5.0);
                    t
                })
                .collect();
            let series = series_from(|t| 0.2 + 1e-4 * t + 1e-6 * (t * 0.7).sin(), &times);
            let w = rng.gen_range(1..=3);
            if n < 2 * w + 2 {
                continue;
            }
            let rates = estimate_rates(&series, w).unwrap();
            assert_eq!(rates.len(), n - 2 * w);
            assert!(rates.samples.iter().all(|s| s.1.is_finite()));
        }
    }
}
