//! Acceptance suite: every criterion below runs at its stated tolerance
//! and prints one `acceptance N (...): PASS` line (visible with
//! `cargo test --test acceptance -- --nocapture`). A failed criterion
//! panics with the measured values.

use anchorlife::ingest::SpecimenMeta;
use anchorlife::kinetics;
use anchorlife::lifetime::{
    self, fit_mg, predict_failure_time, resample_case, score_prediction, MGDataPoint, MGVariant,
    ResampleCase,
};
use anchorlife::regress::{self, ols_fit, prediction_interval, IntervalKind};
use anchorlife::stressrate::{
    self, bond_stress, fit_power_law, fit_sinh, BondArea, RateUnit, StressAxis, StressRateFit,
    StressRatePoint,
};
use anchorlife::synth::{self, CampaignSpec, SpecimenSpec};
use anchorlife::ttf::{compose_ttf, sustained_strength, SECONDS_PER_50_YEARS};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::time::Instant;

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn acceptance_01_ols_matches_brute_force_normal_equations() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..100 {
        let n = rng.gen_range(5..=50);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let slope_true: f64 = rng.gen_range(-5.0..5.0);
        let intercept_true: f64 = rng.gen_range(-3.0..3.0);
        let y: Vec<f64> = x
            .iter()
            .map(|&xi| {
                let z: f64 = StandardNormal.sample(&mut rng);
                slope_true * xi + intercept_true + 0.3 * z
            })
            .collect();

        // independent oracle: solve the raw normal equations directly
        let nf = n as f64;
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let det = nf * sxx - sx * sx;
        let slope = (nf * sxy - sx * sy) / det;
        let intercept = (sxx * sy - sx * sxy) / det;
        let sse: f64 = x
            .iter()
            .zip(&y)
            .map(|(&a, &b)| (b - slope * a - intercept).powi(2))
            .sum();
        let s2 = sse / (nf - 2.0);

        let fit = ols_fit(&x, &y).unwrap();
        assert!(rel(fit.slope, slope) < 1e-10, "trial {trial}: slope");
        assert!(rel(fit.intercept, intercept) < 1e-10, "trial {trial}: intercept");
        assert!(rel(fit.residual_variance, s2) < 1e-10, "trial {trial}: s2");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("acceptance 1 (OLS oracle equivalence): PASS in {elapsed:?}");
}

#[test]
fn acceptance_02_prediction_interval_hand_check() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0];
    let y = [2.1, 3.9, 6.2, 7.8, 10.1];
    let fit = ols_fit(&x, &y).unwrap();

    let t3 = regress::student_t_quantile(0.975, 3.0);
    assert!((t3 - 3.1824).abs() < 5e-5, "t3 = {t3}");

    let t3_full = 3.182_446_305_284_263;
    let s = fit.residual_variance.sqrt();
    let halfwidth = t3_full * s * (1.0 + 0.2 + (3.0 - fit.xbar).powi(2) / fit.sxx).sqrt();
    let y_hat = fit.predict(3.0);
    let (lo, hi) = prediction_interval(&fit, 3.0, 0.95, IntervalKind::Prediction).unwrap();
    assert!((lo - (y_hat - halfwidth)).abs() < 1e-6, "lo {lo}");
    assert!((hi - (y_hat + halfwidth)).abs() < 1e-6, "hi {hi}");
    println!("acceptance 2 (prediction interval hand check): PASS, t3 = {t3:.6}, interval ({lo:.6}, {hi:.6})");
}

fn exact_mg_points(n: f64, c: f64, times: &[f64]) -> Vec<MGDataPoint> {
    times
        .iter()
        .enumerate()
        .map(|(i, &t)| MGDataPoint {
            specimen_id: format!("S{i}"),
            min_creep_rate: (n * t.ln() + c).exp(),
            failure_time_s: t,
            failure_strain: None,
        })
        .collect()
}

#[test]
fn acceptance_03_mg_exact_recovery_and_round_trip() {
    let times = [3e2, 6e3, 8e4, 2e5, 9e5];
    let c = -4.3;
    for n in [-0.5, -0.9, -1.0, -1.2] {
        let pts = exact_mg_points(n, c, &times);
        let fit = fit_mg(&pts, MGVariant::Strain).unwrap();
        assert!(rel(fit.exponent(), n) < 1e-10, "n = {n}: got {}", fit.exponent());
        assert!(rel(fit.constant(), c) < 1e-10, "c: got {}", fit.constant());
        for &t in &times {
            let rate = (n * t.ln() + c).exp();
            let p = predict_failure_time(&fit, rate, 0.95, IntervalKind::Prediction).unwrap();
            assert!(rel(p.t_mean_s, t) < 1e-9, "round trip at t = {t}: {}", p.t_mean_s);
        }
    }
    println!("acceptance 3 (MG exact recovery + round trip): PASS for n in {{-0.5, -0.9, -1.0, -1.2}}");
}

#[test]
fn acceptance_04_variant_identities() {
    let h_ef = 75.0;
    let times = [1e3, 2e4, 5e5, 3e6];
    let (n, c) = (-0.85, -5.5);

    // strain vs displacement: intercept differs by exactly -ln h_ef
    let disp = exact_mg_points(n, c, &times);
    let strain: Vec<MGDataPoint> = disp
        .iter()
        .map(|p| MGDataPoint {
            min_creep_rate: p.min_creep_rate / h_ef,
            ..p.clone()
        })
        .collect();
    let f_disp = fit_mg(&disp, MGVariant::Displacement).unwrap();
    let f_strain = fit_mg(&strain, MGVariant::Strain).unwrap();
    assert!(rel(f_disp.exponent(), f_strain.exponent()) < 1e-10);
    let diff = f_strain.constant() - f_disp.constant();
    assert!(
        (diff + h_ef.ln()).abs() < 1e-10 * h_ef.ln(),
        "intercept difference {diff} vs -ln h_ef = {}",
        -h_ef.ln()
    );

    // MMG with constant strain kappa: slope unchanged, intercept moves by
    // -slope ln(1/kappa) (magnitude |slope| ln(1/kappa))
    let kappa = 0.01;
    let mmg: Vec<MGDataPoint> = strain
        .iter()
        .map(|p| MGDataPoint {
            failure_strain: Some(kappa),
            ..p.clone()
        })
        .collect();
    let f_mmg = fit_mg(&mmg, MGVariant::Modified).unwrap();
    assert!(rel(f_mmg.exponent(), f_strain.exponent()) < 1e-10);
    let shift = f_mmg.constant() - f_strain.constant();
    let expect = -f_strain.exponent() * (1.0 / kappa).ln();
    assert!(
        (shift - expect).abs() < 1e-10 * expect.abs(),
        "shift {shift} vs {expect}"
    );
    println!("acceptance 4 (variant identities): PASS, strain-displacement intercept diff = -ln h_ef, MMG shift = |slope| ln(1/kappa)");
}

#[test]
fn acceptance_05_sinh_fit_recovery() {
    let start = Instant::now();
    let truth = (10.0, 0.2, 1e-8);

    // noiseless: the module example design, all parameters to 1e-6
    let clean: Vec<StressRatePoint> = log_spaced(1e-9, 1e-4, 8)
        .into_iter()
        .map(|r| StressRatePoint {
            stress: truth.0 * (1.0 + truth.1 * (r / truth.2).asinh()),
            min_creep_rate: r,
            failed: true,
        })
        .collect();
    let fit = fit_sinh(&clean, StressAxis::AbsoluteMpa, RateUnit::StrainPerS).unwrap();
    assert!(rel(fit.tau0, truth.0) < 1e-6, "tau0 {}", fit.tau0);
    assert!(rel(fit.c1, truth.1) < 1e-6, "c1 {}", fit.c1);
    assert!(rel(fit.c2, truth.2) < 1e-6, "c2 {}", fit.c2);

    // 1% multiplicative stress noise: a denser design identifies c2 well
    // enough for 95 of 100 seeded trials within 5%
    let rates = log_spaced(1e-11, 1e-4, 160);
    let mut ok = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<StressRatePoint> = rates
            .iter()
            .map(|&r| {
                let z: f64 = StandardNormal.sample(&mut rng);
                StressRatePoint {
                    stress: truth.0 * (1.0 + truth.1 * (r / truth.2).asinh()) * (1.0 + 0.01 * z),
                    min_creep_rate: r,
                    failed: true,
                }
            })
            .collect();
        if let Ok(f) = fit_sinh(&pts, StressAxis::AbsoluteMpa, RateUnit::StrainPerS) {
            if rel(f.tau0, truth.0) < 0.05 && rel(f.c1, truth.1) < 0.05 && rel(f.c2, truth.2) < 0.05
            {
                ok += 1;
            }
        }
    }
    assert!(ok >= 95, "only {ok}/100 noisy trials within 5%");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("acceptance 5 (sinh-fit recovery): PASS, noiseless 1e-6, noisy {ok}/100 within 5%, {elapsed:?}");
}

#[test]
fn acceptance_06_bond_stress_paper_value() {
    // literal evaluation of the printed formula with the published load:
    // 157320 / (pi * 8^2 * 75)
    let tau = bond_stress(157_320.0, 8.0, 75.0, BondArea::AsPrinted).unwrap();
    let hand = 157_320.0 / (std::f64::consts::PI * 64.0 * 75.0);
    assert!((tau - hand).abs() < 1e-12);
    assert!(
        (tau - 10.432_606_5).abs() < 1e-3,
        "tau = {tau}, hand evaluation = {hand}"
    );
    println!("acceptance 6 (bond stress paper value): PASS, tau = {tau:.6} MPa");
}

#[test]
fn acceptance_07_power_mg_composition_is_affine() {
    for (m, ln_a, n, c) in [
        (31.85, -78.0, -1.0, -5.0),
        (46.36, -110.0, -0.9, -4.0),
        (12.0, -35.0, -1.2, -6.0),
    ] {
        let mg = fit_mg(&exact_mg_points(n, c, &[1e3, 1e4, 1e5, 1e6]), MGVariant::Strain).unwrap();
        let sr_pts: Vec<StressRatePoint> = log_spaced(4.0, 12.0, 5)
            .into_iter()
            .map(|tau| StressRatePoint {
                stress: tau,
                min_creep_rate: (m * tau.ln() + ln_a).exp(),
                failed: true,
            })
            .collect();
        let law = StressRateFit::Power(
            fit_power_law(&sr_pts, StressAxis::AbsoluteMpa, RateUnit::StrainPerS).unwrap(),
        );
        let curve =
            compose_ttf(&law, &mg, &log_spaced(5.0, 11.0, 30), 1000, 5, None).unwrap();
        let x: Vec<f64> = curve.samples.iter().map(|s| s.stress.ln()).collect();
        let y: Vec<f64> = curve.samples.iter().map(|s| s.t_mean_s.ln()).collect();
        let line = ols_fit(&x, &y).unwrap();
        assert!(
            rel(line.slope, m / n) < 1e-10,
            "slope {} vs m/n = {}",
            line.slope,
            m / n
        );
        let ybar = y.iter().sum::<f64>() / y.len() as f64;
        let sst: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
        let sse = line.residual_variance * (y.len() as f64 - 2.0);
        assert!(sse / sst < 1e-10, "R^2 deficit {}", sse / sst);
    }
    println!("acceptance 7 (power + MG composition linearity): PASS, slope = m/n, R^2 = 1 within 1e-10");
}

/// The 12-specimen verification campaign: secondary rates span three
/// decades, rupture times follow a designed MG line, the tertiary
/// blow-up is sharp and late so the two-line intersection lands near the
/// true rupture time.
fn verification_campaign(noise: f64, seed: u64) -> (CampaignSpec, f64) {
    let mg_slope = -1.05;
    let mg_intercept = -4.776;
    let h_ef = 75.0;
    let specimens = (0..12)
        .map(|i| {
            let v_s = 1e-7 * 10f64.powf(3.0 * i as f64 / 11.0);
            let tr = (((v_s / h_ef).ln() - mg_intercept) / mg_slope).exp();
            let (q, u_on, p) = (3.0, 0.03_f64, 0.35);
            SpecimenSpec {
                specimen_id: format!("SYN{i:02}"),
                load_level: 0.55 + 0.35 * i as f64 / 11.0,
                elastic_offset_mm: 0.3,
                primary_coeff: 0.1 * v_s * (0.05 * tr).powf(1.0 - p) / p,
                primary_exponent: p,
                secondary_rate_mm_per_s: v_s,
                tertiary_coeff_mm: v_s * tr * u_on.powf(q + 1.0) / q,
                tertiary_exponent: q,
                rupture_time_s: tr,
                t_start_s: 0.005 * tr,
                t_end_frac: 0.998,
            }
        })
        .collect();
    (
        CampaignSpec {
            adhesive_id: "SYN".into(),
            anchor_radius_mm: 8.0,
            embedment_depth_mm: h_ef,
            pullout_reference_n: 157_320.0,
            temperature_c: 23.0,
            seed,
            noise_sigma: noise,
            n_samples: 1000,
            specimens,
        },
        mg_slope,
    )
}

#[test]
fn acceptance_08_synthetic_end_to_end() {
    let start = Instant::now();
    for (noise, rate_tol, tf_tol, label) in
        [(0.0, 0.02, 0.05, "noiseless"), (0.01, 0.10, 0.15, "noisy")]
    {
        let (spec, mg_slope_true) = verification_campaign(noise, 42);
        let (series, truths) = synth::generate_campaign(&spec).unwrap();
        let mut within = 0;
        let mut lnx = Vec::new();
        let mut lny = Vec::new();
        for (s, t) in series.iter().zip(&truths) {
            let k = kinetics::analyze(s, 3).unwrap();
            let rate_err = rel(k.min_creep_rate_disp, t.min_rate_disp_mm_per_s);
            let tf_err = rel(k.failure_time, t.rupture_time_s.unwrap());
            if rate_err < rate_tol && tf_err < tf_tol {
                within += 1;
            } else if noise == 0.0 {
                panic!(
                    "{}: rate err {:.3}%, tf err {:.3}%",
                    t.specimen_id,
                    rate_err * 100.0,
                    tf_err * 100.0
                );
            }
            lnx.push(k.failure_time.ln());
            lny.push(k.min_creep_rate_strain.ln());
        }
        let needed = (0.95 * series.len() as f64).ceil() as usize;
        assert!(
            within >= needed,
            "{label}: only {within}/12 specimens within tolerance"
        );
        let mg = ols_fit(&lnx, &lny).unwrap();
        assert!(
            rel(mg.slope, mg_slope_true) < 0.05,
            "{label}: MG slope {} vs {}",
            mg.slope,
            mg_slope_true
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!("acceptance 8 (synthetic end-to-end): PASS, 12/12 specimens both campaigns, {elapsed:?}");
}

#[test]
fn acceptance_09_case_iii_widens_low_rate_band() {
    let mut worst_ratio = f64::INFINITY;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<MGDataPoint> = (0..12)
            .map(|i| {
                let t = 10f64.powf(2.5 + 4.0 * i as f64 / 11.0);
                let z: f64 = StandardNormal.sample(&mut rng);
                MGDataPoint {
                    specimen_id: format!("S{i}"),
                    min_creep_rate: (-1.0 * t.ln() - 5.0 + 0.15 * z).exp(),
                    failure_time_s: t,
                    failure_strain: None,
                }
            })
            .collect();
        let full = fit_mg(&pts, MGVariant::Strain).unwrap();
        let split = resample_case(&pts, ResampleCase::DropLowest).unwrap();
        let refit = fit_mg(&split.retained, MGVariant::Strain).unwrap();
        let lowest_rate = split
            .excluded
            .iter()
            .map(|p| p.min_creep_rate)
            .fold(f64::INFINITY, f64::min);
        let width = |fit: &lifetime::MGFit| {
            let p = predict_failure_time(fit, lowest_rate, 0.95, IntervalKind::Prediction).unwrap();
            (p.t_hi_s / p.t_lo_s).ln()
        };
        let ratio = width(&refit) / width(&full);
        worst_ratio = worst_ratio.min(ratio);
        assert!(ratio > 1.0, "seed {seed}: ratio {ratio}");
    }
    println!("acceptance 9 (case iii widens extrapolation band): PASS over 20 trials, min ratio {worst_ratio:.3}");
}

#[test]
fn acceptance_10_nrmse_definition() {
    let pts = exact_mg_points(-1.0, (1e-2f64 * 200.0).ln(), &[100.0, 200.0, 400.0]);
    let fit = fit_mg(&pts, MGVariant::Strain).unwrap();
    let holdout = vec![
        MGDataPoint {
            specimen_id: "A".into(),
            min_creep_rate: 1e-2,
            failure_time_s: 100.0,
            failure_strain: None,
        },
        MGDataPoint {
            specimen_id: "B".into(),
            min_creep_rate: 1e-2,
            failure_time_s: 300.0,
            failure_strain: None,
        },
    ];
    let report = score_prediction(&fit, &holdout, 0.95, IntervalKind::Prediction).unwrap();
    assert!((report.rmse_s - 100.0).abs() < 1e-9, "RMSE {}", report.rmse_s);
    assert!(
        (report.nrmse.unwrap() - 0.5).abs() < 1e-12,
        "NRMSE {:?}",
        report.nrmse
    );
    println!("acceptance 10 (NRMSE definition): PASS, RMSE = 100 s, NRMSE = 0.5");
}

fn reference_fits() -> (lifetime::MGFit, StressRateFit) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mg_pts: Vec<MGDataPoint> = log_spaced(1e3, 1e7, 8)
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let z: f64 = StandardNormal.sample(&mut rng);
            MGDataPoint {
                specimen_id: format!("S{i}"),
                min_creep_rate: (-1.0 * t.ln() - 5.0 + 0.15 * z).exp(),
                failure_time_s: t,
                failure_strain: None,
            }
        })
        .collect();
    let mg = fit_mg(&mg_pts, MGVariant::Strain).unwrap();
    let sr_pts: Vec<StressRatePoint> = log_spaced(5.0, 11.0, 7)
        .into_iter()
        .map(|tau| {
            let z: f64 = StandardNormal.sample(&mut rng);
            StressRatePoint {
                stress: tau,
                min_creep_rate: (30.0 * tau.ln() - 75.0 + 0.2 * z).exp(),
                failed: true,
            }
        })
        .collect();
    let law = StressRateFit::Power(
        fit_power_law(&sr_pts, StressAxis::AbsoluteMpa, RateUnit::StrainPerS).unwrap(),
    );
    (mg, law)
}

#[test]
fn acceptance_11_monte_carlo_stability_and_determinism() {
    let (mg, law) = reference_fits();
    let grid = log_spaced(5.5, 10.5, 15);
    let coarse = compose_ttf(&law, &mg, &grid, 10_000, 42, None).unwrap();
    let fine = compose_ttf(&law, &mg, &grid, 100_000, 42, None).unwrap();
    let mut worst: f64 = 0.0;
    for (a, b) in coarse.samples.iter().zip(&fine.samples) {
        worst = worst.max(rel(a.t_lo_s, b.t_lo_s));
        worst = worst.max(rel(a.t_hi_s, b.t_hi_s));
    }
    assert!(worst < 0.02, "band endpoints moved {:.3}%", worst * 100.0);

    let again = compose_ttf(&law, &mg, &grid, 10_000, 42, None).unwrap();
    assert_eq!(coarse.to_csv(), again.to_csv(), "same seed must be byte-identical");
    println!("acceptance 11 (Monte-Carlo stability): PASS, max band shift {:.3}% at 1e4 vs 1e5 draws", worst * 100.0);
}

#[test]
fn acceptance_12_sustained_strength_bisection() {
    assert_eq!(SECONDS_PER_50_YEARS, 1.57788e9);
    let pullout = 10.0;
    let tau_star: f64 = 5.5;
    let (m, n, c) = (40.0, -1.0, 0.0);
    let ln_a = c + n * SECONDS_PER_50_YEARS.ln() - m * tau_star.ln();
    let mg = fit_mg(&exact_mg_points(n, c, &[1e3, 1e4, 1e5, 1e6]), MGVariant::Strain).unwrap();
    let sr_pts: Vec<StressRatePoint> = log_spaced(4.0, 12.0, 5)
        .into_iter()
        .map(|tau| StressRatePoint {
            stress: tau,
            min_creep_rate: (m * tau.ln() + ln_a).exp(),
            failed: true,
        })
        .collect();
    let law = StressRateFit::Power(
        fit_power_law(&sr_pts, StressAxis::AbsoluteMpa, RateUnit::StrainPerS).unwrap(),
    );
    let est =
        sustained_strength(&law, &mg, pullout, SECONDS_PER_50_YEARS, 1000, 7, None).unwrap();
    assert!(
        (est.load_level_mean - 0.550).abs() < 1e-4,
        "level {}",
        est.load_level_mean
    );
    println!("acceptance 12 (sustained-strength bisection): PASS, 50-year level = {:.6}", est.load_level_mean);
}

// supporting check: the synthetic verification campaign feeds the CLI
// formats end to end (manifest round trip with ground truth attached)
#[test]
fn verification_campaign_round_trips_through_ingest() {
    let (spec, _) = verification_campaign(0.0, 1);
    let (series, truths) = synth::generate_campaign(&spec).unwrap();
    assert_eq!(series.len(), 12);
    assert_eq!(truths.len(), 12);
    let dir = std::env::temp_dir().join(format!("anchorlife_acc_{}", std::process::id()));
    let manifest = anchorlife::ingest::write_campaign(&dir, &series).unwrap();
    let loaded = anchorlife::ingest::load_campaign(&manifest).unwrap();
    assert_eq!(loaded, series);
    std::fs::remove_dir_all(&dir).ok();
    let _ = SpecimenMeta::new(
        "X".into(),
        "P".into(),
        8.0,
        75.0,
        1.0,
        2.0,
        23.0,
        None,
    )
    .unwrap();
    let _ = stressrate::bond_stress(1.0, 8.0, 75.0, BondArea::LateralSurface).unwrap();
}
