use anchorlife::synth::*;

fn campaign() -> CampaignSpec {
    let mg_slope = -1.05;
    let mg_intercept = -4.776;
    let h_ef = 75.0;
    let specimens = (0..12)
        .map(|i| {
            let v_s = 1e-7 * 10f64.powf(3.0 * i as f64 / 11.0);
            let tr = (((v_s / h_ef) as f64).ln() - mg_intercept) / mg_slope;
            let tr = tr.exp();
            let (q, u_on, p) = (3.0, 0.03f64, 0.35);
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
    CampaignSpec {
        adhesive_id: "SYN".into(),
        anchor_radius_mm: 8.0,
        embedment_depth_mm: h_ef,
        pullout_reference_n: 157_320.0,
        temperature_c: 23.0,
        seed: 1,
        noise_sigma: 0.0,
        n_samples: 1000,
        specimens,
    }
}

fn main() {
    let (series, _) = generate_campaign(&campaign()).unwrap();
    let dir = std::env::temp_dir().join("anchorlife_probe_rt12");
    let manifest = anchorlife::ingest::write_campaign(&dir, &series).unwrap();
    let loaded = anchorlife::ingest::load_campaign(&manifest).unwrap();
    for (a, b) in series.iter().zip(&loaded) {
        if a != b {
            println!("specimen {} differs:", a.meta.specimen_id);
            if a.meta != b.meta {
                println!("  meta: {:?}\n  vs    {:?}", a.meta, b.meta);
            }
            if a.samples != b.samples {
                for (i, (x, y)) in a.samples.iter().zip(&b.samples).enumerate() {
                    if x != y {
                        println!("  first sample diff at {i}: {x:?} vs {y:?}");
                        break;
                    }
                }
            }
            if a.failure_displacement_mm != b.failure_displacement_mm {
                println!("  fd: {:?} vs {:?}", a.failure_displacement_mm, b.failure_displacement_mm);
            }
            break;
        }
    }
    println!("done");
    std::fs::remove_dir_all(&dir).ok();
}
