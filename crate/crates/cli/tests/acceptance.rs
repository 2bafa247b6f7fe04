//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::time::{Duration, Instant};

use clap::Parser;
use ntn_peb::channel::{default_tables, free_space_path_loss};
use ntn_peb::estimator::{
    default_validation_ue, horizontal_error, noiseless_measurements, solve, validate, EstimatorError, SolverOptions,
    ValidationRequest,
};
use ntn_peb::fisher::{jacobian, peb, toa_range_sigma, Fim, MeasurementSet};
use ntn_peb::geometry::{
    geodetic_to_ecef, AnchorSet, EcefVector, Geodetic, LocalFrame, OrbitSpec, SatelliteRole, SatelliteState,
    EARTH_RADIUS_M,
};
use ntn_peb::scenarios::reference::{
    within_band, GNSS_LEO_MEAN_PEB_M, GNSS_ONLY_MEAN_PEB_M, MULTI_LEO_MEAN_PEB_M, SINGLE_LEO_MEAN_PEB_M,
};
use ntn_peb::scenarios::{
    coverage_center, figure_configs, measurement_sets, run, CaseResult, ScenarioConfig, Variant,
};
use ntn_peb_cli::{execute, Cli};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn single_worker<T: Send>(f: impl FnOnce() -> T + Send) -> (T, Duration) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let t = Instant::now();
    let out = pool.install(f);
    (out, t.elapsed())
}

fn means(cases: &[CaseResult]) -> Vec<f64> {
    cases.iter().map(|c| c.mean().unwrap_or(f64::NAN)).collect()
}

fn fmt(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.2}")).collect();
    format!("[{}]", parts.join(", "))
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn config(variant: Variant) -> ScenarioConfig {
    figure_configs(&ScenarioConfig::default_for(Variant::SingleLeo))
        .into_iter()
        .find(|c| c.variant == variant)
        .unwrap()
}

fn single_leo_t10_mean() -> f64 {
    let cfg = ScenarioConfig {
        measurement_times_s: vec![10.0],
        ..config(Variant::SingleLeo)
    };
    run(&cfg, default_tables()).unwrap().cases[0].mean().unwrap()
}

fn criterion_1() -> Outcome {
    let cfg = config(Variant::SingleLeo);
    let (bundle, elapsed) = single_worker(|| run(&cfg, default_tables()).unwrap());
    let m = means(&bundle.cases);
    let banded = m.iter().zip(SINGLE_LEO_MEAN_PEB_M).all(|(s, p)| within_band(*s, p));
    let skewed = bundle
        .cases
        .iter()
        .all(|c| c.stats.as_ref().is_some_and(|s| s.mean > s.median));
    let fast = elapsed < Duration::from_secs(60);
    outcome(
        banded && strictly_decreasing(&m) && skewed && fast && bundle.config.n_ue_drops == 1000,
        format!(
            "means {} (band x2, decreasing {}, mean>median {}), {:.1?} single-worker",
            fmt(&m),
            strictly_decreasing(&m),
            skewed,
            elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let cfgs: Vec<ScenarioConfig> = figure_configs(&ScenarioConfig::default_for(Variant::SingleLeo))
        .into_iter()
        .filter(|c| c.variant == Variant::MultiLeo)
        .collect();
    let (cases, elapsed) = single_worker(|| {
        cfgs.iter()
            .flat_map(|c| run(c, default_tables()).unwrap().cases)
            .collect::<Vec<_>>()
    });
    let m = means(&cases);
    let banded = m.iter().zip(MULTI_LEO_MEAN_PEB_M).all(|(s, p)| within_band(*s, p));
    let single_t10 = single_leo_t10_mean();
    let order_of_magnitude = m[3] <= 0.1 * single_t10;
    let fast = elapsed < Duration::from_secs(60);
    outcome(
        banded && strictly_decreasing(&m) && order_of_magnitude && fast,
        format!(
            "means {} (band x2, ordered {}), 4-TDOA+RTT / single-LEO T=10 = {:.3}, {:.1?} single-worker",
            fmt(&m),
            strictly_decreasing(&m),
            m[3] / single_t10,
            elapsed
        ),
    )
}

fn criterion_3() -> Outcome {
    let hybrid_cfg = config(Variant::GnssLeo);
    let only_cfg = config(Variant::GnssOnly);
    let ((hybrid, only), elapsed) = single_worker(|| {
        (
            run(&hybrid_cfg, default_tables()).unwrap().cases,
            run(&only_cfg, default_tables()).unwrap().cases,
        )
    });
    let m = means(&hybrid);
    let g = only[0].mean().unwrap_or(f64::NAN);
    let banded = m.iter().zip(GNSS_LEO_MEAN_PEB_M).all(|(s, p)| within_band(*s, p))
        && within_band(g, GNSS_ONLY_MEAN_PEB_M);
    let gnss_better = m.iter().all(|h| g < *h);
    let fast = elapsed < Duration::from_secs(60);
    outcome(
        banded && strictly_decreasing(&m) && gnss_better && fast,
        format!(
            "hybrid means {} gnss-only {:.2} (band x2, decreasing {}, gnss-only lower {}), {:.1?} single-worker",
            fmt(&m),
            g,
            strictly_decreasing(&m),
            gnss_better,
            elapsed
        ),
    )
}

fn random_anchors(ue: &EcefVector, rng: &mut ChaCha8Rng) -> AnchorSet {
    let frame = LocalFrame::at_ecef(ue);
    let n = rng.gen_range(3..7);
    let states = (0..n)
        .map(|_| {
            let el: f64 = rng.gen_range(10f64..85.0).to_radians();
            let az: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = EARTH_RADIUS_M + rng.gen_range(400e3..21_000e3);
            let dir = frame.east * (el.cos() * az.sin()) + frame.north * (el.cos() * az.cos()) + frame.up * el.sin();
            let b = ue.dot(&dir);
            let range = -b + (b * b - (ue.dot(ue) - r * r)).sqrt();
            SatelliteState {
                position: *ue + dir * range,
                velocity: EcefVector::ZERO,
                time: 0.0,
                role: SatelliteRole::NeighborLeo,
            }
        })
        .collect();
    AnchorSet::new(states, 0).unwrap()
}

fn random_ue(rng: &mut ChaCha8Rng) -> EcefVector {
    geodetic_to_ecef(&Geodetic::from_degrees(rng.gen_range(-85.0..85.0), rng.gen_range(-180.0..180.0), 0.0).unwrap())
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let ue = random_ue(&mut rng);
        let anchors = random_anchors(&ue, &mut rng);
        let n = anchors.len();
        let set = if i % 2 == 0 {
            MeasurementSet::rtt(anchors, vec![1.0; n], vec![1.0; n]).unwrap()
        } else {
            MeasurementSet::tdoa(anchors, 0, vec![1.0; n], 0.0).unwrap()
        };
        let j = jacobian(&ue, &set).unwrap();
        let frame = LocalFrame::at_ecef(&ue);
        let h = 0.1;
        for (col, axis) in [frame.east, frame.north].into_iter().enumerate() {
            let plus = set.model(&(ue + axis * h));
            let minus = set.model(&(ue - axis * h));
            for r in 0..set.len() {
                let fd = (plus[r] - minus[r]) / (2.0 * h);
                let scale = j[(r, 0)].hypot(j[(r, 1)]).max(0.05);
                worst = worst.max((j[(r, col)] - fd).abs() / scale);
            }
        }
    }
    outcome(worst < 1e-6, format!("1000 geometries, worst relative error {worst:.2e} (< 1e-6)"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    let mut compared = 0;
    for _ in 0..500 {
        let ue = random_ue(&mut rng);
        let base_anchors = random_anchors(&ue, &mut rng);
        let n = base_anchors.len();
        let sig: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..100.0)).collect();
        let base = MeasurementSet::tdoa(base_anchors, 0, sig, rng.gen_range(0.0..50.0)).unwrap();
        let extra_anchors = random_anchors(&ue, &mut rng);
        let m = extra_anchors.len();
        let dl: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..100.0)).collect();
        let ul: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..100.0)).collect();
        let extra = MeasurementSet::rtt(extra_anchors, dl, ul).unwrap();
        let f = Fim::for_set(&ue, &base).unwrap();
        let before = peb(&f);
        let after = peb(&(f + Fim::for_set(&ue, &extra).unwrap()));
        match (before.peb, after.peb) {
            (Some(p0), Some(p1)) => {
                compared += 1;
                if p1 > p0 * (1.0 + 1e-12) {
                    violations += 1;
                }
            }
            (Some(_), None) => violations += 1,
            _ => {}
        }
    }
    outcome(
        violations == 0 && compared > 0,
        format!("500 pairs ({compared} non-degenerate), {violations} increases"),
    )
}

fn criterion_6() -> Outcome {
    let cfg = ScenarioConfig::default_for(Variant::SingleLeo);
    let truth = coverage_center(&cfg).unwrap();
    let ue = geodetic_to_ecef(&truth);
    // the single-LEO orbit is laid out to pass over the coverage center
    let orbit = OrbitSpec::passing_over(&truth, cfg.leo_altitude_m, cfg.leo_inclination_deg.to_radians()).unwrap();
    let on_track = ntn_peb::geometry::propagate_circular_orbit(&orbit, 0.0).position.normalize() * EARTH_RADIUS_M;
    let sets = measurement_sets(&cfg, default_tables(), &ue, 0, Some(10.0)).unwrap();
    let fim: Fim = sets.iter().map(|s| Fim::for_set(&ue, s).unwrap()).sum();
    let flagged = peb(&fim).is_degenerate();
    let solver = solve(&noiseless_measurements(&truth, &sets), &truth, &SolverOptions::default());
    let solver_flags = matches!(solver, Err(EstimatorError::DegenerateGeometry { .. }));
    outcome(
        flagged && solver_flags && on_track.distance(&ue) < 1e-3,
        format!("PEB degenerate flag {flagged}, solver degenerate-geometry error {solver_flags}"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut cfg = ScenarioConfig {
        n_active_satellites: 4,
        ..ScenarioConfig::default_for(Variant::MultiLeo)
    };
    cfg.links.processing_gain_db += 20.0;
    let noisy = validate(&cfg, default_tables(), &ValidationRequest::default()).unwrap();
    let ratio_ok = noisy.trials == 2000 && (0.95..=1.20).contains(&noisy.ratio);
    let truth = default_validation_ue(&cfg).unwrap();
    let sets = measurement_sets(&cfg, default_tables(), &geodetic_to_ecef(&truth), 0, None).unwrap();
    let guess = Geodetic::from_degrees(
        truth.latitude_deg() + (5000.0 / EARTH_RADIUS_M).to_degrees(),
        truth.longitude_deg(),
        0.0,
    )
    .unwrap();
    let exact = solve(&noiseless_measurements(&truth, &sets), &guess, &SolverOptions::default()).unwrap();
    let recovery = horizontal_error(&truth, &exact.estimate);
    let elapsed = start.elapsed();
    outcome(
        ratio_ok && exact.converged && recovery < 1e-3 && elapsed < Duration::from_secs(30),
        format!(
            "RMSE/PEB {:.4} over {} trials (in [0.95, 1.20]), noiseless recovery {:.2e} m from 5 km, {:.1?}",
            noisy.ratio, noisy.trials, recovery, elapsed
        ),
    )
}

fn criterion_8() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("config.json");
    fs::write(&cfg_path, r#"{"variant": "single-leo", "n_ue_drops": 200, "seed": 8}"#).unwrap();
    let run_with = |workers: &str, dir: &str| {
        let out = tmp.path().join(dir);
        let status = execute(&Cli::parse_from([
            "ntn-peb",
            "reproduce-figures",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--workers",
            workers,
        ]));
        (status, fs::read(out.join("samples.csv")).unwrap_or_default())
    };
    let (s1, one) = run_with("1", "one");
    let (s4, many) = run_with("4", "many");
    let identical = s1 == 0 && s4 == 0 && !one.is_empty() && one == many;
    outcome(
        identical,
        format!("samples.csv with 1 and 4 workers: {} bytes each, identical {identical}", one.len()),
    )
}

fn criterion_9() -> Outcome {
    let fspl = free_space_path_loss(600e3, 2e9);
    let sigma = toa_range_sigma(10.0, 10e6).unwrap();
    let speed = OrbitSpec::new(600e3, 0.0, 0.0, 0.0).unwrap().speed();
    let pass = (fspl - 154.0).abs() <= 0.1 && (sigma - 3.70).abs() <= 0.01 && (speed - 7560.0).abs() <= 10.0;
    outcome(
        pass,
        format!("FSPL {fspl:.3} dB, TOA sigma {sigma:.4} m, orbital speed {speed:.1} m/s"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("single-LEO sweep", criterion_1),
        ("multi-LEO cases", criterion_2),
        ("GNSS+LEO", criterion_3),
        ("Jacobian oracle", criterion_4),
        ("information monotonicity", criterion_5),
        ("degeneracy", criterion_6),
        ("CRLB achievability", criterion_7),
        ("determinism", criterion_8),
        ("closed-form spot checks", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {}: {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            name,
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
