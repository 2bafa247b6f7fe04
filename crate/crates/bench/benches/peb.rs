use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ntn_peb::channel::default_tables;
use ntn_peb::estimator::{noiseless_measurements, solve, SolverOptions};
use ntn_peb::fisher::{peb, select_satellites, Fim, MeasurementKind};
use ntn_peb::geometry::{destination, geodetic_to_ecef, hex_constellation};
use ntn_peb::scenarios::{coverage_center, measurement_sets, run, ScenarioConfig, Variant};

fn bench_peb(c: &mut Criterion) {
    let tables = default_tables();
    let cfg = ScenarioConfig::default_for(Variant::MultiLeo);
    let center = coverage_center(&cfg).unwrap();
    let ue = geodetic_to_ecef(&center);
    let sets = measurement_sets(&cfg, tables, &ue, 0, None).unwrap();
    c.bench_function("peb_multi_leo_one_ue", |b| {
        b.iter(|| {
            let f: Fim = sets.iter().map(|s| Fim::for_set(black_box(&ue), s).unwrap()).sum();
            peb(&f)
        })
    });
}

fn bench_selection(c: &mut Criterion) {
    let cfg = ScenarioConfig::default_for(Variant::MultiLeo);
    let center = coverage_center(&cfg).unwrap();
    let visible = hex_constellation(
        &center,
        cfg.hex_lon_gap_deg.to_radians(),
        cfg.hex_lat_gap_deg.to_radians(),
        cfg.leo_altitude_m,
    )
    .unwrap();
    let ue = geodetic_to_ecef(&center);
    c.bench_function("select_4_of_7", |b| {
        b.iter(|| select_satellites(&visible, 4, black_box(&ue), MeasurementKind::Tdoa).unwrap())
    });
}

fn bench_solve(c: &mut Criterion) {
    let tables = default_tables();
    let cfg = ScenarioConfig::default_for(Variant::MultiLeo);
    let truth = coverage_center(&cfg).unwrap();
    let sets = measurement_sets(&cfg, tables, &geodetic_to_ecef(&truth), 0, None).unwrap();
    let m = noiseless_measurements(&truth, &sets);
    let initial = destination(&truth, 5000.0 / 6_371_000.0, 0.0, truth.altitude);
    let opts = SolverOptions::default();
    c.bench_function("solve_multi_leo_from_5km", |b| {
        b.iter(|| solve(black_box(&m), &initial, &opts).unwrap())
    });
}

fn bench_scenario(c: &mut Criterion) {
    let tables = default_tables();
    let cfg = ScenarioConfig {
        n_ue_drops: 100,
        ..ScenarioConfig::default_for(Variant::SingleLeo)
    };
    let mut group = c.benchmark_group("scenario");
    group.sample_size(10);
    group.bench_function("single_leo_100_drops", |b| b.iter(|| run(&cfg, tables).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_peb, bench_selection, bench_solve, bench_scenario);
criterion_main!(benches);
