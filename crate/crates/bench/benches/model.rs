use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use edge_energy::trace::{event_driven_energy, extract_get_phases, InterfaceRates};
use edge_energy::{compare, default_profile, idle_gap_energy, run_sweep};
use edge_energy_bench::{download_trace, period_rtt_sweep, reference_scenario};

fn analytic(c: &mut Criterion) {
    let p = default_profile();
    c.bench_function("idle_gap_energy", |b| {
        b.iter(|| {
            let mut sum = 0.0;
            for g in [50.0, 450.0, 5000.0, 20_000.0] {
                sum += idle_gap_energy(black_box(g), &p).unwrap();
            }
            sum
        })
    });
    let edge = reference_scenario(750.0);
    let cloud = edge.clone().with_rtt(300.0);
    c.bench_function("compare", |b| {
        b.iter(|| compare(black_box(&edge), black_box(&cloud), &p).unwrap())
    });
}

fn sweep(c: &mut Criterion) {
    let p = default_profile();
    let spec = period_rtt_sweep();
    c.bench_function("sweep_period_rtt", |b| {
        b.iter(|| run_sweep(black_box(&spec), &p).unwrap())
    });
}

fn traces(c: &mut Criterion) {
    let p = default_profile();
    let rates = InterfaceRates::default();
    let (events, window) = download_trace(4_000_000);
    c.bench_function("event_driven_energy_4MB", |b| {
        b.iter(|| event_driven_energy(black_box(&events), &p, window, &rates).unwrap())
    });
    c.bench_function("extract_get_phases_4MB", |b| {
        b.iter(|| extract_get_phases(black_box(&events)).unwrap())
    });
}

criterion_group!(benches, analytic, sweep, traces);
criterion_main!(benches);
