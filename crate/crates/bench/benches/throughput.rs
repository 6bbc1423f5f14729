use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use nomacast_core::analysis::{
    secrecy_outage_prob, unicast_outage_prob, AnalysisParams, ChebyshevRule,
};
use nomacast_core::montecarlo::{simulate, SimulationPlan, SystemSize};
use nomacast_core::LinkConfig;
use std::hint::black_box;

const REALIZATIONS: u64 = 10_000;

fn monte_carlo(c: &mut Criterion) {
    let cfg = LinkConfig::from_db(20.0, 1.0, 6.0, 2.0).unwrap();
    let sys = SystemSize::new(10, 11).unwrap();
    let mut group = c.benchmark_group("simulate");
    group.throughput(Throughput::Elements(REALIZATIONS));
    group.sample_size(20);
    for (name, plan) in [
        (
            "direct",
            SimulationPlan::direct(REALIZATIONS, 1).with_workers(1),
        ),
        (
            "full_matrix",
            SimulationPlan::full(REALIZATIONS, 1).with_workers(1),
        ),
    ] {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| simulate(black_box(&cfg), sys, &plan).unwrap())
        });
    }
    group.finish();
}

fn closed_forms(c: &mut Criterion) {
    let cfg = LinkConfig::from_db(20.0, 1.0, 6.0, 2.0).unwrap();
    let p = AnalysisParams::new(10, 11, &cfg).unwrap();
    let n20 = ChebyshevRule::new(20).unwrap();
    let n500 = ChebyshevRule::new(500).unwrap();
    c.bench_function("unicast_outage_n20", |b| {
        b.iter(|| unicast_outage_prob(black_box(&p), &n20))
    });
    c.bench_function("secrecy_outage_n500", |b| {
        b.iter(|| secrecy_outage_prob(black_box(&p), &n500).unwrap())
    });
}

criterion_group!(benches, monte_carlo, closed_forms);
criterion_main!(benches);
