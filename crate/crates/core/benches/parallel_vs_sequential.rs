use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mcjscc::codec::{simulate_fer, CodecConfig, LinearCode, SimOptions, SnrPoint};
use mcjscc::sphere::{two_class_lower_bound_with, BoundOptions};
use mcjscc::{DiscreteSource, Execution};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn simulation(c: &mut Criterion) {
    let src = DiscreteSource::bernoulli(0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let codes = vec![
        LinearCode::random(16, 8, &mut rng).unwrap(),
        LinearCode::random(16, 12, &mut rng).unwrap(),
    ];
    let cfg = CodecConfig::new(&src, 16, codes, 1.0).unwrap();
    let points = [SnrPoint::per_symbol(2.0)];
    let mut group = c.benchmark_group("simulate_fer_2000_trials");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| simulate_fer(&cfg, &points, SimOptions::fixed(2000).with_execution(exec), 7).unwrap())
        });
    }
    group.finish();
}

fn bound(c: &mut Criterion) {
    let mut group = c.benchmark_group("two_class_bound_k40_n50");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = BoundOptions {
            execution: exec,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, &opts| {
            b.iter(|| two_class_lower_bound_with(40, 50, 0.1, 1.0, opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, simulation, bound);
criterion_main!(benches);
