use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use imcmc::maps::LeapfrogConfig;
use imcmc::samplers::hmc;
use imcmc::targets::Mog2;
use imcmc::{run_chains, run_chains_sequential, JointPoint, OnX};

fn chains(c: &mut Criterion) {
    let target = Arc::new(Mog2::default());
    let kernel = hmc(target.clone(), LeapfrogConfig::new(0.1, 10).unwrap());
    let density = OnX(target);
    let mut group = c.benchmark_group("hmc-mog2-2000-steps");
    group.sample_size(10);
    for n in [8usize, 32] {
        let inits = vec![JointPoint::new(vec![0.0, 0.0]).with_v(vec![0.0, 0.0]); n];
        group.bench_with_input(BenchmarkId::new("sequential", n), &inits, |b, inits| {
            b.iter(|| run_chains_sequential(&kernel, &density, inits, 2000, 1).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("rayon", n), &inits, |b, inits| {
            b.iter(|| run_chains(&kernel, &density, inits, 2000, 1, None).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, chains);
criterion_main!(benches);
