//! Sequential vs rayon execution on the data-parallel workloads: support
//! enumeration, the augmentation scan inside PCW, and a batch of seeds.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spca_core::enumeration::{enumerate_so_with, EnumerationOptions};
use spca_core::exec::map_range;
use spca_core::io::{pitprops, random_covariance, RandomSpec};
use spca_core::solvers::{cw_solve_with, pcw_solve, Algorithm, Init, SolverConfig};
use spca_core::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(10);
    let pit = pitprops().covariance().unwrap();
    let wide = random_covariance(RandomSpec {
        m: 30,
        n: 20,
        seed: 1,
    })
    .unwrap();
    for (name, exec) in MODES {
        let opts = EnumerationOptions {
            exec,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::new("pitprops_s4", name), &opts, |b, o| {
            b.iter(|| enumerate_so_with(&pit, 4, o).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("n20_s5", name), &opts, |b, o| {
            b.iter(|| enumerate_so_with(&wide, 5, o).unwrap())
        });
    }
    group.finish();
}

fn augmentation(c: &mut Criterion) {
    let mut group = c.benchmark_group("pcw_from_single_index");
    group.sample_size(10);
    let a = random_covariance(RandomSpec::new(500, 2)).unwrap();
    let cfg = SolverConfig::new(30).with_init(Init::Support(vec![0]));
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| cw_solve_with(&a, &cfg, Algorithm::Pcw, exec).unwrap())
        });
    }
    group.finish();
}

fn seed_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("seed_batch_n200_s20");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                map_range(exec, 8, |seed| {
                    let a = random_covariance(RandomSpec::new(200, seed as u64)).unwrap();
                    pcw_solve(&a, &SolverConfig::new(20)).unwrap().value
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, augmentation, seed_batch);
criterion_main!(benches);
