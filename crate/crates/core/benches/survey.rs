//! Parallel vs. sequential throughput of the survey engine. The parallel
//! benches exist only when the `parallel` feature is enabled (the default);
//! the sequential path is always compiled, so the two are directly
//! comparable from one run.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use depdist::stats::{exhaustive_length_stats, sampled_length_stats, survey};
use depdist::{ClassId, Executor, GenConfig};

fn executors() -> Vec<(&'static str, Executor)> {
    #[allow(unused_mut)]
    let mut execs = vec![("sequential", Executor::sequential())];
    #[cfg(feature = "parallel")]
    execs.push(("parallel", Executor::with_threads(0).unwrap()));
    execs
}

fn bench_exhaustive(c: &mut Criterion) {
    let mut group = c.benchmark_group("exhaustive_n8");
    group.sample_size(10);
    for (name, exec) in executors() {
        group.bench_function(name, |b| {
            b.iter(|| {
                let (cells, total) =
                    exhaustive_length_stats(black_box(8), &ClassId::ALL, &exec).unwrap();
                black_box((cells, total))
            })
        });
    }
    group.finish();
}

fn bench_sampled(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampled_n15_100k");
    group.sample_size(10);
    for (name, exec) in executors() {
        group.bench_function(name, |b| {
            b.iter(|| {
                black_box(sampled_length_stats(
                    black_box(15),
                    100_000,
                    7,
                    &ClassId::ALL,
                    &exec,
                ))
            })
        });
    }
    group.finish();
}

fn bench_full_survey(c: &mut Criterion) {
    let mut group = c.benchmark_group("survey_n3_12_s20k");
    group.sample_size(10);
    let cfg = GenConfig { n_min: 3, n_max: 12, n_star: 7, samples: 20_000, seed: 7 };
    for (name, exec) in executors() {
        group.bench_function(name, |b| {
            b.iter(|| black_box(survey(&cfg, &ClassId::ALL, &exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_exhaustive, bench_sampled, bench_full_survey);
criterion_main!(benches);
