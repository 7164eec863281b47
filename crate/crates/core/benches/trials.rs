/*
Copyright 2026 The errt Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
//! Trial throughput of the benchmark harness, sequential against the
//! rayon pool.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use errt::bench::{run_initial_solution_suite, BenchConfig, EnvGroup, Execution};
use errt::planners::Variant;

fn config() -> BenchConfig {
    BenchConfig {
        master_seed: 1,
        trials: 16,
        envs: vec![EnvGroup::preset("desk2d")],
        variants: Some(vec![Variant::Rrt, Variant::Errt]),
        max_iterations: 20_000,
        write_reports: false,
        ..BenchConfig::default()
    }
}

fn trials(c: &mut Criterion) {
    let cfg = config();
    let mut group = c.benchmark_group("initial_suite_16_trials");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(run_initial_solution_suite(&cfg, None, Execution::Sequential).unwrap()))
    });
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(run_initial_solution_suite(&cfg, None, Execution::Parallel { workers: None }).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, trials);
criterion_main!(benches);
