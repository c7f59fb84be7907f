//! Throughput of the data-parallel hot spots.
//!
//! Bench ids carry the backend name. Compare the two backends with
//!
//!     cargo bench -p active-cc
//!     cargo bench -p active-cc --no-default-features
//!
//! and read both sets of numbers from target/criterion.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ndarray::Array2;
use rand::Rng as _;

use active_cc::coverage::{select_batch, Strategy, StrategyConfig};
use active_cc::harness::{run_repetitions, DatasetSpec, ExperimentConfig};
use active_cc::meanfield::{entropy_matrix, mean_field, MeanFieldParams};
use active_cc::par::BACKEND;
use active_cc::rng;
use active_cc::solver::{local_search_cc, SolverParams};
use active_cc::{Clustering, SimilarityState};

fn noisy_blocks(n: usize, k: usize, seed: u64) -> SimilarityState {
    let mut r = rng::seeded(seed);
    let mut s = SimilarityState::zeros(n);
    for u in 0..n {
        for v in u + 1..n {
            let truth = if u % k == v % k { 1.0 } else { -1.0 };
            let x = if r.random_bool(0.4) {
                r.random_range(-1.0..=1.0)
            } else {
                truth
            };
            s.set_prior(u, v, x).unwrap();
        }
    }
    s
}

fn random_q(n: usize, k: usize) -> Array2<f64> {
    let mut r = rng::seeded(1);
    let mut q = Array2::from_shape_fn((n, k), |_| r.random_range(0.01..1.0));
    for mut row in q.outer_iter_mut() {
        let z = row.sum();
        row /= z;
    }
    q
}

fn bench_entropy(c: &mut Criterion) {
    let q = random_q(400, 12);
    c.bench_function(&format!("entropy_matrix/n400/{BACKEND}"), |b| {
        b.iter(|| entropy_matrix(black_box(&q)))
    });
}

fn bench_solver(c: &mut Criterion) {
    let s = noisy_blocks(150, 10, 2);
    let params = SolverParams {
        restarts: 7,
        rng_seed: 3,
        ..Default::default()
    };
    c.bench_function(&format!("local_search/n150_restarts8/{BACKEND}"), |b| {
        b.iter(|| local_search_cc(black_box(&s), None, &params).unwrap())
    });
}

fn bench_meanfield(c: &mut Criterion) {
    let s = noisy_blocks(200, 10, 4);
    let params = MeanFieldParams {
        k: 12,
        ..Default::default()
    };
    c.bench_function(&format!("mean_field/n200_k12/{BACKEND}"), |b| {
        b.iter(|| mean_field(black_box(&s), &params).unwrap())
    });
}

fn bench_select(c: &mut Criterion) {
    let n = 300;
    let s = noisy_blocks(n, 10, 5);
    let clusters = Clustering::new(&(0..n).map(|u| u % 10).collect::<Vec<_>>());
    let q = random_q(n, 12);
    let cfg = StrategyConfig::new("coverage-cost-hard".parse::<Strategy>().unwrap());
    c.bench_function(&format!("select_batch/coverage-cost-hard_n300/{BACKEND}"), |b| {
        b.iter(|| {
            let mut r = rng::seeded(6);
            select_batch(&cfg, 0, &s, &clusters, Some(&q), 50, &mut r).unwrap()
        })
    });
}

fn bench_repetitions(c: &mut Criterion) {
    let cfg = ExperimentConfig {
        strategy: Strategy::Entropy,
        batch_size: 40,
        dataset: DatasetSpec::Synthetic {
            n: 40,
            k: 4,
            dim: 4,
            spread: 1.0,
            seed: Some(0),
        },
        ..Default::default()
    };
    let seeds: Vec<u64> = (0..8).collect();
    let mut group = c.benchmark_group("repetitions");
    group.sample_size(10);
    group.bench_function(format!("entropy_n40_seeds8/{BACKEND}"), |b| {
        b.iter(|| run_repetitions(black_box(&cfg), &seeds).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_entropy,
    bench_solver,
    bench_meanfield,
    bench_select,
    bench_repetitions
);
criterion_main!(benches);
