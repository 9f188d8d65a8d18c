//! Benchmarks for the hot paths: containment scans, fingerprinting, and
//! the recursive prover.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use meshpat::classify::experimental_classify;
use meshpat::force::Force;
use meshpat::occurrence::{avoidance_fingerprint, contains_mesh, mesh_occurrences};
use meshpat::prover::{search_forces, shading_algorithm, SearchBudget};
use meshpat::{MeshPattern, Permutation};

fn bench_containment(c: &mut Criterion) {
    let hosts: Vec<Permutation> = Permutation::all(7);
    let pattern: MeshPattern = "213:3136".parse().unwrap();
    c.bench_function("mesh_contains_s7", |b| {
        b.iter(|| {
            let mut hits = 0usize;
            for host in &hosts {
                if contains_mesh(black_box(host), black_box(&pattern)) {
                    hits += 1;
                }
            }
            hits
        })
    });
    c.bench_function("mesh_occurrences_s7", |b| {
        let host: Permutation = "6251743".parse().unwrap();
        b.iter(|| mesh_occurrences(black_box(&host), black_box(&pattern)).len())
    });
}

fn bench_fingerprint(c: &mut Criterion) {
    let pattern: MeshPattern = "132:2740".parse().unwrap();
    c.bench_function("fingerprint_to_6", |b| {
        b.iter(|| avoidance_fingerprint(black_box(&pattern), 6))
    });
}

fn bench_classify(c: &mut Criterion) {
    let word: Permutation = "12".parse().unwrap();
    c.bench_function("experimental_classify_12", |b| {
        b.iter(|| experimental_classify(black_box(&word), 5).len())
    });
}

fn bench_prover(c: &mut Criterion) {
    let p: MeshPattern = "132:200".parse().unwrap();
    let q: MeshPattern = "132:600".parse().unwrap();
    let force: Force = "1:R".parse().unwrap();
    c.bench_function("shading_algorithm_depth2", |b| {
        b.iter(|| shading_algorithm(black_box(&p), black_box(&q), &force, 2).unwrap().is_success())
    });

    let hard_p: MeshPattern = "132:2740".parse().unwrap();
    let hard_q: MeshPattern = "132:3764".parse().unwrap();
    c.bench_function("force_search_depth2_failure", |b| {
        b.iter(|| {
            search_forces(
                black_box(&hard_p),
                black_box(&hard_q),
                SearchBudget {
                    max_depth: 2,
                    max_force_size: 2,
                },
            )
            .unwrap()
            .is_success()
        })
    });
}

criterion_group!(
    benches,
    bench_containment,
    bench_fingerprint,
    bench_classify,
    bench_prover
);
criterion_main!(benches);
