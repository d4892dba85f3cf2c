use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use noodle_bench::{circle_tsp, TWO_OPT};
use noodle_core::evolution::{evaluate_program, EvalSettings};
use noodle_core::grammar::{derive_grammar, map_genome, Genome, MapParams};
use noodle_core::{neighbors, parse, Limits};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_neighbors(c: &mut Criterion) {
    let program = parse(TWO_OPT).unwrap();
    let mut group = c.benchmark_group("two_opt_neighbors");
    for n in [10, 30, 60] {
        let model = circle_tsp(n);
        let start = model.seed_assignment(1).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| neighbors(black_box(&program), &model, &start, Limits::default()))
        });
    }
    group.finish();
}

fn bench_mapping(c: &mut Criterion) {
    let model = circle_tsp(6);
    let grammar = derive_grammar(&model, model.budget);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let genomes: Vec<Genome> = (0..256).map(|_| Genome::random(80, &mut rng)).collect();
    c.bench_function("map_genome_x256", |b| {
        b.iter(|| {
            genomes
                .iter()
                .filter(|g| map_genome(&grammar, g, MapParams::default()).program().is_some())
                .count()
        })
    });
}

fn bench_fitness(c: &mut Criterion) {
    let model = circle_tsp(6);
    let program = parse(TWO_OPT).unwrap();
    let samples: Vec<_> = (0..5).map(|s| model.seed_assignment(s).unwrap()).collect();
    c.bench_function("evaluate_two_opt_tsp6", |b| {
        b.iter(|| evaluate_program(black_box(&program), &model, &samples, EvalSettings::default()))
    });
}

criterion_group!(benches, bench_neighbors, bench_mapping, bench_fitness);
criterion_main!(benches);
