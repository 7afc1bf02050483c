//! Microbenchmarks for the simulation hot path: table sampling, brain
//! stepping, a full block-world evaluation, and one GA generation.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use mblab_core::env::{eval_block_world, BlockWorldConfig};
use mblab_core::evolution::{run_replicate, Environment, EvolutionConfig, SelectionMode};
use mblab_core::gates::{sample_output, InputState, ProbTable};
use mblab_core::genome::{seed_genome, AllowedKinds, MutationParams};
use mblab_core::rng::rng_from_seed;
use mblab_core::{build_brain, Brain};

fn bench_sampling(c: &mut Criterion) {
    let mut rng = rng_from_seed(1);
    let weights: Vec<f64> = (0..4 * 16).map(|i| (i % 7 + 1) as f64).collect();
    let t = ProbTable::from_weights(2, 4, &weights).unwrap();
    c.bench_function("sample_output 2in4out", |b| {
        b.iter(|| sample_output(black_box(&t), InputState(2), &mut rng))
    });
}

fn seeded_brain(seed: u64) -> Brain {
    let layout = BlockWorldConfig::layout();
    let mut rng = rng_from_seed(seed);
    let genome = seed_genome(&layout, 8, 7, 4000, &mut rng).unwrap();
    build_brain(&genome, layout, AllowedKinds::both())
}

fn bench_brain_step(c: &mut Criterion) {
    let mut brain = seeded_brain(2);
    let mut rng = rng_from_seed(3);
    c.bench_function("brain step 15 gates", |b| {
        b.iter(|| brain.step_mask(black_box(0b1010), &mut rng))
    });
}

fn bench_block_eval(c: &mut Criterion) {
    let cfg = BlockWorldConfig::default();
    let mut brain = seeded_brain(4);
    c.bench_function("block world evaluation", |b| {
        b.iter(|| {
            let mut rng = rng_from_seed(5);
            eval_block_world(&mut brain, &cfg, &mut rng).unwrap()
        })
    });
}

fn bench_generation(c: &mut Criterion) {
    let cfg = EvolutionConfig {
        population_size: 20,
        generations: 1,
        selection: SelectionMode::Tournament { size: 5 },
        mutation: MutationParams {
            max_len: 6000,
            chunk_max: 256,
            ..MutationParams::default()
        },
        seed_gates: (15, 0),
        allowed: AllowedKinds::both(),
        base_len: 5000,
        environment: Environment::Block(BlockWorldConfig::default()),
        master_seed: 6,
    };
    c.bench_function("one GA generation, population 20", |b| {
        b.iter(|| run_replicate(black_box(&cfg)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_sampling,
    bench_brain_step,
    bench_block_eval,
    bench_generation
);
criterion_main!(benches);
