//! Quick desk-scale timing and direction probe for the directional runs.
//! Not part of the test suite.

use std::time::Instant;

use mblab_core::env::BlockWorldConfig;
use mblab_core::evolution::{
    reconstruct_lod, run_replicate, Environment, EvolutionConfig, SelectionMode,
};
use mblab_core::genome::MutationParams;
use mblab_core::rng::{derive_seed, replicate_seed, rng_from_seed};
use mblab_core::{AllowedKinds, GateKind};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let generations: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(200);
    let reps: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(2);

    for kind in [GateKind::Probabilistic, GateKind::Decomposable] {
        let cfg = EvolutionConfig {
            population_size: 100,
            generations,
            selection: SelectionMode::Tournament { size: 5 },
            mutation: MutationParams {
                max_len: 6000,
                chunk_max: 256,
                ..MutationParams::default()
            },
            seed_gates: match kind {
                GateKind::Probabilistic => (15, 0),
                GateKind::Decomposable => (0, 15),
            },
            allowed: AllowedKinds::only(kind),
            base_len: 5000,
            environment: Environment::Block(BlockWorldConfig::default()),
            master_seed: 0,
        };
        for rep in 0..reps {
            let mut c = cfg.clone();
            c.master_seed = replicate_seed(101, rep as u64);
            let t = Instant::now();
            let (_, archive) = run_replicate(&c).unwrap();
            let mut lod_rng = rng_from_seed(derive_seed(c.master_seed, u64::MAX, 0));
            let lod = reconstruct_lod(&archive, &mut lod_rng).unwrap();
            let last = lod.last().unwrap();
            let genome_len = last.genome.as_ref().map(|g| g.len()).unwrap_or(0);
            println!(
                "{kind:?} rep {rep}: {:.2}s, final norm {:.4}, gates ({}, {}), genome {}",
                t.elapsed().as_secs_f64(),
                last.score.normalized,
                last.n_prob,
                last.n_dec,
                genome_len,
            );
        }
    }
}
