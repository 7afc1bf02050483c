//! Generational GA with ancestry tracking and line-of-descent reconstruction.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::analysis::network_metrics;
use crate::brain::{build_brain, BrainLayout};
use crate::env::{
    eval_block_world, eval_forage, eval_path, BlockWorldConfig, ForageWorldConfig,
    PathWorldConfig, Score,
};
use crate::error::{Error, Result};
use crate::genome::{
    indel_mutate, point_mutate, seed_genome, AllowedKinds, Genome, MutationParams,
};
use crate::rng::{derive_seed, rng_from_seed};

/// One member of a population.
#[derive(Debug, Clone)]
pub struct Organism {
    pub id: u64,
    pub parent_id: Option<u64>,
    pub genome: Genome,
    pub score: Option<Score>,
}

/// Environment binding for a run.
#[derive(Debug, Clone, PartialEq)]
pub enum Environment {
    Block(BlockWorldConfig),
    Forage(ForageWorldConfig, usize),
    Path(PathWorldConfig),
}

impl Environment {
    pub fn layout(&self) -> BrainLayout {
        match self {
            Environment::Block(_) => BlockWorldConfig::layout(),
            Environment::Forage(..) => ForageWorldConfig::layout(),
            Environment::Path(_) => PathWorldConfig::layout(),
        }
    }

    /// Evaluates a brain with a dedicated evaluation seed.
    pub fn evaluate(&self, brain: &mut crate::brain::Brain, seed: u64) -> Score {
        let mut rng = rng_from_seed(seed);
        match self {
            Environment::Block(cfg) => eval_block_world(brain, cfg, &mut rng),
            Environment::Forage(cfg, n_trials) => eval_forage(brain, cfg, &mut rng, *n_trials),
            Environment::Path(cfg) => eval_path(brain, cfg, &mut rng, cfg.trials),
        }
        .expect("environment layout was checked at config time")
    }
}

/// Parent selection operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionMode {
    /// Best of `size` uniform draws with replacement; ties broken uniformly.
    Tournament { size: usize },
    /// Roulette over exp(beta * normalized score); sensitivity-check mode.
    ExpRoulette { beta: f64 },
}

#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub generations: usize,
    pub selection: SelectionMode,
    pub mutation: MutationParams,
    /// Gene templates written into each founder genome: (probabilistic,
    /// decomposable).
    pub seed_gates: (usize, usize),
    pub allowed: AllowedKinds,
    pub base_len: usize,
    pub environment: Environment,
    pub master_seed: u64,
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidParams("population_size must be >= 2".into()));
        }
        if self.generations < 1 {
            return Err(Error::InvalidParams("generations must be >= 1".into()));
        }
        if let SelectionMode::Tournament { size } = self.selection {
            if size == 0 {
                return Err(Error::InvalidParams("tournament size must be >= 1".into()));
            }
        }
        self.mutation.validate()
    }
}

/// Archived per-organism record. Genomes are kept only while the organism has
/// living descendants (or is itself alive), so memory stays linear in
/// generations; the scalar columns are kept for every organism ever born.
#[derive(Debug, Clone)]
pub struct ArchiveNode {
    pub id: u64,
    pub parent_id: Option<u64>,
    pub generation: usize,
    pub score: Score,
    pub n_prob: usize,
    pub n_dec: usize,
    pub gamma: f64,
    pub diameter: usize,
    pub genome: Option<Genome>,
    refs: u32,
}

/// Complete ancestry of one replicate. Node ids are dense indices.
#[derive(Debug, Clone)]
pub struct Archive {
    nodes: Vec<ArchiveNode>,
    pub generations: usize,
    pub final_ids: Vec<u64>,
}

impl Archive {
    pub fn node(&self, id: u64) -> Option<&ArchiveNode> {
        self.nodes.get(id as usize)
    }

    pub fn nodes(&self) -> &[ArchiveNode] {
        &self.nodes
    }

    /// Per-generation mean gate counts `(probabilistic, decomposable)` over
    /// the whole population.
    pub fn mean_gate_counts(&self) -> Vec<(f64, f64)> {
        let mut sums = vec![(0.0, 0.0, 0usize); self.generations + 1];
        for n in &self.nodes {
            let s = &mut sums[n.generation];
            s.0 += n.n_prob as f64;
            s.1 += n.n_dec as f64;
            s.2 += 1;
        }
        sums.into_iter()
            .map(|(p, d, c)| (p / c as f64, d / c as f64))
            .collect()
    }
}

/// One entry on a line of descent, oldest first.
pub type LineOfDescent = Vec<ArchiveNode>;

struct Lineage {
    nodes: Vec<ArchiveNode>,
}

impl Lineage {
    fn add(&mut self, parent_id: Option<u64>, generation: usize, genome: Genome) -> u64 {
        let id = self.nodes.len() as u64;
        if let Some(p) = parent_id {
            self.nodes[p as usize].refs += 1;
        }
        self.nodes.push(ArchiveNode {
            id,
            parent_id,
            generation,
            score: Score { raw: 0.0, normalized: 0.0 },
            n_prob: 0,
            n_dec: 0,
            gamma: 0.0,
            diameter: 0,
            genome: Some(genome),
            refs: 1, // the live organism itself
        });
        id
    }

    /// Drops the live reference of an organism that left the population,
    /// pruning genomes of extinct branches.
    fn release(&mut self, id: u64) {
        let mut cur = Some(id);
        while let Some(i) = cur {
            let node = &mut self.nodes[i as usize];
            node.refs -= 1;
            if node.refs > 0 {
                break;
            }
            node.genome = None;
            cur = node.parent_id;
        }
    }
}

fn select_parent<'a, R: Rng>(
    population: &'a [Organism],
    mode: SelectionMode,
    rng: &mut R,
) -> &'a Organism {
    match mode {
        SelectionMode::Tournament { size } => {
            let candidates: Vec<&Organism> = (0..size)
                .map(|_| &population[rng.gen_range(0..population.len())])
                .collect();
            let best = candidates
                .iter()
                .map(|o| o.score.expect("population is evaluated").raw)
                .fold(f64::NEG_INFINITY, f64::max);
            let tied: Vec<&Organism> = candidates
                .into_iter()
                .filter(|o| o.score.unwrap().raw == best)
                .collect();
            tied.choose(rng).expect("tournament is non-empty")
        }
        SelectionMode::ExpRoulette { beta } => {
            let weights: Vec<f64> = population
                .iter()
                .map(|o| (beta * o.score.expect("population is evaluated").normalized).exp())
                .collect();
            let total: f64 = weights.iter().sum();
            let mut pick = rng.gen::<f64>() * total;
            for (o, w) in population.iter().zip(weights.iter()) {
                pick -= w;
                if pick < 0.0 {
                    return o;
                }
            }
            population.last().expect("population is non-empty")
        }
    }
}

/// Runs one replicate: seed, evaluate, select, mutate, for the configured
/// number of generations. Deterministic given the master seed; evaluation
/// seeds are derived per (generation, organism) so schedules are irrelevant.
pub fn run_replicate(cfg: &EvolutionConfig) -> Result<(Vec<Organism>, Archive)> {
    cfg.validate()?;
    let layout = cfg.environment.layout();
    let mut rng = rng_from_seed(cfg.master_seed);
    let mut lineage = Lineage { nodes: Vec::new() };

    let mut population: Vec<Organism> = (0..cfg.population_size)
        .map(|_| {
            let genome = seed_genome(
                &layout,
                cfg.seed_gates.0,
                cfg.seed_gates.1,
                cfg.base_len,
                &mut rng,
            )?;
            let id = lineage.add(None, 0, genome.clone());
            Ok(Organism {
                id,
                parent_id: None,
                genome,
                score: None,
            })
        })
        .collect::<Result<_>>()?;

    for generation in 0..=cfg.generations {
        for (i, org) in population.iter_mut().enumerate() {
            let mut brain = build_brain(&org.genome, layout, cfg.allowed);
            let eval_seed = derive_seed(cfg.master_seed, generation as u64, i as u64);
            let score = cfg.environment.evaluate(&mut brain, eval_seed);
            let metrics = network_metrics(&brain);
            let (n_prob, n_dec) = brain.gate_counts();
            org.score = Some(score);
            let node = &mut lineage.nodes[org.id as usize];
            node.score = score;
            node.n_prob = n_prob;
            node.n_dec = n_dec;
            node.gamma = metrics.gamma;
            node.diameter = metrics.diameter;
        }
        if generation == cfg.generations {
            break;
        }
        let children: Vec<Organism> = (0..cfg.population_size)
            .map(|_| {
                let parent = select_parent(&population, cfg.selection, &mut rng);
                let parent_id = parent.id;
                let genome = indel_mutate(
                    &point_mutate(&parent.genome, &cfg.mutation, &mut rng),
                    &cfg.mutation,
                    &mut rng,
                );
                let id = lineage.add(Some(parent_id), generation + 1, genome.clone());
                Organism {
                    id,
                    parent_id: Some(parent_id),
                    genome,
                    score: None,
                }
            })
            .collect();
        for old in &population {
            lineage.release(old.id);
        }
        population = children;
    }

    let final_ids = population.iter().map(|o| o.id).collect();
    Ok((
        population,
        Archive {
            nodes: lineage.nodes,
            generations: cfg.generations,
            final_ids,
        },
    ))
}

/// Same loop as [`run_replicate`] with both gate kinds enabled; per-organism
/// gate counts are archived either way, so competition analysis reads them
/// straight from the archive.
pub fn run_competition(cfg: &EvolutionConfig) -> Result<(Vec<Organism>, Archive)> {
    if cfg.allowed != AllowedKinds::both() {
        return Err(Error::InvalidParams(
            "competition runs need both gate kinds enabled".into(),
        ));
    }
    run_replicate(cfg)
}

/// Walks parent links from a uniform-random final organism back to
/// generation 0; returns the chain oldest first.
pub fn reconstruct_lod<R: Rng>(archive: &Archive, rng: &mut R) -> Result<LineOfDescent> {
    let pick = *archive
        .final_ids
        .as_slice()
        .choose(rng)
        .ok_or(Error::CorruptArchive(0))?;
    let mut chain = Vec::with_capacity(archive.generations + 1);
    let mut cur = Some(pick);
    while let Some(id) = cur {
        let node = archive.node(id).ok_or(Error::CorruptArchive(id))?.clone();
        cur = node.parent_id;
        chain.push(node);
    }
    chain.reverse();
    Ok(chain)
}

/// The organism `offset_from_end` entries before the final one.
pub fn lod_sample(lod: &LineOfDescent, offset_from_end: usize) -> Result<&ArchiveNode> {
    if offset_from_end >= lod.len() {
        return Err(Error::OffsetOutOfRange {
            offset: offset_from_end,
            len: lod.len(),
        });
    }
    Ok(&lod[lod.len() - 1 - offset_from_end])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::GateKind;

    fn small_cfg() -> EvolutionConfig {
        EvolutionConfig {
            population_size: 8,
            generations: 5,
            selection: SelectionMode::Tournament { size: 3 },
            mutation: MutationParams {
                min_len: 200,
                max_len: 2000,
                chunk_min: 4,
                chunk_max: 32,
                ..MutationParams::default()
            },
            seed_gates: (3, 0),
            allowed: AllowedKinds::only(GateKind::Probabilistic),
            base_len: 800,
            environment: Environment::Block(crate::env::BlockWorldConfig::default()),
            master_seed: 17,
        }
    }

    #[test]
    fn archive_spans_all_generations() {
        let mut cfg = small_cfg();
        cfg.generations = 1;
        cfg.population_size = 2;
        let (_, archive) = run_replicate(&cfg).unwrap();
        assert_eq!(archive.nodes().len(), 4);
        assert_eq!(archive.nodes().iter().map(|n| n.generation).max(), Some(1));
    }

    #[test]
    fn deterministic_given_master_seed() {
        let cfg = small_cfg();
        let (pop_a, arch_a) = run_replicate(&cfg).unwrap();
        let (pop_b, arch_b) = run_replicate(&cfg).unwrap();
        assert_eq!(pop_a.len(), pop_b.len());
        for (a, b) in pop_a.iter().zip(pop_b.iter()) {
            assert_eq!(a.genome, b.genome);
            assert_eq!(a.score.unwrap().raw, b.score.unwrap().raw);
        }
        for (a, b) in arch_a.nodes().iter().zip(arch_b.nodes().iter()) {
            assert_eq!((a.id, a.parent_id, a.generation), (b.id, b.parent_id, b.generation));
            assert_eq!(a.score.raw, b.score.raw);
        }
    }

    #[test]
    fn lod_length_and_links() {
        let cfg = small_cfg();
        let (_, archive) = run_replicate(&cfg).unwrap();
        let lod = reconstruct_lod(&archive, &mut crate::rng::rng_from_seed(1)).unwrap();
        assert_eq!(lod.len(), cfg.generations + 1);
        for w in lod.windows(2) {
            assert_eq!(w[1].parent_id, Some(w[0].id));
        }
        assert_eq!(lod[0].generation, 0);
        // genomes are retained along the surviving lineage
        assert!(lod.iter().all(|n| n.genome.is_some()));
    }

    #[test]
    fn lod_sample_offsets() {
        let cfg = small_cfg();
        let (_, archive) = run_replicate(&cfg).unwrap();
        let lod = reconstruct_lod(&archive, &mut crate::rng::rng_from_seed(2)).unwrap();
        assert_eq!(lod_sample(&lod, 0).unwrap().id, lod.last().unwrap().id);
        assert_eq!(lod_sample(&lod, 2).unwrap().id, lod[lod.len() - 3].id);
        assert!(matches!(
            lod_sample(&lod, lod.len()),
            Err(Error::OffsetOutOfRange { .. })
        ));
    }

    #[test]
    fn extinct_branches_lose_genomes() {
        let mut cfg = small_cfg();
        cfg.generations = 30;
        let (_, archive) = run_replicate(&cfg).unwrap();
        let with_genome = archive.nodes().iter().filter(|n| n.genome.is_some()).count();
        // surviving lineages are at most pop + coalescing ancestor chains
        assert!(with_genome < archive.nodes().len());
        assert!(with_genome <= cfg.population_size + cfg.generations * 3);
    }

    #[test]
    fn tournament_draws_with_replacement() {
        // one strictly-best organism in a population of 6: a size-6
        // tournament picks it exactly when it is drawn at least once, which
        // has probability 1 - (5/6)^6 under sampling with replacement
        // (without replacement the frequency would be 1)
        let pop: Vec<Organism> = (0..6)
            .map(|i| Organism {
                id: i,
                parent_id: None,
                genome: Genome::from_bytes(vec![0; 10]),
                score: Some(Score {
                    raw: if i == 2 { 1.0 } else { 0.0 },
                    normalized: 0.0,
                }),
            })
            .collect();
        let mut rng = crate::rng::rng_from_seed(8);
        let n = 20_000;
        let wins = (0..n)
            .filter(|_| select_parent(&pop, SelectionMode::Tournament { size: 6 }, &mut rng).id == 2)
            .count();
        let expect = 1.0 - (5.0f64 / 6.0).powi(6);
        let freq = wins as f64 / n as f64;
        // 3-sigma binomial bound is about 0.010
        assert!((freq - expect).abs() < 0.015, "freq {freq} vs {expect}");
    }

    #[test]
    fn uniform_selection_under_equal_scores() {
        // all-equal scores: child-parent distribution is uniform
        let pop: Vec<Organism> = (0..10)
            .map(|i| Organism {
                id: i,
                parent_id: None,
                genome: Genome::from_bytes(vec![0; 10]),
                score: Some(Score { raw: 1.0, normalized: 0.5 }),
            })
            .collect();
        let mut rng = crate::rng::rng_from_seed(3);
        let mut counts = [0u32; 10];
        let n = 10_000;
        for _ in 0..n {
            let p = select_parent(&pop, SelectionMode::Tournament { size: 5 }, &mut rng);
            counts[p.id as usize] += 1;
        }
        let expected = n as f64 / 10.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // df = 9; 3-sigma bound = 9 + 3 * sqrt(18)
        assert!(chi2 < 9.0 + 3.0 * 18f64.sqrt(), "chi2 = {chi2}");
    }

    #[test]
    fn competition_requires_both_kinds() {
        let cfg = small_cfg();
        assert!(run_competition(&cfg).is_err());
    }

    #[test]
    fn competition_seeds_both_kinds() {
        let mut cfg = small_cfg();
        cfg.allowed = AllowedKinds::both();
        cfg.seed_gates = (15, 15);
        cfg.base_len = 5000;
        cfg.generations = 1;
        let (_, archive) = run_competition(&cfg).unwrap();
        let (p, d) = archive.mean_gate_counts()[0];
        assert!(p >= 15.0 && d >= 15.0);
    }

    #[test]
    fn zero_mutation_keeps_counts_constant() {
        let mut cfg = small_cfg();
        cfg.allowed = AllowedKinds::both();
        cfg.seed_gates = (4, 4);
        cfg.base_len = 2000;
        cfg.generations = 4;
        cfg.mutation.point_rate = 0.0;
        cfg.mutation.insert_rate = 0.0;
        cfg.mutation.delete_rate = 0.0;
        cfg.population_size = 4;
        let (_, archive) = run_competition(&cfg).unwrap();
        let counts = archive.mean_gate_counts();
        // without variation the only change can come from drift between
        // founder genomes; totals per lineage are constant, and with a tiny
        // equal-scored population the mean stays within founder bounds
        let all_nodes = archive.nodes();
        for n in all_nodes {
            let founder = {
                let mut cur = n;
                while let Some(p) = cur.parent_id {
                    cur = archive.node(p).unwrap();
                }
                cur
            };
            assert_eq!((n.n_prob, n.n_dec), (founder.n_prob, founder.n_dec));
        }
        assert_eq!(counts.len(), 5);
    }
}
