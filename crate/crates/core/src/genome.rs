//! Heritable byte-string genomes: gene scanning, transcription, mutation.
//!
//! A genome is a circular string of bytes. A gene begins at a two-byte start
//! codon: `(42, 213)` for a probabilistic gate, `(46, 213)` for a decomposable
//! gate. The fixed-width header after the codon is
//!
//! ```text
//! offset +2   n_in  = 1 + (byte mod 4)
//! offset +3   n_out = 1 + (byte mod 4)
//! offset +4   four input address bytes  (first n_in used, byte mod total nodes)
//! offset +8   four output address bytes (first n_out used, byte mod total nodes)
//! offset +12  payload
//! ```
//!
//! The payload holds `2^n_in * 2^n_out` raw table weights for a probabilistic
//! gate and `2^n_in * n_out` marginal loci for a decomposable gate (one number
//! per locus). All reads wrap circularly past the genome end, so genes may
//! overlap and an indel near the tail never truncates a gene.

use rand::Rng;

use crate::brain::{BrainLayout, Gate};
use crate::error::{Error, Result};
use crate::gates::{joint_from_marginals, GateKind, MarginalTable, ProbTable};

/// Start codon for a probabilistic gene.
pub const CODON_PROBABILISTIC: [u8; 2] = [42, 213];
/// Start codon for a decomposable gene.
pub const CODON_DECOMPOSABLE: [u8; 2] = [46, 213];

/// Bytes between the start codon and the payload (sizes + addresses).
pub const HEADER_LEN: usize = 12;

/// Which gate kinds a run may transcribe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AllowedKinds {
    pub probabilistic: bool,
    pub decomposable: bool,
}

impl AllowedKinds {
    pub fn both() -> Self {
        Self {
            probabilistic: true,
            decomposable: true,
        }
    }

    pub fn only(kind: GateKind) -> Self {
        Self {
            probabilistic: kind == GateKind::Probabilistic,
            decomposable: kind == GateKind::Decomposable,
        }
    }

    pub fn contains(&self, kind: GateKind) -> bool {
        match kind {
            GateKind::Probabilistic => self.probabilistic,
            GateKind::Decomposable => self.decomposable,
        }
    }
}

/// Circular byte-string genome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genome {
    bytes: Vec<u8>,
}

impl Genome {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Self { bytes }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    /// Byte at a circular index.
    pub fn at(&self, i: usize) -> u8 {
        self.bytes[i % self.bytes.len()]
    }
}

/// Mutation operator parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MutationParams {
    /// Per-byte probability of replacement by a uniform byte.
    pub point_rate: f64,
    /// Per-genome probability of one chunk duplication.
    pub insert_rate: f64,
    /// Per-genome probability of one chunk deletion.
    pub delete_rate: f64,
    pub chunk_min: usize,
    pub chunk_max: usize,
    pub min_len: usize,
    pub max_len: usize,
}

impl Default for MutationParams {
    fn default() -> Self {
        Self {
            point_rate: 0.005,
            insert_rate: 0.05,
            delete_rate: 0.02,
            chunk_min: 16,
            chunk_max: 512,
            min_len: 1000,
            max_len: 20000,
        }
    }
}

impl MutationParams {
    pub fn validate(&self) -> Result<()> {
        let rate_ok = |r: f64| (0.0..=1.0).contains(&r);
        if !rate_ok(self.point_rate) || !rate_ok(self.insert_rate) || !rate_ok(self.delete_rate) {
            return Err(Error::InvalidParams("mutation rate outside [0,1]".into()));
        }
        if self.chunk_min == 0 || self.chunk_min > self.chunk_max {
            return Err(Error::InvalidParams("bad chunk bounds".into()));
        }
        if self.min_len == 0 || self.min_len > self.max_len {
            return Err(Error::InvalidParams("bad length clamp".into()));
        }
        Ok(())
    }
}

/// A located gene, ready for transcription.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneDescriptor {
    pub start_index: usize,
    pub gate_kind: GateKind,
    pub n_in: usize,
    pub n_out: usize,
    pub input_addrs: Vec<usize>,
    pub output_addrs: Vec<usize>,
    pub payload: Vec<u8>,
}

fn payload_len(kind: GateKind, n_in: usize, n_out: usize) -> usize {
    match kind {
        GateKind::Probabilistic => (1 << n_in) * (1 << n_out),
        GateKind::Decomposable => (1 << n_in) * n_out,
    }
}

fn codon_kind(a: u8, b: u8) -> Option<GateKind> {
    if [a, b] == CODON_PROBABILISTIC {
        Some(GateKind::Probabilistic)
    } else if [a, b] == CODON_DECOMPOSABLE {
        Some(GateKind::Decomposable)
    } else {
        None
    }
}

/// Scans the genome for start codons of the allowed kinds and decodes one
/// descriptor per occurrence. Reads wrap circularly; genes may overlap.
pub fn scan_genes(
    genome: &Genome,
    layout: &BrainLayout,
    allowed: AllowedKinds,
) -> Vec<GeneDescriptor> {
    let len = genome.len();
    let total = layout.total();
    let mut genes = Vec::new();
    for start in 0..len {
        let kind = match codon_kind(genome.at(start), genome.at(start + 1)) {
            Some(k) if allowed.contains(k) => k,
            _ => continue,
        };
        let n_in = 1 + (genome.at(start + 2) as usize % 4);
        let n_out = 1 + (genome.at(start + 3) as usize % 4);
        let input_addrs = (0..n_in)
            .map(|k| genome.at(start + 4 + k) as usize % total)
            .collect();
        let output_addrs = (0..n_out)
            .map(|k| genome.at(start + 8 + k) as usize % total)
            .collect();
        let p_len = payload_len(kind, n_in, n_out);
        let payload = (0..p_len)
            .map(|k| genome.at(start + HEADER_LEN + k))
            .collect();
        genes.push(GeneDescriptor {
            start_index: start,
            gate_kind: kind,
            n_in,
            n_out,
            input_addrs,
            output_addrs,
            payload,
        });
    }
    genes
}

/// Transcribes a gene into a wired gate. Probabilistic payload bytes are raw
/// row weights (all-zero rows fall back to uniform); decomposable payload
/// bytes are marginals `byte / 255`, from which the joint table is built by
/// the product construction, so exact 0 and 1 stay reachable.
pub fn transcribe(gene: &GeneDescriptor) -> Gate {
    let table = match gene.gate_kind {
        GateKind::Probabilistic => {
            let weights: Vec<f64> = gene.payload.iter().map(|&b| b as f64).collect();
            ProbTable::from_weights(gene.n_in, gene.n_out, &weights)
                .expect("scanned gene payload has the right shape")
        }
        GateKind::Decomposable => {
            let entries: Vec<f64> = gene.payload.iter().map(|&b| b as f64 / 255.0).collect();
            let m = MarginalTable::new(gene.n_in, gene.n_out, entries)
                .expect("scanned gene payload has the right shape");
            joint_from_marginals(&m)
        }
    };
    Gate::new(
        gene.gate_kind,
        gene.input_addrs.clone(),
        gene.output_addrs.clone(),
        table,
    )
    .expect("transcribed table is consistent with the gene header")
}

/// Replaces each byte independently with probability `point_rate`.
pub fn point_mutate<R: Rng>(genome: &Genome, params: &MutationParams, rng: &mut R) -> Genome {
    let mut bytes = genome.bytes.clone();
    if params.point_rate > 0.0 {
        for b in bytes.iter_mut() {
            if rng.gen_bool(params.point_rate) {
                *b = rng.gen();
            }
        }
    }
    Genome { bytes }
}

/// Chunk duplication / deletion. An operation that would push the length
/// outside `[min_len, max_len]` is skipped.
pub fn indel_mutate<R: Rng>(genome: &Genome, params: &MutationParams, rng: &mut R) -> Genome {
    let mut bytes = genome.bytes.clone();
    if params.insert_rate > 0.0 && rng.gen_bool(params.insert_rate) {
        let chunk = rng.gen_range(params.chunk_min..=params.chunk_max);
        if bytes.len() + chunk <= params.max_len {
            let src = rng.gen_range(0..bytes.len());
            let copy: Vec<u8> = (0..chunk).map(|k| bytes[(src + k) % bytes.len()]).collect();
            let at = rng.gen_range(0..=bytes.len());
            bytes.splice(at..at, copy);
        }
    }
    if params.delete_rate > 0.0 && rng.gen_bool(params.delete_rate) {
        let chunk = rng.gen_range(params.chunk_min..=params.chunk_max);
        if bytes.len() >= chunk + params.min_len {
            let at = rng.gen_range(0..=bytes.len() - chunk);
            bytes.drain(at..at + chunk);
        }
    }
    Genome { bytes }
}

/// Builds a uniform-random genome of `base_len` bytes with the requested gene
/// templates (start codon plus random header and payload region) written at
/// non-overlapping random offsets.
pub fn seed_genome<R: Rng>(
    layout: &BrainLayout,
    n_prob_gates: usize,
    n_dec_gates: usize,
    base_len: usize,
    rng: &mut R,
) -> Result<Genome> {
    let _ = layout; // addresses are decoded mod total at scan time
    let mut bytes: Vec<u8> = (0..base_len).map(|_| rng.gen()).collect();
    let kinds: Vec<GateKind> = std::iter::repeat_n(GateKind::Probabilistic, n_prob_gates)
        .chain(std::iter::repeat_n(GateKind::Decomposable, n_dec_gates))
        .collect();
    let mut taken: Vec<(usize, usize)> = Vec::new(); // (start, len), circular extents
    let overlaps = |taken: &[(usize, usize)], start: usize, len: usize, total: usize| {
        taken.iter().any(|&(s, l)| {
            (0..len).any(|k| {
                let pos = (start + k) % total;
                let rel = (pos + total - s) % total;
                rel < l
            })
        })
    };
    for kind in kinds {
        let n_in_byte: u8 = rng.gen();
        let n_out_byte: u8 = rng.gen();
        let n_in = 1 + (n_in_byte as usize % 4);
        let n_out = 1 + (n_out_byte as usize % 4);
        let len = HEADER_LEN + payload_len(kind, n_in, n_out);
        let mut placed = false;
        for _ in 0..1000 {
            let start = rng.gen_range(0..base_len);
            if overlaps(&taken, start, len, base_len) {
                continue;
            }
            let codon = match kind {
                GateKind::Probabilistic => CODON_PROBABILISTIC,
                GateKind::Decomposable => CODON_DECOMPOSABLE,
            };
            bytes[start] = codon[0];
            bytes[(start + 1) % base_len] = codon[1];
            bytes[(start + 2) % base_len] = n_in_byte;
            bytes[(start + 3) % base_len] = n_out_byte;
            for k in 4..len {
                bytes[(start + k) % base_len] = rng.gen();
            }
            taken.push((start, len));
            placed = true;
            break;
        }
        if !placed {
            return Err(Error::SeedPlacement(n_prob_gates + n_dec_gates));
        }
    }
    Ok(Genome { bytes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    fn layout() -> BrainLayout {
        BrainLayout::new(4, 8, 2)
    }

    #[test]
    fn scan_empty_of_codons() {
        let g = Genome::from_bytes(vec![0; 300]);
        assert!(scan_genes(&g, &layout(), AllowedKinds::both()).is_empty());
    }

    #[test]
    fn scan_decodes_header() {
        let mut bytes = vec![0u8; 300];
        bytes[10] = 42;
        bytes[11] = 213;
        // n_in byte 0 -> 1 input, n_out byte 0 -> 1 output, payload 4 bytes
        let genes = scan_genes(
            &Genome::from_bytes(bytes),
            &layout(),
            AllowedKinds::only(GateKind::Probabilistic),
        );
        assert_eq!(genes.len(), 1);
        let g = &genes[0];
        assert_eq!(g.start_index, 10);
        assert_eq!((g.n_in, g.n_out), (1, 1));
        assert_eq!(g.payload.len(), 4);
    }

    #[test]
    fn scan_filters_disallowed_codons() {
        let mut bytes = vec![0u8; 100];
        bytes[5] = 46;
        bytes[6] = 213;
        let genes = scan_genes(
            &Genome::from_bytes(bytes.clone()),
            &layout(),
            AllowedKinds::only(GateKind::Probabilistic),
        );
        assert!(genes.is_empty());
        let genes = scan_genes(
            &Genome::from_bytes(bytes),
            &layout(),
            AllowedKinds::only(GateKind::Decomposable),
        );
        assert_eq!(genes.len(), 1);
    }

    #[test]
    fn scan_wraps_circularly() {
        // codon straddling the end of the genome
        let mut bytes = vec![0u8; 50];
        bytes[49] = 42;
        bytes[0] = 213;
        let genes = scan_genes(&Genome::from_bytes(bytes), &layout(), AllowedKinds::both());
        assert_eq!(genes.len(), 1);
        assert_eq!(genes[0].start_index, 49);
    }

    #[test]
    fn transcribe_probabilistic_normalizes() {
        let mut bytes = vec![0u8; 100];
        bytes[0] = 42;
        bytes[1] = 213;
        bytes[2] = 0; // 1 in
        bytes[3] = 1; // 2 out
        // two rows of 4 weights
        bytes[12..16].copy_from_slice(&[0, 2, 2, 0]);
        bytes[16..20].copy_from_slice(&[0, 0, 0, 0]);
        let genes = scan_genes(&Genome::from_bytes(bytes), &layout(), AllowedKinds::both());
        let gate = transcribe(&genes[0]);
        assert_eq!(gate.table.row(0), &[0.0, 0.5, 0.5, 0.0]);
        assert_eq!(gate.table.row(1), &[0.25; 4]); // zero row -> uniform
    }

    #[test]
    fn transcribe_decomposable_corners() {
        let mut bytes = vec![0u8; 100];
        bytes[0] = 46;
        bytes[1] = 213;
        bytes[2] = 0; // 1 in
        bytes[3] = 0; // 1 out
        bytes[12] = 255; // P(out=1 | 0) = 1.0
        bytes[13] = 0; // P(out=1 | 1) = 0.0
        let genes = scan_genes(&Genome::from_bytes(bytes), &layout(), AllowedKinds::both());
        let gate = transcribe(&genes[0]);
        assert_eq!(gate.table.row(0), &[0.0, 1.0]);
        assert_eq!(gate.table.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn transcribe_decomposable_joint() {
        let mut bytes = vec![0u8; 100];
        bytes[0] = 46;
        bytes[1] = 213;
        bytes[2] = 0; // 1 in
        bytes[3] = 1; // 2 out
        bytes[12] = 127;
        bytes[13] = 127;
        let genes = scan_genes(&Genome::from_bytes(bytes), &layout(), AllowedKinds::both());
        let gate = transcribe(&genes[0]);
        let p = 127.0 / 255.0;
        let expect = [
            (1.0 - p) * (1.0 - p),
            (1.0 - p) * p,
            p * (1.0 - p),
            p * p,
        ];
        for (a, b) in gate.table.row(0).iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((gate.table.row(0)[0] - 0.252).abs() < 1e-3);
    }

    #[test]
    fn point_mutate_rates() {
        let g = Genome::from_bytes((0..=255).collect());
        let mut p = MutationParams::default();
        p.point_rate = 0.0;
        let mut rng = rng_from_seed(1);
        assert_eq!(point_mutate(&g, &p, &mut rng), g);

        p.point_rate = 1.0;
        let a = point_mutate(&g, &p, &mut rng_from_seed(2));
        let b = point_mutate(&g, &p, &mut rng_from_seed(2));
        assert_eq!(a, b); // determinism under a fixed seed
        assert_eq!(a.len(), g.len());
    }

    #[test]
    fn indel_respects_clamp() {
        let mut p = MutationParams::default();
        p.insert_rate = 1.0;
        p.delete_rate = 0.0;
        p.min_len = 10;
        p.max_len = 100;
        p.chunk_min = 5;
        p.chunk_max = 5;
        let g = Genome::from_bytes(vec![7; 100]);
        let out = indel_mutate(&g, &p, &mut rng_from_seed(3));
        assert_eq!(out.len(), 100); // at max_len, insertion skipped

        let g = Genome::from_bytes(vec![7; 50]);
        let out = indel_mutate(&g, &p, &mut rng_from_seed(3));
        assert_eq!(out.len(), 55);

        p.insert_rate = 0.0;
        p.delete_rate = 1.0;
        let out = indel_mutate(&g, &p, &mut rng_from_seed(4));
        assert_eq!(out.len(), 45);
    }

    #[test]
    fn indel_noop_at_zero_rates() {
        let mut p = MutationParams::default();
        p.insert_rate = 0.0;
        p.delete_rate = 0.0;
        let g = Genome::from_bytes(vec![9; 1200]);
        assert_eq!(indel_mutate(&g, &p, &mut rng_from_seed(5)), g);
    }

    #[test]
    fn seed_genome_counts() {
        let mut rng = rng_from_seed(6);
        let g = seed_genome(&layout(), 15, 0, 5000, &mut rng).unwrap();
        let genes = scan_genes(&g, &layout(), AllowedKinds::only(GateKind::Probabilistic));
        assert!(genes.len() >= 15);

        let g = seed_genome(&layout(), 15, 15, 5000, &mut rng).unwrap();
        let all = scan_genes(&g, &layout(), AllowedKinds::both());
        let n_prob = all
            .iter()
            .filter(|d| d.gate_kind == GateKind::Probabilistic)
            .count();
        let n_dec = all
            .iter()
            .filter(|d| d.gate_kind == GateKind::Decomposable)
            .count();
        assert!(n_prob >= 15 && n_dec >= 15);
    }

    #[test]
    fn seed_genome_placement_failure() {
        let mut rng = rng_from_seed(7);
        // far too small to hold 15 templates
        assert!(seed_genome(&layout(), 15, 15, 64, &mut rng).is_err());
    }

    proptest! {
        // seeded gene counts are recovered for any seed
        #[test]
        fn seeded_counts_recovered(seed in 0u64..200) {
            let mut rng = rng_from_seed(seed);
            let g = seed_genome(&layout(), 5, 5, 3000, &mut rng).unwrap();
            let all = scan_genes(&g, &layout(), AllowedKinds::both());
            let n_prob = all.iter().filter(|d| d.gate_kind == GateKind::Probabilistic).count();
            let n_dec = all.iter().filter(|d| d.gate_kind == GateKind::Decomposable).count();
            prop_assert!(n_prob >= 5 && n_dec >= 5);
        }

        // probabilistic transcription always yields normalized rows, and
        // decomposable transcription always yields decomposable tables
        #[test]
        fn transcription_invariants(seed in 0u64..200) {
            let mut rng = rng_from_seed(seed);
            let g = seed_genome(&layout(), 3, 3, 2000, &mut rng).unwrap();
            for gene in scan_genes(&g, &layout(), AllowedKinds::both()) {
                let gate = transcribe(&gene);
                for r in 0..gate.table.n_input_states() {
                    let sum: f64 = gate.table.row(r).iter().sum();
                    prop_assert!((sum - 1.0).abs() < 1e-12);
                }
                if gene.gate_kind == GateKind::Decomposable {
                    prop_assert!(crate::gates::is_decomposable(&gate.table, 1e-9));
                }
            }
        }

        // mutation never violates byte range or the length clamp
        #[test]
        fn mutation_bounds(seed in 0u64..200) {
            let params = MutationParams {
                point_rate: 0.05,
                insert_rate: 0.5,
                delete_rate: 0.5,
                chunk_min: 4,
                chunk_max: 64,
                min_len: 100,
                max_len: 400,
            };
            let mut rng = rng_from_seed(seed);
            let mut g = Genome::from_bytes(vec![1; 200]);
            for _ in 0..50 {
                g = indel_mutate(&point_mutate(&g, &params, &mut rng), &params, &mut rng);
                prop_assert!(g.len() >= params.min_len && g.len() <= params.max_len);
            }
        }
    }
}
