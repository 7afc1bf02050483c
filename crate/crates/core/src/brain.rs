//! Markov Brain assembly, synchronous stochastic update, wiring graph.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::{GateKind, ProbTable};
use crate::genome::{scan_genes, transcribe, AllowedKinds, Genome};

/// Node layout: sensors first, then hidden, then motors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BrainLayout {
    pub n_sensors: usize,
    pub n_hidden: usize,
    pub n_motors: usize,
}

impl BrainLayout {
    pub fn new(n_sensors: usize, n_hidden: usize, n_motors: usize) -> Self {
        let l = Self {
            n_sensors,
            n_hidden,
            n_motors,
        };
        assert!(l.total() >= 1 && l.total() <= 32, "layout must fit in 32 nodes");
        l
    }

    pub fn total(&self) -> usize {
        self.n_sensors + self.n_hidden + self.n_motors
    }

    pub fn motor_start(&self) -> usize {
        self.n_sensors + self.n_hidden
    }
}

/// A wired gate inside a brain.
#[derive(Debug, Clone)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub table: ProbTable,
    /// Per-row cumulative sums, flattened (hot-path sampling).
    cdf: Vec<f64>,
    /// For each output state, the node bitmask it ORs into the next state.
    write_masks: Vec<u32>,
}

impl Gate {
    pub fn new(
        kind: GateKind,
        inputs: Vec<usize>,
        outputs: Vec<usize>,
        table: ProbTable,
    ) -> Result<Self> {
        if inputs.len() != table.n_in() || outputs.len() != table.n_out() {
            return Err(Error::InvalidParams(
                "gate wiring does not match table arity".into(),
            ));
        }
        let n_out = table.n_out();
        let n_cols = table.n_output_states();
        let mut cdf = Vec::with_capacity(table.n_input_states() * n_cols);
        for r in 0..table.n_input_states() {
            let mut acc = 0.0;
            for &p in table.row(r) {
                acc += p;
                cdf.push(acc);
            }
        }
        let write_masks = (0..n_cols)
            .map(|state| {
                let mut mask = 0u32;
                for (i, &addr) in outputs.iter().enumerate() {
                    let bit = (state >> (n_out - 1 - i)) & 1;
                    mask |= (bit as u32) << addr;
                }
                mask
            })
            .collect();
        Ok(Self {
            kind,
            inputs,
            outputs,
            table,
            cdf,
            write_masks,
        })
    }

    /// Input state index read from a packed node-state word.
    #[inline]
    fn gather(&self, state: u32) -> usize {
        let mut idx = 0usize;
        for (k, &addr) in self.inputs.iter().enumerate() {
            idx |= (((state >> addr) & 1) as usize) << k;
        }
        idx
    }

    /// Samples an output state for `row` and returns the write mask.
    #[inline]
    fn fire<R: Rng>(&self, row: usize, rng: &mut R) -> u32 {
        let n_cols = self.write_masks.len();
        let cdf = &self.cdf[row * n_cols..(row + 1) * n_cols];
        let r: f64 = rng.gen();
        let mut state = n_cols - 1;
        for (o, &c) in cdf.iter().enumerate() {
            if r < c {
                state = o;
                break;
            }
        }
        self.write_masks[state]
    }
}

/// Directed wiring graph of a brain: an edge `(a, b)` exists when some gate
/// reads node `a` and writes node `b`. Parallel edges are collapsed,
/// self-loops dropped, and only nodes incident to an edge are vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiringGraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

/// A Markov Brain: node state plus gate list over a layout.
#[derive(Debug, Clone)]
pub struct Brain {
    pub layout: BrainLayout,
    gates: Vec<Gate>,
    state: u32,
}

impl Brain {
    pub fn new(layout: BrainLayout, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            if g.inputs.iter().chain(g.outputs.iter()).any(|&a| a >= layout.total()) {
                return Err(Error::InvalidParams(
                    "gate address outside the node layout".into(),
                ));
            }
        }
        Ok(Self {
            layout,
            gates,
            state: 0,
        })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Clears all node state (used between evaluation trials).
    pub fn reset(&mut self) {
        self.state = 0;
    }

    pub fn node(&self, i: usize) -> bool {
        (self.state >> i) & 1 == 1
    }

    /// One synchronous update with sensors packed into the low bits.
    /// Returns the motor bits (motor 0 in bit 0).
    ///
    /// All gates read the time-`t` state; sampled outputs are ORed into a
    /// zero-initialized buffer, which then becomes the time-`t+1` state, so
    /// gate evaluation order never affects the result. Gates may write sensor
    /// nodes, but those writes are inert: the environment overwrites sensors
    /// before any gate reads them again.
    pub fn step_mask<R: Rng>(&mut self, sensor_mask: u32, rng: &mut R) -> u32 {
        let sensor_bits = (1u32 << self.layout.n_sensors).wrapping_sub(1);
        let state = (self.state & !sensor_bits) | (sensor_mask & sensor_bits);
        let mut next = 0u32;
        for gate in &self.gates {
            let row = gate.gather(state);
            next |= gate.fire(row, rng);
        }
        self.state = next;
        (next >> self.layout.motor_start()) & ((1u32 << self.layout.n_motors) - 1)
    }

    /// Slice-based wrapper around [`Brain::step_mask`].
    pub fn step<R: Rng>(&mut self, sensor_bits: &[bool], rng: &mut R) -> Result<Vec<bool>> {
        if sensor_bits.len() != self.layout.n_sensors {
            return Err(Error::SensorLen {
                got: sensor_bits.len(),
                want: self.layout.n_sensors,
            });
        }
        let mut mask = 0u32;
        for (i, &b) in sensor_bits.iter().enumerate() {
            mask |= (b as u32) << i;
        }
        let motors = self.step_mask(mask, rng);
        Ok((0..self.layout.n_motors)
            .map(|i| (motors >> i) & 1 == 1)
            .collect())
    }

    /// Gate counts by kind: `(n_probabilistic, n_decomposable)`.
    pub fn gate_counts(&self) -> (usize, usize) {
        let n_prob = self
            .gates
            .iter()
            .filter(|g| g.kind == GateKind::Probabilistic)
            .count();
        (n_prob, self.gates.len() - n_prob)
    }

    pub fn wiring_graph(&self) -> WiringGraph {
        let total = self.layout.total();
        let mut adj = vec![false; total * total];
        for g in &self.gates {
            for &a in &g.inputs {
                for &b in &g.outputs {
                    if a != b {
                        adj[a * total + b] = true;
                    }
                }
            }
        }
        let mut edges = Vec::new();
        let mut incident = vec![false; total];
        for a in 0..total {
            for b in 0..total {
                if adj[a * total + b] {
                    edges.push((a, b));
                    incident[a] = true;
                    incident[b] = true;
                }
            }
        }
        let vertices = (0..total).filter(|&v| incident[v]).collect();
        WiringGraph { vertices, edges }
    }
}

/// Scans and transcribes every allowed gene into a brain with all-false state.
pub fn build_brain(genome: &Genome, layout: BrainLayout, allowed: AllowedKinds) -> Brain {
    let gates = scan_genes(genome, &layout, allowed)
        .iter()
        .map(transcribe)
        .collect();
    Brain::new(layout, gates).expect("scanned addresses are reduced mod the layout size")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::MarginalTable;
    use crate::rng::rng_from_seed;

    fn layout() -> BrainLayout {
        BrainLayout::new(4, 8, 2)
    }

    /// Deterministic 1-in-1-out gate copying `from` to `to`.
    fn identity_gate(from: usize, to: usize) -> Gate {
        let t = ProbTable::from_rows(1, 1, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        Gate::new(GateKind::Probabilistic, vec![from], vec![to], t).unwrap()
    }

    /// Gate that writes 1 to `to` regardless of `from`.
    fn const_one_gate(from: usize, to: usize) -> Gate {
        let t = ProbTable::from_rows(1, 1, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        Gate::new(GateKind::Probabilistic, vec![from], vec![to], t).unwrap()
    }

    #[test]
    fn empty_brain_steps_to_false() {
        let mut b = Brain::new(layout(), vec![]).unwrap();
        let mut rng = rng_from_seed(1);
        let motors = b.step(&[true, true, false, false], &mut rng).unwrap();
        assert_eq!(motors, vec![false, false]);
        for i in layout().n_sensors..layout().total() {
            assert!(!b.node(i));
        }
    }

    #[test]
    fn identity_gate_tracks_sensor() {
        // sensor 0 -> motor 0 (node 12)
        let mut b = Brain::new(layout(), vec![identity_gate(0, 12)]).unwrap();
        let mut rng = rng_from_seed(2);
        for &s in &[true, false, true, true, false] {
            let motors = b.step(&[s, false, false, false], &mut rng).unwrap();
            assert_eq!(motors[0], s);
        }
    }

    #[test]
    fn or_combination_of_writers() {
        let mut b = Brain::new(
            layout(),
            vec![const_one_gate(0, 12), const_one_gate(1, 12)],
        )
        .unwrap();
        let mut rng = rng_from_seed(3);
        let motors = b.step(&[false; 4], &mut rng).unwrap();
        assert!(motors[0]);
    }

    #[test]
    fn feed_forward_chain_needs_two_steps() {
        // sensor 0 -> hidden 4 -> motor 0; the signal takes two steps
        let mut b = Brain::new(
            layout(),
            vec![identity_gate(0, 4), identity_gate(4, 12)],
        )
        .unwrap();
        let mut rng = rng_from_seed(4);
        let m1 = b.step(&[true, false, false, false], &mut rng).unwrap();
        assert!(!m1[0]);
        let m2 = b.step(&[false; 4], &mut rng).unwrap();
        assert!(m2[0]);
        let m3 = b.step(&[false; 4], &mut rng).unwrap();
        assert!(!m3[0]);
    }

    #[test]
    fn sensor_writes_are_inert() {
        // a gate writes sensor 1 from sensor 0, another copies sensor 1 to
        // the motor; the environment-provided sensor value must win
        let mut b = Brain::new(
            layout(),
            vec![const_one_gate(0, 1), identity_gate(1, 12)],
        )
        .unwrap();
        let mut rng = rng_from_seed(5);
        b.step(&[false; 4], &mut rng).unwrap();
        // sensor 1 was written true internally, but the next step supplies 0
        let motors = b.step(&[false; 4], &mut rng).unwrap();
        assert!(!motors[0]);
    }

    #[test]
    fn deterministic_brain_ignores_rng() {
        let gates = vec![identity_gate(0, 4), identity_gate(4, 12)];
        let run = |seed| {
            let mut b = Brain::new(layout(), gates.clone()).unwrap();
            let mut rng = rng_from_seed(seed);
            (0..20)
                .map(|i| b.step(&[i % 3 == 0, false, false, false], &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(1), run(999));
    }

    #[test]
    fn sensor_len_checked() {
        let mut b = Brain::new(layout(), vec![]).unwrap();
        let mut rng = rng_from_seed(6);
        assert!(matches!(
            b.step(&[true], &mut rng),
            Err(Error::SensorLen { got: 1, want: 4 })
        ));
    }

    #[test]
    fn wiring_graph_rules() {
        let b = Brain::new(layout(), vec![]).unwrap();
        let g = b.wiring_graph();
        assert!(g.vertices.is_empty() && g.edges.is_empty());

        // one 2-in-2-out gate reading {0,1} writing {2,3}
        let m = MarginalTable::new(2, 2, vec![0.5; 8]).unwrap();
        let t = crate::gates::joint_from_marginals(&m);
        let gate = Gate::new(GateKind::Decomposable, vec![0, 1], vec![2, 3], t).unwrap();
        let b = Brain::new(layout(), vec![gate]).unwrap();
        let g = b.wiring_graph();
        assert_eq!(g.vertices, vec![0, 1, 2, 3]);
        assert_eq!(g.edges.len(), 4);

        // pure self-loop contributes nothing
        let gate = identity_gate(0, 0);
        let b = Brain::new(layout(), vec![gate]).unwrap();
        let g = b.wiring_graph();
        assert!(g.vertices.is_empty() && g.edges.is_empty());
    }

    #[test]
    fn build_brain_from_seeded_genome() {
        let mut rng = rng_from_seed(7);
        let genome =
            crate::genome::seed_genome(&layout(), 15, 15, 5000, &mut rng).unwrap();
        let brain = build_brain(&genome, layout(), AllowedKinds::both());
        let (p, d) = brain.gate_counts();
        assert!(p >= 15 && d >= 15);

        let empty = Genome::from_bytes(vec![0; 500]);
        let brain = build_brain(&empty, layout(), AllowedKinds::both());
        assert_eq!(brain.gate_counts(), (0, 0));
    }

    #[test]
    fn binary_state_after_step() {
        let mut rng = rng_from_seed(8);
        let genome = crate::genome::seed_genome(&layout(), 5, 5, 3000, &mut rng).unwrap();
        let mut brain = build_brain(&genome, layout(), AllowedKinds::both());
        for _ in 0..50 {
            brain.step_mask(rng.gen::<u32>() & 0xF, &mut rng);
            // u32-packed state is binary by construction; check accessors agree
            for i in 0..layout().total() {
                let _ = brain.node(i);
            }
        }
    }
}
