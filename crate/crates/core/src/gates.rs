//! Probability algebra for hidden Markov gates.
//!
//! A gate with `n_in` inputs and `n_out` outputs maps each of the `2^n_in`
//! input states to a distribution over the `2^n_out` output states. A gate is
//! *decomposable* when its outputs are conditionally independent given the
//! input state, i.e. the joint row factorizes into per-output marginals. When
//! that fails, the outputs carry shared information not explained by the
//! inputs (an instantaneous interaction between simultaneous outputs).
//!
//! Bit conventions:
//! - Input state index: input wire `k` is bit `k` (wire 0 = least significant).
//! - Output state index: for `n_out` outputs, output `i` (0-based) is bit
//!   `n_out - 1 - i`. Reading the index in binary therefore spells the output
//!   bits in order, so a 2-out row is the familiar `(P00, P01, P10, P11)`
//!   with the first subscript belonging to output 0.

use rand::Rng;

use crate::error::{Error, Result};

/// Maximum number of inputs or outputs a gate may have.
pub const MAX_WIRES: usize = 4;

/// Tolerance for tables constructed from marginals (float round-off only).
pub const CONSTRUCTED_TOL: f64 = 1e-9;

/// Tolerance for classifying arbitrary tables as decomposable.
pub const CLASSIFY_TOL: f64 = 1e-6;

/// The two heritable gate varieties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// Joint output distribution unconstrained beyond row normalization.
    Probabilistic,
    /// Outputs conditionally independent given the input state.
    Decomposable,
}

/// Index over the `2^n_in` input states of a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputState(pub usize);

/// Index over the `2^n_out` output states of a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputState(pub usize);

impl OutputState {
    /// Value of output `i` (0-based) in this state, given the gate width.
    pub fn bit(self, i: usize, n_out: usize) -> bool {
        debug_assert!(i < n_out);
        (self.0 >> (n_out - 1 - i)) & 1 == 1
    }
}

/// Full joint probability table: row `r`, column `c` is `P(O = c | I = r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable {
    n_in: usize,
    n_out: usize,
    rows: Vec<f64>, // row-major, 2^n_in rows of 2^n_out entries
}

impl ProbTable {
    pub fn from_rows(n_in: usize, n_out: usize, rows: Vec<f64>) -> Result<Self> {
        check_arity(n_in, n_out)?;
        let n_cols = 1 << n_out;
        if rows.len() != (1 << n_in) * n_cols {
            return Err(Error::InvalidParams(format!(
                "table needs {} entries, got {}",
                (1 << n_in) * n_cols,
                rows.len()
            )));
        }
        for chunk in rows.chunks(n_cols) {
            let sum: f64 = chunk.iter().sum();
            if chunk.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParams(format!(
                    "row {:?} is not a probability distribution",
                    chunk
                )));
            }
        }
        Ok(Self { n_in, n_out, rows })
    }

    /// Builds a table by normalizing each row of raw non-negative weights.
    pub fn from_weights(n_in: usize, n_out: usize, weights: &[f64]) -> Result<Self> {
        check_arity(n_in, n_out)?;
        let n_cols = 1 << n_out;
        if weights.len() != (1 << n_in) * n_cols {
            return Err(Error::InvalidParams("weight count mismatch".into()));
        }
        let mut rows = Vec::with_capacity(weights.len());
        for chunk in weights.chunks(n_cols) {
            rows.extend(normalize_row(chunk)?);
        }
        Ok(Self { n_in, n_out, rows })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn n_input_states(&self) -> usize {
        1 << self.n_in
    }

    pub fn n_output_states(&self) -> usize {
        1 << self.n_out
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let w = self.n_output_states();
        &self.rows[r * w..(r + 1) * w]
    }

    pub fn entry(&self, input: InputState, output: OutputState) -> f64 {
        self.row(input.0)[output.0]
    }
}

/// Per-output marginals: entry `(r, i)` is `P(out_i = 1 | I = r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalTable {
    n_in: usize,
    n_out: usize,
    entries: Vec<f64>, // row-major, 2^n_in rows of n_out entries
}

impl MarginalTable {
    pub fn new(n_in: usize, n_out: usize, entries: Vec<f64>) -> Result<Self> {
        check_arity(n_in, n_out)?;
        if entries.len() != (1 << n_in) * n_out {
            return Err(Error::InvalidParams(format!(
                "marginal table needs {} entries, got {}",
                (1 << n_in) * n_out,
                entries.len()
            )));
        }
        if entries.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidParams("marginal outside [0,1]".into()));
        }
        Ok(Self { n_in, n_out, entries })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    /// `P(out_i = 1 | I = r)`.
    pub fn p(&self, r: usize, i: usize) -> f64 {
        self.entries[r * self.n_out + i]
    }
}

fn check_arity(n_in: usize, n_out: usize) -> Result<()> {
    if !(1..=MAX_WIRES).contains(&n_in) || !(1..=MAX_WIRES).contains(&n_out) {
        return Err(Error::InvalidParams(format!(
            "gate arity {}x{} outside 1..={}",
            n_in, n_out, MAX_WIRES
        )));
    }
    Ok(())
}

/// Normalizes non-negative weights into a probability row. An all-zero row
/// maps to the uniform distribution.
pub fn normalize_row(raw: &[f64]) -> Result<Vec<f64>> {
    for &w in raw {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeight(w));
        }
    }
    let sum: f64 = raw.iter().sum();
    if sum == 0.0 {
        let u = 1.0 / raw.len() as f64;
        return Ok(vec![u; raw.len()]);
    }
    Ok(raw.iter().map(|&w| w / sum).collect())
}

/// Builds the joint table whose rows factorize into the given marginals:
/// the probability of output state `O` under input `r` is the product over
/// outputs of `p(r,i)` or `1 - p(r,i)` according to the bit of `O`.
pub fn joint_from_marginals(m: &MarginalTable) -> ProbTable {
    let n_rows = 1 << m.n_in;
    let n_cols = 1usize << m.n_out;
    let mut rows = Vec::with_capacity(n_rows * n_cols);
    for r in 0..n_rows {
        for o in 0..n_cols {
            let state = OutputState(o);
            let mut p = 1.0;
            for i in 0..m.n_out {
                let pi = m.p(r, i);
                p *= if state.bit(i, m.n_out) { pi } else { 1.0 - pi };
            }
            rows.push(p);
        }
    }
    ProbTable {
        n_in: m.n_in,
        n_out: m.n_out,
        rows,
    }
}

/// Marginal probability of each output being 1, per input state.
pub fn marginals_of(t: &ProbTable) -> MarginalTable {
    let mut entries = Vec::with_capacity(t.n_input_states() * t.n_out);
    for r in 0..t.n_input_states() {
        let row = t.row(r);
        for i in 0..t.n_out {
            let p: f64 = (0..t.n_output_states())
                .filter(|&o| OutputState(o).bit(i, t.n_out))
                .map(|o| row[o])
                .sum();
            entries.push(p);
        }
    }
    MarginalTable {
        n_in: t.n_in,
        n_out: t.n_out,
        entries,
    }
}

/// Whether the table's outputs are conditionally independent given the input,
/// tested by rebuilding the table from its own marginals and comparing every
/// entry within `tol`. This reconstruct-and-compare form covers any output
/// count and stays defined when some conditioning events have probability 0.
pub fn is_decomposable(t: &ProbTable, tol: f64) -> bool {
    let rebuilt = joint_from_marginals(&marginals_of(t));
    t.rows
        .iter()
        .zip(rebuilt.rows.iter())
        .all(|(a, b)| (a - b).abs() <= tol)
}

/// Splits a 2-out row `(P00, P01, P10, P11)` into per-output marginals
/// `(P_a, P_b)` when the row factorizes; `None` signals a genuine
/// instantaneous interaction, not a fault.
pub fn decompose_two_out(row: &[f64; 4]) -> Option<(f64, f64)> {
    let pa = row[2] + row[3];
    let pb = row[1] + row[3];
    let rebuilt = [
        (1.0 - pa) * (1.0 - pb),
        (1.0 - pa) * pb,
        pa * (1.0 - pb),
        pa * pb,
    ];
    let ok = row
        .iter()
        .zip(rebuilt.iter())
        .all(|(a, b)| (a - b).abs() <= CONSTRUCTED_TOL);
    ok.then_some((pa, pb))
}

/// Draws an output state from the table row selected by `input`, by inverse
/// CDF over the cumulative row sums.
pub fn sample_output<R: Rng>(t: &ProbTable, input: InputState, rng: &mut R) -> OutputState {
    let row = t.row(input.0);
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    for (o, &p) in row.iter().enumerate() {
        acc += p;
        if r < acc {
            return OutputState(o);
        }
    }
    // Cumulative round-off can leave acc fractionally below 1.0.
    OutputState(row.len() - 1)
}
