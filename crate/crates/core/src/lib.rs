//! Evolvable Markov Brains with probabilistic and decomposable logic gates.
//!
//! A Markov Brain is a network of binary nodes (sensors, hidden, motors)
//! updated synchronously by genome-encoded logic gates. Conventional
//! probabilistic gates may exhibit statistical dependence between their
//! simultaneous outputs; decomposable gates are constrained so every output
//! is conditionally independent of the others given the input state. This
//! crate provides the gate algebra, the genetic encoding, three sensory-motor
//! task environments, a generational GA with line-of-descent tracking, and
//! the network/statistics analysis used to compare the two gate types.

pub mod analysis;
pub mod brain;
pub mod env;
pub mod error;
pub mod evolution;
pub mod gates;
pub mod genome;
pub mod rng;
pub mod verify;

pub use brain::{build_brain, Brain, BrainLayout, Gate, WiringGraph};
pub use env::Score;
pub use error::{Error, Result};
pub use gates::{GateKind, InputState, MarginalTable, OutputState, ProbTable};
pub use genome::{AllowedKinds, GeneDescriptor, Genome, MutationParams};
