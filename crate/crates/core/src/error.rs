use thiserror::Error;

/// Errors surfaced by the core simulation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("weight {0} is negative or non-finite")]
    InvalidWeight(f64),
    #[error("expected {want} sensor bits, got {got}")]
    SensorLen { got: usize, want: usize },
    #[error("brain layout ({got_s} sensors, {got_h} hidden, {got_m} motors) does not match the environment ({want_s}, {want_h}, {want_m})")]
    LayoutMismatch {
        got_s: usize,
        got_h: usize,
        got_m: usize,
        want_s: usize,
        want_h: usize,
        want_m: usize,
    },
    #[error("could not place {0} gene templates without overlap")]
    SeedPlacement(usize),
    #[error("empty sample set")]
    EmptySamples,
    #[error("offset {offset} out of range for length {len}")]
    OffsetOutOfRange { offset: usize, len: usize },
    #[error("corrupt archive: unresolved parent id {0}")]
    CorruptArchive(u64),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
