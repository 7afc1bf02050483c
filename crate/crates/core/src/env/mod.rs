//! Task environments mapping a brain to a scalar score.

mod block;
mod forage;
mod path;

pub use block::{
    block_trial_results, eval_block_world, BlockTrial, BlockWorldConfig, TrialSpec,
};
pub use forage::{eval_forage, ForageTrial, ForageWorldConfig};
pub use path::{eval_path, Maze, PathTrial, PathWorldConfig};

use crate::brain::BrainLayout;
use crate::error::{Error, Result};

/// Raw task score plus its fraction of the task maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub raw: f64,
    pub normalized: f64,
}

impl Score {
    pub fn new(raw: f64, maximum: f64) -> Self {
        Self {
            raw,
            normalized: (raw / maximum).clamp(0.0, 1.0),
        }
    }
}

pub(crate) fn check_layout(got: BrainLayout, want: BrainLayout) -> Result<()> {
    if got != want {
        return Err(Error::LayoutMismatch {
            got_s: got.n_sensors,
            got_h: got.n_hidden,
            got_m: got.n_motors,
            want_s: want.n_sensors,
            want_h: want.n_hidden,
            want_m: want.n_motors,
        });
    }
    Ok(())
}
