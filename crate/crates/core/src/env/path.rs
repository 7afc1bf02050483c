//! Associative memory: follow a rewarded path through poison, learning which
//! cue symbol announces a left turn and which a right turn.
//!
//! Each trial generates a fresh turning path on a square grid, surrounded by
//! poison. The two cue symbols are re-assigned to turn directions at random
//! every trial, so the association must be learned within a lifetime and held
//! in hidden state.

use std::collections::HashMap;

use rand::Rng;

use crate::brain::{Brain, BrainLayout};
use crate::env::{check_layout, Score};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct PathWorldConfig {
    /// Path length in cells.
    pub path_length: usize,
    /// Min/max cells between consecutive turns.
    pub turn_spacing: (usize, usize),
    /// Score subtracted per step spent on poison.
    pub punishment: f64,
    /// Trials averaged per evaluation.
    pub trials: usize,
    /// Steps per trial. Kept tight relative to `path_length` so wasted or
    /// off-path steps carry a real opportunity cost.
    pub lifetime: u32,
}

impl Default for PathWorldConfig {
    fn default() -> Self {
        Self {
            path_length: 50,
            turn_spacing: (4, 8),
            punishment: 0.0,
            trials: 2,
            lifetime: 50,
        }
    }
}

impl PathWorldConfig {
    pub fn layout() -> BrainLayout {
        BrainLayout::new(4, 8, 2)
    }
}

/// The four cardinal headings; turns are one 90-degree unit.
const CARDINALS: [(i32, i32); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Cue symbols as 2-bit sensor patterns.
pub const CUE_A: u8 = 0b01;
pub const CUE_B: u8 = 0b10;

/// A generated trial maze: ordered path cells, cue cells, and the per-trial
/// symbol-to-direction assignment.
#[derive(Debug, Clone)]
pub struct Maze {
    pub cells: Vec<(i32, i32)>,
    /// Cue symbol shown on the cell just before each turn.
    pub cues: HashMap<(i32, i32), u8>,
    /// The symbol that announces a left turn this trial (the other announces
    /// right).
    pub left_symbol: u8,
    index: HashMap<(i32, i32), usize>,
}

impl Maze {
    /// Generates a non-self-intersecting turning path. Turn directions are
    /// random; a collision with already-placed cells flips the turn, and a
    /// maze that still collides is regenerated.
    pub fn generate<R: Rng>(cfg: &PathWorldConfig, rng: &mut R) -> Maze {
        'attempt: loop {
            let left_symbol = if rng.gen_bool(0.5) { CUE_A } else { CUE_B };
            let mut cells: Vec<(i32, i32)> = vec![(0, 0)];
            let mut heading = 1usize; // north
            let mut cues = HashMap::new();
            let mut seen: HashMap<(i32, i32), usize> = HashMap::new();
            seen.insert((0, 0), 0);
            let mut until_turn = rng.gen_range(cfg.turn_spacing.0..=cfg.turn_spacing.1);
            while cells.len() < cfg.path_length {
                if until_turn == 0 {
                    let mut turn_left = rng.gen_bool(0.5);
                    let next_ok = |h: usize, cells: &[(i32, i32)], seen: &HashMap<_, _>| {
                        let (dx, dy) = CARDINALS[h];
                        let last = *cells.last().unwrap();
                        !seen.contains_key(&(last.0 + dx, last.1 + dy))
                    };
                    let left_h = (heading + 1) % 4;
                    let right_h = (heading + 3) % 4;
                    if turn_left && !next_ok(left_h, &cells, &seen) {
                        turn_left = false;
                    } else if !turn_left && !next_ok(right_h, &cells, &seen) {
                        turn_left = true;
                    }
                    heading = if turn_left { left_h } else { right_h };
                    let cue_cell = cells[cells.len() - 2];
                    let symbol = if turn_left {
                        left_symbol
                    } else {
                        left_symbol ^ 0b11
                    };
                    cues.insert(cue_cell, symbol);
                    until_turn = rng.gen_range(cfg.turn_spacing.0..=cfg.turn_spacing.1);
                }
                let (dx, dy) = CARDINALS[heading];
                let last = *cells.last().unwrap();
                let next = (last.0 + dx, last.1 + dy);
                if seen.contains_key(&next) {
                    continue 'attempt;
                }
                seen.insert(next, cells.len());
                cells.push(next);
                until_turn -= 1;
            }
            return Maze {
                cells,
                cues,
                left_symbol,
                index: seen,
            };
        }
    }

    pub fn cell_index(&self, pos: (i32, i32)) -> Option<usize> {
        self.index.get(&pos).copied()
    }
}

/// One path-following episode with full world state exposed.
#[derive(Debug, Clone)]
pub struct PathTrial {
    pub maze: Maze,
    pub pos: (i32, i32),
    pub heading: usize,
    /// Index of the next path cell that earns a reward.
    pub next_target: usize,
    pub credits: u32,
    pub poison_steps: u32,
}

impl PathTrial {
    pub fn new(maze: Maze) -> Self {
        Self {
            pos: maze.cells[0],
            heading: {
                let (dx, dy) = (
                    maze.cells[1].0 - maze.cells[0].0,
                    maze.cells[1].1 - maze.cells[0].1,
                );
                CARDINALS.iter().position(|&d| d == (dx, dy)).unwrap()
            },
            maze,
            next_target: 1,
            credits: 1, // the start cell counts as visited
            poison_steps: 0,
        }
    }

    /// Sensor bits: on-path, on-poison, and the 2-bit cue pattern of the
    /// current cell (if any).
    pub fn sensor_mask(&self) -> u32 {
        let on_path = self.maze.cell_index(self.pos).is_some();
        let mut mask = 0u32;
        if on_path {
            mask |= 1 << 0;
        } else {
            mask |= 1 << 1;
        }
        if let Some(&symbol) = self.maze.cues.get(&self.pos) {
            mask |= (symbol as u32) << 2;
        }
        mask
    }

    /// Motor decode: 00 nothing, 01 left, 10 right, 11 forward.
    ///
    /// Every clock tick that ends on a poison cell counts as a poison step,
    /// so time spent off the path bleeds score until the agent recovers.
    pub fn act(&mut self, m_left: bool, m_right: bool) {
        match (m_left, m_right) {
            (true, false) => self.heading = (self.heading + 1) % 4,
            (false, true) => self.heading = (self.heading + 3) % 4,
            (true, true) => {
                let (dx, dy) = CARDINALS[self.heading];
                self.pos = (self.pos.0 + dx, self.pos.1 + dy);
            }
            (false, false) => {}
        }
        if self.maze.cell_index(self.pos).is_none() {
            self.poison_steps += 1;
        }
        if self.next_target < self.maze.cells.len() && self.pos == self.maze.cells[self.next_target]
        {
            self.credits += 1;
            self.next_target += 1;
        }
    }
}

/// Averages `n_trials` episodes: credits for path cells first visited in
/// order, minus punishment per poison step, floored at zero, normalized by
/// the path length.
pub fn eval_path<R: Rng>(
    brain: &mut Brain,
    cfg: &PathWorldConfig,
    rng: &mut R,
    n_trials: usize,
) -> Result<Score> {
    check_layout(brain.layout, PathWorldConfig::layout())?;
    let mut total = 0.0;
    for _ in 0..n_trials {
        brain.reset();
        // dedicated per-trial streams: maze layout and brain draws are
        // independent of the lifetime and of each other
        let maze_seed: u64 = rng.gen();
        let step_seed: u64 = rng.gen();
        let mut maze_rng = crate::rng::rng_from_seed(maze_seed);
        let mut step_rng = crate::rng::rng_from_seed(step_seed);
        let mut trial = PathTrial::new(Maze::generate(cfg, &mut maze_rng));
        for _ in 0..cfg.lifetime {
            let motors = brain.step_mask(trial.sensor_mask(), &mut step_rng);
            trial.act(motors & 1 != 0, motors & 2 != 0);
        }
        let raw = trial.credits as f64 - cfg.punishment * trial.poison_steps as f64;
        total += raw.max(0.0);
    }
    let raw = total / n_trials.max(1) as f64;
    Ok(Score::new(raw, cfg.path_length as f64))
}
