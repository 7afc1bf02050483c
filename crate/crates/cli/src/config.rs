//! Flat key=value run configuration with dotted sections, resolved into the
//! core evolution config. CLI `--set` overrides are applied on top of the
//! file; unknown keys are rejected by name.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use mblab_core::env::{BlockWorldConfig, ForageWorldConfig, PathWorldConfig};
use mblab_core::evolution::{Environment, EvolutionConfig, SelectionMode};
use mblab_core::genome::{AllowedKinds, MutationParams};
use mblab_core::GateKind;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

/// Every key the config understands, with its default. Single source of
/// truth for parsing, validation, and the manifest snapshot.
const KNOWN_KEYS: &[(&str, &str)] = &[
    ("experiment.name", "experiment"),
    ("env.id", "integration"),
    ("condition", "prob"),
    ("replicates", "10"),
    ("seed", "1"),
    ("evo.population", "100"),
    // 0 means "per-environment default" (see generations())
    ("evo.generations", "0"),
    ("evo.selection", "tournament"),
    ("evo.tournament", "5"),
    ("evo.beta", "6.0"),
    ("evo.seed_gates", "15"),
    ("genome.base_len", "5000"),
    ("mutation.point_rate", "0.005"),
    ("mutation.insert_rate", "0.05"),
    ("mutation.delete_rate", "0.02"),
    ("mutation.chunk_min", "16"),
    ("mutation.chunk_max", "512"),
    ("mutation.min_len", "1000"),
    ("mutation.max_len", "20000"),
    ("env.block.width", "16"),
    ("env.block.fall_steps", "32"),
    ("env.block.small_size", "2"),
    ("env.block.large_size", "4"),
    ("env.forage.lifetime", "400"),
    ("env.forage.initial_radius", "3"),
    ("env.forage.radius_increment", "2"),
    ("env.forage.near_threshold", "6"),
    ("env.forage.grid", "32"),
    ("env.forage.max_radius", "14"),
    ("env.forage.ceiling", "20"),
    ("env.forage.trials", "3"),
    ("env.path.length", "50"),
    ("env.path.spacing_min", "4"),
    ("env.path.spacing_max", "8"),
    ("env.path.punishment", "0"),
    ("env.path.trials", "2"),
    ("env.path.lifetime", "50"),
];

/// Per-environment generation budgets used when `evo.generations` is 0.
fn default_generations(env_id: &str) -> usize {
    match env_id {
        "integration" => 10_000,
        "foraging" => 3_000,
        _ => 5_000,
    }
}

/// A fully resolved run configuration: defaults, then file keys, then
/// overrides, with every key validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn from_sources(file: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut values: BTreeMap<String, String> = KNOWN_KEYS
            .iter()
            .map(|&(k, v)| (k.to_string(), v.to_string()))
            .collect();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    ConfigError(format!("line {}: expected key=value", lineno + 1))
                })?;
                set_known(&mut values, k.trim(), v.trim())?;
            }
        }
        for item in overrides {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("override '{item}': expected key=value")))?;
            set_known(&mut values, k.trim(), v.trim())?;
        }
        let cfg = Self { values };
        cfg.resolve()?; // validate everything up front
        Ok(cfg)
    }

    pub fn get(&self, key: &str) -> &str {
        &self.values[key]
    }

    /// All resolved key=value pairs, for the manifest snapshot.
    pub fn snapshot(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.values[key]
            .parse()
            .map_err(|_| ConfigError(format!("key {key}: cannot parse '{}'", self.values[key])))
    }

    pub fn condition(&self) -> Result<Condition> {
        match self.get("condition") {
            "prob" => Ok(Condition::Prob),
            "dec" => Ok(Condition::Dec),
            "mixed" => Ok(Condition::Mixed),
            other => Err(ConfigError(format!(
                "condition must be prob, dec, or mixed, got '{other}'"
            ))),
        }
    }

    pub fn replicates(&self) -> Result<usize> {
        self.parse("replicates")
    }

    pub fn master_seed(&self) -> Result<u64> {
        self.parse("seed")
    }

    pub fn environment(&self) -> Result<Environment> {
        match self.get("env.id") {
            "integration" => Ok(Environment::Block(BlockWorldConfig {
                width: self.parse("env.block.width")?,
                fall_steps: self.parse("env.block.fall_steps")?,
                small_size: self.parse("env.block.small_size")?,
                large_size: self.parse("env.block.large_size")?,
                ..BlockWorldConfig::default()
            })),
            "foraging" => Ok(Environment::Forage(
                ForageWorldConfig {
                    lifetime: self.parse("env.forage.lifetime")?,
                    initial_radius: self.parse("env.forage.initial_radius")?,
                    radius_increment: self.parse("env.forage.radius_increment")?,
                    near_threshold: self.parse("env.forage.near_threshold")?,
                    grid: self.parse("env.forage.grid")?,
                    max_radius: self.parse("env.forage.max_radius")?,
                    ceiling: self.parse("env.forage.ceiling")?,
                },
                self.parse("env.forage.trials")?,
            )),
            "association" => Ok(Environment::Path(PathWorldConfig {
                path_length: self.parse("env.path.length")?,
                turn_spacing: (
                    self.parse("env.path.spacing_min")?,
                    self.parse("env.path.spacing_max")?,
                ),
                punishment: self.parse("env.path.punishment")?,
                trials: self.parse("env.path.trials")?,
                lifetime: self.parse("env.path.lifetime")?,
            })),
            other => Err(ConfigError(format!(
                "env.id must be integration, foraging, or association, got '{other}'"
            ))),
        }
    }

    pub fn generations(&self) -> Result<usize> {
        let g: usize = self.parse("evo.generations")?;
        Ok(if g == 0 {
            default_generations(self.get("env.id"))
        } else {
            g
        })
    }

    fn selection(&self) -> Result<SelectionMode> {
        match self.get("evo.selection") {
            "tournament" => Ok(SelectionMode::Tournament {
                size: self.parse("evo.tournament")?,
            }),
            "roulette" => Ok(SelectionMode::ExpRoulette {
                beta: self.parse("evo.beta")?,
            }),
            other => Err(ConfigError(format!(
                "evo.selection must be tournament or roulette, got '{other}'"
            ))),
        }
    }

    fn mutation(&self) -> Result<MutationParams> {
        let params = MutationParams {
            point_rate: self.parse("mutation.point_rate")?,
            insert_rate: self.parse("mutation.insert_rate")?,
            delete_rate: self.parse("mutation.delete_rate")?,
            chunk_min: self.parse("mutation.chunk_min")?,
            chunk_max: self.parse("mutation.chunk_max")?,
            min_len: self.parse("mutation.min_len")?,
            max_len: self.parse("mutation.max_len")?,
        };
        params
            .validate()
            .map_err(|e| ConfigError(format!("mutation parameters: {e}")))?;
        Ok(params)
    }

    /// The core config for one replicate; the caller fills in the
    /// per-replicate master seed.
    pub fn resolve(&self) -> Result<EvolutionConfig> {
        let n: usize = self.parse("evo.seed_gates")?;
        let (allowed, seed_gates) = match self.condition()? {
            Condition::Prob => (AllowedKinds::only(GateKind::Probabilistic), (n, 0)),
            Condition::Dec => (AllowedKinds::only(GateKind::Decomposable), (0, n)),
            Condition::Mixed => (AllowedKinds::both(), (n, n)),
        };
        let cfg = EvolutionConfig {
            population_size: self.parse("evo.population")?,
            generations: self.generations()?,
            selection: self.selection()?,
            mutation: self.mutation()?,
            seed_gates,
            allowed,
            base_len: self.parse("genome.base_len")?,
            environment: self.environment()?,
            master_seed: 0,
        };
        cfg.validate()
            .map_err(|e| ConfigError(format!("invalid run parameters: {e}")))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Prob,
    Dec,
    Mixed,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Prob => "prob",
            Condition::Dec => "dec",
            Condition::Mixed => "mixed",
        })
    }
}

fn set_known(values: &mut BTreeMap<String, String>, key: &str, value: &str) -> Result<()> {
    if !values.contains_key(key) {
        return Err(ConfigError(format!("unknown config key '{key}'")));
    }
    values.insert(key.to_string(), value.to_string());
    Ok(())
}
