//! Replicate fan-out and artifact writing for `evolve`/`compete`.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use mblab_core::evolution::{reconstruct_lod, run_replicate, EvolutionConfig};
use mblab_core::rng::{derive_seed, replicate_seed, rng_from_seed, REPLICATE_SEED_STRIDE};

use crate::config::RunConfig;
use crate::csvio::{write_csv, LodRecord};

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    environment: &'a str,
    condition: String,
    replicates: usize,
    master_seed: u64,
    replicate_seed_stride: String,
    tool_version: &'a str,
    config: &'a std::collections::BTreeMap<String, String>,
}

struct ReplicateOutput {
    records: Vec<LodRecord>,
    final_hex: String,
}

fn run_one(template: &EvolutionConfig, master_seed: u64, replicate: usize) -> ReplicateOutput {
    let mut cfg = template.clone();
    cfg.master_seed = replicate_seed(master_seed, replicate as u64);
    let (_, archive) = run_replicate(&cfg).expect("config validated before fan-out");
    let mut lod_rng = rng_from_seed(derive_seed(cfg.master_seed, u64::MAX, 0));
    let lod = reconstruct_lod(&archive, &mut lod_rng).expect("fresh archive");
    let records = lod
        .iter()
        .map(|node| LodRecord {
            replicate,
            generation: node.generation,
            raw_score: node.score.raw,
            normalized_score: node.score.normalized,
            n_gates_prob: node.n_prob,
            n_gates_dec: node.n_dec,
            gamma: node.gamma,
            diameter: node.diameter,
        })
        .collect();
    let final_hex = lod
        .last()
        .and_then(|n| n.genome.as_ref())
        .map(|g| g.bytes().iter().map(|b| format!("{b:02x}")).collect())
        .expect("final organism genome is retained");
    ReplicateOutput { records, final_hex }
}

/// Runs all replicates across `workers` threads and writes manifest.json,
/// lod.csv, and per-replicate final-genome hex files. Replicate seeds are
/// derived by counter, and results are ordered by replicate index before
/// writing, so output is identical for any worker count.
pub fn evolve(cfg: &RunConfig, out_dir: &Path, workers: usize) -> Result<(), String> {
    let template = cfg.resolve().map_err(|e| e.to_string())?;
    let replicates = cfg.replicates().map_err(|e| e.to_string())?;
    let master_seed = cfg.master_seed().map_err(|e| e.to_string())?;
    if replicates == 0 {
        return Err("replicates must be >= 1".into());
    }
    fs::create_dir_all(out_dir).map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;

    let results: Mutex<Vec<Option<ReplicateOutput>>> =
        Mutex::new((0..replicates).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = workers.clamp(1, replicates);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let rep = next.fetch_add(1, Ordering::Relaxed);
                if rep >= replicates {
                    break;
                }
                let out = run_one(&template, master_seed, rep);
                results.lock().unwrap()[rep] = Some(out);
            });
        }
    });
    let results: Vec<ReplicateOutput> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every replicate index was claimed"))
        .collect();

    let manifest = Manifest {
        experiment: cfg.get("experiment.name"),
        environment: cfg.get("env.id"),
        condition: cfg.condition().map_err(|e| e.to_string())?.to_string(),
        replicates,
        master_seed,
        replicate_seed_stride: format!("{REPLICATE_SEED_STRIDE:#018x}"),
        tool_version: env!("CARGO_PKG_VERSION"),
        config: cfg.snapshot(),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("serializable");
    fs::write(out_dir.join("manifest.json"), manifest_json + "\n")
        .map_err(|e| format!("write manifest.json: {e}"))?;

    let all_records: Vec<LodRecord> = results.iter().flat_map(|r| r.records.clone()).collect();
    fs::write(out_dir.join("lod.csv"), write_csv(&all_records))
        .map_err(|e| format!("write lod.csv: {e}"))?;

    for (rep, out) in results.iter().enumerate() {
        fs::write(
            out_dir.join(format!("replicate_{rep}_final.hex")),
            format!("{}\n", out.final_hex),
        )
        .map_err(|e| format!("write replicate_{rep}_final.hex: {e}"))?;
    }
    Ok(())
}
