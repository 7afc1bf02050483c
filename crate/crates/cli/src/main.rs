//! Batch experiment driver for the Markov Brain laboratory.

mod config;
mod csvio;
mod plot;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mblab_core::analysis::{bootstrap_ci_mean, final_distribution, mann_whitney_u, Alternative};
use mblab_core::rng::rng_from_seed;

use config::RunConfig;
use csvio::{read_csv, series_by_replicate, LodRecord};

#[derive(Parser)]
#[command(name = "mblab", version, about = "Evolve Markov Brains and analyze the results")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run replicated evolution and write lod.csv, manifest, and genomes
    Evolve(EvolveArgs),
    /// Like evolve, with both gate kinds competing in one genome
    Compete(EvolveArgs),
    /// Summaries and a Mann-Whitney U test over two lod.csv files
    Stats {
        lod_a: PathBuf,
        lod_b: PathBuf,
        /// Entries before the end of each line of descent to sample
        #[arg(long, default_value_t = 200)]
        offset: usize,
        /// Also write the report as CSV here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render an SVG from one or more lod.csv files
    Plot {
        #[arg(long, value_enum)]
        kind: PlotKind,
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Near-end sampling offset (violin only)
        #[arg(long, default_value_t = 200)]
        offset: usize,
    },
    /// Run the built-in oracle suite
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct EvolveArgs {
    /// key=value config file; defaults apply when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to $MBLAB_WORKERS, then the CPU count
    #[arg(long)]
    workers: Option<usize>,
    /// Override a config key, e.g. --set evo.generations=500
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn default_workers() -> usize {
    std::env::var("MBLAB_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

fn cmd_evolve(args: EvolveArgs, force_mixed: bool) -> Result<(), String> {
    let mut overrides = args.overrides.clone();
    if force_mixed {
        overrides.push("condition=mixed".to_string());
    }
    let cfg = RunConfig::from_sources(args.config.as_deref(), &overrides)
        .map_err(|e| e.to_string())?;
    let workers = args.workers.unwrap_or_else(default_workers);
    runner::evolve(&cfg, &args.out, workers)
}

fn load_records(path: &PathBuf) -> Result<Vec<LodRecord>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    read_csv(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_stats(
    lod_a: PathBuf,
    lod_b: PathBuf,
    offset: usize,
    out: Option<PathBuf>,
) -> Result<(), String> {
    let mut report_csv = String::from("file,n,mean,min,max,ci_lower,ci_upper\n");
    let mut finals = Vec::new();
    for path in [&lod_a, &lod_b] {
        let records = load_records(path)?;
        let series = series_by_replicate(&records, |r| r.normalized_score);
        let sample = final_distribution(&series, offset).map_err(|e| e.to_string())?;
        let mut rng = rng_from_seed(0);
        let (lo, mean, hi) =
            bootstrap_ci_mean(&sample, 1000, 0.95, &mut rng).map_err(|e| e.to_string())?;
        let min = sample.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let max = sample.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        println!(
            "{}: n={} mean={mean:.6} min={min:.6} max={max:.6} ci95=[{lo:.6}, {hi:.6}]",
            path.display(),
            sample.len()
        );
        report_csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            path.display(),
            sample.len(),
            csvio::fmt_float(mean),
            csvio::fmt_float(min),
            csvio::fmt_float(max),
            csvio::fmt_float(lo),
            csvio::fmt_float(hi),
        ));
        finals.push(sample);
    }
    let two = mann_whitney_u(&finals[0], &finals[1], Alternative::TwoSided)
        .map_err(|e| e.to_string())?;
    let greater = mann_whitney_u(&finals[0], &finals[1], Alternative::AGreater)
        .map_err(|e| e.to_string())?;
    println!(
        "Mann-Whitney U={} two-sided p={:.6} one-sided (first greater) p={:.6}",
        two.u, two.p_value, greater.p_value
    );
    report_csv.push_str(&format!(
        "test,u={},two_sided_p={},a_greater_p={},,,\n",
        csvio::fmt_float(two.u),
        csvio::fmt_float(two.p_value),
        csvio::fmt_float(greater.p_value),
    ));
    if let Some(out) = out {
        std::fs::write(&out, report_csv).map_err(|e| format!("write {}: {e}", out.display()))?;
    }
    Ok(())
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotKind {
    FitnessCurve,
    GateCounts,
    Violin,
}

fn cmd_plot(
    kind: PlotKind,
    inputs: Vec<PathBuf>,
    out: PathBuf,
    offset: usize,
) -> Result<(), String> {
    if inputs.is_empty() {
        return Err("at least one lod.csv input is required".into());
    }
    let label = |p: &PathBuf| -> String {
        p.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| p.display().to_string())
    };
    let svg = match kind {
        PlotKind::FitnessCurve => {
            let data = inputs
                .iter()
                .map(|p| {
                    let records = load_records(p)?;
                    Ok((label(p), series_by_replicate(&records, |r| r.normalized_score)))
                })
                .collect::<Result<Vec<_>, String>>()?;
            plot::fitness_curve(&data)?
        }
        PlotKind::GateCounts => {
            let data = inputs
                .iter()
                .map(|p| {
                    let records = load_records(p)?;
                    Ok((
                        label(p),
                        series_by_replicate(&records, |r| r.n_gates_prob as f64),
                        series_by_replicate(&records, |r| r.n_gates_dec as f64),
                    ))
                })
                .collect::<Result<Vec<_>, String>>()?;
            plot::gate_counts(&data)?
        }
        PlotKind::Violin => {
            let data = inputs
                .iter()
                .map(|p| {
                    let records = load_records(p)?;
                    let series = series_by_replicate(&records, |r| r.normalized_score);
                    let sample = final_distribution(&series, offset).map_err(|e| e.to_string())?;
                    Ok((label(p), sample))
                })
                .collect::<Result<Vec<_>, String>>()?;
            plot::violin(&data)?
        }
    };
    std::fs::write(&out, svg).map_err(|e| format!("write {}: {e}", out.display()))
}

fn cmd_verify(seed: u64) -> Result<(), String> {
    let outcomes = mblab_core::verify::run_all(seed);
    let mut ok = true;
    for c in &outcomes {
        println!("{}: {} ({})", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail);
        ok &= c.passed;
    }
    if ok {
        Ok(())
    } else {
        Err("one or more checks failed".into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evolve(args) => cmd_evolve(args, false),
        Command::Compete(args) => cmd_evolve(args, true),
        Command::Stats {
            lod_a,
            lod_b,
            offset,
            out,
        } => cmd_stats(lod_a, lod_b, offset, out),
        Command::Plot {
            kind,
            inputs,
            out,
            offset,
        } => cmd_plot(kind, inputs, out, offset),
        Command::Verify { seed } => cmd_verify(seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
