//! Network metrics and statistics: gamma index, brain diameter, bootstrap
//! confidence intervals, Mann-Whitney U.

use std::collections::VecDeque;

use rand::Rng;

use crate::brain::{Brain, WiringGraph};
use crate::error::{Error, Result};

/// Structural summary of a brain's wiring graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkMetrics {
    pub n_gates: usize,
    /// Density of distinct directed connections relative to all ordered
    /// pairs of gate-incident nodes: `|E| / (|V| * (|V| - 1))`, 0 below two
    /// vertices. Self-loops are excluded on both sides of the ratio.
    pub gamma: f64,
    /// Longest shortest directed path over reachable ordered vertex pairs;
    /// disconnected pairs are ignored rather than counted as infinite.
    pub diameter: usize,
}

/// Gamma index and diameter of a wiring graph.
pub fn graph_metrics(graph: &WiringGraph) -> (f64, usize) {
    let v = graph.vertices.len();
    let gamma = if v >= 2 {
        graph.edges.len() as f64 / (v * (v - 1)) as f64
    } else {
        0.0
    };
    if v <= 1 {
        return (gamma, 0);
    }
    // compact adjacency over the vertex set
    let max_id = graph.vertices.iter().copied().max().unwrap_or(0);
    let mut compact = vec![usize::MAX; max_id + 1];
    for (i, &id) in graph.vertices.iter().enumerate() {
        compact[id] = i;
    }
    let mut adj = vec![Vec::new(); v];
    for &(a, b) in &graph.edges {
        adj[compact[a]].push(compact[b]);
    }
    let mut diameter = 0;
    let mut dist = vec![usize::MAX; v];
    let mut queue = VecDeque::new();
    for src in 0..v {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[src] = 0;
        queue.clear();
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    diameter = diameter.max(dist[w]);
                    queue.push_back(w);
                }
            }
        }
    }
    (gamma, diameter)
}

/// Gate count plus graph metrics of a brain.
pub fn network_metrics(brain: &Brain) -> NetworkMetrics {
    let graph = brain.wiring_graph();
    let (gamma, diameter) = graph_metrics(&graph);
    NetworkMetrics {
        n_gates: brain.gates().len(),
        gamma,
        diameter,
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Percentile bootstrap confidence interval of the mean:
/// `(lower, mean, upper)` at the given coverage level.
pub fn bootstrap_ci_mean<R: Rng>(
    samples: &[f64],
    n_resamples: usize,
    level: f64,
    rng: &mut R,
) -> Result<(f64, f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if !(0.0..1.0).contains(&level) || level <= 0.0 {
        return Err(Error::InvalidParams("level must be in (0,1)".into()));
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let mut means: Vec<f64> = (0..n_resamples)
        .map(|_| {
            let sum: f64 = (0..samples.len())
                .map(|_| samples[rng.gen_range(0..samples.len())])
                .sum();
            sum / samples.len() as f64
        })
        .collect();
    means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let alpha = 1.0 - level;
    Ok((
        quantile(&means, alpha / 2.0),
        mean,
        quantile(&means, 1.0 - alpha / 2.0),
    ))
}

/// Alternative hypothesis for the Mann-Whitney test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    TwoSided,
    /// Sample `a` is stochastically greater than `b`.
    AGreater,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub u: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
}

/// Midranks of the pooled sample, doubled so they stay integral under ties.
fn doubled_midranks(a: &[f64], b: &[f64]) -> (Vec<u64>, Vec<u64>, Vec<usize>) {
    let mut pooled: Vec<(f64, usize)> = a
        .iter()
        .map(|&v| (v, 0))
        .chain(b.iter().map(|&v| (v, 1)))
        .collect();
    pooled.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let n = pooled.len();
    let mut doubled = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // midrank of positions i..j (1-based) is (i + j + 1) / 2
        let d = (i + j + 1) as u64;
        doubled[i..j].fill(d);
        tie_sizes.push(j - i);
        i = j;
    }
    let rank_sum_a: Vec<u64> = pooled
        .iter()
        .zip(doubled.iter())
        .filter(|((_, g), _)| *g == 0)
        .map(|(_, &d)| d)
        .collect();
    (doubled, rank_sum_a, tie_sizes)
}

/// Exact null distribution of the doubled rank sum of a size-`n1` subset,
/// by dynamic programming over the pooled rank multiset. Returns counts
/// indexed by doubled rank sum.
fn rank_sum_distribution(doubled: &[u64], n1: usize) -> Vec<f64> {
    let max_sum: u64 = doubled.iter().rev().take(n1).sum();
    let mut dp = vec![vec![0.0f64; max_sum as usize + 1]; n1 + 1];
    dp[0][0] = 1.0;
    for &d in doubled {
        for k in (0..n1).rev() {
            for s in 0..=(max_sum.saturating_sub(d)) as usize {
                if dp[k][s] > 0.0 {
                    dp[k + 1][s + d as usize] += dp[k][s];
                }
            }
        }
    }
    dp.pop().unwrap()
}

fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Complementary error function (Numerical Recipes rational approximation,
/// max relative error ~1.2e-7).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Mann-Whitney U with midrank tie handling. Uses exact enumeration of rank
/// assignments when the smaller sample has fewer than 8 observations, and
/// the tie-corrected normal approximation with continuity correction
/// otherwise. The reported U is the statistic of sample `a`.
pub fn mann_whitney_u(a: &[f64], b: &[f64], alternative: Alternative) -> Result<TestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySamples);
    }
    let (n1, n2) = (a.len(), b.len());
    let (doubled, ranks_a, tie_sizes) = doubled_midranks(a, b);
    let doubled_sum_a: u64 = ranks_a.iter().sum();
    // U_a = R_a - n1 (n1 + 1) / 2, kept in doubled units for exactness
    let doubled_u = doubled_sum_a - (n1 * (n1 + 1)) as u64;
    let u = doubled_u as f64 / 2.0;

    let p_value = if n1.min(n2) < 8 {
        let dist = rank_sum_distribution(&doubled, n1);
        let total: f64 = dist.iter().sum();
        let offset = n1 * (n1 + 1);
        let p_le: f64 = dist
            .iter()
            .enumerate()
            .filter(|&(s, _)| (offset..=offset + doubled_u as usize).contains(&s))
            .map(|(_, &c)| c)
            .sum::<f64>()
            / total;
        let p_ge: f64 = dist
            .iter()
            .enumerate()
            .filter(|&(s, _)| s >= offset + doubled_u as usize)
            .map(|(_, &c)| c)
            .sum::<f64>()
            / total;
        match alternative {
            Alternative::TwoSided => (2.0 * p_le.min(p_ge)).min(1.0),
            Alternative::AGreater => p_ge,
        }
    } else {
        let n = n1 + n2;
        let mean = (n1 * n2) as f64 / 2.0;
        let tie_term: f64 = tie_sizes
            .iter()
            .map(|&t| (t * t * t - t) as f64)
            .sum::<f64>()
            / (n * (n - 1)) as f64;
        let var = (n1 * n2) as f64 / 12.0 * ((n + 1) as f64 - tie_term);
        let sd = var.sqrt();
        match alternative {
            Alternative::TwoSided => {
                let z = ((u - mean).abs() - 0.5).max(0.0) / sd;
                (2.0 * normal_sf(z)).min(1.0)
            }
            Alternative::AGreater => {
                let z = (u - mean - 0.5) / sd;
                normal_sf(z)
            }
        }
    };
    Ok(TestResult {
        u,
        p_value,
        n1,
        n2,
    })
}

/// Per-generation mean with bootstrap CI bounds across replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSummary {
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Summarizes replicate score series generation by generation. Shorter
/// series are padded with their terminal value.
pub fn summarize_lod_series<R: Rng>(
    series: &[Vec<f64>],
    n_resamples: usize,
    level: f64,
    rng: &mut R,
) -> Result<SeriesSummary> {
    if series.is_empty() || series.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptySamples);
    }
    let len = series.iter().map(|s| s.len()).max().unwrap();
    let mut mean = Vec::with_capacity(len);
    let mut lower = Vec::with_capacity(len);
    let mut upper = Vec::with_capacity(len);
    for g in 0..len {
        let column: Vec<f64> = series
            .iter()
            .map(|s| *s.get(g).unwrap_or_else(|| s.last().unwrap()))
            .collect();
        let (lo, m, hi) = bootstrap_ci_mean(&column, n_resamples, level, rng)?;
        mean.push(m);
        lower.push(lo);
        upper.push(hi);
    }
    Ok(SeriesSummary { mean, lower, upper })
}

/// One near-final score per replicate: entry `offset` before the end of each
/// series. Slicing a little before the end drops unpruned terminal mutants.
pub fn final_distribution(series: &[Vec<f64>], offset: usize) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(Error::EmptySamples);
    }
    series
        .iter()
        .map(|s| {
            if offset >= s.len() {
                Err(Error::OffsetOutOfRange {
                    offset,
                    len: s.len(),
                })
            } else {
                Ok(s[s.len() - 1 - offset])
            }
        })
        .collect()
}
