//! The lod.csv dialect: comma-separated, header row, LF endings, floats with
//! 17 significant digits so replay comparisons are bit-exact.

use std::fmt::Write as _;

pub const HEADER: &str =
    "replicate,generation,raw_score,normalized_score,n_gates_prob,n_gates_dec,gamma,diameter";

/// One row of lod.csv: an organism on some replicate's line of descent.
#[derive(Debug, Clone, PartialEq)]
pub struct LodRecord {
    pub replicate: usize,
    pub generation: usize,
    pub raw_score: f64,
    pub normalized_score: f64,
    pub n_gates_prob: usize,
    pub n_gates_dec: usize,
    pub gamma: f64,
    pub diameter: usize,
}

/// 17 significant digits: exact round-trip for any f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(records: &[LodRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.replicate,
            r.generation,
            fmt_float(r.raw_score),
            fmt_float(r.normalized_score),
            r.n_gates_prob,
            r.n_gates_dec,
            fmt_float(r.gamma),
            r.diameter,
        );
    }
    out
}

pub fn read_csv(text: &str) -> Result<Vec<LodRecord>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let have: Vec<&str> = header.split(',').collect();
    let want: Vec<&str> = HEADER.split(',').collect();
    if have.len() != want.len() {
        return Err(format!(
            "header has {} columns, expected {}",
            have.len(),
            want.len()
        ));
    }
    for (h, w) in have.iter().zip(want.iter()) {
        if h != w {
            return Err(format!("unexpected column '{h}' (expected '{w}')"));
        }
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != want.len() {
            return Err(format!("line {}: {} fields", lineno + 2, fields.len()));
        }
        let parse_at = |i: usize| -> Result<f64, String> {
            fields[i]
                .parse()
                .map_err(|_| format!("line {}: bad value in column {}", lineno + 2, want[i]))
        };
        records.push(LodRecord {
            replicate: parse_at(0)? as usize,
            generation: parse_at(1)? as usize,
            raw_score: parse_at(2)?,
            normalized_score: parse_at(3)?,
            n_gates_prob: parse_at(4)? as usize,
            n_gates_dec: parse_at(5)? as usize,
            gamma: parse_at(6)?,
            diameter: parse_at(7)? as usize,
        });
    }
    Ok(records)
}

/// Normalized-score series per replicate, in replicate order.
pub fn series_by_replicate(records: &[LodRecord], field: fn(&LodRecord) -> f64) -> Vec<Vec<f64>> {
    let mut series: Vec<(usize, Vec<f64>)> = Vec::new();
    for r in records {
        match series.iter_mut().find(|(k, _)| *k == r.replicate) {
            Some((_, v)) => v.push(field(r)),
            None => series.push((r.replicate, vec![field(r)])),
        }
    }
    series.sort_by_key(|(k, _)| *k);
    series.into_iter().map(|(_, v)| v).collect()
}
