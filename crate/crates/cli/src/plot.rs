//! Hand-rolled, self-contained SVG output: fitness curves with confidence
//! bands, per-kind gate-count curves, and kernel-density violins.

use std::fmt::Write as _;

use mblab_core::analysis::{summarize_lod_series, SeriesSummary};
use mblab_core::rng::rng_from_seed;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(1e-12);
        MARGIN + (v - self.x_min) / span * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-12);
        HEIGHT - MARGIN - (v - self.y_min) / span * (HEIGHT - 2.0 * MARGIN)
    }
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">{title}</text>\n",
        WIDTH / 2.0
    )
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{cx}\" y=\"{lb}\" text-anchor=\"middle\" font-size=\"12\">{x_label}</text>\n\
         <text x=\"18\" y=\"{cy}\" text-anchor=\"middle\" font-size=\"12\" \
          transform=\"rotate(-90 18 {cy})\">{y_label}</text>\n\
         <text x=\"{m}\" y=\"{lb}\" text-anchor=\"middle\" font-size=\"10\">{x0:.3}</text>\n\
         <text x=\"{r}\" y=\"{lb}\" text-anchor=\"middle\" font-size=\"10\">{x1:.3}</text>\n\
         <text x=\"{ml}\" y=\"{b}\" text-anchor=\"end\" font-size=\"10\">{y0:.3}</text>\n\
         <text x=\"{ml}\" y=\"{t}\" text-anchor=\"end\" font-size=\"10\">{y1:.3}</text>",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN,
        cx = WIDTH / 2.0,
        cy = HEIGHT / 2.0,
        lb = HEIGHT - MARGIN / 2.0,
        ml = MARGIN - 6.0,
        x0 = f.x_min,
        x1 = f.x_max,
        y0 = f.y_min,
        y1 = f.y_max,
    );
}

fn polyline(out: &mut String, pts: &[(f64, f64)], stroke: &str, dashed: bool) {
    let points: String = pts
        .iter()
        .map(|&(x, y)| format!("{x:.2},{y:.2} "))
        .collect();
    let dash = if dashed {
        " stroke-dasharray=\"8 5\""
    } else {
        ""
    };
    let _ = writeln!(
        out,
        "<polyline fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.5\"{dash} points=\"{points}\"/>"
    );
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Mean-fitness curves with shaded 95% bootstrap bands, one labeled series
/// per input; the first series is solid, later ones dashed.
pub fn fitness_curve(inputs: &[(String, Vec<Vec<f64>>)]) -> Result<String, String> {
    if inputs.is_empty() {
        return Err("no input series".into());
    }
    let mut rng = rng_from_seed(0);
    let summaries: Vec<(String, SeriesSummary)> = inputs
        .iter()
        .map(|(label, series)| {
            summarize_lod_series(series, 1000, 0.95, &mut rng)
                .map(|s| (label.clone(), s))
                .map_err(|e| format!("series '{label}': {e}"))
        })
        .collect::<Result<_, _>>()?;
    let x_max = summaries
        .iter()
        .map(|(_, s)| s.mean.len())
        .max()
        .unwrap()
        .saturating_sub(1) as f64;
    let f = Frame {
        x_min: 0.0,
        x_max: x_max.max(1.0),
        y_min: 0.0,
        y_max: 1.0,
    };
    let mut out = svg_open("fitness along the line of descent");
    axes(&mut out, &f, "generation", "normalized fitness");
    for (k, (label, s)) in summaries.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let band: String = s
            .upper
            .iter()
            .enumerate()
            .map(|(g, &v)| format!("{:.2},{:.2} ", f.x(g as f64), f.y(v)))
            .chain(
                s.lower
                    .iter()
                    .enumerate()
                    .rev()
                    .map(|(g, &v)| format!("{:.2},{:.2} ", f.x(g as f64), f.y(v))),
            )
            .collect();
        let _ = writeln!(
            out,
            "<polygon fill=\"{color}\" fill-opacity=\"0.15\" stroke=\"none\" points=\"{band}\"/>"
        );
        let pts: Vec<(f64, f64)> = s
            .mean
            .iter()
            .enumerate()
            .map(|(g, &v)| (f.x(g as f64), f.y(v)))
            .collect();
        polyline(&mut out, &pts, color, k > 0);
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{label}</text>",
            WIDTH - MARGIN - 120.0,
            MARGIN + 18.0 * (k + 1) as f64
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// One input file's label plus its per-replicate probabilistic and
/// decomposable gate-count series.
pub type GateCountInput = (String, Vec<Vec<f64>>, Vec<Vec<f64>>);

/// Mean per-generation gate counts: solid = probabilistic, dashed =
/// decomposable, one color pair per input file.
pub fn gate_counts(inputs: &[GateCountInput]) -> Result<String, String> {
    if inputs.is_empty() || inputs.iter().any(|(_, p, d)| p.is_empty() || d.is_empty()) {
        return Err("no input series".into());
    }
    let mean_series = |series: &Vec<Vec<f64>>| -> Vec<f64> {
        let len = series.iter().map(|s| s.len()).max().unwrap();
        (0..len)
            .map(|g| {
                series
                    .iter()
                    .map(|s| *s.get(g).unwrap_or_else(|| s.last().unwrap()))
                    .sum::<f64>()
                    / series.len() as f64
            })
            .collect()
    };
    let curves: Vec<(String, Vec<f64>, Vec<f64>)> = inputs
        .iter()
        .map(|(label, p, d)| (label.clone(), mean_series(p), mean_series(d)))
        .collect();
    let y_max = curves
        .iter()
        .flat_map(|(_, p, d)| p.iter().chain(d.iter()))
        .fold(1.0f64, |a, &b| a.max(b));
    let x_max = curves
        .iter()
        .map(|(_, p, _)| p.len())
        .max()
        .unwrap()
        .saturating_sub(1) as f64;
    let f = Frame {
        x_min: 0.0,
        x_max: x_max.max(1.0),
        y_min: 0.0,
        y_max,
    };
    let mut out = svg_open("gate counts along the line of descent");
    axes(&mut out, &f, "generation", "mean gate count");
    for (k, (label, p, d)) in curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let to_pts = |v: &[f64]| -> Vec<(f64, f64)> {
            v.iter()
                .enumerate()
                .map(|(g, &y)| (f.x(g as f64), f.y(y)))
                .collect()
        };
        polyline(&mut out, &to_pts(p), color, false);
        polyline(&mut out, &to_pts(d), color, true);
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{label} (solid prob, dashed dec)</text>",
            WIDTH - MARGIN - 280.0,
            MARGIN + 18.0 * (k + 1) as f64
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Gaussian kernel density over a fixed grid; bandwidth by Silverman's rule
/// with a floor so constant data yields a narrow slab instead of a spike.
fn kde(samples: &[f64], grid: &[f64]) -> Vec<f64> {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = (samples.iter().map(|&x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    let span = grid.last().unwrap() - grid.first().unwrap();
    let bw = (1.06 * sd * n.powf(-0.2)).max(span * 0.01).max(1e-9);
    grid.iter()
        .map(|&g| {
            samples
                .iter()
                .map(|&x| {
                    let z = (g - x) / bw;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
                / (n * bw)
        })
        .collect()
}

/// Violin plot of one distribution per labeled input, with red dashes at the
/// mean and both extrema.
pub fn violin(inputs: &[(String, Vec<f64>)]) -> Result<String, String> {
    if inputs.is_empty() || inputs.iter().any(|(_, v)| v.is_empty()) {
        return Err("no input samples".into());
    }
    let lo = inputs
        .iter()
        .flat_map(|(_, v)| v.iter())
        .fold(f64::INFINITY, |a, &b| a.min(b));
    let hi = inputs
        .iter()
        .flat_map(|(_, v)| v.iter())
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let pad = ((hi - lo) * 0.1).max(0.05);
    let f = Frame {
        x_min: 0.0,
        x_max: inputs.len() as f64,
        y_min: lo - pad,
        y_max: hi + pad,
    };
    let mut out = svg_open("near-final fitness distributions");
    axes(&mut out, &f, "", "normalized fitness");
    let grid: Vec<f64> = (0..=200)
        .map(|i| f.y_min + (f.y_max - f.y_min) * i as f64 / 200.0)
        .collect();
    let half_width = (WIDTH - 2.0 * MARGIN) / inputs.len() as f64 * 0.35;
    for (k, (label, samples)) in inputs.iter().enumerate() {
        let center = f.x(k as f64 + 0.5);
        let density = kde(samples, &grid);
        let d_max = density.iter().fold(1e-300f64, |a, &b| a.max(b));
        let shape: String = grid
            .iter()
            .zip(density.iter())
            .map(|(&g, &d)| {
                format!("{:.2},{:.2} ", center - d / d_max * half_width, f.y(g))
            })
            .chain(grid.iter().zip(density.iter()).rev().map(|(&g, &d)| {
                format!("{:.2},{:.2} ", center + d / d_max * half_width, f.y(g))
            }))
            .collect();
        let _ = writeln!(
            out,
            "<polygon fill=\"#bbbbbb\" stroke=\"#888888\" points=\"{shape}\"/>"
        );
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let s_min = samples.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let s_max = samples.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        for v in [mean, s_min, s_max] {
            let _ = writeln!(
                out,
                "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"red\" \
                 stroke-width=\"2\"/>",
                center - half_width * 0.5,
                center + half_width * 0.5,
                y = f.y(v),
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{center:.2}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{label}</text>",
            HEIGHT - MARGIN / 2.0
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
