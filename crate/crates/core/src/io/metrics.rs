//! Metric records and weighted edge lists on disk.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::io::loader::LoadError;
use crate::matrix::GraphMatrix;
use crate::pipeline::{HomophilyRow, RunMetrics};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> LoadError + '_ {
    move |source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), |v| v.to_string())
}

/// One `key=value` pair per line. Series are comma-separated and homophily
/// rows are keyed `homophily.<domain>.<structure>.<hop>`.
pub fn metrics_to_text(m: &RunMetrics) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        writeln!(out, "{k}={v}").expect("writing to a String");
    };
    line("ablation", m.ablation.to_string());
    line("seed", m.seed.to_string());
    line("epochs", m.epochs.to_string());
    line("final_accuracy", opt(m.final_accuracy));
    line("structural_difference", opt(m.structural_difference));
    line("wall_clock_seconds", m.wall_clock_seconds.to_string());
    line("loss_cr", join(&m.loss_cr));
    line("loss_re", join(&m.loss_re));
    line("loss_a", join(&m.loss_a));
    line("loss_ce", join(&m.loss_ce));
    line("loss_total", join(&m.loss_total));
    line("gamma", join(&m.gamma));
    for HomophilyRow { domain, structure, hop, ratio } in &m.homophily {
        line(&format!("homophily.{domain}.{structure}.{hop}"), opt(*ratio));
    }
    out
}

/// Sibling path for the JSON record: `<out>.json`.
pub fn json_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes the text record to `out` and the JSON record next to it.
pub fn write_metrics(out: &Path, m: &RunMetrics) -> Result<(), LoadError> {
    fs::write(out, metrics_to_text(m)).map_err(io_err(out))?;
    let json = json_path(out);
    let doc = serde_json::to_string_pretty(m).expect("metrics serialize");
    fs::write(&json, doc).map_err(io_err(&json))
}

pub fn read_metrics_json(path: &Path) -> Result<RunMetrics, LoadError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| LoadError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

/// Every stored entry as `row col weight`, preceded by a `# nodes N` header.
pub fn write_weighted_edges(path: &Path, a: &GraphMatrix) -> Result<(), LoadError> {
    let mut out = format!("# nodes {}\n", a.n());
    for (i, j, w) in a.triplets() {
        if w != 0.0 {
            writeln!(out, "{i} {j} {w}").expect("writing to a String");
        }
    }
    fs::write(path, out).map_err(io_err(path))
}

pub fn read_weighted_edges(path: &Path) -> Result<GraphMatrix, LoadError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let parse = |line: usize, message: String| LoadError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut n = None;
    let mut trip = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if let Some(rest) = l.strip_prefix("# nodes") {
            n = Some(rest.trim().parse().map_err(|_| parse(line, format!("bad node count {rest:?}")))?);
            continue;
        }
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        let [i, j, w] = toks[..] else {
            return Err(parse(line, "expected `row col weight`".into()));
        };
        let i: usize = i.parse().map_err(|_| parse(line, format!("invalid node id {i:?}")))?;
        let j: usize = j.parse().map_err(|_| parse(line, format!("invalid node id {j:?}")))?;
        let w: f64 = w.parse().map_err(|_| parse(line, format!("invalid weight {w:?}")))?;
        trip.push((i, j, w));
    }
    let n = n
        .or_else(|| trip.iter().map(|&(i, j, _)| i.max(j) + 1).max())
        .unwrap_or(0);
    if let Some(&(i, j, _)) = trip.iter().find(|&&(i, j, _)| i >= n || j >= n) {
        return Err(LoadError::Format {
            path: path.to_path_buf(),
            message: format!("entry ({i}, {j}) out of range for {n} nodes"),
        });
    }
    Ok(GraphMatrix::from_triplets(n, trip))
}
