//! Local dataset files: edge list, node features, labels and declared stats.
//!
//! * `edges.txt`: one whitespace-separated pair of 0-based ids per line.
//! * `features.csv`: one comma-separated row per node, or `features.bin`:
//!   two little-endian `u64` (rows, cols) followed by row-major `f32` data.
//! * `labels.txt`: one integer class id per line.
//! * `stats.json` (optional): declared `{nodes, edges, homophily, classes}`.
//!
//! Blank lines and lines starting with `#` are ignored in the text formats.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{s, Array2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{edge_homophily, node_homophily, Graph, GraphError};

pub const HOMOPHILY_TOLERANCE: f64 = 0.05;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("declared {field} is {expected} but the data has {actual}")]
    StatMismatch { field: &'static str, expected: String, actual: String },
    #[error("no features.csv or features.bin in {0}")]
    MissingFeatures(PathBuf),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Statistics a dataset is expected to have.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeclaredStats {
    pub nodes: usize,
    pub edges: usize,
    pub homophily: f64,
    pub classes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub graph: Graph,
    pub name: String,
    pub declared_stats: Option<DeclaredStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPaths {
    pub edges: PathBuf,
    pub features: PathBuf,
    pub labels: Option<PathBuf>,
    pub stats: Option<PathBuf>,
}

impl DatasetPaths {
    /// Conventional file names inside `dir`; labels and stats are optional.
    pub fn in_dir(dir: &Path) -> Result<Self, LoadError> {
        let features = ["features.csv", "features.bin"]
            .iter()
            .map(|f| dir.join(f))
            .find(|p| p.exists())
            .ok_or_else(|| LoadError::MissingFeatures(dir.to_path_buf()))?;
        let optional = |name: &str| Some(dir.join(name)).filter(|p| p.exists());
        Ok(Self {
            edges: dir.join("edges.txt"),
            features,
            labels: optional("labels.txt"),
            stats: optional("stats.json"),
        })
    }
}

fn read_text(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> LoadError {
    LoadError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Edge records as written, before cleaning.
pub fn read_edges(path: &Path) -> Result<Vec<(usize, usize)>, LoadError> {
    let text = read_text(path)?;
    let mut edges = Vec::new();
    for (line, l) in content_lines(&text) {
        let mut parts = l.split_whitespace();
        let mut id = || -> Result<usize, LoadError> {
            let tok = parts.next().ok_or_else(|| parse_err(path, line, "expected two node ids"))?;
            tok.parse().map_err(|_| parse_err(path, line, format!("invalid node id {tok:?}")))
        };
        let (u, v) = (id()?, id()?);
        if parts.next().is_some() {
            return Err(parse_err(path, line, "expected exactly two node ids"));
        }
        edges.push((u, v));
    }
    Ok(edges)
}

pub fn read_features_csv(path: &Path) -> Result<Array2<f64>, LoadError> {
    let text = read_text(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, l) in content_lines(&text) {
        let row = l
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<f64>().map_err(|_| parse_err(path, line, format!("invalid number {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(path, line, format!("expected {} columns, found {}", first.len(), row.len())));
            }
        }
        rows.push(row);
    }
    let cols = rows.first().map_or(0, Vec::len);
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec((flat.len() / cols.max(1), cols), flat).map_err(|e| LoadError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn read_features_bin(path: &Path) -> Result<Array2<f64>, LoadError> {
    let bytes = fs::read(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let format_err = |message: String| LoadError::Format {
        path: path.to_path_buf(),
        message,
    };
    if bytes.len() < 16 {
        return Err(format_err("missing 16-byte header".into()));
    }
    let header = |k: usize| u64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().expect("8 bytes")) as usize;
    let (rows, cols) = (header(0), header(1));
    let expected = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(4))
        .ok_or_else(|| format_err(format!("header {rows}x{cols} overflows")))?;
    if bytes.len() - 16 != expected {
        return Err(format_err(format!(
            "header declares {rows}x{cols} floats ({expected} bytes) but {} bytes follow",
            bytes.len() - 16
        )));
    }
    let data = bytes[16..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
        .collect();
    Array2::from_shape_vec((rows, cols), data).map_err(|e| format_err(e.to_string()))
}

pub fn write_features_bin(path: &Path, x: &Array2<f64>) -> Result<(), LoadError> {
    let mut bytes = Vec::with_capacity(16 + 4 * x.len());
    bytes.extend_from_slice(&(x.nrows() as u64).to_le_bytes());
    bytes.extend_from_slice(&(x.ncols() as u64).to_le_bytes());
    for v in x.iter() {
        bytes.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    fs::write(path, bytes).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_features(path: &Path) -> Result<Array2<f64>, LoadError> {
    if path.extension().is_some_and(|e| e == "bin") {
        read_features_bin(path)
    } else {
        read_features_csv(path)
    }
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>, LoadError> {
    let text = read_text(path)?;
    content_lines(&text)
        .map(|(line, l)| l.parse().map_err(|_| parse_err(path, line, format!("invalid label {l:?}"))))
        .collect()
}

pub fn read_stats(path: &Path) -> Result<DeclaredStats, LoadError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| LoadError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

/// Drops self-loops (with a warning) and duplicate undirected pairs.
pub fn clean_edges(raw: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut seen = BTreeSet::new();
    let mut loops = 0;
    for &(u, v) in raw {
        if u == v {
            loops += 1;
        } else {
            seen.insert((u.min(v), u.max(v)));
        }
    }
    if loops > 0 {
        log::warn!("dropped {loops} self-loop record(s)");
    }
    seen.into_iter().collect()
}

fn mismatch(field: &'static str, expected: impl ToString, actual: impl ToString) -> LoadError {
    LoadError::StatMismatch {
        field,
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}

/// Node, edge and class counts must match exactly; the edge count may match
/// either the cleaned undirected count or the raw record count. Homophily
/// must be within [`HOMOPHILY_TOLERANCE`] of either edge or node homophily.
pub fn validate_stats(g: &Graph, raw_edge_records: usize, stats: &DeclaredStats) -> Result<(), LoadError> {
    if g.n() != stats.nodes {
        return Err(mismatch("nodes", stats.nodes, g.n()));
    }
    let edges = g.edge_count();
    if edges != stats.edges && raw_edge_records != stats.edges {
        return Err(mismatch("edges", stats.edges, format!("{edges} undirected ({raw_edge_records} records)")));
    }
    let labels = g.labels().ok_or(GraphError::MissingLabels)?;
    let classes = labels.iter().collect::<BTreeSet<_>>().len();
    if classes != stats.classes {
        return Err(mismatch("classes", stats.classes, classes));
    }
    let eh = edge_homophily(g)?;
    let nh = node_homophily(g)?;
    if (eh - stats.homophily).abs() > HOMOPHILY_TOLERANCE && (nh - stats.homophily).abs() > HOMOPHILY_TOLERANCE {
        return Err(mismatch(
            "homophily",
            stats.homophily,
            format!("edge {eh:.4} / node {nh:.4}"),
        ));
    }
    Ok(())
}

/// Loads and validates one dataset. Node count comes from the feature rows.
pub fn load_dataset(paths: &DatasetPaths, declared: Option<DeclaredStats>) -> Result<DatasetBundle, LoadError> {
    let features = read_features(&paths.features)?;
    let n = features.nrows();
    let raw = read_edges(&paths.edges)?;
    if let Some(&(u, v)) = raw.iter().find(|&&(u, v)| u >= n || v >= n) {
        return Err(LoadError::Format {
            path: paths.edges.clone(),
            message: format!("edge ({u}, {v}) references a node beyond the {n} feature rows"),
        });
    }
    let labels = paths.labels.as_deref().map(read_labels).transpose()?;
    let graph = Graph::from_edges(n, &clean_edges(&raw), features, labels)?;
    let declared = match (declared, &paths.stats) {
        (Some(d), _) => Some(d),
        (None, Some(p)) => Some(read_stats(p)?),
        (None, None) => None,
    };
    if let Some(stats) = &declared {
        validate_stats(&graph, raw.len(), stats)?;
        let graph = graph.clone().with_num_classes(stats.classes)?;
        return Ok(DatasetBundle {
            graph,
            name: dataset_name(&paths.edges),
            declared_stats: declared,
        });
    }
    Ok(DatasetBundle {
        graph,
        name: dataset_name(&paths.edges),
        declared_stats: None,
    })
}

pub fn load_dir(dir: &Path) -> Result<DatasetBundle, LoadError> {
    load_dataset(&DatasetPaths::in_dir(dir)?, None)
}

fn dataset_name(edges: &Path) -> String {
    edges
        .parent()
        .and_then(Path::file_name)
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Zero-pads the narrower feature matrix so both graphs share a dimension.
pub fn align_feature_dims(a: Graph, b: Graph) -> Result<(Graph, Graph), GraphError> {
    let (da, db) = (a.feature_dim(), b.feature_dim());
    if da == db {
        return Ok((a, b));
    }
    log::warn!("feature dimensions differ ({da} vs {db}); zero-padding to {}", da.max(db));
    let pad = |g: Graph, d: usize| -> Result<Graph, GraphError> {
        let mut x = Array2::zeros((g.n(), d));
        x.slice_mut(s![.., ..g.feature_dim()]).assign(g.features());
        g.with_features(x)
    };
    let d = da.max(db);
    Ok((pad(a, d)?, pad(b, d)?))
}
