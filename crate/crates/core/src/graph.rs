//! Graph representation, self-loop normalization and homophily metrics.

use ndarray::{Array1, Array2};
use rayon::prelude::*;
use thiserror::Error;

use crate::matrix::GraphMatrix;

const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("negative adjacency entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("local homophily undefined for isolated node {0}")]
    IsolatedNode(usize),
    #[error("graph has no labels")]
    MissingLabels,
    #[error("no off-diagonal positive entries in A^{hop}")]
    NoQualifyingPairs { hop: usize },
    #[error("hop count must be at least 1")]
    ZeroHop,
}

/// Undirected attributed graph with optional labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: GraphMatrix,
    features: Array2<f64>,
    labels: Option<Vec<usize>>,
    num_classes: Option<usize>,
    names: Option<Vec<String>>,
}

impl Graph {
    /// Validates symmetry, zero diagonal, finite features and label range.
    /// `num_classes` defaults to `max(label) + 1` when labels are given.
    pub fn new(
        adjacency: GraphMatrix,
        features: Array2<f64>,
        labels: Option<Vec<usize>>,
        num_classes: Option<usize>,
    ) -> Result<Self, GraphError> {
        let n = adjacency.n();
        if features.nrows() != n {
            return Err(GraphError::Invalid(format!(
                "feature rows {} != node count {n}",
                features.nrows()
            )));
        }
        if let Some(((i, j), v)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(GraphError::Invalid(format!("non-finite feature {v} at ({i}, {j})")));
        }
        if let Some(i) = (0..n).find(|&i| adjacency.get(i, i) != 0.0) {
            return Err(GraphError::Invalid(format!("nonzero diagonal at node {i}")));
        }
        let asym = adjacency.max_abs_asymmetry();
        if asym > SYMMETRY_TOL {
            return Err(GraphError::Invalid(format!("adjacency asymmetric by {asym:e}")));
        }
        let num_classes = match (&labels, num_classes) {
            (Some(l), declared) => {
                if l.len() != n {
                    return Err(GraphError::Invalid(format!(
                        "label count {} != node count {n}",
                        l.len()
                    )));
                }
                let c = declared.unwrap_or_else(|| l.iter().max().map_or(0, |m| m + 1));
                if let Some(bad) = l.iter().find(|&&y| y >= c) {
                    return Err(GraphError::Invalid(format!("label {bad} out of range for {c} classes")));
                }
                Some(c)
            }
            (None, declared) => declared,
        };
        Ok(Self {
            adjacency,
            features,
            labels,
            num_classes,
            names: None,
        })
    }

    /// Builds an unweighted graph from undirected edges.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize)],
        features: Array2<f64>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self, GraphError> {
        let mut trip = Vec::with_capacity(2 * edges.len());
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::Invalid(format!("edge ({u}, {v}) out of range for {n} nodes")));
            }
            if u == v {
                continue;
            }
            if seen.insert((u.min(v), u.max(v))) {
                trip.push((u, v, 1.0));
                trip.push((v, u, 1.0));
            }
        }
        Graph::new(GraphMatrix::from_triplets(n, trip), features, labels, None)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, GraphError> {
        if names.len() != self.n() {
            return Err(GraphError::Invalid("name count != node count".into()));
        }
        self.names = Some(names);
        Ok(self)
    }

    /// Declares the class count, which may exceed the largest observed label.
    pub fn with_num_classes(mut self, c: usize) -> Result<Self, GraphError> {
        if let Some(bad) = self.labels.iter().flatten().find(|&&y| y >= c) {
            return Err(GraphError::Invalid(format!("label {bad} out of range for {c} classes")));
        }
        self.num_classes = Some(c);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adjacency.n()
    }

    pub fn feature_dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn adjacency(&self) -> &GraphMatrix {
        &self.adjacency
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn num_classes(&self) -> Option<usize> {
        self.num_classes
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Number of undirected edges (positive upper-triangle entries).
    pub fn edge_count(&self) -> usize {
        self.adjacency
            .triplets()
            .into_iter()
            .filter(|&(i, j, v)| i < j && v > 0.0)
            .count()
    }

    pub fn degrees(&self) -> Array1<f64> {
        self.adjacency.row_sums()
    }

    pub fn without_labels(&self) -> Self {
        Self {
            labels: None,
            ..self.clone()
        }
    }

    /// Replaces the feature matrix, keeping structure and labels.
    pub fn with_features(&self, features: Array2<f64>) -> Result<Self, GraphError> {
        let mut g = Graph::new(self.adjacency.clone(), features, self.labels.clone(), self.num_classes)?;
        g.names = self.names.clone();
        Ok(g)
    }

    fn require_labels(&self) -> Result<&[usize], GraphError> {
        self.labels.as_deref().ok_or(GraphError::MissingLabels)
    }
}

/// Self-loop normalized adjacency and its Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedGraph {
    pub a_tilde: GraphMatrix,
    pub l_tilde: GraphMatrix,
}

/// `Ã = (D+I)^{-1/2}(A+I)(D+I)^{-1/2}` and `L̃ = I − Ã`.
pub fn normalize_adjacency(g: &Graph) -> Result<NormalizedGraph, GraphError> {
    normalize_matrix(g.adjacency())
}

/// Same normalization for any nonnegative square matrix with zero
/// diagonal, weighted or not.
pub fn normalize_matrix(a: &GraphMatrix) -> Result<NormalizedGraph, GraphError> {
    if let Some((row, col, value)) = a.triplets().into_iter().find(|t| t.2 < 0.0) {
        return Err(GraphError::NegativeEntry { row, col, value });
    }
    let n = a.n();
    let inv_sqrt: Vec<f64> = a.row_sums().iter().map(|d| 1.0 / (d + 1.0).sqrt()).collect();
    let a_tilde = match a {
        GraphMatrix::Dense(m) => {
            let mut out = m.clone();
            for i in 0..n {
                out[[i, i]] += 1.0;
            }
            for ((i, j), v) in out.indexed_iter_mut() {
                *v *= inv_sqrt[i] * inv_sqrt[j];
            }
            GraphMatrix::Dense(out)
        }
        GraphMatrix::Sparse(_) => {
            let mut trip = a.triplets();
            trip.extend((0..n).map(|i| (i, i, 1.0)));
            let trip = trip
                .into_iter()
                .map(|(i, j, v)| (i, j, v * inv_sqrt[i] * inv_sqrt[j]))
                .collect();
            GraphMatrix::from_triplets(n, trip)
        }
    };
    // every diagonal entry of Ã is stored (it is at least the self-loop term),
    // so mapping stored entries covers I − Ã for sparse storage too
    let l_tilde = a_tilde.map_entries(|i, j, v| if i == j { 1.0 - v } else { -v });
    Ok(NormalizedGraph { a_tilde, l_tilde })
}

/// Fraction of `v`'s neighbors sharing its label.
pub fn local_node_homophily(g: &Graph, v: usize) -> Result<f64, GraphError> {
    let labels = g.require_labels()?;
    if v >= g.n() {
        return Err(GraphError::Invalid(format!("node {v} out of range")));
    }
    let neigh: Vec<usize> = g
        .adjacency()
        .row_entries(v)
        .into_iter()
        .filter(|&(u, w)| w > 0.0 && u != v)
        .map(|(u, _)| u)
        .collect();
    if neigh.is_empty() {
        return Err(GraphError::IsolatedNode(v));
    }
    let same = neigh.iter().filter(|&&u| labels[u] == labels[v]).count();
    Ok(same as f64 / neigh.len() as f64)
}

/// Mean of [`local_node_homophily`] over non-isolated nodes.
pub fn node_homophily(g: &Graph) -> Result<f64, GraphError> {
    g.require_labels()?;
    let mut total = 0.0;
    let mut count = 0usize;
    for v in 0..g.n() {
        match local_node_homophily(g, v) {
            Ok(h) => {
                total += h;
                count += 1;
            }
            Err(GraphError::IsolatedNode(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if count == 0 {
        return Err(GraphError::NoQualifyingPairs { hop: 1 });
    }
    Ok(total / count as f64)
}

/// Fraction of edges joining same-label endpoints.
pub fn edge_homophily(g: &Graph) -> Result<f64, GraphError> {
    hop_homophily(g, 1)
}

/// `H^(l)`: label agreement over off-diagonal positive entries of `A^l`.
pub fn hop_homophily(g: &Graph, l: usize) -> Result<f64, GraphError> {
    let labels = g.require_labels()?;
    hop_homophily_of(g.adjacency(), labels, l)
}

/// [`hop_homophily`] for an arbitrary nonnegative structure over the same
/// node set (e.g. a reconstructed adjacency).
pub fn hop_homophily_of(a: &GraphMatrix, labels: &[usize], l: usize) -> Result<f64, GraphError> {
    if l == 0 {
        return Err(GraphError::ZeroHop);
    }
    let n = a.n();
    if labels.len() != n {
        return Err(GraphError::Invalid("label count != node count".into()));
    }
    let mut neighbors: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::new();
        for (j, v) in a.row_entries(i) {
            if v < 0.0 {
                return Err(GraphError::NegativeEntry { row: i, col: j, value: v });
            }
            row.push(j);
        }
        neighbors.push(row);
    }
    // walks of exactly l steps; entry (i, j) of A^l is positive iff one exists
    let (same, total) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut frontier = vec![false; n];
            frontier[i] = true;
            let mut active = vec![i];
            for _ in 0..l {
                let mut next = vec![false; n];
                let mut next_active = Vec::new();
                for &u in &active {
                    for &w in &neighbors[u] {
                        if !next[w] {
                            next[w] = true;
                            next_active.push(w);
                        }
                    }
                }
                frontier = next;
                active = next_active;
            }
            let mut same = 0usize;
            let mut total = 0usize;
            for &j in &active {
                if j != i && frontier[j] {
                    total += 1;
                    if labels[i] == labels[j] {
                        same += 1;
                    }
                }
            }
            (same, total)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if total == 0 {
        return Err(GraphError::NoQualifyingPairs { hop: l });
    }
    Ok(same as f64 / total as f64)
}
