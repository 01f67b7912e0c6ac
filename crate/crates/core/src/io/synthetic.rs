//! Seeded attributed graphs with a controllable edge homophily.

use ndarray::Array2;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SyntheticError {
    #[error("invalid synthetic spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub classes: usize,
    pub dim: usize,
    /// Probability that a drawn partner shares the node's class.
    pub homophily: f64,
    pub mean_degree: f64,
    /// Standard deviation of the class centers.
    pub separation: f64,
    /// Standard deviation of the per-node feature noise.
    pub noise: f64,
    pub seed: u64,
    /// Seed of the class centers; graphs sharing it share a feature space.
    pub center_seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n: 500,
            classes: 4,
            dim: 16,
            homophily: 0.5,
            mean_degree: 6.0,
            separation: 1.0,
            noise: 1.0,
            seed: 0,
            center_seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), SyntheticError> {
        let bad = |m: String| Err(SyntheticError::Spec(m));
        if !(0.0..=1.0).contains(&self.homophily) {
            return bad(format!("homophily {} outside [0, 1]", self.homophily));
        }
        if self.classes < 2 || self.n < self.classes {
            return bad(format!("need n >= classes >= 2, got n={} classes={}", self.n, self.classes));
        }
        if self.dim == 0 {
            return bad("feature dimension must be positive".into());
        }
        if !(self.mean_degree > 0.0 && self.mean_degree < self.n as f64) {
            return bad(format!("mean degree {} infeasible for {} nodes", self.mean_degree, self.n));
        }
        if !(self.separation >= 0.0 && self.noise >= 0.0) {
            return bad("separation and noise must be nonnegative".into());
        }
        Ok(())
    }
}

/// Class centers shared by every graph with the same `center_seed`.
pub fn class_centers(spec: &SyntheticSpec) -> Array2<f64> {
    let mut r = rng::substream(spec.center_seed, "centers");
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    Array2::from_shape_fn((spec.classes, spec.dim), |_| normal.sample(&mut r) * spec.separation)
}

/// Classes are balanced and randomly placed. Every node proposes `mean_degree / 2` partners (so the undirected mean
/// degree is close to `mean_degree`), each from its own class with
/// probability `homophily` and from a uniformly chosen other class otherwise.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Graph, SyntheticError> {
    spec.validate()?;
    let mut r = rng::substream(spec.seed, rng::SYNTHETIC);
    let mut labels: Vec<usize> = (0..spec.n).map(|v| v % spec.classes).collect();
    labels.shuffle(&mut r);
    let mut members = vec![Vec::new(); spec.classes];
    for (v, &y) in labels.iter().enumerate() {
        members[y].push(v);
    }

    let proposals = spec.mean_degree / 2.0;
    let mut edges = Vec::new();
    for (v, &y) in labels.iter().enumerate() {
        let whole = proposals.floor() as usize;
        let count = whole + usize::from(r.random::<f64>() < proposals - whole as f64);
        for _ in 0..count {
            let same = r.random::<f64>() < spec.homophily;
            let pool = if same {
                &members[y]
            } else {
                let others: Vec<usize> = (0..spec.classes).filter(|&c| c != y && !members[c].is_empty()).collect();
                match others.choose(&mut r) {
                    Some(&c) => &members[c],
                    None => continue,
                }
            };
            if let Some(&u) = pool.choose(&mut r) {
                if u != v {
                    edges.push((v, u));
                }
            }
        }
    }

    let centers = class_centers(spec);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let features = Array2::from_shape_fn((spec.n, spec.dim), |(v, j)| {
        centers[[labels[v], j]] + spec.noise * normal.sample(&mut r)
    });
    Ok(Graph::from_edges(spec.n, &edges, features, Some(labels))?.with_num_classes(spec.classes)?)
}
