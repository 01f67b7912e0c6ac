//! End-to-end source to target runs, ablations and diagnostics.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters::{structure_laplacian, FilterBank};
use crate::graph::{hop_homophily_of, Graph, GraphError};
use crate::matrix::GraphMatrix;
use crate::model::{self, active_groups, AdamConfig, LossWeights, ModelError, ModelState, Mode};
use crate::reconstruct::{reconstruct, sparsify_top_k, HomophilicSolveConfig, ReconstructError, ReconstructedStructures};
use crate::rng;

/// Above this node count the dense eigen-decompositions behind
/// [`structural_difference`] are skipped.
pub const STRUCTURAL_DIFFERENCE_LIMIT: usize = 2048;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("data: {0}")]
    Data(String),
    #[error("{stage}: {source}")]
    Reconstruct {
        stage: &'static str,
        #[source]
        source: ReconstructError,
    },
    #[error("{stage}: {source}")]
    Graph {
        stage: &'static str,
        #[source]
        source: GraphError,
    },
    #[error("{stage}: {source}")]
    Model {
        stage: &'static str,
        #[source]
        source: ModelError,
    },
}

impl PipelineError {
    /// True for failures caused by non-finite arithmetic rather than bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            PipelineError::Model { source, .. } => !matches!(source, ModelError::Shape(_)),
            PipelineError::Reconstruct { source, .. } => {
                let mut e = source;
                while let ReconstructError::Row { source, .. } = e {
                    e = source;
                }
                matches!(e, ReconstructError::Bisection { .. } | ReconstructError::NonFinite)
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ablation {
    Full,
    NoCr,
    NoRe,
    RandomSplit,
}

impl Ablation {
    pub const ALL: [Ablation; 4] = [Ablation::Full, Ablation::NoCr, Ablation::NoRe, Ablation::RandomSplit];

    pub fn as_str(self) -> &'static str {
        match self {
            Ablation::Full => "full",
            Ablation::NoCr => "no_cr",
            Ablation::NoRe => "no_re",
            Ablation::RandomSplit => "random_split",
        }
    }
}

impl fmt::Display for Ablation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Ablation {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ablation::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| PipelineError::Config(format!("unknown ablation tag {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Hop order `l` of the homophilic reconstruction.
    pub hops: usize,
    /// Filter order `k`.
    pub order: usize,
    pub mu1: f64,
    pub mu2: f64,
    pub beta: f64,
    pub mu_ce: f64,
    pub lr: f64,
    pub weight_decay: f64,
    pub dropout: f64,
    pub epochs: usize,
    pub seed: u64,
    pub ablation: Ablation,
    pub topk: usize,
    /// Outer alternations of the homophilic solver.
    pub solve_iters: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            hops: 2,
            order: 2,
            mu1: 0.1,
            mu2: 0.1,
            beta: 2.0,
            mu_ce: 1.0,
            lr: 5e-4,
            weight_decay: 1e-4,
            dropout: model::DEFAULT_DROPOUT,
            epochs: 300,
            seed: 0,
            ablation: Ablation::Full,
            topk: 5,
            solve_iters: 10,
        }
    }
}

impl RunConfig {
    pub const LR_RANGE: (f64, f64) = (1e-4, 5e-4);
    pub const WEIGHT_DECAY_RANGE: (f64, f64) = (1e-4, 5e-3);

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        let (lo, hi) = Self::LR_RANGE;
        if !(lo..=hi).contains(&self.lr) {
            return bad(format!("lr {} outside [{lo}, {hi}]", self.lr));
        }
        let (lo, hi) = Self::WEIGHT_DECAY_RANGE;
        if !(lo..=hi).contains(&self.weight_decay) {
            return bad(format!("weight_decay {} outside [{lo}, {hi}]", self.weight_decay));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout {} outside [0, 1)", self.dropout));
        }
        if self.hops == 0 {
            return bad("hops must be at least 1".into());
        }
        if self.topk == 0 {
            return bad("topk must be at least 1".into());
        }
        self.loss_weights().validate().map_err(PipelineError::Config)
    }

    /// Loss weights after applying the ablation tag.
    pub fn loss_weights(&self) -> LossWeights {
        LossWeights {
            mu1: if self.ablation == Ablation::NoRe { 0.0 } else { self.mu1 },
            mu2: self.mu2,
            beta: self.beta,
            mu_ce: self.mu_ce,
            mu_cr: if self.ablation == Ablation::NoCr { 0.0 } else { 1.0 },
        }
    }

    pub fn solve_config(&self) -> HomophilicSolveConfig {
        HomophilicSolveConfig {
            hops: self.hops,
            outer_iters: self.solve_iters,
            ..HomophilicSolveConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomophilyRow {
    pub domain: String,
    pub structure: String,
    pub hop: usize,
    /// `None` when the structure has no qualifying pairs at this hop.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetrics {
    pub ablation: Ablation,
    pub seed: u64,
    pub epochs: usize,
    pub loss_cr: Vec<f64>,
    pub loss_re: Vec<f64>,
    pub loss_a: Vec<f64>,
    pub loss_ce: Vec<f64>,
    pub loss_total: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Target accuracy; absent when the target has no labels.
    pub final_accuracy: Option<f64>,
    pub homophily: Vec<HomophilyRow>,
    pub structural_difference: Option<f64>,
    pub wall_clock_seconds: f64,
}

/// Equality on everything except wall-clock time.
impl PartialEq for RunMetrics {
    fn eq(&self, other: &Self) -> bool {
        self.ablation == other.ablation
            && self.seed == other.seed
            && self.epochs == other.epochs
            && self.loss_cr == other.loss_cr
            && self.loss_re == other.loss_re
            && self.loss_a == other.loss_a
            && self.loss_ce == other.loss_ce
            && self.loss_total == other.loss_total
            && self.gamma == other.gamma
            && self.final_accuracy == other.final_accuracy
            && self.homophily == other.homophily
            && self.structural_difference == other.structural_difference
    }
}

pub fn evaluate_accuracy(predictions: &[usize], labels: &[usize]) -> Result<f64, PipelineError> {
    if predictions.is_empty() {
        return Err(PipelineError::Data("accuracy of an empty prediction set".into()));
    }
    if predictions.len() != labels.len() {
        return Err(PipelineError::Data(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    let correct = predictions.iter().zip(labels).filter(|(p, y)| p == y).count();
    Ok(correct as f64 / predictions.len() as f64)
}

fn dense_symmetric(m: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| 0.5 * (m[[i, j]] + m[[j, i]]))
}

fn eigenvalues(m: &Array2<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(dense_symmetric(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Spectral norm of `l1 − l2` for equal sizes; otherwise the Euclidean
/// distance between the spectra after zero-padding the smaller one and
/// sorting both.
pub fn laplacian_gap(l1: &Array2<f64>, l2: &Array2<f64>) -> f64 {
    if l1.dim() == l2.dim() {
        let diff = l1 - l2;
        return eigenvalues(&diff).iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let (mut a, mut b) = (eigenvalues(l1), eigenvalues(l2));
    let len = a.len().max(b.len());
    for s in [&mut a, &mut b] {
        s.resize(len, 0.0);
        s.sort_by(f64::total_cmp);
    }
    a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Laplacian gaps of the homophilic plus the heterophilic structures.
pub fn structural_difference(s: &ReconstructedStructures, t: &ReconstructedStructures) -> Result<f64, GraphError> {
    let mut total = 0.0;
    for (a, b) in [(&s.a_o, &t.a_o), (&s.a_e, &t.a_e)] {
        let la = structure_laplacian(a)?.to_dense();
        let lb = structure_laplacian(b)?.to_dense();
        total += laplacian_gap(&la, &lb);
    }
    Ok(total)
}

fn ratio_or_none(a: &GraphMatrix, labels: &[usize], hop: usize) -> Result<Option<f64>, GraphError> {
    match hop_homophily_of(a, labels, hop) {
        Ok(r) => Ok(Some(r)),
        Err(GraphError::NoQualifyingPairs { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `H^(l)` for `l = 1..=max_hop` on the original graph, the top-`topk`
/// thresholded `A_O` and `A_E`.
pub fn homophily_report(
    domain: &str,
    g: &Graph,
    structs: &ReconstructedStructures,
    max_hop: usize,
    topk: usize,
) -> Result<Vec<HomophilyRow>, GraphError> {
    let labels = g.labels().ok_or(GraphError::MissingLabels)?;
    let a_o = sparsify_top_k(&structs.a_o, topk);
    let mut rows = Vec::new();
    for (name, a) in [("original", g.adjacency()), ("A_O", &a_o), ("A_E", &structs.a_e)] {
        for hop in 1..=max_hop {
            rows.push(HomophilyRow {
                domain: domain.to_string(),
                structure: name.to_string(),
                hop,
                ratio: ratio_or_none(a, labels, hop)?,
            });
        }
    }
    Ok(rows)
}

fn row_normalized(n: usize, edges: &[(usize, usize)]) -> GraphMatrix {
    let mut deg = vec![0.0; n];
    for &(u, v) in edges {
        deg[u] += 1.0;
        deg[v] += 1.0;
    }
    let trip = edges
        .iter()
        .flat_map(|&(u, v)| [(u, v, 1.0 / deg[u]), (v, u, 1.0 / deg[v])])
        .collect();
    GraphMatrix::from_triplets(n, trip)
}

/// Splits the edge set into two random halves, each row-normalized, in
/// place of the learned reconstruction.
pub fn random_split(g: &Graph, seed: u64) -> ReconstructedStructures {
    let mut edges: Vec<(usize, usize)> = g
        .adjacency()
        .triplets()
        .into_iter()
        .filter(|&(i, j, v)| i < j && v > 0.0)
        .map(|(i, j, _)| (i, j))
        .collect();
    edges.shuffle(&mut rng::substream(seed, rng::SPLIT));
    let (first, second) = edges.split_at(edges.len() / 2);
    ReconstructedStructures {
        a_o: row_normalized(g.n(), first),
        a_e: row_normalized(g.n(), second),
    }
}

/// The two structures a run uses for one domain.
pub fn structures_for(g: &Graph, cfg: &RunConfig, domain: &'static str) -> Result<ReconstructedStructures, PipelineError> {
    if cfg.ablation == Ablation::RandomSplit {
        let salt = if domain == "source" { 0 } else { 1 };
        return Ok(random_split(g, cfg.seed.wrapping_mul(2).wrapping_add(salt)));
    }
    reconstruct(g, &cfg.solve_config(), cfg.topk).map_err(|source| PipelineError::Reconstruct { stage: domain_stage(domain), source })
}

fn domain_stage(domain: &str) -> &'static str {
    if domain == "source" {
        "reconstruct source"
    } else {
        "reconstruct target"
    }
}

fn check_inputs(source: &Graph, target: &Graph) -> Result<(Vec<usize>, usize), PipelineError> {
    let labels = source
        .labels()
        .ok_or_else(|| PipelineError::Data("source graph has no labels".into()))?
        .to_vec();
    if source.feature_dim() != target.feature_dim() {
        return Err(PipelineError::Data(format!(
            "feature dimension mismatch: source {} vs target {}",
            source.feature_dim(),
            target.feature_dim()
        )));
    }
    let classes = source.num_classes().unwrap_or(1).max(target.num_classes().unwrap_or(0));
    Ok((labels, classes))
}

/// Loss series and the trained state.
pub struct Training {
    pub state: ModelState,
    pub loss_cr: Vec<f64>,
    pub loss_re: Vec<f64>,
    pub loss_a: Vec<f64>,
    pub loss_ce: Vec<f64>,
    pub loss_total: Vec<f64>,
    pub gamma: Vec<f64>,
}

/// Full-batch training. The recorded losses of an epoch are evaluated
/// without dropout on the parameters after that epoch's update.
pub fn train(
    source: &FilterBank,
    source_labels: &[usize],
    target: &FilterBank,
    classes: usize,
    weights: &LossWeights,
    cfg: &RunConfig,
) -> Result<Training, PipelineError> {
    let mut state = ModelState::init(&mut rng::substream(cfg.seed, rng::INIT), source.dim(), classes);
    state.dropout = cfg.dropout;
    let mut dropout_rng = rng::substream(cfg.seed, rng::DROPOUT);
    let adam = AdamConfig::new(cfg.lr, cfg.weight_decay);
    let active = active_groups(weights);
    let mut out = Training {
        state,
        loss_cr: Vec::with_capacity(cfg.epochs),
        loss_re: Vec::with_capacity(cfg.epochs),
        loss_a: Vec::with_capacity(cfg.epochs),
        loss_ce: Vec::with_capacity(cfg.epochs),
        loss_total: Vec::with_capacity(cfg.epochs),
        gamma: Vec::with_capacity(cfg.epochs + 1),
    };
    out.gamma.push(crate::filters::sigmoid(out.state.params.gamma_logit));
    for epoch in 0..cfg.epochs {
        let mut mode = Mode::Train {
            rng: &mut dropout_rng,
            dropout: cfg.dropout,
        };
        let stage = "train";
        let (_, _, grads) = model::loss_and_gradients(&out.state.params, source, source_labels, target, weights, &mut mode)
            .map_err(|source| PipelineError::Model { stage, source })?;
        out.state.step(&grads, &adam, &active).map_err(|source| PipelineError::Model { stage, source })?;
        let (parts, total, _) =
            model::loss_and_gradients(&out.state.params, source, source_labels, target, weights, &mut model::eval_mode())
                .map_err(|source| PipelineError::Model { stage: "evaluate losses", source })?;
        out.loss_cr.push(parts.cr);
        out.loss_re.push(parts.re);
        out.loss_a.push(parts.a);
        out.loss_ce.push(parts.ce);
        out.loss_total.push(total);
        out.gamma.push(crate::filters::sigmoid(out.state.params.gamma_logit));
        log::debug!("epoch {epoch}: total {total:.6} cr {:.4} re {:.4} a {:.6} ce {:.4}", parts.cr, parts.re, parts.a, parts.ce);
    }
    if let (Some(first), Some(last)) = (out.loss_total.first(), out.loss_total.last()) {
        if last > first {
            log::warn!("total loss rose from {first:.6} to {last:.6} over {} epochs (seed {})", cfg.epochs, cfg.seed);
        }
    }
    Ok(out)
}

fn target_accuracy(state: &ModelState, bank: &FilterBank, target: &Graph) -> Result<Option<f64>, PipelineError> {
    let Some(labels) = target.labels() else {
        return Ok(None);
    };
    let pred = model::predict(&state.params, bank).map_err(|source| PipelineError::Model { stage: "predict", source })?;
    evaluate_accuracy(&pred, labels).map(Some)
}

fn filter_banks(
    source: &Graph,
    target: &Graph,
    ss: &ReconstructedStructures,
    ts: &ReconstructedStructures,
    order: usize,
) -> Result<(FilterBank, FilterBank), PipelineError> {
    let stage = "filter";
    let sb = FilterBank::new(ss, source.features(), order).map_err(|source| PipelineError::Graph { stage, source })?;
    let tb = FilterBank::new(ts, target.features(), order).map_err(|source| PipelineError::Graph { stage, source })?;
    Ok((sb, tb))
}

/// Reconstruct, filter, train and evaluate on the target.
pub fn run_rsgda(source: &Graph, target: &Graph, cfg: &RunConfig) -> Result<RunMetrics, PipelineError> {
    cfg.validate()?;
    let started = Instant::now();
    let (labels, classes) = check_inputs(source, target)?;
    let ss = structures_for(source, cfg, "source")?;
    let ts = structures_for(target, cfg, "target")?;
    let (sb, tb) = filter_banks(source, target, &ss, &ts, cfg.order)?;
    let training = train(&sb, &labels, &tb, classes, &cfg.loss_weights(), cfg)?;
    let final_accuracy = target_accuracy(&training.state, &tb, target)?;

    let stage = "homophily report";
    let mut homophily = Vec::new();
    for (name, g, s) in [("source", source, &ss), ("target", target, &ts)] {
        if g.labels().is_some() {
            homophily.extend(homophily_report(name, g, s, cfg.hops, cfg.topk).map_err(|source| PipelineError::Graph { stage, source })?);
        }
    }
    let structural_difference = if source.n().max(target.n()) <= STRUCTURAL_DIFFERENCE_LIMIT {
        Some(structural_difference(&ss, &ts).map_err(|source| PipelineError::Graph { stage: "structural difference", source })?)
    } else {
        log::warn!("structural difference skipped above {STRUCTURAL_DIFFERENCE_LIMIT} nodes");
        None
    };
    Ok(metrics(cfg, training, final_accuracy, homophily, structural_difference, started))
}

/// Inputs of a source-only baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    /// Both filters run on the original graph instead of reconstructed structures.
    OriginalGraph,
    /// No graph at all: both encoders see the raw features.
    RawFeatures,
}

/// The same encoders and classifier trained on the source with
/// cross-entropy only. Reconstruction, alignment, correlation reduction
/// and feature reconstruction are all off, so the target is never seen
/// during training.
pub fn run_source_only(source: &Graph, target: &Graph, cfg: &RunConfig, baseline: Baseline) -> Result<RunMetrics, PipelineError> {
    cfg.validate()?;
    let started = Instant::now();
    let (labels, classes) = check_inputs(source, target)?;
    let (sb, tb) = match baseline {
        Baseline::RawFeatures => (FilterBank::identity(source.features()), FilterBank::identity(target.features())),
        Baseline::OriginalGraph => {
            let original = |g: &Graph| ReconstructedStructures {
                a_o: g.adjacency().clone(),
                a_e: g.adjacency().clone(),
            };
            filter_banks(source, target, &original(source), &original(target), cfg.order)?
        }
    };
    let weights = LossWeights {
        mu1: 0.0,
        mu2: 0.0,
        mu_cr: 0.0,
        ..cfg.loss_weights()
    };
    let training = train(&sb, &labels, &tb, classes, &weights, cfg)?;
    let final_accuracy = target_accuracy(&training.state, &tb, target)?;
    Ok(metrics(cfg, training, final_accuracy, Vec::new(), None, started))
}

fn metrics(
    cfg: &RunConfig,
    t: Training,
    final_accuracy: Option<f64>,
    homophily: Vec<HomophilyRow>,
    structural_difference: Option<f64>,
    started: Instant,
) -> RunMetrics {
    RunMetrics {
        ablation: cfg.ablation,
        seed: cfg.seed,
        epochs: cfg.epochs,
        loss_cr: t.loss_cr,
        loss_re: t.loss_re,
        loss_a: t.loss_a,
        loss_ce: t.loss_ce,
        loss_total: t.loss_total,
        gamma: t.gamma,
        final_accuracy,
        homophily,
        structural_difference,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    }
}

/// The config a given ablation tag runs with.
pub fn ablation_variant(cfg: &RunConfig, tag: &str) -> Result<RunConfig, PipelineError> {
    Ok(RunConfig {
        ablation: tag.parse()?,
        ..cfg.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn accuracy_examples() {
        assert_eq!(evaluate_accuracy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
        assert_eq!(evaluate_accuracy(&[0, 0], &[1, 1]).unwrap(), 0.0);
        assert!((evaluate_accuracy(&[0, 1, 2, 0, 0], &[0, 1, 2, 1, 1]).unwrap() - 0.6).abs() < 1e-15);
        assert!(evaluate_accuracy(&[], &[]).is_err());
        assert!(evaluate_accuracy(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn identity_gap_is_one() {
        let a = Array2::<f64>::eye(3) * 2.0;
        let b = Array2::<f64>::eye(3);
        assert!((laplacian_gap(&a, &b) - 1.0).abs() < 1e-12);
        assert_eq!(laplacian_gap(&a, &a), 0.0);
    }

    #[test]
    fn cross_size_gap_uses_padded_spectra() {
        let a = array![[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]];
        let b = Array2::from_diag(&array![0.5, 1.5, 2.5, 3.5]);
        // spectrum of the path Laplacian is {0, 1, 3}; padded {0, 0, 1, 3}
        let want = ((0.0f64 - 0.5).powi(2) + (0.0f64 - 1.5).powi(2) + (1.0f64 - 2.5).powi(2) + (3.0f64 - 3.5).powi(2)).sqrt();
        assert!((laplacian_gap(&a, &b) - want).abs() < 1e-10);
    }

    #[test]
    fn ablation_tags_round_trip() {
        for a in Ablation::ALL {
            assert_eq!(a.as_str().parse::<Ablation>().unwrap(), a);
        }
        assert!("rsgda4".parse::<Ablation>().is_err());
        let cfg = RunConfig::default();
        assert_eq!(ablation_variant(&cfg, "no_cr").unwrap().loss_weights().mu_cr, 0.0);
        assert_eq!(ablation_variant(&cfg, "no_re").unwrap().loss_weights().mu1, 0.0);
    }

    #[test]
    fn config_ranges_are_enforced() {
        assert!(RunConfig::default().validate().is_ok());
        assert!(RunConfig { lr: 1e-2, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { weight_decay: 0.0, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { beta: 0.5, ..RunConfig::default() }.validate().is_err());
    }

    #[test]
    fn random_split_partitions_edges() {
        let x = Array2::zeros((5, 1));
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)], x, None).unwrap();
        let s = random_split(&g, 3);
        let support = |m: &GraphMatrix| {
            m.triplets().into_iter().filter(|t| t.0 < t.1).map(|t| (t.0, t.1)).collect::<Vec<_>>()
        };
        let (a, b) = (support(&s.a_o), support(&s.a_e));
        assert_eq!(a.len() + b.len(), 6);
        assert!(a.iter().all(|e| !b.contains(e)));
        for m in [&s.a_o, &s.a_e] {
            for r in m.row_sums().iter().filter(|r| **r > 0.0) {
                assert!((r - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(random_split(&g, 3), s);
    }
}
