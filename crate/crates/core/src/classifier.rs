//! Local classifiers: node trust scores from a logistic model, edge trust
//! scores from defaults or neighborhood similarity, and threshold selection.

use std::fmt::Write as _;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::sorted_intersection_len;
use crate::graph::{Graph, Label, LabelMap, NodeId};
pub use crate::scores::{EdgeScores, NodeScores};
use crate::scores::{SCORE_MAX, SCORE_MIN};

/// Labeled seed nodes, kept sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TrainingSet {
    benign: Vec<NodeId>,
    sybil: Vec<NodeId>,
}

impl TrainingSet {
    pub fn new(mut benign: Vec<NodeId>, mut sybil: Vec<NodeId>) -> Result<Self> {
        benign.sort_unstable();
        benign.dedup();
        sybil.sort_unstable();
        sybil.dedup();
        if let Some(v) = benign.iter().find(|v| sybil.binary_search(v).is_ok()) {
            return Err(Error::invalid(format!("node {v} is both a benign and a sybil seed")));
        }
        Ok(Self { benign, sybil })
    }

    /// Uniformly samples `n_benign` benign and `n_sybil` sybil nodes.
    pub fn sample(labels: &LabelMap, n_benign: usize, n_sybil: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut pick = |pool: Vec<NodeId>, k: usize, what: &str| -> Result<Vec<NodeId>> {
            if k > pool.len() {
                return Err(Error::invalid(format!(
                    "cannot sample {k} {what} nodes from {} available",
                    pool.len()
                )));
            }
            Ok(index::sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect())
        };
        let benign = pick(labels.nodes_with(Label::Benign), n_benign, "benign")?;
        let sybil = pick(labels.nodes_with(Label::Sybil), n_sybil, "sybil")?;
        Self::new(benign, sybil)
    }

    /// Every labeled node of `labels`.
    pub fn from_labels(labels: &LabelMap) -> Self {
        Self {
            benign: labels.nodes_with(Label::Benign),
            sybil: labels.nodes_with(Label::Sybil),
        }
    }

    pub fn benign(&self) -> &[NodeId] {
        &self.benign
    }

    pub fn sybil(&self) -> &[NodeId] {
        &self.sybil
    }

    pub fn len(&self) -> usize {
        self.benign.len() + self.sybil.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.benign.binary_search(&v).is_ok() || self.sybil.binary_search(&v).is_ok()
    }

    /// `(node, label)` pairs, benign first.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, Label)> + '_ {
        self.benign
            .iter()
            .map(|&v| (v, Label::Benign))
            .chain(self.sybil.iter().map(|&v| (v, Label::Sybil)))
    }

    pub fn max_node(&self) -> Option<NodeId> {
        self.benign.iter().chain(&self.sybil).copied().max()
    }

    pub fn check_range(&self, node_count: usize) -> Result<()> {
        match self.max_node() {
            Some(v) if v as usize >= node_count => Err(Error::NodeOutOfRange {
                node: v as usize,
                node_count,
            }),
            _ => Ok(()),
        }
    }

    /// Copy of `labels` with every seed set to `Unknown`, leaving the evaluation set.
    pub fn mask(&self, labels: &LabelMap) -> LabelMap {
        let mut out = labels.clone();
        for (v, _) in self.iter() {
            if (v as usize) < out.node_count() {
                out.set(v as usize, Label::Unknown);
            }
        }
        out
    }

    /// Stratified split into `folds` parts; seed `i` of each class goes to fold `i % folds`.
    pub fn stratified_folds(&self, folds: usize) -> Result<Vec<TrainingSet>> {
        if folds < 2 {
            return Err(Error::invalid("cross-validation needs at least 2 folds"));
        }
        if self.benign.len() < folds || self.sybil.len() < folds {
            return Err(Error::invalid(format!(
                "{folds} folds need at least {folds} seeds of each class ({} benign, {} sybil)",
                self.benign.len(),
                self.sybil.len()
            )));
        }
        let split = |nodes: &[NodeId], f: usize| {
            nodes
                .iter()
                .enumerate()
                .filter(|(i, _)| i % folds == f)
                .map(|(_, &v)| v)
                .collect::<Vec<_>>()
        };
        Ok((0..folds)
            .map(|f| TrainingSet {
                benign: split(&self.benign, f),
                sybil: split(&self.sybil, f),
            })
            .collect())
    }

    /// Seeds not in `held_out`.
    pub fn without(&self, held_out: &TrainingSet) -> TrainingSet {
        let keep = |nodes: &[NodeId], drop: &[NodeId]| {
            nodes
                .iter()
                .copied()
                .filter(|v| drop.binary_search(v).is_err())
                .collect::<Vec<_>>()
        };
        TrainingSet {
            benign: keep(&self.benign, &held_out.benign),
            sybil: keep(&self.sybil, &held_out.sybil),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameters {
    pub learning_rate: f64,
    pub l2: f64,
    pub epochs: usize,
    /// Training stops early once the gradient norm drops below this.
    pub tolerance: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            l2: 1e-3,
            epochs: 500,
            tolerance: 1e-8,
        }
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Regularized mean logistic loss over standardized rows.
///
/// Parameters are packed as `[w_0, .., w_{d-1}, bias]`; the bias is not penalized.
#[derive(Debug, Clone)]
pub struct TrainingProblem {
    rows: Vec<Vec<f64>>,
    benign: Vec<bool>,
    l2: f64,
}

impl TrainingProblem {
    pub fn new(rows: Vec<Vec<f64>>, benign: Vec<bool>, l2: f64) -> Self {
        assert_eq!(rows.len(), benign.len());
        Self { rows, benign, l2 }
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    fn margin(&self, row: &[f64], params: &[f64]) -> f64 {
        let d = row.len();
        row.iter().zip(&params[..d]).map(|(x, w)| x * w).sum::<f64>() + params[d]
    }

    pub fn loss(&self, params: &[f64]) -> f64 {
        let d = self.dim();
        let n = self.rows.len() as f64;
        let data: f64 = self
            .rows
            .iter()
            .zip(&self.benign)
            .map(|(row, &y)| {
                let z = self.margin(row, params);
                if y {
                    softplus(-z)
                } else {
                    softplus(z)
                }
            })
            .sum();
        let reg: f64 = params[..d].iter().map(|w| w * w).sum();
        data / n + 0.5 * self.l2 * reg
    }

    pub fn gradient(&self, params: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let n = self.rows.len() as f64;
        let mut grad = vec![0.0; d + 1];
        for (row, &y) in self.rows.iter().zip(&self.benign) {
            let z = self.margin(row, params);
            // sigma(z) - y, written so that flipping (y, z) negates it exactly.
            let residual = if y { -sigmoid(-z) } else { sigmoid(z) };
            for (g, x) in grad.iter_mut().zip(row) {
                *g += residual * x;
            }
            grad[d] += residual;
        }
        for g in &mut grad {
            *g /= n;
        }
        for (g, w) in grad.iter_mut().zip(&params[..d]) {
            *g += self.l2 * w;
        }
        grad
    }
}

/// A trained logistic node classifier with its standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalModel {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyper: Hyperparameters,
    /// Training loss after each epoch.
    pub loss_history: Vec<f64>,
}

const MODEL_HEADER: &str = "trustprop-model v1";

impl LocalModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }

    /// Unnormalized benign probability `logistic(w·x + b)`.
    pub fn raw_probability(&self, x: &[f64]) -> f64 {
        let z: f64 = self
            .standardize(x)
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| x * w)
            .sum::<f64>()
            + self.bias;
        sigmoid(z)
    }

    pub fn predict_scores<R: AsRef<[f64]> + Sync>(&self, features: &[R]) -> Result<NodeScores> {
        let scores = features
            .par_iter()
            .map(|x| normalize_probability(self.raw_probability(x.as_ref())))
            .collect();
        NodeScores::new(scores)
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        let _ = writeln!(s, "{MODEL_HEADER}");
        let _ = writeln!(s, "dim {}", self.dim());
        let _ = writeln!(s, "mean {}", join(&self.mean));
        let _ = writeln!(s, "scale {}", join(&self.scale));
        let _ = writeln!(s, "weights {}", join(&self.weights));
        let _ = writeln!(s, "bias {}", self.bias);
        let _ = writeln!(s, "learning_rate {}", self.hyper.learning_rate);
        let _ = writeln!(s, "l2 {}", self.hyper.l2);
        let _ = writeln!(s, "epochs {}", self.hyper.epochs);
        let _ = writeln!(s, "tolerance {}", self.hyper.tolerance);
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some(MODEL_HEADER) {
            return Err(Error::invalid(format!("model file must start with `{MODEL_HEADER}`")));
        }
        let mut fields = std::collections::HashMap::new();
        for line in lines {
            let (key, rest) = line.trim().split_once(' ').unwrap_or((line.trim(), ""));
            fields.insert(key.to_string(), rest.trim().to_string());
        }
        let get = |k: &str| {
            fields
                .get(k)
                .ok_or_else(|| Error::invalid(format!("model file missing `{k}`")))
        };
        let nums = |k: &str| -> Result<Vec<f64>> {
            get(k)?
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|e| Error::invalid(format!("model `{k}`: {e}")))
                })
                .collect()
        };
        let num = |k: &str| -> Result<f64> {
            match nums(k)?.as_slice() {
                [x] => Ok(*x),
                _ => Err(Error::invalid(format!("model `{k}` must hold one number"))),
            }
        };
        let dim = num("dim")? as usize;
        let model = LocalModel {
            mean: nums("mean")?,
            scale: nums("scale")?,
            weights: nums("weights")?,
            bias: num("bias")?,
            hyper: Hyperparameters {
                learning_rate: num("learning_rate")?,
                l2: num("l2")?,
                epochs: num("epochs")? as usize,
                tolerance: num("tolerance")?,
            },
            loss_history: Vec::new(),
        };
        if [model.mean.len(), model.scale.len(), model.weights.len()] != [dim; 3] {
            return Err(Error::invalid("model vectors disagree with `dim`"));
        }
        if model.scale.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::invalid("model scales must be positive"));
        }
        Ok(model)
    }
}

/// Affine map of a probability onto `[0.1, 0.9]`.
pub fn normalize_probability(p: f64) -> f64 {
    (SCORE_MIN + (SCORE_MAX - SCORE_MIN) * p).clamp(SCORE_MIN, SCORE_MAX)
}

/// Fits a standardized, L2-regularized logistic model by full-batch
/// gradient descent from zero weights.
pub fn train<R: AsRef<[f64]>>(features: &[R], set: &TrainingSet, hyper: &Hyperparameters) -> Result<LocalModel> {
    if set.benign().is_empty() || set.sybil().is_empty() {
        return Err(Error::SingleClass);
    }
    set.check_range(features.len())?;
    let raw: Vec<(&[f64], bool)> = set
        .iter()
        .map(|(v, l)| (features[v as usize].as_ref(), l == Label::Benign))
        .collect();
    let dim = raw[0].0.len();
    for (x, _) in &raw {
        if x.len() != dim {
            return Err(Error::LengthMismatch {
                what: "feature vector",
                expected: dim,
                actual: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("training feature".into()));
        }
    }
    let n = raw.len() as f64;
    let mean: Vec<f64> = (0..dim)
        .map(|j| raw.iter().map(|(x, _)| x[j]).sum::<f64>() / n)
        .collect();
    let scale: Vec<f64> = (0..dim)
        .map(|j| {
            let var = raw.iter().map(|(x, _)| (x[j] - mean[j]).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            if sd > 0.0 && sd.is_finite() {
                sd
            } else {
                1.0
            }
        })
        .collect();
    let mut model = LocalModel {
        mean,
        scale,
        weights: vec![0.0; dim],
        bias: 0.0,
        hyper: *hyper,
        loss_history: Vec::with_capacity(hyper.epochs),
    };
    let problem = TrainingProblem::new(
        raw.iter().map(|(x, _)| model.standardize(x)).collect(),
        raw.iter().map(|&(_, y)| y).collect(),
        hyper.l2,
    );
    let mut params = vec![0.0; dim + 1];
    for _ in 0..hyper.epochs {
        let grad = problem.gradient(&params);
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm < hyper.tolerance {
            break;
        }
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= hyper.learning_rate * g;
        }
        model.loss_history.push(problem.loss(&params));
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("model parameters".into()));
    }
    model.bias = params[dim];
    params.truncate(dim);
    model.weights = params;
    Ok(model)
}

/// Every edge gets `value`.
pub fn edge_scores_default(g: &Graph, value: f64) -> Result<EdgeScores> {
    if !(SCORE_MIN..=SCORE_MAX).contains(&value) {
        return Err(Error::OutOfRange {
            what: "default edge score",
            value,
            range: "[0.1, 0.9]",
        });
    }
    EdgeScores::new(vec![value; g.edge_count()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityMetric {
    Cosine,
    Jaccard,
    AdamicAdar,
}

impl std::str::FromStr for SimilarityMetric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(Self::Cosine),
            "jaccard" => Ok(Self::Jaccard),
            "adamic-adar" => Ok(Self::AdamicAdar),
            _ => Err(Error::invalid(format!("unknown similarity metric `{s}`"))),
        }
    }
}

/// How raw similarities become scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimilarityRescale {
    /// Map the graph's observed `[min, max]` onto `[0.1, 0.9]`.
    #[default]
    MinMax,
    /// Graph-independent: `0.1 + 0.8 s` for bounded metrics, `0.1 + 0.8 s/(1+s)` for Adamic–Adar.
    Fixed,
}

/// Raw per-edge similarity. Each endpoint's neighborhood excludes the other endpoint.
pub fn edge_similarity(g: &Graph, metric: SimilarityMetric) -> Vec<f64> {
    let edges: Vec<(NodeId, NodeId)> = g.edges().collect();
    edges
        .par_iter()
        .map(|&(u, v)| {
            let (nu, nv) = (g.neighbors(u as usize), g.neighbors(v as usize));
            let (du, dv) = (nu.len() - 1, nv.len() - 1);
            match metric {
                SimilarityMetric::AdamicAdar => {
                    let (mut i, mut j, mut acc) = (0, 0, 0.0);
                    while i < nu.len() && j < nv.len() {
                        match nu[i].cmp(&nv[j]) {
                            std::cmp::Ordering::Less => i += 1,
                            std::cmp::Ordering::Greater => j += 1,
                            std::cmp::Ordering::Equal => {
                                acc += 1.0 / (g.degree(nu[i] as usize) as f64).ln();
                                i += 1;
                                j += 1;
                            }
                        }
                    }
                    acc
                }
                // u is not in N(u) and v is not in N(v), so the raw
                // intersection already excludes both endpoints.
                SimilarityMetric::Jaccard => {
                    let common = sorted_intersection_len(nu, nv);
                    let union = du + dv - common;
                    if union == 0 {
                        0.0
                    } else {
                        common as f64 / union as f64
                    }
                }
                SimilarityMetric::Cosine => {
                    let common = sorted_intersection_len(nu, nv);
                    if du == 0 || dv == 0 {
                        0.0
                    } else {
                        common as f64 / ((du * dv) as f64).sqrt()
                    }
                }
            }
        })
        .collect()
}

pub fn edge_scores_similarity(g: &Graph, metric: SimilarityMetric, rescale: SimilarityRescale) -> Result<EdgeScores> {
    let sim = edge_similarity(g, metric);
    let span = SCORE_MAX - SCORE_MIN;
    let scores = match rescale {
        SimilarityRescale::MinMax => {
            let lo = sim.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = sim.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if sim.is_empty() || hi - lo <= 0.0 {
                vec![0.5; sim.len()]
            } else {
                sim.iter()
                    .map(|s| (SCORE_MIN + span * (s - lo) / (hi - lo)).clamp(SCORE_MIN, SCORE_MAX))
                    .collect()
            }
        }
        SimilarityRescale::Fixed => sim
            .iter()
            .map(|&s| {
                let unit = match metric {
                    SimilarityMetric::AdamicAdar => s / (1.0 + s),
                    _ => s,
                };
                normalize_probability(unit)
            })
            .collect(),
    };
    EdgeScores::new(scores)
}

/// Threshold grid `0.05, 0.10, .., 0.95`.
pub fn threshold_grid() -> Vec<f64> {
    (1..20).map(|i| i as f64 / 20.0).collect()
}

/// Accuracy of `score > threshold ⇒ benign` over `set`.
fn seed_accuracy(scores: &[f64], set: &TrainingSet, threshold: f64) -> f64 {
    let correct = set
        .iter()
        .filter(|&(v, l)| (scores[v as usize] > threshold) == (l == Label::Benign))
        .count();
    correct as f64 / set.len() as f64
}

/// Grid threshold maximizing mean held-out accuracy across stratified folds
/// of `train`; ties go to the threshold nearest 0.5, then the lower one.
///
/// `scores` holds one score per node id; for training nodes these should be
/// out-of-fold predictions.
pub fn select_threshold(scores: &[f64], train: &TrainingSet, folds: usize) -> Result<f64> {
    train.check_range(scores.len())?;
    let parts = train.stratified_folds(folds)?;
    let mut best: (f64, f64) = (f64::NEG_INFINITY, 0.5);
    for t in threshold_grid() {
        let acc = parts.iter().map(|p| seed_accuracy(scores, p, t)).sum::<f64>() / folds as f64;
        let better = acc > best.0 || (acc == best.0 && (t - 0.5).abs() < (best.1 - 0.5).abs());
        if better {
            best = (acc, t);
        }
    }
    Ok(best.1)
}
