//! Structure-based baselines built from the two engines.

use super::default_walk_iterations;
use super::lbp::run_lbp;
use super::walk::{run_walk, weighted_degrees};
use crate::classifier::TrainingSet;
use crate::error::{Error, Result};
use crate::graph::{Graph, Label, LabelMap, NodeId};
use crate::scores::{EdgeWeights, FinalScores, SEED_BENIGN_SCORE, SEED_SYBIL_SCORE};

/// Restart probability used by [`cia`] when none is given.
pub const CIA_DEFAULT_RESTART: f64 = 0.85;

fn iterations_or_default(g: &Graph, d: Option<usize>) -> Result<usize> {
    match d {
        Some(0) => Err(Error::invalid("iterations must be at least 1")),
        Some(d) => Ok(d),
        None => Ok(default_walk_iterations(g.node_count())),
    }
}

fn seed_distribution(n: usize, seeds: &[NodeId]) -> Vec<f64> {
    let mut init = vec![0.0; n];
    let share = 1.0 / seeds.len() as f64;
    for &v in seeds {
        init[v as usize] = share;
    }
    init
}

fn walk_from_benign_seeds(g: &Graph, seeds: &TrainingSet, weights: &[f64], d: Option<usize>) -> Result<FinalScores> {
    if seeds.benign().is_empty() {
        return Err(Error::invalid("walk baseline needs at least one benign seed"));
    }
    seeds.check_range(g.node_count())?;
    let d = iterations_or_default(g, d)?;
    let init = seed_distribution(g.node_count(), seeds.benign());
    let mut out = run_walk(g, weights, init, d, |_| {});
    for (s, w) in out.iter_mut().zip(weighted_degrees(g, weights)) {
        *s = if w > 0.0 { *s / w } else { 0.0 };
    }
    FinalScores::new(out)
}

/// SybilRank: uniform-weight walk from the benign seeds, then divide by degree.
/// Nodes of degree 0 score 0.
pub fn sybilrank(g: &Graph, seeds: &TrainingSet, d: Option<usize>) -> Result<FinalScores> {
    walk_from_benign_seeds(g, seeds, &vec![1.0; g.edge_count()], d)
}

/// CIA-style badness: a restart walk from the Sybil seeds,
/// `x <- (1 - restart) W x + restart * seed_distribution`.
///
/// Higher is more suspicious; rank by `1 - badness`.
pub fn cia(g: &Graph, sybil_seeds: &[NodeId], restart: f64, d: Option<usize>) -> Result<FinalScores> {
    if sybil_seeds.is_empty() {
        return Err(Error::invalid("CIA needs at least one sybil seed"));
    }
    if !(restart > 0.0 && restart <= 1.0) {
        return Err(Error::OutOfRange {
            what: "restart probability",
            value: restart,
            range: "(0, 1]",
        });
    }
    if let Some(&v) = sybil_seeds.iter().find(|&&v| v as usize >= g.node_count()) {
        return Err(Error::NodeOutOfRange {
            node: v as usize,
            node_count: g.node_count(),
        });
    }
    let d = iterations_or_default(g, d)?;
    let mut seeds = sybil_seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    let restart_to = seed_distribution(g.node_count(), &seeds);
    let out = run_walk(g, &vec![1.0; g.edge_count()], restart_to.clone(), d, |x| {
        for (x, r) in x.iter_mut().zip(&restart_to) {
            *x = (1.0 - restart) * *x + restart * r;
        }
    });
    FinalScores::new(out)
}

/// SybilBelief: LBP with seed priors 0.9 / 0.1, 0.5 elsewhere, and one
/// homophily strength on every edge.
pub fn sybilbelief(g: &Graph, seeds: &TrainingSet, homophily: f64, d: Option<usize>) -> Result<FinalScores> {
    seeds.check_range(g.node_count())?;
    let d = match d {
        Some(0) => return Err(Error::invalid("iterations must be at least 1")),
        Some(d) => d,
        None => super::LBP_DEFAULT_ITERATIONS,
    };
    let mut prior = vec![0.5; g.node_count()];
    for &v in seeds.benign() {
        prior[v as usize] = SEED_BENIGN_SCORE;
    }
    for &v in seeds.sybil() {
        prior[v as usize] = SEED_SYBIL_SCORE;
    }
    FinalScores::new(run_lbp(g, &prior, &vec![homophily; g.edge_count()], d)?)
}

/// Edge weights `min(1, beta * (1 - max(p_u, p_v)))` from victim probabilities.
pub fn integro_edge_weights(g: &Graph, victim_prob: &[f64], beta: f64) -> Result<EdgeWeights> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::OutOfRange {
            what: "beta",
            value: beta,
            range: "(0, inf)",
        });
    }
    if victim_prob.len() != g.node_count() {
        return Err(Error::LengthMismatch {
            what: "victim probabilities",
            expected: g.node_count(),
            actual: victim_prob.len(),
        });
    }
    if let Some(&p) = victim_prob.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::OutOfRange {
            what: "victim probability",
            value: p,
            range: "[0, 1]",
        });
    }
    let weights = g
        .edges()
        .map(|(u, v)| {
            let p = victim_prob[u as usize].max(victim_prob[v as usize]);
            (beta * (1.0 - p)).min(1.0)
        })
        .collect();
    EdgeWeights::new(weights)
}

/// Íntegro ranking: SybilRank-style walk over victim-aware edge weights,
/// normalized by weighted degree (0 where that is 0).
pub fn integro(g: &Graph, seeds: &TrainingSet, weights: &EdgeWeights, d: Option<usize>) -> Result<FinalScores> {
    if weights.len() != g.edge_count() {
        return Err(Error::LengthMismatch {
            what: "edge weights",
            expected: g.edge_count(),
            actual: weights.len(),
        });
    }
    walk_from_benign_seeds(g, seeds, weights.as_slice(), d)
}

/// Perfect victim prediction: 1 for benign nodes adjacent to a Sybil, else 0.
pub fn perfect_victim_probabilities(g: &Graph, labels: &LabelMap) -> Vec<f64> {
    (0..g.node_count())
        .map(|v| {
            let victim = labels.get(v) == Label::Benign
                && g.neighbors(v).iter().any(|&u| labels.get(u as usize) == Label::Sybil);
            if victim {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}
