//! Per-node and per-edge score tables.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Lower bound of every local trust score.
pub const SCORE_MIN: f64 = 0.1;
/// Upper bound of every local trust score.
pub const SCORE_MAX: f64 = 0.9;
/// Score given to benign training seeds.
pub const SEED_BENIGN_SCORE: f64 = 0.9;
/// Score given to sybil training seeds.
pub const SEED_SYBIL_SCORE: f64 = 0.1;

fn check_local(what: &'static str, values: &[f64]) -> Result<()> {
    for &s in values {
        if !(SCORE_MIN..=SCORE_MAX).contains(&s) {
            return Err(Error::OutOfRange {
                what,
                value: s,
                range: "[0.1, 0.9]",
            });
        }
    }
    Ok(())
}

/// Local node trust scores `S_v`: probability that `v` is benign, in `[0.1, 0.9]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeScores(Vec<f64>);

impl NodeScores {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        check_local("node score", &scores)?;
        Ok(Self(scores))
    }

    pub fn uniform(node_count: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; node_count])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Local edge trust scores `S_{u,v}` indexed by undirected edge id.
///
/// Symmetry holds by construction: both orientations of an edge share an id.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeScores(Vec<f64>);

impl EdgeScores {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        check_local("edge score", &scores)?;
        Ok(Self(scores))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, edge: usize) -> f64 {
        self.0[edge]
    }

    /// Score of edge `{u, v}`, if the edge exists.
    pub fn between(&self, g: &Graph, u: usize, v: usize) -> Option<f64> {
        g.edge_id(u, v).map(|e| self.0[e])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Non-negative walk weights per undirected edge id. Unlike [`EdgeScores`]
/// these may be 0 or exceed 0.9.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights(Vec<f64>);

impl EdgeWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        for &w in &weights {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::OutOfRange {
                    what: "edge weight",
                    value: w,
                    range: "[0, inf)",
                });
            }
        }
        Ok(Self(weights))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl From<&EdgeScores> for EdgeWeights {
    fn from(s: &EdgeScores) -> Self {
        Self(s.0.clone())
    }
}

/// Scores after propagation, one per node.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalScores(Vec<f64>);

impl FinalScores {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = scores.iter().find(|s| !s.is_finite()) {
            return Err(Error::NonFinite(format!("final score {bad}")));
        }
        Ok(Self(scores))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_scores_are_range_checked() {
        assert!(NodeScores::new(vec![0.1, 0.5, 0.9]).is_ok());
        assert!(NodeScores::new(vec![0.0]).is_err());
        assert!(EdgeScores::new(vec![0.95]).is_err());
        assert!(NodeScores::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn weights_and_final_scores_reject_nan() {
        assert!(EdgeWeights::new(vec![0.0, 3.0]).is_ok());
        assert!(EdgeWeights::new(vec![-1.0]).is_err());
        assert!(FinalScores::new(vec![f64::INFINITY]).is_err());
    }
}
