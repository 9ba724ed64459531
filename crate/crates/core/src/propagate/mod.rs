//! Weighted trust propagation: random walk and loopy belief propagation,
//! plus structure-only baselines expressed through the same engines.
//!
//! Both engines are synchronous: every iteration reads only the previous
//! iteration's buffer, and each output entry is a fixed-order sum over one
//! node's adjacency. Results are therefore bit-identical for any rayon pool
//! size.

mod baselines;
mod lbp;
mod walk;

pub use baselines::{
    cia, integro, integro_edge_weights, perfect_victim_probabilities, sybilbelief, sybilrank, CIA_DEFAULT_RESTART,
};
pub use lbp::{weighted_lbp, LBP_DEFAULT_ITERATIONS};
pub use walk::weighted_random_walk;

use crate::classifier::TrainingSet;
use crate::error::{Error, Result};
use crate::scores::{SEED_BENIGN_SCORE, SEED_SYBIL_SCORE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    RandomWalk,
    Lbp,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::RandomWalk => "rw",
            Engine::Lbp => "lbp",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rw" | "random_walk" | "random-walk" => Ok(Engine::RandomWalk),
            "lbp" => Ok(Engine::Lbp),
            _ => Err(Error::invalid(format!("unknown engine `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationConfig {
    pub engine: Engine,
    /// `None` picks the engine default: `ceil(log2 n)` for the walk, 8 for LBP.
    pub iterations: Option<usize>,
    pub seeds: TrainingSet,
    /// Re-apply seed scores after every walk iteration.
    pub pin_seeds: bool,
    /// Divide walk output by weighted degree.
    pub degree_normalize: bool,
}

impl PropagationConfig {
    pub fn new(engine: Engine) -> Self {
        Self {
            engine,
            iterations: None,
            seeds: TrainingSet::default(),
            pin_seeds: false,
            degree_normalize: false,
        }
    }

    pub fn with_seeds(mut self, seeds: TrainingSet) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn with_iterations(mut self, d: usize) -> Self {
        self.iterations = Some(d);
        self
    }

    /// Resolved iteration count for a graph with `node_count` nodes.
    pub fn resolved_iterations(&self, node_count: usize) -> Result<usize> {
        match self.iterations {
            Some(0) => Err(Error::invalid("iterations must be at least 1")),
            Some(d) => Ok(d),
            None => Ok(match self.engine {
                Engine::RandomWalk => default_walk_iterations(node_count),
                Engine::Lbp => LBP_DEFAULT_ITERATIONS,
            }),
        }
    }
}

/// `ceil(log2 n)`, at least 1.
pub fn default_walk_iterations(node_count: usize) -> usize {
    if node_count <= 2 {
        1
    } else {
        (usize::BITS - (node_count - 1).leading_zeros()) as usize
    }
}

/// Overwrites seed entries with the fixed seed scores.
pub(crate) fn apply_seeds(scores: &mut [f64], seeds: &TrainingSet) {
    for &v in seeds.benign() {
        scores[v as usize] = SEED_BENIGN_SCORE;
    }
    for &v in seeds.sybil() {
        scores[v as usize] = SEED_SYBIL_SCORE;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_iteration_default_is_ceil_log2() {
        assert_eq!(default_walk_iterations(1), 1);
        assert_eq!(default_walk_iterations(2), 1);
        assert_eq!(default_walk_iterations(3), 2);
        assert_eq!(default_walk_iterations(1024), 10);
        assert_eq!(default_walk_iterations(1025), 11);
        assert_eq!(default_walk_iterations(1500), 11);
    }

    #[test]
    fn zero_iterations_rejected() {
        let cfg = PropagationConfig::new(Engine::Lbp).with_iterations(0);
        assert!(cfg.resolved_iterations(10).is_err());
        assert_eq!(PropagationConfig::new(Engine::Lbp).resolved_iterations(10).unwrap(), 8);
    }
}
