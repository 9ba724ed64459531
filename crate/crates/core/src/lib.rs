//! Sybil detection by fusing local trust scores with graph structure.
//!
//! A local classifier scores nodes (and optionally edges) in `[0.1, 0.9]`;
//! weighted random walk or loopy belief propagation then spreads those
//! scores over the social graph, and the final scores rank nodes for review.

pub mod classifier;
pub mod error;
pub mod features;
pub mod graph;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod propagate;
pub mod scores;
pub mod seed;
pub mod synth;

pub use error::{Error, Result};
