//! Sum-product loopy belief propagation on a binary pairwise MRF.
//!
//! Node potentials are `psi_v(+1) = S_v`, `psi_v(-1) = 1 - S_v`; edge
//! potentials are `S_uv` when the endpoint labels agree and `1 - S_uv` when
//! they differ. Each message is normalized to sum to 1, so only `m(+1)` is
//! stored per directed edge.
//!
//! For an update `u -> v`, let `q` be the normalized product
//! `psi_u(+1) * prod_{s != v} m_{s->u}(+1)` against its `-1` counterpart.
//! The new message is then `m(+1) = q S_uv + (1 - q)(1 - S_uv)`, which is
//! already normalized. `q` is computed from log-odds: the log-odds of `u`'s
//! full belief minus the log-odds of the message from `v`. Products over
//! high-degree nodes therefore never underflow, and `m(+1)` stays between
//! `min(S_uv, 1 - S_uv)` and `max(S_uv, 1 - S_uv)`.

use rayon::prelude::*;

use super::walk::check_lengths;
use super::{apply_seeds, PropagationConfig};
use crate::classifier::sigmoid;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scores::{EdgeScores, FinalScores, NodeScores};

/// Default number of message-passing rounds.
pub const LBP_DEFAULT_ITERATIONS: usize = 8;

fn logit(p: f64) -> f64 {
    p.ln() - (-p).ln_1p()
}

fn check_potentials(what: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        Some(&p) => Err(Error::OutOfRange {
            what,
            value: p,
            range: "(0, 1)",
        }),
        None => Ok(()),
    }
}

/// Log-odds of each node's belief given its potential and incoming messages.
fn belief_log_odds(g: &Graph, prior_logit: &[f64], msg_logit: &[f64], reverse: &[usize], out: &mut [f64]) {
    out.par_iter_mut().enumerate().for_each(|(u, out)| {
        let mut acc = prior_logit[u];
        for slot in g.slot_range(u) {
            acc += msg_logit[reverse[slot]];
        }
        *out = acc;
    });
}

/// Runs `iterations` synchronous rounds and returns `P(X_v = +1)` per node.
pub(crate) fn run_lbp(g: &Graph, node_prior: &[f64], edge_potential: &[f64], iterations: usize) -> Result<Vec<f64>> {
    check_lengths(g, node_prior.len(), edge_potential.len())?;
    check_potentials("node potential", node_prior)?;
    check_potentials("edge potential", edge_potential)?;

    let n = g.node_count();
    let slots = g.slot_count();
    let reverse = g.reverse_slots();
    let sources = g.slot_sources();
    let prior_logit: Vec<f64> = node_prior.iter().map(|&p| logit(p)).collect();

    // Messages start at (1, 1), i.e. (0.5, 0.5) after normalization.
    let mut msg = vec![0.5; slots];
    let mut msg_logit = vec![0.0; slots];
    let mut belief = vec![0.0; n];

    for _ in 0..iterations {
        belief_log_odds(g, &prior_logit, &msg_logit, &reverse, &mut belief);
        msg.par_iter_mut().enumerate().for_each(|(slot, m)| {
            let u = sources[slot] as usize;
            let q = sigmoid(belief[u] - msg_logit[reverse[slot]]);
            let s = edge_potential[g.slot_edge(slot)];
            *m = q * s + (1.0 - q) * (1.0 - s);
        });
        if let Some(bad) = msg.par_iter().find_any(|&&m| !(m.is_finite() && m > 0.0 && m < 1.0)) {
            return Err(Error::NonFinite(format!("lbp message {bad}")));
        }
        msg_logit.par_iter_mut().zip(&msg).for_each(|(l, &m)| *l = logit(m));
    }

    belief_log_odds(g, &prior_logit, &msg_logit, &reverse, &mut belief);
    Ok(belief.into_iter().map(sigmoid).collect())
}

/// Weighted LBP over node and edge trust scores. Seeds get potentials 0.9 / 0.1.
pub fn weighted_lbp(
    g: &Graph,
    node_scores: &NodeScores,
    edge_scores: &EdgeScores,
    cfg: &PropagationConfig,
) -> Result<FinalScores> {
    check_lengths(g, node_scores.len(), edge_scores.len())?;
    cfg.seeds.check_range(g.node_count())?;
    let d = cfg.resolved_iterations(g.node_count())?;
    let mut prior = node_scores.as_slice().to_vec();
    apply_seeds(&mut prior, &cfg.seeds);
    FinalScores::new(run_lbp(g, &prior, edge_scores.as_slice(), d)?)
}
