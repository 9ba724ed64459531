use rayon::prelude::*;

use super::{apply_seeds, PropagationConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scores::{EdgeScores, FinalScores, NodeScores};

/// Sum of incident edge weights per node.
pub(crate) fn weighted_degrees(g: &Graph, weights: &[f64]) -> Vec<f64> {
    (0..g.node_count())
        .into_par_iter()
        .map(|u| g.neighbor_edges(u).iter().map(|&e| weights[e as usize]).sum())
        .collect()
}

/// One walk step: every node splits its score across incident edges in
/// proportion to edge weight. Isolated nodes keep their score; nodes whose
/// weights sum to zero send nothing.
pub(crate) fn walk_step(g: &Graph, weights: &[f64], norm: &[f64], prev: &[f64], next: &mut [f64]) {
    next.par_iter_mut().enumerate().for_each(|(v, out)| {
        if g.degree(v) == 0 {
            *out = prev[v];
            return;
        }
        let mut acc = 0.0;
        for (&u, &e) in g.neighbors(v).iter().zip(g.neighbor_edges(v)) {
            let u = u as usize;
            if norm[u] > 0.0 {
                acc += prev[u] * (weights[e as usize] / norm[u]);
            }
        }
        *out = acc;
    });
}

/// Runs `iterations` walk steps from `init`. `after_step` may adjust each
/// new vector (seed pinning, restarts).
pub(crate) fn run_walk(
    g: &Graph,
    weights: &[f64],
    init: Vec<f64>,
    iterations: usize,
    mut after_step: impl FnMut(&mut [f64]),
) -> Vec<f64> {
    let norm = weighted_degrees(g, weights);
    let mut cur = init;
    let mut next = vec![0.0; cur.len()];
    for _ in 0..iterations {
        walk_step(g, weights, &norm, &cur, &mut next);
        after_step(&mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

pub(crate) fn check_lengths(g: &Graph, nodes: usize, edges: usize) -> Result<()> {
    if nodes != g.node_count() {
        return Err(Error::LengthMismatch {
            what: "node scores",
            expected: g.node_count(),
            actual: nodes,
        });
    }
    if edges != g.edge_count() {
        return Err(Error::LengthMismatch {
            what: "edge scores",
            expected: g.edge_count(),
            actual: edges,
        });
    }
    Ok(())
}

/// Weighted random walk: start from the local scores (seeds at 0.9 / 0.1)
/// and apply `S(v) <- sum_u S(u) * S_uv / sum_w S_uw` for `d` rounds.
pub fn weighted_random_walk(
    g: &Graph,
    node_scores: &NodeScores,
    edge_scores: &EdgeScores,
    cfg: &PropagationConfig,
) -> Result<FinalScores> {
    check_lengths(g, node_scores.len(), edge_scores.len())?;
    cfg.seeds.check_range(g.node_count())?;
    let d = cfg.resolved_iterations(g.node_count())?;
    let weights = edge_scores.as_slice();
    let mut init = node_scores.as_slice().to_vec();
    apply_seeds(&mut init, &cfg.seeds);
    let mut out = run_walk(g, weights, init, d, |s| {
        if cfg.pin_seeds {
            apply_seeds(s, &cfg.seeds);
        }
    });
    if cfg.degree_normalize {
        let norm = weighted_degrees(g, weights);
        for (s, w) in out.iter_mut().zip(norm) {
            if w > 0.0 {
                *s /= w;
            }
        }
    }
    FinalScores::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::TrainingSet;
    use crate::propagate::Engine;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(d: usize) -> PropagationConfig {
        PropagationConfig::new(Engine::RandomWalk).with_iterations(d)
    }

    #[test]
    fn two_nodes_swap() {
        let (g, _) = Graph::from_edges(2, [(0, 1)]).unwrap();
        let n = NodeScores::new(vec![0.8, 0.3]).unwrap();
        let e = EdgeScores::new(vec![0.4]).unwrap();
        let f = weighted_random_walk(&g, &n, &e, &cfg(1)).unwrap();
        assert_eq!(f.as_slice(), &[0.3, 0.8]);
        let f = weighted_random_walk(&g, &n, &e, &cfg(2)).unwrap();
        assert_eq!(f.as_slice(), &[0.8, 0.3]);
    }

    #[test]
    fn three_node_path_by_hand() {
        let (g, _) = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let n = NodeScores::new(vec![0.9, 0.5, 0.1]).unwrap();
        let e = EdgeScores::new(vec![0.9, 0.1]).unwrap();
        let f = weighted_random_walk(&g, &n, &e, &cfg(1)).unwrap();
        let expected = [0.45, 1.0, 0.05];
        for (a, b) in f.as_slice().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn isolated_node_keeps_score_and_seeds_apply() {
        let (g, _) = Graph::from_edges(3, [(0, 1)]).unwrap();
        let n = NodeScores::new(vec![0.5, 0.5, 0.3]).unwrap();
        let e = EdgeScores::new(vec![0.9]).unwrap();
        let seeds = TrainingSet::new(vec![0], vec![2]).unwrap();
        let f = weighted_random_walk(&g, &n, &e, &cfg(1).with_seeds(seeds.clone())).unwrap();
        assert_eq!(f.as_slice(), &[0.5, 0.9, 0.1]);
        let mut pinned = cfg(1).with_seeds(seeds);
        pinned.pin_seeds = true;
        let f = weighted_random_walk(&g, &n, &e, &pinned).unwrap();
        assert_eq!(f.as_slice(), &[0.9, 0.9, 0.1]);
    }

    #[test]
    fn errors_on_bad_inputs() {
        let (g, _) = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let n = NodeScores::new(vec![0.5; 3]).unwrap();
        let short = EdgeScores::new(vec![0.5]).unwrap();
        assert!(weighted_random_walk(&g, &n, &short, &cfg(1)).is_err());
        let e = EdgeScores::new(vec![0.5; 2]).unwrap();
        assert!(weighted_random_walk(&g, &n, &e, &cfg(0)).is_err());
    }

    #[test]
    fn raising_one_initial_score_never_lowers_any_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let n = 12;
            let edges: Vec<(u32, u32)> = (0..30)
                .map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32)))
                .collect();
            let (g, _) = Graph::from_edges(n, edges).unwrap();
            let e = EdgeScores::new((0..g.edge_count()).map(|_| rng.gen_range(0.1..0.9)).collect()).unwrap();
            let base: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..0.8)).collect();
            let mut raised = base.clone();
            raised[rng.gen_range(0..n)] += 0.1;
            for d in 1..6 {
                let a = weighted_random_walk(&g, &NodeScores::new(base.clone()).unwrap(), &e, &cfg(d)).unwrap();
                let b = weighted_random_walk(&g, &NodeScores::new(raised.clone()).unwrap(), &e, &cfg(d)).unwrap();
                for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                    assert!(y >= x);
                }
            }
        }
    }
}
