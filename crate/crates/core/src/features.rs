//! Structural node features: request-acceptance ratios on the directed graph
//! and the local clustering coefficient on the mutualized graph.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Graph, NodeId};

/// Number of features in a [`FeatureVector`].
pub const FEATURE_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FeatureVector {
    pub req_in: f64,
    pub req_out: f64,
    pub cc: f64,
}

impl FeatureVector {
    pub fn to_array(self) -> [f64; FEATURE_DIM] {
        [self.req_in, self.req_out, self.cc]
    }
}

/// Size of the intersection of two sorted id lists.
pub(crate) fn sorted_intersection_len(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn reciprocal(g: &DirectedGraph, v: usize) -> usize {
    sorted_intersection_len(g.in_neighbors(v), g.out_neighbors(v))
}

/// `|In(v) ∩ Out(v)| / |In(v)|`, or 0 when `v` has no followers.
pub fn req_in(g: &DirectedGraph, v: usize) -> f64 {
    match g.in_neighbors(v).len() {
        0 => 0.0,
        d => reciprocal(g, v) as f64 / d as f64,
    }
}

/// `|In(v) ∩ Out(v)| / |Out(v)|`, or 0 when `v` follows nobody.
pub fn req_out(g: &DirectedGraph, v: usize) -> f64 {
    match g.out_neighbors(v).len() {
        0 => 0.0,
        d => reciprocal(g, v) as f64 / d as f64,
    }
}

/// Fraction of neighbor pairs of `v` that are themselves adjacent; 0 for degree ≤ 1.
pub fn clustering_coefficient(g: &Graph, v: usize) -> f64 {
    let nei = g.neighbors(v);
    let k = nei.len();
    if k <= 1 {
        return 0.0;
    }
    // Each linked pair is seen from both ends, matching the ordered-pair denominator.
    let links: usize = nei
        .iter()
        .map(|&u| sorted_intersection_len(g.neighbors(u as usize), nei))
        .sum();
    links as f64 / (k * (k - 1)) as f64
}

/// Features for every node. Request ratios come from `directed`, the
/// clustering coefficient from `undirected`; both must have the same node count.
pub fn extract_features(directed: &DirectedGraph, undirected: &Graph) -> Result<Vec<FeatureVector>> {
    if directed.node_count() != undirected.node_count() {
        return Err(Error::LengthMismatch {
            what: "undirected graph nodes",
            expected: directed.node_count(),
            actual: undirected.node_count(),
        });
    }
    Ok((0..directed.node_count())
        .into_par_iter()
        .map(|v| FeatureVector {
            req_in: req_in(directed, v),
            req_out: req_out(directed, v),
            cc: clustering_coefficient(undirected, v),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::mutualize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn directed(n: usize, edges: &[(u32, u32)]) -> DirectedGraph {
        DirectedGraph::from_edges(n, edges.iter().copied()).unwrap().0
    }

    #[test]
    fn request_ratios() {
        // v = 0, In = {1, 2}, Out = {2, 3}
        let g = directed(4, &[(1, 0), (2, 0), (0, 2), (0, 3)]);
        assert_eq!(req_in(&g, 0), 0.5);
        assert_eq!(req_out(&g, 0), 0.5);
        // node 3 has In = {0}, Out = {}
        assert_eq!(req_out(&g, 3), 0.0);
        assert_eq!(req_in(&g, 3), 0.0);
        // node 1 has In = {}, Out = {0}
        assert_eq!(req_in(&g, 1), 0.0);
        assert_eq!(req_out(&g, 1), 0.0);
        // node 2: In = {0}, Out = {0}
        assert_eq!(req_in(&g, 2), 1.0);
        assert_eq!(req_out(&g, 2), 1.0);
    }

    #[test]
    fn clustering_degenerate_and_complete() {
        let (g, _) = Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
        assert_eq!(clustering_coefficient(&g, 0), 1.0);
        assert_eq!(clustering_coefficient(&g, 3), 0.0);
        assert!((clustering_coefficient(&g, 2) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn clustering_matches_triangle_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let n = 20;
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    if rng.gen_bool(0.25) {
                        edges.push((u, v));
                    }
                }
            }
            let (g, _) = Graph::from_edges(n, edges).unwrap();
            for v in 0..n {
                let mut triangles = 0usize;
                for i in 0..n {
                    for j in i + 1..n {
                        if g.has_edge(v, i) && g.has_edge(v, j) && g.has_edge(i, j) {
                            triangles += 1;
                        }
                    }
                }
                let k = g.degree(v);
                let expected = if k <= 1 {
                    0.0
                } else {
                    2.0 * triangles as f64 / (k * (k - 1)) as f64
                };
                assert!((clustering_coefficient(&g, v) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn extraction_maps_directed_and_mutual_views() {
        let d = directed(3, &[(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]);
        let u = mutualize(&d);
        let f = extract_features(&d, &u).unwrap();
        assert!(f.iter().all(|x| x.to_array() == [1.0, 1.0, 1.0]));
        assert!(extract_features(&d, &Graph::empty(2)).is_err());
    }
}
