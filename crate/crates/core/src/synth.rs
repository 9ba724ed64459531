//! Synthetic benign/Sybil scenarios and simulated local classifier output.

use std::collections::HashSet;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Label, LabelMap, NodeId};
use crate::scores::{EdgeScores, NodeScores};
use crate::seed;

/// How the benign endpoint of an attack edge is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AttackTargeting {
    /// Uniform over all benign–sybil pairs.
    #[default]
    Uniform,
    /// Benign endpoint drawn proportionally to its benign-region degree.
    DegreeBiased,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub benign_count: usize,
    pub sybil_count: usize,
    /// Average degree inside each region; arrivals attach `round(avg_degree / 2)` edges.
    pub avg_degree: usize,
    pub attack_edge_count: usize,
    pub seed: u64,
    pub targeting: AttackTargeting,
}

impl ScenarioConfig {
    /// 1000 benign, 500 sybil, average degree 10, 1000 attack edges.
    pub fn basic(seed: u64) -> Self {
        Self {
            benign_count: 1000,
            sybil_count: 500,
            avg_degree: 10,
            attack_edge_count: 1000,
            seed,
            targeting: AttackTargeting::Uniform,
        }
    }

    pub fn edges_per_arrival(&self) -> usize {
        self.avg_degree.div_ceil(2).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.benign_count == 0 || self.sybil_count == 0 || self.avg_degree == 0 {
            return Err(Error::invalid("scenario counts must be positive"));
        }
        let m = self.edges_per_arrival();
        if self.benign_count <= m || self.sybil_count <= m {
            return Err(Error::invalid(format!(
                "each region needs more than {m} nodes for average degree {}",
                self.avg_degree
            )));
        }
        let capacity = self.benign_count as u128 * self.sybil_count as u128;
        if self.attack_edge_count as u128 > capacity {
            return Err(Error::invalid(format!(
                "{} attack edges exceed the {capacity} distinct benign-sybil pairs",
                self.attack_edge_count
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    pub fpr: f64,
    pub fnr: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        for (what, p) in [("fpr", self.fpr), ("fnr", self.fnr)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::OutOfRange {
                    what,
                    value: p,
                    range: "[0, 1]",
                });
            }
        }
        Ok(())
    }
}

fn pa_edges(n: usize, m: usize, rng: &mut impl Rng) -> Vec<(NodeId, NodeId)> {
    let mut edges = Vec::with_capacity(m * (m + 1) / 2 + (n - m - 1) * m);
    // Every edge endpoint appears once, so a uniform pick is degree-proportional.
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * edges.capacity());
    for u in 0..=m as NodeId {
        for v in u + 1..=m as NodeId {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    let mut chosen: Vec<NodeId> = Vec::with_capacity(m);
    for t in (m + 1)..n {
        chosen.clear();
        while chosen.len() < m {
            let cand = endpoints[rng.gen_range(0..endpoints.len())];
            if !chosen.contains(&cand) {
                chosen.push(cand);
            }
        }
        for &v in &chosen {
            edges.push((v, t as NodeId));
            endpoints.extend([v, t as NodeId]);
        }
    }
    edges
}

/// Preferential-attachment graph seeded with a clique on `edges_per_node + 1` nodes.
pub fn preferential_attachment(n: usize, edges_per_node: usize, rng: &mut impl Rng) -> Result<Graph> {
    if edges_per_node == 0 {
        return Err(Error::invalid("edges_per_node must be at least 1"));
    }
    if n <= edges_per_node {
        return Err(Error::invalid(format!(
            "preferential attachment needs n > edges_per_node ({n} <= {edges_per_node})"
        )));
    }
    Ok(Graph::from_edges(n, pa_edges(n, edges_per_node, rng))?.0)
}

/// A generated scenario. Benign nodes are `0..benign_count`, Sybils follow.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub graph: Graph,
    pub labels: LabelMap,
    /// Attack edges as `(benign, sybil)` pairs.
    pub attack_edges: Vec<(NodeId, NodeId)>,
}

pub fn compose_attack_scenario(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let m = cfg.edges_per_arrival();
    let (nb, ns) = (cfg.benign_count, cfg.sybil_count);
    let benign = pa_edges(nb, m, &mut seed::rng(seed::derive(cfg.seed, "benign-region")));
    let sybil = pa_edges(ns, m, &mut seed::rng(seed::derive(cfg.seed, "sybil-region")));

    let mut rng = seed::rng(seed::derive(cfg.seed, "attack-edges"));
    let attack_edges: Vec<(NodeId, NodeId)> = match cfg.targeting {
        AttackTargeting::Uniform => {
            let mut picks = index::sample(&mut rng, nb * ns, cfg.attack_edge_count).into_vec();
            picks.sort_unstable();
            picks
                .into_iter()
                .map(|p| ((p / ns) as NodeId, (nb + p % ns) as NodeId))
                .collect()
        }
        AttackTargeting::DegreeBiased => {
            let endpoints: Vec<NodeId> = benign.iter().flat_map(|&(u, v)| [u, v]).collect();
            let mut seen = HashSet::with_capacity(cfg.attack_edge_count);
            let mut out = Vec::with_capacity(cfg.attack_edge_count);
            let budget = 1000 * cfg.attack_edge_count.max(1);
            let mut attempts = 0usize;
            while out.len() < cfg.attack_edge_count {
                attempts += 1;
                if attempts > budget {
                    return Err(Error::invalid("degree-biased attack edges: too many rejected samples"));
                }
                let b = endpoints[rng.gen_range(0..endpoints.len())];
                let s = (nb + rng.gen_range(0..ns)) as NodeId;
                if seen.insert((b, s)) {
                    out.push((b, s));
                }
            }
            out.sort_unstable();
            out
        }
    };

    let offset = nb as NodeId;
    let all = benign
        .into_iter()
        .chain(sybil.into_iter().map(|(u, v)| (u + offset, v + offset)))
        .chain(attack_edges.iter().copied());
    let (graph, _) = Graph::from_edges(nb + ns, all)?;
    let labels = LabelMap::from_vec(
        (0..nb + ns)
            .map(|v| if v < nb { Label::Benign } else { Label::Sybil })
            .collect(),
    );
    Ok(Scenario {
        graph,
        labels,
        attack_edges,
    })
}

/// Draws a score on the correct side of 0.5 with probability `1 - error`.
fn noisy_score(truth_high: bool, error: f64, rng: &mut impl Rng) -> f64 {
    let correct = !rng.gen_bool(error);
    let u: f64 = rng.gen();
    if truth_high == correct {
        0.9 - 0.4 * u // (0.5, 0.9]
    } else {
        0.1 + 0.4 * u // [0.1, 0.5)
    }
}

/// Simulated local node scores: benign nodes are misjudged with probability
/// `fpr`, Sybils with probability `fnr`.
pub fn simulate_trust_scores(labels: &LabelMap, noise: &NoiseConfig) -> Result<NodeScores> {
    noise.validate()?;
    labels.require_complete()?;
    let mut rng = seed::rng(noise.seed);
    let scores = labels
        .as_slice()
        .iter()
        .map(|&l| match l {
            Label::Benign => noisy_score(true, noise.fpr, &mut rng),
            _ => noisy_score(false, noise.fnr, &mut rng),
        })
        .collect();
    NodeScores::new(scores)
}

/// Simulated local edge scores. An edge is positive when its endpoints share
/// a label; same-label edges are misjudged with probability `fpr`, attack
/// edges with probability `fnr`.
pub fn simulate_edge_scores(g: &Graph, labels: &LabelMap, noise: &NoiseConfig) -> Result<EdgeScores> {
    noise.validate()?;
    labels.require_complete()?;
    let mut rng = seed::rng(noise.seed);
    let scores = g
        .edges()
        .map(|(u, v)| {
            if labels.get(u as usize) == labels.get(v as usize) {
                noisy_score(true, noise.fpr, &mut rng)
            } else {
                noisy_score(false, noise.fnr, &mut rng)
            }
        })
        .collect();
    EdgeScores::new(scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{connected_components, modularity};

    #[test]
    fn pa_average_degree_near_ten() {
        let g = preferential_attachment(1000, 5, &mut seed::rng(1)).unwrap();
        let avg = 2.0 * g.edge_count() as f64 / 1000.0;
        assert!((avg - 10.0).abs() < 0.1, "{avg}");
        let degree_sum: usize = (0..1000).map(|v| g.degree(v)).sum();
        assert_eq!(degree_sum, 2 * g.edge_count());
        assert_eq!(connected_components(&g, None).unwrap().len(), 1);
    }

    #[test]
    fn pa_three_node_tree() {
        let g = preferential_attachment(3, 1, &mut seed::rng(0)).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(connected_components(&g, None).unwrap().len(), 1);
    }

    #[test]
    fn pa_rejects_small_n() {
        assert!(preferential_attachment(5, 5, &mut seed::rng(0)).is_err());
        assert!(preferential_attachment(5, 0, &mut seed::rng(0)).is_err());
    }

    #[test]
    fn pa_max_degree_grows_with_n() {
        let max_deg = |n| {
            let g = preferential_attachment(n, 3, &mut seed::rng(9)).unwrap();
            (0..n).map(|v| g.degree(v)).max().unwrap()
        };
        assert!(max_deg(20_000) > max_deg(500));
    }

    #[test]
    fn basic_scenario_has_exact_attack_edges() {
        let s = compose_attack_scenario(&ScenarioConfig::basic(42)).unwrap();
        assert_eq!(s.attack_edges.len(), 1000);
        let cross = s
            .graph
            .edges()
            .filter(|&(u, v)| s.labels.get(u as usize) != s.labels.get(v as usize))
            .count();
        assert_eq!(cross, 1000);
        // Region-internal edge counts match the two PA graphs.
        let pa_edges = |n: usize| 10 + (n - 5 - 1) * 5 + 5;
        assert_eq!(s.graph.edge_count(), pa_edges(1000) + pa_edges(500) + 1000);
        for &(b, y) in &s.attack_edges {
            assert_eq!(s.labels.get(b as usize), Label::Benign);
            assert_eq!(s.labels.get(y as usize), Label::Sybil);
        }
    }

    #[test]
    fn degree_biased_attack_edges_span_regions() {
        let mut cfg = ScenarioConfig::basic(5);
        cfg.targeting = AttackTargeting::DegreeBiased;
        let s = compose_attack_scenario(&cfg).unwrap();
        assert_eq!(s.attack_edges.len(), 1000);
        assert!(s
            .attack_edges
            .iter()
            .all(|&(b, y)| (b as usize) < 1000 && (y as usize) >= 1000));
    }

    #[test]
    fn no_attack_edges_gives_strong_communities() {
        let mut cfg = ScenarioConfig::basic(7);
        cfg.attack_edge_count = 0;
        let s = compose_attack_scenario(&cfg).unwrap();
        assert_eq!(connected_components(&s.graph, None).unwrap().len(), 2);
        assert!(modularity(&s.graph, &s.labels).unwrap() > 0.3);
    }

    #[test]
    fn scenario_is_deterministic() {
        let cfg = ScenarioConfig::basic(123);
        let a = compose_attack_scenario(&cfg).unwrap();
        let b = compose_attack_scenario(&cfg).unwrap();
        assert_eq!(a, b);
        let c = compose_attack_scenario(&ScenarioConfig::basic(124)).unwrap();
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn too_many_attack_edges_rejected() {
        let cfg = ScenarioConfig {
            benign_count: 10,
            sybil_count: 10,
            avg_degree: 2,
            attack_edge_count: 101,
            seed: 0,
            targeting: AttackTargeting::Uniform,
        };
        assert!(compose_attack_scenario(&cfg).is_err());
        let full = ScenarioConfig {
            attack_edge_count: 100,
            ..cfg
        };
        assert_eq!(compose_attack_scenario(&full).unwrap().attack_edges.len(), 100);
    }

    fn half_labels(n: usize) -> LabelMap {
        LabelMap::from_vec(
            (0..n)
                .map(|v| if v % 2 == 0 { Label::Benign } else { Label::Sybil })
                .collect(),
        )
    }

    #[test]
    fn zero_noise_scores_are_separated() {
        let labels = half_labels(1000);
        let noise = NoiseConfig {
            fpr: 0.0,
            fnr: 0.0,
            seed: 1,
        };
        let s = simulate_trust_scores(&labels, &noise).unwrap();
        for v in 0..1000 {
            let x = s.get(v);
            assert!((0.1..=0.9).contains(&x));
            match labels.get(v) {
                Label::Benign => assert!(x > 0.5),
                _ => assert!(x < 0.5),
            }
        }
    }

    #[test]
    fn misclassification_rate_matches_noise() {
        let n = 100_000;
        let labels = half_labels(n);
        let noise = NoiseConfig {
            fpr: 0.3,
            fnr: 0.3,
            seed: 77,
        };
        let s = simulate_trust_scores(&labels, &noise).unwrap();
        let wrong = (0..n)
            .filter(|&v| (s.get(v) > 0.5) != (labels.get(v) == Label::Benign))
            .count();
        let rate = wrong as f64 / n as f64;
        assert!((rate - 0.3).abs() < 0.01, "{rate}");
        assert!(s.as_slice().iter().all(|&x| x != 0.5));
    }

    #[test]
    fn noise_validation() {
        let labels = half_labels(4);
        let bad = NoiseConfig {
            fpr: 1.5,
            fnr: 0.0,
            seed: 0,
        };
        assert!(simulate_trust_scores(&labels, &bad).is_err());
        let mut partial = half_labels(4);
        partial.set(2, Label::Unknown);
        let ok = NoiseConfig {
            fpr: 0.1,
            fnr: 0.1,
            seed: 0,
        };
        assert!(matches!(
            simulate_trust_scores(&partial, &ok),
            Err(Error::UnlabeledNode(2))
        ));
    }

    #[test]
    fn edge_scores_follow_homophily_truth() {
        let s = compose_attack_scenario(&ScenarioConfig::basic(3)).unwrap();
        let noise = NoiseConfig {
            fpr: 0.0,
            fnr: 0.0,
            seed: 4,
        };
        let e = simulate_edge_scores(&s.graph, &s.labels, &noise).unwrap();
        for (id, (u, v)) in s.graph.edges().enumerate() {
            let same = s.labels.get(u as usize) == s.labels.get(v as usize);
            assert_eq!(e.get(id) > 0.5, same);
        }
    }
}
