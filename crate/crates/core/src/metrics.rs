//! Ranking and classification metrics over final scores.
//!
//! Nodes are ranked by ascending score (most suspicious first), ties broken
//! by ascending node id. Only nodes with a known label are evaluated; mask
//! training seeds with [`TrainingSet::mask`](crate::classifier::TrainingSet::mask)
//! before calling.

use crate::error::{Error, Result};
use crate::graph::{Label, LabelMap, NodeId, SybilClass};

fn evaluated(scores: &[f64], labels: &LabelMap) -> Result<Vec<(f64, NodeId, Label)>> {
    if scores.len() != labels.node_count() {
        return Err(Error::LengthMismatch {
            what: "scores",
            expected: labels.node_count(),
            actual: scores.len(),
        });
    }
    let mut out = Vec::new();
    for (v, (&s, &l)) in scores.iter().zip(labels.as_slice()).enumerate() {
        if !l.is_known() {
            continue;
        }
        if s.is_nan() {
            return Err(Error::NonFinite(format!("score of node {v}")));
        }
        out.push((s, v as NodeId, l));
    }
    Ok(out)
}

/// `P(score_sybil < score_benign) + P(equal) / 2`, via average ranks.
pub fn auc(scores: &[f64], labels: &LabelMap) -> Result<f64> {
    let mut items = evaluated(scores, labels)?;
    let nb = items.iter().filter(|x| x.2 == Label::Benign).count();
    let ns = items.len() - nb;
    if nb == 0 || ns == 0 {
        return Err(Error::SingleClass);
    }
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut benign_rank_sum = 0.0;
    let mut i = 0;
    while i < items.len() {
        let mut j = i;
        while j < items.len() && items[j].0 == items[i].0 {
            j += 1;
        }
        // Ranks i+1 ..= j share their average.
        let avg = (i + 1 + j) as f64 / 2.0;
        let tied_benign = items[i..j].iter().filter(|x| x.2 == Label::Benign).count();
        benign_rank_sum += avg * tied_benign as f64;
        i = j;
    }
    let (nb, ns) = (nb as f64, ns as f64);
    Ok((benign_rank_sum - nb * (nb + 1.0) / 2.0) / (nb * ns))
}

/// Predicted label: benign only when the score is strictly above `threshold`.
pub fn predict(score: f64, threshold: f64) -> Label {
    if score > threshold {
        Label::Benign
    } else {
        Label::Sybil
    }
}

pub fn accuracy_at_threshold(scores: &[f64], labels: &LabelMap, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::OutOfRange {
            what: "threshold",
            value: threshold,
            range: "(0, 1)",
        });
    }
    let items = evaluated(scores, labels)?;
    if items.is_empty() {
        return Err(Error::invalid("no labeled nodes to evaluate"));
    }
    let correct = items.iter().filter(|&&(s, _, l)| predict(s, threshold) == l).count();
    Ok(correct as f64 / items.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub node: NodeId,
    pub score: f64,
    pub truth: Label,
    pub predicted: Label,
    pub class: Option<SybilClass>,
}

/// Evaluated nodes in ascending score order, with summary metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingReport {
    pub entries: Vec<RankEntry>,
    pub threshold: f64,
    pub auc: f64,
    pub accuracy: f64,
}

impl RankingReport {
    /// `census` (from [`sybil_census`](crate::graph::sybil_census)) is optional.
    pub fn build(
        scores: &[f64],
        labels: &LabelMap,
        threshold: f64,
        census: Option<&[Option<SybilClass>]>,
    ) -> Result<Self> {
        let auc = auc(scores, labels)?;
        let accuracy = accuracy_at_threshold(scores, labels, threshold)?;
        let mut items = evaluated(scores, labels)?;
        items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let entries = items
            .into_iter()
            .map(|(score, node, truth)| RankEntry {
                node,
                score,
                truth,
                predicted: predict(score, threshold),
                class: census.and_then(|c| c[node as usize]),
            })
            .collect();
        Ok(Self {
            entries,
            threshold,
            auc,
            accuracy,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if k > self.entries.len() {
            return Err(Error::invalid(format!(
                "k = {k} exceeds the {} evaluated nodes",
                self.entries.len()
            )));
        }
        Ok(())
    }
}

/// Fraction of Sybils among the `k` lowest-scored nodes.
pub fn top_k_sybil_fraction(report: &RankingReport, k: usize) -> Result<f64> {
    report.check_k(k)?;
    let sybils = report.entries[..k].iter().filter(|e| e.truth == Label::Sybil).count();
    Ok(sybils as f64 / k as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Decomposition {
    pub isolated: usize,
    pub lcc: usize,
    pub others: usize,
    pub benign: usize,
}

impl Decomposition {
    pub fn total(&self) -> usize {
        self.isolated + self.lcc + self.others + self.benign
    }
}

/// Counts the top `k` nodes by Sybil component class. The report must have
/// been built with a census.
pub fn decompose_top_k(report: &RankingReport, k: usize) -> Result<Decomposition> {
    report.check_k(k)?;
    let mut d = Decomposition::default();
    for e in &report.entries[..k] {
        match (e.truth, e.class) {
            (Label::Sybil, Some(SybilClass::Isolated)) => d.isolated += 1,
            (Label::Sybil, Some(SybilClass::Lcc)) => d.lcc += 1,
            (Label::Sybil, Some(SybilClass::Others)) => d.others += 1,
            (Label::Sybil, None) => {
                return Err(Error::invalid(format!(
                    "sybil node {} has no component class; build the report with a census",
                    e.node
                )))
            }
            _ => d.benign += 1,
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sybil_census, Graph};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(bits: &[u8]) -> LabelMap {
        LabelMap::from_vec(
            bits.iter()
                .map(|&b| match b {
                    1 => Label::Benign,
                    0 => Label::Sybil,
                    _ => Label::Unknown,
                })
                .collect(),
        )
    }

    /// O(n^2) pair-count oracle.
    pub(crate) fn auc_oracle(scores: &[f64], labels: &LabelMap) -> f64 {
        let mut num = 0.0;
        let mut pairs = 0.0;
        for (i, &si) in scores.iter().enumerate() {
            if labels.get(i) != Label::Sybil {
                continue;
            }
            for (j, &sj) in scores.iter().enumerate() {
                if labels.get(j) != Label::Benign {
                    continue;
                }
                pairs += 1.0;
                if si < sj {
                    num += 1.0;
                } else if si == sj {
                    num += 0.5;
                }
            }
        }
        num / pairs
    }

    #[test]
    fn auc_perfect_and_tied() {
        let l = labels(&[1, 1, 0, 0]);
        assert_eq!(auc(&[0.8, 0.9, 0.1, 0.2], &l).unwrap(), 1.0);
        assert_eq!(auc(&[0.5; 4], &l).unwrap(), 0.5);
        assert!(matches!(auc(&[0.5; 2], &labels(&[1, 1])), Err(Error::SingleClass)));
    }

    #[test]
    fn auc_twelve_nodes_against_pair_count() {
        let scores = [0.3, 0.7, 0.7, 0.1, 0.5, 0.9, 0.5, 0.2, 0.7, 0.4, 0.6, 0.3];
        let l = labels(&[1, 0, 1, 0, 1, 1, 0, 0, 1, 2, 0, 1]);
        assert!((auc(&scores, &l).unwrap() - auc_oracle(&scores, &l)).abs() < 1e-12);
    }

    #[test]
    fn accuracy_by_hand() {
        let scores = [0.9, 0.6, 0.5, 0.4, 0.2, 0.55, 0.45, 0.8, 0.1, 0.3];
        let l = labels(&[1, 1, 1, 0, 0, 0, 1, 1, 0, 0]);
        // Wrong: node 2 (exactly 0.5 -> sybil), node 5 (0.55 sybil), node 6 (0.45 benign).
        assert!((accuracy_at_threshold(&scores, &l, 0.5).unwrap() - 0.7).abs() < 1e-15);
        let inverted: Vec<f64> = scores.iter().map(|s| 1.0 - s).collect();
        let inv = accuracy_at_threshold(&inverted, &l, 0.5).unwrap();
        // Node 2 sits on the threshold in both runs, so it is wrong twice.
        assert!((inv - 0.2).abs() < 1e-15);
        assert!(accuracy_at_threshold(&scores, &labels(&[2; 10]), 0.5).is_err());
    }

    #[test]
    fn ranking_and_top_k() {
        let scores = [0.9, 0.1, 0.2, 0.8, 0.1];
        let l = labels(&[1, 0, 0, 1, 1]);
        let r = RankingReport::build(&scores, &l, 0.5, None).unwrap();
        assert_eq!(
            r.entries.iter().map(|e| e.node).collect::<Vec<_>>(),
            vec![1, 4, 2, 3, 0]
        );
        assert_eq!(top_k_sybil_fraction(&r, 1).unwrap(), 1.0);
        assert_eq!(top_k_sybil_fraction(&r, 2).unwrap(), 0.5);
        assert!(top_k_sybil_fraction(&r, 0).is_err());
        assert!(top_k_sybil_fraction(&r, 6).is_err());
    }

    #[test]
    fn decomposition_twenty_nodes() {
        // Benign 0..10 on a path; sybils 10..20: {10..=13} chain, {14,15}, rest isolated.
        let mut edges: Vec<(u32, u32)> = (0..9).map(|v| (v, v + 1)).collect();
        edges.extend([(10, 11), (11, 12), (12, 13), (14, 15)]);
        edges.extend((10..20).map(|s| (s - 10, s)));
        let (g, _) = Graph::from_edges(20, edges).unwrap();
        let l = LabelMap::from_vec(
            (0..20)
                .map(|v| if v < 10 { Label::Benign } else { Label::Sybil })
                .collect(),
        );
        let census = sybil_census(&g, &l).unwrap();
        // Scores: sybils 10..20 get 0.10..0.19, benign nodes 0.5 + v/100 except node 0 = 0.145.
        let mut scores: Vec<f64> = (0..20)
            .map(|v| {
                if v < 10 {
                    0.5 + v as f64 / 100.0
                } else {
                    0.1 + (v - 10) as f64 / 100.0
                }
            })
            .collect();
        scores[0] = 0.145;
        let r = RankingReport::build(&scores, &l, 0.5, Some(&census)).unwrap();
        // Top 8: 10,11,12,13 (lcc), 14 (others), node 0 (benign), 15 (others), 16 (isolated).
        let d = decompose_top_k(&r, 8).unwrap();
        assert_eq!(
            d,
            Decomposition {
                isolated: 1,
                lcc: 4,
                others: 2,
                benign: 1
            }
        );
        assert_eq!(d.total(), 8);
    }

    #[test]
    fn all_isolated_sybils() {
        let (g, _) = Graph::from_edges(4, [(0, 2), (1, 3)]).unwrap();
        let l = labels(&[1, 1, 0, 0]);
        let census = sybil_census(&g, &l).unwrap();
        let r = RankingReport::build(&[0.9, 0.8, 0.1, 0.2], &l, 0.5, Some(&census)).unwrap();
        let d = decompose_top_k(&r, 3).unwrap();
        assert_eq!((d.lcc, d.others, d.isolated, d.benign), (0, 0, 2, 1));
    }

    proptest::proptest! {
        #[test]
        fn auc_properties(raw in proptest::collection::vec((0u8..20, proptest::bool::ANY), 2..40)) {
            let scores: Vec<f64> = raw.iter().map(|&(s, _)| s as f64 / 20.0).collect();
            let l = LabelMap::from_vec(raw.iter().map(|&(_, b)| if b { Label::Benign } else { Label::Sybil }).collect());
            if l.count(Label::Benign) == 0 || l.count(Label::Sybil) == 0 {
                return Ok(());
            }
            let a = auc(&scores, &l).unwrap();
            proptest::prop_assert!((a - auc_oracle(&scores, &l)).abs() < 1e-12);
            // Strictly increasing transform.
            let t: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp()).collect();
            proptest::prop_assert!((auc(&t, &l).unwrap() - a).abs() < 1e-12);
            // Complement; ties contribute 1/2 to both sides, so this holds with ties too.
            let c: Vec<f64> = scores.iter().map(|s| 1.0 - s).collect();
            proptest::prop_assert!((auc(&c, &l).unwrap() + a - 1.0).abs() < 1e-12);
        }

        #[test]
        fn ranking_is_order_independent(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 30;
            let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..5) as f64 / 4.0).collect();
            let l = LabelMap::from_vec((0..n).map(|_| if rng.gen_bool(0.5) { Label::Benign } else { Label::Sybil }).collect());
            if l.count(Label::Benign) == 0 || l.count(Label::Sybil) == 0 {
                return Ok(());
            }
            let r = RankingReport::build(&scores, &l, 0.5, None).unwrap();
            // Reversed node order yields the same (score, node) ordering.
            let mut pairs: Vec<(f64, u32)> = (0..n).rev().map(|v| (scores[v], v as u32)).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            proptest::prop_assert_eq!(r.entries.iter().map(|e| e.node).collect::<Vec<_>>(),
                                      pairs.iter().map(|p| p.1).collect::<Vec<_>>());
            let mut prev = 0usize;
            for k in 1..=n {
                let count = (top_k_sybil_fraction(&r, k).unwrap() * k as f64).round() as usize;
                proptest::prop_assert!(count >= prev);
                prev = count;
            }
        }
    }
}
