//! Graph representations and structural measurements.
//!
//! Both graph types use compressed adjacency: an `offsets` array of length
//! `node_count + 1` and a flat array of neighbor ids sorted within each node.
//! Undirected edges additionally carry a dense edge id, assigned in
//! lexicographic `(u, v)` order with `u < v`, so per-edge tables (trust
//! scores, walk weights) are plain vectors indexed by that id and are
//! symmetric by construction.

use std::collections::VecDeque;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Ground-truth or predicted identity of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Benign,
    Sybil,
    Unknown,
}

impl Label {
    pub fn is_known(self) -> bool {
        self != Label::Unknown
    }

    /// Opposite class; `Unknown` maps to itself.
    pub fn flipped(self) -> Label {
        match self {
            Label::Benign => Label::Sybil,
            Label::Sybil => Label::Benign,
            Label::Unknown => Label::Unknown,
        }
    }
}

/// One label per node id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    labels: Vec<Label>,
}

impl LabelMap {
    pub fn unknown(node_count: usize) -> Self {
        Self {
            labels: vec![Label::Unknown; node_count],
        }
    }

    pub fn from_vec(labels: Vec<Label>) -> Self {
        Self { labels }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, v: usize) -> Label {
        self.labels[v]
    }

    pub fn set(&mut self, v: usize, label: Label) {
        self.labels[v] = label;
    }

    pub fn as_slice(&self) -> &[Label] {
        &self.labels
    }

    pub fn nodes_with(&self, label: Label) -> Vec<NodeId> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(v, _)| v as NodeId)
            .collect()
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Errors if any node lacks a benign/sybil label.
    pub fn require_complete(&self) -> Result<()> {
        match self.labels.iter().position(|l| !l.is_known()) {
            Some(v) => Err(Error::UnlabeledNode(v)),
            None => Ok(()),
        }
    }
}

/// Counts of input records dropped while building a simple graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl BuildStats {
    pub fn dropped(&self) -> usize {
        self.self_loops + self.duplicates
    }
}

fn csr_from_sorted(node_count: usize, pairs: &[(NodeId, NodeId)]) -> (Vec<usize>, Vec<NodeId>) {
    let mut offsets = vec![0usize; node_count + 1];
    for &(u, _) in pairs {
        offsets[u as usize + 1] += 1;
    }
    for i in 0..node_count {
        offsets[i + 1] += offsets[i];
    }
    let targets = pairs.iter().map(|&(_, v)| v).collect();
    (offsets, targets)
}

fn check_range(node_count: usize, pairs: &[(NodeId, NodeId)]) -> Result<()> {
    for &(u, v) in pairs {
        let bad = u.max(v) as usize;
        if bad >= node_count {
            return Err(Error::NodeOutOfRange { node: bad, node_count });
        }
    }
    Ok(())
}

/// Directed follower graph with both successor and predecessor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
}

impl DirectedGraph {
    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<(Self, BuildStats)> {
        let mut stats = BuildStats::default();
        let mut pairs: Vec<(NodeId, NodeId)> = edges
            .into_iter()
            .filter(|&(u, v)| {
                if u == v {
                    stats.self_loops += 1;
                    false
                } else {
                    true
                }
            })
            .collect();
        check_range(node_count, &pairs)?;
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        stats.duplicates = before - pairs.len();

        let (out_offsets, out_targets) = csr_from_sorted(node_count, &pairs);
        let mut rev: Vec<(NodeId, NodeId)> = pairs.iter().map(|&(u, v)| (v, u)).collect();
        rev.sort_unstable();
        let (in_offsets, in_sources) = csr_from_sorted(node_count, &rev);
        Ok((
            Self {
                out_offsets,
                out_targets,
                in_offsets,
                in_sources,
            },
            stats,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.out_offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn out_neighbors(&self, v: usize) -> &[NodeId] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn in_neighbors(&self, v: usize) -> &[NodeId] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out_neighbors(u).binary_search(&(v as NodeId)).is_ok()
    }

    /// All edges `(u, v)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count()).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u as NodeId, v)))
    }

    pub fn transpose(&self) -> DirectedGraph {
        DirectedGraph {
            out_offsets: self.in_offsets.clone(),
            out_targets: self.in_sources.clone(),
            in_offsets: self.out_offsets.clone(),
            in_sources: self.out_targets.clone(),
        }
    }

    /// Treats every undirected edge as a reciprocated pair of directed edges.
    pub fn from_undirected(g: &Graph) -> DirectedGraph {
        let (offsets, targets) = (g.offsets.clone(), g.targets.clone());
        DirectedGraph {
            out_offsets: offsets.clone(),
            out_targets: targets.clone(),
            in_offsets: offsets,
            in_sources: targets,
        }
    }
}

/// Simple undirected graph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    /// Undirected edge id of each adjacency slot.
    slot_edge: Vec<u32>,
    edge_count: usize,
}

impl Graph {
    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<(Self, BuildStats)> {
        let mut stats = BuildStats::default();
        let mut pairs: Vec<(NodeId, NodeId)> = edges
            .into_iter()
            .filter_map(|(u, v)| {
                if u == v {
                    stats.self_loops += 1;
                    None
                } else {
                    Some((u.min(v), u.max(v)))
                }
            })
            .collect();
        check_range(node_count, &pairs)?;
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        stats.duplicates = before - pairs.len();
        if pairs.len() > u32::MAX as usize {
            return Err(Error::invalid("more than 2^32 - 1 undirected edges"));
        }
        Ok((Self::from_sorted_unique(node_count, &pairs), stats))
    }

    /// `pairs` must be sorted, unique, with `u < v` and in range.
    fn from_sorted_unique(node_count: usize, pairs: &[(NodeId, NodeId)]) -> Self {
        let mut offsets = vec![0usize; node_count + 1];
        for &(u, v) in pairs {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let slots = offsets[node_count];
        let mut targets = vec![0 as NodeId; slots];
        let mut slot_edge = vec![0u32; slots];
        let mut cursor = offsets[..node_count].to_vec();
        // Visiting pairs in (u, v) order fills every node's list in ascending
        // order: lower neighbors arrive as `v` before higher ones arrive as `u`.
        for (id, &(u, v)) in pairs.iter().enumerate() {
            let (u, v) = (u as usize, v as usize);
            targets[cursor[u]] = v as NodeId;
            slot_edge[cursor[u]] = id as u32;
            cursor[u] += 1;
            targets[cursor[v]] = u as NodeId;
            slot_edge[cursor[v]] = id as u32;
            cursor[v] += 1;
        }
        Self {
            offsets,
            targets,
            slot_edge,
            edge_count: pairs.len(),
        }
    }

    pub fn empty(node_count: usize) -> Self {
        Self::from_sorted_unique(node_count, &[])
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: usize) -> &[NodeId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edge ids aligned with [`Graph::neighbors`].
    pub fn neighbor_edges(&self, v: usize) -> &[u32] {
        &self.slot_edge[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Range of adjacency slots owned by `v`.
    pub fn slot_range(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn slot_count(&self) -> usize {
        self.targets.len()
    }

    pub fn slot_target(&self, slot: usize) -> NodeId {
        self.targets[slot]
    }

    pub fn slot_edge(&self, slot: usize) -> usize {
        self.slot_edge[slot] as usize
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as NodeId)).is_ok()
    }

    /// Edge id of `{u, v}`, if present.
    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let pos = self.neighbors(u).binary_search(&(v as NodeId)).ok()?;
        Some(self.slot_edge[self.offsets[u] + pos] as usize)
    }

    /// Undirected edges `(u, v)` with `u < v`, in edge-id order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u as NodeId, v))
        })
    }

    /// For every slot `u -> v`, the slot index of `v -> u`.
    pub fn reverse_slots(&self) -> Vec<usize> {
        let mut rev = vec![0usize; self.slot_count()];
        for u in 0..self.node_count() {
            for slot in self.slot_range(u) {
                let v = self.targets[slot] as usize;
                let pos = self
                    .neighbors(v)
                    .binary_search(&(u as NodeId))
                    .expect("adjacency is symmetric");
                rev[slot] = self.offsets[v] + pos;
            }
        }
        rev
    }

    /// Source node of every slot.
    pub fn slot_sources(&self) -> Vec<NodeId> {
        let mut src = Vec::with_capacity(self.slot_count());
        for u in 0..self.node_count() {
            src.extend(std::iter::repeat_n(u as NodeId, self.degree(u)));
        }
        src
    }

    /// Subgraph induced by `keep`, with node ids preserved.
    pub fn induced(&self, keep: &[bool]) -> Graph {
        let pairs: Vec<(NodeId, NodeId)> = self
            .edges()
            .filter(|&(u, v)| keep[u as usize] && keep[v as usize])
            .collect();
        Self::from_sorted_unique(self.node_count(), &pairs)
    }
}

/// Keeps an undirected edge exactly when both directions are present.
pub fn mutualize(g: &DirectedGraph) -> Graph {
    let pairs: Vec<(NodeId, NodeId)> = g
        .edges()
        .filter(|&(u, v)| u < v && g.has_edge(v as usize, u as usize))
        .collect();
    Graph::from_sorted_unique(g.node_count(), &pairs)
}

/// Parses a whitespace-separated edge list. Returns the raw pairs and
/// `max id + 1`.
pub fn read_edge_pairs(path: &Path) -> Result<(Vec<(NodeId, NodeId)>, usize)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    let mut max_id: Option<NodeId> = None;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message,
        };
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(format!("expected `src dst`, got `{trimmed}`")));
        };
        let parse = |s: &str| {
            s.parse::<NodeId>()
                .map_err(|e| parse_err(format!("bad node id `{s}`: {e}")))
        };
        let (u, v) = (parse(a)?, parse(b)?);
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        pairs.push((u, v));
    }
    match max_id {
        Some(m) => Ok((pairs, m as usize + 1)),
        None => Err(Error::EmptyInput(path.to_path_buf())),
    }
}

pub fn load_edge_list(path: &Path) -> Result<(Graph, BuildStats)> {
    let (pairs, n) = read_edge_pairs(path)?;
    Graph::from_edges(n, pairs)
}

pub fn load_directed_edge_list(path: &Path) -> Result<(DirectedGraph, BuildStats)> {
    let (pairs, n) = read_edge_pairs(path)?;
    DirectedGraph::from_edges(n, pairs)
}

/// A connected component; `nodes` is sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub nodes: Vec<NodeId>,
}

impl Component {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }
}

/// Connected components of `g`, or of the subgraph induced by `restrict_to`.
///
/// Sorted by descending size, then by smallest member id.
pub fn connected_components(g: &Graph, restrict_to: Option<&[NodeId]>) -> Result<Vec<Component>> {
    let n = g.node_count();
    let mut allowed = vec![restrict_to.is_none(); n];
    if let Some(subset) = restrict_to {
        for &v in subset {
            if v as usize >= n {
                return Err(Error::NodeOutOfRange {
                    node: v as usize,
                    node_count: n,
                });
            }
            allowed[v as usize] = true;
        }
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    let mut comps = Vec::new();
    for start in 0..n {
        if !allowed[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut nodes = Vec::new();
        while let Some(u) = queue.pop_front() {
            nodes.push(u as NodeId);
            for &v in g.neighbors(u) {
                let v = v as usize;
                if allowed[v] && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        nodes.sort_unstable();
        comps.push(Component { nodes });
    }
    comps.sort_by(|a, b| b.size().cmp(&a.size()).then(a.nodes[0].cmp(&b.nodes[0])));
    Ok(comps)
}

/// Structural class of a Sybil within the Sybil-induced subgraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SybilClass {
    /// Size-1 component: connects only to benign nodes.
    Isolated,
    /// Member of the largest Sybil component.
    Lcc,
    /// Member of some other multi-node Sybil component.
    Others,
}

impl SybilClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SybilClass::Isolated => "isolated",
            SybilClass::Lcc => "lcc",
            SybilClass::Others => "others",
        }
    }
}

/// Classifies every Sybil by the component it lies in; `None` for non-Sybils.
pub fn sybil_census(g: &Graph, labels: &LabelMap) -> Result<Vec<Option<SybilClass>>> {
    if labels.node_count() != g.node_count() {
        return Err(Error::LengthMismatch {
            what: "labels",
            expected: g.node_count(),
            actual: labels.node_count(),
        });
    }
    let sybils = labels.nodes_with(Label::Sybil);
    let comps = connected_components(g, Some(&sybils))?;
    let mut classes = vec![None; g.node_count()];
    for (i, comp) in comps.iter().enumerate() {
        let class = match (comp.size(), i) {
            (1, _) => SybilClass::Isolated,
            (_, 0) => SybilClass::Lcc,
            _ => SybilClass::Others,
        };
        for &v in &comp.nodes {
            classes[v as usize] = Some(class);
        }
    }
    Ok(classes)
}

/// Newman modularity of a benign/sybil partition, `Q = sum_c (e_cc - a_c^2)`.
///
/// Returns 0 for a graph without edges.
pub fn modularity(g: &Graph, partition: &LabelMap) -> Result<f64> {
    if partition.node_count() != g.node_count() {
        return Err(Error::LengthMismatch {
            what: "partition",
            expected: g.node_count(),
            actual: partition.node_count(),
        });
    }
    partition.require_complete()?;
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return Ok(0.0);
    }
    let group = |v: usize| usize::from(partition.get(v) == Label::Sybil);
    let mut internal = [0usize; 2];
    let mut volume = [0usize; 2];
    for v in 0..g.node_count() {
        volume[group(v)] += g.degree(v);
    }
    for (u, v) in g.edges() {
        let (cu, cv) = (group(u as usize), group(v as usize));
        if cu == cv {
            internal[cu] += 1;
        }
    }
    Ok((0..2)
        .map(|c| {
            let e = internal[c] as f64 / m;
            let a = volume[c] as f64 / (2.0 * m);
            e - a * a
        })
        .sum())
}
