//! Immutable simple undirected graphs in compressed adjacency form.
//!
//! Every neighbor list is sorted ascending, which lets similarity queries run as a
//! linear merge of two lists. Construction normalizes arbitrary edge lists: self-loops
//! are dropped, reversed and repeated pairs collapse to one undirected edge.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense node index in `[0, n)`.
pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    super_layout: Option<Vec<u32>>,
}

impl Graph {
    /// Builds a graph on `n` nodes from an arbitrary list of endpoint pairs.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if n > NodeId::MAX as usize {
            return Err(Error::usage(format!("{n} nodes exceeds the node id range")));
        }
        let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::usage(format!(
                    "edge ({u}, {v}) references a node outside [0, {n})"
                )));
            }
            if u == v {
                continue;
            }
            pairs.push((u, v));
            pairs.push((v, u));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self::from_sorted_arcs(n, &pairs))
    }

    /// `arcs` must be sorted, deduplicated, symmetric and loop-free.
    fn from_sorted_arcs(n: usize, arcs: &[(NodeId, NodeId)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = arcs.iter().map(|&(_, v)| v).collect();
        Graph {
            offsets,
            targets,
            super_layout: None,
        }
    }

    /// Attaches a node → super-node mapping (flower and moderate-expander layouts).
    pub fn with_super_layout(mut self, layout: Vec<u32>) -> Result<Self> {
        if layout.len() != self.n() {
            return Err(Error::usage(format!(
                "super layout covers {} nodes, graph has {}",
                layout.len(),
                self.n()
            )));
        }
        self.super_layout = Some(layout);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn super_layout(&self) -> Option<&[u32]> {
        self.super_layout.as_deref()
    }

    /// Number of super nodes, when a layout is attached.
    pub fn super_count(&self) -> Option<usize> {
        self.super_layout
            .as_ref()
            .map(|l| l.iter().map(|&s| s as usize + 1).max().unwrap_or(0))
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if (v as usize) < self.n() {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "node {v} out of range for a graph with {} nodes",
                self.n()
            )))
        }
    }

    /// Sorted neighbors of `v`. Panics if `v` is out of range.
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Index of the first adjacency slot of `v`; slot `first_slot(v) + i` holds the
    /// `i`-th neighbor of `v`.
    #[inline]
    pub(crate) fn first_slot(&self, v: NodeId) -> usize {
        self.offsets[v as usize]
    }

    pub fn degree(&self, v: NodeId) -> Result<usize> {
        self.check(v)?;
        Ok(self.deg(v))
    }

    #[inline]
    pub(crate) fn deg(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n() as NodeId)
            .map(|v| self.deg(v))
            .max()
            .unwrap_or(0)
    }

    /// `Some(d)` if every node has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = if self.n() == 0 { 0 } else { self.deg(0) };
        (0..self.n() as NodeId)
            .all(|v| self.deg(v) == d)
            .then_some(d)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        (u as usize) < self.n() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.n() as NodeId).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Numerator and denominator of the trust similarity of an adjacent pair:
    /// closed-neighborhood intersection over open-neighborhood union.
    pub fn similarity_counts(&self, u: NodeId, v: NodeId) -> Result<(usize, usize)> {
        self.check(u)?;
        self.check(v)?;
        if !self.has_edge(u, v) {
            return Err(Error::usage(format!(
                "similarity is defined on adjacent pairs only; ({u}, {v}) is not an edge"
            )));
        }
        Ok(self.adjacent_similarity_counts(u, v))
    }

    /// Similarity of an adjacent pair, in `(0, 1]`.
    pub fn jaccard_similarity(&self, u: NodeId, v: NodeId) -> Result<f64> {
        let (num, den) = self.similarity_counts(u, v)?;
        Ok(num as f64 / den as f64)
    }

    /// Unchecked kernel; `u` and `v` must be adjacent.
    ///
    /// For adjacent nodes `v ∈ N(u)` and `u ∈ N(v)`, so the closed intersection is
    /// the open intersection plus the two endpoints, and the open union is
    /// `d(u) + d(v) - |N(u) ∩ N(v)|`.
    fn adjacent_similarity_counts(&self, u: NodeId, v: NodeId) -> (usize, usize) {
        let common = sorted_intersection_len(self.neighbors(u), self.neighbors(v));
        (common + 2, self.deg(u) + self.deg(v) - common)
    }

    /// Nodes outside `a` adjacent to at least one node of `a`.
    pub fn node_boundary(&self, a: &NodeSet) -> Result<NodeSet> {
        if a.universe() != self.n() {
            return Err(Error::usage(format!(
                "node set over {} nodes used with a graph of {} nodes",
                a.universe(),
                self.n()
            )));
        }
        let mut out = NodeSet::new(self.n());
        for v in a.iter() {
            for &w in self.neighbors(v) {
                if !a.contains(w) {
                    out.insert(w);
                }
            }
        }
        Ok(out)
    }

    /// Connected component index for every node, numbered in order of lowest member.
    pub fn components(&self) -> (Vec<u32>, usize) {
        let n = self.n();
        let mut comp = vec![u32::MAX; n];
        let mut count = 0u32;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != u32::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s as NodeId);
            while let Some(u) = stack.pop() {
                for &w in self.neighbors(u) {
                    if comp[w as usize] == u32::MAX {
                        comp[w as usize] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count as usize)
    }

    /// Subgraph induced by `keep` (ascending old ids), relabelled densely in that order.
    pub fn induced(&self, keep: &[NodeId]) -> Graph {
        let mut new_id = vec![NodeId::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v as usize] = i as NodeId;
        }
        let mut arcs = Vec::new();
        for &v in keep {
            for &w in self.neighbors(v) {
                if new_id[w as usize] != NodeId::MAX {
                    arcs.push((new_id[v as usize], new_id[w as usize]));
                }
            }
        }
        arcs.sort_unstable();
        let mut g = Graph::from_sorted_arcs(keep.len(), &arcs);
        if let Some(layout) = &self.super_layout {
            g.super_layout = Some(keep.iter().map(|&v| layout[v as usize]).collect());
        }
        g
    }

    /// Two-coloring of the graph if it is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let n = self.n();
        let mut side = vec![None; n];
        let mut stack = Vec::new();
        for s in 0..n {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            stack.push(s as NodeId);
            while let Some(u) = stack.pop() {
                let su = side[u as usize].unwrap();
                for &w in self.neighbors(u) {
                    match side[w as usize] {
                        None => {
                            side[w as usize] = Some(!su);
                            stack.push(w);
                        }
                        Some(sw) if sw == su => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap()).collect())
    }

    /// Collapses each super node to a single vertex, keeping one edge per pair of
    /// distinct super nodes.
    pub fn contract_super_nodes(&self) -> Result<Graph> {
        let layout = self
            .super_layout
            .as_ref()
            .ok_or_else(|| Error::usage("graph has no super-node layout"))?;
        let count = self.super_count().unwrap_or(0);
        let edges = self.edges().filter_map(|(u, v)| {
            let (a, b) = (layout[u as usize], layout[v as usize]);
            (a != b).then_some((a, b))
        });
        Graph::from_edges(count, edges)
    }
}

fn sorted_intersection_len(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Precomputed similarity for every adjacency slot, aligned with the graph's
/// neighbor lists.
#[derive(Debug, Clone)]
pub struct EdgeWeights {
    slots: Vec<f64>,
}

impl EdgeWeights {
    pub fn build(g: &Graph) -> Self {
        let slots = (0..g.n() as NodeId)
            .into_par_iter()
            .flat_map_iter(|u| {
                g.neighbors(u).iter().map(move |&v| {
                    let (num, den) = g.adjacent_similarity_counts(u, v);
                    num as f64 / den as f64
                })
            })
            .collect();
        EdgeWeights { slots }
    }

    #[inline]
    pub fn slot(&self, slot: usize) -> f64 {
        self.slots[slot]
    }
}

/// Similarity lookup used by the dynamics engine: either a precomputed per-slot
/// cache or on-demand list intersection.
#[derive(Debug, Clone, Copy)]
pub enum Trust<'a> {
    Cached(&'a EdgeWeights),
    OnDemand,
}

impl Trust<'_> {
    /// Similarity between `u` and its `i`-th neighbor.
    #[inline]
    pub(crate) fn at(&self, g: &Graph, u: NodeId, i: usize) -> f64 {
        match self {
            Trust::Cached(w) => w.slot(g.first_slot(u) + i),
            Trust::OnDemand => {
                let v = g.neighbors(u)[i];
                let (num, den) = g.adjacent_similarity_counts(u, v);
                num as f64 / den as f64
            }
        }
    }
}

/// Membership set over `[0, n)`; iteration is in ascending id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    bits: Vec<bool>,
    len: usize,
}

impl NodeSet {
    pub fn new(n: usize) -> Self {
        NodeSet {
            bits: vec![false; n],
            len: 0,
        }
    }

    pub fn from_nodes(n: usize, nodes: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut s = NodeSet::new(n);
        for v in nodes {
            if v as usize >= n {
                return Err(Error::usage(format!("node {v} out of range [0, {n})")));
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub fn full(n: usize) -> Self {
        NodeSet {
            bits: vec![true; n],
            len: n,
        }
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        self.bits[v as usize]
    }

    pub fn insert(&mut self, v: NodeId) -> bool {
        let slot = &mut self.bits[v as usize];
        let fresh = !*slot;
        *slot = true;
        self.len += fresh as usize;
        fresh
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as NodeId)
    }

    pub fn to_vec(&self) -> Vec<NodeId> {
        self.iter().collect()
    }
}
