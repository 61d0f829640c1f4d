//! Louvain modularity optimization.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    community_of: Vec<u32>,
    community_count: usize,
}

impl Partition {
    /// Relabels arbitrary community labels densely, in order of first appearance.
    pub fn from_labels(labels: &[u32]) -> Self {
        let mut map = std::collections::HashMap::new();
        let community_of = labels
            .iter()
            .map(|l| {
                let next = map.len() as u32;
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Partition {
            community_of,
            community_count: map.len(),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            community_of: (0..n as u32).collect(),
            community_count: n,
        }
    }

    pub fn whole(n: usize) -> Self {
        Partition {
            community_of: vec![0; n],
            community_count: usize::from(n > 0),
        }
    }

    pub fn community_of(&self, v: NodeId) -> u32 {
        self.community_of[v as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.community_of
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn len(&self) -> usize {
        self.community_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.community_of.is_empty()
    }

    /// Community members, each list ascending.
    pub fn members(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.community_count];
        for (v, &c) in self.community_of.iter().enumerate() {
            out[c as usize].push(v as NodeId);
        }
        out
    }
}

/// Newman modularity `Σ_c [e_c/m - (deg_c / 2m)²]` at resolution 1.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    if p.len() != g.n() {
        return Err(Error::usage(format!(
            "partition covers {} nodes, graph has {}",
            p.len(),
            g.n()
        )));
    }
    let m = g.m() as f64;
    if m == 0.0 {
        return Ok(0.0);
    }
    let mut internal = vec![0.0; p.community_count()];
    let mut degree = vec![0.0; p.community_count()];
    for v in 0..g.n() as NodeId {
        degree[p.community_of(v) as usize] += g.deg(v) as f64;
    }
    for (u, v) in g.edges() {
        if p.community_of(u) == p.community_of(v) {
            internal[p.community_of(u) as usize] += 1.0;
        }
    }
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(e, d)| e / m - (d / (2.0 * m)).powi(2))
        .sum())
}

/// Weighted graph used between aggregation levels. `loops[i]` is the diagonal entry
/// `A_ii` (twice the internal edge weight), so `strength[i] = Σ_j A_ij`.
struct Level {
    adj: Vec<Vec<(u32, f64)>>,
    loops: Vec<f64>,
    strength: Vec<f64>,
}

impl Level {
    fn from_graph(g: &Graph) -> Self {
        let adj: Vec<Vec<(u32, f64)>> = (0..g.n() as NodeId)
            .map(|v| g.neighbors(v).iter().map(|&w| (w, 1.0)).collect())
            .collect();
        let strength = adj.iter().map(|a| a.len() as f64).collect();
        Level {
            adj,
            loops: vec![0.0; g.n()],
            strength,
        }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    /// One local-move phase. Returns dense labels and whether any node moved.
    fn local_moves(&self, total: f64, rng: &mut ChaCha8Rng) -> (Vec<u32>, bool) {
        let n = self.n();
        let mut comm: Vec<u32> = (0..n as u32).collect();
        let mut comm_strength = self.strength.clone();
        let mut link = vec![0.0f64; n];
        let mut touched: Vec<u32> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        let mut any_move = false;
        loop {
            order.shuffle(rng);
            let mut moved = false;
            for &i in &order {
                let own = comm[i];
                let k_i = self.strength[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j as usize];
                    if link[c as usize] == 0.0 {
                        touched.push(c);
                    }
                    link[c as usize] += w;
                }
                comm_strength[own as usize] -= k_i;
                // Gain of inserting i into c, up to a positive factor:
                // k_{i,c} - k_i Σ_c / 2m.
                let gain = |c: u32, link: &[f64]| {
                    link[c as usize] - k_i * comm_strength[c as usize] / total
                };
                let stay = gain(own, &link);
                let mut best = own;
                let mut best_gain = stay;
                for &c in &touched {
                    let gc = gain(c, &link);
                    if gc > best_gain + 1e-12
                        || (gc >= best_gain - 1e-12 && gc > stay + 1e-12 && c < best)
                    {
                        best = c;
                        best_gain = gc;
                    }
                }
                debug_assert!(best_gain >= stay - 1e-9);
                comm_strength[best as usize] += k_i;
                if best != own {
                    comm[i] = best;
                    moved = true;
                    any_move = true;
                }
                for &c in &touched {
                    link[c as usize] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
        }
        (Partition::from_labels(&comm).community_of, any_move)
    }

    fn aggregate(&self, labels: &[u32], count: usize) -> Level {
        let mut merged: Vec<std::collections::BTreeMap<u32, f64>> = vec![Default::default(); count];
        let mut loops = vec![0.0; count];
        let mut strength = vec![0.0; count];
        for i in 0..self.n() {
            let ci = labels[i];
            loops[ci as usize] += self.loops[i];
            strength[ci as usize] += self.strength[i];
            for &(j, w) in &self.adj[i] {
                let cj = labels[j as usize];
                if ci == cj {
                    loops[ci as usize] += w;
                } else {
                    *merged[ci as usize].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        Level {
            adj: merged
                .into_iter()
                .map(|m| m.into_iter().collect())
                .collect(),
            loops,
            strength,
        }
    }
}

/// Greedy multi-level modularity optimization.
///
/// Nodes are visited in a seeded random order each pass; among equal-gain moves the
/// lowest community index wins, so the result is a function of `(g, seed)`.
pub fn louvain(g: &Graph, seed: u64) -> Result<Partition> {
    if g.n() == 0 {
        return Err(Error::usage("louvain needs a non-empty graph"));
    }
    if g.m() == 0 {
        return Ok(Partition::singletons(g.n()));
    }
    let total = 2.0 * g.m() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = Level::from_graph(g);
    let mut flat: Vec<u32> = (0..g.n() as u32).collect();
    loop {
        let (labels, moved) = level.local_moves(total, &mut rng);
        if !moved {
            break;
        }
        let count = labels.iter().max().map_or(0, |&c| c as usize + 1);
        for f in flat.iter_mut() {
            *f = labels[*f as usize];
        }
        level = level.aggregate(&labels, count);
    }
    Ok(Partition::from_labels(&flat))
}
