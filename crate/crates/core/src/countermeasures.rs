//! Countermeasure policies and the helpers the engine calls to apply them.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeSet};

/// Which countermeasure is active, with its parameters. Defaults follow the
/// published experimental setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Countermeasure {
    #[default]
    None,
    /// CM1: the top-degree fraction plus a uniform fraction of the rest never take part.
    BlockNodes {
        #[serde(default = "defaults::top_degree_frac")]
        top_degree_frac: f64,
        #[serde(default = "defaults::random_frac")]
        random_frac: f64,
    },
    /// CM2: cut edges of communities whose red fraction exceeds `tau_c` are blocked
    /// while the global red fraction exceeds `tau_g`.
    BlockEdges {
        #[serde(default = "defaults::tau")]
        tau_g: f64,
        #[serde(default = "defaults::tau")]
        tau_c: f64,
    },
    /// CM3: a would-be red node rejects the rumor with probability `p_r` and turns
    /// orange directly.
    AccuracyFlags {
        #[serde(default = "defaults::p_r")]
        p_r: f64,
    },
    /// CM4: after `delay` rounds the highest-degree uncolored node turns green and
    /// the truth spreads at half the rumor's acceptance probability.
    SpreadTruth {
        #[serde(default = "defaults::delay")]
        delay: u64,
    },
    /// CM5: a random fraction of nodes are fact checkers that turn green when
    /// contacted by the rumor, stay active for `k_fc` rounds, act in every sub-round
    /// and can convert red neighbors.
    FactCheckers {
        #[serde(default = "defaults::fc_frac")]
        frac: f64,
        #[serde(default = "defaults::k_fc")]
        k_fc: u32,
        #[serde(default = "defaults::sub_rounds")]
        sub_rounds: u32,
        #[serde(default = "defaults::yes")]
        convert_red: bool,
    },
    /// CM6: a node turns red only after successful transmissions from `threshold`
    /// distinct neighbors.
    HearTwice {
        #[serde(default = "defaults::threshold")]
        threshold: u32,
        #[serde(default = "defaults::initial_red")]
        initial_red_seeds: usize,
    },
}

mod defaults {
    pub fn top_degree_frac() -> f64 {
        0.05
    }
    pub fn random_frac() -> f64 {
        0.20
    }
    pub fn tau() -> f64 {
        0.05
    }
    pub fn p_r() -> f64 {
        0.30
    }
    pub fn delay() -> u64 {
        4
    }
    pub fn fc_frac() -> f64 {
        0.10
    }
    pub fn k_fc() -> u32 {
        20
    }
    pub fn sub_rounds() -> u32 {
        3
    }
    pub fn yes() -> bool {
        true
    }
    pub fn threshold() -> u32 {
        2
    }
    pub fn initial_red() -> usize {
        2
    }
}

impl Countermeasure {
    pub fn block_nodes() -> Self {
        Countermeasure::BlockNodes {
            top_degree_frac: defaults::top_degree_frac(),
            random_frac: defaults::random_frac(),
        }
    }

    pub fn block_edges() -> Self {
        Countermeasure::BlockEdges {
            tau_g: defaults::tau(),
            tau_c: defaults::tau(),
        }
    }

    pub fn accuracy_flags() -> Self {
        Countermeasure::AccuracyFlags {
            p_r: defaults::p_r(),
        }
    }

    pub fn spread_truth(delay: u64) -> Self {
        Countermeasure::SpreadTruth { delay }
    }

    pub fn fact_checkers() -> Self {
        Countermeasure::FactCheckers {
            frac: defaults::fc_frac(),
            k_fc: defaults::k_fc(),
            sub_rounds: defaults::sub_rounds(),
            convert_red: true,
        }
    }

    pub fn hear_twice() -> Self {
        Countermeasure::HearTwice {
            threshold: defaults::threshold(),
            initial_red_seeds: defaults::initial_red(),
        }
    }

    /// Short label, `cm0` through `cm6`.
    pub fn label(&self) -> &'static str {
        match self {
            Countermeasure::None => "cm0",
            Countermeasure::BlockNodes { .. } => "cm1",
            Countermeasure::BlockEdges { .. } => "cm2",
            Countermeasure::AccuracyFlags { .. } => "cm3",
            Countermeasure::SpreadTruth { .. } => "cm4",
            Countermeasure::FactCheckers { .. } => "cm5",
            Countermeasure::HearTwice { .. } => "cm6",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::config(format!("{name} = {x} must lie in [0, 1]")))
            }
        };
        match *self {
            Countermeasure::None => Ok(()),
            Countermeasure::BlockNodes {
                top_degree_frac,
                random_frac,
            } => {
                unit("top_degree_frac", top_degree_frac)?;
                unit("random_frac", random_frac)
            }
            Countermeasure::BlockEdges { tau_g, tau_c } => {
                unit("tau_g", tau_g)?;
                unit("tau_c", tau_c)
            }
            Countermeasure::AccuracyFlags { p_r } => unit("p_r", p_r),
            Countermeasure::SpreadTruth { delay } => {
                if delay == 0 {
                    Err(Error::config("truth delay must be at least 1 round"))
                } else {
                    Ok(())
                }
            }
            Countermeasure::FactCheckers {
                frac,
                k_fc,
                sub_rounds,
                ..
            } => {
                unit("frac", frac)?;
                if k_fc == 0 || sub_rounds == 0 {
                    return Err(Error::config("k_fc and sub_rounds must be at least 1"));
                }
                Ok(())
            }
            Countermeasure::HearTwice { threshold, .. } => {
                if threshold < 2 {
                    Err(Error::config(format!(
                        "hear-twice threshold {threshold} must be >= 2"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// CM1: the `⌈top_frac · n⌉` highest-degree nodes (ties to the lower id) plus
/// `⌈random_frac · (n - top)⌉` nodes sampled uniformly from the remainder.
pub fn cm1_block<R: Rng + ?Sized>(
    g: &Graph,
    rng: &mut R,
    top_frac: f64,
    random_frac: f64,
) -> NodeSet {
    let n = g.n();
    let top = ((top_frac * n as f64).ceil() as usize).min(n);
    let mut by_degree: Vec<NodeId> = (0..n as NodeId).collect();
    by_degree.sort_by(|&a, &b| g.deg(b).cmp(&g.deg(a)).then(a.cmp(&b)));
    let mut blocked = NodeSet::new(n);
    for &v in &by_degree[..top] {
        blocked.insert(v);
    }
    let rest: Vec<NodeId> = (0..n as NodeId).filter(|&v| !blocked.contains(v)).collect();
    let extra = ((random_frac * rest.len() as f64).ceil() as usize).min(rest.len());
    for i in sample(rng, rest.len(), extra) {
        blocked.insert(rest[i]);
    }
    blocked
}

/// CM3: whether a would-be red node rejects the rumor.
pub fn cm3_reject<R: Rng + ?Sized>(rng: &mut R, p_r: f64) -> bool {
    p_r > 0.0 && rng.gen::<f64>() < p_r
}

/// CM4: highest-degree uncolored candidate, ties to the lower id.
pub fn cm4_seed_truth(g: &Graph, eligible: impl Fn(NodeId) -> bool) -> Option<NodeId> {
    (0..g.n() as NodeId)
        .filter(|&v| eligible(v))
        .max_by(|&a, &b| g.deg(a).cmp(&g.deg(b)).then(b.cmp(&a)))
}

/// CM5: uniformly sampled fact checkers, `round(frac · n)` of them, drawn from
/// `candidates`.
pub fn cm5_fact_checkers<R: Rng + ?Sized>(
    n: usize,
    candidates: &[NodeId],
    frac: f64,
    rng: &mut R,
) -> NodeSet {
    let want = ((frac * n as f64).round() as usize).min(candidates.len());
    let mut set = NodeSet::new(n);
    for i in sample(rng, candidates.len(), want) {
        set.insert(candidates[i]);
    }
    set
}

/// CM6: records a successful transmission from `source` and reports whether the
/// node has now heard the rumor from `threshold` distinct neighbors.
pub fn cm6_gate(heard_from: &mut Vec<NodeId>, source: NodeId, threshold: u32) -> bool {
    if !heard_from.contains(&source) {
        heard_from.push(source);
    }
    heard_from.len() >= threshold as usize
}

/// CM2 edge mask: an edge is blocked iff it crosses communities and at least one
/// endpoint community is currently a spreader.
#[derive(Debug, Clone)]
pub struct EdgeBlocker {
    partition: Partition,
    sizes: Vec<usize>,
    cut_edges: Vec<(u32, u32)>,
    spreader: Vec<bool>,
    tau_g: f64,
    tau_c: f64,
    blocked_edges: usize,
}

impl EdgeBlocker {
    pub fn new(g: &Graph, partition: Partition, tau_g: f64, tau_c: f64) -> Self {
        let mut sizes = vec![0; partition.community_count()];
        for &c in partition.labels() {
            sizes[c as usize] += 1;
        }
        let cut_edges = g
            .edges()
            .map(|(u, v)| (partition.community_of(u), partition.community_of(v)))
            .filter(|(a, b)| a != b)
            .collect();
        let spreader = vec![false; partition.community_count()];
        EdgeBlocker {
            partition,
            sizes,
            cut_edges,
            spreader,
            tau_g,
            tau_c,
            blocked_edges: 0,
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Recomputes the mask from the current red set.
    pub fn refresh(&mut self, is_red: impl Fn(NodeId) -> bool) {
        let n = self.partition.len();
        let mut red = vec![0usize; self.sizes.len()];
        let mut total = 0usize;
        for v in 0..n as NodeId {
            if is_red(v) {
                red[self.partition.community_of(v) as usize] += 1;
                total += 1;
            }
        }
        let active = n > 0 && total as f64 / n as f64 > self.tau_g;
        for (c, s) in self.spreader.iter_mut().enumerate() {
            *s = active && red[c] as f64 / self.sizes[c] as f64 > self.tau_c;
        }
        self.blocked_edges = self
            .cut_edges
            .iter()
            .filter(|(a, b)| self.spreader[*a as usize] || self.spreader[*b as usize])
            .count();
    }

    #[inline]
    pub fn is_blocked(&self, u: NodeId, v: NodeId) -> bool {
        let (a, b) = (
            self.partition.community_of(u),
            self.partition.community_of(v),
        );
        a != b && (self.spreader[a as usize] || self.spreader[b as usize])
    }

    pub fn blocked_edges(&self) -> usize {
        self.blocked_edges
    }

    pub fn is_spreader(&self, community: u32) -> bool {
        self.spreader[community as usize]
    }
}
