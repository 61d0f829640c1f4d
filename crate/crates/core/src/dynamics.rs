//! Synchronous trust-weighted rumor dynamics with forgetting, plus the parallel
//! truth process used by the truth-spreading and fact-checker countermeasures.
//!
//! Update rule per round `t`, computed from the coloring of round `t - 1`:
//!
//! * a red node with age `J` transmits to each uncolored neighbor `v` independently
//!   with probability `S(v, v') / 2^J`; when `J = k` it turns orange at the end of
//!   the round, otherwise its age grows by one;
//! * green nodes behave the same with half the probability and turn light-green;
//! * orange and light-green are absorbing.
//!
//! A node that turns red in round `t` acts with `J = 1` in round `t + 1`; initial
//! seeds act with `J = 1` in round 1.
//!
//! One ChaCha8 stream drives a whole run. Within a round, Bernoulli trials are drawn
//! in ascending `(target, source)` order and every per-target decision (conflict coin,
//! rejection draw) is drawn right after that target's trials.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::community::{louvain, Partition};
use crate::countermeasures::{
    cm1_block, cm3_reject, cm4_seed_truth, cm5_fact_checkers, cm6_gate, Countermeasure, EdgeBlocker,
};
use crate::error::{Error, Result};
use crate::graph::{EdgeWeights, Graph, NodeId, NodeSet, Trust};

pub const DEFAULT_K: u32 = 5;
/// Final orange fraction at or above which the rumor is said to spread.
pub const SPREAD_THRESHOLD: f64 = 0.10;
/// Divisor applied to the rumor acceptance probability for the truth process.
pub const TRUTH_HALF_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Color {
    Uncolored,
    Red,
    Orange,
    Green,
    LightGreen,
}

impl Color {
    pub fn code(self) -> char {
        match self {
            Color::Uncolored => 'u',
            Color::Red => 'r',
            Color::Orange => 'o',
            Color::Green => 'g',
            Color::LightGreen => 'l',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeState {
    pub color: Color,
    /// Rounds spent spreading, as used in the next round (`J`); 0 when not spreading.
    pub age: u32,
    /// Distinct neighbors that have successfully transmitted the rumor (hear-twice).
    pub hit_count: u32,
    pub is_fact_checker: bool,
    pub is_blocked: bool,
}

impl Default for NodeState {
    fn default() -> Self {
        NodeState {
            color: Color::Uncolored,
            age: 0,
            hit_count: 0,
            is_fact_checker: false,
            is_blocked: false,
        }
    }
}

/// How the initial red nodes are chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Seeding {
    Nodes(Vec<NodeId>),
    /// Uniformly random distinct nodes.
    Random(usize),
    /// Every member of uniformly random distinct super nodes.
    SuperNodes(usize),
}

impl Default for Seeding {
    fn default() -> Self {
        Seeding::Random(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    #[serde(default = "default_k")]
    pub k: u32,
    #[serde(default)]
    pub seeding: Seeding,
    #[serde(default)]
    pub countermeasure: Countermeasure,
    /// Safety cap; `None` means `10 · n`.
    #[serde(default)]
    pub max_rounds: Option<u64>,
    /// Precompute per-edge similarities once per graph instead of per query.
    #[serde(default = "default_cache")]
    pub similarity_cache: bool,
}

fn default_k() -> u32 {
    DEFAULT_K
}

fn default_cache() -> bool {
    true
}

impl Default for ProcessConfig {
    fn default() -> Self {
        ProcessConfig {
            k: DEFAULT_K,
            seeding: Seeding::default(),
            countermeasure: Countermeasure::None,
            max_rounds: None,
            similarity_cache: true,
        }
    }
}

impl ProcessConfig {
    pub fn with_countermeasure(mut self, cm: Countermeasure) -> Self {
        self.countermeasure = cm;
        self
    }

    pub fn with_seeding(mut self, seeding: Seeding) -> Self {
        self.seeding = seeding;
        self
    }

    /// Seeding after countermeasure adjustments: hear-twice replaces a random
    /// single-node seeding with its own initial seed count.
    pub fn effective_seeding(&self) -> Seeding {
        match (&self.countermeasure, &self.seeding) {
            (
                Countermeasure::HearTwice {
                    initial_red_seeds, ..
                },
                Seeding::Random(1),
            ) => Seeding::Random(*initial_red_seeds),
            (_, s) => s.clone(),
        }
    }

    pub fn max_rounds_for(&self, n: usize) -> u64 {
        self.max_rounds.unwrap_or(10 * n.max(1) as u64)
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.k == 0 {
            return Err(Error::config("forgetting horizon k must be at least 1"));
        }
        if self.max_rounds == Some(0) {
            return Err(Error::config("max_rounds must be at least 1"));
        }
        self.countermeasure.validate()?;
        match self.effective_seeding() {
            Seeding::Nodes(nodes) => {
                if let Some(v) = nodes.iter().find(|&&v| v as usize >= g.n()) {
                    return Err(Error::config(format!("seed node {v} is not in the graph")));
                }
            }
            Seeding::Random(count) => {
                if count > g.n() {
                    return Err(Error::config(format!(
                        "{count} random seeds requested on {} nodes",
                        g.n()
                    )));
                }
            }
            Seeding::SuperNodes(count) => {
                let supers = g.super_count().ok_or_else(|| {
                    Error::config("super-node seeding needs a flower or moderate expander")
                })?;
                if count > supers {
                    return Err(Error::config(format!(
                        "{count} seed super nodes requested, graph has {supers}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorCounts {
    pub uncolored: usize,
    pub red: usize,
    pub orange: usize,
    pub green: usize,
    pub light_green: usize,
}

impl ColorCounts {
    pub fn total(&self) -> usize {
        self.uncolored + self.red + self.orange + self.green + self.light_green
    }

    fn slot(&mut self, c: Color) -> &mut usize {
        match c {
            Color::Uncolored => &mut self.uncolored,
            Color::Red => &mut self.red,
            Color::Orange => &mut self.orange,
            Color::Green => &mut self.green,
            Color::LightGreen => &mut self.light_green,
        }
    }

    pub fn get(&self, c: Color) -> usize {
        match c {
            Color::Uncolored => self.uncolored,
            Color::Red => self.red,
            Color::Orange => self.orange,
            Color::Green => self.green,
            Color::LightGreen => self.light_green,
        }
    }

    pub fn fraction(&self, c: Color) -> f64 {
        let n = self.total();
        if n == 0 {
            0.0
        } else {
            self.get(c) as f64 / n as f64
        }
    }

    pub fn is_fixed(&self) -> bool {
        self.red == 0 && self.green == 0
    }
}

#[derive(Debug, Clone)]
pub struct ProcessState {
    pub round: u64,
    pub nodes: Vec<NodeState>,
    pub counts: ColorCounts,
}

impl ProcessState {
    pub fn color(&self, v: NodeId) -> Color {
        self.nodes[v as usize].color
    }

    pub fn colors(&self) -> impl Iterator<Item = Color> + '_ {
        self.nodes.iter().map(|s| s.color)
    }

    fn recolor(&mut self, v: NodeId, color: Color, age: u32) {
        let node = &mut self.nodes[v as usize];
        *self.counts.slot(node.color) -= 1;
        *self.counts.slot(color) += 1;
        node.color = color;
        node.age = age;
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub n: usize,
    /// Color counts for rounds `0..=rounds`.
    pub trajectory: Vec<ColorCounts>,
    pub rounds: u64,
    pub truncated: bool,
    /// Nodes that were red at any point.
    pub ever_red: usize,
    /// Accuracy-flag rejections (nodes that went uncolored → orange).
    pub rejections: usize,
    /// Largest fraction of edges blocked at once (edge blocking only).
    pub max_blocked_edge_fraction: f64,
    pub seeds: Vec<NodeId>,
}

impl RunResult {
    pub fn final_counts(&self) -> ColorCounts {
        *self.trajectory.last().expect("trajectory includes round 0")
    }

    pub fn final_fraction(&self, c: Color) -> f64 {
        self.final_counts().fraction(c)
    }
}

/// Whether the rumor spread: final orange fraction at least 10%.
pub fn spreads(result: &RunResult) -> bool {
    result.final_fraction(Color::Orange) >= SPREAD_THRESHOLD
}

/// A graph with the per-graph data the engine needs: the similarity cache and,
/// for edge blocking, the community partition.
#[derive(Debug)]
pub struct Network<'g> {
    graph: &'g Graph,
    weights: Option<EdgeWeights>,
    partition: Option<Partition>,
}

impl<'g> Network<'g> {
    /// `community_seed` drives Louvain when edge blocking is configured.
    pub fn prepare(graph: &'g Graph, cfg: &ProcessConfig, community_seed: u64) -> Result<Self> {
        cfg.validate(graph)?;
        let weights = cfg.similarity_cache.then(|| EdgeWeights::build(graph));
        let partition = match cfg.countermeasure {
            Countermeasure::BlockEdges { .. } if graph.n() > 0 => {
                Some(louvain(graph, community_seed)?)
            }
            _ => None,
        };
        Ok(Network {
            graph,
            weights,
            partition,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    fn trust(&self) -> Trust<'_> {
        match &self.weights {
            Some(w) => Trust::Cached(w),
            None => Trust::OnDemand,
        }
    }

    /// Runs one replication to completion.
    pub fn run(&self, cfg: &ProcessConfig, seed: u64) -> Result<RunResult> {
        Ok(Simulation::new(self, cfg, seed)?.run_to_end())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Message {
    Rumor,
    Truth,
}

/// One pending Bernoulli trial; `key` packs `(target, source)` for ordering.
#[derive(Clone, Copy)]
struct Trial {
    key: u64,
    probability: f64,
    message: Message,
}

impl Trial {
    fn target(&self) -> NodeId {
        (self.key >> 32) as NodeId
    }

    fn source(&self) -> NodeId {
        self.key as u32
    }
}

/// A single run of the process.
pub struct Simulation<'n> {
    graph: &'n Graph,
    trust: Trust<'n>,
    k: u32,
    cm: Countermeasure,
    max_rounds: u64,
    rng: ChaCha8Rng,
    state: ProcessState,
    blocker: Option<EdgeBlocker>,
    heard_from: Vec<Vec<NodeId>>,
    trials: Vec<Trial>,
    spreaders: Vec<(NodeId, Color, u32)>,
    trajectory: Vec<ColorCounts>,
    ever_red: usize,
    rejections: usize,
    max_blocked: usize,
    seeds: Vec<NodeId>,
}

impl<'n> Simulation<'n> {
    /// Sets up the initial coloring: blocked nodes, fact checkers and red seeds are
    /// drawn from the run's stream in that order.
    pub fn new(net: &'n Network<'_>, cfg: &ProcessConfig, seed: u64) -> Result<Self> {
        let g = net.graph;
        cfg.validate(g)?;
        let n = g.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nodes = vec![NodeState::default(); n];

        if let Countermeasure::BlockNodes {
            top_degree_frac,
            random_frac,
        } = cfg.countermeasure
        {
            for v in cm1_block(g, &mut rng, top_degree_frac, random_frac).iter() {
                nodes[v as usize].is_blocked = true;
            }
        }
        if let Countermeasure::FactCheckers { frac, .. } = cfg.countermeasure {
            let candidates: Vec<NodeId> = (0..n as NodeId).collect();
            for v in cm5_fact_checkers(n, &candidates, frac, &mut rng).iter() {
                nodes[v as usize].is_fact_checker = true;
            }
        }

        let eligible: Vec<NodeId> = (0..n as NodeId)
            .filter(|&v| !nodes[v as usize].is_blocked && !nodes[v as usize].is_fact_checker)
            .collect();
        let seeds = choose_seeds(g, &cfg.effective_seeding(), &nodes, &eligible, &mut rng)?;

        let mut state = ProcessState {
            round: 0,
            nodes,
            counts: ColorCounts {
                uncolored: n,
                ..Default::default()
            },
        };
        for &v in &seeds {
            state.recolor(v, Color::Red, 1);
        }

        let blocker = match (&cfg.countermeasure, &net.partition) {
            (Countermeasure::BlockEdges { tau_g, tau_c }, Some(p)) => {
                Some(EdgeBlocker::new(g, p.clone(), *tau_g, *tau_c))
            }
            _ => None,
        };
        let heard_from = match cfg.countermeasure {
            Countermeasure::HearTwice { .. } => vec![Vec::new(); n],
            _ => Vec::new(),
        };
        let trajectory = vec![state.counts];
        Ok(Simulation {
            graph: g,
            trust: net.trust(),
            k: cfg.k,
            cm: cfg.countermeasure.clone(),
            max_rounds: cfg.max_rounds_for(n),
            rng,
            ever_red: seeds.len(),
            state,
            blocker,
            heard_from,
            trials: Vec::new(),
            spreaders: Vec::new(),
            trajectory,
            rejections: 0,
            max_blocked: 0,
            seeds,
        })
    }

    pub fn state(&self) -> &ProcessState {
        &self.state
    }

    pub fn seeds(&self) -> &[NodeId] {
        &self.seeds
    }

    pub fn is_fixed(&self) -> bool {
        self.state.counts.is_fixed()
    }

    pub fn blocker(&self) -> Option<&EdgeBlocker> {
        self.blocker.as_ref()
    }

    /// Probability that `source` converts `target` this round, or 0 if no
    /// transmission is possible along that edge.
    pub fn acceptance_probability(&self, target: NodeId, source: NodeId) -> Result<f64> {
        let g = self.graph;
        let idx = g
            .neighbors(source)
            .binary_search(&target)
            .map_err(|_| Error::usage(format!("({target}, {source}) is not an edge")))?;
        let (t, s) = (
            &self.state.nodes[target as usize],
            &self.state.nodes[source as usize],
        );
        if t.is_blocked || s.is_blocked || self.edge_blocked(source, target) {
            return Err(Error::usage("transmission along a blocked node or edge"));
        }
        match (s.color, t.color) {
            (Color::Red, Color::Uncolored) => {
                Ok(self.trust.at(g, source, idx) / 2f64.powi(s.age as i32))
            }
            (Color::Green, Color::Uncolored) => {
                Ok(self.trust.at(g, source, idx) / (TRUTH_HALF_FACTOR * 2f64.powi(s.age as i32)))
            }
            (Color::Green, Color::Red) if s.is_fact_checker && self.converts_red() => {
                Ok(self.trust.at(g, source, idx) / (TRUTH_HALF_FACTOR * 2f64.powi(s.age as i32)))
            }
            _ => Err(Error::usage(format!(
                "no transmission from a {:?} node to a {:?} node",
                s.color, t.color
            ))),
        }
    }

    /// Probability that uncolored `v` stays uncolored with respect to the rumor:
    /// the product of `1 - S/2^J` over its red neighbors.
    pub fn p_star(&self, v: NodeId) -> Result<f64> {
        if self.state.color(v) != Color::Uncolored {
            return Err(Error::usage(format!("node {v} is not uncolored")));
        }
        if self.state.nodes[v as usize].is_blocked {
            return Ok(1.0);
        }
        let mut p = 1.0;
        for &w in self.graph.neighbors(v) {
            let s = &self.state.nodes[w as usize];
            if s.color == Color::Red && !s.is_blocked && !self.edge_blocked(w, v) {
                p *= 1.0 - self.acceptance_probability(v, w)?;
            }
        }
        Ok(p)
    }

    fn converts_red(&self) -> bool {
        matches!(
            self.cm,
            Countermeasure::FactCheckers {
                convert_red: true,
                ..
            }
        )
    }

    #[inline]
    fn edge_blocked(&self, u: NodeId, v: NodeId) -> bool {
        self.blocker.as_ref().is_some_and(|b| b.is_blocked(u, v))
    }

    fn green_horizon(&self, node: &NodeState) -> u32 {
        match self.cm {
            Countermeasure::FactCheckers { k_fc, .. } if node.is_fact_checker => k_fc,
            _ => self.k,
        }
    }

    /// Advances one synchronous round. No-op once the coloring is fixed.
    pub fn step(&mut self) {
        if self.is_fixed() {
            return;
        }
        self.state.round += 1;

        if let Some(b) = self.blocker.as_mut() {
            let nodes = &self.state.nodes;
            b.refresh(|v| nodes[v as usize].color == Color::Red);
            self.max_blocked = self.max_blocked.max(b.blocked_edges());
        }

        self.spreaders.clear();
        for (v, s) in self.state.nodes.iter().enumerate() {
            if matches!(s.color, Color::Red | Color::Green) {
                self.spreaders.push((v as NodeId, s.color, s.age));
            }
        }

        self.transmit(false);
        let sub_rounds = match self.cm {
            Countermeasure::FactCheckers { sub_rounds, .. } => sub_rounds,
            _ => 1,
        };
        for _ in 1..sub_rounds {
            self.transmit(true);
        }

        // Aging of the round-start spreaders that kept their color.
        for i in 0..self.spreaders.len() {
            let (v, color, age) = self.spreaders[i];
            let node = self.state.nodes[v as usize];
            if node.color != color || node.age != age {
                continue;
            }
            let horizon = if color == Color::Red {
                self.k
            } else {
                self.green_horizon(&node)
            };
            if age >= horizon {
                let done = if color == Color::Red {
                    Color::Orange
                } else {
                    Color::LightGreen
                };
                self.state.recolor(v, done, 0);
            } else {
                self.state.nodes[v as usize].age = age + 1;
            }
        }

        if let Countermeasure::SpreadTruth { delay } = self.cm {
            if self.state.round == delay {
                let nodes = &self.state.nodes;
                let pick = cm4_seed_truth(self.graph, |v| {
                    let s = &nodes[v as usize];
                    s.color == Color::Uncolored && !s.is_blocked
                });
                if let Some(v) = pick {
                    self.state.recolor(v, Color::Green, 1);
                }
            }
        }

        self.trajectory.push(self.state.counts);
    }

    /// One transmission sub-round. `fact_checkers_only` restricts sources to the
    /// round-start green fact checkers.
    fn transmit(&mut self, fact_checkers_only: bool) {
        let g = self.graph;
        let convert_red = self.converts_red();
        self.trials.clear();
        for &(s, color, age) in &self.spreaders {
            let src = self.state.nodes[s as usize];
            if src.is_blocked {
                continue;
            }
            if fact_checkers_only && !(color == Color::Green && src.is_fact_checker) {
                continue;
            }
            let scale = match color {
                Color::Red => 1.0 / 2f64.powi(age as i32),
                _ => 1.0 / (TRUTH_HALF_FACTOR * 2f64.powi(age as i32)),
            };
            let message = if color == Color::Red {
                Message::Rumor
            } else {
                Message::Truth
            };
            for (i, &t) in g.neighbors(s).iter().enumerate() {
                let tgt = &self.state.nodes[t as usize];
                if tgt.is_blocked {
                    continue;
                }
                let eligible = match (message, tgt.color) {
                    (_, Color::Uncolored) => true,
                    (Message::Truth, Color::Red) => convert_red && src.is_fact_checker,
                    _ => false,
                };
                if !eligible || self.blocker.as_ref().is_some_and(|b| b.is_blocked(s, t)) {
                    continue;
                }
                self.trials.push(Trial {
                    key: (t as u64) << 32 | s as u64,
                    probability: self.trust.at(g, s, i) * scale,
                    message,
                });
            }
        }
        self.trials.sort_unstable_by_key(|t| t.key);

        let mut i = 0;
        while i < self.trials.len() {
            let target = self.trials[i].target();
            let mut rumor = false;
            let mut truth = false;
            while i < self.trials.len() && self.trials[i].target() == target {
                let trial = self.trials[i];
                i += 1;
                if self.rng.gen::<f64>() >= trial.probability {
                    continue;
                }
                match trial.message {
                    Message::Truth => truth = true,
                    Message::Rumor => match self.cm {
                        Countermeasure::HearTwice { threshold, .. } => {
                            let heard = &mut self.heard_from[target as usize];
                            rumor |= cm6_gate(heard, trial.source(), threshold);
                            self.state.nodes[target as usize].hit_count = heard.len() as u32;
                        }
                        _ => rumor = true,
                    },
                }
            }
            self.resolve(target, rumor, truth);
        }
    }

    fn resolve(&mut self, v: NodeId, rumor: bool, truth: bool) {
        let node = self.state.nodes[v as usize];
        match node.color {
            Color::Uncolored => {
                let take_rumor = match (rumor, truth) {
                    (false, false) => return,
                    (true, true) => self.rng.gen::<bool>(),
                    (r, _) => r,
                };
                if !take_rumor || node.is_fact_checker {
                    self.state.recolor(v, Color::Green, 1);
                } else if let Countermeasure::AccuracyFlags { p_r } = self.cm {
                    if cm3_reject(&mut self.rng, p_r) {
                        self.rejections += 1;
                        self.state.recolor(v, Color::Orange, 0);
                    } else {
                        self.ever_red += 1;
                        self.state.recolor(v, Color::Red, 1);
                    }
                } else {
                    self.ever_red += 1;
                    self.state.recolor(v, Color::Red, 1);
                }
            }
            Color::Red if truth => self.state.recolor(v, Color::Green, 1),
            _ => {}
        }
    }

    /// Steps until the coloring is fixed or the round cap is hit.
    pub fn run_to_end(self) -> RunResult {
        self.run_observed(|_| {})
    }

    /// Like [`Simulation::run_to_end`], calling `observe` on the initial state and
    /// after every round.
    pub fn run_observed(mut self, mut observe: impl FnMut(&ProcessState)) -> RunResult {
        observe(&self.state);
        while !self.is_fixed() && self.state.round < self.max_rounds {
            self.step();
            observe(&self.state);
        }
        let m = self.graph.m();
        RunResult {
            n: self.graph.n(),
            rounds: self.state.round,
            truncated: !self.is_fixed(),
            ever_red: self.ever_red,
            rejections: self.rejections,
            max_blocked_edge_fraction: if m == 0 {
                0.0
            } else {
                self.max_blocked as f64 / m as f64
            },
            seeds: self.seeds,
            trajectory: self.trajectory,
        }
    }
}

fn choose_seeds(
    g: &Graph,
    seeding: &Seeding,
    nodes: &[NodeState],
    eligible: &[NodeId],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<NodeId>> {
    let usable = |v: NodeId| !nodes[v as usize].is_blocked && !nodes[v as usize].is_fact_checker;
    let mut seeds = match seeding {
        Seeding::Nodes(list) => {
            let mut taken = NodeSet::from_nodes(g.n(), list.iter().copied())?;
            let mut out = Vec::with_capacity(list.len());
            for &v in list {
                if usable(v) {
                    out.push(v);
                    continue;
                }
                // Blocked or fact-checking seed: replace with a random usable node.
                let free: Vec<NodeId> = eligible
                    .iter()
                    .copied()
                    .filter(|&w| !taken.contains(w))
                    .collect();
                if free.is_empty() {
                    return Err(Error::config(
                        "no usable node left to replace a blocked seed",
                    ));
                }
                let w = free[rng.gen_range(0..free.len())];
                taken.insert(w);
                out.push(w);
            }
            out
        }
        Seeding::Random(count) => {
            if *count > eligible.len() {
                return Err(Error::config(format!(
                    "{count} seeds requested but only {} nodes may be seeded",
                    eligible.len()
                )));
            }
            sample(rng, eligible.len(), *count)
                .into_iter()
                .map(|i| eligible[i])
                .collect()
        }
        Seeding::SuperNodes(count) => {
            let layout = g
                .super_layout()
                .ok_or_else(|| Error::config("super-node seeding needs a super-node layout"))?;
            let supers = g.super_count().unwrap_or(0);
            let chosen: Vec<usize> = sample(rng, supers, *count).into_vec();
            let mut pick = vec![false; supers];
            chosen.iter().for_each(|&s| pick[s] = true);
            (0..g.n() as NodeId)
                .filter(|&v| pick[layout[v as usize] as usize] && usable(v))
                .collect()
        }
    };
    seeds.sort_unstable();
    seeds.dedup();
    Ok(seeds)
}
