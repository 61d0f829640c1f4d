//! Replication harness: seeded replications over a shared graph, per-round
//! aggregation and the preset scenarios.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::countermeasures::Countermeasure;
use crate::dynamics::{spreads, Color, ColorCounts, Network, ProcessConfig, RunResult, Seeding};
use crate::error::{Error, Result};
use crate::generators::GenSpec;
use crate::graph::Graph;
use crate::io::load_snap;

pub const DEFAULT_REPLICATIONS: usize = 100;
/// Edge blocking is expensive; its presets use fewer replications.
pub const EDGE_BLOCKING_REPLICATIONS: usize = 10;

/// Where the graph of an experiment comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    Dataset {
        path: PathBuf,
        #[serde(default = "yes")]
        largest_component: bool,
    },
    Generated {
        #[serde(flatten)]
        spec: GenSpec,
        /// Generation seed; defaults to the experiment's base seed.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

fn yes() -> bool {
    true
}

impl GraphSource {
    pub fn generated(spec: GenSpec) -> Self {
        GraphSource::Generated { spec, seed: None }
    }

    pub fn dataset(path: impl Into<PathBuf>) -> Self {
        GraphSource::Dataset {
            path: path.into(),
            largest_component: true,
        }
    }

    pub fn build(&self, base_seed: u64) -> Result<Graph> {
        match self {
            GraphSource::Dataset {
                path,
                largest_component,
            } => Ok(load_snap(path, *largest_component)?.graph),
            GraphSource::Generated { spec, seed } => spec.generate(seed.unwrap_or(base_seed)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub graph: GraphSource,
    pub process: ProcessConfig,
    pub replications: usize,
    /// Replication `i` runs with seed `base_seed + i`.
    pub base_seed: u64,
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>, graph: GraphSource, process: ProcessConfig) -> Self {
        let replications = match process.countermeasure {
            Countermeasure::BlockEdges { .. } => EDGE_BLOCKING_REPLICATIONS,
            _ => DEFAULT_REPLICATIONS,
        };
        ExperimentSpec {
            name: name.into(),
            graph,
            process,
            replications,
            base_seed: 1,
        }
    }

    pub fn with_replications(mut self, replications: usize) -> Self {
        self.replications = replications;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::config("replications must be at least 1"));
        }
        Ok(())
    }

    pub fn replication_seed(&self, i: usize) -> u64 {
        self.base_seed.wrapping_add(i as u64)
    }
}

/// Mean and population standard deviation of one color's fraction in one round.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> MeanStd {
    let count = xs.clone().count();
    if count == 0 {
        return MeanStd::default();
    }
    let mean = xs.clone().sum::<f64>() / count as f64;
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / count as f64;
    MeanStd {
        mean,
        std: var.sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub round: u64,
    pub orange: MeanStd,
    pub red: MeanStd,
    pub green: MeanStd,
    pub uncolored: MeanStd,
    pub light_green: MeanStd,
}

/// Cross-replication summary. Runs shorter than the longest are padded with their
/// final coloring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAggregate {
    pub replications: usize,
    pub rows: Vec<AggregateRow>,
    pub final_orange: Vec<f64>,
    pub final_light_green: Vec<f64>,
    pub ever_red: Vec<f64>,
    pub rounds: Vec<u64>,
    pub spread_rate: f64,
    pub mean_final_orange: f64,
    pub mean_ever_red: f64,
    pub median_rounds: f64,
    pub max_std_orange: f64,
    pub avg_std_orange: f64,
    pub truncated_runs: usize,
    pub mean_max_blocked_edge_fraction: f64,
    pub std_kind: String,
}

impl RunAggregate {
    pub fn from_runs(runs: &[RunResult]) -> Self {
        let longest = runs.iter().map(|r| r.trajectory.len()).max().unwrap_or(0);
        let at = |r: &RunResult, t: usize| -> ColorCounts {
            *r.trajectory.get(t).unwrap_or(&r.final_counts())
        };
        let rows: Vec<AggregateRow> = (0..longest)
            .map(|t| {
                let stat = |c: Color| mean_std(runs.iter().map(move |r| at(r, t).fraction(c)));
                AggregateRow {
                    round: t as u64,
                    orange: stat(Color::Orange),
                    red: stat(Color::Red),
                    green: stat(Color::Green),
                    uncolored: stat(Color::Uncolored),
                    light_green: stat(Color::LightGreen),
                }
            })
            .collect();
        let final_orange: Vec<f64> = runs
            .iter()
            .map(|r| r.final_fraction(Color::Orange))
            .collect();
        let final_light_green = runs
            .iter()
            .map(|r| r.final_fraction(Color::LightGreen))
            .collect();
        let ever_red: Vec<f64> = runs
            .iter()
            .map(|r| r.ever_red as f64 / r.n.max(1) as f64)
            .collect();
        let rounds: Vec<u64> = runs.iter().map(|r| r.rounds).collect();
        let count = runs.len().max(1) as f64;
        let stds: Vec<f64> = rows.iter().map(|r| r.orange.std).collect();
        RunAggregate {
            replications: runs.len(),
            spread_rate: runs.iter().filter(|r| spreads(r)).count() as f64 / count,
            mean_final_orange: final_orange.iter().sum::<f64>() / count,
            mean_ever_red: ever_red.iter().sum::<f64>() / count,
            median_rounds: median(&rounds),
            max_std_orange: stds.iter().copied().fold(0.0, f64::max),
            avg_std_orange: if stds.is_empty() {
                0.0
            } else {
                stds.iter().sum::<f64>() / stds.len() as f64
            },
            truncated_runs: runs.iter().filter(|r| r.truncated).count(),
            mean_max_blocked_edge_fraction: runs
                .iter()
                .map(|r| r.max_blocked_edge_fraction)
                .sum::<f64>()
                / count,
            std_kind: "population".into(),
            rows,
            final_orange,
            final_light_green,
            ever_red,
            rounds,
        }
    }

    /// Trajectory CSV:
    /// `round,mean_orange,std_orange,mean_red,std_red,mean_green,std_green,mean_uncolored,std_uncolored`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{TRAJECTORY_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.round,
                r.orange.mean,
                r.orange.std,
                r.red.mean,
                r.red.std,
                r.green.mean,
                r.green.std,
                r.uncolored.mean,
                r.uncolored.std
            )?;
        }
        Ok(())
    }
}

pub const TRAJECTORY_HEADER: &str =
    "round,mean_orange,std_orange,mean_red,std_red,mean_green,std_green,mean_uncolored,std_uncolored";

fn median(xs: &[u64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut v = xs.to_vec();
    v.sort_unstable();
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid] as f64
    } else {
        (v[mid - 1] + v[mid]) as f64 / 2.0
    }
}

/// Deterministic experiment summary (everything except timing).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub spec: ExperimentSpec,
    pub graph_nodes: usize,
    pub graph_edges: usize,
    pub spread_rate: f64,
    pub mean_final_orange: f64,
    pub mean_ever_red: f64,
    pub median_rounds: f64,
    pub max_std_orange: f64,
    pub avg_std_orange: f64,
    pub truncated_runs: usize,
    pub mean_max_blocked_edge_fraction: f64,
    pub std_kind: String,
    pub final_orange: Vec<f64>,
    pub final_light_green: Vec<f64>,
    pub ever_red: Vec<f64>,
    pub rounds: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub spec: ExperimentSpec,
    pub graph_nodes: usize,
    pub graph_edges: usize,
    pub aggregate: RunAggregate,
    pub wall_time_secs: f64,
}

impl ExperimentOutcome {
    pub fn summary(&self) -> Summary {
        let a = &self.aggregate;
        Summary {
            spec: self.spec.clone(),
            graph_nodes: self.graph_nodes,
            graph_edges: self.graph_edges,
            spread_rate: a.spread_rate,
            mean_final_orange: a.mean_final_orange,
            mean_ever_red: a.mean_ever_red,
            median_rounds: a.median_rounds,
            max_std_orange: a.max_std_orange,
            avg_std_orange: a.avg_std_orange,
            truncated_runs: a.truncated_runs,
            mean_max_blocked_edge_fraction: a.mean_max_blocked_edge_fraction,
            std_kind: a.std_kind.clone(),
            final_orange: a.final_orange.clone(),
            final_light_green: a.final_light_green.clone(),
            ever_red: a.ever_red.clone(),
            rounds: a.rounds.clone(),
        }
    }

    /// Writes `<name>.csv`, `<name>.summary.json` and `<name>.timing.json` into `dir`.
    /// Only the timing file varies between identical invocations.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv = dir.join(format!("{}.csv", self.spec.name));
        let summary = dir.join(format!("{}.summary.json", self.spec.name));
        let timing = dir.join(format!("{}.timing.json", self.spec.name));
        let mut buf = Vec::new();
        self.aggregate
            .write_csv(&mut buf)
            .map_err(|e| Error::io(&csv, e))?;
        std::fs::write(&csv, buf).map_err(|e| Error::io(&csv, e))?;
        let mut json = serde_json::to_string_pretty(&self.summary())?;
        json.push('\n');
        std::fs::write(&summary, json).map_err(|e| Error::io(&summary, e))?;
        let t =
            serde_json::json!({ "name": self.spec.name, "wall_time_secs": self.wall_time_secs });
        std::fs::write(&timing, format!("{t}\n")).map_err(|e| Error::io(&timing, e))?;
        Ok(vec![csv, summary, timing])
    }
}

/// Runs every replication of `spec`. Replications run in parallel; results are
/// collected in replication order, so the outcome does not depend on scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let graph = spec.graph.build(spec.base_seed)?;
    run_experiment_on(spec, &graph)
}

/// As [`run_experiment`] with an already-built graph.
pub fn run_experiment_on(spec: &ExperimentSpec, graph: &Graph) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let start = Instant::now();
    let net = Network::prepare(graph, &spec.process, spec.base_seed)?;
    let runs: Vec<RunResult> = (0..spec.replications)
        .into_par_iter()
        .map(|i| net.run(&spec.process, spec.replication_seed(i)))
        .collect::<Result<_>>()?;
    Ok(ExperimentOutcome {
        spec: spec.clone(),
        graph_nodes: graph.n(),
        graph_edges: graph.m(),
        aggregate: RunAggregate::from_runs(&runs),
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Same as [`run_experiment_on`] but strictly sequential.
pub fn run_experiment_serial(spec: &ExperimentSpec, graph: &Graph) -> Result<RunAggregate> {
    spec.validate()?;
    let net = Network::prepare(graph, &spec.process, spec.base_seed)?;
    let runs: Vec<RunResult> = (0..spec.replications)
        .map(|i| net.run(&spec.process, spec.replication_seed(i)))
        .collect::<Result<_>>()?;
    Ok(RunAggregate::from_runs(&runs))
}

pub const FIG1A_N: usize = 16000;
pub const ME_CM_N: usize = 22000;
pub const ME_CM_D: usize = 12;
/// Largest divisor `c` of 22000 whose base graph (`D = 12c` on `22000 / c` nodes)
/// exists.
pub const ME_CM_CLIQUE: usize = 40;
pub const FB_NODES: usize = 4039;
pub const FB_EDGES: usize = 88234;
pub const DEFAULT_FB_PATH: &str = "data/facebook_combined.txt";
pub const CM4_DELAYS: [u64; 5] = [1, 2, 4, 8, 16];

pub fn er_high() -> GenSpec {
    GenSpec::Er {
        n: FIG1A_N,
        p: 4.0 / (FIG1A_N as f64).sqrt(),
    }
}

pub fn er_low() -> GenSpec {
    GenSpec::Er {
        n: FIG1A_N,
        p: 1.0 / (4.0 * (FIG1A_N as f64).sqrt()),
    }
}

pub fn n_flower() -> GenSpec {
    GenSpec::Flower {
        n: FIG1A_N,
        r: None,
    }
}

pub fn me_low() -> GenSpec {
    GenSpec::ModerateExpander {
        n: FIG1A_N,
        d: 4,
        clique_size: Some(16),
    }
}

pub fn me_cm() -> GenSpec {
    GenSpec::ModerateExpander {
        n: ME_CM_N,
        d: ME_CM_D,
        clique_size: Some(ME_CM_CLIQUE),
    }
}

pub fn hrg_fb() -> GenSpec {
    GenSpec::Hrg {
        n: FB_NODES,
        avg_degree: 2.0 * FB_EDGES as f64 / FB_NODES as f64,
        beta: 2.5,
        temperature: 0.6,
    }
}

fn cm_by_label(label: &str) -> Option<Countermeasure> {
    Some(match label {
        "cm0" => Countermeasure::None,
        "cm1" => Countermeasure::block_nodes(),
        "cm2" => Countermeasure::block_edges(),
        "cm3" => Countermeasure::accuracy_flags(),
        "cm4" => Countermeasure::spread_truth(4),
        "cm5" => Countermeasure::fact_checkers(),
        "cm6" => Countermeasure::hear_twice(),
        _ => return None,
    })
}

pub const PRESET_NAMES: &[&str] = &[
    "fig1a-flower",
    "fig1a-flower-s3",
    "fig1a-me-low",
    "fig1a-er-high",
    "fig1a-er-low",
    "fig1b-fb",
    "fig1b-hrg-fb",
    "me-low-cm6",
    "fig1-me-cm0 .. fig1-me-cm6",
    "fb-cm0 .. fb-cm6",
    "hrg-fb-cm0 .. hrg-fb-cm6",
    "cm4-delay-sweep",
    "hrg-fb-cm4-delay-sweep",
];

/// Named scenarios from the published setup. `dataset` overrides the Facebook edge
/// list location. Sweeps return one spec per point.
pub fn preset(name: &str, dataset: Option<&Path>) -> Result<Vec<ExperimentSpec>> {
    let fb = || GraphSource::dataset(dataset.unwrap_or(Path::new(DEFAULT_FB_PATH)));
    let single = |graph: GraphSource, process: ProcessConfig| {
        Ok(vec![ExperimentSpec::new(name, graph, process)])
    };
    let base = ProcessConfig::default();
    match name {
        "fig1a-flower" => single(GraphSource::generated(n_flower()), base),
        "fig1a-flower-s3" => single(
            GraphSource::generated(n_flower()),
            base.with_seeding(Seeding::SuperNodes(3)),
        ),
        "fig1a-me-low" => single(GraphSource::generated(me_low()), base),
        "fig1a-er-high" => single(GraphSource::generated(er_high()), base),
        "fig1a-er-low" => single(GraphSource::generated(er_low()), base),
        "fig1b-fb" => single(fb(), base),
        "fig1b-hrg-fb" => single(GraphSource::generated(hrg_fb()), base),
        "me-low-cm6" => single(
            GraphSource::generated(me_low()),
            base.with_countermeasure(Countermeasure::hear_twice()),
        ),
        "cm4-delay-sweep" | "hrg-fb-cm4-delay-sweep" => {
            let graph = if name == "cm4-delay-sweep" {
                fb()
            } else {
                GraphSource::generated(hrg_fb())
            };
            Ok(CM4_DELAYS
                .iter()
                .map(|&tau| {
                    ExperimentSpec::new(
                        format!("{name}-tau{tau}"),
                        graph.clone(),
                        base.clone()
                            .with_countermeasure(Countermeasure::spread_truth(tau)),
                    )
                })
                .collect())
        }
        _ => {
            let (graph, label) = if let Some(l) = name.strip_prefix("fig1-me-") {
                (GraphSource::generated(me_cm()), l)
            } else if let Some(l) = name.strip_prefix("hrg-fb-") {
                (GraphSource::generated(hrg_fb()), l)
            } else if let Some(l) = name.strip_prefix("fb-") {
                (fb(), l)
            } else {
                return Err(unknown_preset(name));
            };
            let cm = cm_by_label(label).ok_or_else(|| unknown_preset(name))?;
            single(graph, base.with_countermeasure(cm))
        }
    }
}

fn unknown_preset(name: &str) -> Error {
    Error::Usage(format!(
        "unknown preset `{name}`; available: {}",
        PRESET_NAMES.join(", ")
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_er;

    fn small_spec(reps: usize) -> ExperimentSpec {
        ExperimentSpec::new(
            "small",
            GraphSource::generated(GenSpec::Er { n: 300, p: 0.05 }),
            ProcessConfig::default(),
        )
        .with_replications(reps)
        .with_seed(11)
    }

    #[test]
    fn single_replication_has_zero_std() {
        let out = run_experiment(&small_spec(1)).unwrap();
        assert!(out
            .aggregate
            .rows
            .iter()
            .all(|r| r.orange.std == 0.0 && r.red.std == 0.0));
    }

    #[test]
    fn repeated_experiments_agree() {
        let a = run_experiment(&small_spec(8)).unwrap();
        let b = run_experiment(&small_spec(8)).unwrap();
        assert_eq!(a.aggregate, b.aggregate);
        let g = gen_er(300, 0.05, 11).unwrap();
        assert_eq!(
            run_experiment_serial(&small_spec(8), &g).unwrap(),
            a.aggregate
        );
    }

    #[test]
    fn padding_carries_final_state() {
        let g = gen_er(300, 0.05, 11).unwrap();
        let out = run_experiment_on(&small_spec(6), &g).unwrap();
        let last = out.aggregate.rows.last().unwrap();
        assert!((last.orange.mean - out.aggregate.mean_final_orange).abs() < 1e-12);
        for r in &out.aggregate.rows {
            let total =
                r.orange.mean + r.red.mean + r.green.mean + r.uncolored.mean + r.light_green.mean;
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_replications_rejected() {
        assert!(run_experiment(&small_spec(0)).unwrap_err().is_usage());
    }

    #[test]
    fn presets_resolve() {
        let er_low_spec = &preset("fig1a-er-low", None).unwrap()[0];
        match &er_low_spec.graph {
            GraphSource::Generated {
                spec: GenSpec::Er { n, p },
                ..
            } => {
                assert_eq!(*n, 16000);
                assert!((p - 1.0 / (4.0 * 16000f64.sqrt())).abs() < 1e-15);
            }
            other => panic!("unexpected graph {other:?}"),
        }
        let me = &preset("fig1-me-cm5", None).unwrap()[0];
        assert_eq!(me.process.countermeasure, Countermeasure::fact_checkers());
        let cm2 = &preset("fb-cm2", None).unwrap()[0];
        assert_eq!(cm2.replications, EDGE_BLOCKING_REPLICATIONS);
        let sweep = preset("cm4-delay-sweep", Some(Path::new("x.txt"))).unwrap();
        assert_eq!(sweep.len(), 5);
        assert!(preset("nope", None).unwrap_err().is_usage());
        assert!(preset("fb-cm9", None).unwrap_err().is_usage());
    }

    #[test]
    fn me_cm_base_graph_is_feasible() {
        // D = 480 < N = 550.
        assert_eq!(ME_CM_N % ME_CM_CLIQUE, 0);
        const { assert!(ME_CM_D * ME_CM_CLIQUE < ME_CM_N / ME_CM_CLIQUE) };
    }
}
