//! Edge lists, configuration files and per-run outputs.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::countermeasures::Countermeasure;
use crate::dynamics::{ProcessConfig, ProcessState, RunResult, Seeding};
use crate::error::{Error, Result};
use crate::experiments::{ExperimentSpec, GraphSource};
use crate::generators::GenSpec;
use crate::graph::{Graph, NodeId};

const NODES_TAG: &str = "# nodes:";
const LAYOUT_TAG: &str = "# super-layout:";

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Original identifier of each dense node index.
    pub labels: Vec<u64>,
}

/// Reads a whitespace-separated edge list (SNAP style, `#` comments).
///
/// Node identifiers are relabeled densely in ascending order. Files written by
/// [`write_edge_list`] carry a `# nodes:` header; their identifiers are kept as-is
/// so isolated nodes survive a round trip.
pub fn load_snap(path: &Path, largest_component: bool) -> Result<LoadedGraph> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file), path, largest_component)
}

pub fn parse_edge_list<R: BufRead>(
    reader: R,
    path: &Path,
    largest_component: bool,
) -> Result<LoadedGraph> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut declared: Option<usize> = None;
    let mut layout: Option<Vec<u32>> = None;
    let mut raw: Vec<(u64, u64)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix(NODES_TAG) {
            let n = rest
                .trim()
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad node count `{}`", rest.trim())))?;
            declared = Some(n);
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix(LAYOUT_TAG) {
            let l = rest
                .split_whitespace()
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| parse_err(lineno, "bad super-layout entry".into()))?;
            layout = Some(l);
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let mut next = |what: &str| -> Result<u64> {
            let tok = fields
                .next()
                .ok_or_else(|| parse_err(lineno, format!("missing {what} node")))?;
            tok.parse()
                .map_err(|_| parse_err(lineno, format!("`{tok}` is not a non-negative integer")))
        };
        let u = next("source")?;
        let v = next("target")?;
        raw.push((u, v));
    }

    let (graph, labels) = match declared {
        Some(n) => {
            if let Some(&(u, v)) = raw.iter().find(|&&(u, v)| u.max(v) >= n as u64) {
                return Err(parse_err(
                    0,
                    format!("edge ({u}, {v}) exceeds declared node count {n}"),
                ));
            }
            let g = Graph::from_edges(n, raw.iter().map(|&(u, v)| (u as NodeId, v as NodeId)))?;
            (g, (0..n as u64).collect::<Vec<_>>())
        }
        None => {
            let ids: BTreeSet<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
            let labels: Vec<u64> = ids.into_iter().collect();
            let index = |x: u64| labels.binary_search(&x).expect("collected above") as NodeId;
            let g =
                Graph::from_edges(labels.len(), raw.iter().map(|&(u, v)| (index(u), index(v))))?;
            (g, labels)
        }
    };
    if graph.n() == 0 {
        return Err(Error::usage(format!(
            "{} contains no nodes",
            path.display()
        )));
    }
    let graph = match layout {
        Some(l) => graph.with_super_layout(l)?,
        None => graph,
    };
    if !largest_component {
        return Ok(LoadedGraph { graph, labels });
    }
    let (comp, count) = graph.components();
    if count <= 1 {
        return Ok(LoadedGraph { graph, labels });
    }
    let mut sizes = vec![0usize; count];
    comp.iter().for_each(|&c| sizes[c as usize] += 1);
    // Ties go to the component containing the smallest node.
    let best = (0..count)
        .max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)))
        .unwrap() as u32;
    let keep: Vec<NodeId> = (0..graph.n() as NodeId)
        .filter(|&v| comp[v as usize] == best)
        .collect();
    let labels = keep.iter().map(|&v| labels[v as usize]).collect();
    Ok(LoadedGraph {
        graph: graph.induced(&keep),
        labels,
    })
}

/// Writes `u v` lines (u < v, ascending) behind a `# nodes:` header.
pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{NODES_TAG} {}", g.n())?;
    writeln!(w, "# edges: {}", g.m())?;
    if let Some(layout) = g.super_layout() {
        write!(w, "{LAYOUT_TAG}")?;
        for s in layout {
            write!(w, " {s}")?;
        }
        writeln!(w)?;
    }
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn save_edge_list(g: &Graph, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_edge_list(g, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default = "default_name")]
    name: String,
    #[serde(default)]
    replications: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    graph: Option<toml::Table>,
    #[serde(default)]
    process: ProcessSection,
    #[serde(default)]
    countermeasure: Countermeasure,
}

fn default_name() -> String {
    "experiment".into()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProcessSection {
    k: Option<u32>,
    seeding: Option<Seeding>,
    max_rounds: Option<u64>,
    similarity_cache: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetSection {
    path: PathBuf,
    #[serde(default = "yes")]
    largest_component: bool,
}

fn yes() -> bool {
    true
}

fn graph_section(mut table: toml::Table, base: &Path) -> Result<GraphSource> {
    let bad = |e: toml::de::Error| Error::config(format!("[graph]: {}", e.message()));
    if table.contains_key("path") {
        let d: DatasetSection = table.try_into().map_err(bad)?;
        let path = if d.path.is_relative() {
            base.join(d.path)
        } else {
            d.path
        };
        return Ok(GraphSource::Dataset {
            path,
            largest_component: d.largest_component,
        });
    }
    let seed = match table.remove("seed") {
        None => None,
        Some(toml::Value::Integer(s)) if s >= 0 => Some(s as u64),
        Some(other) => {
            return Err(Error::config(format!(
                "[graph] seed must be a non-negative integer, got {other}"
            )))
        }
    };
    let spec: GenSpec = table.try_into().map_err(bad)?;
    Ok(GraphSource::Generated { spec, seed })
}

/// A configuration document before it is bound to a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub name: String,
    pub graph: Option<GraphSource>,
    pub process: ProcessConfig,
    pub replications: Option<usize>,
    pub seed: Option<u64>,
}

impl Config {
    pub fn into_spec(self) -> Result<ExperimentSpec> {
        let graph = self
            .graph
            .ok_or_else(|| Error::config("missing [graph] section"))?;
        let mut spec = ExperimentSpec::new(self.name, graph, self.process);
        if let Some(r) = self.replications {
            spec.replications = r;
        }
        if let Some(s) = self.seed {
            spec.base_seed = s;
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Parses a TOML configuration. The `[graph]` section is optional here. Relative
/// dataset paths resolve against `base`.
pub fn parse_config_document(text: &str, base: &Path) -> Result<Config> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
    let defaults = ProcessConfig::default();
    let p = file.process;
    let process = ProcessConfig {
        k: p.k.unwrap_or(defaults.k),
        seeding: p.seeding.unwrap_or(defaults.seeding),
        countermeasure: file.countermeasure,
        max_rounds: p.max_rounds,
        similarity_cache: p.similarity_cache.unwrap_or(defaults.similarity_cache),
    };
    process.countermeasure.validate()?;
    if process.k == 0 {
        return Err(Error::config("k must be at least 1"));
    }
    Ok(Config {
        name: file.name,
        graph: file.graph.map(|g| graph_section(g, base)).transpose()?,
        process,
        replications: file.replications,
        seed: file.seed,
    })
}

/// Parses a TOML experiment configuration, which must name a graph.
pub fn parse_config(text: &str, base: &Path) -> Result<ExperimentSpec> {
    parse_config_document(text, base)?.into_spec()
}

pub fn read_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_document(&text, base)
}

pub fn load_config(path: &Path) -> Result<ExperimentSpec> {
    read_config(path)?.into_spec()
}

/// Per-round color counts of a single run.
pub fn write_run_csv<W: Write>(run: &RunResult, mut w: W) -> std::io::Result<()> {
    writeln!(w, "round,uncolored,red,orange,green,light_green")?;
    for (t, c) in run.trajectory.iter().enumerate() {
        writeln!(
            w,
            "{t},{},{},{},{},{}",
            c.uncolored, c.red, c.orange, c.green, c.light_green
        )?;
    }
    Ok(())
}

/// One line per round: the round number and one color code per node.
pub fn write_state_line<W: Write>(state: &ProcessState, mut w: W) -> std::io::Result<()> {
    let codes: String = state.colors().map(|c| c.code()).collect();
    writeln!(w, "{} {codes}", state.round)
}
