use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rumorsim::dynamics::{Network, ProcessConfig, Simulation};
use rumorsim::experiments::{preset, run_experiment, ExperimentSpec, GraphSource};
use rumorsim::generators::GenSpec;
use rumorsim::graph::Graph;
use rumorsim::io::{
    load_snap, read_config, save_edge_list, write_edge_list, write_run_csv, write_state_line,
};
use rumorsim::spectral::{default_max_iter, estimate_lambda, DEFAULT_TOL};
use rumorsim::{louvain, Error, Result};

#[derive(Parser)]
#[command(
    name = "rumorsim",
    version,
    about = "Trust-weighted rumor spreading simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Run one simulation and print its per-round color counts.
    Simulate(SimulateArgs),
    /// Run a replicated experiment from a config file or a preset.
    Experiment(ExperimentArgs),
    /// Louvain communities as `node,community` CSV.
    Communities(CommunitiesArgs),
    /// Second-eigenvalue estimate of a regular graph, as JSON.
    Spectral(SpectralArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Family name (er, flower, random-regular, moderate-expander, hrg) or a compact
    /// spec such as `flower:n=12,r=3`.
    family: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    clique_size: Option<usize>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    avg_degree: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl GenerateArgs {
    fn spec(&self) -> Result<GenSpec> {
        let mut compact = self.family.clone();
        let ints = [
            ("n", self.n),
            ("r", self.r),
            ("d", self.d),
            ("clique_size", self.clique_size),
            ("nodes", self.nodes),
            ("degree", self.degree),
        ];
        let floats = [
            ("p", self.p),
            ("avg_degree", self.avg_degree),
            ("beta", self.beta),
            ("temperature", self.temperature),
        ];
        let mut pairs: Vec<String> = ints
            .iter()
            .filter_map(|(k, v)| v.map(|v| format!("{k}={v}")))
            .collect();
        pairs.extend(
            floats
                .iter()
                .filter_map(|(k, v)| v.map(|v| format!("{k}={v:?}"))),
        );
        if !pairs.is_empty() {
            compact.push(if compact.contains(':') { ',' } else { ':' });
            compact.push_str(&pairs.join(","));
        }
        GenSpec::parse_compact(&compact)
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Edge-list file to simulate on.
    #[arg(long, conflicts_with = "gen")]
    graph: Option<PathBuf>,
    /// Compact generator spec, e.g. `er:n=1000,p=0.01`.
    #[arg(long)]
    gen: Option<String>,
    /// Process and countermeasure configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep only the largest connected component of `--graph`.
    #[arg(long)]
    largest_component: bool,
    /// Trajectory CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one line per round with every node's color code to this file.
    #[arg(long)]
    dump_states: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Location of the Facebook edge list used by dataset presets.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct CommunitiesArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    largest_component: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the original node identifier of each dense index to this file.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct SpectralArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_err(path: &Path, e: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn finish(mut w: Box<dyn Write>, path: Option<&Path>) -> Result<()> {
    w.flush()
        .map_err(|e| io_err(path.unwrap_or(Path::new("<stdout>")), e))
}

fn load_graph(path: &Path, largest_component: bool, labels: Option<&Path>) -> Result<Graph> {
    let loaded = load_snap(path, largest_component)?;
    if let Some(out) = labels {
        let mut w = output(Some(out))?;
        let write = |w: &mut Box<dyn Write>| -> io::Result<()> {
            writeln!(w, "node,original")?;
            for (i, l) in loaded.labels.iter().enumerate() {
                writeln!(w, "{i},{l}")?;
            }
            Ok(())
        };
        write(&mut w).map_err(|e| io_err(out, e))?;
        finish(w, Some(out))?;
    }
    Ok(loaded.graph)
}

fn generate(args: GenerateArgs) -> Result<()> {
    let g = args.spec()?.generate(args.seed)?;
    match &args.out {
        Some(p) => save_edge_list(&g, p),
        None => {
            let mut w = output(None)?;
            write_edge_list(&g, &mut w).map_err(|e| io_err(Path::new("<stdout>"), e))?;
            finish(w, None)
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let config = args.config.as_deref().map(read_config).transpose()?;
    let (source, process) = match config {
        Some(c) => (c.graph, c.process),
        None => (None, ProcessConfig::default()),
    };
    let graph = match (&args.graph, &args.gen, source) {
        (Some(p), _, _) => load_graph(p, args.largest_component, None)?,
        (None, Some(spec), _) => GenSpec::parse_compact(spec)?.generate(args.seed)?,
        (None, None, Some(src)) => src.build(args.seed)?,
        (None, None, None) => {
            return Err(Error::Usage(
                "simulate needs --graph, --gen or a config with a [graph] section".into(),
            ))
        }
    };
    let net = Network::prepare(&graph, &process, args.seed)?;
    let sim = Simulation::new(&net, &process, args.seed)?;
    let result = match &args.dump_states {
        Some(path) => {
            let mut w = output(Some(path))?;
            let mut failure = None;
            let result = sim.run_observed(|s| {
                if failure.is_none() {
                    failure = write_state_line(s, &mut w).err();
                }
            });
            if let Some(e) = failure {
                return Err(io_err(path, e));
            }
            finish(w, Some(path))?;
            result
        }
        None => sim.run_to_end(),
    };
    let out = args.out.as_deref();
    let mut w = output(out)?;
    write_run_csv(&result, &mut w).map_err(|e| io_err(out.unwrap_or(Path::new("<stdout>")), e))?;
    finish(w, out)
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let mut specs: Vec<ExperimentSpec> = match (&args.config, &args.preset) {
        (Some(path), _) => vec![read_config(path)?.into_spec()?],
        (None, Some(name)) => preset(name, args.dataset.as_deref())?,
        (None, None) => return Err(Error::Usage("give --config or --preset".into())),
    };
    for spec in &mut specs {
        if let Some(r) = args.replications {
            spec.replications = r;
        }
        if let Some(s) = args.seed {
            spec.base_seed = s;
        }
        if let (Some(ds), GraphSource::Dataset { path, .. }) = (&args.dataset, &mut spec.graph) {
            *path = ds.clone();
        }
        let outcome = run_experiment(spec)?;
        let files = outcome.write_to(&args.out)?;
        let a = &outcome.aggregate;
        eprintln!(
            "{}: spread_rate={} mean_final_orange={:.4} median_rounds={} ({:.1}s)",
            spec.name, a.spread_rate, a.mean_final_orange, a.median_rounds, outcome.wall_time_secs
        );
        for f in files {
            eprintln!("  wrote {}", f.display());
        }
    }
    Ok(())
}

fn communities(args: CommunitiesArgs) -> Result<()> {
    let g = load_graph(&args.graph, args.largest_component, args.labels.as_deref())?;
    let p = louvain(&g, args.seed)?;
    let out = args.out.as_deref();
    let mut w = output(out)?;
    let write = |w: &mut Box<dyn Write>| -> io::Result<()> {
        writeln!(w, "node,community")?;
        for (v, c) in p.labels().iter().enumerate() {
            writeln!(w, "{v},{c}")?;
        }
        Ok(())
    };
    write(&mut w).map_err(|e| io_err(out.unwrap_or(Path::new("<stdout>")), e))?;
    finish(w, out)
}

fn spectral(args: SpectralArgs) -> Result<()> {
    let g = load_graph(&args.graph, false, None)?;
    let max_iter = args.max_iter.unwrap_or_else(|| default_max_iter(g.n()));
    let est = estimate_lambda(&g, args.tol, max_iter, args.seed)?;
    println!("{}", serde_json::to_string_pretty(&est)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Simulate(a) => simulate(a),
        Command::Experiment(a) => experiment(a),
        Command::Communities(a) => communities(a),
        Command::Spectral(a) => spectral(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
