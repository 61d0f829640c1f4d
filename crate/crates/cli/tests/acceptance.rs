//! Acceptance criteria. Each criterion prints a `[PASS]`/`[FAIL]` line with the
//! measured values and the pinned tolerance; the run exits non-zero if any fails.
//! Pass criterion ids as arguments to run a subset.
//!
//! Criteria 6-8 need the Facebook ego-network edge list. Point `RUMORSIM_FB_EDGES` at
//! `facebook_combined.txt` (or place it in `data/` at the workspace root); without it
//! those criteria print `[UNVERIFIED]` and report the same checks on a hyperbolic
//! random graph matched to the dataset's size and mean degree.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rumorsim::community::louvain;
use rumorsim::countermeasures::Countermeasure;
use rumorsim::dynamics::{Color, Network, ProcessConfig, Seeding, Simulation};
use rumorsim::experiments::{
    hrg_fb, me_low, preset, run_experiment, run_experiment_on, ExperimentSpec, GraphSource,
    RunAggregate, FB_EDGES, FB_NODES,
};
use rumorsim::generators::gen_random_regular;
use rumorsim::graph::{Graph, NodeId};
use rumorsim::io::load_snap;
use rumorsim::spectral::{default_max_iter, estimate_lambda};

fn report(id: &str, name: &str, pass: bool, detail: impl std::fmt::Display) -> bool {
    println!(
        "[{}] criterion {id} {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn run_preset(name: &str) -> RunAggregate {
    let spec = preset(name, None).unwrap().remove(0);
    let start = Instant::now();
    let out = run_experiment(&spec).unwrap();
    println!(
        "  {name}: {} nodes, {} edges, {:.1}s",
        out.graph_nodes,
        out.graph_edges,
        start.elapsed().as_secs_f64()
    );
    out.aggregate
}

fn c01_er_low_does_not_spread() -> bool {
    let a = run_preset("fig1a-er-low");
    report(
        "1",
        "er-low no-spread",
        a.spread_rate <= 0.10 && a.mean_final_orange <= 0.01,
        format!(
            "spread_rate={} (<= 0.10), mean_final_orange={:.5} (<= 0.01), max_std={:.5}",
            a.spread_rate, a.mean_final_orange, a.max_std_orange
        ),
    )
}

fn c02_er_high_spreads() -> bool {
    let a = run_preset("fig1a-er-high");
    report(
        "2",
        "er-high spread",
        a.spread_rate >= 0.90 && a.mean_final_orange >= 0.5,
        format!(
            "spread_rate={} (>= 0.90), mean_final_orange={:.4} (>= 0.5)",
            a.spread_rate, a.mean_final_orange
        ),
    )
}

fn c03_flower_does_not_spread() -> bool {
    let single = run_preset("fig1a-flower");
    let worst = single.final_orange.iter().copied().fold(0.0, f64::max);
    let a = report(
        "3a",
        "n-flower, one random seed",
        single.final_orange.iter().all(|&x| x < 0.01),
        format!(
            "max final orange {worst:.5} over {} runs (each < 0.01)",
            single.replications
        ),
    );
    let three = run_preset("fig1a-flower-s3");
    let clean = three.final_orange.iter().filter(|&&x| x < 0.01).count();
    let worst = three.final_orange.iter().copied().fold(0.0, f64::max);
    let b = report(
        "3b",
        "n-flower, three red super nodes",
        clean >= 99,
        format!(
            "{clean}/{} runs below 0.01 (need >= 99), max {worst:.5}; the seeded super nodes alone are {:.5} of the nodes",
            three.replications,
            3.0 * 100.0 / 16000.0
        ),
    );
    a && b
}

fn c04_moderate_expander_spreads_quickly() -> bool {
    let a = run_preset("fig1a-me-low");
    report(
        "4",
        "moderate expander spread and speed",
        a.spread_rate >= 0.95 && (25.0..=100.0).contains(&a.median_rounds),
        format!(
            "spread_rate={} (>= 0.95), median rounds={} (in [25, 100])",
            a.spread_rate, a.median_rounds
        ),
    )
}

fn c05_hear_twice_halts_moderate_expander() -> bool {
    let g = GraphSource::generated(me_low()).build(1).unwrap();
    let cfg = ProcessConfig::default().with_countermeasure(Countermeasure::hear_twice());
    let net = Network::prepare(&g, &cfg, 1).unwrap();
    let layout = g.super_layout().unwrap().to_vec();
    let (mut spread, mut contained) = (0, 0);
    for i in 0..100u64 {
        let sim = Simulation::new(&net, &cfg, 1 + i).unwrap();
        let seed_supers: HashSet<u32> = sim.seeds().iter().map(|&v| layout[v as usize]).collect();
        assert_eq!(sim.seeds().len(), 2);
        let mut escaped = false;
        let result = sim.run_observed(|s| {
            escaped |= s
                .colors()
                .enumerate()
                .any(|(v, c)| c == Color::Red && !seed_supers.contains(&layout[v]));
        });
        spread += usize::from(rumorsim::spreads(&result));
        contained += usize::from(!escaped);
    }
    report(
        "5",
        "hear-twice on moderate expander",
        spread == 0 && contained >= 95,
        format!("spreading runs={spread} (== 0), runs contained in seed super nodes={contained}/100 (>= 95)"),
    )
}

fn fb_path() -> Option<PathBuf> {
    let env = std::env::var_os("RUMORSIM_FB_EDGES").map(PathBuf::from);
    let local = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/facebook_combined.txt");
    env.into_iter().chain([local]).find(|p| p.is_file())
}

/// The Facebook graph if available, otherwise the matched hyperbolic graph.
fn social_graph() -> (Graph, bool) {
    match fb_path() {
        Some(p) => {
            let g = load_snap(&p, true).unwrap().graph;
            assert_eq!(
                (g.n(), g.m()),
                (FB_NODES, FB_EDGES),
                "unexpected dataset size"
            );
            (g, true)
        }
        None => (GraphSource::generated(hrg_fb()).build(1).unwrap(), false),
    }
}

fn run_on(g: &Graph, name: &str, cm: Countermeasure) -> RunAggregate {
    let spec = ExperimentSpec::new(
        name,
        GraphSource::generated(hrg_fb()),
        ProcessConfig::default().with_countermeasure(cm),
    )
    .with_replications(100);
    run_experiment_on(&spec, g).unwrap().aggregate
}

/// Prints the verdict; on the stand-in graph a failure is reported but not fatal
/// because the criterion is stated for the dataset.
fn social_verdict(id: &str, name: &str, real: bool, pass: bool, detail: String) -> bool {
    if real {
        return report(id, name, pass, detail);
    }
    println!("[UNVERIFIED] criterion {id} {name}: Facebook edge list not found");
    println!(
        "  stand-in (hyperbolic graph, {FB_NODES} nodes, mean degree {:.2}): {} {detail}",
        2.0 * FB_EDGES as f64 / FB_NODES as f64,
        if pass { "pass" } else { "fail" }
    );
    true
}

fn c06_fact_checkers_effective() -> bool {
    let (g, real) = social_graph();
    let a = run_on(&g, "cm5", Countermeasure::fact_checkers());
    let pass = a.mean_final_orange <= 0.05;
    let detail = format!("mean_final_orange={:.4} (<= 0.05)", a.mean_final_orange);
    social_verdict("6", "fact checkers on Facebook", real, pass, detail)
}

fn c07_partial_countermeasures() -> bool {
    let (g, real) = social_graph();
    let base = run_on(&g, "cm0", Countermeasure::None).mean_final_orange;
    let mut all = true;
    let mut details = vec![format!("baseline {base:.4}")];
    for cm in [
        Countermeasure::block_nodes(),
        Countermeasure::accuracy_flags(),
        Countermeasure::spread_truth(4),
    ] {
        let m = run_on(&g, cm.label(), cm.clone()).mean_final_orange;
        all &= m < base && m >= 0.10;
        details.push(format!("{} {m:.4}", cm.label()));
    }
    let detail = format!("{} (each < baseline and >= 0.10)", details.join(", "));
    social_verdict(
        "7",
        "node blocking, accuracy flags, truth seeding",
        real,
        all,
        detail,
    )
}

fn c08_truth_delay_monotone() -> bool {
    let (g, real) = social_graph();
    let means: Vec<f64> = [1u64, 4, 16]
        .iter()
        .map(|&tau| run_on(&g, "cm4", Countermeasure::spread_truth(tau)).mean_final_orange)
        .collect();
    let pass = means.windows(2).all(|w| w[0] <= w[1]);
    let detail = format!(
        "tau=1: {:.4}, tau=4: {:.4}, tau=16: {:.4} (non-decreasing)",
        means[0], means[1], means[2]
    );
    social_verdict("8", "truth delay monotonicity", real, pass, detail)
}

fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    Graph::from_edges(10, outer.chain(spokes).chain(inner)).unwrap()
}

fn c09_spectral_oracles() -> bool {
    let k4 = Graph::from_edges(4, (0..4u32).flat_map(|u| (u + 1..4).map(move |v| (u, v)))).unwrap();
    let c8 = Graph::from_edges(8, (0..8u32).map(|i| (i, (i + 1) % 8))).unwrap();
    let mut exact = true;
    let mut details = Vec::new();
    for (name, g, want) in [
        ("K4", k4, 1.0),
        ("C8", c8, 2f64.sqrt()),
        ("Petersen", petersen(), 2.0),
    ] {
        let est = estimate_lambda(&g, 1e-12, 100_000, 1).unwrap();
        exact &= (est.lambda - want).abs() <= 1e-6;
        details.push(format!("{name} {:.9} (want {want:.9})", est.lambda));
    }
    let bound = 3.0 * 20f64.sqrt();
    let below = (0..100u64)
        .filter(|&s| {
            let g = gen_random_regular(1000, 20, s).unwrap();
            estimate_lambda(&g, 1e-6, default_max_iter(1000), s)
                .unwrap()
                .lambda
                <= bound
        })
        .count();
    let a = report(
        "9a",
        "analytic spectra",
        exact,
        format!("{} (tol 1e-6)", details.join(", ")),
    );
    let b = report(
        "9b",
        "random regular spectral bound",
        below >= 95,
        format!("lambda <= 3*sqrt(20) in {below}/100 seeds (>= 95)"),
    );
    a && b
}

/// Modularity straight from the definition `(1/2m) Σ_ij [A_ij - k_i k_j / 2m] δ(c_i, c_j)`.
fn modularity_oracle(n: usize, edges: &HashSet<(usize, usize)>, labels: &[usize]) -> f64 {
    let mut deg = vec![0.0; n];
    for &(u, v) in edges {
        deg[u] += 1.0;
        deg[v] += 1.0;
    }
    let two_m = 2.0 * edges.len() as f64;
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                let a = if edges.contains(&(i.min(j), i.max(j))) {
                    1.0
                } else {
                    0.0
                };
                q += a - deg[i] * deg[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n` as restricted-growth label strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for l in 0..=max + 1 {
            prefix.push(l);
            rec(prefix, max.max(l), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(&mut vec![0], 0, n, &mut out);
    }
    out
}

fn as_blocks(labels: &[u32]) -> Vec<Vec<usize>> {
    let mut map: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (v, &l) in labels.iter().enumerate() {
        map.entry(l).or_default().push(v);
    }
    let mut blocks: Vec<_> = map.into_values().collect();
    blocks.sort();
    blocks
}

fn clique_ring(cliques: usize, size: usize, ring: bool) -> (Graph, HashSet<(usize, usize)>) {
    let mut edges = HashSet::new();
    for c in 0..cliques {
        for i in 0..size {
            for j in i + 1..size {
                edges.insert((c * size + i, c * size + j));
            }
        }
        let links = if ring { cliques } else { cliques - 1 };
        if c < links {
            let (a, b) = (c * size, ((c + 1) % cliques) * size + 1);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let g = Graph::from_edges(
        cliques * size,
        edges.iter().map(|&(u, v)| (u as NodeId, v as NodeId)),
    )
    .unwrap();
    (g, edges)
}

/// Returns (unique optimum found, louvain matches it).
fn louvain_matches(
    g: &Graph,
    edges: &HashSet<(usize, usize)>,
    candidates: Vec<Vec<usize>>,
) -> (bool, bool, f64) {
    let scored: Vec<(f64, Vec<usize>)> = candidates
        .into_iter()
        .map(|l| (modularity_oracle(g.n(), edges, &l), l))
        .collect();
    let best = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let optima: Vec<&Vec<usize>> = scored
        .iter()
        .filter(|s| s.0 > best - 1e-12)
        .map(|s| &s.1)
        .collect();
    let want = as_blocks(&optima[0].iter().map(|&l| l as u32).collect::<Vec<_>>());
    let got = as_blocks(louvain(g, 7).unwrap().labels());
    (optima.len() == 1, got == want, best)
}

fn c10_louvain_matches_brute_force_optimum() -> bool {
    let (two, two_edges) = clique_ring(2, 5, false);
    let (u1, m1, q1) = louvain_matches(&two, &two_edges, set_partitions(10));
    let a = report(
        "10a",
        "louvain on two bridged K5",
        u1 && m1,
        format!("optimum Q={q1:.6} over all 115975 partitions, unique={u1}, louvain equal={m1}"),
    );
    let (ring, ring_edges) = clique_ring(8, 5, true);
    let merges: Vec<Vec<usize>> = set_partitions(8)
        .into_iter()
        .map(|p| (0..40).map(|v| p[v / 5]).collect())
        .collect();
    let count = merges.len();
    let (u2, m2, q2) = louvain_matches(&ring, &ring_edges, merges);
    let b = report(
        "10b",
        "louvain on ring of 8 K5",
        u2 && m2,
        format!("optimum Q={q2:.6} over {count} clique-respecting partitions, unique={u2}, louvain equal={m2}"),
    );
    a && b
}

/// Non-isomorphic simple graphs on `n` nodes as edge lists.
fn nonisomorphic_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = (0..pairs.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| pairs[i])
            .collect();
        let canonical = perms
            .iter()
            .map(|p| {
                let mut e: Vec<(usize, usize)> = edges
                    .iter()
                    .map(|&(u, v)| (p[u].min(p[v]), p[u].max(p[v])))
                    .collect();
                e.sort();
                e
            })
            .min()
            .unwrap();
        if seen.insert(canonical) {
            out.push(edges);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Exact distribution of the coloring after one round, by enumerating every outcome
/// of the seed's Bernoulli trials. Seeds act with `J = 1`.
fn exact_round_one(
    n: usize,
    edges: &[(usize, usize)],
    seed: usize,
    k: u32,
) -> HashMap<Vec<Color>, f64> {
    let adj: Vec<HashSet<usize>> = (0..n)
        .map(|v| {
            edges
                .iter()
                .filter_map(|&(a, b)| {
                    if a == v {
                        Some(b)
                    } else if b == v {
                        Some(a)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    let trust = |u: usize, v: usize| {
        let mut cu = adj[u].clone();
        cu.insert(u);
        let mut cv = adj[v].clone();
        cv.insert(v);
        cu.intersection(&cv).count() as f64 / adj[u].union(&adj[v]).count() as f64
    };
    let targets: Vec<usize> = adj[seed].iter().copied().collect();
    let seed_color = if k == 1 { Color::Orange } else { Color::Red };
    let mut dist = HashMap::new();
    for outcome in 0u32..(1 << targets.len()) {
        let mut p = 1.0;
        let mut coloring = vec![Color::Uncolored; n];
        coloring[seed] = seed_color;
        for (i, &t) in targets.iter().enumerate() {
            let q = trust(t, seed) / 2.0;
            if outcome >> i & 1 == 1 {
                p *= q;
                coloring[t] = Color::Red;
            } else {
                p *= 1.0 - q;
            }
        }
        *dist.entry(coloring).or_insert(0.0) += p;
    }
    dist
}

fn c11_engine_matches_exact_round_one_distribution() -> bool {
    const SIMS: u64 = 100_000;
    let mut worst = (0.0f64, String::new());
    let mut cases = 0;
    for n in 1..=5 {
        for edges in nonisomorphic_graphs(n) {
            let g = Graph::from_edges(n, edges.iter().map(|&(u, v)| (u as NodeId, v as NodeId)))
                .unwrap();
            for seed in 0..n {
                let cfg =
                    ProcessConfig::default().with_seeding(Seeding::Nodes(vec![seed as NodeId]));
                let net = Network::prepare(&g, &cfg, 0).unwrap();
                let mut counts: HashMap<Vec<Color>, u64> = HashMap::new();
                for s in 0..SIMS {
                    let mut sim = Simulation::new(&net, &cfg, s).unwrap();
                    sim.step();
                    *counts.entry(sim.state().colors().collect()).or_insert(0) += 1;
                }
                let exact = exact_round_one(n, &edges, seed, cfg.k);
                let keys: HashSet<&Vec<Color>> = exact.keys().chain(counts.keys()).collect();
                let tv = keys
                    .into_iter()
                    .map(|c| {
                        let emp = *counts.get(c).unwrap_or(&0) as f64 / SIMS as f64;
                        (emp - exact.get(c).copied().unwrap_or(0.0)).abs()
                    })
                    .sum::<f64>()
                    / 2.0;
                if tv > worst.0 {
                    worst = (tv, format!("n={n} edges={edges:?} seed={seed}"));
                }
                cases += 1;
            }
        }
    }
    report(
        "11",
        "round-one distribution on all graphs up to 5 nodes",
        worst.0 <= 0.01,
        format!(
            "{cases} (graph, seed) cases, worst total variation {:.5} (<= 0.01) at {}",
            worst.0, worst.1
        ),
    )
}

fn cli(args: &[&str], cwd: &Path) {
    let out = Command::new(env!("CARGO_BIN_EXE_rumorsim"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "rumorsim {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_all(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.to_string_lossy().ends_with(".timing.json"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect()
}

fn c12_cli_outputs_are_byte_identical() -> bool {
    let work = tempfile::tempdir().unwrap();
    let cfg = work.path().join("cm5.toml");
    std::fs::write(
        &cfg,
        "name = \"me-cm5\"\nreplications = 20\nseed = 3\n\n[graph]\nfamily = \"moderate-expander\"\nn = 2000\nd = 3\nclique_size = 10\n\n[countermeasure]\nkind = \"fact-checkers\"\n",
    )
    .unwrap();
    let mut runs = Vec::new();
    for round in 0..2 {
        let out = work.path().join(format!("run{round}"));
        std::fs::create_dir(&out).unwrap();
        let o = out.to_str().unwrap();
        let c = cfg.to_str().unwrap();
        cli(
            &[
                "simulate",
                "--gen",
                "er:n=3000,p=0.003",
                "--seed",
                "9",
                "--out",
                &format!("{o}/traj.csv"),
                "--dump-states",
                &format!("{o}/states.txt"),
            ],
            work.path(),
        );
        cli(
            &[
                "simulate",
                "--gen",
                "flower:n=600",
                "--config",
                c,
                "--seed",
                "4",
                "--out",
                &format!("{o}/cm5.csv"),
            ],
            work.path(),
        );
        cli(&["experiment", "--config", c, "--out", o], work.path());
        cli(
            &[
                "experiment",
                "--preset",
                "fig1a-flower",
                "--replications",
                "10",
                "--out",
                o,
            ],
            work.path(),
        );
        runs.push(read_all(&out));
    }
    let files: Vec<&String> = runs[0].keys().collect();
    report(
        "12",
        "byte-identical CLI outputs",
        runs[0] == runs[1] && files.len() == 7,
        format!("{} data files compared: {files:?}", files.len()),
    )
}

type Criterion = (&'static str, fn() -> bool);

fn main() {
    let criteria: &[Criterion] = &[
        ("1", c01_er_low_does_not_spread),
        ("2", c02_er_high_spreads),
        ("3", c03_flower_does_not_spread),
        ("4", c04_moderate_expander_spreads_quickly),
        ("5", c05_hear_twice_halts_moderate_expander),
        ("6", c06_fact_checkers_effective),
        ("7", c07_partial_countermeasures),
        ("8", c08_truth_delay_monotone),
        ("9", c09_spectral_oracles),
        ("10", c10_louvain_matches_brute_force_optimum),
        ("11", c11_engine_matches_exact_round_one_distribution),
        ("12", c12_cli_outputs_are_byte_identical),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = Vec::new();
    for (id, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let start = Instant::now();
        let ok = std::panic::catch_unwind(check).unwrap_or_else(|_| {
            println!("[FAIL] criterion {id}: panicked");
            false
        });
        println!("  ({:.1}s)", start.elapsed().as_secs_f64());
        if !ok {
            failed.push(*id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
