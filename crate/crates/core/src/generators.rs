//! Seeded graph constructors: Erdős–Rényi, flower, random regular, moderate expander
//! and hyperbolic random graphs.
//!
//! All randomized generators draw from a ChaCha8 stream seeded with the caller's
//! 64-bit seed, so the same `(GenSpec, seed)` always yields the same edge set.

use std::collections::HashSet;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Parameters of a generated graph family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GenSpec {
    Er {
        n: usize,
        p: f64,
    },
    /// `r = None` selects the n-flower: the divisor of `n` nearest to `ln²n`.
    Flower {
        n: usize,
        #[serde(default)]
        r: Option<usize>,
    },
    RandomRegular {
        nodes: usize,
        degree: usize,
    },
    /// `clique_size = None` uses the divisor of `n` nearest to `ln²n`.
    ModerateExpander {
        n: usize,
        d: usize,
        #[serde(default)]
        clique_size: Option<usize>,
    },
    Hrg {
        n: usize,
        avg_degree: f64,
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default = "default_temperature")]
        temperature: f64,
    },
}

fn default_beta() -> f64 {
    2.5
}

fn default_temperature() -> f64 {
    0.6
}

impl GenSpec {
    pub fn generate(&self, seed: u64) -> Result<Graph> {
        match *self {
            GenSpec::Er { n, p } => gen_er(n, p, seed),
            GenSpec::Flower { n, r } => {
                let r = match r {
                    Some(r) => r,
                    None => n_flower_petal(n)?,
                };
                gen_flower(n, r)
            }
            GenSpec::RandomRegular { nodes, degree } => gen_random_regular(nodes, degree, seed),
            GenSpec::ModerateExpander { n, d, clique_size } => {
                let c = match clique_size {
                    Some(c) => c,
                    None => nearest_divisor(n, log_squared(n), 1)
                        .ok_or_else(|| Error::usage(format!("no clique size divides {n}")))?,
                };
                gen_moderate_expander(n, d, c, seed)
            }
            GenSpec::Hrg {
                n,
                avg_degree,
                beta,
                temperature,
            } => gen_hrg(n, avg_degree, beta, temperature, seed),
        }
    }

    /// Parses the compact form `family:key=value,...`, e.g. `flower:n=12,r=3`.
    pub fn parse_compact(s: &str) -> Result<Self> {
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut table = toml::Table::new();
        table.insert("family".into(), toml::Value::String(family.trim().into()));
        for kv in rest.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::usage(format!("expected key=value, got `{kv}`")))?;
            let (k, v) = (k.trim().replace('-', "_"), v.trim());
            let float_key = matches!(k.as_str(), "p" | "avg_degree" | "beta" | "temperature");
            let value = if let (false, Ok(i)) = (float_key, v.parse::<i64>()) {
                toml::Value::Integer(i)
            } else if let Ok(f) = v.parse::<f64>() {
                toml::Value::Float(f)
            } else {
                return Err(Error::usage(format!(
                    "`{k}` needs a numeric value, got `{v}`"
                )));
            };
            table.insert(k, value);
        }
        table.try_into().map_err(|e: toml::de::Error| {
            Error::usage(format!("bad graph spec `{s}`: {}", e.message()))
        })
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `ln(n)²`, natural logarithm.
pub fn log_squared(n: usize) -> f64 {
    let l = (n as f64).ln();
    l * l
}

/// Divisor `r` of `n` closest to `target` with `n / r >= min_quotient`; ties go to
/// the smaller divisor.
pub fn nearest_divisor(n: usize, target: f64, min_quotient: usize) -> Option<usize> {
    (1..=n)
        .filter(|r| n.is_multiple_of(*r) && n / r >= min_quotient)
        .min_by(|&a, &b| {
            let da = (a as f64 - target).abs();
            let db = (b as f64 - target).abs();
            da.total_cmp(&db).then(a.cmp(&b))
        })
}

/// Petal size of the n-flower.
pub fn n_flower_petal(n: usize) -> Result<usize> {
    nearest_divisor(n, log_squared(n), 3)
        .ok_or_else(|| Error::usage(format!("no n-flower exists on {n} nodes")))
}

pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::usage(format!("edge probability {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    if p >= 1.0 {
        for u in 0..n as NodeId {
            for v in u + 1..n as NodeId {
                edges.push((u, v));
            }
        }
        return Graph::from_edges(n, edges);
    }
    if p > 0.0 && n > 1 {
        // Geometric skipping over the pairs (u, v), v < u, in row-major order.
        let mut rng = rng_for(seed);
        let log_q = (1.0 - p).ln();
        let (mut u, mut v): (i64, i64) = (1, -1);
        let n = n as i64;
        loop {
            let r: f64 = rng.gen();
            v += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
            while v >= u && u < n {
                v -= u;
                u += 1;
            }
            if u >= n {
                break;
            }
            edges.push((v as NodeId, u as NodeId));
        }
    }
    Graph::from_edges(n, edges)
}

/// Cycle of `n / r` boundary nodes, each owning a private `(r-1)`-clique fully joined
/// to it. Node `i * r` is the boundary node of super node `i`.
pub fn gen_flower(n: usize, r: usize) -> Result<Graph> {
    if r == 0 || !n.is_multiple_of(r) {
        return Err(Error::usage(format!("petal size {r} must divide n = {n}")));
    }
    let supers = n / r;
    if supers < 3 {
        return Err(Error::usage(format!(
            "a flower needs at least 3 super nodes, ({n}, {r}) gives {supers}"
        )));
    }
    let mut edges = Vec::new();
    for s in 0..supers {
        let base = (s * r) as NodeId;
        let next = (((s + 1) % supers) * r) as NodeId;
        edges.push((base, next));
        for a in 0..r as NodeId {
            for b in a + 1..r as NodeId {
                edges.push((base + a, base + b));
            }
        }
    }
    let layout = (0..n).map(|v| (v / r) as u32).collect();
    Graph::from_edges(n, edges)?.with_super_layout(layout)
}

const REGULAR_ATTEMPTS: usize = 1000;

/// Uniform-ish simple `D`-regular graph via stub pairing that sets aside conflicting
/// pairs and re-pairs them, restarting when no valid pair is left. For `D > N/2`
/// the sparser complement is generated and inverted.
pub fn gen_random_regular(nodes: usize, degree: usize, seed: u64) -> Result<Graph> {
    if degree >= nodes.max(1) && !(nodes == 0 && degree == 0) {
        return Err(Error::usage(format!(
            "degree {degree} must be smaller than the node count {nodes}"
        )));
    }
    if !(nodes * degree).is_multiple_of(2) {
        return Err(Error::usage(format!(
            "nodes * degree must be even, got {nodes} * {degree}"
        )));
    }
    let mut rng = rng_for(seed);
    if degree > nodes / 2 {
        let sparse = pair_regular(nodes, nodes - 1 - degree, &mut rng)?;
        let mut edges = Vec::with_capacity(nodes * degree / 2);
        for u in 0..nodes as NodeId {
            let nb = sparse.neighbors(u);
            for v in u + 1..nodes as NodeId {
                if nb.binary_search(&v).is_err() {
                    edges.push((u, v));
                }
            }
        }
        return Graph::from_edges(nodes, edges);
    }
    pair_regular(nodes, degree, &mut rng)
}

fn pair_regular(nodes: usize, degree: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    if degree == 0 {
        return Graph::from_edges(nodes, std::iter::empty());
    }
    for _ in 0..REGULAR_ATTEMPTS {
        if let Some(edges) = try_pairing(nodes, degree, rng) {
            return Graph::from_edges(nodes, edges);
        }
    }
    Err(Error::Generation(format!(
        "no simple {degree}-regular pairing on {nodes} nodes after {REGULAR_ATTEMPTS} attempts"
    )))
}

fn try_pairing(nodes: usize, degree: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(NodeId, NodeId)>> {
    let mut edges: HashSet<(NodeId, NodeId)> = HashSet::with_capacity(nodes * degree / 2);
    let mut order: Vec<(NodeId, NodeId)> = Vec::with_capacity(nodes * degree / 2);
    let mut stubs: Vec<NodeId> = (0..nodes as NodeId)
        .flat_map(|v| std::iter::repeat_n(v, degree))
        .collect();
    let mut leftover = vec![0usize; nodes];
    while !stubs.is_empty() {
        stubs.shuffle(rng);
        leftover.iter_mut().for_each(|c| *c = 0);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a != b && edges.insert((a, b)) {
                order.push((a, b));
            } else {
                leftover[a as usize] += 1;
                leftover[b as usize] += 1;
            }
        }
        let pending: Vec<NodeId> = (0..nodes as NodeId)
            .filter(|&v| leftover[v as usize] > 0)
            .collect();
        let suitable = pending
            .iter()
            .enumerate()
            .any(|(i, &a)| pending[i + 1..].iter().any(|&b| !edges.contains(&(a, b))));
        if !pending.is_empty() && !suitable {
            return None;
        }
        stubs = pending
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, leftover[v as usize]))
            .collect();
    }
    Some(order)
}

/// Blow-up of a random `D`-regular base graph (`D = d * c`, `N = n / c`): each base
/// node becomes a `c`-clique and its `D` base edges are dealt round-robin to the
/// clique members, so every member carries exactly `d` external edges.
pub fn gen_moderate_expander(n: usize, d: usize, c: usize, seed: u64) -> Result<Graph> {
    if c == 0 || !n.is_multiple_of(c) {
        return Err(Error::usage(format!("clique size {c} must divide n = {n}")));
    }
    let supers = n / c;
    let base_degree = d * c;
    if base_degree >= supers || !(supers * base_degree).is_multiple_of(2) || d == 0 {
        return Err(Error::usage(format!(
            "moderate expander ({n}, {d}) with cliques of {c} needs a {base_degree}-regular \
             base on {supers} nodes, which does not exist"
        )));
    }
    let base = gen_random_regular(supers, base_degree, seed)?;
    build_blow_up(&base, c)
}

pub(crate) fn build_blow_up(base: &Graph, c: usize) -> Result<Graph> {
    let supers = base.n();
    let n = supers * c;
    let mut edges = Vec::with_capacity(supers * c * (c - 1) / 2 + base.m());
    for x in 0..supers {
        let start = (x * c) as NodeId;
        for a in 0..c as NodeId {
            for b in a + 1..c as NodeId {
                edges.push((start + a, start + b));
            }
        }
    }
    // Endpoint of base edge {x, y} inside x: member `i mod c`, where i is the
    // position of y in x's sorted neighbor list.
    for x in 0..supers as NodeId {
        for (i, &y) in base.neighbors(x).iter().enumerate() {
            if y < x {
                continue;
            }
            let j = base.neighbors(y).binary_search(&x).expect("symmetric base");
            let u = x as usize * c + i % c;
            let v = y as usize * c + j % c;
            edges.push((u as NodeId, v as NodeId));
        }
    }
    let layout = (0..n).map(|v| (v / c) as u32).collect();
    Graph::from_edges(n, edges)?.with_super_layout(layout)
}

/// Precomputed polar coordinates of hyperbolic random graph nodes.
struct HyperbolicPoints {
    uniform_radius: Vec<f64>,
    cos_phi: Vec<f64>,
    sin_phi: Vec<f64>,
}

impl HyperbolicPoints {
    fn sample(n: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut uniform_radius = Vec::with_capacity(n);
        let mut cos_phi = Vec::with_capacity(n);
        let mut sin_phi = Vec::with_capacity(n);
        for _ in 0..n {
            uniform_radius.push(rng.gen::<f64>());
            let phi = rng.gen::<f64>() * 2.0 * PI;
            cos_phi.push(phi.cos());
            sin_phi.push(phi.sin());
        }
        HyperbolicPoints {
            uniform_radius,
            cos_phi,
            sin_phi,
        }
    }

    /// `(cosh r, sinh r)` per node for disk radius `radius`, by inverting the
    /// radial CDF `(cosh(αr) - 1) / (cosh(αR) - 1)`.
    fn radial(&self, alpha: f64, radius: f64) -> Vec<(f64, f64)> {
        let scale = (alpha * radius).cosh() - 1.0;
        self.uniform_radius
            .iter()
            .map(|&u| {
                let r = (1.0 + u * scale).acosh() / alpha;
                (r.cosh(), r.sinh())
            })
            .collect()
    }

    /// Connection probability of `i` and `j` given the radial table.
    #[inline]
    fn link_probability(
        &self,
        rad: &[(f64, f64)],
        i: usize,
        j: usize,
        radius: f64,
        temp: f64,
    ) -> f64 {
        let cos_dphi = self.cos_phi[i] * self.cos_phi[j] + self.sin_phi[i] * self.sin_phi[j];
        let x = (rad[i].0 * rad[j].0 - rad[i].1 * rad[j].1 * cos_dphi).max(1.0);
        let dist = x.acosh();
        1.0 / (1.0 + ((dist - radius) / (2.0 * temp)).exp())
    }

    fn expected_mean_degree(&self, alpha: f64, radius: f64, temp: f64) -> f64 {
        use rayon::prelude::*;
        let rad = self.radial(alpha, radius);
        let n = rad.len();
        let total: f64 = (0..n)
            .into_par_iter()
            .map(|i| {
                (i + 1..n)
                    .map(|j| self.link_probability(&rad, i, j, radius, temp))
                    .sum::<f64>()
            })
            .sum();
        2.0 * total / n as f64
    }
}

/// Hyperbolic random graph with power-law exponent `beta` and temperature `temp`.
///
/// The disk radius is calibrated by bisection so the expected mean degree of the
/// sampled coordinates matches `avg_degree`; the realized mean degree must then land
/// within 10% of the target.
pub fn gen_hrg(n: usize, avg_degree: f64, beta: f64, temp: f64, seed: u64) -> Result<Graph> {
    if beta <= 2.0 {
        return Err(Error::usage(format!(
            "power-law exponent {beta} must exceed 2"
        )));
    }
    if !(temp > 0.0 && temp < 1.0) {
        return Err(Error::usage(format!(
            "temperature {temp} must lie in (0, 1)"
        )));
    }
    if n < 2 || !(avg_degree > 0.0 && avg_degree < (n - 1) as f64) {
        return Err(Error::usage(format!(
            "average degree {avg_degree} infeasible on {n} nodes"
        )));
    }
    let alpha = (beta - 1.0) / 2.0;
    let mut rng = rng_for(seed);
    let points = HyperbolicPoints::sample(n, &mut rng);

    // Closed-form starting guess, then bracket and bisect.
    let xi = alpha / (alpha - 0.5);
    let guess =
        2.0 * ((2.0 / PI) * xi * xi * n as f64 * temp / (PI * temp).sin() / avg_degree).ln();
    let mut lo = (guess - 1.0).max(1e-3);
    let mut hi = guess + 1.0;
    let mean_at = |r: f64| points.expected_mean_degree(alpha, r, temp);
    let mut steps = 0;
    while mean_at(lo) < avg_degree {
        lo = (lo - 2.0).max(lo / 2.0);
        steps += 1;
        if steps > 60 {
            return Err(Error::Generation(
                "cannot bracket the HRG disk radius".into(),
            ));
        }
    }
    while mean_at(hi) > avg_degree {
        hi += 2.0;
        steps += 1;
        if steps > 60 {
            return Err(Error::Generation(
                "cannot bracket the HRG disk radius".into(),
            ));
        }
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let m = mean_at(mid);
        if (m - avg_degree).abs() <= 0.002 * avg_degree {
            lo = mid;
            hi = mid;
            break;
        }
        if m > avg_degree {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let radius = 0.5 * (lo + hi);

    let rad = points.radial(alpha, radius);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = points.link_probability(&rad, i, j, radius, temp);
            if rng.gen::<f64>() < p {
                edges.push((i as NodeId, j as NodeId));
            }
        }
    }
    let g = Graph::from_edges(n, edges)?;
    let realized = 2.0 * g.m() as f64 / n as f64;
    if (realized - avg_degree).abs() > 0.1 * avg_degree {
        return Err(Error::Generation(format!(
            "HRG mean degree {realized:.2} misses target {avg_degree:.2} by more than 10%"
        )));
    }
    Ok(g)
}
