//! Second-eigenvalue estimation for regular graphs and empirical boundary checks.
//!
//! For a `D`-regular graph the top eigenpair is `(D, 1)`. The estimator runs power
//! iteration on `A²` inside the orthogonal complement of the trivial eigenvectors
//! (the all-ones vector, plus the signed bipartition vector when the graph is
//! bipartite, whose eigenvalue is `-D`). Iterating `A²` makes the `+μ` and `-μ`
//! eigenspaces collapse onto one, so the dominant magnitude converges without
//! sign tracking.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub lambda: f64,
    pub iterations_used: usize,
    /// `‖A²x - θx‖ / max(θ, 1)` at the final iterate.
    pub residual: f64,
    pub converged: bool,
}

pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_ITER_CAP: usize = 100_000;

/// Default iteration budget: `1000 · ⌈ln N⌉`, capped at [`MAX_ITER_CAP`].
pub fn default_max_iter(n: usize) -> usize {
    let log_n = (n.max(2) as f64).ln().ceil() as usize;
    (1000 * log_n).min(MAX_ITER_CAP)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn apply(g: &Graph, x: &[f64], out: &mut [f64]) {
    for (v, o) in out.iter_mut().enumerate() {
        *o = g
            .neighbors(v as NodeId)
            .iter()
            .map(|&w| x[w as usize])
            .sum();
    }
}

fn project_out(x: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(x, b);
        x.iter_mut().zip(b).for_each(|(xi, bi)| *xi -= c * bi);
    }
}

/// Orthonormal basis of the trivial eigenvectors of a regular graph.
fn trivial_basis(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut basis = vec![vec![1.0 / (n as f64).sqrt(); n]];
    if let Some(side) = g.bipartition() {
        let mut s: Vec<f64> = side.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
        project_out(&mut s, &basis);
        let len = norm(&s);
        if len > 1e-9 {
            s.iter_mut().for_each(|x| *x /= len);
            basis.push(s);
        }
    }
    basis
}

/// Estimates λ(G), the largest non-trivial absolute adjacency eigenvalue of a
/// regular graph.
pub fn estimate_lambda(
    g: &Graph,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<SpectralEstimate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if g.regular_degree().is_none() {
        return Err(Error::usage(
            "the second-eigenvalue estimator requires a regular graph",
        ));
    }
    let n = g.n();
    let basis = trivial_basis(g);
    if n <= basis.len() {
        return Ok(SpectralEstimate {
            lambda: 0.0,
            iterations_used: 0,
            residual: 0.0,
            converged: true,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    project_out(&mut x, &basis);
    let len = norm(&x);
    x.iter_mut().for_each(|v| *v /= len);

    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut estimate = SpectralEstimate {
        lambda: 0.0,
        iterations_used: 0,
        residual: f64::INFINITY,
        converged: false,
    };
    for it in 1..=max_iter.max(1) {
        apply(g, &x, &mut y);
        apply(g, &y, &mut z);
        project_out(&mut z, &basis);
        let theta = dot(&x, &z).max(0.0);
        let zn = norm(&z);
        let residual = x
            .iter()
            .zip(&z)
            .map(|(xi, zi)| (zi - theta * xi).powi(2))
            .sum::<f64>()
            .sqrt()
            / theta.max(1.0);
        estimate = SpectralEstimate {
            lambda: theta.sqrt(),
            iterations_used: it,
            residual,
            converged: residual <= tol,
        };
        if estimate.converged || zn < 1e-300 {
            estimate.converged = true;
            break;
        }
        x.iter_mut().zip(&z).for_each(|(xi, zi)| *xi = zi / zn);
    }
    Ok(estimate)
}

/// Summary of sampled node-boundary ratios `|∂(A)| / min(2N/5, |A|·D)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub trials: usize,
    pub min_ratio: f64,
    pub mean_ratio: f64,
    /// Size of the set that attained `min_ratio`.
    pub worst_set_size: usize,
}

/// Samples `trials` uniformly random node sets of uniformly random size in
/// `[1, max_set_frac · N]` and reports their boundary ratios.
pub fn check_boundary_bound(
    g: &Graph,
    trials: usize,
    max_set_frac: f64,
    seed: u64,
) -> Result<BoundaryReport> {
    let degree = g
        .regular_degree()
        .ok_or_else(|| Error::usage("boundary check requires a regular graph"))?;
    if !(max_set_frac > 0.0 && max_set_frac <= 0.1) {
        return Err(Error::usage(format!(
            "set fraction {max_set_frac} must lie in (0, 1/10]"
        )));
    }
    let n = g.n();
    let max_size = ((max_set_frac * n as f64).floor() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<NodeId> = (0..n as NodeId).collect();
    let mut report = BoundaryReport {
        trials,
        min_ratio: f64::INFINITY,
        mean_ratio: 0.0,
        worst_set_size: 0,
    };
    for _ in 0..trials {
        let size = rng.gen_range(1..=max_size);
        let (chosen, _) = pool.partial_shuffle(&mut rng, size);
        let set = NodeSet::from_nodes(n, chosen.iter().copied())?;
        let boundary = g.node_boundary(&set)?.len() as f64;
        let bound = (2.0 * n as f64 / 5.0).min((size * degree) as f64);
        let ratio = boundary / bound;
        report.mean_ratio += ratio / trials as f64;
        if ratio < report.min_ratio {
            report.min_ratio = ratio;
            report.worst_set_size = size;
        }
    }
    Ok(report)
}
