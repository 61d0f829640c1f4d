use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rumorsim::generators::{
    gen_er, gen_flower, gen_hrg, gen_moderate_expander, gen_random_regular,
};
use rumorsim::graph::{Graph, NodeId};
use rumorsim::spectral::{check_boundary_bound, estimate_lambda};

#[test]
fn er_edge_count_matches_binomial_mean() {
    let n = 4000usize;
    let p = 4.0 / (n as f64).sqrt();
    let expected = (n * (n - 1) / 2) as f64 * p;
    let mean = (0..50)
        .map(|s| gen_er(n, p, s).unwrap().m() as f64)
        .sum::<f64>()
        / 50.0;
    assert!(
        (mean / expected - 1.0).abs() < 0.02,
        "mean {mean} vs {expected}"
    );
}

#[test]
fn hrg_mean_degree_within_ten_percent() {
    for seed in 0..20 {
        let g = gen_hrg(1500, 14.0, 2.5, 0.6, seed).unwrap();
        let avg = 2.0 * g.m() as f64 / g.n() as f64;
        assert!((avg / 14.0 - 1.0).abs() <= 0.10, "seed {seed}: {avg}");
    }
}

#[test]
fn flower_and_expander_degree_sequences() {
    let (n, r) = (600, 6);
    let f = gen_flower(n, r).unwrap();
    for v in 0..n as NodeId {
        let boundary = (v as usize).is_multiple_of(r);
        assert_eq!(f.degree(v).unwrap(), if boundary { r + 1 } else { r - 1 });
    }
    let big_n = n / r;
    assert_eq!(f.m(), big_n * (1 + (r - 1) * (r - 2) / 2 + (r - 1)));

    let (n, d, c) = (1200, 3, 10);
    let me = gen_moderate_expander(n, d, c, 4).unwrap();
    assert!((0..n as NodeId).all(|v| me.degree(v).unwrap() == c - 1 + d));
    let base = me.contract_super_nodes().unwrap();
    assert_eq!(base.regular_degree(), Some(d * c));
    assert_eq!(base.m() * 2, (n / c) * d * c);
}

#[test]
fn generators_are_deterministic() {
    assert_eq!(
        gen_random_regular(300, 8, 9).unwrap(),
        gen_random_regular(300, 8, 9).unwrap()
    );
    assert_eq!(
        gen_hrg(400, 8.0, 2.5, 0.6, 9).unwrap(),
        gen_hrg(400, 8.0, 2.5, 0.6, 9).unwrap()
    );
    assert_eq!(
        gen_moderate_expander(640, 2, 8, 9).unwrap(),
        gen_moderate_expander(640, 2, 8, 9).unwrap()
    );
}

#[test]
fn lambda_is_relabeling_invariant() {
    let g = gen_random_regular(200, 6, 3).unwrap();
    let mut perm: Vec<NodeId> = (0..200).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(1));
    let h = Graph::from_edges(
        200,
        g.edges().map(|(u, v)| (perm[u as usize], perm[v as usize])),
    )
    .unwrap();
    let a = estimate_lambda(&g, 1e-10, 50_000, 0).unwrap();
    let b = estimate_lambda(&h, 1e-10, 50_000, 7).unwrap();
    assert!(a.converged && b.converged);
    assert!(
        (a.lambda - b.lambda).abs() < 1e-4,
        "{} vs {}",
        a.lambda,
        b.lambda
    );
}

#[test]
fn contracted_expander_base_has_large_boundaries() {
    // Base graph with N = 1000, D = 20, recovered from a blow-up with cliques of 4.
    let me = gen_moderate_expander(4000, 5, 4, 2).unwrap();
    let base = me.contract_super_nodes().unwrap();
    assert_eq!((base.n(), base.regular_degree()), (1000, Some(20)));
    let report = check_boundary_bound(&base, 200, 0.1, 5).unwrap();
    println!(
        "boundary ratio min {:.3} mean {:.3} (worst |A| = {})",
        report.min_ratio, report.mean_ratio, report.worst_set_size
    );
    assert!(report.min_ratio >= 0.1);
}
