//! Generator statistics against exact combinatorial oracles.

use moddens::generators::{gen_er, gen_ring, gen_two_cliques_w, gen_two_communities, generate, GeneratorSpec};

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// `c[n][k]`: connected labeled graphs on `n` nodes with `k` edges. Every
/// graph on `n` nodes splits into the component of node 0 (size `s`) and an
/// arbitrary graph on the other `n − s` nodes.
fn connected_counts(max_n: usize) -> Vec<Vec<f64>> {
    let mut c = vec![Vec::new(); max_n + 1];
    for n in 1..=max_n {
        let total = pair_count(n);
        let mut row = vec![0.0; total + 1];
        for (k, slot) in row.iter_mut().enumerate() {
            let mut disconnected = 0.0;
            for (s, counts) in c.iter().enumerate().take(n).skip(1) {
                let rest = pair_count(n - s);
                for (j, &cj) in counts.iter().enumerate() {
                    if j <= k {
                        disconnected += binomial(n - 1, s - 1) * cj * binomial(rest, k - j);
                    }
                }
            }
            *slot = binomial(total, k) - disconnected;
        }
        c[n] = row;
    }
    c
}

#[test]
fn connected_count_oracle_matches_known_values() {
    let c = connected_counts(8);
    // Labeled trees: n^(n-2).
    for n in 2..=8 {
        assert!((c[n][n - 1] - (n as f64).powi(n as i32 - 2)).abs() < 0.5, "trees on {n}");
    }
    let on_four: f64 = c[4].iter().sum();
    assert_eq!(on_four.round(), 38.0);
    assert_eq!(c[4][3].round(), 16.0);
    assert_eq!(c[4][6].round(), 1.0);
}

/// `E[|E| | connected]` for `G(m, p)`.
fn conditional_mean_edges(m: usize, p: f64) -> (f64, f64) {
    let c = connected_counts(m);
    let total = pair_count(m);
    let (mut z, mut first, mut second) = (0.0, 0.0, 0.0);
    for (k, &ck) in c[m].iter().enumerate() {
        let w = ck * p.powi(k as i32) * (1.0 - p).powi((total - k) as i32);
        z += w;
        first += k as f64 * w;
        second += (k * k) as f64 * w;
    }
    let mean = first / z;
    (mean, second / z - mean * mean)
}

#[test]
fn er_edge_count_matches_conditional_expectation() {
    let (m, p, seeds) = (10, 0.4, 1000);
    let (mean, var) = conditional_mean_edges(m, p);
    // Conditioning on connectivity lifts the mean above p·m(m−1)/2 = 18.
    assert!(mean > 18.0 && mean < 19.0, "{mean}");
    let sample: f64 = (0..seeds)
        .map(|s| gen_er(m, p, s).unwrap().edge_count() as f64)
        .sum::<f64>()
        / seeds as f64;
    let se = (var / seeds as f64).sqrt();
    assert!((sample - mean).abs() < 4.0 * se, "sample {sample}, expected {mean} ± {se}");
}

#[test]
fn every_sample_is_connected() {
    for seed in 0..200 {
        assert!(gen_er(8, moddens::generators::p_min(8), seed).unwrap().is_connected());
        let lg = gen_ring(&[3, 4, 5], &[1.0, 0.7, 0.6], seed).unwrap();
        assert!(lg.graph.is_connected());
    }
}

#[test]
fn two_communities_single_bridge() {
    let lg = gen_two_communities(4, 6, 1.0, 1.0, 3).unwrap();
    assert_eq!(lg.graph.edge_count(), 6 + 15 + 1);
    let cut = lg
        .graph
        .edges()
        .iter()
        .filter(|e| lg.truth.cluster_of(e.u) != lg.truth.cluster_of(e.v))
        .count();
    assert_eq!(cut, 1);
}

#[test]
fn ring_has_one_bridge_per_adjacent_pair() {
    let lg = gen_ring(&[3, 3, 4, 5], &[1.0; 4], 9).unwrap();
    let mut between = std::collections::BTreeSet::new();
    let mut cut = 0;
    for e in lg.graph.edges() {
        let (a, b) = (lg.truth.cluster_of(e.u), lg.truth.cluster_of(e.v));
        if a != b {
            cut += 1;
            between.insert((a.min(b), a.max(b)));
        }
    }
    assert_eq!(cut, 4);
    assert_eq!(between.into_iter().collect::<Vec<_>>(), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
}

#[test]
fn two_cliques_bridge_count_spans_full_range() {
    for w in [0, 1, 7, 12] {
        let lg = gen_two_cliques_w(3, 4, w, w as u64).unwrap();
        assert_eq!(lg.graph.edge_count(), 3 + 6 + w);
    }
    assert!(gen_two_cliques_w(3, 4, 13, 0).is_err());
}

#[test]
fn identical_seed_identical_graph() {
    let spec = GeneratorSpec::ring(vec![4, 5, 6], vec![0.8, 0.8, 0.8], 21);
    let a = generate(&spec).unwrap();
    let b = generate(&spec).unwrap();
    assert_eq!(a.graph.to_edge_list(), b.graph.to_edge_list());
    assert_eq!(a.truth.assignment(), b.truth.assignment());
    let c = generate(&GeneratorSpec { seed: 22, ..spec }).unwrap();
    assert_ne!(a.graph.to_edge_list(), c.graph.to_edge_list());
}
