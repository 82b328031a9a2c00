//! Invariants over randomly generated weighted graphs and partitions.

use proptest::prelude::*;

use moddens::bipartition::{
    delta_m_decomposed, delta_m_direct, delta_m_incremental, laplacian_identity_check, BipartitionProposal,
};
use moddens::detector::{detect, DetectorConfig, Init, MoveOrder};
use moddens::metrics::{
    li_modularity_density, modularity_density_sum, modularity_density_tensor, w_threshold_d, w_threshold_m,
};
use moddens::{ClusterStats, Graph, Partition};

/// A ring through `n` nodes (so every node has an edge) plus optional chords,
/// each with its own weight, and a labelling with at most `n` clusters.
fn instance(max_n: usize) -> impl Strategy<Value = (Graph, Partition)> {
    (3..=max_n).prop_flat_map(|n| {
        let chords = prop::collection::vec((0..n, 0..n, 0.1f64..5.0), 0..2 * n);
        let ring = prop::collection::vec(0.1f64..5.0, n);
        let labels = prop::collection::vec(0..n, n);
        (Just(n), ring, chords, labels).prop_map(|(n, ring, chords, labels)| {
            let mut seen = std::collections::BTreeSet::new();
            let mut edges = Vec::new();
            for (u, w) in ring.into_iter().enumerate() {
                let v = (u + 1) % n;
                if seen.insert((u.min(v), u.max(v))) {
                    edges.push((u, v, w));
                }
            }
            for (u, v, w) in chords {
                if u != v && seen.insert((u.min(v), u.max(v))) {
                    edges.push((u, v, w));
                }
            }
            (Graph::from_edges(n, edges).unwrap(), Partition::new(labels).unwrap())
        })
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Nodes of the first cluster with at least two members, split by `mask`.
fn proposal(p: &Partition, mask: u64) -> Option<BipartitionProposal> {
    let cluster = (0..p.cluster_count()).find(|&c| p.size(c) >= 2)?;
    let members = p.members(cluster);
    let mut side: Vec<usize> = members
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> (i % 64) & 1 == 1)
        .map(|(_, &v)| v)
        .collect();
    if side.is_empty() {
        side.push(members[0]);
    }
    if side.len() == members.len() {
        side.pop();
    }
    BipartitionProposal::from_side(p, &side).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sum_and_tensor_forms_agree((g, p) in instance(30)) {
        let sum = modularity_density_sum(&g, &p).unwrap();
        let tensor = modularity_density_tensor(&g, &p).unwrap();
        prop_assert!(close(sum.value, tensor));
        let parts: f64 = sum.clusters.iter().map(|t| t.value).sum();
        prop_assert!(close(parts, sum.value));
    }

    #[test]
    fn node_relabelling_leaves_metrics_unchanged((g, p) in instance(20), seed in any::<u64>()) {
        let n = g.node_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut state = seed | 1;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        let h = Graph::from_edges(n, g.edges().iter().map(|e| (perm[e.u], perm[e.v], e.weight))).unwrap();
        let mut labels = vec![0; n];
        for v in 0..n {
            labels[perm[v]] = p.cluster_of(v);
        }
        let q = Partition::new(labels).unwrap();
        prop_assert!(close(modularity_density_sum(&g, &p).unwrap().value, modularity_density_sum(&h, &q).unwrap().value));
        prop_assert!(close(li_modularity_density(&g, &p).unwrap().value, li_modularity_density(&h, &q).unwrap().value));
    }

    #[test]
    fn cluster_ids_do_not_matter((g, p) in instance(20)) {
        let k = p.cluster_count();
        let flipped = Partition::new(p.assignment().iter().map(|&c| 3 * (k - c) + 7).collect()).unwrap();
        prop_assert!(close(modularity_density_sum(&g, &p).unwrap().value, modularity_density_sum(&g, &flipped).unwrap().value));
    }

    #[test]
    fn stats_account_for_every_edge((g, p) in instance(25)) {
        let s = ClusterStats::compute(&g, &p).unwrap();
        let internal: f64 = (0..s.cluster_count()).map(|c| s.internal_weight(c)).sum();
        let external: f64 = (0..s.cluster_count()).map(|c| s.external_weight(c)).sum();
        let pairs: f64 = s.pairs().iter().map(|&(_, _, w)| w).sum();
        prop_assert!(close(internal + external, 2.0 * g.total_weight()));
        prop_assert!(close(2.0 * pairs, external));
        for &(c, d, w) in s.pairs() {
            prop_assert!(c < d);
            prop_assert_eq!(s.boundary_weight(d, c), w);
        }
    }

    #[test]
    fn li_density_from_strengths((g, p) in instance(20)) {
        let d = li_modularity_density(&g, &p).unwrap().value;
        let expected: f64 = p
            .clusters()
            .iter()
            .map(|members| {
                let strength: f64 = members.iter().map(|&v| g.strength(v)).sum();
                let mut internal = 0.0;
                for &u in members {
                    for &v in members {
                        internal += g.weight(u, v);
                    }
                }
                (2.0 * internal - strength) / members.len() as f64
            })
            .sum();
        prop_assert!(close(d, expected));
    }

    #[test]
    fn bipartition_routes_agree((g, p) in instance(16), mask in any::<u64>()) {
        let Some(prop) = proposal(&p, mask) else { return Ok(()); };
        let direct = delta_m_direct(&g, &p, &prop).unwrap();
        prop_assert!(close(direct, delta_m_incremental(&g, &p, &prop).unwrap()));
        let eval = delta_m_decomposed(&g, &p, &prop).unwrap();
        prop_assert!(close(direct, eval.delta_m));
        prop_assert!(eval.beta >= -1e-12);
        let norm: f64 = eval.f.iter().map(|(_, v)| v * v).sum();
        let sum: f64 = eval.f.iter().map(|(_, v)| v).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12 && sum.abs() < 1e-12);
        prop_assert!(laplacian_identity_check(&g, &p, &prop).unwrap() < 1e-9);
    }

    #[test]
    fn detector_is_monotone_and_idempotent((g, _) in instance(14), seed in any::<u64>(), shuffled in any::<bool>()) {
        let cfg = DetectorConfig {
            seed,
            move_order: if shuffled { MoveOrder::Shuffled } else { MoveOrder::NodeId },
            ..DetectorConfig::default()
        };
        let found = detect(&g, &cfg).unwrap();
        let mut prev = modularity_density_sum(&g, &Partition::singletons(g.node_count())).unwrap().value;
        for step in &found.trace {
            prop_assert!(step.gain > 0.0);
            prop_assert!(close(step.value, prev + step.gain));
            prev = step.value;
        }
        prop_assert!(close(found.report.value, modularity_density_sum(&g, &found.partition).unwrap().value));
        let again = detect(&g, &DetectorConfig { init: Init::Given(found.partition.clone()), ..cfg }).unwrap();
        prop_assert!(again.trace.is_empty());
        prop_assert!(again.partition.same_clustering(&found.partition));
    }

    #[test]
    fn m_threshold_never_below_d(m in 3usize..200, n in 3usize..200) {
        let (wm, wd) = (w_threshold_m(m, n).unwrap(), w_threshold_d(m, n).unwrap());
        prop_assert!(wm >= wd - 1e-12);
        if m == n {
            prop_assert!(close(wm, wd));
        } else {
            prop_assert!(wm > wd);
        }
    }

    #[test]
    fn edge_list_round_trip((g, _) in instance(30)) {
        let text = g.to_edge_list();
        let h = Graph::parse_edge_list(&text).unwrap();
        prop_assert_eq!(h.to_edge_list(), text);
        prop_assert_eq!(h.node_count(), g.node_count());
        prop_assert_eq!(h.total_weight(), g.total_weight());
    }

    #[test]
    fn rand_index_is_a_similarity((_, p) in instance(20), labels in prop::collection::vec(0usize..4, 20)) {
        let q = Partition::new(labels[..p.node_count()].to_vec()).unwrap();
        let r = p.rand_index(&q);
        prop_assert!((0.0..=1.0).contains(&r));
        prop_assert_eq!(r, q.rand_index(&p));
        prop_assert_eq!(p.rand_index(&p), 1.0);
    }
}
