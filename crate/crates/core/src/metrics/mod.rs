//! Modularity density `M`, its per-cluster decomposition, and the reference
//! metric `D` (average modular degree).
//!
//! `M` is evaluated two ways: from [`ClusterStats`] as a sum over clusters
//! and cluster pairs, and from the cluster unit vectors as
//! `2 Σ_c n̂_c·T·n̂_c − N·T·N` with `N = Σ_c n̂_c`. The two routes share no
//! code beyond the graph itself.

pub mod analytic;
pub mod threshold;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::report::round12;
use crate::stats::ClusterStats;

pub use analytic::{analytic_suite, AnalyticTable};
pub use threshold::{ratio_grid, threshold, w_threshold_d, w_threshold_m, ThresholdResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    /// Modularity density with size-normalized separation.
    M,
    /// Average modular degree: `Σ_c (internal − external) / n_c`.
    D,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::M => "M",
            MetricKind::D => "D",
        })
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" | "m" => Ok(MetricKind::M),
            "D" | "d" => Ok(MetricKind::D),
            other => Err(Error::InvalidParameter(format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterTerm {
    pub id: usize,
    pub size: usize,
    #[serde(rename = "M_c", serialize_with = "round12")]
    pub value: f64,
    #[serde(serialize_with = "round12")]
    pub cohesion: f64,
    #[serde(serialize_with = "round12")]
    pub separation: f64,
}

/// Global value plus per-cluster `value = cohesion − separation` terms.
///
/// For `M`, cohesion is `d_c·n̂_c = internal/n_c` and separation is
/// `Σ_{c'≠c} d_c·n̂_{c'}`. For `D`, cohesion is `internal/n_c` and separation
/// is `external/n_c`.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub metric: MetricKind,
    #[serde(rename = "M", serialize_with = "round12")]
    pub value: f64,
    pub connected: bool,
    pub clusters: Vec<ClusterTerm>,
}

impl MetricReport {
    pub fn cluster(&self, id: usize) -> &ClusterTerm {
        &self.clusters[id]
    }
}

/// Evaluates the requested metric through its summation form.
pub fn evaluate(g: &Graph, p: &Partition, metric: MetricKind) -> Result<MetricReport> {
    match metric {
        MetricKind::M => modularity_density_sum(g, p),
        MetricKind::D => li_modularity_density(g, p),
    }
}

/// `M = Σ_c { internal(c)/n_c − Σ_{c'≠c} boundary(c,c')/√(n_c n_c') }`,
/// touching only cluster pairs that share an edge.
pub fn modularity_density_sum(g: &Graph, p: &Partition) -> Result<MetricReport> {
    let stats = ClusterStats::compute(g, p)?;
    Ok(m_from_stats(&stats, g.is_connected()))
}

pub(crate) fn m_from_stats(stats: &ClusterStats, connected: bool) -> MetricReport {
    let k = stats.cluster_count();
    let mut separation = vec![0.0; k];
    for &(c, d, w) in stats.pairs() {
        let term = w / ((stats.size(c) * stats.size(d)) as f64).sqrt();
        separation[c] += term;
        separation[d] += term;
    }
    let clusters: Vec<ClusterTerm> = (0..k)
        .map(|c| {
            let cohesion = stats.internal_weight(c) / stats.size(c) as f64;
            ClusterTerm {
                id: c,
                size: stats.size(c),
                value: cohesion - separation[c],
                cohesion,
                separation: separation[c],
            }
        })
        .collect();
    MetricReport {
        metric: MetricKind::M,
        value: clusters.iter().map(|t| t.value).sum(),
        connected,
        clusters,
    }
}

/// `M = 2 Σ_c n̂_c·T·n̂_c − N·T·N` using sparse products with the aggregate
/// vector `N_j = 1/√n_{c(j)}`.
pub fn modularity_density_tensor(g: &Graph, p: &Partition) -> Result<f64> {
    p.check_against(g)?;
    let assign = p.assignment();
    let aggregate: Vec<f64> = assign
        .iter()
        .map(|&c| 1.0 / (p.size(c) as f64).sqrt())
        .collect();

    let t_aggregate = g.mat_vec(&aggregate);
    let cross: f64 = aggregate.iter().zip(&t_aggregate).map(|(a, b)| a * b).sum();

    // Σ_c n̂_c·T·n̂_c: T restricted to same-cluster entries, applied to N.
    let mut own = 0.0;
    for j in 0..g.node_count() {
        let cj = assign[j];
        let row: f64 = g
            .neighbors(j)
            .filter(|&(k, _)| assign[k] == cj)
            .map(|(k, w)| w * aggregate[k])
            .sum();
        own += aggregate[j] * row;
    }
    Ok(2.0 * own - cross)
}

/// `d_{c_j} = Σ_{i∈c} T_ij / √n_c` for every node `j`.
#[derive(Debug, Clone)]
pub struct NormalizedDegreeVector {
    pub cluster: usize,
    pub values: Vec<f64>,
}

impl NormalizedDegreeVector {
    /// `d_c · n̂_{target}`.
    pub fn dot_unit(&self, p: &Partition, target: usize) -> f64 {
        let scale = 1.0 / (p.size(target) as f64).sqrt();
        p.assignment()
            .iter()
            .zip(&self.values)
            .filter(|(&c, _)| c == target)
            .map(|(_, d)| d * scale)
            .sum()
    }
}

pub fn normalized_degree_vector(
    g: &Graph,
    p: &Partition,
    cluster: usize,
) -> Result<NormalizedDegreeVector> {
    p.check_against(g)?;
    if cluster >= p.cluster_count() {
        return Err(Error::UnknownCluster(cluster));
    }
    let scale = 1.0 / (p.size(cluster) as f64).sqrt();
    let values = (0..g.node_count())
        .map(|j| {
            g.neighbors(j)
                .filter(|&(i, _)| p.cluster_of(i) == cluster)
                .map(|(_, w)| w)
                .sum::<f64>()
                * scale
        })
        .collect();
    Ok(NormalizedDegreeVector { cluster, values })
}

/// `D = Σ_c (internal(c) − external(c)) / n_c`.
pub fn li_modularity_density(g: &Graph, p: &Partition) -> Result<MetricReport> {
    let stats = ClusterStats::compute(g, p)?;
    let clusters: Vec<ClusterTerm> = (0..stats.cluster_count())
        .map(|c| {
            let n = stats.size(c) as f64;
            let cohesion = stats.internal_weight(c) / n;
            let separation = stats.external_weight(c) / n;
            ClusterTerm {
                id: c,
                size: stats.size(c),
                value: cohesion - separation,
                cohesion,
                separation,
            }
        })
        .collect();
    Ok(MetricReport {
        metric: MetricKind::D,
        value: clusters.iter().map(|t| t.value).sum(),
        connected: g.is_connected(),
        clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Graph {
        Graph::from_unweighted(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)]).unwrap()
    }

    fn clique(m: usize) -> Graph {
        let edges = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j)));
        Graph::from_unweighted(m, edges).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(1.0)
    }

    #[test]
    fn triangle_single_cluster() {
        let r = modularity_density_sum(&clique(3), &Partition::single(3)).unwrap();
        assert_eq!(r.value, 2.0);
        assert!(r.connected);
    }

    #[test]
    fn two_triangles_split_and_merged() {
        let g = two_triangles();
        let split = Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let sum = modularity_density_sum(&g, &split).unwrap();
        assert!(close(sum.value, 10.0 / 3.0));
        assert!(close(modularity_density_tensor(&g, &split).unwrap(), 10.0 / 3.0));
        let merged = modularity_density_sum(&g, &Partition::single(6)).unwrap();
        assert!(close(merged.value, 7.0 / 3.0));
    }

    #[test]
    fn k4_single_cluster() {
        let g = clique(4);
        assert!(close(modularity_density_tensor(&g, &Partition::single(4)).unwrap(), 3.0));
        assert!(close(modularity_density_sum(&g, &Partition::single(4)).unwrap().value, 3.0));
    }

    #[test]
    fn singletons_of_single_edge() {
        let g = Graph::from_unweighted(2, [(0, 1)]).unwrap();
        let p = Partition::singletons(2);
        let r = modularity_density_sum(&g, &p).unwrap();
        assert_eq!(r.value, -2.0);
        assert_eq!(modularity_density_tensor(&g, &p).unwrap(), -2.0);
        for t in &r.clusters {
            assert_eq!(t.cohesion, 0.0);
            assert!(t.separation.is_finite());
        }
    }

    #[test]
    fn decomposition_matches_global() {
        let g = two_triangles();
        let p = Partition::new(vec![0, 0, 1, 1, 2, 2]).unwrap();
        let r = modularity_density_sum(&g, &p).unwrap();
        let total: f64 = r.clusters.iter().map(|t| t.value).sum();
        assert!(close(total, r.value));
        for t in &r.clusters {
            assert_eq!(t.value, t.cohesion - t.separation);
            assert!(t.cohesion >= 0.0 && t.separation >= 0.0);
        }
    }

    #[test]
    fn normalized_degree_vector_examples() {
        let k3 = clique(3);
        let d = normalized_degree_vector(&k3, &Partition::single(3), 0).unwrap();
        for v in &d.values {
            assert!(close(*v, 2.0 / 3f64.sqrt()));
        }
        let edge = Graph::from_unweighted(2, [(0, 1)]).unwrap();
        let p = Partition::singletons(2);
        let d = normalized_degree_vector(&edge, &p, 0).unwrap();
        assert_eq!(d.values, vec![0.0, 1.0]);
        assert!(matches!(
            normalized_degree_vector(&edge, &p, 2),
            Err(Error::UnknownCluster(2))
        ));
    }

    #[test]
    fn cohesion_and_separation_are_dot_products() {
        let g = two_triangles();
        let p = Partition::new(vec![0, 0, 1, 1, 1, 2]).unwrap();
        let r = modularity_density_sum(&g, &p).unwrap();
        let stats = ClusterStats::compute(&g, &p).unwrap();
        for c in 0..p.cluster_count() {
            let d = normalized_degree_vector(&g, &p, c).unwrap();
            let own = d.dot_unit(&p, c);
            assert!(close(own, stats.internal_weight(c) / p.size(c) as f64));
            assert!(close(own, r.cluster(c).cohesion));
            let other: f64 = (0..p.cluster_count())
                .filter(|&e| e != c)
                .map(|e| d.dot_unit(&p, e))
                .sum();
            assert!(close(other, r.cluster(c).separation));
        }
    }

    #[test]
    fn li_metric_examples() {
        let g = two_triangles();
        let split = Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        assert!(close(li_modularity_density(&g, &split).unwrap().value, 10.0 / 3.0));
        let merged = li_modularity_density(&g, &Partition::single(6)).unwrap();
        assert!(close(merged.value, 7.0 / 3.0));
        assert!(close(merged.value, 2.0 * g.total_weight() / 6.0));
        assert_eq!(merged.metric, MetricKind::D);
    }

    #[test]
    fn disconnected_graph_is_flagged() {
        let g = Graph::from_unweighted(4, [(0, 1), (2, 3)]).unwrap();
        let r = modularity_density_sum(&g, &Partition::new(vec![0, 0, 1, 1]).unwrap()).unwrap();
        assert!(!r.connected);
        assert_eq!(r.value, 2.0);
    }

    #[test]
    fn report_json_schema() {
        let g = two_triangles();
        let r = modularity_density_sum(&g, &Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["metric"], "M");
        assert_eq!(v["M"], 3.33333333333);
        assert_eq!(v["clusters"][0]["size"], 3);
        assert!(v["clusters"][1]["M_c"].is_number());
    }
}
