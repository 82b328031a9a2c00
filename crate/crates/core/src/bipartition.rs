//! Change in `M` from splitting one cluster in two, and its decomposition.
//!
//! Splitting cluster `c` into `a` and `b` changes `M` by
//!
//! ```text
//! δM = f·D^c·f · [1 − λ] − β
//! λ  = (1 + 2√(n_a n_b)/n_c) · (f·L^c·f)/(f·D^c·f)
//! β  = 2 (N − n̂_c)·T·δN
//! ```
//!
//! where `D^c`, `L^c` are the degree and Laplacian matrices of the subgraph
//! induced by `c`, `f` is the two-valued unit vector orthogonal to the ones
//! vector that encodes the split, `N = Σ_c n̂_c` and `δN = n̂_a + n̂_b − n̂_c`.
//! The first term is local to `c`; `β ≥ 0` is the penalty from edges leaving
//! `c`. [`delta_m_direct`] evaluates the same change by re-scoring the whole
//! partition.
//!
//! The cut enters `δM` as `2 n̂_a·T·n̂_b = 2 x_ab/√(n_a n_b)` with `x_ab` the
//! one-way a–b weight, and `f·L^c·f = x_ab n_c/(n_a n_b)`, which fixes the
//! `2√(n_a n_b)/n_c` coefficient in `λ`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::modularity_density_sum;
use crate::partition::Partition;
use crate::report::{round12, round12_opt, round12_pairs, SCHEMA_VERSION};
use crate::stats::ClusterStats;

/// A split of `cluster` into two non-empty sides covering all its members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartitionProposal {
    pub cluster: usize,
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
}

impl BipartitionProposal {
    /// `side_b` is the rest of the cluster holding `side_a`.
    pub fn from_side(p: &Partition, side_a: &[usize]) -> Result<Self> {
        let Some(&first) = side_a.first() else {
            return Err(Error::InvalidProposal("side a is empty".into()));
        };
        if first >= p.node_count() {
            return Err(Error::InvalidProposal(format!("node {first} outside partition")));
        }
        let cluster = p.cluster_of(first);
        let mut a = side_a.to_vec();
        a.sort_unstable();
        a.dedup();
        let b: Vec<usize> = p
            .members(cluster)
            .into_iter()
            .filter(|x| a.binary_search(x).is_err())
            .collect();
        Self::new(p, cluster, a, b)
    }

    pub fn new(p: &Partition, cluster: usize, mut side_a: Vec<usize>, mut side_b: Vec<usize>) -> Result<Self> {
        if cluster >= p.cluster_count() {
            return Err(Error::UnknownCluster(cluster));
        }
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::InvalidProposal("both sides must be non-empty".into()));
        }
        side_a.sort_unstable();
        side_b.sort_unstable();
        let mut all: Vec<usize> = side_a.iter().chain(&side_b).copied().collect();
        all.sort_unstable();
        let before = all.len();
        all.dedup();
        if all.len() != before {
            return Err(Error::InvalidProposal("sides overlap or repeat nodes".into()));
        }
        if all.iter().any(|&x| x >= p.node_count()) || all != p.members(cluster) {
            return Err(Error::InvalidProposal(format!(
                "sides do not cover exactly the members of cluster {cluster}"
            )));
        }
        Ok(Self {
            cluster,
            side_a,
            side_b,
        })
    }

    /// Reads side `a` as one node label per line (`#` comments allowed); the
    /// cluster is the one holding those nodes.
    pub fn parse(text: &str, g: &Graph, p: &Partition) -> Result<Self> {
        let mut side_a = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let content = line.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let label: u64 = content.parse().map_err(|_| Error::Malformed {
                line: Some(idx + 1),
                msg: format!("bad node label `{content}`"),
            })?;
            let node = g.node_of_label(label).ok_or(Error::NodeOutOfRange {
                node: label,
                node_count: g.node_count(),
            })?;
            side_a.push(node);
        }
        let cluster = side_a
            .first()
            .map(|&x| p.cluster_of(x))
            .ok_or_else(|| Error::InvalidProposal("side a is empty".into()))?;
        if side_a.iter().any(|&x| p.cluster_of(x) != cluster) {
            return Err(Error::InvalidProposal("side a spans several clusters".into()));
        }
        Self::from_side(p, &side_a)
    }

    pub fn load(path: impl AsRef<Path>, g: &Graph, p: &Partition) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?, g, p)
    }

    /// The partition after the split; side `b` gets a fresh cluster id.
    pub fn apply(&self, p: &Partition) -> Partition {
        let mut labels = p.assignment().to_vec();
        let fresh = p.cluster_count();
        for &x in &self.side_b {
            labels[x] = fresh;
        }
        Partition::new(labels).expect("split keeps every cluster non-empty")
    }

    fn sizes(&self) -> (f64, f64, f64) {
        let na = self.side_a.len() as f64;
        let nb = self.side_b.len() as f64;
        (na, nb, na + nb)
    }
}

/// Adjacency, degree and Laplacian of the subgraph induced by one cluster,
/// in local coordinates (`nodes[i]` is the global id of local node `i`).
#[derive(Debug, Clone)]
pub struct SubgraphLaplacian {
    pub nodes: Vec<usize>,
    /// Local adjacency rows `(local neighbor, weight)`.
    adjacency: Vec<Vec<(usize, f64)>>,
    degree: Vec<f64>,
}

impl SubgraphLaplacian {
    pub fn induced(g: &Graph, nodes: &[usize]) -> Self {
        let local: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let adjacency: Vec<Vec<(usize, f64)>> = nodes
            .iter()
            .map(|&x| {
                g.neighbors(x)
                    .filter_map(|(y, w)| local.get(&y).map(|&j| (j, w)))
                    .collect()
            })
            .collect();
        let degree = adjacency
            .iter()
            .map(|row| row.iter().map(|&(_, w)| w).sum())
            .collect();
        Self {
            nodes: nodes.to_vec(),
            adjacency,
            degree,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `x·T^c·x`.
    pub fn adjacency_form(&self, x: &[f64]) -> f64 {
        self.adjacency
            .iter()
            .enumerate()
            .map(|(j, row)| x[j] * row.iter().map(|&(k, w)| w * x[k]).sum::<f64>())
            .sum()
    }

    /// `x·D^c·x`.
    pub fn degree_form(&self, x: &[f64]) -> f64 {
        self.degree.iter().zip(x).map(|(d, v)| d * v * v).sum()
    }

    /// `x·L^c·x` with `L^c = D^c − T^c`, evaluated row by row.
    pub fn laplacian_form(&self, x: &[f64]) -> f64 {
        self.laplacian_apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `L^c x`.
    pub fn laplacian_apply(&self, x: &[f64]) -> Vec<f64> {
        self.adjacency
            .iter()
            .enumerate()
            .map(|(j, row)| self.degree[j] * x[j] - row.iter().map(|&(k, w)| w * x[k]).sum::<f64>())
            .collect()
    }

    /// `½ Σ_{j,k} T^c_jk (x_j − x_k)²`, the edge form of the Laplacian
    /// quadratic.
    pub fn edge_form(&self, x: &[f64]) -> f64 {
        0.5 * self
            .adjacency
            .iter()
            .enumerate()
            .map(|(j, row)| row.iter().map(|&(k, w)| w * (x[j] - x[k]).powi(2)).sum::<f64>())
            .sum::<f64>()
    }

    /// Row sums of `L^c`; all zero.
    pub fn row_sums(&self) -> Vec<f64> {
        self.laplacian_apply(&vec![1.0; self.len()])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BipartitionEval {
    pub schema_version: u32,
    pub cluster: usize,
    pub n_a: usize,
    pub n_b: usize,
    #[serde(serialize_with = "round12")]
    pub delta_m: f64,
    #[serde(rename = "delta_I_c", serialize_with = "round12")]
    pub delta_i_c: f64,
    #[serde(serialize_with = "round12")]
    pub alpha: f64,
    #[serde(serialize_with = "round12")]
    pub beta: f64,
    /// Undefined when the induced subgraph has no edges.
    #[serde(serialize_with = "round12_opt")]
    pub lambda: Option<f64>,
    #[serde(rename = "fDf", serialize_with = "round12")]
    pub f_d_f: f64,
    #[serde(rename = "fLf", serialize_with = "round12")]
    pub f_l_f: f64,
    /// `(node, f_j)` for the members of the cluster.
    #[serde(serialize_with = "round12_pairs")]
    pub f: Vec<(usize, f64)>,
    /// `(node, δN_j)` on the cluster; zero elsewhere.
    #[serde(rename = "delta_N", serialize_with = "round12_pairs")]
    pub delta_n: Vec<(usize, f64)>,
    /// `δM` came from the direct path because `f·D^c·f = 0`.
    pub degenerate: bool,
}

/// `M(split) − M(current)` by scoring both partitions in full.
pub fn delta_m_direct(g: &Graph, p: &Partition, prop: &BipartitionProposal) -> Result<f64> {
    let before = modularity_density_sum(g, p)?.value;
    let after = modularity_density_sum(g, &prop.apply(p))?.value;
    Ok(after - before)
}

/// The same change from the cluster's own edges and its boundary pairs only.
pub fn delta_m_incremental(g: &Graph, p: &Partition, prop: &BipartitionProposal) -> Result<f64> {
    p.check_against(g)?;
    let stats = ClusterStats::compute(g, p)?;
    let c = prop.cluster;
    let (na, nb, nc) = prop.sizes();
    let mut on_a = vec![false; g.node_count()];
    for &x in &prop.side_a {
        on_a[x] = true;
    }
    let (mut int_a, mut int_b, mut cut) = (0.0, 0.0, 0.0);
    let mut out_a: HashMap<usize, f64> = HashMap::new();
    let mut out_b: HashMap<usize, f64> = HashMap::new();
    for &x in prop.side_a.iter().chain(&prop.side_b) {
        for (y, w) in g.neighbors(x) {
            let d = p.cluster_of(y);
            if d == c {
                match (on_a[x], on_a[y]) {
                    (true, true) => int_a += w,
                    (false, false) => int_b += w,
                    _ => cut += w,
                }
            } else if on_a[x] {
                *out_a.entry(d).or_default() += w;
            } else {
                *out_b.entry(d).or_default() += w;
            }
        }
    }
    // `cut` saw each a–b edge from both ends.
    let cut = cut / 2.0;
    let sep = |out: &HashMap<usize, f64>, n: f64| -> f64 {
        out.iter()
            .map(|(&d, &w)| w / (n * stats.size(d) as f64).sqrt())
            .sum()
    };
    let old_sep: f64 = stats
        .pairs()
        .iter()
        .filter(|&&(x, y, _)| x == c || y == c)
        .map(|&(x, y, w)| {
            let other = if x == c { y } else { x };
            w / (nc * stats.size(other) as f64).sqrt()
        })
        .sum();
    let gain_internal = int_a / na + int_b / nb - stats.internal_weight(c) / nc;
    Ok(gain_internal
        - 2.0 * cut / (na * nb).sqrt()
        - 2.0 * (sep(&out_a, na) + sep(&out_b, nb) - old_sep))
}

/// The two-valued split vector: `√(n_b/(n_c n_a))` on side `a`,
/// `−√(n_a/(n_c n_b))` on side `b`, in the order of `lap.nodes`.
fn split_vector(prop: &BipartitionProposal, lap: &SubgraphLaplacian) -> Vec<f64> {
    let (na, nb, nc) = prop.sizes();
    let fa = (nb / (nc * na)).sqrt();
    let fb = -(na / (nc * nb)).sqrt();
    lap.nodes
        .iter()
        .map(|x| if prop.side_a.binary_search(x).is_ok() { fa } else { fb })
        .collect()
}

fn check_proposal(g: &Graph, p: &Partition, prop: &BipartitionProposal) -> Result<()> {
    p.check_against(g)?;
    BipartitionProposal::new(p, prop.cluster, prop.side_a.clone(), prop.side_b.clone()).map(|_| ())
}

/// Builds `f`, the induced Laplacian, `δN` and `β`, and assembles `δM`.
pub fn delta_m_decomposed(g: &Graph, p: &Partition, prop: &BipartitionProposal) -> Result<BipartitionEval> {
    check_proposal(g, p, prop)?;
    let c = prop.cluster;
    let (na, nb, nc) = prop.sizes();
    let members = p.members(c);
    let lap = SubgraphLaplacian::induced(g, &members);
    let f = split_vector(prop, &lap);
    let f_d_f = lap.degree_form(&f);
    let f_l_f = lap.laplacian_form(&f);

    // ΔI_c from the block sums of T^c.
    let (mut s_aa, mut s_bb, mut s_ab) = (0.0, 0.0, 0.0);
    let on_a: Vec<bool> = lap.nodes.iter().map(|x| prop.side_a.binary_search(x).is_ok()).collect();
    for (j, row) in lap.adjacency.iter().enumerate() {
        for &(k, w) in row {
            match (on_a[j], on_a[k]) {
                (true, true) => s_aa += w,
                (false, false) => s_bb += w,
                _ => s_ab += w,
            }
        }
    }
    let delta_i_c = nb / (nc * na) * s_aa + na / (nc * nb) * s_bb - s_ab / nc;

    let dn_a = 1.0 / na.sqrt() - 1.0 / nc.sqrt();
    let dn_b = 1.0 / nb.sqrt() - 1.0 / nc.sqrt();
    let delta_n: Vec<(usize, f64)> = lap
        .nodes
        .iter()
        .zip(&on_a)
        .map(|(&x, &a)| (x, if a { dn_a } else { dn_b }))
        .collect();

    // β = 2 Σ_{j∈c} δN_j Σ_{k∉c} T_jk N_k, with N_k = 1/√n_{c(k)}.
    let mut beta = 0.0;
    for &(j, dn) in &delta_n {
        let outside: f64 = g
            .neighbors(j)
            .filter(|&(k, _)| p.cluster_of(k) != c)
            .map(|(k, w)| w / (p.size(p.cluster_of(k)) as f64).sqrt())
            .sum();
        beta += dn * outside;
    }
    beta *= 2.0;

    let scale = 1.0 + 2.0 * (na * nb).sqrt() / nc;
    let f: Vec<(usize, f64)> = lap.nodes.iter().copied().zip(f).collect();
    let (lambda, alpha, delta_m, degenerate) = if f_d_f > 0.0 {
        let lambda = scale * f_l_f / f_d_f;
        let alpha = f_d_f * (1.0 - lambda);
        (Some(lambda), alpha, alpha - beta, false)
    } else {
        (None, f_d_f - scale * f_l_f, delta_m_direct(g, p, prop)?, true)
    };

    Ok(BipartitionEval {
        schema_version: SCHEMA_VERSION,
        cluster: c,
        n_a: prop.side_a.len(),
        n_b: prop.side_b.len(),
        delta_m,
        delta_i_c,
        alpha,
        beta,
        lambda,
        f_d_f,
        f_l_f,
        f,
        delta_n,
        degenerate,
    })
}

/// `|X_ab/√(n_a n_b) − (2√(n_a n_b)/n_c) f·L^c·f|` where `X_ab` sums the
/// cut in both orientations (`j ∈ a, k ∈ b` and `j ∈ b, k ∈ a`).
pub fn laplacian_identity_check(g: &Graph, p: &Partition, prop: &BipartitionProposal) -> Result<f64> {
    check_proposal(g, p, prop)?;
    let (na, nb, nc) = prop.sizes();
    let cut: f64 = prop
        .side_a
        .iter()
        .flat_map(|&x| g.neighbors(x))
        .filter(|(y, _)| prop.side_b.binary_search(y).is_ok())
        .map(|(_, w)| w)
        .sum();
    let lhs = 2.0 * cut / (na * nb).sqrt();
    let lap = SubgraphLaplacian::induced(g, &p.members(prop.cluster));
    let f = split_vector(prop, &lap);
    let rhs = 2.0 * (na * nb).sqrt() / nc * lap.laplacian_form(&f);
    Ok((lhs - rhs).abs())
}
