//! Evaluation time of `M` against edge count on sparse connected graphs.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::{modularity_density_sum, modularity_density_tensor};
use crate::partition::Partition;
use crate::report::{round12, SCHEMA_VERSION};

pub const MIN_EDGES: usize = 10_000;

/// Mean degree of the generated graphs.
pub const MEAN_DEGREE: usize = 8;

/// Mean cluster size of the evaluated partition.
pub const CLUSTER_SIZE: usize = 32;

/// A ring through all nodes plus uniformly random chords, `edges` in total,
/// with a random partition into clusters of mean size [`CLUSTER_SIZE`].
pub fn sparse_instance(edges: usize, seed: u64) -> Result<(Graph, Partition)> {
    let n = (2 * edges / MEAN_DEGREE).max(3);
    if edges < n || edges > n * (n - 1) / 2 {
        return Err(Error::InvalidParameter(format!("cannot place {edges} edges on {n} nodes")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<(usize, usize)> = HashSet::with_capacity(edges);
    let mut list = Vec::with_capacity(edges);
    for u in 0..n {
        let v = (u + 1) % n;
        seen.insert((u.min(v), u.max(v)));
        list.push((u.min(v), u.max(v)));
    }
    while list.len() < edges {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && seen.insert((u.min(v), u.max(v))) {
            list.push((u.min(v), u.max(v)));
        }
    }
    let g = Graph::from_unweighted(n, list)?;
    let k = (n / CLUSTER_SIZE).max(1);
    let p = Partition::new((0..n).map(|_| rng.gen_range(0..k)).collect())?;
    Ok((g, p))
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchPoint {
    pub edges: usize,
    pub nodes: usize,
    #[serde(serialize_with = "round12")]
    pub sum_seconds: f64,
    #[serde(serialize_with = "round12")]
    pub tensor_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub seed: u64,
    pub points: Vec<BenchPoint>,
    /// Least-squares slope of `ln t` against `ln |E|`.
    #[serde(serialize_with = "round12")]
    pub slope_sum: f64,
    #[serde(serialize_with = "round12")]
    pub slope_tensor: f64,
}

/// Fastest of at least five runs, repeating until 200 ms have been spent.
fn min_time(mut f: impl FnMut()) -> f64 {
    let mut best = Duration::MAX;
    let mut spent = Duration::ZERO;
    let mut runs = 0;
    while runs < 5 || spent < Duration::from_millis(200) {
        let t = Instant::now();
        f();
        let d = t.elapsed();
        best = best.min(d);
        spent += d;
        runs += 1;
    }
    best.as_secs_f64()
}

pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Edge counts from [`MIN_EDGES`] to `max_edges` in `steps` geometric steps.
pub fn edge_steps(max_edges: usize, steps: usize) -> Result<Vec<usize>> {
    if max_edges <= MIN_EDGES || steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "need more than {MIN_EDGES} edges and at least 2 steps"
        )));
    }
    let ratio = (max_edges as f64 / MIN_EDGES as f64).powf(1.0 / (steps - 1) as f64);
    Ok((0..steps)
        .map(|i| (MIN_EDGES as f64 * ratio.powi(i as i32)).round() as usize)
        .collect())
}

pub fn run(max_edges: usize, steps: usize, seed: u64) -> Result<BenchReport> {
    let mut points = Vec::new();
    for (i, edges) in edge_steps(max_edges, steps)?.into_iter().enumerate() {
        let (g, p) = sparse_instance(edges, seed.wrapping_add(i as u64))?;
        let sum_seconds = min_time(|| {
            std::hint::black_box(modularity_density_sum(&g, &p).expect("partition fits"));
        });
        let tensor_seconds = min_time(|| {
            std::hint::black_box(modularity_density_tensor(&g, &p).expect("partition fits"));
        });
        points.push(BenchPoint {
            edges: g.edge_count(),
            nodes: g.node_count(),
            sum_seconds,
            tensor_seconds,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.edges as f64).collect();
    let sums: Vec<f64> = points.iter().map(|p| p.sum_seconds).collect();
    let tensors: Vec<f64> = points.iter().map(|p| p.tensor_seconds).collect();
    Ok(BenchReport {
        schema_version: SCHEMA_VERSION,
        seed,
        slope_sum: log_log_slope(&xs, &sums),
        slope_tensor: log_log_slope(&xs, &tensors),
        points,
    })
}
