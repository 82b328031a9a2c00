//! Seeded synthetic networks with their natural communities attached.
//!
//! Communities are Erdős–Rényi graphs `G(m, p)` with `p ≥ 2/(m−1)`, resampled
//! until connected. Bridges between communities carry unit weight and have
//! uniformly chosen endpoints.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::report::SCHEMA_VERSION;

/// Algorithm behind every generator, recorded in output metadata.
pub const PRNG_NAME: &str = "ChaCha8 (rand_chacha 0.3, seed_from_u64)";

/// Connected-sample attempts per community before giving up.
pub const RETRY_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    ErSingle,
    TwoCommunitiesBridged,
    RingOfCommunities,
    TwoCliquesWBridge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub probs: Vec<f64>,
    /// Number of bridge edges; only read by [`Family::TwoCliquesWBridge`].
    #[serde(default)]
    pub bridges: usize,
    pub seed: u64,
}

/// Smallest edge probability that still allows a ring, the sparsest
/// natural community: `m` edges out of `m(m−1)/2`.
pub fn p_min(m: usize) -> f64 {
    2.0 / (m as f64 - 1.0)
}

impl GeneratorSpec {
    pub fn er(m: usize, p: f64, seed: u64) -> Self {
        Self {
            family: Family::ErSingle,
            sizes: vec![m],
            probs: vec![p],
            bridges: 0,
            seed,
        }
    }

    pub fn two_communities(m: usize, n: usize, p_m: f64, p_n: f64, seed: u64) -> Self {
        Self {
            family: Family::TwoCommunitiesBridged,
            sizes: vec![m, n],
            probs: vec![p_m, p_n],
            bridges: 1,
            seed,
        }
    }

    pub fn ring(sizes: Vec<usize>, probs: Vec<f64>, seed: u64) -> Self {
        let bridges = sizes.len();
        Self {
            family: Family::RingOfCommunities,
            sizes,
            probs,
            bridges,
            seed,
        }
    }

    pub fn two_cliques_w(m: usize, n: usize, w: usize, seed: u64) -> Self {
        Self {
            family: Family::TwoCliquesWBridge,
            sizes: vec![m, n],
            probs: vec![1.0, 1.0],
            bridges: w,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let count_ok = match self.family {
            Family::ErSingle => self.sizes.len() == 1,
            Family::TwoCommunitiesBridged | Family::TwoCliquesWBridge => self.sizes.len() == 2,
            Family::RingOfCommunities => self.sizes.len() >= 3,
        };
        if !count_ok {
            return Err(Error::InvalidParameter(format!(
                "{:?} cannot have {} communities",
                self.family,
                self.sizes.len()
            )));
        }
        if self.probs.len() != self.sizes.len() {
            return Err(Error::InvalidParameter(format!(
                "{} sizes but {} probabilities",
                self.sizes.len(),
                self.probs.len()
            )));
        }
        for (&m, &p) in self.sizes.iter().zip(&self.probs) {
            if m < 3 {
                return Err(Error::InvalidParameter(format!(
                    "community size {m} is below 3"
                )));
            }
            if !(p >= p_min(m) - 1e-12 && p <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "p = {p} outside [{}, 1] for m = {m}",
                    p_min(m)
                )));
            }
        }
        if self.family == Family::TwoCliquesWBridge {
            if self.probs.iter().any(|&p| p != 1.0) {
                return Err(Error::InvalidParameter(
                    "two_cliques_w_bridge communities are cliques (p = 1)".into(),
                ));
            }
            let cap = self.sizes[0] * self.sizes[1];
            if self.bridges > cap {
                return Err(Error::InvalidParameter(format!(
                    "w = {} exceeds m·n = {cap}",
                    self.bridges
                )));
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// A generated graph and its natural communities.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub truth: Partition,
    pub spec: GeneratorSpec,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorMetadata {
    pub schema_version: u32,
    pub spec: GeneratorSpec,
    pub prng: &'static str,
    pub node_count: usize,
    pub edge_count: usize,
    pub connected: bool,
}

impl LabeledGraph {
    pub fn metadata(&self) -> GeneratorMetadata {
        GeneratorMetadata {
            schema_version: SCHEMA_VERSION,
            spec: self.spec.clone(),
            prng: PRNG_NAME,
            node_count: self.graph.node_count(),
            edge_count: self.graph.edge_count(),
            connected: self.graph.is_connected(),
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn sample_connected_er<R: Rng>(m: usize, p: f64, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    for _ in 0..RETRY_BUDGET {
        let mut edges = Vec::new();
        let mut parent: Vec<usize> = (0..m).collect();
        let mut components = m;
        for i in 0..m {
            for j in i + 1..m {
                if rng.gen_bool(p) {
                    edges.push((i, j));
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a] = b;
                        components -= 1;
                    }
                }
            }
        }
        if components == 1 {
            return Ok(edges);
        }
    }
    Err(Error::RetryBudgetExhausted {
        m,
        p,
        retries: RETRY_BUDGET,
    })
}

/// Builds the graph described by `spec`. Identical specs give identical graphs.
pub fn generate(spec: &GeneratorSpec) -> Result<LabeledGraph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let offsets: Vec<usize> = spec
        .sizes
        .iter()
        .scan(0, |acc, &m| {
            let start = *acc;
            *acc += m;
            Some(start)
        })
        .collect();

    let mut edges = Vec::new();
    for ((&m, &p), &off) in spec.sizes.iter().zip(&spec.probs).zip(&offsets) {
        for (i, j) in sample_connected_er(m, p, &mut rng)? {
            edges.push((off + i, off + j));
        }
    }

    let bridge = |a: usize, b: usize, rng: &mut ChaCha8Rng| {
        let u = offsets[a] + rng.gen_range(0..spec.sizes[a]);
        let v = offsets[b] + rng.gen_range(0..spec.sizes[b]);
        (u, v)
    };
    match spec.family {
        Family::ErSingle => {}
        Family::TwoCommunitiesBridged => edges.push(bridge(0, 1, &mut rng)),
        Family::RingOfCommunities => {
            let k = spec.sizes.len();
            for a in 0..k {
                edges.push(bridge(a, (a + 1) % k, &mut rng));
            }
        }
        Family::TwoCliquesWBridge => {
            let (m, n) = (spec.sizes[0], spec.sizes[1]);
            for idx in index::sample(&mut rng, m * n, spec.bridges) {
                edges.push((idx / n, m + idx % n));
            }
        }
    }

    let truth = spec
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &m)| std::iter::repeat_n(c, m))
        .collect();
    Ok(LabeledGraph {
        graph: Graph::from_unweighted(spec.node_count(), edges)?,
        truth: Partition::new(truth)?,
        spec: spec.clone(),
    })
}

/// Connected `G(m, p)` with unit weights.
pub fn gen_er(m: usize, p: f64, seed: u64) -> Result<Graph> {
    Ok(generate(&GeneratorSpec::er(m, p, seed))?.graph)
}

/// `G(m, p_m)` and `G(n, p_n)` joined by one bridge.
pub fn gen_two_communities(m: usize, n: usize, p_m: f64, p_n: f64, seed: u64) -> Result<LabeledGraph> {
    generate(&GeneratorSpec::two_communities(m, n, p_m, p_n, seed))
}

/// Ring of ER communities; consecutive communities (and the last and first)
/// share one bridge. A single probability is broadcast to every community.
pub fn gen_ring(sizes: &[usize], probs: &[f64], seed: u64) -> Result<LabeledGraph> {
    let probs = if probs.len() == 1 {
        vec![probs[0]; sizes.len()]
    } else {
        probs.to_vec()
    };
    generate(&GeneratorSpec::ring(sizes.to_vec(), probs, seed))
}

/// `K_m` and `K_n` joined by `w` distinct bridges drawn without replacement.
pub fn gen_two_cliques_w(m: usize, n: usize, w: usize, seed: u64) -> Result<LabeledGraph> {
    generate(&GeneratorSpec::two_cliques_w(m, n, w, seed))
}
