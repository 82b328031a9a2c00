//! Greedy maximization of `M` (or `D`): single-node moves alternating with
//! cluster merges, and group splits once both stall; every step is scored
//! incrementally.
//!
//! Per cluster the state holds its size `n`, ordered internal weight `I`,
//! total strength `K`, and the boundary weight to every adjacent cluster.
//! Writing `S_X = Σ_{d≠X} B_Xd/√n_d`, a change to clusters `A` and `B` only
//! alters the separation terms of pairs touching `A` or `B`, and those are
//! recovered from `S_A`, `S_B` and the node's own links without visiting any
//! other pair.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::{evaluate, MetricKind, MetricReport};
use crate::partition::Partition;
use crate::report::{round12, round12_opt, SCHEMA_VERSION};

/// Seed nodes tried per cluster by the split search.
pub const MAX_SPLIT_SEEDS: usize = 16;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum Init {
    #[default]
    Singletons,
    Given(Partition),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MoveOrder {
    #[default]
    NodeId,
    Shuffled,
}

#[derive(Debug, Clone)]
pub struct DetectorConfig {
    pub max_passes: usize,
    pub min_gain: f64,
    pub seed: u64,
    pub init: Init,
    pub move_order: MoveOrder,
    pub objective: MetricKind,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            max_passes: 100,
            min_gain: 1e-9,
            seed: 0,
            init: Init::Singletons,
            move_order: MoveOrder::NodeId,
            objective: MetricKind::M,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_passes == 0 {
            return Err(Error::InvalidParameter("max_passes must be at least 1".into()));
        }
        if self.min_gain.is_nan() || self.min_gain < 0.0 {
            return Err(Error::InvalidParameter("min_gain must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepKind {
    Move { node: usize, from: usize, to: usize },
    Merge { into: usize, from: usize },
    /// `size` members of `cluster` moved together into `into`.
    Split { cluster: usize, into: usize, size: usize },
}

/// One accepted step; `value` is the objective after it.
#[derive(Debug, Clone, Serialize)]
pub struct Step {
    pub pass: usize,
    #[serde(flatten)]
    pub kind: StepKind,
    #[serde(serialize_with = "round12")]
    pub gain: f64,
    #[serde(serialize_with = "round12")]
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct Detection {
    pub partition: Partition,
    pub report: MetricReport,
    pub trace: Vec<Step>,
    pub passes: usize,
}

impl Detection {
    /// `pass,kind,node,from,to,gain,value`; merges leave `node` empty and
    /// splits put the number of nodes moved there.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("pass,kind,node,from,to,gain,value\n");
        for s in &self.trace {
            let (kind, node, from, to) = match s.kind {
                StepKind::Move { node, from, to } => ("move", node.to_string(), from, to),
                StepKind::Merge { into, from } => ("merge", String::new(), from, into),
                StepKind::Split { cluster, into, size } => ("split", size.to_string(), cluster, into),
            };
            out.push_str(&format!("{},{kind},{node},{from},{to},{},{}\n", s.pass, s.gain, s.value));
        }
        out
    }
}

fn inv_sqrt(n: usize) -> f64 {
    1.0 / (n as f64).sqrt()
}

/// `I/n`, zero for an empty cluster.
fn ratio(x: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        x / n as f64
    }
}

struct State<'g> {
    graph: &'g Graph,
    objective: MetricKind,
    assign: Vec<usize>,
    size: Vec<usize>,
    internal: Vec<f64>,
    strength: Vec<f64>,
    /// Symmetric: `links[a][b] == links[b][a]` = (weight, edge count).
    links: Vec<BTreeMap<usize, (f64, usize)>>,
    free: Vec<usize>,
    /// Per-node scratch: weight from the current node into each cluster.
    scratch: Vec<f64>,
    touched: Vec<usize>,
}

impl<'g> State<'g> {
    fn new(graph: &'g Graph, assign: Vec<usize>, objective: MetricKind) -> Self {
        let k = assign.iter().max().map_or(0, |&c| c + 1);
        let mut s = Self {
            graph,
            objective,
            size: vec![0; k],
            internal: vec![0.0; k],
            strength: vec![0.0; k],
            links: vec![BTreeMap::new(); k],
            free: Vec::new(),
            scratch: vec![0.0; k],
            touched: Vec::new(),
            assign,
        };
        for v in 0..graph.node_count() {
            let c = s.assign[v];
            s.size[c] += 1;
            s.strength[c] += graph.strength(v);
        }
        for e in graph.edges() {
            let (a, b) = (s.assign[e.u], s.assign[e.v]);
            if a == b {
                s.internal[a] += 2.0 * e.weight;
            } else {
                s.link(a, b, e.weight, 1);
            }
        }
        s
    }

    fn link(&mut self, a: usize, b: usize, w: f64, count: isize) {
        for (x, y) in [(a, b), (b, a)] {
            let entry = self.links[x].entry(y).or_insert((0.0, 0));
            entry.0 += w;
            entry.1 = entry.1.checked_add_signed(count).expect("edge count underflow");
            if entry.1 == 0 {
                self.links[x].remove(&y);
            }
        }
    }

    fn boundary(&self, a: usize, b: usize) -> f64 {
        self.links[a].get(&b).map_or(0.0, |&(w, _)| w)
    }

    /// `S_X = Σ_{d≠X} B_Xd/√n_d`.
    fn sep_sum(&self, x: usize) -> f64 {
        self.links[x].iter().map(|(&d, &(w, _))| w * inv_sqrt(self.size[d])).sum()
    }

    fn d_term(&self, internal: f64, strength: f64, n: usize) -> f64 {
        ratio(2.0 * internal - strength, n)
    }

    fn value(&self) -> f64 {
        let mut total = 0.0;
        for c in 0..self.size.len() {
            if self.size[c] == 0 {
                continue;
            }
            total += match self.objective {
                MetricKind::M => ratio(self.internal[c], self.size[c]) - inv_sqrt(self.size[c]) * self.sep_sum(c),
                MetricKind::D => self.d_term(self.internal[c], self.strength[c], self.size[c]),
            };
        }
        total
    }

    /// Fills `scratch`/`touched` with the weight from `v` into each cluster.
    fn gather(&mut self, v: usize) {
        for &c in &self.touched {
            self.scratch[c] = 0.0;
        }
        self.touched.clear();
        for (u, w) in self.graph.neighbors(v) {
            let c = self.assign[u];
            if self.scratch[c] == 0.0 && !self.touched.contains(&c) {
                self.touched.push(c);
            }
            self.scratch[c] += w;
        }
        self.touched.sort_unstable();
    }

    /// Gain of moving `v` from `a` to `b`; `b` may be empty. Needs `gather(v)`
    /// and, for `M`, `s_a = S_a` and `q_all = Σ_d w_vd/√n_d`.
    fn move_gain(&self, v: usize, a: usize, b: usize, s_a: f64, q_all: f64) -> f64 {
        let (na, nb) = (self.size[a], self.size[b]);
        let (wa, wb) = (self.scratch[a], if nb > 0 { self.scratch[b] } else { 0.0 });
        match self.objective {
            MetricKind::D => {
                let kv = self.graph.strength(v);
                self.d_term(self.internal[a] - 2.0 * wa, self.strength[a] - kv, na - 1)
                    + self.d_term(self.internal[b] + 2.0 * wb, self.strength[b] + kv, nb + 1)
                    - self.d_term(self.internal[a], self.strength[a], na)
                    - self.d_term(self.internal[b], self.strength[b], nb)
            }
            MetricKind::M => {
                let b_ab = self.boundary(a, b);
                let ra = s_a - if nb > 0 { b_ab * inv_sqrt(nb) } else { 0.0 };
                let rb = if nb > 0 { self.sep_sum(b) - b_ab * inv_sqrt(na) } else { 0.0 };
                let q = q_all - wa * inv_sqrt(na) - if nb > 0 { wb * inv_sqrt(nb) } else { 0.0 };
                let b_ab_after = b_ab - wb + wa;
                let mut before = ra * inv_sqrt(na);
                if nb > 0 {
                    before += rb * inv_sqrt(nb) + b_ab * inv_sqrt(na * nb);
                }
                let mut after = (rb + q) * inv_sqrt(nb + 1);
                if na > 1 {
                    after += (ra - q) * inv_sqrt(na - 1) + b_ab_after * inv_sqrt((na - 1) * (nb + 1));
                }
                let cohesion = ratio(self.internal[a] - 2.0 * wa, na - 1)
                    + ratio(self.internal[b] + 2.0 * wb, nb + 1)
                    - ratio(self.internal[a], na)
                    - ratio(self.internal[b], nb);
                cohesion - 2.0 * (after - before)
            }
        }
    }

    fn apply_move(&mut self, v: usize, a: usize, b: usize) {
        for (u, w) in self.graph.neighbors(v) {
            let d = self.assign[u];
            if d == a {
                self.internal[a] -= 2.0 * w;
                self.link(a, b, w, 1);
            } else if d == b {
                self.link(a, b, -w, -1);
                self.internal[b] += 2.0 * w;
            } else {
                self.link(a, d, -w, -1);
                self.link(b, d, w, 1);
            }
        }
        let kv = self.graph.strength(v);
        self.strength[a] -= kv;
        self.strength[b] += kv;
        self.size[a] -= 1;
        self.size[b] += 1;
        self.assign[v] = b;
        if self.size[a] == 0 {
            debug_assert!(self.links[a].is_empty());
            self.internal[a] = 0.0;
            self.strength[a] = 0.0;
            self.free.push(a);
        }
    }

    /// A cluster id with no members, allocating one if needed.
    fn empty_cluster(&mut self) -> usize {
        if let Some(&c) = self.free.iter().min() {
            return c;
        }
        self.size.push(0);
        self.internal.push(0.0);
        self.strength.push(0.0);
        self.links.push(BTreeMap::new());
        self.scratch.push(0.0);
        self.free.push(self.size.len() - 1);
        self.size.len() - 1
    }

    fn take_cluster(&mut self, c: usize) {
        self.free.retain(|&x| x != c);
    }

    /// `gather(v)`, then `S_a` and `Σ_d w_vd/√n_d` for `v`'s cluster `a`.
    fn prepare(&mut self, v: usize) -> (f64, f64) {
        self.gather(v);
        match self.objective {
            MetricKind::M => (
                self.sep_sum(self.assign[v]),
                self.touched.iter().map(|&d| self.scratch[d] * inv_sqrt(self.size[d])).sum(),
            ),
            MetricKind::D => (0.0, 0.0),
        }
    }

    /// Best move for `v`: largest gain, then lowest target id; a fresh
    /// singleton ranks after every existing cluster.
    fn best_move(&mut self, v: usize) -> Option<(usize, f64)> {
        let a = self.assign[v];
        let (s_a, q_all) = self.prepare(v);
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.touched.len() {
            let b = self.touched[i];
            if b == a {
                continue;
            }
            let gain = self.move_gain(v, a, b, s_a, q_all);
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((b, gain));
            }
        }
        if self.size[a] > 1 {
            let fresh = self.empty_cluster();
            let gain = self.move_gain(v, a, fresh, s_a, q_all);
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((fresh, gain));
            }
        }
        best
    }

    /// Best split of cluster `c` found by growing a side from each seed
    /// node: repeatedly move the adjacent member of `c` with the largest gain
    /// into the new side, and keep the best prefix. Returns the side and the
    /// total gain; the state is left unchanged.
    fn best_split(&mut self, c: usize) -> Option<(Vec<usize>, f64)> {
        let members: Vec<usize> = (0..self.assign.len()).filter(|&v| self.assign[v] == c).collect();
        let len = members.len();
        if len < 2 {
            return None;
        }
        let seeds: Vec<usize> = if len <= MAX_SPLIT_SEEDS {
            members.clone()
        } else {
            (0..MAX_SPLIT_SEEDS).map(|i| members[i * len / MAX_SPLIT_SEEDS]).collect()
        };
        let mut best: Option<(Vec<usize>, f64)> = None;
        let mut frontier = vec![false; self.assign.len()];
        for seed in seeds {
            let side = self.empty_cluster();
            self.take_cluster(side);
            let mut moved: Vec<usize> = Vec::with_capacity(len);
            let mut candidates: Vec<usize> = Vec::new();
            let mut total = 0.0;
            let mut next = Some(seed);
            while let Some(v) = next {
                let (s_a, q_all) = self.prepare(v);
                total += self.move_gain(v, c, side, s_a, q_all);
                self.apply_move(v, c, side);
                moved.push(v);
                if best.as_ref().is_none_or(|(_, g)| total > *g) {
                    best = Some((moved.clone(), total));
                }
                if moved.len() == len - 1 {
                    break;
                }
                for (u, _) in self.graph.neighbors(v) {
                    if self.assign[u] == c && !frontier[u] {
                        frontier[u] = true;
                        candidates.push(u);
                    }
                }
                candidates.retain(|&u| self.assign[u] == c);
                candidates.sort_unstable();
                next = None;
                let mut best_gain = f64::NEG_INFINITY;
                for &u in &candidates {
                    let (s_a, q_all) = self.prepare(u);
                    let gain = self.move_gain(u, c, side, s_a, q_all);
                    if gain > best_gain {
                        best_gain = gain;
                        next = Some(u);
                    }
                }
            }
            for &u in &candidates {
                frontier[u] = false;
            }
            for &v in moved.iter().rev() {
                frontier[v] = false;
                self.apply_move(v, side, c);
            }
        }
        best
    }

    fn merge_gain(&self, a: usize, b: usize, s: &[f64]) -> f64 {
        let (na, nb) = (self.size[a], self.size[b]);
        let nc = na + nb;
        let b_ab = self.boundary(a, b);
        let ic = self.internal[a] + self.internal[b] + 2.0 * b_ab;
        match self.objective {
            MetricKind::D => {
                self.d_term(ic, self.strength[a] + self.strength[b], nc)
                    - self.d_term(self.internal[a], self.strength[a], na)
                    - self.d_term(self.internal[b], self.strength[b], nb)
            }
            MetricKind::M => {
                let ra = s[a] - b_ab * inv_sqrt(nb);
                let rb = s[b] - b_ab * inv_sqrt(na);
                let before = ra * inv_sqrt(na) + rb * inv_sqrt(nb) + b_ab * inv_sqrt(na * nb);
                let after = (ra + rb) * inv_sqrt(nc);
                ratio(ic, nc) - ratio(self.internal[a], na) - ratio(self.internal[b], nb)
                    - 2.0 * (after - before)
            }
        }
    }

    /// Best boundary-connected pair `(a, b)` with `a < b`, ties to the
    /// lexicographically smallest.
    fn best_merge(&self) -> Option<(usize, usize, f64)> {
        let s: Vec<f64> = match self.objective {
            MetricKind::M => (0..self.size.len()).map(|c| self.sep_sum(c)).collect(),
            MetricKind::D => Vec::new(),
        };
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..self.size.len() {
            for &b in self.links[a].keys().filter(|&&b| b > a) {
                let gain = self.merge_gain(a, b, &s);
                if best.is_none_or(|(_, _, g)| gain > g) {
                    best = Some((a, b, gain));
                }
            }
        }
        best
    }

    /// Folds `b` into `a`.
    fn apply_merge(&mut self, a: usize, b: usize) {
        let links = std::mem::take(&mut self.links[b]);
        for (d, (w, count)) in links {
            self.links[d].remove(&b);
            if d == a {
                self.internal[a] += 2.0 * w;
            } else {
                self.link(a, d, w, count as isize);
            }
        }
        self.internal[a] += self.internal[b];
        self.strength[a] += self.strength[b];
        self.size[a] += self.size[b];
        self.internal[b] = 0.0;
        self.strength[b] = 0.0;
        self.size[b] = 0;
        for c in self.assign.iter_mut().filter(|c| **c == b) {
            *c = a;
        }
        self.free.push(b);
    }

    fn partition(&self) -> Partition {
        Partition::new(self.assign.clone()).expect("graph has nodes")
    }
}

/// Runs local-move sweeps and merge rounds, then a split round when neither
/// changed anything, until no step gains more than `min_gain` or
/// `max_passes` is reached.
pub fn detect(g: &Graph, cfg: &DetectorConfig) -> Result<Detection> {
    cfg.validate()?;
    if g.node_count() == 0 {
        return Err(Error::InvalidParameter("graph has no nodes".into()));
    }
    let start = match &cfg.init {
        Init::Singletons => Partition::singletons(g.node_count()),
        Init::Given(p) => {
            p.check_against(g)?;
            p.clone()
        }
    };
    let mut state = State::new(g, start.assignment().to_vec(), cfg.objective);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    let mut value = state.value();
    let mut trace = Vec::new();
    let mut passes = 0;

    while passes < cfg.max_passes {
        passes += 1;
        let mut changed = false;
        if cfg.move_order == MoveOrder::Shuffled {
            order.shuffle(&mut rng);
        }
        for &v in &order {
            let Some((to, gain)) = state.best_move(v) else { continue };
            if gain <= cfg.min_gain {
                continue;
            }
            let from = state.assign[v];
            state.take_cluster(to);
            state.apply_move(v, from, to);
            value += gain;
            trace.push(Step {
                pass: passes,
                kind: StepKind::Move { node: v, from, to },
                gain,
                value,
            });
            check_running_value(g, &state, value);
            changed = true;
        }
        while let Some((a, b, gain)) = state.best_merge() {
            if gain <= cfg.min_gain {
                break;
            }
            state.apply_merge(a, b);
            value += gain;
            trace.push(Step {
                pass: passes,
                kind: StepKind::Merge { into: a, from: b },
                gain,
                value,
            });
            check_running_value(g, &state, value);
            changed = true;
        }
        if changed {
            continue;
        }
        // Moves and merges are exhausted; try carving a group out of a cluster.
        for c in 0..state.size.len() {
            if state.size[c] < 2 {
                continue;
            }
            let Some((side, gain)) = state.best_split(c) else { continue };
            if gain <= cfg.min_gain {
                continue;
            }
            let into = state.empty_cluster();
            state.take_cluster(into);
            for &v in &side {
                state.apply_move(v, c, into);
            }
            value += gain;
            trace.push(Step {
                pass: passes,
                kind: StepKind::Split { cluster: c, into, size: side.len() },
                gain,
                value,
            });
            check_running_value(g, &state, value);
            changed = true;
        }
        if !changed {
            break;
        }
    }

    let partition = state.partition();
    let report = evaluate(g, &partition, cfg.objective)?;
    Ok(Detection {
        partition,
        report,
        trace,
        passes,
    })
}

/// Debug builds re-score the whole partition after every accepted step.
fn check_running_value(g: &Graph, state: &State<'_>, value: f64) {
    if cfg!(debug_assertions) {
        let full = evaluate(g, &state.partition(), state.objective)
            .expect("state partition matches graph")
            .value;
        debug_assert!(
            (full - value).abs() <= 1e-8 * full.abs().max(1.0),
            "incremental objective {value} drifted from {full}"
        );
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectorRun {
    pub metric: MetricKind,
    pub cluster_count: usize,
    pub assignment: Vec<usize>,
    #[serde(serialize_with = "round12")]
    pub value: f64,
    pub connected: bool,
    pub matches_truth: Option<bool>,
    #[serde(serialize_with = "round12_opt")]
    pub rand_index: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectorComparison {
    pub schema_version: u32,
    pub runs: Vec<DetectorRun>,
}

impl DetectorComparison {
    pub fn run(&self, metric: MetricKind) -> Option<&DetectorRun> {
        self.runs.iter().find(|r| r.metric == metric)
    }
}

/// Runs [`detect`] once per objective with otherwise identical settings.
pub fn compare_detectors(g: &Graph, truth: Option<&Partition>, cfg: &DetectorConfig) -> Result<DetectorComparison> {
    if let Some(t) = truth {
        t.check_against(g)?;
    }
    let mut runs = Vec::new();
    for metric in [MetricKind::M, MetricKind::D] {
        let found = detect(g, &DetectorConfig { objective: metric, ..cfg.clone() })?;
        let p = found.partition.canonical();
        runs.push(DetectorRun {
            metric,
            cluster_count: p.cluster_count(),
            assignment: p.assignment().to_vec(),
            value: found.report.value,
            connected: found.report.connected,
            matches_truth: truth.map(|t| t.same_clustering(&p)),
            rand_index: truth.map(|t| t.rand_index(&p)),
        });
    }
    Ok(DetectorComparison {
        schema_version: SCHEMA_VERSION,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_ring, gen_two_cliques_w, gen_two_communities};
    use crate::metrics::threshold;

    fn complete(m: usize) -> Graph {
        let edges = (0..m).flat_map(|u| (u + 1..m).map(move |v| (u, v)));
        Graph::from_unweighted(m, edges).unwrap()
    }

    #[test]
    fn two_triangles_recover_truth() {
        let lg = gen_two_communities(3, 3, 1.0, 1.0, 0).unwrap();
        let d = detect(&lg.graph, &DetectorConfig::default()).unwrap();
        assert!(d.partition.same_clustering(&lg.truth));
        assert!((d.report.value - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn clique_stays_whole() {
        let d = detect(&complete(6), &DetectorConfig::default()).unwrap();
        assert_eq!(d.partition.cluster_count(), 1);
        assert!((d.report.value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn ring_of_cliques_recovers_truth() {
        let lg = gen_ring(&[3, 4, 5], &[1.0], 0).unwrap();
        for move_order in [MoveOrder::NodeId, MoveOrder::Shuffled] {
            let cfg = DetectorConfig { move_order, seed: 7, ..Default::default() };
            let d = detect(&lg.graph, &cfg).unwrap();
            assert!(d.partition.same_clustering(&lg.truth));
        }
    }

    #[test]
    fn trace_is_strictly_increasing() {
        let lg = gen_ring(&[4, 5, 6, 3], &[1.0], 3).unwrap();
        let cfg = DetectorConfig::default();
        let d = detect(&lg.graph, &cfg).unwrap();
        let mut prev = State::new(&lg.graph, (0..lg.graph.node_count()).collect(), MetricKind::M).value();
        for s in &d.trace {
            assert!(s.gain > cfg.min_gain);
            assert!(s.value > prev);
            prev = s.value;
        }
        assert!((prev - d.report.value).abs() < 1e-9);
    }

    #[test]
    fn rerun_on_own_output_is_stable() {
        let lg = gen_two_cliques_w(4, 7, 3, 1).unwrap();
        for objective in [MetricKind::M, MetricKind::D] {
            let first = detect(&lg.graph, &DetectorConfig { objective, ..Default::default() }).unwrap();
            let cfg = DetectorConfig {
                objective,
                init: Init::Given(first.partition.clone()),
                ..Default::default()
            };
            let second = detect(&lg.graph, &cfg).unwrap();
            assert!(second.trace.is_empty());
            assert!(second.partition.same_clustering(&first.partition));
        }
    }

    #[test]
    fn heterogeneous_cliques_between_thresholds() {
        let t = threshold(5, 25).unwrap();
        assert!(t.w_d < t.w_m);
        let lo = t.w_d.floor() as usize + 1;
        let hi = t.w_m.ceil() as usize - 1;
        assert!(lo <= hi);
        for w in lo..=hi {
            let lg = gen_two_cliques_w(5, 25, w, w as u64).unwrap();
            let cmp = compare_detectors(&lg.graph, Some(&lg.truth), &DetectorConfig::default()).unwrap();
            assert_eq!(cmp.run(MetricKind::M).unwrap().matches_truth, Some(true), "w={w}");
            assert_eq!(cmp.run(MetricKind::D).unwrap().cluster_count, 1, "w={w}");
        }
    }

    #[test]
    fn disconnected_cliques_split_under_both() {
        let lg = gen_two_cliques_w(4, 6, 0, 0).unwrap();
        let cmp = compare_detectors(&lg.graph, Some(&lg.truth), &DetectorConfig::default()).unwrap();
        for run in &cmp.runs {
            assert_eq!(run.matches_truth, Some(true));
            assert!(!run.connected);
        }
    }

    #[test]
    fn invalid_config() {
        let g = complete(3);
        assert!(detect(&g, &DetectorConfig { max_passes: 0, ..Default::default() }).is_err());
        assert!(detect(&g, &DetectorConfig { min_gain: -1.0, ..Default::default() }).is_err());
    }

    #[test]
    fn trace_csv_rows() {
        let lg = gen_two_communities(3, 3, 1.0, 1.0, 0).unwrap();
        let d = detect(&lg.graph, &DetectorConfig::default()).unwrap();
        let csv = d.trace_csv();
        assert_eq!(csv.lines().count(), d.trace.len() + 1);
        assert!(csv.starts_with("pass,kind,node,from,to,gain,value\n"));
    }
}
