//! Undirected, non-negatively weighted graphs.
//!
//! Nodes are dense `0..node_count`. Each undirected edge is stored once in
//! the edge list (with `u < v`) and twice in the CSR adjacency, so `T_ij`
//! and `T_ji` are observed from both endpoints.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    total_weight: f64,
    labels: Vec<u64>,
    /// Fixed at construction; the graph is immutable.
    connected: bool,
}

impl Graph {
    /// Builds a graph over `node_count` nodes. Rejects self-loops, negative or
    /// non-finite weights, out-of-range endpoints and duplicate undirected edges.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let edges = edges.into_iter().map(|e| (None, e));
        Self::build(node_count, edges, (0..node_count as u64).collect())
    }

    /// Unit-weight convenience constructor.
    pub fn from_unweighted<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(node_count, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    fn build<I>(node_count: usize, edges: I, labels: Vec<u64>) -> Result<Self>
    where
        I: IntoIterator<Item = (Option<usize>, (usize, usize, f64))>,
    {
        let label = |i: usize| labels.get(i).copied().unwrap_or(i as u64);
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (line, (u, v, weight)) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange {
                        node: node as u64,
                        node_count,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop {
                    line,
                    node: label(u),
                });
            }
            if !(weight.is_finite() && weight >= 0.0) {
                return Err(Error::InvalidWeight {
                    line,
                    u: label(u),
                    v: label(v),
                    weight,
                });
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !seen.insert((a, b)) {
                return Err(Error::DuplicateEdge {
                    line,
                    u: label(u),
                    v: label(v),
                });
            }
            list.push(Edge { u: a, v: b, weight });
        }
        list.sort_by_key(|x| (x.u, x.v));

        let mut degree = vec![0usize; node_count];
        for e in &list {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..node_count].to_vec();
        let mut targets = vec![0usize; 2 * list.len()];
        let mut weights = vec![0.0; 2 * list.len()];
        for e in &list {
            targets[cursor[e.u]] = e.v;
            weights[cursor[e.u]] = e.weight;
            cursor[e.u] += 1;
            targets[cursor[e.v]] = e.u;
            weights[cursor[e.v]] = e.weight;
            cursor[e.v] += 1;
        }
        let total_weight = list.iter().map(|e| e.weight).sum();
        let mut g = Self {
            node_count,
            edges: list,
            offsets,
            targets,
            weights,
            total_weight,
            labels,
            connected: false,
        };
        g.connected = g.is_connected_within(&(0..node_count).collect::<Vec<_>>());
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sum of all edge weights, each undirected edge counted once.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `node` with edge weights, in ascending neighbor order.
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[node]..self.offsets[node + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    /// Weighted degree `Σ_j T_ij`.
    pub fn strength(&self, node: usize) -> f64 {
        self.weights[self.offsets[node]..self.offsets[node + 1]]
            .iter()
            .sum()
    }

    /// Weight of edge `(u, v)`, or zero if absent.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.neighbors(u)
            .find(|&(t, _)| t == v)
            .map_or(0.0, |(_, w)| w)
    }

    /// `y = T x` over the CSR adjacency.
    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.node_count);
        (0..self.node_count)
            .map(|i| {
                let range = self.offsets[i]..self.offsets[i + 1];
                self.targets[range.clone()]
                    .iter()
                    .zip(&self.weights[range])
                    .map(|(&j, &w)| w * x[j])
                    .sum()
            })
            .collect()
    }

    /// Original label of a dense node id (identity unless loaded from a file).
    pub fn label(&self, node: usize) -> u64 {
        self.labels[node]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Dense id of an original label.
    pub fn node_of_label(&self, label: u64) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    /// Reachability from node 0 covers every node. The empty graph is connected.
    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Whether the subgraph induced by `nodes` is connected.
    pub fn is_connected_within(&self, nodes: &[usize]) -> bool {
        let Some(&start) = nodes.first() else {
            return true;
        };
        let mut inside = vec![false; self.node_count];
        for &n in nodes {
            inside[n] = true;
        }
        let mut seen = vec![false; self.node_count];
        seen[start] = true;
        let mut reached = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for (v, _) in self.neighbors(u) {
                if inside[v] && !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached == nodes.len()
    }

    /// Parses an edge list: `u v` or `u v w` per line, `#` comments and blank
    /// lines ignored. Labels are non-negative integers; dense ids follow
    /// ascending label order.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut raw = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = line.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != 2 && fields.len() != 3 {
                return Err(Error::Malformed {
                    line: Some(line_no),
                    msg: format!("expected `u v [w]`, got {} fields", fields.len()),
                });
            }
            let parse_node = |s: &str| {
                s.parse::<u64>().map_err(|_| Error::Malformed {
                    line: Some(line_no),
                    msg: format!("bad node label `{s}`"),
                })
            };
            let u = parse_node(fields[0])?;
            let v = parse_node(fields[1])?;
            let w = match fields.get(2) {
                Some(s) => s.parse::<f64>().map_err(|_| Error::Malformed {
                    line: Some(line_no),
                    msg: format!("bad weight `{s}`"),
                })?,
                None => 1.0,
            };
            raw.push((line_no, u, v, w));
        }

        let mut ids = BTreeMap::new();
        for &(_, u, v, _) in &raw {
            ids.insert(u, 0usize);
            ids.insert(v, 0usize);
        }
        for (i, id) in ids.values_mut().enumerate() {
            *id = i;
        }
        let labels: Vec<u64> = ids.keys().copied().collect();
        let edges = raw
            .into_iter()
            .map(|(line, u, v, w)| (Some(line), (ids[&u], ids[&v], w)));
        Self::build(labels.len(), edges, labels)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&fs::read_to_string(path)?)
    }

    /// Edge list text using original labels; weights are written in shortest
    /// round-trip form so a reload is bit-identical.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(
                out,
                "{} {} {}",
                self.labels[e.u], self.labels[e.v], e.weight
            );
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_edge_list())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_from_text() {
        let g = Graph::parse_edge_list("0 1\n1 2\n2 0").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.total_weight(), 3.0);
        assert!(g.is_connected());
    }

    #[test]
    fn single_weighted_edge() {
        let g = Graph::parse_edge_list("0 1 2.5").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.total_weight(), 2.5);
        assert_eq!(g.weight(1, 0), 2.5);
    }

    #[test]
    fn rejects_self_loop_with_line() {
        let err = Graph::parse_edge_list("# c\n0 0").unwrap_err();
        assert!(matches!(err, Error::SelfLoop { line: Some(2), node: 0 }));
    }

    #[test]
    fn rejects_negative_weight_duplicate_and_garbage() {
        assert!(matches!(
            Graph::parse_edge_list("0 1 -1").unwrap_err(),
            Error::InvalidWeight { line: Some(1), .. }
        ));
        assert!(matches!(
            Graph::parse_edge_list("0 1\n1 0").unwrap_err(),
            Error::DuplicateEdge { line: Some(2), .. }
        ));
        assert!(matches!(
            Graph::parse_edge_list("0 1\n0 x").unwrap_err(),
            Error::Malformed { line: Some(2), .. }
        ));
        assert!(matches!(
            Graph::parse_edge_list("0 1 1 1").unwrap_err(),
            Error::Malformed { line: Some(1), .. }
        ));
    }

    #[test]
    fn labels_are_compacted_in_order() {
        let g = Graph::parse_edge_list("10 30\n30 20 0.5").unwrap();
        assert_eq!(g.labels(), &[10, 20, 30]);
        assert_eq!(g.node_of_label(30), Some(2));
        assert_eq!(g.weight(1, 2), 0.5);
        assert_eq!(g.to_edge_list(), "10 30 1\n20 30 0.5\n");
    }

    #[test]
    fn symmetric_adjacency() {
        let g = Graph::from_edges(4, [(0, 1, 1.5), (2, 1, 0.25), (3, 0, 2.0)]).unwrap();
        for e in g.edges() {
            assert_eq!(g.weight(e.u, e.v), g.weight(e.v, e.u));
        }
        assert_eq!(g.strength(0), 3.5);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.mat_vec(&[1.0, 1.0, 1.0, 1.0]), vec![3.5, 1.75, 0.25, 2.0]);
    }

    #[test]
    fn connectivity() {
        let two = Graph::from_unweighted(4, [(0, 1), (2, 3)]).unwrap();
        assert!(!two.is_connected());
        assert!(two.is_connected_within(&[2, 3]));
        let path = Graph::from_unweighted(3, [(0, 1), (1, 2)]).unwrap();
        assert!(path.is_connected());
        assert!(!path.is_connected_within(&[0, 2]));
    }

    #[test]
    fn save_and_reload_is_identical() {
        let g = Graph::parse_edge_list("5 7 0.1\n7 9 3.3333333333333335\n5 9 1e-300").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        g.save(&path).unwrap();
        let h = Graph::load(&path).unwrap();
        assert_eq!(g.edges(), h.edges());
        assert_eq!(g.labels(), h.labels());
        assert_eq!(g.to_edge_list(), h.to_edge_list());
    }
}
