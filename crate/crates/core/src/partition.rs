//! Non-overlapping partitions of a graph's nodes into non-empty clusters.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Every node belongs to exactly one cluster; cluster ids are dense
/// `0..cluster_count` and every cluster is non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    sizes: Vec<usize>,
}

impl Partition {
    /// Builds a partition from arbitrary cluster labels. Labels are compacted
    /// to dense ids preserving their numeric order, so already-dense labels
    /// are kept as is.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidPartition("no nodes".into()));
        }
        let mut ids: BTreeMap<usize, usize> = labels.iter().map(|&c| (c, 0)).collect();
        for (i, id) in ids.values_mut().enumerate() {
            *id = i;
        }
        let assignment: Vec<usize> = labels.iter().map(|c| ids[c]).collect();
        let mut sizes = vec![0; ids.len()];
        for &c in &assignment {
            sizes[c] += 1;
        }
        Ok(Self { assignment, sizes })
    }

    /// The whole node set as one cluster.
    pub fn single(node_count: usize) -> Self {
        Self {
            assignment: vec![0; node_count],
            sizes: vec![node_count],
        }
    }

    pub fn singletons(node_count: usize) -> Self {
        Self {
            assignment: (0..node_count).collect(),
            sizes: vec![1; node_count],
        }
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn cluster_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn size(&self, cluster: usize) -> usize {
        self.sizes[cluster]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Members of one cluster in ascending node order.
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == cluster)
            .collect()
    }

    /// Members of every cluster, grouped by cluster id.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    /// Relabels clusters by first appearance (restricted growth string form).
    pub fn canonical(&self) -> Self {
        let mut map = vec![usize::MAX; self.sizes.len()];
        let mut next = 0;
        let assignment: Vec<usize> = self
            .assignment
            .iter()
            .map(|&c| {
                if map[c] == usize::MAX {
                    map[c] = next;
                    next += 1;
                }
                map[c]
            })
            .collect();
        let mut sizes = vec![0; next];
        for &c in &assignment {
            sizes[c] += 1;
        }
        Self { assignment, sizes }
    }

    /// Same grouping of nodes, ignoring cluster ids.
    pub fn same_clustering(&self, other: &Partition) -> bool {
        self.canonical().assignment == other.canonical().assignment
    }

    /// Fraction of node pairs on which the two partitions agree (Rand index).
    pub fn rand_index(&self, other: &Partition) -> f64 {
        let n = self.node_count();
        assert_eq!(n, other.node_count());
        if n < 2 {
            return 1.0;
        }
        let mut agree = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                let a = self.assignment[i] == self.assignment[j];
                let b = other.assignment[i] == other.assignment[j];
                agree += u64::from(a == b);
            }
        }
        agree as f64 / (n * (n - 1) / 2) as f64
    }

    pub(crate) fn check_against(&self, g: &Graph) -> Result<()> {
        if self.node_count() != g.node_count() {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} nodes, graph has {}",
                self.node_count(),
                g.node_count()
            )));
        }
        Ok(())
    }

    /// Parses `node cluster-id` lines using the graph's original node labels.
    /// Every node must be assigned exactly once.
    pub fn parse(text: &str, g: &Graph) -> Result<Self> {
        let mut labels = vec![None; g.node_count()];
        for (idx, line) in text.lines().enumerate() {
            let line_no = Some(idx + 1);
            let content = line.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let [node, cluster] = fields[..] else {
                return Err(Error::Malformed {
                    line: line_no,
                    msg: "expected `node cluster-id`".into(),
                });
            };
            let node: u64 = node.parse().map_err(|_| Error::Malformed {
                line: line_no,
                msg: format!("bad node label `{node}`"),
            })?;
            let cluster: usize = cluster.parse().map_err(|_| Error::Malformed {
                line: line_no,
                msg: format!("bad cluster id `{cluster}`"),
            })?;
            let id = g.node_of_label(node).ok_or(Error::NodeOutOfRange {
                node,
                node_count: g.node_count(),
            })?;
            if labels[id].replace(cluster).is_some() {
                return Err(Error::Malformed {
                    line: line_no,
                    msg: format!("node {node} assigned twice"),
                });
            }
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    Error::InvalidPartition(format!("node {} has no cluster", g.label(i)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(labels)
    }

    pub fn load(path: impl AsRef<Path>, g: &Graph) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?, g)
    }

    pub fn to_text(&self, g: &Graph) -> String {
        let mut out = String::new();
        for (node, c) in self.assignment.iter().enumerate() {
            let _ = writeln!(out, "{} {}", g.label(node), c);
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>, g: &Graph) -> Result<()> {
        fs::write(path, self.to_text(g))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compacts_labels_in_numeric_order() {
        let p = Partition::new(vec![7, 3, 7, 9]).unwrap();
        assert_eq!(p.assignment(), &[1, 0, 1, 2]);
        assert_eq!(p.sizes(), &[1, 2, 1]);
        assert_eq!(p.sizes().iter().sum::<usize>(), p.node_count());
        assert_eq!(p.members(1), vec![0, 2]);
        assert_eq!(p.canonical().assignment(), &[0, 1, 0, 2]);
    }

    #[test]
    fn same_clustering_ignores_ids() {
        let a = Partition::new(vec![0, 0, 1, 1]).unwrap();
        let b = Partition::new(vec![5, 5, 2, 2]).unwrap();
        let c = Partition::new(vec![0, 1, 1, 1]).unwrap();
        assert!(a.same_clustering(&b));
        assert!(!a.same_clustering(&c));
        assert_eq!(a.rand_index(&b), 1.0);
        assert!((a.rand_index(&c) - 3.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn parse_uses_original_labels() {
        let g = Graph::parse_edge_list("10 20\n20 30").unwrap();
        let p = Partition::parse("# truth\n30 1\n10 0\n20 0\n", &g).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 1]);
        assert_eq!(p.to_text(&g), "10 0\n20 0\n30 1\n");
    }

    #[test]
    fn parse_errors() {
        let g = Graph::parse_edge_list("0 1\n1 2").unwrap();
        assert!(matches!(
            Partition::parse("0 0\n1 0\n5 1", &g).unwrap_err(),
            Error::NodeOutOfRange { node: 5, .. }
        ));
        assert!(matches!(
            Partition::parse("0 0\n1 0", &g).unwrap_err(),
            Error::InvalidPartition(_)
        ));
        assert!(matches!(
            Partition::parse("0 0\n0 1\n1 0\n2 0", &g).unwrap_err(),
            Error::Malformed { line: Some(2), .. }
        ));
    }
}
