//! Per-cluster internal weights and pairwise boundary weights.

use crate::error::Result;
use crate::graph::Graph;
use crate::partition::Partition;

/// Weight sums the metrics are built from.
///
/// `internal_weight(c)` is `Σ_{i,j∈c} T_ij` over both orientations, i.e. twice
/// the weight of the undirected edges inside `c`. `boundary_weight(c, c')` is
/// `Σ_{i∈c, j∈c'} T_ij`, symmetric in its arguments. Only cluster pairs joined
/// by at least one edge are stored.
#[derive(Debug, Clone)]
pub struct ClusterStats {
    sizes: Vec<usize>,
    internal: Vec<f64>,
    external: Vec<f64>,
    /// `(c, c', weight)` with `c < c'`, grouped by `c`.
    pairs: Vec<(usize, usize, f64)>,
    /// `pairs[pair_start[c]..pair_start[c + 1]]` are the pairs led by `c`.
    pair_start: Vec<usize>,
}

impl ClusterStats {
    /// Streams the edge list twice: the first pass sums internal and external
    /// weights and counts cut edges per lower cluster, the second places each
    /// cut edge in its lower cluster's bucket. Each bucket is then folded into
    /// a scratch row indexed by the upper cluster. `O(|E| + |V| + |C|)`.
    pub fn compute(g: &Graph, p: &Partition) -> Result<Self> {
        p.check_against(g)?;
        let k = p.cluster_count();
        let assign = p.assignment();

        let mut internal = vec![0.0; k];
        let mut external = vec![0.0; k];
        let mut start = vec![0usize; k + 1];
        for e in g.edges() {
            let (c, d) = (assign[e.u], assign[e.v]);
            if c == d {
                internal[c] += 2.0 * e.weight;
            } else {
                external[c] += e.weight;
                external[d] += e.weight;
                start[c.min(d) + 1] += 1;
            }
        }
        for c in 0..k {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut other = vec![0usize; start[k]];
        let mut weight = vec![0.0; start[k]];
        for e in g.edges() {
            let (c, d) = (assign[e.u], assign[e.v]);
            if c != d {
                let lo = c.min(d);
                other[fill[lo]] = c.max(d);
                weight[fill[lo]] = e.weight;
                fill[lo] += 1;
            }
        }

        let mut pairs = Vec::with_capacity(start[k]);
        let mut pair_start = Vec::with_capacity(k + 1);
        let mut row = vec![0.0; k];
        let mut mark = vec![usize::MAX; k];
        let mut touched: Vec<usize> = Vec::new();
        for c in 0..k {
            pair_start.push(pairs.len());
            for i in start[c]..start[c + 1] {
                let d = other[i];
                if mark[d] != c {
                    mark[d] = c;
                    touched.push(d);
                }
                row[d] += weight[i];
            }
            for &d in &touched {
                pairs.push((c, d, row[d]));
                row[d] = 0.0;
            }
            touched.clear();
        }
        pair_start.push(pairs.len());

        Ok(Self {
            sizes: p.sizes().to_vec(),
            internal,
            external,
            pairs,
            pair_start,
        })
    }

    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self, c: usize) -> usize {
        self.sizes[c]
    }

    pub fn internal_weight(&self, c: usize) -> f64 {
        self.internal[c]
    }

    /// `Σ_{c'≠c} boundary_weight(c, c')`.
    pub fn external_weight(&self, c: usize) -> f64 {
        self.external[c]
    }

    pub fn boundary_weight(&self, c: usize, d: usize) -> f64 {
        if c == d {
            return 0.0;
        }
        let (lo, hi) = (c.min(d), c.max(d));
        self.pairs[self.pair_start[lo]..self.pair_start[lo + 1]]
            .iter()
            .find(|&&(_, b, _)| b == hi)
            .map_or(0.0, |&(_, _, w)| w)
    }

    /// Unordered cluster pairs `(c, c', weight)` with `c < c'` joined by at
    /// least one edge, ascending in `c`; the order in `c'` is unspecified.
    pub fn pairs(&self) -> &[(usize, usize, f64)] {
        &self.pairs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Graph {
        Graph::from_unweighted(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn triangle_single_cluster() {
        let g = Graph::from_unweighted(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let s = ClusterStats::compute(&g, &Partition::single(3)).unwrap();
        assert_eq!(s.internal_weight(0), 6.0);
        assert!(s.pairs().is_empty());
    }

    #[test]
    fn two_triangles_natural_split() {
        let g = two_triangles();
        let p = Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let s = ClusterStats::compute(&g, &p).unwrap();
        assert_eq!(s.internal_weight(0), 6.0);
        assert_eq!(s.internal_weight(1), 6.0);
        assert_eq!(s.boundary_weight(0, 1), 1.0);
        assert_eq!(s.boundary_weight(1, 0), 1.0);
    }

    #[test]
    fn path_split() {
        let g = Graph::from_unweighted(3, [(0, 1), (1, 2)]).unwrap();
        let p = Partition::new(vec![0, 1, 1]).unwrap();
        let s = ClusterStats::compute(&g, &p).unwrap();
        assert_eq!(s.internal_weight(0), 0.0);
        assert_eq!(s.internal_weight(1), 2.0);
        assert_eq!(s.boundary_weight(0, 1), 1.0);
        assert_eq!(s.external_weight(0), 1.0);
    }

    #[test]
    fn zero_weight_edges_still_register_pairs() {
        let g = Graph::from_edges(3, [(0, 1, 0.0), (0, 2, 0.0), (1, 2, 2.0)]).unwrap();
        let s = ClusterStats::compute(&g, &Partition::singletons(3)).unwrap();
        assert_eq!(s.pairs().len(), 3);
        assert_eq!(s.boundary_weight(2, 1), 2.0);
    }

    #[test]
    fn mismatched_partition_is_rejected() {
        let g = two_triangles();
        assert!(ClusterStats::compute(&g, &Partition::single(5)).is_err());
    }
}
