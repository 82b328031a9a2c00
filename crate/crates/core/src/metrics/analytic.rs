//! Closed-form values of `M` (and `D`) on the synthetic families.
//!
//! Random communities enter through their expected internal degree
//! `p·m(m−1)`, so for `p < 1` the values are expectations over unconditioned
//! `G(m, p)`; for cliques they are exact.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{p_min, Family, GeneratorSpec};
use crate::metrics::threshold::{w_threshold_d, w_threshold_m};
use crate::report::round12;

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticRow {
    pub quantity: String,
    #[serde(serialize_with = "round12")]
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticTable {
    pub family: Family,
    pub rows: Vec<AnalyticRow>,
}

impl AnalyticTable {
    fn push(&mut self, quantity: impl Into<String>, value: f64) {
        self.rows.push(AnalyticRow {
            quantity: quantity.into(),
            value,
        });
    }

    pub fn get(&self, quantity: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.quantity == quantity)
            .map(|r| r.value)
    }
}

/// Expected `M` of `G(m, p)` kept whole: `p(m−1)`.
pub fn er_single(m: usize, p: f64) -> f64 {
    p * (m as f64 - 1.0)
}

/// Expected `M` of `G(m1+m2, p)` cut into parts of `m1` and `m2` nodes:
/// `p(m−2) − 2p√(m1 m2)`.
pub fn er_split(m1: usize, m2: usize, p: f64) -> f64 {
    let (a, b) = (m1 as f64, m2 as f64);
    p * (a + b - 2.0) - 2.0 * p * (a * b).sqrt()
}

/// `M` of a ring with every community separate.
pub fn ring_separate(sizes: &[usize], probs: &[f64]) -> f64 {
    let k = sizes.len();
    let internal: f64 = sizes.iter().zip(probs).map(|(&m, &p)| er_single(m, p)).sum();
    let bridges: f64 = (0..k)
        .map(|i| 2.0 / ((sizes[i] * sizes[(i + 1) % k]) as f64).sqrt())
        .sum();
    internal - bridges
}

/// `M` of a ring after merging the `k + 1` consecutive communities
/// `start, start+1, …, start+k` (indices mod ring length), `1 ≤ k ≤ len−2`.
/// With `k = len − 1` every community is merged.
pub fn ring_merged(sizes: &[usize], probs: &[f64], start: usize, k: usize) -> f64 {
    let len = sizes.len();
    assert!(k >= 1 && k < len, "merge length out of range");
    let rot = |i: usize| (start + i) % len;
    let group = 0..=k;
    let group_nodes: f64 = group.clone().map(|i| sizes[rot(i)] as f64).sum();
    let group_internal: f64 = group
        .map(|i| probs[rot(i)] * (sizes[rot(i)] * (sizes[rot(i)] - 1)) as f64)
        .sum();
    if k == len - 1 {
        // All `len` bridges fall inside the single cluster.
        return (2.0 * len as f64 + group_internal) / group_nodes;
    }
    let merged = (2.0 * k as f64 + group_internal) / group_nodes;
    let rest: f64 = (k + 1..len)
        .map(|i| er_single(sizes[rot(i)], probs[rot(i)]))
        .sum();
    let chain: f64 = (k + 1..len - 1)
        .map(|i| 2.0 / ((sizes[rot(i)] * sizes[rot(i + 1)]) as f64).sqrt())
        .sum();
    let next = sizes[rot(k + 1)] as f64;
    let last = sizes[rot(len - 1)] as f64;
    let ends = 2.0 / group_nodes.sqrt() * (1.0 / next.sqrt() + 1.0 / last.sqrt());
    merged + rest - chain - ends
}

/// Every closed-form quantity derived for `spec`'s family.
pub fn analytic_suite(spec: &GeneratorSpec) -> Result<AnalyticTable> {
    spec.validate()?;
    let mut t = AnalyticTable {
        family: spec.family,
        rows: Vec::new(),
    };
    let sizes = &spec.sizes;
    let probs = &spec.probs;
    match spec.family {
        Family::ErSingle => {
            let (m, p) = (sizes[0], probs[0]);
            t.push("p_min", p_min(m));
            t.push("M_single", er_single(m, p));
            for m1 in 1..=m / 2 {
                let m2 = m - m1;
                let split = er_split(m1, m2, p);
                t.push(format!("M_split[{m1},{m2}]"), split);
                t.push(
                    format!("M_single-M_split[{m1},{m2}]"),
                    p * (1.0 + 2.0 * ((m1 * m2) as f64).sqrt()),
                );
            }
        }
        Family::TwoCommunitiesBridged => {
            let (m, n) = (sizes[0] as f64, sizes[1] as f64);
            let (pm, pn) = (probs[0], probs[1]);
            let single = (pm * (m - 1.0) * m + pn * (n - 1.0) * n + 2.0) / (m + n);
            let sep = pm * (m - 1.0) + pn * (n - 1.0) - 2.0 / (m * n).sqrt();
            let delta_i = (pm * (m - 1.0) * n + pn * (n - 1.0) * m) / (m + n);
            t.push("p_min_m", p_min(sizes[0]));
            t.push("p_min_n", p_min(sizes[1]));
            t.push("M_single", single);
            t.push("M_sep", sep);
            t.push("delta_I", delta_i);
            t.push("delta_M", delta_i - 2.0 / (m * n).sqrt() - 2.0 / (m + n));
            t.push("delta_M_lower_bound", 2.0 - 2.0 / (m * n).sqrt() - 2.0 / (m + n));
        }
        Family::RingOfCommunities => {
            let len = sizes.len();
            let sep = ring_separate(sizes, probs);
            t.push("M_sep", sep);
            for k in 1..len - 1 {
                let merged = ring_merged(sizes, probs, 0, k);
                let group: f64 = sizes[..=k].iter().map(|&m| m as f64).sum();
                let delta_i: f64 = sizes[..=k]
                    .iter()
                    .zip(&probs[..=k])
                    .map(|(&m, &p)| p * (m as f64 - 1.0) * (group - m as f64))
                    .sum::<f64>()
                    / group;
                t.push(format!("M_merge[{k}]"), merged);
                t.push(format!("delta_I[{k}]"), delta_i);
                t.push(format!("delta_M[{k}]"), sep - merged);
            }
            let all = ring_merged(sizes, probs, 0, len - 1);
            t.push("M_merge_all", all);
            t.push("delta_M_all", sep - all);
        }
        Family::TwoCliquesWBridge => {
            let (mi, ni) = (sizes[0], sizes[1]);
            let (m, n, w) = (mi as f64, ni as f64, spec.bridges as f64);
            let merge = (m * (m - 1.0) + n * (n - 1.0) + 2.0 * w) / (m + n);
            let sep = (m - 1.0) + (n - 1.0) - 2.0 * w / (m * n).sqrt();
            let d_sep = (m - 1.0) + (n - 1.0) - w / m - w / n;
            t.push("M_merge", merge);
            t.push("M_sep", sep);
            t.push("delta_M", sep - merge);
            t.push("w_M", w_threshold_m(mi, ni)?);
            t.push("D_merge", merge);
            t.push("D_sep", d_sep);
            t.push("delta_D", d_sep - merge);
            t.push("w_D", w_threshold_d(mi, ni)?);
        }
    }
    if t.rows.iter().any(|r| !r.value.is_finite()) {
        return Err(Error::InvalidParameter("non-finite closed form".into()));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn two_triangles_bridged() {
        let t = analytic_suite(&GeneratorSpec::two_communities(3, 3, 1.0, 1.0, 0)).unwrap();
        assert!(close(t.get("M_single").unwrap(), 7.0 / 3.0));
        assert!(close(t.get("M_sep").unwrap(), 10.0 / 3.0));
        assert!(close(t.get("delta_M").unwrap(), 1.0));
        assert!(close(t.get("delta_M_lower_bound").unwrap(), 1.0));
    }

    #[test]
    fn ring_of_three_triangles() {
        let t = analytic_suite(&GeneratorSpec::ring(vec![3, 3, 3], vec![1.0; 3], 0)).unwrap();
        assert!(close(t.get("M_sep").unwrap(), 4.0));
        // Three triangles plus three bridges in one cluster: (18 + 6) / 9.
        assert!(close(t.get("M_merge_all").unwrap(), 24.0 / 9.0));
    }

    #[test]
    fn random_single_expectation() {
        let t = analytic_suite(&GeneratorSpec::er(5, 0.5, 0)).unwrap();
        assert!(close(t.get("M_single").unwrap(), 2.0));
        assert!(close(t.get("p_min").unwrap(), 0.5));
        assert!(close(t.get("M_single-M_split[2,3]").unwrap(), 0.5 * (1.0 + 2.0 * 6f64.sqrt())));
    }

    #[test]
    fn two_cliques_at_threshold() {
        let t = analytic_suite(&GeneratorSpec::two_cliques_w(3, 3, 2, 0)).unwrap();
        assert!(close(t.get("w_M").unwrap(), 2.0));
        assert!(close(t.get("delta_M").unwrap(), 0.0));
        let t = analytic_suite(&GeneratorSpec::two_cliques_w(3, 3, 1, 0)).unwrap();
        assert!(close(t.get("delta_M").unwrap(), 1.0));
    }

    #[test]
    fn invalid_family_parameters() {
        assert!(analytic_suite(&GeneratorSpec::er(5, 0.3, 0)).is_err());
        assert!(analytic_suite(&GeneratorSpec::two_communities(2, 3, 1.0, 1.0, 0)).is_err());
    }
}
