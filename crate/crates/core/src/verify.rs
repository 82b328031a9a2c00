//! Verification sweeps over a fixed parameter grid, one entry per claim and
//! parameter point, written as newline-delimited JSON.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bipartition::{delta_m_decomposed, delta_m_direct, laplacian_identity_check, BipartitionProposal};
use crate::error::{Error, Result};
use crate::generators::{p_min, GeneratorSpec};
use crate::graph::Graph;
use crate::metrics::threshold::threshold;
use crate::oracle::{verify_inequality, Claim, ClaimEntry, ClaimReport};
use crate::partition::Partition;
use crate::report::round12;

/// Community sizes swept by the bias and threshold suites.
pub const GRID: [usize; 6] = [3, 4, 5, 8, 12, 25];

/// Ring community sizes; every ordered 4-tuple is used.
pub const RING_SIZES: [usize; 4] = [3, 4, 5, 6];

pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Bias,
    Thresholds,
    BipartitionIdentity,
    All,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Bias => "bias",
            Suite::Thresholds => "thresholds",
            Suite::BipartitionIdentity => "bipartition-identity",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bias" => Ok(Suite::Bias),
            "thresholds" => Ok(Suite::Thresholds),
            "bipartition-identity" => Ok(Suite::BipartitionIdentity),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidParameter(format!("unknown suite `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyEntry {
    pub claim_id: String,
    pub params: Value,
    pub expected: String,
    pub observed: Value,
    pub passed: bool,
    #[serde(serialize_with = "round12")]
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seeds: u64,
    pub entries: Vec<VerifyEntry>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerifyEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    pub fn to_ndjson(&self) -> String {
        self.entries
            .iter()
            .map(|e| serde_json::to_string(e).expect("entries serialize") + "\n")
            .collect()
    }
}

fn from_claim(id: &str, report: ClaimReport) -> VerifyEntry {
    let failed: Vec<&ClaimEntry> = report.entries.iter().filter(|e| !e.passed).collect();
    VerifyEntry {
        claim_id: id.to_string(),
        params: json!(report.spec),
        expected: report.entries.first().map(|e| e.expected.clone()).unwrap_or_default(),
        observed: json!({
            "checks": report.entries.len(),
            "failed": failed,
        }),
        passed: report.passed,
        margin: report.min_margin(),
    }
}

/// Runs `suite`. `seeds` adds that many random instances wherever a suite
/// has a sampled component.
pub fn run(suite: Suite, seeds: u64) -> Result<VerifyReport> {
    let mut entries = Vec::new();
    if matches!(suite, Suite::Bias | Suite::All) {
        entries.extend(bias(seeds)?);
    }
    if matches!(suite, Suite::Thresholds | Suite::All) {
        entries.extend(thresholds(seeds)?);
    }
    if matches!(suite, Suite::BipartitionIdentity | Suite::All) {
        entries.extend(bipartition_identity(seeds)?);
    }
    Ok(VerifyReport { suite, seeds, entries })
}

/// No-split on cliques, separation of bridged cliques, ring merges; plus
/// `seeds` sampled two-community instances at the sparsest allowed `p`.
pub fn bias(seeds: u64) -> Result<Vec<VerifyEntry>> {
    let mut out = Vec::new();
    for &m in GRID.iter().filter(|&&m| m <= 8) {
        out.push(from_claim("no_split", verify_inequality(&GeneratorSpec::er(m, 1.0, 0), Claim::NoSplit)?));
    }
    for &m in &GRID {
        for &n in GRID.iter().filter(|&&n| n >= m) {
            let spec = GeneratorSpec::two_communities(m, n, 1.0, 1.0, 0);
            out.push(from_claim("sep_beats_merge", verify_inequality(&spec, Claim::SepBeatsMerge)?));
            for seed in 0..seeds {
                let spec = GeneratorSpec::two_communities(m, n, p_min(m).min(1.0), p_min(n).min(1.0), seed);
                out.push(from_claim("sep_beats_merge", verify_inequality(&spec, Claim::SepBeatsMerge)?));
            }
        }
    }
    for sizes in ring_tuples() {
        let spec = GeneratorSpec::ring(sizes, vec![1.0; 4], 0);
        out.push(from_claim("sep_beats_merge_k", verify_inequality(&spec, Claim::SepBeatsMergeK)?));
    }
    Ok(out)
}

/// Every ordered 4-tuple over [`RING_SIZES`].
pub fn ring_tuples() -> Vec<Vec<usize>> {
    let k = RING_SIZES.len();
    (0..k.pow(4))
        .map(|i| (0..4).map(|j| RING_SIZES[i / k.pow(j) % k]).collect())
        .collect()
}

/// `w_M ≥ w_D` (equal only on the diagonal) and the bridge sweep for every
/// grid pair, sweeping `seeds.max(1)` instance seeds.
pub fn thresholds(seeds: u64) -> Result<Vec<VerifyEntry>> {
    let mut out = Vec::new();
    for &m in &GRID {
        for &n in &GRID {
            let t = threshold(m, n)?;
            let passed = if m == n {
                t.ratio_minus_one.abs() <= 1e-12
            } else {
                t.ratio_minus_one > 0.0
            };
            out.push(VerifyEntry {
                claim_id: "w_M_ge_w_D".into(),
                params: json!({ "m": m, "n": n }),
                expected: if m == n { "w_M = w_D" } else { "w_M > w_D" }.into(),
                observed: json!({ "w_M": t.w_m, "w_D": t.w_d, "ratio_minus_one": t.ratio_minus_one }),
                passed,
                margin: if m == n { -t.ratio_minus_one.abs() } else { t.ratio_minus_one },
            });
            if n < m {
                continue;
            }
            for seed in 0..seeds.max(1) {
                let spec = GeneratorSpec::two_cliques_w(m, n, 0, seed);
                out.push(from_claim("threshold_w", verify_inequality(&spec, Claim::ThresholdW)?));
            }
        }
    }
    Ok(out)
}

/// A connected-or-not random graph with weights in `[0.5, 2)`, a random
/// partition, and a random split of one cluster with at least two nodes.
pub fn random_triple(seed: u64) -> Result<(Graph, Partition, BipartitionProposal)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=40);
    let p = rng.gen_range(0.1..0.6);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v, rng.gen_range(0.5..2.0)));
            }
        }
    }
    let g = Graph::from_edges(n, edges)?;
    let k = rng.gen_range(1..=n / 2);
    let mut labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    // Guarantee a cluster with two members.
    labels[1] = labels[0];
    let part = Partition::new(labels)?;
    let c = part.cluster_of(0);
    let members = part.members(c);
    let cut = rng.gen_range(1..members.len());
    let mut shuffled = members.clone();
    rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
    let prop = BipartitionProposal::from_side(&part, &shuffled[..cut])?;
    Ok((g, part, prop))
}

/// Direct versus decomposed `δM`, `β ≥ 0`, the split vector's norm and
/// mean, and the cut identity, over `seeds.max(1)` random triples.
pub fn bipartition_identity(seeds: u64) -> Result<Vec<VerifyEntry>> {
    let mut out = Vec::new();
    for seed in 0..seeds.max(1) {
        let (g, p, prop) = random_triple(seed)?;
        let direct = delta_m_direct(&g, &p, &prop)?;
        let eval = delta_m_decomposed(&g, &p, &prop)?;
        let residual = (direct - eval.delta_m).abs();
        let cut_residual = laplacian_identity_check(&g, &p, &prop)?;
        let norm = eval.f.iter().map(|(_, v)| v * v).sum::<f64>();
        let sum = eval.f.iter().map(|(_, v)| v).sum::<f64>();
        let f_ok = (norm - 1.0).abs() <= 1e-12 && sum.abs() <= 1e-12;
        let tol = IDENTITY_TOLERANCE * direct.abs().max(1.0);
        let passed = residual <= tol && cut_residual <= tol && eval.beta >= 0.0 && f_ok;
        out.push(VerifyEntry {
            claim_id: "bipartition_identity".into(),
            params: json!({ "seed": seed, "nodes": g.node_count(), "edges": g.edge_count(), "n_a": eval.n_a, "n_b": eval.n_b }),
            expected: "delta_M direct = alpha - beta, beta >= 0".into(),
            observed: json!({
                "delta_M_direct": direct,
                "delta_M_decomposed": eval.delta_m,
                "residual": residual,
                "cut_residual": cut_residual,
                "beta": eval.beta,
                "f_norm": norm,
                "f_sum": sum,
                "degenerate": eval.degenerate,
            }),
            passed,
            margin: tol - residual.max(cut_residual),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_tuples_cover_every_order() {
        let tuples = ring_tuples();
        assert_eq!(tuples.len(), 256);
        let mut sorted = tuples.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 256);
    }

    #[test]
    fn identity_suite_passes() {
        let entries = bipartition_identity(50).unwrap();
        assert_eq!(entries.len(), 50);
        assert!(entries.iter().all(|e| e.passed), "{:?}", entries.iter().find(|e| !e.passed));
    }

    #[test]
    fn random_triples_are_reproducible() {
        let (g1, p1, a1) = random_triple(9).unwrap();
        let (g2, p2, a2) = random_triple(9).unwrap();
        assert_eq!(g1.edges(), g2.edges());
        assert_eq!(p1, p2);
        assert_eq!(a1, a2);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::Bias, Suite::Thresholds, Suite::BipartitionIdentity, Suite::All] {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn ndjson_one_line_per_entry() {
        let report = run(Suite::BipartitionIdentity, 3).unwrap();
        let text = report.to_ndjson();
        assert_eq!(text.lines().count(), 3);
        for line in text.lines() {
            let v: Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["claim_id"], "bipartition_identity");
        }
    }
}
