use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use moddens::bipartition::{delta_m_decomposed, delta_m_direct, laplacian_identity_check, BipartitionEval, BipartitionProposal};
use moddens::detector::{detect, DetectorConfig, Init, MoveOrder};
use moddens::generators::{generate, GeneratorMetadata, GeneratorSpec};
use moddens::metrics::{analytic_suite, evaluate, modularity_density_tensor, ratio_grid, AnalyticTable, MetricKind, MetricReport};
use moddens::metrics::threshold::ratio_grid_csv;
use moddens::oracle::{exhaustive_best, DEFAULT_MAX_NODES};
use moddens::report::SCHEMA_VERSION;
use moddens::verify::{self, Suite};
use moddens::{bench, Graph, Partition};

/// Modularity density toolkit: evaluate, generate, search and verify.
#[derive(Parser)]
#[command(name = "moddens", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    M,
    D,
}

impl From<Metric> for MetricKind {
    fn from(m: Metric) -> Self {
        match m {
            Metric::M => MetricKind::M,
            Metric::D => MetricKind::D,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Form {
    Sum,
    Tensor,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Er,
    TwoCommunities,
    Ring,
    TwoCliques,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Bias,
    Thresholds,
    BipartitionIdentity,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Bias => Suite::Bias,
            SuiteArg::Thresholds => Suite::Thresholds,
            SuiteArg::BipartitionIdentity => Suite::BipartitionIdentity,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    NodeId,
    Shuffled,
}

#[derive(Subcommand)]
enum Command {
    /// Score a partition of a graph.
    Metric {
        graph: PathBuf,
        partition: PathBuf,
        #[arg(long, value_enum, default_value = "m")]
        metric: Metric,
        /// `both` cross-checks the summation and tensor forms of M.
        #[arg(long, value_enum, default_value = "sum")]
        form: Form,
    },
    /// Greedy search for a high-scoring partition.
    Detect {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "m")]
        metric: Metric,
        #[arg(long, env = "MODDENS_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_passes: usize,
        /// `singletons`, or a partition file to start from.
        #[arg(long, default_value = "singletons")]
        init: String,
        #[arg(long, value_enum, default_value = "node-id")]
        order: OrderArg,
        /// Where to write the found partition.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Where to write the accepted-step trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sample a synthetic graph with planted communities.
    Generate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Community sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Edge probabilities, one per community or a single shared value.
        #[arg(long, value_delimiter = ',', default_value = "1.0")]
        probs: Vec<f64>,
        /// Bridge count for `two-cliques`.
        #[arg(long, default_value_t = 0)]
        bridges: usize,
        #[arg(long, env = "MODDENS_SEED", default_value_t = 0)]
        seed: u64,
        /// Edge-list output.
        #[arg(long, short)]
        out: PathBuf,
        /// Planted partition output.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Exhaustive optimum over every partition of a small graph.
    Oracle {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "m")]
        metric: Metric,
        #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
        max_nodes: usize,
        /// Where to write the best partition.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Change in M from splitting one cluster, with its decomposition.
    Bipartition {
        graph: PathBuf,
        partition: PathBuf,
        /// Nodes of one side, one label per line.
        proposal: PathBuf,
    },
    /// Numerical checks of the bias, threshold and bi-partition results.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
    /// Evaluation time against edge count on sparse graphs.
    Bench {
        #[arg(long, default_value_t = 1_000_000)]
        edges: usize,
        #[arg(long, default_value_t = 5)]
        steps: usize,
        #[arg(long, env = "MODDENS_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// w_M, w_D and their ratio over a grid of clique sizes, as CSV.
    Threshold {
        #[arg(long, default_value_t = 3)]
        lo: usize,
        #[arg(long, default_value_t = 50)]
        hi: usize,
    },
}

#[derive(Serialize)]
struct MetricOutput {
    schema_version: u32,
    #[serde(flatten)]
    report: MetricReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    tensor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
}

#[derive(Serialize)]
struct DetectOutput {
    schema_version: u32,
    passes: usize,
    steps: usize,
    cluster_count: usize,
    #[serde(flatten)]
    report: MetricReport,
}

#[derive(Serialize)]
struct GenerateOutput {
    #[serde(flatten)]
    metadata: GeneratorMetadata,
    analytic: AnalyticTable,
}

#[derive(Serialize)]
struct BipartitionOutput {
    #[serde(flatten)]
    eval: BipartitionEval,
    delta_m_direct: f64,
    residual: f64,
    cut_identity_residual: f64,
}

fn print_json(value: &impl Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn load_graph(path: &Path) -> Result<Graph> {
    Graph::load(path).with_context(|| format!("reading graph {}", path.display()))
}

fn load_partition(path: &Path, g: &Graph) -> Result<Partition> {
    Partition::load(path, g).with_context(|| format!("reading partition {}", path.display()))
}

/// Ok(false) means a check failed; errors are input problems.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Metric { graph, partition, metric, form } => {
            let g = load_graph(&graph)?;
            let p = load_partition(&partition, &g)?;
            let metric = MetricKind::from(metric);
            if form != Form::Sum && metric != MetricKind::M {
                bail!("the tensor form is defined for M only");
            }
            let report = evaluate(&g, &p, metric)?;
            let tensor = match form {
                Form::Sum => None,
                _ => Some(modularity_density_tensor(&g, &p)?),
            };
            let residual = (form == Form::Both).then(|| (report.value - tensor.unwrap()).abs());
            let ok = residual.is_none_or(|r| r <= 1e-9 * report.value.abs().max(1.0));
            eprintln!("{metric} = {} over {} clusters", report.value, report.clusters.len());
            if let Some(r) = residual {
                eprintln!("sum/tensor residual {r:e}");
            }
            let mut report = report;
            if form == Form::Tensor {
                report.value = tensor.unwrap();
            }
            print_json(&MetricOutput {
                schema_version: SCHEMA_VERSION,
                report,
                tensor: if form == Form::Both { tensor } else { None },
                residual,
            })?;
            Ok(ok)
        }
        Command::Detect { graph, metric, seed, max_passes, init, order, out, trace } => {
            let g = load_graph(&graph)?;
            let init = if init == "singletons" {
                Init::Singletons
            } else {
                Init::Given(load_partition(Path::new(&init), &g)?)
            };
            let cfg = DetectorConfig {
                max_passes,
                seed,
                init,
                move_order: match order {
                    OrderArg::NodeId => MoveOrder::NodeId,
                    OrderArg::Shuffled => MoveOrder::Shuffled,
                },
                objective: metric.into(),
                ..Default::default()
            };
            let found = detect(&g, &cfg)?;
            if let Some(path) = out {
                found.partition.save(&path, &g)?;
            }
            if let Some(path) = trace {
                fs::write(&path, found.trace_csv())?;
            }
            eprintln!(
                "{} = {} with {} clusters after {} passes",
                cfg.objective,
                found.report.value,
                found.partition.cluster_count(),
                found.passes
            );
            print_json(&DetectOutput {
                schema_version: SCHEMA_VERSION,
                passes: found.passes,
                steps: found.trace.len(),
                cluster_count: found.partition.cluster_count(),
                report: found.report,
            })?;
            Ok(true)
        }
        Command::Generate { family, sizes, probs, bridges, seed, out, truth } => {
            let probs = if probs.len() == 1 { vec![probs[0]; sizes.len()] } else { probs };
            let spec = match family {
                FamilyArg::Er => GeneratorSpec { sizes, probs, ..GeneratorSpec::er(0, 1.0, seed) },
                FamilyArg::TwoCommunities => GeneratorSpec { sizes, probs, ..GeneratorSpec::two_communities(0, 0, 1.0, 1.0, seed) },
                FamilyArg::Ring => GeneratorSpec::ring(sizes, probs, seed),
                FamilyArg::TwoCliques => GeneratorSpec { sizes, probs, ..GeneratorSpec::two_cliques_w(0, 0, bridges, seed) },
            };
            let lg = generate(&spec)?;
            lg.graph.save(&out)?;
            if let Some(path) = truth {
                lg.truth.save(&path, &lg.graph)?;
            }
            let metadata = lg.metadata();
            eprintln!("{} nodes, {} edges, connected: {}", metadata.node_count, metadata.edge_count, metadata.connected);
            print_json(&GenerateOutput {
                metadata,
                analytic: analytic_suite(&spec)?,
            })?;
            Ok(true)
        }
        Command::Oracle { graph, metric, max_nodes, out } => {
            let g = load_graph(&graph)?;
            let result = exhaustive_best(&g, metric.into(), max_nodes)?;
            if let Some(path) = out {
                result.best().save(&path, &g)?;
            }
            eprintln!(
                "best {} = {} over {} partitions ({} tied)",
                result.metric, result.best_value, result.partitions_evaluated, result.tie_count
            );
            print_json(&result)?;
            Ok(true)
        }
        Command::Bipartition { graph, partition, proposal } => {
            let g = load_graph(&graph)?;
            let p = load_partition(&partition, &g)?;
            let prop = BipartitionProposal::load(&proposal, &g, &p)
                .with_context(|| format!("reading proposal {}", proposal.display()))?;
            let eval = delta_m_decomposed(&g, &p, &prop)?;
            let direct = delta_m_direct(&g, &p, &prop)?;
            let residual = (direct - eval.delta_m).abs();
            let cut = laplacian_identity_check(&g, &p, &prop)?;
            let tol = 1e-9 * direct.abs().max(1.0);
            eprintln!("delta M = {direct} (alpha {}, beta {})", eval.alpha, eval.beta);
            print_json(&BipartitionOutput {
                eval,
                delta_m_direct: direct,
                residual,
                cut_identity_residual: cut,
            })?;
            Ok(residual <= tol && cut <= tol)
        }
        Command::Verify { suite, seeds } => {
            let report = verify::run(suite.into(), seeds)?;
            std::io::stdout().lock().write_all(report.to_ndjson().as_bytes())?;
            let failed: Vec<_> = report.failures().collect();
            eprintln!("{}: {} checks, {} failed", report.suite, report.entries.len(), failed.len());
            for f in &failed {
                eprintln!("  FAIL {} {}", f.claim_id, f.params);
            }
            Ok(failed.is_empty())
        }
        Command::Bench { edges, steps, seed } => {
            let report = bench::run(edges, steps, seed)?;
            for p in &report.points {
                eprintln!("{:>9} edges  sum {:.6}s  tensor {:.6}s", p.edges, p.sum_seconds, p.tensor_seconds);
            }
            eprintln!("log-log slope: sum {:.3}, tensor {:.3}", report.slope_sum, report.slope_tensor);
            print_json(&report)?;
            Ok(true)
        }
        Command::Threshold { lo, hi } => {
            if lo > hi {
                bail!("--lo {lo} exceeds --hi {hi}");
            }
            print!("{}", ratio_grid_csv(&ratio_grid(lo, hi)?));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
