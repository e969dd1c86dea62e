use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dagger::bench::{run_bench, BenchConfig, Variant};
use dagger::formats::{read_graph, read_workload, write_graph, write_workload};
use dagger::workload::{gen_updates, GenConfig, Model, OpRatios, UpdateConfig};
use dagger::{DaggerIndex, Error, IndexConfig, InputGraph};

#[derive(Parser)]
#[command(name = "dagger", version, about = "Dynamic reachability index tools")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic graph file.
    GenGraph(GenGraph),
    /// Generate an update workload for a graph file.
    GenUpdates(GenUpdates),
    /// Build an index and print a summary.
    Build(Build),
    /// Answer one reachability query.
    Query(Query),
    /// Replay a workload with interleaved queries and report timings.
    Bench(Bench),
}

#[derive(Args)]
struct GenGraph {
    #[arg(long, default_value = "er")]
    model: Model,
    #[arg(long)]
    n: usize,
    /// Edge count (ER).
    #[arg(long, default_value_t = 0)]
    m: usize,
    /// Degree parameter (BA).
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 0.5)]
    reverse_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenUpdates {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Weights for edge insert, edge delete, node insert, node delete.
    #[arg(long, default_value = "60,15,20,5")]
    ratios: OpRatios,
    /// Inserted nodes draw in- and out-degree from 0..=2d.
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IndexArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Label dimensions.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Build {
    #[command(flatten)]
    index: IndexArgs,
}

#[derive(Args)]
struct Query {
    #[command(flatten)]
    index: IndexArgs,
    /// Apply this workload before answering.
    #[arg(long)]
    workload: Option<PathBuf>,
    #[arg(long, num_args = 2, value_names = ["U", "V"], required = true)]
    pair: Vec<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct Bench {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    workload: PathBuf,
    /// dfs, dgK or daggerK.
    #[arg(long, default_value = "dg1")]
    variant: Variant,
    #[arg(long, default_value_t = 1)]
    qpu: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    warmup: usize,
    /// Dataset name for the report; defaults to the graph file stem.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    report: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// An error plus the file it concerns, if any.
struct Failure {
    path: Option<PathBuf>,
    err: Error,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure { path: None, err }
    }
}

fn at(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |err| Failure {
        path: Some(path.to_path_buf()),
        err,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| at(p)(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn open_index(a: &IndexArgs) -> Result<DaggerIndex, Failure> {
    let g = read_graph(&a.graph).map_err(at(&a.graph))?;
    DaggerIndex::build(g.n, &g.edges, IndexConfig::new(a.k, a.seed)).map_err(at(&a.graph))
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::GenGraph(a) => {
            let cfg = GenConfig {
                model: a.model,
                n: a.n,
                m: a.m,
                d: a.d,
                reverse_prob: a.reverse_prob,
                seed: a.seed,
            };
            emit(a.out.as_deref(), &write_graph(a.n, &cfg.generate()?))
        }
        Cmd::GenUpdates(a) => {
            let g = read_graph(&a.graph).map_err(at(&a.graph))?;
            let g = InputGraph::from_edges(g.n, &g.edges).map_err(at(&a.graph))?;
            let cfg = UpdateConfig {
                count: a.count,
                ratios: a.ratios,
                d: a.d,
                seed: a.seed,
            };
            emit(a.out.as_deref(), &write_workload(&gen_updates(&g, &cfg)?))
        }
        Cmd::Build(a) => {
            let started = Instant::now();
            let mut idx = open_index(&a.index)?;
            let ms = started.elapsed().as_secs_f64() * 1e3;
            idx.validate()?;
            let part = idx.partition();
            let largest = part.iter().map(Vec::len).max().unwrap_or(0);
            let g = idx.graph();
            println!("nodes {}", g.input().node_count());
            println!("edges {}", g.input().edge_count());
            println!("dag_nodes {}", g.dag_node_count());
            println!("components {}", part.iter().filter(|c| c.len() > 1).count());
            println!("largest_component {largest}");
            println!("build_ms {ms:.3}");
            Ok(())
        }
        Cmd::Query(a) => {
            let mut idx = open_index(&a.index)?;
            if let Some(w) = &a.workload {
                for (i, op) in read_workload(w).map_err(at(w))?.iter().enumerate() {
                    idx.apply(op).map_err(|e| {
                        at(w)(Error::Op {
                            index: i,
                            source: Box::new(e),
                        })
                    })?;
                }
            }
            println!("{}", idx.reachable(a.pair[0], a.pair[1])?);
            Ok(())
        }
        Cmd::Bench(a) => {
            let g = read_graph(&a.graph).map_err(at(&a.graph))?;
            let ops = read_workload(&a.workload).map_err(at(&a.workload))?;
            let dataset = a.dataset.clone().unwrap_or_else(|| {
                a.graph
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            });
            let cfg = BenchConfig {
                variant: a.variant,
                qpu: a.qpu,
                seed: a.seed,
                warmup: a.warmup,
            };
            let report = run_bench(&dataset, g.n, &g.edges, &ops, &cfg).map_err(at(&a.workload))?;
            let text = match a.report {
                ReportFormat::Json => report.to_json() + "\n",
                ReportFormat::Csv => report.to_csv()?,
            };
            emit(a.out.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { path, err }) => {
            match path {
                Some(p) => eprintln!("error: {}: {err}", p.display()),
                None => eprintln!("error: {err}"),
            }
            ExitCode::from(if err.is_input() { 1 } else { 2 })
        }
    }
}
