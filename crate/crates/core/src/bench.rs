//! Replays update/query workloads against an index variant and times them.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{DfsScratch, InputGraph};
use crate::index::{DaggerIndex, IndexConfig};
use crate::maintenance::UpdateOp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Plain DFS on the input graph; updates only touch adjacency.
    Dfs,
    /// The full index with `k` label dimensions.
    Dagger(usize),
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Dfs => f.write_str("dfs"),
            Variant::Dagger(k) => write!(f, "dg{k}"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    /// Accepts `dfs`, `dgK` or `daggerK`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        if s == "dfs" {
            return Ok(Variant::Dfs);
        }
        let k = s
            .strip_prefix("dagger")
            .or_else(|| s.strip_prefix("dg"))
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k <= 16);
        k.map(Variant::Dagger)
            .ok_or_else(|| Error::parse(0, format!("unknown variant {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub variant: Variant,
    /// Random queries issued after every update.
    pub qpu: usize,
    pub seed: u64,
    /// Leading workload ops executed but left out of the statistics.
    pub warmup: usize,
}

/// One benchmark run. Flat so it maps to a single JSON object or CSV row.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub dataset: String,
    pub variant: String,
    pub seed: u64,
    pub qpu: usize,
    pub executed_ops: usize,
    pub q_count: usize,
    pub q_mean_ms: f64,
    pub ei_count: usize,
    pub ei_mean_ms: f64,
    pub ed_count: usize,
    pub ed_mean_ms: f64,
    pub ni_count: usize,
    pub ni_mean_ms: f64,
    pub nd_count: usize,
    pub nd_mean_ms: f64,
    /// Index construction, not part of `total_s`.
    pub build_ms: f64,
    /// Sum of all measured op times.
    pub total_s: f64,
    pub positive_answers: usize,
    /// SHA-256 over the sequence of query answers.
    pub answers_digest: String,
}

/// Fields that depend on the clock.
pub const TIMING_FIELDS: [&str; 7] = [
    "q_mean_ms",
    "ei_mean_ms",
    "ed_mean_ms",
    "ni_mean_ms",
    "nd_mean_ms",
    "build_ms",
    "total_s",
];

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Header plus one row.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(self).map_err(|e| Error::Logic(e.to_string()))?;
        let bytes = w.into_inner().map_err(|e| Error::Logic(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    /// Total time in milliseconds.
    pub fn total_ms(&self) -> f64 {
        self.total_s * 1e3
    }
}

#[derive(Clone, Copy, Default)]
struct Acc {
    count: usize,
    total_ms: f64,
}

impl Acc {
    fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.total_ms / self.count as f64
        }
    }
}

enum Engine {
    Dfs(InputGraph, DfsScratch),
    Dagger(Box<DaggerIndex>),
}

impl Engine {
    fn apply(&mut self, op: &UpdateOp) -> Result<Option<bool>> {
        match self {
            Engine::Dagger(index) => index.apply(op),
            Engine::Dfs(g, scratch) => match op {
                UpdateOp::InsertEdge(u, v) => g.add_edge(*u, *v).map(|_| None),
                UpdateOp::DeleteEdge(u, v) => g.remove_edge(*u, *v).map(|_| None),
                UpdateOp::DeleteNode(u) => g.remove_node(*u).map(|_| None),
                UpdateOp::InsertNode { u, outs, ins } => {
                    for &w in outs.iter().chain(ins) {
                        if w != *u {
                            g.check(w)?;
                        }
                    }
                    g.add_node(*u)?;
                    for &w in outs {
                        g.add_edge(*u, w)?;
                    }
                    for &w in ins {
                        g.add_edge(w, *u)?;
                    }
                    Ok(None)
                }
                UpdateOp::Query(u, v) => g.dfs(*u, *v, scratch).map(|r| Some(r.0)),
            },
        }
    }
}

/// Live node ids, for drawing query endpoints uniformly.
struct NodePool {
    nodes: Vec<u32>,
    pos: Vec<usize>,
}

impl NodePool {
    fn new(n: usize) -> Self {
        NodePool {
            nodes: (0..n as u32).collect(),
            pos: (0..n).collect(),
        }
    }

    fn add(&mut self, u: u32) {
        if self.pos.len() <= u as usize {
            self.pos.resize(u as usize + 1, usize::MAX);
        }
        self.pos[u as usize] = self.nodes.len();
        self.nodes.push(u);
    }

    fn remove(&mut self, u: u32) {
        let at = self.pos[u as usize];
        self.nodes.swap_remove(at);
        if at < self.nodes.len() {
            self.pos[self.nodes[at] as usize] = at;
        }
        self.pos[u as usize] = usize::MAX;
    }
}

/// Builds the variant over `0..n` and replays `workload`, issuing
/// `cfg.qpu` random queries after every update. Endpoints are uniform over
/// the current nodes.
pub fn run_bench(
    dataset: &str,
    n: usize,
    edges: &[(u32, u32)],
    workload: &[UpdateOp],
    cfg: &BenchConfig,
) -> Result<BenchReport> {
    replay(dataset, n, edges, workload, cfg).map(|(report, _)| report)
}

/// Total measured seconds for every `qpu` in `1..=max_q`.
///
/// Runs the workload `repeats` times at `qpu = max_q` and times the `j`-th
/// query after each update separately. The queries at `qpu = q` are exactly
/// slots `0..q`, so each total is the update time plus a prefix of the slot
/// times. Every component keeps its minimum over the repeats.
pub fn qpu_sweep(
    n: usize,
    edges: &[(u32, u32)],
    workload: &[UpdateOp],
    variant: Variant,
    max_q: usize,
    seed: u64,
    repeats: usize,
) -> Result<Vec<f64>> {
    let cfg = BenchConfig {
        variant,
        qpu: max_q,
        seed,
        warmup: 0,
    };
    let mut base = f64::INFINITY;
    let mut slots = vec![f64::INFINITY; max_q];
    for _ in 0..repeats.max(1) {
        let (report, by_slot) = replay("sweep", n, edges, workload, &cfg)?;
        base = base.min(report.total_s - by_slot.iter().sum::<f64>());
        for (best, s) in slots.iter_mut().zip(by_slot) {
            *best = best.min(s);
        }
    }
    Ok(slots
        .iter()
        .scan(base, |acc, s| {
            *acc += s;
            Some(*acc)
        })
        .collect())
}

/// Like [`run_bench`], plus the seconds spent in each query slot.
fn replay(
    dataset: &str,
    n: usize,
    edges: &[(u32, u32)],
    workload: &[UpdateOp],
    cfg: &BenchConfig,
) -> Result<(BenchReport, Vec<f64>)> {
    let started = Instant::now();
    let mut engine = match cfg.variant {
        Variant::Dfs => Engine::Dfs(InputGraph::from_edges(n, edges)?, DfsScratch::default()),
        Variant::Dagger(k) => Engine::Dagger(Box::new(DaggerIndex::build(
            n,
            edges,
            IndexConfig::new(k, cfg.seed),
        )?)),
    };
    let build_ms = started.elapsed().as_secs_f64() * 1e3;

    let mut pool = NodePool::new(n);
    let mut acc = [Acc::default(); 5];
    let slot = |op: &UpdateOp| match op {
        UpdateOp::Query(..) => 0,
        UpdateOp::InsertEdge(..) => 1,
        UpdateOp::DeleteEdge(..) => 2,
        UpdateOp::InsertNode { .. } => 3,
        UpdateOp::DeleteNode(_) => 4,
    };
    let mut by_slot = vec![0.0; cfg.qpu];
    let mut hasher = Sha256::new();
    let mut positives = 0;
    let mut record = |answer: bool, hasher: &mut Sha256| {
        hasher.update([answer as u8]);
        positives += answer as usize;
    };

    for (i, op) in workload.iter().enumerate() {
        let measured = i >= cfg.warmup;
        let t0 = Instant::now();
        let out = engine.apply(op).map_err(|e| Error::Op {
            index: i,
            source: Box::new(e),
        })?;
        let ms = t0.elapsed().as_secs_f64() * 1e3;
        if measured {
            let a = &mut acc[slot(op)];
            a.count += 1;
            a.total_ms += ms;
        }
        match op {
            UpdateOp::Query(..) => record(out.unwrap_or(false), &mut hasher),
            UpdateOp::InsertNode { u, .. } => pool.add(*u),
            UpdateOp::DeleteNode(u) => pool.remove(*u),
            _ => {}
        }
        if !op.is_update() || pool.nodes.is_empty() {
            continue;
        }
        // one stream per update, so a run with more queries per update
        // asks a superset of the questions asked with fewer
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        for slot_s in by_slot.iter_mut() {
            let u = pool.nodes[rng.gen_range(0..pool.nodes.len())];
            let v = pool.nodes[rng.gen_range(0..pool.nodes.len())];
            let q = UpdateOp::Query(u, v);
            let t0 = Instant::now();
            let out = engine.apply(&q).map_err(|e| Error::Op {
                index: i,
                source: Box::new(e),
            })?;
            let ms = t0.elapsed().as_secs_f64() * 1e3;
            if measured {
                acc[0].count += 1;
                acc[0].total_ms += ms;
                *slot_s += ms / 1e3;
            }
            record(out.unwrap_or(false), &mut hasher);
        }
    }

    let total_ms: f64 = acc.iter().map(|a| a.total_ms).sum();
    let report = BenchReport {
        dataset: dataset.to_string(),
        variant: cfg.variant.to_string(),
        seed: cfg.seed,
        qpu: cfg.qpu,
        executed_ops: acc.iter().map(|a| a.count).sum(),
        q_count: acc[0].count,
        q_mean_ms: acc[0].mean(),
        ei_count: acc[1].count,
        ei_mean_ms: acc[1].mean(),
        ed_count: acc[2].count,
        ed_mean_ms: acc[2].mean(),
        ni_count: acc[3].count,
        ni_mean_ms: acc[3].mean(),
        nd_count: acc[4].count,
        nd_mean_ms: acc[4].mean(),
        build_ms,
        total_s: total_ms / 1e3,
        positive_answers: positives,
        answers_digest: hex::encode(hasher.finalize()),
    };
    Ok((report, by_slot))
}
