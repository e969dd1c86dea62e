//! Synthetic graphs and update sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::InputGraph;
use crate::maintenance::UpdateOp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    Er,
    Ba,
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "er" => Ok(Model::Er),
            "ba" => Ok(Model::Ba),
            _ => Err(Error::Generation(format!("unknown model {s:?}"))),
        }
    }
}

/// Graph generator parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub model: Model,
    pub n: usize,
    /// Edge count (ER).
    pub m: usize,
    /// Mean degree parameter (BA, and node insertions).
    pub d: usize,
    pub reverse_prob: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn generate(&self) -> Result<Vec<(u32, u32)>> {
        match self.model {
            Model::Er => gen_er(self.n, self.m, self.seed),
            Model::Ba => gen_ba_directed(self.n, self.d, self.reverse_prob, self.seed),
        }
    }
}

/// `m` edges with both endpoints uniform over `0..n`. Self-loops and
/// duplicates are kept.
pub fn gen_er(n: usize, m: usize, seed: u64) -> Result<Vec<(u32, u32)>> {
    if n == 0 || n > u32::MAX as usize / 2 {
        return Err(Error::Generation(format!(
            "ER needs 1 <= n < 2^31, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..m)
        .map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32)))
        .collect())
}

/// Directed preferential attachment.
///
/// Starts from `2d` seed nodes. Each later node links to between 1 and
/// `2d` distinct existing nodes picked proportionally to degree (seed nodes
/// start with weight one). Each edge points from new to old and is flipped
/// with probability `reverse_prob`.
pub fn gen_ba_directed(
    n: usize,
    d: usize,
    reverse_prob: f64,
    seed: u64,
) -> Result<Vec<(u32, u32)>> {
    if d == 0 || n <= 2 * d || n > u32::MAX as usize / 2 {
        return Err(Error::Generation(format!(
            "BA needs n > 2d >= 2, got n={n} d={d}"
        )));
    }
    if !(0.0..=1.0).contains(&reverse_prob) {
        return Err(Error::Generation(format!(
            "reverse probability {reverse_prob} outside [0,1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<u32> = (0..2 * d as u32).collect();
    let mut edges = Vec::with_capacity(n * d);
    let mut picked: Vec<u32> = Vec::with_capacity(2 * d);
    for x in 2 * d as u32..n as u32 {
        let want = rng.gen_range(1..=2 * d);
        picked.clear();
        while picked.len() < want {
            let y = pool[rng.gen_range(0..pool.len())];
            if !picked.contains(&y) {
                picked.push(y);
            }
        }
        for &y in &picked {
            if rng.gen_bool(reverse_prob) {
                edges.push((y, x));
            } else {
                edges.push((x, y));
            }
            pool.push(x);
            pool.push(y);
        }
    }
    Ok(edges)
}

/// Relative weights of the four update kinds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpRatios {
    pub insert_edge: f64,
    pub delete_edge: f64,
    pub insert_node: f64,
    pub delete_node: f64,
}

impl Default for OpRatios {
    fn default() -> Self {
        OpRatios {
            insert_edge: 60.0,
            delete_edge: 15.0,
            insert_node: 20.0,
            delete_node: 5.0,
        }
    }
}

impl OpRatios {
    fn weights(&self) -> [f64; 4] {
        [
            self.insert_edge,
            self.delete_edge,
            self.insert_node,
            self.delete_node,
        ]
    }

    fn validate(&self) -> Result<()> {
        let w = self.weights();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) || w.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Generation(format!("bad op ratios {w:?}")));
        }
        Ok(())
    }
}

impl std::str::FromStr for OpRatios {
    type Err = Error;

    /// Parses `a,b,c,d`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Generation(format!("ratios {s:?}: {e}")))?;
        let [a, b, c, d] = parts[..] else {
            return Err(Error::Generation(format!(
                "ratios {s:?}: expected four values"
            )));
        };
        let r = OpRatios {
            insert_edge: a,
            delete_edge: b,
            insert_node: c,
            delete_node: d,
        };
        r.validate()?;
        Ok(r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpdateConfig {
    pub count: usize,
    pub ratios: OpRatios,
    /// New nodes draw in- and out-degree uniformly from `0..=2d`.
    pub d: usize,
    pub seed: u64,
}

impl Default for UpdateConfig {
    fn default() -> Self {
        UpdateConfig {
            count: 1000,
            ratios: OpRatios::default(),
            d: 2,
            seed: 0,
        }
    }
}

/// Fenwick tree over node weights for preferential sampling.
struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, i: usize, delta: i64) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] = (self.tree[i] as i64 + delta) as u64;
            i += i & i.wrapping_neg();
        }
    }

    fn total(&self) -> u64 {
        let mut i = self.tree.len() - 1;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    /// Smallest index whose prefix sum exceeds `target`.
    fn find(&self, mut target: u64) -> usize {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

/// Shadow of the evolving graph kept by the update generator.
struct Shadow {
    graph: InputGraph,
    edges: Vec<(u32, u32)>,
    edge_pos: FxHashMap<(u32, u32), usize>,
    nodes: Vec<u32>,
    node_pos: Vec<usize>,
    weights: Fenwick,
    next_id: u32,
}

impl Shadow {
    fn new(g: &InputGraph, extra: usize) -> Self {
        let cap = g.id_bound() + extra;
        let mut s = Shadow {
            graph: g.clone(),
            edges: Vec::with_capacity(g.edge_count()),
            edge_pos: FxHashMap::default(),
            nodes: Vec::with_capacity(g.node_count()),
            node_pos: vec![usize::MAX; cap],
            weights: Fenwick::new(cap),
            next_id: g.id_bound() as u32,
        };
        for u in g.nodes() {
            s.node_pos[u as usize] = s.nodes.len();
            s.nodes.push(u);
            s.weights
                .add(u as usize, 1 + (g.out(u).len() + g.inn(u).len()) as i64);
        }
        for e in g.edges() {
            s.edge_pos.insert(e, s.edges.len());
            s.edges.push(e);
        }
        s
    }

    fn preferential(&self, rng: &mut ChaCha8Rng) -> u32 {
        let t = rng.gen_range(0..self.weights.total());
        self.weights.find(t) as u32
    }

    fn add_edge(&mut self, u: u32, v: u32) {
        self.graph.add_edge(u, v).expect("shadow nodes exist");
        self.edge_pos.insert((u, v), self.edges.len());
        self.edges.push((u, v));
        self.weights.add(u as usize, 1);
        self.weights.add(v as usize, 1);
    }

    fn remove_edge(&mut self, u: u32, v: u32) {
        self.graph.remove_edge(u, v).expect("shadow edge exists");
        let at = self.edge_pos.remove(&(u, v)).expect("indexed edge");
        self.edges.swap_remove(at);
        if at < self.edges.len() {
            self.edge_pos.insert(self.edges[at], at);
        }
        self.weights.add(u as usize, -1);
        self.weights.add(v as usize, -1);
    }

    fn add_node(&mut self, u: u32) {
        self.graph.add_node(u).expect("fresh id");
        self.node_pos[u as usize] = self.nodes.len();
        self.nodes.push(u);
        self.weights.add(u as usize, 1);
    }

    fn remove_node(&mut self, u: u32) {
        let outs = self.graph.out(u).to_vec();
        for v in outs {
            self.remove_edge(u, v);
        }
        let ins = self.graph.inn(u).to_vec();
        for w in ins {
            self.remove_edge(w, u);
        }
        self.graph.remove_node(u).expect("live node");
        let at = self.node_pos[u as usize];
        self.nodes.swap_remove(at);
        if at < self.nodes.len() {
            self.node_pos[self.nodes[at] as usize] = at;
        }
        self.node_pos[u as usize] = usize::MAX;
        self.weights.add(u as usize, -1);
    }

    /// Up to `want` distinct nodes drawn by weight.
    fn distinct_preferential(&self, want: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
        let want = want.min(self.nodes.len());
        let mut out = Vec::with_capacity(want);
        let mut seen = FxHashSet::default();
        let mut attempts = 0;
        while out.len() < want && attempts < 64 * (want + 1) {
            attempts += 1;
            let x = self.preferential(rng);
            if seen.insert(x) {
                out.push(x);
            }
        }
        out
    }
}

const MAX_ATTEMPTS: usize = 64;

/// Generates `cfg.count` valid updates against `g`.
///
/// Edge insertions pick a uniform source and a degree-proportional target.
/// Deletions are uniform over current edges or nodes. New nodes take fresh
/// ids above every id in use. A kind that cannot be applied is replaced by
/// one of the remaining kinds.
pub fn gen_updates(g: &InputGraph, cfg: &UpdateConfig) -> Result<Vec<UpdateOp>> {
    cfg.ratios.validate()?;
    if g.node_count() == 0 {
        return Err(Error::Generation(
            "update generation needs a non-empty graph".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut shadow = Shadow::new(g, cfg.count);
    let mut ops = Vec::with_capacity(cfg.count);
    let weights = cfg.ratios.weights();
    for _ in 0..cfg.count {
        let mut allowed = [true; 4];
        loop {
            let total: f64 = (0..4).filter(|&i| allowed[i]).map(|i| weights[i]).sum();
            if total <= 0.0 {
                return Err(Error::Generation(format!(
                    "no applicable update kind after {} ops",
                    ops.len()
                )));
            }
            let mut pick = rng.gen::<f64>() * total;
            let mut kind = 3;
            for i in 0..4 {
                if !allowed[i] || weights[i] <= 0.0 {
                    continue;
                }
                if pick < weights[i] {
                    kind = i;
                    break;
                }
                pick -= weights[i];
                kind = i;
            }
            match try_op(kind, &mut shadow, cfg.d, &mut rng) {
                Some(op) => {
                    ops.push(op);
                    break;
                }
                None => allowed[kind] = false,
            }
        }
    }
    Ok(ops)
}

fn try_op(kind: usize, s: &mut Shadow, d: usize, rng: &mut ChaCha8Rng) -> Option<UpdateOp> {
    match kind {
        0 => {
            if s.nodes.len() < 2 {
                return None;
            }
            for _ in 0..MAX_ATTEMPTS {
                let u = s.nodes[rng.gen_range(0..s.nodes.len())];
                let v = s.preferential(rng);
                if u != v && !s.graph.has_edge(u, v) {
                    s.add_edge(u, v);
                    return Some(UpdateOp::InsertEdge(u, v));
                }
            }
            None
        }
        1 => {
            if s.edges.is_empty() {
                return None;
            }
            let (u, v) = s.edges[rng.gen_range(0..s.edges.len())];
            s.remove_edge(u, v);
            Some(UpdateOp::DeleteEdge(u, v))
        }
        2 => {
            let u = s.next_id;
            if u as usize >= s.node_pos.len() {
                return None;
            }
            let out_deg = rng.gen_range(0..=2 * d);
            let in_deg = rng.gen_range(0..=2 * d);
            let outs = s.distinct_preferential(out_deg, rng);
            let ins = s.distinct_preferential(in_deg, rng);
            s.next_id += 1;
            s.add_node(u);
            for &w in &outs {
                s.add_edge(u, w);
            }
            for &w in &ins {
                s.add_edge(w, u);
            }
            Some(UpdateOp::InsertNode { u, outs, ins })
        }
        _ => {
            if s.nodes.len() < 2 {
                return None;
            }
            let u = s.nodes[rng.gen_range(0..s.nodes.len())];
            s.remove_node(u);
            Some(UpdateOp::DeleteNode(u))
        }
    }
}
