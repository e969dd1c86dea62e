//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use dagger::{DaggerIndex, IndexConfig, NodeRef, TraversalOrder};

/// Node names of the running example, indexed by id.
#[rustfmt::skip]
pub const NAMES: [&str; 19] = [
    "A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L", "M", "N", "O", "P", "R", "S", "T",
];

pub fn id(name: &str) -> u32 {
    NAMES
        .iter()
        .position(|&n| n == name)
        .unwrap_or_else(|| panic!("no node {name}")) as u32
}

#[rustfmt::skip]
const EDGES: [(&str, &str); 28] = [
    ("R", "A"), ("R", "D"), ("R", "E"), ("A", "B"), ("B", "C"), ("C", "A"), ("D", "E"),
    ("F", "D"), ("D", "G"), ("E", "F"), ("G", "F"), ("B", "H"), ("C", "I"), ("G", "J"),
    ("D", "H"), ("H", "L"), ("J", "K"), ("L", "M"), ("K", "N"), ("I", "O"), ("L", "P"),
    ("N", "T"), ("O", "T"), ("P", "T"), ("T", "S"), ("S", "N"), ("S", "O"), ("S", "P"),
];

/// Edges of the running example. Listed in reverse so that adjacency order
/// matches the traversal order of the worked example.
pub fn example_edges() -> Vec<(u32, u32)> {
    EDGES.iter().rev().map(|&(a, b)| (id(a), id(b))).collect()
}

/// Horizontal drawing position of each DAG node of the example.
fn x_position(index: &mut DaggerIndex, x: NodeRef) -> i64 {
    let named = |idx: &mut DaggerIndex, n: &str| idx.find_scc(id(n)).unwrap();
    #[rustfmt::skip]
    let table = [("R", 1), ("A", 0), ("D", 2), ("H", 0), ("I", 1), ("J", 2), ("K", 0), ("L", 2), ("N", 1), ("M", 2)];
    for (n, pos) in table {
        if named(index, n) == x {
            return pos;
        }
    }
    0
}

/// One-dimensional index over the example, labeled right to left.
pub fn example_index() -> DaggerIndex {
    example_index_dirs(&[-1])
}

/// Index over the example with one dimension per entry of `dirs`: `1`
/// traverses left to right, `-1` right to left.
pub fn example_index_dirs(dirs: &[i64]) -> DaggerIndex {
    let edges = example_edges();
    let mut probe = DaggerIndex::build(NAMES.len(), &edges, IndexConfig::new(0, 0)).unwrap();
    let mut keys: BTreeMap<NodeRef, i64> = BTreeMap::new();
    for x in probe.graph().dag_nodes() {
        let pos = x_position(&mut probe, x);
        keys.insert(x, pos);
    }
    let dirs = dirs.to_vec();
    let k = dirs.len();
    let order = TraversalOrder::Keyed(Arc::new(move |dim, x| {
        dirs[dim] * keys.get(&x).copied().unwrap_or(0)
    }));
    DaggerIndex::build(
        NAMES.len(),
        &edges,
        IndexConfig::new(k, 0).with_order(order),
    )
    .unwrap()
}

/// Interval of the component holding `name`, dimension `dim`.
pub fn interval(index: &mut DaggerIndex, name: &str, dim: usize) -> (u64, u64) {
    let s = index.find_scc(id(name)).unwrap();
    let l = index.label(s).unwrap().dims[dim];
    (l.b, l.e)
}

/// Adjacency built from a plain edge list.
pub struct Oracle {
    pub n: usize,
    pub alive: Vec<bool>,
    pub out: Vec<Vec<u32>>,
}

impl Oracle {
    pub fn new(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut o = Oracle {
            n,
            alive: vec![true; n],
            out: vec![Vec::new(); n],
        };
        for &(u, v) in edges {
            o.add(u, v);
        }
        o
    }

    pub fn add_node(&mut self, u: u32) {
        let u = u as usize;
        if u >= self.n {
            self.n = u + 1;
            self.alive.resize(self.n, false);
            self.out.resize(self.n, Vec::new());
        }
        self.alive[u] = true;
    }

    pub fn remove_node(&mut self, u: u32) {
        self.alive[u as usize] = false;
        self.out[u as usize].clear();
        for list in &mut self.out {
            list.retain(|&w| w != u);
        }
    }

    pub fn add(&mut self, u: u32, v: u32) {
        if !self.out[u as usize].contains(&v) {
            self.out[u as usize].push(v);
        }
    }

    pub fn remove(&mut self, u: u32, v: u32) {
        self.out[u as usize].retain(|&w| w != v);
    }

    pub fn nodes(&self) -> Vec<u32> {
        (0..self.n as u32)
            .filter(|&u| self.alive[u as usize])
            .collect()
    }

    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (u, list) in self.out.iter().enumerate() {
            out.extend(list.iter().map(|&v| (u as u32, v)));
        }
        out
    }

    /// Breadth-first reachability.
    pub fn reaches(&self, u: u32, v: u32) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([u]);
        seen[u as usize] = true;
        while let Some(x) = queue.pop_front() {
            if x == v {
                return true;
            }
            for &y in &self.out[x as usize] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    queue.push_back(y);
                }
            }
        }
        false
    }

    /// SCC partition via petgraph, in the same canonical form as
    /// `DaggerIndex::partition`.
    pub fn partition(&self) -> Vec<Vec<u32>> {
        let mut g = petgraph::graph::DiGraph::<u32, ()>::new();
        let mut idx = vec![None; self.n];
        for u in self.nodes() {
            idx[u as usize] = Some(g.add_node(u));
        }
        for u in self.nodes() {
            for &v in &self.out[u as usize] {
                g.add_edge(idx[u as usize].unwrap(), idx[v as usize].unwrap(), ());
            }
        }
        let mut classes: Vec<Vec<u32>> = petgraph::algo::tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut c: Vec<u32> = c.into_iter().map(|i| g[i]).collect();
                c.sort_unstable();
                c
            })
            .collect();
        classes.sort_unstable_by_key(|c| c[0]);
        classes
    }
}

/// Transitive closure of the current DAG as bitsets, one per DAG node.
pub fn dag_closure(index: &DaggerIndex) -> BTreeMap<NodeRef, Vec<u64>> {
    let g = index.graph();
    let nodes = g.dag_nodes();
    let pos: BTreeMap<NodeRef, usize> = nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let words = nodes.len().div_ceil(64);
    let mut closure: BTreeMap<NodeRef, Vec<u64>> = BTreeMap::new();
    // memoized DFS; the DAG is small
    fn visit(
        x: NodeRef,
        index: &DaggerIndex,
        pos: &BTreeMap<NodeRef, usize>,
        words: usize,
        closure: &mut BTreeMap<NodeRef, Vec<u64>>,
    ) {
        if closure.contains_key(&x) {
            return;
        }
        let mut bits = vec![0u64; words];
        let i = pos[&x];
        bits[i / 64] |= 1 << (i % 64);
        for c in index.graph().dag_children(x).unwrap() {
            visit(c, index, pos, words, closure);
            for (b, cb) in bits.iter_mut().zip(&closure[&c]) {
                *b |= cb;
            }
        }
        closure.insert(x, bits);
    }
    for &x in &nodes {
        visit(x, index, &pos, words, &mut closure);
    }
    closure
}

/// Every reachable DAG pair has containing labels.
pub fn check_no_false_negatives(index: &DaggerIndex) -> Result<(), String> {
    if index.k() == 0 {
        return Ok(());
    }
    let nodes = index.graph().dag_nodes();
    let closure = dag_closure(index);
    for &s in &nodes {
        let ls = index.label(s).unwrap();
        for (j, &t) in nodes.iter().enumerate() {
            if closure[&s][j / 64] >> (j % 64) & 1 == 1 {
                let lt = index.label(t).unwrap();
                if !ls.subsumes(&lt).unwrap() {
                    return Err(format!("{s} reaches {t} but {ls} does not contain {lt}"));
                }
            }
        }
    }
    Ok(())
}

/// Applies `op` to the oracle.
pub fn oracle_apply(o: &mut Oracle, op: &dagger::UpdateOp) {
    use dagger::UpdateOp::*;
    match op {
        InsertEdge(u, v) => o.add(*u, *v),
        DeleteEdge(u, v) => o.remove(*u, *v),
        InsertNode { u, outs, ins } => {
            o.add_node(*u);
            for &w in outs {
                o.add(*u, w);
            }
            for &w in ins {
                o.add(w, *u);
            }
        }
        DeleteNode(u) => o.remove_node(*u),
        Query(..) => {}
    }
}

/// Cancels each edge op against the latest surviving op on the same edge
/// when their kinds differ. Quadratic on purpose.
pub fn prune_pairs(ops: &[dagger::UpdateOp]) -> Vec<dagger::UpdateOp> {
    use dagger::UpdateOp::*;
    let key = |op: &dagger::UpdateOp| match *op {
        InsertEdge(u, v) => (true, u, v),
        DeleteEdge(u, v) => (false, u, v),
        _ => panic!("edge ops only"),
    };
    let mut alive = vec![true; ops.len()];
    for i in 0..ops.len() {
        let (ins, u, v) = key(&ops[i]);
        let last = (0..i)
            .rev()
            .find(|&j| alive[j] && key(&ops[j]).1 == u && key(&ops[j]).2 == v);
        if let Some(j) = last {
            if key(&ops[j]).0 != ins {
                alive[i] = false;
                alive[j] = false;
            }
        }
    }
    ops.iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|(op, _)| op.clone())
        .collect()
}
