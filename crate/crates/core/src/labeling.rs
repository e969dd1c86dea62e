//! k-dimensional interval labels on DAG nodes.
//!
//! Each dimension is a min-post labeling produced by a randomized post-order
//! traversal. A node's interval `[b, e]` contains the interval of every node
//! it reaches, so a failed containment test proves non-reachability.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DaggerGraph, NodeRef};
use crate::index::DaggerIndex;
use crate::scratch::Stamps;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub b: u64,
    pub e: u64,
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.b, self.e)
    }
}

/// One interval per dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Label {
    pub dims: Vec<Interval>,
}

impl Label {
    pub fn new(dims: Vec<Interval>) -> Self {
        Label { dims }
    }

    pub fn k(&self) -> usize {
        self.dims.len()
    }

    /// True if every interval of `inner` lies within the matching interval
    /// of `self`. A label with no dimensions subsumes everything.
    pub fn subsumes(&self, inner: &Label) -> Result<bool> {
        if self.k() != inner.k() {
            return Err(Error::Logic(format!(
                "label dimension mismatch: {} vs {}",
                self.k(),
                inner.k()
            )));
        }
        Ok(self
            .dims
            .iter()
            .zip(&inner.dims)
            .all(|(o, i)| o.b <= i.b && i.e <= o.e))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str(")")
    }
}

/// Child and root ordering used by labeling traversals.
#[derive(Clone, Default)]
pub enum TraversalOrder {
    /// Independent random shuffle per dimension.
    #[default]
    Shuffled,
    /// Stored adjacency order, roots by id.
    Stored,
    /// Ascending key per dimension, ties by id.
    Keyed(Arc<dyn Fn(usize, NodeRef) -> i64 + Send + Sync>),
}

impl fmt::Debug for TraversalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraversalOrder::Shuffled => f.write_str("Shuffled"),
            TraversalOrder::Stored => f.write_str("Stored"),
            TraversalOrder::Keyed(_) => f.write_str("Keyed(..)"),
        }
    }
}

impl TraversalOrder {
    fn arrange(&self, dim: usize, nodes: &mut [NodeRef], rng: &mut ChaCha8Rng) {
        match self {
            TraversalOrder::Shuffled => nodes.shuffle(rng),
            TraversalOrder::Stored => {}
            TraversalOrder::Keyed(key) => nodes.sort_by_key(|&x| (key(dim, x), x)),
        }
    }
}

/// One generator per dimension, all derived from `seed`.
pub(crate) fn dimension_rngs(k: usize, seed: u64) -> Vec<ChaCha8Rng> {
    (0..k)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            rng
        })
        .collect()
}

/// Flat label storage: `2k` words per node slot.
#[derive(Clone, Debug, Default)]
pub(crate) struct LabelStore {
    k: usize,
    inputs: Vec<u64>,
    sccs: Vec<u64>,
    /// Largest end value written so far, per dimension.
    high: Vec<u64>,
}

impl LabelStore {
    pub(crate) fn new(k: usize) -> Self {
        LabelStore {
            k,
            high: vec![0; k],
            ..LabelStore::default()
        }
    }

    pub(crate) fn k(&self) -> usize {
        self.k
    }

    pub(crate) fn fit(&mut self, inputs: usize, sccs: usize) {
        let w = 2 * self.k;
        if self.inputs.len() < inputs * w {
            self.inputs.resize(inputs * w, 0);
        }
        if self.sccs.len() < sccs * w {
            self.sccs.resize(sccs * w, 0);
        }
    }

    #[inline]
    pub(crate) fn get(&self, x: NodeRef) -> &[u64] {
        let w = 2 * self.k;
        let at = x.slot() * w;
        if x.is_scc() {
            &self.sccs[at..at + w]
        } else {
            &self.inputs[at..at + w]
        }
    }

    #[inline]
    pub(crate) fn b(&self, x: NodeRef, dim: usize) -> u64 {
        self.get(x)[2 * dim]
    }

    #[inline]
    pub(crate) fn e(&self, x: NodeRef, dim: usize) -> u64 {
        self.get(x)[2 * dim + 1]
    }

    #[inline]
    fn raw_mut(&mut self, x: NodeRef) -> &mut [u64] {
        let w = 2 * self.k;
        let at = x.slot() * w;
        if x.is_scc() {
            &mut self.sccs[at..at + w]
        } else {
            &mut self.inputs[at..at + w]
        }
    }

    #[inline]
    pub(crate) fn set(&mut self, x: NodeRef, dim: usize, b: u64, e: u64) {
        let raw = self.raw_mut(x);
        raw[2 * dim] = b;
        raw[2 * dim + 1] = e;
        if e > self.high[dim] {
            self.high[dim] = e;
        }
    }

    pub(crate) fn copy(&mut self, from: NodeRef, to: NodeRef) {
        let vals = self.get(from).to_vec();
        for dim in 0..self.k {
            self.set(to, dim, vals[2 * dim], vals[2 * dim + 1]);
        }
    }

    pub(crate) fn high(&self, dim: usize) -> u64 {
        self.high[dim]
    }

    /// `x` subsumes `y` in every dimension.
    #[inline]
    pub(crate) fn covers(&self, x: NodeRef, y: NodeRef) -> bool {
        let (a, c) = (self.get(x), self.get(y));
        a.chunks_exact(2)
            .zip(c.chunks_exact(2))
            .all(|(o, i)| o[0] <= i[0] && i[1] <= o[1])
    }

    /// `x` may be a parent of `y`: containment with room for `y`'s end.
    #[inline]
    pub(crate) fn bounds_child(&self, x: NodeRef, y: NodeRef) -> bool {
        let (a, c) = (self.get(x), self.get(y));
        a.chunks_exact(2)
            .zip(c.chunks_exact(2))
            .all(|(o, i)| o[0] <= i[0] && i[1] < o[1])
    }

    pub(crate) fn label(&self, x: NodeRef) -> Label {
        Label::new(
            self.get(x)
                .chunks_exact(2)
                .map(|p| Interval { b: p[0], e: p[1] })
                .collect(),
        )
    }

    pub(crate) fn reset_high(&mut self) {
        self.high.iter_mut().for_each(|h| *h = 0);
    }
}

/// Post-order traversal state shared by initial labeling and split
/// relabeling.
#[derive(Default)]
pub(crate) struct Traversal {
    /// Node, entry rank, children range start, end, cursor.
    frames: Vec<(NodeRef, u64, usize, usize, usize)>,
    children: Vec<NodeRef>,
}

/// Labels one dimension by post-order from `roots`. Nodes outside `scope`
/// (when given) are not entered but their current labels still bound their
/// parents. `visited` must be fresh; `ctr` is the running rank.
#[allow(clippy::too_many_arguments)]
pub(crate) fn traverse(
    g: &DaggerGraph,
    labels: &mut LabelStore,
    order: &TraversalOrder,
    rng: &mut ChaCha8Rng,
    dim: usize,
    roots: &[NodeRef],
    scope: Option<&Stamps>,
    visited: &mut Stamps,
    ctr: &mut u64,
    t: &mut Traversal,
) -> u64 {
    let mut writes = 0;
    let in_scope = |x: NodeRef| scope.is_none_or(|s| s.contains(x));
    let enter = |x: NodeRef, ctr: u64, t: &mut Traversal, rng: &mut ChaCha8Rng| {
        let start = t.children.len();
        t.children.extend(g.out_edges(x).map(|(c, _)| c));
        order.arrange(dim, &mut t.children[start..], rng);
        t.frames.push((x, ctr, start, t.children.len(), start));
    };
    for &root in roots {
        if !visited.insert(root) {
            continue;
        }
        enter(root, *ctr, t, rng);
        while let Some(&(x, entry, start, end, cursor)) = t.frames.last() {
            if cursor < end {
                t.frames.last_mut().unwrap().4 += 1;
                let c = t.children[cursor];
                if in_scope(c) && visited.insert(c) {
                    enter(c, *ctr, t, rng);
                }
                continue;
            }
            let mut b = entry;
            *ctr += g.size(x) as u64;
            let mut e = *ctr;
            for &c in &t.children[start..end] {
                b = b.min(labels.b(c, dim));
                e = e.max(labels.e(c, dim) + 1);
            }
            labels.set(x, dim, b, e);
            writes += 1;
            t.frames.pop();
            t.children.truncate(start);
        }
    }
    writes
}

/// Up-propagation scratch.
#[derive(Default)]
pub(crate) struct Propagation {
    stack: Vec<NodeRef>,
    heap: BinaryHeap<Reverse<(u64, NodeRef)>>,
    need: FxHashMap<NodeRef, u64>,
}

/// Restores edge-wise containment above `seeds` after their labels grew.
/// Returns the number of label writes. `touched` collects every node whose
/// label changed.
pub(crate) fn propagate_up(
    g: &DaggerGraph,
    labels: &mut LabelStore,
    seeds: &[NodeRef],
    p: &mut Propagation,
    mut touched: Option<&mut Vec<NodeRef>>,
) -> u64 {
    let mut writes = 0;
    for dim in 0..labels.k() {
        // begin values flow down-to-up unconditionally
        p.stack.extend_from_slice(seeds);
        while let Some(x) = p.stack.pop() {
            let bx = labels.b(x, dim);
            for (q, _) in g.in_edges(x) {
                if labels.b(q, dim) > bx {
                    let eq = labels.e(q, dim);
                    labels.set(q, dim, bx, eq);
                    writes += 1;
                    if let Some(t) = touched.as_deref_mut() {
                        t.push(q);
                    }
                    p.stack.push(q);
                }
            }
        }
        // end values: settle ancestors in order of their old end
        p.need.clear();
        for &x in seeds {
            let want = labels.e(x, dim) + 1;
            for (q, _) in g.in_edges(x) {
                let eq = labels.e(q, dim);
                if eq < want {
                    let slot = p.need.entry(q).or_insert(0);
                    *slot = (*slot).max(want);
                    p.heap.push(Reverse((eq, q)));
                }
            }
        }
        while let Some(Reverse((_, x))) = p.heap.pop() {
            let want = p.need.get(&x).copied().unwrap_or(0);
            let ex = labels.e(x, dim);
            if want <= ex {
                continue;
            }
            let bx = labels.b(x, dim);
            labels.set(x, dim, bx, want);
            writes += 1;
            if let Some(t) = touched.as_deref_mut() {
                t.push(x);
            }
            for (q, _) in g.in_edges(x) {
                let eq = labels.e(q, dim);
                if eq < want + 1 {
                    let slot = p.need.entry(q).or_insert(0);
                    *slot = (*slot).max(want + 1);
                    p.heap.push(Reverse((eq, q)));
                }
            }
        }
    }
    writes
}

impl DaggerIndex {
    /// Labels every current DAG node from scratch.
    pub(crate) fn initial_labels(&mut self) {
        let k = self.labels.k();
        self.labels
            .fit(self.graph.input_slots(), self.graph.scc_slots());
        self.labels.reset_high();
        if k == 0 {
            return;
        }
        let nodes = self.graph.dag_nodes();
        let roots: Vec<NodeRef> = nodes
            .iter()
            .copied()
            .filter(|&x| self.graph.in_edges(x).next().is_none())
            .collect();
        for dim in 0..k {
            let mut roots = roots.clone();
            self.order.arrange(dim, &mut roots, &mut self.rngs[dim]);
            self.marks
                .reset(self.graph.input_slots(), self.graph.scc_slots());
            let mut ctr = 0;
            let w = traverse(
                &self.graph,
                &mut self.labels,
                &self.order,
                &mut self.rngs[dim],
                dim,
                &roots,
                None,
                &mut self.marks,
                &mut ctr,
                &mut self.traversal,
            );
            self.stats.label_writes += w;
        }
    }

    /// Relabels every dimension from scratch, discarding accumulated
    /// enlargement.
    pub fn relabel_all(&mut self) {
        self.initial_labels();
    }

    /// Relabels the nodes produced by a split, starting from the old begin
    /// values of the split component, then restores containment above them.
    pub(crate) fn relabel_split(&mut self, clist: &[NodeRef], old: &[u64]) {
        let k = self.labels.k();
        if k == 0 {
            return;
        }
        self.labels
            .fit(self.graph.input_slots(), self.graph.scc_slots());
        let root = *clist.last().expect("non-empty clist");
        let mut roots = Vec::with_capacity(clist.len());
        roots.push(root);
        roots.extend_from_slice(&clist[..clist.len() - 1]);
        for dim in 0..k {
            self.scope
                .reset(self.graph.input_slots(), self.graph.scc_slots());
            for &x in clist {
                self.scope.insert(x);
            }
            self.marks
                .reset(self.graph.input_slots(), self.graph.scc_slots());
            let mut ctr = old[2 * dim];
            let w = traverse(
                &self.graph,
                &mut self.labels,
                &self.order,
                &mut self.rngs[dim],
                dim,
                &roots,
                Some(&self.scope),
                &mut self.marks,
                &mut ctr,
                &mut self.traversal,
            );
            self.stats.label_writes += w;
        }
        self.propagate(clist);
    }

    /// Enlarges `s` to cover `t` and propagates the change upward.
    pub(crate) fn enlarge_to_cover(&mut self, s: NodeRef, t: NodeRef) {
        for dim in 0..self.labels.k() {
            let b = self.labels.b(s, dim).min(self.labels.b(t, dim));
            let e = self.labels.e(s, dim).max(self.labels.e(t, dim) + 1);
            self.labels.set(s, dim, b, e);
            self.stats.label_writes += 1;
        }
        self.propagate(&[s]);
    }

    pub(crate) fn propagate(&mut self, seeds: &[NodeRef]) {
        if self.labels.k() == 0 {
            return;
        }
        let w = propagate_up(
            &self.graph,
            &mut self.labels,
            seeds,
            &mut self.propagation,
            None,
        );
        self.stats.label_writes += w;
    }

    /// Label of a current DAG node.
    pub fn label(&self, x: NodeRef) -> Result<Label> {
        if !self.graph.is_dag_node(x) {
            return Err(match self.graph.kind(x) {
                None => Error::UnknownNode(x.id()),
                Some(_) => Error::Logic(format!("{x} is not a current DAG node")),
            });
        }
        Ok(self.labels.label(x))
    }

    /// Checks edge-wise containment on every DAG edge.
    pub fn check_labels(&self) -> Result<()> {
        if self.labels.k() == 0 {
            return Ok(());
        }
        for s in self.graph.dag_nodes() {
            for dim in 0..self.labels.k() {
                let (b, e) = (self.labels.b(s, dim), self.labels.e(s, dim));
                if b >= e {
                    return Err(Error::Invariant(format!("empty interval at {s}")));
                }
                for (t, _) in self.graph.out_edges(s) {
                    if b > self.labels.b(t, dim) || e < self.labels.e(t, dim) + 1 {
                        return Err(Error::Invariant(format!(
                            "edge ({s},{t}) dim {dim}: {} does not cover {}",
                            self.labels.label(s),
                            self.labels.label(t)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(b: u64, e: u64) -> Interval {
        Interval { b, e }
    }

    #[test]
    fn neither_rectangle_subsumes_the_other() {
        let l1 = Label::new(vec![iv(0, 12), iv(0, 18)]);
        let l2 = Label::new(vec![iv(0, 18), iv(0, 14)]);
        assert!(!l2.subsumes(&l1).unwrap());
        assert!(!l1.subsumes(&l2).unwrap());
        assert!(l1.subsumes(&l1).unwrap());
    }

    #[test]
    fn subsumes_rejects_mismatched_dims() {
        let a = Label::new(vec![iv(0, 1)]);
        let b = Label::new(vec![iv(0, 1), iv(0, 1)]);
        assert!(matches!(a.subsumes(&b), Err(Error::Logic(_))));
        assert!(Label::default().subsumes(&Label::default()).unwrap());
    }

    #[test]
    fn dimension_streams_differ() {
        use rand::Rng;
        let mut rngs = dimension_rngs(2, 9);
        let a: u64 = rngs[0].gen();
        let b: u64 = rngs[1].gen();
        assert_ne!(a, b);
        let again: u64 = dimension_rngs(1, 9)[0].gen();
        assert_eq!(a, again);
    }
}
