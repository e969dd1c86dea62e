//! Update operations: edge and node insertion/deletion, and batches.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeRef;
use crate::index::DaggerIndex;
use crate::scc;

/// One line of a workload: an update or a query.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UpdateOp {
    InsertEdge(u32, u32),
    DeleteEdge(u32, u32),
    InsertNode {
        u: u32,
        outs: Vec<u32>,
        ins: Vec<u32>,
    },
    DeleteNode(u32),
    Query(u32, u32),
}

impl UpdateOp {
    pub fn is_update(&self) -> bool {
        !matches!(self, UpdateOp::Query(..))
    }

    /// Short tag used in reports: `EI`, `ED`, `NI`, `ND` or `Q`.
    pub fn kind(&self) -> &'static str {
        match self {
            UpdateOp::InsertEdge(..) => "EI",
            UpdateOp::DeleteEdge(..) => "ED",
            UpdateOp::InsertNode { .. } => "NI",
            UpdateOp::DeleteNode(_) => "ND",
            UpdateOp::Query(..) => "Q",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    /// The edge was already present.
    Duplicate,
    SameComponent,
    /// An existing DAG edge gained multiplicity.
    ExistingDagEdge,
    NewDagEdge,
    Merged {
        list: Vec<NodeRef>,
        representative: NodeRef,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeleteOutcome {
    SelfLoop,
    /// Source and target still share a component.
    Unchanged,
    Decremented,
    DagEdgeRemoved,
    /// New components in discovery order, then the remnant.
    Split {
        clist: Vec<NodeRef>,
    },
}

/// What [`DaggerIndex::apply_batch`] did.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BatchReport {
    pub submitted: usize,
    /// Ops removed by complementary-pair pruning.
    pub pruned: usize,
    pub applied: usize,
    pub intra_inserts: usize,
    pub inter_deletes: usize,
    pub inter_inserts: usize,
    pub intra_deletes: usize,
    pub merges: usize,
    /// Label recomputations in the shared ancestor pass.
    pub ancestor_touches: usize,
    /// Distinct nodes in the shared ancestor pass.
    pub ancestor_nodes: usize,
}

impl DaggerIndex {
    /// Inserts input edge `(u, v)`.
    pub fn insert_edge(&mut self, u: u32, v: u32) -> Result<InsertOutcome> {
        self.check_input(u)?;
        self.check_input(v)?;
        if !self.graph.input_mut().add_edge(u, v)? {
            return Ok(InsertOutcome::Duplicate);
        }
        if u == v {
            return Ok(InsertOutcome::SameComponent);
        }
        let s = self.graph.find(NodeRef::input(u));
        let t = self.graph.find(NodeRef::input(v));
        if s == t {
            return Ok(InsertOutcome::SameComponent);
        }
        if (s.is_scc() || t.is_scc()) && self.graph.multiplicity(s, t) > 0 {
            self.graph.dag_edge_add(s, t, 1);
            return Ok(InsertOutcome::ExistingDagEdge);
        }
        if !self.dag_reaches(t, s).0 {
            self.graph.dag_edge_add(s, t, 1);
            if self.k() > 0 && !self.labels.bounds_child(s, t) {
                self.enlarge_to_cover(s, t);
            }
            return Ok(InsertOutcome::NewDagEdge);
        }
        let list = self.collect_merge_list(t, s)?;
        let representative = self.graph.merge_components(&list)?;
        self.fit_scratch();
        self.labels.copy(t, representative);
        self.propagate(&[representative]);
        self.stats.merges += 1;
        Ok(InsertOutcome::Merged {
            list,
            representative,
        })
    }

    /// DAG nodes on some path from `t` to `s`: `s` first, then post-order,
    /// `t` last. Children whose label cannot cover `s` are not entered.
    pub fn collect_merge_list(&mut self, t: NodeRef, s: NodeRef) -> Result<Vec<NodeRef>> {
        self.current(t)?;
        self.current(s)?;
        let prune = self.k() > 0;
        let (ni, ns) = (self.graph.input_slots(), self.graph.scc_slots());
        self.marks.reset(ni, ns);
        self.reach.reset(ni, ns);
        let mut list = vec![s];
        let mut children: Vec<NodeRef> = Vec::new();
        let mut frames: Vec<(NodeRef, usize, usize)> = Vec::new();
        self.marks.insert(t);
        self.stats.merge_search_visited += 1;
        children.extend(self.graph.out_edges(t).map(|(c, _)| c));
        frames.push((t, 0, children.len()));
        while let Some(&(x, cursor, end)) = frames.last() {
            if cursor < end {
                frames.last_mut().unwrap().1 += 1;
                let c = children[cursor];
                if c == s {
                    self.reach.insert(x);
                    continue;
                }
                if self.marks.contains(c) {
                    if self.reach.contains(c) {
                        self.reach.insert(x);
                    }
                    continue;
                }
                if prune && !self.labels.covers(c, s) {
                    continue;
                }
                self.marks.insert(c);
                self.stats.merge_search_visited += 1;
                let start = children.len();
                children.extend(self.graph.out_edges(c).map(|(y, _)| y));
                frames.push((c, start, children.len()));
                continue;
            }
            frames.pop();
            if let Some(&(_, _, pend)) = frames.last() {
                children.truncate(pend);
            }
            if self.reach.contains(x) {
                list.push(x);
                if let Some(&(p, _, _)) = frames.last() {
                    self.reach.insert(p);
                }
            }
        }
        if list.last() != Some(&t) || t == s {
            return Err(Error::Logic(format!("{t} does not reach {s}")));
        }
        Ok(list)
    }

    /// Deletes input edge `(u, v)`.
    pub fn delete_edge(&mut self, u: u32, v: u32) -> Result<DeleteOutcome> {
        self.check_input(u)?;
        self.check_input(v)?;
        if !self.graph.input().has_edge(u, v) {
            return Err(Error::MissingEdge(u, v));
        }
        if u == v {
            self.graph.input_mut().remove_edge(u, v)?;
            return Ok(DeleteOutcome::SelfLoop);
        }
        let s = self.graph.find(NodeRef::input(u));
        let t = self.graph.find(NodeRef::input(v));
        let mult = self.graph.multiplicity(s, t);
        self.graph.input_mut().remove_edge(u, v)?;
        if s != t {
            self.graph.dag_edge_sub(s, t, 1);
            return Ok(if mult > 1 {
                DeleteOutcome::Decremented
            } else {
                DeleteOutcome::DagEdgeRemoved
            });
        }
        let comps = self.extract_components(u, v, s)?.0;
        if comps.is_empty() {
            return Ok(DeleteOutcome::Unchanged);
        }
        let old = self.labels.get(s).to_vec();
        let (mut clist, remnant) = self.graph.split_component(s, v, &comps);
        self.fit_scratch();
        clist.push(remnant);
        self.relabel_split(&clist, &old);
        self.stats.splits += 1;
        Ok(DeleteOutcome::Split { clist })
    }

    /// Components of `s` that no longer reach `v` after `(u, v)` was
    /// removed, in discovery order, plus every input node visited.
    ///
    /// Runs a Tarjan search restricted to `s`, starting at `u` and then at
    /// in-`s` parents of each confirmed component. A run stops as soon as it
    /// meets `v` or a node known to reach `v`.
    pub fn extract_components(
        &mut self,
        u: u32,
        v: u32,
        s: NodeRef,
    ) -> Result<(Vec<Vec<u32>>, Vec<u32>)> {
        for x in [u, v] {
            self.check_input(x)?;
            if self.graph.find(NodeRef::input(x)) != s {
                return Err(Error::Logic(format!("{x} is not inside {s}")));
            }
        }
        let (ni, ns) = (self.graph.input_slots(), self.graph.scc_slots());
        self.values.fit(ni, ns);
        // marks: seen, reach: reaches v, scope: assigned to a component
        self.marks.reset(ni, ns);
        self.reach.reset(ni, ns);
        self.scope.reset(ni, ns);
        let mut queue: VecDeque<u32> = VecDeque::from([u]);
        let mut comps: Vec<Vec<u32>> = Vec::new();
        let mut visited: Vec<u32> = Vec::new();
        let mut tstack: Vec<u32> = Vec::new();
        let mut frames: Vec<(u32, usize)> = Vec::new();
        let mut counter = 0u32;

        while let Some(start) = queue.pop_front() {
            if start == v || self.marks.contains(NodeRef::input(start)) {
                continue;
            }
            let mut enter = |x: u32, this: &mut DaggerIndex, tstack: &mut Vec<u32>| {
                this.marks.insert(NodeRef::input(x));
                *this.values.get_mut(NodeRef::input(x)) = (counter, counter);
                counter += 1;
                tstack.push(x);
                visited.push(x);
            };
            enter(start, self, &mut tstack);
            frames.push((start, 0));
            while let Some(&(x, cursor)) = frames.last() {
                let out = self.graph.input().out(x);
                if cursor < out.len() {
                    let y = out[cursor];
                    frames.last_mut().unwrap().1 += 1;
                    let yr = NodeRef::input(y);
                    if y == x {
                        continue;
                    }
                    if y == v || self.reach.contains(yr) {
                        for &z in &tstack {
                            self.reach.insert(NodeRef::input(z));
                        }
                        tstack.clear();
                        frames.clear();
                        break;
                    }
                    if self.marks.contains(yr) {
                        if !self.scope.contains(yr) {
                            let iy = self.values.get(yr).0;
                            let cell = self.values.get_mut(NodeRef::input(x));
                            cell.1 = cell.1.min(iy);
                        }
                        continue;
                    }
                    if self.graph.find(yr) == s {
                        enter(y, self, &mut tstack);
                        frames.push((y, 0));
                    }
                    continue;
                }
                frames.pop();
                let (idx, low) = *self.values.get(NodeRef::input(x));
                if low == idx {
                    let at = tstack.iter().rposition(|&z| z == x).expect("on stack");
                    let comp: Vec<u32> = tstack.drain(at..).collect();
                    for &m in &comp {
                        self.scope.insert(NodeRef::input(m));
                    }
                    for &m in &comp {
                        for i in 0..self.graph.input().inn(m).len() {
                            let w = self.graph.input().inn(m)[i];
                            let wr = NodeRef::input(w);
                            if w != v && !self.marks.contains(wr) && self.graph.find(wr) == s {
                                queue.push_back(w);
                            }
                        }
                    }
                    comps.push(comp);
                } else if let Some(&(p, _)) = frames.last() {
                    let cell = self.values.get_mut(NodeRef::input(p));
                    cell.1 = cell.1.min(low);
                }
            }
        }
        self.stats.extract_visited += visited.len() as u64;
        Ok((comps, visited))
    }

    /// Inserts a fresh node with the given out- and in-neighbors.
    pub fn insert_node(&mut self, u: u32, outs: &[u32], ins: &[u32]) -> Result<()> {
        self.graph.input().check_new(u)?;
        for &w in outs.iter().chain(ins) {
            if w != u {
                self.check_input(w)?;
            }
        }
        self.graph.add_input_node(u)?;
        self.fit_scratch();
        let ur = NodeRef::input(u);
        let mut targets: Vec<NodeRef> = Vec::with_capacity(outs.len());
        for &w in outs {
            if !self.graph.input_mut().add_edge(u, w)? || w == u {
                continue;
            }
            let cw = self.graph.find(NodeRef::input(w));
            self.graph.dag_edge_add(ur, cw, 1);
            targets.push(cw);
        }
        for dim in 0..self.k() {
            let (b, e) = if targets.is_empty() {
                let h = self.labels.high(dim);
                (h, h + 1)
            } else {
                let b = targets
                    .iter()
                    .map(|&c| self.labels.b(c, dim))
                    .min()
                    .unwrap();
                let e = targets
                    .iter()
                    .map(|&c| self.labels.e(c, dim))
                    .max()
                    .unwrap();
                (b, e + 1)
            };
            self.labels.set(ur, dim, b, e);
            self.stats.label_writes += 1;
        }
        for &w in ins {
            self.insert_edge(w, u)?;
        }
        Ok(())
    }

    /// Removes node `u`: outgoing edges through [`Self::delete_edge`],
    /// incoming edges by bookkeeping only.
    pub fn delete_node(&mut self, u: u32) -> Result<()> {
        self.check_input(u)?;
        while let Some(&w) = self.graph.input().out(u).first() {
            self.delete_edge(u, w)?;
        }
        let ur = NodeRef::input(u);
        if self.graph.parent(ur).is_some() {
            return Err(Error::Invariant(format!("{u} still inside a component")));
        }
        let ins = self.graph.input().inn(u).to_vec();
        for x in ins {
            let cx = self.graph.find(NodeRef::input(x));
            self.graph.input_mut().remove_edge(x, u)?;
            self.graph.dag_edge_sub(cx, ur, 1);
        }
        self.graph.remove_input_node(u);
        Ok(())
    }

    /// Applies one workload op; queries return their answer.
    pub fn apply(&mut self, op: &UpdateOp) -> Result<Option<bool>> {
        match op {
            UpdateOp::InsertEdge(u, v) => self.insert_edge(*u, *v).map(|_| None),
            UpdateOp::DeleteEdge(u, v) => self.delete_edge(*u, *v).map(|_| None),
            UpdateOp::InsertNode { u, outs, ins } => self.insert_node(*u, outs, ins).map(|_| None),
            UpdateOp::DeleteNode(u) => self.delete_node(*u).map(|_| None),
            UpdateOp::Query(u, v) => self.reachable(*u, *v).map(Some),
        }
    }

    /// Applies a batch of edge insertions and deletions.
    ///
    /// Complementary pairs on the same edge cancel first. The survivors run
    /// as: intra-component inserts (graph only), inter-component deletes
    /// (no label change), inter-component inserts with one shared ancestor
    /// pass, then intra-component deletes one at a time. Categories are
    /// decided right before their pass.
    pub fn apply_batch(&mut self, ops: &[UpdateOp]) -> Result<BatchReport> {
        let mut report = BatchReport {
            submitted: ops.len(),
            ..BatchReport::default()
        };
        let mut edges: Vec<(bool, u32, u32)> = Vec::with_capacity(ops.len());
        for op in ops {
            match *op {
                UpdateOp::InsertEdge(u, v) => edges.push((true, u, v)),
                UpdateOp::DeleteEdge(u, v) => edges.push((false, u, v)),
                ref other => {
                    return Err(Error::NotBatchable(format!("{other:?}")));
                }
            }
        }
        for &(_, u, v) in &edges {
            self.check_input(u)?;
            self.check_input(v)?;
        }
        let survivors = prune_complementary(&edges);
        report.pruned = edges.len() - survivors.len();
        report.applied = survivors.len();

        let mut inserts: Vec<(u32, u32)> = Vec::new();
        let mut deletes: Vec<(u32, u32)> = Vec::new();
        let mut seen_deletes: FxHashSet<(u32, u32)> = FxHashSet::default();
        for &(ins, u, v) in &survivors {
            if ins {
                inserts.push((u, v));
            } else {
                if !seen_deletes.insert((u, v)) {
                    return Err(Error::MissingEdge(u, v));
                }
                if !self.graph.input().has_edge(u, v) {
                    return Err(Error::MissingEdge(u, v));
                }
                deletes.push((u, v));
            }
        }

        // intra-component inserts touch only the input graph
        let mut inter_inserts = Vec::new();
        for (u, v) in inserts {
            if self.same_component(u, v) {
                self.graph.input_mut().add_edge(u, v)?;
                report.intra_inserts += 1;
            } else {
                inter_inserts.push((u, v));
            }
        }
        // inter-component deletes leave labels alone
        let mut intra_deletes = Vec::new();
        for (u, v) in deletes {
            if self.same_component(u, v) {
                intra_deletes.push((u, v));
            } else {
                self.delete_edge(u, v)?;
                report.inter_deletes += 1;
            }
        }
        report.inter_inserts = inter_inserts.len();
        self.insert_inter_batch(&inter_inserts, &mut report)?;
        for (u, v) in intra_deletes {
            self.delete_edge(u, v)?;
            report.intra_deletes += 1;
        }
        Ok(report)
    }

    fn same_component(&mut self, u: u32, v: u32) -> bool {
        u == v || self.graph.find(NodeRef::input(u)) == self.graph.find(NodeRef::input(v))
    }

    /// Adds inter-component edges, merges the cycles they close and fixes
    /// labels in one post-order pass over the affected ancestors.
    fn insert_inter_batch(&mut self, edges: &[(u32, u32)], report: &mut BatchReport) -> Result<()> {
        let mut sources = Vec::new();
        let mut targets = Vec::new();
        for &(u, v) in edges {
            if !self.graph.input_mut().add_edge(u, v)? {
                continue;
            }
            let s = self.graph.find(NodeRef::input(u));
            let t = self.graph.find(NodeRef::input(v));
            if s == t {
                continue;
            }
            self.graph.dag_edge_add(s, t, 1);
            sources.push(s);
            targets.push(t);
        }
        if sources.is_empty() {
            return Ok(());
        }
        let (ni, ns) = (self.graph.input_slots(), self.graph.scc_slots());

        // ancestors of the new sources, sources included
        self.marks.reset(ni, ns);
        let mut ancestors: Vec<NodeRef> = Vec::new();
        let mut stack: Vec<NodeRef> = Vec::new();
        for &s in &sources {
            if self.marks.insert(s) {
                ancestors.push(s);
                stack.push(s);
            }
        }
        while let Some(x) = stack.pop() {
            for (p, _) in self.graph.in_edges(x) {
                if self.marks.insert(p) {
                    ancestors.push(p);
                    stack.push(p);
                }
            }
        }

        // ancestors reachable from a new target hold every new cycle
        self.scope.reset(ni, ns);
        let mut candidates: Vec<NodeRef> = Vec::new();
        for &t in &targets {
            if self.marks.contains(t) && self.scope.insert(t) {
                candidates.push(t);
                stack.push(t);
            }
        }
        while let Some(x) = stack.pop() {
            for (c, _) in self.graph.out_edges(x) {
                if self.marks.contains(c) && self.scope.insert(c) {
                    candidates.push(c);
                    stack.push(c);
                }
            }
        }
        if !candidates.is_empty() {
            let pos: FxHashMap<NodeRef, usize> = candidates
                .iter()
                .enumerate()
                .map(|(i, &x)| (x, i))
                .collect();
            let graph = &self.graph;
            let comps = scc::tarjan(candidates.len(), |i, out| {
                out.extend(
                    graph
                        .out_edges(candidates[i])
                        .filter_map(|(c, _)| pos.get(&c).copied()),
                )
            });
            for comp in comps.into_iter().filter(|c| c.len() > 1) {
                let members: Vec<NodeRef> = comp.iter().map(|&i| candidates[i]).collect();
                let hull: Vec<(u64, u64)> = (0..self.k())
                    .map(|dim| {
                        let b = members
                            .iter()
                            .map(|&m| self.labels.b(m, dim))
                            .min()
                            .unwrap();
                        let e = members
                            .iter()
                            .map(|&m| self.labels.e(m, dim))
                            .max()
                            .unwrap();
                        (b, e)
                    })
                    .collect();
                let rep = self.graph.merge_components(&members)?;
                self.fit_scratch();
                for (dim, &(b, e)) in hull.iter().enumerate() {
                    self.labels.set(rep, dim, b, e);
                    self.stats.label_writes += 1;
                }
                self.stats.merges += 1;
                report.merges += 1;
            }
        }
        if self.k() == 0 {
            return Ok(());
        }

        // one post-order pass over the surviving ancestors
        let (ni, ns) = (self.graph.input_slots(), self.graph.scc_slots());
        self.scope.reset(ni, ns);
        let mut roots: Vec<NodeRef> = Vec::new();
        for x in ancestors {
            let r = self.graph.find(x);
            if self.scope.insert(r) {
                roots.push(r);
            }
        }
        report.ancestor_nodes = roots.len();
        self.marks.reset(ni, ns);
        // node, children start, end, cursor
        let mut frames: Vec<(NodeRef, usize, usize, usize)> = Vec::new();
        let mut children: Vec<NodeRef> = Vec::new();
        for &root in &roots {
            if !self.marks.insert(root) {
                continue;
            }
            children.extend(self.graph.out_edges(root).map(|(c, _)| c));
            frames.push((root, 0, children.len(), 0));
            while let Some(&(x, start, end, cursor)) = frames.last() {
                if cursor < end {
                    frames.last_mut().unwrap().3 += 1;
                    let c = children[cursor];
                    if self.scope.contains(c) && self.marks.insert(c) {
                        let cstart = children.len();
                        children.extend(self.graph.out_edges(c).map(|(y, _)| y));
                        frames.push((c, cstart, children.len(), cstart));
                    }
                    continue;
                }
                for dim in 0..self.k() {
                    let mut b = self.labels.b(x, dim);
                    let mut e = self.labels.e(x, dim);
                    for &c in &children[start..end] {
                        b = b.min(self.labels.b(c, dim));
                        e = e.max(self.labels.e(c, dim) + 1);
                    }
                    self.labels.set(x, dim, b, e);
                    self.stats.label_writes += 1;
                }
                report.ancestor_touches += 1;
                frames.pop();
                children.truncate(start);
            }
        }
        Ok(())
    }
}

/// Cancels complementary insert/delete pairs on the same edge. Each op
/// cancels the most recent unmatched complementary op; survivors keep
/// their original order.
fn prune_complementary(edges: &[(bool, u32, u32)]) -> Vec<(bool, u32, u32)> {
    let mut open: FxHashMap<(u32, u32), Vec<usize>> = FxHashMap::default();
    let mut alive = vec![true; edges.len()];
    for (i, &(ins, u, v)) in edges.iter().enumerate() {
        let stack = open.entry((u, v)).or_default();
        match stack.last() {
            Some(&j) if edges[j].0 != ins => {
                stack.pop();
                alive[j] = false;
                alive[i] = false;
            }
            _ => stack.push(i),
        }
    }
    edges
        .iter()
        .zip(alive)
        .filter_map(|(&e, keep)| keep.then_some(e))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pruning_cancels_pairs() {
        let e = |ins, u, v| (ins, u, v);
        assert!(prune_complementary(&[e(true, 0, 1), e(false, 0, 1)]).is_empty());
        assert_eq!(
            prune_complementary(&[e(true, 0, 1), e(false, 0, 1), e(false, 0, 1)]),
            vec![e(false, 0, 1)]
        );
        assert_eq!(
            prune_complementary(&[e(true, 0, 1), e(true, 1, 0), e(false, 0, 1)]),
            vec![e(true, 1, 0)]
        );
    }

    #[test]
    fn op_kinds() {
        assert_eq!(UpdateOp::Query(0, 1).kind(), "Q");
        assert!(!UpdateOp::Query(0, 1).is_update());
        assert_eq!(UpdateOp::DeleteNode(3).kind(), "ND");
    }
}
