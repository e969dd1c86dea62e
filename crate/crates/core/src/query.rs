//! Reachability queries: label-pruned DAG search and the two baselines.

use crate::error::Result;
use crate::graph::NodeRef;
use crate::index::DaggerIndex;

/// Work done by one search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub visited: usize,
    /// Children skipped by the label test.
    pub pruned: usize,
}

impl QueryStats {
    fn add(&mut self, other: QueryStats) {
        self.visited += other.visited;
        self.pruned += other.pruned;
    }
}

impl DaggerIndex {
    /// Does input node `u` reach input node `v`?
    pub fn reachable(&mut self, u: u32, v: u32) -> Result<bool> {
        Ok(self.reachable_with_stats(u, v)?.0)
    }

    pub fn reachable_with_stats(&mut self, u: u32, v: u32) -> Result<(bool, QueryStats)> {
        self.check_input(u)?;
        self.check_input(v)?;
        let s = self.graph.find(NodeRef::input(u));
        let t = self.graph.find(NodeRef::input(v));
        Ok(self.dag_reaches(s, t))
    }

    /// Plain DFS over the input graph. Keeps no state beyond scratch space.
    pub fn dfs_input(&mut self, u: u32, v: u32) -> Result<bool> {
        Ok(self.graph.input().dfs(u, v, &mut self.dfs)?.0)
    }

    /// Unpruned DFS over the DAG between current DAG nodes.
    pub fn dfs_dag(&mut self, s: NodeRef, t: NodeRef) -> Result<bool> {
        self.current(s)?;
        self.current(t)?;
        Ok(self.search(s, t, false).0)
    }

    /// Label-pruned search between current DAG nodes.
    pub fn dag_reachable(&mut self, s: NodeRef, t: NodeRef) -> Result<(bool, QueryStats)> {
        self.current(s)?;
        self.current(t)?;
        Ok(self.dag_reaches(s, t))
    }

    pub(crate) fn dag_reaches(&mut self, s: NodeRef, t: NodeRef) -> (bool, QueryStats) {
        self.search(s, t, self.labels.k() > 0)
    }

    fn search(&mut self, s: NodeRef, t: NodeRef, prune: bool) -> (bool, QueryStats) {
        let mut stats = QueryStats {
            visited: 1,
            pruned: 0,
        };
        if s == t {
            return (true, stats);
        }
        if prune && !self.labels.covers(s, t) {
            return (false, stats);
        }
        self.marks
            .reset(self.graph.input_slots(), self.graph.scc_slots());
        self.marks.insert(s);
        self.stack.clear();
        self.stack.push(s);
        while let Some(x) = self.stack.pop() {
            for (c, _) in self.graph.out_edges(x) {
                if c == t {
                    self.stack.clear();
                    return (true, stats);
                }
                if self.marks.contains(c) {
                    continue;
                }
                if prune && !self.labels.covers(c, t) {
                    stats.pruned += 1;
                    continue;
                }
                self.marks.insert(c);
                stats.visited += 1;
                self.stack.push(c);
            }
        }
        (false, stats)
    }

    /// Answers a list of queries, summing the search statistics.
    pub fn reachable_many(&mut self, pairs: &[(u32, u32)]) -> Result<(Vec<bool>, QueryStats)> {
        let mut total = QueryStats::default();
        let mut answers = Vec::with_capacity(pairs.len());
        for &(u, v) in pairs {
            let (ans, st) = self.reachable_with_stats(u, v)?;
            total.add(st);
            answers.push(ans);
        }
        Ok((answers, total))
    }
}
