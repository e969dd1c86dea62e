use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{DaggerGraph, DfsScratch, NodeRef};
use crate::labeling::{dimension_rngs, LabelStore, Propagation, Traversal, TraversalOrder};
use crate::scratch::{NodeValues, Stamps};

/// Index parameters.
#[derive(Clone, Debug)]
pub struct IndexConfig {
    /// Label dimensions; 0 disables labeling.
    pub k: usize,
    pub seed: u64,
    pub order: TraversalOrder,
}

impl IndexConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        IndexConfig {
            k,
            seed,
            order: TraversalOrder::Shuffled,
        }
    }

    pub fn with_order(mut self, order: TraversalOrder) -> Self {
        self.order = order;
        self
    }
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig::new(2, 0)
    }
}

/// Cumulative instrumentation counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IndexStats {
    pub label_writes: u64,
    pub merges: u64,
    pub splits: u64,
    /// Nodes visited by merge-list searches.
    pub merge_search_visited: u64,
    /// Input nodes visited by component extraction.
    pub extract_visited: u64,
}

/// Dynamic reachability index: SCC condensation plus interval labels.
pub struct DaggerIndex {
    pub(crate) graph: DaggerGraph,
    pub(crate) labels: LabelStore,
    pub(crate) order: TraversalOrder,
    pub(crate) rngs: Vec<ChaCha8Rng>,
    pub(crate) seed: u64,
    pub(crate) marks: Stamps,
    pub(crate) scope: Stamps,
    pub(crate) reach: Stamps,
    pub(crate) values: NodeValues<(u32, u32)>,
    pub(crate) traversal: Traversal,
    pub(crate) propagation: Propagation,
    pub(crate) dfs: DfsScratch,
    pub(crate) stack: Vec<NodeRef>,
    pub(crate) stats: IndexStats,
}

impl std::fmt::Debug for DaggerIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DaggerIndex")
            .field("k", &self.labels.k())
            .field("seed", &self.seed)
            .field("nodes", &self.graph.input().node_count())
            .field("edges", &self.graph.input().edge_count())
            .field("dag_nodes", &self.graph.dag_node_count())
            .finish()
    }
}

impl DaggerIndex {
    /// Builds the index over input nodes `0..n`.
    pub fn build(n: usize, edges: &[(u32, u32)], cfg: IndexConfig) -> Result<Self> {
        let graph = DaggerGraph::build(n, edges)?;
        Ok(Self::from_graph(graph, cfg))
    }

    pub fn from_graph(graph: DaggerGraph, cfg: IndexConfig) -> Self {
        let mut index = DaggerIndex {
            graph,
            labels: LabelStore::new(cfg.k),
            order: cfg.order,
            rngs: dimension_rngs(cfg.k, cfg.seed),
            seed: cfg.seed,
            marks: Stamps::default(),
            scope: Stamps::default(),
            reach: Stamps::default(),
            values: NodeValues::default(),
            traversal: Traversal::default(),
            propagation: Propagation::default(),
            dfs: DfsScratch::default(),
            stack: Vec::new(),
            stats: IndexStats::default(),
        };
        index.initial_labels();
        index
    }

    pub fn k(&self) -> usize {
        self.labels.k()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn graph(&self) -> &DaggerGraph {
        &self.graph
    }

    pub fn stats(&self) -> IndexStats {
        self.stats
    }

    /// Current component of input node `u`.
    pub fn find_scc(&mut self, u: u32) -> Result<NodeRef> {
        self.graph.input().check(u)?;
        self.graph.find_scc(NodeRef::input(u))
    }

    /// Current SCC partition, see [`DaggerGraph::partition`].
    pub fn partition(&mut self) -> Vec<Vec<u32>> {
        self.graph.partition()
    }

    /// Structural and label invariants.
    pub fn validate(&mut self) -> Result<()> {
        self.graph.validate()?;
        self.check_labels()
    }

    pub(crate) fn fit_scratch(&mut self) {
        let (i, s) = (self.graph.input_slots(), self.graph.scc_slots());
        self.labels.fit(i, s);
        self.marks.fit(i, s);
        self.scope.fit(i, s);
        self.reach.fit(i, s);
        self.values.fit(i, s);
    }

    pub(crate) fn check_input(&self, u: u32) -> Result<()> {
        self.graph.input().check(u)
    }

    pub(crate) fn current(&self, s: NodeRef) -> Result<()> {
        if self.graph.is_dag_node(s) {
            Ok(())
        } else if self.graph.kind(s).is_some() {
            Err(Error::Logic(format!("{s} is not a current DAG node")))
        } else {
            Err(Error::UnknownNode(s.id()))
        }
    }
}
