//! The layered graph: input graph, condensation DAG and containment forest.
//!
//! Every node lives in one of two tables. Input nodes are addressed by their
//! external id; SCC nodes get ids from a monotone counter in the upper half
//! of the `u32` space, so an SCC id always compares greater than any input id.
//!
//! A *DAG node* is either an input node without a containment link (a
//! singleton component) or a current SCC node. DAG edges are stored
//! explicitly, with multiplicities, whenever at least one endpoint is an SCC
//! node. An edge between two singleton components is not duplicated: the
//! input edge itself plays that role, and the neighbor accessors merge both
//! views.

use std::fmt;
use std::hash::BuildHasherDefault;

use indexmap::IndexMap;
use rustc_hash::{FxHashSet, FxHasher};

use crate::error::{Error, Result};
use crate::scc;

const SCC_FLAG: u32 = 1 << 31;

/// Largest id an input node may use.
pub const MAX_INPUT_ID: u32 = SCC_FLAG - 1;

/// How far past the current id range a new input node may be placed.
const MAX_ID_GAP: usize = 1 << 24;

pub(crate) type EdgeMap = IndexMap<NodeRef, u32, BuildHasherDefault<FxHasher>>;

/// Identity of a node of the layered graph (input node or SCC node).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef(u32);

impl NodeRef {
    /// Reference to the input node with external id `u`.
    pub fn input(u: u32) -> Self {
        debug_assert!(u <= MAX_INPUT_ID);
        NodeRef(u)
    }

    pub(crate) fn scc(slot: usize) -> Self {
        NodeRef(SCC_FLAG | slot as u32)
    }

    /// Raw id, unique across input and SCC nodes.
    pub fn id(self) -> u32 {
        self.0
    }

    pub fn is_scc(self) -> bool {
        self.0 & SCC_FLAG != 0
    }

    /// The external id if this is an input node.
    pub fn as_input(self) -> Option<u32> {
        (!self.is_scc()).then_some(self.0)
    }

    /// Position within the node's own table.
    #[inline]
    pub(crate) fn slot(self) -> usize {
        (self.0 & !SCC_FLAG) as usize
    }
}

impl fmt::Debug for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_scc() {
            write!(f, "scc#{}", self.slot())
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Input,
    SccCurrent,
    SccExpired,
}

/// The plain input graph `G^i` with set semantics on edges.
#[derive(Clone, Debug, Default)]
pub struct InputGraph {
    out: Vec<Vec<u32>>,
    inn: Vec<Vec<u32>>,
    alive: Vec<bool>,
    nodes: usize,
    edges: usize,
}

impl InputGraph {
    pub fn with_nodes(n: usize) -> Self {
        InputGraph {
            out: vec![Vec::new(); n],
            inn: vec![Vec::new(); n],
            alive: vec![true; n],
            nodes: n,
            edges: 0,
        }
    }

    /// Builds the graph over `0..n`, dropping parallel duplicates while
    /// keeping first-occurrence order.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        if n > MAX_INPUT_ID as usize + 1 {
            return Err(Error::NodeOutOfRange(n as u64));
        }
        let mut g = InputGraph::with_nodes(n);
        for &(u, v) in edges {
            for x in [u, v] {
                if x as usize >= n {
                    return Err(Error::NodeOutOfRange(x as u64));
                }
            }
            g.out[u as usize].push(v);
        }
        // dedupe each out-list with a last-seen marker over targets
        let mut seen = vec![u32::MAX; n];
        for u in 0..n {
            let list = &mut g.out[u];
            list.retain(|&v| {
                let fresh = seen[v as usize] != u as u32;
                seen[v as usize] = u as u32;
                fresh
            });
            g.edges += list.len();
            for &v in list.iter() {
                g.inn[v as usize].push(u as u32);
            }
        }
        Ok(g)
    }

    /// One past the largest id ever used.
    pub fn id_bound(&self) -> usize {
        self.alive.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn contains_node(&self, u: u32) -> bool {
        self.alive.get(u as usize).copied().unwrap_or(false)
    }

    pub fn nodes(&self) -> impl Iterator<Item = u32> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(u, _)| u as u32)
    }

    /// All edges, grouped by source in id order, each group in stored order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u as u32, v)))
    }

    pub fn out(&self, u: u32) -> &[u32] {
        &self.out[u as usize]
    }

    pub fn inn(&self, u: u32) -> &[u32] {
        &self.inn[u as usize]
    }

    pub(crate) fn check(&self, u: u32) -> Result<()> {
        if self.contains_node(u) {
            Ok(())
        } else {
            Err(Error::UnknownNode(u))
        }
    }

    /// Checks that `u` can be added as a new node.
    pub(crate) fn check_new(&self, u: u32) -> Result<()> {
        if u > MAX_INPUT_ID || u as usize > self.alive.len() + MAX_ID_GAP {
            return Err(Error::NodeOutOfRange(u as u64));
        }
        if self.contains_node(u) {
            return Err(Error::DuplicateNode(u));
        }
        Ok(())
    }

    pub fn add_node(&mut self, u: u32) -> Result<()> {
        self.check_new(u)?;
        let need = u as usize + 1;
        if self.alive.len() < need {
            self.alive.resize(need, false);
            self.out.resize(need, Vec::new());
            self.inn.resize(need, Vec::new());
        }
        self.alive[u as usize] = true;
        self.nodes += 1;
        Ok(())
    }

    /// Removes an isolated node. Callers drop incident edges first.
    pub(crate) fn remove_isolated(&mut self, u: u32) {
        debug_assert!(self.out[u as usize].is_empty() && self.inn[u as usize].is_empty());
        self.alive[u as usize] = false;
        self.nodes -= 1;
    }

    /// Removes `u` together with all incident edges.
    pub fn remove_node(&mut self, u: u32) -> Result<()> {
        self.check(u)?;
        while let Some(&v) = self.out[u as usize].last() {
            self.remove_edge(u, v)?;
        }
        while let Some(&w) = self.inn[u as usize].last() {
            self.remove_edge(w, u)?;
        }
        self.remove_isolated(u);
        Ok(())
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        let (out, inn) = (&self.out[u as usize], &self.inn[v as usize]);
        if out.len() <= inn.len() {
            out.contains(&v)
        } else {
            inn.contains(&u)
        }
    }

    /// Adds `(u, v)`; returns false if the edge was already present.
    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<bool> {
        self.check(u)?;
        self.check(v)?;
        if self.has_edge(u, v) {
            return Ok(false);
        }
        self.out[u as usize].push(v);
        self.inn[v as usize].push(u);
        self.edges += 1;
        Ok(true)
    }

    pub fn remove_edge(&mut self, u: u32, v: u32) -> Result<()> {
        self.check(u)?;
        self.check(v)?;
        let out = &mut self.out[u as usize];
        let pos = out
            .iter()
            .position(|&x| x == v)
            .ok_or(Error::MissingEdge(u, v))?;
        out.remove(pos);
        let inn = &mut self.inn[v as usize];
        let pos = inn
            .iter()
            .position(|&x| x == u)
            .expect("in-list out of sync");
        inn.remove(pos);
        self.edges -= 1;
        Ok(())
    }

    /// Plain depth-first search from `u` looking for `v`.
    ///
    /// Returns the answer and the number of nodes visited.
    pub fn dfs(&self, u: u32, v: u32, scratch: &mut DfsScratch) -> Result<(bool, usize)> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Ok((true, 1));
        }
        scratch.begin(self.alive.len());
        scratch.mark(u);
        scratch.stack.push(u);
        let mut visited = 1;
        while let Some(x) = scratch.stack.pop() {
            for &y in &self.out[x as usize] {
                if y == v {
                    scratch.stack.clear();
                    return Ok((true, visited));
                }
                if scratch.mark(y) {
                    visited += 1;
                    scratch.stack.push(y);
                }
            }
        }
        Ok((false, visited))
    }
}

/// Reusable visited marks for [`InputGraph::dfs`].
#[derive(Clone, Debug, Default)]
pub struct DfsScratch {
    stamp: Vec<u32>,
    gen: u32,
    stack: Vec<u32>,
}

impl DfsScratch {
    fn begin(&mut self, n: usize) {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
        }
        self.gen = self.gen.wrapping_add(1);
        if self.gen == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.gen = 1;
        }
        self.stack.clear();
    }

    #[inline]
    fn mark(&mut self, u: u32) -> bool {
        let cell = &mut self.stamp[u as usize];
        if *cell == self.gen {
            false
        } else {
            *cell = self.gen;
            true
        }
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct NodeSlot {
    pub(crate) parent: Option<NodeRef>,
    pub(crate) dag_out: EdgeMap,
    pub(crate) dag_in: EdgeMap,
}

#[derive(Clone, Debug, Default)]
struct SccSlot {
    node: NodeSlot,
    size: u32,
    expired: bool,
}

/// Input graph, DAG of current components and containment links.
#[derive(Clone, Debug, Default)]
pub struct DaggerGraph {
    input: InputGraph,
    inputs: Vec<NodeSlot>,
    sccs: Vec<SccSlot>,
    dag_nodes: usize,
}

/// Neighbors of a DAG node in one direction: implicit singleton edges first,
/// then the stored ones.
pub struct Neighbors<'a> {
    implicit: std::slice::Iter<'a, u32>,
    slots: &'a [NodeSlot],
    this: u32,
    stored: indexmap::map::Iter<'a, NodeRef, u32>,
}

impl Iterator for Neighbors<'_> {
    /// Neighbor and edge multiplicity.
    type Item = (NodeRef, u32);

    #[inline]
    fn next(&mut self) -> Option<Self::Item> {
        for &v in self.implicit.by_ref() {
            if v != self.this && self.slots[v as usize].parent.is_none() {
                return Some((NodeRef(v), 1));
            }
        }
        self.stored.next().map(|(&t, &c)| (t, c))
    }
}

impl DaggerGraph {
    /// Builds the layered graph over input nodes `0..n`.
    ///
    /// Multi-node components get one SCC node each, numbered in Tarjan
    /// order; singleton components are represented by the input node.
    pub fn build(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let input = InputGraph::from_edges(n, edges)?;
        let components = scc::tarjan(n, |v, out| {
            out.extend(input.out(v as u32).iter().map(|&w| w as usize))
        });
        let mut g = DaggerGraph {
            inputs: vec![NodeSlot::default(); n],
            input,
            sccs: Vec::new(),
            dag_nodes: components.len(),
        };
        for comp in components.iter().filter(|c| c.len() > 1) {
            let s = g.new_scc(comp.len() as u32);
            for &u in comp {
                g.inputs[u].parent = Some(s);
            }
        }
        for u in 0..n as u32 {
            let cu = g.inputs[u as usize].parent.unwrap_or(NodeRef(u));
            for i in 0..g.input.out(u).len() {
                let v = g.input.out(u)[i];
                let cv = g.inputs[v as usize].parent.unwrap_or(NodeRef(v));
                if cu != cv {
                    g.dag_edge_add(cu, cv, 1);
                }
            }
        }
        Ok(g)
    }

    pub fn input(&self) -> &InputGraph {
        &self.input
    }

    pub(crate) fn input_mut(&mut self) -> &mut InputGraph {
        &mut self.input
    }

    pub(crate) fn input_slots(&self) -> usize {
        self.inputs.len()
    }

    pub(crate) fn scc_slots(&self) -> usize {
        self.sccs.len()
    }

    /// Number of current DAG nodes `|V^d|`.
    pub fn dag_node_count(&self) -> usize {
        self.dag_nodes
    }

    fn new_scc(&mut self, size: u32) -> NodeRef {
        let s = NodeRef::scc(self.sccs.len());
        self.sccs.push(SccSlot {
            size,
            ..SccSlot::default()
        });
        s
    }

    #[inline]
    pub(crate) fn slot(&self, x: NodeRef) -> &NodeSlot {
        if x.is_scc() {
            &self.sccs[x.slot()].node
        } else {
            &self.inputs[x.slot()]
        }
    }

    #[inline]
    fn slot_mut(&mut self, x: NodeRef) -> &mut NodeSlot {
        if x.is_scc() {
            &mut self.sccs[x.slot()].node
        } else {
            &mut self.inputs[x.slot()]
        }
    }

    fn exists(&self, x: NodeRef) -> bool {
        if x.is_scc() {
            x.slot() < self.sccs.len()
        } else {
            self.input.contains_node(x.0)
        }
    }

    pub fn kind(&self, x: NodeRef) -> Option<NodeKind> {
        if !self.exists(x) {
            None
        } else if !x.is_scc() {
            Some(NodeKind::Input)
        } else if self.sccs[x.slot()].expired {
            Some(NodeKind::SccExpired)
        } else {
            Some(NodeKind::SccCurrent)
        }
    }

    /// True if `x` is a current DAG node.
    #[inline]
    pub fn is_dag_node(&self, x: NodeRef) -> bool {
        if x.is_scc() {
            self.sccs.get(x.slot()).is_some_and(|s| !s.expired)
        } else {
            self.input.contains_node(x.0) && self.inputs[x.slot()].parent.is_none()
        }
    }

    /// Number of input nodes a DAG node stands for.
    #[inline]
    pub fn size(&self, x: NodeRef) -> u32 {
        if x.is_scc() {
            self.sccs[x.slot()].size
        } else {
            1
        }
    }

    #[inline]
    pub(crate) fn parent(&self, x: NodeRef) -> Option<NodeRef> {
        self.slot(x).parent
    }

    /// Current component of `x`, compressing the traversed path.
    pub(crate) fn find(&mut self, x: NodeRef) -> NodeRef {
        let mut root = x;
        while let Some(p) = self.parent(root) {
            root = p;
        }
        let mut cur = x;
        while let Some(p) = self.parent(cur) {
            if p != root {
                self.slot_mut(cur).parent = Some(root);
            }
            cur = p;
        }
        root
    }

    /// Current component containing `x`.
    pub fn find_scc(&mut self, x: NodeRef) -> Result<NodeRef> {
        if !self.exists(x) {
            return Err(Error::UnknownNode(x.0));
        }
        let root = self.find(x);
        if !self.is_dag_node(root) {
            return Err(Error::Logic(format!("{x} belongs to no current component")));
        }
        Ok(root)
    }

    /// Containment links between `x` and its component, without compressing.
    pub fn containment_depth(&self, x: NodeRef) -> usize {
        let mut depth = 0;
        let mut cur = x;
        while let Some(p) = self.parent(cur) {
            cur = p;
            depth += 1;
        }
        depth
    }

    /// Children of a DAG node with edge multiplicities.
    #[inline]
    pub(crate) fn out_edges(&self, s: NodeRef) -> Neighbors<'_> {
        let slot = self.slot(s);
        let implicit: &[u32] = if s.is_scc() { &[] } else { self.input.out(s.0) };
        Neighbors {
            implicit: implicit.iter(),
            slots: &self.inputs,
            this: s.0,
            stored: slot.dag_out.iter(),
        }
    }

    /// Parents of a DAG node with edge multiplicities.
    #[inline]
    pub(crate) fn in_edges(&self, s: NodeRef) -> Neighbors<'_> {
        let slot = self.slot(s);
        let implicit: &[u32] = if s.is_scc() { &[] } else { self.input.inn(s.0) };
        Neighbors {
            implicit: implicit.iter(),
            slots: &self.inputs,
            this: s.0,
            stored: slot.dag_in.iter(),
        }
    }

    fn check_dag_node(&self, s: NodeRef) -> Result<()> {
        if self.is_dag_node(s) {
            Ok(())
        } else if self.exists(s) {
            Err(Error::Logic(format!("{s} is not a current DAG node")))
        } else {
            Err(Error::UnknownNode(s.0))
        }
    }

    pub fn dag_children(&self, s: NodeRef) -> Result<Vec<NodeRef>> {
        self.check_dag_node(s)?;
        Ok(self.out_edges(s).map(|(t, _)| t).collect())
    }

    pub fn dag_parents(&self, s: NodeRef) -> Result<Vec<NodeRef>> {
        self.check_dag_node(s)?;
        Ok(self.in_edges(s).map(|(t, _)| t).collect())
    }

    /// Number of input edges mapped onto the DAG edge `(s, t)`.
    pub fn multiplicity(&self, s: NodeRef, t: NodeRef) -> u32 {
        if s == t {
            return 0;
        }
        if s.is_scc() || t.is_scc() {
            self.slot(s).dag_out.get(&t).copied().unwrap_or(0)
        } else {
            u32::from(self.input.has_edge(s.0, t.0))
        }
    }

    /// All current DAG nodes: singleton input nodes by id, then SCC nodes.
    pub fn dag_nodes(&self) -> Vec<NodeRef> {
        let singles = self
            .input
            .nodes()
            .filter(|&u| self.inputs[u as usize].parent.is_none())
            .map(NodeRef);
        let sccs = (0..self.sccs.len())
            .filter(|&i| !self.sccs[i].expired)
            .map(NodeRef::scc);
        singles.chain(sccs).collect()
    }

    /// Current partition of the input nodes, each class sorted, classes
    /// ordered by smallest member.
    pub fn partition(&mut self) -> Vec<Vec<u32>> {
        let nodes: Vec<u32> = self.input.nodes().collect();
        let mut classes: rustc_hash::FxHashMap<NodeRef, Vec<u32>> = Default::default();
        for u in nodes {
            let root = self.find(NodeRef(u));
            classes.entry(root).or_default().push(u);
        }
        let mut out: Vec<Vec<u32>> = classes.into_values().collect();
        out.sort_unstable_by_key(|c| c[0]);
        out
    }

    /// Adds `c` to the multiplicity of `(a, b)`. Edges between two
    /// singletons are carried by the input edge and not stored.
    pub(crate) fn dag_edge_add(&mut self, a: NodeRef, b: NodeRef, c: u32) {
        if a == b || !(a.is_scc() || b.is_scc()) {
            return;
        }
        *self.slot_mut(a).dag_out.entry(b).or_insert(0) += c;
        *self.slot_mut(b).dag_in.entry(a).or_insert(0) += c;
    }

    /// Subtracts `c` from the multiplicity of `(a, b)`, dropping the edge at
    /// zero.
    pub(crate) fn dag_edge_sub(&mut self, a: NodeRef, b: NodeRef, c: u32) {
        if a == b || !(a.is_scc() || b.is_scc()) {
            return;
        }
        fn dec(map: &mut EdgeMap, key: NodeRef, c: u32) {
            let m = map.get_mut(&key).expect("missing DAG edge");
            debug_assert!(*m >= c);
            *m -= c;
            if *m == 0 {
                map.swap_remove(&key);
            }
        }
        dec(&mut self.slot_mut(a).dag_out, b, c);
        dec(&mut self.slot_mut(b).dag_in, a, c);
    }

    /// Registers a new isolated input node.
    pub(crate) fn add_input_node(&mut self, u: u32) -> Result<()> {
        self.input.add_node(u)?;
        if self.inputs.len() < self.input.id_bound() {
            self.inputs
                .resize(self.input.id_bound(), NodeSlot::default());
        }
        self.inputs[u as usize] = NodeSlot::default();
        self.dag_nodes += 1;
        Ok(())
    }

    /// Removes an isolated singleton input node.
    pub(crate) fn remove_input_node(&mut self, u: u32) {
        let slot = &mut self.inputs[u as usize];
        debug_assert!(slot.parent.is_none() && slot.dag_out.is_empty() && slot.dag_in.is_empty());
        *slot = NodeSlot::default();
        self.input.remove_isolated(u);
        self.dag_nodes -= 1;
    }

    /// Merges current DAG nodes into one component.
    ///
    /// The member of largest size becomes the representative (ties go to the
    /// smallest id); when every member is a singleton a fresh SCC node is
    /// created instead. External DAG edges are re-targeted to the
    /// representative with multiplicities summed; edges among members vanish.
    pub fn merge_components(&mut self, members: &[NodeRef]) -> Result<NodeRef> {
        if members.len() < 2 {
            return Err(Error::Logic("merge needs at least two components".into()));
        }
        let mut set: FxHashSet<NodeRef> = FxHashSet::default();
        for &m in members {
            self.check_dag_node(m)?;
            if !set.insert(m) {
                return Err(Error::Logic(format!("{m} listed twice in merge")));
            }
        }
        let largest = members
            .iter()
            .copied()
            .max_by(|a, b| self.size(*a).cmp(&self.size(*b)).then(b.cmp(a)))
            .unwrap();
        let total: u32 = members.iter().map(|&m| self.size(m)).sum();
        let rep = if largest.is_scc() {
            largest
        } else {
            let r = self.new_scc(0);
            set.insert(r);
            self.dag_nodes += 1;
            r
        };

        let mut edges: Vec<(NodeRef, u32)> = Vec::new();
        for &m in members.iter().filter(|&&m| m != rep) {
            edges.clear();
            edges.extend(self.out_edges(m));
            for &(x, c) in &edges {
                self.dag_edge_sub(m, x, c);
                if !set.contains(&x) {
                    self.dag_edge_add(rep, x, c);
                }
            }
            edges.clear();
            edges.extend(self.in_edges(m));
            for &(x, c) in &edges {
                if x == rep {
                    self.dag_edge_sub(x, m, c);
                } else if !set.contains(&x) {
                    self.dag_edge_sub(x, m, c);
                    self.dag_edge_add(x, rep, c);
                }
            }
        }
        for &m in members.iter().filter(|&&m| m != rep) {
            debug_assert!(self.slot(m).dag_out.is_empty() && self.slot(m).dag_in.is_empty());
            self.slot_mut(m).parent = Some(rep);
            if m.is_scc() {
                self.sccs[m.slot()].expired = true;
            }
        }
        self.sccs[rep.slot()].size = total;
        self.dag_nodes -= members.len() - usize::from(members.contains(&rep));
        Ok(rep)
    }

    /// Splits the SCC `s` after edge removal. `components` are the input
    /// node sets that no longer reach `v`; everything else stays in `s`.
    ///
    /// Returns the DAG nodes of the extracted components, in the given order,
    /// and the remnant. A remnant of size one is dissolved into `v`.
    pub(crate) fn split_component(
        &mut self,
        s: NodeRef,
        v: u32,
        components: &[Vec<u32>],
    ) -> (Vec<NodeRef>, NodeRef) {
        debug_assert!(s.is_scc() && !self.sccs[s.slot()].expired);
        let mut nodes = Vec::with_capacity(components.len());
        let mut extracted: FxHashSet<u32> = FxHashSet::default();
        let mut moved = 0u32;
        for comp in components {
            let node = if comp.len() == 1 {
                NodeRef(comp[0])
            } else {
                self.new_scc(comp.len() as u32)
            };
            let link = node.is_scc().then_some(node);
            for &w in comp {
                self.inputs[w as usize].parent = link;
                extracted.insert(w);
            }
            moved += comp.len() as u32;
            nodes.push(node);
        }
        self.dag_nodes += nodes.len();

        let mut adj: Vec<u32> = Vec::new();
        for comp in components {
            for &w in comp {
                let cw = self.find(NodeRef(w));
                adj.clear();
                adj.extend_from_slice(self.input.out(w));
                for &x in &adj {
                    if x == w {
                        continue;
                    }
                    let cx = self.find(NodeRef(x));
                    let was_inside = extracted.contains(&x) || cx == s;
                    let old = if was_inside { s } else { cx };
                    self.dag_edge_sub(s, old, 1);
                    self.dag_edge_add(cw, cx, 1);
                }
                adj.clear();
                adj.extend_from_slice(self.input.inn(w));
                for &x in &adj {
                    if x == w || extracted.contains(&x) {
                        continue;
                    }
                    let cx = self.find(NodeRef(x));
                    self.dag_edge_sub(cx, s, 1);
                    self.dag_edge_add(cx, cw, 1);
                }
            }
        }

        let slot = &mut self.sccs[s.slot()];
        slot.size -= moved;
        let remnant = if slot.size == 1 {
            self.dissolve(s, v);
            NodeRef(v)
        } else {
            s
        };
        (nodes, remnant)
    }

    /// Replaces a size-one SCC node by its last member `v`.
    fn dissolve(&mut self, s: NodeRef, v: u32) {
        let out = std::mem::take(&mut self.sccs[s.slot()].node.dag_out);
        let inn = std::mem::take(&mut self.sccs[s.slot()].node.dag_in);
        let vn = NodeRef(v);
        self.inputs[v as usize].parent = None;
        self.sccs[s.slot()].expired = true;
        for (x, c) in out {
            self.slot_mut(x).dag_in.swap_remove(&s);
            self.dag_edge_add(vn, x, c);
        }
        for (x, c) in inn {
            self.slot_mut(x).dag_out.swap_remove(&s);
            self.dag_edge_add(x, vn, c);
        }
    }

    /// Checks the structural invariants against a brute-force recount.
    /// Intended for tests; cost is linear in the graph.
    pub fn validate(&mut self) -> Result<()> {
        let fail = |msg: String| Err(Error::Invariant(msg));
        let nodes: Vec<u32> = self.input.nodes().collect();
        let mut total = 0u64;
        for s in self.dag_nodes() {
            total += self.size(s) as u64;
            if s.is_scc() && self.size(s) < 2 {
                return fail(format!("{s} is current with size {}", self.size(s)));
            }
        }
        if total != nodes.len() as u64 {
            return fail(format!("sizes sum to {total}, expected {}", nodes.len()));
        }
        if self.dag_nodes().len() != self.dag_nodes {
            return fail("DAG node counter out of sync".into());
        }
        let mut expected: rustc_hash::FxHashMap<(NodeRef, NodeRef), u32> = Default::default();
        let mut sizes: rustc_hash::FxHashMap<NodeRef, u32> = Default::default();
        for &u in &nodes {
            let cu = self.find(NodeRef(u));
            if !self.is_dag_node(cu) {
                return fail(format!("{u} resolves to non-current {cu}"));
            }
            *sizes.entry(cu).or_default() += 1;
            for i in 0..self.input.out(u).len() {
                let v = self.input.out(u)[i];
                let cv = self.find(NodeRef(v));
                if cu != cv && (cu.is_scc() || cv.is_scc()) {
                    *expected.entry((cu, cv)).or_default() += 1;
                }
            }
        }
        for (s, n) in sizes {
            if self.size(s) != n {
                return fail(format!("{s} has size {} but {n} members", self.size(s)));
            }
        }
        let mut stored = 0usize;
        for s in self.dag_nodes() {
            for (&t, &c) in &self.slot(s).dag_out {
                stored += 1;
                if expected.get(&(s, t)) != Some(&c) {
                    return fail(format!(
                        "edge ({s},{t}) stores {c}, expected {:?}",
                        expected.get(&(s, t))
                    ));
                }
                if self.slot(t).dag_in.get(&s) != Some(&c) {
                    return fail(format!("edge ({s},{t}) missing from in-map"));
                }
            }
            let ins: usize = self.slot(s).dag_in.len();
            let back = self
                .slot(s)
                .dag_in
                .keys()
                .filter(|p| self.slot(**p).dag_out.contains_key(&s))
                .count();
            if ins != back {
                return fail(format!("dangling in-edges at {s}"));
            }
        }
        if stored != expected.len() {
            return fail(format!(
                "{stored} stored DAG edges, expected {}",
                expected.len()
            ));
        }
        Ok(())
    }
}
