//! Generation-stamped per-node scratch space shared by the searches.

use crate::graph::NodeRef;

/// A set of nodes that is cleared in O(1) by bumping a generation counter.
#[derive(Clone, Debug, Default)]
pub(crate) struct Stamps {
    inputs: Vec<u32>,
    sccs: Vec<u32>,
    gen: u32,
}

impl Stamps {
    /// Starts a fresh, empty set able to hold the given table sizes.
    pub(crate) fn reset(&mut self, inputs: usize, sccs: usize) {
        if self.inputs.len() < inputs {
            self.inputs.resize(inputs, 0);
        }
        if self.sccs.len() < sccs {
            self.sccs.resize(sccs, 0);
        }
        self.gen = self.gen.wrapping_add(1);
        if self.gen == 0 {
            self.inputs.iter_mut().for_each(|s| *s = 0);
            self.sccs.iter_mut().for_each(|s| *s = 0);
            self.gen = 1;
        }
    }

    /// Grows the backing storage without clearing the set.
    pub(crate) fn fit(&mut self, inputs: usize, sccs: usize) {
        if self.inputs.len() < inputs {
            self.inputs.resize(inputs, 0);
        }
        if self.sccs.len() < sccs {
            self.sccs.resize(sccs, 0);
        }
    }

    #[inline]
    fn cell(&self, x: NodeRef) -> u32 {
        if x.is_scc() {
            self.sccs[x.slot()]
        } else {
            self.inputs[x.slot()]
        }
    }

    #[inline]
    pub(crate) fn contains(&self, x: NodeRef) -> bool {
        self.cell(x) == self.gen
    }

    /// Inserts `x`; returns false if it was already present.
    #[inline]
    pub(crate) fn insert(&mut self, x: NodeRef) -> bool {
        let gen = self.gen;
        let cell = if x.is_scc() {
            &mut self.sccs[x.slot()]
        } else {
            &mut self.inputs[x.slot()]
        };
        if *cell == gen {
            false
        } else {
            *cell = gen;
            true
        }
    }
}

/// Dense per-node values addressed by [`NodeRef`].
#[derive(Clone, Debug, Default)]
pub(crate) struct NodeValues<T> {
    inputs: Vec<T>,
    sccs: Vec<T>,
}

impl<T: Clone + Default> NodeValues<T> {
    pub(crate) fn fit(&mut self, inputs: usize, sccs: usize) {
        if self.inputs.len() < inputs {
            self.inputs.resize(inputs, T::default());
        }
        if self.sccs.len() < sccs {
            self.sccs.resize(sccs, T::default());
        }
    }

    #[inline]
    pub(crate) fn get(&self, x: NodeRef) -> &T {
        if x.is_scc() {
            &self.sccs[x.slot()]
        } else {
            &self.inputs[x.slot()]
        }
    }

    #[inline]
    pub(crate) fn get_mut(&mut self, x: NodeRef) -> &mut T {
        if x.is_scc() {
            &mut self.sccs[x.slot()]
        } else {
            &mut self.inputs[x.slot()]
        }
    }
}
