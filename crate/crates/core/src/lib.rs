//! Dynamic reachability over directed graphs that change.
//!
//! [`DaggerIndex`] keeps the strongly connected components of the graph in
//! a union-find forest, the condensation DAG with edge multiplicities, and
//! `k` randomized interval labels per DAG node. Queries search the DAG and
//! skip every child whose label cannot contain the target's label.
//!
//! ```
//! use dagger::{DaggerIndex, IndexConfig};
//!
//! let mut index = DaggerIndex::build(4, &[(0, 1), (1, 2), (2, 0)], IndexConfig::new(2, 7)).unwrap();
//! assert!(index.reachable(0, 2).unwrap());
//! assert!(!index.reachable(0, 3).unwrap());
//! index.insert_edge(2, 3).unwrap();
//! assert!(index.reachable(1, 3).unwrap());
//! index.delete_edge(2, 0).unwrap();
//! assert!(!index.reachable(2, 0).unwrap());
//! ```

pub mod bench;
pub mod error;
pub mod formats;
pub mod graph;
mod index;
pub mod labeling;
pub mod maintenance;
pub mod query;
pub mod scc;
mod scratch;
pub mod workload;

pub use error::{Error, Result};
pub use graph::{DaggerGraph, InputGraph, NodeKind, NodeRef};
pub use index::{DaggerIndex, IndexConfig, IndexStats};
pub use labeling::{Interval, Label, TraversalOrder};
pub use maintenance::{BatchReport, DeleteOutcome, InsertOutcome, UpdateOp};
pub use query::QueryStats;
