//! Exact shortest-path distances on road networks from a balanced hierarchy
//! of vertex cuts and per-level distance labels.
//!
//! ```
//! use hc2l::{BuildConfig, DistanceIndex, Graph};
//!
//! let g = Graph::from_edges(4, [(0, 1, 3), (1, 2, 4), (2, 3, 1), (3, 0, 9)]).unwrap();
//! let (index, _report) = DistanceIndex::build(&g, &BuildConfig::default()).unwrap();
//! assert_eq!(index.query(0, 3).unwrap(), 8);
//! ```

pub mod balance;
pub mod builder;
pub mod contraction;
pub mod dimacs;
pub mod graph;
pub mod hierarchy;
pub mod index;
pub mod label;
pub mod mincut;
pub mod partition;
pub mod shortcut;
pub mod store;
pub mod workload;

pub use balance::Beta;
pub use builder::{BuildConfig, BuildError, BuildReport, BuildTrace, NodeTrace};
pub use graph::{dijkstra, Distance, Graph, Vertex, Weight, INFINITY};
pub use index::{DistanceIndex, QueryError, QueryOutcome};
