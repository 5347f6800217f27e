//! Convex and coconvex characters on semilabeled binary trees.
//!
//! A character on the leaf set `[n]` of a tree is identified with the
//! partition of `[n]` into equal-state classes. It is *convex* on a tree
//! when the minimal subtrees spanned by its classes are vertex-disjoint,
//! and *coconvex* on a collection when it is convex on every member.
//!
//! This crate is `no_std` (it needs `alloc`). File formats, the command
//! line, and thread-parallel drivers live in the companion `coconvex` crate.

#![no_std]

extern crate alloc;

pub mod caterpillar;
pub mod coconvex;
pub mod combinatorics;
pub mod convexity;
mod error;
pub mod expectation;
pub mod extremal;
pub mod metrics;
pub mod partition;
pub mod rng;
pub mod tree;

pub use caterpillar::Caterpillar;
pub use convexity::CountTable;
pub use error::{Error, Result};
pub use partition::{Partition, PartitionStats, StatsFilter};
pub use tree::Tree;

/// Leaf label. Standard trees use the labels `1..=n`.
pub type Label = u32;

/// Default size limits for the exponential-time operations.
pub mod limits {
    /// Enumeration of every partition of `[n]`.
    pub const ALL_PARTITIONS: usize = 12;
    /// Edge-subset oracle for convex characters (`2^(2n-3)` subsets).
    pub const CONVEX_ORACLE: usize = 12;
    /// Direct enumeration of convex and coconvex characters.
    pub const CONVEX_ENUMERATION: usize = 18;
    /// Enumeration of canonical caterpillars (`n!/8` of them).
    pub const CATERPILLARS: usize = 11;
    /// Exhaustive extremal search over caterpillar pairs.
    pub const EXHAUSTIVE_SEARCH: usize = 9;
    /// Exhaustive search over all pairs of binary trees.
    pub const TREE_PAIRS: usize = 7;
    /// Exact expectation formula.
    pub const EXACT_EXPECTATION: usize = 60;
}
