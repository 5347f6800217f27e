//! File formats, thread-parallel drivers, and the acceptance battery for
//! [`coconvex_core`]. The `coconvex` binary is a thin layer over this crate.

pub mod error;
pub mod newick;
pub mod parallel;
pub mod partitions;
pub mod report;
pub mod taxa;
pub mod verify;

pub use coconvex_core as core;
pub use error::{Result, ToolError};
