//! File formats and report plumbing behind the `prodtest` binary.

pub mod files;
pub mod report;
