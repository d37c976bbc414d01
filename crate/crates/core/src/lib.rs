//! Spatio-temporal co-movement pattern mining on top of frequent closed
//! itemsets of a cluster matrix.

pub mod append;
pub mod clustering;
pub mod error;
pub mod extract;
pub mod gen;
pub mod incremental;
pub mod ingest;
pub mod miner;
pub mod model;
pub mod oracle;
pub mod samples;
pub mod store;

pub use error::{Error, Result};
