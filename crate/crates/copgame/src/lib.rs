//! Pursuit games on graphs with cop speed, cop reach, robber speed, and a
//! protected ball: exact game solving, certified strategies from structural
//! graph properties (grids, hyperbolicity, expansion), quasi-retraction
//! transfer, bridge constructions, and a deterministic CLI.

pub mod cli;
pub mod constructions;
pub mod engine;
pub mod error;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod solver;
#[path = "strategies/mod.rs"]
pub mod strategies;

pub use error::{Error, Result};
