//! Distributed (2Δ−2)-edge coloring on top of a LOCAL-model simulator.
//!
//! The crate is organized bottom-up:
//!
//! * [`graph`] and [`generate`]: the static graph substrate, derived graphs and
//!   instance generators.
//! * [`sim`]: a round-synchronous message-passing simulator with round accounting.
//! * [`symmetry`]: symmetry-breaking subroutines (Linial coloring, ruling sets,
//!   MIS, maximal matching, edge ruling sets, greedy list edge coloring), all
//!   executed as node programs.
//! * [`clustering`], [`hso`], [`extension`]: the three phases of the reduction.
//! * [`pipeline`]: end-to-end orchestration of the MIS-based, deterministic and
//!   randomized variants.
//! * [`verify`]: independent structural checkers used by tests and the CLI.

pub mod clustering;
pub mod coloring;
pub mod error;
pub mod extension;
pub mod generate;
pub mod graph;
pub mod hso;
pub mod pipeline;
pub mod sim;
pub mod symmetry;
pub mod verify;

pub mod cli;

pub use coloring::{Color, PartialEdgeColoring};
pub use error::{Error, Result};
pub use graph::{EdgeId, Graph};
