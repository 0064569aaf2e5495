//! Symmetry-breaking subroutines, all executed as node programs.

mod edges;
mod linial;
mod ruling;
mod sweep;

pub use edges::{greedy_list_edge_coloring, maximal_matching, two_edge_ruling_set, uniform_lists};
pub use linial::{linial_coloring, linial_schedule, LINIAL_PALETTE_FACTOR};
pub use ruling::{det_ruling_set, rand_ruling_set, ruling_set_from_coloring, RandRulingOptions};
pub use sweep::mis;

use serde::{Deserialize, Serialize};

use crate::sim::RunStats;

/// A proper vertex coloring with colors in `0..palette`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexColoring {
    pub colors: Vec<usize>,
    pub palette: usize,
}

/// Members of an `(alpha, beta)`-ruling set for the vertices flagged in
/// `targets`. Distances are hop counts in the topology the set was computed on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RulingSet {
    pub members: Vec<bool>,
    pub targets: Vec<bool>,
    pub alpha: usize,
    pub beta: usize,
}

impl RulingSet {
    pub fn member_ids(&self) -> Vec<usize> {
        self.members.iter().enumerate().filter(|(_, &m)| m).map(|(v, _)| v).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeSetKind {
    Matching,
    TwoEdgeRuling,
}

/// A set of edges of a graph, flagged by edge index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSet {
    pub members: Vec<bool>,
    pub kind: EdgeSetKind,
}

impl EdgeSet {
    pub fn member_ids(&self) -> Vec<usize> {
        self.members.iter().enumerate().filter(|(_, &m)| m).map(|(e, _)| e).collect()
    }
}

/// A result together with the rounds it took on the topology it ran on.
#[derive(Debug, Clone, PartialEq)]
pub struct Run<T> {
    pub value: T,
    pub rounds: usize,
    pub stats: RunStats,
}

impl<T> Run<T> {
    fn chain(value: T, parts: &[RunStats]) -> Self {
        let mut stats = RunStats::default();
        for p in parts {
            stats.rounds += p.rounds;
            stats.messages += p.messages;
            stats.max_message_bytes = stats.max_message_bytes.max(p.max_message_bytes);
        }
        Run { value, rounds: stats.rounds, stats }
    }
}

/// Round budget for subroutines whose round count is bounded by design.
pub(crate) const SUBROUTINE_BUDGET: usize = 1 << 20;
