//! Exhaustive extension search, used as an oracle for small instances.

use crate::coloring::{Color, PartialEdgeColoring};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest edge set the exhaustive search accepts.
pub const BRUTE_FORCE_MAX_EDGES: usize = 16;

/// Searches all proper colorings of the uncolored `edges` that extend `c`.
/// Returns a witness, `None` when no extension exists, or `BudgetExceeded`
/// after visiting `budget` search nodes.
pub fn brute_force_extension(g: &Graph, c: &PartialEdgeColoring, edges: &[usize], budget: usize) -> Result<Option<Vec<(usize, Color)>>> {
    if edges.len() > BRUTE_FORCE_MAX_EDGES {
        return Err(Error::PreconditionViolation(format!("{} edges exceed the search bound {BRUTE_FORCE_MAX_EDGES}", edges.len())));
    }
    if let Some(&e) = edges.iter().find(|&&e| c.get(e).is_some()) {
        return Err(Error::PreconditionViolation(format!("edge {} is already colored", g.edge(e))));
    }
    let mut work = c.clone();
    if backtrack_extension(g, &mut work, edges, budget)? {
        Ok(Some(edges.iter().map(|&e| (e, work.get(e).expect("colored by search"))).collect()))
    } else {
        Ok(None)
    }
}

/// Backtracking over any number of uncolored edges, coloring them in `c` on
/// success and leaving `c` unchanged otherwise.
pub fn backtrack_extension(g: &Graph, c: &mut PartialEdgeColoring, edges: &[usize], budget: usize) -> Result<bool> {
    let mut nodes = 0;
    let mut left = edges.to_vec();
    let out = search(g, c, &mut left, &mut nodes, budget);
    if !matches!(out, Ok(true)) {
        edges.iter().for_each(|&e| c.clear(e));
    }
    out
}

fn search(g: &Graph, c: &mut PartialEdgeColoring, left: &mut Vec<usize>, nodes: &mut usize, budget: usize) -> Result<bool> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::BudgetExceeded(budget));
    }
    // Branch on the most constrained edge.
    let Some((pos, options)) = left.iter().enumerate().map(|(i, &e)| (i, c.available(g, e))).min_by_key(|(_, a)| a.len()) else {
        return Ok(true);
    };
    let e = left.swap_remove(pos);
    for col in options {
        c.set(e, col);
        if search(g, c, left, nodes, budget)? {
            return Ok(true);
        }
    }
    c.clear(e);
    left.push(e);
    let last = left.len() - 1;
    left.swap(pos, last);
    Ok(false)
}
