//! Coloring the edges of an uncolored star with distinct available colors.

use crate::coloring::{Color, PartialEdgeColoring};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Colors the uncolored `edges`, which must share a common vertex, with
/// pairwise distinct available colors. A saturating matching between edges
/// and their available colors is found by augmenting paths; if none exists
/// the coloring is left untouched.
pub fn extend_star(g: &Graph, c: &mut PartialEdgeColoring, edges: &[usize]) -> Result<()> {
    if edges.is_empty() {
        return Ok(());
    }
    let first = g.edge(edges[0]);
    let center = [first.u, first.v]
        .into_iter()
        .find(|&x| edges.iter().all(|&e| g.edge(e).contains(x)))
        .ok_or_else(|| Error::PreconditionViolation("edges do not form a star".into()))?;
    if let Some(&e) = edges.iter().find(|&&e| c.get(e).is_some()) {
        return Err(Error::PreconditionViolation(format!("star edge {} is already colored", g.edge(e))));
    }
    let lists: Vec<Vec<Color>> = edges.iter().map(|&e| c.available(g, e)).collect();
    let mut holder: Vec<Option<usize>> = vec![None; c.palette() + 1];
    for i in 0..edges.len() {
        let mut seen = vec![false; c.palette() + 1];
        if !augment(i, &lists, &mut holder, &mut seen) {
            return Err(Error::NoExtension(format!(
                "star at {center}: {} edges cannot all get distinct available colors",
                edges.len()
            )));
        }
    }
    for (col, h) in holder.iter().enumerate() {
        if let Some(i) = *h {
            c.set(edges[i], col);
        }
    }
    Ok(())
}

fn augment(i: usize, lists: &[Vec<Color>], holder: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &col in &lists[i] {
        if seen[col] {
            continue;
        }
        seen[col] = true;
        if holder[col].is_none_or(|j| augment(j, lists, holder, seen)) {
            holder[col] = Some(i);
            return true;
        }
    }
    false
}
