//! Components that always extend: those with an even cycle or with a vertex
//! of less than maximum degree.

use std::collections::{BTreeMap, VecDeque};

use crate::clustering::{cycle_edges, find_even_cycle};
use crate::coloring::{Color, PartialEdgeColoring};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Proper coloring of a cycle whose `i`-th edge picks from `lists[i]` (edge
/// `i` touches edges `i ± 1`, cyclically). Lists of two or more colors always
/// work on even cycles; other cases are searched exhaustively.
pub fn color_cycle_from_lists(lists: &[Vec<Color>]) -> Option<Vec<Color>> {
    let len = lists.len();
    if len < 2 || lists.iter().any(Vec::is_empty) {
        return None;
    }
    if lists.iter().all(|l| l.len() >= 2) {
        let two: Vec<[Color; 2]> = lists.iter().map(|l| [l[0], l[1]]).collect();
        let mut out = vec![0; len];
        match (0..len).find(|&i| two[i] != two[(i + 1) % len]) {
            None if len.is_multiple_of(2) => {
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = two[0][i % 2];
                }
                return Some(out);
            }
            None => {}
            Some(i) => {
                let next = (i + 1) % len;
                out[i] = *two[i].iter().find(|c| !two[next].contains(c)).expect("lists differ");
                // Walk backwards from i; the edge after i goes last.
                for step in 1..len {
                    let j = (i + len - step) % len;
                    let after = out[(j + 1) % len];
                    let before = if j == next { out[(j + len - 1) % len] } else { 0 };
                    out[j] = *two[j].iter().find(|&&c| c != after && c != before)?;
                }
                return Some(out);
            }
        }
    }
    let mut out = vec![0; len];
    search_cycle(lists, &mut out, 0).then_some(out)
}

fn search_cycle(lists: &[Vec<Color>], out: &mut [Color], i: usize) -> bool {
    let len = lists.len();
    if i == len {
        return true;
    }
    for &c in &lists[i] {
        if i > 0 && out[i - 1] == c || i == len - 1 && out[0] == c {
            continue;
        }
        out[i] = c;
        if search_cycle(lists, out, i + 1) {
            return true;
        }
    }
    false
}

/// Colors the uncolored, connected edge set `edges`. If some vertex of the
/// component has less than maximum degree, edges are colored greedily from
/// the farthest to the nearest to it. Otherwise the component must contain
/// an even cycle: the other edges are peeled towards the cycle the same way
/// and the cycle is colored last from its two-element lists.
pub fn extend_easy_component(g: &Graph, c: &mut PartialEdgeColoring, edges: &[usize]) -> Result<()> {
    if edges.is_empty() {
        return Ok(());
    }
    if let Some(&e) = edges.iter().find(|&&e| c.get(e).is_some()) {
        return Err(Error::PreconditionViolation(format!("edge {} is already colored", g.edge(e))));
    }
    let delta = g.max_degree();
    let mut adj: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &e in edges {
        let id = g.edge(e);
        adj.entry(id.u).or_default().push((id.v, e));
        adj.entry(id.v).or_default().push((id.u, e));
    }
    let vertices: Vec<usize> = adj.keys().copied().collect();
    let (sources, cycle) = match vertices.iter().find(|&&v| g.degree(v) < delta) {
        Some(&x) => (vec![x], Vec::new()),
        None => {
            let (sub, map) = g.induced_subgraph(&vertices);
            let (sub, _) = sub.edge_subgraph(|f| {
                let id = sub.edge(f);
                adj[&map[id.u]].iter().any(|&(y, _)| y == map[id.v])
            });
            let cyc = find_even_cycle(&sub)
                .ok_or_else(|| Error::PreconditionViolation("component has neither an even cycle nor a low-degree vertex".into()))?;
            let cyc: Vec<usize> = cyc.iter().map(|&v| map[v]).collect();
            let cycle = cycle_edges(g, &cyc);
            (cyc, cycle)
        }
    };
    let mut dist: BTreeMap<usize, usize> = sources.iter().map(|&s| (s, 0)).collect();
    let mut queue: VecDeque<usize> = sources.iter().copied().collect();
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        for &(y, _) in &adj[&x] {
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(y) {
                e.insert(d + 1);
                queue.push_back(y);
            }
        }
    }
    if dist.len() != vertices.len() {
        return Err(Error::PreconditionViolation("component is disconnected".into()));
    }
    let mut peel: Vec<(usize, usize, usize)> = edges
        .iter()
        .filter(|e| !cycle.contains(e))
        .map(|&e| {
            let id = g.edge(e);
            let (a, b) = (dist[&id.u], dist[&id.v]);
            (a.max(b), a.min(b), e)
        })
        .collect();
    peel.sort_unstable_by(|x, y| (y.0, y.1).cmp(&(x.0, x.1)).then(x.2.cmp(&y.2)));
    for (_, _, e) in peel {
        let col = c
            .min_available(g, e)
            .ok_or_else(|| Error::InvariantBroken(format!("peeled edge {} has no available color", g.edge(e))))?;
        c.set(e, col);
    }
    if !cycle.is_empty() {
        let lists: Vec<Vec<Color>> = cycle.iter().map(|&e| c.available(g, e)).collect();
        let colors = color_cycle_from_lists(&lists).ok_or_else(|| Error::InvariantBroken("even cycle lists admit no coloring".into()))?;
        for (&e, col) in cycle.iter().zip(colors) {
            c.set(e, col);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec, Model};
    use crate::graph::fixtures;
    use crate::verify::check_proper_coloring;
    use proptest::prelude::*;

    fn proper_on_cycle(lists: &[Vec<Color>], out: &[Color]) -> bool {
        let len = out.len();
        (0..len).all(|i| lists[i].contains(&out[i]) && out[i] != out[(i + 1) % len])
    }

    /// Oracle: all assignments, by enumeration.
    fn cycle_colorable(lists: &[Vec<Color>]) -> bool {
        fn rec(lists: &[Vec<Color>], acc: &mut Vec<Color>) -> bool {
            if acc.len() == lists.len() {
                let len = acc.len();
                return (0..len).all(|i| acc[i] != acc[(i + 1) % len]);
            }
            for &c in &lists[acc.len()] {
                acc.push(c);
                if rec(lists, acc) {
                    return true;
                }
                acc.pop();
            }
            false
        }
        rec(lists, &mut Vec::new())
    }

    #[test]
    fn four_cycle_alternates() {
        let lists = vec![vec![1, 2]; 4];
        assert_eq!(color_cycle_from_lists(&lists), Some(vec![1, 2, 1, 2]));
    }

    #[test]
    fn four_cycle_starts_at_the_odd_list() {
        let lists = vec![vec![1, 3], vec![1, 2], vec![1, 2], vec![1, 2]];
        let out = color_cycle_from_lists(&lists).unwrap();
        assert_eq!(out[0], 3);
        assert!(proper_on_cycle(&lists, &out));
    }

    #[test]
    fn odd_cycle_with_equal_lists_fails() {
        assert_eq!(color_cycle_from_lists(&vec![vec![1, 2]; 5]), None);
        assert!(color_cycle_from_lists(&vec![vec![1, 2, 3]; 5]).is_some());
    }

    proptest! {
        #[test]
        fn cycle_lists_agree_with_enumeration(
            half in 2usize..5,
            raw in prop::collection::vec(prop::collection::btree_set(1usize..5, 1..4), 10),
        ) {
            let len = 2 * half;
            let lists: Vec<Vec<Color>> = raw[..len].iter().map(|s| s.iter().copied().collect()).collect();
            let got = color_cycle_from_lists(&lists);
            prop_assert_eq!(got.is_some(), cycle_colorable(&lists));
            if let Some(out) = got {
                prop_assert!(proper_on_cycle(&lists, &out));
            }
            if lists.iter().all(|l| l.len() >= 2) {
                prop_assert!(color_cycle_from_lists(&lists).is_some());
            }
        }
    }

    #[test]
    fn path_component_peels() {
        let g = fixtures::path(6);
        let mut c = PartialEdgeColoring::new(g.m(), 2);
        extend_easy_component(&g, &mut c, &(0..5).collect::<Vec<_>>()).unwrap();
        assert!(check_proper_coloring(&g, &c, Some(2), true).pass);
    }

    #[test]
    fn odd_cycle_alone_is_rejected() {
        let g = fixtures::cycle(5);
        let mut c = PartialEdgeColoring::new(5, 2);
        assert!(matches!(extend_easy_component(&g, &mut c, &[0, 1, 2, 3, 4]), Err(Error::PreconditionViolation(_))));
    }

    /// Uncolors a ball around a vertex of a greedily (2Δ−2)-colored regular
    /// graph and re-extends it.
    #[test]
    fn regular_balls_with_even_cycles_extend() {
        let mut done = 0;
        for seed in 0..40u64 {
            let g = generate(&GeneratorSpec::new(Model::RegularRandom, 40, 3, seed)).unwrap();
            let delta = 3;
            // Component: an even cycle near vertex 0 plus a BFS forest of
            // radius 2 hanging off it.
            let ball = g.ball(0, 3);
            let (sub, map) = g.induced_subgraph(&ball);
            let Some(cyc) = find_even_cycle(&sub) else { continue };
            let cyc: Vec<usize> = cyc.iter().map(|&v| map[v]).collect();
            let mut comp: Vec<usize> = cycle_edges(&g, &cyc);
            let dist = g.bfs_from_set(cyc.iter().copied());
            for v in 0..g.n() {
                let Some(d) = dist[v].filter(|&d| (1..=2).contains(&d)) else { continue };
                let p = *g.neighbors(v).iter().filter(|&&p| dist[p] == Some(d - 1)).min().unwrap();
                comp.push(g.edge_index(v, p).unwrap());
            }
            let mut col = PartialEdgeColoring::new(g.m(), 2 * delta - 2);
            let order: Vec<usize> = (0..g.m()).filter(|e| !comp.contains(e)).collect();
            let mut ok = true;
            for e in order {
                match col.min_available(&g, e) {
                    Some(cc) => col.set(e, cc),
                    None => ok = false,
                }
            }
            if !ok {
                continue;
            }
            let before = col.clone();
            match extend_easy_component(&g, &mut col, &comp) {
                Ok(()) => {
                    assert!(check_proper_coloring(&g, &col, Some(2 * delta - 2), false).pass);
                    for e in 0..g.m() {
                        if !comp.contains(&e) {
                            assert_eq!(col.get(e), before.get(e));
                        }
                    }
                    done += 1;
                }
                Err(Error::PreconditionViolation(_)) => {}
                Err(e) => panic!("seed {seed}: {e}"),
            }
        }
        assert!(done > 5, "{done}");
    }
}
