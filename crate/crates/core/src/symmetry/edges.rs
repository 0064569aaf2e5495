//! Edge problems, solved as vertex problems on the line graph.

use rand_chacha::ChaCha8Rng;

use super::linial::linial_coloring;
use super::ruling::ruling_set_from_coloring;
use super::sweep::mis_with_coloring;
use super::{EdgeSet, EdgeSetKind, Run, SUBROUTINE_BUDGET};
use crate::coloring::{Color, PartialEdgeColoring};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sim::{run_sync, Action, NodeInfo, NodeProgram};

/// Maximal matching: MIS of the line graph.
pub fn maximal_matching(g: &Graph) -> Run<EdgeSet> {
    let (line, _) = g.line_graph();
    let col = linial_coloring(&line, None);
    let sweep = mis_with_coloring(&line, &col.value, None);
    Run::chain(EdgeSet { members: sweep.value, kind: EdgeSetKind::Matching }, &[col.stats, sweep.stats])
}

/// Independent edges such that every edge is within line-graph distance 2 of
/// a member: a `(2, 2)`-ruling set of the line graph.
pub fn two_edge_ruling_set(g: &Graph) -> Run<EdgeSet> {
    let (line, _) = g.line_graph();
    let col = linial_coloring(&line, None);
    let rs = ruling_set_from_coloring(&line, &col.value, &vec![true; line.n()], 2);
    Run::chain(EdgeSet { members: rs.value.members, kind: EdgeSetKind::TwoEdgeRuling }, &[col.stats, rs.stats])
}

/// Sweep on the line graph where each edge, once all edges of smaller
/// priority around it are colored, takes the smallest list color not taken.
struct ListSweep<'a> {
    priority: &'a [usize],
    lists: &'a [Vec<Color>],
}

#[derive(Default)]
struct ListInbox {
    smaller_hello: usize,
    chosen: Vec<(usize, Color)>,
}

struct ListState {
    priority: usize,
    pending: usize,
    taken: Vec<Color>,
}

impl NodeProgram for ListSweep<'_> {
    type State = ListState;
    // Hello carries the priority; a choice carries (priority, color).
    type Msg = (usize, Option<Color>);
    type Inbox = ListInbox;
    type Output = Color;

    fn init(&self, info: &NodeInfo, _: &mut ChaCha8Rng) -> (ListState, Action<Self::Msg, Color>) {
        let priority = self.priority[info.id];
        (ListState { priority, pending: 0, taken: Vec::new() }, Action::broadcast((priority, None)))
    }

    fn receive(&self, state: &ListState, inbox: &mut ListInbox, _: usize, msg: &Self::Msg) {
        match *msg {
            (p, None) if p < state.priority => inbox.smaller_hello += 1,
            (p, Some(c)) => inbox.chosen.push((p, c)),
            _ => {}
        }
    }

    fn step(&self, info: &NodeInfo, s: &mut ListState, inbox: ListInbox, round: usize, _: &mut ChaCha8Rng) -> Action<Self::Msg, Color> {
        if round == 1 {
            s.pending = inbox.smaller_hello;
        }
        for (p, c) in inbox.chosen {
            s.taken.push(c);
            if p < s.priority {
                s.pending -= 1;
            }
        }
        if s.pending > 0 {
            return Action::idle();
        }
        let c = *self.lists[info.id]
            .iter()
            .find(|c| !s.taken.contains(c))
            .expect("list longer than the number of neighbors");
        Action::broadcast((s.priority, Some(c))).with_output(c)
    }
}

/// Proper edge coloring where edge `e` takes a color from `lists[e]`. Every
/// list must have more entries than the edge has neighbors.
pub fn greedy_list_edge_coloring(g: &Graph, lists: &[Vec<Color>]) -> Result<Run<PartialEdgeColoring>> {
    assert_eq!(lists.len(), g.m());
    for (e, list) in lists.iter().enumerate() {
        let need = g.edge_degree(e) + 1;
        let mut distinct = list.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < need {
            let id = g.edge(e);
            return Err(Error::ListTooSmall((id.u, id.v), distinct.len(), need));
        }
    }
    let (line, _) = g.line_graph();
    let col = linial_coloring(&line, None);
    let prog = ListSweep { priority: &col.value.colors, lists };
    let (chosen, stats) = run_sync(&line, &prog, SUBROUTINE_BUDGET, 0)?;
    let palette = lists.iter().flatten().copied().max().unwrap_or(0);
    let mut out = PartialEdgeColoring::new(g.m(), palette);
    for (e, c) in chosen.into_iter().enumerate() {
        out.set(e, c);
    }
    Ok(Run::chain(out, &[col.stats, stats]))
}

/// Convenience for the common case of one shared palette `1..=k`.
pub fn uniform_lists(g: &Graph, k: usize) -> Vec<Vec<Color>> {
    vec![(1..=k).collect(); g.m()]
}
