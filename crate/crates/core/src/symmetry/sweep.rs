//! Maximal independent set by a priority sweep over a proper coloring.
//!
//! A node joins once every neighbor of smaller color has left, and leaves as
//! soon as a neighbor joins. This is the greedy MIS in color order, computed
//! with rounds bounded by the palette size (usually far fewer).

use rand_chacha::ChaCha8Rng;

use super::linial::linial_coloring;
use super::{Run, RulingSet, VertexColoring, SUBROUTINE_BUDGET};
use crate::sim::{run_sync, Action, NodeInfo, NodeProgram, Topology};

#[derive(Debug, Clone, Copy)]
pub(crate) enum SweepMsg {
    Hello(usize),
    Joined,
    Left(usize),
}

#[derive(Default)]
pub(crate) struct SweepInbox {
    smaller_hello: usize,
    smaller_left: usize,
    joined: bool,
}

pub(crate) struct SweepState {
    color: usize,
    pending: usize,
}

struct Sweep<'a> {
    colors: &'a [usize],
    active: Option<&'a [bool]>,
}

impl NodeProgram for Sweep<'_> {
    type State = SweepState;
    type Msg = SweepMsg;
    type Inbox = SweepInbox;
    type Output = bool;

    fn init(&self, info: &NodeInfo, _: &mut ChaCha8Rng) -> (SweepState, Action<SweepMsg, bool>) {
        let color = self.colors[info.id];
        let state = SweepState { color, pending: 0 };
        if !self.active.is_none_or(|a| a[info.id]) {
            return (state, Action::done(false));
        }
        (state, Action::broadcast(SweepMsg::Hello(color)))
    }

    fn receive(&self, state: &SweepState, inbox: &mut SweepInbox, _: usize, msg: &SweepMsg) {
        match *msg {
            SweepMsg::Hello(c) if c < state.color => inbox.smaller_hello += 1,
            SweepMsg::Left(c) if c < state.color => inbox.smaller_left += 1,
            SweepMsg::Joined => inbox.joined = true,
            _ => {}
        }
    }

    fn step(&self, _: &NodeInfo, state: &mut SweepState, inbox: SweepInbox, round: usize, _: &mut ChaCha8Rng) -> Action<SweepMsg, bool> {
        if inbox.joined {
            return Action::broadcast(SweepMsg::Left(state.color)).with_output(false);
        }
        if round == 1 {
            state.pending = inbox.smaller_hello;
        }
        state.pending -= inbox.smaller_left;
        if state.pending == 0 {
            Action::broadcast(SweepMsg::Joined).with_output(true)
        } else {
            Action::idle()
        }
    }
}

/// Greedy MIS in the order of `coloring` among the `active` vertices.
pub(crate) fn mis_with_coloring<T: Topology>(topo: &T, coloring: &VertexColoring, active: Option<&[bool]>) -> Run<Vec<bool>> {
    let prog = Sweep { colors: &coloring.colors, active };
    let (members, stats) = run_sync(topo, &prog, SUBROUTINE_BUDGET, 0).expect("sweep terminates");
    Run::chain(members, &[stats])
}

/// Maximal independent set: Linial coloring followed by the color sweep.
pub fn mis<T: Topology>(topo: &T) -> Run<RulingSet> {
    let col = linial_coloring(topo, None);
    let sweep = mis_with_coloring(topo, &col.value, None);
    let n = topo.n();
    Run::chain(
        RulingSet { members: sweep.value, targets: vec![true; n], alpha: 2, beta: 1 },
        &[col.stats, sweep.stats],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec, Model};
    use crate::graph::{fixtures, Graph};
    use crate::verify::check_ruling_set;

    /// All maximal independent sets of a small graph, by enumeration.
    fn all_mis(g: &Graph) -> Vec<Vec<bool>> {
        let n = g.n();
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let inside = |v: usize| mask >> v & 1 == 1;
            let independent = g.edges().iter().all(|e| !(inside(e.u) && inside(e.v)));
            let maximal = (0..n).all(|v| inside(v) || g.neighbors(v).iter().any(|&u| inside(u)));
            if independent && maximal {
                out.push((0..n).map(inside).collect());
            }
        }
        out
    }

    #[test]
    fn empty_graph_takes_everything() {
        let g = Graph::empty(5);
        assert_eq!(mis(&g).value.members, vec![true; 5]);
    }

    #[test]
    fn clique_takes_one() {
        let g = fixtures::complete(7);
        assert_eq!(mis(&g).value.members.iter().filter(|&&m| m).count(), 1);
    }

    #[test]
    fn six_cycle_output_is_one_of_the_enumerated_sets() {
        let g = fixtures::cycle(6);
        let all = all_mis(&g);
        assert_eq!(all.len(), 5);
        let got = mis(&g).value.members;
        assert!(all.contains(&got));
        let size = got.iter().filter(|&&m| m).count();
        assert!(size == 2 || size == 3);
    }

    #[test]
    fn random_instances_pass_checker() {
        for seed in 0..200u64 {
            let n = 16 + (seed as usize * 37) % 300;
            let d = 2 + seed as usize % 4;
            let n = if n * d % 2 == 1 { n + 1 } else { n };
            let g = generate(&GeneratorSpec::new(Model::RegularRandom, n, d, seed)).unwrap();
            let run = mis(&g);
            assert!(check_ruling_set(&g, 1, &run.value).pass, "seed {seed}");
        }
    }

    #[test]
    fn sweep_matches_sequential_greedy() {
        for seed in 0..30u64 {
            let g = generate(&GeneratorSpec::new(Model::RegularRandom, 40, 3, seed)).unwrap();
            let col = linial_coloring(&g, None).value;
            let got = mis_with_coloring(&g, &col, None).value;
            let mut order: Vec<usize> = (0..40).collect();
            order.sort_by_key(|&v| col.colors[v]);
            let mut greedy = vec![false; 40];
            for v in order {
                if g.neighbors(v).iter().all(|&u| !greedy[u]) {
                    greedy[v] = true;
                }
            }
            assert_eq!(got, greedy);
        }
    }
}
