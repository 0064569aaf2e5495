//! Ruling sets: from a coloring, deterministic and randomized.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::linial::linial_coloring;
use super::{Run, RulingSet, VertexColoring, SUBROUTINE_BUDGET};
use crate::error::{Error, Result};
use crate::sim::{run_sync, Action, NodeInfo, NodeProgram, Topology};
use crate::verify::check_ruling_set_on;

/// Smallest base `b >= 2` with `b^levels >= palette`.
fn digit_base(palette: usize, levels: usize) -> usize {
    let mut b = 2usize;
    while b.checked_pow(levels as u32).is_some_and(|p| p < palette) {
        b += 1;
    }
    b
}

fn ceil_log2(x: usize) -> usize {
    (usize::BITS - (x.max(1) - 1).leading_zeros()) as usize
}

/// Colors are written in base `b` with `levels` digits. Level `l` merges, for
/// each group of colors sharing all digits from position `l` upward, the
/// ruling sets of its `b` subgroups (digit `l − 1` = 0, 1, ...) one subgroup
/// per round: a member of subgroup `j` drops out if a surviving member of an
/// earlier subgroup of the same group is adjacent. Each level adds one hop of
/// domination distance.
struct FromColoring<'a> {
    colors: &'a [usize],
    targets: &'a [bool],
    base: usize,
    levels: usize,
}

struct FcState {
    color: usize,
    member: bool,
    dominated: bool,
}

impl FromColoring<'_> {
    fn pow(&self, l: usize) -> usize {
        self.base.pow(l as u32)
    }

    fn digit(&self, color: usize, l: usize) -> usize {
        color / self.pow(l) % self.base
    }

    fn prefix(&self, color: usize, l: usize) -> usize {
        color / self.pow(l)
    }

    fn last_round(&self) -> usize {
        self.levels * (self.base - 1)
    }
}

impl NodeProgram for FromColoring<'_> {
    type State = FcState;
    // (level, group prefix) of a final member announcing itself.
    type Msg = (usize, usize);
    type Inbox = Vec<usize>;
    type Output = bool;

    fn init(&self, info: &NodeInfo, _: &mut ChaCha8Rng) -> (FcState, Action<(usize, usize), bool>) {
        let color = self.colors[info.id];
        let member = self.targets[info.id];
        let state = FcState { color, member, dominated: false };
        if member && self.digit(color, 0) == 0 {
            (state, Action::broadcast((1, self.prefix(color, 1))))
        } else {
            (state, Action::idle())
        }
    }

    fn receive(&self, state: &FcState, inbox: &mut Vec<usize>, _: usize, msg: &(usize, usize)) {
        let (level, prefix) = *msg;
        if state.member && prefix == self.prefix(state.color, level) {
            inbox.push(level);
        }
    }

    fn step(&self, _: &NodeInfo, s: &mut FcState, inbox: Vec<usize>, round: usize, _: &mut ChaCha8Rng) -> Action<(usize, usize), bool> {
        let level = (round - 1) / (self.base - 1) + 1;
        let j = (round - 1) % (self.base - 1) + 1;
        if j == 1 {
            s.dominated = false;
        }
        s.dominated |= inbox.contains(&level);
        let digit = self.digit(s.color, level - 1);
        if s.member && digit == j && s.dominated {
            s.member = false;
        }
        let mut action = Action::idle();
        if s.member && digit == j && j < self.base - 1 {
            action = Action::broadcast((level, self.prefix(s.color, level)));
        } else if s.member && j == self.base - 1 && level < self.levels && self.digit(s.color, level) == 0 {
            action = Action::broadcast((level + 1, self.prefix(s.color, level + 1)));
        }
        if round == self.last_round() {
            action.output = Some(s.member);
        }
        action
    }
}

/// A `(2, levels)`-ruling set for the flagged `targets`, in
/// `levels · (b − 1)` rounds where `b = ⌈palette^(1/levels)⌉`.
pub fn ruling_set_from_coloring<T: Topology>(
    topo: &T,
    coloring: &VertexColoring,
    targets: &[bool],
    levels: usize,
) -> Run<RulingSet> {
    assert!(levels >= 1, "need at least one level");
    let base = digit_base(coloring.palette, levels);
    let prog = FromColoring { colors: &coloring.colors, targets, base, levels };
    let (members, stats) = run_sync(topo, &prog, SUBROUTINE_BUDGET, 0).expect("fixed schedule terminates");
    Run::chain(RulingSet { members, targets: targets.to_vec(), alpha: 2, beta: levels }, &[stats])
}

/// `(2, ⌈log₂ Δ⌉)`-ruling set for all vertices: Linial coloring, then the
/// digit merge with `⌈log₂ max(Δ,2)⌉` levels.
pub fn det_ruling_set<T: Topology>(topo: &T) -> Run<RulingSet> {
    let col = linial_coloring(topo, None);
    let levels = ceil_log2(topo.max_degree().max(2));
    let targets = vec![true; topo.n()];
    let rs = ruling_set_from_coloring(topo, &col.value, &targets, levels);
    Run::chain(rs.value, &[col.stats, rs.stats])
}

/// Knobs of the randomized ruling set.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandRulingOptions {
    /// Makes the final validity check fail regardless of the result.
    pub force_reject: bool,
}

/// Each phase every candidate flips a fair coin; heads stay, and tails stay
/// only if no neighboring candidate came up heads.
struct Sparsify {
    phases: usize,
}

impl NodeProgram for Sparsify {
    // (still a candidate, current coin)
    type State = (bool, bool);
    type Msg = ();
    type Inbox = bool;
    type Output = bool;

    fn init(&self, _: &NodeInfo, rng: &mut ChaCha8Rng) -> ((bool, bool), Action<(), bool>) {
        let heads = rng.gen_bool(0.5);
        let action = if heads { Action::broadcast(()) } else { Action::idle() };
        ((true, heads), action)
    }

    fn receive(&self, _: &(bool, bool), inbox: &mut bool, _: usize, _: &()) {
        *inbox = true;
    }

    fn step(&self, _: &NodeInfo, s: &mut (bool, bool), heard_heads: bool, round: usize, rng: &mut ChaCha8Rng) -> Action<(), bool> {
        let (candidate, heads) = *s;
        let keep = candidate && (heads || !heard_heads);
        if round == self.phases || !keep {
            return Action::done(keep);
        }
        let heads = rng.gen_bool(0.5);
        *s = (keep, heads);
        if heads {
            Action::broadcast(())
        } else {
            Action::idle()
        }
    }
}

/// Randomized `(2, β)`-ruling set with `β = P + c`: `P = O(log log Δ)`
/// sparsification phases produce a dominating candidate set `S`, then a
/// Linial coloring of `G[S]` and the digit merge with
/// `c = max(1, min(⌈log₂ Δ⌉, ⌈log₂ log₂ n⌉))` levels finish on `G[S]`.
///
/// The result is checked before it is returned; a failed check yields
/// [`Error::ValidityCheckFailed`] so the caller can retry with a new seed.
pub fn rand_ruling_set<T: Topology>(topo: &T, seed: u64, opts: RandRulingOptions) -> Result<Run<RulingSet>> {
    let n = topo.n();
    let delta = topo.max_degree().max(4);
    let phases = ceil_log2(ceil_log2(delta)).max(1);
    let (candidates, sparse_stats) = run_sync(topo, &Sparsify { phases }, SUBROUTINE_BUDGET, seed)?;
    let col = linial_coloring(topo, Some(&candidates));
    let levels = ceil_log2(delta.max(2)).min(ceil_log2(ceil_log2(n.max(4)))).max(1);
    let rs = ruling_set_from_coloring(topo, &col.value, &candidates, levels);
    let mut value = rs.value;
    value.targets = vec![true; n];
    value.beta = phases + levels;
    let report = check_ruling_set_on(topo, &value);
    if opts.force_reject || !report.pass {
        let why = if opts.force_reject { "forced rejection".to_string() } else { report.to_string() };
        return Err(Error::ValidityCheckFailed(why));
    }
    Ok(Run::chain(value, &[sparse_stats, col.stats, rs.stats]))
}
