//! Linial-style color reduction to `O(Δ²)` colors.
//!
//! A color `x < q^(t+1)` is read as a polynomial of degree at most `t` over
//! `F_q` (its base-`q` digits). Two distinct such polynomials agree on at most
//! `t` points, so with `q > t·Δ` every node finds an evaluation point `a` where
//! it differs from all neighbors and takes `a·q + p_x(a)` as its new color.

use rand_chacha::ChaCha8Rng;

use super::{Run, VertexColoring, SUBROUTINE_BUDGET};
use crate::sim::{run_sync, Action, NodeInfo, NodeProgram, Topology};

/// Final palettes are at most `LINIAL_PALETTE_FACTOR · max(Δ,1)²` (or `n`
/// if that is smaller).
pub const LINIAL_PALETTE_FACTOR: usize = 16;

fn is_prime(q: usize) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

fn next_prime(from: usize) -> usize {
    (from.max(2)..).find(|&q| is_prime(q)).unwrap()
}

/// Smallest `b` with `b^e >= m`.
fn int_root_ceil(m: usize, e: u32) -> usize {
    let mut b = (m as f64).powf(1.0 / e as f64).floor().max(1.0) as usize;
    while b > 1 && (b - 1).checked_pow(e).is_some_and(|p| p >= m) {
        b -= 1;
    }
    while b.checked_pow(e).is_some_and(|p| p < m) {
        b += 1;
    }
    b
}

/// The sequence of `(t, q)` reduction steps applied to an initial palette of
/// `n` colors with maximum degree `delta`, and the resulting palette size.
pub fn linial_schedule(n: usize, delta: usize) -> (Vec<(usize, usize)>, usize) {
    let mut palette = n.max(1);
    let mut steps = Vec::new();
    if delta == 0 {
        return (steps, palette);
    }
    loop {
        let mut best: Option<(usize, usize)> = None;
        for t in 1usize.. {
            let floor = t * delta + 1;
            if best.is_some_and(|(_, q)| floor > q) {
                break;
            }
            let q = next_prime(floor.max(int_root_ceil(palette, (t + 1) as u32)));
            if best.is_none_or(|(_, bq)| q < bq) {
                best = Some((t, q));
            }
        }
        let (t, q) = best.unwrap();
        if q * q >= palette {
            return (steps, palette);
        }
        steps.push((t, q));
        palette = q * q;
    }
}

fn eval(x: usize, t: usize, q: usize, a: usize) -> usize {
    // Horner over the base-q digits, most significant first.
    let mut digits = Vec::with_capacity(t + 1);
    let mut y = x;
    for _ in 0..=t {
        digits.push(y % q);
        y /= q;
    }
    digits.iter().rev().fold(0, |acc, &d| (acc * a + d) % q)
}

fn reduce(x: usize, t: usize, q: usize, nbrs: &[usize]) -> usize {
    let a = (0..q)
        .find(|&a| {
            let px = eval(x, t, q, a);
            nbrs.iter().all(|&y| y == x || eval(y, t, q, a) != px)
        })
        .expect("q > t·Δ leaves a free evaluation point");
    a * q + eval(x, t, q, a)
}

struct Linial<'a> {
    schedule: &'a [(usize, usize)],
    active: Option<&'a [bool]>,
}

impl NodeProgram for Linial<'_> {
    type State = usize;
    type Msg = usize;
    type Inbox = Vec<usize>;
    type Output = usize;

    fn init(&self, info: &NodeInfo, _: &mut ChaCha8Rng) -> (usize, Action<usize, usize>) {
        let active = self.active.is_none_or(|a| a[info.id]);
        if !active {
            return (0, Action::done(0));
        }
        if self.schedule.is_empty() {
            return (info.id, Action::done(info.id));
        }
        (info.id, Action::broadcast(info.id))
    }

    fn receive(&self, _: &usize, inbox: &mut Vec<usize>, _: usize, msg: &usize) {
        inbox.push(*msg);
    }

    fn step(&self, _: &NodeInfo, color: &mut usize, inbox: Vec<usize>, round: usize, _: &mut ChaCha8Rng) -> Action<usize, usize> {
        let (t, q) = self.schedule[round - 1];
        *color = reduce(*color, t, q, &inbox);
        if round == self.schedule.len() {
            Action::done(*color)
        } else {
            Action::broadcast(*color)
        }
    }
}

/// Maximum degree of the subgraph induced by the `active` vertices.
pub(crate) fn induced_max_degree<T: Topology>(topo: &T, active: Option<&[bool]>) -> usize {
    match active {
        None => topo.max_degree(),
        Some(a) => (0..topo.n())
            .filter(|&v| a[v])
            .map(|v| {
                let mut d = 0;
                topo.for_each_neighbor(v, |u| d += a[u] as usize);
                d
            })
            .max()
            .unwrap_or(0),
    }
}

/// Colors the topology (or the subgraph induced by `active`) properly with
/// at most `16·Δ²` colors in `O(log* n)` rounds. Inactive vertices get color 0.
pub fn linial_coloring<T: Topology>(topo: &T, active: Option<&[bool]>) -> Run<VertexColoring> {
    let delta = induced_max_degree(topo, active);
    let (schedule, palette) = linial_schedule(topo.n(), delta);
    let prog = Linial { schedule: &schedule, active };
    let (colors, stats) = run_sync(topo, &prog, SUBROUTINE_BUDGET, 0).expect("fixed schedule terminates");
    Run::chain(VertexColoring { colors, palette }, &[stats])
}
