//! Round-synchronous LOCAL-model simulator.
//!
//! A [`NodeProgram`] is instantiated once per vertex of a [`Topology`]. In
//! every round each running node first receives the messages its neighbors
//! sent in the previous round, then takes one step. A node that produces an
//! output stops: its last outbox is still delivered but it never acts again.
//! The number of rounds reported is the last round in which some node
//! terminated (so programs that answer during initialization use 0 rounds).

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// What a node knows about itself before the first round.
#[derive(Debug, Clone, Copy)]
pub struct NodeInfo {
    pub id: usize,
    pub degree: usize,
    pub n: usize,
    pub max_degree: usize,
}

#[derive(Debug, Clone)]
pub enum Outbox<M> {
    Silent,
    Broadcast(M),
    To(Vec<(usize, M)>),
}

#[derive(Debug, Clone)]
pub struct Action<M, O> {
    pub send: Outbox<M>,
    pub output: Option<O>,
}

impl<M, O> Action<M, O> {
    pub fn idle() -> Self {
        Action { send: Outbox::Silent, output: None }
    }

    pub fn broadcast(msg: M) -> Self {
        Action { send: Outbox::Broadcast(msg), output: None }
    }

    pub fn done(output: O) -> Self {
        Action { send: Outbox::Silent, output: Some(output) }
    }

    pub fn with_output(mut self, output: O) -> Self {
        self.output = Some(output);
        self
    }
}

/// A distributed algorithm, written from the point of view of one node.
///
/// Incoming messages are folded into an `Inbox` value with [`receive`]
/// before [`step`] sees them, which lets programs keep only the aggregate
/// they need.
///
/// [`receive`]: NodeProgram::receive
/// [`step`]: NodeProgram::step
pub trait NodeProgram: Sync {
    type State: Send;
    type Msg: Send + Sync;
    type Inbox: Default + Send;
    type Output: Send;

    fn init(&self, info: &NodeInfo, rng: &mut ChaCha8Rng) -> (Self::State, Action<Self::Msg, Self::Output>);

    fn receive(&self, state: &Self::State, inbox: &mut Self::Inbox, from: usize, msg: &Self::Msg);

    fn step(
        &self,
        info: &NodeInfo,
        state: &mut Self::State,
        inbox: Self::Inbox,
        round: usize,
        rng: &mut ChaCha8Rng,
    ) -> Action<Self::Msg, Self::Output>;

    /// Informational size of a message in bytes.
    fn message_len(&self, _msg: &Self::Msg) -> usize {
        std::mem::size_of::<Self::Msg>()
    }
}

/// The communication graph a program runs on.
pub trait Topology: Sync {
    fn n(&self) -> usize;
    fn degree(&self, v: usize) -> usize;
    fn max_degree(&self) -> usize;
    fn for_each_neighbor<F: FnMut(usize)>(&self, v: usize, f: F);
    fn is_neighbor(&self, u: usize, v: usize) -> bool;
    /// Base-graph rounds needed to simulate one round on this topology.
    fn overhead(&self) -> usize {
        1
    }
}

impl Topology for Graph {
    fn n(&self) -> usize {
        Graph::n(self)
    }

    fn degree(&self, v: usize) -> usize {
        Graph::degree(self, v)
    }

    fn max_degree(&self) -> usize {
        Graph::max_degree(self)
    }

    fn for_each_neighbor<F: FnMut(usize)>(&self, v: usize, mut f: F) {
        for &u in self.neighbors(v) {
            f(u);
        }
    }

    fn is_neighbor(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v)
    }
}

/// The power graph `G^k` without materializing its edge list: each vertex's
/// `k`-ball is stored as a bitset.
pub struct PowerView<'a> {
    g: &'a Graph,
    k: usize,
    words: usize,
    balls: Vec<u64>,
    degrees: Vec<usize>,
}

impl<'a> PowerView<'a> {
    pub fn new(g: &'a Graph, k: usize) -> Self {
        assert!(k >= 1, "power must be positive");
        let n = g.n();
        let words = n.div_ceil(64).max(1);
        let mut cur = vec![0u64; n * words];
        for v in 0..n {
            cur[v * words + v / 64] |= 1 << (v % 64);
        }
        let mut stable = false;
        for _ in 0..k {
            if stable {
                break;
            }
            let mut next = cur.clone();
            for v in 0..n {
                let dst = v * words;
                for &u in g.neighbors(v) {
                    let src = u * words;
                    for w in 0..words {
                        next[dst + w] |= cur[src + w];
                    }
                }
            }
            stable = next == cur;
            cur = next;
        }
        let degrees = (0..n)
            .map(|v| cur[v * words..(v + 1) * words].iter().map(|w| w.count_ones() as usize).sum::<usize>() - 1)
            .collect();
        PowerView { g, k, words, balls: cur, degrees }
    }

    pub fn base(&self) -> &Graph {
        self.g
    }

    pub fn power(&self) -> usize {
        self.k
    }

    fn ball(&self, v: usize) -> &[u64] {
        &self.balls[v * self.words..(v + 1) * self.words]
    }

    /// Neighbors of `v` in `G^k`, ascending.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degrees[v]);
        self.for_each_neighbor(v, |u| out.push(u));
        out
    }
}

impl Topology for PowerView<'_> {
    fn n(&self) -> usize {
        self.g.n()
    }

    fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    fn for_each_neighbor<F: FnMut(usize)>(&self, v: usize, mut f: F) {
        for (w, &bits) in self.ball(v).iter().enumerate() {
            let mut b = bits;
            while b != 0 {
                let u = w * 64 + b.trailing_zeros() as usize;
                b &= b - 1;
                if u != v {
                    f(u);
                }
            }
        }
    }

    fn is_neighbor(&self, u: usize, v: usize) -> bool {
        u != v && self.ball(u)[v / 64] >> (v % 64) & 1 == 1
    }

    fn overhead(&self) -> usize {
        self.k
    }
}

/// Clusters of a base graph treated as single nodes. Two virtual nodes are
/// adjacent when a base edge joins their vertex sets; one virtual round costs
/// `2r + 1` base rounds for clusters of radius `r` (gather, compute, scatter).
pub struct VirtualLayer {
    pub members: Vec<Vec<usize>>,
    pub graph: Graph,
    pub overhead: usize,
}

impl VirtualLayer {
    /// Builds the layer. Every member set must be nonempty, disjoint from the
    /// others and connected in `base`.
    pub fn new(base: &Graph, members: Vec<Vec<usize>>, radius: usize) -> Result<Self> {
        let mut owner = vec![usize::MAX; base.n()];
        for (i, set) in members.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidGraph(format!("virtual node {i} is empty")));
            }
            for &v in set {
                if owner[v] != usize::MAX {
                    return Err(Error::InvalidGraph(format!("vertex {v} in two virtual nodes")));
                }
                owner[v] = i;
            }
            let (sub, _) = base.induced_subgraph(set);
            if sub.bfs_distances(0).iter().any(Option::is_none) {
                return Err(Error::InvalidGraph(format!("virtual node {i} is disconnected")));
            }
        }
        let mut pairs = Vec::new();
        for e in base.edges() {
            let (a, b) = (owner[e.u], owner[e.v]);
            if a != usize::MAX && b != usize::MAX && a != b {
                pairs.push((a.min(b), a.max(b)));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let graph = Graph::from_edges(members.len(), pairs)?;
        Ok(VirtualLayer { members, graph, overhead: 2 * radius + 1 })
    }

    /// Every vertex its own virtual node.
    pub fn singletons(base: &Graph) -> Self {
        VirtualLayer {
            members: (0..base.n()).map(|v| vec![v]).collect(),
            graph: base.clone(),
            overhead: 1,
        }
    }
}

/// Rounds consumed by one phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhaseRecord {
    pub phase: String,
    pub virtual_rounds: usize,
    pub base_rounds: usize,
    pub overhead: usize,
    #[serde(skip)]
    pub wall_ms: f64,
}

/// Per-phase round accounting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundTrace {
    pub phases: Vec<PhaseRecord>,
    pub max_message_bytes: usize,
}

impl RoundTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, phase: &str, virtual_rounds: usize, overhead: usize) {
        self.phases.push(PhaseRecord {
            phase: phase.to_string(),
            virtual_rounds,
            base_rounds: virtual_rounds * overhead,
            overhead,
            wall_ms: 0.0,
        });
    }

    /// Records a phase and stamps the time elapsed since `started`.
    pub fn record_timed(&mut self, phase: &str, virtual_rounds: usize, overhead: usize, started: Instant) {
        self.record(phase, virtual_rounds, overhead);
        self.phases.last_mut().unwrap().wall_ms = started.elapsed().as_secs_f64() * 1e3;
    }

    pub fn absorb(&mut self, phase: &str, stats: &RunStats, overhead: usize) {
        self.record(phase, stats.rounds, overhead);
        self.max_message_bytes = self.max_message_bytes.max(stats.max_message_bytes);
    }

    pub fn total_rounds(&self) -> usize {
        self.phases.iter().map(|p| p.base_rounds).sum()
    }

    /// Base rounds summed over all records with the given label.
    pub fn rounds_of(&self, phase: &str) -> usize {
        self.phases.iter().filter(|p| p.phase == phase).map(|p| p.base_rounds).sum()
    }

    /// One JSON object per phase followed by a summary line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for p in &self.phases {
            out.push_str(&serde_json::to_string(p).expect("phase record serializes"));
            out.push('\n');
        }
        let summary = serde_json::json!({
            "totalRounds": self.total_rounds(),
            "maxMessageBytes": self.max_message_bytes,
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }
}

/// Statistics of a single simulator run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub rounds: usize,
    pub messages: usize,
    pub max_message_bytes: usize,
}

struct Slot<P: NodeProgram> {
    info: NodeInfo,
    state: P::State,
    inbox: P::Inbox,
    outbox: Outbox<P::Msg>,
    output: Option<P::Output>,
    rng: ChaCha8Rng,
}

fn node_rng(seed: u64, v: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(v as u64);
    rng
}

fn start<T: Topology, P: NodeProgram>(topo: &T, prog: &P, seed: u64) -> Vec<Slot<P>> {
    let n = topo.n();
    let max_degree = topo.max_degree();
    (0..n)
        .into_par_iter()
        .map(|v| {
            let info = NodeInfo { id: v, degree: topo.degree(v), n, max_degree };
            let mut rng = node_rng(seed, v);
            let (state, action) = prog.init(&info, &mut rng);
            Slot { info, state, inbox: P::Inbox::default(), outbox: action.send, output: action.output, rng }
        })
        .collect()
}

fn deliver<T: Topology, P: NodeProgram>(topo: &T, prog: &P, slots: &mut [Slot<P>], stats: &mut RunStats) {
    for u in 0..slots.len() {
        let outbox = std::mem::replace(&mut slots[u].outbox, Outbox::Silent);
        match outbox {
            Outbox::Silent => {}
            Outbox::Broadcast(msg) => {
                stats.max_message_bytes = stats.max_message_bytes.max(prog.message_len(&msg));
                topo.for_each_neighbor(u, |w| {
                    let s = &mut slots[w];
                    if s.output.is_none() {
                        prog.receive(&s.state, &mut s.inbox, u, &msg);
                    }
                    stats.messages += 1;
                });
            }
            Outbox::To(list) => {
                for (w, msg) in list {
                    debug_assert!(topo.is_neighbor(u, w), "{u} sent to non-neighbor {w}");
                    stats.max_message_bytes = stats.max_message_bytes.max(prog.message_len(&msg));
                    stats.messages += 1;
                    let s = &mut slots[w];
                    if s.output.is_none() {
                        prog.receive(&s.state, &mut s.inbox, u, &msg);
                    }
                }
            }
        }
    }
}

fn advance<P: NodeProgram>(prog: &P, slots: &mut [Slot<P>], round: usize) -> bool {
    slots
        .par_iter_mut()
        .filter(|s| s.output.is_none())
        .map(|s| {
            let inbox = std::mem::take(&mut s.inbox);
            let action = prog.step(&s.info, &mut s.state, inbox, round, &mut s.rng);
            s.outbox = action.send;
            s.output = action.output;
            s.output.is_some()
        })
        .reduce(|| false, |a, b| a | b)
}

/// Runs `prog` on every vertex of `topo` until all nodes have produced an
/// output. Returns the outputs in vertex order.
pub fn run_sync<T: Topology, P: NodeProgram>(
    topo: &T,
    prog: &P,
    max_rounds: usize,
    seed: u64,
) -> Result<(Vec<P::Output>, RunStats)> {
    let mut slots = start(topo, prog, seed);
    let mut stats = RunStats::default();
    let mut round = 0;
    loop {
        let running = slots.iter().filter(|s| s.output.is_none()).count();
        if running == 0 {
            break;
        }
        if round == max_rounds {
            return Err(Error::RoundBudgetExceeded { budget: max_rounds, unterminated: running });
        }
        round += 1;
        deliver(topo, prog, &mut slots, &mut stats);
        if advance(prog, &mut slots, round) {
            stats.rounds = round;
        }
    }
    let outputs = slots.into_iter().map(|s| s.output.expect("all nodes terminated")).collect();
    Ok((outputs, stats))
}

/// Runs exactly `rounds` rounds and returns every node's state afterwards
/// (terminated nodes keep their final state).
pub fn run_for<T: Topology, P: NodeProgram>(topo: &T, prog: &P, rounds: usize, seed: u64) -> Vec<P::State> {
    let mut slots = start(topo, prog, seed);
    let mut stats = RunStats::default();
    for round in 1..=rounds {
        deliver(topo, prog, &mut slots, &mut stats);
        advance(prog, &mut slots, round);
    }
    slots.into_iter().map(|s| s.state).collect()
}

/// Runs `prog` on the virtual graph of `layer`; the reported rounds are
/// virtual, multiply by `layer.overhead` for base rounds.
pub fn run_on_virtual<P: NodeProgram>(
    layer: &VirtualLayer,
    prog: &P,
    max_rounds: usize,
    seed: u64,
) -> Result<(Vec<P::Output>, RunStats)> {
    run_sync(&layer.graph, prog, max_rounds, seed)
}

/// What a vertex knows after gathering its `k`-neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallView {
    /// Vertices of the ball, ascending.
    pub vertices: Vec<usize>,
    /// Subgraph induced by `vertices`, with local index `i` standing for
    /// `vertices[i]`.
    pub graph: Graph,
}

struct Gather<'a> {
    g: &'a Graph,
    k: usize,
}

impl NodeProgram for Gather<'_> {
    // Known adjacency lists, keyed by vertex.
    type State = std::collections::BTreeMap<usize, Vec<usize>>;
    type Msg = Vec<(usize, Vec<usize>)>;
    type Inbox = Vec<(usize, Vec<usize>)>;
    type Output = BallView;

    fn init(&self, info: &NodeInfo, _rng: &mut ChaCha8Rng) -> (Self::State, Action<Self::Msg, Self::Output>) {
        let own = self.g.neighbors(info.id).to_vec();
        let mut known = std::collections::BTreeMap::new();
        known.insert(info.id, own.clone());
        if self.k == 0 {
            let view = self.view(&known, info.id);
            return (known, Action::done(view));
        }
        (known, Action::broadcast(vec![(info.id, own)]))
    }

    fn receive(&self, state: &Self::State, inbox: &mut Self::Inbox, _from: usize, msg: &Self::Msg) {
        inbox.extend(msg.iter().filter(|(v, _)| !state.contains_key(v)).cloned());
    }

    fn step(
        &self,
        info: &NodeInfo,
        state: &mut Self::State,
        inbox: Self::Inbox,
        round: usize,
        _rng: &mut ChaCha8Rng,
    ) -> Action<Self::Msg, Self::Output> {
        let mut fresh = Vec::new();
        for (v, adj) in inbox {
            if let std::collections::btree_map::Entry::Vacant(e) = state.entry(v) {
                e.insert(adj.clone());
                fresh.push((v, adj));
            }
        }
        if round == self.k {
            Action::done(self.view(state, info.id))
        } else {
            Action::broadcast(fresh)
        }
    }

    fn message_len(&self, msg: &Self::Msg) -> usize {
        msg.iter().map(|(_, a)| 8 * (1 + a.len())).sum()
    }
}

impl Gather<'_> {
    fn view(&self, known: &std::collections::BTreeMap<usize, Vec<usize>>, center: usize) -> BallView {
        // Distances from the center using only the gathered lists.
        let mut dist = std::collections::BTreeMap::from([(center, 0usize)]);
        let mut queue = std::collections::VecDeque::from([center]);
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            if d == self.k {
                continue;
            }
            for &y in known.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(y) {
                    e.insert(d + 1);
                    queue.push_back(y);
                }
            }
        }
        let vertices: Vec<usize> = dist.keys().copied().collect();
        let local = |v: usize| vertices.binary_search(&v).ok();
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &known[&v] {
                if let Some(j) = local(w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        let graph = Graph::from_edges(vertices.len(), edges).expect("ball of a simple graph is simple");
        BallView { vertices, graph }
    }
}

/// Every vertex collects the subgraph induced by its `k`-ball in exactly `k`
/// rounds.
pub fn gather_ball(g: &Graph, k: usize) -> Result<(Vec<BallView>, RunStats)> {
    run_sync(g, &Gather { g, k }, k, 0)
}
