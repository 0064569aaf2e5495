//! Clusters around ruling-set members, their BFS trees, and classification.

use std::collections::{BTreeMap, VecDeque};

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sim::{run_sync, Action, NodeInfo, NodeProgram};
use crate::symmetry::{Run, RulingSet};

/// A partition of the vertices into clusters, each spanned by a BFS tree
/// rooted at a ruling-set member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    pub root_of: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<usize>,
    /// Sorted edge indices of all tree edges.
    pub tree_edges: Vec<usize>,
    /// Every vertex within `alpha` of a root belongs to that root's cluster.
    pub alpha: usize,
    /// Upper bound on the depth of every tree.
    pub radius: usize,
}

impl Clustering {
    /// Cluster members keyed by root, each list sorted.
    pub fn clusters(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &r) in self.root_of.iter().enumerate() {
            out.entry(r).or_default().push(v);
        }
        out
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.root_of.len()).filter(|&v| self.root_of[v] == v).collect()
    }

    pub fn tree_mask(&self, m: usize) -> Vec<bool> {
        let mut mask = vec![false; m];
        for &e in &self.tree_edges {
            mask[e] = true;
        }
        mask
    }

    /// Vertices of `members` grouped by depth.
    pub fn layers(&self, members: &[usize]) -> Vec<Vec<usize>> {
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for &v in members {
            let d = self.depth[v];
            if layers.len() <= d {
                layers.resize(d + 1, Vec::new());
            }
            layers[d].push(v);
        }
        layers
    }

    /// Tree edges of one cluster grouped by the depth of their upper endpoint.
    pub fn edge_layers(&self, g: &Graph, members: &[usize]) -> Vec<Vec<usize>> {
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for &v in members {
            if let Some(p) = self.parent[v] {
                let d = self.depth[p];
                if layers.len() <= d {
                    layers.resize(d + 1, Vec::new());
                }
                layers[d].push(g.edge_index(v, p).expect("tree edge exists"));
            }
        }
        for l in &mut layers {
            l.sort_unstable();
        }
        layers
    }
}

/// Each vertex adopts the smallest root among the first wave that reaches
/// it, through the smallest neighbor carrying that root.
struct Grow<'a> {
    is_root: &'a [bool],
}

type Joined = (usize, Option<usize>, usize);

impl NodeProgram for Grow<'_> {
    type State = ();
    // (root, depth of sender)
    type Msg = (usize, usize);
    type Inbox = Option<(usize, usize, usize)>;
    type Output = Joined;

    fn init(&self, info: &NodeInfo, _: &mut ChaCha8Rng) -> ((), Action<Self::Msg, Joined>) {
        if self.is_root[info.id] {
            ((), Action::broadcast((info.id, 0)).with_output((info.id, None, 0)))
        } else {
            ((), Action::idle())
        }
    }

    fn receive(&self, _: &(), inbox: &mut Self::Inbox, from: usize, &(root, depth): &Self::Msg) {
        let cand = (root, from, depth + 1);
        if inbox.is_none_or(|best| (cand.0, cand.1) < (best.0, best.1)) {
            *inbox = Some(cand);
        }
    }

    fn step(&self, _: &NodeInfo, _: &mut (), inbox: Self::Inbox, _: usize, _: &mut ChaCha8Rng) -> Action<Self::Msg, Joined> {
        match inbox {
            Some((root, parent, depth)) => Action::broadcast((root, depth)).with_output((root, Some(parent), depth)),
            None => Action::idle(),
        }
    }
}

/// Grows one BFS tree per member of `rs`, a ruling set computed on the
/// `power`-th power of `g`. Every vertex joins a closest member (ties to the
/// smaller root id, then the smaller parent id).
pub fn cluster(g: &Graph, rs: &RulingSet, power: usize) -> Result<Run<Clustering>> {
    let n = g.n();
    let dist = g.bfs_from_set(rs.member_ids());
    if let Some(v) = (0..n).find(|&v| dist[v].is_none()) {
        return Err(Error::NotDominating(v));
    }
    let prog = Grow { is_root: &rs.members };
    let (joined, stats) = run_sync(g, &prog, n + 1, 0)?;
    let mut tree_edges: Vec<usize> = joined
        .iter()
        .enumerate()
        .filter_map(|(v, &(_, p, _))| p.map(|p| g.edge_index(v, p).expect("parent is a neighbor")))
        .collect();
    tree_edges.sort_unstable();
    let value = Clustering {
        root_of: joined.iter().map(|j| j.0).collect(),
        parent: joined.iter().map(|j| j.1).collect(),
        depth: joined.iter().map(|j| j.2).collect(),
        tree_edges,
        alpha: power / 2,
        radius: power * rs.beta,
    };
    Ok(Run { value, rounds: stats.rounds, stats })
}

/// `g` without the tree edges, with the map from new to old edge indices.
pub fn residual_graph(g: &Graph, cl: &Clustering) -> (Graph, Vec<usize>) {
    let tree = cl.tree_mask(g.m());
    g.edge_subgraph(|e| !tree[e])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterClass {
    EasyEvenCycle,
    EasyLowDegree,
    NeedsAssignment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterInfo {
    pub root: usize,
    pub members: Vec<usize>,
    pub class: ClusterClass,
    /// Edge indices of an even cycle inside the cluster, in cycle order.
    pub even_cycle: Option<Vec<usize>>,
    /// A member whose degree is below the maximum degree.
    pub low_degree_vertex: Option<usize>,
}

/// Classifies every cluster, in root order. A cluster with a vertex of
/// less than maximum degree is low-degree; otherwise one whose induced
/// subgraph has an even cycle is even-cycle; the rest need an assignment.
pub fn classify_clusters(g: &Graph, cl: &Clustering) -> Vec<ClusterInfo> {
    let delta = g.max_degree();
    let clusters: Vec<(usize, Vec<usize>)> = cl.clusters().into_iter().collect();
    clusters
        .into_par_iter()
        .map(|(root, members)| {
            if let Some(&x) = members.iter().find(|&&v| g.degree(v) < delta) {
                return ClusterInfo { root, members, class: ClusterClass::EasyLowDegree, even_cycle: None, low_degree_vertex: Some(x) };
            }
            let (sub, map) = g.induced_subgraph(&members);
            match find_even_cycle(&sub) {
                Some(cycle) => {
                    let edges = cycle_edges(g, &cycle.iter().map(|&v| map[v]).collect::<Vec<_>>());
                    ClusterInfo { root, members, class: ClusterClass::EasyEvenCycle, even_cycle: Some(edges), low_degree_vertex: None }
                }
                None => ClusterInfo { root, members, class: ClusterClass::NeedsAssignment, even_cycle: None, low_degree_vertex: None },
            }
        })
        .collect()
}

/// Edge indices along a closed vertex sequence.
pub fn cycle_edges(g: &Graph, cycle: &[usize]) -> Vec<usize> {
    (0..cycle.len())
        .map(|i| g.edge_index(cycle[i], cycle[(i + 1) % cycle.len()]).expect("consecutive cycle vertices are adjacent"))
        .collect()
}

/// Edge sets of the blocks (maximal 2-connected pieces and bridges).
fn blocks(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut out = Vec::new();
    let mut edge_stack = Vec::new();
    let mut time = 0;
    for s in 0..n {
        if disc[s] != usize::MAX {
            continue;
        }
        disc[s] = time;
        low[s] = time;
        time += 1;
        // (vertex, edge to parent, next neighbor position)
        let mut stack = vec![(s, usize::MAX, 0usize)];
        while let Some(&mut (v, pe, ref mut pos)) = stack.last_mut() {
            if *pos < g.degree(v) {
                let (w, e) = (g.neighbors(v)[*pos], g.incident_edges(v)[*pos]);
                *pos += 1;
                if e == pe {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push(e);
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, e, 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        let mut block = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            block.push(e);
                            if e == pe {
                                break;
                            }
                        }
                        out.push(block);
                    }
                }
            }
        }
    }
    out
}

/// A shortest path from `a` to the nearest vertex satisfying `stop`, never
/// entering `blocked`.
fn path_within(adj: &BTreeMap<usize, Vec<usize>>, a: usize, stop: impl Fn(usize) -> bool, blocked: usize) -> Option<Vec<usize>> {
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    prev.insert(a, a);
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x != a && stop(x) {
            let mut path = vec![x];
            let mut y = x;
            while y != a {
                y = prev[&y];
                path.push(y);
            }
            path.reverse();
            return Some(path);
        }
        for &y in &adj[&x] {
            if y != blocked && !prev.contains_key(&y) {
                prev.insert(y, x);
                queue.push_back(y);
            }
        }
    }
    None
}

/// Some even cycle inside a 2-connected block that is not itself a cycle:
/// take any cycle, and if it is odd, an ear on it splits it into two cycles
/// one of which is even.
fn even_cycle_in_block(g: &Graph, block: &[usize]) -> Vec<usize> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &e in block {
        let id = g.edge(e);
        adj.entry(id.u).or_default().push(id.v);
        adj.entry(id.v).or_default().push(id.u);
    }
    // A cycle through the first edge: the edge plus a path avoiding it.
    let first = g.edge(block[0]);
    let mut adj_minus = adj.clone();
    adj_minus.get_mut(&first.u).unwrap().retain(|&y| y != first.v);
    adj_minus.get_mut(&first.v).unwrap().retain(|&y| y != first.u);
    let cycle = path_within(&adj_minus, first.u, |x| x == first.v, usize::MAX).expect("block edges lie on cycles");
    if cycle.len() % 2 == 0 {
        return cycle;
    }
    let len = cycle.len();
    let pos: BTreeMap<usize, usize> = cycle.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let on_cycle = |a: usize, b: usize| {
        let (i, j) = (pos[&a], pos[&b]);
        (i + 1) % len == j || (j + 1) % len == i
    };
    for (i, &c) in cycle.iter().enumerate() {
        for &w in &adj[&c] {
            if pos.contains_key(&w) && on_cycle(c, w) {
                continue;
            }
            // Ear from c to another cycle vertex, internally disjoint from the cycle.
            let ear = if pos.contains_key(&w) {
                vec![c, w]
            } else {
                let mut rest = path_within(&adj, w, |x| pos.contains_key(&x) && x != c, c).expect("block is 2-connected");
                rest.insert(0, c);
                rest
            };
            let y = *ear.last().unwrap();
            let j = pos[&y];
            // Forward arc from c to y, closed by the ear backwards.
            let forward: Vec<usize> = (0..=(j + len - i) % len).map(|t| cycle[(i + t) % len]).collect();
            let backward: Vec<usize> = (0..=(i + len - j) % len).map(|t| cycle[(j + t) % len]).collect();
            let inner: Vec<usize> = ear[1..ear.len() - 1].iter().rev().copied().collect();
            let mut a = forward;
            a.extend(&inner);
            if a.len().is_multiple_of(2) {
                return a;
            }
            let mut b = backward;
            b.extend(ear[1..ear.len() - 1].iter().copied());
            debug_assert_eq!(b.len() % 2, 0);
            return b;
        }
    }
    unreachable!("a block with more edges than vertices has a chord or an ear")
}

/// An even cycle of `g` as a closed vertex sequence, if one exists. A graph
/// has no even cycle exactly when each of its blocks is a bridge or an odd
/// cycle.
pub fn find_even_cycle(g: &Graph) -> Option<Vec<usize>> {
    for block in blocks(g) {
        if block.len() < 3 {
            continue;
        }
        let mut vs: Vec<usize> = block.iter().flat_map(|&e| [g.edge(e).u, g.edge(e).v]).collect();
        vs.sort_unstable();
        vs.dedup();
        if block.len() == vs.len() {
            if block.len() % 2 == 0 {
                // The block is a cycle; walk it.
                return Some(even_cycle_in_block(g, &block));
            }
        } else {
            return Some(even_cycle_in_block(g, &block));
        }
    }
    None
}

/// The deepest-populated choice of leaves: the depth layer with the most
/// tree leaves (ties to the shallower layer).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafLayer {
    pub depth: usize,
    pub leaves: Vec<usize>,
}

/// Default minimum number of proposing leaves per cluster.
pub fn default_leaf_threshold(delta: usize) -> usize {
    (2 * delta * delta).max(4)
}

/// Picks the depth `k ≥ 1` with the most leaves of the cluster tree of
/// `root` and returns them if there are at least `threshold`.
pub fn select_proposal_leaves(cl: &Clustering, members: &[usize], threshold: usize) -> Result<LeafLayer> {
    let root = cl.root_of[members[0]];
    let mut has_child = BTreeMap::new();
    for &v in members {
        if let Some(p) = cl.parent[v] {
            has_child.insert(p, true);
        }
    }
    let mut by_depth: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &v in members {
        if cl.depth[v] >= 1 && !has_child.contains_key(&v) {
            by_depth.entry(cl.depth[v]).or_default().push(v);
        }
    }
    let best = by_depth.into_iter().fold(None::<LeafLayer>, |best, (depth, leaves)| match best {
        Some(b) if b.leaves.len() >= leaves.len() => Some(b),
        _ => Some(LeafLayer { depth, leaves }),
    });
    match best {
        Some(layer) if layer.leaves.len() >= threshold => Ok(layer),
        other => Err(Error::InsufficientLeaves { root, needed: threshold, best: other.map_or(0, |l| l.leaves.len()) }),
    }
}
