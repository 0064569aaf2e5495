//! Independent structural checkers.
//!
//! Every checker recomputes what it needs from the graph primitives alone and
//! reports the first violation it finds.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::clustering::Clustering;
use crate::coloring::{Color, PartialEdgeColoring};
use crate::graph::Graph;
use crate::hso::{Hypergraph, Orientation};
use crate::sim::Topology;
use crate::symmetry::{EdgeSet, RulingSet, VertexColoring};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub check_name: String,
    pub pass: bool,
    pub counterexample: Option<String>,
    /// Number of items inspected.
    pub checked: usize,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        CheckReport { check_name: name.to_string(), pass: true, counterexample: None, checked: 0 }
    }

    fn fail(&mut self, witness: String) {
        if self.pass {
            self.pass = false;
            self.counterexample = Some(witness);
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "{}: ok ({} checked)", self.check_name, self.checked),
            Some(w) => write!(f, "{}: FAILED: {}", self.check_name, w),
        }
    }
}

/// Length of a shortest cycle, `None` for forests.
pub fn girth(g: &Graph) -> Option<usize> {
    let n = g.n();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut touched = Vec::new();
    for s in 0..n {
        for &v in &touched {
            dist[v] = usize::MAX;
            parent[v] = usize::MAX;
        }
        touched.clear();
        dist[s] = 0;
        touched.push(s);
        let mut queue = VecDeque::from([s]);
        'bfs: while let Some(x) = queue.pop_front() {
            if 2 * dist[x] + 1 >= best {
                break;
            }
            for &y in g.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    touched.push(y);
                    queue.push_back(y);
                } else if parent[x] != y {
                    best = best.min(dist[x] + dist[y] + 1);
                    if best == 3 {
                        break 'bfs;
                    }
                }
            }
        }
    }
    (best != usize::MAX).then_some(best)
}

pub fn check_vertex_coloring(g: &Graph, c: &VertexColoring) -> CheckReport {
    let mut r = CheckReport::new("vertex-coloring");
    for v in 0..g.n() {
        r.checked += 1;
        if c.colors[v] >= c.palette.max(1) {
            r.fail(format!("vertex {v} has color {} outside palette {}", c.colors[v], c.palette));
        }
    }
    for e in g.edges() {
        if c.colors[e.u] == c.colors[e.v] {
            r.fail(format!("edge {e} joins two vertices of color {}", c.colors[e.u]));
        }
    }
    r
}

/// Adjacent colored edges differ; optionally every edge is colored and all
/// colors lie in `1..=palette`.
pub fn check_proper_coloring(g: &Graph, c: &PartialEdgeColoring, palette: Option<usize>, total: bool) -> CheckReport {
    let mut r = CheckReport::new("proper-edge-coloring");
    for v in 0..g.n() {
        let mut seen: Vec<(Color, usize)> = Vec::new();
        for &e in g.incident_edges(v) {
            if let Some(col) = c.get(e) {
                if let Some(&(_, f)) = seen.iter().find(|(x, _)| *x == col) {
                    r.fail(format!("edges {} and {} share vertex {v} and color {col}", g.edge(f), g.edge(e)));
                }
                seen.push((col, e));
            }
        }
    }
    for e in 0..g.m() {
        r.checked += 1;
        match c.get(e) {
            None if total => r.fail(format!("edge {} is uncolored", g.edge(e))),
            Some(col) if col == 0 || palette.is_some_and(|p| col > p) => {
                r.fail(format!("edge {} has color {col} outside the palette", g.edge(e)))
            }
            _ => {}
        }
    }
    r
}

fn bounded_bfs<T: Topology>(topo: &T, sources: &[usize], radius: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; topo.n()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(x) = queue.pop_front() {
        if dist[x] == radius {
            continue;
        }
        let d = dist[x] + 1;
        topo.for_each_neighbor(x, |y| {
            if dist[y] == usize::MAX {
                dist[y] = d;
                queue.push_back(y);
            }
        });
    }
    dist
}

/// Ruling-set check with distances measured in the topology itself.
pub fn check_ruling_set_on<T: Topology>(topo: &T, rs: &RulingSet) -> CheckReport {
    let mut r = CheckReport::new("ruling-set");
    let members: Vec<usize> = (0..topo.n()).filter(|&v| rs.members[v]).collect();
    for &m in &members {
        r.checked += 1;
        let dist = bounded_bfs(topo, &[m], rs.alpha.saturating_sub(1));
        if let Some(other) = members.iter().find(|&&o| o != m && dist[o] != usize::MAX) {
            r.fail(format!("members {m} and {other} are closer than {}", rs.alpha));
        }
    }
    let dist = bounded_bfs(topo, &members, rs.beta);
    for v in 0..topo.n() {
        if rs.targets[v] {
            r.checked += 1;
            if dist[v] == usize::MAX {
                r.fail(format!("vertex {v} is farther than {} from every member", rs.beta));
            }
        }
    }
    r
}

/// Ruling-set check in `G^k`, computed by BFS in `g` (a distance `d` in `g`
/// is `⌈d/k⌉` in `G^k`).
pub fn check_ruling_set(g: &Graph, k: usize, rs: &RulingSet) -> CheckReport {
    let mut r = CheckReport::new("ruling-set");
    let members: Vec<usize> = (0..g.n()).filter(|&v| rs.members[v]).collect();
    let indep_radius = k * rs.alpha.saturating_sub(1);
    for &m in &members {
        r.checked += 1;
        let dist = g.bfs_bounded(m, indep_radius);
        if let Some(other) = members.iter().find(|&&o| o != m && dist[o].is_some()) {
            r.fail(format!("members {m} and {other} are within distance {indep_radius} in the base graph"));
        }
    }
    let dist = bounded_bfs(g, &members, k * rs.beta);
    for v in 0..g.n() {
        if rs.targets[v] {
            r.checked += 1;
            if dist[v] == usize::MAX {
                r.fail(format!("vertex {v} is not within {} hops of a member", k * rs.beta));
            }
        }
    }
    r
}

/// No two members share an endpoint; with `maximal`, every other edge
/// touches a member.
pub fn check_matching(g: &Graph, es: &EdgeSet, maximal: bool) -> CheckReport {
    let mut r = CheckReport::new(if maximal { "maximal-matching" } else { "matching" });
    let mut covered = vec![None; g.n()];
    for e in 0..g.m() {
        if !es.members[e] {
            continue;
        }
        r.checked += 1;
        let id = g.edge(e);
        for w in [id.u, id.v] {
            if let Some(f) = covered[w] {
                r.fail(format!("edges {} and {id} share vertex {w}", g.edge(f)));
            }
            covered[w] = Some(e);
        }
    }
    if maximal {
        for (e, id) in g.edges().iter().enumerate() {
            r.checked += 1;
            if !es.members[e] && covered[id.u].is_none() && covered[id.v].is_none() {
                r.fail(format!("edge {id} could be added"));
            }
        }
    }
    r
}

/// Matching check for an explicit list of edge indices.
pub fn check_matching_list(g: &Graph, edges: &[usize]) -> CheckReport {
    let mut members = vec![false; g.m()];
    let mut r = CheckReport::new("matching");
    for &e in edges {
        if members[e] {
            r.fail(format!("edge {} listed twice", g.edge(e)));
        }
        members[e] = true;
    }
    let inner = check_matching(g, &EdgeSet { members, kind: crate::symmetry::EdgeSetKind::Matching }, false);
    if !r.pass {
        return r;
    }
    inner
}

/// Members pairwise non-adjacent and every edge within distance 2 of a
/// member, where the distance between edges is the minimum distance between
/// their endpoints.
pub fn check_two_edge_ruling(g: &Graph, es: &EdgeSet) -> CheckReport {
    let mut r = check_matching(g, es, false);
    r.check_name = "two-edge-ruling".into();
    let mut ends = Vec::new();
    for (e, id) in g.edges().iter().enumerate() {
        if es.members[e] {
            ends.push(id.u);
            ends.push(id.v);
        }
    }
    let dist = bounded_bfs(g, &ends, 2);
    for id in g.edges() {
        r.checked += 1;
        if dist[id.u] == usize::MAX && dist[id.v] == usize::MAX {
            r.fail(format!("edge {id} is farther than 2 from every member"));
        }
    }
    r
}

/// Partition, tree structure, `N^alpha(r) ⊆ C(r)`, depth at most the radius
/// bound and tree diameter at most twice that bound.
pub fn check_clustering(g: &Graph, cl: &Clustering) -> CheckReport {
    let mut r = CheckReport::new("clustering");
    let n = g.n();
    if cl.root_of.len() != n || cl.parent.len() != n || cl.depth.len() != n {
        r.fail("per-vertex arrays have the wrong length".into());
        return r;
    }
    let mut tree = vec![false; g.m()];
    for &e in &cl.tree_edges {
        tree[e] = true;
    }
    let mut tree_deg = vec![0usize; n];
    for v in 0..n {
        r.checked += 1;
        let root = cl.root_of[v];
        if cl.root_of[root] != root {
            r.fail(format!("root {root} of {v} is not its own root"));
        }
        match cl.parent[v] {
            None => {
                if v != root || cl.depth[v] != 0 {
                    r.fail(format!("vertex {v} has no parent but is not a root at depth 0"));
                }
            }
            Some(p) => match g.edge_index(v, p) {
                Some(e) if tree[e] => {
                    tree_deg[v] += 1;
                    tree_deg[p] += 1;
                    if cl.root_of[p] != root {
                        r.fail(format!("tree edge {v}-{p} crosses clusters"));
                    }
                    if cl.depth[p] + 1 != cl.depth[v] {
                        r.fail(format!("depth of {v} is not one more than its parent's"));
                    }
                }
                _ => r.fail(format!("parent edge {v}-{p} is not a tree edge")),
            },
        }
        if cl.depth[v] > cl.radius {
            r.fail(format!("vertex {v} at depth {} exceeds radius {}", cl.depth[v], cl.radius));
        }
    }
    let parent_edges = cl.parent.iter().filter(|p| p.is_some()).count();
    if parent_edges != cl.tree_edges.len() {
        r.fail(format!("{} tree edges but {} parent links", cl.tree_edges.len(), parent_edges));
    }
    // Root containment and diameter, per cluster.
    let mut members: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..n {
        members.entry(cl.root_of[v]).or_default().push(v);
    }
    for (&root, vs) in &members {
        let ball = g.bfs_bounded(root, cl.alpha);
        if let Some(w) = (0..n).find(|&w| ball[w].is_some() && cl.root_of[w] != root) {
            r.fail(format!("vertex {w} is within {} of root {root} but outside its cluster", cl.alpha));
        }
        if vs.len() >= 2 && vs.iter().any(|&v| tree_deg[v] == 0) {
            r.fail(format!("cluster {root} has a vertex without tree edge"));
        }
        // Tree diameter by double BFS inside the tree.
        let (sub, map) = g.induced_subgraph(vs);
        let (tree_sub, _) = sub.edge_subgraph(|e| {
            let id = sub.edge(e);
            g.edge_index(map[id.u], map[id.v]).is_some_and(|ge| tree[ge])
        });
        let far = |s: usize| -> (usize, usize) {
            let d = tree_sub.bfs_distances(s);
            let mut best = (0, s);
            for (i, x) in d.iter().enumerate() {
                match x {
                    Some(x) if *x > best.0 => best = (*x, i),
                    None => {}
                    _ => {}
                }
            }
            best
        };
        if tree_sub.bfs_distances(0).iter().any(Option::is_none) {
            r.fail(format!("tree of cluster {root} is disconnected"));
            continue;
        }
        let (_, a) = far(0);
        let (diam, _) = far(a);
        if diam > 2 * cl.radius {
            r.fail(format!("tree of cluster {root} has diameter {diam} > {}", 2 * cl.radius));
        }
    }
    r
}

/// Winners lie in their hyperedges and every group of `group` consecutive
/// vertices (a merged cluster) owns at least `required` hyperedges.
pub fn check_sinkless(h: &Hypergraph, o: &Orientation, group: usize, required: usize) -> CheckReport {
    let mut r = CheckReport::new("sinkless-orientation");
    let mut out = vec![0usize; h.n_vertices.div_ceil(group.max(1))];
    for (e, members) in h.edges.iter().enumerate() {
        r.checked += 1;
        let w = o.winner[e];
        if !members.contains(&w) {
            r.fail(format!("winner {w} of hyperedge {e} is not incident"));
            continue;
        }
        out[w / group.max(1)] += 1;
    }
    for (c, &k) in out.iter().enumerate() {
        if k < required {
            r.fail(format!("vertex group {c} has {k} outgoing hyperedges, needs {required}"));
        }
    }
    r
}

/// Distinct colors on colored edges incident to `layer`.
pub fn layer_color_count(g: &Graph, c: &PartialEdgeColoring, layer: &[usize]) -> usize {
    let mut colors: Vec<Color> = layer.iter().flat_map(|&v| c.colors_at(g, v)).collect();
    colors.sort_unstable();
    colors.dedup();
    colors.len()
}

/// Layers `k` (indices into `layers`) with at least `delta` distinct colors on
/// incident colored edges; passes when one exists.
pub fn check_colorful_condition(g: &Graph, c: &PartialEdgeColoring, layers: &[Vec<usize>], delta: usize) -> (CheckReport, Vec<usize>) {
    let mut r = CheckReport::new("colorful-condition");
    let good: Vec<usize> = layers
        .iter()
        .enumerate()
        .filter(|(_, layer)| {
            r.checked += 1;
            layer_color_count(g, c, layer) >= delta
        })
        .map(|(k, _)| k)
        .collect();
    if good.is_empty() {
        r.fail(format!("no layer sees {delta} distinct colors"));
    }
    (r, good)
}
