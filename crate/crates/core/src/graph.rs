//! Static undirected simple graphs with dense vertex ids and canonical edges.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected edge in canonical form `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    pub u: usize,
    pub v: usize,
}

impl EdgeId {
    /// Canonicalizes the endpoint order. Panics on a self-loop.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "self-loop {a}");
        if a < b {
            EdgeId { u: a, v: b }
        } else {
            EdgeId { u: b, v: a }
        }
    }

    pub fn contains(&self, w: usize) -> bool {
        self.u == w || self.v == w
    }

    /// The endpoint that is not `w`.
    pub fn other(&self, w: usize) -> usize {
        if self.u == w {
            self.v
        } else {
            debug_assert_eq!(self.v, w);
            self.u
        }
    }

    pub fn shares_endpoint(&self, other: &EdgeId) -> bool {
        self.contains(other.u) || self.contains(other.v)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

/// Immutable simple graph on vertices `0..n`.
///
/// Edges are stored sorted by canonical [`EdgeId`]; an edge is addressed either by
/// its id or by its dense index into [`Graph::edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    adj_edge: Vec<Vec<usize>>,
    edges: Vec<EdgeId>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge {a}-{b} out of range for n={n}")));
            }
            list.push(EdgeId::new(a, b));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate edge {}", w[0])));
        }
        Ok(Self::from_sorted_unique(n, list))
    }

    fn from_sorted_unique(n: usize, edges: Vec<EdgeId>) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut adj_edge = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        let mut nbrs = Vec::with_capacity(n);
        for list in adj.iter_mut() {
            list.sort_unstable();
            nbrs.push(list.iter().map(|&(w, _)| w).collect::<Vec<_>>());
        }
        for (v, list) in adj.into_iter().enumerate() {
            adj_edge[v] = list.into_iter().map(|(_, i)| i).collect();
        }
        Graph { adj: nbrs, adj_edge, edges }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unique(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Edge indices incident to `v`, parallel to [`Graph::neighbors`].
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.adj_edge[v]
    }

    /// `(neighbor, edge index)` pairs around `v`.
    pub fn incident(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj[v].iter().copied().zip(self.adj_edge[v].iter().copied())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> EdgeId {
        self.edges[idx]
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        if a >= self.n() || b >= self.n() || a == b {
            return None;
        }
        self.adj[a].binary_search(&b).ok().map(|pos| self.adj_edge[a][pos])
    }

    pub fn edge_index_of(&self, e: EdgeId) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    /// Indices of the edges sharing an endpoint with edge `idx`.
    pub fn edge_neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let e = self.edges[idx];
        self.adj_edge[e.u]
            .iter()
            .chain(self.adj_edge[e.v].iter())
            .copied()
            .filter(move |&f| f != idx)
    }

    /// Number of edges adjacent to edge `idx`: `deg(u) + deg(v) − 2`.
    pub fn edge_degree(&self, idx: usize) -> usize {
        let e = self.edges[idx];
        self.degree(e.u) + self.degree(e.v) - 2
    }

    pub fn is_regular(&self) -> bool {
        self.n() == 0 || self.max_degree() == self.min_degree()
    }

    /// Spanning subgraph keeping the edges selected by `keep`. Returns the
    /// subgraph together with the map from its edge indices to ours.
    pub fn edge_subgraph(&self, keep: impl Fn(usize) -> bool) -> (Graph, Vec<usize>) {
        let map: Vec<usize> = (0..self.m()).filter(|&i| keep(i)).collect();
        let edges = map.iter().map(|&i| self.edges[i]).collect();
        (Self::from_sorted_unique(self.n(), edges), map)
    }

    /// Shortest-path distances from `source`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        self.bfs_bounded(source, usize::MAX)
    }

    /// BFS distances truncated at `radius`: vertices farther away are `None`.
    pub fn bfs_bounded(&self, source: usize, radius: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            if d == radius {
                continue;
            }
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Multi-source BFS distances.
    pub fn bfs_from_set(&self, sources: impl IntoIterator<Item = usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices within distance `radius` of `v`, in BFS order (starting with `v`).
    pub fn ball(&self, v: usize, radius: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n()];
        let mut out = vec![v];
        seen[v] = true;
        let mut frontier = vec![v];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &x in &frontier {
                for &w in &self.adj[x] {
                    if !seen[w] {
                        seen[w] = true;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend_from_slice(&next);
            frontier = next;
        }
        out
    }

    /// The power graph `G^k`: `{u,v}` is an edge iff `0 < dist(u,v) <= k`.
    pub fn power_graph(&self, k: usize) -> Graph {
        assert!(k >= 1, "power graph needs k >= 1");
        if k == 1 {
            return self.clone();
        }
        let mut edges = Vec::new();
        for v in 0..self.n() {
            for w in self.ball(v, k) {
                if w > v {
                    edges.push(EdgeId { u: v, v: w });
                }
            }
        }
        edges.sort_unstable();
        Self::from_sorted_unique(self.n(), edges)
    }

    /// The line graph `L(G)`; vertex `i` of the result is edge `i` of `self`.
    pub fn line_graph(&self) -> (Graph, Vec<EdgeId>) {
        let mut edges = Vec::new();
        for v in 0..self.n() {
            let inc = &self.adj_edge[v];
            for (i, &a) in inc.iter().enumerate() {
                for &b in &inc[i + 1..] {
                    edges.push(EdgeId::new(a, b));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        (Self::from_sorted_unique(self.m(), edges), self.edges.clone())
    }

    /// Subgraph induced by `vertices`, relabeled to `0..vertices.len()` in the
    /// given order. Returns the subgraph and the local-to-global vertex map.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> (Graph, Vec<usize>) {
        let mut local = std::collections::HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            local.insert(v, i);
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                if let Some(&j) = local.get(&w) {
                    if i < j {
                        edges.push(EdgeId { u: i, v: j });
                    }
                }
            }
        }
        edges.sort_unstable();
        (Self::from_sorted_unique(vertices.len(), edges), vertices.to_vec())
    }

    /// Serializes as `n m` followed by one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.m());
        for e in &self.edges {
            out.push_str(&format!("{} {}\n", e.u, e.v));
        }
        out
    }

    /// Parses the edge-list format written by [`Graph::to_edge_list`].
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let (n, m) = parse_pair(header, hl + 1)?;
        let mut edges = Vec::with_capacity(m);
        for (i, line) in lines {
            let (u, v) = parse_pair(line, i + 1)?;
            if u >= v || v >= n {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected 0 <= u < v < {n}, got {u} {v}"),
                });
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: hl + 1,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Graph::from_edges(n, edges).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Parse { line: lineno, msg: "expected two integers".into() })?
            .parse::<usize>()
            .map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::Parse { line: lineno, msg: "trailing tokens".into() });
    }
    Ok((a, b))
}

/// Distance between an edge and a vertex: the smaller endpoint distance.
pub fn edge_vertex_distance(dist_from_w: &[Option<usize>], e: EdgeId) -> Option<usize> {
    match (dist_from_w[e.u], dist_from_w[e.v]) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Small fixtures shared by tests across the crate.
pub mod fixtures {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    /// Star `K_{1,k}` with center 0.
    pub fn star(k: usize) -> Graph {
        Graph::from_edges(k + 1, (1..=k).map(|i| (0, i))).unwrap()
    }

    pub fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, e).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn brute_dist(g: &Graph) -> Vec<Vec<Option<usize>>> {
        // Floyd–Warshall, independent of the BFS code under test.
        let n = g.n();
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for v in 0..n {
            d[v][v] = 0;
        }
        for e in g.edges() {
            d[e.u][e.v] = 1;
            d[e.v][e.u] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        d.into_iter()
            .map(|row| row.into_iter().map(|x| (x < inf).then_some(x)).collect())
            .collect()
    }

    #[test]
    fn power_of_path_is_triangle() {
        let p = path(3).power_graph(2);
        assert_eq!(p, complete(3));
    }

    #[test]
    fn power_one_is_identity() {
        let g = petersen();
        assert_eq!(g.power_graph(1), g);
    }

    #[test]
    fn six_cycle_to_the_eighth_is_k6() {
        let d = brute_dist(&cycle(6));
        assert!(d.iter().flatten().all(|x| x.unwrap() <= 3));
        assert_eq!(cycle(6).power_graph(8), complete(6));
    }

    #[test]
    fn line_graph_examples() {
        let (l, map) = complete(3).line_graph();
        assert_eq!(l, complete(3));
        assert_eq!(map.len(), 3);
        assert_eq!(star(3).line_graph().0, complete(3));
        assert_eq!(path(4).line_graph().0, path(3));
    }

    #[test]
    fn bfs_examples() {
        let g = Graph::from_edges(3, [(1, 2)]).unwrap();
        assert_eq!(g.bfs_distances(0), vec![Some(0), None, None]);
        let mut d: Vec<_> = cycle(6).bfs_distances(2).into_iter().map(Option::unwrap).collect();
        d.sort();
        assert_eq!(d, vec![0, 1, 1, 2, 2, 3]);
        assert_eq!(star(4).bfs_distances(0), vec![Some(0), Some(1), Some(1), Some(1), Some(1)]);
        let de = edge_vertex_distance(&cycle(6).bfs_distances(0), EdgeId::new(2, 3));
        assert_eq!(de, Some(2));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
        assert!(Graph::parse_edge_list("3 1\n1 1\n").is_err());
        assert!(Graph::parse_edge_list("3 2\n0 1\n0 1\n").is_err());
        assert!(Graph::parse_edge_list("3 2\n0 1\n").is_err());
        assert!(Graph::parse_edge_list("3 1\n2 1\n").is_err());
        assert!(Graph::parse_edge_list("x").is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = petersen();
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }

    mod props {
        use super::*;
        use crate::generate::{generate, GeneratorSpec, Model};
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn power_graph_matches_all_pairs_oracle(seed in 0u64..1000, k in 1usize..5) {
                let g = generate(&GeneratorSpec::new(Model::RegularRandom, 24, 3, seed)).unwrap();
                let d = brute_dist(&g);
                let p = g.power_graph(k);
                for u in 0..g.n() {
                    for v in 0..g.n() {
                        let expect = u != v && d[u][v].is_some_and(|x| x <= k);
                        prop_assert_eq!(p.has_edge(u, v), expect);
                    }
                }
            }

            #[test]
            fn line_graph_degree_is_edge_degree(seed in 0u64..1000) {
                let g = generate(&GeneratorSpec::new(Model::RegularRandom, 20, 4, seed)).unwrap();
                let (l, map) = g.line_graph();
                for (i, e) in map.iter().enumerate() {
                    prop_assert_eq!(l.degree(i), g.degree(e.u) + g.degree(e.v) - 2);
                    prop_assert_eq!(l.degree(i), g.edge_degree(i));
                }
            }

            #[test]
            fn adjacency_is_symmetric(seed in 0u64..1000) {
                let g = generate(&GeneratorSpec::new(Model::RegularRandom, 30, 4, seed)).unwrap();
                for v in 0..g.n() {
                    for &w in g.neighbors(v) {
                        prop_assert!(g.neighbors(w).contains(&v));
                        prop_assert!(w != v);
                    }
                }
            }
        }
    }
}
