//! Proposals, the auxiliary hypergraph, hypergraph sinkless orientation and
//! the rearrangement of won target edges into a matching.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sim::RunStats;
use crate::symmetry::{EdgeSet, Run};
use crate::verify::{check_matching_list, check_sinkless};

/// A hypergraph on vertices `0..n_vertices`; every hyperedge is a sorted,
/// nonempty vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub n_vertices: usize,
    pub edges: Vec<Vec<usize>>,
    /// Incident hyperedges of every vertex, in increasing id order.
    pub incidence: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n_vertices: usize, edges: Vec<Vec<usize>>) -> Self {
        let mut incidence = vec![Vec::new(); n_vertices];
        let edges: Vec<Vec<usize>> = edges
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                e.dedup();
                assert!(!e.is_empty(), "hyperedges are nonempty");
                e
            })
            .collect();
        for (i, e) in edges.iter().enumerate() {
            for &v in e {
                incidence[v].push(i);
            }
        }
        Hypergraph { n_vertices, edges, incidence }
    }

    pub fn rank(&self, e: usize) -> usize {
        self.edges[e].len()
    }

    pub fn max_rank(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    pub fn min_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).min().unwrap_or(0)
    }
}

/// The vertex each hyperedge is oriented away from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub winner: Vec<usize>,
}

/// For every vertex within reach: its nearest target edge and the next
/// vertex on a shortest path towards it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProposalMap {
    pub target_of: Vec<Option<usize>>,
    pub next_hop: Vec<Option<usize>>,
    pub dist: Vec<Option<usize>>,
    /// Proposing vertices with their targets, sorted by vertex.
    pub proposals: Vec<(usize, usize)>,
}

impl ProposalMap {
    /// Vertex sequence from `v` to the endpoint of its target.
    pub fn path(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut x = v;
        while let Some(y) = self.next_hop[x] {
            path.push(y);
            x = y;
        }
        path
    }
}

/// Every proposer picks a nearest target edge in the subgraph of `allowed`
/// edges, at most `max_dist` hops away. Vertices adopt the target of the
/// predecessor with the smallest target id (then smallest predecessor id),
/// so every vertex on a recorded path proposes to the same edge.
pub fn build_proposals(g: &Graph, allowed: &[bool], targets: &EdgeSet, proposers: &[usize], max_dist: usize) -> Result<ProposalMap> {
    let n = g.n();
    let mut target_of = vec![None; n];
    let mut next_hop = vec![None; n];
    let mut dist = vec![None; n];
    let mut frontier = Vec::new();
    for e in targets.member_ids() {
        let id = g.edge(e);
        for w in [id.u, id.v] {
            if target_of[w].is_none_or(|t| e < t) {
                target_of[w] = Some(e);
            }
            if dist[w].is_none() {
                dist[w] = Some(0);
                frontier.push(w);
            }
        }
    }
    for d in 1..=max_dist {
        let mut cand: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for &x in &frontier {
            for (y, e) in g.incident(x) {
                if allowed[e] && dist[y].is_none() {
                    let offer = (target_of[x].expect("frontier has targets"), x);
                    let slot = cand.entry(y).or_insert(offer);
                    *slot = (*slot).min(offer);
                }
            }
        }
        frontier.clear();
        for (y, (t, x)) in cand {
            dist[y] = Some(d);
            target_of[y] = Some(t);
            next_hop[y] = Some(x);
            frontier.push(y);
        }
    }
    let mut proposals = Vec::with_capacity(proposers.len());
    for &v in proposers {
        match target_of[v] {
            Some(t) => proposals.push((v, t)),
            None => return Err(Error::NoNearbyTarget(v)),
        }
    }
    proposals.sort_unstable();
    Ok(ProposalMap { target_of, next_hop, dist, proposals })
}

/// Clusters as vertices, proposed-to target edges as hyperedges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxHypergraph {
    pub hypergraph: Hypergraph,
    /// Cluster root of every vertex.
    pub roots: Vec<usize>,
    /// Target edge index of every hyperedge.
    pub targets: Vec<usize>,
    /// Smallest proposing vertex per (hyperedge, cluster vertex).
    pub lead: BTreeMap<(usize, usize), usize>,
}

/// One vertex per proposing cluster (given as root and proposing leaves),
/// one hyperedge per target edge that received a proposal.
pub fn build_aux_hypergraph(map: &ProposalMap, clusters: &[(usize, Vec<usize>)]) -> AuxHypergraph {
    let mut hyper_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut lead: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut targets = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut pairs = Vec::new();
    for (c, (_, leaves)) in clusters.iter().enumerate() {
        for &v in leaves {
            let t = map.target_of[v].expect("every proposer has a target");
            pairs.push((t, c, v));
        }
    }
    pairs.sort_unstable();
    for (t, c, v) in pairs {
        let h = *hyper_of.entry(t).or_insert_with(|| {
            targets.push(t);
            members.push(Vec::new());
            targets.len() - 1
        });
        lead.entry((h, c)).or_insert_with(|| {
            members[h].push(c);
            v
        });
    }
    AuxHypergraph {
        hypergraph: Hypergraph::new(clusters.len(), members),
        roots: clusters.iter().map(|c| c.0).collect(),
        targets,
        lead,
    }
}

/// Fails unless the minimum degree exceeds the maximum rank.
pub fn check_degree_gate(h: &Hypergraph) -> Result<()> {
    let (min_degree, max_rank) = (h.min_degree(), h.max_rank());
    if min_degree > max_rank {
        Ok(())
    } else {
        Err(Error::PreconditionDegraded { min_degree, max_rank })
    }
}

/// Replaces every vertex `v` by halves `2v` and `2v + 1`. The incident
/// hyperedges of `v`, sorted by `key(v, e)`, alternate between the halves.
pub fn split_vertices(h: &Hypergraph, key: impl Fn(usize, usize) -> (usize, usize)) -> Result<Hypergraph> {
    let mut fresh = vec![Vec::new(); h.edges.len()];
    for v in 0..h.n_vertices {
        let deg = h.degree(v);
        if deg < 2 {
            return Err(Error::DegreeTooSmall(v, deg));
        }
        let mut inc = h.incidence[v].clone();
        inc.sort_by_key(|&e| key(v, e));
        for (rank, &e) in inc.iter().enumerate() {
            fresh[e].push(2 * v + rank % 2);
        }
    }
    Ok(Hypergraph::new(2 * h.n_vertices, fresh))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HsoMode {
    Deterministic,
    Randomized { seed: u64 },
}

/// Sinkless orientation by iterated claiming: each unsatisfied vertex claims
/// its smallest free incident hyperedge and every contested hyperedge goes to
/// one claimant (smallest id, or uniformly random). Vertices left without a
/// free hyperedge are satisfied along augmenting paths, charged twice their
/// length plus one round.
pub fn solve_hso(h: &Hypergraph, mode: HsoMode, max_rounds: usize) -> Result<Run<Orientation>> {
    let n = h.n_vertices;
    let mut owner: Vec<Option<usize>> = vec![None; h.edges.len()];
    let mut owns: Vec<Option<usize>> = vec![None; n];
    let mut rng = match mode {
        HsoMode::Randomized { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        HsoMode::Deterministic => None,
    };
    let mut rounds = 0;
    loop {
        let mut claims: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            if owns[v].is_none() {
                if let Some(&e) = h.incidence[v].iter().find(|&&e| owner[e].is_none()) {
                    claims.entry(e).or_default().push(v);
                }
            }
        }
        if claims.is_empty() {
            break;
        }
        rounds += 1;
        for (e, claimants) in claims {
            let w = match rng.as_mut() {
                Some(r) => claimants[r.gen_range(0..claimants.len())],
                None => claimants[0],
            };
            owner[e] = Some(w);
            owns[w] = Some(e);
        }
        if rounds > max_rounds {
            let unterminated = owns.iter().filter(|o| o.is_none()).count();
            return Err(Error::RoundBudgetExceeded { budget: max_rounds, unterminated });
        }
    }
    for v in 0..n {
        if owns[v].is_some() {
            continue;
        }
        let path = augmenting_path(h, &owner, &owns, v)
            .ok_or_else(|| Error::ValidityCheckFailed(format!("vertex {v} cannot own a hyperedge")))?;
        rounds += 2 * path.len() + 1;
        for (e, w) in path {
            owner[e] = Some(w);
            owns[w] = Some(e);
        }
        if rounds > max_rounds {
            let unterminated = owns.iter().filter(|o| o.is_none()).count();
            return Err(Error::RoundBudgetExceeded { budget: max_rounds, unterminated });
        }
    }
    let winner = owner.iter().enumerate().map(|(e, o)| o.unwrap_or(h.edges[e][0])).collect();
    let orientation = Orientation { winner };
    let report = check_sinkless(h, &orientation, 1, 1);
    if !report.pass {
        return Err(Error::ValidityCheckFailed(report.to_string()));
    }
    let stats = RunStats { rounds, ..RunStats::default() };
    Ok(Run { value: orientation, rounds, stats })
}

/// Alternating path from the unsatisfied `v` to a free hyperedge, as the
/// list of (hyperedge, new owner) reassignments.
fn augmenting_path(h: &Hypergraph, owner: &[Option<usize>], owns: &[Option<usize>], v: usize) -> Option<Vec<(usize, usize)>> {
    // via[e] = vertex that reaches hyperedge e.
    let mut via: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([v]);
    let mut seen = vec![false; h.n_vertices];
    seen[v] = true;
    while let Some(x) = queue.pop_front() {
        for &e in &h.incidence[x] {
            if via.contains_key(&e) || owns[x] == Some(e) {
                continue;
            }
            via.insert(e, x);
            match owner[e] {
                None => {
                    let mut path = vec![(e, x)];
                    let mut y = x;
                    while y != v {
                        let prev = owns[y].expect("intermediate vertices own a hyperedge");
                        let z = via[&prev];
                        path.push((prev, z));
                        y = z;
                    }
                    return Some(path);
                }
                Some(w) if !seen[w] => {
                    seen[w] = true;
                    queue.push_back(w);
                }
                _ => {}
            }
        }
    }
    None
}

/// Two edges of the rearranged matching assigned to one cluster, and the
/// proposing leaves they are incident to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub root: usize,
    pub edges: [usize; 2],
    pub leaves: [usize; 2],
}

/// The edge a won target is moved to: the target itself when the winner
/// touches it, else the first edge of the winner's path towards it.
pub fn moved_edge(g: &Graph, map: &ProposalMap, winner: usize) -> usize {
    let path = map.path(winner);
    if path.len() == 1 {
        map.target_of[winner].expect("winner has a target")
    } else {
        g.edge_index(path[0], path[1]).expect("path edges exist")
    }
}

/// Turns an orientation of the split auxiliary hypergraph into two matching
/// edges per cluster. Extra won hyperedges are discarded.
pub fn rearrange_matching(g: &Graph, aux: &AuxHypergraph, split: &Hypergraph, o: &Orientation, map: &ProposalMap) -> Result<(Vec<usize>, Vec<Assignment>)> {
    let mut won: Vec<Vec<usize>> = vec![Vec::new(); aux.roots.len()];
    for (e, &w) in o.winner.iter().enumerate() {
        debug_assert!(split.edges[e].contains(&w));
        won[w / 2].push(e);
    }
    let mut assignments = Vec::with_capacity(won.len());
    let mut matching = Vec::new();
    for (c, list) in won.iter().enumerate() {
        if list.len() < 2 {
            return Err(Error::ValidityCheckFailed(format!("cluster {} won {} target edges", aux.roots[c], list.len())));
        }
        let pick: Vec<(usize, usize)> = list[..2]
            .iter()
            .map(|&e| {
                let leaf = aux.lead[&(e, c)];
                (moved_edge(g, map, leaf), leaf)
            })
            .collect();
        matching.extend(pick.iter().map(|p| p.0));
        assignments.push(Assignment { root: aux.roots[c], edges: [pick[0].0, pick[1].0], leaves: [pick[0].1, pick[1].1] });
    }
    let report = check_matching_list(g, &matching);
    if !report.pass {
        return Err(Error::MatchingViolation(report.to_string()));
    }
    Ok((matching, assignments))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;
    use crate::symmetry::EdgeSetKind;

    fn edge_set(g: &Graph, pairs: &[(usize, usize)]) -> EdgeSet {
        let mut members = vec![false; g.m()];
        for &(a, b) in pairs {
            members[g.edge_index(a, b).unwrap()] = true;
        }
        EdgeSet { members, kind: EdgeSetKind::Matching }
    }

    #[test]
    fn proposals_on_a_path() {
        // Path 0-1-2-3-4-5 with target 2-3: everyone within 2 hops proposes to it.
        let g = fixtures::path(6);
        let t = edge_set(&g, &[(2, 3)]);
        let allowed = vec![true; g.m()];
        let map = build_proposals(&g, &allowed, &t, &[0, 1, 2, 5], 2).unwrap();
        let e = g.edge_index(2, 3).unwrap();
        assert_eq!(map.proposals, vec![(0, e), (1, e), (2, e), (5, e)]);
        assert_eq!(map.path(2), vec![2]);
        assert_eq!(map.path(1), vec![1, 2]);
        // The intermediate vertex proposes to the same edge as the far one.
        assert_eq!(map.path(0), vec![0, 1, 2]);
        assert_eq!(map.target_of[1], map.target_of[0]);
        assert_eq!(build_proposals(&g, &allowed, &t, &[0], 1).unwrap_err(), Error::NoNearbyTarget(0));
    }

    #[test]
    fn nearest_target_wins_and_ties_go_to_smaller_edge() {
        let g = fixtures::path(7);
        let t = edge_set(&g, &[(0, 1), (5, 6)]);
        let allowed = vec![true; g.m()];
        let map = build_proposals(&g, &allowed, &t, &[2, 3, 4], 2).unwrap();
        let (a, b) = (g.edge_index(0, 1).unwrap(), g.edge_index(5, 6).unwrap());
        assert_eq!(map.proposals, vec![(2, a), (3, a), (4, b)]);
        assert_eq!(map.dist[3], Some(2));
    }

    #[test]
    fn disallowed_edges_are_not_walked() {
        let g = fixtures::path(3);
        let t = edge_set(&g, &[(0, 1)]);
        let mut allowed = vec![true; g.m()];
        allowed[g.edge_index(1, 2).unwrap()] = false;
        assert_eq!(build_proposals(&g, &allowed, &t, &[2], 2).unwrap_err(), Error::NoNearbyTarget(2));
    }

    #[test]
    fn aux_single_cluster_single_target() {
        let g = fixtures::star(3);
        let t = edge_set(&g, &[(0, 1)]);
        let map = build_proposals(&g, &vec![true; 3], &t, &[1, 2, 3], 1).unwrap();
        let aux = build_aux_hypergraph(&map, &[(0, vec![1, 2, 3])]);
        assert_eq!(aux.hypergraph.edges, vec![vec![0]]);
        assert_eq!(aux.hypergraph.degree(0), 1);
        assert_eq!(aux.lead[&(0, 0)], 1);
        assert!(matches!(check_degree_gate(&aux.hypergraph), Err(Error::PreconditionDegraded { min_degree: 1, max_rank: 1 })));
    }

    #[test]
    fn split_degrees() {
        let h = Hypergraph::new(2, vec![vec![0], vec![0], vec![0, 1], vec![0, 1], vec![0, 1], vec![1], vec![1]]);
        assert_eq!(h.degree(0), 5);
        let s = split_vertices(&h, |_, e| (e, e)).unwrap();
        assert_eq!((s.degree(0), s.degree(1)), (3, 2));
        assert_eq!((s.degree(2), s.degree(3)), (3, 2));
        assert_eq!(s.edges[2], vec![0, 2]);
        let bad = Hypergraph::new(1, vec![vec![0]]);
        assert_eq!(split_vertices(&bad, |_, e| (e, e)).unwrap_err(), Error::DegreeTooSmall(0, 1));
    }

    #[test]
    fn private_hyperedges_take_one_round() {
        let h = Hypergraph::new(4, (0..4).map(|v| vec![v]).collect());
        let run = solve_hso(&h, HsoMode::Deterministic, 10).unwrap();
        assert_eq!(run.rounds, 1);
        assert_eq!(run.value.winner, vec![0, 1, 2, 3]);
    }

    #[test]
    fn star_hypergraph() {
        let h = Hypergraph::new(1, vec![vec![0]; 3]);
        let run = solve_hso(&h, HsoMode::Deterministic, 10).unwrap();
        assert!(check_sinkless(&h, &run.value, 1, 1).pass);
    }

    fn random_hypergraph(n: usize, degree: usize, rank: usize, seed: u64) -> Hypergraph {
        // Each vertex appears in `degree` hyperedges of rank `rank`: a
        // configuration of n·degree points cut into consecutive groups.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
        for i in (1..points.len()).rev() {
            points.swap(i, rng.gen_range(0..=i));
        }
        Hypergraph::new(n, points.chunks(rank).map(<[usize]>::to_vec).collect())
    }

    #[test]
    fn random_hypergraph_orientations() {
        let h = random_hypergraph(1024, 16, 4, 1);
        assert!(h.min_degree() > h.max_rank());
        let det = solve_hso(&h, HsoMode::Deterministic, 10_000).unwrap();
        assert!(check_sinkless(&h, &det.value, 1, 1).pass);
        assert_eq!(det, solve_hso(&h, HsoMode::Deterministic, 10_000).unwrap());
        let mut first_try = 0;
        for seed in 0..50 {
            if let Ok(run) = solve_hso(&h, HsoMode::Randomized { seed }, 10_000) {
                assert!(check_sinkless(&h, &run.value, 1, 1).pass);
                first_try += 1;
            }
        }
        assert!(first_try >= 48, "{first_try}");
    }

    #[test]
    fn infeasible_instance_is_reported() {
        // Two vertices, one hyperedge: no sinkless orientation exists.
        let h = Hypergraph::new(2, vec![vec![0, 1]]);
        assert!(matches!(solve_hso(&h, HsoMode::Deterministic, 10), Err(Error::ValidityCheckFailed(_))));
    }

    #[test]
    fn augmenting_path_reassigns() {
        // Vertex 0 claims e0, vertex 1 also wants e0 and must be moved... the
        // chain e0:{0,1}, e1:{1,2}, e2:{2}: claim rounds give 0→e0, 1→e1, 2→e2.
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![2]]);
        let run = solve_hso(&h, HsoMode::Deterministic, 10).unwrap();
        assert_eq!(run.value.winner, vec![0, 1, 2]);
        // Vertex 1's only hyperedge is claimed by 0 first; augmentation moves 0.
        let h = Hypergraph::new(2, vec![vec![0, 1], vec![0]]);
        let run = solve_hso(&h, HsoMode::Deterministic, 10).unwrap();
        assert_eq!(run.value.winner, vec![1, 0]);
        assert!(run.rounds >= 2);
    }

    #[test]
    fn budget_enforced() {
        let h = random_hypergraph(64, 8, 4, 3);
        assert!(matches!(solve_hso(&h, HsoMode::Deterministic, 0), Err(Error::RoundBudgetExceeded { .. })));
    }

    #[test]
    fn moved_edges_follow_the_three_cases() {
        let g = fixtures::path(6);
        let t = edge_set(&g, &[(2, 3)]);
        let map = build_proposals(&g, &vec![true; g.m()], &t, &[0, 1, 2], 2).unwrap();
        assert_eq!(moved_edge(&g, &map, 2), g.edge_index(2, 3).unwrap());
        assert_eq!(moved_edge(&g, &map, 1), g.edge_index(1, 2).unwrap());
        assert_eq!(moved_edge(&g, &map, 0), g.edge_index(0, 1).unwrap());
    }
}
