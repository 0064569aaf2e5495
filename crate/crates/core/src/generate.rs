//! Seeded instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::verify::girth;

const REGULAR_ATTEMPTS: usize = 1000;
const GREEDY_GIRTH_ATTEMPTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    RegularRandom,
    RegularHighGirth,
    /// Complete `d`-regular tree truncated to `n` vertices in BFS order.
    Tree,
    Cycle,
    /// Star `K_{1,d}` whose leaves each carry `d − 1` pendant edges.
    StarGadget,
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "regular" | "regular-random" => Model::RegularRandom,
            "regular-high-girth" | "high-girth" => Model::RegularHighGirth,
            "tree" => Model::Tree,
            "cycle" => Model::Cycle,
            "star-gadget" => Model::StarGadget,
            other => return Err(Error::InfeasibleSpec(format!("unknown model {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub model: Model,
    pub n: usize,
    pub d: usize,
    pub girth_min: Option<usize>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(model: Model, n: usize, d: usize, seed: u64) -> Self {
        GeneratorSpec { model, n, d, girth_min: None, seed }
    }

    pub fn with_girth(mut self, girth_min: usize) -> Self {
        self.girth_min = Some(girth_min);
        self
    }
}

/// Generates a graph. Identical specs yield identical graphs.
pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let g = match spec.model {
        Model::RegularRandom => regular_random(spec.n, spec.d, &mut rng)?,
        Model::RegularHighGirth => {
            high_girth(spec.n, spec.d, spec.girth_min.unwrap_or(3), &mut rng)?
        }
        Model::Tree => regular_tree(spec.n, spec.d)?,
        Model::Cycle => {
            if spec.n < 3 {
                return Err(Error::InfeasibleSpec(format!("cycle needs n >= 3, got {}", spec.n)));
            }
            Graph::from_edges(spec.n, (0..spec.n).map(|i| (i, (i + 1) % spec.n)))?
        }
        Model::StarGadget => star_gadget(spec.d)?,
    };
    if let Some(gm) = spec.girth_min {
        if girth(&g).is_some_and(|gg| gg < gm) {
            return Err(Error::InfeasibleSpec(format!("girth below {gm}")));
        }
    }
    Ok(g)
}

fn check_regular(n: usize, d: usize) -> Result<()> {
    if (n * d) % 2 == 1 {
        return Err(Error::InfeasibleSpec(format!("n·d = {} is odd", n * d)));
    }
    if d >= n && !(n == 0 && d == 0) {
        return Err(Error::InfeasibleSpec(format!("degree {d} needs more than {n} vertices")));
    }
    Ok(())
}

/// Pairing-model sampler: points are paired one at a time, refusing pairs that
/// would create a loop or a parallel edge; a dead end restarts the attempt.
fn regular_random(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    check_regular(n, d)?;
    for _ in 0..REGULAR_ATTEMPTS {
        if let Some(edges) = pairing_attempt(n, d, rng, |_, _, _| true) {
            return Graph::from_edges(n, edges);
        }
    }
    Err(Error::InfeasibleSpec(format!(
        "no simple {d}-regular graph on {n} vertices after {REGULAR_ATTEMPTS} attempts"
    )))
}

/// One pass of the sequential pairing process. `accept(adj, u, v)` may veto a
/// pair on top of the loop/multi-edge test.
fn pairing_attempt(
    n: usize,
    d: usize,
    rng: &mut ChaCha8Rng,
    accept: impl Fn(&[Vec<usize>], usize, usize) -> bool,
) -> Option<Vec<(usize, usize)>> {
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    let mut edges = Vec::with_capacity(n * d / 2);
    while !points.is_empty() {
        let mut placed = false;
        for _ in 0..(4 * points.len() + 50) {
            let i = rng.gen_range(0..points.len());
            let j = rng.gen_range(0..points.len());
            let (u, v) = (points[i], points[j]);
            if i == j || u == v || adj[u].contains(&v) || !accept(&adj, u, v) {
                continue;
            }
            let (hi, lo) = if i > j { (i, j) } else { (j, i) };
            points.swap_remove(hi);
            points.swap_remove(lo);
            adj[u].push(v);
            adj[v].push(u);
            edges.push((u, v));
            placed = true;
            break;
        }
        if !placed {
            return None;
        }
    }
    Some(edges)
}

fn within(adj: &[Vec<usize>], u: usize, v: usize, radius: usize) -> bool {
    let mut frontier = vec![u];
    let mut seen = std::collections::HashSet::from([u]);
    for _ in 0..radius {
        let mut next = Vec::new();
        for &x in &frontier {
            for &w in &adj[x] {
                if w == v {
                    return true;
                }
                if seen.insert(w) {
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    false
}

/// Fewest vertices a `d`-regular graph of girth `g` can have (saturating).
pub fn moore_bound(d: usize, g: usize) -> usize {
    let k = (g.saturating_sub(1)) / 2;
    let sum = |terms: usize| (0..terms).map(|i| (d.saturating_sub(1)).saturating_pow(i as u32)).fold(0usize, usize::saturating_add);
    if g % 2 == 1 {
        d.saturating_mul(sum(k)).saturating_add(1)
    } else {
        sum(g / 2).saturating_mul(2)
    }
}

/// Regular graph with girth at least `girth_min`.
///
/// Sparse regimes use the pairing process with a distance veto (a new edge
/// `uv` must join vertices at distance `>= girth_min − 1`). When the veto
/// would exhaust the graph (the radius-`girth_min − 2` ball is comparable to
/// `n`) and `girth_min <= 6`, a seeded bipartite circulant over a random Sidon
/// set is used instead: it has no 4-cycles by construction.
fn high_girth(n: usize, d: usize, girth_min: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    check_regular(n, d)?;
    if girth_min <= 3 {
        return regular_random(n, d, rng);
    }
    let bound = moore_bound(d, girth_min);
    if n < bound {
        return Err(Error::InfeasibleSpec(format!(
            "no {d}-regular graph of girth >= {girth_min} on {n} vertices exists (Moore bound {bound})"
        )));
    }
    let ball: usize = (0..=girth_min.saturating_sub(2))
        .map(|i| d.saturating_mul((d.max(2) - 1).saturating_pow(i as u32)))
        .fold(1usize, usize::saturating_add);
    if ball.saturating_mul(4) <= n || girth_min > 6 {
        for _ in 0..GREEDY_GIRTH_ATTEMPTS {
            let veto = |adj: &[Vec<usize>], u: usize, v: usize| !within(adj, u, v, girth_min - 2);
            if let Some(edges) = pairing_attempt(n, d, rng, veto) {
                let g = Graph::from_edges(n, edges)?;
                if girth(&g).is_none_or(|x| x >= girth_min) {
                    return Ok(g);
                }
            }
        }
        if girth_min > 6 {
            return Err(Error::InfeasibleSpec(format!(
                "no {d}-regular graph with girth >= {girth_min} on {n} vertices found"
            )));
        }
    }
    sidon_circulant(n, d, rng)
}

/// Bipartite graph on points `Z_m` and lines `Z_m` (`m = n/2`) with point `x`
/// joined to line `x + s` for every `s` in a Sidon set `S` of size `d`.
fn sidon_circulant(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    if n % 2 == 1 {
        return Err(Error::InfeasibleSpec("bipartite construction needs even n".into()));
    }
    let m = n / 2;
    // Girth >= 6 forces n >= 2(1 + (d−1) + (d−1)^2).
    if d >= 1 && n < 2 * (1 + (d - 1) + (d - 1) * (d - 1)) {
        return Err(Error::InfeasibleSpec(format!(
            "no {d}-regular graph of girth >= 6 on {n} vertices exists (Moore bound)"
        )));
    }
    let sidon = random_sidon(m, d, rng).ok_or_else(|| {
        Error::InfeasibleSpec(format!("no Sidon set of size {d} modulo {m} found"))
    })?;
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let mut edges = Vec::with_capacity(m * d);
    for x in 0..m {
        for &s in &sidon {
            edges.push((label[x], label[m + (x + s) % m]));
        }
    }
    Graph::from_edges(n, edges)
}

/// Random Sidon set modulo `m`: a randomized Golomb-ruler search with marks in
/// `[0, (m−1)/2]` (so signed differences stay distinct modulo `m`), followed by
/// a random unit multiplier and shift.
fn random_sidon(m: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    if d == 0 {
        return Some(Vec::new());
    }
    let limit = (m - 1) / 2;
    let mut marks = vec![0usize];
    let mut used = vec![false; limit + 1];
    let mut budget = 200_000usize;
    if !golomb_dfs(&mut marks, &mut used, d, limit, rng, &mut budget) {
        return None;
    }
    let units: Vec<usize> = (1..m).filter(|&t| gcd(t, m) == 1).collect();
    let t = *units.choose(rng)?;
    let shift = rng.gen_range(0..m);
    let mut out: Vec<usize> = marks.iter().map(|&a| (a * t + shift) % m).collect();
    out.sort_unstable();
    Some(out)
}

fn golomb_dfs(
    marks: &mut Vec<usize>,
    used: &mut [bool],
    d: usize,
    limit: usize,
    rng: &mut ChaCha8Rng,
    budget: &mut usize,
) -> bool {
    if marks.len() == d {
        return true;
    }
    let last = *marks.last().unwrap();
    let mut cands: Vec<usize> = (last + 1..=limit).collect();
    cands.shuffle(rng);
    // Prefer short extensions so the ruler does not run out of room.
    cands.sort_by_key(|&c| (c - last) / 4);
    for c in cands {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let diffs: Vec<usize> = marks.iter().map(|&a| c - a).collect();
        let mut ok = diffs.iter().all(|&x| !used[x]);
        if ok {
            let mut sorted = diffs.clone();
            sorted.sort_unstable();
            ok = sorted.windows(2).all(|w| w[0] != w[1]);
        }
        if !ok {
            continue;
        }
        for &x in &diffs {
            used[x] = true;
        }
        marks.push(c);
        if golomb_dfs(marks, used, d, limit, rng, budget) {
            return true;
        }
        marks.pop();
        for &x in &diffs {
            used[x] = false;
        }
    }
    false
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn regular_tree(n: usize, d: usize) -> Result<Graph> {
    if d < 2 && n > 2 {
        return Err(Error::InfeasibleSpec("tree model needs d >= 2".into()));
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut next = 1;
    let mut v = 0;
    while next < n {
        let children = if v == 0 { d } else { d - 1 };
        for _ in 0..children {
            if next == n {
                break;
            }
            edges.push((v, next));
            next += 1;
        }
        v += 1;
    }
    Graph::from_edges(n, edges)
}

fn star_gadget(d: usize) -> Result<Graph> {
    if d == 0 {
        return Err(Error::InfeasibleSpec("star gadget needs d >= 1".into()));
    }
    let mut edges = Vec::new();
    let mut next = d + 1;
    for leaf in 1..=d {
        edges.push((0, leaf));
        for _ in 0..d - 1 {
            edges.push((leaf, next));
            next += 1;
        }
    }
    Graph::from_edges(next, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_simple_regular(g: &Graph, d: usize) -> bool {
        (0..g.n()).all(|v| g.degree(v) == d)
            && g.edges().iter().all(|e| e.u < e.v)
            && g.edges().windows(2).all(|w| w[0] < w[1])
    }

    #[test]
    fn regular_random_small() {
        let g = generate(&GeneratorSpec::new(Model::RegularRandom, 8, 3, 1)).unwrap();
        assert_eq!(g.n(), 8);
        assert!(is_simple_regular(&g, 3));
    }

    #[test]
    fn odd_product_is_infeasible() {
        let err = generate(&GeneratorSpec::new(Model::RegularRandom, 5, 3, 1)).unwrap_err();
        assert!(matches!(err, Error::InfeasibleSpec(_)));
    }

    #[test]
    fn cycle_model() {
        let g = generate(&GeneratorSpec::new(Model::Cycle, 5, 2, 0)).unwrap();
        assert_eq!(g, crate::graph::fixtures::cycle(5));
    }

    #[test]
    fn reproducible() {
        let s = GeneratorSpec::new(Model::RegularRandom, 64, 5, 99);
        assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
        let h = GeneratorSpec::new(Model::RegularHighGirth, 256, 8, 3).with_girth(6);
        assert_eq!(generate(&h).unwrap(), generate(&h).unwrap());
    }

    #[test]
    fn high_girth_dense_regime_uses_sidon_construction() {
        for &(n, d) in &[(256, 8), (1024, 8), (1024, 12), (4096, 12)] {
            let g = generate(&GeneratorSpec::new(Model::RegularHighGirth, n, d, 7).with_girth(6))
                .unwrap();
            assert!(is_simple_regular(&g, d));
            assert!(girth(&g).unwrap() >= 6, "n={n} d={d}");
        }
    }

    #[test]
    fn high_girth_sparse_regime() {
        let g = generate(&GeneratorSpec::new(Model::RegularHighGirth, 2000, 3, 5).with_girth(8))
            .unwrap();
        assert!(is_simple_regular(&g, 3));
        assert!(girth(&g).unwrap() >= 8);
    }

    #[test]
    fn moore_bound_values() {
        // Petersen (3, 5), Heawood (3, 6), K_{d,d} (d, 4), K_{d+1} (d, 3).
        assert_eq!(moore_bound(3, 5), 10);
        assert_eq!(moore_bound(3, 6), 14);
        assert_eq!(moore_bound(12, 6), 266);
        assert_eq!(moore_bound(5, 4), 10);
        assert_eq!(moore_bound(4, 3), 5);
        assert!(moore_bound(8, 34) > 1_000_000_000_000);
    }

    #[test]
    fn moore_bound_rejects_impossible_girth() {
        let err = generate(&GeneratorSpec::new(Model::RegularHighGirth, 256, 12, 1).with_girth(6))
            .unwrap_err();
        assert!(matches!(err, Error::InfeasibleSpec(_)));
    }

    #[test]
    fn tree_and_gadget() {
        let t = generate(&GeneratorSpec::new(Model::Tree, 22, 3, 0)).unwrap();
        assert_eq!(t.m(), 21);
        assert_eq!(t.degree(0), 3);
        assert_eq!(t.degree(1), 3);
        assert!(girth(&t).is_none());
        let s = generate(&GeneratorSpec::new(Model::StarGadget, 0, 3, 0)).unwrap();
        assert_eq!(s.n(), 10);
        assert_eq!(s.max_degree(), 3);
    }
}
