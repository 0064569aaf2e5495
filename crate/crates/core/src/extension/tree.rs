//! Extending to a whole cluster tree, layer by layer from the leaves up, and
//! the recoloring step that makes one layer colorful.

use serde::{Deserialize, Serialize};

use super::brute::backtrack_extension;
use super::star::extend_star;
use super::LayerView;
use crate::coloring::{Color, PartialEdgeColoring};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Search nodes allowed when a layer falls back to backtracking.
const LAYER_SEARCH_BUDGET: usize = 200_000;

/// Search nodes allowed when the layers above the colorful one are searched jointly.
const UPPER_SEARCH_BUDGET: usize = 2_000_000;

/// Colors all (uncolored) tree edges of `view`, given that the vertices at
/// depth `ell ≥ 1` already see at least Δ distinct colors. Layers at or below
/// `ell` take their smallest available color; each layer above keeps the
/// property for its own vertices, and the root star is solved by matching.
pub fn extend_tree(g: &Graph, c: &mut PartialEdgeColoring, view: &LayerView, ell: usize) -> Result<()> {
    let delta = g.max_degree();
    if let Some(e) = view.edges().into_iter().find(|&e| c.get(e).is_some()) {
        return Err(Error::PreconditionViolation(format!("tree edge {} is already colored", g.edge(e))));
    }
    if view.edge_layers.is_empty() {
        return Ok(());
    }
    if ell == 0 || ell >= view.vertex_layers.len() {
        return Err(Error::PreconditionViolation(format!("layer {ell} is outside the tree")));
    }
    let seen = view.colorful_count(g, c, ell);
    if seen < delta {
        return Err(Error::PreconditionViolation(format!("layer {ell} sees {seen} colors, needs {delta}")));
    }
    for k in (ell..view.edge_layers.len()).rev() {
        for &e in &view.edge_layers[k] {
            let col = c
                .min_available(g, e)
                .ok_or_else(|| Error::InvariantBroken(format!("edge {} has no available color", g.edge(e))))?;
            c.set(e, col);
        }
    }
    let mut stuck = None;
    for k in (1..ell).rev() {
        if let Err(e) = color_layer(g, c, view, k, delta) {
            stuck = Some(e);
            break;
        }
    }
    let star = match stuck {
        None => extend_star(g, c, &view.edge_layers[0]),
        Some(e) => Err(e),
    };
    match star {
        Ok(()) => Ok(()),
        Err(Error::NoExtension(_) | Error::InvariantBroken(_)) => {
            // Thin upper layers (a single vertex, say) cannot always be made
            // colorful; search the uncolored upper part directly.
            let upper: Vec<usize> = view.edge_layers[..ell].iter().flatten().copied().collect();
            upper.iter().for_each(|&e| c.clear(e));
            if backtrack_extension(g, c, &upper, UPPER_SEARCH_BUDGET)? {
                Ok(())
            } else {
                Err(Error::InvariantBroken(format!("tree at root {} has no extension above layer {ell}", view.root)))
            }
        }
        Err(other) => Err(other),
    }
}

fn colors_of(g: &Graph, c: &PartialEdgeColoring, vertices: &[usize]) -> Vec<Color> {
    let mut out: Vec<Color> = vertices.iter().flat_map(|&v| c.colors_at(g, v)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Colors edge layer `k` so that the vertices at depth `k` see at least
/// `delta` colors, assuming depth `k + 1` already does.
fn color_layer(g: &Graph, c: &mut PartialEdgeColoring, view: &LayerView, k: usize, delta: usize) -> Result<()> {
    let layer = &view.edge_layers[k];
    let vertices = &view.vertex_layers[k];
    let reset = |c: &mut PartialEdgeColoring| layer.iter().for_each(|&e| c.clear(e));

    // Greedy, preferring colors the layer does not see yet.
    let mut seen = colors_of(g, c, vertices);
    for &e in layer {
        let avail = c.available(g, e);
        let pick = if seen.len() < delta { avail.iter().find(|x| !seen.contains(x)).or(avail.first()) } else { avail.first() };
        let col = *pick.ok_or_else(|| Error::InvariantBroken(format!("edge {} has no available color", g.edge(e))))?;
        c.set(e, col);
        if let Err(pos) = seen.binary_search(&col) {
            seen.insert(pos, col);
        }
    }
    if seen.len() >= delta {
        return Ok(());
    }
    reset(c);

    // Two edges whose lower endpoints see different colors: color the rest
    // first, then spend one of the two on a color the layer lacks.
    let below = |c: &PartialEdgeColoring, e: usize| {
        let id = g.edge(e);
        let lower = if view.vertex_layers[k + 1].binary_search(&id.u).is_ok() { id.u } else { id.v };
        let mut s: Vec<Color> = c.colors_at(g, lower).collect();
        s.sort_unstable();
        s
    };
    let pair = layer.iter().enumerate().find_map(|(i, &e)| {
        layer[i + 1..].iter().find(|&&f| below(c, e) != below(c, f)).map(|&f| (e, f))
    });
    if let Some((e, f)) = pair {
        for &x in layer.iter().filter(|&&x| x != e && x != f) {
            if let Some(col) = c.min_available(g, x) {
                c.set(x, col);
            }
        }
        let seen = colors_of(g, c, vertices);
        for (first, second) in [(e, f), (f, e)] {
            let fresh = c.available(g, first).into_iter().find(|x| !seen.contains(x));
            if let Some(col) = fresh {
                c.set(first, col);
                if let Some(col2) = c.min_available(g, second) {
                    c.set(second, col2);
                    if layer.iter().all(|&x| c.get(x).is_some()) && colors_of(g, c, vertices).len() >= delta {
                        return Ok(());
                    }
                }
                c.clear(first);
                c.clear(second);
            }
        }
        reset(c);
    }

    // Small layers: exhaustive search with a bound on reachable colors.
    let base = colors_of(g, c, vertices);
    let mut nodes = 0;
    if search_layer(g, c, layer, 0, &base, delta, &mut nodes)? {
        return Ok(());
    }
    reset(c);
    Err(Error::InvariantBroken(format!("layer {k} cannot be made colorful")))
}

fn search_layer(g: &Graph, c: &mut PartialEdgeColoring, layer: &[usize], i: usize, seen: &[Color], delta: usize, nodes: &mut usize) -> Result<bool> {
    *nodes += 1;
    if *nodes > LAYER_SEARCH_BUDGET {
        return Ok(false);
    }
    if seen.len() + (layer.len() - i) < delta {
        return Ok(false);
    }
    if i == layer.len() {
        return Ok(true);
    }
    let e = layer[i];
    let mut avail = c.available(g, e);
    // New colors first.
    avail.sort_by_key(|x| seen.contains(x));
    for col in avail {
        c.set(e, col);
        let mut next = seen.to_vec();
        if let Err(pos) = next.binary_search(&col) {
            next.insert(pos, col);
        }
        if search_layer(g, c, layer, i + 1, &next, delta, nodes)? {
            return Ok(true);
        }
    }
    c.clear(e);
    Ok(false)
}

/// Result of [`switch_colors`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchOutcome {
    /// Edge moved to the extra color, if any.
    pub recolored: Option<usize>,
    /// Distinct colors seen by the layer afterwards.
    pub layer_colors: usize,
}

/// Makes depth layer `k` of `view` see at least Δ colors using two
/// independent colored edges `pair[i].1`, each at the leaf `pair[i].0` of that
/// layer. The decision only looks at the edges around the two leaves: if
/// they see fewer than Δ colors together, the first edge moves to the extra
/// color 2Δ−2. Edges not touching either leaf cannot affect the outcome.
pub fn switch_colors(g: &Graph, c: &mut PartialEdgeColoring, view: &LayerView, k: usize, pair: [(usize, usize); 2]) -> Result<SwitchOutcome> {
    let delta = g.max_degree();
    let extra = 2 * delta - 2;
    let bad = |msg: String| Err(Error::PreconditionViolation(msg));
    if c.palette() < extra {
        return bad(format!("palette {} lacks the color {extra}", c.palette()));
    }
    if k == 0 || k >= view.vertex_layers.len() {
        return bad(format!("layer {k} is outside the tree"));
    }
    let [(u, e), (u2, e2)] = pair;
    let (id, id2) = (g.edge(e), g.edge(e2));
    if !id.contains(u) || !id2.contains(u2) {
        return bad("assigned edges must touch their leaves".into());
    }
    if id.shares_endpoint(&id2) || e == e2 {
        return bad(format!("assigned edges {id} and {id2} are adjacent"));
    }
    for leaf in [u, u2] {
        if view.vertex_layers[k].binary_search(&leaf).is_err() {
            return bad(format!("vertex {leaf} is not at depth {k}"));
        }
        let has_child = view.edge_layers.get(k).is_some_and(|l| l.iter().any(|&f| g.edge(f).contains(leaf)));
        if has_child {
            return bad(format!("vertex {leaf} is not a leaf"));
        }
    }
    if c.get(e).is_none() || c.get(e2).is_none() {
        return bad("assigned edges must be colored".into());
    }
    let around = colors_of(g, c, &[u, u2]);
    if around.iter().any(|&x| x >= extra) {
        return bad(format!("the leaves already see color {extra}"));
    }
    let mut recolored = None;
    if around.len() < delta {
        if !c.fits(g, e, extra) {
            return bad(format!("edge {id} cannot take color {extra}"));
        }
        c.set(e, extra);
        recolored = Some(e);
    }
    let layer_colors = view.colorful_count(g, c, k);
    if layer_colors < delta {
        return Err(Error::InvariantBroken(format!("layer {k} sees {layer_colors} colors after switching")));
    }
    Ok(SwitchOutcome { recolored, layer_colors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::brute_force_extension;
    use crate::verify::check_proper_coloring;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Δ = 3: root 0 with leaf children 1 and 2; leaf 1 reaches 3 and 4,
    /// leaf 2 reaches 5 and 6.
    fn flip_instance(colors: [Color; 4]) -> (Graph, PartialEdgeColoring, LayerView) {
        let g = Graph::from_edges(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]).unwrap();
        let mut c = PartialEdgeColoring::new(g.m(), 4);
        for (&(a, b), col) in [(1, 3), (1, 4), (2, 5), (2, 6)].iter().zip(colors) {
            c.set(g.edge_index(a, b).unwrap(), col);
        }
        let tree = [g.edge_index(0, 1).unwrap(), g.edge_index(0, 2).unwrap()];
        let view = LayerView::from_tree(&g, 0, &tree).unwrap();
        (g, c, view)
    }

    #[test]
    fn switch_adds_the_extra_color() {
        let (g, mut c, view) = flip_instance([1, 2, 1, 2]);
        assert_eq!(view.colorful_count(&g, &c, 1), 2);
        let e = g.edge_index(1, 3).unwrap();
        let out = switch_colors(&g, &mut c, &view, 1, [(1, e), (2, g.edge_index(2, 5).unwrap())]).unwrap();
        assert_eq!(out, SwitchOutcome { recolored: Some(e), layer_colors: 3 });
        assert_eq!(c.get(e), Some(4));
        let mut seen = colors_of(&g, &c, &view.vertex_layers[1]);
        seen.sort_unstable();
        assert_eq!(seen, vec![1, 2, 4]);
        // The tree now extends.
        extend_tree(&g, &mut c, &view, 1).unwrap();
        assert!(check_proper_coloring(&g, &c, Some(4), true).pass);
    }

    #[test]
    fn switch_leaves_colorful_layers_alone() {
        let (g, mut c, view) = flip_instance([1, 2, 1, 3]);
        let before = c.clone();
        let pair = [(1, g.edge_index(1, 3).unwrap()), (2, g.edge_index(2, 5).unwrap())];
        let out = switch_colors(&g, &mut c, &view, 1, pair).unwrap();
        assert_eq!(out.recolored, None);
        assert_eq!(c, before);
    }

    #[test]
    fn switch_preconditions() {
        let (g, mut c, view) = flip_instance([1, 2, 1, 2]);
        let a = g.edge_index(1, 3).unwrap();
        let b = g.edge_index(1, 4).unwrap();
        assert!(matches!(switch_colors(&g, &mut c, &view, 1, [(1, a), (1, b)]), Err(Error::PreconditionViolation(_))));
        let d = g.edge_index(2, 5).unwrap();
        assert!(matches!(switch_colors(&g, &mut c, &view, 0, [(1, a), (2, d)]), Err(Error::PreconditionViolation(_))));
        c.set(b, 4);
        assert!(matches!(switch_colors(&g, &mut c, &view, 1, [(1, a), (2, d)]), Err(Error::PreconditionViolation(_))));
    }

    /// A layer of `leaves` leaves under `parents` parents with two outside
    /// edges each (Δ = 3), colored from [3] at random.
    fn wide_layer(rng: &mut ChaCha8Rng) -> (Graph, PartialEdgeColoring, LayerView, Vec<usize>) {
        let parents = 4;
        let mut edges = Vec::new();
        let leaves: Vec<usize> = (0..2 * parents).map(|i| 1 + parents + i).collect();
        for p in 1..=parents {
            edges.push((0, p));
            edges.push((p, leaves[2 * (p - 1)]));
            edges.push((p, leaves[2 * (p - 1) + 1]));
        }
        // Root has degree 4 here, so Δ = 4 and every leaf gets three outside edges.
        let mut next = 1 + 3 * parents;
        for &l in &leaves {
            for _ in 0..3 {
                edges.push((l, next));
                next += 1;
            }
        }
        let g = Graph::from_edges(next, edges).unwrap();
        let mut c = PartialEdgeColoring::new(g.m(), 6);
        let mut tree = Vec::new();
        for p in 1..=parents {
            tree.push(g.edge_index(0, p).unwrap());
        }
        for &l in &leaves {
            let p = g.neighbors(l).iter().copied().find(|&x| x <= parents).unwrap();
            tree.push(g.edge_index(l, p).unwrap());
            // Outside colors: a random 3-subset of [5].
            let mut pool: Vec<Color> = (1..=5).collect();
            for i in (1..5).rev() {
                pool.swap(i, rng.gen_range(0..=i));
            }
            let outs: Vec<usize> = g.incident_edges(l).iter().copied().filter(|&e| !tree.contains(&e)).collect();
            for (e, col) in outs.into_iter().zip(pool) {
                c.set(e, col);
            }
        }
        let view = LayerView::from_tree(&g, 0, &tree).unwrap();
        (g, c, view, leaves)
    }

    #[test]
    fn switch_survives_adversarial_recoloring_elsewhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (g, c, view, leaves) = wide_layer(&mut rng);
            let (u, u2) = (leaves[0], leaves[3]);
            let pick = |x: usize| g.incident_edges(x).iter().copied().find(|&e| !view.edges().contains(&e)).unwrap();
            let pair = [(u, pick(u)), (u2, pick(u2))];
            let mut plain = c.clone();
            let decided = switch_colors(&g, &mut plain, &view, 2, pair).unwrap();
            // Adversary: rewrite every outside edge not touching u or u2.
            let mut attacked = c.clone();
            for &l in &leaves {
                if l == u || l == u2 {
                    continue;
                }
                for &e in g.incident_edges(l) {
                    if !view.edges().contains(&e) {
                        attacked.set(e, rng.gen_range(1..=5));
                    }
                }
            }
            let after = switch_colors(&g, &mut attacked, &view, 2, pair).unwrap();
            assert_eq!(after.recolored, decided.recolored);
            assert!(after.layer_colors >= 4);
        }
    }

    #[test]
    fn star_layer_reduces_to_star_extension() {
        let (g, mut c, view) = flip_instance([1, 2, 1, 3]);
        extend_tree(&g, &mut c, &view, 1).unwrap();
        assert!(check_proper_coloring(&g, &c, Some(4), true).pass);
    }

    #[test]
    fn missing_colorful_layer_rejected() {
        let (g, mut c, view) = flip_instance([1, 2, 1, 2]);
        assert!(matches!(extend_tree(&g, &mut c, &view, 1), Err(Error::PreconditionViolation(_))));
    }

    /// Random trees of max degree 4 with at most 14 edges, padded with
    /// colored pendant edges so every tree vertex has degree 4.
    fn random_tree_instance(rng: &mut ChaCha8Rng) -> (Graph, PartialEdgeColoring, LayerView) {
        let delta = 4;
        let mut parent: Vec<Option<usize>> = vec![None];
        let mut children = vec![0usize];
        let target = rng.gen_range(5..=14);
        while parent.len() <= target {
            let open: Vec<usize> = (0..parent.len()).filter(|&v| children[v] < if v == 0 { delta } else { delta - 1 }).collect();
            let p = open[rng.gen_range(0..open.len())];
            children[p] += 1;
            parent.push(Some(p));
            children.push(0);
        }
        let t = parent.len();
        let mut edges: Vec<(usize, usize)> = (1..t).map(|v| (parent[v].unwrap(), v)).collect();
        let mut next = t;
        let mut pendants = Vec::new();
        for v in 0..t {
            let deg = children[v] + usize::from(v != 0);
            for _ in deg..delta {
                edges.push((v, next));
                pendants.push((v, next));
                next += 1;
            }
        }
        let g = Graph::from_edges(next, edges).unwrap();
        let mut c = PartialEdgeColoring::new(g.m(), 2 * delta - 2);
        for v in 0..t {
            let mut pool: Vec<Color> = (1..=2 * delta - 3).collect();
            for i in (1..pool.len()).rev() {
                pool.swap(i, rng.gen_range(0..=i));
            }
            let outs: Vec<usize> = pendants.iter().filter(|p| p.0 == v).map(|p| g.edge_index(p.0, p.1).unwrap()).collect();
            for (e, col) in outs.into_iter().zip(pool) {
                c.set(e, col);
            }
        }
        let tree: Vec<usize> = (1..t).map(|v| g.edge_index(parent[v].unwrap(), v).unwrap()).collect();
        let view = LayerView::from_tree(&g, 0, &tree).unwrap();
        (g, c, view)
    }

    #[test]
    fn colorful_trees_agree_with_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        for _ in 0..300 {
            let (g, c, view) = random_tree_instance(&mut rng);
            let Some(ell) = view.colorful_layer(&g, &c, 4) else { continue };
            checked += 1;
            let tree = view.edges();
            let oracle = brute_force_extension(&g, &c, &tree, 1 << 22).unwrap();
            assert!(oracle.is_some());
            let mut mine = c.clone();
            extend_tree(&g, &mut mine, &view, ell).unwrap();
            assert!(check_proper_coloring(&g, &mine, Some(6), true).pass);
            for e in 0..g.m() {
                if !tree.contains(&e) {
                    assert_eq!(mine.get(e), c.get(e));
                }
            }
        }
        assert!(checked >= 100, "{checked}");
    }

    #[test]
    fn deep_colorful_layer_propagates_up() {
        // Path-like tree where only the deepest layer is colorful.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut hits = 0;
        for _ in 0..400 {
            let (g, c, view) = random_tree_instance(&mut rng);
            let depth = view.vertex_layers.len() - 1;
            if depth < 3 || view.colorful_count(&g, &c, depth) < 4 {
                continue;
            }
            hits += 1;
            let mut mine = c.clone();
            extend_tree(&g, &mut mine, &view, depth).unwrap();
            assert!(check_proper_coloring(&g, &mine, Some(6), true).pass);
        }
        assert!(hits > 0);
    }
}
