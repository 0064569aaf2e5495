//! Extending partial edge colorings to uncolored trees, stars, even cycles
//! and components with a low-degree vertex.

mod brute;
mod easy;
mod star;
mod tree;

pub use brute::{backtrack_extension, brute_force_extension, BRUTE_FORCE_MAX_EDGES};
pub use easy::{color_cycle_from_lists, extend_easy_component};
pub use star::extend_star;
pub use tree::{extend_tree, switch_colors, SwitchOutcome};

use std::collections::VecDeque;

use crate::clustering::Clustering;
use crate::coloring::PartialEdgeColoring;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::verify::layer_color_count;

/// A rooted tree split into depth layers: `vertex_layers[k]` are the vertices
/// at depth `k`, `edge_layers[k]` the edges from depth `k` to `k + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerView {
    pub root: usize,
    pub vertex_layers: Vec<Vec<usize>>,
    pub edge_layers: Vec<Vec<usize>>,
}

impl LayerView {
    /// Layers of the tree formed by `tree_edges` around `root`.
    pub fn from_tree(g: &Graph, root: usize, tree_edges: &[usize]) -> Result<Self> {
        let mut in_tree = vec![false; g.m()];
        for &e in tree_edges {
            in_tree[e] = true;
        }
        let mut depth = vec![usize::MAX; g.n()];
        depth[root] = 0;
        let mut vertex_layers = vec![vec![root]];
        let mut edge_layers: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::from([root]);
        let mut reached = 0;
        while let Some(x) = queue.pop_front() {
            for (y, e) in g.incident(x) {
                if !in_tree[e] || depth[y] <= depth[x] {
                    continue;
                }
                if depth[y] != usize::MAX {
                    return Err(Error::PreconditionViolation(format!("edges around {y} close a cycle")));
                }
                let d = depth[x] + 1;
                depth[y] = d;
                if vertex_layers.len() <= d {
                    vertex_layers.push(Vec::new());
                    edge_layers.push(Vec::new());
                }
                vertex_layers[d].push(y);
                edge_layers[d - 1].push(e);
                reached += 1;
                queue.push_back(y);
            }
        }
        if reached != tree_edges.len() {
            return Err(Error::PreconditionViolation("tree edges are not a tree around the root".into()));
        }
        for l in vertex_layers.iter_mut().chain(edge_layers.iter_mut()) {
            l.sort_unstable();
        }
        Ok(LayerView { root, vertex_layers, edge_layers })
    }

    /// Layers of one cluster tree.
    pub fn from_cluster(g: &Graph, cl: &Clustering, members: &[usize]) -> Self {
        let root = cl.root_of[members[0]];
        let mut vertex_layers = cl.layers(members);
        let mut edge_layers = cl.edge_layers(g, members);
        edge_layers.resize(vertex_layers.len().saturating_sub(1), Vec::new());
        for l in &mut vertex_layers {
            l.sort_unstable();
        }
        LayerView { root, vertex_layers, edge_layers }
    }

    pub fn edges(&self) -> Vec<usize> {
        self.edge_layers.iter().flatten().copied().collect()
    }

    /// Distinct colors on colored edges incident to depth layer `k`.
    pub fn colorful_count(&self, g: &Graph, c: &PartialEdgeColoring, k: usize) -> usize {
        layer_color_count(g, c, &self.vertex_layers[k])
    }

    /// Deepest-first search for a layer `k ≥ 1` seeing at least `delta` colors.
    pub fn colorful_layer(&self, g: &Graph, c: &PartialEdgeColoring, delta: usize) -> Option<usize> {
        (1..self.vertex_layers.len()).rev().find(|&k| self.colorful_count(g, c, k) >= delta)
    }
}
