//! Partial edge colorings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Colors are 1-based: a palette of size `k` is `1..=k`.
pub type Color = usize;

/// An assignment of colors (or nothing) to the edges of a fixed graph,
/// indexed by the graph's edge indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialEdgeColoring {
    palette: usize,
    colors: Vec<Option<Color>>,
}

impl PartialEdgeColoring {
    pub fn new(m: usize, palette: usize) -> Self {
        PartialEdgeColoring { palette, colors: vec![None; m] }
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn set_palette(&mut self, palette: usize) {
        self.palette = palette;
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn get(&self, e: usize) -> Option<Color> {
        self.colors[e]
    }

    pub fn set(&mut self, e: usize, c: Color) {
        debug_assert!(c >= 1 && c <= self.palette, "color {c} outside palette {}", self.palette);
        self.colors[e] = Some(c);
    }

    pub fn clear(&mut self, e: usize) {
        self.colors[e] = None;
    }

    pub fn as_slice(&self) -> &[Option<Color>] {
        &self.colors
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(Option::is_some)
    }

    pub fn uncolored(&self) -> impl Iterator<Item = usize> + '_ {
        self.colors.iter().enumerate().filter(|(_, c)| c.is_none()).map(|(i, _)| i)
    }

    /// Largest color in use.
    pub fn max_color(&self) -> Color {
        self.colors.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Colors of the colored edges incident to `v`.
    pub fn colors_at<'a>(&'a self, g: &'a Graph, v: usize) -> impl Iterator<Item = Color> + 'a {
        g.incident_edges(v).iter().filter_map(|&e| self.colors[e])
    }

    /// Palette colors not used by any colored neighbor of edge `e`.
    pub fn available(&self, g: &Graph, e: usize) -> Vec<Color> {
        let mut used = vec![false; self.palette + 1];
        for f in g.edge_neighbors(e) {
            if let Some(c) = self.colors[f] {
                if c <= self.palette {
                    used[c] = true;
                }
            }
        }
        (1..=self.palette).filter(|&c| !used[c]).collect()
    }

    /// Smallest available color of `e`, if any.
    pub fn min_available(&self, g: &Graph, e: usize) -> Option<Color> {
        self.available(g, e).into_iter().next()
    }

    /// Whether `c` can be given to `e` without clashing with a neighbor.
    pub fn fits(&self, g: &Graph, e: usize, c: Color) -> bool {
        g.edge_neighbors(e).all(|f| self.colors[f] != Some(c))
    }

    /// "u v c" lines, one per colored edge, in edge order.
    pub fn to_text(&self, g: &Graph) -> String {
        let mut out = String::new();
        for (i, e) in g.edges().iter().enumerate() {
            if let Some(c) = self.colors[i] {
                out.push_str(&format!("{} {} {}\n", e.u, e.v, c));
            }
        }
        out
    }

    /// Parses "u v c" lines against `g`. The palette is set to the largest
    /// color read.
    pub fn parse(g: &Graph, text: &str) -> Result<Self> {
        let mut col = PartialEdgeColoring::new(g.m(), 0);
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| parse_err("expected integers")))
                .collect::<Result<_>>()?;
            let [u, v, c] = nums[..] else {
                return Err(parse_err("expected \"u v c\""));
            };
            let e = g.edge_index(u, v).ok_or_else(|| parse_err("edge not in graph"))?;
            if c == 0 {
                return Err(parse_err("colors start at 1"));
            }
            if col.colors[e].is_some() {
                return Err(parse_err("edge colored twice"));
            }
            col.colors[e] = Some(c);
            col.palette = col.palette.max(c);
        }
        Ok(col)
    }
}
