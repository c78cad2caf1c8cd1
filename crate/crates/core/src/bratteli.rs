//! Stationary ordered Bratteli diagram of a tower system, finite paths,
//! the adic map, shifts and the path/floor dictionary.
//!
//! Edge `(j, l)` is floor `l` of tower `j`: it runs from vertex `w_j[l]` to
//! vertex `j`, and edges into `j` are ordered by `l`. A path `(e_1, ..., e_k)`
//! satisfies `t(e_r) = s(e_{r+1})` and names a floor of the level-`k` tower
//! `t(e_k)`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::iet::TowerSystem;

/// Levels beyond this are never tabulated, whatever the growth rate.
const MAX_TABULATED_LEVEL: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    /// Target vertex `j`.
    pub tower: usize,
    /// Position `l` in the order of edges into `j`.
    pub floor: usize,
}

impl Edge {
    pub fn new(tower: usize, floor: usize) -> Self {
        Self { tower, floor }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.tower + 1, self.floor)
    }
}

/// Edge record for the JSON dump; vertices are 1-based.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EdgeRecord {
    pub j: usize,
    pub l: usize,
    pub s: usize,
    pub t: usize,
}

/// An admissible path `(e_1, ..., e_k)`, `k >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinitePath {
    edges: Vec<Edge>,
}

impl FinitePath {
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn first(&self) -> Edge {
        self.edges[0]
    }

    pub fn last(&self) -> Edge {
        self.edges[self.edges.len() - 1]
    }

    /// Vertex at the top of the path.
    pub fn target(&self) -> usize {
        self.last().tower
    }

    /// The first `k` edges.
    pub fn prefix(&self, k: usize) -> FinitePath {
        FinitePath {
            edges: self.edges[..k].to_vec(),
        }
    }
}

impl fmt::Display for FinitePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.edges {
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Floor `height` of the level-`level` tower `tower`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FloorCoordinate {
    pub level: usize,
    pub tower: usize,
    pub height: u64,
}

#[derive(Clone, Debug)]
pub struct Diagram {
    words: Vec<Vec<usize>>,
    /// `heights[m][j] = |sigma^m(j)|`, as far as it fits in `u64`.
    heights: Vec<Vec<u64>>,
}

/// Diagram of the substitution `j -> w_j`.
pub fn build_diagram(tower: &TowerSystem) -> Diagram {
    let d = tower.d();
    let mut heights = vec![vec![1u64; d]];
    while heights.len() <= MAX_TABULATED_LEVEL {
        let prev = &heights[heights.len() - 1];
        let next: Option<Vec<u64>> = tower
            .words()
            .iter()
            .map(|w| w.iter().try_fold(0u64, |acc, &c| acc.checked_add(prev[c])))
            .collect();
        match next {
            Some(h) => heights.push(h),
            None => break,
        }
    }
    Diagram {
        words: tower.words().to_vec(),
        heights,
    }
}

impl Diagram {
    pub fn d(&self) -> usize {
        self.words.len()
    }

    pub fn word(&self, j: usize) -> &[usize] {
        &self.words[j]
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    /// Number of edges into `j`, the height `q_j` of tower `j`.
    pub fn in_degree(&self, j: usize) -> usize {
        self.words[j].len()
    }

    pub fn num_edges(&self) -> usize {
        self.words.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(j, w)| (0..w.len()).map(move |l| Edge::new(j, l)))
    }

    pub fn edge_records(&self) -> Vec<EdgeRecord> {
        self.edges()
            .map(|e| EdgeRecord {
                j: e.tower + 1,
                l: e.floor,
                s: self.source(e) + 1,
                t: e.tower + 1,
            })
            .collect()
    }

    pub fn source(&self, e: Edge) -> usize {
        self.words[e.tower][e.floor]
    }

    pub fn is_max_edge(&self, e: Edge) -> bool {
        e.floor + 1 == self.words[e.tower].len()
    }

    pub fn is_min_edge(&self, e: Edge) -> bool {
        e.floor == 0
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.words.iter().flatten().filter(|&&c| c == i).count()
    }

    /// Deepest level whose tower heights are tabulated.
    pub fn max_level(&self) -> usize {
        self.heights.len() - 1
    }

    /// Heights `|sigma^k(j)|` of the level-`k` towers.
    pub fn level_heights(&self, k: usize) -> Result<&[u64]> {
        self.heights
            .get(k)
            .map(Vec::as_slice)
            .ok_or(Error::Overflow("tower height beyond u64"))
    }

    /// Validates edges and junctions.
    pub fn path(&self, edges: Vec<Edge>) -> Result<FinitePath> {
        if edges.is_empty() {
            return Err(Error::InvalidPath("empty path".into()));
        }
        for (r, e) in edges.iter().enumerate() {
            if e.tower >= self.d() || e.floor >= self.words[e.tower].len() {
                return Err(Error::InvalidPath(format!("no edge {e} at position {}", r + 1)));
            }
            if r > 0 && edges[r - 1].tower != self.source(*e) {
                return Err(Error::InvalidPath(format!(
                    "edge {e} does not start at vertex {}",
                    edges[r - 1].tower + 1
                )));
            }
        }
        Ok(FinitePath { edges })
    }

    /// Parses `(j1,l1)(j2,l2)...` with 1-based towers and 0-based floors.
    pub fn parse_path(&self, s: &str) -> Result<FinitePath> {
        let bad = || Error::InvalidPath(format!("cannot parse path '{s}'"));
        let mut edges = Vec::new();
        for chunk in s.trim().split_terminator(')') {
            let inner = chunk.trim().strip_prefix('(').ok_or_else(bad)?;
            let (j, l) = inner.split_once(',').ok_or_else(bad)?;
            let j: usize = j.trim().parse().map_err(|_| bad())?;
            let l: usize = l.trim().parse().map_err(|_| bad())?;
            edges.push(Edge::new(j.checked_sub(1).ok_or_else(bad)?, l));
        }
        self.path(edges)
    }

    pub fn is_maximal(&self, p: &FinitePath) -> bool {
        p.edges.iter().all(|&e| self.is_max_edge(e))
    }

    pub fn is_minimal(&self, p: &FinitePath) -> bool {
        p.edges.iter().all(|&e| self.is_min_edge(e))
    }

    /// Overwrites `edges[..top]` with the minimal (or, with `extreme_max`,
    /// maximal) edges hanging below `edges[top]`.
    fn fill_below(&self, edges: &mut [Edge], top: usize, extreme_max: bool) {
        for r in (0..top).rev() {
            let j = self.source(edges[r + 1]);
            let l = if extreme_max { self.words[j].len() - 1 } else { 0 };
            edges[r] = Edge::new(j, l);
        }
    }

    /// The lexicographic successor: bump the first non-maximal edge and
    /// reset the edges below it to minimal ones.
    pub fn adic_successor(&self, p: &FinitePath) -> Result<FinitePath> {
        let n = p
            .edges
            .iter()
            .position(|&e| !self.is_max_edge(e))
            .ok_or(Error::Maximal)?;
        let mut edges = p.edges.clone();
        edges[n].floor += 1;
        self.fill_below(&mut edges, n, false);
        Ok(FinitePath { edges })
    }

    pub fn adic_predecessor(&self, p: &FinitePath) -> Result<FinitePath> {
        let n = p
            .edges
            .iter()
            .position(|&e| !self.is_min_edge(e))
            .ok_or(Error::Minimal)?;
        let mut edges = p.edges.clone();
        edges[n].floor -= 1;
        self.fill_below(&mut edges, n, true);
        Ok(FinitePath { edges })
    }

    /// Drops `e_1`.
    pub fn left_shift(&self, p: &FinitePath) -> Result<FinitePath> {
        if p.len() < 2 {
            return Err(Error::PathTooShort(p.len()));
        }
        Ok(FinitePath {
            edges: p.edges[1..].to_vec(),
        })
    }

    /// Prepends the bottom floor `(s(e_1), 0)` of the tower over `s(e_1)`.
    pub fn right_shift(&self, p: &FinitePath) -> FinitePath {
        let mut edges = Vec::with_capacity(p.len() + 1);
        edges.push(Edge::new(self.source(p.first()), 0));
        edges.extend_from_slice(&p.edges);
        FinitePath { edges }
    }

    /// Offset of floor `l` inside tower `j` at level `m`, counted in floors
    /// of level `m - 1`.
    fn offset(&self, m: usize, e: Edge) -> Result<u64> {
        let below = self.level_heights(m - 1)?;
        self.words[e.tower][..e.floor]
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(below[c]))
            .ok_or(Error::Overflow("floor height"))
    }

    pub fn path_to_floor(&self, p: &FinitePath) -> Result<FloorCoordinate> {
        let mut height = 0u64;
        for (r, &e) in p.edges.iter().enumerate() {
            height = height
                .checked_add(self.offset(r + 1, e)?)
                .ok_or(Error::Overflow("floor height"))?;
        }
        Ok(FloorCoordinate {
            level: p.len(),
            tower: p.target(),
            height,
        })
    }

    /// Inverse of [`Diagram::path_to_floor`]: at each level from the top,
    /// take the highest sub-tower starting at or below the remaining height.
    pub fn floor_to_path(&self, level: usize, tower: usize, height: u64) -> Result<FinitePath> {
        if level == 0 {
            return Err(Error::PathTooShort(0));
        }
        if tower >= self.d() {
            return Err(Error::InvalidPath(format!("no tower {}", tower + 1)));
        }
        let limit = self.level_heights(level)?[tower];
        if height >= limit {
            return Err(Error::FloorOutOfRange {
                level,
                tower: tower + 1,
                height,
                limit,
            });
        }
        let mut edges = vec![Edge::new(0, 0); level];
        let mut j = tower;
        let mut rest = height;
        for m in (1..=level).rev() {
            let below = self.level_heights(m - 1)?;
            let mut l = 0;
            while rest >= below[self.words[j][l]] {
                rest -= below[self.words[j][l]];
                l += 1;
            }
            edges[m - 1] = Edge::new(j, l);
            j = self.words[j][l];
        }
        Ok(FinitePath { edges })
    }

    /// Every admissible path of length `k`, by extension from the bottom.
    pub fn enumerate_paths(&self, k: usize) -> Vec<FinitePath> {
        let mut paths: Vec<Vec<Edge>> = if k == 0 {
            Vec::new()
        } else {
            self.edges().map(|e| vec![e]).collect()
        };
        for _ in 1..k {
            let mut next = Vec::new();
            for p in &paths {
                let v = p[p.len() - 1].tower;
                for e in self.edges().filter(|&e| self.source(e) == v) {
                    let mut q = p.clone();
                    q.push(e);
                    next.push(q);
                }
            }
            paths = next;
        }
        paths.into_iter().map(|edges| FinitePath { edges }).collect()
    }

    /// The unique path of length `k` into `tower` with all edges minimal or
    /// all maximal.
    pub fn extreme_path(&self, k: usize, tower: usize, maximal: bool) -> FinitePath {
        let mut edges = vec![Edge::new(0, 0); k];
        let l = if maximal { self.words[tower].len() - 1 } else { 0 };
        edges[k - 1] = Edge::new(tower, l);
        self.fill_below(&mut edges, k - 1, maximal);
        FinitePath { edges }
    }
}
