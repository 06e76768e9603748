//! Perfect mazes by randomized Kruskal.
//!
//! A `dim x dim` grid holds an `n x n` lattice of nodes at even coordinates
//! `2i` (`n = ceil(dim / 2)`); the odd cells between two nodes are the walls
//! that Kruskal may carve. For even `dim` the last row and column never hold a
//! node and stay walls.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levelgen::TilePos;
use crate::rng::{LevelSeed, Rng, StreamTag};
use crate::union_find::DisjointSet;

pub const MAZE_MIN_DIM: i32 = 3;
pub const MAZE_MAX_DIM: i32 = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellKind {
    Wall,
    Empty,
    Goal,
}

impl CellKind {
    pub fn symbol(self) -> char {
        match self {
            CellKind::Wall => '#',
            CellKind::Empty => '.',
            CellKind::Goal => 'G',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            '#' => Some(CellKind::Wall),
            '.' => Some(CellKind::Empty),
            'G' => Some(CellKind::Goal),
            _ => None,
        }
    }

    #[inline]
    pub fn is_corridor(self) -> bool {
        !matches!(self, CellKind::Wall)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazeLevel {
    pub seed: LevelSeed,
    pub dim: i32,
    /// Row-major, `y = 0` on top.
    pub cells: Vec<CellKind>,
    pub agent_start: TilePos,
}

const NEIGHBORS: [(i32, i32); 4] = [(0, -1), (0, 1), (-1, 0), (1, 0)];

impl MazeLevel {
    /// Cell at `(x, y)`; everything outside the grid is wall.
    #[inline]
    pub fn cell(&self, x: i32, y: i32) -> CellKind {
        if x < 0 || y < 0 || x >= self.dim || y >= self.dim {
            CellKind::Wall
        } else {
            self.cells[(y * self.dim + x) as usize]
        }
    }

    pub fn is_corridor(&self, p: TilePos) -> bool {
        self.cell(p.x, p.y).is_corridor()
    }

    pub fn goal(&self) -> TilePos {
        let i = self
            .cells
            .iter()
            .position(|&c| c == CellKind::Goal)
            .expect("maze without a goal cell");
        TilePos::new(i as i32 % self.dim, i as i32 / self.dim)
    }

    pub fn corridor_cells(&self) -> Vec<TilePos> {
        (0..self.dim)
            .flat_map(|y| (0..self.dim).map(move |x| TilePos::new(x, y)))
            .filter(|p| self.is_corridor(*p))
            .collect()
    }

    /// Number of 4-adjacent corridor pairs.
    pub fn corridor_edge_count(&self) -> usize {
        let mut edges = 0;
        for y in 0..self.dim {
            for x in 0..self.dim {
                if !self.cell(x, y).is_corridor() {
                    continue;
                }
                edges += usize::from(self.cell(x + 1, y).is_corridor());
                edges += usize::from(self.cell(x, y + 1).is_corridor());
            }
        }
        edges
    }

    /// Connected and acyclic, counted with a fresh union-find.
    pub fn is_perfect(&self) -> bool {
        let corridor = self.corridor_cells();
        if corridor.is_empty() || self.corridor_edge_count() + 1 != corridor.len() {
            return false;
        }
        let idx = |x: i32, y: i32| (y * self.dim + x) as usize;
        let mut ds = DisjointSet::new((self.dim * self.dim) as usize);
        for p in &corridor {
            for (nx, ny) in [(p.x + 1, p.y), (p.x, p.y + 1)] {
                if self.cell(nx, ny).is_corridor() && !ds.union(idx(p.x, p.y), idx(nx, ny)) {
                    return false;
                }
            }
        }
        let root = ds.find(idx(corridor[0].x, corridor[0].y));
        corridor.iter().all(|p| ds.find(idx(p.x, p.y)) == root)
    }

    /// Cells from `from` to `to` inclusive, by BFS over corridor cells.
    pub fn path(&self, from: TilePos, to: TilePos) -> Result<Vec<TilePos>> {
        for p in [from, to] {
            if !self.is_corridor(p) {
                return Err(Error::InvalidCell { x: p.x, y: p.y });
            }
        }
        let n = (self.dim * self.dim) as usize;
        let idx = |p: TilePos| (p.y * self.dim + p.x) as usize;
        let mut prev = vec![usize::MAX; n];
        prev[idx(from)] = idx(from);
        let mut queue = VecDeque::from([from]);
        while let Some(p) = queue.pop_front() {
            if p == to {
                break;
            }
            for (dx, dy) in NEIGHBORS {
                let q = TilePos::new(p.x + dx, p.y + dy);
                if self.is_corridor(q) && prev[idx(q)] == usize::MAX {
                    prev[idx(q)] = idx(p);
                    queue.push_back(q);
                }
            }
        }
        if prev[idx(to)] == usize::MAX {
            return Err(Error::InvalidCell { x: to.x, y: to.y });
        }
        let mut path = vec![to];
        let mut cur = idx(to);
        while cur != idx(from) {
            cur = prev[cur];
            path.push(TilePos::new(cur as i32 % self.dim, cur as i32 / self.dim));
        }
        path.reverse();
        Ok(path)
    }

    /// Moves needed to walk from `from` to `to`.
    pub fn shortest_path_length(&self, from: TilePos, to: TilePos) -> Result<u32> {
        Ok(self.path(from, to)?.len() as u32 - 1)
    }
}

pub fn generate_maze(seed: LevelSeed) -> MazeLevel {
    let mut layout = Rng::stream(seed, StreamTag::Layout);
    let dim = layout.range(i64::from(MAZE_MIN_DIM), i64::from(MAZE_MAX_DIM)) as i32;
    let n = (dim + 1) / 2;
    let mut cells = vec![CellKind::Wall; (dim * dim) as usize];
    let at = |x: i32, y: i32| (y * dim + x) as usize;
    for j in 0..n {
        for i in 0..n {
            cells[at(2 * i, 2 * j)] = CellKind::Empty;
        }
    }

    // lattice edges in row-major order: right neighbour first, then down
    let node = |i: i32, j: i32| (j * n + i) as usize;
    let mut edges = Vec::with_capacity((2 * n * (n - 1)) as usize);
    for j in 0..n {
        for i in 0..n {
            if i + 1 < n {
                edges.push(((i, j), (i + 1, j)));
            }
            if j + 1 < n {
                edges.push(((i, j), (i, j + 1)));
            }
        }
    }
    layout.shuffle(&mut edges);
    let mut ds = DisjointSet::new((n * n) as usize);
    for ((ai, aj), (bi, bj)) in edges {
        if ds.union(node(ai, aj), node(bi, bj)) {
            cells[at(ai + bi, aj + bj)] = CellKind::Empty;
        }
    }

    let corridor: Vec<usize> = (0..cells.len()).filter(|&i| cells[i].is_corridor()).collect();
    let mut entities = Rng::stream(seed, StreamTag::Entities);
    let goal = entities.index(corridor.len());
    let mut start = entities.index(corridor.len() - 1);
    if start >= goal {
        start += 1;
    }
    cells[corridor[goal]] = CellKind::Goal;
    let s = corridor[start] as i32;

    MazeLevel {
        seed,
        dim,
        cells,
        agent_start: TilePos::new(s % dim, s / dim),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed_with_dim(dim: i32) -> LevelSeed {
        (0..)
            .map(LevelSeed)
            .find(|&s| Rng::stream(s, StreamTag::Layout).range(3, 25) as i32 == dim)
            .unwrap()
    }

    #[test]
    fn dim3_structure() {
        // 2x2 node lattice: 4 nodes and 3 carved connectors, center stays wall
        let m = generate_maze(seed_with_dim(3));
        assert_eq!(m.dim, 3);
        assert_eq!(m.corridor_cells().len(), 7);
        assert_eq!(m.corridor_edge_count(), 6);
        assert_eq!(m.cell(1, 1), CellKind::Wall);
        assert!(m.is_perfect());
    }

    #[test]
    fn even_dims_leave_last_row_and_column_walled() {
        for dim in [4, 10, 24] {
            let m = generate_maze(seed_with_dim(dim));
            for k in 0..dim {
                assert_eq!(m.cell(dim - 1, k), CellKind::Wall);
                assert_eq!(m.cell(k, dim - 1), CellKind::Wall);
            }
            assert!(m.is_perfect());
        }
    }

    #[test]
    fn every_maze_is_a_tree_with_one_goal() {
        for s in 0..2000 {
            let m = generate_maze(LevelSeed(s));
            assert!((3..=25).contains(&m.dim));
            assert!(m.is_perfect(), "seed {s}");
            assert_eq!(m.cells.iter().filter(|&&c| c == CellKind::Goal).count(), 1);
            assert_eq!(m.cell(m.agent_start.x, m.agent_start.y), CellKind::Empty);
            assert_ne!(m.agent_start, m.goal());
            let d = m.shortest_path_length(m.agent_start, m.goal()).unwrap();
            assert!((d as usize) < m.corridor_cells().len());
            assert!(d <= 337);
        }
    }

    #[test]
    fn dimension_is_uniform() {
        let n = 23_000u32;
        let mut counts = [0u32; 23];
        for s in 0..n {
            let seed = LevelSeed(s.wrapping_mul(0x9E37_79B9));
            counts[(generate_maze(seed).dim - 3) as usize] += 1;
        }
        let expected = f64::from(n) / 23.0;
        let chi2: f64 = counts.iter().map(|&c| (f64::from(c) - expected).powi(2) / expected).sum();
        // 22 dof, p = 0.001
        assert!(chi2 < 48.268, "chi2 {chi2}");
    }

    #[test]
    fn path_lengths() {
        let m = generate_maze(LevelSeed(17));
        let start = m.agent_start;
        assert_eq!(m.shortest_path_length(start, start).unwrap(), 0);
        let next = NEIGHBORS
            .iter()
            .map(|(dx, dy)| TilePos::new(start.x + dx, start.y + dy))
            .find(|p| m.is_corridor(*p))
            .unwrap();
        assert_eq!(m.shortest_path_length(start, next).unwrap(), 1);
        let wall = m
            .cells
            .iter()
            .position(|&c| c == CellKind::Wall)
            .map(|i| TilePos::new(i as i32 % m.dim, i as i32 / m.dim));
        if let Some(w) = wall {
            assert!(matches!(m.shortest_path_length(start, w), Err(Error::InvalidCell { .. })));
        }
        assert!(m.shortest_path_length(TilePos::new(-1, 0), start).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate_maze(LevelSeed(5)), generate_maze(LevelSeed(5)));
    }
}
