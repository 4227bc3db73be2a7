use serde::Serialize;

use super::{enumerate_basic, enumerate_squares, ApproximateSquare, BasicRectangle, GeometryError};
use crate::carpet::Carpet;

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut u: usize) -> usize {
        while self.parent[u] != u {
            self.parent[u] = self.parent[self.parent[u]];
            u = self.parent[u];
        }
        u
    }

    /// Returns whether `u` and `v` were in different sets.
    pub fn union(&mut self, u: usize, v: usize) -> bool {
        let (mut a, mut b) = (self.find(u), self.find(v));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Which rank-`k` pieces a partition is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    /// Basic rectangles, i.e. components of the `k`-th approximation.
    TildeApprox,
    /// Approximate squares.
    SquareApprox,
}

/// Connected components of the closed union of rank-`k` pieces.
///
/// Each component lists indices into the enumeration the partition was built
/// from, ascending. Components are ordered by their lowest grid cell, so the
/// partition does not depend on enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    rank: u64,
    kind: PieceKind,
    piece_count: usize,
    cells: Vec<Vec<usize>>,
}

impl ComponentPartition {
    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn kind(&self) -> PieceKind {
        self.kind
    }

    pub fn piece_count(&self) -> usize {
        self.piece_count
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn max_cardinality(&self) -> usize {
        self.cells.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Component id of every piece, in enumeration order.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.piece_count];
        for (id, members) in self.cells.iter().enumerate() {
            for &i in members {
                labels[i] = id;
            }
        }
        labels
    }
}

/// Groups unit grid cells into components; two cells touch when they differ
/// by at most one in each coordinate, so corner contact connects.
pub fn partition_cells(cells: &[(u128, u128)]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_unstable_by_key(|&i| cells[i]);
    let sorted: Vec<(u128, u128)> = order.iter().map(|&i| cells[i]).collect();
    let lookup = |c: (u128, u128)| sorted.binary_search(&c).ok();

    let mut uf = UnionFind::new(cells.len());
    for (pos, &(x, y)) in sorted.iter().enumerate() {
        // Forward neighbours only; the rest are covered from the other side.
        let mut neighbours = vec![(x, y + 1), (x + 1, y), (x + 1, y + 1)];
        if y > 0 {
            neighbours.push((x + 1, y - 1));
        }
        for c in neighbours {
            if let Some(other) = lookup(c) {
                uf.union(pos, other);
            }
        }
    }

    let mut root_to_id = std::collections::HashMap::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (pos, &piece) in order.iter().enumerate() {
        let root = uf.find(pos);
        let id = *root_to_id.entry(root).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[id].push(piece);
    }
    for members in &mut out {
        members.sort_unstable();
    }
    out
}

type Cell = (u128, u128);

fn cells_of<I, P>(pieces: I, rank: u64, cell: impl Fn(&P) -> Option<Cell>) -> Result<(Vec<P>, Vec<Cell>), GeometryError>
where
    I: Iterator<Item = P>,
{
    let mut kept = Vec::new();
    let mut cells = Vec::new();
    for p in pieces {
        cells.push(cell(&p).ok_or(GeometryError::CoordinateOverflow { rank })?);
        kept.push(p);
    }
    Ok((kept, cells))
}

/// Components of the rank-`k` approximation, with the rectangles themselves.
pub fn basic_components(
    carpet: &Carpet,
    k: u64,
    budget: u64,
) -> Result<(Vec<BasicRectangle>, ComponentPartition), GeometryError> {
    let (pieces, cells) = cells_of(enumerate_basic(carpet, k, budget)?, k, BasicRectangle::cell)?;
    let partition = ComponentPartition {
        rank: k,
        kind: PieceKind::TildeApprox,
        piece_count: cells.len(),
        cells: partition_cells(&cells),
    };
    Ok((pieces, partition))
}

/// Components of the union of rank-`k` approximate squares, with the squares.
pub fn square_components(
    carpet: &Carpet,
    k: u64,
    budget: u64,
) -> Result<(Vec<ApproximateSquare>, ComponentPartition), GeometryError> {
    let (pieces, cells) = cells_of(enumerate_squares(carpet, k, budget)?, k, ApproximateSquare::cell)?;
    let partition = ComponentPartition {
        rank: k,
        kind: PieceKind::SquareApprox,
        piece_count: cells.len(),
        cells: partition_cells(&cells),
    };
    Ok((pieces, partition))
}

pub fn components(
    carpet: &Carpet,
    k: u64,
    kind: PieceKind,
    budget: u64,
) -> Result<ComponentPartition, GeometryError> {
    match kind {
        PieceKind::TildeApprox => basic_components(carpet, k, budget).map(|(_, p)| p),
        PieceKind::SquareApprox => square_components(carpet, k, budget).map(|(_, p)| p),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankStats {
    pub rank: u64,
    pub pieces: usize,
    pub components: usize,
    pub max_cardinality: usize,
}

/// Empirical component statistics for ranks `1..=k_max`. The maxima are
/// observations only; no bound is certified.
pub fn component_stats(
    carpet: &Carpet,
    k_max: u64,
    kind: PieceKind,
    budget: u64,
) -> Result<Vec<RankStats>, GeometryError> {
    (1..=k_max)
        .map(|k| {
            let p = components(carpet, k, kind, budget)?;
            Ok(RankStats {
                rank: k,
                pieces: p.piece_count(),
                components: p.len(),
                max_cardinality: p.max_cardinality(),
            })
        })
        .collect()
}
