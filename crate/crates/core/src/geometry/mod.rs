//! Basic rectangles and approximate squares, and what is built from them.
//!
//! Pieces are addressed by integer coordinates on a uniform grid, so every
//! geometric predicate is exact.

mod boxcount;
mod components;
mod render;

pub use boxcount::{box_count, scaled_mass, BoxCount};
pub use components::{
    basic_components, component_stats, components, partition_cells, square_components,
    ComponentPartition, PieceKind, RankStats, UnionFind,
};
pub use render::{render_pieces, render_svg, RenderOptions};

use crate::carpet::{Carpet, Digit};

/// Default cap on the number of pieces any single enumeration may produce.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("enumeration of {requested} pieces exceeds the budget of {budget}")]
    BudgetExceeded { requested: String, budget: u64 },
    #[error("grid coordinates at rank {rank} do not fit in 128 bits")]
    CoordinateOverflow { rank: u64 },
    #[error("invalid piece: {0}")]
    InvalidPiece(String),
}

/// A finite word over `{0, ..., base - 1}`; the empty word is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolWord {
    base: u32,
    symbols: Vec<u32>,
}

impl SymbolWord {
    pub fn new(base: u32, symbols: Vec<u32>) -> Result<Self, GeometryError> {
        if let Some(&s) = symbols.iter().find(|&&s| s >= base) {
            return Err(GeometryError::InvalidPiece(format!(
                "symbol {s} out of range for base {base}"
            )));
        }
        Ok(SymbolWord { base, symbols })
    }

    pub fn empty(base: u32) -> Self {
        SymbolWord {
            base,
            symbols: Vec::new(),
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `self ∗ other`.
    pub fn concat(&self, other: &SymbolWord) -> SymbolWord {
        debug_assert_eq!(self.base, other.base);
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        SymbolWord {
            base: self.base,
            symbols,
        }
    }

    /// Drops the first symbol.
    pub fn shift(&self) -> SymbolWord {
        SymbolWord {
            base: self.base,
            symbols: self.symbols.iter().skip(1).copied().collect(),
        }
    }

    /// The prefix of length `q` (or the whole word if shorter).
    pub fn prefix(&self, q: usize) -> SymbolWord {
        SymbolWord {
            base: self.base,
            symbols: self.symbols[..q.min(self.len())].to_vec(),
        }
    }

    pub fn starts_with(&self, other: &SymbolWord) -> bool {
        self.base == other.base && self.symbols.starts_with(&other.symbols)
    }

    /// The word read as a base-`base` integer, most significant symbol first.
    pub fn value(&self) -> Option<u128> {
        self.symbols.iter().try_fold(0u128, |acc, &s| {
            acc.checked_mul(self.base as u128)?.checked_add(s as u128)
        })
    }
}

/// `R(x_1…x_k, y_1…y_k)`, the image of the unit square under a rank-`k`
/// composition of the carpet maps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasicRectangle {
    x_word: SymbolWord,
    y_word: SymbolWord,
}

impl BasicRectangle {
    pub fn from_digits(carpet: &Carpet, digits: &[Digit]) -> Result<Self, GeometryError> {
        if let Some(d) = digits.iter().find(|&&d| !carpet.spec().contains(d)) {
            return Err(GeometryError::InvalidPiece(format!(
                "({}, {}) is not a digit",
                d.0, d.1
            )));
        }
        Ok(Self::from_valid_digits(carpet, digits))
    }

    fn from_valid_digits(carpet: &Carpet, digits: &[Digit]) -> Self {
        BasicRectangle {
            x_word: SymbolWord {
                base: carpet.spec().n(),
                symbols: digits.iter().map(|d| d.0).collect(),
            },
            y_word: SymbolWord {
                base: carpet.spec().m(),
                symbols: digits.iter().map(|d| d.1).collect(),
            },
        }
    }

    pub fn rank(&self) -> u64 {
        self.x_word.len() as u64
    }

    pub fn x_word(&self) -> &SymbolWord {
        &self.x_word
    }

    pub fn y_word(&self) -> &SymbolWord {
        &self.y_word
    }

    pub fn digits(&self) -> Vec<Digit> {
        self.x_word
            .symbols
            .iter()
            .zip(&self.y_word.symbols)
            .map(|(&x, &y)| (x, y))
            .collect()
    }

    /// Lower-left cell on the `n^k x m^k` grid.
    pub fn cell(&self) -> Option<(u128, u128)> {
        Some((self.x_word.value()?, self.y_word.value()?))
    }
}

/// `Q(x, y)`: width `n^{-k}`, height `m^{-ℓ(k)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ApproximateSquare {
    x_word: SymbolWord,
    y_word: SymbolWord,
}

impl ApproximateSquare {
    /// Validates `(x_j, y_j) ∈ D` for `j <= k` and `y_j ∈ ℰ` for `k < j <= ℓ(k)`.
    pub fn new(carpet: &Carpet, x: Vec<u32>, y: Vec<u32>) -> Result<Self, GeometryError> {
        let k = x.len() as u64;
        let ell = carpet.ell(k);
        if y.len() as u64 != ell {
            return Err(GeometryError::InvalidPiece(format!(
                "rank {k} square needs a y-word of length {ell}, got {}",
                y.len()
            )));
        }
        for (j, (&xi, &yi)) in x.iter().zip(&y).enumerate() {
            if !carpet.spec().contains((xi, yi)) {
                return Err(GeometryError::InvalidPiece(format!(
                    "position {}: ({xi}, {yi}) is not a digit",
                    j + 1
                )));
            }
        }
        let profile = carpet.profile();
        for &yi in &y[x.len()..] {
            if yi >= profile.m() || profile.row_count(yi) == 0 {
                return Err(GeometryError::InvalidPiece(format!(
                    "row {yi} is not occupied"
                )));
            }
        }
        Ok(ApproximateSquare {
            x_word: SymbolWord::new(carpet.spec().n(), x)?,
            y_word: SymbolWord::new(carpet.spec().m(), y)?,
        })
    }

    fn from_valid_parts(carpet: &Carpet, x: Vec<u32>, y: Vec<u32>) -> Self {
        ApproximateSquare {
            x_word: SymbolWord {
                base: carpet.spec().n(),
                symbols: x,
            },
            y_word: SymbolWord {
                base: carpet.spec().m(),
                symbols: y,
            },
        }
    }

    pub fn rank(&self) -> u64 {
        self.x_word.len() as u64
    }

    pub fn x_word(&self) -> &SymbolWord {
        &self.x_word
    }

    pub fn y_word(&self) -> &SymbolWord {
        &self.y_word
    }

    /// Lower-left cell on the `n^k x m^{ℓ(k)}` grid.
    pub fn cell(&self) -> Option<(u128, u128)> {
        Some((self.x_word.value()?, self.y_word.value()?))
    }

    /// Region containment `other ⊂ self`.
    pub fn contains(&self, other: &ApproximateSquare) -> bool {
        other.rank() >= self.rank()
            && other.x_word.starts_with(&self.x_word)
            && other.y_word.starts_with(&self.y_word)
    }

    /// The rank-`k` basic rectangle this square sits in.
    pub fn basic_rectangle(&self) -> BasicRectangle {
        let k = self.x_word.len();
        BasicRectangle {
            x_word: self.x_word.clone(),
            y_word: self.y_word.prefix(k),
        }
    }
}

/// Mixed-radix counter over `radices`, last position fastest.
#[derive(Debug, Clone)]
struct Odometer {
    radices: Vec<usize>,
    state: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(radices: Vec<usize>) -> Self {
        let done = radices.contains(&0);
        let state = vec![0; radices.len()];
        Odometer {
            radices,
            state,
            done,
        }
    }

    fn next_state(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        Some(&self.state)
    }

    fn advance(&mut self) {
        for i in (0..self.radices.len()).rev() {
            self.state[i] += 1;
            if self.state[i] < self.radices[i] {
                return;
            }
            self.state[i] = 0;
        }
        self.done = true;
    }
}

fn check_budget(count: u128, budget: u64) -> Result<(), GeometryError> {
    if count > budget as u128 {
        return Err(GeometryError::BudgetExceeded {
            requested: count.to_string(),
            budget,
        });
    }
    Ok(())
}

fn checked_count(base: u64, exp: u64) -> Option<u128> {
    (base as u128).checked_pow(u32::try_from(exp).ok()?)
}

fn grid_fits(carpet: &Carpet, x_len: u64, y_len: u64) -> bool {
    let n = carpet.spec().n() as u128;
    let m = carpet.spec().m() as u128;
    let fits = |b: u128, e: u64| u32::try_from(e).ok().and_then(|e| b.checked_pow(e)).is_some();
    fits(n, x_len) && fits(m, y_len)
}

/// Number of rank-`k` approximate squares, `N^k s^{ℓ(k)-k}`.
pub fn square_count(carpet: &Carpet, k: u64) -> Option<u128> {
    let p = carpet.profile();
    let ell = carpet.ell(k);
    checked_count(p.digit_count().into(), k)?.checked_mul(checked_count(p.occupied_count().into(), ell - k)?)
}

/// Streams all `N^k` rank-`k` basic rectangles in lexicographic digit order.
pub fn enumerate_basic(
    carpet: &Carpet,
    k: u64,
    budget: u64,
) -> Result<BasicRectangles<'_>, GeometryError> {
    let n_digits = carpet.spec().digits().len() as u64;
    let count = checked_count(n_digits, k).ok_or_else(|| GeometryError::BudgetExceeded {
        requested: format!("{n_digits}^{k}"),
        budget,
    })?;
    check_budget(count, budget)?;
    if !grid_fits(carpet, k, k) {
        return Err(GeometryError::CoordinateOverflow { rank: k });
    }
    Ok(BasicRectangles {
        carpet,
        odometer: Odometer::new(vec![n_digits as usize; k as usize]),
    })
}

pub struct BasicRectangles<'a> {
    carpet: &'a Carpet,
    odometer: Odometer,
}

impl Iterator for BasicRectangles<'_> {
    type Item = BasicRectangle;

    fn next(&mut self) -> Option<BasicRectangle> {
        let digits = self.carpet.spec().digits();
        let word: Vec<Digit> = self.odometer.next_state()?.iter().map(|&i| digits[i]).collect();
        self.odometer.advance();
        Some(BasicRectangle::from_valid_digits(self.carpet, &word))
    }
}

/// Streams all rank-`k` approximate squares, lexicographic in the word
/// `d_1…d_k e_{k+1}…e_{ℓ(k)}` with `d_j ∈ D` and `e_j ∈ ℰ`.
pub fn enumerate_squares(
    carpet: &Carpet,
    k: u64,
    budget: u64,
) -> Result<ApproximateSquares<'_>, GeometryError> {
    let count = square_count(carpet, k).ok_or_else(|| GeometryError::BudgetExceeded {
        requested: "more than 2^128".into(),
        budget,
    })?;
    check_budget(count, budget)?;
    let ell = carpet.ell(k);
    if !grid_fits(carpet, k, ell) {
        return Err(GeometryError::CoordinateOverflow { rank: k });
    }
    Ok(ApproximateSquares::with_prefix(carpet, Vec::new(), k))
}

pub struct ApproximateSquares<'a> {
    carpet: &'a Carpet,
    prefix: Vec<Digit>,
    free_digits: usize,
    odometer: Odometer,
}

impl<'a> ApproximateSquares<'a> {
    /// Rank-`k` squares whose first digits are `prefix`.
    fn with_prefix(carpet: &'a Carpet, prefix: Vec<Digit>, k: u64) -> Self {
        let ell = carpet.ell(k);
        let free_digits = k as usize - prefix.len();
        let mut radices = vec![carpet.spec().digits().len(); free_digits];
        radices.extend(std::iter::repeat_n(
            carpet.profile().occupied_rows().len(),
            (ell - k) as usize,
        ));
        ApproximateSquares {
            carpet,
            prefix,
            free_digits,
            odometer: Odometer::new(radices),
        }
    }
}

impl Iterator for ApproximateSquares<'_> {
    type Item = ApproximateSquare;

    fn next(&mut self) -> Option<ApproximateSquare> {
        let digits = self.carpet.spec().digits();
        let rows = self.carpet.profile().occupied_rows();
        let state = self.odometer.next_state()?;
        let (head, tail) = state.split_at(self.free_digits);
        let mut x = Vec::with_capacity(self.prefix.len() + head.len());
        let mut y = Vec::with_capacity(self.prefix.len() + state.len());
        for &(i, j) in self.prefix.iter().chain(head.iter().map(|&h| &digits[h])) {
            x.push(i);
            y.push(j);
        }
        y.extend(tail.iter().map(|&t| rows[t]));
        self.odometer.advance();
        Some(ApproximateSquare::from_valid_parts(self.carpet, x, y))
    }
}

/// The direct offsprings of `square`: rank-`(k+1)` approximate squares
/// contained in it, in lexicographic order.
///
/// With `ℓ(k) > k` the new column digit must pair with the already fixed row
/// `y_{k+1}`; with `ℓ(k) = k` the digit `(u, v)` is free in `D`. The remaining
/// new rows range over `ℰ`.
pub fn direct_offsprings(carpet: &Carpet, square: &ApproximateSquare) -> Vec<ApproximateSquare> {
    let k = square.rank();
    let ell_k = carpet.ell(k);
    let ell_next = carpet.ell(k + 1);
    let rows = carpet.profile().occupied_rows();
    let x = square.x_word.symbols();
    let y = square.y_word.symbols();

    // Candidates for (x_{k+1}, y_{k+1}).
    let heads: Vec<Digit> = if ell_k > k {
        let row = y[k as usize];
        carpet
            .spec()
            .digits()
            .iter()
            .copied()
            .filter(|d| d.1 == row)
            .collect()
    } else {
        carpet.spec().digits().to_vec()
    };
    let known_rows = ell_k.max(k + 1);
    let free_rows = (ell_next - known_rows) as usize;

    let mut out = Vec::new();
    for &(u, v) in &heads {
        let mut odometer = Odometer::new(vec![rows.len(); free_rows]);
        while let Some(state) = odometer.next_state() {
            let mut nx = x.to_vec();
            nx.push(u);
            let mut ny = y.to_vec();
            if ell_k == k {
                ny.push(v);
            }
            ny.extend(state.iter().map(|&t| rows[t]));
            out.push(ApproximateSquare::from_valid_parts(carpet, nx, ny));
            odometer.advance();
        }
    }
    out
}

/// Closed-form offspring count: `a_{y_{k+1}} s^{ℓ(k+1)-ℓ(k)}` when `ℓ(k) > k`,
/// `N s^{ℓ(k+1)-(k+1)}` when `ℓ(k) = k`.
pub fn offspring_count(carpet: &Carpet, square: &ApproximateSquare) -> u128 {
    let k = square.rank();
    let p = carpet.profile();
    let s = p.occupied_count() as u128;
    let ell_k = carpet.ell(k);
    let ell_next = carpet.ell(k + 1);
    if ell_k > k {
        let row = square.y_word.symbols()[k as usize];
        p.row_count(row) as u128 * s.pow((ell_next - ell_k) as u32)
    } else {
        p.digit_count() as u128 * s.pow((ell_next - k - 1) as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::CarpetSpec;

    fn two_rows() -> Carpet {
        let mut digits = vec![(1, 1), (4, 1), (7, 1)];
        digits.extend((1..=6).map(|i| (2 * i - 1, 4)));
        Carpet::new(CarpetSpec::new(27, 8, digits).unwrap())
    }

    fn doubling_6x4() -> Carpet {
        Carpet::new(
            CarpetSpec::new(6, 4, [(0, 0), (2, 0), (4, 0), (1, 1), (2, 1), (1, 2)]).unwrap(),
        )
    }

    #[test]
    fn word_operations() {
        let w = SymbolWord::new(4, vec![1, 2, 3]).unwrap();
        assert_eq!(w.value(), Some(16 + 2 * 4 + 3));
        assert_eq!(w.shift().symbols(), &[2, 3]);
        assert_eq!(w.prefix(2).symbols(), &[1, 2]);
        assert_eq!(w.prefix(9), w);
        assert!(w.starts_with(&w.prefix(1)));
        assert_eq!(SymbolWord::empty(4).value(), Some(0));
        assert!(SymbolWord::new(4, vec![4]).is_err());
        let e = SymbolWord::empty(4);
        assert_eq!(e.concat(&w), w);
    }

    #[test]
    fn basic_enumeration_counts() {
        let c = doubling_6x4();
        assert_eq!(enumerate_basic(&c, 1, DEFAULT_BUDGET).unwrap().count(), 6);
        assert_eq!(enumerate_basic(&c, 2, DEFAULT_BUDGET).unwrap().count(), 36);
        assert_eq!(enumerate_basic(&two_rows(), 3, DEFAULT_BUDGET).unwrap().count(), 729);
    }

    #[test]
    fn basic_enumeration_is_lexicographic() {
        let c = doubling_6x4();
        let all: Vec<_> = enumerate_basic(&c, 2, DEFAULT_BUDGET).unwrap().map(|r| r.digits()).collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn budget_is_enforced() {
        let c = two_rows();
        assert!(matches!(
            enumerate_basic(&c, 3, 100),
            Err(GeometryError::BudgetExceeded { .. })
        ));
        assert!(matches!(
            enumerate_squares(&c, 2, 161),
            Err(GeometryError::BudgetExceeded { .. })
        ));
        assert!(enumerate_squares(&c, 2, 162).is_ok());
    }

    #[test]
    fn square_enumeration_counts() {
        let c = two_rows();
        assert_eq!(enumerate_squares(&c, 1, DEFAULT_BUDGET).unwrap().count(), 9);
        assert_eq!(enumerate_squares(&c, 2, DEFAULT_BUDGET).unwrap().count(), 162);
        assert_eq!(enumerate_squares(&doubling_6x4(), 1, DEFAULT_BUDGET).unwrap().count(), 6);
    }

    #[test]
    fn square_validation() {
        let c = two_rows();
        // ℓ(2) = 3; rows beyond rank must be occupied.
        assert!(ApproximateSquare::new(&c, vec![1, 1], vec![1, 4, 4]).is_ok());
        assert!(ApproximateSquare::new(&c, vec![1, 1], vec![1, 4, 0]).is_err());
        assert!(ApproximateSquare::new(&c, vec![1, 1], vec![1, 4]).is_err());
        assert!(ApproximateSquare::new(&c, vec![2, 1], vec![1, 4, 4]).is_err());
    }

    #[test]
    fn offspring_examples() {
        let c = two_rows();
        let q1 = ApproximateSquare::new(&c, vec![1], vec![1]).unwrap();
        assert_eq!(direct_offsprings(&c, &q1).len(), 18);
        let q2_top = ApproximateSquare::new(&c, vec![1, 1], vec![1, 4, 4]).unwrap();
        assert_eq!(direct_offsprings(&c, &q2_top).len(), 12);
        let q2_low = ApproximateSquare::new(&c, vec![1, 1], vec![1, 4, 1]).unwrap();
        assert_eq!(direct_offsprings(&c, &q2_low).len(), 6);
        for q in [&q1, &q2_top, &q2_low] {
            for child in direct_offsprings(&c, q) {
                assert!(q.contains(&child));
                assert_eq!(child.rank(), q.rank() + 1);
            }
        }
    }

    #[test]
    fn empty_digit_radix_yields_nothing() {
        let mut o = Odometer::new(vec![2, 0]);
        assert!(o.next_state().is_none());
        let mut o = Odometer::new(vec![]);
        assert!(o.next_state().is_some());
        o.advance();
        assert!(o.next_state().is_none());
    }
}
