use serde::Serialize;

use super::{check_budget, grid_fits, square_count, ApproximateSquares, BasicRectangle, GeometryError};
use crate::carpet::Carpet;
use crate::rational::ExactRational;

/// Mesh-box count of the rank-`q` approximate-square cover at `δ = n^{-q}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCount {
    pub depth: u64,
    /// Rank of the restricting rectangle, 0 for the whole carpet.
    pub restrict_rank: u64,
    pub squares: u64,
    pub count: u64,
    /// `μ(R) = N^{-k}` of the restricting rectangle.
    pub mass: ExactRational,
    /// `C₂ = 2s(m+2)`.
    pub c2: u64,
}

/// Counts `δ`-mesh boxes, `δ = n^{-q}`, meeting the rank-`q` cover.
///
/// Cells are taken half-open, so a rank-`q` square `[X, X+1)·n^{-q} ×
/// [Y, Y+1)·m^{-ℓ(q)}` meets exactly one mesh column and between 1 and `m + 1`
/// mesh rows. With `restrict`, only squares inside that basic rectangle count.
pub fn box_count(
    carpet: &Carpet,
    q: u64,
    restrict: Option<&BasicRectangle>,
    budget: u64,
) -> Result<BoxCount, GeometryError> {
    let prefix = restrict.map(BasicRectangle::digits).unwrap_or_default();
    let k = prefix.len() as u64;
    if k > q {
        return Err(GeometryError::InvalidPiece(format!(
            "restricting rectangle has rank {k} > depth {q}"
        )));
    }
    let p = carpet.profile();
    let n_digits = p.digit_count() as u128;
    let total = square_count(carpet, q).ok_or(GeometryError::CoordinateOverflow { rank: q })?;
    let squares = total / n_digits.pow(k as u32);
    check_budget(squares, budget)?;

    let ell = carpet.ell(q);
    let n = carpet.spec().n() as u128;
    let m = carpet.spec().m() as u128;
    // Row bounds need Y * n^q, which is below n^{2q}.
    if !grid_fits(carpet, 2 * q, ell) {
        return Err(GeometryError::CoordinateOverflow { rank: q });
    }
    let nq = n.pow(q as u32);
    let ml = m.pow(ell as u32);

    let mut spans: Vec<(u128, u128, u128)> = Vec::with_capacity(squares as usize);
    for square in ApproximateSquares::with_prefix(carpet, prefix, q) {
        let (x, y) = square.cell().ok_or(GeometryError::CoordinateOverflow { rank: q })?;
        let lo = y * nq / ml;
        let hi = ((y + 1) * nq).div_ceil(ml);
        spans.push((x, lo, hi));
    }
    spans.sort_unstable();

    let mut count: u128 = 0;
    let mut current: Option<(u128, u128, u128)> = None;
    for (x, lo, hi) in spans {
        match current {
            Some((cx, clo, chi)) if cx == x && lo <= chi => current = Some((cx, clo, chi.max(hi))),
            _ => {
                if let Some((_, clo, chi)) = current {
                    count += chi - clo;
                }
                current = Some((x, lo, hi));
            }
        }
    }
    if let Some((_, clo, chi)) = current {
        count += chi - clo;
    }

    Ok(BoxCount {
        depth: q,
        restrict_rank: k,
        squares: squares as u64,
        count: count as u64,
        mass: ExactRational::inverse_power(p.digit_count().into(), k),
        c2: 2 * p.occupied_count() as u64 * (carpet.spec().m() as u64 + 2),
    })
}

/// `μ(R) δ^{-dim_B}` for a rank-`k` rectangle at `δ = n^{-q}`, which reduces
/// to `N^{q-k} s^{(1/σ - 1) q}`.
pub fn scaled_mass(carpet: &Carpet, k: u64, q: u64) -> f64 {
    let p = carpet.profile();
    let sigma = carpet.expansion().sigma_f64();
    let ln_n = (p.digit_count() as f64).ln();
    let ln_s = (p.occupied_count() as f64).ln();
    ((q as f64 - k as f64) * ln_n + (1.0 / sigma - 1.0) * q as f64 * ln_s).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::CarpetSpec;
    use crate::geometry::DEFAULT_BUDGET;

    #[test]
    fn full_grid_covers_everything() {
        for (n, m) in [(3, 2), (5, 3)] {
            let c = Carpet::new(CarpetSpec::full_grid(n, m).unwrap());
            for q in 1..=3 {
                let b = box_count(&c, q, None, DEFAULT_BUDGET).unwrap();
                assert_eq!(b.count, (n as u64).pow(2 * q as u32));
            }
        }
    }

    #[test]
    fn example_rank_one_cover() {
        // ℓ(1) = 1 for (6, 4); each square spans rows floor(6y/4) .. ceil(6(y+1)/4).
        let c = Carpet::new(
            CarpetSpec::new(6, 4, [(0, 0), (2, 0), (4, 0), (1, 1), (2, 1), (1, 2)]).unwrap(),
        );
        let b = box_count(&c, 1, None, DEFAULT_BUDGET).unwrap();
        // Oracle: explicit union of (column, row) cells.
        let mut cells = std::collections::BTreeSet::new();
        for &(i, j) in c.spec().digits() {
            let lo = (6 * j) / 4;
            let hi = (6 * (j + 1)).div_ceil(4);
            for r in lo..hi {
                cells.insert((i, r));
            }
        }
        assert_eq!(b.count, cells.len() as u64);
        assert_eq!(b.squares, 6);
    }

    #[test]
    fn restricted_count_is_positive() {
        let c = Carpet::new(CarpetSpec::new(5, 3, [(0, 0), (2, 1), (4, 2)]).unwrap());
        let r = BasicRectangle::from_digits(&c, &[(2, 1), (0, 0)]).unwrap();
        let b = box_count(&c, 2, Some(&r), DEFAULT_BUDGET).unwrap();
        assert!(b.count >= 1);
        assert_eq!(b.mass, ExactRational::new(1, 9));
        assert!(box_count(&c, 1, Some(&r), DEFAULT_BUDGET).is_err());
    }
}
