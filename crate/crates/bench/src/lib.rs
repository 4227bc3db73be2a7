//! Shared inputs for the criterion benches.

use carpetlab_core::{Carpet, CarpetSpec};

fn carpet(n: u32, m: u32, digits: Vec<(u32, u32)>) -> Carpet {
    Carpet::new(CarpetSpec::new(n, m, digits).expect("bench carpets are valid"))
}

/// The `(6, 4)` pair separated by doubling.
pub fn pair_6_4() -> (Carpet, Carpet) {
    (
        carpet(6, 4, vec![(0, 0), (2, 0), (4, 0), (1, 1), (2, 1), (1, 2)]),
        carpet(6, 4, vec![(0, 0), (2, 0), (4, 0), (1, 1), (1, 3), (2, 3)]),
    )
}

/// The `(27, 8)` pair with equal spectra, separated by the row permutation test.
pub fn pair_27_8() -> (Carpet, Carpet) {
    let mut d = vec![(1, 1), (4, 1), (7, 1)];
    d.extend((1..=6).map(|i| (2 * i - 1, 4)));
    let mut dp: Vec<_> = (0..4).map(|i| (1, 2 * i)).collect();
    dp.extend([(3, 4), (3, 6)]);
    (carpet(27, 8, d), carpet(27, 8, dp))
}
