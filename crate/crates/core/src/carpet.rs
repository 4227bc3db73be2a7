//! Carpet specifications, their distribution profiles, and exact integer
//! arithmetic about `σ = log m / log n`.
//!
//! Digits are `(column, row)` pairs with `column < n` and `row < m`. Rows are
//! indexed bottom-up, so digit `(i, j)` is the image of the unit square under
//! `z ↦ diag(1/n, 1/m)(z + (i, j))`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// A digit `(column, row)`.
pub type Digit = (u32, u32);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("digit ({col}, {row}) lies outside the {n}x{m} grid")]
    GridViolation { col: i64, row: i64, n: i64, m: i64 },
    #[error("digit ({col}, {row}) appears more than once")]
    DuplicateDigit { col: u32, row: u32 },
    #[error("digit set is empty")]
    EmptyDigitSet,
    #[error("expansion pair (n = {n}, m = {m}) must satisfy 2 <= m < n")]
    BadShape { n: i64, m: i64 },
    #[error("distribution sequence has {len} entries, expected m = {m}")]
    BadDistribution { len: usize, m: u32 },
    #[error("row count {count} exceeds n = {n}")]
    RowOverflow { count: u32, n: u32 },
    #[error("malformed carpet document: {0}")]
    Malformed(String),
}

/// The expansion pair `(n, m)` with `2 <= m < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expansion {
    n: u32,
    m: u32,
}

impl Expansion {
    pub fn new(n: u32, m: u32) -> Result<Self, SpecError> {
        if m < 2 || m >= n {
            return Err(SpecError::BadShape {
                n: n.into(),
                m: m.into(),
            });
        }
        Ok(Expansion { n, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `ℓ(k) = ⌊k/σ⌋`: the largest `j` with `m^j <= n^k`.
    ///
    /// Evaluated by exact big-integer comparison; the floating estimate only
    /// seeds the search.
    pub fn ell(&self, k: u64) -> u64 {
        if k == 0 {
            return 0;
        }
        let m = BigUint::from(self.m);
        let target = BigUint::from(self.n).pow(k as u32);
        let estimate = (k as f64 * (self.n as f64).ln() / (self.m as f64).ln()).floor();
        let mut j = if estimate.is_finite() && estimate > 0.0 {
            estimate as u64
        } else {
            0
        };
        let mut power = m.pow(j as u32);
        while power > target {
            power /= &m;
            j -= 1;
        }
        loop {
            let next = &power * &m;
            if next > target {
                break;
            }
            power = next;
            j += 1;
        }
        j
    }

    /// `⌊1/σ⌋`, which equals `ℓ(1)`.
    pub fn inverse_sigma_floor(&self) -> u64 {
        self.ell(1)
    }

    pub fn sigma_class(&self) -> SigmaClass {
        sigma_classify(self.n, self.m)
    }

    /// `σ` as a double; for display and seeding only.
    pub fn sigma_f64(&self) -> f64 {
        (self.m as f64).ln() / (self.n as f64).ln()
    }
}

/// Whether `σ = log m / log n` is rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind")]
pub enum SigmaClass {
    /// `σ = p/q` in lowest terms, with `m = base^p` and `n = base^q`.
    Rational { p: u32, q: u32, base: u64 },
    Irrational,
}

impl SigmaClass {
    pub fn is_rational(&self) -> bool {
        matches!(self, SigmaClass::Rational { .. })
    }
}

/// Floor of the `k`-th root of `x`, by Newton iteration on integers.
pub fn integer_root(x: u64, k: u32) -> u64 {
    assert!(k >= 1, "root index must be positive");
    if x < 2 || k == 1 {
        return x;
    }
    let bits = 64 - x.leading_zeros();
    // 2^ceil(bits/k) is strictly above the root.
    let mut r: u128 = 1u128 << bits.div_ceil(k);
    let x = x as u128;
    loop {
        let pow = r.pow(k - 1);
        let next = ((k as u128 - 1) * r + x / pow) / k as u128;
        if next >= r {
            break;
        }
        r = next;
    }
    while checked_pow(r, k).is_none_or(|p| p > x) {
        r -= 1;
    }
    while checked_pow(r + 1, k).is_some_and(|p| p <= x) {
        r += 1;
    }
    r as u64
}

fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    base.checked_pow(exp)
}

/// Writes `x = root^exponent` with the largest possible exponent.
pub fn primitive_power(x: u64) -> (u64, u32) {
    if x < 4 {
        return (x, 1);
    }
    let max_exp = 63 - x.leading_zeros();
    for e in (2..=max_exp).rev() {
        let r = integer_root(x, e);
        if (r as u128).pow(e) == x as u128 {
            return (r, e);
        }
    }
    (x, 1)
}

/// Decides whether `log m / log n` is rational.
///
/// Two integers are powers of a common base exactly when their primitive roots
/// agree; the exponents then give `σ` directly.
pub fn sigma_classify(n: u32, m: u32) -> SigmaClass {
    let (root_n, exp_n) = primitive_power(n.into());
    let (root_m, exp_m) = primitive_power(m.into());
    if root_n != root_m {
        return SigmaClass::Irrational;
    }
    let g = exp_n.gcd(&exp_m);
    SigmaClass::Rational {
        p: exp_m / g,
        q: exp_n / g,
        base: root_n.pow(g),
    }
}

/// Raw carpet document: `{"n": int, "m": int, "digits": [[i, j], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCarpet {
    pub n: i64,
    pub m: i64,
    pub digits: Vec<[i64; 2]>,
}

/// Validated carpet data. Digits are stored sorted, so two specs with the
/// same digit set compare equal regardless of input order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CarpetSpec {
    expansion: Expansion,
    digits: Vec<Digit>,
}

pub fn parse_spec(raw: &RawCarpet) -> Result<CarpetSpec, SpecError> {
    let shape_err = || SpecError::BadShape { n: raw.n, m: raw.m };
    let n = u32::try_from(raw.n).map_err(|_| shape_err())?;
    let m = u32::try_from(raw.m).map_err(|_| shape_err())?;
    let expansion = Expansion::new(n, m)?;
    let mut digits = Vec::with_capacity(raw.digits.len());
    for &[col, row] in &raw.digits {
        if col < 0 || row < 0 || col >= raw.n || row >= raw.m {
            return Err(SpecError::GridViolation {
                col,
                row,
                n: raw.n,
                m: raw.m,
            });
        }
        digits.push((col as u32, row as u32));
    }
    CarpetSpec::from_parts(expansion, digits)
}

impl CarpetSpec {
    pub fn new(n: u32, m: u32, digits: impl IntoIterator<Item = Digit>) -> Result<Self, SpecError> {
        let expansion = Expansion::new(n, m)?;
        let digits: Vec<Digit> = digits.into_iter().collect();
        for &(col, row) in &digits {
            if col >= n || row >= m {
                return Err(SpecError::GridViolation {
                    col: col.into(),
                    row: row.into(),
                    n: n.into(),
                    m: m.into(),
                });
            }
        }
        Self::from_parts(expansion, digits)
    }

    fn from_parts(expansion: Expansion, mut digits: Vec<Digit>) -> Result<Self, SpecError> {
        if digits.is_empty() {
            return Err(SpecError::EmptyDigitSet);
        }
        digits.sort_unstable();
        if let Some(w) = digits.windows(2).find(|w| w[0] == w[1]) {
            return Err(SpecError::DuplicateDigit {
                col: w[0].0,
                row: w[0].1,
            });
        }
        Ok(CarpetSpec { expansion, digits })
    }

    /// Every digit of the `n x m` grid.
    pub fn full_grid(n: u32, m: u32) -> Result<Self, SpecError> {
        Self::new(n, m, (0..n).flat_map(|i| (0..m).map(move |j| (i, j))))
    }

    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let raw: RawCarpet =
            serde_json::from_str(text).map_err(|e| SpecError::Malformed(e.to_string()))?;
        parse_spec(&raw)
    }

    pub fn to_raw(&self) -> RawCarpet {
        RawCarpet {
            n: self.n().into(),
            m: self.m().into(),
            digits: self
                .digits
                .iter()
                .map(|&(i, j)| [i64::from(i), i64::from(j)])
                .collect(),
        }
    }

    /// Canonical single-line JSON form; re-parses to an identical spec.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("carpet documents always serialize")
    }

    pub fn expansion(&self) -> Expansion {
        self.expansion
    }

    pub fn n(&self) -> u32 {
        self.expansion.n
    }

    pub fn m(&self) -> u32 {
        self.expansion.m
    }

    /// Digits in ascending `(column, row)` order.
    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn contains(&self, digit: Digit) -> bool {
        self.digits.binary_search(&digit).is_ok()
    }

    pub fn ell(&self, k: u64) -> u64 {
        self.expansion.ell(k)
    }

    pub fn profile(&self) -> CarpetProfile {
        profile(self)
    }
}

impl FromStr for CarpetSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_json(s)
    }
}

/// Tri-state answer for total disconnectedness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certification {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Certification::Yes => "yes",
            Certification::No => "no",
            Certification::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// Statistics derived from the distribution sequence of a digit set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarpetProfile {
    expansion: Expansion,
    rows: Vec<u32>,
    total: u32,
    occupied: Vec<u32>,
    distinct: Vec<u32>,
    multiplicities: Vec<u32>,
    sigma: SigmaClass,
}

pub fn profile(spec: &CarpetSpec) -> CarpetProfile {
    let mut rows = vec![0u32; spec.m() as usize];
    for &(_, row) in spec.digits() {
        rows[row as usize] += 1;
    }
    CarpetProfile::build(spec.expansion, rows)
}

impl CarpetProfile {
    /// Builds a profile straight from a distribution sequence `(a_0, ..., a_{m-1})`.
    pub fn from_distribution(n: u32, m: u32, rows: Vec<u32>) -> Result<Self, SpecError> {
        let expansion = Expansion::new(n, m)?;
        if rows.len() != m as usize {
            return Err(SpecError::BadDistribution { len: rows.len(), m });
        }
        if let Some(&count) = rows.iter().find(|&&a| a > n) {
            return Err(SpecError::RowOverflow { count, n });
        }
        if rows.iter().all(|&a| a == 0) {
            return Err(SpecError::EmptyDigitSet);
        }
        Ok(Self::build(expansion, rows))
    }

    fn build(expansion: Expansion, rows: Vec<u32>) -> Self {
        let total = rows.iter().sum();
        let occupied: Vec<u32> = (0..rows.len() as u32)
            .filter(|&j| rows[j as usize] > 0)
            .collect();
        let values: BTreeSet<u32> = rows.iter().copied().filter(|&a| a > 0).collect();
        let distinct: Vec<u32> = values.into_iter().rev().collect();
        let multiplicities = distinct
            .iter()
            .map(|&v| rows.iter().filter(|&&a| a == v).count() as u32)
            .collect();
        CarpetProfile {
            expansion,
            rows,
            total,
            occupied,
            distinct,
            multiplicities,
            sigma: sigma_classify(expansion.n, expansion.m),
        }
    }

    pub fn expansion(&self) -> Expansion {
        self.expansion
    }

    pub fn n(&self) -> u32 {
        self.expansion.n
    }

    pub fn m(&self) -> u32 {
        self.expansion.m
    }

    /// The distribution sequence `a_j = #{i : (i, j) ∈ D}`.
    pub fn distribution(&self) -> &[u32] {
        &self.rows
    }

    /// `a_j` for a single row.
    pub fn row_count(&self, row: u32) -> u32 {
        self.rows[row as usize]
    }

    /// `N`, the number of digits.
    pub fn digit_count(&self) -> u32 {
        self.total
    }

    /// `ℰ`, the non-vacant rows in ascending order.
    pub fn occupied_rows(&self) -> &[u32] {
        &self.occupied
    }

    /// `s = #ℰ`.
    pub fn occupied_count(&self) -> u32 {
        self.occupied.len() as u32
    }

    /// Distinct non-zero row counts, strictly decreasing.
    pub fn distinct_counts(&self) -> &[u32] {
        &self.distinct
    }

    /// Multiplicity of each entry of [`Self::distinct_counts`].
    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// Multiplicity of a given row count, zero if it does not occur.
    pub fn multiplicity_of(&self, count: u32) -> u32 {
        self.distinct
            .iter()
            .position(|&c| c == count)
            .map_or(0, |i| self.multiplicities[i])
    }

    pub fn max_count(&self) -> u32 {
        self.distinct[0]
    }

    pub fn min_count(&self) -> u32 {
        *self.distinct.last().expect("profiles have at least one digit")
    }

    pub fn has_vacant_row(&self) -> bool {
        self.rows.contains(&0)
    }

    pub fn sigma_class(&self) -> SigmaClass {
        self.sigma
    }

    pub fn ell(&self, k: u64) -> u64 {
        self.expansion.ell(k)
    }

    /// Whether the uniform Bernoulli measure is doubling: `a_0 a_{m-1} = 0`,
    /// or no two adjacent rows are both occupied, or `a_0 = a_{m-1}`.
    pub fn is_doubling(&self) -> bool {
        let a = &self.rows;
        let first = a[0];
        let last = a[a.len() - 1];
        first == 0
            || last == 0
            || a.windows(2).all(|w| w[0] == 0 || w[1] == 0)
            || first == last
    }

    /// Uniform horizontal fibres: all non-zero `a_j` are equal.
    pub fn is_regular(&self) -> bool {
        self.distinct.len() == 1
    }

    /// Total disconnectedness, certified only in the presence of a vacant row.
    pub fn total_disconnectedness(&self) -> Certification {
        if !self.has_vacant_row() {
            return Certification::Unknown;
        }
        if self.rows.iter().all(|&a| a < self.n()) {
            Certification::Yes
        } else {
            Certification::No
        }
    }
}

/// A validated spec together with its profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Carpet {
    spec: CarpetSpec,
    profile: CarpetProfile,
}

impl Carpet {
    pub fn new(spec: CarpetSpec) -> Self {
        let profile = profile(&spec);
        Carpet { spec, profile }
    }

    pub fn spec(&self) -> &CarpetSpec {
        &self.spec
    }

    pub fn profile(&self) -> &CarpetProfile {
        &self.profile
    }

    pub fn expansion(&self) -> Expansion {
        self.spec.expansion
    }

    pub fn ell(&self, k: u64) -> u64 {
        self.spec.ell(k)
    }
}

impl From<CarpetSpec> for Carpet {
    fn from(spec: CarpetSpec) -> Self {
        Carpet::new(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doubling_6x4() -> CarpetSpec {
        CarpetSpec::new(6, 4, [(0, 0), (2, 0), (4, 0), (1, 1), (2, 1), (1, 2)]).unwrap()
    }

    fn two_rows() -> CarpetSpec {
        let mut digits = vec![(1, 1), (4, 1), (7, 1)];
        digits.extend((1..=6).map(|i| (2 * i - 1, 4)));
        CarpetSpec::new(27, 8, digits).unwrap()
    }

    fn four_rows() -> CarpetSpec {
        let mut digits: Vec<Digit> = (0..4).map(|i| (1, 2 * i)).collect();
        digits.extend([(3, 4), (3, 6)]);
        CarpetSpec::new(27, 8, digits).unwrap()
    }

    #[test]
    fn parse_rejects_bad_input() {
        let raw = |n, m, digits: Vec<[i64; 2]>| RawCarpet { n, m, digits };
        assert!(parse_spec(&raw(6, 4, vec![[0, 0], [2, 0], [4, 0], [1, 1], [2, 1], [1, 2]])).is_ok());
        assert!(matches!(
            parse_spec(&raw(4, 4, vec![[0, 0]])),
            Err(SpecError::BadShape { .. })
        ));
        assert!(matches!(
            parse_spec(&raw(6, 1, vec![[0, 0]])),
            Err(SpecError::BadShape { .. })
        ));
        assert_eq!(
            parse_spec(&raw(6, 4, vec![[0, 0], [0, 0]])),
            Err(SpecError::DuplicateDigit { col: 0, row: 0 })
        );
        assert_eq!(parse_spec(&raw(6, 4, vec![])), Err(SpecError::EmptyDigitSet));
        assert!(matches!(
            parse_spec(&raw(6, 4, vec![[6, 0]])),
            Err(SpecError::GridViolation { .. })
        ));
        assert!(matches!(
            parse_spec(&raw(6, 4, vec![[0, -1]])),
            Err(SpecError::GridViolation { .. })
        ));
    }

    #[test]
    fn json_rejects_unknown_fields() {
        let err = CarpetSpec::from_json(r#"{"n":6,"m":4,"digits":[[0,0]],"x":1}"#).unwrap_err();
        assert!(matches!(err, SpecError::Malformed(_)));
    }

    #[test]
    fn json_is_order_insensitive() {
        let a = CarpetSpec::from_json(r#"{"n":6,"m":4,"digits":[[1,2],[0,0]]}"#).unwrap();
        let b = CarpetSpec::from_json(r#"{"n":6,"m":4,"digits":[[0,0],[1,2]]}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), r#"{"n":6,"m":4,"digits":[[0,0],[1,2]]}"#);
    }

    #[test]
    fn example_profiles() {
        let p = doubling_6x4().profile();
        assert_eq!(p.distribution(), &[3, 2, 1, 0]);
        assert_eq!(p.digit_count(), 6);
        assert_eq!(p.occupied_count(), 3);
        assert_eq!(p.distinct_counts(), &[3, 2, 1]);
        assert_eq!(p.multiplicities(), &[1, 1, 1]);
        assert!(p.has_vacant_row());

        let p = two_rows().profile();
        assert_eq!(p.digit_count(), 9);
        assert_eq!(p.occupied_count(), 2);
        assert_eq!(p.distinct_counts(), &[6, 3]);
        assert_eq!(p.multiplicities(), &[1, 1]);

        let p = four_rows().profile();
        assert_eq!(p.digit_count(), 6);
        assert_eq!(p.occupied_count(), 4);
        assert_eq!(p.distinct_counts(), &[2, 1]);
        assert_eq!(p.multiplicities(), &[2, 2]);
    }

    #[test]
    fn sigma_classes() {
        assert_eq!(sigma_classify(27, 8), SigmaClass::Irrational);
        assert_eq!(
            sigma_classify(4, 2),
            SigmaClass::Rational { p: 1, q: 2, base: 2 }
        );
        assert_eq!(
            sigma_classify(9, 3),
            SigmaClass::Rational { p: 1, q: 2, base: 3 }
        );
        assert_eq!(
            sigma_classify(64, 16),
            SigmaClass::Rational { p: 2, q: 3, base: 4 }
        );
        assert_eq!(sigma_classify(6, 4), SigmaClass::Irrational);
    }

    #[test]
    fn integer_roots() {
        assert_eq!(integer_root(26, 3), 2);
        assert_eq!(integer_root(27, 3), 3);
        assert_eq!(integer_root(u64::MAX, 2), 4294967295);
        assert_eq!(integer_root(1 << 62, 62), 2);
        assert_eq!(primitive_power(64), (2, 6));
        assert_eq!(primitive_power(36), (6, 2));
        assert_eq!(primitive_power(12), (12, 1));
    }

    #[test]
    fn ell_values() {
        let e = Expansion::new(27, 8).unwrap();
        assert_eq!(e.ell(0), 0);
        assert_eq!(e.ell(1), 1);
        assert_eq!(e.ell(2), 3);
        assert_eq!(e.ell(3), 4);
        assert_eq!(Expansion::new(6, 4).unwrap().ell(1), 1);
        // n = m^2 exactly: boundary cases where m^j = n^k.
        let e = Expansion::new(9, 3).unwrap();
        assert_eq!(e.ell(5), 10);
    }

    #[test]
    fn class_predicates() {
        let d = doubling_6x4().profile();
        assert!(d.is_doubling());
        let dp = CarpetSpec::new(6, 4, [(0, 0), (2, 0), (4, 0), (1, 1), (1, 3), (2, 3)])
            .unwrap()
            .profile();
        assert_eq!(dp.distribution(), &[3, 1, 0, 2]);
        assert!(!dp.is_doubling());
        let alt = CarpetProfile::from_distribution(5, 4, vec![2, 0, 2, 0]).unwrap();
        assert!(alt.is_doubling());

        assert!(!two_rows().profile().is_regular());
        assert!(CarpetProfile::from_distribution(5, 4, vec![2, 2, 0, 2]).unwrap().is_regular());
        assert!(CarpetProfile::from_distribution(5, 4, vec![1, 1, 1, 1]).unwrap().is_regular());

        assert_eq!(d.total_disconnectedness(), Certification::Yes);
        let full_row = CarpetProfile::from_distribution(3, 2, vec![3, 0]).unwrap();
        assert_eq!(full_row.total_disconnectedness(), Certification::No);
        let no_vacancy = CarpetProfile::from_distribution(3, 2, vec![2, 2]).unwrap();
        assert_eq!(no_vacancy.total_disconnectedness(), Certification::Unknown);
    }

    #[test]
    fn distribution_validation() {
        assert!(matches!(
            CarpetProfile::from_distribution(5, 4, vec![1, 1]),
            Err(SpecError::BadDistribution { .. })
        ));
        assert!(matches!(
            CarpetProfile::from_distribution(3, 2, vec![4, 0]),
            Err(SpecError::RowOverflow { .. })
        ));
        assert_eq!(
            CarpetProfile::from_distribution(3, 2, vec![0, 0]),
            Err(SpecError::EmptyDigitSet)
        );
    }
}
