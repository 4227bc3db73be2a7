//! Exact calculus of the uniform Bernoulli measure `μ` (weight `1/N` per
//! digit) on approximate squares, plus `p`-adic tools and the `γ_k`
//! obstruction sequence. No floating point is used here.

mod padic;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

pub use padic::{factorize, is_prime, padic_abs, vp};

use crate::carpet::{Carpet, CarpetProfile, Certification};
use crate::geometry::ApproximateSquare;
use crate::rational::ExactRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("carpet is not certified in the class M_t,v,d: {0}")]
    ClassViolation(String),
    #[error("p-adic valuation of zero is undefined")]
    ZeroValuation,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("second square is not a direct offspring of the first")]
    NotDirectOffspring,
    #[error("square is not a member of the component")]
    NotAMember,
    #[error("component has no members")]
    EmptyComponent,
    #[error("carpets use different expansion pairs ({0}, {1}) and ({2}, {3})")]
    ShapeMismatch(u32, u32, u32, u32),
    #[error("rank must be at least 1")]
    ZeroRank,
}

/// A word over the distinct row counts `𝒜 = {a₁*, …, a_p̃*}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Color(Vec<u32>);

impl Color {
    pub fn new(word: Vec<u32>) -> Self {
        Color(word)
    }

    pub fn word(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `∏c`, with the empty product equal to 1.
    pub fn product(&self) -> BigUint {
        self.0.iter().map(|&c| BigUint::from(c)).product()
    }

    /// First letter `χ(c)`.
    pub fn head(&self) -> Option<u32> {
        self.0.first().copied()
    }

    /// Number of positions where two equal-length colours differ.
    pub fn hamming(&self, other: &Color) -> usize {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

/// `a(y_{k+1}) … a(y_{ℓ(k)})`; empty when `ℓ(k) = k`.
pub fn color_of(carpet: &Carpet, square: &ApproximateSquare) -> Color {
    let k = square.rank() as usize;
    let p = carpet.profile();
    Color(square.y_word().symbols()[k..].iter().map(|&y| p.row_count(y)).collect())
}

/// `μ(Q) = ∏c / N^{ℓ(k)}`.
pub fn mu_square(carpet: &Carpet, square: &ApproximateSquare) -> ExactRational {
    let ell = carpet.ell(square.rank());
    let n_digits = carpet.profile().digit_count();
    ExactRational::from_integer(color_of(carpet, square).product())
        * ExactRational::inverse_power(n_digits.into(), ell)
}

/// Every rank-`k` cylinder has measure `N^{-k}`.
pub fn mu_cylinder(carpet: &Carpet, k: u64) -> ExactRational {
    ExactRational::inverse_power(carpet.profile().digit_count().into(), k)
}

/// `M(z) = ∏ M_{i(z_j)}`: the number of row words whose colour is `z`.
pub fn word_multiplicity(profile: &CarpetProfile, z: &[u32]) -> BigUint {
    z.iter().map(|&c| BigUint::from(profile.multiplicity_of(c))).product()
}

/// All words of length `len` over `𝒜`, lexicographic in the order of `𝒜`.
fn words_over(alphabet: &[u32], len: usize) -> Vec<Vec<u32>> {
    let mut words = vec![Vec::new()];
    for _ in 0..len {
        words = words
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&c| {
                    let mut next = w.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    words
}

/// How many direct offsprings of `square` carry each colour.
///
/// With `ℓ(k) = k` every `w′ ∈ 𝒜^{ℓ(k+1)-k-1}` occurs `N·M(w′)` times. With
/// `ℓ(k) > k` the colours are `S(c ∗ z)` for `z ∈ 𝒜^{ℓ(k+1)-ℓ(k)}`, each
/// occurring `χ(c)·M(z)` times.
pub fn offspring_color_census(carpet: &Carpet, square: &ApproximateSquare) -> BTreeMap<Color, BigUint> {
    let k = square.rank();
    let p = carpet.profile();
    let ell_k = carpet.ell(k);
    let ell_next = carpet.ell(k + 1);
    let alphabet = p.distinct_counts();
    let mut census = BTreeMap::new();
    if ell_k == k {
        let n_digits = BigUint::from(p.digit_count());
        for w in words_over(alphabet, (ell_next - k - 1) as usize) {
            let count = &n_digits * word_multiplicity(p, &w);
            *census.entry(Color(w)).or_insert_with(BigUint::default) += count;
        }
    } else {
        let c = color_of(carpet, square);
        let head = BigUint::from(c.head().expect("ℓ(k) > k gives a non-empty colour"));
        for z in words_over(alphabet, (ell_next - ell_k) as usize) {
            let count = &head * word_multiplicity(p, &z);
            let mut word = c.0[1..].to_vec();
            word.extend_from_slice(&z);
            *census.entry(Color(word)).or_insert_with(BigUint::default) += count;
        }
    }
    census
}

/// `Σ μ(B)` over the members of a component of approximate squares.
pub fn mu_component<'a>(
    carpet: &Carpet,
    members: impl IntoIterator<Item = &'a ApproximateSquare>,
) -> ExactRational {
    members.into_iter().map(|q| mu_square(carpet, q)).sum()
}

/// Checks the certified class `𝓜_{t,v,d}`: totally disconnected (certified
/// through a vacant row) and doubling.
pub fn require_tvd(profile: &CarpetProfile) -> Result<(), MeasureError> {
    match profile.total_disconnectedness() {
        Certification::Yes => {}
        Certification::No => {
            return Err(MeasureError::ClassViolation(
                "a full row makes the carpet contain a segment".into(),
            ))
        }
        Certification::Unknown => {
            return Err(MeasureError::ClassViolation(
                "no vacant row, total disconnectedness is not certified".into(),
            ))
        }
    }
    if !profile.is_doubling() {
        return Err(MeasureError::ClassViolation(
            "the uniform Bernoulli measure is not doubling".into(),
        ));
    }
    Ok(())
}

/// `a₁* ⋯ a_p̃*`.
pub fn star_product(profile: &CarpetProfile) -> BigUint {
    profile.distinct_counts().iter().map(|&a| BigUint::from(a)).product()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioWitness {
    /// `μ(U)/μ(B) · (a₁*⋯a_p̃*)²`.
    pub scaled_ratio: ExactRational,
    /// Whether the scaled ratio is a positive integer.
    pub check: bool,
    /// `h·n^{2m}` with `h` the member count standing in for the uncomputable
    /// constant `L₀`. Reported only.
    pub empirical_bound: String,
}

/// Integrality of `μ(U)/μ(B)` after clearing `(a₁*⋯a_p̃*)²`.
pub fn ratio_witness(
    carpet: &Carpet,
    component: &[ApproximateSquare],
    b: &ApproximateSquare,
) -> Result<RatioWitness, MeasureError> {
    require_tvd(carpet.profile())?;
    if component.is_empty() {
        return Err(MeasureError::EmptyComponent);
    }
    if !component.contains(b) {
        return Err(MeasureError::NotAMember);
    }
    let star = ExactRational::from_integer(star_product(carpet.profile()));
    let scaled = mu_component(carpet, component) / mu_square(carpet, b) * star.clone() * star;
    let n = BigUint::from(carpet.spec().n());
    let bound = BigUint::from(component.len()) * n.pow(2 * carpet.spec().m());
    Ok(RatioWitness {
        check: scaled.is_integer() && scaled.is_positive(),
        scaled_ratio: scaled,
        empirical_bound: bound.to_string(),
    })
}

/// Whether `μ(B′)/μ(B) · (a₁*⋯a_p̃*) · N^{⌊1/σ⌋+1}` is an integer, for `B′`
/// a direct offspring of `B`.
pub fn offspring_ratio_denominator_check(
    carpet: &Carpet,
    b: &ApproximateSquare,
    b_prime: &ApproximateSquare,
) -> Result<bool, MeasureError> {
    if b_prime.rank() != b.rank() + 1 || !b.contains(b_prime) {
        return Err(MeasureError::NotDirectOffspring);
    }
    let p = carpet.profile();
    let scale = ExactRational::from_integer(star_product(p))
        * ExactRational::from_integer(
            BigUint::from(p.digit_count()).pow(carpet.expansion().inverse_sigma_floor() as u32 + 1),
        );
    let value = mu_square(carpet, b_prime) / mu_square(carpet, b) * scale;
    Ok(value.is_integer())
}

/// Whether all members' colours pairwise differ in at most two positions.
pub fn color_rigidity_check(carpet: &Carpet, component: &[ApproximateSquare]) -> Result<bool, MeasureError> {
    require_tvd(carpet.profile())?;
    let colors: Vec<Color> = component.iter().map(|q| color_of(carpet, q)).collect();
    // Distinct colours suffice for the pairwise test.
    let mut distinct = colors;
    distinct.sort();
    distinct.dedup();
    Ok(distinct
        .iter()
        .enumerate()
        .all(|(i, c)| distinct[i + 1..].iter().all(|d| c.hamming(d) <= 2)))
}

/// `γ_k = (a₁*/b₁*)^{ℓ(k)-k} (N′/N)^{ℓ(k)}`.
pub fn gamma(k: u64, e: &CarpetProfile, f: &CarpetProfile) -> Result<ExactRational, MeasureError> {
    if e.expansion() != f.expansion() {
        return Err(MeasureError::ShapeMismatch(e.n(), e.m(), f.n(), f.m()));
    }
    if k == 0 {
        return Err(MeasureError::ZeroRank);
    }
    let ell = e.ell(k);
    let ratio = ExactRational::new(e.max_count(), f.max_count());
    let mass = ExactRational::new(f.digit_count(), e.digit_count());
    let pow = |x: &ExactRational, exp: u64| x.pow(i32::try_from(exp).expect("exponent fits i32"));
    Ok(pow(&ratio, ell - k) * pow(&mass, ell))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaRow {
    pub k: u64,
    pub gamma: ExactRational,
    /// `v_p(γ_k)`; `None` when `γ_k = 0`, which cannot happen for valid
    /// profiles.
    pub valuation: Option<i64>,
}

/// `γ_1, …, γ_{k_max}` with their `p`-adic valuations.
pub fn gamma_table(
    k_max: u64,
    e: &CarpetProfile,
    f: &CarpetProfile,
    prime: u64,
) -> Result<Vec<GammaRow>, MeasureError> {
    if !is_prime(prime) {
        return Err(MeasureError::NotPrime(prime));
    }
    (1..=k_max)
        .map(|k| {
            let g = gamma(k, e, f)?;
            Ok(GammaRow {
                k,
                valuation: vp(&g, prime).ok(),
                gamma: g,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::CarpetSpec;
    use crate::geometry::{direct_offsprings, enumerate_squares, DEFAULT_BUDGET};

    fn two_rows() -> Carpet {
        let mut digits = vec![(1, 1), (4, 1), (7, 1)];
        digits.extend((1..=6).map(|i| (2 * i - 1, 4)));
        Carpet::new(CarpetSpec::new(27, 8, digits).unwrap())
    }

    fn four_rows() -> Carpet {
        let mut digits: Vec<_> = (0..4).map(|i| (1, 2 * i)).collect();
        digits.extend([(3, 4), (3, 6)]);
        Carpet::new(CarpetSpec::new(27, 8, digits).unwrap())
    }

    fn sq(c: &Carpet, x: Vec<u32>, y: Vec<u32>) -> ApproximateSquare {
        ApproximateSquare::new(c, x, y).unwrap()
    }

    #[test]
    fn colors_and_measures() {
        let c = two_rows();
        let q1 = sq(&c, vec![1], vec![1]);
        assert!(color_of(&c, &q1).is_empty());
        assert_eq!(mu_square(&c, &q1), ExactRational::new(1, 9));
        let top = sq(&c, vec![1, 1], vec![1, 4, 4]);
        assert_eq!(color_of(&c, &top).word(), &[6]);
        assert_eq!(mu_square(&c, &top), ExactRational::new(2, 243));
        let low = sq(&c, vec![1, 1], vec![1, 4, 1]);
        assert_eq!(color_of(&c, &low).word(), &[3]);
        assert_eq!(mu_cylinder(&c, 2), ExactRational::new(1, 81));
        assert_eq!(mu_cylinder(&c, 0), ExactRational::one());
    }

    #[test]
    fn census_examples() {
        let c = two_rows();
        let q1 = sq(&c, vec![1], vec![1]);
        let census = offspring_color_census(&c, &q1);
        assert_eq!(census.len(), 2);
        assert!(census.values().all(|v| *v == BigUint::from(9u32)));
        let top = sq(&c, vec![1, 1], vec![1, 4, 4]);
        let census = offspring_color_census(&c, &top);
        assert_eq!(census.values().sum::<BigUint>(), BigUint::from(12u32));
        assert!(census.values().all(|v| *v == BigUint::from(6u32)));
        let low = sq(&c, vec![1, 1], vec![1, 4, 1]);
        let census = offspring_color_census(&c, &low);
        assert_eq!(census.values().sum::<BigUint>(), BigUint::from(6u32));
    }

    #[test]
    fn census_matches_enumeration() {
        // Oracle: tally colours of the enumerated offsprings directly.
        for c in [two_rows(), four_rows()] {
            for k in 1..=2 {
                for q in enumerate_squares(&c, k, DEFAULT_BUDGET).unwrap() {
                    let mut tally: BTreeMap<Color, BigUint> = BTreeMap::new();
                    for child in direct_offsprings(&c, &q) {
                        *tally.entry(color_of(&c, &child)).or_default() += 1u32;
                    }
                    assert_eq!(offspring_color_census(&c, &q), tally);
                }
            }
        }
    }

    #[test]
    fn component_measures() {
        let c = Carpet::new(
            CarpetSpec::new(6, 4, [(0, 0), (2, 0), (4, 0), (1, 1), (2, 1), (1, 2)]).unwrap(),
        );
        let squares: Vec<_> = enumerate_squares(&c, 1, DEFAULT_BUDGET).unwrap().collect();
        let lone: Vec<_> = squares.iter().filter(|q| q.x_word().symbols() == [4]).collect();
        assert_eq!(mu_component(&c, lone), ExactRational::new(1, 6));
        let rest: Vec<_> = squares.iter().filter(|q| q.x_word().symbols() != [4]).collect();
        assert_eq!(mu_component(&c, rest), ExactRational::new(5, 6));
    }

    #[test]
    fn singleton_ratio_is_star_squared() {
        let c = two_rows();
        let q = sq(&c, vec![1], vec![1]);
        let w = ratio_witness(&c, std::slice::from_ref(&q), &q).unwrap();
        assert_eq!(w.scaled_ratio, ExactRational::from_integer(324u32));
        assert!(w.check);
        let other = sq(&c, vec![4], vec![1]);
        assert_eq!(
            ratio_witness(&c, std::slice::from_ref(&q), &other),
            Err(MeasureError::NotAMember)
        );
    }

    #[test]
    fn class_gating() {
        let not_doubling = Carpet::new(
            CarpetSpec::new(6, 4, [(0, 0), (2, 0), (4, 0), (1, 1), (1, 3), (2, 3)]).unwrap(),
        );
        let q = sq(&not_doubling, vec![0], vec![0]);
        assert!(matches!(
            color_rigidity_check(&not_doubling, std::slice::from_ref(&q)),
            Err(MeasureError::ClassViolation(_))
        ));
        let no_vacancy = Carpet::new(CarpetSpec::new(3, 2, [(0, 0), (1, 1)]).unwrap());
        let q = sq(&no_vacancy, vec![0], vec![0]);
        assert!(matches!(
            ratio_witness(&no_vacancy, std::slice::from_ref(&q), &q),
            Err(MeasureError::ClassViolation(_))
        ));
    }

    #[test]
    fn offspring_denominators() {
        let c = two_rows();
        let q = sq(&c, vec![1], vec![1]);
        for child in direct_offsprings(&c, &q) {
            assert!(offspring_ratio_denominator_check(&c, &q, &child).unwrap());
        }
        assert_eq!(
            offspring_ratio_denominator_check(&c, &q, &q),
            Err(MeasureError::NotDirectOffspring)
        );
    }

    #[test]
    fn gamma_values() {
        let (e, f) = (two_rows(), four_rows());
        let g = |k| gamma(k, e.profile(), f.profile()).unwrap();
        assert_eq!(g(1), ExactRational::new(2, 3));
        assert_eq!(g(2), ExactRational::new(8, 9));
        assert_eq!(g(3), ExactRational::new(16, 27));
        let table = gamma_table(3, e.profile(), f.profile(), 3).unwrap();
        let v: Vec<_> = table.iter().map(|r| r.valuation.unwrap()).collect();
        assert_eq!(v, vec![-1, -2, -3]);
        let other = CarpetSpec::full_grid(3, 2).unwrap().profile();
        assert!(matches!(
            gamma(1, e.profile(), &other),
            Err(MeasureError::ShapeMismatch(..))
        ));
        assert!(gamma_table(3, e.profile(), f.profile(), 6).is_err());
    }
}
