use carpetlab_core::measure::vp;
use carpetlab_core::spectrum::{curves_agree, dimensions, spectra_equal, BetaModel, SpectrumVerdict};
use carpetlab_core::{CarpetProfile, CarpetSpec, Expansion, ExactRational, Real};
use num_bigint::BigUint;
use proptest::prelude::*;

fn expansion() -> impl Strategy<Value = (u32, u32)> {
    (3u32..=12).prop_flat_map(|n| (Just(n), 2..n))
}

fn profile() -> impl Strategy<Value = CarpetProfile> {
    expansion()
        .prop_flat_map(|(n, m)| (Just(n), Just(m), prop::collection::vec(0..=n, m as usize)))
        .prop_filter("some row occupied", |(_, _, rows)| rows.iter().any(|&a| a > 0))
        .prop_map(|(n, m, rows)| CarpetProfile::from_distribution(n, m, rows).unwrap())
}

/// Two profiles sharing `(n, m)`.
fn profile_pair() -> impl Strategy<Value = (CarpetProfile, CarpetProfile)> {
    let rows = |n: u32, m: u32| {
        prop::collection::vec(0..=n, m as usize).prop_filter("some row occupied", |r| r.iter().any(|&a| a > 0))
    };
    expansion()
        .prop_flat_map(move |(n, m)| (Just(n), Just(m), rows(n, m), rows(n, m)))
        .prop_map(|(n, m, a, b)| {
            (
                CarpetProfile::from_distribution(n, m, a).unwrap(),
                CarpetProfile::from_distribution(n, m, b).unwrap(),
            )
        })
}

fn nonzero_rational() -> impl Strategy<Value = ExactRational> {
    (prop_oneof![-5000i64..=-1, 1i64..=5000], 1i64..=5000).prop_map(|(p, q)| ExactRational::new(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ell_brackets_powers((n, m) in expansion(), k in 0u64..60) {
        let e = Expansion::new(n, m).unwrap();
        let l = e.ell(k);
        let nk = BigUint::from(n).pow(k as u32);
        prop_assert!(BigUint::from(m).pow(l as u32) <= nk);
        prop_assert!(BigUint::from(m).pow(l as u32 + 1) > nk);
        prop_assert!(l >= k);
    }

    #[test]
    fn vp_is_additive(x in nonzero_rational(), y in nonzero_rational(), p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])) {
        let xy = x.clone() * y.clone();
        prop_assert_eq!(vp(&xy, p).unwrap(), vp(&x, p).unwrap() + vp(&y, p).unwrap());
    }

    #[test]
    fn beta_vanishes_at_one_and_slopes_decrease(p in profile(), t in -6.0f64..6.0) {
        let model = BetaModel::new(&p, 128).unwrap();
        prop_assert!(model.beta(&Real::from_f64(1.0, 128)).to_f64().abs() < 1e-30);
        let lo = model.beta_prime(&Real::from_f64(t, 128)).to_f64();
        let hi = model.beta_prime(&Real::from_f64(t + 0.5, 128)).to_f64();
        prop_assert!(hi <= lo + 1e-30);
        let (amin, amax) = model.alpha_range();
        prop_assert!(amin.to_f64() <= hi + 1e-30 && lo <= amax.to_f64() + 1e-30);
    }

    #[test]
    fn dimensions_are_ordered(p in profile()) {
        let d = dimensions(&p, 128).unwrap();
        let (h, b, a) = (d.hausdorff.to_f64(), d.box_dim.to_f64(), d.assouad.to_f64());
        prop_assert!(h <= b + 1e-15 && b <= a + 1e-15, "{h} {b} {a}");
        prop_assert!(a <= 2.0 + 1e-15);
    }

    #[test]
    fn regular_iff_dimensions_coincide(p in profile()) {
        let d = dimensions(&p, 128).unwrap();
        let gap = d.box_dim.to_f64() - d.hausdorff.to_f64();
        prop_assert_eq!(p.is_regular(), gap.abs() < 1e-15);
    }

    #[test]
    fn spectrum_equality_is_symmetric((e, f) in profile_pair()) {
        let ef = spectra_equal(&e, &f, 128).unwrap();
        let fe = spectra_equal(&f, &e, 128).unwrap();
        prop_assert_eq!(ef.value, fe.value);
    }

    #[test]
    fn row_permutations_preserve_the_spectrum(p in profile(), seed in any::<u64>()) {
        let mut rows = p.distribution().to_vec();
        let len = rows.len();
        rows.rotate_left((seed % len as u64) as usize);
        let q = CarpetProfile::from_distribution(p.n(), p.m(), rows).unwrap();
        prop_assert_eq!(spectra_equal(&p, &q, 128).unwrap().value, SpectrumVerdict::Equal);
    }

    #[test]
    fn carpet_documents_round_trip(
        (n, m) in expansion(),
        picks in prop::collection::btree_set((0u32..12, 0u32..11), 1..20),
    ) {
        let digits: Vec<_> = picks.into_iter().filter(|&(i, j)| i < n && j < m).collect();
        prop_assume!(!digits.is_empty());
        let spec = CarpetSpec::new(n, m, digits).unwrap();
        prop_assert_eq!(CarpetSpec::from_json(&spec.to_json()).unwrap(), spec);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    /// The exact criterion against sampled curves.
    #[test]
    fn exact_equality_matches_sampled_curves((e, f) in profile_pair()) {
        let verdict = spectra_equal(&e, &f, 256).unwrap().value;
        let agree = curves_agree(&e, &f, 24, 1e-9, 128).unwrap();
        match verdict {
            SpectrumVerdict::Equal => prop_assert!(agree),
            SpectrumVerdict::NotEqual => prop_assert!(!agree),
            SpectrumVerdict::UndecidedAtPrecision => {}
        }
    }
}
