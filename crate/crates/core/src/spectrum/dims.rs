use serde::Serialize;

use super::{check_bits, SpectrumError};
use crate::carpet::CarpetProfile;
use crate::interval::Interval;
use crate::real::{Real, GUARD_BITS};

#[derive(Debug, Clone, Serialize)]
pub struct Dimensions {
    pub hausdorff: Real,
    #[serde(rename = "box")]
    pub box_dim: Real,
    pub assouad: Real,
}

/// Enclosures of `(dim_H, dim_B, dim_A)` at `bits + GUARD_BITS` working bits.
pub(crate) fn dim_intervals(profile: &CarpetProfile, bits: usize) -> [Interval; 3] {
    let p = bits + GUARD_BITS;
    let ln = |v: u32| Interval::ln_int(v.into(), p);
    let ln_m = ln(profile.m());
    let ln_n = ln(profile.n());
    let ln_s = ln(profile.occupied_count());
    let div = |a: &Interval, b: &Interval| a.div(b).expect("logs of integers >= 2 are positive");

    // log_m Σ_i M_i (a_i*)^σ
    let sigma = div(&ln_m, &ln_n);
    let mut sum = Interval::from_i64(0, p);
    for (&c, &mult) in profile.distinct_counts().iter().zip(profile.multiplicities()) {
        let term = sigma.mul(&ln(c)).exp().mul(&Interval::from_i64(mult.into(), p));
        sum = sum.add(&term);
    }
    let hausdorff = div(&sum.ln().expect("positive sum"), &ln_m);

    // log_n N + (1/σ − 1) log_n s = log_n N + log_m s − log_n s
    let box_dim = div(&ln(profile.digit_count()), &ln_n)
        .add(&div(&ln_s, &ln_m))
        .sub(&div(&ln_s, &ln_n));

    // log_m s + log_n max a_j
    let assouad = div(&ln_s, &ln_m).add(&div(&ln(profile.max_count()), &ln_n));
    [hausdorff, box_dim, assouad]
}

fn midpoint(x: &Interval, bits: usize) -> Real {
    Real::new(x.midpoint(), bits)
}

/// McMullen's formula `log_m Σ_{j∈ℰ} a_j^σ`.
pub fn dim_hausdorff(profile: &CarpetProfile, bits: usize) -> Result<Real, SpectrumError> {
    check_bits(bits)?;
    Ok(midpoint(&dim_intervals(profile, bits)[0], bits))
}

/// `log_n(N·s^{1/σ−1})`.
pub fn dim_box(profile: &CarpetProfile, bits: usize) -> Result<Real, SpectrumError> {
    check_bits(bits)?;
    Ok(midpoint(&dim_intervals(profile, bits)[1], bits))
}

/// Mackay's formula `log_m s + log_n max_j a_j`.
pub fn dim_assouad(profile: &CarpetProfile, bits: usize) -> Result<Real, SpectrumError> {
    check_bits(bits)?;
    Ok(midpoint(&dim_intervals(profile, bits)[2], bits))
}

pub fn dimensions(profile: &CarpetProfile, bits: usize) -> Result<Dimensions, SpectrumError> {
    check_bits(bits)?;
    let [h, b, a] = dim_intervals(profile, bits);
    Ok(Dimensions {
        hausdorff: midpoint(&h, bits),
        box_dim: midpoint(&b, bits),
        assouad: midpoint(&a, bits),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carpet::CarpetSpec;

    #[test]
    fn full_grid_is_two_dimensional() {
        let p = CarpetSpec::full_grid(5, 3).unwrap().profile();
        let d = dimensions(&p, 128).unwrap();
        for v in [&d.hausdorff, &d.box_dim, &d.assouad] {
            assert!((v.to_f64() - 2.0).abs() < 1e-30);
        }
    }

    #[test]
    fn regular_dimensions_coincide() {
        let p = CarpetProfile::from_distribution(5, 4, vec![2, 2, 0, 0]).unwrap();
        let d = dimensions(&p, 128).unwrap();
        assert!(d.hausdorff.abs_diff(&d.box_dim) < 1e-30);
        assert!(d.assouad.abs_diff(&d.box_dim) < 1e-30);
    }

    #[test]
    fn example_values() {
        let mut digits = vec![(1, 1), (4, 1), (7, 1)];
        digits.extend((1..=6).map(|i| (2 * i - 1, 4)));
        let p = CarpetSpec::new(27, 8, digits).unwrap().profile();
        let d = dimensions(&p, 256).unwrap();
        let oracle_box = 1.0 - 2f64.ln() / (3.0 * 3f64.ln());
        assert!((d.box_dim.to_f64() - oracle_box).abs() < 1e-15);
        assert!((d.hausdorff.to_f64() - 0.783_227_940_065_19).abs() < 1e-13);
        assert!((d.assouad.to_f64() - 0.876_976_584_523_82).abs() < 1e-13);
        let [h, ..] = dim_intervals(&p, 256);
        assert!(h.width() < 1e-70);
    }
}
