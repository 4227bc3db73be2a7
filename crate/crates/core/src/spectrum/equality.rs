//! Exact decision of spectrum equality for two profiles sharing `(n, m)`.
//!
//! The spectra coincide iff `p̃ = q̃` and, for every `i`,
//! `a_i*/b_i* = (M_i′/M_i)^{1/σ} = (s′/s)^{1/σ} = (N/N′)^{1/(1−σ)}`.
//! Everything except the final power identity `ρ^σ = s′/s` is rational
//! arithmetic; that identity reads `ln ρ · ln m = ln r · ln n` and is settled
//! exactly whenever possible, else by interval separation.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use super::{check_bits, SpectrumError};
use crate::carpet::CarpetProfile;
use crate::interval::Interval;
use crate::measure::factorize;
use crate::rational::ExactRational;
use crate::real::{decimal_digits, GUARD_BITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumVerdict {
    Equal,
    NotEqual,
    UndecidedAtPrecision,
}

/// The branch of the pipeline that settled the verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum Certificate {
    /// Different numbers of distinct row counts.
    PieceCount { p: usize, q: usize },
    /// `M_i′/M_i ≠ s′/s`.
    Multiplicity { index: usize, ratio: ExactRational, expected: ExactRational },
    /// `a_i*/b_i*` differs from `a_1*/b_1*`.
    RatioNotConstant { index: usize, ratio: ExactRational, first: ExactRational },
    /// `ρ ≠ (s′/s)(N/N′)`.
    RatioIdentity { rho: ExactRational, expected: ExactRational },
    /// `ρ = 1`: equal iff `N = N′`, `s = s′` and the `a*` sequences agree.
    Degenerate { identical: bool },
    /// `ρ − 1` and `s′/s − 1` have different signs, so `ρ^σ ≠ s′/s`.
    SignMismatch { rho: ExactRational, r: ExactRational },
    /// One side is an exact rational power `base^{u/v}`, reducing
    /// `ρ^σ = s′/s` to `other^v = other_base^u`.
    ExactPower {
        base: u32,
        u: i64,
        v: u64,
        rho: ExactRational,
        r: ExactRational,
        holds: bool,
    },
    /// `ln ρ ln m − ln r ln n` vanishes as a symmetric tensor over the primes.
    LogIdentity { rho: ExactRational, r: ExactRational },
    /// Enclosure of `ln ρ ln m − ln r ln n` excludes zero.
    IntervalSeparation { bits: usize, lo: String, hi: String },
    /// Enclosure still contains zero.
    PrecisionBound { bits: usize, lo: String, hi: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriVerdict {
    pub value: SpectrumVerdict,
    pub certificate: Certificate,
}

impl TriVerdict {
    fn new(value: SpectrumVerdict, certificate: Certificate) -> Self {
        TriVerdict { value, certificate }
    }

    fn not_equal(certificate: Certificate) -> Self {
        TriVerdict::new(SpectrumVerdict::NotEqual, certificate)
    }
}

/// Prime exponent vector of a positive rational.
fn exponents(x: &ExactRational) -> BTreeMap<u64, i64> {
    let mut out = BTreeMap::new();
    for (v, sign) in [(x.numer(), 1), (x.denom(), -1)] {
        let v = v.to_u64().expect("profile ratios fit in 64 bits");
        for (p, e) in factorize(v) {
            *out.entry(p).or_insert(0) += sign * i64::from(e);
        }
    }
    out.retain(|_, e| *e != 0);
    out
}

/// `x = base^{u/v}` with `v > 0`, if such a rational exponent exists.
fn rational_log(x: &ExactRational, base: u64) -> Option<(i64, u64)> {
    let ex = exponents(x);
    let eb = exponents(&ExactRational::from_integer(base));
    if ex.is_empty() {
        return Some((0, 1));
    }
    if ex.keys().ne(eb.keys()) {
        return None;
    }
    let (&p0, &b0) = eb.iter().next()?;
    let x0 = ex[&p0];
    // Proportional iff ex_p·b0 = x0·eb_p for all p.
    if eb.iter().any(|(p, &b)| ex[p] * b0 != x0 * b) {
        return None;
    }
    let g = num_integer::gcd(x0, b0);
    let (u, v) = (x0 / g, b0 / g);
    Some(if v < 0 { (-u, (-v) as u64) } else { (u, v as u64) })
}

fn pow_signed(x: &ExactRational, e: i64) -> ExactRational {
    x.pow(i32::try_from(e).expect("exponent fits i32"))
}

/// One term `c · ln x · ln y` of a log-bilinear form.
pub(crate) type LogTerm = (i64, ExactRational, ExactRational);

/// Sign of `Σ c ln x ln y`: `Some(0)` when it vanishes identically as a
/// symmetric tensor over prime logs, `Some(±1)` when an enclosure at `bits`
/// excludes zero, else `None`. Also returns the enclosure, if one was needed.
pub(crate) fn log_form_sign(terms: &[LogTerm], bits: usize) -> (Option<i8>, Option<Interval>) {
    let mut tensor: BTreeMap<(u64, u64), i64> = BTreeMap::new();
    for (c, x, y) in terms {
        let (ex, ey) = (exponents(x), exponents(y));
        for (&p, &a) in &ex {
            for (&q, &b) in &ey {
                *tensor.entry((p.min(q), p.max(q))).or_insert(0) += c * a * b;
            }
        }
    }
    if tensor.values().all(|&v| v == 0) {
        return (Some(0), None);
    }
    let p = bits + GUARD_BITS;
    let ln_q = |x: &ExactRational| {
        let num = x.numer().to_u64().expect("fits");
        let den = x.denom().to_u64().expect("fits");
        Interval::ln_int(num, p).sub(&Interval::ln_int(den, p))
    };
    let mut sum = Interval::from_i64(0, p);
    for (c, x, y) in terms {
        sum = sum.add(&Interval::from_i64(*c, p).mul(&ln_q(x).mul(&ln_q(y))));
    }
    (sum.sign(), Some(sum))
}

/// Decides whether two profiles with the same `(n, m)` have the same
/// multifractal spectrum.
pub fn spectra_equal(e: &CarpetProfile, f: &CarpetProfile, bits: usize) -> Result<TriVerdict, SpectrumError> {
    check_bits(bits)?;
    if e.expansion() != f.expansion() {
        return Err(SpectrumError::ShapeMismatch(e.n(), e.m(), f.n(), f.m()));
    }
    let (a, b) = (e.distinct_counts(), f.distinct_counts());
    if a.len() != b.len() {
        return Ok(TriVerdict::not_equal(Certificate::PieceCount { p: a.len(), q: b.len() }));
    }
    let r = ExactRational::new(f.occupied_count(), e.occupied_count());
    for (i, (&mi, &mpi)) in e.multiplicities().iter().zip(f.multiplicities()).enumerate() {
        let ratio = ExactRational::new(mpi, mi);
        if ratio != r {
            return Ok(TriVerdict::not_equal(Certificate::Multiplicity {
                index: i + 1,
                ratio,
                expected: r.clone(),
            }));
        }
    }
    let rho = ExactRational::new(a[0], b[0]);
    for i in 1..a.len() {
        let ratio = ExactRational::new(a[i], b[i]);
        if ratio != rho {
            return Ok(TriVerdict::not_equal(Certificate::RatioNotConstant {
                index: i + 1,
                ratio,
                first: rho,
            }));
        }
    }
    // Implied by the two checks above since N = Σ M_i a_i*; kept as a guard.
    let expected = &r * &ExactRational::new(e.digit_count(), f.digit_count());
    if rho != expected {
        return Ok(TriVerdict::not_equal(Certificate::RatioIdentity { rho, expected }));
    }
    if rho.is_integer() && rho.numer().is_one() {
        let identical = e.digit_count() == f.digit_count() && e.occupied_count() == f.occupied_count() && a == b;
        let value = if identical {
            SpectrumVerdict::Equal
        } else {
            SpectrumVerdict::NotEqual
        };
        return Ok(TriVerdict::new(value, Certificate::Degenerate { identical }));
    }

    // Remaining condition: ρ^σ = r, i.e. ln ρ · ln m = ln r · ln n.
    let one = ExactRational::one();
    let sign = |x: &ExactRational| (x - &one).numer().signum();
    if sign(&rho) != sign(&r) {
        return Ok(TriVerdict::not_equal(Certificate::SignMismatch { rho, r }));
    }
    let (n, m) = (e.n(), e.m());
    if let Some((u, v)) = rational_log(&rho, n.into()) {
        // ρ = n^{u/v}, so ρ^σ = m^{u/v}; compare r^v with m^u.
        let holds = pow_signed(&r, v as i64) == pow_signed(&ExactRational::from_integer(m), u);
        return Ok(exact_power(n, u, v, rho, r, holds));
    }
    if let Some((u, v)) = rational_log(&r, m.into()) {
        // r = m^{u/v}; the identity becomes ρ^v = n^u.
        let holds = pow_signed(&rho, v as i64) == pow_signed(&ExactRational::from_integer(n), u);
        return Ok(exact_power(m, u, v, rho, r, holds));
    }
    let terms: Vec<LogTerm> = vec![
        (1, rho.clone(), ExactRational::from_integer(m)),
        (-1, r.clone(), ExactRational::from_integer(n)),
    ];
    let sig = decimal_digits(bits);
    match log_form_sign(&terms, bits) {
        (Some(0), _) => Ok(TriVerdict::new(SpectrumVerdict::Equal, Certificate::LogIdentity { rho, r })),
        (Some(_), Some(iv)) => Ok(TriVerdict::not_equal(Certificate::IntervalSeparation {
            bits,
            lo: iv.lo_decimal(sig),
            hi: iv.hi_decimal(sig),
        })),
        (_, iv) => {
            let iv = iv.expect("non-zero tensor yields an enclosure");
            Ok(TriVerdict::new(
                SpectrumVerdict::UndecidedAtPrecision,
                Certificate::PrecisionBound {
                    bits,
                    lo: iv.lo_decimal(sig),
                    hi: iv.hi_decimal(sig),
                },
            ))
        }
    }
}

fn exact_power(base: u32, u: i64, v: u64, rho: ExactRational, r: ExactRational, holds: bool) -> TriVerdict {
    let value = if holds {
        SpectrumVerdict::Equal
    } else {
        SpectrumVerdict::NotEqual
    };
    TriVerdict::new(value, Certificate::ExactPower { base, u, v, rho, r, holds })
}
