//! The moment function `β(t)`, the multifractal spectrum `h(α)` of the uniform
//! Bernoulli measure, the classical dimensions, and the exact spectrum
//! equality test.
//!
//! Convention: `β(t) = t·log_m N − log_m Σ_{j∈ℰ} a_j^{σ+(1−σ)t}` is concave and
//! increasing with `β(1) = 0`. Local dimensions are `α = β′(t)`, which falls
//! from `α_max` (as `t → −∞`) to `α_min` (as `t → +∞`), and
//! `h(α) = inf_t (α t − β(t)) = α t* − β(t*)` where `β′(t*) = α`.

mod dims;
mod equality;

use astro_float::BigFloat;
use serde::Serialize;

pub use dims::{dim_assouad, dim_box, dim_hausdorff, dimensions, Dimensions};
pub(crate) use dims::dim_intervals;
pub use equality::{spectra_equal, Certificate, SpectrumVerdict, TriVerdict};
pub(crate) use equality::log_form_sign;

use crate::carpet::CarpetProfile;
use crate::real::{big_to_f64, Arith, Real};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error("alpha = {alpha} lies outside [{min}, {max}]")]
    AlphaOutOfRange { alpha: String, min: String, max: String },
    #[error("regular carpet: the only admissible alpha is dim_H = {dim_h}")]
    RegularDegenerate { dim_h: String },
    #[error("carpets use different expansion pairs ({0}, {1}) and ({2}, {3})")]
    ShapeMismatch(u32, u32, u32, u32),
    #[error("precision must be at least 64 bits, got {0}")]
    PrecisionTooLow(usize),
    #[error("no bracket for beta'(t) = alpha within |t| <= 2^64")]
    NoBracket,
}

pub const MIN_PRECISION_BITS: usize = 64;

fn check_bits(bits: usize) -> Result<(), SpectrumError> {
    if bits < MIN_PRECISION_BITS {
        return Err(SpectrumError::PrecisionTooLow(bits));
    }
    Ok(())
}

/// `β` and its derivative for one profile, with logarithms cached.
#[derive(Debug, Clone)]
pub struct BetaModel {
    bits: usize,
    arith: Arith,
    ln_m: BigFloat,
    sigma: BigFloat,
    one_minus_sigma: BigFloat,
    /// `log_m N`.
    log_m_digits: BigFloat,
    /// `(M_i, ln a_i*)` for each distinct row count.
    terms: Vec<(BigFloat, BigFloat)>,
    regular: bool,
}

impl BetaModel {
    pub fn new(profile: &CarpetProfile, bits: usize) -> Result<Self, SpectrumError> {
        check_bits(bits)?;
        let a = Arith::for_bits(bits);
        let ln_m = a.ln_int(profile.m().into());
        let ln_n = a.ln_int(profile.n().into());
        let sigma = a.div(&ln_m, &ln_n);
        let one_minus_sigma = a.sub(&a.int(1), &sigma);
        let log_m_digits = a.div(&a.ln_int(profile.digit_count().into()), &ln_m);
        let terms = profile
            .distinct_counts()
            .iter()
            .zip(profile.multiplicities())
            .map(|(&c, &mult)| (a.int(mult.into()), a.ln_int(c.into())))
            .collect();
        Ok(BetaModel {
            bits,
            arith: a,
            ln_m,
            sigma,
            one_minus_sigma,
            log_m_digits,
            terms,
            regular: profile.is_regular(),
        })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }

    fn real(&self, x: BigFloat) -> Real {
        Real::new(x, self.bits)
    }

    fn big(&self, x: f64) -> BigFloat {
        self.arith.f64(x)
    }

    /// `(Σ M_i a_i^e, Σ M_i a_i^e ln a_i)` with `e = σ + (1−σ)t`.
    fn sums(&self, t: &BigFloat) -> (BigFloat, BigFloat) {
        let a = self.arith;
        let e = a.add(&self.sigma, &a.mul(&self.one_minus_sigma, t));
        let mut s0 = a.int(0);
        let mut s1 = a.int(0);
        for (mult, ln_c) in &self.terms {
            let w = a.mul(mult, &a.exp(&a.mul(&e, ln_c)));
            s1 = a.add(&s1, &a.mul(&w, ln_c));
            s0 = a.add(&s0, &w);
        }
        (s0, s1)
    }

    fn beta_big(&self, t: &BigFloat) -> BigFloat {
        let a = self.arith;
        let (s0, _) = self.sums(t);
        a.sub(&a.mul(t, &self.log_m_digits), &a.div(&a.ln(&s0), &self.ln_m))
    }

    fn beta_prime_big(&self, t: &BigFloat) -> BigFloat {
        let a = self.arith;
        let (s0, s1) = self.sums(t);
        let frac = a.div(&s1, &a.mul(&s0, &self.ln_m));
        a.sub(&self.log_m_digits, &a.mul(&self.one_minus_sigma, &frac))
    }

    pub fn beta(&self, t: &Real) -> Real {
        self.real(self.beta_big(t.raw()))
    }

    pub fn beta_prime(&self, t: &Real) -> Real {
        self.real(self.beta_prime_big(t.raw()))
    }

    pub fn beta_f64(&self, t: f64) -> f64 {
        big_to_f64(&self.beta_big(&self.big(t)))
    }

    pub fn beta_prime_f64(&self, t: f64) -> f64 {
        big_to_f64(&self.beta_prime_big(&self.big(t)))
    }

    /// `log_m N − (1−σ) log_m a` for a row count given by its log.
    fn alpha_limit(&self, ln_c: &BigFloat) -> BigFloat {
        let a = self.arith;
        a.sub(&self.log_m_digits, &a.div(&a.mul(&self.one_minus_sigma, ln_c), &self.ln_m))
    }

    /// `(α_min, α_max)`: limits of `β′` at `t → +∞` and `t → −∞`.
    pub fn alpha_range(&self) -> (Real, Real) {
        let (min, max) = self.alpha_range_big();
        (self.real(min), self.real(max))
    }

    fn alpha_range_big(&self) -> (BigFloat, BigFloat) {
        let first = &self.terms[0].1;
        let last = &self.terms[self.terms.len() - 1].1;
        (self.alpha_limit(first), self.alpha_limit(last))
    }

    /// One-sided limit of `h` at `α_min` (`max_end = false`) or `α_max`:
    /// `log_m M_i + log_n a_i*` for the extreme row count.
    fn endpoint_h(&self, max_end: bool) -> BigFloat {
        let a = self.arith;
        let (mult, ln_c) = if max_end {
            &self.terms[self.terms.len() - 1]
        } else {
            &self.terms[0]
        };
        a.add(
            &a.div(&a.ln(mult), &self.ln_m),
            &a.div(&a.mul(&self.sigma, ln_c), &self.ln_m),
        )
    }

    /// `2^{-bits/2}`: tolerance on `|β′(t*) − α|`.
    fn alpha_tolerance(&self) -> BigFloat {
        self.arith.pow2_neg(self.bits / 2)
    }

    /// Solves `β′(t) = α` by bisection on an exponentially expanded bracket.
    fn solve_t(&self, alpha: &BigFloat) -> Result<BigFloat, SpectrumError> {
        let a = self.arith;
        let tol = self.alpha_tolerance();
        let mut lo = a.int(-1);
        let mut hi = a.int(1);
        let mut expansions = 0;
        while self.beta_prime_big(&lo) < *alpha {
            lo = a.mul(&lo, &a.int(2));
            expansions += 1;
            if expansions > 64 {
                return Err(SpectrumError::NoBracket);
            }
        }
        expansions = 0;
        while self.beta_prime_big(&hi) > *alpha {
            hi = a.mul(&hi, &a.int(2));
            expansions += 1;
            if expansions > 64 {
                return Err(SpectrumError::NoBracket);
            }
        }
        let half = a.f64(0.5);
        let mut mid = a.mul(&a.add(&lo, &hi), &half);
        for _ in 0..(4 * self.bits + 256) {
            let d = self.beta_prime_big(&mid);
            let r = a.sub(&d, alpha);
            if r.abs() <= tol {
                break;
            }
            // β′ decreases: too large means t* lies further right.
            if r.is_positive() {
                lo = mid;
            } else {
                hi = mid;
            }
            mid = a.mul(&a.add(&lo, &hi), &half);
        }
        Ok(mid)
    }

    /// `h(α)`. Interior points are solved by bisection; endpoints within
    /// tolerance return the one-sided limit, flagged as extrapolated.
    pub fn spectrum_value(&self, alpha: &Real) -> Result<SpectrumPoint, SpectrumError> {
        let a = self.arith;
        let tol = self.alpha_tolerance();
        let x = alpha.raw();
        let (min, max) = self.alpha_range_big();
        let half_bits = self.bits / 2;
        let point = |t: Option<BigFloat>, h: BigFloat, extrapolated| {
            let residual = t.as_ref().map(|t| big_to_f64(&a.sub(&self.beta_prime_big(t), x).abs()));
            SpectrumPoint {
                alpha: alpha.clone(),
                t: t.map(|t| Real::new(t, half_bits)),
                h: Real::new(h, half_bits),
                extrapolated,
                residual,
            }
        };
        if self.regular {
            let dim_h = self.endpoint_h(false);
            if a.sub(x, &min).abs() <= tol {
                return Ok(SpectrumPoint {
                    h: self.real(dim_h),
                    ..point(None, a.int(0), false)
                });
            }
            return Err(SpectrumError::RegularDegenerate {
                dim_h: self.real(dim_h).to_string(),
            });
        }
        let below = a.sub(&min, x);
        let above = a.sub(x, &max);
        if (below.is_positive() && below > tol) || (above.is_positive() && above > tol) {
            return Err(SpectrumError::AlphaOutOfRange {
                alpha: alpha.to_string(),
                min: self.real(min).to_string(),
                max: self.real(max).to_string(),
            });
        }
        if below.abs() <= tol {
            return Ok(point(None, self.endpoint_h(false), true));
        }
        if above.abs() <= tol {
            return Ok(point(None, self.endpoint_h(true), true));
        }
        let t = self.solve_t(x)?;
        let h = a.sub(&a.mul(x, &t), &self.beta_big(&t));
        Ok(point(Some(t), h, false))
    }

    /// Samples of the spectrum. A non-regular profile is sampled at `grid`
    /// equally spaced interior `α`; a regular one (single point `α = dim_H`)
    /// at `grid` values of `t` spread over `[−5, 5]`.
    pub fn curve(&self, grid: usize) -> Result<SpectrumCurve, SpectrumError> {
        let a = self.arith;
        let (min, max) = self.alpha_range_big();
        let mut samples = Vec::with_capacity(grid);
        for i in 1..=grid {
            if self.regular {
                let t = if grid == 1 {
                    a.int(0)
                } else {
                    a.f64(-5.0 + 10.0 * (i - 1) as f64 / (grid - 1) as f64)
                };
                let beta = self.beta_big(&t);
                let alpha = self.beta_prime_big(&t);
                let h = a.sub(&a.mul(&alpha, &t), &beta);
                samples.push(SpectrumSample {
                    t: self.real(t),
                    beta: self.real(beta),
                    alpha: self.real(alpha),
                    h: self.real(h),
                });
                continue;
            }
            let frac = a.div(&a.int(i as i64), &a.int(grid as i64 + 1));
            let alpha = a.add(&min, &a.mul(&frac, &a.sub(&max, &min)));
            let t = self.solve_t(&alpha)?;
            let beta = self.beta_big(&t);
            let h = a.sub(&a.mul(&alpha, &t), &beta);
            samples.push(SpectrumSample {
                t: Real::new(t, self.bits / 2),
                beta: Real::new(beta, self.bits / 2),
                alpha: self.real(alpha),
                h: Real::new(h, self.bits / 2),
            });
        }
        Ok(SpectrumCurve {
            samples,
            alpha_min: self.real(min),
            alpha_max: self.real(max),
            h_at_alpha_min: self.real(self.endpoint_h(false)),
            h_at_alpha_max: self.real(self.endpoint_h(true)),
            precision_bits: self.bits,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumPoint {
    pub alpha: Real,
    /// Solution of `β′(t*) = α`; absent at extrapolated endpoints and in the
    /// regular case.
    pub t: Option<Real>,
    pub h: Real,
    pub extrapolated: bool,
    /// `|β′(t*) − α|` at the returned `t*`.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSample {
    pub t: Real,
    pub beta: Real,
    pub alpha: Real,
    pub h: Real,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumCurve {
    pub samples: Vec<SpectrumSample>,
    pub alpha_min: Real,
    pub alpha_max: Real,
    /// One-sided endpoint limits, extrapolated.
    pub h_at_alpha_min: Real,
    pub h_at_alpha_max: Real,
    pub precision_bits: usize,
}

pub fn beta(profile: &CarpetProfile, t: &Real, bits: usize) -> Result<Real, SpectrumError> {
    Ok(BetaModel::new(profile, bits)?.beta(t))
}

pub fn beta_prime(profile: &CarpetProfile, t: &Real, bits: usize) -> Result<Real, SpectrumError> {
    Ok(BetaModel::new(profile, bits)?.beta_prime(t))
}

pub fn alpha_range(profile: &CarpetProfile, bits: usize) -> Result<(Real, Real), SpectrumError> {
    Ok(BetaModel::new(profile, bits)?.alpha_range())
}

pub fn spectrum_value(profile: &CarpetProfile, alpha: &Real, bits: usize) -> Result<SpectrumPoint, SpectrumError> {
    BetaModel::new(profile, bits)?.spectrum_value(alpha)
}

pub fn spectrum_curve(profile: &CarpetProfile, grid: usize, bits: usize) -> Result<SpectrumCurve, SpectrumError> {
    BetaModel::new(profile, bits)?.curve(grid)
}

/// Whether two spectra agree pointwise within `tol`: same `α` range and the
/// same `h` at `grid` interior points of it.
pub fn curves_agree(
    e: &CarpetProfile,
    f: &CarpetProfile,
    grid: usize,
    tol: f64,
    bits: usize,
) -> Result<bool, SpectrumError> {
    let me = BetaModel::new(e, bits)?;
    let mf = BetaModel::new(f, bits)?;
    let (emin, emax) = me.alpha_range();
    let (fmin, fmax) = mf.alpha_range();
    if emin.abs_diff(&fmin) > tol || emax.abs_diff(&fmax) > tol {
        return Ok(false);
    }
    if me.is_regular() || mf.is_regular() {
        if me.is_regular() != mf.is_regular() {
            return Ok(false);
        }
        let he = me.spectrum_value(&emin)?.h;
        let hf = mf.spectrum_value(&fmin)?.h;
        return Ok(he.abs_diff(&hf) <= tol);
    }
    let width = emax.sub(&emin);
    for i in 1..=grid {
        let frac = Real::from_f64(i as f64 / (grid + 1) as f64, bits);
        let alpha = emin.add(&width.mul(&frac));
        let he = me.spectrum_value(&alpha)?;
        let hf = match mf.spectrum_value(&alpha) {
            Ok(p) => p,
            Err(SpectrumError::AlphaOutOfRange { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        if he.h.abs_diff(&hf.h) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
