//! Outward-rounded interval arithmetic.
//!
//! `astro-float` rounds to nearest only, so every operation widens its
//! nearest-rounded endpoints by a relative margin of `2^{-(p-4)}`, far larger
//! than the half-ulp error of a correctly rounded result. Exact zeros stay
//! exact.

use astro_float::BigFloat;

use crate::real::{big_to_decimal, big_to_f64, Arith};

#[derive(Debug, Clone)]
pub struct Interval {
    lo: BigFloat,
    hi: BigFloat,
    arith: Arith,
}

impl Interval {
    /// Point interval of an integer at working precision `bits`; exact while
    /// `|v| < 2^bits`.
    pub fn from_i64(v: i64, bits: usize) -> Self {
        let arith = Arith { p: bits };
        let x = arith.int(v);
        Interval {
            lo: x.clone(),
            hi: x,
            arith,
        }
    }

    fn widen(arith: Arith, lo: BigFloat, hi: BigFloat) -> Self {
        let eps = arith.pow2_neg(arith.p - 4);
        let lo = arith.sub(&lo, &arith.mul(&lo.abs(), &eps));
        let hi = arith.add(&hi, &arith.mul(&hi.abs(), &eps));
        Interval { lo, hi, arith }
    }

    pub fn lo(&self) -> f64 {
        big_to_f64(&self.lo)
    }

    pub fn hi(&self) -> f64 {
        big_to_f64(&self.hi)
    }

    pub fn bits(&self) -> usize {
        self.arith.p
    }

    /// Width `hi - lo`, rounded to a double.
    pub fn width(&self) -> f64 {
        big_to_f64(&self.arith.sub(&self.hi, &self.lo))
    }

    pub fn lo_decimal(&self, sig: usize) -> String {
        big_to_decimal(&self.lo, sig)
    }

    pub fn hi_decimal(&self, sig: usize) -> String {
        big_to_decimal(&self.hi, sig)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `Some(sign)` once the interval excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() && !self.lo.is_zero() {
            Some(1)
        } else if self.hi.is_negative() && !self.hi.is_zero() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        let a = self.arith;
        Interval::widen(a, a.add(&self.lo, &other.lo), a.add(&self.hi, &other.hi))
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        let a = self.arith;
        Interval::widen(a, a.sub(&self.lo, &other.hi), a.sub(&self.hi, &other.lo))
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            arith: self.arith,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let a = self.arith;
        let products = [
            a.mul(&self.lo, &other.lo),
            a.mul(&self.lo, &other.hi),
            a.mul(&self.hi, &other.lo),
            a.mul(&self.hi, &other.hi),
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        Interval::widen(a, lo, hi)
    }

    /// Quotient; `None` when the divisor contains zero.
    pub fn div(&self, other: &Interval) -> Option<Interval> {
        other.sign()?;
        let a = self.arith;
        let q = [
            a.div(&self.lo, &other.lo),
            a.div(&self.lo, &other.hi),
            a.div(&self.hi, &other.lo),
            a.div(&self.hi, &other.hi),
        ];
        let lo = q.iter().fold(q[0].clone(), |acc, x| if *x < acc { x.clone() } else { acc });
        let hi = q.iter().fold(q[0].clone(), |acc, x| if *x > acc { x.clone() } else { acc });
        Some(Interval::widen(a, lo, hi))
    }

    /// Midpoint of the enclosure.
    pub(crate) fn midpoint(&self) -> BigFloat {
        let a = self.arith;
        a.div(&a.add(&self.lo, &self.hi), &a.int(2))
    }

    /// Natural log; `None` unless the interval is strictly positive.
    pub fn ln(&self) -> Option<Interval> {
        if !(self.lo.is_positive() && !self.lo.is_zero()) {
            return None;
        }
        let a = self.arith;
        Some(Interval::widen(a, a.ln(&self.lo), a.ln(&self.hi)))
    }

    /// Enclosure of `ln(v)` for a positive integer; `ln 1 = 0` exactly.
    pub fn ln_int(v: u64, bits: usize) -> Interval {
        assert!(v > 0, "logarithm of zero");
        if v == 1 {
            return Interval::from_i64(0, bits);
        }
        let a = Arith { p: bits };
        let x = a.ln_int(v);
        Interval::widen(a, x.clone(), x)
    }

    pub fn exp(&self) -> Interval {
        let a = self.arith;
        Interval::widen(a, a.exp(&self.lo), a.exp(&self.hi))
    }
}
