//! High-precision reals on top of `astro-float`.
//!
//! All transcendental work runs at the caller's precision plus [`GUARD_BITS`];
//! values are stored at that working precision and only rounded when printed.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use serde::{Serialize, Serializer};

/// Default precision for every transcendental evaluation.
pub const DEFAULT_PRECISION_BITS: usize = 256;

/// Extra working bits carried on top of the requested precision.
pub const GUARD_BITS: usize = 64;

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("astro-float constant cache allocates"));
}

/// Runs `f` with this thread's constant cache. Must not be nested.
pub(crate) fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Arithmetic at one fixed binary precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Arith {
    pub p: usize,
}

impl Arith {
    /// Working precision for a requested output precision.
    pub fn for_bits(bits: usize) -> Self {
        Arith {
            p: bits + GUARD_BITS,
        }
    }

    pub fn int(&self, v: i64) -> BigFloat {
        BigFloat::from_i64(v, self.p)
    }

    pub fn f64(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.p)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    pub fn ln(&self, a: &BigFloat) -> BigFloat {
        with_consts(|cc| a.ln(self.p, RM, cc))
    }

    pub fn exp(&self, a: &BigFloat) -> BigFloat {
        with_consts(|cc| a.exp(self.p, RM, cc))
    }

    pub fn ln_int(&self, v: u64) -> BigFloat {
        self.ln(&BigFloat::from_u64(v, self.p))
    }

    /// `2^{-e}`, exact.
    pub fn pow2_neg(&self, e: usize) -> BigFloat {
        BigFloat::from_u64(2, self.p).powi(e, self.p, RM).reciprocal(self.p, RM)
    }
}

/// Nearest double of a big float.
pub(crate) fn big_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let s = with_consts(|cc| x.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into());
    s.parse().unwrap_or(f64::NAN)
}

/// Fixed-point decimal rendering of `x` rounded (half away from zero) to
/// `sig` significant digits, trailing zeros dropped.
pub(crate) fn big_to_decimal(x: &BigFloat, sig: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_inf() {
        return if x.is_inf_pos() { "inf" } else { "-inf" }.into();
    }
    if x.is_zero() {
        return "0".into();
    }
    let s = with_consts(|cc| x.format(Radix::Dec, RM, cc)).expect("finite values format");
    scientific_to_fixed(&s, sig.max(1))
}

/// Converts `[-]d.ddde±X` into fixed-point notation with `sig` significant
/// digits.
fn scientific_to_fixed(s: &str, sig: usize) -> String {
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (mantissa, exp) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().expect("decimal exponent")),
        None => (body, 0),
    };
    let mut digits: Vec<u8> = mantissa.bytes().filter(u8::is_ascii_digit).map(|b| b - b'0').collect();
    let int_len = mantissa.find('.').unwrap_or(mantissa.len()) as i64;
    // Value is 0.D × 10^{point} with D the digit string.
    let mut point = int_len + exp;
    let lead = digits.iter().take_while(|&&d| d == 0).count();
    digits.drain(..lead);
    point -= lead as i64;
    if digits.is_empty() {
        return "0".into();
    }
    if digits.len() > sig {
        let round_up = digits[sig] >= 5;
        digits.truncate(sig);
        if round_up {
            let mut i = sig;
            loop {
                if i == 0 {
                    digits.insert(0, 1);
                    point += 1;
                    digits.truncate(sig);
                    break;
                }
                i -= 1;
                if digits[i] == 9 {
                    digits[i] = 0;
                } else {
                    digits[i] += 1;
                    break;
                }
            }
        }
    }
    while digits.last() == Some(&0) {
        digits.pop();
    }
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    let text: String = digits.iter().map(|d| char::from(b'0' + d)).collect();
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-point) as usize));
        out.push_str(&text);
    } else if point as usize >= text.len() {
        out.push_str(&text);
        out.extend(std::iter::repeat_n('0', point as usize - text.len()));
    } else {
        out.push_str(&text[..point as usize]);
        out.push('.');
        out.push_str(&text[point as usize..]);
    }
    out
}

/// Significant decimal digits that `bits` binary digits support, minus a
/// safety margin of two.
pub fn decimal_digits(bits: usize) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).floor() as usize - 2
}

/// A real computed at a stated precision.
///
/// Displays and serializes as a fixed-point decimal string with the number of
/// digits the precision supports.
#[derive(Debug, Clone)]
pub struct Real {
    value: BigFloat,
    bits: usize,
}

impl Real {
    pub(crate) fn new(value: BigFloat, bits: usize) -> Self {
        Real { value, bits }
    }

    pub fn from_f64(v: f64, bits: usize) -> Self {
        Real::new(BigFloat::from_f64(v, bits + GUARD_BITS), bits)
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        Real::new(BigFloat::from_i64(v, bits + GUARD_BITS), bits)
    }

    /// Nominal precision in bits.
    pub fn bits(&self) -> usize {
        self.bits
    }

    pub(crate) fn raw(&self) -> &BigFloat {
        &self.value
    }

    pub fn to_f64(&self) -> f64 {
        big_to_f64(&self.value)
    }

    /// Fixed-point decimal string with `sig` significant digits.
    pub fn to_decimal(&self, sig: usize) -> String {
        big_to_decimal(&self.value, sig)
    }

    /// `|self - other|`, evaluated at full working precision.
    pub fn abs_diff(&self, other: &Real) -> f64 {
        let a = Arith::for_bits(self.bits.max(other.bits));
        big_to_f64(&a.sub(&self.value, &other.value).abs())
    }

    pub fn add(&self, other: &Real) -> Real {
        let bits = self.bits.min(other.bits);
        Real::new(Arith::for_bits(bits).add(&self.value, &other.value), bits)
    }

    pub fn sub(&self, other: &Real) -> Real {
        let bits = self.bits.min(other.bits);
        Real::new(Arith::for_bits(bits).sub(&self.value, &other.value), bits)
    }

    pub fn mul(&self, other: &Real) -> Real {
        let bits = self.bits.min(other.bits);
        Real::new(Arith::for_bits(bits).mul(&self.value, &other.value), bits)
    }

    pub fn neg(&self) -> Real {
        Real::new(self.value.neg(), self.bits)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(decimal_digits(self.bits)))
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_conversion() {
        assert_eq!(scientific_to_fixed("2.1972245773e+0", 5), "2.1972");
        assert_eq!(scientific_to_fixed("-1.2299999e-3", 4), "-0.00123");
        assert_eq!(scientific_to_fixed("1.234567e+6", 20), "1234567");
        assert_eq!(scientific_to_fixed("9.9996e+1", 4), "100");
        assert_eq!(scientific_to_fixed("5.0e-1", 3), "0.5");
        assert_eq!(scientific_to_fixed("1.0e+0", 3), "1");
    }

    #[test]
    fn real_round_trip() {
        let a = Arith::for_bits(128);
        let ln9 = Real::new(a.ln_int(9), 128);
        assert!((ln9.to_f64() - 9f64.ln()).abs() < 1e-15);
        assert!(ln9.to_string().starts_with("2.19722457733621938279049047384505"));
        assert_eq!(Real::from_i64(2, 64).to_string(), "2");
        assert_eq!(Real::from_i64(0, 64).to_string(), "0");
    }

    #[test]
    fn precision_digits() {
        assert_eq!(decimal_digits(256), 75);
        assert_eq!(decimal_digits(64), 17);
    }

    #[test]
    fn power_of_two() {
        let a = Arith::for_bits(64);
        let e = a.pow2_neg(10);
        assert_eq!(big_to_f64(&e), 1.0 / 1024.0);
    }
}
