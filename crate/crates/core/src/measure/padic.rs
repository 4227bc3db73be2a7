use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::MeasureError;
use crate::rational::ExactRational;

/// Deterministic Miller–Rabin; these bases are exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for a in BASES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn int_valuation(x: &BigInt, p: &BigInt) -> i64 {
    let mut v = 0;
    let mut x = x.clone();
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// `v_p(x) = v_p(numerator) - v_p(denominator)`.
pub fn vp(x: &ExactRational, p: u64) -> Result<i64, MeasureError> {
    if !is_prime(p) {
        return Err(MeasureError::NotPrime(p));
    }
    if x.is_zero() {
        return Err(MeasureError::ZeroValuation);
    }
    let p = BigInt::from(p);
    Ok(int_valuation(x.numer(), &p) - int_valuation(x.denom(), &p))
}

/// `|x|_p = p^{-v_p(x)}`.
pub fn padic_abs(x: &ExactRational, p: u64) -> Result<ExactRational, MeasureError> {
    let v = vp(x, p)?;
    let base = ExactRational::from_integer(p);
    Ok(if v >= 0 {
        base.pow(i32::try_from(v).expect("valuation fits i32")).recip()
    } else {
        base.pow(i32::try_from(-v).expect("valuation fits i32"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn factorizations() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(27), vec![(3, 3)]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(97), vec![(97, 1)]);
    }

    #[test]
    fn valuations() {
        let x = ExactRational::new(8, 9);
        assert_eq!(vp(&x, 2).unwrap(), 3);
        assert_eq!(vp(&x, 3).unwrap(), -2);
        assert_eq!(vp(&ExactRational::one(), 5).unwrap(), 0);
        assert_eq!(vp(&ExactRational::zero(), 5), Err(MeasureError::ZeroValuation));
        assert_eq!(vp(&x, 4), Err(MeasureError::NotPrime(4)));
        assert_eq!(padic_abs(&x, 3).unwrap(), ExactRational::from_integer(9));
        assert_eq!(padic_abs(&x, 2).unwrap(), ExactRational::new(1, 8));
        assert_eq!(vp(&ExactRational::new(-12, 5), 2).unwrap(), 2);
    }
}
