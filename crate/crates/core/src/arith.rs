//! Exact integer and rational arithmetic shared by the counting modules.

use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision nonnegative integer. Counts never round.
pub type ExactInt = BigUint;

/// Exact rational in lowest terms with a positive denominator.
///
/// Signed, since central moments of odd order can be negative.
pub type ExactRatio = BigRational;

static PASCAL: OnceLock<RwLock<Vec<Vec<BigUint>>>> = OnceLock::new();

fn pascal() -> &'static RwLock<Vec<Vec<BigUint>>> {
    PASCAL.get_or_init(|| RwLock::new(vec![vec![BigUint::one()]]))
}

/// `C(n, k)`, or zero when `k > n`.
///
/// Rows of Pascal's triangle are cached and grown on demand; concurrent
/// callers either read the shared table or extend it to the same values.
pub fn binomial(n: usize, k: usize) -> ExactInt {
    if k > n {
        return BigUint::zero();
    }
    {
        let rows = pascal().read().unwrap_or_else(|e| e.into_inner());
        if let Some(row) = rows.get(n) {
            return row[k].clone();
        }
    }
    let mut rows = pascal().write().unwrap_or_else(|e| e.into_inner());
    while rows.len() <= n {
        let prev = rows.last().expect("row 0 is always present");
        let mut next = Vec::with_capacity(prev.len() + 1);
        next.push(BigUint::one());
        for w in prev.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(BigUint::one());
        rows.push(next);
    }
    rows[n][k].clone()
}

/// `C(n, k)` as a `u128`, `None` on overflow.
pub fn binomial_u128(n: usize, k: usize) -> Option<u128> {
    binomial(n, k).to_u128()
}

pub fn pow2(e: usize) -> ExactInt {
    BigUint::one() << e
}

/// Base-2 logarithm of a positive big integer, accurate to f64 precision
/// regardless of magnitude.
pub fn log2_big(v: &BigUint) -> f64 {
    debug_assert!(!v.is_zero());
    let bits = v.bits();
    if bits <= 1000 {
        v.to_f64().unwrap_or(f64::INFINITY).log2()
    } else {
        let shift = bits - 64;
        let top = (v >> shift).to_f64().unwrap_or(f64::INFINITY);
        top.log2() + shift as f64
    }
}

/// Nearest-f64 value of an exact rational. Values whose numerator or
/// denominator exceed the f64 range are scaled before dividing.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let Some(v) = r.to_f64() {
        if v.is_finite() && v != 0.0 {
            return v;
        }
    }
    let num = r.numer().abs().to_biguint().expect("abs is nonnegative");
    let den = r.denom().to_biguint().expect("denominator is positive");
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * (log2_big(&num) - log2_big(&den)).exp2()
}

pub fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn ratio_from_int(v: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(8, 5), BigUint::from(56u32));
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(3, 4), BigUint::zero());
    }

    #[test]
    fn pascal_oracle_nine_five() {
        // independent Pascal rows built with u64
        let mut row = vec![1u64];
        for _ in 0..9 {
            let mut next = vec![1u64];
            next.extend(row.windows(2).map(|w| w[0] + w[1]));
            next.push(1);
            row = next;
        }
        assert_eq!(row[5], 126);
        assert_eq!(binomial(9, 5), BigUint::from(126u32));
    }

    #[test]
    fn pascal_recurrence_exhaustive() {
        for n in 1..=64 {
            for k in 1..=n {
                assert_eq!(
                    binomial(n, k),
                    binomial(n - 1, k - 1) + binomial(n - 1, k),
                    "C({n},{k})"
                );
            }
        }
    }

    #[test]
    fn concurrent_fill_is_consistent() {
        let handles: Vec<_> = (0..8)
            .map(|t| std::thread::spawn(move || binomial(200 + t, 100)))
            .collect();
        for (t, h) in handles.into_iter().enumerate() {
            let v = h.join().unwrap();
            assert_eq!(v, binomial(200 + t, 100));
        }
    }

    #[test]
    fn log2_of_huge_values() {
        let v = pow2(5000) * BigUint::from(3u32);
        assert!((log2_big(&v) - (5000.0 + 3f64.log2())).abs() < 1e-9);
        assert_eq!(log2_big(&BigUint::from(1024u32)), 10.0);
    }

    #[test]
    fn ratio_conversion_large_terms() {
        let r = ratio(pow2(3000) * BigUint::from(3u32), pow2(3001));
        assert!((ratio_to_f64(&r) - 1.5).abs() < 1e-12);
        let neg = BigRational::new(BigInt::from(-7), BigInt::from(4));
        assert_eq!(ratio_to_f64(&neg), -1.75);
    }
}
