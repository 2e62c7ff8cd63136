//! Randomised checks at lengths beyond the exhaustive test ranges.

use delchan::arith::{binomial, pow2, ratio};
use delchan::moments::{kappa_max, kappa_squared, power_sums, variance_coefficient};
use delchan::{count_embeddings, BitString};
use num_bigint::BigUint;
use proptest::prelude::*;

fn bitstring(len: impl Into<proptest::collection::SizeRange>) -> impl Strategy<Value = BitString> {
    proptest::collection::vec(0u8..=1, len).prop_map(|bits| BitString::from_bits(bits).unwrap())
}

proptest! {
    #[test]
    fn omega_symmetries(x in bitstring(1..8), y in bitstring(0..90)) {
        let w = count_embeddings(&x, &y);
        prop_assert_eq!(&w, &count_embeddings(&x.complement(), &y.complement()));
        prop_assert_eq!(&w, &count_embeddings(&x.reverse(), &y.reverse()));
        prop_assert!(w <= binomial(y.len(), x.len()));
    }

    #[test]
    fn omega_splits_on_the_last_symbol(x in bitstring(1..8), y in bitstring(1..80)) {
        // omega_x(yb) = omega_x(y) + [x_m = b] omega_{x'}(y)
        let (head, last) = y.bits().split_at(y.len() - 1);
        let y0 = BitString::from_bits(head.to_vec()).unwrap();
        let x0 = BitString::from_bits(x.bits()[..x.len() - 1].to_vec()).unwrap();
        let mut want = count_embeddings(&x, &y0);
        if x.bits()[x.len() - 1] == last[0] {
            want += count_embeddings(&x0, &y0);
        }
        prop_assert_eq!(count_embeddings(&x, &y), want);
    }

    #[test]
    fn kappa_symmetry_and_bounds(x in bitstring(1..40)) {
        let m = x.len();
        let k = kappa_squared(&x).unwrap();
        prop_assert_eq!(&k, &kappa_squared(&x.complement()).unwrap());
        prop_assert_eq!(&k, &kappa_squared(&x.reverse()).unwrap());
        prop_assert!(k >= BigUint::from(1u32) << (2 * (m - 1)));
        prop_assert!(k <= kappa_max(m).unwrap());
        prop_assert!(variance_coefficient(&x).is_ok());
    }

    #[test]
    fn tensor_mean_is_closed_form(x in bitstring(1..6), extra in 0usize..80) {
        let n = x.len() + extra;
        let sums = power_sums(&x, n, 2).unwrap();
        prop_assert_eq!(ratio(sums[0].clone(), pow2(n)), ratio(binomial(n, x.len()), pow2(x.len())));
        // Cauchy-Schwarz: (Σω)² <= 2^n Σω²
        prop_assert!(&sums[0] * &sums[0] <= pow2(n) * &sums[1]);
    }
}
