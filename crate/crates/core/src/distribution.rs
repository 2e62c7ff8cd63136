//! Distribution of the occurrence count `Omega_n` of a pattern in a uniform
//! random text of length `n`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::ratio;
use crate::bits::BitString;
use crate::embedding::{count_embeddings_u64, fold_texts, Limits, HARD_MAX_TEXT_LEN};
use crate::error::{Error, Result};
use crate::moments::{central_from_raw, MomentSet, Provenance};

/// Draws per reproducible stream. Chunk `c` of a sampling run uses
/// `ChaCha8Rng::seed_from_u64(seed)` switched to stream `c`, so the result
/// depends only on `(seed, sample_size)`.
pub const SAMPLE_CHUNK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HistogramMode {
    /// All `2^n` texts enumerated.
    Exact,
    Sampled {
        sample_size: u64,
        seed: u64,
    },
}

/// Map from occurrence count to its multiplicity, zero class included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightHistogram {
    pattern: BitString,
    text_length: usize,
    counts: BTreeMap<u64, u64>,
    mode: HistogramMode,
}

impl WeightHistogram {
    pub fn pattern(&self) -> &BitString {
        &self.pattern
    }

    pub fn text_length(&self) -> usize {
        self.text_length
    }

    pub fn mode(&self) -> HistogramMode {
        self.mode
    }

    /// `(omega, multiplicity)` in increasing `omega`; absent values have
    /// multiplicity zero.
    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `Σ omega * multiplicity`.
    pub fn weighted_sum(&self) -> BigUint {
        self.power_sum(1)
    }

    /// `Σ omega^k * multiplicity`, exactly.
    pub fn power_sum(&self, k: u32) -> BigUint {
        self.counts
            .iter()
            .map(|(&w, &c)| BigUint::from(w).pow(k) * BigUint::from(c))
            .sum()
    }

    pub fn max_omega(&self) -> u64 {
        self.counts
            .iter()
            .rev()
            .find(|(_, &c)| c > 0)
            .map_or(0, |(&w, _)| w)
    }
}

/// Exact histogram of `Omega_n` over all `2^n` texts.
pub fn exact_histogram(x: &BitString, n: usize, limits: &Limits) -> Result<WeightHistogram> {
    limits.check(x, n)?;
    let parts = fold_texts(
        x.bits(),
        n,
        HashMap::new,
        |acc: &mut HashMap<u64, u64>, _, w| {
            *acc.entry(w).or_insert(0) += 1;
        },
    );
    let mut counts = BTreeMap::new();
    for part in parts {
        for (w, c) in part {
            *counts.entry(w).or_insert(0) += c;
        }
    }
    Ok(WeightHistogram {
        pattern: x.clone(),
        text_length: n,
        counts,
        mode: HistogramMode::Exact,
    })
}

/// Histogram of `Omega_n` over `sample_size` i.i.d. uniform texts.
///
/// Samples are drawn in chunks of [`SAMPLE_CHUNK`]; chunk `c` uses ChaCha8
/// stream `c` under the given seed, so identical arguments give identical
/// histograms for any number of worker threads.
pub fn sample_histogram(
    x: &BitString,
    n: usize,
    sample_size: u64,
    seed: u64,
) -> Result<WeightHistogram> {
    x.require_nonempty()?;
    if sample_size == 0 {
        return Err(Error::Invalid("sample size must be at least 1".into()));
    }
    if n > HARD_MAX_TEXT_LEN {
        return Err(Error::Capacity {
            n,
            limit: HARD_MAX_TEXT_LEN,
        });
    }
    let chunks = sample_size.div_ceil(SAMPLE_CHUNK);
    let xb = x.bits();
    let parts: Vec<HashMap<u64, u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let draws = SAMPLE_CHUNK.min(sample_size - c * SAMPLE_CHUNK);
            let mut acc = HashMap::new();
            for _ in 0..draws {
                let text: u64 = rng.random();
                let w = count_embeddings_u64(xb, (0..n).map(|i| ((text >> i) & 1) as u8));
                *acc.entry(w).or_insert(0) += 1;
            }
            acc
        })
        .collect();
    let mut counts = BTreeMap::new();
    for part in parts {
        for (w, c) in part {
            *counts.entry(w).or_insert(0) += c;
        }
    }
    Ok(WeightHistogram {
        pattern: x.clone(),
        text_length: n,
        counts,
        mode: HistogramMode::Sampled { sample_size, seed },
    })
}

/// Mean and central moments 2..4 of the histogram's empirical distribution,
/// as exact rationals.
pub fn empirical_moments(h: &WeightHistogram) -> Result<MomentSet> {
    let total = h.total();
    if total == 0 {
        return Err(Error::Invalid("empty histogram".into()));
    }
    let total = BigUint::from(total);
    let raw: Vec<_> = (1..=4)
        .map(|k| ratio(h.power_sum(k), total.clone()))
        .collect();
    Ok(central_from_raw(&raw, Provenance::Empirical))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::binomial;
    use crate::moments::Moment;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn exact(r: &Moment) -> BigRational {
        r.as_exact().cloned().expect("exact moment")
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exact_examples() {
        let lim = Limits::default();
        let h = exact_histogram(&bs("01"), 2, &lim).unwrap();
        assert_eq!(
            h.counts().iter().map(|(&a, &b)| (a, b)).collect::<Vec<_>>(),
            [(0, 3), (1, 1)]
        );
        let h = exact_histogram(&bs("0"), 1, &lim).unwrap();
        assert_eq!(
            h.counts().iter().map(|(&a, &b)| (a, b)).collect::<Vec<_>>(),
            [(0, 1), (1, 1)]
        );
        let h = exact_histogram(&bs("01"), 4, &lim).unwrap();
        assert_eq!(h.total(), 16);
        assert_eq!(h.weighted_sum(), BigUint::from(24u32));
        assert_eq!(h.power_sum(2), BigUint::from(62u32));
    }

    #[test]
    fn exact_histogram_identities() {
        let lim = Limits::default();
        for m in 1..=4 {
            for x in BitString::all(m) {
                for n in m..=12 {
                    let h = exact_histogram(&x, n, &lim).unwrap();
                    assert_eq!(h.total(), 1u64 << n);
                    assert_eq!(h.weighted_sum(), binomial(n, m) << (n - m));
                    assert_eq!(
                        h,
                        exact_histogram(&x.complement(), n, &lim)
                            .unwrap()
                            .relabel(&x)
                    );
                    assert_eq!(
                        h,
                        exact_histogram(&x.reverse(), n, &lim).unwrap().relabel(&x)
                    );
                }
            }
        }
    }

    impl WeightHistogram {
        fn relabel(mut self, x: &BitString) -> Self {
            self.pattern = x.clone();
            self
        }
    }

    #[test]
    fn empirical_moment_examples() {
        let lim = Limits::default();
        let ms = empirical_moments(&exact_histogram(&bs("01"), 4, &lim).unwrap()).unwrap();
        assert_eq!(exact(&ms.mean), q(3, 2));
        assert_eq!(exact(&ms.variance), q(13, 8));

        let point = exact_histogram(&bs("0110"), 4, &lim).unwrap();
        // omega is 0 or 1 here; a one-bin histogram is a true point mass
        let ms = empirical_moments(&WeightHistogram {
            counts: BTreeMap::from([(3, 7)]),
            ..point
        })
        .unwrap();
        assert!(exact(&ms.variance).is_zero());

        for m in 1..=3 {
            for x in BitString::all(m) {
                for n in m..=10 {
                    let ms = empirical_moments(&exact_histogram(&x, n, &lim).unwrap()).unwrap();
                    let expect =
                        BigRational::new(binomial(n, m).into(), (BigUint::from(1u32) << m).into());
                    assert_eq!(exact(&ms.mean), expect);
                }
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = sample_histogram(&bs("0110"), 9, 1, 42).unwrap();
        let b = sample_histogram(&bs("0110"), 9, 1, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total(), 1);
        assert_eq!(a.counts().len(), 1);

        let big = 3 * SAMPLE_CHUNK + 17;
        let a = sample_histogram(&bs("01"), 12, big, 7).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sample_histogram(&bs("01"), 12, big, 7).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.total(), big);
        assert_eq!(
            a.mode(),
            HistogramMode::Sampled {
                sample_size: big,
                seed: 7
            }
        );
    }

    #[test]
    fn different_seeds_smoke() {
        let a = sample_histogram(&bs("01"), 10, 1000, 1).unwrap();
        let b = sample_histogram(&bs("01"), 10, 1000, 2).unwrap();
        if a == b {
            eprintln!("note: seeds 1 and 2 produced identical histograms");
        }
    }

    fn sample_mean_within(x: &str, n: usize, size: u64, seed: u64, k_se: f64) {
        let x = bs(x);
        let lim = Limits::default();
        let exact_ms = empirical_moments(&exact_histogram(&x, n, &lim).unwrap()).unwrap();
        let (mu, var) = (exact_ms.mean.to_f64(), exact_ms.variance.to_f64());
        let h = sample_histogram(&x, n, size, seed).unwrap();
        let mean = empirical_moments(&h).unwrap().mean.to_f64();
        let se = (var / size as f64).sqrt();
        assert!(
            (mean - mu).abs() <= k_se * se,
            "mean {mean} vs {mu} (se {se})"
        );
    }

    #[test]
    fn sample_mean_near_exact_mean() {
        // exact mean C(10,2)/4 = 11.25
        sample_mean_within("01", 10, 100_000, 2024, 3.0);
        sample_mean_within("01", 12, 100_000, 99, 5.0);
    }
}
