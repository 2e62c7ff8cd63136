//! Subsequence embedding counts and the posterior over candidate texts.
//!
//! `omega(x, y)` is the number of index sets that select `x` out of `y`. For a
//! fixed pattern `x` of length `m`, every text `y` of length `n` with
//! `omega > 0` is a candidate input of the deletion channel, and the posterior
//! probability of `y` is `omega(x, y) / mu(n, m)` with
//! `mu(n, m) = C(n, m) 2^(n - m)`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{binomial, pow2, ratio};
use crate::bits::BitString;
use crate::error::{Error, Result};

/// Largest text length the enumeration kernel can ever accept. Every prefix
/// count is bounded by `C(62, 31) < 2^63`, so `u64` stays exact.
pub const HARD_MAX_TEXT_LEN: usize = 62;

/// Default ceiling on `n` for anything that walks all `2^n` texts.
pub const DEFAULT_MAX_TEXT_LEN: usize = 30;

/// The text space is split on this many leading bits for parallel walks.
/// Fixed, so results never depend on the worker count.
const PREFIX_BITS: usize = 10;

/// Enumeration guard.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    max_text_len: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_text_len: DEFAULT_MAX_TEXT_LEN,
        }
    }
}

impl Limits {
    pub fn new(max_text_len: usize) -> Result<Self> {
        if max_text_len > HARD_MAX_TEXT_LEN {
            return Err(Error::Invalid(format!(
                "enumeration limit {max_text_len} exceeds the hard maximum {HARD_MAX_TEXT_LEN}"
            )));
        }
        Ok(Self { max_text_len })
    }

    pub fn max_text_len(&self) -> usize {
        self.max_text_len
    }

    pub(crate) fn check(&self, x: &BitString, n: usize) -> Result<()> {
        x.require_nonempty()?;
        if x.len() > n {
            return Err(Error::PatternTooLong { m: x.len(), n });
        }
        if n > self.max_text_len {
            return Err(Error::Capacity {
                n,
                limit: self.max_text_len,
            });
        }
        Ok(())
    }
}

/// Number of embeddings of `x` in `y`, by the prefix recurrence
/// `count_i += [x_i = b] count_{i-1}` applied for each symbol `b` of `y`.
pub fn count_embeddings(x: &BitString, y: &BitString) -> BigUint {
    let xb = x.bits();
    let m = xb.len();
    if m > y.len() {
        return BigUint::zero();
    }
    // every prefix count is at most C(|y|, m) <= C(62, 31) < 2^64
    if y.len() <= HARD_MAX_TEXT_LEN {
        return count_embeddings_u64(xb, y.bits().iter().copied()).into();
    }
    let mut counts = vec![BigUint::zero(); m + 1];
    counts[0] = BigUint::one();
    for &b in y.bits() {
        for i in (1..=m).rev() {
            if xb[i - 1] == b {
                let prev = counts[i - 1].clone();
                counts[i] += prev;
            }
        }
    }
    counts.pop().expect("m + 1 >= 1 entries")
}

/// `u64` variant for texts short enough that `C(|y|, |x|)` fits.
pub(crate) fn count_embeddings_u64(x: &[u8], y: impl IntoIterator<Item = u8>) -> u64 {
    let m = x.len();
    let mut counts = vec![0u64; m + 1];
    counts[0] = 1;
    for b in y {
        for i in (1..=m).rev() {
            if x[i - 1] == b {
                counts[i] += counts[i - 1];
            }
        }
    }
    counts[m]
}

/// `mu(n, m) = C(n, m) 2^(n - m)`, the number of (text, mask) pairs.
pub fn total_masks(n: usize, m: usize) -> Result<BigUint> {
    if m == 0 {
        return Err(Error::EmptyPattern);
    }
    if m > n {
        return Err(Error::PatternTooLong { m, n });
    }
    Ok(binomial(n, m) * pow2(n - m))
}

/// Walks every text of length `n` and folds `(code, omega)` pairs into
/// per-partition accumulators.
///
/// The text space is partitioned by a fixed number of leading bits and the
/// partitions are returned in lexicographic order, so merging them in order
/// reproduces the serial result exactly. Within a partition the walk is a
/// depth-first traversal of the text tree that carries the prefix-count
/// vector, costing O(m) per tree node.
pub(crate) fn fold_texts<A, I, F>(x: &[u8], n: usize, init: I, visit: F) -> Vec<A>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64, u64) + Sync + Send,
{
    let m = x.len();
    let width = m + 1;
    let split = n.min(PREFIX_BITS);
    let rest = n - split;
    (0..1u64 << split)
        .into_par_iter()
        .map(|prefix| {
            let mut acc = init();
            let mut stack = vec![0u64; (rest + 1) * width];
            stack[0] = 1;
            for t in 0..split {
                let b = ((prefix >> (split - 1 - t)) & 1) as u8;
                for i in (1..=m).rev() {
                    if x[i - 1] == b {
                        stack[i] += stack[i - 1];
                    }
                }
            }
            walk(x, &mut stack, 0, rest, prefix << rest, &mut acc, &visit);
            acc
        })
        .collect()
}

fn walk<A, F>(
    x: &[u8],
    stack: &mut [u64],
    depth: usize,
    rest: usize,
    code: u64,
    acc: &mut A,
    visit: &F,
) where
    F: Fn(&mut A, u64, u64),
{
    let m = x.len();
    let width = m + 1;
    if depth == rest {
        visit(acc, code, stack[depth * width + m]);
        return;
    }
    if depth + 1 == rest {
        let cur = &stack[depth * width..];
        let last = x[m - 1];
        let lo = cur[m] + if last == 0 { cur[m - 1] } else { 0 };
        let hi = cur[m] + if last == 1 { cur[m - 1] } else { 0 };
        visit(acc, code, lo);
        visit(acc, code | 1, hi);
        return;
    }
    for b in 0..2u8 {
        {
            let (lo, hi) = stack.split_at_mut((depth + 1) * width);
            let cur = &lo[depth * width..];
            let next = &mut hi[..width];
            next[0] = 1;
            for i in 1..=m {
                next[i] = cur[i] + if x[i - 1] == b { cur[i - 1] } else { 0 };
            }
        }
        let bit = (b as u64) << (rest - 1 - depth);
        walk(x, stack, depth + 1, rest, code | bit, acc, visit);
    }
}

/// Lazily enumerates the uncertainty set: every text of length `n` with at
/// least one embedding of `x`, in lexicographic order, with its weight.
///
/// Subtrees whose prefix cannot be completed into a supersequence of `x` are
/// skipped without visiting their leaves.
pub fn uncertainty_set(x: &BitString, n: usize, limits: &Limits) -> Result<UncertaintySet> {
    limits.check(x, n)?;
    let m = x.len();
    let mut counts = vec![0u64; (n + 1) * (m + 1)];
    counts[0] = 1;
    Ok(UncertaintySet {
        pattern: x.bits().to_vec(),
        n,
        counts,
        text: vec![0; n],
        choice: vec![0; n],
        depth: 0,
        done: false,
    })
}

/// Iterator returned by [`uncertainty_set`].
#[derive(Debug)]
pub struct UncertaintySet {
    pattern: Vec<u8>,
    n: usize,
    counts: Vec<u64>,
    text: Vec<u8>,
    choice: Vec<u8>,
    depth: usize,
    done: bool,
}

impl UncertaintySet {
    fn viable(&self, depth: usize) -> bool {
        let m = self.pattern.len();
        let row = &self.counts[depth * (m + 1)..(depth + 1) * (m + 1)];
        // longest prefix of x already embedded
        let matched = row.iter().rposition(|&c| c > 0).unwrap_or(0);
        matched + (self.n - depth) >= m
    }
}

impl Iterator for UncertaintySet {
    type Item = (BitString, u64);

    fn next(&mut self) -> Option<Self::Item> {
        let m = self.pattern.len();
        let width = m + 1;
        while !self.done {
            let d = self.depth;
            if d == self.n {
                let omega = self.counts[d * width + m];
                self.depth -= 1;
                if omega > 0 {
                    let y = BitString::from_bits(self.text.clone()).expect("0/1 symbols");
                    return Some((y, omega));
                }
                continue;
            }
            let b = self.choice[d];
            if b == 2 {
                self.choice[d] = 0;
                if d == 0 {
                    self.done = true;
                } else {
                    self.depth -= 1;
                }
                continue;
            }
            self.choice[d] += 1;
            self.text[d] = b;
            {
                let (lo, hi) = self.counts.split_at_mut((d + 1) * width);
                let cur = &lo[d * width..];
                let next = &mut hi[..width];
                next[0] = 1;
                for i in 1..=m {
                    next[i] = cur[i]
                        + if self.pattern[i - 1] == b {
                            cur[i - 1]
                        } else {
                            0
                        };
                }
            }
            if self.viable(d + 1) {
                self.depth = d + 1;
            }
        }
        None
    }
}

/// Posterior weights over the uncertainty set of `x` at text length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightDistribution {
    pattern: BitString,
    text_length: usize,
    // (text code, omega), omega >= 1, ascending code
    entries: Vec<(u64, u64)>,
    normalizer: BigUint,
}

impl WeightDistribution {
    pub fn pattern(&self) -> &BitString {
        &self.pattern
    }

    pub fn text_length(&self) -> usize {
        self.text_length
    }

    /// `mu(n, m)`; equals the sum of all stored weights.
    pub fn normalizer(&self) -> &BigUint {
        &self.normalizer
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(text, omega)` pairs in lexicographic order of text.
    pub fn iter(&self) -> impl Iterator<Item = (BitString, u64)> + '_ {
        self.entries
            .iter()
            .map(|&(code, w)| (BitString::from_code(code, self.text_length), w))
    }

    pub fn weights(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(_, w)| w)
    }

    pub fn weight_sum(&self) -> BigUint {
        self.weights().map(BigUint::from).sum()
    }

    pub fn max_weight(&self) -> u64 {
        self.weights().max().unwrap_or(0)
    }

    /// Exact posterior probabilities, aligned with [`Self::iter`].
    pub fn probabilities(&self) -> Vec<BigRational> {
        self.weights()
            .map(|w| ratio(BigUint::from(w), self.normalizer.clone()))
            .collect()
    }
}

/// Exact posterior `P(Y = y | X = x) = omega(x, y) / mu(n, m)`.
///
/// Collected by the parallel kernel; identical to draining
/// [`uncertainty_set`].
pub fn posterior(x: &BitString, n: usize, limits: &Limits) -> Result<WeightDistribution> {
    limits.check(x, n)?;
    let parts = fold_texts(
        x.bits(),
        n,
        Vec::new,
        |acc: &mut Vec<(u64, u64)>, code, w| {
            if w > 0 {
                acc.push((code, w));
            }
        },
    );
    Ok(WeightDistribution {
        pattern: x.clone(),
        text_length: n,
        entries: parts.into_iter().flatten().collect(),
        normalizer: total_masks(n, x.len())?,
    })
}
