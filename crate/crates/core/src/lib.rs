//! Exact combinatorics for the posterior entropy of the binary deletion channel.
//!
//! A pattern `x` of length `m` is observed at the output of a channel that
//! deleted `n - m` symbols from an unknown text `y` of length `n`. Every text
//! is weighted by the number of ways it embeds `x` as a subsequence, and the
//! normalized weights form the posterior over candidate texts.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`] and [`bits`]: big-integer helpers, the binomial cache, and
//!   [`BitString`].
//! * [`embedding`]: embedding counts, the uncertainty set, and the posterior
//!   weight distribution.
//! * [`distribution`]: the exact or sampled histogram of the occurrence count
//!   over uniform random texts.
//! * [`moments`]: exact moments by tensor dynamic programming, the
//!   autocorrelation coefficient, asymptotic forms and normality diagnostics.
//! * [`entropy`]: Shannon, collision and min-entropy of the posterior, and the
//!   moment-based entropy estimator with its remainder bound.
//! * [`extremal`]: exhaustive searches over all patterns of a given length.

pub mod arith;
pub mod bits;
pub mod distribution;
pub mod embedding;
pub mod entropy;
mod error;
pub mod extremal;
pub mod moments;

pub use arith::{binomial, ExactInt, ExactRatio};
pub use bits::{BitString, RunDecomposition};
pub use distribution::{HistogramMode, WeightHistogram};
pub use embedding::{count_embeddings, total_masks, Limits, WeightDistribution};
pub use entropy::{EntropyEstimate, EntropyMode, EntropyReport};
pub use error::{Error, Result};
pub use extremal::{Criterion, ExtremalResult, ExtremalValue, Finding, OrderingTable};
pub use moments::{GaussianDiagnostics, KappaDecomposition, Moment, MomentSet, Provenance};
