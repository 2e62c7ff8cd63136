//! Moments of the occurrence count `Omega_n` and the autocorrelation
//! coefficient `kappa^2`.
//!
//! Exact raw moments come from a tensor dynamic program over text positions:
//! with `c_i(y)` the number of embeddings of the prefix `x[1..i]` in `y`,
//!
//! ```text
//! T_t[i_1, .., i_r] = Σ_{|y| = t} c_{i_1}(y) ... c_{i_r}(y)
//! ```
//!
//! Appending a symbol `b` maps each factor `c_i` to `c_i + [x_i = b] c_{i-1}`,
//! so one step expands into at most `2^r` shifted copies of `T_t` per symbol.
//! `Σ_y Omega^r` is the entry at `(m, .., m)`. Since `c_0 = 1`, lower powers
//! sit at `(m, .., m, 0, .., 0)` of the same tensor.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{binomial, pow2, ratio, ratio_to_f64};
use crate::bits::BitString;
use crate::error::{Error, Result};

pub const MAX_MOMENT_ORDER: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Exact,
    Asymptotic,
    Empirical,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Moment {
    Exact(BigRational),
    Approx(f64),
}

impl Moment {
    pub fn to_f64(&self) -> f64 {
        match self {
            Moment::Exact(r) => ratio_to_f64(r),
            Moment::Approx(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Moment::Exact(r) => Some(r),
            Moment::Approx(_) => None,
        }
    }
}

/// Mean and central moments of orders 2 to 4.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSet {
    pub mean: Moment,
    pub variance: Moment,
    pub central3: Moment,
    pub central4: Moment,
    pub provenance: Provenance,
}

/// Central moments from raw moments `E[X], .., E[X^4]` by exact binomial
/// expansion.
pub(crate) fn central_from_raw(raw: &[BigRational], provenance: Provenance) -> MomentSet {
    let mean = raw[0].clone();
    let neg = -mean.clone();
    let central = |k: usize| -> BigRational {
        // E[(X - E)^k] = Σ_j C(k, j) E[X^j] (-E)^(k-j), with E[X^0] = 1
        (0..=k)
            .map(|j| {
                let rj = if j == 0 {
                    BigRational::one()
                } else {
                    raw[j - 1].clone()
                };
                let c = BigRational::from_integer(BigInt::from(binomial(k, j)));
                c * rj * num_traits::pow(neg.clone(), k - j)
            })
            .sum()
    };
    MomentSet {
        mean: Moment::Exact(mean.clone()),
        variance: Moment::Exact(central(2)),
        central3: Moment::Exact(central(3)),
        central4: Moment::Exact(central(4)),
        provenance,
    }
}

fn check_pattern_and_length(x: &BitString, n: usize) -> Result<()> {
    x.require_nonempty()?;
    if x.len() > n {
        return Err(Error::PatternTooLong { m: x.len(), n });
    }
    Ok(())
}

/// Final tensor `T_n` of order `r`, flattened with stride `(m + 1)^k` for
/// index `k`.
fn moment_tensor(x: &[u8], n: usize, r: usize) -> Vec<BigUint> {
    let m = x.len();
    let side = m + 1;
    let size = side.pow(r as u32);
    let strides: Vec<usize> = (0..r).map(|k| side.pow(k as u32)).collect();
    let mut cur = vec![BigUint::zero(); size];
    cur[0] = BigUint::one();
    let mut next = vec![BigUint::zero(); size];
    let mut digits = vec![0usize; r];
    let mut movable: Vec<usize> = Vec::with_capacity(r);
    for _ in 0..n {
        next.iter_mut().for_each(|v| v.set_zero());
        for (idx, val) in cur.iter().enumerate() {
            if val.is_zero() {
                continue;
            }
            let mut rem = idx;
            for d in digits.iter_mut() {
                *d = rem % side;
                rem /= side;
            }
            for b in 0..2u8 {
                movable.clear();
                movable.extend((0..r).filter(|&k| digits[k] < m && x[digits[k]] == b));
                for subset in 0..1usize << movable.len() {
                    let shift: usize = movable
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| subset >> j & 1 == 1)
                        .map(|(_, &k)| strides[k])
                        .sum();
                    next[idx + shift] += val;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// `Σ_y Omega(y)^j` over all `2^n` texts, for `j = 1..=r`.
pub fn power_sums(x: &BitString, n: usize, r: usize) -> Result<Vec<BigUint>> {
    check_pattern_and_length(x, n)?;
    if !(1..=MAX_MOMENT_ORDER).contains(&r) {
        return Err(Error::MomentOrder(r));
    }
    let m = x.len();
    let side = m + 1;
    let tensor = moment_tensor(x.bits(), n, r);
    Ok((1..=r)
        .map(|j| {
            let idx: usize = (0..j).map(|k| m * side.pow(k as u32)).sum();
            tensor[idx].clone()
        })
        .collect())
}

/// `E[Omega_n^r]` exactly, for `r` in `1..=4`, without enumerating texts.
pub fn exact_moment(x: &BitString, n: usize, r: usize) -> Result<BigRational> {
    let sums = power_sums(x, n, r)?;
    Ok(ratio(sums[r - 1].clone(), pow2(n)))
}

/// Exact mean and central moments 2..4 of `Omega_n`.
pub fn exact_moments(x: &BitString, n: usize) -> Result<MomentSet> {
    let sums = power_sums(x, n, MAX_MOMENT_ORDER)?;
    let raw: Vec<_> = sums.into_iter().map(|s| ratio(s, pow2(n))).collect();
    Ok(central_from_raw(&raw, Provenance::Exact))
}

/// `M[r][s] = C(r+s-2, r-1) C(2m-r-s, m-r)` (0-based here), the number of
/// interleavings of two copies of a length-`m` pattern meeting at position
/// `r` of the first and `s` of the second.
pub fn interleaving_matrix(m: usize) -> Vec<Vec<BigUint>> {
    (1..=m)
        .map(|r| {
            (1..=m)
                .map(|s| binomial(r + s - 2, r - 1) * binomial(2 * m - r - s, m - r))
                .collect()
        })
        .collect()
}

/// The matrices behind `kappa^2(x)`: the match mask `B`, the interleaving
/// counts `M`, and their elementwise product `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaDecomposition {
    pub m: usize,
    pub mask: Vec<Vec<u8>>,
    pub interleavings: Vec<Vec<BigUint>>,
    pub masked: Vec<Vec<BigUint>>,
    pub kappa_squared: BigUint,
}

pub fn kappa_decomposition(x: &BitString) -> Result<KappaDecomposition> {
    x.require_nonempty()?;
    let m = x.len();
    let xb = x.bits();
    let mask: Vec<Vec<u8>> = (0..m)
        .map(|r| (0..m).map(|s| (xb[r] == xb[s]) as u8).collect())
        .collect();
    let interleavings = interleaving_matrix(m);
    let masked: Vec<Vec<BigUint>> = interleavings
        .iter()
        .zip(&mask)
        .map(|(mrow, brow)| {
            mrow.iter()
                .zip(brow)
                .map(|(v, &b)| if b == 1 { v.clone() } else { BigUint::zero() })
                .collect()
        })
        .collect();
    let kappa_squared = masked.iter().flatten().sum();
    Ok(KappaDecomposition {
        m,
        mask,
        interleavings,
        masked,
        kappa_squared,
    })
}

/// `kappa^2(x) = Σ_{r,s} C(r+s-2, r-1) C(2m-r-s, m-r) [x_r = x_s]`.
pub fn kappa_squared(x: &BitString) -> Result<BigUint> {
    x.require_nonempty()?;
    let m = x.len();
    let xb = x.bits();
    let mut total = BigUint::zero();
    for r in 1..=m {
        for s in 1..=m {
            if xb[r - 1] == xb[s - 1] {
                total += binomial(r + s - 2, r - 1) * binomial(2 * m - r - s, m - r);
            }
        }
    }
    Ok(total)
}

/// Closed form `m C(2m-1, m)` of `kappa^2` at the constant patterns.
pub fn kappa_max(m: usize) -> Result<BigUint> {
    if m == 0 {
        return Err(Error::EmptyPattern);
    }
    Ok(BigUint::from(m) * binomial(2 * m - 1, m))
}

/// Leading constant of `V[Omega_n] (2m-1)! 4^m / n^(2m-1)` for uniform
/// binary texts: `Σ_{r,s} M[r][s] (2[x_r = x_s] - 1) = 2 kappa^2(x) - kappa_max(m)`.
///
/// Agrees with `kappa^2` only for constant patterns.
pub fn variance_coefficient(x: &BitString) -> Result<BigUint> {
    let twice: BigUint = kappa_squared(x)? << 1usize;
    let max = kappa_max(x.len())?;
    twice
        .checked_sub(&max)
        .ok_or_else(|| Error::Verification(format!("negative variance coefficient for {x}")))
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// Leading term `2^-m n^m / m!` of `E[Omega_n]`.
pub fn asymptotic_mean(n: usize, m: usize) -> f64 {
    (m as f64 * ((n as f64).ln() - std::f64::consts::LN_2) - ln_factorial(m)).exp()
}

/// Leading term `2^-2m kappa n^(2m-1) / (2m-1)!` of `V[Omega_n]`, with
/// `kappa` the coefficient supplied by the caller.
pub fn asymptotic_variance(n: usize, m: usize, kappa: &BigUint) -> f64 {
    let k = kappa.to_f64().unwrap_or(f64::INFINITY);
    if k == 0.0 {
        return 0.0;
    }
    let two_m = 2 * m;
    (k.ln() - two_m as f64 * std::f64::consts::LN_2 + (two_m - 1) as f64 * (n as f64).ln()
        - ln_factorial(two_m - 1))
    .exp()
}

/// Which coefficient multiplies the asymptotic variance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VarianceForm {
    /// `kappa^2(x)` itself.
    #[default]
    Kappa,
    /// [`variance_coefficient`], the true leading constant.
    Corrected,
}

/// Asymptotic moment set: leading-term mean and variance, with the
/// Gaussian limits `mu_3 = 0` and `mu_4 = 3 V^2` for the higher moments.
pub fn asymptotic_moments(x: &BitString, n: usize, form: VarianceForm) -> Result<MomentSet> {
    check_pattern_and_length(x, n)?;
    let m = x.len();
    let coeff = match form {
        VarianceForm::Kappa => kappa_squared(x)?,
        VarianceForm::Corrected => variance_coefficient(x)?,
    };
    let var = asymptotic_variance(n, m, &coeff);
    Ok(MomentSet {
        mean: Moment::Approx(asymptotic_mean(n, m)),
        variance: Moment::Approx(var),
        central3: Moment::Approx(0.0),
        central4: Moment::Approx(3.0 * var * var),
        provenance: Provenance::Asymptotic,
    })
}

/// Skewness and excess kurtosis of `Omega_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianDiagnostics {
    pub n: usize,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub fn gaussian_diagnostics(moments: &MomentSet, n: usize) -> Result<GaussianDiagnostics> {
    match (&moments.variance, &moments.central3, &moments.central4) {
        (Moment::Exact(v), Moment::Exact(m3), Moment::Exact(m4)) => {
            if !v.is_positive() {
                return Err(Error::DegenerateVariance);
            }
            let skew_sq = ratio_to_f64(&(m3 * m3 / (v * v * v)));
            let skewness = if m3.is_negative() {
                -skew_sq.sqrt()
            } else {
                skew_sq.sqrt()
            };
            let kurt = m4 / (v * v) - BigRational::from_integer(3.into());
            Ok(GaussianDiagnostics {
                n,
                skewness,
                excess_kurtosis: ratio_to_f64(&kurt),
            })
        }
        _ => {
            let v = moments.variance.to_f64();
            if v <= 0.0 {
                return Err(Error::DegenerateVariance);
            }
            Ok(GaussianDiagnostics {
                n,
                skewness: moments.central3.to_f64() / v.powf(1.5),
                excess_kurtosis: moments.central4.to_f64() / (v * v) - 3.0,
            })
        }
    }
}

/// Diagnostics of `Omega_n` from the exact tensor moments.
pub fn exact_gaussian_diagnostics(x: &BitString, n: usize) -> Result<GaussianDiagnostics> {
    gaussian_diagnostics(&exact_moments(x, n)?, n)
}
