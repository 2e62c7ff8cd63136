//! Exhaustive searches over all `2^m` patterns of a given length.
//!
//! Statements that are proven (the constant patterns maximise `kappa^2`) are
//! asserted and a failure is an [`Error::Verification`]. Open claims (the
//! alternating patterns minimise `kappa^2`, `kappa^2` orders the entropy at
//! finite `n`, constant patterns minimise the entropy at a given `n`) are
//! only observed; deviations come back as [`Finding`]s.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::embedding::Limits;
use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::moments::{interleaving_matrix, kappa_max, kappa_squared};

/// Largest pattern length for exhaustive `kappa^2` searches.
pub const MAX_SEARCH_LEN: usize = 20;

/// Largest pattern length for ordering tables.
pub const MAX_TABLE_LEN: usize = 16;

/// Relative tolerance for comparing entropies computed in floating point.
pub const ENTROPY_REL_TOL: f64 = 1e-9;

/// Ordering violations listed individually; the total is always reported.
pub const MAX_LISTED_VIOLATIONS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    KappaMax,
    KappaMin,
    EntropyMin,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::KappaMax => "kappa-max",
            Criterion::KappaMin => "kappa-min",
            Criterion::EntropyMin => "entropy-min",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExtremalValue {
    Count(BigUint),
    Bits(f64),
}

/// A deviation from an open claim, surfaced rather than asserted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub kind: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalResult {
    pub m: usize,
    /// Text length, for entropy criteria.
    pub n: Option<usize>,
    pub criterion: Criterion,
    /// Every pattern attaining the extremum, in lexicographic order.
    pub witnesses: Vec<BitString>,
    pub value: ExtremalValue,
    pub findings: Vec<Finding>,
}

fn entropy_tol(a: f64, b: f64) -> f64 {
    ENTROPY_REL_TOL * a.abs().max(b.abs()).max(1.0)
}

fn entropies_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= entropy_tol(a, b)
}

fn check_search_len(m: usize, max: usize) -> Result<()> {
    if m == 0 || m > max {
        return Err(Error::SearchRange { m, max });
    }
    Ok(())
}

/// `kappa^2` for every pattern of length `m`, indexed by pattern code.
pub fn kappa_table(m: usize) -> Result<Vec<u128>> {
    check_search_len(m, MAX_SEARCH_LEN)?;
    let mat: Vec<Vec<u128>> = interleaving_matrix(m)
        .into_iter()
        .map(|row| {
            row.iter()
                .map(|v| v.to_u128().expect("m <= 20 fits u128"))
                .collect()
        })
        .collect();
    let diag: u128 = (0..m).map(|r| mat[r][r]).sum();
    // off-diagonal pairs r < s, weighted twice by symmetry; bit r of the
    // code is position m - r (from the right)
    let pairs: Vec<(u32, u32, u128)> = (0..m)
        .flat_map(|r| (r + 1..m).map(move |s| (r, s)))
        .map(|(r, s)| ((m - 1 - r) as u32, (m - 1 - s) as u32, 2 * mat[r][s]))
        .collect();
    Ok((0..1u64 << m)
        .into_par_iter()
        .map(|code| {
            diag + pairs
                .iter()
                .filter(|&&(br, bs, _)| (code >> br) & 1 == (code >> bs) & 1)
                .map(|&(_, _, w)| w)
                .sum::<u128>()
        })
        .collect())
}

fn extreme_witnesses(table: &[u128], m: usize, pick_max: bool) -> (u128, Vec<BitString>) {
    let best = if pick_max {
        *table.iter().max().expect("nonempty")
    } else {
        *table.iter().min().expect("nonempty")
    };
    let witnesses = table
        .iter()
        .enumerate()
        .filter(|(_, &k)| k == best)
        .map(|(c, _)| BitString::from_code(c as u64, m))
        .collect();
    (best, witnesses)
}

fn fmt_set(words: &[BitString]) -> String {
    let items: Vec<String> = words.iter().map(|w| w.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// Exhaustively confirms that `kappa^2` peaks at `m C(2m-1, m)`, attained by
/// the two constant patterns and nothing else.
pub fn verify_kappa_max(m: usize) -> Result<ExtremalResult> {
    let table = kappa_table(m)?;
    let (best, witnesses) = extreme_witnesses(&table, m, true);
    let closed = kappa_max(m)?;
    if BigUint::from(best) != closed {
        return Err(Error::Verification(format!(
            "max kappa^2 over length {m} is {best}, closed form gives {closed}"
        )));
    }
    let expected = vec![BitString::zeros(m), BitString::ones(m)];
    if witnesses != expected {
        return Err(Error::Verification(format!(
            "kappa^2 maximisers of length {m} are {}, expected {}",
            fmt_set(&witnesses),
            fmt_set(&expected)
        )));
    }
    Ok(ExtremalResult {
        m,
        n: None,
        criterion: Criterion::KappaMax,
        witnesses,
        value: ExtremalValue::Count(closed),
        findings: Vec::new(),
    })
}

/// Exhaustive minimisers of `kappa^2`. A minimiser set other than the two
/// alternating patterns is reported as a finding.
pub fn search_kappa_min(m: usize) -> Result<ExtremalResult> {
    let table = kappa_table(m)?;
    let (best, witnesses) = extreme_witnesses(&table, m, false);
    let mut expected = vec![BitString::alternating(m, 0), BitString::alternating(m, 1)];
    expected.dedup();
    let mut findings = Vec::new();
    if m >= 2 && witnesses != expected {
        findings.push(Finding {
            kind: "kappa-min-not-alternating",
            detail: format!(
                "length {m}: minimisers {} with kappa^2 = {best}, alternating patterns give {}",
                fmt_set(&witnesses),
                table[expected[0].to_code() as usize]
            ),
        });
    }
    Ok(ExtremalResult {
        m,
        n: None,
        criterion: Criterion::KappaMin,
        witnesses,
        value: ExtremalValue::Count(BigUint::from(best)),
        findings,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderingRow {
    pub pattern: BitString,
    pub kappa_squared: BigUint,
    pub shannon_bits: f64,
}

/// All patterns of length `m` with `kappa^2` and exact entropy at text
/// length `n`, sorted by `kappa^2` descending and then lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderingTable {
    pub n: usize,
    pub m: usize,
    pub rows: Vec<OrderingRow>,
    /// Pairs `(a, b)` with `kappa^2(a) > kappa^2(b)` but `H(a) >= H(b)`.
    /// At most [`MAX_LISTED_VIOLATIONS`] are listed.
    pub violations: Vec<(BitString, BitString)>,
    pub violation_count: u64,
    /// Equal-`kappa^2` classes whose entropies differ: `(kappa^2, lowest-H
    /// pattern, highest-H pattern)`.
    pub tie_mismatches: Vec<(BigUint, BitString, BitString)>,
}

impl OrderingTable {
    pub fn findings(&self) -> Vec<Finding> {
        let mut out = Vec::new();
        if self.violation_count > 0 {
            let listed: Vec<String> = self
                .violations
                .iter()
                .map(|(a, b)| format!("{a}>{b}"))
                .collect();
            out.push(Finding {
                kind: "ordering-violation",
                detail: format!(
                    "n={} m={}: {} strict kappa^2 pairs without the reverse entropy order: {}",
                    self.n,
                    self.m,
                    self.violation_count,
                    listed.join(" ")
                ),
            });
        }
        for (k, lo, hi) in &self.tie_mismatches {
            out.push(Finding {
                kind: "tie-mismatch",
                detail: format!(
                    "n={} m={}: kappa^2={k} class spans H({lo}) < H({hi})",
                    self.n, self.m
                ),
            });
        }
        out
    }
}

pub fn ordering_table(n: usize, m: usize, limits: &Limits) -> Result<OrderingTable> {
    check_search_len(m, MAX_TABLE_LEN)?;
    limits.check(&BitString::zeros(m), n)?;
    let mut rows = BitString::all(m)
        .map(|x| {
            Ok(OrderingRow {
                kappa_squared: kappa_squared(&x)?,
                shannon_bits: shannon_entropy(&x, n, limits)?,
                pattern: x,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        b.kappa_squared
            .cmp(&a.kappa_squared)
            .then_with(|| a.pattern.cmp(&b.pattern))
    });

    // consecutive equal-kappa groups, in descending kappa
    let mut groups: Vec<&[OrderingRow]> = Vec::new();
    let mut start = 0;
    for i in 1..=rows.len() {
        if i == rows.len() || rows[i].kappa_squared != rows[start].kappa_squared {
            groups.push(&rows[start..i]);
            start = i;
        }
    }

    let mut tie_mismatches = Vec::new();
    let spans: Vec<(f64, f64)> = groups
        .iter()
        .map(|g| {
            // first (lexicographic) row attaining each extreme
            let mut lo = &g[0];
            let mut hi = &g[0];
            for r in &g[1..] {
                if r.shannon_bits < lo.shannon_bits {
                    lo = r;
                }
                if r.shannon_bits > hi.shannon_bits {
                    hi = r;
                }
            }
            if !entropies_equal(lo.shannon_bits, hi.shannon_bits) {
                tie_mismatches.push((
                    g[0].kappa_squared.clone(),
                    lo.pattern.clone(),
                    hi.pattern.clone(),
                ));
            }
            (lo.shannon_bits, hi.shannon_bits)
        })
        .collect();

    let violates = |a: f64, b: f64| a >= b - entropy_tol(a, b);
    let mut violations = Vec::new();
    let mut violation_count = 0u64;
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            if !violates(spans[i].1, spans[j].0) {
                continue;
            }
            for a in groups[i] {
                for b in groups[j] {
                    if violates(a.shannon_bits, b.shannon_bits) {
                        violation_count += 1;
                        if violations.len() < MAX_LISTED_VIOLATIONS {
                            violations.push((a.pattern.clone(), b.pattern.clone()));
                        }
                    }
                }
            }
        }
    }

    let table = OrderingTable {
        n,
        m,
        violations,
        violation_count,
        tie_mismatches,
        rows: Vec::new(),
    };
    Ok(OrderingTable { rows, ..table })
}

/// For each `n`, the patterns of length `m` minimising the Shannon entropy.
/// A minimiser set other than the two constant patterns is a finding, except
/// at `n = m` where every posterior is a point mass.
pub fn check_entropy_min(
    m: usize,
    n_values: &[usize],
    limits: &Limits,
) -> Result<Vec<ExtremalResult>> {
    check_search_len(m, MAX_TABLE_LEN)?;
    let patterns: Vec<BitString> = BitString::all(m).collect();
    let expected = vec![BitString::zeros(m), BitString::ones(m)];
    n_values
        .iter()
        .map(|&n| {
            let hs = patterns
                .iter()
                .map(|x| shannon_entropy(x, n, limits))
                .collect::<Result<Vec<f64>>>()?;
            let best = hs
                .iter()
                .copied()
                .min_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
                .expect("2^m > 0 patterns");
            let witnesses: Vec<BitString> = patterns
                .iter()
                .zip(&hs)
                .filter(|(_, &h)| entropies_equal(h, best))
                .map(|(x, _)| x.clone())
                .collect();
            let mut findings = Vec::new();
            if n > m && witnesses != expected {
                findings.push(Finding {
                    kind: "entropy-min-not-constant",
                    detail: format!(
                        "n={n} m={m}: minimisers {} with H = {best}",
                        fmt_set(&witnesses)
                    ),
                });
            }
            Ok(ExtremalResult {
                m,
                n: Some(n),
                criterion: Criterion::EntropyMin,
                witnesses,
                value: ExtremalValue::Bits(best),
                findings,
            })
        })
        .collect()
}
