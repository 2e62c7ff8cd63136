use delchan::arith::{pow2, ratio, ratio_to_f64};
use delchan::distribution::{empirical_moments, exact_histogram, sample_histogram};
use delchan::embedding::{total_masks, uncertainty_set};
use delchan::entropy::{entropy_report, min_entropy, moment_entropy_estimate, renyi2_entropy};
use delchan::extremal::{
    check_entropy_min, kappa_table, ordering_table, search_kappa_min, verify_kappa_max,
};
use delchan::moments::{
    asymptotic_moments, exact_gaussian_diagnostics, exact_moments, gaussian_diagnostics,
    kappa_decomposition, kappa_squared, power_sums, VarianceForm,
};
use delchan::{
    BitString, ExactRatio, ExtremalResult, ExtremalValue, Finding, HistogramMode, Limits, Moment,
    MomentSet, Provenance, WeightHistogram,
};
use num_bigint::BigUint;

use crate::cli::{CriterionArg, EntropyModeArg, MomentModeArg, Range, VarianceFormArg};
use crate::error::CliError;
use crate::render::{Records, Value};

/// One output document; `stem` names the file when a command writes several.
pub struct Artifact {
    pub stem: String,
    pub records: Records,
}

#[derive(Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub findings: Vec<Finding>,
}

impl Outcome {
    fn single(stem: impl Into<String>, records: Records) -> Self {
        Self {
            artifacts: vec![Artifact {
                stem: stem.into(),
                records,
            }],
            findings: Vec::new(),
        }
    }
}

pub fn parse_pattern(s: &str) -> Result<BitString, CliError> {
    Ok(s.parse::<BitString>()?)
}

fn parse_length(s: &str) -> Result<usize, CliError> {
    s.parse()
        .map_err(|_| CliError::Usage(format!("--all expects a pattern length, got {s:?}")))
}

fn patterns_for(target: &str, all: bool) -> Result<Vec<BitString>, CliError> {
    if all {
        let m = parse_length(target)?;
        if m == 0 || m > delchan::extremal::MAX_SEARCH_LEN {
            return Err(delchan::Error::SearchRange {
                m,
                max: delchan::extremal::MAX_SEARCH_LEN,
            }
            .into());
        }
        Ok(BitString::all(m).collect())
    } else {
        Ok(vec![parse_pattern(target)?])
    }
}

fn provenance_name(p: Provenance) -> &'static str {
    match p {
        Provenance::Exact => "exact",
        Provenance::Asymptotic => "asymptotic",
        Provenance::Empirical => "empirical",
    }
}

fn variance_form(v: VarianceFormArg) -> VarianceForm {
    match v {
        VarianceFormArg::Kappa => VarianceForm::Kappa,
        VarianceFormArg::Corrected => VarianceForm::Corrected,
    }
}

pub fn kappa(target: &str, all: bool, decompose: bool) -> Result<Outcome, CliError> {
    if decompose {
        let x = parse_pattern(target)?;
        let d = kappa_decomposition(&x)?;
        let mut rec = Records::new(&["matrix", "r", "s", "value"]);
        let blocks: [(&str, Vec<Vec<BigUint>>); 3] = [
            (
                "B",
                d.mask
                    .iter()
                    .map(|row| row.iter().map(|&b| BigUint::from(b)).collect())
                    .collect(),
            ),
            ("M", d.interleavings.clone()),
            ("R", d.masked.clone()),
        ];
        for (name, mat) in blocks {
            for (r, row) in mat.into_iter().enumerate() {
                for (s, v) in row.into_iter().enumerate() {
                    rec.push(vec![
                        name.into(),
                        Value::from(r + 1),
                        Value::from(s + 1),
                        v.into(),
                    ]);
                }
            }
        }
        rec.meta("pattern", x.to_string());
        rec.meta("kappa2", d.kappa_squared);
        return Ok(Outcome::single(format!("kappa_{x}"), rec));
    }

    let mut rec = Records::new(&["pattern", "kappa2"]);
    if all {
        let m = parse_length(target)?;
        for (code, k) in kappa_table(m)?.into_iter().enumerate() {
            rec.push(vec![
                BitString::from_code(code as u64, m).to_string().into(),
                BigUint::from(k).into(),
            ]);
        }
        Ok(Outcome::single(format!("kappa_m{m:02}"), rec))
    } else {
        let x = parse_pattern(target)?;
        rec.push(vec![x.to_string().into(), kappa_squared(&x)?.into()]);
        Ok(Outcome::single(format!("kappa_{x}"), rec))
    }
}

/// Rows of `y,omega` for the whole uncertainty set, streamed by the caller.
pub fn posterior(
    pattern: &str,
    n: usize,
    limits: &Limits,
) -> Result<(impl Iterator<Item = (BitString, u64)>, BigUint), CliError> {
    let x = parse_pattern(pattern)?;
    let rows = uncertainty_set(&x, n, limits)?;
    Ok((rows, total_masks(n, x.len())?))
}

pub struct EntropyArgs {
    pub mode: EntropyModeArg,
    pub moments: MomentModeArg,
    pub variance_form: VarianceFormArg,
}

pub fn entropy(
    target: &str,
    n: usize,
    all: bool,
    args: &EntropyArgs,
    limits: &Limits,
) -> Result<Outcome, CliError> {
    let patterns = patterns_for(target, all)?;
    let stem = if all {
        format!("entropy_m{:02}_n{n:02}", patterns[0].len())
    } else {
        format!("entropy_{}_n{n:02}", patterns[0])
    };
    let rec = match args.mode {
        EntropyModeArg::Exact => {
            let mut rec = Records::new(&["pattern", "n", "H", "R", "Hmin", "mode"]);
            for x in &patterns {
                let r = entropy_report(x, n, limits)?;
                rec.push(vec![
                    x.to_string().into(),
                    n.into(),
                    r.shannon_bits.into(),
                    r.renyi2_bits.into(),
                    r.min_entropy_bits.into(),
                    "exact".into(),
                ]);
            }
            rec
        }
        EntropyModeArg::Renyi2 => {
            let mut rec = Records::new(&["pattern", "n", "R"]);
            for x in &patterns {
                rec.push(vec![
                    x.to_string().into(),
                    n.into(),
                    renyi2_entropy(x, n)?.into(),
                ]);
            }
            rec
        }
        EntropyModeArg::Min => {
            let mut rec = Records::new(&["pattern", "n", "Hmin"]);
            for x in &patterns {
                rec.push(vec![
                    x.to_string().into(),
                    n.into(),
                    min_entropy(x, n, limits)?.into(),
                ]);
            }
            rec
        }
        EntropyModeArg::Estimate => {
            let mut rec = Records::new(&[
                "pattern",
                "n",
                "estimate",
                "bound",
                "lower",
                "upper",
                "provenance",
            ]);
            for x in &patterns {
                let set = match args.moments {
                    MomentModeArg::Exact => exact_moments(x, n)?,
                    MomentModeArg::Asymptotic => {
                        asymptotic_moments(x, n, variance_form(args.variance_form))?
                    }
                };
                let est = moment_entropy_estimate(&set, &total_masks(n, x.len())?)?;
                rec.push(vec![
                    x.to_string().into(),
                    n.into(),
                    est.estimate_bits.into(),
                    est.error_bound_bits.into(),
                    (est.estimate_bits - est.error_bound_bits).into(),
                    (est.estimate_bits + est.error_bound_bits).into(),
                    provenance_name(est.provenance).into(),
                ]);
            }
            rec
        }
    };
    Ok(Outcome::single(stem, rec))
}

fn histogram_records(h: &WeightHistogram) -> Records {
    let mut rec = Records::new(&["omega", "count"]);
    for (&omega, &count) in h.counts() {
        rec.push(vec![omega.into(), count.into()]);
    }
    rec.meta("pattern", h.pattern().to_string());
    rec.meta("n", h.text_length());
    match h.mode() {
        HistogramMode::Exact => rec.meta("mode", "exact"),
        HistogramMode::Sampled { sample_size, seed } => {
            rec.meta("mode", "sampled");
            rec.meta("sample_size", sample_size);
            rec.meta("seed", seed);
        }
    }
    rec
}

pub fn hist_stem(pattern: &BitString, n: usize) -> String {
    format!("hist_{pattern}_n{n:02}")
}

pub fn hist(
    pattern: &str,
    ns: Range,
    sample: Option<u64>,
    seed: u64,
    limits: &Limits,
) -> Result<Outcome, CliError> {
    let x = parse_pattern(pattern)?;
    let mut out = Outcome::default();
    for n in ns.values() {
        let h = match sample {
            Some(size) => sample_histogram(&x, n, size, seed)?,
            None => exact_histogram(&x, n, limits)?,
        };
        out.artifacts.push(Artifact {
            stem: hist_stem(&x, n),
            records: histogram_records(&h),
        });
    }
    Ok(out)
}

pub fn table(n: usize, m: usize, limits: &Limits) -> Result<Outcome, CliError> {
    let t = ordering_table(n, m, limits)?;
    let mut rec = Records::new(&["pattern", "kappa2", "H_bits"]);
    for row in &t.rows {
        rec.push(vec![
            row.pattern.to_string().into(),
            row.kappa_squared.clone().into(),
            row.shannon_bits.into(),
        ]);
    }
    let findings = t.findings();
    rec.meta("n", n);
    rec.meta("m", m);
    rec.meta("violations", t.violation_count);
    rec.meta("tie_mismatches", t.tie_mismatches.len());
    if !findings.is_empty() {
        rec.meta(
            "finding",
            Value::List(
                findings
                    .iter()
                    .map(|f| format!("{}: {}", f.kind, f.detail))
                    .collect(),
            ),
        );
    }
    let mut out = Outcome::single(format!("table_n{n}_m{m}"), rec);
    out.findings = findings;
    Ok(out)
}

pub fn extremal(
    criterion: CriterionArg,
    m: usize,
    ns: Option<Range>,
    limits: &Limits,
) -> Result<Outcome, CliError> {
    let results: Vec<ExtremalResult> = match criterion {
        CriterionArg::KappaMax => vec![verify_kappa_max(m)?],
        CriterionArg::KappaMin => vec![search_kappa_min(m)?],
        CriterionArg::EntropyMin => {
            let ns = ns.unwrap_or(Range {
                start: m + 1,
                end: (m + 1).max(14),
            });
            check_entropy_min(m, &ns.values().collect::<Vec<_>>(), limits)?
        }
    };
    let with_n = criterion == CriterionArg::EntropyMin;
    let header: &[&'static str] = if with_n {
        &["m", "n", "criterion", "value", "witnesses", "violations"]
    } else {
        &["m", "criterion", "value", "witnesses", "violations"]
    };
    let mut rec = Records::new(header);
    let mut findings = Vec::new();
    for r in results {
        let mut row: Vec<Value> = vec![r.m.into()];
        if with_n {
            row.push(r.n.map_or(Value::Null, Value::from));
        }
        row.push(r.criterion.to_string().into());
        row.push(match r.value {
            ExtremalValue::Count(c) => c.into(),
            ExtremalValue::Bits(b) => b.into(),
        });
        row.push(Value::List(
            r.witnesses.iter().map(|w| w.to_string()).collect(),
        ));
        row.push(Value::List(
            r.findings.iter().map(|f| f.detail.clone()).collect(),
        ));
        rec.push(row);
        findings.extend(r.findings);
    }
    let mut out = Outcome::single(
        format!("extremal_{}_m{m:02}", criterion_name(criterion)),
        rec,
    );
    out.findings = findings;
    Ok(out)
}

fn criterion_name(c: CriterionArg) -> &'static str {
    match c {
        CriterionArg::KappaMax => "kappa-max",
        CriterionArg::KappaMin => "kappa-min",
        CriterionArg::EntropyMin => "entropy-min",
    }
}

pub struct MomentArgs {
    pub orders: Range,
    pub mode: MomentModeArg,
    pub central: bool,
    pub variance_form: VarianceFormArg,
}

fn central_at(set: &MomentSet, r: usize) -> &Moment {
    match r {
        1 => &set.mean,
        2 => &set.variance,
        3 => &set.central3,
        _ => &set.central4,
    }
}

/// Raw moment `E[X^r]` from mean and central moments.
fn raw_from_central(set: &MomentSet, r: usize) -> f64 {
    let e = set.mean.to_f64();
    let v = set.variance.to_f64();
    let m3 = set.central3.to_f64();
    let m4 = set.central4.to_f64();
    match r {
        1 => e,
        2 => v + e * e,
        3 => m3 + 3.0 * e * v + e.powi(3),
        _ => m4 + 4.0 * e * m3 + 6.0 * e * e * v + e.powi(4),
    }
}

pub fn moments(pattern: &str, n: usize, args: &MomentArgs) -> Result<Outcome, CliError> {
    let x = parse_pattern(pattern)?;
    for r in [args.orders.start, args.orders.end] {
        if !(1..=delchan::moments::MAX_MOMENT_ORDER).contains(&r) {
            return Err(delchan::Error::MomentOrder(r).into());
        }
    }
    let kind = if args.central { "central" } else { "raw" };
    let mut rec = Records::new(&[
        "pattern",
        "n",
        "r",
        "kind",
        "value_num",
        "value_den",
        "value",
        "provenance",
    ]);
    let push_exact = |r: usize, q: &ExactRatio, rec: &mut Records| {
        rec.push(vec![
            x.to_string().into(),
            n.into(),
            r.into(),
            kind.into(),
            q.numer().clone().into(),
            q.denom().clone().into(),
            ratio_to_f64(q).into(),
            "exact".into(),
        ]);
    };
    match (args.mode, args.central) {
        (MomentModeArg::Exact, false) => {
            let sums = power_sums(&x, n, args.orders.end)?;
            for r in args.orders.values() {
                push_exact(r, &ratio(sums[r - 1].clone(), pow2(n)), &mut rec);
            }
        }
        (MomentModeArg::Exact, true) => {
            let set = exact_moments(&x, n)?;
            for r in args.orders.values() {
                let q = central_at(&set, r).as_exact().expect("exact moment set");
                push_exact(r, q, &mut rec);
            }
        }
        (MomentModeArg::Asymptotic, central) => {
            let set = asymptotic_moments(&x, n, variance_form(args.variance_form))?;
            for r in args.orders.values() {
                let v = if central {
                    central_at(&set, r).to_f64()
                } else {
                    raw_from_central(&set, r)
                };
                rec.push(vec![
                    x.to_string().into(),
                    n.into(),
                    r.into(),
                    kind.into(),
                    Value::Null,
                    Value::Null,
                    v.into(),
                    "asymptotic".into(),
                ]);
            }
        }
    }
    Ok(Outcome::single(format!("moments_{x}_n{n:02}"), rec))
}

pub fn gaussian(
    pattern: &str,
    ns: Range,
    sample: Option<u64>,
    seed: u64,
) -> Result<Outcome, CliError> {
    let x = parse_pattern(pattern)?;
    let mut rec = Records::new(&["n", "skewness", "excess_kurtosis"]);
    for n in ns.values() {
        let d = match sample {
            Some(size) => {
                let h = sample_histogram(&x, n, size, seed)?;
                gaussian_diagnostics(&empirical_moments(&h)?, n)?
            }
            None => exact_gaussian_diagnostics(&x, n)?,
        };
        rec.push(vec![n.into(), d.skewness.into(), d.excess_kurtosis.into()]);
    }
    rec.meta("pattern", x.to_string());
    match sample {
        Some(size) => {
            rec.meta("mode", "sampled");
            rec.meta("sample_size", size);
            rec.meta("seed", seed);
        }
        None => rec.meta("mode", "exact"),
    }
    Ok(Outcome::single(format!("gaussian_{x}"), rec))
}
