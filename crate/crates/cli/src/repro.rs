//! The reference reproductions: the ordering table at (n, m) = (8, 5), the
//! occurrence-count histograms of `01` for n = 5..15, and the three entropies
//! of every length-5 pattern at n = 8. Always CSV with 4-decimal floats, so
//! the output can be compared byte for byte with the checked-in files.

use std::fs;
use std::path::Path;

use delchan::{Finding, Limits};

use crate::cli::{EntropyModeArg, Format, MomentModeArg, Range, VarianceFormArg};
use crate::commands::{self, EntropyArgs};
use crate::error::{io_at, CliError};
use crate::render::FloatStyle;

macro_rules! expected {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../expected/", $name)))),*]
    };
}

pub const EXPECTED: &[(&str, &str)] = expected![
    "table_n8_m5.csv",
    "hist_01_n05.csv",
    "hist_01_n06.csv",
    "hist_01_n07.csv",
    "hist_01_n08.csv",
    "hist_01_n09.csv",
    "hist_01_n10.csv",
    "hist_01_n11.csv",
    "hist_01_n12.csv",
    "hist_01_n13.csv",
    "hist_01_n14.csv",
    "hist_01_n15.csv",
    "entropy_m05_n08.csv",
];

pub struct Generated {
    pub files: Vec<(String, String)>,
    pub findings: Vec<Finding>,
}

pub fn generate(limits: &Limits) -> Result<Generated, CliError> {
    let style = FloatStyle {
        full_precision: false,
    };
    let mut files = Vec::new();
    let mut findings = Vec::new();

    let table = commands::table(8, 5, limits)?;
    findings.extend(table.findings);
    let hists = commands::hist("01", Range { start: 5, end: 15 }, None, 0, limits)?;
    let args = EntropyArgs {
        mode: EntropyModeArg::Exact,
        moments: MomentModeArg::Exact,
        variance_form: VarianceFormArg::Kappa,
    };
    let entropies = commands::entropy("5", 8, true, &args, limits)?;

    for artifact in table
        .artifacts
        .into_iter()
        .chain(hists.artifacts)
        .chain(entropies.artifacts)
    {
        files.push((
            format!("{}.csv", artifact.stem),
            artifact.records.encode(Format::Csv, style),
        ));
    }
    Ok(Generated { files, findings })
}

/// First differing line, 1-based, with both versions.
fn first_difference(got: &str, want: &str) -> Option<(usize, String, String)> {
    let mut g = got.lines();
    let mut w = want.lines();
    let mut line = 1;
    loop {
        match (g.next(), w.next()) {
            (None, None) => return None,
            (a, b) if a != b => {
                return Some((
                    line,
                    a.unwrap_or("<end of file>").to_owned(),
                    b.unwrap_or("<end of file>").to_owned(),
                ))
            }
            _ => line += 1,
        }
    }
}

/// Writes the files into `dir` and, unless `no_diff`, compares them against
/// the expected versions. Returns one status line per file.
pub fn run(dir: &Path, limits: &Limits, no_diff: bool) -> Result<Vec<String>, CliError> {
    let generated = generate(limits)?;
    // already part of the reference table footers; echoed for visibility
    for f in &generated.findings {
        eprintln!("finding [{}]: {}", f.kind, f.detail);
    }
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    let mut report = Vec::new();
    let mut mismatches = Vec::new();
    for (name, content) in &generated.files {
        let path = dir.join(name);
        fs::write(&path, content).map_err(io_at(&path))?;
        if no_diff {
            report.push(format!("{name} written"));
            continue;
        }
        let want = EXPECTED.iter().find(|(n, _)| n == name).map(|(_, c)| *c);
        match want {
            Some(want) if want == content => report.push(format!("{name} ok")),
            Some(want) => {
                let detail = match first_difference(content, want) {
                    Some((line, got, exp)) => {
                        format!("{name}:{line}: got {got:?}, expected {exp:?}")
                    }
                    None => format!("{name}: line endings differ"),
                };
                report.push(format!("{name} MISMATCH"));
                mismatches.push(detail);
            }
            None => {
                report.push(format!("{name} MISMATCH"));
                mismatches.push(format!("{name}: no expected file"));
            }
        }
    }
    for (name, _) in EXPECTED {
        if !generated.files.iter().any(|(n, _)| n == name) {
            report.push(format!("{name} MISSING"));
            mismatches.push(format!("{name}: expected but not generated"));
        }
    }
    if !mismatches.is_empty() {
        for line in &report {
            println!("{line}");
        }
        return Err(CliError::Mismatch(mismatches.join("\n")));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_files_match_the_checked_in_set() {
        let generated = generate(&Limits::default()).unwrap();
        let names: Vec<&str> = generated.files.iter().map(|(n, _)| n.as_str()).collect();
        let expected: Vec<&str> = EXPECTED.iter().map(|(n, _)| *n).collect();
        assert_eq!(names, expected);
        for ((name, got), (_, want)) in generated.files.iter().zip(EXPECTED) {
            assert_eq!(got, want, "{name}");
        }
    }

    #[test]
    fn difference_locator() {
        assert_eq!(first_difference("a\nb\n", "a\nb\n"), None);
        assert_eq!(
            first_difference("a\nb\n", "a\nc\n"),
            Some((2, "b".into(), "c".into()))
        );
        assert_eq!(
            first_difference("a\n", "a\nc\n"),
            Some((2, "<end of file>".into(), "c".into()))
        );
    }
}
