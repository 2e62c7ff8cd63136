use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "delchan",
    version,
    about = "Posterior entropy of the binary deletion channel"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Output encoding [default: json for extremal and moments, csv otherwise].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file, or directory when the command emits one artifact per n.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Print floats in shortest round-trip form instead of 4 decimals.
    #[arg(long, global = true)]
    pub full_precision: bool,

    /// Worker threads for enumeration and search (output does not depend on it).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Largest text length for commands that enumerate all 2^n texts.
    #[arg(long, global = true, default_value_t = delchan::embedding::DEFAULT_MAX_TEXT_LEN)]
    pub max_n: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "jsonl",
        }
    }
}

/// Inclusive range `a..b`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Range {
    pub start: usize,
    pub end: usize,
}

impl Range {
    pub fn values(self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }

    pub fn is_single(self) -> bool {
        self.start == self.end
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid range {s:?}"))
        };
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if start > end {
            return Err(format!("empty range {s:?}"));
        }
        Ok(Range { start, end })
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Autocorrelation coefficient kappa^2 of a pattern, or of every pattern of a length.
    Kappa {
        /// Pattern, or a length m together with --all.
        target: String,
        /// Treat the argument as a length and list every pattern of it.
        #[arg(long)]
        all: bool,
        /// Dump the mask B, interleaving counts M and masked product R.
        #[arg(long, conflicts_with = "all")]
        decompose: bool,
    },
    /// Uncertainty set of a pattern with embedding counts (`y,omega`).
    Posterior { pattern: String, n: usize },
    /// Entropy of the posterior.
    Entropy {
        /// Pattern, or a length m together with --all.
        target: String,
        /// Text length.
        n: usize,
        /// Treat the first argument as a length and report every pattern of it.
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = EntropyModeArg::Exact)]
        mode: EntropyModeArg,
        /// Moments fed to the estimator.
        #[arg(long, value_enum, default_value_t = MomentModeArg::Exact)]
        moments: MomentModeArg,
        /// Coefficient of the asymptotic variance.
        #[arg(long, value_enum, default_value_t = VarianceFormArg::Kappa)]
        variance_form: VarianceFormArg,
    },
    /// Histogram of the occurrence count over texts (`omega,count`).
    Hist {
        pattern: String,
        /// Text length or inclusive range `a..b`.
        n: Range,
        /// Sample this many random texts instead of enumerating.
        #[arg(long, value_name = "N")]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0, requires = "sample")]
        seed: u64,
    },
    /// Every pattern of length m with kappa^2 and entropy at text length n.
    Table { n: usize, m: usize },
    /// Exhaustive extremal search over patterns of length m.
    Extremal {
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        m: usize,
        /// Text lengths for entropy-min (default m+1..14).
        #[arg(long)]
        n: Option<Range>,
    },
    /// Moments of the occurrence count.
    Moments {
        pattern: String,
        n: usize,
        /// Moment order(s), `r` or `a..b` within 1..4.
        #[arg(long, default_value = "1..4")]
        r: Range,
        #[arg(long, value_enum, default_value_t = MomentModeArg::Exact)]
        mode: MomentModeArg,
        /// Report central moments E[(X-E)^r] (r=1 reports the mean).
        #[arg(long)]
        central: bool,
        #[arg(long, value_enum, default_value_t = VarianceFormArg::Kappa)]
        variance_form: VarianceFormArg,
    },
    /// Skewness and excess kurtosis over a range of text lengths.
    Gaussian {
        pattern: String,
        n: Range,
        /// Use a sampled histogram of this size instead of exact moments.
        #[arg(long, value_name = "N")]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0, requires = "sample")]
        seed: u64,
    },
    /// Regenerate the reference tables and histograms and diff them against
    /// the checked-in expected files.
    Repro {
        /// Only write the files; skip the comparison.
        #[arg(long)]
        no_diff: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyModeArg {
    Exact,
    Estimate,
    Renyi2,
    Min,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentModeArg {
    Exact,
    Asymptotic,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceFormArg {
    Kappa,
    Corrected,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionArg {
    KappaMax,
    KappaMin,
    EntropyMin,
}
