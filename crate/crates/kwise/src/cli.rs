use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kwise_core::extremal::{Method, DEFAULT_CANDIDATE_BUDGET};
use kwise_core::rational::{parse_rational, Rational};
use kwise_core::real::DEFAULT_PRECISION;

#[derive(Debug, Parser)]
#[command(name = "kwise", version, about = "Exact maximal AND probability of k-wise independent bits")]
pub struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "KWISE_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certificate for M(n,k,p) as JSON.
    Compute(ComputeArgs),
    /// CSV of M, the relaxed bound and their ratio over a parameter grid.
    Scan(ScanArgs),
    /// Optimal dual polynomial sampled on [0, n].
    Poly(PolyArgs),
    /// Run a property suite and report every check as JSON.
    Verify(VerifyArgs),
    /// Bitstrings from the exchangeable law attaining M(n,k,p).
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Primal,
    Dual,
    Both,
}

impl MethodArg {
    pub fn single(self) -> Method {
        match self {
            MethodArg::Dual => Method::DualSearch,
            _ => Method::Primal,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MethodArg::Primal => "primal",
            MethodArg::Dual => "dual",
            MethodArg::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Chebyshev,
    Perturbation,
    Probshift,
    Duality,
    Sandwich,
    Kwise,
    Expectation,
}

/// Marginal probability as `a/b` or a finite decimal, strictly inside (0, 1).
pub fn parse_p(s: &str) -> Result<Rational, String> {
    let p = parse_rational(s).map_err(|e| e.to_string())?;
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    if p <= zero || p >= one {
        return Err(format!("p must lie strictly between 0 and 1, got {s}"));
    }
    Ok(p)
}

/// Comma-separated items, each `a`, `a..b` (exclusive) or `a..=b` (inclusive).
pub fn parse_u64_list(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("not a non-negative integer: {t:?}"));
        if let Some((a, b)) = item.split_once("..=") {
            out.extend(num(a)?..=num(b)?);
        } else if let Some((a, b)) = item.split_once("..") {
            out.extend(num(a)?..num(b)?);
        } else {
            out.push(num(item)?);
        }
    }
    Ok(out)
}

pub fn parse_p_list(s: &str) -> Result<Vec<Rational>, String> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(parse_p).collect()
}

#[derive(Debug, Args)]
pub struct Budget {
    /// Abort the dual search above this many root-pair configurations.
    #[arg(long = "max-candidates", default_value_t = DEFAULT_CANDIDATE_BUDGET)]
    pub max_candidates: u64,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long, value_parser = parse_p)]
    pub p: Rational,
    #[arg(long, value_enum, default_value_t = MethodArg::Primal)]
    pub method: MethodArg,
    #[command(flatten)]
    pub budget: Budget,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Values of n, e.g. `3..=14` or `10,20,40`.
    #[arg(long)]
    pub n: String,
    #[arg(long)]
    pub k: String,
    /// Comma-separated probabilities.
    #[arg(long)]
    pub p: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Primal)]
    pub method: MethodArg,
    /// Add approximate columns with 15 significant digits.
    #[arg(long)]
    pub decimal: bool,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    pub precision: u32,
    #[command(flatten)]
    pub budget: Budget,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long, value_parser = parse_p)]
    pub p: Rational,
    /// Evenly spaced sample points on [0, n], endpoints included.
    #[arg(long, default_value_t = 401)]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub decimal: bool,
    #[command(flatten)]
    pub budget: Budget,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: SuiteName,
    /// Largest n; the default depends on the suite.
    #[arg(long = "max-n")]
    pub max_n: Option<u64>,
    #[arg(long, default_value = "2,4,6,8")]
    pub ks: String,
    /// Defaults depend on the suite.
    #[arg(long)]
    pub ps: Option<String>,
    #[arg(long = "max-m", default_value_t = 40)]
    pub max_m: u64,
    #[arg(long = "max-d", default_value_t = 10)]
    pub max_d: u64,
    /// Largest M for the random monic checks.
    #[arg(long = "max-sup-m", default_value_t = 30)]
    pub max_sup_m: u64,
    /// Random monic polynomials per (M, d).
    #[arg(long = "monic-samples", default_value_t = 500)]
    pub monic_samples: usize,
    #[arg(long = "configs-per-cell", default_value_t = 200)]
    pub configs_per_cell: usize,
    #[arg(long = "witness-configs", default_value_t = 3)]
    pub witness_configs: usize,
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    pub precision: u32,
    #[command(flatten)]
    pub budget: Budget,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long, value_parser = parse_p)]
    pub p: Rational,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Primal)]
    pub method: MethodArg,
    #[command(flatten)]
    pub budget: Budget,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use kwise_core::rational::rat;

    #[test]
    fn lists() {
        assert_eq!(parse_u64_list("3..=5,8").unwrap(), [3, 4, 5, 8]);
        assert_eq!(parse_u64_list("3..5").unwrap(), [3, 4]);
        assert!(parse_u64_list("").unwrap().is_empty());
        assert!(parse_u64_list("x").is_err());
        assert_eq!(parse_p_list("1/2, 0.3").unwrap(), [rat(1, 2), rat(3, 10)]);
    }

    #[test]
    fn probabilities() {
        assert_eq!(parse_p("0.3").unwrap(), rat(3, 10));
        assert!(parse_p("1").is_err());
        assert!(parse_p("0").is_err());
        assert!(parse_p("0.3e0").is_err());
    }

    #[test]
    fn clap_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
