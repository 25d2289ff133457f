use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use matchless_core::solver::Budget;

#[derive(Debug, Parser)]
#[command(
    name = "matchless",
    version,
    about = "Exact search and verification for set families with bounded matching number"
)]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Globals {
    /// Write the JSON report to PATH; `-` prints it to stdout instead of the text summary.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Seed for every randomized sweep.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Search node budget; accepts forms like 1e8.
    #[arg(long, global = true, value_parser = parse_count)]
    pub budget_nodes: Option<u64>,
    /// Wall-clock budget per search, in seconds.
    #[arg(long, global = true)]
    pub budget_seconds: Option<u64>,
    /// Worker threads for grids and campaigns.
    #[arg(long, global = true, env = "MATCHLESS_THREADS")]
    pub threads: Option<usize>,
}

impl Globals {
    /// `Some(None)` means stdout.
    pub fn json_target(&self) -> Option<Option<&Path>> {
        self.json
            .as_deref()
            .map(|p| (p != Path::new("-")).then_some(p))
    }

    pub fn budget(&self) -> Budget {
        let mut b = Budget::default();
        if let Some(n) = self.budget_nodes {
            b.nodes = n;
        }
        if let Some(s) = self.budget_seconds {
            b.time = Duration::from_secs(s);
        }
        b
    }
}

/// Integer counts written plainly or in scientific notation (`1e8`, `2.5e3`).
pub fn parse_count(text: &str) -> Result<u64, String> {
    if let Ok(v) = text.parse::<u64>() {
        return Ok(v);
    }
    let bad = || format!("`{text}` is not a non-negative integer count");
    let (mantissa, exp) = text.split_once(['e', 'E']).ok_or_else(bad)?;
    let exp: u32 = exp.parse().map_err(|_| bad())?;
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty()
        || !format!("{whole}{frac}").bytes().all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let shift = exp
        .checked_sub(frac.len() as u32)
        .ok_or_else(|| format!("`{text}` is not an integer"))?;
    let digits: u64 = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    10u64
        .checked_pow(shift)
        .and_then(|p| digits.checked_mul(p))
        .ok_or_else(|| format!("`{text}` overflows"))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact optimum of E, F, EK, EK_TAU or CAPPED, e.g. `solve E n=5 s=3`.
    Solve(SolveArgs),
    /// Run a named check suite.
    Verify(VerifyArgs),
    /// Compare solver optima with conjectured values over a grid.
    Scan(ScanArgs),
    /// Evaluate a closed-form value, e.g. `formula kleitman s=3 m=2 at=sm`.
    Formula(FormulaArgs),
    /// Tuple statistics and identities of a family for one partition.
    Stats(StatsArgs),
    /// Circle-method profiles and bounds.
    Circle(CircleArgs),
    /// Build or count a construction, e.g. `construct P:s=3,m=1,l=2`.
    Construct(ConstructArgs),
    /// Run a JSON campaign of tasks.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// E, F, EK, EK_TAU or CAPPED.
    pub kind: String,
    /// Parameters as key=value, e.g. n=5 s=3.
    pub params: Vec<String>,
    /// all, monotone, monotone-shifted or uniform-shifted; defaults per kind.
    #[arg(long)]
    pub space: Option<String>,
    /// Print the witness family in text output.
    #[arg(long)]
    pub witness: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Kleitman,
    Constructions,
    Circle,
    Partition,
    Formulas,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub suite: Suite,
    #[arg(long, default_value_t = 4)]
    pub s_max: usize,
    #[arg(long, default_value_t = 3)]
    pub m_max: usize,
    /// Largest ground set: solver points for kleitman (default 8), grids for constructions (default 14), exhaustive up-sets for partition (default 5).
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub s: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Random permutations for the circle suite.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Random monotone families for the partition suite.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanTarget {
    /// Solver optimum of e(sm+s-l, s) against |P(s,m,l)|.
    PFamily,
    /// Best threshold family against the exact optimum.
    Threshold,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    pub target: ScanTarget,
    #[arg(long, default_value_t = 7)]
    pub n_max: usize,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, default_value_t = 10000)]
    pub iters: u64,
}

#[derive(Debug, Args)]
pub struct FormulaArgs {
    /// Formula name; `list` prints the known names.
    pub kind: String,
    pub params: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Sample,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Family file in the text format.
    #[arg(long)]
    pub family: PathBuf,
    /// Partition sizes, e.g. 1,1,1.
    #[arg(long)]
    pub partition: String,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, default_value_t = 100000)]
    pub trials: u64,
    /// Also run every equal-partition check for this s.
    #[arg(long)]
    pub s: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CircleAction {
    /// The per-permutation bound over random permutations.
    Bound,
    /// x-profile and window cases for one permutation.
    Profile,
    /// The bound averaged over all permutations, from tuple densities.
    Averaged,
    /// Permutation incidence counts of disjoint tuples.
    Incidence,
    /// Mean of the per-permutation bound against the averaged form.
    Consistency,
}

#[derive(Debug, Args)]
pub struct CircleArgs {
    pub action: CircleAction,
    /// Family file; defaults to P(s,m,2).
    #[arg(long)]
    pub family: Option<PathBuf>,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub m: usize,
    /// Seed for the permutations; defaults to --seed.
    #[arg(long)]
    pub sigma_seed: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Explicit permutation for `profile`, as 1-based elements around the circle.
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyFormat {
    Elements,
    Hex,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Construction spec, e.g. P:s=3,m=1,l=2 or thresh:1,1/2,1/2,1/2.
    pub spec: String,
    /// Write the family to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FamilyFormat::Elements)]
    pub format: FamilyFormat,
    /// Check size, matching and cover numbers and shiftedness.
    #[arg(long)]
    pub verify: bool,
    /// Print the family in text output.
    #[arg(long)]
    pub print: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Campaign file (JSON).
    pub campaign: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::parse_count;

    #[test]
    fn counts() {
        assert_eq!(parse_count("100"), Ok(100));
        assert_eq!(parse_count("1e8"), Ok(100_000_000));
        assert_eq!(parse_count("2.5e3"), Ok(2500));
        assert!(parse_count("2.55e1").is_err());
        assert!(parse_count("e5").is_err());
        assert!(parse_count("-1").is_err());
        assert!(parse_count("1e30").is_err());
    }
}
