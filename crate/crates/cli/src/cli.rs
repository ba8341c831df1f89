use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "boolcube",
    version,
    about = "Lubell-function tools for Boolean-algebra Turán problems",
    after_help = "Exit status: 0 verified or found, 1 not found or bound violated, \
                  2 usage error, 3 budget exhausted or undecided.\n\
                  BOOLCUBE_THREADS caps the worker pool."
)]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rigorous enclosure of the threshold α_d(n).
    Alpha {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: u64,
        /// Target relative width of the enclosure.
        #[arg(long, default_value_t = 1e-12)]
        precision: f64,
    },
    /// Exact Lubell value of a family file.
    Lubell {
        #[arg(long)]
        input: PathBuf,
    },
    /// Look for a copy of B_d in a family.
    Detect(FamilyDim),
    /// Extract B_d along the Lubell recursion, with a trace.
    Extract(FamilyDim),
    /// Largest B_d-free family by cardinality or Lubell value.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Cardinality)]
        objective: ObjectiveArg,
        /// Node budget for the branch and bound (n > 4).
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Run the exhaustive sweep on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Largest subset of {0..n} without an affine d-cube.
    CubeFree {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Require pairwise distinct cube steps.
        #[arg(long)]
        strict: bool,
    },
    /// Compare cube detection in an integer set with B_d detection in its
    /// level family.
    Correspondence {
        /// Integer-set file; its n is the lattice ground size.
        #[arg(long, conflicts_with = "n", required_unless_present = "n")]
        input: Option<PathBuf>,
        /// Check every subset of {0..n} instead.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        d: usize,
    },
    /// Ramsey-type constructions and verifiers.
    #[command(subcommand)]
    Ramsey(RamseyCommand),
    /// Run the built-in property suites.
    Selftest {
        /// Run one suite: lubell, alpha, binomial-ratio, correspondence, smallcase.
        #[arg(long)]
        suite: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct FamilyDim {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub d: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Cardinality,
    Lubell,
}

#[derive(Subcommand, Debug)]
pub enum RamseyCommand {
    /// Check R(B_s, B_1) = 2s.
    VerifyRs1 {
        #[arg(long)]
        s: usize,
        /// Largest number of colorings swept exhaustively.
        #[arg(long, default_value_t = 1 << 20)]
        exhaustive_limit: u128,
    },
    /// Monochromatic B_d from the densest color class.
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        d: usize,
    },
    /// Seeded search for a rainbow B_r.
    Rainbow {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}
