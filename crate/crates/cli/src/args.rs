use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prosolv_core::cohomology::DEFAULT_UNKNOWN_CAP;

#[derive(Debug, Parser)]
#[command(name = "prosolv", version, about = "Exact checks on truncated graded Lie algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Print the bracket table of the quotient.
    Table(Common),
    /// Check the Jacobi identity on all guarded triples.
    Jacobi(Common),
    /// Lower central and derived series.
    Series(Common),
    /// Derivation space, compared with closed forms where known.
    Der(Common),
    /// Center and first cohomology with adjoint coefficients.
    H1(Common),
    /// Second cohomology with adjoint coefficients.
    H2(H2Args),
    /// Explicit non-trivial 2-cocycle on M2t.
    Witness(WitnessArgs),
    /// Completeness: trivial center and inner derivations only.
    Complete(Common),
    /// List the built-in families.
    Catalog(Output),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Built-in family: m0, m2, M0, M2, M0t, M2t, wittpos.
    #[arg(long, required_unless_present = "presentation", conflicts_with = "presentation")]
    pub family: Option<String>,
    /// JSON presentation file.
    #[arg(long)]
    pub presentation: Option<PathBuf>,
    /// Comma-separated rationals, e.g. `1,-2/3,5`.
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Top degree of the window.
    #[arg(long = "N", default_value_t = 12)]
    pub top: u32,
    /// Buffer width; defaults to the presentation's degree-shift bound.
    #[arg(long = "B")]
    pub buffer: Option<u32>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct H2Args {
    #[command(flatten)]
    pub common: Common,
    /// Seed for the random trivializer samples (M0t).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_UNKNOWN_CAP)]
    pub max_unknowns: usize,
}

#[derive(Debug, Clone, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub common: Common,
    /// First `j` with `phi(e3, e_j) = e_{j+3}`.
    #[arg(long = "j-min", default_value_t = 5)]
    pub j_min: u32,
    #[arg(long, default_value_t = DEFAULT_UNKNOWN_CAP)]
    pub max_unknowns: usize,
}
