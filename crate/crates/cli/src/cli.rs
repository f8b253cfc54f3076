use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "gwpoly",
    version,
    about = "Gaussian widths of polynomial maps, tensor-power matrices and AP experiments",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Base seed for every random stream
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads (results do not depend on this)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// File of default flags, as `key=value` lines or a JSON object;
    /// flags on the command line take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate E max_x <g, psi(x)> over x in {0,1}^n by exhaustive inner
    /// maximization, and compare with n t sqrt(k n^(1-1/ceil(d/2)) ln n).
    GwEstimate(GwEstimateArgs),

    /// Build the tensor-power matrix A for a 2r-uniform hypergraph and check
    /// <A x^(⊗m), x^(⊗m)> = 2 c p_H(x) on every sign vector x.
    MatrixVerify(MatrixVerifyArgs),

    /// Estimate how often a uniform map [m] -> [n] is s-good for a maximal
    /// matching of 2r-sets, with the mean of phi and the Markov tail.
    Birthday(BirthdayArgs),

    /// Compare balls-in-bins against independent Poisson bins
    /// (E Phi(X) <= 2 E Phi(Y)) and test that a sum of Poissons is Poisson.
    PoissonCheck(PoissonCheckArgs),

    /// Ratio of E||sum g_i A_i|| to sqrt(ln N) (sum ||A_i||^2)^(1/2) for random
    /// perfect matchings A_i.
    TjRatio(TjRatioArgs),

    /// Build the hypergraph of unordered k-term progressions in Z/NZ and count
    /// its edges, or the progressions inside a given set.
    ApCount(ApCountArgs),

    /// Check the exact structure of the progression hypergraph: edge count,
    /// pair incidence, degrees, 2 p_H = Lambda_k, affine symmetry, gradients.
    ApStructure(ApStructureArgs),

    /// Monte Carlo estimate of Pr[X_k >= (1 + delta) E X_k] for a p-random
    /// subset of Z/NZ.
    UpperTail(UpperTailArgs),

    /// Decide whether a difference set D is (ell, alpha)-intersective, or
    /// estimate how often a random D is.
    Intersective(IntersectiveArgs),

    /// Evaluate n t sqrt(k n^(1-1/ceil(d/2)) ln n).
    BoundEval(BoundEvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// psi(x) = x
    Identity,
    /// k random d-uniform components with vertex degrees at most t
    Random,
    /// gradient of the k-AP polynomial over Z/NZ
    ApGradient,
    /// explicit points read from --points
    Points,
}

#[derive(Debug, Args)]
pub struct GwEstimateArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: Option<usize>,
    /// Components (random) or progression length (ap-gradient)
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    /// Modulus for ap-gradient
    #[arg(long = "N")]
    pub modulus: Option<usize>,
    /// One point per line, coordinates separated by whitespace
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Comma-separated sizes (n, or N for ap-gradient) to run as a ladder
    #[arg(long)]
    pub ladder: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct MatrixVerifyArgs {
    /// Hypergraph file: `n m` header, then one edge per line
    #[arg(long)]
    pub hypergraph: PathBuf,
    /// Must match the file when given
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub r: usize,
    /// Goodness threshold (default 200 * 4^r)
    #[arg(long)]
    pub s: Option<u64>,
    /// Largest n^m to enumerate
    #[arg(long, default_value_t = gwpoly::tensorlift::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Check this matrix (`N nnz` then `row col value` lines) instead of the
    /// constructed one
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Save the constructed matrix
    #[arg(long)]
    pub write_matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BirthdayArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub n: usize,
    /// Default floor(C_r n^(1-1/r)) with C_r = (6 e r)^(1/r)
    #[arg(long)]
    pub m: Option<usize>,
    /// Default 200 * 4^r
    #[arg(long)]
    pub s: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct PoissonCheckArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Rates of the two summed Poisson variables
    #[arg(long, default_value_t = 1.3)]
    pub mu_a: f64,
    #[arg(long, default_value_t = 2.1)]
    pub mu_b: f64,
    /// Significance level of the chi-square test
    #[arg(long, default_value_t = 1e-3)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct TjRatioArgs {
    /// Matrix dimension (even)
    #[arg(long = "N")]
    pub dim: Option<usize>,
    /// Number of matchings (default N/4)
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated dimensions to run as a ladder, each with k = N/4
    #[arg(long)]
    pub ladder: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct ApCountArgs {
    #[arg(long = "N")]
    pub modulus: usize,
    #[arg(long)]
    pub k: usize,
    /// Comma-separated residues; reports X_k for this set
    #[arg(long)]
    pub set: Option<String>,
    /// Allow composite N, keeping progressions with k distinct elements
    #[arg(long)]
    pub loose: bool,
    /// Save the hypergraph in the `n m` text format
    #[arg(long)]
    pub write_hypergraph: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ApStructureArgs {
    #[arg(long = "N")]
    pub modulus: usize,
    #[arg(long)]
    pub k: usize,
    /// Random sets used for the Lambda_k check
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Random affine maps tried
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct UpperTailArgs {
    #[arg(long = "N")]
    pub modulus: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Also sum over all 2^N subsets
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// each nonzero difference kept with probability p
    Bernoulli,
    /// `--draws` uniform nonzero differences with replacement
    Draws,
}

#[derive(Debug, Args)]
pub struct IntersectiveArgs {
    #[arg(long = "N")]
    pub modulus: usize,
    #[arg(long)]
    pub ell: usize,
    #[arg(long)]
    pub alpha: f64,
    /// Comma-separated differences; decides this set (empty string for none)
    #[arg(long = "D")]
    pub diffs: Option<String>,
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Bernoulli model only: also weight all 2^(N-1) difference sets
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct BoundEvalArgs {
    /// One value or a comma-separated list
    #[arg(long)]
    pub n: String,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub t: usize,
}
