//! `stratsym`: reports on the shipped symplectic and Poisson models.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Failure;

#[derive(Debug, Parser)]
#[command(name = "stratsym", version, about = "Symplectic homology, Lefschetz and flow reports")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Builtin model name or path to a TOML model file.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Seed for randomized inputs.
    #[arg(long, global = true, default_value_t = stratsym::sample::DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for graded-piece computations.
    #[arg(long, global = true, env = "STRATSYM_THREADS")]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format (default json; `export` defaults to TOML).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the builtin models.
    List,
    /// Write a model in the model-file format.
    Export,
    /// Betti numbers of d and δ and the duality verdict.
    Homology {
        /// Restrict the duality comparison to this degree.
        #[arg(long)]
        degree: Option<usize>,
        /// Total-degree bound for coordinate charts (default 2n).
        #[arg(long)]
        total_degree: Option<usize>,
    },
    /// Hard Lefschetz, harmonic representatives and the Cavalcanti identity.
    Lefschetz {
        /// Check hard Lefschetz for this k only.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Integrate a Hamiltonian flow on a Poisson model.
    Flow {
        /// Hamiltonian polynomial; defaults to the model's first.
        #[arg(long)]
        hamiltonian: Option<String>,
        /// Comma-separated initial generator values; defaults to (1, 0, ..., 0).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        initial: Option<Vec<f64>>,
        #[arg(long, default_value_t = 20.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
    },
    /// Partition of unity on the 1-D cone `t ≥ 0` from an apex and a regular bump.
    Pou {
        #[arg(long, default_value = "1")]
        epsilon: String,
        /// Regular bump centre.
        #[arg(long, default_value = "1")]
        center: String,
        /// Grid points on [0, 1.5].
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Fiber-constancy membership on local coordinates `(x, y, z)`.
    Membership {
        /// Polynomial in x1.., y1.., z1..; random seeded samples when absent.
        #[arg(long)]
        poly: Option<String>,
        /// `n,k,l` with l ≤ k ≤ n.
        #[arg(long, value_delimiter = ',', default_value = "3,2,1")]
        dims: Vec<usize>,
        /// Maximum degree of random samples.
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict) => ExitCode::from(1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
