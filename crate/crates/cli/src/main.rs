//! `fqm`: batch analysis of even lattices and their discriminant forms.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Failure;

#[derive(Parser)]
#[command(name = "fqm", version, about = "Discriminant forms, Weil representations and lift hypotheses of even lattices")]
struct Cli {
    /// Working precision for certified enclosures.
    #[arg(long, global = true, env = "FQM_PRECISION_BITS", default_value_t = 128)]
    precision_bits: u32,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Lattice JSON `{"gram": [[...]]}`, or `-` for stdin.
    input: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Profile, discriminant form, classification, Weil relations and converse checks.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Skip the Weil relation check above this order of `A`.
        #[arg(long, default_value_t = 400)]
        max_weil_order: u64,
    },
    /// Exact Weil matrices and relation report; `--gamma a,b,c,d` adds rho(gamma).
    Weil {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        gamma: Option<Vec<i64>>,
    },
    /// Gauss sum `g_d(A)` and the Milgram signature.
    Gauss {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        d: i64,
    },
    /// Coset theta coefficients, optionally with the modular transformation check.
    Theta {
        #[command(flatten)]
        input: Input,
        /// Largest exponent (rational, e.g. `5` or `7/3`).
        #[arg(long)]
        n_max: Option<String>,
        /// Sample points `re,im` for the transformation check.
        #[arg(long = "tau")]
        tau: Vec<String>,
        /// Negative definite subspace for indefinite lattices, vectors
        /// separated by `;`, entries by `,`.
        #[arg(long)]
        split: Option<String>,
        /// Coefficient box for indefinite lattices.
        #[arg(long)]
        bound: Option<u32>,
        #[arg(long)]
        csv: bool,
    },
    /// Hypotheses of the converse theorem; exit 2 on failure.
    CheckConverse {
        #[command(flatten)]
        input: Input,
        /// Search bound for the hyperbolic splitting witness.
        #[arg(long, default_value_t = 3)]
        bound: u32,
    },
    /// Reflectivity of a principal part; exit 2 on failure.
    Reflective {
        #[command(flatten)]
        input: Input,
        /// Principal part JSON `{"c00": "a/b", "terms": [...]}`.
        #[arg(long)]
        principal_part: PathBuf,
        /// Accept positive rational coefficients.
        #[arg(long)]
        relaxed_integrality: bool,
        /// Symmetrize over O(A) before checking.
        #[arg(long)]
        symmetrize: bool,
    },
    /// Nonvanishing report and local constants; exit 2 unless every term is certified nonzero.
    Lfactor {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        m: i64,
        #[arg(long, default_value_t = 0)]
        l: i64,
        /// Primes to report, default all primes up to 50.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        /// Also assemble the L^2-norm constant with these inputs (`re` or `re,im`).
        #[arg(long)]
        c_s0: Option<String>,
        #[arg(long)]
        l_value: Option<String>,
        #[arg(long)]
        vol: Option<f64>,
        /// `L(m/2 - l + 2, chi_A)` if known; otherwise it is summed.
        #[arg(long)]
        l_chi_a: Option<String>,
        /// `jacobi` or `table:v0,v1,...`.
        #[arg(long, default_value = "jacobi")]
        chi_a: String,
    },
    /// Anisotropic modules of odd square-free order with singular weight data.
    Scan {
        #[arg(long)]
        max_order: u64,
        /// Signatures to pair with each module (mod 8 against Milgram).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        signatures: Vec<i64>,
        #[arg(long)]
        csv: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            if let Err(e) = commands::emit(&cli, &out.text) {
                eprintln!("fqm: {e}");
                return ExitCode::from(74);
            }
            ExitCode::from(if out.verdict_failed { 2 } else { 0 })
        }
        Err(Failure { code, message }) => {
            eprintln!("fqm: {message}");
            ExitCode::from(code)
        }
    }
}
