//! Thin command-line front end over the knapcone library.

use clap::{Parser, Subcommand};
use knapcone::cli;
use knapcone::lattice::Strategy;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "knapcone",
    about = "Exact knapsack-cone decomposition, Sylvester denumerants, and constant-term extraction",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose one knapsack cone into unimodular-cone terms (JSON output)
    Decompose {
        /// instance file (JSON: {"format":1,"a0":...,"a":[...]})
        file: PathBuf,
        /// 1-based index of the underlined factor
        #[arg(long, default_value_t = 1)]
        index: usize,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        /// deterministic seed (overridden by KNAPCONE_SEED)
        #[arg(long)]
        seed: Option<u64>,
        /// output path (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
        /// include tree statistics in the output
        #[arg(long)]
        stats: bool,
    },
    /// Evaluate the Sylvester denumerant d(a0; a)
    Count {
        #[arg(long)]
        a0: u64,
        /// comma-separated positive integers with gcd 1
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<u64>,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Eliminate variables from an Elliott rational function (JSON in/out)
    Ct {
        file: PathBuf,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify claimed Frobenius numbers over a range
    Frobenius {
        /// builtin:cuww, builtin:prob, or comma-separated instance files
        suite: String,
        /// check d(F+i) for i = 1..=range
        #[arg(long, default_value_t = 100)]
        range: u64,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        #[arg(long)]
        seed: Option<u64>,
        /// include the ten-part instances
        #[arg(long)]
        slow: bool,
    },
    /// Emit cone-count statistics as CSV
    Bench {
        /// builtin:cuww, builtin:prob, builtin:random-table1, or files
        suite: String,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        #[arg(long)]
        out: Option<PathBuf>,
        /// zero the ms column for byte-reproducible output
        #[arg(long)]
        no_timing: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Decompose {
            file,
            index,
            strategy,
            seed,
            out,
            stats,
        } => cli::cmd_decompose(
            &file,
            index,
            strategy,
            cli::resolve_seed(seed),
            out.as_deref(),
            stats,
        ),
        Command::Count {
            a0,
            a,
            strategy,
            seed,
        } => cli::cmd_count(a0, &a, strategy, cli::resolve_seed(seed)),
        Command::Ct {
            file,
            strategy,
            out,
        } => cli::cmd_ct(&file, strategy, out.as_deref()),
        Command::Frobenius {
            suite,
            range,
            strategy,
            seed,
            slow,
        } => cli::cmd_frobenius(&suite, range, strategy, cli::resolve_seed(seed), slow),
        Command::Bench {
            suite,
            strategy,
            out,
            no_timing,
        } => cli::cmd_bench(&suite, strategy, out.as_deref(), no_timing),
    };
    std::process::exit(code);
}
