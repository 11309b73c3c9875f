//! `menger`: command-line front end for the Menger workbench.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "menger", version, about = "Finite-model workbench for stabilizers of functional Menger systems")]
pub struct Cli {
    /// Address elements by label instead of index in set arguments.
    #[arg(long, global = true)]
    pub labels: bool,

    /// Upper bound for closures and transformation monoids.
    #[arg(long, global = true)]
    pub cap: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the axioms A1-A10 (meet axioms only with a meet table).
    Check { file: PathBuf },
    /// Subset properties of a set, including normal v-complexity.
    Props {
        file: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// The relations ζ and χ with their properties and the linking laws.
    Relations { file: PathBuf },
    /// Size of the transformation monoid T_n(G).
    Tn {
        file: PathBuf,
        /// Print every map as well.
        #[arg(long)]
        dump: bool,
    },
    /// Stages of the closure C_H[X].
    Closure {
        file: PathBuf,
        #[arg(long = "H")]
        h: String,
        #[arg(long = "X")]
        x: String,
    },
    /// Run one of the five stabilizer characterizations.
    Theorem {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
        number: u8,
        file: PathBuf,
        #[arg(long = "H")]
        h: String,
        /// The set U (theorems 1 and 4). Theorem 1 searches for one when absent; theorem 4 takes χ(H).
        #[arg(long = "U")]
        u: Option<String>,
        /// Stage bound for theorem 3.
        #[arg(long)]
        m: Option<usize>,
        /// Report every failing condition instead of stopping at the first.
        #[arg(long)]
        audit: bool,
    },
    /// Build a representation in which H is the stabilizer of a point.
    Witness {
        file: PathBuf,
        #[arg(long = "H")]
        h: String,
        #[arg(long, value_enum)]
        mode: WitnessKind,
        /// U for the meet construction; defaults to χ(H).
        #[arg(long = "U")]
        u: Option<String>,
    },
    /// Stabilizers of every point of a concrete system.
    Stabilizers { file: PathBuf },
    /// Generate instances and cross-check every characterization.
    Harness(HarnessArgs),
    /// Convert between concrete and abstract instance files.
    Convert { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WitnessKind {
    Theorem2,
    Theorem4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HarnessMode {
    Exhaustive,
    Random,
}

#[derive(Args, Debug)]
pub struct HarnessArgs {
    #[arg(long)]
    pub carrier: usize,
    #[arg(long)]
    pub arity: usize,
    #[arg(long, value_enum, default_value = "random")]
    pub mode: HarnessMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random mode: number of consecutive seeds.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 2)]
    pub generators: usize,
    /// Close the generated systems under intersection.
    #[arg(long)]
    pub meet: bool,
    /// Largest algebra whose subsets are all swept.
    #[arg(long)]
    pub sweep_max: Option<usize>,
    /// Write the JSON-lines report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
