mod commands;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dgk_core::Field;

use commands::Context;

#[derive(Parser)]
#[command(name = "dgk", version, about = "Checks DG quotients, Euler forms and numerical K-groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Coefficient field, `Q` or `Fp:<prime>`; overrides the input file.
    #[arg(long, global = true)]
    field: Option<Field>,
}

#[derive(Subcommand)]
enum Command {
    /// Gram matrix of the Euler form on a list of generators.
    ChiGram {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated generators such as `x,y[1]`; defaults to all representables.
        #[arg(long)]
        generators: Option<String>,
    },
    /// Kernels of the Euler form and the numerical Grothendieck group.
    Numk {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        generators: Option<String>,
    },
    /// H0 of the hom complexes of a Drinfeld quotient.
    Quotient {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// K0 and numerical sequences of a triple.
    VerifySequence {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Serre matrix compatibility with the Euler form.
    VerifySerre {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        generators: Option<String>,
    },
    /// Smith normal form of an integer matrix.
    Snf {
        #[arg(long)]
        input: PathBuf,
    },
    /// Validates seeded random categories and their quotients.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: u64,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

fn ctx(input: &Path, field: Option<Field>, depth: Option<usize>) -> Context<'_> {
    Context { input, field, depth }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let field = cli.field;
    let outcome = match &cli.command {
        Command::ChiGram { input, generators } => commands::chi_gram(&ctx(input, field, None), generators.as_deref()),
        Command::Numk { input, generators } => commands::numk(&ctx(input, field, None), generators.as_deref()),
        Command::Quotient { input, depth } => commands::quotient(&ctx(input, field, *depth)),
        Command::VerifySequence { input, depth } => commands::verify_sequence(&ctx(input, field, *depth)),
        Command::VerifySerre { input, generators } => commands::verify_serre_cmd(&ctx(input, field, None), generators.as_deref()),
        Command::Snf { input } => commands::snf(&ctx(input, field, None)),
        Command::Fuzz { seed, cases, depth } => commands::fuzz(*seed, *cases, *depth, cli.field),
    };
    match outcome {
        Ok(o) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&o.json).expect("serializable"));
            } else {
                print!("{}", o.text);
            }
            match o.failure {
                None => ExitCode::SUCCESS,
                Some(reason) => {
                    eprintln!("ERROR: verification failed: {reason}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("ERROR: {e}");
            ExitCode::from(2)
        }
    }
}
