//! `aqec`: enumerators, identity checks, amplitude-damping feasibility and
//! permutation-invariant bound tables from the command line.

mod check_ad;
mod enumerate;
mod input;
mod table;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "aqec", version, about = "Channel-adapted weight enumerators and LP existence bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print A/B enumerators of a code under a channel, or its Shor-Laflamme enumerators.
    Enumerate(enumerate::Args),
    /// Run the enumerator identity checks on a code.
    Verify(verify::Args),
    /// Solve the multi-gamma amplitude-damping feasibility program.
    CheckAd(check_ad::Args),
    /// Upper bounds on the dimension of permutation-invariant codes.
    TablePi(table::Args),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Enumerate(a) => enumerate::run(&a),
        Command::Verify(a) => verify::run(&a),
        Command::CheckAd(a) => check_ad::run(&a),
        Command::TablePi(a) => table::run(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
