//! Command-line driver: constructions, bracket tables and checks with
//! reports in text, LaTeX or JSON.

mod jobs;
mod report;

use clap::{Args, Parser, Subcommand};
use report::Format;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sato", version, about = "Super Adler-type operators, W-superalgebras and their hierarchies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Even part of the index set.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Odd part of the index set.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Operator order.
    #[arg(long = "N", default_value_t = 2)]
    pub big_n: usize,
    /// Flow indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Truncation depth; defaults to k + N + 1.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Set the generators u_{N-1,ab} to zero in printed flows.
    #[arg(long)]
    pub reduced: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TableKind {
    W,
    H,
    K,
}

#[derive(Subcommand)]
enum Command {
    /// Generators w_{ij;k} of the rectangular W-superalgebra.
    Wgen {
        #[command(flatten)]
        common: Common,
        /// Also compare every W-bracket with the generic bracket.
        #[arg(long)]
        verify_iso: bool,
    },
    /// A bracket table on generators.
    Brackets {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = TableKind::W)]
        kind: TableKind,
    },
    /// Skew-symmetry and Jacobi for the generic H, K and H + εK tables.
    CheckPvsa {
        #[command(flatten)]
        common: Common,
    },
    /// Adler identity for the affine, generic, inverse and submatrix operators.
    VerifyAdler {
        #[command(flatten)]
        common: Common,
    },
    /// Hamiltonian densities and H-flows of the generic operator.
    Hierarchy {
        #[command(flatten)]
        common: Common,
    },
    /// Lenard–Magri recursion up to the largest given k.
    LenardMagri {
        #[command(flatten)]
        common: Common,
        /// Depth added to each default depth.
        #[arg(long, default_value_t = 0)]
        extra_depth: usize,
    },
    /// Conservation of h_{k'} along t_k and commutation of flows.
    Conservation {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::Wgen { common, verify_iso } => (common, jobs::wgen(common, *verify_iso)),
        Command::Brackets { common, kind } => (common, jobs::brackets(common, *kind)),
        Command::CheckPvsa { common } => (common, jobs::check_pvsa(common)),
        Command::VerifyAdler { common } => (common, jobs::verify_adler(common)),
        Command::Hierarchy { common } => (common, jobs::hierarchy(common)),
        Command::LenardMagri { common, extra_depth } => (common, jobs::lenard_magri(common, *extra_depth)),
        Command::Conservation { common } => (common, jobs::conservation(common)),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = report.render(common.format);
    let written = match &common.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
