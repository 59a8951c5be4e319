//! `dbar` — planar ∂̄ problems from the command line.
//!
//! Four subcommands drive the library: `eval-op` evaluates one singular
//! integral operator at one point, `solve` produces the potential
//! `u = Tf` with its derivative pair and a finite-difference ∂̄ check on
//! a grid, `verify` runs the verification suites, and `converge` emits
//! cost/accuracy ladders. See the `commands` module for the output
//! schemas and the `grammar` module for the flag grammar.
//!
//! # Exit codes
//!
//! | Code | Meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | verification failure or a numerical failure at runtime |
//! | 2 | usage or config error (unknown flags, bad grammar, rejected parameters) |
//!
//! The classification mirrors the error vocabulary: errors that say the
//! *request* was malformed or outside the method's scope (invalid
//! arguments, unsupported domain kinds, rejected orders, points outside
//! the intended domain) exit 2; errors that arise *inside* an accepted
//! computation (non-convergence, detected divergence, inconsistent
//! cross-checks, degenerate fits) exit 1.

mod commands;
mod grammar;

use clap::{Parser, Subcommand};
use dbar_core::error::DbarError;

/// Command-line surface of the binary.
#[derive(Parser)]
#[command(
    name = "dbar",
    version,
    about = "Singular integral operators and the dbar equation on bounded planar domains",
    long_about = "Evaluates the Cauchy-Pompeiu transform and its companion singular integral \
                  operators, solves dbar(u) = f with certified derivative data, runs the \
                  verification suites, and tabulates quadrature convergence.\n\n\
                  Domains, fields, and points use a compact kind:params grammar, e.g.\n    \
                  dbar eval-op --op phi --domain ellipse:2,1 --point 0,0\n    \
                  dbar solve --domain disk:0,0.5 --field f_nu:2 --grid 9x9 --nu 2 --out u.csv\n    \
                  dbar verify --suite phi_disk --out report.json\n    \
                  dbar converge --kind cauchy --domain disk:0,0.5 --field f_nu:2 --point 0.1,0"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Subcommand dispatch table.
#[derive(Subcommand)]
enum Command {
    /// Evaluate one integral operator at one interior point.
    EvalOp(commands::EvalOpArgs),
    /// Solve dbar(u) = f on interior points and tabulate the solution.
    Solve(commands::SolveArgs),
    /// Run verification suites and emit their JSON reports.
    Verify(commands::VerifyArgs),
    /// Tabulate operator values across a doubling resolution ladder.
    Converge(commands::ConvergeArgs),
}

/// Maps an error to the documented exit code: usage-shaped errors exit
/// 2, runtime numerical failures exit 1.
fn exit_code(err: &DbarError) -> i32 {
    match err {
        DbarError::InvalidArgument(_)
        | DbarError::UnsupportedKind(_)
        | DbarError::InvalidCenter(_)
        | DbarError::OutOfIntendedDomain(_)
        | DbarError::Rejected(_) => 2,
        _ => 1,
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::EvalOp(args) => commands::eval_op(args),
        Command::Solve(args) => commands::solve(args),
        Command::Verify(args) => commands::verify(args),
        Command::Converge(args) => commands::converge(args),
    };
    let code = outcome.unwrap_or_else(|err| {
        eprintln!("error: {err}");
        exit_code(&err)
    });
    std::process::exit(code);
}
