//! `lcs-lab`: batch front-end writing JSON and CSV reports.
//!
//! Exit codes: 0 on success, 2 on a typed error (with an error JSON on
//! stdout), 1 on an internal failure, 64 on a usage error.

mod commands;

use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use commands::{CliError, SCHEMA};

const GRAMMAR: &str = "\
One-forms on T^n (flags --beta, --eta, --lambda0, --lambda1):

  form    = \"0\" | term { (\"+\" | \"-\") term } ;
  term    = [ number ] [ mul ] [ trig [ mul ] ] basis ;
  trig    = (\"cos\" | \"sin\") \"(\" linear \")\" ;
  linear  = lterm { (\"+\" | \"-\") lterm } ;
  lterm   = [ integer ] [ mul ] \"q\" [ index ] ;
  basis   = \"dq\" [ index ] ;
  mul     = \"*\" | \"·\" ;
  number  = decimal | integer \"/\" integer ;

`q` and `dq` abbreviate `q1` and `dq1`. Decimals are read exactly, so
0.1 is 1/10. Examples: \"dq1\", \"0.1 dq\", \"2 dq + 0.3 cos(2·q) dq\",
\"1/2 sin(q1 - q2) dq2\".

Exit codes: 0 ok, 2 typed error (error JSON on stdout), 1 internal
failure, 64 usage error.";

#[derive(Parser, Debug)]
#[command(name = "lcs-lab", version, about = "Novikov homology, conformal calculus, flows and generating families")]
#[command(after_help = GRAMMAR)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Novikov Betti numbers of a cell complex with an integral class.
    NovikovBetti(commands::NovikovArgs),
    /// Checks b_k = b_{n-k} on a closed manifold.
    DualityCheck(commands::NovikovArgs),
    /// Structural identities of T*_β T^n on a grid.
    #[command(after_help = GRAMMAR)]
    Identities(commands::IdentitiesArgs),
    /// Moser flow between two conformal symplectic forms on T^n.
    #[command(after_help = GRAMMAR)]
    Moser(commands::MoserArgs),
    /// Displacement of the zero section of T*_β T^n by the Lee flow.
    #[command(after_help = GRAMMAR)]
    Displace(commands::DisplaceArgs),
    /// β-critical points of a generating family.
    #[command(after_help = GRAMMAR)]
    GfCritical(commands::GfArgs),
    /// Compares β-critical points with the total Novikov rank.
    #[command(after_help = GRAMMAR)]
    TheoremCheck(commands::TheoremArgs),
    /// Morse–Novikov complex of f(θ)dθ on the circle.
    #[command(after_help = GRAMMAR)]
    CircleMn(commands::CircleArgs),
}

fn run(command: Command) -> Result<commands::Report, CliError> {
    match command {
        Command::NovikovBetti(a) => commands::novikov_betti(&a),
        Command::DualityCheck(a) => commands::duality_check(&a),
        Command::Identities(a) => commands::identities(&a),
        Command::Moser(a) => commands::moser(&a),
        Command::Displace(a) => commands::displace(&a),
        Command::GfCritical(a) => commands::gf_critical(&a),
        Command::TheoremCheck(a) => commands::theorem_check(&a),
        Command::CircleMn(a) => commands::circle_mn(&a),
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    match panic::catch_unwind(AssertUnwindSafe(|| run(cli.command).and_then(|r| r.write()))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            print_json(&json!({
                "schema": SCHEMA,
                "error": { "kind": e.kind(), "message": e.to_string() },
            }));
            ExitCode::from(2)
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            print_json(&json!({
                "schema": SCHEMA,
                "error": { "kind": "internal", "message": message },
            }));
            ExitCode::from(1)
        }
    }
}
