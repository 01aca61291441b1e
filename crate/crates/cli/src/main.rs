mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "nilcover", version, about = "Baer invariants and nilpotent stem covers of Z_r + Z_s")]
pub struct Cli {
    /// Print the JSON envelope instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Upper bound on Hall basis size.
    #[arg(long, global = true)]
    pub max_basis: Option<usize>,
    /// Upper bound on materialized group order.
    #[arg(long, global = true)]
    pub max_order: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate basic commutators.
    Hall(HallArgs),
    /// Hall normal form of a word in the free nilpotent group.
    Nf(NfArgs),
    /// Baer invariant of Z_r + Z_s for class c.
    Baer(BaerArgs),
    /// Check or materialize a power-commutator presentation.
    Pcp(PcpArgs),
    /// Stem-cover verdicts, constructions and searches.
    #[command(subcommand)]
    Cover(CoverCommand),
    /// Randomized property checks of the collector and engines.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct HallArgs {
    #[arg(long)]
    pub letters: u32,
    #[arg(long)]
    pub weight: u32,
    #[arg(long)]
    pub count_only: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct NfArgs {
    #[arg(long)]
    pub letters: u32,
    #[arg(long)]
    pub class: u32,
    /// Word such as "x1^2 [x2,x1]^-1 (x1 x2)^3".
    #[arg(long, allow_hyphen_values = true)]
    pub expr: String,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Formula,
    Engine,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct BaerArgs {
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub s: u64,
    #[arg(long)]
    pub c: u32,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
}

#[derive(Debug, Args, Serialize)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["check", "materialize"])))]
pub struct PcpArgs {
    #[arg(long)]
    pub file: std::path::PathBuf,
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub materialize: bool,
    /// With --materialize, include the Cayley table.
    #[arg(long, requires = "materialize")]
    pub table: bool,
}

#[derive(Debug, Subcommand)]
pub enum CoverCommand {
    /// Decide whether a stem cover exists, with evidence.
    Verdict(CoverArgs),
    /// Build and verify the class-1 covering group.
    Construct(ConstructArgs),
    /// Exhaustive search over presentations of the cover order.
    Search(SearchArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CoverArgs {
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub s: u64,
    #[arg(long)]
    pub c: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructArgs {
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub s: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub s: u64,
    #[arg(long)]
    pub c: u32,
    /// Prime of the presentations; defaults to r.
    #[arg(long)]
    pub p: Option<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct SelftestArgs {
    /// Random trials per check.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { output::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(commands::dispatch(&cli))
}
