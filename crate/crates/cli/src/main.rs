//! `hijack`: route-hijacking experiments on payment channel graphs.
//!
//! Every subcommand writes a CSV with a header row and a JSON sidecar
//! (`<out>.json`) holding the resolved configuration, its SHA-256 and the
//! seed. Output depends only on the arguments and input files.

mod commands;
mod config;
mod output;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::attack::AttackArgs;
use commands::centrality::CentralityArgs;
use commands::delay::DelayArgs;
use commands::fuzz::FuzzArgs;
use commands::game::GameArgs;
use commands::routes::RoutesArgs;
use commands::stats::StatsArgs;
use commands::suggested::SuggestedArgs;

#[derive(Parser, Debug)]
#[command(
    name = "hijack",
    version,
    about = "Route-hijacking experiments on payment channel graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fee, delay, capacity and degree histograms.
    Stats(StatsArgs),
    /// Path-length and fee distributions of chosen routes.
    Routes(RoutesArgs),
    /// Share of routes crossed by the most central colluding nodes.
    Centrality(CentralityArgs),
    /// Greedy channel placement for an outside attacker, with a random baseline.
    Attack(AttackArgs),
    /// A trained attack evaluated under C-lightning's fee fuzz.
    Fuzz(FuzzArgs),
    /// A trained attack replayed with larger attacker delays.
    Delay(DelayArgs),
    /// Centrality, attack and delay experiments under the suggested policy.
    Suggested(SuggestedArgs),
    /// Solution of the attacker/defender clique game.
    Game(GameArgs),
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Stats(a) => commands::stats::run(a),
        Command::Routes(a) => commands::routes::run(a),
        Command::Centrality(a) => commands::centrality::run(a),
        Command::Attack(a) => commands::attack::run(a),
        Command::Fuzz(a) => commands::fuzz::run(a),
        Command::Delay(a) => commands::delay::run(a),
        Command::Suggested(a) => commands::suggested::run(a),
        Command::Game(a) => commands::game::run(a),
    }
}
