use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use hijack_core::game::{deviation_gains, expected};
use hijack_core::{
    clique_game_matrices, clique_game_solve, solve_bimatrix_2x2, verify_equilibrium, GameMatrices,
    GameParams, GameSolution, StrategyProfile,
};
use serde::Serialize;

use crate::output::{write_results, Row};

#[derive(Args, Debug)]
pub struct GameArgs {
    /// Value at stake.
    #[arg(long = "H")]
    pub h: f64,
    /// Liquidity cost per unit of capacity.
    #[arg(long = "I", default_value_t = 0.0)]
    pub i: f64,
    /// Clique size.
    #[arg(long = "V")]
    pub v: u32,
    /// Attacker channel budget.
    #[arg(long)]
    pub k: u32,
    /// Tolerance of the equilibrium check.
    #[arg(long, default_value_t = 1e-9)]
    pub eps: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct GameRow {
    solution: String,
    defender_direct: f64,
    attacker_direct: f64,
    attacker_value: f64,
    defender_gain: f64,
    attacker_gain: f64,
    equilibrium: bool,
}

impl Row for GameRow {
    const HEADER: &'static [&'static str] = &[
        "solution",
        "defender_direct",
        "attacker_direct",
        "attacker_value",
        "defender_gain",
        "attacker_gain",
        "equilibrium",
    ];
}

#[derive(Serialize)]
struct Summary<'a> {
    solution: &'a GameSolution,
    matrices: &'a GameMatrices,
}

#[derive(Serialize)]
struct Config {
    params: GameParams,
    eps: f64,
}

/// The closed-form clique solution and every equilibrium of the payoff
/// matrices, each checked against pure deviations. The solutions and
/// matrices are also printed as JSON.
pub fn run(args: &GameArgs) -> Result<()> {
    let params = GameParams {
        h: args.h,
        i: args.i,
        v: args.v,
        k: args.k,
    };
    let m = clique_game_matrices(&params)?;
    let closed = clique_game_solve(&params)?;
    let row = |solution: String, p: &StrategyProfile, value: f64| {
        let (dg, ag) = deviation_gains(&m, p);
        GameRow {
            solution,
            defender_direct: p.defender_direct,
            attacker_direct: p.attacker_direct,
            attacker_value: value,
            defender_gain: dg,
            attacker_gain: ag,
            equilibrium: verify_equilibrium(&m, p, args.eps),
        }
    };
    let mut rows = vec![row(
        "closed_form".into(),
        &closed.profile,
        closed.attacker_value,
    )];
    for (j, p) in solve_bimatrix_2x2(&m).iter().enumerate() {
        let value = expected(
            &m.attacker,
            [p.defender_direct, 1.0 - p.defender_direct],
            [p.attacker_direct, 1.0 - p.attacker_direct],
        );
        rows.push(row(format!("equilibrium_{}", j + 1), p, value));
    }
    let summary = Summary {
        solution: &closed,
        matrices: &m,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    let config = Config {
        params,
        eps: args.eps,
    };
    write_results(&args.out, &rows, "game", 0, &config, &summary)
}
