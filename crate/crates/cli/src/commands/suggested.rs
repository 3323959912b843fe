use anyhow::Result;
use clap::Args;
use serde::Serialize;

use super::attack::{train, TrainArgs};
use super::centrality::curve_rows;
use super::delay::{sweep_rows, DEFAULT_DELAYS};
use super::Setup;
use crate::config::{CommonArgs, PolicyArgs, PolicyName};
use crate::output::{write_results, Row};

#[derive(Args, Debug)]
pub struct SuggestedArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    /// Largest colluding set for the centrality curve.
    #[arg(long, default_value_t = 10)]
    pub centrality_k: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_DELAYS)]
    pub delays: Vec<u32>,
}

#[derive(Serialize)]
struct SuggestedRow {
    experiment: &'static str,
    amount: u64,
    x: u64,
    node: Option<String>,
    fraction: f64,
}

impl Row for SuggestedRow {
    const HEADER: &'static [&'static str] = &["experiment", "amount", "x", "node", "fraction"];
}

#[derive(Serialize)]
struct Knobs<'a> {
    train: &'a TrainArgs,
    centrality_k: usize,
    trials: usize,
    delays: &'a [u32],
}

/// Centrality, attack with baseline, and delay sweep, all under the
/// suggested policy. `x` is the set size or the delay.
pub fn run(args: &SuggestedArgs) -> Result<()> {
    let c = &args.common;
    let setup = Setup::load(c)?;
    let policy = args.policy.resolve_as(PolicyName::Suggested)?;
    let mut rows = Vec::new();
    for r in curve_rows(&setup, c, &policy, args.centrality_k)? {
        rows.push(SuggestedRow {
            experiment: "centrality",
            amount: r.amount,
            x: r.k as u64,
            node: Some(r.node),
            fraction: r.fraction,
        });
    }
    let trained = train(&setup, c, &policy, &args.train, args.trials)?;
    for t in &trained {
        let amount = t.pairs.amount();
        for (j, s) in t.plan.steps.iter().enumerate() {
            rows.push(SuggestedRow {
                experiment: "attack",
                amount,
                x: j as u64 + 1,
                node: Some(s.peer.to_string()),
                fraction: s.realized_fraction,
            });
        }
        for (j, &f) in t.baseline.iter().enumerate() {
            rows.push(SuggestedRow {
                experiment: "baseline",
                amount,
                x: j as u64 + 1,
                node: None,
                fraction: f,
            });
        }
    }
    let runs: Vec<_> = trained.into_iter().map(|t| (t.pairs, t.plan)).collect();
    for r in sweep_rows(&setup, &policy, &runs, &args.delays)? {
        rows.push(SuggestedRow {
            experiment: "delay",
            amount: r.amount,
            x: r.delay as u64,
            node: None,
            fraction: r.fraction,
        });
    }
    let knobs = Knobs {
        train: &args.train,
        centrality_k: args.centrality_k,
        trials: args.trials,
        delays: &args.delays,
    };
    let config = setup.resolved(c, &policy, knobs);
    write_results(&c.out, &rows, "suggested", c.seed, &config, ())
}
