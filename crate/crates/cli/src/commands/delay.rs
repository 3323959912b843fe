use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use hijack_core::attack::{delay_sweep, AttackPlan};
use hijack_core::PairSample;
use serde::Serialize;

use super::attack::{load_plans, train, TrainArgs};
use super::Setup;
use crate::config::{CommonArgs, PolicyArgs};
use crate::output::{write_results, Row};

pub const DEFAULT_DELAYS: [u32; 6] = [9, 40, 80, 144, 200, 400];

#[derive(Args, Debug)]
pub struct DelayArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    /// Attacker channel delays in blocks.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_DELAYS)]
    pub delays: Vec<u32>,
    /// Plans from `attack --plan-out` instead of training here.
    #[arg(long)]
    pub plan: Option<PathBuf>,
}

#[derive(Serialize)]
pub(crate) struct DelayRow {
    pub amount: u64,
    pub delay: u32,
    pub fraction: f64,
}

impl Row for DelayRow {
    const HEADER: &'static [&'static str] = &["amount", "delay", "fraction"];
}

#[derive(Serialize)]
struct Knobs<'a> {
    train: &'a TrainArgs,
    delays: &'a [u32],
    plan: &'a Option<PathBuf>,
}

pub(crate) fn sweep_rows(
    setup: &Setup,
    policy: &hijack_core::RoutingPolicy,
    runs: &[(PairSample, AttackPlan)],
    delays: &[u32],
) -> Result<Vec<DelayRow>> {
    let mut rows = Vec::new();
    for (pairs, plan) in runs {
        for p in delay_sweep(&setup.graph, policy, plan, delays, pairs)? {
            rows.push(DelayRow {
                amount: plan.amount,
                delay: p.delay,
                fraction: p.fraction,
            });
        }
    }
    Ok(rows)
}

pub fn run(args: &DelayArgs) -> Result<()> {
    let c = &args.common;
    let setup = Setup::load(c)?;
    let policy = args.policy.resolve()?;
    let runs: Vec<(PairSample, AttackPlan)> = match &args.plan {
        Some(path) => load_plans(path)?
            .into_iter()
            .map(|p| Ok((setup.pairs(c, p.amount)?, p)))
            .collect::<Result<_>>()?,
        None => train(&setup, c, &policy, &args.train, 0)?
            .into_iter()
            .map(|t| (t.pairs, t.plan))
            .collect(),
    };
    let rows = sweep_rows(&setup, &policy, &runs, &args.delays)?;
    let knobs = Knobs {
        train: &args.train,
        delays: &args.delays,
        plan: &args.plan,
    };
    let config = setup.resolved(c, &policy, knobs);
    write_results(&c.out, &rows, "delay", c.seed, &config, ())
}
