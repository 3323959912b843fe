use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use hijack_core::attack::{fuzz_robustness, AttackPlan};
use hijack_core::routing::{CLightningParams, PolicyKind};
use hijack_core::{PairSample, RoutingPolicy};
use serde::Serialize;

use super::attack::{load_plans, train, TrainArgs};
use super::{rng, Setup};
use crate::config::CommonArgs;
use crate::output::{write_results, Row};

#[derive(Args, Debug)]
pub struct FuzzArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    /// Fee fuzz rates to evaluate.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.05])]
    pub fuzz_rates: Vec<f64>,
    /// Salts per rate.
    #[arg(long, default_value_t = 4)]
    pub trials: usize,
    /// Plans from `attack --plan-out`, trained without fuzz, instead of
    /// training here.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[arg(long)]
    pub max_hops: Option<usize>,
}

#[derive(Serialize)]
struct FuzzRow {
    amount: u64,
    fuzz: f64,
    mean_fraction: f64,
    stddev: f64,
    trials: usize,
}

impl Row for FuzzRow {
    const HEADER: &'static [&'static str] =
        &["amount", "fuzz", "mean_fraction", "stddev", "trials"];
}

#[derive(Serialize)]
struct Knobs<'a> {
    train: &'a TrainArgs,
    fuzz_rates: &'a [f64],
    trials: usize,
    plan: &'a Option<PathBuf>,
}

pub fn run(args: &FuzzArgs) -> Result<()> {
    let c = &args.common;
    if args.trials == 0 {
        bail!("--trials must be positive");
    }
    if let Some(f) = args.fuzz_rates.iter().find(|f| !(0.0..1.0).contains(*f)) {
        bail!("fuzz rates must lie in [0, 1), got {f}");
    }
    let setup = Setup::load(c)?;
    let mut policy = RoutingPolicy::new(PolicyKind::CLightning(CLightningParams {
        fuzz: 0.0,
        ..CLightningParams::default()
    }));
    if let Some(h) = args.max_hops {
        policy.limits.max_hops = h;
    }
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
    let mut rows = Vec::new();
    for (i, (pairs, plan)) in runs.iter().enumerate() {
        let points = fuzz_robustness(
            &setup.graph,
            plan,
            &args.fuzz_rates,
            args.trials,
            pairs,
            &mut rng(c.seed, 3000 + i as u64),
        )?;
        rows.extend(points.into_iter().map(|p| FuzzRow {
            amount: plan.amount,
            fuzz: p.fuzz,
            mean_fraction: p.mean_fraction,
            stddev: p.stddev,
            trials: args.trials,
        }));
    }
    let knobs = Knobs {
        train: &args.train,
        fuzz_rates: &args.fuzz_rates,
        trials: args.trials,
        plan: &args.plan,
    };
    let config = setup.resolved(c, &policy, knobs);
    write_results(&c.out, &rows, "fuzz", c.seed, &config, ())
}
