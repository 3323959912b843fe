use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use hijack_core::attack::{
    greedy_attack_with, random_baseline_curve_with, AttackConfig, AttackPlan, DistanceOracle,
    HijackMetric,
};
use hijack_core::graph::NodeId;
use hijack_core::{PairSample, RoutingPolicy};
use serde::Serialize;

use super::{rng, Setup};
use crate::config::{CommonArgs, PolicyArgs};
use crate::output::{write_results, Row};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricName {
    BestRoute,
    EclairExpected,
}

impl From<MetricName> for HijackMetric {
    fn from(m: MetricName) -> Self {
        match m {
            MetricName::BestRoute => HijackMetric::BestRoute,
            MetricName::EclairExpected => HijackMetric::EclairExpected,
        }
    }
}

/// How the attacker is trained.
#[derive(Args, Clone, Debug, Serialize)]
pub struct TrainArgs {
    /// Channel budget.
    #[arg(long, default_value_t = 30)]
    pub k: usize,
    /// Node id the attacker takes; must not be in the graph.
    #[arg(long, default_value = "attacker")]
    pub attacker: String,
    #[arg(long, value_enum, default_value_t = MetricName::BestRoute)]
    pub metric: MetricName,
}

impl TrainArgs {
    pub fn config(&self) -> AttackConfig {
        AttackConfig {
            attacker: NodeId::new(self.attacker.clone()),
            metric: self.metric.into(),
            ..AttackConfig::default()
        }
    }
}

#[derive(Args, Debug)]
pub struct AttackArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    /// Random-peer baseline trials per amount.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Also write the plans as a JSON array, one per amount.
    #[arg(long)]
    pub plan_out: Option<PathBuf>,
}

#[derive(Serialize)]
pub(crate) struct AttackRow {
    amount: u64,
    k: usize,
    peer: Option<String>,
    estimated_gain: Option<usize>,
    hijacked: Option<usize>,
    routable: Option<usize>,
    newly_routable: Option<usize>,
    core_fraction: Option<f64>,
    realized_fraction: Option<f64>,
    baseline_fraction: Option<f64>,
}

impl Row for AttackRow {
    const HEADER: &'static [&'static str] = &[
        "amount",
        "k",
        "peer",
        "estimated_gain",
        "hijacked",
        "routable",
        "newly_routable",
        "core_fraction",
        "realized_fraction",
        "baseline_fraction",
    ];
}

/// One trained attack.
pub(crate) struct Trained {
    pub pairs: PairSample,
    pub plan: AttackPlan,
    pub baseline: Vec<f64>,
}

/// Greedy plans at every amount, with the random baseline over `trials`.
pub(crate) fn train(
    setup: &Setup,
    common: &CommonArgs,
    policy: &RoutingPolicy,
    train: &TrainArgs,
    trials: usize,
) -> Result<Vec<Trained>> {
    if train.k == 0 {
        bail!("--k must be positive");
    }
    let config = train.config();
    let mut out = Vec::new();
    for (i, &amount) in common.amounts.iter().enumerate() {
        let pairs = setup.pairs(common, amount)?;
        let template = config.template(amount, &policy.limits);
        let oracle = DistanceOracle::build(&setup.graph, policy, &pairs, &template)?;
        let plan = greedy_attack_with(
            &oracle,
            train.k,
            config.metric,
            &mut rng(common.seed, 1000 + i as u64),
        )?;
        let baseline = if trials == 0 {
            Vec::new()
        } else {
            random_baseline_curve_with(
                &oracle,
                train.k,
                trials,
                &mut rng(common.seed, 2000 + i as u64),
            )?
        };
        out.push(Trained {
            pairs,
            plan,
            baseline,
        });
    }
    Ok(out)
}

pub(crate) fn rows(trained: &[Trained]) -> Vec<AttackRow> {
    let mut rows = Vec::new();
    for t in trained {
        let len = t.plan.steps.len().max(t.baseline.len());
        for j in 0..len {
            let step = t.plan.steps.get(j);
            rows.push(AttackRow {
                amount: t.pairs.amount(),
                k: j + 1,
                peer: step.map(|s| s.peer.to_string()),
                estimated_gain: step.map(|s| s.estimated_gain),
                hijacked: step.map(|s| s.hijacked),
                routable: step.map(|s| s.routable),
                newly_routable: step.map(|s| s.newly_routable),
                core_fraction: step.map(|s| s.core_fraction),
                realized_fraction: step.map(|s| s.realized_fraction),
                baseline_fraction: t.baseline.get(j).copied(),
            });
        }
    }
    rows
}

pub(crate) fn load_plans(path: &Path) -> Result<Vec<AttackPlan>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading plans {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing plans {}", path.display()))
}

#[derive(Serialize)]
struct Knobs<'a> {
    train: &'a TrainArgs,
    trials: usize,
}

#[derive(Serialize)]
struct Summary {
    amount: u64,
    pair_count: usize,
    initially_routable: usize,
    final_fraction: f64,
}

pub fn run(args: &AttackArgs) -> Result<()> {
    let c = &args.common;
    let setup = Setup::load(c)?;
    let policy = args.policy.resolve()?;
    let trained = train(&setup, c, &policy, &args.train, args.trials)?;
    if let Some(path) = &args.plan_out {
        let plans: Vec<&AttackPlan> = trained.iter().map(|t| &t.plan).collect();
        fs::write(path, serde_json::to_string_pretty(&plans)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let summary: Vec<Summary> = trained
        .iter()
        .map(|t| Summary {
            amount: t.plan.amount,
            pair_count: t.plan.pair_count,
            initially_routable: t.plan.initially_routable,
            final_fraction: t.plan.final_fraction(),
        })
        .collect();
    let config = setup.resolved(
        c,
        &policy,
        Knobs {
            train: &args.train,
            trials: args.trials,
        },
    );
    write_results(&c.out, &rows(&trained), "attack", c.seed, &config, &summary)
}
