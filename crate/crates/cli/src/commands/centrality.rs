use anyhow::{bail, Result};
use clap::Args;
use hijack_core::analysis::{curve_from_routes, eclair_hijack_metrics, route_pairs, TargetSet};
use hijack_core::routing::PolicyKind;
use serde::Serialize;

use super::{rng, Setup};
use crate::config::{CommonArgs, PolicyArgs};
use crate::output::{write_results, Row};

#[derive(Args, Debug)]
pub struct CentralityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Largest colluding set.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
}

#[derive(Serialize)]
pub(crate) struct CurveRow {
    pub amount: u64,
    pub k: usize,
    pub node: String,
    pub fraction: f64,
    routable: usize,
    unroutable: usize,
    eclair_best: Option<f64>,
    eclair_all_top3: Option<f64>,
    eclair_expected: Option<f64>,
}

impl Row for CurveRow {
    const HEADER: &'static [&'static str] = &[
        "amount",
        "k",
        "node",
        "fraction",
        "routable",
        "unroutable",
        "eclair_best",
        "eclair_all_top3",
        "eclair_expected",
    ];
}

#[derive(Serialize)]
struct Knobs {
    k: usize,
}

/// The centrality curve at each amount. Under Eclair every prefix of the
/// curve is also scored against each pair's ranked routes.
pub(crate) fn curve_rows(
    setup: &Setup,
    common: &CommonArgs,
    policy: &hijack_core::RoutingPolicy,
    k: usize,
) -> Result<Vec<CurveRow>> {
    if k == 0 {
        bail!("--k must be positive");
    }
    let eclair = matches!(policy.kind, PolicyKind::Eclair(_));
    let mut rows = Vec::new();
    for (i, &amount) in common.amounts.iter().enumerate() {
        let pairs = setup.pairs(common, amount)?;
        let routes = route_pairs(
            &setup.graph,
            policy,
            &pairs,
            &mut rng(common.seed, i as u64),
        )?;
        let curve = curve_from_routes(&routes, setup.graph.node_count(), k);
        let mut members = Vec::new();
        for p in &curve.points {
            members.push(p.node);
            let metrics = if eclair {
                Some(eclair_hijack_metrics(
                    &setup.graph,
                    policy,
                    &TargetSet::nodes(members.iter().copied()),
                    &pairs,
                )?)
            } else {
                None
            };
            rows.push(CurveRow {
                amount,
                k: p.k,
                node: setup.graph.node_id(p.node).to_string(),
                fraction: p.fraction,
                routable: curve.routable_count,
                unroutable: curve.unroutable_count,
                eclair_best: metrics.map(|m| m.best_route_fraction),
                eclair_all_top3: metrics.map(|m| m.all_top3_fraction),
                eclair_expected: metrics.map(|m| m.expected_fraction),
            });
        }
    }
    Ok(rows)
}

pub fn run(args: &CentralityArgs) -> Result<()> {
    let c = &args.common;
    let setup = Setup::load(c)?;
    let policy = args.policy.resolve()?;
    let rows = curve_rows(&setup, c, &policy, args.k)?;
    let config = setup.resolved(c, &policy, Knobs { k: args.k });
    write_results(&c.out, &rows, "centrality", c.seed, &config, ())
}
