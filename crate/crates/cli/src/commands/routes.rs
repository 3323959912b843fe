use anyhow::Result;
use clap::Args;
use hijack_core::analysis::{route_pairs, Histogram};
use serde::Serialize;

use super::{rng, Setup};
use crate::config::{CommonArgs, PolicyArgs};
use crate::output::{write_results, Row};

#[derive(Args, Debug)]
pub struct RoutesArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Serialize)]
struct RouteRow {
    amount: u64,
    metric: &'static str,
    bucket: Option<u64>,
    count: usize,
}

impl Row for RouteRow {
    const HEADER: &'static [&'static str] = &["amount", "metric", "bucket", "count"];
}

#[derive(Serialize)]
struct Summary {
    amount: u64,
    routable: usize,
    unroutable: usize,
    median_hops: Option<usize>,
    median_fee_msat: Option<u64>,
}

pub fn run(args: &RoutesArgs) -> Result<()> {
    let c = &args.common;
    let setup = Setup::load(c)?;
    let policy = args.policy.resolve()?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (i, &amount) in c.amounts.iter().enumerate() {
        let pairs = setup.pairs(c, amount)?;
        let routes = route_pairs(&setup.graph, &policy, &pairs, &mut rng(c.seed, i as u64))?;
        let hops = Histogram::from_routes(&routes, |r| r.hops.len() as u64);
        let fees = Histogram::from_routes(&routes, |r| r.total_fee);
        for (metric, h) in [("hops", &hops), ("fee_msat", &fees)] {
            rows.extend(h.counts.iter().map(|(&bucket, &count)| RouteRow {
                amount,
                metric,
                bucket: Some(bucket),
                count,
            }));
        }
        rows.push(RouteRow {
            amount,
            metric: "unroutable",
            bucket: None,
            count: hops.unroutable,
        });
        summary.push(Summary {
            amount,
            routable: hops.routable(),
            unroutable: hops.unroutable,
            median_hops: hops.median().map(|h| h as usize),
            median_fee_msat: fees.median(),
        });
    }
    let config = setup.resolved(c, &policy, ());
    write_results(&c.out, &rows, "routes", c.seed, &config, &summary)
}
