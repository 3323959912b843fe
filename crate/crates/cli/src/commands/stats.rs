use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use hijack_core::graph::compute_stats;
use serde::Serialize;

use crate::config::{load_graph, GraphArgs, GraphSource};
use crate::output::{write_results, Row};

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Seed for synthetic graphs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct StatRow {
    section: &'static str,
    bucket: String,
    value: String,
}

impl Row for StatRow {
    const HEADER: &'static [&'static str] = &["section", "bucket", "value"];
}

#[derive(Serialize)]
struct Config {
    graph: GraphSource,
    seed: u64,
}

pub fn run(args: &StatsArgs) -> Result<()> {
    let (graph, source) = load_graph(&args.graph, args.seed)?;
    let s = compute_stats(&graph);
    let scalar = |section, value: String| StatRow {
        section,
        bucket: String::new(),
        value,
    };
    let mut rows = vec![
        scalar("node_count", s.node_count.to_string()),
        scalar("channel_count", s.channel_count.to_string()),
        scalar("policy_count", s.policy_count.to_string()),
        scalar(
            "mean_channel_capacity_msat",
            s.mean_channel_capacity.to_string(),
        ),
        scalar("mean_node_capacity_msat", s.mean_node_capacity.to_string()),
    ];
    let mut hist = |section, entries: Vec<(String, usize)>| {
        rows.extend(entries.into_iter().map(|(bucket, count)| StatRow {
            section,
            bucket,
            value: count.to_string(),
        }))
    };
    hist(
        "base_fee_msat",
        s.base_fee_histogram
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
    );
    hist(
        "prop_fee_ppm",
        s.prop_fee_histogram
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
    );
    hist(
        "delay_blocks",
        s.delay_histogram
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
    );
    hist(
        "capacity_log2_sat",
        s.capacity_histogram
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
    );
    hist(
        "degree",
        s.degree_distribution
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
    );
    let config = Config {
        graph: source,
        seed: args.seed,
    };
    write_results(&args.out, &rows, "stats", args.seed, &config, &s)
}
