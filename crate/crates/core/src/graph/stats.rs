use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ChannelGraph;

/// Summary statistics of a channel graph.
///
/// Fee and delay histograms range over enabled directional policies
/// (`policy_count` of them). The capacity histogram buckets channels by
/// `floor(log2(capacity in satoshi))`. The degree distribution maps a degree
/// to the number of nodes having it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub node_count: usize,
    pub channel_count: usize,
    pub policy_count: usize,
    /// Millisatoshi.
    pub mean_channel_capacity: f64,
    /// Mean over nodes of the summed capacity of incident channels.
    pub mean_node_capacity: f64,
    pub base_fee_histogram: BTreeMap<u64, usize>,
    pub prop_fee_histogram: BTreeMap<u64, usize>,
    pub delay_histogram: BTreeMap<u32, usize>,
    pub capacity_histogram: BTreeMap<u32, usize>,
    pub degree_distribution: BTreeMap<usize, usize>,
}

pub fn compute_stats(graph: &ChannelGraph) -> NetworkStats {
    let mut base = BTreeMap::new();
    let mut prop = BTreeMap::new();
    let mut delay = BTreeMap::new();
    let mut cap = BTreeMap::new();
    let mut policy_count = 0;
    let mut total_capacity: u128 = 0;
    for ch in graph.channels() {
        total_capacity += ch.capacity as u128;
        *cap.entry(ch.capacity_sat().max(1).ilog2()).or_insert(0) += 1;
        for p in [&ch.policy_a_to_b, &ch.policy_b_to_a] {
            if p.enabled {
                policy_count += 1;
                *base.entry(p.base_fee).or_insert(0) += 1;
                *prop.entry(p.prop_fee).or_insert(0) += 1;
                *delay.entry(p.delay).or_insert(0) += 1;
            }
        }
    }
    let mut degrees = BTreeMap::new();
    for v in 0..graph.node_count() {
        *degrees.entry(graph.degree(v)).or_insert(0) += 1;
    }
    let mean = |total: f64, count: usize| {
        if count == 0 {
            0.0
        } else {
            total / count as f64
        }
    };
    NetworkStats {
        node_count: graph.node_count(),
        channel_count: graph.channel_count(),
        policy_count,
        mean_channel_capacity: mean(total_capacity as f64, graph.channel_count()),
        mean_node_capacity: mean(2.0 * total_capacity as f64, graph.node_count()),
        base_fee_histogram: base,
        prop_fee_histogram: prop,
        delay_histogram: delay,
        capacity_histogram: cap,
        degree_distribution: degrees,
    }
}
