#![allow(dead_code)]

use hijack_core::graph::pack_short_channel_id;
use hijack_core::routing::{
    channel_fee, clightning_weight, eclair_weight, lnd_weight, suggested_weight, PolicyKind,
};
use hijack_core::{
    Channel, ChannelGraph, ChannelIndex, ChannelPolicy, Direction, Msat, NodeId, NodeIndex,
    RoutingPolicy,
};

pub use hijack_core::fixtures::random_network as random_graph;

/// Every loop-free channel path from `s` to `t` with at most `max_hops` hops,
/// ignoring policies.
pub fn simple_paths(
    g: &ChannelGraph,
    s: NodeIndex,
    t: NodeIndex,
    max_hops: usize,
) -> Vec<Vec<(ChannelIndex, Direction)>> {
    fn walk(
        g: &ChannelGraph,
        at: NodeIndex,
        t: NodeIndex,
        max_hops: usize,
        visited: &mut Vec<NodeIndex>,
        path: &mut Vec<(ChannelIndex, Direction)>,
        out: &mut Vec<Vec<(ChannelIndex, Direction)>>,
    ) {
        if at == t {
            out.push(path.clone());
            return;
        }
        if path.len() == max_hops {
            return;
        }
        for &c in g.incident(at) {
            let ch = g.channel(c);
            let dir = ch.direction_from(at).unwrap();
            let (_, next) = ch.endpoints(dir);
            if visited.contains(&next) {
                continue;
            }
            visited.push(next);
            path.push((c, dir));
            walk(g, next, t, max_hops, visited, path, out);
            path.pop();
            visited.pop();
        }
    }
    let mut out = Vec::new();
    walk(g, s, t, max_hops, &mut vec![s], &mut Vec::new(), &mut out);
    out
}

/// Prices a path directly from the published formulas: amounts accumulate
/// backward from the target and the sender's own hop is free.
pub fn price(
    g: &ChannelGraph,
    policy: &RoutingPolicy,
    path: &[(ChannelIndex, Direction)],
    amount: Msat,
) -> Option<(f64, Msat)> {
    if path.is_empty() || path.len() > policy.limits.max_hops {
        return None;
    }
    let tip = g.tip_height();
    let mut amt = amount;
    let mut w = 0.0;
    for (i, &(c, dir)) in path.iter().enumerate().rev() {
        let ch = g.channel(c);
        let p = ch.policy(dir);
        if !p.enabled || amt > ch.capacity {
            return None;
        }
        let free = Channel {
            policy_a_to_b: ChannelPolicy::new(0, 0, 0),
            policy_b_to_a: ChannelPolicy::new(0, 0, 0),
            ..ch.clone()
        };
        let (hop_ch, fee) = if i == 0 {
            (&free, 0)
        } else {
            (ch, channel_fee(p, amt))
        };
        let hp = hop_ch.policy(dir);
        let hw = match &policy.kind {
            PolicyKind::Lnd(l) => lnd_weight(hp, amt, l.apriori_probability, l),
            PolicyKind::CLightning(c) => clightning_weight(hp, amt, 1.0, c),
            PolicyKind::Eclair(e) => {
                eclair_weight(hop_ch, dir, amt, e.current_height.unwrap_or(tip), e)
            }
            PolicyKind::Suggested(s) => {
                suggested_weight(hop_ch, dir, amt, s.current_height.unwrap_or(tip), 1.0, s).max(0.0)
            }
        };
        w += hw;
        amt += fee;
    }
    if amt - amount > policy.limits.max_fee(amount) {
        return None;
    }
    Some((w, amt - amount))
}

/// All admissible paths priced, lightest first.
pub fn ranked_paths(
    g: &ChannelGraph,
    policy: &RoutingPolicy,
    s: NodeIndex,
    t: NodeIndex,
    amount: Msat,
) -> Vec<(f64, Vec<(ChannelIndex, Direction)>)> {
    let mut v: Vec<_> = simple_paths(g, s, t, policy.limits.max_hops)
        .into_iter()
        .filter_map(|p| price(g, policy, &p, amount).map(|(w, _)| (w, p)))
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

pub fn deterministic_policies() -> Vec<RoutingPolicy> {
    let mut lnd = RoutingPolicy::lnd();
    if let PolicyKind::Lnd(l) = &mut lnd.kind {
        l.probability_penalty = false;
    }
    vec![
        lnd,
        RoutingPolicy::lnd(),
        RoutingPolicy::clightning().deterministic_core(),
        RoutingPolicy::eclair().deterministic_core(),
    ]
}

/// Graph on `n` nodes named `v0..` with one channel per listed edge, the same
/// policy in both directions and full fixture capacity.
pub fn graph_from_edges(
    n: usize,
    edges: &[(NodeIndex, NodeIndex)],
    policy: ChannelPolicy,
) -> ChannelGraph {
    let mut g = ChannelGraph::new();
    for i in 0..n {
        g.add_node(NodeId::new(format!("v{i}")));
    }
    for (i, &(a, b)) in edges.iter().enumerate() {
        g.add_channel(Channel {
            id: pack_short_channel_id(590_000, i as u64 + 1, 0).to_string(),
            node_a: a,
            node_b: b,
            capacity: (1 << 24) * 1000,
            height: 590_000,
            policy_a_to_b: policy,
            policy_b_to_a: policy,
        })
        .unwrap();
    }
    g
}
