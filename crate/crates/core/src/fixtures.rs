//! Small reference topologies shared by tests, benchmarks and the CLI.

use rand::Rng;

use crate::graph::{
    pack_short_channel_id, AttackLink, Channel, ChannelGraph, ChannelPolicy, Msat, NodeId,
    NodeIndex,
};

/// Funding height of every fixture channel.
pub const FIXTURE_HEIGHT: u32 = 600_000;

/// Capacity of every fixture channel, 2^24 satoshi.
pub const FIXTURE_CAPACITY: Msat = (1 << 24) * 1000;

fn connect(g: &mut ChannelGraph, a: NodeIndex, b: NodeIndex, ab: ChannelPolicy, ba: ChannelPolicy) {
    let id = pack_short_channel_id(FIXTURE_HEIGHT, g.channel_count() as u64 + 1, 0).to_string();
    g.add_channel(Channel {
        id,
        node_a: a,
        node_b: b,
        capacity: FIXTURE_CAPACITY,
        height: FIXTURE_HEIGHT,
        policy_a_to_b: ab,
        policy_b_to_a: ba,
    })
    .expect("fixture channels are valid");
}

/// Two cliques `a0..` and `b0..` of `cluster_size` nodes joined by one
/// expensive channel between the gateways `a0` and `b0`.
///
/// Clique channels charge 1000 msat plus 1 ppm; the bridge charges
/// 10 000 msat plus 1 ppm. Every direction uses delay 144.
pub fn two_cluster_bridge(cluster_size: usize) -> ChannelGraph {
    assert!(cluster_size >= 2, "clusters need at least two nodes");
    let mut g = ChannelGraph::new();
    let a: Vec<NodeIndex> = (0..cluster_size)
        .map(|i| g.add_node(NodeId::new(format!("a{i}"))))
        .collect();
    let b: Vec<NodeIndex> = (0..cluster_size)
        .map(|i| g.add_node(NodeId::new(format!("b{i}"))))
        .collect();
    let local = ChannelPolicy::new(1000, 1, 144);
    for side in [&a, &b] {
        for i in 0..side.len() {
            for j in i + 1..side.len() {
                connect(&mut g, side[i], side[j], local, local);
            }
        }
    }
    let bridge = ChannelPolicy::new(10_000, 1, 144);
    connect(&mut g, a[0], b[0], bridge, bridge);
    g
}

/// The attacker's two zero-fee channels to the gateways of
/// [`two_cluster_bridge`].
pub fn two_cluster_attack_links() -> Vec<AttackLink> {
    ["a0", "b0"]
        .into_iter()
        .map(|peer| AttackLink {
            peer: NodeId::new(peer),
            policy: ChannelPolicy::new(0, 0, 9),
            capacity: FIXTURE_CAPACITY,
        })
        .collect()
}

/// Ordered cross-cluster pairs whose minimum-fee route pays the bridge fee:
/// neither endpoint is a gateway, since a sender never pays for its own
/// first channel and the bridge then costs it nothing.
pub fn two_cluster_bridge_pairs(graph: &ChannelGraph) -> Vec<(NodeIndex, NodeIndex)> {
    let side = |v: NodeIndex| graph.node_id(v).as_str().as_bytes()[0];
    let gateway = |v: NodeIndex| matches!(graph.node_id(v).as_str(), "a0" | "b0");
    let nodes: Vec<NodeIndex> = (0..graph.node_count())
        .filter(|&v| matches!(side(v), b'a' | b'b'))
        .collect();
    let mut pairs = Vec::new();
    for &s in &nodes {
        for &t in &nodes {
            if side(s) != side(t) && !gateway(s) {
                pairs.push((s, t));
            }
        }
    }
    pairs
}

/// Five nodes `s`, `t`, `h` (honest) and `x` (attacker-owned) where each
/// direction between `s` and `t` has exactly four loop-free routes, three of
/// which form Eclair's top three; two of those three cross `x`.
///
/// From `s` the cheapest route crosses `x`; from `t` the cheapest avoids it.
pub fn eclair_top3_toy() -> ChannelGraph {
    let mut g = ChannelGraph::new();
    let s = g.add_node("s".into());
    let t = g.add_node("t".into());
    let h = g.add_node("h".into());
    let x = g.add_node("x".into());
    let p = |base| ChannelPolicy::new(base, 0, 144);
    // Directions leaving s or t are only ever first hops and cost nothing.
    connect(&mut g, s, x, p(1000), p(200));
    connect(&mut g, x, t, p(100), p(1000));
    connect(&mut g, s, h, p(1000), p(100));
    connect(&mut g, h, t, p(200), p(1000));
    connect(&mut g, h, x, p(300), p(300));
    g
}

/// Random connected multigraph on nodes `00..`: a random spanning tree plus
/// up to `extra` further channels. Fees, delays and capacities come from
/// small value sets so ties are common, and about 8% of directions are
/// disabled.
pub fn random_network<R: Rng>(rng: &mut R, n: usize, extra: usize) -> ChannelGraph {
    let mut g = ChannelGraph::new();
    for i in 0..n {
        g.add_node(NodeId::new(format!("{i:02}")));
    }
    let add = |g: &mut ChannelGraph, rng: &mut R, a: usize, b: usize| {
        let pol = |rng: &mut R| {
            if rng.random_bool(0.08) {
                ChannelPolicy::disabled()
            } else {
                ChannelPolicy::new(
                    [0, 1, 100, 1000, 1000, 5000][rng.random_range(0..6)],
                    [0, 1, 100, 1000][rng.random_range(0..4)],
                    [9, 40, 144, 144, 2016][rng.random_range(0..5)],
                )
            }
        };
        let height = 590_000 + rng.random_range(0..10_000u32);
        let id = pack_short_channel_id(height, g.channel_count() as u64, 0).to_string();
        let capacity_sat = [50_000u64, 1_000_000, 16_000_000][rng.random_range(0..3)];
        let ab = pol(rng);
        let ba = pol(rng);
        g.add_channel(Channel {
            id,
            node_a: a,
            node_b: b,
            capacity: capacity_sat * 1000,
            height,
            policy_a_to_b: ab,
            policy_b_to_a: ba,
        })
        .unwrap();
    };
    for i in 1..n {
        let j = rng.random_range(0..i);
        add(&mut g, rng, j, i);
    }
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            add(&mut g, rng, a, b);
        }
    }
    g
}
