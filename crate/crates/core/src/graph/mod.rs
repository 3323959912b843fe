//! Channel-graph data model.
//!
//! A [`ChannelGraph`] is a directed multigraph view over undirected payment
//! channels: every channel carries one [`ChannelPolicy`] per direction and a
//! direction is usable for routing only when its policy is enabled.
//!
//! Node and channel indices are stable for the lifetime of a graph value and
//! across [`ChannelGraph::add_attacker`]: new nodes and channels are appended.

mod snapshot;
mod stats;
mod synthetic;

pub use snapshot::{parse_snapshot, serialize_snapshot};
pub use stats::{compute_stats, NetworkStats};
pub use synthetic::{generate_synthetic, PolicySampler, SyntheticSpec};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Millisatoshi amount.
pub type Msat = u64;

/// Dense index of a node inside one [`ChannelGraph`].
pub type NodeIndex = usize;

/// Dense index of a channel inside one [`ChannelGraph`].
pub type ChannelIndex = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

/// One direction's forwarding terms.
///
/// `prop_fee` is a parts-per-million rate on the forwarded amount and `delay`
/// is the cltv delta in blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelPolicy {
    pub base_fee: Msat,
    pub prop_fee: u64,
    pub delay: u32,
    pub enabled: bool,
}

impl ChannelPolicy {
    pub fn new(base_fee: Msat, prop_fee: u64, delay: u32) -> Self {
        ChannelPolicy {
            base_fee,
            prop_fee,
            delay,
            enabled: true,
        }
    }

    /// A direction that cannot be used for routing.
    pub fn disabled() -> Self {
        ChannelPolicy {
            base_fee: 0,
            prop_fee: 0,
            delay: 0,
            enabled: false,
        }
    }
}

/// Direction of travel over a channel relative to its endpoint order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    AToB,
    BToA,
}

impl Direction {
    pub fn reverse(self) -> Self {
        match self {
            Direction::AToB => Direction::BToA,
            Direction::BToA => Direction::AToB,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub id: String,
    pub node_a: NodeIndex,
    pub node_b: NodeIndex,
    pub capacity: Msat,
    /// Funding block height.
    pub height: u32,
    pub policy_a_to_b: ChannelPolicy,
    pub policy_b_to_a: ChannelPolicy,
}

impl Channel {
    pub fn policy(&self, dir: Direction) -> &ChannelPolicy {
        match dir {
            Direction::AToB => &self.policy_a_to_b,
            Direction::BToA => &self.policy_b_to_a,
        }
    }

    pub fn policy_mut(&mut self, dir: Direction) -> &mut ChannelPolicy {
        match dir {
            Direction::AToB => &mut self.policy_a_to_b,
            Direction::BToA => &mut self.policy_b_to_a,
        }
    }

    /// `(from, to)` for travel in `dir`.
    pub fn endpoints(&self, dir: Direction) -> (NodeIndex, NodeIndex) {
        match dir {
            Direction::AToB => (self.node_a, self.node_b),
            Direction::BToA => (self.node_b, self.node_a),
        }
    }

    /// Direction that leaves `from`, if `from` is an endpoint.
    pub fn direction_from(&self, from: NodeIndex) -> Option<Direction> {
        if from == self.node_a {
            Some(Direction::AToB)
        } else if from == self.node_b {
            Some(Direction::BToA)
        } else {
            None
        }
    }

    pub fn capacity_sat(&self) -> u64 {
        self.capacity / 1000
    }
}

/// One channel to open from the attacker in [`ChannelGraph::add_attacker`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackLink {
    pub peer: NodeId,
    pub policy: ChannelPolicy,
    pub capacity: Msat,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChannelGraph {
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, NodeIndex>,
    channels: Vec<Channel>,
    adjacency: Vec<Vec<ChannelIndex>>,
    tip_height: u32,
}

impl ChannelGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn node_id(&self, ix: NodeIndex) -> &NodeId {
        &self.nodes[ix]
    }

    pub fn node_index(&self, id: &NodeId) -> Option<NodeIndex> {
        self.index.get(id).copied()
    }

    pub fn channel(&self, ix: ChannelIndex) -> &Channel {
        &self.channels[ix]
    }

    /// Channels incident to `node`, in insertion order.
    pub fn incident(&self, node: NodeIndex) -> &[ChannelIndex] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: NodeIndex) -> usize {
        self.adjacency[node].len()
    }

    /// Highest funding height seen; stands in for the current chain tip.
    pub fn tip_height(&self) -> u32 {
        self.tip_height
    }

    /// Adds a node if absent and returns its index either way.
    pub fn add_node(&mut self, id: NodeId) -> NodeIndex {
        if let Some(&ix) = self.index.get(&id) {
            return ix;
        }
        let ix = self.nodes.len();
        self.index.insert(id.clone(), ix);
        self.nodes.push(id);
        self.adjacency.push(Vec::new());
        ix
    }

    pub fn add_channel(&mut self, channel: Channel) -> Result<ChannelIndex, GraphError> {
        let n = self.nodes.len();
        if channel.node_a >= n || channel.node_b >= n {
            return Err(GraphError::UnknownNode(format!(
                "channel {} references a node index out of range",
                channel.id
            )));
        }
        if channel.node_a == channel.node_b {
            return Err(GraphError::SelfLoop(channel.id));
        }
        if channel.capacity == 0 {
            return Err(GraphError::ZeroCapacity(channel.id));
        }
        let ix = self.channels.len();
        self.adjacency[channel.node_a].push(ix);
        self.adjacency[channel.node_b].push(ix);
        self.tip_height = self.tip_height.max(channel.height);
        self.channels.push(channel);
        Ok(ix)
    }

    /// Returns a copy of the graph with `attacker` present and one new
    /// channel per link. Parallel channels to the same peer are allowed.
    ///
    /// New channels are funded at the current tip height and carry the link
    /// policy in both directions.
    pub fn add_attacker(
        &self,
        attacker: &NodeId,
        links: &[AttackLink],
    ) -> Result<ChannelGraph, GraphError> {
        let mut peers = Vec::with_capacity(links.len());
        for link in links {
            let ix = self
                .node_index(&link.peer)
                .ok_or_else(|| GraphError::UnknownNode(link.peer.to_string()))?;
            peers.push(ix);
        }
        let mut next = self.clone();
        let a = next.add_node(attacker.clone());
        let tip = next.tip_height;
        for (link, peer) in links.iter().zip(peers) {
            if peer == a {
                return Err(GraphError::SelfLoop(format!("{attacker} -> {}", link.peer)));
            }
            let id = next.fresh_channel_id(tip);
            next.add_channel(Channel {
                id,
                node_a: a,
                node_b: peer,
                capacity: link.capacity,
                height: tip,
                policy_a_to_b: link.policy,
                policy_b_to_a: link.policy,
            })?;
        }
        Ok(next)
    }

    /// A packed short channel id at `height` not yet used in this graph.
    fn fresh_channel_id(&self, height: u32) -> String {
        // Attack channels occupy a high tx index range so they never collide
        // with snapshot or synthetic ids at the same height.
        let mut tx = 0x00F0_0000u64 + self.channels.len() as u64;
        loop {
            let id = pack_short_channel_id(height, tx & 0xFF_FFFF, 0).to_string();
            if !self.channels.iter().any(|c| c.id == id) {
                return id;
            }
            tx += 1;
        }
    }

    /// Rebuilds the adjacency index from the channel list. Used to check the
    /// incrementally maintained index.
    pub fn rebuilt_adjacency(&self) -> Vec<Vec<ChannelIndex>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (ix, ch) in self.channels.iter().enumerate() {
            adj[ch.node_a].push(ix);
            adj[ch.node_b].push(ix);
        }
        adj
    }

    pub fn adjacency(&self) -> &[Vec<ChannelIndex>] {
        &self.adjacency
    }
}

/// Packs a BOLT-7 short channel id.
pub fn pack_short_channel_id(block: u32, tx_index: u64, output: u64) -> u64 {
    ((block as u64) << 40) | ((tx_index & 0xFF_FFFF) << 16) | (output & 0xFFFF)
}

/// Funding block encoded in a numeric short channel id, if `id` is one.
pub fn short_channel_id_block(id: &str) -> Option<u32> {
    let v: u64 = id.parse().ok()?;
    Some((v >> 40) as u32)
}
