//! Route selection under the lnd, C-lightning, Eclair and suggested weight
//! functions.
//!
//! Routes are searched backward from the target so the amount entering each
//! hop, downstream fees included, is known when the hop is weighed. The
//! sender's own first channel charges no fee and adds no delay.

mod cost;
mod search;
mod weights;
mod yen;

pub use cost::FailureMemory;
pub(crate) use cost::{arc_id, CostModel};
pub use search::{evaluate_path, find_route, routes_to_target};
pub(crate) use search::{routes_to_target_with, LabelSearch};
pub use weights::{
    channel_fee, clightning_scale, clightning_weight, eclair_factor, eclair_weight,
    lnd_edge_probability, lnd_weight, normalize, suggested_weight,
};
pub use yen::k_shortest_routes;
pub(crate) use yen::k_shortest_with;

use serde::{Deserialize, Serialize};

use crate::graph::{ChannelGraph, ChannelIndex, Direction, Msat, NodeIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Larger raw values normalize toward 1.
    Ascending,
    /// Larger raw values normalize toward 0.
    Descending,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub const fn new(lower: f64, upper: f64) -> Self {
        Bounds { lower, upper }
    }
}

/// Clamp windows and orientations shared by the Eclair and suggested weights.
///
/// Capacity is in satoshi and age is in blocks since funding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub delay: Bounds,
    pub capacity: Bounds,
    pub age: Bounds,
    pub delay_orientation: Orientation,
    pub capacity_orientation: Orientation,
    pub age_orientation: Orientation,
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization {
            delay: Bounds::new(9.0, 2016.0),
            capacity: Bounds::new(1000.0, (1u64 << 24) as f64),
            age: Bounds::new(0.0, 8640.0),
            delay_orientation: Orientation::Ascending,
            capacity_orientation: Orientation::Descending,
            age_orientation: Orientation::Descending,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LndParams {
    pub risk_factor: f64,
    pub probability_penalty: bool,
    pub apriori_probability: f64,
    /// Clock for failure-memory lookups, in seconds.
    pub now: u64,
}

impl Default for LndParams {
    fn default() -> Self {
        LndParams {
            risk_factor: 15e-9,
            probability_penalty: true,
            apriori_probability: 0.6,
            now: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CLightningParams {
    pub fuzz: f64,
    pub risk_factor: f64,
}

impl Default for CLightningParams {
    fn default() -> Self {
        CLightningParams {
            fuzz: 0.05,
            risk_factor: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EclairParams {
    pub delay_ratio: f64,
    pub capacity_ratio: f64,
    pub age_ratio: f64,
    pub top_k: usize,
    pub normalization: Normalization,
    /// Chain height used for channel age; the graph's tip when absent.
    pub current_height: Option<u32>,
}

impl Default for EclairParams {
    fn default() -> Self {
        EclairParams {
            delay_ratio: 0.15,
            capacity_ratio: 0.5,
            age_ratio: 0.35,
            top_k: 3,
            normalization: Normalization::default(),
            current_height: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuggestedParams {
    pub sigma: f64,
    pub delay_ratio: f64,
    pub age_ratio: f64,
    pub capacity_ratio: f64,
    pub fee_ratio: f64,
    /// Weight per satoshi-block of capacity times age. No default.
    pub interest_ratio: f64,
    pub normalization: Normalization,
    pub current_height: Option<u32>,
}

impl SuggestedParams {
    pub fn new(interest_ratio: f64) -> Self {
        SuggestedParams {
            sigma: 0.2,
            delay_ratio: 0.5,
            age_ratio: 0.5,
            capacity_ratio: 0.3,
            fee_ratio: 100.0,
            interest_ratio,
            // The formula subtracts the capacity term itself, so capacity
            // normalizes upward here.
            normalization: Normalization {
                capacity_orientation: Orientation::Ascending,
                ..Normalization::default()
            },
            current_height: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PolicyKind {
    Lnd(LndParams),
    #[serde(rename = "clightning")]
    CLightning(CLightningParams),
    Eclair(EclairParams),
    Suggested(SuggestedParams),
}

/// Route admission thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteLimits {
    pub max_hops: usize,
    pub max_fee_base: Msat,
    /// Parts per million of the payment amount.
    pub max_fee_ppm: u64,
}

impl Default for RouteLimits {
    fn default() -> Self {
        RouteLimits {
            max_hops: 20,
            max_fee_base: 5000,
            max_fee_ppm: 50_000,
        }
    }
}

impl RouteLimits {
    pub fn max_fee(&self, amount: Msat) -> Msat {
        let prop = (amount as u128 * self.max_fee_ppm as u128 / 1_000_000) as u64;
        self.max_fee_base.saturating_add(prop)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutingPolicy {
    pub kind: PolicyKind,
    pub limits: RouteLimits,
}

impl RoutingPolicy {
    pub fn new(kind: PolicyKind) -> Self {
        RoutingPolicy {
            kind,
            limits: RouteLimits::default(),
        }
    }

    pub fn lnd() -> Self {
        Self::new(PolicyKind::Lnd(LndParams::default()))
    }

    pub fn clightning() -> Self {
        Self::new(PolicyKind::CLightning(CLightningParams::default()))
    }

    pub fn eclair() -> Self {
        Self::new(PolicyKind::Eclair(EclairParams::default()))
    }

    pub fn suggested(interest_ratio: f64) -> Self {
        Self::new(PolicyKind::Suggested(SuggestedParams::new(interest_ratio)))
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            PolicyKind::Lnd(_) => "lnd",
            PolicyKind::CLightning(_) => "clightning",
            PolicyKind::Eclair(_) => "eclair",
            PolicyKind::Suggested(_) => "suggested",
        }
    }

    /// The same policy with fuzz, top-k choice and Gaussian scaling removed.
    pub fn deterministic_core(&self) -> RoutingPolicy {
        let mut p = self.clone();
        match &mut p.kind {
            PolicyKind::Lnd(_) => {}
            PolicyKind::CLightning(c) => c.fuzz = 0.0,
            PolicyKind::Eclair(e) => e.top_k = 1,
            PolicyKind::Suggested(s) => s.sigma = 0.0,
        }
        p
    }

    /// True when routing consumes no randomness.
    pub fn is_deterministic(&self) -> bool {
        match &self.kind {
            PolicyKind::Lnd(_) => true,
            PolicyKind::CLightning(c) => c.fuzz == 0.0,
            PolicyKind::Eclair(e) => e.top_k <= 1,
            PolicyKind::Suggested(s) => s.sigma == 0.0,
        }
    }

    /// True when every hop weight is nondecreasing in the forwarded amount.
    /// The suggested weight divides the fee by the amount and is not.
    pub fn is_amount_monotone(&self) -> bool {
        !matches!(self.kind, PolicyKind::Suggested(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hop {
    pub channel: ChannelIndex,
    pub channel_id: String,
    pub direction: Direction,
    pub from: NodeIndex,
    pub to: NodeIndex,
    /// Amount carried over this channel.
    pub forwarded_amount: Msat,
    /// Fee charged by `from` for this hop; zero on the sender's own channel.
    pub fee: Msat,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub source: NodeIndex,
    pub target: NodeIndex,
    pub amount: Msat,
    pub hops: Vec<Hop>,
    pub total_fee: Msat,
    pub total_weight: f64,
    /// Sum of the delays of every hop after the first.
    pub total_delay: u32,
}

impl Route {
    /// Node sequence from source to target.
    pub fn nodes(&self) -> Vec<NodeIndex> {
        let mut v = Vec::with_capacity(self.hops.len() + 1);
        v.push(self.source);
        v.extend(self.hops.iter().map(|h| h.to));
        v
    }

    /// Nodes strictly between source and target.
    pub fn interior_nodes(&self) -> impl Iterator<Item = NodeIndex> + '_ {
        self.hops[..self.hops.len() - 1].iter().map(|h| h.to)
    }

    pub fn channels(&self) -> impl Iterator<Item = ChannelIndex> + '_ {
        self.hops.iter().map(|h| h.channel)
    }

    /// JSON with node and channel ids instead of indices.
    pub fn to_json(&self, graph: &ChannelGraph) -> serde_json::Value {
        let hops: Vec<serde_json::Value> = self
            .hops
            .iter()
            .map(|h| {
                serde_json::json!({
                    "channel_id": h.channel_id,
                    "from": graph.node_id(h.from).as_str(),
                    "to": graph.node_id(h.to).as_str(),
                    "forwarded_amount": h.forwarded_amount,
                    "fee": h.fee,
                    "weight": h.weight,
                })
            })
            .collect();
        serde_json::json!({
            "source": graph.node_id(self.source).as_str(),
            "target": graph.node_id(self.target).as_str(),
            "amount": self.amount,
            "hops": hops,
            "total_fee": self.total_fee,
            "total_weight": self.total_weight,
            "total_delay": self.total_delay,
        })
    }
}
