//! Per-attempt arc costs.
//!
//! Every policy's hop weight has the shape
//! `amount * m + fee * f + fee / amount * r + add`, with the coefficients
//! fixed once the attempt's random draws are known. The sender's own channel
//! uses a separate amount-independent `first` weight.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::weights::{
    channel_fee, clightning_scale, eclair_factor_with_delay, lnd_edge_probability, suggested_base,
};
use super::{PolicyKind, RoutingPolicy};
use crate::graph::{ChannelGraph, ChannelIndex, Direction, Msat, NodeIndex};

/// lnd's record of the last failure per channel direction, in seconds.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FailureMemory {
    failures: BTreeMap<(ChannelIndex, Direction), u64>,
}

impl FailureMemory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_failure(&mut self, channel: ChannelIndex, direction: Direction, at: u64) {
        self.failures.insert((channel, direction), at);
    }

    pub fn last_failure(&self, channel: ChannelIndex, direction: Direction) -> Option<u64> {
        self.failures.get(&(channel, direction)).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.failures.is_empty()
    }
}

pub(crate) fn arc_id(channel: ChannelIndex, dir: Direction) -> u32 {
    (channel * 2 + usize::from(dir == Direction::BToA)) as u32
}

pub(crate) fn arc_channel(arc: u32) -> ChannelIndex {
    (arc / 2) as ChannelIndex
}

pub(crate) fn arc_direction(arc: u32) -> Direction {
    if arc.is_multiple_of(2) {
        Direction::AToB
    } else {
        Direction::BToA
    }
}

#[derive(Clone, Debug)]
pub(crate) struct ArcCost {
    pub from: u32,
    pub to: u32,
    pub usable: bool,
    pub base: Msat,
    pub prop: u64,
    pub capacity: Msat,
    pub delay: u32,
    m: f64,
    f: f64,
    r: f64,
    add: f64,
    first: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct CostModel {
    arcs: Vec<ArcCost>,
    clamp: bool,
}

impl CostModel {
    /// Draws the attempt's salt or Gaussian scales from `rng` as the policy
    /// requires. Deterministic policies draw nothing.
    pub fn prepare<R: Rng + ?Sized>(
        graph: &ChannelGraph,
        policy: &RoutingPolicy,
        rng: &mut R,
        memory: Option<&FailureMemory>,
    ) -> Self {
        match &policy.kind {
            PolicyKind::CLightning(c) if c.fuzz != 0.0 => {
                let salt: u64 = rng.random();
                Self::build(graph, policy, salt, None, memory)
            }
            PolicyKind::Suggested(s) if s.sigma != 0.0 => {
                let normal = Normal::new(1.0, s.sigma).expect("sigma is finite and positive");
                let scales = (0..graph.channel_count())
                    .map(|_| normal.sample(rng))
                    .collect();
                Self::build(graph, policy, 0, Some(scales), memory)
            }
            _ => Self::build(graph, policy, 0, None, memory),
        }
    }

    /// Costs of the policy's deterministic core.
    pub fn deterministic(graph: &ChannelGraph, policy: &RoutingPolicy) -> Self {
        Self::build(graph, &policy.deterministic_core(), 0, None, None)
    }

    fn build(
        graph: &ChannelGraph,
        policy: &RoutingPolicy,
        salt: u64,
        scales: Option<Vec<f64>>,
        memory: Option<&FailureMemory>,
    ) -> Self {
        let mut arcs = Vec::with_capacity(graph.channel_count() * 2);
        let clamp = matches!(policy.kind, PolicyKind::Suggested(_));
        for (c, ch) in graph.channels().iter().enumerate() {
            for dir in [Direction::AToB, Direction::BToA] {
                let p = ch.policy(dir);
                let (from, to) = ch.endpoints(dir);
                let mut usable = p.enabled;
                let (m, f, r, add, first) = match &policy.kind {
                    PolicyKind::Lnd(l) => {
                        let mut penalty = 0.0;
                        if l.probability_penalty {
                            let prob = match memory {
                                Some(mem) => {
                                    lnd_edge_probability(mem, c, dir, l.now, l.apriori_probability)
                                }
                                None => l.apriori_probability,
                            };
                            if prob <= 0.0 {
                                usable = false;
                            } else {
                                penalty = 100.0 / prob;
                            }
                        }
                        (p.delay as f64 * l.risk_factor, 1.0, 0.0, penalty, penalty)
                    }
                    PolicyKind::CLightning(cl) => {
                        let scale = clightning_scale(salt, &ch.id, cl.fuzz);
                        let dr = p.delay as f64 * cl.risk_factor;
                        (dr, scale * dr, 0.0, 1.0, 1.0)
                    }
                    PolicyKind::Eclair(e) => {
                        let h = e.current_height.unwrap_or(graph.tip_height());
                        (
                            0.0,
                            eclair_factor_with_delay(ch, p.delay, h, e),
                            0.0,
                            0.0,
                            0.0,
                        )
                    }
                    PolicyKind::Suggested(s) => {
                        let h = s.current_height.unwrap_or(graph.tip_height());
                        let scale = scales.as_ref().map_or(1.0, |v| v[c]).max(0.0);
                        let base = suggested_base(ch, p.delay, h, s);
                        let first = (scale * suggested_base(ch, 0, h, s)).max(0.0);
                        (0.0, 0.0, scale * s.fee_ratio, scale * base, first)
                    }
                };
                arcs.push(ArcCost {
                    from: from as u32,
                    to: to as u32,
                    usable,
                    base: p.base_fee,
                    prop: p.prop_fee,
                    capacity: ch.capacity,
                    delay: p.delay,
                    m,
                    f,
                    r,
                    add,
                    first,
                });
            }
        }
        CostModel { arcs, clamp }
    }

    pub fn arc(&self, arc: u32) -> &ArcCost {
        &self.arcs[arc as usize]
    }

    /// Fee and weight of carrying `amount` over `arc`, or `None` when the
    /// arc is unusable or too small. The sender's own hop is free.
    #[inline]
    pub fn hop(&self, arc: u32, amount: Msat, first: bool) -> Option<(Msat, f64)> {
        let a = &self.arcs[arc as usize];
        if !a.usable || amount > a.capacity {
            return None;
        }
        if first {
            return Some((0, a.first));
        }
        let fee = channel_fee(
            &crate::graph::ChannelPolicy::new(a.base, a.prop, a.delay),
            amount,
        );
        let fee_f = fee as f64;
        let mut w = amount as f64 * a.m + fee_f * a.f + a.add;
        if a.r != 0.0 {
            w += fee_f / amount as f64 * a.r;
        }
        if self.clamp && w < 0.0 {
            w = 0.0;
        }
        Some((fee, w))
    }

    /// Arcs leaving `node` whose direction is enabled.
    pub fn out_arcs<'g>(
        &'g self,
        graph: &'g ChannelGraph,
        node: NodeIndex,
    ) -> impl Iterator<Item = u32> + 'g {
        graph.incident(node).iter().filter_map(move |&c| {
            let dir = graph.channel(c).direction_from(node)?;
            let arc = arc_id(c, dir);
            self.arcs[arc as usize].usable.then_some(arc)
        })
    }
}
