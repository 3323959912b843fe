//! Backward multi-criteria label search.
//!
//! A label at node `v` describes a path `v -> ... -> target` by its weight,
//! the amount that must reach `v`, and its hop count. Because fees and
//! weights grow with the amount, only labels not dominated on all three are
//! kept. Routes from a source combine one of its channels, weighed as the
//! free first hop, with a label at the channel's far end.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::Rng;

use super::cost::{arc_channel, arc_direction, arc_id, CostModel};
use super::yen::k_shortest_with;
use super::{Hop, PolicyKind, Route, RouteLimits, RoutingPolicy};
use crate::error::RoutingError;
use crate::graph::{ChannelGraph, ChannelIndex, Direction, Msat, NodeIndex};
use crate::routing::FailureMemory;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Label {
    w: f64,
    amt: Msat,
    hops: u32,
    node: u32,
    parent: u32,
    arc: u32,
    arc_w: f64,
    fee: Msat,
    dead: bool,
}

#[derive(PartialEq)]
struct Key(f64, u32, u32);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .total_cmp(&other.0)
            .then(self.1.cmp(&other.1))
            .then(self.2.cmp(&other.2))
    }
}

/// A route from a source: its first arc and the label continuing it.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Candidate {
    pub first_arc: u32,
    pub label: u32,
    pub w: f64,
    pub hops: u32,
}

pub(crate) struct LabelSearch<'a> {
    graph: &'a ChannelGraph,
    cost: &'a CostModel,
    target: NodeIndex,
    amount: Msat,
    max_amount: Msat,
    max_label_hops: u32,
    banned: Option<&'a [bool]>,
    labels: Vec<Label>,
    front: Vec<Vec<u32>>,
    heap: BinaryHeap<Reverse<Key>>,
}

impl<'a> LabelSearch<'a> {
    /// `max_label_hops` bounds the hops of any label; routes add one hop.
    pub fn new(
        graph: &'a ChannelGraph,
        cost: &'a CostModel,
        target: NodeIndex,
        amount: Msat,
        limits: &RouteLimits,
        max_label_hops: usize,
        banned: Option<&'a [bool]>,
    ) -> Self {
        let mut s = LabelSearch {
            graph,
            cost,
            target,
            amount,
            max_amount: amount.saturating_add(limits.max_fee(amount)),
            max_label_hops: max_label_hops as u32,
            banned,
            labels: Vec::new(),
            front: vec![Vec::new(); graph.node_count()],
            heap: BinaryHeap::new(),
        };
        s.labels.push(Label {
            w: 0.0,
            amt: amount,
            hops: 0,
            node: target as u32,
            parent: NONE,
            arc: NONE,
            arc_w: 0.0,
            fee: 0,
            dead: false,
        });
        s.front[target].push(0);
        s.heap.push(Reverse(Key(0.0, 0, 0)));
        s
    }

    /// Weight of the next label to settle.
    pub fn peek_weight(&mut self) -> Option<f64> {
        while let Some(Reverse(Key(w, _, id))) = self.heap.peek() {
            if self.labels[*id as usize].dead {
                self.heap.pop();
            } else {
                return Some(*w);
            }
        }
        None
    }

    /// Settles the lightest live label, extends it over every channel into
    /// its node and returns its id.
    pub fn settle_next(&mut self) -> Option<u32> {
        self.peek_weight()?;
        let Reverse(Key(_, _, id)) = self.heap.pop()?;
        let (u, amt, w, hops) = {
            let l = &self.labels[id as usize];
            (l.node as usize, l.amt, l.w, l.hops)
        };
        if hops >= self.max_label_hops {
            return Some(id);
        }
        let graph = self.graph;
        for &c in graph.incident(u) {
            let ch = graph.channel(c);
            let (v, dir) = if ch.node_b == u {
                (ch.node_a, Direction::AToB)
            } else {
                (ch.node_b, Direction::BToA)
            };
            if v == self.target || self.banned.is_some_and(|b| b[v]) {
                continue;
            }
            let arc = arc_id(c, dir);
            let Some((fee, hw)) = self.cost.hop(arc, amt, false) else {
                continue;
            };
            let new_amt = amt.saturating_add(fee);
            if new_amt > self.max_amount {
                continue;
            }
            self.insert(Label {
                w: w + hw,
                amt: new_amt,
                hops: hops + 1,
                node: v as u32,
                parent: id,
                arc,
                arc_w: hw,
                fee,
                dead: false,
            });
        }
        Some(id)
    }

    fn insert(&mut self, label: Label) {
        let v = label.node as usize;
        let new = self.labels.len() as u32;
        self.labels.push(label);
        if self.front[v].iter().any(|&o| self.dominates(o, new)) {
            self.labels.pop();
            return;
        }
        let mut front = std::mem::take(&mut self.front[v]);
        front.retain(|&o| {
            if self.dominates(new, o) {
                self.labels[o as usize].dead = true;
                false
            } else {
                true
            }
        });
        front.push(new);
        self.front[v] = front;
        let l = &self.labels[new as usize];
        self.heap.push(Reverse(Key(l.w, l.hops, new)));
    }

    fn dominates(&self, a: u32, b: u32) -> bool {
        let (la, lb) = (&self.labels[a as usize], &self.labels[b as usize]);
        if la.w > lb.w || la.amt > lb.amt || la.hops > lb.hops {
            return false;
        }
        la.w < lb.w || la.hops < lb.hops || self.cmp_suffix(a, b) != Ordering::Greater
    }

    fn channel_id_of(&self, arc: u32) -> &str {
        &self.graph.channel(arc_channel(arc)).id
    }

    /// Orders two equal-length label chains by their channel id sequences.
    fn cmp_suffix(&self, mut a: u32, mut b: u32) -> Ordering {
        while a != NONE && b != NONE {
            let (la, lb) = (&self.labels[a as usize], &self.labels[b as usize]);
            if la.arc == NONE || lb.arc == NONE {
                return (la.arc == NONE).cmp(&(lb.arc == NONE)).reverse();
            }
            let ord = self.channel_id_of(la.arc).cmp(self.channel_id_of(lb.arc));
            if ord != Ordering::Equal {
                return ord;
            }
            a = la.parent;
            b = lb.parent;
        }
        Ordering::Equal
    }

    pub fn run(&mut self) {
        while self.settle_next().is_some() {}
    }

    /// Settles every label of weight at most `bound`. Afterwards
    /// [`best_from`](Self::best_from) is exact for every source whose optimum
    /// is within `bound`.
    pub fn run_until(&mut self, bound: f64) {
        while let Some(w) = self.peek_weight() {
            if w > bound {
                break;
            }
            self.settle_next();
        }
    }

    pub fn label_node(&self, id: u32) -> NodeIndex {
        self.labels[id as usize].node as usize
    }

    pub fn label_weight(&self, id: u32) -> f64 {
        self.labels[id as usize].w
    }

    pub fn label_amount(&self, id: u32) -> Msat {
        self.labels[id as usize].amt
    }

    pub fn label_hops(&self, id: u32) -> u32 {
        self.labels[id as usize].hops
    }

    /// Live labels at `node`.
    pub fn front(&self, node: NodeIndex) -> &[u32] {
        &self.front[node]
    }

    /// Arcs of the label chain from its node to the target.
    pub fn label_arcs(&self, mut id: u32) -> Vec<u32> {
        let mut v = Vec::new();
        while self.labels[id as usize].arc != NONE {
            v.push(self.labels[id as usize].arc);
            id = self.labels[id as usize].parent;
        }
        v
    }

    /// Nodes of the label chain, its own node first and the target last.
    pub fn label_nodes(&self, mut id: u32) -> Vec<NodeIndex> {
        let mut v = vec![self.labels[id as usize].node as usize];
        while self.labels[id as usize].parent != NONE {
            id = self.labels[id as usize].parent;
            v.push(self.labels[id as usize].node as usize);
        }
        v
    }

    /// The candidate formed by `first_arc` and label `id`, if admissible.
    pub fn candidate(&self, first_arc: u32, id: u32) -> Option<Candidate> {
        let l = &self.labels[id as usize];
        let (_, w1) = self.cost.hop(first_arc, l.amt, true)?;
        Some(Candidate {
            first_arc,
            label: id,
            w: l.w + w1,
            hops: l.hops + 1,
        })
    }

    /// Total order on candidates: weight, hops, then channel id sequence.
    pub fn cmp_candidates(&self, a: &Candidate, b: &Candidate) -> Ordering {
        a.w.total_cmp(&b.w).then(a.hops.cmp(&b.hops)).then_with(|| {
            self.channel_id_of(a.first_arc)
                .cmp(self.channel_id_of(b.first_arc))
                .then_with(|| self.cmp_suffix(a.label, b.label))
        })
    }

    /// Best route start from `source` over the current label fronts.
    pub fn best_from(&self, source: NodeIndex) -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        for arc in self.cost.out_arcs(self.graph, source) {
            let y = self.cost.arc(arc).to as usize;
            for &id in &self.front[y] {
                if let Some(c) = self.candidate(arc, id) {
                    if best.is_none_or(|b| self.cmp_candidates(&c, &b) == Ordering::Less) {
                        best = Some(c);
                    }
                }
            }
        }
        debug_assert!(best.is_none_or(|b| !self.label_nodes(b.label).contains(&source)));
        best
    }

    pub fn route(&self, source: NodeIndex, cand: &Candidate) -> Route {
        let mut hops = Vec::with_capacity(cand.hops as usize);
        let first = &self.labels[cand.label as usize];
        let (_, w1) = self
            .cost
            .hop(cand.first_arc, first.amt, true)
            .expect("candidate arcs are admissible");
        hops.push(self.hop_record(cand.first_arc, first.amt, 0, w1));
        let mut id = cand.label;
        let mut total_delay = 0u32;
        while self.labels[id as usize].arc != NONE {
            let l = &self.labels[id as usize];
            let forwarded = self.labels[l.parent as usize].amt;
            hops.push(self.hop_record(l.arc, forwarded, l.fee, l.arc_w));
            total_delay += self.cost.arc(l.arc).delay;
            id = l.parent;
        }
        Route {
            source,
            target: self.target,
            amount: self.amount,
            total_fee: first.amt - self.amount,
            total_weight: cand.w,
            total_delay,
            hops,
        }
    }

    fn hop_record(&self, arc: u32, forwarded: Msat, fee: Msat, weight: f64) -> Hop {
        let a = self.cost.arc(arc);
        let c = arc_channel(arc);
        Hop {
            channel: c,
            channel_id: self.graph.channel(c).id.clone(),
            direction: arc_direction(arc),
            from: a.from as usize,
            to: a.to as usize,
            forwarded_amount: forwarded,
            fee,
            weight,
        }
    }
}

pub(crate) fn validate(
    graph: &ChannelGraph,
    source: NodeIndex,
    target: NodeIndex,
    amount: Msat,
) -> Result<(), RoutingError> {
    let n = graph.node_count();
    for v in [source, target] {
        if v >= n {
            return Err(RoutingError::UnknownNode(v));
        }
    }
    if source == target {
        return Err(RoutingError::SameEndpoints);
    }
    if amount == 0 {
        return Err(RoutingError::ZeroAmount);
    }
    Ok(())
}

/// Minimum-weight route from `source` to `target` under prepared costs.
pub(crate) fn best_route_with(
    graph: &ChannelGraph,
    cost: &CostModel,
    limits: &RouteLimits,
    source: NodeIndex,
    target: NodeIndex,
    amount: Msat,
) -> Option<Route> {
    if limits.max_hops == 0 {
        return None;
    }
    let mut banned = vec![false; graph.node_count()];
    banned[source] = true;
    let mut next_hop = vec![false; graph.node_count()];
    let first_arcs: Vec<u32> = cost.out_arcs(graph, source).collect();
    for &a in &first_arcs {
        next_hop[cost.arc(a).to as usize] = true;
    }
    let mut search = LabelSearch::new(
        graph,
        cost,
        target,
        amount,
        limits,
        limits.max_hops - 1,
        Some(&banned),
    );
    let mut bound: Option<f64> = None;
    while let Some(w) = search.peek_weight() {
        if bound.is_some_and(|b| w > b) {
            break;
        }
        let id = search.settle_next().expect("peeked a live label");
        let y = search.label_node(id);
        if next_hop[y] {
            for &a in &first_arcs {
                if cost.arc(a).to as usize == y {
                    if let Some(c) = search.candidate(a, id) {
                        bound = Some(bound.map_or(c.w, |b: f64| b.min(c.w)));
                    }
                }
            }
        }
    }
    let best = search.best_from(source)?;
    Some(search.route(source, &best))
}

/// Finds the route `source` would pick for `amount` under `policy`.
///
/// Randomized policies draw their per-attempt state from `rng`: C-lightning
/// a hash salt, the suggested policy one Gaussian scale per channel, and
/// Eclair a uniform choice among its `top_k` lightest routes. `memory` only
/// affects lnd with the probability penalty enabled.
pub fn find_route<R: Rng + ?Sized>(
    graph: &ChannelGraph,
    source: NodeIndex,
    target: NodeIndex,
    amount: Msat,
    policy: &RoutingPolicy,
    rng: &mut R,
    memory: Option<&FailureMemory>,
) -> Result<Option<Route>, RoutingError> {
    validate(graph, source, target, amount)?;
    if let PolicyKind::Eclair(e) = &policy.kind {
        if e.top_k > 1 {
            let cost = CostModel::deterministic(graph, policy);
            let mut routes = k_shortest_with(
                graph,
                &cost,
                &policy.limits,
                source,
                target,
                amount,
                e.top_k,
            );
            if routes.is_empty() {
                return Ok(None);
            }
            let pick = rng.random_range(0..routes.len());
            return Ok(Some(routes.swap_remove(pick)));
        }
    }
    let cost = CostModel::prepare(graph, policy, rng, memory);
    Ok(best_route_with(
        graph,
        &cost,
        &policy.limits,
        source,
        target,
        amount,
    ))
}

/// Best routes from every source in `sources` to `target` under the
/// policy's deterministic core, from a single search.
pub fn routes_to_target(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    target: NodeIndex,
    amount: Msat,
    sources: &[NodeIndex],
) -> Result<Vec<Option<Route>>, RoutingError> {
    for &s in sources {
        validate(graph, s, target, amount)?;
    }
    let cost = CostModel::deterministic(graph, policy);
    Ok(routes_to_target_with(
        graph,
        &cost,
        &policy.limits,
        target,
        amount,
        sources,
    ))
}

pub(crate) fn routes_to_target_with(
    graph: &ChannelGraph,
    cost: &CostModel,
    limits: &RouteLimits,
    target: NodeIndex,
    amount: Msat,
    sources: &[NodeIndex],
) -> Vec<Option<Route>> {
    if limits.max_hops == 0 {
        return vec![None; sources.len()];
    }
    let mut search = LabelSearch::new(
        graph,
        cost,
        target,
        amount,
        limits,
        limits.max_hops - 1,
        None,
    );
    search.run();
    sources
        .iter()
        .map(|&s| search.best_from(s).map(|c| search.route(s, &c)))
        .collect()
}

/// Prices an explicit path under the policy's deterministic core.
///
/// Returns `None` unless the channels chain from `source`, visit no node
/// twice, are enabled and large enough, and respect the route limits.
pub fn evaluate_path(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    source: NodeIndex,
    path: &[(ChannelIndex, Direction)],
    amount: Msat,
) -> Option<Route> {
    let cost = CostModel::deterministic(graph, policy);
    let arcs: Vec<u32> = path.iter().map(|&(c, d)| arc_id(c, d)).collect();
    evaluate_arcs(graph, &cost, &policy.limits, source, &arcs, amount)
}

pub(crate) fn evaluate_arcs(
    graph: &ChannelGraph,
    cost: &CostModel,
    limits: &RouteLimits,
    source: NodeIndex,
    arcs: &[u32],
    amount: Msat,
) -> Option<Route> {
    if arcs.is_empty() || arcs.len() > limits.max_hops || amount == 0 {
        return None;
    }
    let mut seen = vec![source];
    let mut at = source;
    for &a in arcs {
        let ac = cost.arc(a);
        if ac.from as usize != at || seen.contains(&(ac.to as usize)) {
            return None;
        }
        at = ac.to as usize;
        seen.push(at);
    }
    let mut amt = amount;
    let mut w = 0.0;
    let mut total_delay = 0;
    let mut hops = Vec::with_capacity(arcs.len());
    for (i, &a) in arcs.iter().enumerate().rev() {
        let first = i == 0;
        let (fee, hw) = cost.hop(a, amt, first)?;
        let ac = cost.arc(a);
        let c = arc_channel(a);
        hops.push(Hop {
            channel: c,
            channel_id: graph.channel(c).id.clone(),
            direction: arc_direction(a),
            from: ac.from as usize,
            to: ac.to as usize,
            forwarded_amount: amt,
            fee,
            weight: hw,
        });
        if !first {
            total_delay += ac.delay;
        }
        w += hw;
        amt = amt.checked_add(fee)?;
    }
    if amt - amount > limits.max_fee(amount) {
        return None;
    }
    hops.reverse();
    Some(Route {
        source,
        target: at,
        amount,
        hops,
        total_fee: amt - amount,
        total_weight: w,
        total_delay,
    })
}

/// Orders routes by weight, hop count, then channel id sequence.
pub(crate) fn cmp_routes(a: &Route, b: &Route) -> Ordering {
    a.total_weight
        .total_cmp(&b.total_weight)
        .then(a.hops.len().cmp(&b.hops.len()))
        .then_with(|| {
            a.hops
                .iter()
                .map(|h| h.channel_id.as_str())
                .cmp(b.hops.iter().map(|h| h.channel_id.as_str()))
        })
}
