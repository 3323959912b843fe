//! Yen's deviation method over amount-dependent weights.
//!
//! Root hops are repriced for every deviation because the amount they carry
//! depends on the spur path's fees, so each spur is chosen by pricing whole
//! paths rather than spur weights alone.

use std::cmp::Ordering;
use std::collections::HashSet;

use super::cost::{arc_id, CostModel};
use super::search::{best_route_with, cmp_routes, evaluate_arcs, validate, LabelSearch};
use super::{Route, RouteLimits, RoutingPolicy};
use crate::error::RoutingError;
use crate::graph::{ChannelGraph, Msat, NodeIndex};

fn route_arcs(r: &Route) -> Vec<u32> {
    r.hops
        .iter()
        .map(|h| arc_id(h.channel, h.direction))
        .collect()
}

/// Up to `k` loop-free routes of least weight under the policy's
/// deterministic core, lightest first. Ties order by hop count, then by
/// channel id sequence.
pub fn k_shortest_routes(
    graph: &ChannelGraph,
    source: NodeIndex,
    target: NodeIndex,
    amount: Msat,
    k: usize,
    policy: &RoutingPolicy,
) -> Result<Vec<Route>, RoutingError> {
    validate(graph, source, target, amount)?;
    if k == 0 {
        return Err(RoutingError::ZeroK);
    }
    let cost = CostModel::deterministic(graph, policy);
    Ok(k_shortest_with(
        graph,
        &cost,
        &policy.limits,
        source,
        target,
        amount,
        k,
    ))
}

pub(crate) fn k_shortest_with(
    graph: &ChannelGraph,
    cost: &CostModel,
    limits: &RouteLimits,
    source: NodeIndex,
    target: NodeIndex,
    amount: Msat,
    k: usize,
) -> Vec<Route> {
    let Some(first) = best_route_with(graph, cost, limits, source, target, amount) else {
        return Vec::new();
    };
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(route_arcs(&first));
    let mut accepted = vec![first];
    let mut pending: Vec<Route> = Vec::new();
    let mut banned = vec![false; graph.node_count()];

    while accepted.len() < k {
        let prev = accepted.last().expect("nonempty");
        let prev_arcs = route_arcs(prev);
        let prev_nodes = prev.nodes();
        for j in 0..prev_arcs.len() {
            let root = &prev_arcs[..j];
            if j + 1 > limits.max_hops {
                break;
            }
            let excluded: HashSet<u32> = accepted
                .iter()
                .map(route_arcs)
                .filter(|a| a.len() > j && &a[..j] == root)
                .map(|a| a[j])
                .collect();
            banned.iter_mut().for_each(|b| *b = false);
            for &v in &prev_nodes[..=j] {
                banned[v] = true;
            }
            if let Some(r) = best_spur(
                graph,
                cost,
                limits,
                source,
                target,
                amount,
                prev_nodes[j],
                root,
                &excluded,
                &banned,
            ) {
                if seen.insert(route_arcs(&r)) {
                    pending.push(r);
                }
            }
        }
        let Some(ix) = (0..pending.len()).min_by(|&a, &b| cmp_routes(&pending[a], &pending[b]))
        else {
            break;
        };
        accepted.push(pending.swap_remove(ix));
    }
    accepted
}

#[allow(clippy::too_many_arguments)]
fn best_spur(
    graph: &ChannelGraph,
    cost: &CostModel,
    limits: &RouteLimits,
    source: NodeIndex,
    target: NodeIndex,
    amount: Msat,
    spur: NodeIndex,
    root: &[u32],
    excluded: &HashSet<u32>,
    banned: &[bool],
) -> Option<Route> {
    let spur_arcs: Vec<u32> = cost
        .out_arcs(graph, spur)
        .filter(|a| !excluded.contains(a))
        .filter(|&a| {
            let y = cost.arc(a).to as usize;
            y == target || !banned[y]
        })
        .collect();
    if spur_arcs.is_empty() {
        return None;
    }
    let max_label_hops = limits.max_hops - root.len() - 1;
    let mut search = LabelSearch::new(
        graph,
        cost,
        target,
        amount,
        limits,
        max_label_hops,
        Some(banned),
    );

    let price = |search: &LabelSearch, arc: u32, id: u32| -> Option<Route> {
        let mut arcs = Vec::with_capacity(root.len() + 1 + search.label_hops(id) as usize);
        arcs.extend_from_slice(root);
        arcs.push(arc);
        arcs.extend(search.label_arcs(id));
        evaluate_arcs(graph, cost, limits, source, &arcs, amount)
    };

    // Root and spur weights are nonnegative, so no label heavier than a
    // priced path can improve on it.
    let mut bound: Option<f64> = None;
    while let Some(w) = search.peek_weight() {
        if bound.is_some_and(|b| w > b) {
            break;
        }
        let id = search.settle_next().expect("peeked a live label");
        let y = search.label_node(id);
        for &a in &spur_arcs {
            if cost.arc(a).to as usize == y {
                if let Some(r) = price(&search, a, id) {
                    bound = Some(bound.map_or(r.total_weight, |b: f64| b.min(r.total_weight)));
                }
            }
        }
    }

    let mut best: Option<Route> = None;
    for &a in &spur_arcs {
        let y = cost.arc(a).to as usize;
        for &id in search.front(y) {
            if let Some(r) = price(&search, a, id) {
                if best
                    .as_ref()
                    .is_none_or(|b| cmp_routes(&r, b) == Ordering::Less)
                {
                    best = Some(r);
                }
            }
        }
    }
    best
}
