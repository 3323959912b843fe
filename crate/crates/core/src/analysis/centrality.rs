use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PairSample;
use crate::error::{AnalysisError, RoutingError};
use crate::graph::{ChannelGraph, ChannelIndex, NodeIndex};
use crate::routing::{find_route, CostModel, PolicyKind, Route, RoutingPolicy};
use crate::routing::{k_shortest_with, routes_to_target_with};

/// Nodes or channels whose presence on a route counts as a hit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "members", rename_all = "lowercase")]
pub enum TargetSet {
    Nodes(BTreeSet<NodeIndex>),
    Channels(BTreeSet<ChannelIndex>),
}

impl TargetSet {
    pub fn nodes(nodes: impl IntoIterator<Item = NodeIndex>) -> Self {
        TargetSet::Nodes(nodes.into_iter().collect())
    }

    pub fn channels(channels: impl IntoIterator<Item = ChannelIndex>) -> Self {
        TargetSet::Channels(channels.into_iter().collect())
    }

    pub fn is_empty(&self) -> bool {
        match self {
            TargetSet::Nodes(s) => s.is_empty(),
            TargetSet::Channels(s) => s.is_empty(),
        }
    }

    /// Nodes match only strictly between source and target; channels match
    /// anywhere on the route.
    pub fn hits(&self, route: &Route) -> bool {
        match self {
            TargetSet::Nodes(s) => route.interior_nodes().any(|v| s.contains(&v)),
            TargetSet::Channels(s) => route.channels().any(|c| s.contains(&c)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairOutcome {
    Unroutable,
    Clear,
    Hijacked,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralityReport {
    pub targets: TargetSet,
    /// Hijacked pairs over routable pairs; zero when nothing is routable.
    pub fraction_hijacked: f64,
    pub outcomes: Vec<PairOutcome>,
    pub pair_count: usize,
    pub routable_count: usize,
    pub unroutable_count: usize,
    pub hijacked_count: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores already computed routes against a target set.
pub fn report_from_routes(routes: &[Option<Route>], targets: &TargetSet) -> CentralityReport {
    let outcomes: Vec<PairOutcome> = routes
        .iter()
        .map(|r| match r {
            None => PairOutcome::Unroutable,
            Some(r) if targets.hits(r) => PairOutcome::Hijacked,
            Some(_) => PairOutcome::Clear,
        })
        .collect();
    let unroutable_count = outcomes
        .iter()
        .filter(|&&o| o == PairOutcome::Unroutable)
        .count();
    let hijacked_count = outcomes
        .iter()
        .filter(|&&o| o == PairOutcome::Hijacked)
        .count();
    let routable_count = outcomes.len() - unroutable_count;
    CentralityReport {
        targets: targets.clone(),
        fraction_hijacked: ratio(hijacked_count, routable_count),
        pair_count: outcomes.len(),
        outcomes,
        routable_count,
        unroutable_count,
        hijacked_count,
    }
}

/// Routes every pair under `policy`.
///
/// Deterministic policies share one backward search per distinct target.
/// Randomized policies draw one seed from `rng` and give pair `i` its own
/// stream `i` of that seed, so each pair's draw is independent of the others.
pub fn route_pairs<R: Rng + ?Sized>(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    pairs: &PairSample,
    rng: &mut R,
) -> Result<Vec<Option<Route>>, RoutingError> {
    let n = graph.node_count();
    if let Some(&(s, t)) = pairs.pairs().iter().find(|&&(s, t)| s >= n || t >= n) {
        return Err(RoutingError::UnknownNode(s.max(t)));
    }
    if policy.is_deterministic() {
        let cost = CostModel::deterministic(graph, policy);
        return Ok(route_pairs_with(graph, &cost, policy, pairs));
    }
    let seed: u64 = rng.random();
    pairs
        .pairs()
        .iter()
        .enumerate()
        .map(|(i, &(s, t))| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(i as u64);
            find_route(graph, s, t, pairs.amount(), policy, &mut r, None)
        })
        .collect()
}

fn route_pairs_with(
    graph: &ChannelGraph,
    cost: &CostModel,
    policy: &RoutingPolicy,
    pairs: &PairSample,
) -> Vec<Option<Route>> {
    let mut by_target: BTreeMap<NodeIndex, Vec<usize>> = BTreeMap::new();
    for (i, &(_, t)) in pairs.pairs().iter().enumerate() {
        by_target.entry(t).or_default().push(i);
    }
    let mut out = vec![None; pairs.len()];
    for (t, idx) in by_target {
        let sources: Vec<NodeIndex> = idx.iter().map(|&i| pairs.pairs()[i].0).collect();
        let routes =
            routes_to_target_with(graph, cost, &policy.limits, t, pairs.amount(), &sources);
        for (i, r) in idx.into_iter().zip(routes) {
            out[i] = r;
        }
    }
    out
}

/// Share of routable pairs whose chosen route crosses `targets`, one route
/// draw per pair.
pub fn centrality<R: Rng + ?Sized>(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    targets: &TargetSet,
    pairs: &PairSample,
    rng: &mut R,
) -> Result<CentralityReport, AnalysisError> {
    if targets.is_empty() {
        return Err(AnalysisError::EmptyTargetSet);
    }
    let routes = route_pairs(graph, policy, pairs, rng)?;
    Ok(report_from_routes(&routes, targets))
}

/// Mean of `trials` independent centrality draws.
pub fn mean_centrality<R: Rng + ?Sized>(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    targets: &TargetSet,
    pairs: &PairSample,
    rng: &mut R,
    trials: usize,
) -> Result<f64, AnalysisError> {
    if trials == 0 {
        return Err(AnalysisError::ZeroTrials);
    }
    let mut sum = 0.0;
    for _ in 0..trials {
        sum += centrality(graph, policy, targets, pairs, rng)?.fraction_hijacked;
    }
    Ok(sum / trials as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    pub node: NodeIndex,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralityCurve {
    pub points: Vec<CurvePoint>,
    pub routable_count: usize,
    pub unroutable_count: usize,
}

impl CentralityCurve {
    pub fn nodes(&self) -> Vec<NodeIndex> {
        self.points.iter().map(|p| p.node).collect()
    }
}

/// Greedy maximum coverage of routes by their interior nodes. Ties go to the
/// lowest node index; once every route is covered the remaining picks are
/// the lowest unused indices.
pub(crate) fn greedy_cover(
    routes: &[Option<Route>],
    node_count: usize,
    k_max: usize,
) -> Vec<(NodeIndex, usize)> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); node_count];
    let mut interiors: Vec<Vec<NodeIndex>> = Vec::with_capacity(routes.len());
    for (i, r) in routes.iter().enumerate() {
        let inner: Vec<NodeIndex> = r
            .as_ref()
            .map(|r| r.interior_nodes().collect())
            .unwrap_or_default();
        for &v in &inner {
            members[v].push(i);
        }
        interiors.push(inner);
    }
    let mut gain: Vec<usize> = members.iter().map(Vec::len).collect();
    let mut covered = vec![false; routes.len()];
    let mut picked = vec![false; node_count];
    let mut order = Vec::new();
    for _ in 0..k_max.min(node_count) {
        let best = (0..node_count)
            .filter(|&v| !picked[v])
            .max_by(|&a, &b| gain[a].cmp(&gain[b]).then(b.cmp(&a)))
            .expect("fewer picks than nodes");
        picked[best] = true;
        let newly = gain[best];
        for &i in &members[best] {
            if !covered[i] {
                covered[i] = true;
                for &u in &interiors[i] {
                    gain[u] -= 1;
                }
            }
        }
        order.push((best, newly));
    }
    order
}

/// Cumulative share of routable pairs crossed by the `k` nodes chosen
/// greedily by marginal coverage, for `k = 1..=k_max` (capped at the node
/// count).
pub fn top_central_nodes<R: Rng + ?Sized>(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    k_max: usize,
    pairs: &PairSample,
    rng: &mut R,
) -> Result<CentralityCurve, AnalysisError> {
    if k_max == 0 {
        return Err(AnalysisError::ZeroK);
    }
    let routes = route_pairs(graph, policy, pairs, rng)?;
    Ok(curve_from_routes(&routes, graph.node_count(), k_max))
}

pub fn curve_from_routes(
    routes: &[Option<Route>],
    node_count: usize,
    k_max: usize,
) -> CentralityCurve {
    let routable_count = routes.iter().filter(|r| r.is_some()).count();
    let mut covered = 0;
    let points = greedy_cover(routes, node_count, k_max)
        .into_iter()
        .enumerate()
        .map(|(i, (node, newly))| {
            covered += newly;
            CurvePoint {
                k: i + 1,
                node,
                fraction: ratio(covered, routable_count),
            }
        })
        .collect();
    CentralityCurve {
        points,
        routable_count,
        unroutable_count: routes.len() - routable_count,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EclairHijackMetrics {
    /// Pairs whose lightest route is hijacked.
    pub best_route_fraction: f64,
    /// Pairs whose every ranked route is hijacked.
    pub all_top3_fraction: f64,
    /// Mean share of hijacked routes among each pair's ranked routes.
    pub expected_fraction: f64,
    pub routable_count: usize,
    pub unroutable_count: usize,
}

/// Hijack exposure when each sender picks uniformly among its `top_k`
/// lightest routes (Eclair's own `top_k`, or 3 for other policies), ranked
/// under the policy's deterministic core.
pub fn eclair_hijack_metrics(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    attacker_set: &TargetSet,
    pairs: &PairSample,
) -> Result<EclairHijackMetrics, AnalysisError> {
    if attacker_set.is_empty() {
        return Err(AnalysisError::EmptyTargetSet);
    }
    let n = graph.node_count();
    if let Some(&(s, t)) = pairs.pairs().iter().find(|&&(s, t)| s >= n || t >= n) {
        return Err(RoutingError::UnknownNode(s.max(t)).into());
    }
    let k = match &policy.kind {
        PolicyKind::Eclair(e) => e.top_k.max(1),
        _ => 3,
    };
    let cost = CostModel::deterministic(graph, policy);
    let (mut routable, mut best, mut all, mut expected) = (0usize, 0usize, 0usize, 0.0);
    for &(s, t) in pairs.pairs() {
        let routes = k_shortest_with(graph, &cost, &policy.limits, s, t, pairs.amount(), k);
        if routes.is_empty() {
            continue;
        }
        routable += 1;
        let hit = routes.iter().filter(|r| attacker_set.hits(r)).count();
        if attacker_set.hits(&routes[0]) {
            best += 1;
        }
        if hit == routes.len() {
            all += 1;
        }
        expected += hit as f64 / routes.len() as f64;
    }
    Ok(EclairHijackMetrics {
        best_route_fraction: ratio(best, routable),
        all_top3_fraction: ratio(all, routable),
        expected_fraction: if routable == 0 {
            0.0
        } else {
            expected / routable as f64
        },
        routable_count: routable,
        unroutable_count: pairs.len() - routable,
    })
}
