use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::greedy::AttackPlan;
use crate::analysis::{
    greedy_cover, report_from_routes, route_pairs, CentralityReport, PairSample, TargetSet,
};
use crate::error::{AnalysisError, AttackError};
use crate::graph::ChannelGraph;
use crate::routing::{CLightningParams, PolicyKind, RoutingPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayPoint {
    pub delay: u32,
    pub fraction: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzPoint {
    pub fuzz: f64,
    pub mean_fraction: f64,
    /// Population standard deviation over trials.
    pub stddev: f64,
}

/// The pairs with a route in the graph without the attacker.
fn routable_before(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    pairs: &PairSample,
) -> Result<PairSample, AttackError> {
    let mut unused = ChaCha8Rng::seed_from_u64(0);
    let routes = route_pairs(graph, &policy.deterministic_core(), pairs, &mut unused)
        .map_err(AnalysisError::from)?;
    let keep: Vec<bool> = routes.iter().map(Option::is_some).collect();
    Ok(pairs.filtered(&keep))
}

fn attacked_fraction<R: Rng + ?Sized>(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    pairs: &PairSample,
    rng: &mut R,
) -> Result<f64, AttackError> {
    let attacker = graph.node_count() - 1;
    let routes = route_pairs(graph, policy, pairs, rng).map_err(AnalysisError::from)?;
    Ok(report_from_routes(&routes, &TargetSet::nodes([attacker])).fraction_hijacked)
}

/// Replays the plan's channels with each attacker delay and measures the
/// hijacked share under `policy`'s deterministic core, over the pairs
/// routable without the attacker.
pub fn delay_sweep(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    plan: &AttackPlan,
    delays: &[u32],
    pairs: &PairSample,
) -> Result<Vec<DelayPoint>, AttackError> {
    if graph.node_index(&plan.attacker).is_some() {
        return Err(AttackError::AttackerExists(plan.attacker.to_string()));
    }
    let core = policy.deterministic_core();
    let pairs = &routable_before(graph, &core, pairs)?;
    let mut unused = ChaCha8Rng::seed_from_u64(0);
    delays
        .iter()
        .map(|&delay| {
            let attacked = graph.add_attacker(&plan.attacker, &plan.links_with_delay(delay))?;
            Ok(DelayPoint {
                delay,
                fraction: attacked_fraction(&attacked, &core, pairs, &mut unused)?,
            })
        })
        .collect()
}

/// Hijacked share of the planned attack under C-lightning routing at each
/// fuzz rate, over `trials` independent salts per rate and the pairs
/// routable without the attacker.
///
/// Uses the plan's C-lightning parameters when it was trained under
/// C-lightning, the defaults otherwise.
pub fn fuzz_robustness<R: Rng + ?Sized>(
    graph: &ChannelGraph,
    plan: &AttackPlan,
    fuzz_rates: &[f64],
    trials: usize,
    pairs: &PairSample,
    rng: &mut R,
) -> Result<Vec<FuzzPoint>, AttackError> {
    let attacked = plan.apply(graph)?;
    let pairs = &routable_before(graph, &plan.policy, pairs)?;
    let base = match &plan.policy.kind {
        PolicyKind::CLightning(c) => c.clone(),
        _ => CLightningParams::default(),
    };
    let trials = trials.max(1);
    fuzz_rates
        .iter()
        .map(|&fuzz| {
            let mut policy = RoutingPolicy::new(PolicyKind::CLightning(CLightningParams {
                fuzz,
                ..base.clone()
            }));
            policy.limits = plan.policy.limits;
            let mut samples = Vec::with_capacity(trials);
            for _ in 0..trials {
                samples.push(attacked_fraction(&attacked, &policy, pairs, rng)?);
            }
            // A running mean keeps identical samples exact.
            let mut mean = 0.0;
            for (j, x) in samples.iter().enumerate() {
                mean += (x - mean) / (j + 1) as f64;
            }
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / trials as f64;
            Ok(FuzzPoint {
                fuzz,
                mean_fraction: mean,
                stddev: var.sqrt(),
            })
        })
        .collect()
}

/// Joint hijack share of the `k` nodes that greedily cover the most routes.
pub fn colluding_attack<R: Rng + ?Sized>(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    k: usize,
    pairs: &PairSample,
    rng: &mut R,
) -> Result<CentralityReport, AnalysisError> {
    if k == 0 {
        return Err(AnalysisError::ZeroK);
    }
    let routes = route_pairs(graph, policy, pairs, rng)?;
    let nodes = greedy_cover(&routes, graph.node_count(), k)
        .into_iter()
        .map(|(v, _)| v);
    Ok(report_from_routes(&routes, &TargetSet::nodes(nodes)))
}
