use std::borrow::Cow;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::oracle::{key_add, key_lt, DistanceOracle, Key, LinkTemplate, UNREACHED};
use super::state::{add_peer, AttackState};
use crate::analysis::{
    eclair_hijack_metrics, report_from_routes, route_pairs, PairSample, TargetSet,
};
use crate::error::AttackError;
use crate::graph::{AttackLink, ChannelGraph, ChannelPolicy, Msat, NodeId, NodeIndex};
use crate::routing::{RouteLimits, RoutingPolicy};

/// How the realized hijack share of each step is measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HijackMetric {
    /// The route the full policy picks, one draw per pair.
    #[default]
    BestRoute,
    /// Mean hijacked share of each pair's top-k routes.
    EclairExpected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub attacker: NodeId,
    pub link_policy: ChannelPolicy,
    /// Capacity of every attack channel. When absent, the larger of
    /// `amount * max_hops` and `amount + max_fee`, rounded up to whole
    /// satoshi, so capacity never rules a route out.
    pub capacity: Option<Msat>,
    pub metric: HijackMetric,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            attacker: NodeId::new("attacker"),
            link_policy: ChannelPolicy::new(0, 0, 9),
            capacity: None,
            metric: HijackMetric::BestRoute,
        }
    }
}

impl AttackConfig {
    pub fn capacity_for(&self, amount: Msat, limits: &RouteLimits) -> Msat {
        self.capacity.unwrap_or_else(|| {
            let need = amount
                .saturating_mul(limits.max_hops as u64)
                .max(amount.saturating_add(limits.max_fee(amount)));
            need.div_ceil(1000).saturating_mul(1000)
        })
    }

    pub fn template(&self, amount: Msat, limits: &RouteLimits) -> LinkTemplate {
        LinkTemplate {
            attacker: self.attacker.clone(),
            policy: self.link_policy,
            capacity: self.capacity_for(amount, limits),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackStep {
    pub peer: NodeId,
    pub policy: ChannelPolicy,
    pub capacity: Msat,
    /// Pairs the channel captured when chosen; on the first channel, what
    /// it captures together with its planned partner.
    pub estimated_gain: usize,
    /// Pairs whose deterministic-core route crosses the attacker.
    pub hijacked: usize,
    pub routable: usize,
    /// Pairs routable now that had no route before the attack.
    pub newly_routable: usize,
    pub core_fraction: f64,
    pub realized_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackPlan {
    pub attacker: NodeId,
    pub policy: RoutingPolicy,
    pub link_policy: ChannelPolicy,
    pub capacity: Msat,
    pub amount: Msat,
    pub metric: HijackMetric,
    pub pair_count: usize,
    pub initially_routable: usize,
    pub steps: Vec<AttackStep>,
}

impl AttackPlan {
    pub fn links(&self) -> Vec<AttackLink> {
        self.steps
            .iter()
            .map(|s| AttackLink {
                peer: s.peer.clone(),
                policy: s.policy,
                capacity: s.capacity,
            })
            .collect()
    }

    /// The plan's channels with every attacker direction set to `delay`.
    pub fn links_with_delay(&self, delay: u32) -> Vec<AttackLink> {
        let mut links = self.links();
        for l in &mut links {
            l.policy.delay = delay;
        }
        links
    }

    pub fn apply(&self, graph: &ChannelGraph) -> Result<ChannelGraph, AttackError> {
        if graph.node_index(&self.attacker).is_some() {
            return Err(AttackError::AttackerExists(self.attacker.to_string()));
        }
        Ok(graph.add_attacker(&self.attacker, &self.links())?)
    }

    pub fn final_fraction(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.core_fraction)
    }
}

/// A candidate peer and the number of pairs it captures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NextPeer {
    pub peer: NodeIndex,
    pub gain: usize,
}

/// Candidates whose partner is looked ahead for on the first channel.
const OPENING_SHORTLIST: usize = 32;

/// What candidate scoring reads: the oracle, the pairs' current best
/// routes and the attacker's committed peers.
struct Scorer<'a, 'g> {
    o: &'a DistanceOracle<'g>,
    best: &'a [f64],
    best_hops: &'a [u16],
    hijacked: &'a [bool],
    in_p: Cow<'a, [Key]>,
    out_p: Cow<'a, [Key]>,
    is_peer: Cow<'a, [bool]>,
    opening: bool,
}

/// Relative tolerance under which two weights count as tied.
const TIE: f64 = 1e-9;

/// Whether a route keyed `via` would be chosen over the current best: it is
/// lighter, or tied in weight with fewer hops. A full tie is left to channel
/// ids, which the estimate cannot see, and is not counted.
#[inline]
fn takes(via: Key, cur: f64, cur_hops: u16) -> bool {
    if !via.0.is_finite() {
        return false;
    }
    let tol = TIE * cur.abs();
    via.0 < cur - tol || (via.0 <= cur + tol && via.1 < cur_hops)
}

impl<'a, 'g> Scorer<'a, 'g> {
    fn new(st: &'a AttackState<'_, 'g>) -> Self {
        Scorer {
            o: st.oracle,
            best: &st.best,
            best_hops: &st.best_hops,
            hijacked: &st.hijacked,
            in_p: Cow::Borrowed(&st.in_p),
            out_p: Cow::Borrowed(&st.out_p),
            is_peer: Cow::Borrowed(&st.is_peer),
            opening: st.peers.is_empty(),
        }
    }

    /// The scorer after a first channel to `c`. A single channel carries no
    /// route between other nodes, so best routes stay as they are.
    fn with_peer(&self, c: NodeIndex) -> Scorer<'a, 'g> {
        let mut in_p = self.in_p.to_vec();
        let mut out_p = self.out_p.to_vec();
        add_peer(self.o, c, &mut in_p, &mut out_p);
        let mut is_peer = self.is_peer.to_vec();
        is_peer[c] = true;
        Scorer {
            in_p: Cow::Owned(in_p),
            out_p: Cow::Owned(out_p),
            is_peer: Cow::Owned(is_peer),
            opening: false,
            ..*self
        }
    }

    /// Estimated lightest route of pair `i` through the attacker once it
    /// also links to `c`. Before the first channel exists the other end is
    /// the best node for the pair rather than a committed peer.
    fn via(&self, c: NodeIndex, i: usize) -> Key {
        let o = self.o;
        let (s, t) = o.pairs.pairs()[i];
        let (col, row) = (o.source_col[s], o.target_row[t]);
        let mut best = UNREACHED;
        if c != t {
            let out = if self.opening {
                o.open_out[row as usize]
                    .iter()
                    .find(|e| e.2 as usize != c && e.2 as usize != s)
                    .map_or(UNREACHED, |e| (e.0, e.1))
            } else {
                self.out_p[row as usize]
            };
            best = key_add(o.in_key(c, col, s), out);
        }
        if c != s {
            let inn = if self.opening {
                o.open_in[col as usize]
                    .iter()
                    .find(|e| e.2 as usize != c && e.2 as usize != t)
                    .map_or(UNREACHED, |e| (e.0, e.1))
            } else {
                self.in_p[col as usize]
            };
            let k = key_add(inn, o.out_key(row, c));
            if key_lt(k, best) {
                best = k;
            }
        }
        best
    }

    fn counts_naive(&self, pairs: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.o.n];
        for (c, count) in counts.iter_mut().enumerate() {
            if self.is_peer[c] {
                continue;
            }
            for &i in pairs {
                if takes(self.via(c, i), self.best[i], self.best_hops[i]) {
                    *count += 1;
                }
            }
        }
        counts
    }

    fn counts_optimized(&self) -> Vec<usize> {
        let o = self.o;
        let (by_source, by_target) = (o.by_source(), o.by_target());
        let w_in_min = o.w_in.min(o.w_in_first);
        let mut counts = vec![0usize; o.n];
        let mut stamp = vec![usize::MAX; o.n];
        for (i, &(s, t)) in o.pairs.pairs().iter().enumerate() {
            let cur = self.best[i];
            if self.hijacked[i] || cur.is_infinite() {
                continue;
            }
            let limit = cur + TIE * cur.abs();
            let (col, row) = (o.source_col[s], o.target_row[t]);
            let (out_lb, in_lb) = if self.opening {
                (o.open_out[row as usize][0].0, o.open_in[col as usize][0].0)
            } else {
                (self.out_p[row as usize].0, self.in_p[col as usize].0)
            };
            let mut visit = |c: usize| {
                if stamp[c] != i && !self.is_peer[c] {
                    stamp[c] = i;
                    if takes(self.via(c, i), cur, self.best_hops[i]) {
                        counts[c] += 1;
                    }
                }
            };
            for &c in &by_source[col as usize] {
                if o.to_at(c as usize, col) + w_in_min + out_lb > limit {
                    break;
                }
                visit(c as usize);
            }
            let head = in_lb + o.w_out;
            for &c in &by_target[row as usize] {
                if head + o.exit_at(row, c as usize) > limit {
                    break;
                }
                visit(c as usize);
            }
        }
        counts
    }

    fn argmax(&self, counts: &[usize]) -> Option<NextPeer> {
        let mut best: Option<NextPeer> = None;
        for (c, &gain) in counts.iter().enumerate() {
            if !self.is_peer[c] && best.is_none_or(|b| gain > b.gain) {
                best = Some(NextPeer { peer: c, gain });
            }
        }
        best
    }

    /// The candidates worth an exact check, best estimate first. For the
    /// first channel, the highest-scoring candidates are each paired with
    /// their best partner and ranked by what the pair captures.
    fn ranked(&self, counts: impl Fn(&Scorer<'a, 'g>) -> Vec<usize>) -> Vec<Ranked> {
        let scores = counts(self);
        let mut order: Vec<NodeIndex> = (0..self.o.n).filter(|&c| !self.is_peer[c]).collect();
        order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
        if !self.opening {
            order.truncate(EXACT_CHECKS);
            return order
                .into_iter()
                .map(|c| Ranked {
                    peer: c,
                    partner: None,
                    estimate: scores[c],
                })
                .collect();
        }
        order.truncate(OPENING_SHORTLIST);
        let mut out: Vec<Ranked> = order
            .into_iter()
            .map(|c| {
                let ahead = self.with_peer(c);
                let partner = ahead.argmax(&counts(&ahead));
                Ranked {
                    peer: c,
                    partner: partner.map(|p| p.peer),
                    estimate: partner.map_or(0, |p| p.gain),
                }
            })
            .collect();
        out.sort_by(|a, b| b.estimate.cmp(&a.estimate).then(a.peer.cmp(&b.peer)));
        out.truncate(EXACT_CHECKS);
        out
    }
}

/// Candidates whose gain is measured exactly by committing them.
const EXACT_CHECKS: usize = 4;

struct Ranked {
    peer: NodeIndex,
    partner: Option<NodeIndex>,
    estimate: usize,
}

/// The ranked candidate capturing most pairs once committed, with its
/// partner when it has one; ties go to the better estimate.
fn choose(state: &AttackState<'_, '_>, ranked: Vec<Ranked>) -> Option<NextPeer> {
    let before = state.hijacked_count();
    let mut best: Option<NextPeer> = None;
    for r in ranked {
        let mut trial = state.clone();
        for p in std::iter::once(r.peer).chain(r.partner) {
            trial.commit(p).expect("candidates are nodes of the graph");
        }
        let gain = trial.hijacked_count().saturating_sub(before);
        if best.is_none_or(|b| gain > b.gain) {
            best = Some(NextPeer { peer: r.peer, gain });
        }
    }
    best
}

/// Scores every candidate against every listed pair, then commits the best
/// few on copies of the state and picks the one capturing most pairs.
///
/// A pair counts toward a candidate's score when its estimated route through
/// the attacker beats its current best. Estimates are exact except for the
/// fees a route carries into the attacker. Equal gains go to the better
/// score, then the lower node index; `None` once every node is a peer.
///
/// Before the first channel, the candidates scoring highest against an
/// ideal partner are each paired with their best actual partner, and the
/// reported gain is that pair's.
pub fn find_next_naive(state: &AttackState<'_, '_>, pairs: &[usize]) -> Option<NextPeer> {
    choose(state, Scorer::new(state).ranked(|s| s.counts_naive(pairs)))
}

/// The selection of [`find_next_naive`] over routable pairs not yet
/// hijacked, visiting for each pair only the candidates close enough to its
/// endpoints to matter.
pub fn find_next_optimized(state: &AttackState<'_, '_>) -> Option<NextPeer> {
    choose(state, Scorer::new(state).ranked(|s| s.counts_optimized()))
}

fn realized<R: Rng + ?Sized>(
    state: &AttackState<'_, '_>,
    metric: HijackMetric,
    rng: &mut R,
) -> Result<f64, AttackError> {
    let o = state.oracle;
    let attacker = TargetSet::nodes([state.attacker()]);
    Ok(match metric {
        HijackMetric::BestRoute if o.policy.is_deterministic() => state.fraction(),
        HijackMetric::BestRoute => {
            let pairs = state.initially_routable_pairs();
            let routes = route_pairs(state.graph(), &o.policy, &pairs, rng)
                .map_err(crate::AnalysisError::from)?;
            report_from_routes(&routes, &attacker).fraction_hijacked
        }
        HijackMetric::EclairExpected => {
            let pairs = state.initially_routable_pairs();
            eclair_hijack_metrics(state.graph(), &o.policy, &attacker, &pairs)?.expected_fraction
        }
    })
}

/// Greedily opens up to `k` channels, each to the candidate with the largest
/// estimated gain, recording exact hijack shares after every step.
///
/// Candidates are scored under the policy's deterministic core; the
/// realized share applies the full policy, drawing from `rng` when it is
/// randomized.
pub fn greedy_attack<R: Rng + ?Sized>(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    k: usize,
    pairs: &PairSample,
    config: &AttackConfig,
    rng: &mut R,
) -> Result<AttackPlan, AttackError> {
    let oracle = DistanceOracle::build(
        graph,
        policy,
        pairs,
        &config.template(pairs.amount(), &policy.limits),
    )?;
    greedy_attack_with(&oracle, k, config.metric, rng)
}

pub fn greedy_attack_with<R: Rng + ?Sized>(
    oracle: &DistanceOracle<'_>,
    k: usize,
    metric: HijackMetric,
    rng: &mut R,
) -> Result<AttackPlan, AttackError> {
    let mut state = AttackState::new(oracle);
    let link = oracle.link();
    let mut plan = AttackPlan {
        attacker: link.attacker.clone(),
        policy: oracle.policy().clone(),
        link_policy: link.policy,
        capacity: link.capacity,
        amount: oracle.pairs().amount(),
        metric,
        pair_count: oracle.pairs().len(),
        initially_routable: state.routable_count(),
        steps: Vec::new(),
    };
    for _ in 0..k {
        let Some(next) = find_next_optimized(&state) else {
            break;
        };
        state.commit(next.peer)?;
        plan.steps.push(AttackStep {
            peer: oracle.graph().node_id(next.peer).clone(),
            policy: link.policy,
            capacity: link.capacity,
            estimated_gain: next.gain,
            hijacked: state.hijacked_count(),
            routable: state.routable_count(),
            newly_routable: state.newly_routable(),
            core_fraction: state.fraction(),
            realized_fraction: realized(&state, metric, rng)?,
        });
    }
    Ok(plan)
}

/// Mean deterministic-core hijack share when the attacker links to `k`
/// peers drawn uniformly without replacement.
pub fn random_baseline<R: Rng + ?Sized>(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    k: usize,
    trials: usize,
    pairs: &PairSample,
    config: &AttackConfig,
    rng: &mut R,
) -> Result<f64, AttackError> {
    if k == 0 {
        return Ok(0.0);
    }
    let oracle = DistanceOracle::build(
        graph,
        policy,
        pairs,
        &config.template(pairs.amount(), &policy.limits),
    )?;
    Ok(random_baseline_curve_with(&oracle, k, trials, rng)?
        .last()
        .copied()
        .unwrap_or(0.0))
}

/// Mean baseline share for every `k` in `1..=k_max` (capped at the node
/// count). Each trial draws one random peer order and reads off its
/// prefixes.
pub fn random_baseline_curve_with<R: Rng + ?Sized>(
    oracle: &DistanceOracle<'_>,
    k_max: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<f64>, AttackError> {
    let n = oracle.graph().node_count();
    let k_max = k_max.min(n);
    let mut sums = vec![0.0; k_max];
    if trials == 0 {
        return Ok(sums);
    }
    let mut order: Vec<NodeIndex> = (0..n).collect();
    for _ in 0..trials {
        order.shuffle(rng);
        let mut state = AttackState::new(oracle);
        for (j, &peer) in order[..k_max].iter().enumerate() {
            state.commit(peer)?;
            sums[j] += state.fraction();
        }
    }
    Ok(sums.into_iter().map(|s| s / trials as f64).collect())
}
