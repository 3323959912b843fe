use std::collections::BTreeMap;

use super::oracle::{key_lt, DistanceOracle, Key, UNREACHED};
use crate::analysis::PairSample;
use crate::error::AttackError;
use crate::graph::{AttackLink, ChannelGraph, NodeIndex};
use crate::routing::{CostModel, LabelSearch};

/// Relative slack on lower-bound tests, covering summation order.
const SLACK: f64 = 1e-9;

/// Exact best routes of every pair while attacker channels are opened one
/// at a time.
///
/// After each new channel only pairs whose best weight could reach a route
/// through that channel are searched again, and only up to their current
/// best weight. The bound is a lower bound for policies whose hop weights
/// grow with the amount; other policies search every pair again.
#[derive(Clone)]
pub struct AttackState<'o, 'g> {
    pub(crate) oracle: &'o DistanceOracle<'g>,
    pub(crate) peers: Vec<NodeIndex>,
    pub(crate) is_peer: Vec<bool>,
    graph: ChannelGraph,
    attacker: NodeIndex,
    pub(crate) best: Vec<f64>,
    /// Hop count of each pair's best route.
    pub(crate) best_hops: Vec<u16>,
    pub(crate) hijacked: Vec<bool>,
    initially_routable: Vec<bool>,
    /// Lightest route into the attacker over committed peers, per source.
    pub(crate) in_p: Vec<Key>,
    /// Lightest route out of the attacker over committed peers, per target.
    pub(crate) out_p: Vec<Key>,
    researched: usize,
}

impl<'o, 'g> AttackState<'o, 'g> {
    pub fn new(oracle: &'o DistanceOracle<'g>) -> Self {
        let o = oracle;
        let (best, best_hops): (Vec<f64>, Vec<u16>) = o
            .pairs
            .pairs()
            .iter()
            .map(|&(s, t)| o.to_key(t, o.source_col[s]))
            .unzip();
        let graph = o
            .graph
            .add_attacker(&o.link.attacker, &[])
            .expect("the oracle checked the attacker is fresh");
        AttackState {
            oracle,
            peers: Vec::new(),
            is_peer: vec![false; o.n],
            attacker: o.n,
            initially_routable: best.iter().map(|w| w.is_finite()).collect(),
            hijacked: vec![false; best.len()],
            best,
            best_hops,
            graph,
            in_p: vec![UNREACHED; o.sources.len()],
            out_p: vec![UNREACHED; o.targets.len()],
            researched: 0,
        }
    }

    pub fn peers(&self) -> &[NodeIndex] {
        &self.peers
    }

    /// The base graph with the attacker and its committed channels.
    pub fn graph(&self) -> &ChannelGraph {
        &self.graph
    }

    pub fn attacker(&self) -> NodeIndex {
        self.attacker
    }

    /// Current least weight of pair `i`, infinite when unroutable.
    pub fn best_weight(&self, i: usize) -> f64 {
        self.best[i]
    }

    pub fn is_hijacked(&self, i: usize) -> bool {
        self.hijacked[i]
    }

    /// Hijacked pairs among those routable before the attack. Pairs the
    /// attack makes routable are counted by [`Self::newly_routable`].
    pub fn hijacked_count(&self) -> usize {
        self.hijacked
            .iter()
            .zip(&self.initially_routable)
            .filter(|(h, was)| **h && **was)
            .count()
    }

    pub fn routable_count(&self) -> usize {
        self.best.iter().filter(|w| w.is_finite()).count()
    }

    /// Pairs without a route before the attack that have one now.
    pub fn newly_routable(&self) -> usize {
        self.best
            .iter()
            .zip(&self.initially_routable)
            .filter(|(w, was)| w.is_finite() && !**was)
            .count()
    }

    pub fn initially_routable_count(&self) -> usize {
        self.initially_routable.iter().filter(|&&r| r).count()
    }

    /// The pairs routable before the attack, in sample order.
    pub fn initially_routable_pairs(&self) -> PairSample {
        self.oracle.pairs().filtered(&self.initially_routable)
    }

    /// Hijacked share of the pairs routable before the attack.
    pub fn fraction(&self) -> f64 {
        let r = self.initially_routable_count();
        if r == 0 {
            0.0
        } else {
            self.hijacked_count() as f64 / r as f64
        }
    }

    /// Pair searches run by commits so far.
    pub fn researched_pairs(&self) -> usize {
        self.researched
    }

    /// Opens a channel to `peer` and brings every pair's best route up to
    /// date.
    pub fn commit(&mut self, peer: NodeIndex) -> Result<(), AttackError> {
        let o = self.oracle;
        if peer >= o.n {
            return Err(AttackError::PairOutOfRange(peer));
        }
        let monotone = o.policy.is_amount_monotone();
        let mut stale: BTreeMap<NodeIndex, Vec<usize>> = BTreeMap::new();
        for (i, &(s, t)) in o.pairs.pairs().iter().enumerate() {
            let (col, row) = (o.source_col[s], o.target_row[t]);
            let is_stale = if !monotone {
                true
            } else {
                let in_c = if peer == t {
                    f64::INFINITY
                } else if peer == s {
                    o.w_in_first
                } else {
                    o.to_at(peer, col) + o.w_in
                };
                let out_c = if peer == s {
                    f64::INFINITY
                } else {
                    o.w_out + o.exit_at(row, peer)
                };
                let lb = (in_c + self.out_p[row as usize].0).min(self.in_p[col as usize].0 + out_c);
                let cur = self.best[i];
                lb.is_finite() && (cur.is_infinite() || lb * (1.0 - SLACK) <= cur + SLACK)
            };
            if is_stale {
                stale.entry(t).or_default().push(i);
            }
        }
        add_peer(o, peer, &mut self.in_p, &mut self.out_p);
        self.peers.push(peer);
        self.is_peer[peer] = true;
        let links: Vec<AttackLink> = self
            .peers
            .iter()
            .map(|&p| o.link.link(o.graph.node_id(p)))
            .collect();
        self.graph = o.graph.add_attacker(&o.link.attacker, &links)?;

        let cost = CostModel::deterministic(&self.graph, &o.policy);
        let limits = o.policy.limits;
        let amount = o.pairs.amount();
        if limits.max_hops == 0 {
            return Ok(());
        }
        for (t, idx) in stale {
            let bound = idx.iter().map(|&i| self.best[i]).fold(0.0, f64::max);
            let mut search = LabelSearch::new(
                &self.graph,
                &cost,
                t,
                amount,
                &limits,
                limits.max_hops - 1,
                None,
            );
            if bound.is_finite() {
                search.run_until(bound);
            } else {
                search.run();
            }
            for i in idx {
                let s = o.pairs.pairs()[i].0;
                self.researched += 1;
                match search.best_from(s) {
                    Some(c) => {
                        self.best[i] = c.w;
                        self.best_hops[i] = c.hops.min(u16::MAX as u32) as u16;
                        self.hijacked[i] = search.label_nodes(c.label).contains(&self.attacker);
                    }
                    None => {
                        self.best[i] = f64::INFINITY;
                        self.best_hops[i] = u16::MAX;
                        self.hijacked[i] = false;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Folds a channel to `peer` into the per-source and per-target routes
/// into and out of the attacker.
pub(crate) fn add_peer(
    o: &DistanceOracle<'_>,
    peer: NodeIndex,
    in_p: &mut [Key],
    out_p: &mut [Key],
) {
    for (col, &s) in o.sources.iter().enumerate() {
        let k = o.in_key(peer, col as u32, s);
        if key_lt(k, in_p[col]) {
            in_p[col] = k;
        }
    }
    for (row, out) in out_p.iter_mut().enumerate() {
        let k = o.out_key(row as u32, peer);
        if key_lt(k, *out) {
            *out = k;
        }
    }
}
