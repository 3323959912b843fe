use std::sync::OnceLock;

use crate::analysis::PairSample;
use crate::error::AttackError;
use crate::graph::{AttackLink, ChannelGraph, ChannelPolicy, Direction, Msat, NodeId, NodeIndex};
use crate::routing::{arc_id, CostModel, LabelSearch, RoutingPolicy};

const NONE: u32 = u32::MAX;

/// Terms of the channels the attacker opens.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkTemplate {
    pub attacker: NodeId,
    pub policy: ChannelPolicy,
    pub capacity: Msat,
}

impl LinkTemplate {
    pub fn link(&self, peer: &NodeId) -> AttackLink {
        AttackLink {
            peer: peer.clone(),
            policy: self.policy,
            capacity: self.capacity,
        }
    }
}

/// Least route weights of the attacker-free graph under a policy's
/// deterministic core, for one payment amount.
///
/// Two tables are kept: the weight from every pair source to every node,
/// with the source's own first hop free, and the weight from every node to
/// every pair target when that node forwards rather than pays. A route
/// through the attacker splits into one of each around the attacker's two
/// channels, and neither part may touch the attacker again.
pub struct DistanceOracle<'g> {
    pub(crate) graph: &'g ChannelGraph,
    pub(crate) policy: RoutingPolicy,
    pub(crate) pairs: PairSample,
    pub(crate) link: LinkTemplate,
    pub(crate) n: usize,
    pub(crate) sources: Vec<NodeIndex>,
    pub(crate) source_col: Vec<u32>,
    pub(crate) targets: Vec<NodeIndex>,
    pub(crate) target_row: Vec<u32>,
    /// `to[c * sources + col]`: weight from source `col` to node `c`.
    pub(crate) to: Vec<f64>,
    /// `exit[row * n + q]`: weight from `q`, forwarding, to target `row`.
    pub(crate) exit: Vec<f64>,
    /// Hop counts of the routes behind `to` and `exit`.
    pub(crate) to_hops: Vec<u16>,
    pub(crate) exit_hops: Vec<u16>,
    /// Weight of a peer's hop into the attacker, and of the sender's own.
    pub(crate) w_in: f64,
    pub(crate) w_in_first: f64,
    /// Weight of the attacker's hop out to a peer.
    pub(crate) w_out: f64,
    /// Three lightest `to + w_in` entries per source over every node, with
    /// hops and node.
    pub(crate) open_in: Vec<[Entry; 3]>,
    /// Three lightest `w_out + exit` entries per target over every node.
    pub(crate) open_out: Vec<[Entry; 3]>,
    by_source: OnceLock<Vec<Vec<u32>>>,
    by_target: OnceLock<Vec<Vec<u32>>>,
}

/// A route weight with its hop count, ordered as the route search orders
/// routes of equal weight.
pub(crate) type Key = (f64, u16);

pub(crate) const UNREACHED: Key = (f64::INFINITY, u16::MAX);

#[inline]
pub(crate) fn key_lt(a: Key, b: Key) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

#[inline]
pub(crate) fn key_add(a: Key, b: Key) -> Key {
    (a.0 + b.0, a.1.saturating_add(b.1))
}

/// `(weight, hops, node)`.
pub(crate) type Entry = (f64, u16, u32);

fn push_best3(best: &mut [Entry; 3], k: Key, node: u32) {
    let e = (k.0, k.1, node);
    if cmp_entry(&e, &best[2]).is_ge() {
        return;
    }
    best[2] = e;
    best.sort_by(cmp_entry);
}

fn cmp_entry(a: &Entry, b: &Entry) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
}

impl<'g> DistanceOracle<'g> {
    /// One backward search per node of `graph`.
    pub fn build(
        graph: &'g ChannelGraph,
        policy: &RoutingPolicy,
        pairs: &PairSample,
        link: &LinkTemplate,
    ) -> Result<Self, AttackError> {
        if graph.node_index(&link.attacker).is_some() {
            return Err(AttackError::AttackerExists(link.attacker.to_string()));
        }
        let n = graph.node_count();
        if let Some(&(s, t)) = pairs.pairs().iter().find(|&&(s, t)| s >= n || t >= n) {
            return Err(AttackError::PairOutOfRange(s.max(t)));
        }
        let amount = pairs.amount();
        let (w_in, w_in_first, w_out) = if n == 0 {
            (f64::INFINITY, f64::INFINITY, f64::INFINITY)
        } else {
            let probe = graph.add_attacker(&link.attacker, &[link.link(graph.node_id(0))])?;
            let cost = CostModel::deterministic(&probe, policy);
            let c = probe.channel_count() - 1;
            let out = arc_id(c, Direction::AToB);
            let inn = arc_id(c, Direction::BToA);
            let w = |arc, first| {
                cost.hop(arc, amount, first)
                    .map_or(f64::INFINITY, |(_, w)| w)
            };
            (w(inn, false), w(inn, true), w(out, false))
        };

        let mut source_col = vec![NONE; n];
        let mut target_row = vec![NONE; n];
        let mut sources = Vec::new();
        let mut targets = Vec::new();
        for &(s, t) in pairs.pairs() {
            if source_col[s] == NONE {
                source_col[s] = sources.len() as u32;
                sources.push(s);
            }
            if target_row[t] == NONE {
                target_row[t] = targets.len() as u32;
                targets.push(t);
            }
        }
        let ns = sources.len();
        let mut to = vec![f64::INFINITY; n * ns];
        let mut exit = vec![f64::INFINITY; targets.len() * n];
        let mut to_hops = vec![u16::MAX; n * ns];
        let mut exit_hops = vec![u16::MAX; targets.len() * n];
        let cost = CostModel::deterministic(graph, policy);
        let limits = policy.limits;
        if limits.max_hops > 0 {
            for y in 0..n {
                let row = target_row[y];
                if source_col[y] != NONE {
                    to[y * ns + source_col[y] as usize] = 0.0;
                    to_hops[y * ns + source_col[y] as usize] = 0;
                }
                if row != NONE {
                    exit[row as usize * n + y] = 0.0;
                    exit_hops[row as usize * n + y] = 0;
                }
                let mut search =
                    LabelSearch::new(graph, &cost, y, amount, &limits, limits.max_hops - 1, None);
                search.run();
                for x in 0..n {
                    if x == y {
                        continue;
                    }
                    let col = source_col[x];
                    if col == NONE && row == NONE {
                        continue;
                    }
                    let (mut first, mut inner) = (UNREACHED, UNREACHED);
                    for arc in cost.out_arcs(graph, x) {
                        let z = cost.arc(arc).to as usize;
                        for &id in search.front(z) {
                            let amt = search.label_amount(id);
                            let w = search.label_weight(id);
                            let hops = (search.label_hops(id) + 1).min(u16::MAX as u32) as u16;
                            if col != NONE {
                                if let Some((_, h)) = cost.hop(arc, amt, true) {
                                    if key_lt((w + h, hops), first) {
                                        first = (w + h, hops);
                                    }
                                }
                            }
                            if row != NONE {
                                if let Some((_, h)) = cost.hop(arc, amt, false) {
                                    if key_lt((w + h, hops), inner) {
                                        inner = (w + h, hops);
                                    }
                                }
                            }
                        }
                    }
                    if col != NONE {
                        to[y * ns + col as usize] = first.0;
                        to_hops[y * ns + col as usize] = first.1;
                    }
                    if row != NONE {
                        exit[row as usize * n + x] = inner.0;
                        exit_hops[row as usize * n + x] = inner.1;
                    }
                }
            }
        }

        let empty = [(f64::INFINITY, u16::MAX, NONE); 3];
        let mut open_in = vec![empty; ns];
        for (col, &s) in sources.iter().enumerate() {
            for p in 0..n {
                let win = if p == s { w_in_first } else { w_in };
                let k = key_add((to[p * ns + col], to_hops[p * ns + col]), (win, 1));
                push_best3(&mut open_in[col], k, p as u32);
            }
        }
        let mut open_out = vec![empty; targets.len()];
        for (row, best) in open_out.iter_mut().enumerate() {
            for q in 0..n {
                let k = key_add((w_out, 1), (exit[row * n + q], exit_hops[row * n + q]));
                push_best3(best, k, q as u32);
            }
        }

        Ok(DistanceOracle {
            graph,
            policy: policy.clone(),
            pairs: pairs.clone(),
            link: link.clone(),
            n,
            sources,
            source_col,
            targets,
            target_row,
            to,
            exit,
            to_hops,
            exit_hops,
            w_in,
            w_in_first,
            w_out,
            open_in,
            open_out,
            by_source: OnceLock::new(),
            by_target: OnceLock::new(),
        })
    }

    pub fn graph(&self) -> &'g ChannelGraph {
        self.graph
    }

    pub fn pairs(&self) -> &PairSample {
        &self.pairs
    }

    pub fn policy(&self) -> &RoutingPolicy {
        &self.policy
    }

    pub fn link(&self) -> &LinkTemplate {
        &self.link
    }

    /// Least weight from `source` to `target` avoiding the attacker, when
    /// `source` is a pair source.
    pub fn weight(&self, source: NodeIndex, target: NodeIndex) -> Option<f64> {
        let col = *self.source_col.get(source)?;
        if col == NONE || target >= self.n {
            return None;
        }
        let w = self.to[target * self.sources.len() + col as usize];
        w.is_finite().then_some(w)
    }

    /// Least weight from `node` to pair target `target` when `node` forwards
    /// and pays its own channel's fee.
    pub fn forwarding_weight(&self, node: NodeIndex, target: NodeIndex) -> Option<f64> {
        let row = *self.target_row.get(target)?;
        if row == NONE || node >= self.n {
            return None;
        }
        let w = self.exit[row as usize * self.n + node];
        w.is_finite().then_some(w)
    }

    #[inline]
    pub(crate) fn to_at(&self, c: NodeIndex, col: u32) -> f64 {
        self.to[c * self.sources.len() + col as usize]
    }

    #[inline]
    pub(crate) fn exit_at(&self, row: u32, q: NodeIndex) -> f64 {
        self.exit[row as usize * self.n + q]
    }

    #[inline]
    pub(crate) fn to_key(&self, c: NodeIndex, col: u32) -> Key {
        let i = c * self.sources.len() + col as usize;
        (self.to[i], self.to_hops[i])
    }

    #[inline]
    pub(crate) fn exit_key(&self, row: u32, q: NodeIndex) -> Key {
        let i = row as usize * self.n + q;
        (self.exit[i], self.exit_hops[i])
    }

    /// Key of the route `c` takes into the attacker after reaching it from
    /// source `col`, whose node is `s`.
    #[inline]
    pub(crate) fn in_key(&self, c: NodeIndex, col: u32, s: NodeIndex) -> Key {
        let win = if c == s { self.w_in_first } else { self.w_in };
        key_add(self.to_key(c, col), (win, 1))
    }

    /// Key of the route from the attacker through `q` to target `row`.
    #[inline]
    pub(crate) fn out_key(&self, row: u32, q: NodeIndex) -> Key {
        key_add((self.w_out, 1), self.exit_key(row, q))
    }

    /// Nodes with a finite weight from each source, lightest first.
    pub(crate) fn by_source(&self) -> &[Vec<u32>] {
        self.by_source.get_or_init(|| {
            (0..self.sources.len() as u32)
                .map(|col| self.sorted((0..self.n).map(|c| self.to_at(c, col))))
                .collect()
        })
    }

    /// Nodes with a finite forwarding weight to each target, lightest first.
    pub(crate) fn by_target(&self) -> &[Vec<u32>] {
        self.by_target.get_or_init(|| {
            (0..self.targets.len() as u32)
                .map(|row| self.sorted((0..self.n).map(|q| self.exit_at(row, q))))
                .collect()
        })
    }

    fn sorted(&self, weights: impl Iterator<Item = f64>) -> Vec<u32> {
        let mut v: Vec<(f64, u32)> = weights
            .enumerate()
            .filter(|(_, w)| w.is_finite())
            .map(|(c, w)| (w, c as u32))
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        v.into_iter().map(|(_, c)| c).collect()
    }
}
