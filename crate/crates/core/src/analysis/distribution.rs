use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{route_pairs, PairSample};
use crate::error::RoutingError;
use crate::graph::{ChannelGraph, Msat};
use crate::routing::{Route, RoutingPolicy};

/// Counts per bucket over routable pairs, with unroutable pairs kept apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram<K: Ord> {
    pub counts: BTreeMap<K, usize>,
    pub unroutable: usize,
}

impl<K: Ord + Copy> Histogram<K> {
    pub fn from_routes(routes: &[Option<Route>], key: impl Fn(&Route) -> K) -> Self {
        let mut counts = BTreeMap::new();
        let mut unroutable = 0;
        for r in routes {
            match r {
                Some(r) => *counts.entry(key(r)).or_insert(0) += 1,
                None => unroutable += 1,
            }
        }
        Histogram { counts, unroutable }
    }

    pub fn routable(&self) -> usize {
        self.counts.values().sum()
    }

    /// Lower median over routable pairs.
    pub fn median(&self) -> Option<K> {
        let total = self.routable();
        if total == 0 {
            return None;
        }
        let rank = (total - 1) / 2;
        let mut seen = 0;
        for (&k, &c) in &self.counts {
            seen += c;
            if seen > rank {
                return Some(k);
            }
        }
        None
    }
}

/// Hop counts of the routes chosen for every pair.
pub fn path_length_distribution<R: Rng + ?Sized>(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    pairs: &PairSample,
    rng: &mut R,
) -> Result<Histogram<usize>, RoutingError> {
    let routes = route_pairs(graph, policy, pairs, rng)?;
    Ok(Histogram::from_routes(&routes, |r| r.hops.len()))
}

/// Total fees of the routes chosen for every pair.
pub fn fee_volume_distribution<R: Rng + ?Sized>(
    graph: &ChannelGraph,
    policy: &RoutingPolicy,
    pairs: &PairSample,
    rng: &mut R,
) -> Result<Histogram<Msat>, RoutingError> {
    let routes = route_pairs(graph, policy, pairs, rng)?;
    Ok(Histogram::from_routes(&routes, |r| r.total_fee))
}
