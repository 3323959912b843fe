pub mod attack;
pub mod centrality;
pub mod delay;
pub mod fuzz;
pub mod game;
pub mod routes;
pub mod stats;
pub mod suggested;

use anyhow::Result;
use hijack_core::graph::ChannelGraph;
use hijack_core::routing::RoutingPolicy;
use hijack_core::PairSample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{load_graph, pair_sample, CommonArgs, GraphSource, PairSpec};

/// Resolved settings shared by the routing experiments.
#[derive(Serialize)]
pub struct Resolved<E: Serialize> {
    pub graph: GraphSource,
    pub policy: RoutingPolicy,
    pub amounts: Vec<u64>,
    pub pairs: PairSpec,
    pub seed: u64,
    #[serde(flatten)]
    pub experiment: E,
}

pub struct Setup {
    pub graph: ChannelGraph,
    pub source: GraphSource,
}

impl Setup {
    pub fn load(common: &CommonArgs) -> Result<Self> {
        let (graph, source) = load_graph(&common.graph, common.seed)?;
        Ok(Setup { graph, source })
    }

    pub fn pairs(&self, common: &CommonArgs, amount: u64) -> Result<PairSample> {
        pair_sample(&common.pairs, &self.graph, amount, common.seed)
    }

    pub fn resolved<E: Serialize>(
        &self,
        common: &CommonArgs,
        policy: &RoutingPolicy,
        experiment: E,
    ) -> Resolved<E> {
        Resolved {
            graph: self.source.clone(),
            policy: policy.clone(),
            amounts: common.amounts.clone(),
            pairs: common.pairs.clone(),
            seed: common.seed,
            experiment,
        }
    }
}

/// Independent stream `stream` of the run's seed.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}
