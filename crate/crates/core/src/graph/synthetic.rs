//! Seeded preferential-attachment topologies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{pack_short_channel_id, Channel, ChannelGraph, ChannelPolicy, Msat, NodeId};
use crate::error::GraphError;

/// Draws per-direction channel terms.
///
/// Each field is a default value plus the fraction of directions that use a
/// zero value and the fraction that use the minimum nonzero value; the rest
/// take the default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicySampler {
    pub base_fee: Msat,
    pub zero_base_fraction: f64,
    pub min_base_fraction: f64,
    pub prop_fee: u64,
    pub zero_prop_fraction: f64,
    pub min_prop_fraction: f64,
    pub delay: u32,
    /// Fraction of directions using `delay`; the others draw uniformly from
    /// `delay_alternatives`.
    pub default_delay_fraction: f64,
    pub delay_alternatives: Vec<u32>,
    pub min_capacity_sat: u64,
    pub max_capacity_sat: u64,
    pub tip_height: u32,
    /// Funding heights are uniform in `tip_height - height_window ..= tip_height`.
    pub height_window: u32,
}

impl Default for PolicySampler {
    fn default() -> Self {
        PolicySampler {
            base_fee: 1000,
            zero_base_fraction: 0.1,
            min_base_fraction: 0.1,
            prop_fee: 1000,
            zero_prop_fraction: 0.1,
            min_prop_fraction: 0.1,
            delay: 144,
            default_delay_fraction: 0.75,
            delay_alternatives: vec![9, 14, 40, 72, 288, 2016],
            min_capacity_sat: 20_000,
            max_capacity_sat: 1 << 24,
            tip_height: 600_000,
            height_window: 20_000,
        }
    }
}

impl PolicySampler {
    /// Every direction uses the given terms.
    pub fn uniform(base_fee: Msat, prop_fee: u64, delay: u32) -> Self {
        PolicySampler {
            base_fee,
            zero_base_fraction: 0.0,
            min_base_fraction: 0.0,
            prop_fee,
            zero_prop_fraction: 0.0,
            min_prop_fraction: 0.0,
            delay,
            default_delay_fraction: 1.0,
            delay_alternatives: Vec::new(),
            ..PolicySampler::default()
        }
    }

    fn validate(&self) -> Result<(), GraphError> {
        let fracs = [
            self.zero_base_fraction,
            self.min_base_fraction,
            self.zero_prop_fraction,
            self.min_prop_fraction,
            self.default_delay_fraction,
        ];
        if fracs.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(GraphError::InvalidSpec(
                "fractions must lie in [0, 1]".into(),
            ));
        }
        if self.zero_base_fraction + self.min_base_fraction > 1.0
            || self.zero_prop_fraction + self.min_prop_fraction > 1.0
        {
            return Err(GraphError::InvalidSpec("fee fractions sum above 1".into()));
        }
        if self.default_delay_fraction < 1.0 && self.delay_alternatives.is_empty() {
            return Err(GraphError::InvalidSpec(
                "delay alternatives are empty".into(),
            ));
        }
        if self.min_capacity_sat == 0 || self.min_capacity_sat > self.max_capacity_sat {
            return Err(GraphError::InvalidSpec("capacity range is empty".into()));
        }
        if self.height_window > self.tip_height {
            return Err(GraphError::InvalidSpec("height window exceeds tip".into()));
        }
        Ok(())
    }

    fn three_way<R: Rng>(rng: &mut R, zero: f64, min: f64, default: u64) -> u64 {
        let u: f64 = rng.random();
        if u < zero {
            0
        } else if u < zero + min {
            1
        } else {
            default
        }
    }

    pub fn sample_policy<R: Rng>(&self, rng: &mut R) -> ChannelPolicy {
        let base = Self::three_way(
            rng,
            self.zero_base_fraction,
            self.min_base_fraction,
            self.base_fee,
        );
        let prop = Self::three_way(
            rng,
            self.zero_prop_fraction,
            self.min_prop_fraction,
            self.prop_fee,
        );
        let delay = if rng.random::<f64>() < self.default_delay_fraction {
            self.delay
        } else {
            self.delay_alternatives[rng.random_range(0..self.delay_alternatives.len())]
        };
        ChannelPolicy::new(base, prop, delay)
    }

    /// Log-uniform capacity in millisatoshi, whole satoshi.
    pub fn sample_capacity<R: Rng>(&self, rng: &mut R) -> Msat {
        let lo = (self.min_capacity_sat as f64).ln();
        let hi = (self.max_capacity_sat as f64).ln();
        let sat = (lo + (hi - lo) * rng.random::<f64>()).exp().round() as u64;
        sat.clamp(self.min_capacity_sat, self.max_capacity_sat) * 1000
    }

    pub fn sample_height<R: Rng>(&self, rng: &mut R) -> u32 {
        self.tip_height - rng.random_range(0..=self.height_window)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub node_count: usize,
    /// Channels each arriving node opens to earlier nodes.
    pub attachment: usize,
    pub seed: u64,
    #[serde(default)]
    pub sampler: PolicySampler,
}

impl SyntheticSpec {
    pub fn new(node_count: usize, attachment: usize, seed: u64) -> Self {
        SyntheticSpec {
            node_count,
            attachment,
            seed,
            sampler: PolicySampler::default(),
        }
    }
}

/// Barabási–Albert graph: node `i` opens channels to `min(attachment, i)`
/// distinct earlier nodes chosen with probability proportional to degree.
///
/// Ids are zero-padded decimals so string order matches index order. The
/// result is connected and a pure function of `spec`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<ChannelGraph, GraphError> {
    if spec.node_count < 2 {
        return Err(GraphError::InvalidSpec(
            "node_count must be at least 2".into(),
        ));
    }
    if spec.attachment < 1 {
        return Err(GraphError::InvalidSpec(
            "attachment must be at least 1".into(),
        ));
    }
    spec.sampler.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let width = (spec.node_count - 1).to_string().len();
    let mut graph = ChannelGraph::new();
    for i in 0..spec.node_count {
        graph.add_node(NodeId::new(format!("{i:0width$}")));
    }

    // One entry per channel endpoint, so a uniform draw is degree-proportional.
    let mut endpoints: Vec<usize> = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(spec.attachment);
    for i in 1..spec.node_count {
        chosen.clear();
        let m = spec.attachment.min(i);
        if m == i {
            chosen.extend(0..i);
        } else {
            while chosen.len() < m {
                let j = endpoints[rng.random_range(0..endpoints.len())];
                if !chosen.contains(&j) {
                    chosen.push(j);
                }
            }
        }
        for &j in &chosen {
            let height = spec.sampler.sample_height(&mut rng);
            let capacity = spec.sampler.sample_capacity(&mut rng);
            let policy_a_to_b = spec.sampler.sample_policy(&mut rng);
            let policy_b_to_a = spec.sampler.sample_policy(&mut rng);
            let tx = graph.channel_count() as u64;
            graph.add_channel(Channel {
                id: pack_short_channel_id(height, tx, 0).to_string(),
                node_a: j,
                node_b: i,
                capacity,
                height,
                policy_a_to_b,
                policy_b_to_a,
            })?;
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    Ok(graph)
}
