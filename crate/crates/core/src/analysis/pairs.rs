use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::RoutingError;
use crate::graph::{Msat, NodeIndex};

/// Ordered (source, target) pairs sharing one payment amount.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSample {
    pairs: Vec<(NodeIndex, NodeIndex)>,
    amount: Msat,
}

impl PairSample {
    /// Every ordered pair of distinct nodes among the first `node_count`.
    pub fn all(node_count: usize, amount: Msat) -> Self {
        let mut pairs = Vec::with_capacity(node_count * node_count.saturating_sub(1));
        for s in 0..node_count {
            for t in 0..node_count {
                if s != t {
                    pairs.push((s, t));
                }
            }
        }
        PairSample { pairs, amount }
    }

    /// `count` distinct ordered pairs drawn uniformly with a seeded generator,
    /// or every pair when `count` reaches the total. Pairs are kept sorted.
    pub fn sampled(node_count: usize, count: usize, seed: u64, amount: Msat) -> Self {
        let total = node_count * node_count.saturating_sub(1);
        if count >= total {
            return Self::all(node_count, amount);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let span = node_count - 1;
        let mut pairs: Vec<(NodeIndex, NodeIndex)> = sample(&mut rng, total, count)
            .into_iter()
            .map(|i| {
                let s = i / span;
                let r = i % span;
                (s, if r < s { r } else { r + 1 })
            })
            .collect();
        pairs.sort_unstable();
        PairSample { pairs, amount }
    }

    /// An explicit list; rejects repeated endpoints and a zero amount.
    pub fn from_pairs(
        pairs: Vec<(NodeIndex, NodeIndex)>,
        amount: Msat,
    ) -> Result<Self, RoutingError> {
        if amount == 0 {
            return Err(RoutingError::ZeroAmount);
        }
        if pairs.iter().any(|&(s, t)| s == t) {
            return Err(RoutingError::SameEndpoints);
        }
        Ok(PairSample { pairs, amount })
    }

    /// The pairs whose flag in `keep` is set, in order.
    pub fn filtered(&self, keep: &[bool]) -> PairSample {
        PairSample {
            pairs: self
                .pairs
                .iter()
                .zip(keep)
                .filter(|(_, k)| **k)
                .map(|(p, _)| *p)
                .collect(),
            amount: self.amount,
        }
    }

    pub fn pairs(&self) -> &[(NodeIndex, NodeIndex)] {
        &self.pairs
    }

    pub fn amount(&self) -> Msat {
        self.amount
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The largest node index referenced plus one.
    pub fn node_bound(&self) -> usize {
        self.pairs
            .iter()
            .map(|&(s, t)| s.max(t) + 1)
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_counts_ordered_pairs() {
        let p = PairSample::all(5, 1000);
        assert_eq!(p.len(), 20);
        assert!(p.pairs().iter().all(|&(s, t)| s != t));
    }

    #[test]
    fn sample_is_reproducible_and_distinct() {
        let a = PairSample::sampled(50, 300, 9, 1000);
        let b = PairSample::sampled(50, 300, 9, 1000);
        assert_eq!(a, b);
        assert_eq!(a.len(), 300);
        let mut d = a.pairs().to_vec();
        d.dedup();
        assert_eq!(d.len(), 300);
        assert!(a.pairs().iter().all(|&(s, t)| s != t && s < 50 && t < 50));
        assert_ne!(a, PairSample::sampled(50, 300, 10, 1000));
    }

    #[test]
    fn oversized_sample_is_exhaustive() {
        assert_eq!(PairSample::sampled(4, 100, 1, 5), PairSample::all(4, 5));
    }

    #[test]
    fn explicit_pairs_validated() {
        assert_eq!(
            PairSample::from_pairs(vec![(1, 1)], 5),
            Err(RoutingError::SameEndpoints)
        );
        assert_eq!(
            PairSample::from_pairs(vec![(1, 2)], 0),
            Err(RoutingError::ZeroAmount)
        );
    }
}
