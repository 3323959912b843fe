//! Planning an outside attacker's channels.
//!
//! A new node opens zero-fee, short-delay channels one at a time to the peer
//! expected to pull the most payment routes through it. Candidates are
//! scored from a table of attacker-free route weights; every committed
//! channel is then checked exactly by routing.

mod experiments;
mod greedy;
mod oracle;
mod state;

pub use experiments::{colluding_attack, delay_sweep, fuzz_robustness, DelayPoint, FuzzPoint};
pub use greedy::{
    find_next_naive, find_next_optimized, greedy_attack, greedy_attack_with, random_baseline,
    random_baseline_curve_with, AttackConfig, AttackPlan, AttackStep, HijackMetric, NextPeer,
};
pub use oracle::{DistanceOracle, LinkTemplate};
pub use state::AttackState;
